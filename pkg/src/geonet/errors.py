"""Exception hierarchy shared by all geonet modules."""


class GeonetError(Exception):
    """Base class for every error raised by the package."""


class PointOutsideDomain(GeonetError):
    pass


class StepFailure(GeonetError):
    """The adaptive integrator could not take a step above the minimum size."""


class NoConvergence(GeonetError):
    pass


class PathLeavesDomain(GeonetError):
    pass


class NoLoopFound(GeonetError):
    pass


class NotFreeBoundary(GeonetError):
    pass


class SegmentTooLong(GeonetError):
    pass


class NotCollapsed(GeonetError):
    pass


class MalformedNetwork(GeonetError):
    pass


class NonManifoldIncidence(GeonetError):
    pass


class TriangulationFailure(GeonetError):
    pass


class ParityInconsistency(GeonetError):
    pass


class PreconditionUnverified(GeonetError):
    pass


class NotFlat(GeonetError):
    pass


class WrongSurfaceKind(GeonetError):
    pass


class NUnreachable(GeonetError):
    pass


class UnknownScenario(GeonetError):
    pass


class ConfigInvalid(GeonetError):
    pass


class IoFailure(GeonetError):
    pass
