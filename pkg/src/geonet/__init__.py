"""Geodesic networks, curve shortening and width sweepouts on compact surfaces with boundary."""

from .errors import *  # noqa: F401,F403
from .surfaces import FlatConvexDomain, SphericalCap, SurfaceOfRevolution, SurfaceSpec, TangentVector, from_json
from .geodesics import (GeodesicPath, connect, drop_to_boundary, find_boundary_geodesic_loop,
                        find_free_boundary_geodesic, second_variation_normal, shoot)
from .birkhoff import (BrokenGeodesic, ShorteningOutcome, homotopy_extract, project_to_lambda, shorten_run,
                       shorten_step)
from .network import (GeodesicNetwork, check_stationarity, extract_faces, gauss_bonnet_audit, mass,
                      parity_decomposition)
from .cycles import Cycle, Sweepout
from .sweepout import (faces_sweepout_bound, inscribed_polygon_sweepout, ls_lower_bound, parallel_sweepout,
                       rotational_sweepout, width_report)
from .render import render_svg

__version__ = "0.1.0"
