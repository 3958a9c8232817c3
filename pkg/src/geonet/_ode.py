"""Adaptive Dormand-Prince 5(4) integrator for geodesics of the blended-cap
surface of revolution, written in ambient R^3 coordinates.

The surface is the zero set of F(x, y, z) = y^2 + z^2 - R(x) with R = r^2.
Working in R^3 instead of the (u, theta) chart keeps the apex regular.
Parameter vector layout: (cap_radius, slope, intercept, u_junction).
"""

import numpy as np
from numba import njit

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, 0] = 1 / 5
_A[2, :2] = (3 / 40, 9 / 40)
_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

H_MIN = 1e-14


@njit(cache=True)
def profile_R(x, p):
    """R = r^2 and its first two derivatives in the axial coordinate."""
    rho, a, b, u0 = p[0], p[1], p[2], p[3]
    if x <= u0:
        return 2.0 * rho * x - x * x, 2.0 * rho - 2.0 * x, -2.0
    r = a * x + b
    return r * r, 2.0 * a * r, 2.0 * a * a


@njit(cache=True)
def _rhs(y, p, out):
    R, dR, ddR = profile_R(y[0], p)
    gx, gy, gz = -dR, 2.0 * y[1], 2.0 * y[2]
    vx, vy, vz = y[3], y[4], y[5]
    q = -ddR * vx * vx + 2.0 * (vy * vy + vz * vz)
    s = q / (gx * gx + gy * gy + gz * gz)
    out[0] = vx
    out[1] = vy
    out[2] = vz
    out[3] = -s * gx
    out[4] = -s * gy
    out[5] = -s * gz


@njit(cache=True)
def _step(y, h, p, k, c, a, b5, b4, y5, err):
    tmp = np.empty(6)
    for i in range(7):
        for j in range(6):
            acc = y[j]
            for m in range(i):
                acc += h * a[i, m] * k[m, j]
            tmp[j] = acc
        _rhs(tmp, p, k[i])
    emax = 0.0
    for j in range(6):
        s5 = 0.0
        s4 = 0.0
        for i in range(7):
            s5 += b5[i] * k[i, j]
            s4 += b4[i] * k[i, j]
        y5[j] = y[j] + h * s5
        e = abs(h * (s5 - s4))
        if e > emax:
            emax = e
    err[0] = emax


@njit(cache=True)
def project(y, p):
    """Pull a state back onto the surface and its tangent plane, unit speed."""
    out = y.copy()
    for _ in range(3):
        R, dR, _d = profile_R(out[0], p)
        F = out[1] ** 2 + out[2] ** 2 - R
        gx, gy, gz = -dR, 2.0 * out[1], 2.0 * out[2]
        g2 = gx * gx + gy * gy + gz * gz
        out[0] -= F * gx / g2
        out[1] -= F * gy / g2
        out[2] -= F * gz / g2
    R, dR, _d = profile_R(out[0], p)
    gx, gy, gz = -dR, 2.0 * out[1], 2.0 * out[2]
    g2 = gx * gx + gy * gy + gz * gz
    dot = (out[3] * gx + out[4] * gy + out[5] * gz) / g2
    out[3] -= dot * gx
    out[4] -= dot * gy
    out[5] -= dot * gz
    nv = np.sqrt(out[3] ** 2 + out[4] ** 2 + out[5] ** 2)
    out[3] /= nv
    out[4] /= nv
    out[5] /= nv
    return out


@njit(cache=True)
def integrate(y0, T, p, x_stop, use_event, atol, c, a, b5, b4):
    """Integrate for arc length T, optionally stopping where x crosses x_stop.

    Returns (state, arc length reached, status) with status 0 = reached T,
    1 = boundary hit (localized by bisection on the step size), -1 = step
    size underflow.
    """
    y = y0.copy()
    t = 0.0
    h = min(0.05, T)
    k = np.empty((7, 6))
    y5 = np.empty(6)
    err = np.empty(1)
    if T <= 0.0:
        return y, 0.0, 0
    while t < T:
        if h > T - t:
            h = T - t
        _step(y, h, p, k, c, a, b5, b4, y5, err)
        if err[0] <= atol or h <= H_MIN:
            if use_event and y5[0] > x_stop:
                lo = 0.0
                hi = h
                ylo = y.copy()
                for _ in range(200):
                    if hi - lo < 1e-14:
                        break
                    mid = 0.5 * (lo + hi)
                    _step(y, mid, p, k, c, a, b5, b4, y5, err)
                    if y5[0] > x_stop:
                        hi = mid
                    else:
                        lo = mid
                        ylo[:] = y5
                    if abs(y5[0] - x_stop) < 1e-13:
                        break
                if lo == 0.0:
                    ylo[:] = y
                return project(ylo, p), t + lo, 1
            u0 = p[3]
            if (y[0] - u0) * (y5[0] - u0) < 0.0 and abs(y[0] - u0) > 1e-13:
                # land exactly on the curvature jump so no step straddles it
                lo = 0.0
                hi = h
                side = y[0] - u0
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    _step(y, mid, p, k, c, a, b5, b4, y5, err)
                    if (y5[0] - u0) * side > 0.0:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-15 or abs(y5[0] - u0) < 1e-14:
                        break
                _step(y, hi, p, k, c, a, b5, b4, y5, err)
                h = hi
            t += h
            y[:] = y5
            if err[0] == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * (atol / err[0]) ** 0.2
            h *= min(5.0, max(0.2, fac))
        else:
            fac = 0.9 * (atol / err[0]) ** 0.2
            h *= max(0.1, fac)
            if h < H_MIN:
                return y, t, -1
    return project(y, p), t, 0


@njit(cache=True)
def integrate_to(y0, ts, p, atol, c, a, b5, b4):
    """States at the increasing arc lengths ts (ts[0] may be 0)."""
    n = ts.shape[0]
    out = np.empty((n, 6))
    y = y0.copy()
    t = 0.0
    for i in range(n):
        y, _t, status = integrate(y, ts[i] - t, p, 0.0, False, atol, c, a, b5, b4)
        if status < 0:
            out[i:, :] = np.nan
            return out
        out[i] = y
        t = ts[i]
    return out


def flow(y0, length, params, atol=1e-13):
    y, t, status = integrate(np.asarray(y0, float), float(length), params, 0.0, False,
                             atol, _C, _A, _B5, _B4)
    return y, t, status


def flow_until(y0, length, params, x_stop, atol=1e-13):
    return integrate(np.asarray(y0, float), float(length), params, float(x_stop), True,
                     atol, _C, _A, _B5, _B4)


def flow_samples(y0, ts, params, atol=1e-13):
    return integrate_to(np.asarray(y0, float), np.asarray(ts, float), params, atol,
                        _C, _A, _B5, _B4)
