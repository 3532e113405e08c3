"""Scalar functions of the curvature parameter ``ell``.

All functions accept floats or numpy arrays for the radius and follow numpy
broadcasting.  ``ell`` is always a scalar.
"""
import math

import numpy as np

from .errors import DomainError

# |ell| r^2 below this switches sin_ell / cos_ell to their power series
SERIES_CUTOFF = 1e-4


def R_ell(ell):
    """Comparison radius: pi / (2 sqrt(ell)) for ell > 0, infinity otherwise."""
    if ell > 0:
        return math.pi / (2.0 * math.sqrt(ell))
    return math.inf


def _series_sin(ell, r):
    # r * sum_k (-ell r^2)^k / (2k+1)!
    x = -ell * r * r
    return r * (1.0 + x / 6.0 * (1.0 + x / 20.0 * (1.0 + x / 42.0 * (1.0 + x / 72.0))))


def _series_cos(ell, r):
    x = -ell * r * r
    return 1.0 + x / 2.0 * (1.0 + x / 12.0 * (1.0 + x / 30.0 * (1.0 + x / 56.0)))


def _check_radius(ell, r):
    if np.any(r < 0):
        raise DomainError("radius must be nonnegative")
    if ell > 0 and np.any(r > 2.0 * R_ell(ell) * (1.0 + 1e-14)):
        raise DomainError(
            f"sin_ell undefined beyond 2R_ell = {2.0 * R_ell(ell):.16g} for ell = {ell}"
        )


def _eval(ell, r, closed, series):
    r_arr = np.asarray(r, dtype=float)
    if ell > 0:
        s = math.sqrt(ell)
        out = closed(s, r_arr)
    elif ell < 0:
        s = math.sqrt(-ell)
        out = closed(s, r_arr)
    else:
        out = series(0.0, r_arr)
    if ell != 0:
        small = np.abs(ell) * r_arr * r_arr < SERIES_CUTOFF
        if np.any(small):
            out = np.where(small, series(ell, r_arr), out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def sin_ell(ell, r):
    """The warping function sin_ell(r).

    ``sin(sqrt(ell) r)/sqrt(ell)`` for ell > 0, ``r`` for ell = 0 and
    ``sinh(sqrt(-ell) r)/sqrt(-ell)`` for ell < 0.
    """
    _check_radius(ell, np.asarray(r, dtype=float))
    if ell >= 0:
        closed = lambda s, x: np.sin(s * x) / s
    else:
        closed = lambda s, x: np.sinh(s * x) / s
    return _eval(ell, r, closed, _series_sin)


def cos_ell(ell, r):
    """Derivative of :func:`sin_ell` with respect to r."""
    _check_radius(ell, np.asarray(r, dtype=float))
    if ell >= 0:
        closed = lambda s, x: np.cos(s * x)
    else:
        closed = lambda s, x: np.cosh(s * x)
    return _eval(ell, r, closed, _series_cos)


def clamped_trig(ell, r):
    """Clamped sine, cosine and tangent: evaluated at ``min(r, R_ell)``.

    For ell > 0 and r >= R_ell the cosine is exactly 0 and the tangent is
    ``inf``.  For ell <= 0 the clamp is inactive.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("radius must be nonnegative")
    R = R_ell(ell)
    rc = np.minimum(r_arr, R)
    usin = np.asarray(sin_ell(ell, rc), dtype=float)
    ucos = np.asarray(cos_ell(ell, rc), dtype=float)
    beyond = r_arr >= R
    ucos = np.where(beyond, 0.0, ucos)
    with np.errstate(divide="ignore"):
        utan = np.where(beyond, np.inf, usin / np.where(beyond, 1.0, ucos))
    if np.ndim(r) == 0:
        return float(usin), float(ucos), float(utan)
    return usin, ucos, utan


def inv_utan2(ell, r):
    """``1 / utan_ell(r)**2`` with an exact zero for r >= R_ell.

    Diverges like 1/r^2 at r = 0 (returns inf there).
    """
    _, ucos, utan = clamped_trig(ell, r)
    ucos = np.asarray(ucos)
    utan = np.asarray(utan)
    with np.errstate(divide="ignore"):
        out = np.where(ucos == 0.0, 0.0, 1.0 / (utan * utan))
    if np.ndim(r) == 0:
        return float(out)
    return out


def euler_f(t):
    """``t / sin(sqrt(t))**2`` on (0, pi^2/4]; continuous extension f(0) = 1."""
    t = float(t)
    return 1.0 + t * _euler_h(t)


def _euler_h(x):
    # (x / sin^2(sqrt x) - 1) / x, computed without cancellation for small x
    if x < 1e-3:
        return 1.0 / 3.0 + x * (1.0 / 15.0 + x * (2.0 / 189.0 + x * (1.0 / 675.0 + x * 2.0 / 10395.0)))
    return (x / math.sin(math.sqrt(x)) ** 2 - 1.0) / x


def tan_gap(ell, L, r):
    """``1/tan_ell(r)^2 - 1/tan_L(r)^2`` for 0 <= ell <= L, 0 < r <= pi/(2 sqrt(L)).

    Evaluated through ``1/tan^2 = 1/sin^2 - ell`` so that the two 1/r^2
    singularities cancel analytically.  The result always lies in
    ``[0, 2/3 (L - ell)]``.
    """
    ell = float(ell)
    L = float(L)
    r = float(r)
    if not (0.0 <= ell <= L):
        raise DomainError(f"tan_gap needs 0 <= ell <= L, got ell={ell}, L={L}")
    if L == 0.0:
        if r <= 0.0:
            raise DomainError("tan_gap needs r > 0")
        return 0.0
    rmax = math.pi / (2.0 * math.sqrt(L))
    if not (0.0 < r <= rmax * (1.0 + 1e-15)):
        raise DomainError(f"tan_gap needs 0 < r <= {rmax!r}, got {r!r}")
    r = min(r, rmax)
    gap = ell * _euler_h(ell * r * r) - L * _euler_h(L * r * r) + (L - ell)
    upper = 2.0 / 3.0 * (L - ell)
    slack = 1e-12 * max(1.0, L)
    assert -slack <= gap <= upper + slack, (ell, L, r, gap)
    return min(max(gap, 0.0), upper)
