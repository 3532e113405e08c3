"""Closed-form spectral-gap bounds, admissibility predicates and the numeric verification chain."""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .eigen import _as_spindle, default_grid, form_bound_estimate, mesh_study, schrodinger_ground, spindle_lambda1
from .errors import DomainError, ModelError
from .models import Spindle, ricci_bound_cone, sphere_section
from .radial import Grid
from .scalar import R_ell


def _pos(x):
    return x if x > 0 else 0 * x


def alpha_t(N, t):
    """``N/(N-1) [1 + (t/(1-t))/(N-1)^2]^{-1}``; decreasing in t, tends to 0 as t -> 1."""
    if not N > 1:
        raise DomainError("alpha_t needs N > 1")
    if not (0 <= t < 1):
        raise DomainError("alpha_t needs 0 <= t < 1 (the limit at t = 1 is 0)")
    q = t / (1 - t)
    return N / (N - 1) / (1 + q / (N - 1) ** 2)


def alpha_bar_s(n, s):
    """``(n + s/(1-s)) / (n - 1 + s/(1-s))`` for 0 <= s < n/(n-1), with value 1 at s = 1."""
    if not (0 <= s < n / (n - 1)):
        raise DomainError(f"s must lie in [0, {n}/{n - 1})")
    if s == 1:
        val = 1.0
    else:
        q = s / (1 - s)
        val = (n + q) / (n - 1 + q)
    ref = alpha_t(n, s * (n - 1) / n)
    assert abs(val - ref) <= 1e-14 * max(1.0, abs(ref)) * 4, (val, ref)
    return val


def critical_t(n, kappa):
    """Coupling ``(1-kappa)^+ 4(n-1)/(n(n-2))`` that makes the Hardy term cancel exactly."""
    return _pos(1 - kappa) * 4 * (n - 1) / (n * (n - 2))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    n: int
    kappa: object
    threshold: object
    admissible: bool
    closed_form_bound: object
    critical_ratio: object
    ketterer_ok: Optional[bool]
    density_ok: bool


def admissibility(n, kappa, lambda1_N=None):
    """Admissibility of the cone Ricci bound at a singularity with section parameter kappa.

    Exact when ``kappa`` (and ``lambda1_N``) are ints or Fractions.
    """
    if n < 3:
        raise DomainError("only n >= 3 is supported")
    threshold = Fraction(n * (6 - n) - 4, 4 * (n - 1))
    limit = Fraction(n, n - 1)
    bound = 4 * _pos(1 - kappa) / Fraction(n - 2)
    by_threshold = kappa > threshold
    by_bound = bound < limit
    assert by_threshold == by_bound, (n, kappa)
    ketterer = None
    if lambda1_N is not None:
        ketterer = Fraction(n - 2, 2) ** 2 + lambda1_N >= 1
    return AdmissibilityVerdict(
        n=n,
        kappa=kappa,
        threshold=threshold,
        admissible=by_threshold,
        closed_form_bound=bound,
        critical_ratio=bound / limit,
        ketterer_ok=ketterer,
        density_ok=n >= 4,
    )


@dataclass(frozen=True)
class GapBoundReport:
    bound: float
    alpha: float
    t: float
    branch: str
    inputs: dict
    intermediate_bound: Optional[float] = None
    corollary_bound: Optional[float] = None


def _min_branch(K, cone):
    if K <= cone:
        return K, "bulkK"
    return cone, "cone"


def gap_bound_single(n, K, kappa, ell, rho):
    """Lower bound for the spectral gap with one conical singularity.

    ``alpha_t * min{K, (n-1) ell - n (1-kappa)^+ (pi/(2 rho))^2}`` with t
    recomputed from kappa.  The intermediate value
    ``alpha_t * min{K, (n-1) ell - (1/3)(1-kappa)^+ [2(n+1)L + (n-2) ell]}``,
    L = (pi/(2 rho))^2, is reported alongside; it is never smaller.
    """
    if ell < 0:
        raise DomainError("the single-singularity bound is stated for ell >= 0")
    if rho <= 0:
        raise DomainError("rho must be positive")
    if ell > 0 and rho > R_ell(ell) * (1 + 1e-12):
        raise DomainError(f"rho = {rho} exceeds R_ell = {R_ell(ell)}")
    verdict = admissibility(n, kappa)
    t = critical_t(n, kappa)
    if not verdict.admissible or t >= 1:
        raise DomainError(
            f"kappa = {kappa} is not above the admissibility threshold {float(verdict.threshold)} for n = {n}"
        )
    t = float(t)
    a = alpha_t(n, t)
    c = max(1.0 - float(kappa), 0.0)
    L = (math.pi / (2.0 * rho)) ** 2
    cone = (n - 1) * ell - n * c * L
    inter = (n - 1) * ell - c * (2 * (n + 1) * L + (n - 2) * ell) / 3.0
    val, branch = _min_branch(K, cone)
    corollary = None
    if ell > 0 and math.isclose(rho, R_ell(ell), rel_tol=1e-12) and kappa <= 1:
        corollary = a * min(K, (n * float(kappa) - 1) * ell)
    return GapBoundReport(
        bound=a * val,
        alpha=a,
        t=t,
        branch=branch,
        inputs={"n": n, "K": K, "kappa": float(kappa), "ell": ell, "rho": rho},
        intermediate_bound=a * min(K, inter),
        corollary_bound=corollary,
    )


def gap_bound_multi(n, K, caps):
    """Bound for several disjoint singularities, with kappa = inf of the cap kappas."""
    caps = list(caps)
    if not caps:
        a = n / (n - 1)
        return GapBoundReport(a * K, a, 0.0, "bulkK", {"n": n, "K": K, "caps": 0})
    kappa = min(c.kappa for c in caps)
    if not admissibility(n, kappa).admissible:
        raise DomainError(f"kappa = {kappa} is not above the admissibility threshold for n = {n}")
    t = float(critical_t(n, kappa))
    a = alpha_t(n, t)
    c = max(1.0 - kappa, 0.0)
    terms = []
    for cap in caps:
        if cap.ell < 0:
            raise DomainError("cap curvature must be >= 0")
        terms.append((n - 1) * cap.ell - c * ((n + 1) * math.pi**2 / (2 * cap.rho**2) + (n - 2) * cap.ell) / 3.0)
    val, branch = _min_branch(K, min(terms))
    corollary = None
    if kappa <= 1 and all(math.isclose(cap.ell, (math.pi / (2 * cap.rho)) ** 2, rel_tol=1e-12) for cap in caps):
        corollary = a * min(K, (n * kappa - 1) * min(cap.ell for cap in caps))
    return GapBoundReport(
        bound=a * val,
        alpha=a,
        t=t,
        branch=branch,
        inputs={"n": n, "K": K, "kappa": kappa, "caps": len(caps)},
        corollary_bound=corollary,
    )


def gap_bound_hardy(n, K, s_list, separated=False):
    """``alpha_bar_s * K`` with s the sum of the weights, or their sup when the centers are separated."""
    s_list = [float(s) for s in s_list]
    if any(s < 0 for s in s_list):
        raise DomainError("weights s_i must be nonnegative")
    s = (max(s_list) if s_list else 0.0) if separated else sum(s_list)
    if s >= n / (n - 1):
        raise DomainError(f"s = {s} must be below n/(n-1) = {n / (n - 1)}")
    return alpha_bar_s(n, s) * K


# ---------------------------------------------------------------------------
# taming thresholds

def taming_radius(n, form_bound):
    """Sphere radius R at which ``4(1 - 1/R^2)/(n-2)`` equals ``form_bound``."""
    x = 1.0 - form_bound * (n - 2) / 4.0
    if x <= 0:
        return math.inf
    return 1.0 / math.sqrt(x)


def taming_thresholds(n=3):
    """Radii of the large-sphere cone where the form bound of k^- hits n/(n-1), 1 and 1/2."""
    out = (taming_radius(n, n / (n - 1)), taming_radius(n, 1.0), taming_radius(n, 0.5))
    if n == 3:
        ref = (math.sqrt(8 / 5), math.sqrt(8 / 6), math.sqrt(8 / 7))
        for a, b in zip(out, ref):
            assert abs(a - b) <= 1e-12, (a, b)
    return out


def cone_form_bound(R, n=3, grid=None, cprime_sweep=None):
    """Numeric form bound of ``k^- = (n-2)(1-1/R^2)/r^2`` on the flat cone over S^{n-1}_R."""
    sp = Spindle(1.0, sphere_section(n, R), 0.0, "natural")
    grid = grid or Grid.geometric_span(1.0, 4000, 60.0)
    c = (n - 2) * max(1.0 - 1.0 / R**2, 0.0)
    return form_bound_estimate(lambda r: c / r**2, sp, grid, cprime_sweep)


def taming_crossing(target, n=3, grid=None, bracket=(1.0 + 1e-9, 4.0), rtol=1e-6, maxiter=80):
    """Radius R where the numeric form bound crosses ``target`` (bisection; C increases with R)."""
    lo, hi = bracket
    f_lo = cone_form_bound(lo, n, grid)[0] - target
    f_hi = cone_form_bound(hi, n, grid)[0] - target
    if f_lo > 0 or f_hi < 0:
        raise DomainError(f"target {target} is not bracketed by R in {bracket}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if cone_form_bound(mid, n, grid)[0] < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# verification chain

GAP_KIND_CLOSED = "lambda_1: spectrum of a closed spindle is discrete"
CHAIN_MESH_RTOL = 0.02


@dataclass
class SpectralReport:
    model: str
    n: int
    ell: float
    kappa: float
    lambda1: float
    lambda1_kind: str
    binding_mode: int
    per_mode: dict
    ground: dict
    alpha: dict
    chain: dict
    bound: float
    corollary_bound: Optional[float]
    admissibility: AdmissibilityVerdict
    mesh: dict
    tol: float
    status: str
    failures: list = field(default_factory=list)
    cells: int = 0


def _supercritical(n, kappa, t):
    """True when ``-t n/(n-1) Delta - (n-2)(1-kappa)^+ / r^2`` is unbounded below at a tip."""
    c = (n - 2) * max(1.0 - kappa, 0.0)
    if c == 0:
        return False
    scale = t * n / (n - 1)
    return c > scale * ((n - 2) / 2.0) ** 2 * (1 + 1e-12)


def verify_chain(model, grid=None, cells=4000, extra_t=(), mesh_levels=2):
    """Compute every link of ``lambda_1 >= alpha_t ground(t) >= bound`` on a closed spindle.

    ground(t) is the bottom of ``-t n/(n-1) Delta + k`` with the cone Ricci
    bound k.  For t below the critical coupling the operator is unbounded
    below and -inf is recorded analytically.  A failed link gives status
    "fail"; a ground state whose doubled meshes disagree by more than 2 %
    gives "inconclusive".
    """
    name = getattr(model, "name", "") or "spindle"
    sp = _as_spindle(model)
    if not sp.is_closed:
        raise ModelError("verify_chain needs a closed spindle")
    n, ell, kappa = sp.n, sp.ell, sp.section.kappa
    grid = grid or default_grid(sp, cells)
    verdict = admissibility(n, kappa, sp.section.lambda1)
    gap = spindle_lambda1(sp, grid)
    lam = gap.lambda1
    tol = 1e-3 * max(abs(lam), ell)

    def k(r):
        return ricci_bound_cone(n, ell, kappa, r)

    t_star = float(critical_t(n, kappa))
    ts = sorted({0.0, (n - 1) / (2.0 * n), *[float(x) for x in extra_t]} | ({t_star} if t_star < 1 else set()))
    ground, alpha, chain, mesh = {}, {}, {}, {}
    failures = []
    for t in ts:
        key = f"{t:.12g}"
        a = alpha_t(n, t)
        alpha[key] = a
        if (t == 0.0 and kappa < 1) or _supercritical(n, kappa, t):
            g = -math.inf
        elif t == 0.0:
            g = (n - 1) * ell
        else:
            study = mesh_study(lambda gr: schrodinger_ground(sp, k, t, gr), grid, CHAIN_MESH_RTOL, mesh_levels)
            g = study.values[0]
            mesh[key] = {"values": study.values, "cells": study.cells, "converged": study.converged}
        ground[key] = g
        chain[key] = a * g
        if a * g > lam + tol:
            failures.append(f"alpha_t ground(t) = {a * g:.6g} exceeds lambda_1 = {lam:.6g} at t = {key}")

    status = "pass"
    bound, corollary = math.nan, None
    if verdict.admissible:
        rep = gap_bound_single(n, math.inf, kappa, ell, R_ell(ell))
        bound, corollary = rep.bound, rep.corollary_bound
        key = f"{t_star:.12g}"
        if chain[key] < bound - tol:
            failures.append(f"alpha_t ground(t) = {chain[key]:.6g} below the closed-form bound {bound:.6g}")
        if lam < bound - tol:
            failures.append(f"lambda_1 = {lam:.6g} below the closed-form bound {bound:.6g}")
    if failures:
        status = "fail"
    elif not all(m["converged"] for m in mesh.values()):
        status = "inconclusive"
    return SpectralReport(
        model=name,
        n=n,
        ell=ell,
        kappa=kappa,
        lambda1=lam,
        lambda1_kind=GAP_KIND_CLOSED,
        binding_mode=gap.binding_mode,
        per_mode=gap.per_mode,
        ground=ground,
        alpha=alpha,
        chain=chain,
        bound=bound,
        corollary_bound=corollary,
        admissibility=verdict,
        mesh=mesh,
        tol=tol,
        status=status,
        failures=failures,
        cells=grid.cells,
    )
