"""Tridiagonal generalized eigenvalues, spindle spectral gaps and Schrodinger ground states."""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import kernels
from .errors import ConvergenceError, DomainError, ModelError, SingularPencilError
from .models import ConicalManifoldModel, Spindle
from .radial import Grid, RadialOperatorSpec, assemble

RTOL = 1e-10
ATOL = 1e-14
MAXITER = 600


def thread_count():
    """Worker threads for mode sweeps, capped by ``CONESPEC_THREADS``."""
    cap = os.environ.get("CONESPEC_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError:
            pass
    return min(n, 8)


def pmap(fn, items):
    """Order-preserving parallel map (threads; the compiled kernel drops the GIL)."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


@dataclass
class EigResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    mode_index: int = 0
    vectors: Optional[np.ndarray] = field(default=None, repr=False)


def _scaled(pencil):
    s = 1.0 / np.sqrt(pencil.mass)
    d = pencil.diag * s * s
    e = pencil.off * s[:-1] * s[1:]
    return d, e, s


def _gershgorin(d, e):
    ae = np.abs(e)
    rad = np.zeros_like(d)
    rad[:-1] += ae
    rad[1:] += ae
    return float(np.min(d - rad)), float(np.max(d + rad))


def _pivmin(e2):
    return np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))


def _bisect(d, e2, m, count, lo, hi, rtol=RTOL, atol=ATOL):
    # widen by a relative margin so the bracket is strict
    span = max(hi - lo, abs(lo), abs(hi), atol)
    lo -= 1e-10 * span + atol
    hi += 1e-10 * span + atol
    vals, lower, upper, done = kernels.bisect_lowest(
        d, e2, m, count, lo, hi, rtol, atol, MAXITER, _pivmin(e2)
    )
    if not np.all(done):
        k = int(np.flatnonzero(~done)[0])
        raise ConvergenceError(
            f"bisection for eigenvalue {k} did not converge in {MAXITER} steps",
            interval=(float(lower[k]), float(upper[k])),
        )
    return vals


def _inverse_iteration(d, e, lam, prev, rng, iters=3):
    n = d.size
    shift = lam + 1e-12 * max(abs(lam), 1e-300) + 1e-300
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - shift
    ab[2, :-1] = e
    y = rng.standard_normal(n)
    for _ in range(iters):
        for p in prev:
            y -= (p @ y) * p
        y = solve_banded((1, 1), ab, y, check_finite=False)
        nrm = np.linalg.norm(y)
        if not np.isfinite(nrm) or nrm == 0:
            break
        y /= nrm
    for p in prev:
        y -= (p @ y) * p
    return y / np.linalg.norm(y)


def tridiag_lowest(pencil, count=1, vectors=False, mode_index=0, residuals=True):
    """Lowest ``count`` generalized eigenvalues of a pencil by Sturm bisection.

    The pencil is reduced to ``B^{-1/2} A B^{-1/2}`` (still tridiagonal).
    Eigenvectors come from inverse iteration when ``vectors`` or
    ``residuals`` is requested; residuals are ``|Av - lam Bv| / |Bv|``.
    """
    M = pencil.size
    if not (1 <= count <= M):
        raise DomainError(f"count must lie in [1, {M}]")
    d, e, s = _scaled(pencil)
    e2 = e * e
    lo, hi = _gershgorin(d, e)
    vals = _bisect(d, e2, np.ones(M), count, lo, hi)
    res = np.full(count, np.nan)
    vecs = None
    if vectors or residuals:
        rng = np.random.default_rng(12345)
        ys = []
        for lam in vals:
            close = [p for p, mu in zip(ys, vals) if abs(mu - lam) <= 1e-6 * max(abs(lam), 1.0)]
            ys.append(_inverse_iteration(d, e, lam, close, rng))
        Y = np.array(ys).T
        V = Y * s[:, None]
        for k, lam in enumerate(vals):
            v = V[:, k]
            Bv = pencil.mass * v
            res[k] = np.linalg.norm(pencil.matvec(v) - lam * Bv) / np.linalg.norm(Bv)
        if vectors:
            vecs = V / np.linalg.norm(V, axis=0)
    return EigResult(np.asarray(vals), res, mode_index, vecs)


def count_below(pencil, x):
    """Number of generalized eigenvalues of the pencil strictly below ``x``."""
    d, e, _ = _scaled(pencil)
    e2 = e * e
    return kernels.sturm_count(d, e2, np.ones(pencil.size), float(x), _pivmin(e2))


def largest_ratio(theta, stiff):
    """Largest generalized eigenvalue of ``(diag(theta), S)`` for SPD tridiagonal ``S``.

    ``theta`` is a nonnegative diagonal (possibly singular).  Computed as the
    reciprocal of the smallest finite eigenvalue of ``(S, diag(theta))`` with
    the unscaled Sturm count, which stays valid for semidefinite ``theta``.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0):
        raise DomainError("theta must be nonnegative")
    if not np.any(theta > 0):
        return 0.0
    d = stiff.diag
    e2 = stiff.off * stiff.off
    pos = theta > 0
    hi = float(np.min(d[pos] / theta[pos]))
    if not np.isfinite(hi) or hi <= 0:
        raise SingularPencilError("stiffness matrix is not positive definite")
    mu = _bisect(d, e2, theta, 1, 0.0, hi)[0]
    if mu <= 0:
        raise SingularPencilError("stiffness matrix is not positive definite")
    return 1.0 / mu


# ---------------------------------------------------------------------------
# spindle spectra

def _spindle_spec(spindle, mu, potential=None, scale=1.0):
    return RadialOperatorSpec(
        n=spindle.n,
        ell=spindle.ell,
        mode_mu=mu,
        potential=potential,
        laplacian_scale=scale,
        outer_bc=spindle.outer_bc,
    )


def default_grid(spindle, cells=2000):
    return Grid.uniform(0.0, spindle.total_length, cells)


def _as_spindle(model):
    if isinstance(model, Spindle):
        return model
    if isinstance(model, ConicalManifoldModel) and model.spindle is not None:
        return model.spindle
    raise ModelError("numeric spectrum requires a computable model")


def _mode_candidates(spindle, floor, best, scale, max_modes, min_modes):
    """Indices m >= 1 whose ground eigenvalue could undercut ``best``.

    Ground(m) >= ground(0) + scale * mu_m * inf(1/f^2) >= floor + scale * mu_m * c.
    """
    c = spindle.inv_f2_floor()
    section = spindle.section
    modes = []
    m = 1
    while True:
        if section.max_index is not None and m > section.max_index:
            # untabulated modes have mu >= the last tabulated one, hence a ground
            # eigenvalue no smaller than the last scanned mode
            if m <= min_modes:
                raise ModelError(f"cross-section eigenvalue table ends at index {m - 1} < {min_modes}")
            break
        mu = section.eigenvalue(m)
        if m > min_modes and floor + scale * mu * c >= best:
            break
        modes.append(m)
        m += 1
        if m > max_modes:
            raise ModelError(f"mode scan exceeded {max_modes} modes")
    return modes


@dataclass
class SpectralGapNumeric:
    lambda1: float
    binding_mode: int
    modes_scanned: int
    mesh: Grid = field(repr=False)
    convergence_estimate: float = math.nan
    per_mode: dict = field(default_factory=dict, repr=False)
    vector: Optional[np.ndarray] = field(default=None, repr=False)


def spindle_lambda1(model, grid=None, min_modes=0, max_modes=10_000, vectors=False):
    """Numeric spectral gap of a spindle via the separated radial problems.

    lambda_1 = min(second eigenvalue of mode 0, ground eigenvalue of modes
    m >= 1) when constants are in the kernel, otherwise the overall lowest
    eigenvalue.  Modes are scanned until the provable floor
    ``mu_m inf(1/f^2)`` exceeds the current best.
    """
    sp = _as_spindle(model)
    grid = grid or default_grid(sp)
    p0 = assemble(_spindle_spec(sp, 0.0), grid)
    skip = 1 if sp.has_constants else 0
    r0 = tridiag_lowest(p0, skip + 1, vectors=vectors, residuals=vectors)
    best = float(r0.eigenvalues[skip])
    floor0 = float(r0.eigenvalues[0])
    per_mode = {0: best}
    best_vec = r0.vectors[:, skip] if vectors else None
    modes = _mode_candidates(sp, floor0, best, 1.0, max_modes, min_modes)

    def solve(m):
        p = assemble(_spindle_spec(sp, sp.section.eigenvalue(m)), grid)
        r = tridiag_lowest(p, 1, vectors=vectors, residuals=vectors)
        return float(r.eigenvalues[0]), (r.vectors[:, 0] if vectors else None)

    binding = 0
    for m, (val, vec) in zip(modes, pmap(solve, modes)):
        per_mode[m] = val
        if val < best:
            best, binding, best_vec = val, m, vec
    return SpectralGapNumeric(best, binding, 1 + len(modes), grid, math.nan, per_mode, best_vec)


def spindle_spectrum_modes(model, grid, mode, count):
    """Lowest ``count`` eigenvalues of one separated mode (diagnostics)."""
    sp = _as_spindle(model)
    p = assemble(_spindle_spec(sp, sp.section.eigenvalue(mode)), grid)
    return tridiag_lowest(p, count, mode_index=mode)


def schrodinger_ground(model, k, t, grid=None):
    """``inf spec(-t N/(N-1) Delta + k)`` on a spindle with N = n.

    ``k`` is a radial callable.  For t = 0 the infimum of k over the grid
    nodes is returned.
    """
    sp = _as_spindle(model)
    if not (0.0 <= t < 1.0):
        raise DomainError("t must lie in [0, 1); alpha_t vanishes at t = 1")
    grid = grid or default_grid(sp)
    if t == 0.0:
        return float(np.min(np.asarray(k(grid.nodes), dtype=float)))
    n = sp.n
    scale = t * n / (n - 1)
    p0 = assemble(_spindle_spec(sp, 0.0, potential=k, scale=scale), grid)
    best = float(tridiag_lowest(p0, 1, residuals=False).eigenvalues[0])
    modes = _mode_candidates(sp, best, best, scale, 10_000, 0)

    def solve(m):
        p = assemble(_spindle_spec(sp, sp.section.eigenvalue(m), potential=k, scale=scale), grid)
        return float(tridiag_lowest(p, 1, residuals=False).eigenvalues[0])

    vals = pmap(solve, modes)
    return min([best] + vals)


@dataclass
class MeshStudy:
    """Values on successively doubled meshes and an acceptance flag."""

    values: list
    cells: list
    converged: bool
    rtol: float

    @property
    def value(self):
        return self.values[-1]

    @property
    def change(self):
        a, b = self.values[-2], self.values[-1]
        return abs(b - a) / max(abs(b), 1e-300)


def mesh_study(fn, grid, rtol, levels=2):
    """Evaluate ``fn(grid)`` on ``grid`` and ``levels`` doublings of it.

    Accepted when the last two consecutive doublings agree within ``rtol``
    (relative), as required for singular potentials.
    """
    grids = [grid]
    for _ in range(levels):
        grids.append(grids[-1].refined())
    values = [float(fn(g)) for g in grids]
    changes = [abs(b - a) / max(abs(b), 1e-300) for a, b in zip(values, values[1:])]
    converged = all(c <= rtol for c in changes[-2:])
    return MeshStudy(values, [g.cells for g in grids], converged, rtol)


def form_bound_curve(k_minus, model, grid, cprime_sweep):
    """``C(C') = sup_v int k^- v^2 / (int |grad v|^2 + C' int v^2)`` for each C'.

    k^- is radial, so mode 0 is binding: higher modes only add a nonnegative
    potential to the denominator.
    """
    sp = _as_spindle(model)
    p0 = assemble(_spindle_spec(sp, 0.0), grid)
    q = np.asarray(k_minus(grid.nodes), dtype=float)
    q = np.broadcast_to(q, grid.nodes.shape)
    if np.any(q < 0) or not np.all(np.isfinite(q)):
        raise DomainError("k_minus must be finite and nonnegative on the grid nodes")
    theta = q * p0.mass
    out = []
    for cp in cprime_sweep:
        if cp <= 0:
            raise DomainError("C' values must be positive")
        out.append(largest_ratio(theta, p0.shifted(cp)))
    return np.array(out)


def form_bound_estimate(k_minus, model, grid, cprime_sweep=None):
    """Form bound of ``k^-`` relative to ``-Delta``: ``(C, C')`` minimizing C over the sweep.

    The default sweep is log-spaced over ``[1e-3, 1e6]`` times the curvature
    scale of the model.
    """
    sp = _as_spindle(model)
    if cprime_sweep is None:
        scale = abs(sp.ell) if sp.ell else 1.0 / sp.total_length**2
        cprime_sweep = np.logspace(-3, 6, 28) * scale
    cprime_sweep = list(cprime_sweep)
    if not cprime_sweep:
        raise DomainError("empty C' sweep")
    curve = form_bound_curve(k_minus, sp, grid, cprime_sweep)
    i = int(np.argmin(curve))
    return float(curve[i]), float(cprime_sweep[i])
