"""Hardy weights at conical points and their numerical verification."""
from dataclasses import dataclass, field

import numpy as np

from .eigen import _as_spindle, pmap, tridiag_lowest
from .errors import DomainError
from .models import ConeCap, Spindle
from .radial import AssembledPencil, Grid, RadialOperatorSpec, assemble
from .scalar import R_ell, clamped_trig, inv_utan2


@dataclass(frozen=True)
class HardyWeight:
    """Radial profile ``c / utan_L(r)^2 - (n-2)L/2 * 1{r < R_L}``, c = ((n-2)/2)^2.

    ``center`` is the position of the conical point on the axis of a 1-D
    model (0 for the first tip, the spindle length for the second).
    """

    n: int
    L: float
    center: float = 0.0

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("Hardy weights need n >= 3")

    @property
    def constant(self):
        return ((self.n - 2) / 2.0) ** 2

    @property
    def correction(self):
        return (self.n - 2) * self.L / 2.0

    @property
    def support_radius(self):
        return R_ell(self.L)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        inside = r < self.support_radius
        out = self.constant * inv_utan2(self.L, r) - self.correction * inside
        if np.ndim(out) == 0:
            return float(out)
        return out

    def on_axis(self, x):
        return self(np.abs(np.asarray(x, dtype=float) - self.center))


@dataclass(frozen=True)
class CompositeWeight:
    """Sub-convex combination ``sum s_i theta_i`` of weights at several centers."""

    parts: tuple = field(default_factory=tuple)

    @property
    def total(self):
        return sum(s for _, s in self.parts)

    def on_axis(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, s in self.parts:
            if s:
                out = out + s * w.on_axis(x)
        return out

    __call__ = on_axis


def hardy_weight_smooth(n, ell, r):
    """Hardy weight at a point of a space with sectional curvature <= ell.

    For ell <= 0 the clamp is inactive and the indicator covers everything,
    so the correction only helps (ell < 0) or vanishes (ell = 0).
    """
    if n < 3:
        raise DomainError("Hardy weights need n >= 3")
    r = np.asarray(r, dtype=float)
    c = ((n - 2) / 2.0) ** 2
    inside = r < R_ell(ell)
    out = c * inv_utan2(ell, r) - (n - 2) / 2.0 * ell * inside
    if np.ndim(out) == 0:
        return float(out)
    return out


def hardy_weight_cone(cap, r, L=None):
    """Hardy weight at the tip of a cone cap, for any ``L >= max(ell, (pi/(2 rho))^2)``."""
    L = cap.L_min if L is None else float(L)
    if L < cap.L_min * (1 - 1e-12):
        raise DomainError(f"L = {L} below the admissible minimum {cap.L_min}")
    return HardyWeight(cap.n, L)(r)


def weight_for_cap(cap, L=None, center=0.0):
    L = cap.L_min if L is None else float(L)
    if L < cap.L_min * (1 - 1e-12):
        raise DomainError(f"L = {L} below the admissible minimum {cap.L_min}")
    return HardyWeight(cap.n, L, center)


def combine_weights(weights):
    """Combine ``[(weight, s_i), ...]`` with s_i >= 0 and sum s_i <= 1."""
    parts = []
    for w, s in weights:
        if s < 0:
            raise DomainError("combination weights must be nonnegative")
        parts.append((w, float(s)))
    total = sum(s for _, s in parts)
    if total > 1 + 1e-12:
        raise DomainError(f"combination weights sum to {total} > 1")
    return CompositeWeight(tuple(parts))


def separated_centers(distances, ell):
    """Hypothesis of the full-constant multi-center weight: ell > 0 and all gaps >= 2 R_ell."""
    if ell <= 0:
        return False
    return all(d >= 2 * R_ell(ell) for d in distances)


def cap_domain(cap, r_out=None):
    """1-D model of a single cap: ``[0, r_out] x_{sin_ell} N`` with natural outer end.

    ``r_out`` defaults to ``2 rho`` (limited to pi/sqrt(ell) when ell > 0);
    it must be at least the support radius of the weight used.
    """
    if r_out is None:
        r_out = 2.0 * cap.rho
        if cap.ell > 0:
            r_out = min(r_out, 2.0 * R_ell(cap.ell))
    return Spindle(r_out, cap.section, cap.ell, "natural")


@dataclass
class HardyCheck:
    min_eig: float
    normalized: float
    passed: bool
    binding_mode: int
    per_mode: dict
    scale: float
    tol: float


def verify_hardy(theta, model, grid=None, modes=5, scale=None, tol=1e-6):
    """Check ``-Delta >= theta`` on the first ``modes + 1`` separated modes.

    For each mode m the smallest eigenvalue of ``(A_m - Theta, B)`` is
    computed with ``Theta_ii = theta(r_i) w_i |cell_i|``.  The minimum is
    divided by ``scale`` (default: the curvature scale of the model) and
    compared against ``-tol``.
    """
    if isinstance(model, ConeCap):
        model = cap_domain(model)
    sp = _as_spindle(model)
    grid = grid or Grid.uniform(0.0, sp.total_length, 4000)
    if scale is None:
        scale = max(abs(sp.ell), 1.0 / sp.total_length**2)
    th = np.asarray(theta(grid.nodes), dtype=float)
    if not np.all(np.isfinite(th)):
        raise DomainError("theta must be finite on the grid nodes")

    def solve(m):
        mu = sp.section.eigenvalue(m)
        spec = RadialOperatorSpec(sp.n, sp.ell, mu, outer_bc=sp.outer_bc)
        p = assemble(spec, grid).with_potential(th, sign=-1.0)
        return float(tridiag_lowest(p, 1, residuals=False).eigenvalues[0])

    ms = list(range(modes + 1))
    vals = pmap(solve, ms)
    per_mode = dict(zip(ms, vals))
    binding = min(ms, key=lambda m: (per_mode[m], m))
    lo = per_mode[binding]
    norm = lo / scale
    return HardyCheck(lo, norm, norm >= -tol, binding, per_mode, scale, tol)


def best_constant_grid(n, ell=0.0, r_max=1e3, cells=20000, log_span=60.0):
    if ell > 0:
        r_max = min(r_max, R_ell(ell))
    return Grid.geometric_span(r_max, cells, log_span)


def best_constant_estimate(n, ell=0.0, grid=None):
    """Smallest eigenvalue of ``(A_0, Theta_0)``, Theta_0 the 1/r^2 mass, Dirichlet outer end.

    On a geometric grid this approaches ((n-2)/2)^2 from above as
    ``log(r_max / h_min)`` grows.
    """
    if n < 3:
        raise DomainError("n >= 3 required")
    grid = grid or best_constant_grid(n, ell)
    p = assemble(RadialOperatorSpec(n, ell, 0.0, outer_bc="dirichlet"), grid)
    theta = p.mass / grid.nodes**2
    q = AssembledPencil(p.diag, p.off, theta, grid, p.spec)
    return float(tridiag_lowest(q, 1, residuals=False).eigenvalues[0])


def ground_state_quotient(n, ell, L, grid):
    """Discrete ``(A Phi)_i / (B Phi)_i`` (A discretizes -Delta) for ``Phi = usin_L^{-(n-2)/2}`` on a sin_ell cone.

    Returned together with the weight values on the nodes; interior nodes
    should satisfy quotient >= theta - O(h^2).
    """
    p = assemble(RadialOperatorSpec(n, ell, 0.0), grid)
    usin, _, _ = clamped_trig(L, grid.nodes)
    phi = np.asarray(usin) ** (-(n - 2) / 2.0)
    q = p.matvec(phi) / (p.mass * phi)
    return q, HardyWeight(n, L)(grid.nodes)
