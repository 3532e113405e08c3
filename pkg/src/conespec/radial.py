"""Finite-volume assembly of one cross-section mode as a tridiagonal pencil.

For a mode with cross-section eigenvalue ``mu`` the radial quadratic form is

    E(v) = t * int v'^2 w dr + int (t * mu / sin_ell^2 + q) v^2 w dr,
    w(r) = sin_ell(r)^(n-1),

discretized on cell centers with two-point fluxes and a lumped mass
``B_ii = w(r_i) |cell_i|``.  ``A`` is symmetric tridiagonal, ``B`` diagonal.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AssemblyError, DomainError
from .scalar import sin_ell

MIN_CELLS = 8
DENSE_ORACLE_MAX = 512


@dataclass(frozen=True)
class Grid:
    """Cell-centered 1-D grid given by its ``M + 1`` cell edges."""

    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        if e.ndim != 1 or e.size < MIN_CELLS + 1:
            raise DomainError(f"grid needs at least {MIN_CELLS} cells")
        if e[0] < 0 or np.any(np.diff(e) <= 0):
            raise DomainError("grid edges must be nonnegative and strictly increasing")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def uniform(cls, r_min, r_max, cells):
        return cls(np.linspace(r_min, r_max, int(cells) + 1))

    @classmethod
    def geometric(cls, r_max, cells, ratio, r_min=0.0):
        """Cells growing by ``ratio`` away from ``r_min``.

        The smallest cell is ``(r_max - r_min)(ratio - 1)/(ratio^M - 1)``.
        """
        cells = int(cells)
        if ratio <= 1.0:
            raise DomainError("geometric grading needs ratio > 1")
        k = np.arange(cells + 1, dtype=float)
        # expm1 keeps the tiny leading cells accurate
        frac = np.expm1(k * np.log(ratio)) / np.expm1(cells * np.log(ratio))
        edges = r_min + (r_max - r_min) * frac
        edges[-1] = r_max
        return cls(edges)

    @classmethod
    def geometric_span(cls, r_max, cells, log_span, r_min=0.0):
        """Geometric grid whose first cell is ``exp(-log_span)`` of the interval."""
        ratio = np.exp(log_span / cells)
        return cls.geometric(r_max, cells, ratio, r_min)

    @property
    def cells(self):
        return self.edges.size - 1

    @property
    def r_min(self):
        return float(self.edges[0])

    @property
    def r_max(self):
        return float(self.edges[-1])

    @property
    def nodes(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def h_min(self):
        return float(self.widths.min())

    @property
    def h_max(self):
        return float(self.widths.max())

    def refined(self):
        """Split every cell in two (halves each width)."""
        mid = 0.5 * (self.edges[1:] + self.edges[:-1])
        e = np.empty(2 * self.cells + 1)
        e[0::2] = self.edges
        e[1::2] = mid
        return Grid(e)


@dataclass(frozen=True)
class RadialOperatorSpec:
    """Radial operator ``-t Delta + q`` restricted to one cross-section mode.

    ``n`` may be 1 to obtain the flat weight ``w = 1``.
    """

    n: int
    ell: float
    mode_mu: float = 0.0
    potential: Optional[Callable] = None
    laplacian_scale: float = 1.0
    outer_bc: str = "natural"
    inner_bc: str = "natural"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.mode_mu < 0:
            raise DomainError("mode eigenvalue must be nonnegative")
        if self.laplacian_scale <= 0:
            raise DomainError("laplacian_scale must be positive")
        for bc in (self.outer_bc, self.inner_bc):
            if bc not in ("natural", "dirichlet"):
                raise DomainError(f"unknown boundary condition {bc!r}")

    def weight(self, r):
        if self.n == 1:
            return np.ones_like(np.asarray(r, dtype=float))
        return np.asarray(sin_ell(self.ell, r), dtype=float) ** (self.n - 1)


@dataclass(frozen=True)
class AssembledPencil:
    """Generalized pencil ``(A, B)``: ``A`` tridiagonal, ``B`` diagonal."""

    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    grid: Grid
    spec: Optional[RadialOperatorSpec] = field(default=None, compare=False)

    @property
    def size(self):
        return self.diag.size

    def dense(self):
        A = np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)
        return A, np.diag(self.mass)

    def matvec(self, v):
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def shifted(self, c):
        """Pencil ``(A + c B, B)``."""
        return AssembledPencil(self.diag + c * self.mass, self.off, self.mass, self.grid, self.spec)

    def with_potential(self, values, sign=1.0):
        """Add ``sign * values_i * B_ii`` to the diagonal."""
        values = np.asarray(values, dtype=float)
        return AssembledPencil(self.diag + sign * values * self.mass, self.off, self.mass, self.grid, self.spec)

    def dump(self, path_or_file):
        """Write the debug text format: columns ``diag offdiag mass``."""
        off = np.append(self.off, 0.0)
        table = np.column_stack([self.diag, off, self.mass])
        np.savetxt(path_or_file, table, fmt="%.17g", header="diag offdiag mass")


def _check_finite(name, values, nodes):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise AssemblyError(f"non-finite {name} at node {i} (r = {nodes[i]!r})")


def assemble(spec, grid):
    """Assemble the pencil of ``spec`` on ``grid``."""
    nodes = grid.nodes
    widths = grid.widths
    edges = grid.edges
    w_node = spec.weight(nodes)
    w_edge = spec.weight(edges)
    _check_finite("weight", w_node, nodes)
    _check_finite("weight", w_edge[1:-1], edges[1:-1])
    if np.any(w_node <= 0):
        i = int(np.flatnonzero(w_node <= 0)[0])
        raise AssemblyError(f"nonpositive weight at node {i} (r = {nodes[i]!r})")

    t = spec.laplacian_scale
    flux = t * w_edge[1:-1] / np.diff(nodes)
    diag = np.zeros(nodes.size)
    diag[:-1] += flux
    diag[1:] += flux
    off = -flux
    if spec.outer_bc == "dirichlet":
        # zero ghost one spacing beyond the last node, across the edge r_max
        wb = float(w_edge[-1])
        if not np.isfinite(wb):
            raise AssemblyError(f"non-finite weight at outer edge r = {edges[-1]!r}")
        diag[-1] += t * wb / widths[-1]
    if spec.inner_bc == "dirichlet":
        wb = float(w_edge[0])
        if not np.isfinite(wb):
            raise AssemblyError(f"non-finite weight at inner edge r = {edges[0]!r}")
        diag[0] += t * wb / widths[0]

    mass = w_node * widths
    pot = np.zeros(nodes.size)
    if spec.mode_mu:
        if spec.n == 1:
            f2 = np.ones_like(nodes)
        else:
            f2 = np.asarray(sin_ell(spec.ell, nodes), dtype=float) ** 2
        pot += t * spec.mode_mu / f2
    if spec.potential is not None:
        q = np.asarray(spec.potential(nodes), dtype=float)
        q = np.broadcast_to(q, nodes.shape)
        _check_finite("potential", q, nodes)
        pot = pot + q
    _check_finite("potential", pot, nodes)
    diag = diag + pot * mass
    return AssembledPencil(diag, off, mass, grid, spec)


def dense_oracle_eigs(pencil):
    """All generalized eigenvalues of ``(A, B)`` via dense symmetric reduction.

    Forms ``B^{-1/2} A B^{-1/2}`` explicitly and hands it to LAPACK's dense
    symmetric solver; independent of the bisection path.
    """
    if pencil.size > DENSE_ORACLE_MAX:
        raise DomainError(
            f"dense oracle limited to M <= {DENSE_ORACLE_MAX} (got {pencil.size}); "
            "use eigen.tridiag_lowest for larger pencils"
        )
    A, _ = pencil.dense()
    s = 1.0 / np.sqrt(pencil.mass)
    C = A * s[:, None] * s[None, :]
    return np.sort(np.linalg.eigvalsh(0.5 * (C + C.T)))
