"""Cross-sections, cone caps, conical manifold models and closed-form Ricci bounds."""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ModelError
from .scalar import R_ell, sin_ell


@dataclass(frozen=True)
class CrossSection:
    """Cross-section ``N`` of dimension ``dim = n - 1`` with Ric^N >= (dim-1) kappa.

    Eigenvalues of ``-Delta^N`` are given either by ``formula`` (a function of
    the index m >= 0) or by a finite nondecreasing ``table`` starting at 0.
    Only distinct eigenvalues matter here, multiplicities are ignored.
    """

    dim: int
    kappa: float
    formula: Optional[Callable[[int], float]] = field(default=None, compare=False)
    table: Optional[tuple] = None
    label: str = field(default="", compare=False)
    volume_finite: bool = True
    radius: Optional[float] = None

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("cross-section dimension must be >= 2 (n >= 3)")
        if (self.formula is None) == (self.table is None):
            raise ModelError("give exactly one of formula or table")
        if self.table is not None:
            t = tuple(float(x) for x in self.table)
            if not t or t[0] != 0.0:
                raise ModelError("eigenvalue table must start with mu_0 = 0")
            if any(b < a for a, b in zip(t, t[1:])):
                raise ModelError("eigenvalue table must be nondecreasing")
            object.__setattr__(self, "table", t)

    @property
    def n(self):
        return self.dim + 1

    @property
    def max_index(self):
        """Largest available index (None when unbounded)."""
        return None if self.table is None else len(self.table) - 1

    def eigenvalue(self, m):
        if m < 0:
            raise DomainError("eigenvalue index must be >= 0")
        if self.table is not None:
            if m >= len(self.table):
                raise ModelError(f"eigenvalue table of {self.label or 'section'} ends at index {len(self.table) - 1}")
            return self.table[m]
        return float(self.formula(m))

    def eigenvalues(self, count):
        return [self.eigenvalue(m) for m in range(count)]

    @property
    def lambda1(self):
        """Spectral gap mu_1 of the cross-section."""
        return self.eigenvalue(1)


def sphere_section(n, R=1.0):
    """Round sphere S^{n-1} of radius R: kappa = 1/R^2, mu_m = m(m+n-2)/R^2."""
    if n < 3:
        raise DomainError("sphere_section needs n >= 3")
    if R <= 0:
        raise DomainError("sphere radius must be positive")
    R = float(R)
    inv = 1.0 / (R * R)
    return CrossSection(
        dim=n - 1,
        kappa=inv,
        formula=lambda m: m * (m + n - 2) * inv,
        label=f"S^{n - 1}_R(R={R!r})",
        radius=R,
    )


def table_section(dim, kappa, eigenvalues, label="custom"):
    return CrossSection(dim=dim, kappa=float(kappa), table=tuple(eigenvalues), label=label)


def product_sphere_section(radii, kappa, max_degree=40, label=None):
    """Product of round 2-spheres; eigenvalues are the distinct sums of factor eigenvalues.

    ``kappa`` is supplied by the caller (it depends on the normalization of
    the product).  Sums are complete up to the smallest factor eigenvalue at
    ``max_degree + 1``.
    """
    radii = [float(r) for r in radii]
    factor = [np.array([a * (a + 1) for a in range(max_degree + 1)]) / r**2 for r in radii]
    sums = np.zeros(1)
    for f in factor:
        sums = np.add.outer(sums, f).ravel()
    complete = min((max_degree + 1) * (max_degree + 2) / r**2 for r in radii)
    vals = np.unique(np.round(sums[sums < complete], 12))
    dim = 2 * len(radii)
    return table_section(dim, kappa, vals, label or f"product of S^2 radii {radii}")


@dataclass(frozen=True)
class ConeCap:
    """Ball ``B_rho(z) = [0, rho) x_{sin_ell} N`` around a conical point."""

    rho: float
    ell: float
    section: CrossSection

    def __post_init__(self):
        if self.rho <= 0:
            raise DomainError("cap radius must be positive")
        if self.ell > 0 and self.rho > R_ell(self.ell) * (1 + 1e-12):
            raise DomainError(f"cap radius {self.rho} exceeds R_ell = {R_ell(self.ell)}")

    @property
    def n(self):
        return self.section.n

    @property
    def kappa(self):
        return self.section.kappa

    @property
    def L_min(self):
        """Minimal admissible clamp curvature ``max(ell, (pi/(2 rho))^2)``."""
        return max(self.ell, (math.pi / (2.0 * self.rho)) ** 2)


@dataclass(frozen=True)
class Spindle:
    """Fully computable model ``[0, total_length] x_{sin_ell} N``.

    Closed when ell > 0, ``total_length = pi/sqrt(ell)`` and the outer end is
    natural: then both ends are conical points.
    """

    total_length: float
    section: CrossSection
    ell: float
    outer_bc: str = "natural"

    def __post_init__(self):
        if self.total_length <= 0:
            raise DomainError("spindle length must be positive")
        if self.ell > 0 and self.total_length > 2 * R_ell(self.ell) * (1 + 1e-12):
            raise DomainError("spindle longer than pi/sqrt(ell)")
        if self.outer_bc not in ("natural", "dirichlet"):
            raise DomainError(f"unknown outer boundary condition {self.outer_bc!r}")

    @classmethod
    def closed(cls, section, ell):
        if ell <= 0:
            raise DomainError("closed spindles need ell > 0")
        return cls(math.pi / math.sqrt(ell), section, ell, "natural")

    @property
    def n(self):
        return self.section.n

    @property
    def is_closed(self):
        return (
            self.ell > 0
            and self.outer_bc == "natural"
            and abs(self.total_length - 2 * R_ell(self.ell)) <= 1e-12 * self.total_length
        )

    @property
    def has_constants(self):
        """True when constants lie in the kernel (natural conditions everywhere)."""
        return self.outer_bc == "natural"

    def inv_f2_floor(self):
        """``inf_r 1/sin_ell(r)^2`` over the spindle."""
        r_peak = min(self.total_length, R_ell(self.ell))
        return 1.0 / float(sin_ell(self.ell, r_peak)) ** 2

    def tip_distance(self, r):
        """Distance to the nearest conical point."""
        r = np.asarray(r, dtype=float)
        if self.is_closed:
            return np.minimum(r, self.total_length - r)
        return r


@dataclass(frozen=True)
class ConicalManifoldModel:
    """Ambient dimension, bulk Ricci bound K and cone caps.

    ``spindle`` is set for computable models; otherwise only the closed-form
    theorem bounds apply.
    """

    n: int
    bulkK: float
    caps: tuple = ()
    spindle: Optional[Spindle] = None
    name: str = ""
    disjoint_caps_declared: bool = True

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("n >= 3 required (two-dimensional models are not supported)")
        object.__setattr__(self, "caps", tuple(self.caps))
        for cap in self.caps:
            if cap.n != self.n:
                raise ModelError(f"cap section dimension {cap.section.dim} does not match n = {self.n}")
        if self.spindle is not None and self.spindle.n != self.n:
            raise ModelError("spindle section dimension does not match n")

    @property
    def computable(self):
        return self.spindle is not None

    @classmethod
    def from_spindle(cls, spindle, name=""):
        """Closed spindles get two caps of radius R_ell and K = inf (no bulk)."""
        caps = ()
        if spindle.is_closed:
            cap = ConeCap(R_ell(spindle.ell), spindle.ell, spindle.section)
            caps = (cap, cap)
        elif spindle.ell <= 0 or spindle.total_length <= R_ell(spindle.ell):
            caps = (ConeCap(spindle.total_length, spindle.ell, spindle.section),)
        return cls(spindle.n, math.inf, caps, spindle, name)


def ricci_bound_warped(n, f, kappa, r):
    """Lower Ricci bound of ``I x_f N`` at radius r given Ric^N >= (n-2) kappa.

    ``f`` is a triple ``(f, f', f'')`` of callables.  Both displayed forms
    (the min and the negative-part form) are evaluated and must agree.
    """
    fn, fp, fpp = f
    f0 = float(fn(r))
    if not f0 > 0:
        raise DomainError(f"warping function must be positive, f({r}) = {f0}")
    a = float(fpp(r)) / f0
    b = (kappa - float(fp(r)) ** 2) / f0**2
    k_min = min(-(n - 1) * a, (n - 2) * b - a)
    k_neg = -(n - 1) * a - (n - 2) * max(-(b + a), 0.0)
    scale = max(abs(k_min), abs(k_neg), abs(a) * n, 1.0)
    # with n = 2 the forms differ; the identity needs n >= 3 or b + a >= 0
    if n >= 3:
        assert abs(k_min - k_neg) <= 1e-12 * scale, (k_min, k_neg)
    return k_min


def ricci_bound_cone(n, ell, kappa, r):
    """``(n-1) ell - (n-2) (1-kappa)^+ / sin_ell(r)^2`` (array-aware in r)."""
    s = sin_ell(ell, r)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("ricci_bound_cone needs r > 0")
    out = (n - 1) * ell - (n - 2) * max(1.0 - kappa, 0.0) / np.asarray(s) ** 2
    if np.ndim(out) == 0:
        return float(out)
    return out


def grushin_bound(n, j, alpha, y_norm, measure="riemannian"):
    """Lower Ricci bound of the Grushin-type space R^j x_f R^{n-j}, f = |y|^-alpha."""
    if y_norm <= 0:
        raise DomainError("|y| must be positive")
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if not (1 <= j < n):
        raise DomainError("need 1 <= j < n")
    y2 = float(y_norm) ** 2
    if measure == "riemannian":
        if j == 1:
            return -alpha / y2
        return -(n - j) * alpha**2 / y2
    if measure == "lebesgue":
        if j == 1:
            raise DomainError("the Lebesgue-measure bound is stated for j >= 2 only")
        return -(n - j) * alpha * (alpha + 1) / y2
    raise DomainError(f"unknown measure {measure!r}")


def grushin_admissibility(n, j, alpha):
    """Admissibility of the Grushin Ricci bound for the Riemannian measure.

    For j = 1 the criterion is ``alpha < n/(4(n-1))``.  For j >= 2 two
    thresholds are reported: the literal one, ``alpha < (j-2)^2 n/(4(n-1))``,
    and the one obtained by comparing the bound ``(n-j) alpha^2/|y|^2`` with
    the Hardy constant ``((j-2)/2)^2`` of R^j at form bound n/(n-1):
    ``(n-j) alpha^2 < n (j-2)^2 / (4(n-1))``.
    """
    lim = n / (n - 1)
    if j == 1:
        thr = n / (4 * (n - 1))
        return {"admissible": alpha < thr, "threshold": thr, "discrepancy": False}
    literal_thr = (j - 2) ** 2 * n / (4 * (n - 1))
    hardy = ((j - 2) / 2) ** 2
    if hardy > 0:
        recomputed_thr = math.sqrt(lim * hardy / (n - j)) if n > j else math.inf
    else:
        recomputed_thr = 0.0
    lit = alpha < literal_thr
    rec = alpha < recomputed_thr
    return {
        "admissible_literal": lit,
        "threshold_literal": literal_thr,
        "admissible_recomputed": rec,
        "threshold_recomputed": recomputed_thr,
        "discrepancy": lit != rec or not math.isclose(literal_thr, recomputed_thr),
    }


def weighted_space_bound(n, alpha, x_norm):
    """Infimum over directions of the Bakry-Emery Ricci quotient for weight |x|^alpha."""
    if x_norm <= 0:
        raise DomainError("|x| must be positive")
    return -abs(alpha) / float(x_norm) ** 2


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    model: ConicalManifoldModel
    notes: tuple = ()


CATALOG_NAMES = (
    "round-sphere",
    "hyperbolic",
    "euclidean",
    "large-sphere-cone",
    "cone-S2xS2",
    "cone-RP2",
    "taming-S2R",
    "spindle",
)


def catalog_model(name, n=3, R=None, ell=None, rho=None):
    """Build one catalog entry, with optional parameter overrides."""
    if name == "round-sphere":
        ell = 1.0 if ell is None else ell
        sp = Spindle.closed(sphere_section(n, 1.0), ell)
        model = ConicalManifoldModel.from_spindle(sp, name)
        notes = (
            "section: unit sphere S^{n-1}, kappa = 1, f = sin_ell",
            "Ric = (n-1) ell g (round model); spectral gap n ell",
        )
    elif name == "spindle":
        ell = 1.0 if ell is None else ell
        R = 1.0 if R is None else R
        sp = Spindle.closed(sphere_section(n, R), ell)
        model = ConicalManifoldModel.from_spindle(sp, name)
        notes = ("closed ell-spindle over S^{n-1}_R; two conical points",)
    elif name == "hyperbolic":
        ell = -1.0 if ell is None else ell
        if ell >= 0:
            raise DomainError("hyperbolic entry needs ell < 0")
        cap = ConeCap(1.0 if rho is None else rho, ell, sphere_section(n, 1.0))
        model = ConicalManifoldModel(n, (n - 1) * ell, (cap,), None, name)
        notes = ("unit sphere section with f = sin_ell, ell < 0: hyperbolic space, Ric = (n-1) ell",)
    elif name == "euclidean":
        cap = ConeCap(1.0 if rho is None else rho, 0.0, sphere_section(n, 1.0))
        model = ConicalManifoldModel(n, 0.0, (cap,), None, name)
        notes = ("unit sphere section with f = r: Euclidean R^n, ricci_bound_cone = 0",)
    elif name in ("large-sphere-cone", "taming-S2R"):
        if name == "taming-S2R":
            n = 3
            R = math.sqrt(8.0 / 6.0) if R is None else R
        R = 2.0 if R is None else R
        rho = 1.0 if rho is None else rho
        ell = 0.0 if ell is None else ell
        cap = ConeCap(rho, ell, sphere_section(n, R))
        model = ConicalManifoldModel(n, 0.0, (cap,), None, name)
        notes = (
            "cone over a large sphere: kappa = 1/R^2 < 1",
            "ricci bound -(n-2)(1-kappa)/r^2 near the tip",
        )
        if name == "taming-S2R":
            notes += (
                "n = 3 taming example: thresholds R_sharp = sqrt(8/5), R_natural = sqrt(8/6), R_flat = sqrt(8/7)",
            )
    elif name == "cone-S2xS2":
        # Ric of S^2 of radius 1/sqrt(3) is 3 g = (n-2) g with n = 5, so kappa = 1
        section = product_sphere_section([1 / math.sqrt(3), 1 / math.sqrt(3)], kappa=1.0, label="S2_{1/sqrt3} x S2_{1/sqrt3}")
        cap = ConeCap(1.0 if rho is None else rho, 0.0, section)
        model = ConicalManifoldModel(5, 0.0, (cap,), None, name)
        notes = (
            "n = 5, Ric >= 0 off the tip, CD(0,5) and BE_2(0,5)",
            "sup Sec = 2/r^2, inf Sec = -1/r^2 (unbounded sectional curvature)",
        )
    elif name == "cone-RP2":
        section = table_section(2, 1.0, [m * (m + 1) for m in range(0, 200, 2)], "RP^2")
        cap = ConeCap(1.0 if rho is None else rho, 0.0, section)
        model = ConicalManifoldModel(3, 0.0, (cap,), None, name)
        notes = (
            "N = RP^2 with Sec^N = 1, Ric^N = g, kappa = 1",
            "Sec^M = 0 and Ric^M = 0 off the tip; CD(0,3), BE_2(0,3)",
        )
    else:
        raise ModelError(f"unknown catalog model {name!r}; choose from {', '.join(CATALOG_NAMES)}")
    return CatalogEntry(name, model, notes)


def catalog(n=3):
    """Default instances of every named example."""
    return [catalog_model(name, n=n) for name in CATALOG_NAMES]
