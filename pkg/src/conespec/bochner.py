"""Pointwise Bakry-Emery inequalities as matrix inequalities.

At a point, ``g`` plays the gradient, ``H`` the Hessian, ``R`` the Ricci
tensor and ``k`` a lower Ricci bound.  Then ``Gamma_2 = g.R.g + |H|_HS^2``,
``Delta u = tr H`` and ``grad|grad u| = H g / |g|``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BochnerInstance:
    n: int
    N: float
    g: np.ndarray
    H: np.ndarray
    R: np.ndarray
    k: float
    check: bool = True

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float).reshape(-1)
        H = np.asarray(self.H, dtype=float)
        R = np.asarray(self.R, dtype=float)
        n = self.n
        if g.shape != (n,) or H.shape != (n, n) or R.shape != (n, n):
            raise DomainError("shapes of g, H, R must match n")
        if not np.allclose(H, H.T, atol=1e-14) or not np.allclose(R, R.T, atol=1e-14):
            raise DomainError("H and R must be symmetric")
        if self.N < n:
            raise DomainError("need N >= n")
        if self.check:
            floor = np.linalg.eigvalsh(R - self.k * np.eye(n)).min()
            if floor < -1e-12 * max(1.0, np.abs(R).max(), abs(self.k)):
                raise DomainError(f"R - kI is not positive semidefinite (min eigenvalue {floor:.3e})")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "H", 0.5 * (H + H.T))
        object.__setattr__(self, "R", 0.5 * (R + R.T))

    def tol(self):
        g2 = float(self.g @ self.g)
        return 1e-10 * (1.0 + float(np.sum(self.H**2)) + (np.linalg.norm(self.R, 2) + abs(self.k)) * g2)


def gamma2(inst):
    """``g.R.g + |H|_HS^2``."""
    return float(inst.g @ inst.R @ inst.g + np.sum(inst.H * inst.H))


def self_improvement_gap(inst, v, w):
    """Both sides of the self-improved Bochner inequality for directions v, w.

    lhs = Gamma_2 - k|g|^2 - (tr H)^2/N and
    rhs = 2 [v.H.w - (tr H/N) v.w]^2 / (|v|^2 |w|^2 + (N-2)/N (v.w)^2).
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    N = float(inst.N)
    vv, ww, vw = float(v @ v), float(w @ w), float(v @ w)
    if vv == 0 or ww == 0:
        raise DomainError("v and w must be nonzero")
    denom = vv * ww + (N - 2.0) / N * vw * vw
    if denom <= 0:
        raise DomainError("degenerate denominator")
    D = float(np.trace(inst.H))
    lhs = gamma2(inst) - inst.k * float(inst.g @ inst.g) - D * D / N
    num = float(v @ inst.H @ w) - D / N * vw
    return lhs, 2.0 * num * num / denom


@dataclass(frozen=True)
class BE1Slack:
    slack: float
    slack_N_form: float
    slack_scalar: float
    tol: float


def be1_slacks(inst):
    """Slack of the self-improved inequality in its two equivalent forms.

    ``slack`` is Gamma_2 - k|g|^2 - |a|^2 - |a - D e|^2/(N-1) with a = H e,
    e = g/|g|, D = tr H.  ``slack_N_form`` is the same quantity written as
    Gamma_2 - k|g|^2 - D^2/N - N/(N-1) |a - (D/N) e|^2.  ``slack_scalar``
    replaces the vector difference by the difference of norms, which can
    only make it larger.
    """
    N = float(inst.N)
    if N <= 1:
        raise DomainError("N must exceed 1")
    gn = float(np.linalg.norm(inst.g))
    if gn == 0:
        raise DomainError("g must be nonzero")
    e = inst.g / gn
    a = inst.H @ e
    D = float(np.trace(inst.H))
    base = gamma2(inst) - inst.k * gn * gn
    aa = float(a @ a)
    diff = a - D * e
    s1 = base - aa - float(diff @ diff) / (N - 1.0)
    dN = a - (D / N) * e
    s2 = base - D * D / N - N / (N - 1.0) * float(dN @ dN)
    s3 = base - aa - (np.sqrt(aa) - abs(D)) ** 2 / (N - 1.0)
    tol = inst.tol()
    assert abs(s1 - s2) <= tol + 1e-10 * abs(base), (s1, s2)
    return BE1Slack(s1, s2, s3, tol)


def be1_pointwise_check(inst):
    """Slack of the self-improved pointwise inequality (nonnegative when R >= kI, N >= n)."""
    return be1_slacks(inst).slack


def be1_slack_batch(g, H, R, k, N):
    """Vectorized ``slack`` for stacks g (S,n), H (S,n,n), R (S,n,n), k (S,)."""
    gn = np.linalg.norm(g, axis=1)
    e = g / gn[:, None]
    a = np.einsum("sij,sj->si", H, e)
    D = np.trace(H, axis1=1, axis2=2)
    g2 = np.einsum("sij,si,sj->s", R, g, g) + np.einsum("sij,sij->s", H, H)
    base = g2 - k * gn * gn
    diff = a - D[:, None] * e
    slack = base - np.einsum("si,si->s", a, a) - np.einsum("si,si->s", diff, diff) / (N - 1.0)
    tol = 1e-10 * (
        1.0 + np.einsum("sij,sij->s", H, H) + (np.linalg.norm(R, ord=2, axis=(1, 2)) + np.abs(k)) * gn * gn
    )
    return slack, tol


def random_instances(rng, n, size, psd=True, k_range=(-2.0, 2.0)):
    """Random gradients, Hessians and Ricci data.

    g is uniform on the sphere with log-uniform norm in [1e-2, 1e2]; H is a
    symmetric Gaussian matrix, pushed towards multiples of the identity for a
    quarter of the samples; R = kI + Q diag(chi^2) Q^T when ``psd``.
    """
    g = rng.standard_normal((size, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    g *= 10.0 ** rng.uniform(-2, 2, size)[:, None]
    X = rng.standard_normal((size, n, n))
    H = 0.5 * (X + X.transpose(0, 2, 1))
    near = rng.random(size) < 0.25
    c = rng.standard_normal(size)
    eps = 10.0 ** rng.uniform(-8, -1, size)
    H[near] = c[near, None, None] * np.eye(n) + eps[near, None, None] * H[near]
    k = rng.uniform(*k_range, size)
    Q, _ = np.linalg.qr(rng.standard_normal((size, n, n)))
    chi = rng.standard_normal((size, n)) ** 2
    P = np.einsum("sij,sj,skj->sik", Q, chi, Q)
    if psd:
        R = k[:, None, None] * np.eye(n) + P
    else:
        # push one direction below k
        R = k[:, None, None] * np.eye(n) + P - (chi.max(axis=1) + rng.uniform(0.1, 1.0, size))[:, None, None] * np.einsum(
            "si,sj->sij", Q[:, :, 0], Q[:, :, 0]
        )
    return g, H, R, k


@dataclass
class FuzzSummary:
    samples: int
    violations: int
    min_normalized_slack: float
    seed: int
    n: int
    N: float


def fuzz(n, samples=100_000, seed=0, N=None, psd=True, chunk=20_000):
    """Randomized check of the self-improved inequality; returns a summary."""
    N = float(n if N is None else N)
    rng = np.random.default_rng(seed)
    done = 0
    violations = 0
    worst = np.inf
    while done < samples:
        size = min(chunk, samples - done)
        g, H, R, k = random_instances(rng, n, size, psd=psd)
        slack, tol = be1_slack_batch(g, H, R, k, N)
        violations += int(np.sum(slack < -tol))
        worst = min(worst, float(np.min(slack / tol)))
        done += size
    return FuzzSummary(samples, violations, worst, seed, n, N)


def find_violation(n, seed=0, tries=10_000, N=None):
    """Search for an instance with R not >= kI that breaks the inequality."""
    N = float(n if N is None else N)
    rng = np.random.default_rng(seed)
    g, H, R, k = random_instances(rng, n, tries, psd=False)
    slack, tol = be1_slack_batch(g, H, R, k, N)
    bad = np.flatnonzero(slack < -tol)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return BochnerInstance(n, N, g[i], H[i], R[i], float(k[i]), check=False)
