import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from conespec.eigen import (
    count_below,
    form_bound_estimate,
    largest_ratio,
    mesh_study,
    schrodinger_ground,
    spindle_lambda1,
    thread_count,
    tridiag_lowest,
)
from conespec.errors import DomainError, ModelError
from conespec.models import Spindle, catalog_model, ricci_bound_cone, sphere_section, table_section
from conespec.radial import AssembledPencil, Grid, RadialOperatorSpec, assemble, dense_oracle_eigs


def spindle_ground(n, mu, ell=1.0):
    """Ground eigenvalue of mode mu on the closed ell-spindle: a(a+n-1) ell."""
    c = (n - 2) / 2.0
    a = -c + math.sqrt(c * c + mu / ell)
    return a * (a + n - 1) * ell


def random_pencil(rng, M, singular=False):
    g = Grid.uniform(0.0, math.pi, M)
    n = int(rng.integers(1, 6))
    ell = float(rng.choice([1.0, 0.0, -1.0]))
    mu = float(rng.choice([0.0, 2.0, 6.0])) if n > 1 else 0.0
    if singular:
        c = float(rng.uniform(0.05, 0.5))
        pot = lambda r: -c / r**2
    else:
        amp = float(rng.uniform(-3, 3))
        pot = lambda r: amp * np.cos(r)
    spec = RadialOperatorSpec(n, ell, mu, pot, float(rng.uniform(0.5, 2.0)), outer_bc=str(rng.choice(["natural", "dirichlet"])))
    return assemble(spec, g)


@pytest.mark.parametrize("trial", range(12))
def test_matches_dense_oracle(backend, rng, trial):
    for singular in (False, True):
        p = random_pencil(rng, int(rng.integers(20, 200)), singular)
        ref = dense_oracle_eigs(p)
        k = min(8, p.size)
        got = tridiag_lowest(p, k).eigenvalues
        scale = np.maximum(np.abs(ref[:k]), 1e-12 * np.abs(ref).max())
        assert np.all(np.abs(got - ref[:k]) <= 1e-9 * scale)


def test_matches_scipy_tridiagonal(rng):
    p = random_pencil(rng, 3000)
    s = 1 / np.sqrt(p.mass)
    ref = eigh_tridiagonal(p.diag * s * s, p.off * s[:-1] * s[1:], eigvals_only=True, select="i", select_range=(0, 4))
    got = tridiag_lowest(p, 5).eigenvalues
    assert np.allclose(got, ref, rtol=1e-9, atol=1e-12 * abs(ref).max())


def test_residuals_small(backend):
    p = assemble(RadialOperatorSpec(3, 1.0, 2.0), Grid.uniform(0, math.pi, 800))
    r = tridiag_lowest(p, 3, vectors=True)
    assert np.all(r.residuals <= 1e-8 * np.maximum(np.abs(r.eigenvalues), 1.0))
    assert r.vectors.shape == (800, 3)


def test_count_below_consistent():
    p = assemble(RadialOperatorSpec(3, 1.0), Grid.uniform(0, math.pi, 100))
    ref = dense_oracle_eigs(p)
    for x in (0.5, 3.2, 20.0, 100.0):
        assert count_below(p, x) == int(np.sum(ref < x))


def test_count_validation():
    p = assemble(RadialOperatorSpec(3, 1.0), Grid.uniform(0, math.pi, 10))
    with pytest.raises(DomainError):
        tridiag_lowest(p, 0)
    with pytest.raises(DomainError):
        tridiag_lowest(p, 11)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_spindle_second_order(n):
    sp = Spindle.closed(sphere_section(n, 1.0), 1.0)
    errs = [abs(spindle_lambda1(sp, Grid.uniform(0, math.pi, M)).lambda1 - n) for M in (500, 1000)]
    order = math.log2(errs[0] / errs[1])
    assert order >= 1.8
    assert errs[1] < 2e-5 * n


@pytest.mark.parametrize("n,R", [(3, 1.3), (4, 1.1), (5, 2.0), (3, 0.8)])
def test_spindle_exact_formula(n, R):
    sp = Spindle.closed(sphere_section(n, R), 1.0)
    res = spindle_lambda1(sp, Grid.uniform(0, math.pi, 4000))
    exact = min(n, spindle_ground(n, (n - 1) / R**2))
    assert res.lambda1 == pytest.approx(exact, rel=1e-5)
    assert res.binding_mode == (0 if n <= spindle_ground(n, (n - 1) / R**2) else 1)


def test_spindle_scales_with_ell():
    sec = sphere_section(4, 1.4)
    a = spindle_lambda1(Spindle.closed(sec, 1.0), Grid.uniform(0, math.pi, 2000)).lambda1
    b = spindle_lambda1(Spindle.closed(sec, 9.0), Grid.uniform(0, math.pi / 3, 2000)).lambda1
    assert b == pytest.approx(9 * a, rel=1e-10)


def test_mode_scan_terminates_with_table():
    sec = table_section(2, 1.0, [0.0, 2.0])
    sp = Spindle.closed(sec, 1.0)
    with pytest.raises(ModelError, match="ends at index"):
        spindle_lambda1(sp, Grid.uniform(0, math.pi, 200), min_modes=3)
    assert spindle_lambda1(sp, Grid.uniform(0, math.pi, 400)).lambda1 == pytest.approx(3.0, rel=1e-3)


def test_non_spindle_rejected():
    with pytest.raises(ModelError, match="computable"):
        spindle_lambda1(catalog_model("large-sphere-cone").model)


def test_schrodinger_ground_constant_potential():
    sp = Spindle.closed(sphere_section(3, 1.0), 1.0)
    g = Grid.uniform(0, math.pi, 400)
    assert schrodinger_ground(sp, lambda r: 2.0 + 0 * r, 0.5, g) == pytest.approx(2.0, abs=1e-9)
    assert schrodinger_ground(sp, lambda r: np.cos(r), 0.0, g) == pytest.approx(np.cos(g.nodes).min())
    with pytest.raises(DomainError):
        schrodinger_ground(sp, lambda r: 0 * r, 1.0, g)


def test_schrodinger_critical_from_above():
    n, R, ell = 3, 1.2, 1.0
    kappa = 1 / R**2
    sp = Spindle.closed(sphere_section(n, R), ell)
    t = (1 - kappa) * 4 * (n - 1) / (n * (n - 2))
    k = lambda r: ricci_bound_cone(n, ell, kappa, r)
    study = mesh_study(lambda g: schrodinger_ground(sp, k, t, g), Grid.uniform(0, math.pi, 2000), 0.02)
    limit = (n * kappa - 1) * ell
    assert all(v > limit for v in study.values)
    assert study.values[0] > study.values[1] > study.values[2]
    assert study.converged


def test_largest_ratio_simple():
    S = AssembledPencil(np.array([2.0, 2.0]), np.array([-1.0]), np.ones(2), Grid.uniform(0, 1, 8))
    # (diag(1, 0), S): ratio = max v1^2 / v^T S v = (S^{-1})_{11} = 2/3
    assert largest_ratio(np.array([1.0, 0.0]), S) == pytest.approx(2 / 3, rel=1e-10)
    assert largest_ratio(np.zeros(2), S) == 0.0


def test_form_bound_three_dim_cone():
    R = math.sqrt(8 / 6)
    sp = Spindle(1.0, sphere_section(3, R), 0.0)
    g = Grid.geometric_span(1.0, 3000, 60.0)
    C, cp = form_bound_estimate(lambda r: (1 - 1 / R**2) / r**2, sp, g)
    assert 0.97 < C <= 1.0
    assert cp > 0


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("CONESPEC_THREADS", "1")
    assert thread_count() == 1
    monkeypatch.setenv("CONESPEC_THREADS", "junk")
    assert 1 <= thread_count() <= 8


def test_single_thread_deterministic(monkeypatch):
    sp = Spindle.closed(sphere_section(3, 1.3), 1.0)
    g = Grid.uniform(0, math.pi, 600)
    a = spindle_lambda1(sp, g).lambda1
    monkeypatch.setenv("CONESPEC_THREADS", "1")
    assert spindle_lambda1(sp, g).lambda1 == a
