import math
from fractions import Fraction

import numpy as np
import pytest

from conespec.errors import DomainError, ModelError
from conespec.estimates import (
    admissibility,
    alpha_bar_s,
    alpha_t,
    critical_t,
    gap_bound_hardy,
    gap_bound_multi,
    gap_bound_single,
    taming_thresholds,
    verify_chain,
)
from conespec.models import ConeCap, Spindle, sphere_section


def test_alpha_t_examples():
    assert alpha_t(3, 0) == 1.5
    assert alpha_t(3, 2 / 3) == pytest.approx(1.0)
    assert alpha_t(3, 0.5) == pytest.approx(1.2)
    with pytest.raises(DomainError):
        alpha_t(3, 1.0)
    assert np.all(np.diff([alpha_t(4, t) for t in np.linspace(0, 0.99, 50)]) < 0)


def test_alpha_bar_s_examples():
    assert alpha_bar_s(3, 0) == 1.5
    assert alpha_bar_s(3, 0.5) == pytest.approx(4 / 3)
    assert alpha_bar_s(4, 1.0) == 1.0
    assert alpha_bar_s(4, 1 - 1e-9) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        alpha_bar_s(3, 1.5)


def test_alpha_consistency():
    for n in (3, 4, 7):
        for s in np.linspace(0, n / (n - 1) - 1e-3, 40):
            assert alpha_bar_s(n, s) == pytest.approx(alpha_t(n, s * (n - 1) / n), rel=1e-14)


def test_admissibility_table():
    expected = {3: Fraction(5, 8), 4: Fraction(1, 3), 5: Fraction(1, 16), 6: Fraction(-1, 5)}
    for n, thr in expected.items():
        assert admissibility(n, Fraction(1)).threshold == thr
    assert admissibility(5, Fraction(1, 10)).admissible
    assert not admissibility(3, Fraction(5, 8)).admissible
    assert admissibility(6, 0).admissible
    assert admissibility(7, 0).threshold < 0
    with pytest.raises(DomainError):
        admissibility(2, 1)


def test_admissibility_flags():
    v = admissibility(3, Fraction(3, 4), Fraction(3, 2))
    assert v.closed_form_bound == 1 and v.critical_ratio == Fraction(2, 3)
    assert v.ketterer_ok and not v.density_ok
    assert admissibility(4, 1).density_ok
    assert admissibility(3, 1).ketterer_ok is None
    assert not admissibility(3, Fraction(1), Fraction(1, 2)).ketterer_ok


def test_gap_bound_single_examples():
    r = gap_bound_single(3, 10, 1.0, 1.0, math.pi / 2)
    assert r.t == 0 and r.alpha == 1.5 and r.bound == pytest.approx(3.0)
    r = gap_bound_single(6, 5, 0.0, 1.0, math.pi / 2)
    assert r.t == pytest.approx(5 / 6) and r.alpha == pytest.approx(1.0) and r.bound == pytest.approx(-1.0)
    assert r.corollary_bound == pytest.approx(-1.0)
    a = gap_bound_single(4, 3, 1.7, 1.0, 1.0)
    b = gap_bound_single(4, 3, 1.0, 1.0, 1.0)
    assert a == b.__class__(**{**b.__dict__, "inputs": a.inputs})


def test_gap_bound_single_errors():
    with pytest.raises(DomainError, match="admissibility"):
        gap_bound_single(3, 1, 0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        gap_bound_single(3, 1, 1.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        gap_bound_single(3, 1, 1.0, -1.0, 1.0)


def test_gap_bound_kappa_one_and_branch_i():
    for n in (3, 4, 6):
        for K in (0.5, 10.0):
            r = gap_bound_single(n, K, 1.0, 1.0, 1.2)
            assert r.bound == pytest.approx(n / (n - 1) * min(K, n - 1))
    r = gap_bound_single(4, 1.0, 0.8, 1.0, 1.3)
    L = (math.pi / 2.6) ** 2
    # K <= (n-1) ell: the bound dominates alpha (K - n (1-kappa) L)
    assert r.bound == pytest.approx(r.alpha * min(1.0, 3.0 - 4 * 0.2 * L))
    assert r.bound >= r.alpha * (1.0 - 4 * 0.2 * L)


def test_gap_bound_monotone():
    ks = np.linspace(0.7, 1.2, 20)
    b = [gap_bound_single(3, 100, k, 1.0, 1.3).bound for k in ks]
    assert np.all(np.diff(b) >= -1e-12)
    ls = np.linspace(0.1, 1.4, 20)
    b = [gap_bound_single(4, 100, 0.8, l, 1.3).bound for l in ls]
    assert np.all(np.diff(b) >= -1e-12)
    Ks = np.linspace(-1, 1, 10)
    b = [gap_bound_single(4, K, 0.8, 1.0, 1.3).bound for K in Ks]
    assert np.all(np.diff(b) >= -1e-12)


def test_intermediate_never_smaller():
    for k in (0.7, 0.9, 1.0):
        for rho in (0.5, 1.0, 1.5):
            r = gap_bound_single(3, 100, k, 1.0, rho)
            assert r.intermediate_bound >= r.bound - 1e-12


def test_gap_bound_multi():
    cap = ConeCap(1.2, 1.0, sphere_section(3, 1.1))
    single = gap_bound_single(3, 50, cap.kappa, 1.0, 1.2)
    multi = gap_bound_multi(3, 50, [cap])
    # one cap: the multi bound is the intermediate value of the single-cap argument
    assert multi.bound == pytest.approx(single.intermediate_bound, rel=1e-13)
    caps = [ConeCap(1.0, 0.5, sphere_section(4)), ConeCap(0.5, 2.0, sphere_section(4))]
    m = gap_bound_multi(4, 9, caps)
    assert m.alpha == pytest.approx(4 / 3) and m.bound == pytest.approx(4 / 3 * min(9, 1.5))
    rhos = [1.0, 0.7]
    caps = [ConeCap(r, (math.pi / (2 * r)) ** 2, sphere_section(4, 1.2)) for r in rhos]
    m = gap_bound_multi(4, 100, caps)
    kappa = 1 / 1.44
    assert m.bound == pytest.approx(m.alpha * (4 * kappa - 1) * min(c.ell for c in caps))
    assert m.corollary_bound == pytest.approx(m.bound)
    assert gap_bound_multi(3, 2.0, []).bound == 3.0


def test_gap_bound_hardy():
    assert gap_bound_hardy(3, 2.0, []) == 3.0
    assert gap_bound_hardy(3, 2.0, [0.5]) == pytest.approx(8 / 3)
    assert gap_bound_hardy(3, 1.0, [0.3, 0.3, 0.3], separated=True) == pytest.approx(alpha_bar_s(3, 0.3))
    assert gap_bound_hardy(3, 1.0, [0.3, 0.3, 0.3]) == pytest.approx(alpha_bar_s(3, 0.9))
    with pytest.raises(DomainError):
        gap_bound_hardy(3, 1.0, [0.8, 0.8])


def test_taming_thresholds():
    a, b, c = taming_thresholds()
    assert a == pytest.approx(1.264911, abs=1e-6)
    assert b == pytest.approx(1.154700, abs=1e-6)
    assert c == pytest.approx(1.069044, abs=1e-6)
    assert taming_thresholds(4)[0] > 1


def test_critical_t_exact():
    assert critical_t(3, Fraction(3, 4)) == Fraction(2, 3)
    assert critical_t(5, 2) == 0


def test_verify_chain_round():
    rep = verify_chain(Spindle.closed(sphere_section(3, 1.0), 1.0), cells=2000)
    assert rep.status == "pass"
    assert rep.lambda1 == pytest.approx(3.0, rel=1e-4)
    assert rep.bound == pytest.approx(3.0)
    assert "discrete" in rep.lambda1_kind


def test_verify_chain_slack_and_supercritical():
    rep = verify_chain(Spindle.closed(sphere_section(3, 1.2), 1.0), cells=2000)
    assert rep.status == "pass"
    assert rep.ground["0"] == -math.inf
    t_star = f"{critical_t(3, 1 / 1.44):.12g}"
    assert rep.bound < rep.chain[t_star] < rep.lambda1
    assert rep.mesh[t_star]["converged"]


def test_verify_chain_inconclusive_on_coarse_mesh():
    # near-critical tips on a very coarse grid change by far more than 2 % per doubling
    rep = verify_chain(Spindle.closed(sphere_section(3, 1.25), 1.0), cells=16)
    assert rep.status in ("inconclusive", "fail")
    assert not all(m["converged"] for m in rep.mesh.values())


def test_verify_chain_rejects_open():
    with pytest.raises(ModelError):
        verify_chain(Spindle(1.0, sphere_section(3), 1.0, "dirichlet"))
