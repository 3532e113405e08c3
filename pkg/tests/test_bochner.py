import numpy as np
import pytest

from conespec.bochner import (
    BochnerInstance,
    be1_pointwise_check,
    be1_slack_batch,
    be1_slacks,
    find_violation,
    fuzz,
    gamma2,
    random_instances,
    self_improvement_gap,
)
from conespec.errors import DomainError


def inst(n, g, H, R, k, N=None):
    return BochnerInstance(n, float(N or n), np.asarray(g, float), np.asarray(H, float), np.asarray(R, float), k)


def test_gamma2_examples():
    e1 = np.eye(3)[0]
    assert gamma2(inst(3, e1, np.zeros((3, 3)), np.eye(3), 1.0)) == 1.0
    assert gamma2(inst(3, np.zeros(3), np.eye(3), np.zeros((3, 3)), 0.0)) == 3.0


def test_instance_validation():
    with pytest.raises(DomainError):
        inst(2, [1, 0], np.eye(2), np.zeros((2, 2)), 1.0)
    with pytest.raises(DomainError):
        inst(2, [1, 0], [[0, 1], [0, 0]], np.eye(2), 0.0)
    with pytest.raises(DomainError):
        BochnerInstance(3, 2.0, np.ones(3), np.eye(3), np.eye(3), 0.0)


def test_self_improvement_examples():
    i = inst(2, [1, 0], np.diag([1.0, -1.0]), np.zeros((2, 2)), 0.0, 2)
    lhs, rhs = self_improvement_gap(i, [1, 0], [0, 1])
    assert lhs == pytest.approx(2.0) and rhs == 0.0
    i = inst(3, [1, 2, 0], np.eye(3), np.eye(3) * 2, 1.0)
    lhs, rhs = self_improvement_gap(i, [1, 0, 0], [0, 1, 0])
    assert rhs == 0.0 and lhs == pytest.approx(5.0)
    with pytest.raises(DomainError):
        self_improvement_gap(i, [0, 0, 0], [1, 0, 0])


def test_self_improvement_random(rng):
    g, H, R, k = random_instances(rng, 4, 3000)
    for j in range(3000):
        i = BochnerInstance(4, 4.0, g[j], H[j], R[j], float(k[j]))
        v, w = rng.standard_normal(4), rng.standard_normal(4)
        lhs, rhs = self_improvement_gap(i, v, w)
        assert lhs >= rhs - i.tol()


def test_be1_equality_and_trivial():
    for n in (2, 3, 5):
        e1 = np.eye(n)[0]
        assert be1_pointwise_check(inst(n, e1, np.eye(n), np.zeros((n, n)), 0.0)) == pytest.approx(0.0, abs=1e-12)
        R = np.diag(np.arange(1.0, n + 1))
        g = np.arange(1.0, n + 1)
        assert be1_pointwise_check(inst(n, g, np.zeros((n, n)), R, 0.5)) == pytest.approx(g @ (R - 0.5 * np.eye(n)) @ g)


def test_be1_forms_and_scalar_relation(rng):
    g, H, R, k = random_instances(rng, 3, 2000)
    for j in range(2000):
        s = be1_slacks(BochnerInstance(3, 3.0, g[j], H[j], R[j], float(k[j])))
        assert abs(s.slack - s.slack_N_form) <= s.tol
        assert s.slack_scalar >= s.slack - s.tol
        assert s.slack >= -s.tol


def test_be1_implies_be2(rng):
    g, H, R, k = random_instances(rng, 3, 2000)
    for j in range(2000):
        i = BochnerInstance(3, 3.0, g[j], H[j], R[j], float(k[j]))
        be2 = gamma2(i) - i.k * g[j] @ g[j] - np.trace(H[j]) ** 2 / 3
        assert be2 >= be1_pointwise_check(i) - i.tol()


def test_N_monotone(rng):
    g, H, R, k = random_instances(rng, 3, 500)
    for j in range(500):
        vals = [be1_pointwise_check(BochnerInstance(3, N, g[j], H[j], R[j], float(k[j]))) for N in (3.0, 4.0, 10.0)]
        assert vals[0] <= vals[1] + 1e-9 and vals[1] <= vals[2] + 1e-9


def test_orthogonal_invariance(rng):
    g, H, R, k = random_instances(rng, 4, 100)
    for j in range(100):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        a = be1_pointwise_check(BochnerInstance(4, 4.0, g[j], H[j], R[j], float(k[j])))
        b = be1_pointwise_check(BochnerInstance(4, 4.0, Q @ g[j], Q @ H[j] @ Q.T, Q @ R[j] @ Q.T, float(k[j])))
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a)) * 1e3


def test_batch_matches_scalar(rng):
    g, H, R, k = random_instances(rng, 3, 200)
    slack, _ = be1_slack_batch(g, H, R, k, 3.0)
    ref = [be1_pointwise_check(BochnerInstance(3, 3.0, g[j], H[j], R[j], float(k[j]))) for j in range(200)]
    assert np.allclose(slack, ref, rtol=1e-10, atol=1e-9)


def test_fuzz_and_counterexample():
    assert fuzz(3, 20_000, seed=3).violations == 0
    bad = find_violation(3, seed=3)
    assert bad is not None and be1_pointwise_check(bad) < -bad.tol()
    with pytest.raises(DomainError):
        BochnerInstance(bad.n, bad.N, bad.g, bad.H, bad.R, bad.k)


def test_fuzz_reproducible():
    a = fuzz(4, 5000, seed=11)
    b = fuzz(4, 5000, seed=11)
    assert a == b
