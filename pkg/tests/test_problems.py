"""Problem container, spectral-norm estimation, and admissibility tests."""

import numpy as np
import pytest

from pdhglab import (
    Admissibility,
    PowerIterationError,
    PrimalDualPair,
    SaddleProblem,
    check_admissibility,
    operator_norm,
)


def test_operator_norm_small_examples():
    assert operator_norm(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0, abs=1e-12)
    assert operator_norm(np.array([[3.0]])) == pytest.approx(3.0, abs=1e-12)
    got = operator_norm(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert got == pytest.approx(5.464985704219043, abs=1e-9)


def test_operator_norm_zero_matrix():
    assert operator_norm(np.zeros((3, 2))) == 0.0


def test_operator_norm_matches_dense_svd():
    rng = np.random.default_rng(19)
    for _ in range(50):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        F = rng.standard_normal((m, n)) * float(rng.uniform(0.1, 10.0))
        want = np.linalg.svd(F, compute_uv=False)[0]
        got = operator_norm(F)
        assert abs(got - want) <= 1e-8 * max(1.0, want)


def test_operator_norm_nonconvergence_carries_estimate():
    F = np.array([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(PowerIterationError) as info:
        operator_norm(F, tol=1e-30, max_iter=3)
    # the partial estimate is still in the right ballpark
    assert abs(info.value.estimate - 5.464985704219043) <= 0.5


def test_check_admissibility_examples():
    rep = check_admissibility(0.5, 1.0)
    assert isinstance(rep, Admissibility)
    assert rep.admissible and rep.margin == pytest.approx(0.5)
    # the boundary s * ||F|| = 1 is excluded
    assert not check_admissibility(1.0, 1.0).admissible
    s = 0.9 / operator_norm(np.array([[3.0]]))
    rep = check_admissibility(s, 3.0)
    assert rep.admissible and rep.margin == pytest.approx(0.1, abs=1e-12)


def test_saddle_problem_holds_dimensions_and_oracles():
    F = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
    prob = SaddleProblem(
        d1=2,
        d2=3,
        F=F,
        prox_f=lambda v, t: v / (1.0 + t),
        prox_gstar=lambda w, t: w / (1.0 + t),
        mu=1.0,
        gamma=1.0,
    )
    assert prob.F.shape == (prob.d2, prob.d1)
    x = prob.prox_f(np.ones(2), 1.0)
    y = prob.prox_gstar(np.ones(3), 1.0)
    assert x.shape == (2,) and y.shape == (3,)
    assert prob.grad_f is None and prob.subdiff_gstar is None


def test_primal_dual_pair_is_a_plain_container():
    pair = PrimalDualPair(np.array([1.0]), np.array([2.0, 3.0]))
    assert pair.x.shape == (1,) and pair.y.shape == (2,)
