import math

import numpy as np
import pytest

from conftest import ball_max_oracle, random_psd
from lqpersuasion import (
    InnerMaxProblem,
    gamma_fn,
    penalty_bounds,
    worst_case_penalty,
    worst_case_penalty_batch,
)
from lqpersuasion.errors import InvalidParameter


def test_scaled_identity_closed_form():
    rng = np.random.default_rng(20)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        s = float(rng.uniform(0.0, 5.0))
        v = rng.normal(size=n)
        val = worst_case_penalty(InnerMaxProblem(s * np.eye(n), v))
        expect = s + 2.0 * float(np.linalg.norm(v))
        assert val == pytest.approx(expect, abs=1e-12 * (1.0 + expect))


def test_zero_vector_returns_top_eigenvalue():
    qm = np.diag([3.0, 1.0, 0.5])
    assert worst_case_penalty(InnerMaxProblem(qm, np.zeros(3))) == pytest.approx(3.0)


def test_matches_ball_grid_oracle():
    rng = np.random.default_rng(21)
    for s in range(8):
        qm = random_psd(rng, 3)
        v = rng.normal(size=3) * float(rng.uniform(0.1, 3.0))
        val = worst_case_penalty(InnerMaxProblem(qm, v))
        ref = ball_max_oracle(qm, v, n_points=200_000, seed=s)
        assert val == pytest.approx(ref, abs=1e-5)
        assert val >= ref - 1e-9  # never below an achieved feasible value


def test_no_top_mass_boundary_case():
    # v orthogonal to the top eigenspace with a small remainder: the optimal
    # multiplier sits at the boundary and the value is still exact
    qm = np.diag([4.0, 1.0])
    v = np.array([0.0, 0.05])
    val = worst_case_penalty(InnerMaxProblem(qm, v))
    ref = ball_max_oracle(qm, v, n_points=200_000, seed=0)
    assert val == pytest.approx(ref, abs=1e-9)


def test_orthogonal_invariance():
    rng = np.random.default_rng(22)
    qm = random_psd(rng, 4)
    v = rng.normal(size=4)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    a = worst_case_penalty(InnerMaxProblem(qm, v))
    b = worst_case_penalty(InnerMaxProblem(q.T @ qm @ q, q.T @ v))
    assert a == pytest.approx(b, rel=1e-10)


def test_monotone_in_v_scale():
    rng = np.random.default_rng(23)
    qm = random_psd(rng, 3)
    v = rng.normal(size=3)
    vals = [worst_case_penalty(InnerMaxProblem(qm, s * v)) for s in (0.0, 0.5, 1.0, 2.0)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_batch_agrees_with_scalar():
    rng = np.random.default_rng(24)
    qm = random_psd(rng, 4)
    V = rng.normal(size=(200, 4)) * rng.uniform(0.0, 3.0, size=(200, 1))
    V[0] = 0.0  # degenerate row
    batch = worst_case_penalty_batch(qm, V)
    for i in range(V.shape[0]):
        assert batch[i] == pytest.approx(
            worst_case_penalty(InnerMaxProblem(qm, V[i])), rel=1e-9, abs=1e-9
        )


def test_penalty_bounds_sandwich():
    rng = np.random.default_rng(25)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        qm = random_psd(rng, n)
        v = rng.normal(size=n) * float(rng.uniform(0.0, 2.0))
        p = InnerMaxProblem(qm, v)
        val = worst_case_penalty(p)
        beta = float(rng.uniform(0.0, 1.0))
        lo, hi = penalty_bounds(p, beta)
        assert lo <= val + 1e-9
        assert val <= hi + 1e-9
    with pytest.raises(InvalidParameter):
        penalty_bounds(InnerMaxProblem(np.eye(2), np.zeros(2)), 1.5)


def test_gamma_fn_minimized_at_beta_bar():
    for kappa in (0.2, math.sqrt(2.0 / (math.pi + 2.0)), 0.9):
        beta_bar = kappa / (1.0 + kappa * kappa)
        gamma_bar = 1.0 + 1.0 / (1.0 + kappa * kappa)
        assert gamma_fn(beta_bar, kappa) == pytest.approx(gamma_bar, rel=1e-12)
        grid = np.linspace(0.0, 1.0, 2001)
        vals = [gamma_fn(float(b), kappa) for b in grid]
        assert min(vals) >= gamma_bar - 1e-9
    with pytest.raises(InvalidParameter):
        gamma_fn(-0.1, 0.5)
    with pytest.raises(InvalidParameter):
        gamma_fn(0.5, 1.5)


def test_gamma_fn_continuous_at_regime_boundary():
    kappa = 0.6
    # boundary where 1 - b^2 - b*kappa = 0
    b0 = (-kappa + math.sqrt(kappa * kappa + 4.0)) / 2.0
    below = gamma_fn(b0 - 1e-9, kappa)
    above = gamma_fn(min(b0 + 1e-9, 1.0), kappa)
    assert below == pytest.approx(above, rel=1e-5)


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidParameter):
        InnerMaxProblem(np.eye(3), np.zeros(2))
