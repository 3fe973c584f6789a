"""Built-in benchmark instances used by the README, CLI docs, and tests."""

from __future__ import annotations

import numpy as np

from .instance import EllipsoidalHypothesis, QuadraticForm

# A 3-state game with l = 0, r = 0 whose coefficient system has integer
# entries: D is negative definite (full revelation is Bayesian-optimal) and
# E is positive definite, so the pessimistic penalty eventually forces the
# solution rank all the way down to zero along a homothetic sweep.
BENCH3_Q = np.array(
    [
        [31.0, -33.0, 51.0, -5.0, 2.0, -3.0],
        [-33.0, 67.0, -80.0, 4.0, -9.0, 6.0],
        [51.0, -80.0, 112.0, -7.0, 8.0, -11.0],
        [-5.0, 4.0, -7.0, 1.0, 0.0, 0.0],
        [2.0, -9.0, 8.0, 0.0, 2.0, 0.0],
        [-3.0, 6.0, -11.0, 0.0, 0.0, 4.0],
    ]
)

BENCH3_D = np.array(
    [[-9.0, 6.0, -10.0], [6.0, -16.0, 14.0], [-10.0, 14.0, -18.0]]
)

BENCH3_E = np.array(
    [[116.0, -192.0, 260.0], [-192.0, 404.0, -504.0], [260.0, -504.0, 648.0]]
)


def bench3_form() -> QuadraticForm:
    """The 3-state benchmark game in reduced form (Q above, l = 0, r = 0)."""
    return QuadraticForm(n=3, Q=BENCH3_Q, l=np.zeros(6), r=0.0)


def bench3_hypothesis(eps: float = 1.0) -> EllipsoidalHypothesis:
    """Identity-shaped hypothesis C = eps * I_3 for the benchmark game."""
    return EllipsoidalHypothesis(C=eps * np.eye(3), scale=eps, base=np.eye(3))


def tracking_form(k: float, n: int) -> QuadraticForm:
    """Reduced form of the tracking game with cost ||x_tilde - k x||^2."""
    eye = np.eye(n)
    q = np.block([[k * k * eye, -k * eye], [-k * eye, eye]])
    return QuadraticForm(n=n, Q=q, l=np.zeros(2 * n), r=0.0)
