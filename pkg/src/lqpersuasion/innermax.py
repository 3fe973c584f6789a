"""Worst-case inner maximization over the credible-mean ball.

The adversarial penalty at a fixed Bayesian mean is

    max_{eta in unit ball}  eta^T Qm eta + 2 v^T eta,

with Qm PSD.  Its exact value is the 1-D convex dual

    inf_{lam > lambda_max(Qm)}  lam + v^T (lam I - Qm)^{-1} v,

a secular-equation minimization in Qm's eigenbasis: the derivative is
1 - sum_i w_i^2/(lam - lam_i)^2 with w = V^T v, monotone increasing on
(lambda_max, inf), so bisection on its sign finds the minimizer.  When v has
no component on the top eigenspace the infimum may sit at the boundary
lam -> lambda_max and is evaluated analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NumericalFailure
from .spectral import default_zero_tol, eig_sym, sym


@dataclass(frozen=True)
class InnerMaxProblem:
    """Quadratic (Qm, v) of the inner maximization; Qm must be PSD."""

    Qm: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        qm = sym(self.Qm)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if qm.shape[0] != v.shape[0]:
            raise InvalidParameter("Qm and v dimensions differ")
        object.__setattr__(self, "Qm", qm)
        object.__setattr__(self, "v", v)


def _penalty_from_spectrum(
    lams: np.ndarray, w: np.ndarray, tol: float, max_iter: int = 200
) -> float:
    """Exact penalty given Qm's eigenvalues (descending) and v in eigenbasis."""
    lmax = float(lams[0]) if lams.size else 0.0
    vnorm = float(np.linalg.norm(w))
    if vnorm == 0.0:
        return lmax
    band = max(tol, 1e-12 * (1.0 + abs(lmax)))
    top = lams >= lmax - band
    w_top_sq = float(np.sum(w[top] ** 2))
    rest_l = lams[~top]
    rest_w_sq = w[~top] ** 2

    def deriv(lam: float) -> float:
        return 1.0 - w_top_sq / (lam - lmax) ** 2 - float(
            np.sum(rest_w_sq / (lam - rest_l) ** 2)
        )

    def value(lam: float) -> float:
        out = lam + float(np.sum(rest_w_sq / (lam - rest_l)))
        if w_top_sq > 0.0:
            out += w_top_sq / (lam - lmax)
        return out

    if w_top_sq <= (1e-14 * vnorm) ** 2:
        # no mass on the top eigenspace: the derivative has a finite limit at
        # lmax+; if it is nonnegative there the infimum is the boundary value
        w_top_sq = 0.0
        d0 = 1.0 - float(np.sum(rest_w_sq / (lmax - rest_l) ** 2))
        if d0 >= 0.0:
            return lmax + float(np.sum(rest_w_sq / (lmax - rest_l)))
        lo, hi = lmax, lmax + vnorm
    else:
        # root lies in [lmax + |w_top|, lmax + ||v||]
        lo, hi = lmax + np.sqrt(w_top_sq) * 0.5, lmax + vnorm
    # the derivative is negative at lo and nonnegative at hi (+ margin)
    hi += 1e-15 * (1.0 + abs(hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if deriv(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam_star = 0.5 * (lo + hi)
    if not np.isfinite(lam_star):
        raise NumericalFailure("inner-max bisection produced a non-finite multiplier")
    return value(lam_star)


def worst_case_penalty(p: InnerMaxProblem, tol: float | None = None) -> float:
    """Exact worst-case penalty max_{||eta||<=1} eta^T Qm eta + 2 v^T eta."""
    w, v = eig_sym(p.Qm)
    if tol is None:
        tol = default_zero_tol(p.Qm)
    return _penalty_from_spectrum(w, v.T @ p.v, tol)


def worst_case_penalty_batch(
    Qm: np.ndarray, V: np.ndarray, tol: float | None = None, max_iter: int = 120
) -> np.ndarray:
    """Vectorized worst-case penalty for many v vectors (rows of ``V``).

    Same secular-equation bisection as :func:`worst_case_penalty`, run on all
    rows simultaneously; used by the Monte-Carlo evaluator where each sample
    contributes one v.
    """
    lams, vecs = eig_sym(sym(Qm))
    if tol is None:
        tol = default_zero_tol(Qm)
    W = np.asarray(V, dtype=float) @ vecs  # rows in the eigenbasis
    m, n = W.shape
    if n == 0:
        return np.zeros(m)
    lmax = float(lams[0])
    band = max(tol, 1e-12 * (1.0 + abs(lmax)))
    top = lams >= lmax - band
    w_top_sq = np.sum(W[:, top] ** 2, axis=1)
    rest_l = lams[~top]
    rest_w_sq = W[:, ~top] ** 2
    vnorm = np.sqrt(np.sum(W**2, axis=1))

    out = np.full(m, lmax)
    live = vnorm > 0.0
    if not np.any(live):
        return out

    has_top = w_top_sq > (1e-14 * np.maximum(vnorm, 1e-300)) ** 2
    w_top_sq = np.where(has_top, w_top_sq, 0.0)

    # boundary case: no top mass and nonnegative derivative limit at lmax+
    with np.errstate(divide="ignore"):
        d0 = 1.0 - np.sum(rest_w_sq / (lmax - rest_l) ** 2, axis=1)
    boundary = live & ~has_top & (d0 >= 0.0)
    if np.any(boundary):
        out[boundary] = lmax + np.sum(
            rest_w_sq[boundary] / (lmax - rest_l), axis=1
        )

    interior = live & ~boundary
    if np.any(interior):
        idx = np.where(interior)[0]
        wts = w_top_sq[idx]
        rsq = rest_w_sq[idx]
        lo = np.where(wts > 0.0, lmax + 0.5 * np.sqrt(wts), lmax)
        hi = lmax + vnorm[idx]
        hi = hi + 1e-15 * (1.0 + np.abs(hi))
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            d = 1.0 - np.sum(rsq / (mid[:, None] - rest_l[None, :]) ** 2, axis=1)
            nz = mid > lmax
            d[nz] -= wts[nz] / (mid[nz] - lmax) ** 2
            d[~nz] = -np.inf
            neg = d < 0.0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
        lam = 0.5 * (lo + hi)
        val = lam + np.sum(rsq / (lam[:, None] - rest_l[None, :]), axis=1)
        val += np.where(wts > 0.0, wts / np.maximum(lam - lmax, 1e-300), 0.0)
        out[idx] = val
    return out


def penalty_bounds(p: InnerMaxProblem, beta: float) -> tuple[float, float]:
    """Two-sided sandwich: (1-b^2) lmax + 2 b ||v||  <=  penalty  <=  lmax + 2||v||."""
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameter("beta must lie in [0, 1]")
    lmax = float(np.max(np.linalg.eigvalsh(p.Qm))) if p.Qm.size else 0.0
    vnorm = float(np.linalg.norm(p.v))
    lower = (1.0 - beta * beta) * lmax + 2.0 * beta * vnorm
    upper = lmax + 2.0 * vnorm
    return lower, upper


def gamma_fn(beta: float, kappa: float) -> float:
    """Pessimistic/optimistic matching ratio gamma(beta) for a given kappa.

    Piecewise: (2 - b^2 - 2 b k)/(1 - b^2 (1 + k^2)) while 1 - b^2 - b k > 0,
    else 1/(1 - b^2); minimized at beta_bar = k/(1+k^2) with value
    gamma_bar = 1 + 1/(1+k^2).
    """
    if not 0.0 <= beta <= 1.0 or not 0.0 <= kappa <= 1.0:
        raise InvalidParameter("beta and kappa must lie in [0, 1]")
    b2 = beta * beta
    if 1.0 - b2 - beta * kappa > 0.0:
        return (2.0 - b2 - 2.0 * beta * kappa) / (1.0 - b2 * (1.0 + kappa * kappa))
    if b2 >= 1.0:
        return float("inf")
    return 1.0 / (1.0 - b2)
