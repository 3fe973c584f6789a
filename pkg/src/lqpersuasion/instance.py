"""Game representation and the coefficient system of the trace programs.

A quadratic sender/receiver game is given either raw (cost matrix M, linear
term p, constant q, plus the receiver's affine best response a = B x_hat + b)
or already reduced to the nonnegative form

    cost(x, x_hat) = (z - l)^T Q (z - l) + r,     z = [x; x_hat],

with Q PSD and r >= 0.  From the reduced form and an ellipsoidal
credible-mean hypothesis ``mu_bar + C B`` this module derives the
coefficients (D, E, f, c, lambda_bar, lambda_bar_2, t_bar) that all five
covariance-level programs are written in, plus the isotropic-prior constants
kappa, beta_bar, gamma_bar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidMatrix,
    InvalidParameter,
    InvalidRadius,
    LinearTermOutsideRange,
    NotNonnegativeCost,
    NotPD,
    SingularCrossTerm,
)
from .spectral import default_zero_tol, eig_sym, neg_projections, spectral_norm, sqrt_psd, sym


# --------------------------------------------------------------------------
# game forms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RawGame:
    """Raw quadratic game: sender cost and receiver best response.

    Sender cost u(a, x) = [x; a]^T M [x; a] + p^T [x; a] + q with the
    receiver playing a = B x_hat + b against its estimate x_hat.
    """

    n: int
    k: int
    M: np.ndarray
    p: np.ndarray
    q: float
    B: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        m = sym(self.M)
        p = np.asarray(self.p, dtype=float).reshape(-1)
        bmat = np.asarray(self.B, dtype=float)
        bvec = np.asarray(self.b, dtype=float).reshape(-1)
        d = self.n + self.k
        if m.shape != (d, d) or p.shape != (d,):
            raise InvalidMatrix("M/p dimensions inconsistent with n+k")
        if bmat.shape != (self.k, self.n) or bvec.shape != (self.k,):
            raise InvalidMatrix("B/b dimensions inconsistent with (k, n)")
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "B", bmat)
        object.__setattr__(self, "b", bvec)
        object.__setattr__(self, "q", float(self.q))

    def cost(self, x: np.ndarray, x_hat: np.ndarray) -> float:
        """Sender cost at state x when the receiver's estimate is x_hat."""
        a = self.B @ np.asarray(x_hat, float) + self.b
        z = np.concatenate([np.asarray(x, float), a])
        return float(z @ self.M @ z + self.p @ z + self.q)


@dataclass(frozen=True)
class QuadraticForm:
    """Reduced nonnegative cost form ((x, x_hat) - l)^T Q (...) + r."""

    n: int
    Q: np.ndarray
    l: np.ndarray
    r: float

    def __post_init__(self):
        q = sym(self.Q)
        l = np.asarray(self.l, dtype=float).reshape(-1)
        if q.shape != (2 * self.n, 2 * self.n) or l.shape != (2 * self.n,):
            raise InvalidMatrix("Q/l dimensions inconsistent with 2n")
        tol = default_zero_tol(q)
        wmin = float(np.min(np.linalg.eigvalsh(q)))
        if wmin < -tol:
            raise NotNonnegativeCost(f"Q has eigenvalue {wmin:.3e} < -{tol:.3e}")
        if self.r < -tol:
            raise NotNonnegativeCost(f"constant term r = {self.r:.3e} is negative")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "r", float(self.r))

    # block accessors -------------------------------------------------------
    @property
    def q11(self) -> np.ndarray:
        return self.Q[: self.n, : self.n]

    @property
    def q12(self) -> np.ndarray:
        return self.Q[: self.n, self.n :]

    @property
    def q21(self) -> np.ndarray:
        return self.Q[self.n :, : self.n]

    @property
    def q22(self) -> np.ndarray:
        return self.Q[self.n :, self.n :]

    @property
    def l1(self) -> np.ndarray:
        return self.l[: self.n]

    @property
    def l2(self) -> np.ndarray:
        return self.l[self.n :]

    def cost(self, x: np.ndarray, x_hat: np.ndarray) -> float:
        z = np.concatenate([np.asarray(x, float), np.asarray(x_hat, float)]) - self.l
        return float(z @ self.Q @ z + self.r)


def decompose_nonneg(g: RawGame) -> QuadraticForm:
    """Reduce a raw game to the nonnegative quadratic form in (x, x_hat).

    Substitutes the receiver's best response a = B x_hat + b into the sender
    cost and completes the square: Q collects the quadratic part, the linear
    part p' must lie in the range of Q (minimum-norm solve l of
    Q l = -p'/2), and the remaining constant r must be nonnegative.
    """
    n, k = g.n, g.k
    m11 = g.M[:n, :n]
    m12 = g.M[:n, n:]
    m21 = g.M[n:, :n]
    m22 = g.M[n:, n:]
    p1 = g.p[:n]
    p2 = g.p[n:]
    B, b = g.B, g.b

    q = np.block([[m11, m12 @ B], [B.T @ m21, B.T @ m22 @ B]])
    q = sym(q)
    p_prime = np.concatenate([p1 + 2.0 * m12 @ b, B.T @ p2 + 2.0 * B.T @ m22 @ b])
    q_prime = g.q + float(b @ m22 @ b) + float(p2 @ b)

    w, v = eig_sym(q)
    tol = default_zero_tol(q)
    if w.size and float(w[-1]) < -tol:
        raise NotNonnegativeCost(
            f"quadratic part has eigenvalue {w[-1]:.3e}; cost is not nonnegative"
        )
    # minimum-norm solve of Q l = -p'/2 through the spectral pseudoinverse
    sigma_max = float(np.max(np.abs(w), initial=0.0))
    keep = np.abs(w) > 1e-10 * sigma_max
    winv = np.zeros_like(w)
    winv[keep] = 1.0 / w[keep]
    l = -(v * winv) @ (v.T @ p_prime) / 2.0
    residual = float(np.linalg.norm(q @ l + p_prime / 2.0))
    scale = 1.0 + sigma_max + float(np.linalg.norm(p_prime))
    if residual > 1e-7 * scale:
        raise LinearTermOutsideRange(
            f"linear term is not in the range of the quadratic part "
            f"(residual {residual:.3e}); cost cannot be nonnegative"
        )
    r = q_prime - float(l @ q @ l)
    if r < -1e-7 * (1.0 + abs(q_prime)):
        raise NotNonnegativeCost(f"completed-square constant r = {r:.3e} is negative")
    return QuadraticForm(n=n, Q=q, l=l, r=max(r, 0.0))


# --------------------------------------------------------------------------
# hypothesis builders
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipsoidalHypothesis:
    """Credible-mean ball mu_bar + C * B (B the unit ball).

    ``scale``/``base`` are kept when the hypothesis was built as C = eps*C0.
    ``center_shifted`` flags builders whose underlying ball is not centered
    at the Bayesian mean (see hypothesis_affine_distortion).
    """

    C: np.ndarray
    scale: float | None = None
    base: np.ndarray | None = None
    center_shifted: bool = False

    def __post_init__(self):
        c = np.asarray(self.C, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or not np.all(np.isfinite(c)):
            raise InvalidMatrix("hypothesis matrix C must be square and finite")
        object.__setattr__(self, "C", c)

    @property
    def n(self) -> int:
        return self.C.shape[0]


def hypothesis_wasserstein(epsilon: float, n: int) -> EllipsoidalHypothesis:
    """Wasserstein-type hypothesis: mean ball of radius eps, C = eps*I."""
    if epsilon < 0.0:
        raise InvalidRadius("epsilon must be nonnegative")
    return EllipsoidalHypothesis(
        C=epsilon * np.eye(n), scale=float(epsilon), base=np.eye(n)
    )


def hypothesis_costly_update(R: np.ndarray, n: int, epsilon: float) -> EllipsoidalHypothesis:
    """Hypothesis from a receiver that pays an update cost before acting.

    The receiver holds an action quadratic with symmetric matrix ``R``
    ((n+k) x (n+k), here k = n so the cross block is square) and only moves
    off the default best response when it gains more than ``epsilon``; the
    set of credible actions maps to the mean ball with
    C = sqrt(eps) * R21^{-1} * sqrt(R22).
    """
    if epsilon < 0.0:
        raise InvalidRadius("epsilon must be nonnegative")
    R = sym(R)
    k = R.shape[0] - n
    if k != n:
        raise InvalidMatrix("costly-update builder needs a square cross block (k = n)")
    r21 = R[n:, :n]
    r22 = R[n:, n:]
    w22 = np.linalg.eigvalsh(sym(r22))
    if float(w22[0]) <= default_zero_tol(r22):
        raise NotPD("action block R22 must be positive definite")
    s = np.linalg.svd(r21, compute_uv=False)
    if s[0] <= 0.0 or s[0] / s[-1] > 1e12:
        raise SingularCrossTerm("cross block R21 is singular or ill-conditioned")
    c = math.sqrt(epsilon) * np.linalg.solve(r21, sqrt_psd(r22))
    return EllipsoidalHypothesis(C=c)


def hypothesis_mismatched_prior(
    epsilon: float, n: int, trace_sigma_bound: float | None = None
) -> EllipsoidalHypothesis:
    """Hypothesis for a receiver whose prior density is within a 1+eps band.

    ``trace_sigma_bound`` is a uniform bound on the posterior covariance
    trace; defaults to n (the prior's total variance), which is conservative.
    """
    if trace_sigma_bound is None:
        trace_sigma_bound = float(n)
    if epsilon < 0.0 or trace_sigma_bound < 0.0:
        raise InvalidRadius("epsilon and trace bound must be nonnegative")
    radius = math.sqrt(2.0 * epsilon + epsilon * epsilon) * math.sqrt(trace_sigma_bound)
    return EllipsoidalHypothesis(C=radius * np.eye(n), scale=radius, base=np.eye(n))


def hypothesis_affine_distortion(chi: float, epsilon: float, n: int) -> EllipsoidalHypothesis:
    """Hypothesis for a receiver that blends the Bayesian mean with an anchor.

    Radius (1-chi)*eps.  For chi < 1 the underlying credible ball is centered
    at a blend of the Bayesian mean and the anchor point, not at the Bayesian
    mean itself; ``center_shifted`` records that caveat — callers deciding to
    use this hypothesis in the mean-centered programs accept the recentering
    error themselves.
    """
    if not 0.0 <= chi <= 1.0:
        raise InvalidParameter("chi must lie in [0, 1]")
    if epsilon < 0.0:
        raise InvalidRadius("epsilon must be nonnegative")
    radius = (1.0 - chi) * epsilon
    return EllipsoidalHypothesis(
        C=radius * np.eye(n), scale=radius, base=np.eye(n), center_shifted=chi < 1.0
    )


# --------------------------------------------------------------------------
# derived coefficients
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivedCoefficients:
    """Coefficient system (D, E, f, c, lambda_bar, lambda_bar_2, t_bar).

    All five programs minimize Tr(D Sigma) + c plus a penalty built from
    lambda_bar and sqrt(f + Tr(E Sigma)) over the spectrahedron
    0 <= Sigma <= I.  t_bar = Tr(E P) with P the projection onto D's
    negative eigenspace is where the penalty-free optimum sits.
    """

    n: int
    D: np.ndarray
    E: np.ndarray
    f: float
    c: float
    lambda_bar: float
    lambda_bar_2: float
    t_bar: float

    def scaled(self, s: float) -> "DerivedCoefficients":
        """Coefficients for the homothetically scaled hypothesis C <- s*C."""
        if s < 0.0:
            raise InvalidParameter("homothety factor must be nonnegative")
        s2 = s * s
        return replace(
            self,
            E=s2 * self.E,
            f=s2 * self.f,
            lambda_bar=s2 * self.lambda_bar,
            lambda_bar_2=s2 * self.lambda_bar_2,
            t_bar=s2 * self.t_bar,
        )


def derive_coefficients(
    qf: QuadraticForm, hyp: EllipsoidalHypothesis
) -> DerivedCoefficients:
    """Derive the full coefficient system from a reduced game and hypothesis."""
    if hyp.n != qf.n:
        raise InvalidMatrix("hypothesis dimension does not match the game")
    C = hyp.C
    d = sym(qf.q12 + qf.q21 + qf.q22)
    c = qf.r + float(qf.l @ qf.Q @ qf.l) + float(np.trace(qf.q11))
    a = (qf.q12 + qf.q22) @ C
    e = sym(4.0 * a @ a.T)
    qm = sym(C.T @ qf.q22 @ C)
    w = np.linalg.eigvalsh(qm)
    lambda_bar = float(w[-1]) if w.size else 0.0
    lambda_bar_2 = float(w[-2]) if w.size > 1 else 0.0
    fvec = C.T @ (qf.q21 @ qf.l1 + qf.q22 @ qf.l2)
    f = 4.0 * float(fvec @ fvec)
    p_lt, _ = neg_projections(d)
    t_bar = float(np.trace(e @ p_lt))
    return DerivedCoefficients(
        n=qf.n,
        D=d,
        E=e,
        f=f,
        c=c,
        lambda_bar=lambda_bar,
        lambda_bar_2=lambda_bar_2,
        t_bar=t_bar,
    )


# --------------------------------------------------------------------------
# isotropic priors
# --------------------------------------------------------------------------

FAMILIES = ("gaussian", "sphere")


@dataclass(frozen=True)
class PriorSpec:
    """Named isotropic prior, centered with identity covariance.

    ``gaussian`` is N(0, I_n); ``sphere`` is uniform on the sphere of radius
    sqrt(n) (so that the covariance is I_n as well).
    """

    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown prior family {self.family!r}")
        if self.n < 1:
            raise InvalidParameter("dimension must be >= 1")


@dataclass(frozen=True)
class PriorStats:
    """Moments and derived constants of an isotropic prior."""

    family: str
    n: int
    E_abs_x1: float
    E_norm_x: float
    kappa: float
    beta_bar: float
    gamma_bar: float


def _gamma_ratio_half(n: int) -> float:
    """Gamma((n+1)/2) / Gamma(n/2) via log-gamma (overflow-safe)."""
    return math.exp(math.lgamma((n + 1) / 2.0) - math.lgamma(n / 2.0))


def prior_stats(prior: PriorSpec) -> PriorStats:
    """E|x_1|, E||x||, kappa, beta_bar, gamma_bar for the named prior.

    For any isotropic prior, E|x_1| = Gamma(n/2)/(sqrt(pi) Gamma((n+1)/2))
    times E||x||; the two families below just plug in their E||x||.
    """
    n = prior.n
    if prior.family == "gaussian":
        e_norm = math.sqrt(2.0) * _gamma_ratio_half(n)
        e_abs_x1 = math.sqrt(2.0 / math.pi)
    else:  # sphere of radius sqrt(n)
        e_norm = math.sqrt(n)
        e_abs_x1 = e_norm / (math.sqrt(math.pi) * _gamma_ratio_half(n))
    kappa = e_abs_x1 / math.sqrt(1.0 + e_abs_x1 * e_abs_x1)
    beta_bar = kappa / (1.0 + kappa * kappa)
    gamma_bar = 1.0 + 1.0 / (1.0 + kappa * kappa)
    return PriorStats(
        family=prior.family,
        n=n,
        E_abs_x1=e_abs_x1,
        E_norm_x=e_norm,
        kappa=kappa,
        beta_bar=beta_bar,
        gamma_bar=gamma_bar,
    )


def upsilon(n: int) -> float:
    """Smallest achievable gamma_bar at dimension n (sphere prior attains it).

    upsilon(n) = 3/2 + (1/2) / (1 + 2 n Gamma(n/2)^2 / (pi Gamma((n+1)/2)^2));
    strictly increasing with limit 2(3+pi)/(4+pi).
    """
    if n < 1:
        raise InvalidParameter("dimension must be >= 1")
    ratio = _gamma_ratio_half(n)
    denom = 1.0 + 2.0 * n / (math.pi * ratio * ratio)
    return 1.5 + 0.5 / denom
