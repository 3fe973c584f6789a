"""Ground-truth evaluation: Monte-Carlo cost of projective policies,
closed forms for the scalar case and the tracking example, and the
no/full-information crossover thresholds.

The Monte-Carlo sampler is counter-based (splitmix64 finalizer keyed by
(seed, sample index, coordinate stream)), so sample i's draw never depends
on how many samples were produced before it; chunked/parallel evaluation is
bit-identical to the sequential one by construction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameter, InvalidRadius, NumericalFailure, OutOfRegime
from .innermax import worst_case_penalty_batch
from .instance import PriorSpec, QuadraticForm, _gamma_ratio_half, prior_stats
from .spectral import sym

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM = np.uint64(0xD1B54A32D192ED03)


def _finalize64(z: np.ndarray) -> np.ndarray:
    """splitmix64 output finalizer on uint64 words."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def _uniforms(seed: int, idx: np.ndarray, stream: int) -> np.ndarray:
    """Uniform (0, 1] draws for the given sample indices on one stream."""
    with np.errstate(over="ignore"):  # uint64 arithmetic wraps by design
        base = np.uint64(seed) + np.uint64(stream) * _STREAM
        z = _finalize64(base + idx.astype(np.uint64) * _GOLDEN)
    return ((z >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def gaussian_samples(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Standard-normal samples with per-sample counters start..start+count-1.

    Box-Muller on two uniform streams per coordinate; no rejection, so the
    draw for a given (seed, index) is a pure function of the counter.
    """
    idx = np.arange(start, start + count, dtype=np.uint64)
    out = np.empty((count, dim))
    for j in range(dim):
        u1 = _uniforms(seed, idx, 2 * j)
        u2 = _uniforms(seed, idx, 2 * j + 1)
        out[:, j] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
    return out


def prior_samples(prior: PriorSpec, seed: int, start: int, count: int) -> np.ndarray:
    """Samples from a named isotropic prior (counter-based, order-free)."""
    g = gaussian_samples(seed, start, count, prior.n)
    if prior.family == "gaussian":
        return g
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms * math.sqrt(prior.n)


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo cost estimate: mean is the full objective value, stderr
    the standard error of its sampled penalty part."""

    mean: float
    stderr: float
    n_samples: int
    seed: int


def mc_true_cost(
    qf: QuadraticForm,
    C: np.ndarray,
    prior: PriorSpec,
    P: np.ndarray,
    n_samples: int,
    seed: int,
    n_workers: int = 1,
) -> McEstimate:
    """True cost of the projective policy y = Px under the worst-case
    credible-mean deviation, estimated by Monte Carlo.

    The Bayesian part Tr(D P) + c is exact; the adversarial penalty is the
    sample mean of the exact inner maximization at v(P x_i).  Deterministic
    for fixed (seed, n_samples) regardless of ``n_workers``.
    """
    if n_samples < 1:
        raise InvalidParameter("n_samples must be >= 1")
    C = np.asarray(C, dtype=float)
    P = sym(np.asarray(P, dtype=float))
    d = sym(qf.q12 + qf.q21 + qf.q22)
    c = qf.r + float(qf.l @ qf.Q @ qf.l) + float(np.trace(qf.q11))
    qm = sym(C.T @ qf.q22 @ C)
    m = qf.q21 + qf.q22
    base_vec = qf.q21 @ qf.l1 + qf.q22 @ qf.l2

    def penalties(start: int, count: int) -> np.ndarray:
        x = prior_samples(prior, seed, start, count)
        v_rows = (x @ P @ m.T - base_vec) @ C
        return worst_case_penalty_batch(qm, v_rows)

    if n_workers <= 1:
        pen = penalties(0, n_samples)
    else:
        bounds = np.linspace(0, n_samples, n_workers + 1).astype(int)
        chunks = [(int(a), int(b - a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=n_workers) as ex:
            parts = list(ex.map(lambda ab: penalties(*ab), chunks))
        pen = np.concatenate(parts)

    mean_pen = float(np.mean(pen))
    if n_samples > 1:
        stderr = float(np.std(pen, ddof=1) / math.sqrt(n_samples))
    else:
        stderr = 0.0
    value = float(np.sum(d * P)) + c + mean_pen
    return McEstimate(mean=value, stderr=stderr, n_samples=int(n_samples), seed=int(seed))


# --------------------------------------------------------------------------
# scalar tracking game: closed-form tables and thresholds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdTriple:
    """No-info/full-info crossover radii for PP, the true cost, and POP."""

    eps_minus: float
    eps_star: float
    eps_plus: float


def _check_regime(k: float) -> None:
    if k <= 0.5 or abs(k - 1.0) < 1e-12:
        raise OutOfRegime("closed forms require k > 1/2 and k != 1")


def _beta_bar_kappa_gaussian() -> float:
    ps = prior_stats(PriorSpec("gaussian", 1))
    return ps.beta_bar * ps.kappa  # = 2/(4+pi)


def thresholds_1d(k: float) -> ThresholdTriple:
    """Crossover radii of the scalar tracking game under a Gaussian prior.

    Each threshold equates the no-information and full-information values of
    its program: eps_minus for the pessimistic bound, eps_star for the true
    cost, eps_plus for the projective optimistic bound.
    """
    _check_regime(k)
    gap = abs(1.0 - k)
    num = 2.0 * k - 1.0
    eps_minus = num / (2.0 * gap)
    eps_star = num / (2.0 * math.sqrt(2.0 / math.pi) * gap)
    eps_plus = num / (2.0 * _beta_bar_kappa_gaussian() * gap)
    return ThresholdTriple(eps_minus=eps_minus, eps_star=eps_star, eps_plus=eps_plus)


def oned_table(k: float, eps: float) -> dict[str, float]:
    """No-info and full-info objective values of the scalar tracking game.

    Keys: {abp,pp,pop}_{ni,fi}. The true (abp) and pessimistic values share
    the no-information entry; the optimistic one discounts the quadratic
    part of the penalty by (1 - beta_bar^2).
    """
    _check_regime(k)
    ps = prior_stats(PriorSpec("gaussian", 1))
    gap = abs(1.0 - k)
    ni_base = k * k
    fi_base = (k - 1.0) ** 2
    bb2 = ps.beta_bar**2
    bk = ps.beta_bar * ps.kappa
    return {
        "abp_ni": ni_base + eps * eps,
        "abp_fi": fi_base + eps * eps + 2.0 * math.sqrt(2.0 / math.pi) * eps * gap,
        "pp_ni": ni_base + eps * eps,
        "pp_fi": fi_base + eps * eps + 2.0 * eps * gap,
        "pop_ni": ni_base + (1.0 - bb2) * eps * eps,
        "pop_fi": fi_base + (1.0 - bb2) * eps * eps + 2.0 * bk * eps * gap,
    }


# --------------------------------------------------------------------------
# n-dimensional tracking example (cost ||x_tilde - k x||^2, C = eps*I)
# --------------------------------------------------------------------------


def _e_norm_gaussian(n: int) -> float:
    return math.sqrt(2.0) * _gamma_ratio_half(n)


def opening_table(k: float, n: int, eps: float) -> dict[str, float]:
    """No-info/full-info values of the n-dimensional tracking example."""
    _check_regime(k)
    gap = abs(1.0 - k)
    ps = prior_stats(PriorSpec("gaussian", n))
    bb2 = ps.beta_bar**2
    bk = ps.beta_bar * ps.kappa
    ni_base = k * k * n
    fi_base = (k - 1.0) ** 2 * n
    return {
        "abp_ni": ni_base + eps * eps,
        "abp_fi": fi_base + eps * eps + 2.0 * eps * gap * _e_norm_gaussian(n),
        "pp_ni": ni_base + eps * eps,
        "pp_fi": fi_base + eps * eps + 2.0 * eps * gap * math.sqrt(n),
        "pop_ni": ni_base + (1.0 - bb2) * eps * eps,
        "pop_fi": fi_base + (1.0 - bb2) * eps * eps + 2.0 * bk * eps * gap * math.sqrt(n),
    }


def opening_thresholds(k: float, n: int) -> ThresholdTriple:
    """Crossover radii of the n-dimensional tracking example.

    eps_plus/eps_minus = 1/(beta_bar*kappa) ~ 3.57 for the Gaussian prior
    (dimension-independent, since E|x_1| is).
    """
    _check_regime(k)
    gap = abs(1.0 - k)
    num = (2.0 * k - 1.0)
    eps_minus = num * math.sqrt(n) / (2.0 * gap)
    eps_star = num * n / (2.0 * gap * _e_norm_gaussian(n))
    eps_plus = eps_minus / _beta_bar_kappa_gaussian()
    return ThresholdTriple(eps_minus=eps_minus, eps_star=eps_star, eps_plus=eps_plus)


def opening_linear_best(k: float, n: int, eps: float) -> float:
    """Best value over linear (no- or full-information) policies:
    k^2 n + eps^2 + min(0, (1-2k) n + 2 eps |1-k| E||x||)."""
    gap = abs(1.0 - k)
    bracket = (1.0 - 2.0 * k) * n + 2.0 * eps * gap * _e_norm_gaussian(n)
    return k * k * n + eps * eps + min(0.0, bracket)


def radius_threshold_cost(
    k: float, n: int, eps: float, R: float, quad_points: int = 200
) -> float:
    """Cost of the radius-threshold policy: reveal x fully iff ||x|| >= R.

    Value (1-2k) T2(R) + k^2 n + eps^2 + 2 eps |1-k| T1(R), with
    T_m(R) = E[||x||^m 1{||x|| >= R}] integrated against the chi(n) radial
    density by adaptive quadrature on [R, R + 40 sqrt(n)] (the truncated
    tail mass is below exp(-700) at that cutoff).
    """
    if R < 0.0:
        raise InvalidRadius("threshold radius must be nonnegative")
    gap = abs(1.0 - k)
    log_norm = (n / 2.0 - 1.0) * math.log(2.0) + math.lgamma(n / 2.0)

    def chi_pdf(r: float) -> float:
        if r <= 0.0:
            return 0.0
        return math.exp((n - 1) * math.log(r) - r * r / 2.0 - log_norm)

    hi = R + 40.0 * math.sqrt(n)
    moments = []
    for m in (1, 2):
        val, err = quad(
            lambda r, m=m: r**m * chi_pdf(r), R, hi,
            epsabs=1e-13, epsrel=1e-11, limit=quad_points,
        )
        if not math.isfinite(val) or err > 1e-8 * (1.0 + abs(val)):
            raise NumericalFailure(
                f"tail-moment quadrature did not converge (err={err:.2e})"
            )
        moments.append(val)
    t1, t2 = moments
    return (1.0 - 2.0 * k) * t2 + k * k * n + eps * eps + 2.0 * eps * gap * t1


def radius_scan(
    k: float, n: int, eps: float, r_lo: float, r_hi: float, steps: int
) -> list[tuple[float, float]]:
    """Cost of the radius-threshold policy on a radius grid."""
    rs = np.linspace(r_lo, r_hi, steps)
    return [(float(r), radius_threshold_cost(k, n, eps, float(r))) for r in rs]
