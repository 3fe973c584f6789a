"""Solvers for the five covariance-level programs (BP, PP, UOP, POP, SPOP).

Every program minimizes a trace-linear objective with an optional concave
penalty over the spectrahedron {0 <= Sigma <= I}:

    BP    Tr(D S) + c
    PP    Tr(D S) + c + lb + sqrt(f + Tr(E S))
    UOP   Tr(D S) + c + lb
    POP   Tr(D S) + c + (1-bb^2) lb + bb*k*sqrt(f + Tr(E S))
    SPOP  Tr(D S) + c + lb * max_b [(1-b^2) + b*zeta(S)]

with lb = lambda_bar, bb = beta_bar, k = kappa, and
zeta = k*sqrt(f + Tr(E S))/lb.

The workhorse is the trace-constrained spectral oracle ``h_eq``: the value
h(t) = min Tr(D X) over {0 <= X <= I, Tr(E X) = t} is obtained by
maximizing the one-dimensional concave dual over the multiplier lam, whose
supergradient interval is delimited by the traces of E against the
negative/non-positive eigenprojections of D + lam*E.  The primal optimum is
an interpolation of those two projections, which yields a duality-gap
certificate without any external SDP solver.

The penalized programs then minimize j(t) = h(t) + alpha*sqrt(f+t) over the
scalar t.  h is convex and nonincreasing on [0, t_bar], so on any interval
[a, b] the bound  min j >= h(b) + alpha*sqrt(f+a)  holds; a best-first
interval subdivision driven by that bound terminates with a certificate
that the returned value is within ``rho`` of the true minimum.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    InfeasibleTrace,
    InvalidParameter,
    InvalidTolerance,
    NumericalFailure,
    OracleDiverged,
)
from .instance import DerivedCoefficients, PriorStats
from .spectral import eig_sym, neg_projections, spectral_norm, sym


@dataclass
class HOracleResult:
    """One trace-constrained oracle call: primal X, dual multiplier, value."""

    t: float
    value: float
    X: np.ndarray
    lambda_dual: float
    interpolation_theta: float
    dual_value: float = 0.0


@dataclass
class ProgramSolution:
    """Solution record of one program.

    ``Sigma`` is the solver's covariance argument (possibly an interpolation
    of two projections), ``projection`` the best orthogonal-projection
    rounding of it, ``rank`` the rank of that projection, and ``rho`` the
    certified suboptimality of ``value`` (0 for exactly solved programs).
    """

    program: str
    Sigma: np.ndarray
    value: float
    rank: int
    rho: float
    projection: np.ndarray


def _rank_projection(p: np.ndarray) -> int:
    return int(np.sum(np.linalg.eigvalsh(sym(p)) > 0.5))


def rank_of(x: np.ndarray, projection: bool = False) -> int:
    """Numerical rank: eigenvalues > 0.5 for projections, > 1e-7 otherwise."""
    w = np.linalg.eigvalsh(sym(x))
    return int(np.sum(w > (0.5 if projection else 1e-7)))


# --------------------------------------------------------------------------
# trace-constrained spectral oracle
# --------------------------------------------------------------------------


def _classify(D, E, lam, ztol_extra=0.0):
    # the crossing band is machine-precision-relative: the dual bisection
    # localizes the multiplier to float resolution, so only the genuinely
    # crossing eigenvalue should be treated as zero (a wide band would leak
    # into the duality gap)
    # raw eigh (no sign fixing) is fine here: only spectral projections are
    # consumed, and those are sign-invariant
    w, v = np.linalg.eigh(D + lam * E)
    ztol = max(1e-13 * (1.0 + float(np.max(np.abs(w), initial=0.0))), ztol_extra)
    ev = np.einsum("ij,ij->j", v, E @ v)  # v_j^T E v_j, >= 0 up to rounding
    g_lo = float(np.sum(ev[w < -ztol]))
    g_hi = float(np.sum(ev[w <= ztol]))
    return w, v, ztol, g_lo, g_hi


def _build_primal(D, E, t, lam, w, v, ztol):
    lt = w < -ztol
    le = w <= ztol
    vlt = v[:, lt]
    vle = v[:, le]
    p_lt = vlt @ vlt.T
    p_le = vle @ vle.T
    g_lo = float(np.sum((E @ vlt) * vlt))
    g_hi = float(np.sum((E @ vle) * vle))
    if g_hi - g_lo > 1e-15 * (1.0 + abs(g_hi)):
        theta = min(max((t - g_lo) / (g_hi - g_lo), 0.0), 1.0)
    else:
        theta = 0.0
    x = sym(p_lt + theta * (p_le - p_lt))
    primal = float(np.sum(D * x))
    # exact dual value phi(lam) = sum_i min(mu_i, 0) - lam*t: a valid lower
    # bound at any multiplier, independent of the zero classification
    dual = float(np.sum(np.minimum(w, 0.0))) - lam * t
    return x, theta, primal, dual


def _h_eq_once(D, E, t, trE, normE, bracket, max_iter, gap_tol=0.0):
    """One dual root-finding pass; returns (lam, w, v, ztol) at the accepted
    multiplier.  Bracketed false position (Illinois) on the midpoint of the
    supergradient interval, falling back to plain bisection when the
    proposal degenerates."""
    lam_l = None  # g_lo(lam_l) > t   => optimal multiplier is above lam_l
    lam_u = None  # g_hi(lam_u) < t   => optimal multiplier is below lam_u
    err_l = err_u = None  # midpoint supergradient residuals at the endpoints

    def probe(lam):
        nonlocal lam_l, lam_u, err_l, err_u
        w, v, ztol, g_lo, g_hi = _classify(D, E, lam)
        if g_lo <= t <= g_hi:
            return (lam, w, v, ztol)
        # away from the jumps the supergradient is single-valued and the
        # duality gap is exactly |lam|*|g - t|, so a near-miss with a tiny
        # trace slip already certifies the required accuracy
        miss = max(g_lo - t, t - g_hi)
        if miss * abs(lam) <= gap_tol and miss <= 1e-9 * (1.0 + trE):
            return (lam, w, v, ztol)
        err = 0.5 * (g_lo + g_hi) - t
        if g_lo > t:
            if lam_l is None or lam > lam_l:
                lam_l, err_l = lam, err
        else:
            if lam_u is None or lam < lam_u:
                lam_u, err_u = lam, err
        return None

    seeds = [0.0] if bracket is None else [float(bracket[0]), float(bracket[1])]
    for lam in seeds:
        hit = probe(lam)
        if hit is not None:
            return hit

    # the supergradient is piecewise constant between the roots of
    # det(D + lam*E) = 0, so the optimal multiplier is one of those roots:
    # probe the real finite generalized eigenvalues of the pencil directly
    try:
        mu = scipy.linalg.eigvals(D, -E, check_finite=False)
    except scipy.linalg.LinAlgError:
        mu = np.empty(0)
    cands = sorted(
        {
            float(m.real)
            for m in np.atleast_1d(mu)
            if np.isfinite(m) and abs(m.imag) <= 1e-8 * (1.0 + abs(m.real))
        }
    )
    for lam in cands:
        hit = probe(lam)
        if hit is not None:
            return hit
    # rounding can push a crossing eigenvalue just outside the zero band:
    # retry the candidates with a wider band before resorting to bisection
    slack = 1e-9 * (1.0 + abs(t) + trE)
    normD = spectral_norm(D)
    for lam in cands:
        band = 1e-10 * (1.0 + normD + abs(lam) * normE)
        w, v, ztol, g_lo, g_hi = _classify(D, E, lam, ztol_extra=band)
        if g_lo - slack <= t <= g_hi + slack:
            return (lam, w, v, ztol)

    # expand to bracket the optimal multiplier
    if lam_u is None:
        base = lam_l if lam_l is not None else 0.0
        step = 1.0 + abs(base)
        for _ in range(80):
            hit = probe(base + step)
            if hit is not None:
                return hit
            if lam_u is not None:
                break
            step *= 2.0
    if lam_l is None:
        base = lam_u if lam_u is not None else 0.0
        step = 1.0 + abs(base)
        for _ in range(80):
            hit = probe(base - step)
            if hit is not None:
                return hit
            if lam_l is not None:
                break
            step *= 2.0

    if lam_u is None or lam_l is None:
        # one-sided: the multiplier runs away (e.g. t = 0 with a singular E
        # whose kernel still carries negative directions).  Accept the most
        # extreme probe; the duality-gap check below vets the result.
        lam = lam_l if lam_u is None else lam_u
        w, v, ztol, _, _ = _classify(D, E, lam)
        return (lam, w, v, ztol)

    last_side = 0
    stale_runs = 0
    for _ in range(max_iter):
        # narrow down to float resolution; the residual bracket width feeds
        # the crossing band below, so tighter is strictly better
        width = lam_u - lam_l
        if width <= 4e-16 * (1.0 + abs(lam_l) + abs(lam_u)):
            break
        lam = None
        if err_l > 0.0 > err_u and stale_runs < 3:
            lam = lam_u - err_u * width / (err_u - err_l)
            pad = 1e-3 * width
            if not (lam_l + pad <= lam <= lam_u - pad):
                lam = None
        if lam is None:
            lam = 0.5 * (lam_l + lam_u)
        prev_u = lam_u
        hit = probe(lam)
        if hit is not None:
            return hit
        side = +1 if lam_u == prev_u else -1
        if side == last_side:
            # Illinois damping: the retained endpoint is stale, so shrink its
            # residual; after a few repeats fall back to plain bisection
            stale_runs += 1
            if side == +1:
                err_u *= 0.5
            else:
                err_l *= 0.5
        else:
            stale_runs = 0
        last_side = side

    # the target trace sits at a jump of the supergradient: widen the zero
    # band so the crossing eigenvalues join the interpolation set
    lam = 0.5 * (lam_l + lam_u)
    slack = 1e-9 * (1.0 + abs(t) + trE)
    extra = max(4.0 * (lam_u - lam_l) * normE, 1e-15)
    for _ in range(10):
        w, v, ztol, g_lo, g_hi = _classify(D, E, lam, ztol_extra=extra)
        if g_lo - slack <= t <= g_hi + slack:
            return (lam, w, v, ztol)
        extra *= 10.0
    return (lam, w, v, ztol)


def h_eq(
    D: np.ndarray,
    E: np.ndarray,
    t: float,
    tol: float | None = None,
    bracket: tuple[float, float] | None = None,
    max_iter: int = 200,
) -> HOracleResult:
    """min Tr(D X) over {0 <= X <= I, Tr(E X) = t}, with a gap certificate."""
    D = sym(D)
    E = sym(E)
    normD = spectral_norm(D)
    normE = spectral_norm(E)
    trE = float(np.trace(E))
    feas_tol = 1e-9 * (1.0 + abs(trE))
    if t < -feas_tol or t > trE + feas_tol:
        raise InfeasibleTrace(f"trace target {t} outside [0, {trE}]")
    t = min(max(float(t), 0.0), trE)
    if tol is None:
        tol = 1e-9 * (1.0 + normD + normE)

    if trE <= 1e-13 * (1.0 + normE):
        # E vanishes: the constraint is vacuous at t ~ 0
        p_lt, _ = neg_projections(D)
        value = float(np.sum(D * p_lt))
        return HOracleResult(
            t=t, value=value, X=p_lt, lambda_dual=0.0,
            interpolation_theta=0.0, dual_value=value,
        )

    if t <= feas_tol or t >= trE - feas_tol:
        # at the trace endpoints the multiplier runs away, but the optimum is
        # closed-form: Tr(E X) = 0 forces X onto ker E, and Tr(E X) = Tr E
        # forces X = I on range E, leaving a free box minimization on ker E
        we, ve = np.linalg.eigh(E)
        kmask = we <= 1e-12 * (1.0 + normE)
        x = np.zeros_like(D)
        value = 0.0
        if t >= trE - feas_tol:
            vr = ve[:, ~kmask]
            pr = vr @ vr.T
            x += pr
            value += float(np.sum(D * pr))
        vk = ve[:, kmask]
        if vk.shape[1]:
            dk = sym(vk.T @ D @ vk)
            wk, uk = np.linalg.eigh(dk)
            neg = wk < -1e-13 * (1.0 + normD)
            un = vk @ uk[:, neg]
            x += un @ un.T
            value += float(np.sum(wk[neg]))
        return HOracleResult(
            t=t, value=value, X=sym(x), lambda_dual=0.0,
            interpolation_theta=0.0, dual_value=value,
        )

    for attempt, iters in enumerate((max_iter, 5 * max_iter)):
        lam, w, v, ztol = _h_eq_once(
            D, E, t, trE, normE, bracket, iters, gap_tol=0.25 * tol
        )
        x, theta, primal, dual = _build_primal(D, E, t, lam, w, v, ztol)
        if abs(primal - dual) <= tol:
            return HOracleResult(
                t=t, value=primal, X=x, lambda_dual=lam,
                interpolation_theta=theta, dual_value=dual,
            )
        bracket = None  # retry from scratch with more iterations
    raise OracleDiverged(
        f"duality gap {abs(primal - dual):.3e} exceeds tolerance {tol:.3e} "
        f"at t={t}"
    )


# --------------------------------------------------------------------------
# scalar penalized minimization with a suboptimality certificate
# --------------------------------------------------------------------------


def _minimize_penalized(D, E, f, alpha, t_lo, rho, max_evals=4000):
    """Certified minimization of h(t) + alpha*sqrt(f+t) over [t_lo, t_hi].

    Returns (t_best, oracle_result_at_t_best, value_best, certified_rho).
    Best-first interval subdivision: each interval [a, b] carries the lower
    bound h(b) + alpha*sqrt(f+a) (h nonincreasing, the penalty increasing),
    and subdivision stops once every remaining interval's bound is within
    ``rho`` of the incumbent.
    """
    if rho <= 0.0:
        raise InvalidTolerance("suboptimality budget rho must be positive")
    if alpha < 0.0:
        raise InvalidParameter("penalty weight alpha must be nonnegative")
    D = sym(D)
    E = sym(E)
    f = max(float(f), 0.0)
    trE = float(np.trace(E))
    p_lt, _ = neg_projections(D)
    t_bar = min(max(float(np.sum(E * p_lt)), 0.0), trE)
    t_lo = min(max(float(t_lo), 0.0), trE)
    t_hi = max(t_bar, t_lo)

    evals: dict[float, HOracleResult] = {}

    def h(tv: float) -> HOracleResult:
        tv = float(tv)
        if tv not in evals:
            # warm-start the dual bisection from the nearest evaluated
            # neighbors (the multiplier is nonincreasing in t)
            lower = [u for u in evals if u < tv]
            upper = [u for u in evals if u > tv]
            bracket = None
            if lower and upper:
                l_hi = evals[max(lower)].lambda_dual
                l_lo = evals[min(upper)].lambda_dual
                pad = 1e-9 * (1.0 + abs(l_lo) + abs(l_hi))
                bracket = (l_lo - pad, l_hi + pad)
            evals[tv] = h_eq(D, E, tv, bracket=bracket)
        return evals[tv]

    def j(tv: float) -> float:
        return h(tv).value + alpha * math.sqrt(max(f + tv, 0.0))

    def interval_lb(a: float, b: float) -> float:
        """Lower bound for j on [a, b] with both endpoints already evaluated.

        Combines the monotonicity bound h(b) + alpha*sqrt(f+a) with the
        convexity tangents h(t) >= h(t0) - lam_t0*(t - t0) at both endpoints
        (the dual multiplier is a subgradient slope of -h); the tangent bound
        is exact to second order near the penalized minimizer, which keeps
        the subdivision from stalling on flat stretches.
        """
        ra, rb = h(a), h(b)
        lb = rb.value + alpha * math.sqrt(f + a)
        slack = 1e-9 * (1.0 + abs(ra.value) + abs(rb.value))
        for t0, r in ((b, rb), (a, ra)):
            lam = max(float(r.lambda_dual), 0.0)
            if t0 == a and lam <= 0.0:
                continue  # a zero slope taken at the left endpoint is invalid

            def tangent(tv: float, t0=t0, val=r.value, lam=lam) -> float:
                return val - lam * (tv - t0) + alpha * math.sqrt(f + tv)

            cands = [tangent(a), tangent(b)]
            if lam > 0.0:
                ts = alpha * alpha / (4.0 * lam * lam) - f
                if a < ts < b:
                    cands.append(tangent(ts))
            lb = max(lb, min(cands) - slack)
        return lb

    if trE <= 1e-13 * (1.0 + spectral_norm(E)) or t_hi - t_lo <= 1e-14 * (1.0 + t_hi):
        val = j(t_lo)
        return t_lo, evals[t_lo], val, 0.0

    s_lo = math.sqrt(f + t_lo)
    s_hi = math.sqrt(f + t_hi)
    seeds_s = np.linspace(s_lo, s_hi, 9)
    ts = sorted({t_lo, t_hi, *(max(float(s * s - f), 0.0) for s in seeds_s)})
    ts = [min(max(tv, t_lo), t_hi) for tv in ts]
    vals = {tv: j(tv) for tv in ts}
    best_val = min(vals.values())

    heap: list[tuple[float, float, float]] = []
    for a, b in zip(ts[:-1], ts[1:]):
        if b - a > 0.0:
            heapq.heappush(heap, (interval_lb(a, b), a, b))

    margin = rho * (1.0 - 1e-9)
    while heap and heap[0][0] < best_val - margin:
        if len(evals) > max_evals:
            raise NumericalFailure(
                "penalized search exceeded its evaluation budget without "
                f"certifying rho={rho}"
            )
        _, a, b = heapq.heappop(heap)
        sa, sb = math.sqrt(f + a), math.sqrt(f + b)
        if sb - sa <= 1e-13 * (1.0 + sb):
            continue  # interval at floating-point resolution; its bound stands
        mid = max(float((0.5 * (sa + sb)) ** 2 - f), 0.0)
        mid = min(max(mid, a), b)
        if mid <= a or mid >= b:
            continue
        vm = j(mid)
        vals[mid] = vm
        best_val = min(best_val, vm)
        heapq.heappush(heap, (interval_lb(a, mid), a, mid))
        heapq.heappush(heap, (interval_lb(mid, b), mid, b))

    certified = best_val - heap[0][0] if heap else 0.0
    certified = max(0.0, min(certified, rho))
    # tie-break toward the smallest trace (prefers revealing less)
    tie = 1e-12 * (1.0 + abs(best_val))
    t_best = min(tv for tv, v in vals.items() if v <= best_val + tie)
    return t_best, evals[t_best], vals[t_best], certified


# --------------------------------------------------------------------------
# projection extraction
# --------------------------------------------------------------------------


def extract_projection(x: np.ndarray, objective: Callable[[np.ndarray], float]) -> np.ndarray:
    """Best projection among the thresholdings of X's eigenvalues.

    X (0 <= X <= I) is a convex combination of the nested projections
    obtained by thresholding its spectrum at each distinct level; since all
    program objectives are concave in Sigma, the best of those candidates
    scores no worse than X.  Ties (within a tiny relative band) go to the
    lower rank.
    """
    w, v = eig_sym(x)
    n = w.size
    ks = [0]
    for i in range(n):
        if w[i] <= 1e-8:
            break
        if i + 1 == n or w[i] - w[i + 1] > 1e-8 * (1.0 + abs(w[i])):
            ks.append(i + 1)
    candidates = []
    for k in ks:
        vk = v[:, :k]
        candidates.append(sym(vk @ vk.T))
    scores = [objective(p) for p in candidates]
    best = min(scores)
    tie = 1e-11 * (1.0 + abs(best))
    for p, s in zip(candidates, scores):  # ascending rank order
        if s <= best + tie:
            return p
    return candidates[int(np.argmin(scores))]


# --------------------------------------------------------------------------
# the five programs
# --------------------------------------------------------------------------


def solve_bp(dc: DerivedCoefficients) -> ProgramSolution:
    """Bayesian program: exact, Sigma = projection onto D's negative space."""
    p_lt, _ = neg_projections(dc.D)
    value = float(np.sum(dc.D * p_lt)) + dc.c
    return ProgramSolution(
        program="BP", Sigma=p_lt, value=value,
        rank=_rank_projection(p_lt), rho=0.0, projection=p_lt,
    )


def default_rho(dc: DerivedCoefficients) -> float:
    """Default suboptimality budget: 1e-6 * (1 + |BP value|)."""
    return 1e-6 * (1.0 + abs(solve_bp(dc).value))


def _penalized_objective(dc, alpha, offset):
    def obj(p):
        tp = float(np.sum(dc.E * p))
        return (
            float(np.sum(dc.D * p))
            + offset
            + alpha * math.sqrt(max(dc.f + tp, 0.0))
        )

    return obj


def solve_penalized(
    D: np.ndarray,
    E: np.ndarray,
    f: float,
    alpha: float,
    offset: float,
    t_lo: float,
    rho: float,
    program: str = "PEN",
    dc: DerivedCoefficients | None = None,
) -> ProgramSolution:
    """min Tr(D S) + offset + alpha*sqrt(f + Tr(E S)) s.t. Tr(E S) >= t_lo."""
    t_best, res, val, certified = _minimize_penalized(D, E, f, alpha, t_lo, rho)

    def obj(p):
        tp = float(np.sum(sym(E) * p))
        return float(np.sum(sym(D) * p)) + offset + alpha * math.sqrt(max(f + tp, 0.0))

    proj = extract_projection(res.X, obj)
    # the stationarity projection of the smooth objective is the canonical
    # minimal-rank solution; include it as a candidate when it is feasible
    if alpha > 0.0 and f + t_best > 1e-300:
        lam_star = alpha / (2.0 * math.sqrt(f + t_best))
        p_st, _ = neg_projections(sym(D) + lam_star * sym(E))
        if float(np.sum(sym(E) * p_st)) >= t_lo - 1e-9 * (1.0 + t_lo):
            tie = 1e-11 * (1.0 + abs(val))
            cur = obj(proj)
            alt = obj(p_st)
            if alt < cur - tie or (
                alt <= cur + tie and _rank_projection(p_st) < _rank_projection(proj)
            ):
                proj = p_st
    value = min(val + offset, obj(proj))
    return ProgramSolution(
        program=program, Sigma=res.X, value=value,
        rank=_rank_projection(proj), rho=max(certified, 0.0), projection=proj,
    )


def solve_pp(dc: DerivedCoefficients, rho: float | None = None) -> ProgramSolution:
    """Pessimistic program: alpha = 1, offset = c + lambda_bar."""
    if rho is None:
        rho = default_rho(dc)
    return solve_penalized(
        dc.D, dc.E, dc.f, alpha=1.0, offset=dc.c + dc.lambda_bar,
        t_lo=0.0, rho=rho, program="PP",
    )


def solve_uop(dc: DerivedCoefficients) -> ProgramSolution:
    """Universal optimistic program: the BP solution shifted by lambda_bar."""
    bp = solve_bp(dc)
    return replace(bp, program="UOP", value=bp.value + dc.lambda_bar)


def solve_pop(
    dc: DerivedCoefficients, ps: PriorStats, rho: float | None = None
) -> ProgramSolution:
    """Projective optimistic program at the optimal fixed mixing weight."""
    if rho is None:
        rho = default_rho(dc)
    beta = ps.beta_bar
    alpha = beta * ps.kappa
    offset = dc.c + (1.0 - beta * beta) * dc.lambda_bar
    return solve_penalized(
        dc.D, dc.E, dc.f, alpha=alpha, offset=offset,
        t_lo=0.0, rho=rho, program="POP",
    )


def beta_max_value(zeta: float) -> float:
    """max over b in [0,1] of (1-b^2) + b*zeta: zeta if >= 2, else 1+zeta^2/4."""
    if zeta >= 2.0:
        return zeta
    return 1.0 + zeta * zeta / 4.0


def spop_objective(dc: DerivedCoefficients, kappa: float, sigma: np.ndarray) -> float:
    """The SPOP objective (inner beta-maximization in closed form) at Sigma."""
    base = float(np.sum(dc.D * sym(sigma))) + dc.c
    s = math.sqrt(max(dc.f + float(np.sum(dc.E * sym(sigma))), 0.0))
    if dc.lambda_bar <= 1e-14 * (1.0 + abs(dc.lambda_bar)):
        return base + kappa * s
    zeta = kappa * s / dc.lambda_bar
    return base + dc.lambda_bar * beta_max_value(zeta)


def solve_spop(
    dc: DerivedCoefficients, ps: PriorStats, rho: float | None = None
) -> ProgramSolution:
    """Strong projective optimistic program via its two-regime split.

    With zeta = kappa*sqrt(f + Tr(E S))/lambda_bar, the inner maximum over
    beta is linear in zeta when zeta >= 2 and quadratic below; the split
    trace t_check = 4*lambda_bar^2/kappa^2 - f separates the regimes.  The
    linear regime is a penalized program with alpha = kappa restricted to
    Tr(E S) >= t_check; the quadratic regime is the pure trace program on
    D + kappa^2/(4*lambda_bar) E restricted to Tr(E S) <= t_check.
    """
    if rho is None:
        rho = default_rho(dc)
    kappa = ps.kappa
    lb = dc.lambda_bar
    if kappa <= 1e-14:
        return replace(solve_uop(dc), program="SPOP")
    if lb <= 1e-12 * (1.0 + spectral_norm(dc.D)):
        sol = solve_penalized(
            dc.D, dc.E, dc.f, alpha=kappa, offset=dc.c, t_lo=0.0,
            rho=rho, program="SPOP",
        )
        return sol

    trE = float(np.trace(dc.E))
    t_check = 4.0 * lb * lb / (kappa * kappa) - dc.f
    off_b = dc.c + lb + kappa * kappa * dc.f / (4.0 * lb)
    candidates: list[tuple[float, np.ndarray, float]] = []  # (value, X, cert)

    if t_check >= -1e-12 * (1.0 + trE):
        d_check = sym(dc.D + (kappa * kappa / (4.0 * lb)) * dc.E)
        p_lt, _ = neg_projections(d_check)
        t_p = float(np.sum(dc.E * p_lt))
        if t_p <= t_check + 1e-9 * (1.0 + abs(t_check)):
            candidates.append((float(np.sum(d_check * p_lt)) + off_b, p_lt, 0.0))
        else:
            res = h_eq(d_check, dc.E, min(t_check, trE))
            candidates.append((res.value + off_b, res.X, 0.0))

    if t_check <= trE + 1e-9 * (1.0 + trE):
        t_a, res_a, val_a, cert_a = _minimize_penalized(
            dc.D, dc.E, dc.f, alpha=kappa, t_lo=max(t_check, 0.0), rho=rho
        )
        candidates.append((val_a + dc.c, res_a.X, cert_a))

    if not candidates:
        raise NumericalFailure("SPOP split produced no feasible branch")
    value, x, cert = min(candidates, key=lambda it: it[0])

    proj = extract_projection(x, lambda p: spop_objective(dc, kappa, p))
    value = min(value, spop_objective(dc, kappa, proj))
    return ProgramSolution(
        program="SPOP", Sigma=x, value=value,
        rank=_rank_projection(proj), rho=cert, projection=proj,
    )


# --------------------------------------------------------------------------
# structural checks
# --------------------------------------------------------------------------


def no_info_optimal(D: np.ndarray, tol: float | None = None) -> bool:
    """True iff revealing nothing is optimal for the Bayesian program (D >= 0)."""
    D = sym(D)
    if tol is None:
        tol = 1e-9 * (1.0 + spectral_norm(D))
    return bool(np.min(np.linalg.eigvalsh(D)) >= -tol)


@dataclass(frozen=True)
class SignalingCheck:
    """Result of the strict-profitability test; falls back to False when the
    top eigenvalue of the penalty quadratic is not simple (test inapplicable)."""

    profitable: bool
    applicable: bool

    def __bool__(self) -> bool:
        return self.profitable


def signaling_profitable(dc: DerivedCoefficients, tol: float | None = None) -> SignalingCheck:
    """True iff no-information is provably strictly suboptimal for the true
    program: lambda_max(D) < -(f + Tr E) / (4 (lambda_bar - lambda_bar_2)).

    Invariant under homothetic scaling of the hypothesis (numerator and
    denominator both scale with the squared radius).
    """
    gap = dc.lambda_bar - dc.lambda_bar_2
    if tol is None:
        tol = 1e-9 * (1.0 + dc.lambda_bar)
    if gap <= tol:
        return SignalingCheck(profitable=False, applicable=False)
    threshold = -(dc.f + float(np.trace(dc.E))) / (4.0 * gap)
    lmax_d = float(np.max(np.linalg.eigvalsh(sym(dc.D))))
    strict_tol = 1e-9 * (1.0 + abs(threshold) + spectral_norm(dc.D))
    return SignalingCheck(profitable=lmax_d < threshold - strict_tol, applicable=True)


def pessimistic_noinfo_threshold(
    D: np.ndarray, E0: np.ndarray, f0: float, tol: float | None = None
) -> float:
    """Smallest scale s >= 0 at which no-information solves the pessimistic
    program for the hypothesis family (E, f) = (s*E0, s*f0).

    The sufficient matrix condition E >= ((sqrt(f) - Tr(D P))^2 - f) I with
    P the negative-eigenspace projection of D reduces, along the family, to
    a quadratic inequality in sqrt(s) solved in closed form.  Returns the
    raw scalar s; the caller owns the mapping to its own parameterization
    (for a hypothesis C = eps*C0, s plays eps^2).
    """
    D = sym(D)
    E0 = sym(E0)
    if tol is None:
        tol = 1e-9 * (1.0 + spectral_norm(D))
    p_lt, _ = neg_projections(D)
    tau = float(np.sum(D * p_lt))  # <= 0
    if tau >= -tol:
        return 0.0
    lmin = float(np.min(np.linalg.eigvalsh(E0)))
    if lmin <= 1e-12 * (1.0 + spectral_norm(E0)):
        return float("inf")
    f0 = max(float(f0), 0.0)
    u = (-tau) * (math.sqrt(f0) + math.sqrt(f0 + lmin)) / lmin
    return u * u


# --------------------------------------------------------------------------
# epsilon sweeps
# --------------------------------------------------------------------------


@dataclass
class SweepRow:
    epsilon: float
    val_uop: float
    val_pop: float
    val_spop: float
    val_pp: float
    val_2uop: float
    rank_pp: int
    mc_true_mean: float | None = None
    mc_true_stderr: float | None = None


def sweep(
    dc_base: DerivedCoefficients,
    ps: PriorStats,
    eps_grid: Sequence[float],
    rho: float,
    qf=None,
    C0: np.ndarray | None = None,
    prior=None,
    mc: dict | None = None,
) -> list[SweepRow]:
    """Solve UOP/POP/SPOP/PP along a homothetic hypothesis sweep C = eps*C0.

    ``dc_base`` must be derived at the base hypothesis C0.  When ``mc`` is
    given ({"samples": int, "seed": int}), the true cost of the pessimistic
    solution's projection is estimated by Monte Carlo, which additionally
    requires ``qf``, ``C0`` and ``prior``.

    Reported values are achieved objective values, so they certify the
    pointwise ordering POP <= SPOP <= PP up to exact arithmetic: each
    program's incumbent set includes the argmins found by the stronger
    neighbors in the chain.
    """
    rows: list[SweepRow] = []
    for eps in eps_grid:
        dc = dc_base.scaled(float(eps))
        uop = solve_uop(dc)
        pp = solve_pp(dc, rho)
        spop = solve_spop(dc, ps, rho)
        pop = solve_pop(dc, ps, rho)

        # cross-seeding: evaluating each objective at the neighbors' argmins
        # can only lower the reported (achieved) values, and enforces the
        # theoretical chain pointwise
        val_pp = pp.value
        spop_cands = [spop.value, spop_objective(dc, ps.kappa, pp.projection),
                      spop_objective(dc, ps.kappa, pp.Sigma)]
        val_spop = min(spop_cands)
        spop_arg = [spop.projection, pp.projection, pp.Sigma][
            int(np.argmin(spop_cands))
        ]
        pop_obj = _penalized_objective(
            dc, ps.beta_bar * ps.kappa, dc.c + (1.0 - ps.beta_bar**2) * dc.lambda_bar
        )
        val_pop = min(pop.value, pop_obj(spop_arg), pop_obj(pp.projection))

        row = SweepRow(
            epsilon=float(eps),
            val_uop=uop.value,
            val_pop=val_pop,
            val_spop=val_spop,
            val_pp=val_pp,
            val_2uop=2.0 * uop.value,
            rank_pp=pp.rank,
        )
        if mc is not None:
            if qf is None or C0 is None or prior is None:
                raise InvalidParameter("Monte-Carlo sweep needs qf, C0 and prior")
            from .evaluator import mc_true_cost  # local import avoids a cycle

            est = mc_true_cost(
                qf, float(eps) * C0, prior, pp.projection,
                n_samples=int(mc["samples"]), seed=int(mc["seed"]),
            )
            row.mc_true_mean = est.mean
            row.mc_true_stderr = est.stderr
        rows.append(row)
    return rows
