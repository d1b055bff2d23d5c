"""Capacity of one-way channels and search for a common capacity-achieving input.

:func:`ba_capacity` is the Blahut-Arimoto iteration with its usual upper and
lower capacity bounds. :func:`common_maximizer` decides whether one input pmf
achieves capacity for every state of a channel with state, falling back to
the concave maximin problem solved by :func:`maximin_input`.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .probcore import check_stochastic, mutual_information

BA_TOL = 1e-10
BA_MAX_ITER = 10000
TOL_MI = 1e-6
MAXIMIN_STEP = 0.1
MAXIMIN_MAX_ITER = 5000
_LOG2E = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class BaResult:
    capacity: float
    maximizer: np.ndarray
    gap: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class MaximizerVerdict:
    status: str  # "found", "not-found" or "inconclusive"
    pstar: Optional[np.ndarray]
    slack: float
    capacities: tuple = ()
    candidate: Optional[np.ndarray] = None
    # upper bound on max_p min_s [I(p, W_s) - C_s]; below -tol_mi proves no common maximizer
    bound: Optional[float] = None
    weights: Optional[np.ndarray] = None


def _negentropies(w):
    # sum_y w[x, y] log2 w[x, y] per row
    return np.sum(np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0), axis=1)


def _divergences(r, w, negent):
    # D(w[x] || r @ w) in bits
    return negent - w @ np.log2(np.maximum(r @ w, np.finfo(float).tiny))


def ba_capacity(chan, tol=BA_TOL, max_iter=BA_MAX_ITER):
    """Capacity of a discrete memoryless channel by Blahut-Arimoto.

    Starts from the uniform input. Each iteration yields a lower bound
    ``I(r)`` and an upper bound ``max_x D(W_x || rW)`` on the capacity; the
    loop stops once they are within ``tol``. On hitting ``max_iter`` the
    result is returned with ``converged=False``.
    """
    w = check_stochastic(chan)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = w.shape[0]
    r = np.full(n, 1.0 / n)
    negent = _negentropies(w)
    it = 0
    while True:
        d = _divergences(r, w, negent)
        lower = float(r @ d)
        upper = float(d.max())
        gap = max(upper - lower, 0.0)
        if gap <= tol or it >= max_iter:
            break
        r = r * np.exp2(d - upper)
        r /= r.sum()
        it += 1
    return BaResult(max(lower, 0.0), r, gap, it, gap <= tol)


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def maximin_ascent(objective, x0, step=MAXIMIN_STEP, max_iter=MAXIMIN_MAX_ITER, target=None):
    """Projected subgradient ascent on ``min_s f_s(x)`` over the simplex.

    ``objective(x)`` returns ``(values, grads)`` with shapes ``(S,)`` and
    ``(S, n)``; the minimum should be concave. The step at iteration ``t`` is
    ``step / sqrt(t)``. Stops early once the best value reaches ``target``.
    Returns ``(best_x, best_value)``.
    """
    x = np.asarray(x0, dtype=float)
    best_x, best_val = x, -np.inf
    for t in range(1, max_iter + 1):
        vals, grads = objective(x)
        s = int(np.argmin(vals))
        if vals[s] > best_val:
            best_x, best_val = x, float(vals[s])
            if target is not None and best_val >= target:
                break
        g = grads[s] - grads[s].mean()
        norm = np.linalg.norm(g)
        if norm == 0.0:
            break
        x = project_simplex(x + (step / np.sqrt(t)) * g / max(norm, 1.0))
    return best_x, best_val


def _mi_objective(chans, capacities):
    w = np.asarray(chans, dtype=float)  # [state, input, output]
    caps = np.asarray(capacities, dtype=float)
    with np.errstate(divide="ignore"):
        negent = np.sum(w * np.where(w > 0, np.log2(np.where(w > 0, w, 1.0)), 0.0), axis=2)
    wt = w.transpose(0, 2, 1)

    def objective(p):
        q = p @ w  # [state, output]
        logq = np.log2(np.maximum(q, 1e-300))
        d = negent - np.einsum("sy,syx->sx", logq, wt)  # D(w_s[x] || q_s)
        return d @ p - caps, d - _LOG2E

    return objective


def _slacks(p, chans, capacities):
    return np.array([mutual_information(p, w) for w in chans]) - np.asarray(capacities)


def maximin_input(chans, tol=TOL_MI, max_iter=MAXIMIN_MAX_ITER, capacities=None, step=MAXIMIN_STEP):
    """Input pmf maximising ``min_s [I(p, chans[s]) - C_s]`` over the simplex.

    Runs projected subgradient ascent from the uniform input, then restarts
    from the best point with smaller steps; the best iterate is returned, so
    the objective never decreases from one round to the next. Stops as soon
    as the objective is within ``tol`` of zero, its upper limit.
    """
    chans = [check_stochastic(w) for w in chans]
    if not chans:
        raise ValueError("need at least one channel")
    if capacities is None:
        capacities = [ba_capacity(w).capacity for w in chans]
    n = chans[0].shape[0]
    objective = _mi_objective(chans, capacities)
    best, best_val = np.full(n, 1.0 / n), -np.inf
    for scale in (1.0, 0.1, 0.01):
        x, val = maximin_ascent(objective, best, step * scale, max_iter, target=-tol)
        if val > best_val:
            best, best_val = x, val
        if best_val >= -tol:
            break
    return best


def dual_bound(chans, capacities, weights, tol=BA_TOL):
    """Upper bound on ``max_p min_s [I(p, chans[s]) - C_s]`` from state weights.

    For weights ``lam`` on the states, ``sum_s lam_s I(p, W_s)`` is the mutual
    information of the channel ``x -> (s, y)`` with ``S ~ lam`` drawn
    independently, so its Blahut-Arimoto upper bound minus ``lam @ C`` bounds
    the maximin value from above. Returns ``(bound, maximizer_of_mixture)``.
    """
    lam = np.asarray(weights, dtype=float)
    stacked = np.concatenate([l * np.asarray(w) for l, w in zip(lam, chans)], axis=1)
    res = ba_capacity(stacked, tol)
    return res.capacity + res.gap - float(lam @ np.asarray(capacities)), res.maximizer


def _certify(chans, caps, p, tol_mi, rounds=200):
    # the bound stays valid for any BA tolerance; a loose one only costs sharpness
    ba_tol = 0.01 * tol_mi
    if len(chans) == 2:
        # the dual is convex in the single free weight
        res = minimize_scalar(lambda a: dual_bound(chans, caps, [a, 1.0 - a], ba_tol)[0], bounds=(0.0, 1.0),
                              method="bounded", options={"xatol": 1e-9, "maxiter": rounds})
        lam = np.array([res.x, 1.0 - res.x])
        return dual_bound(chans, caps, lam, ba_tol)[0], lam
    # state weights from the active constraints at p, refined by subgradient steps on the dual
    slack = _slacks(p, chans, caps)
    lam = project_simplex(-slack / max(np.abs(slack).max(), 1e-300))
    best = (np.inf, lam)
    for t in range(1, rounds + 1):
        bound, p_lam = dual_bound(chans, caps, lam, ba_tol)
        if bound < best[0]:
            best = (bound, lam)
        if bound < -tol_mi:
            break
        lam = project_simplex(lam - (0.5 / np.sqrt(t)) * _slacks(p_lam, chans, caps))
    return best


def common_maximizer(chans, tol_mi=TOL_MI, ba_tol=BA_TOL, ba_max_iter=BA_MAX_ITER):
    """Look for one input pmf that is capacity-achieving for every channel.

    A candidate ``p`` passes when ``I(p, chans[s]) >= C_s - tol_mi`` for all
    states. Candidates are tried in order: each state's Blahut-Arimoto
    maximizer, then the maximin input. ``slack`` is the smallest per-state
    margin of the returned (or best) candidate.

    When every candidate fails, ``not-found`` is reported only if
    :func:`dual_bound` certifies that no input comes within ``tol_mi``;
    otherwise the verdict is ``inconclusive``. The certificate is tried once
    before the maximin search, which is skipped when it already succeeds.
    """
    chans = [check_stochastic(w) for w in chans]
    if not chans:
        raise ValueError("need at least one channel")
    n = chans[0].shape[0]
    if any(w.shape[0] != n for w in chans):
        raise ValueError("all channels must share the input alphabet")
    results = [ba_capacity(w, ba_tol, ba_max_iter) for w in chans]
    caps = tuple(r.capacity for r in results)
    # a stalled solve is still usable when its certified gap is far inside tol_mi
    if not all(r.converged or r.gap <= 0.1 * tol_mi for r in results):
        return MaximizerVerdict("inconclusive", None, float("nan"), caps)

    best, best_slack = None, -np.inf

    def consider(p):
        nonlocal best, best_slack
        slack = float(_slacks(p, chans, caps).min())
        if slack > best_slack:
            best, best_slack = p, slack
        return slack >= -tol_mi

    for r in results:
        if consider(r.maximizer):
            return MaximizerVerdict("found", r.maximizer, best_slack, caps, r.maximizer)
    # a quick dual certificate makes the maximin search pointless
    bound, lam = _certify(chans, caps, best, tol_mi, rounds=20)
    if bound < -tol_mi:
        return MaximizerVerdict("not-found", None, best_slack, caps, best, bound, lam)
    p = maximin_input(chans, tol=tol_mi, capacities=caps)
    if consider(p):
        return MaximizerVerdict("found", p, best_slack, caps, p)
    bound, lam = _certify(chans, caps, best, tol_mi)
    status = "not-found" if bound < -tol_mi else "inconclusive"
    return MaximizerVerdict(status, None, best_slack, caps, best, bound, lam)
