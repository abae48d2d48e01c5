"""Minimum segment-count searches: empirical, worst-case, and bound-derived.

All three searches answer the same question: the smallest r such that an
error criterion evaluated at (t, r) drops to the threshold eps.  Every
criterion used here is monotone decreasing in r (the empirical one up to
Monte Carlo noise, which common random numbers suppress), so exponential
doubling followed by bisection is valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, ensembles, rng as _rng
from .errors import ArgumentError, CapabilityError, SearchOverflowError
from .evolution import ExactEvolver, exact_unitary_dense
from .formulas import SegmentApplier, make_plan, pf_unitary_dense
from .models import HamiltonianInstance
from .pauli import DENSE_QUBIT_CAP

HARD_R_CAP = 10**9

EMPIRICAL_AVG = "empirical_avg"
EMPIRICAL_WORST = "empirical_worst"
BOUND_NAMES = ("triangle", "tp", "counting", "interference", "worst")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a minimum-r search.

    `criterion` is "empirical_avg", "empirical_worst", or the name of the
    analytic bound that was inverted.  `samples` is the state count for
    empirical criteria and 0 otherwise.  `error_at_r_min` is the criterion
    value actually achieved at r_min.
    """

    r_min: int
    criterion: str
    t: float
    eps: float
    p: int
    samples: int
    seed: int
    error_at_r_min: float


def _interp_mid(lo: int, err_lo: float, hi: int, err_hi: float,
                eps: float) -> int:
    """Midpoint guess from a local power-law fit, clipped inside (lo, hi).

    Criteria here decay like C / r^q for some positive q, so fitting the
    bracket endpoints on log-log axes predicts the crossing well.  Falls
    back to the plain midpoint whenever the fit is degenerate or the
    prediction barely shrinks the interval.
    """
    plain = (lo + hi) // 2
    if not (np.isfinite(err_lo) and err_hi > 0 and err_lo > err_hi):
        return plain
    q = math.log(err_lo / err_hi) / math.log(hi / lo)
    guess = hi * (err_hi / eps) ** (1.0 / q)
    mid = min(max(int(round(guess)), lo + 1), hi - 1)
    if max(hi - mid, mid - lo) > 0.8 * (hi - lo):
        return plain
    return mid


def _bracket_and_bisect(error_of: Callable[[int], float], eps: float,
                        cap: int = HARD_R_CAP,
                        r_start: int = 1) -> tuple[int, float]:
    """Smallest integer r with error_of(r) <= eps, assuming monotone decay.

    Brackets the crossing by doubling from r_start, then shrinks the
    interval keeping the invariant error_of(lo) > eps >= error_of(hi).
    r_start only changes which probes get evaluated, never the result.
    """
    if r_start < 1:
        raise ArgumentError(f"r_start must be at least 1, got {r_start}")
    err = error_of(r_start)
    if err <= eps:
        # walk the bracket down; probes get cheaper as r shrinks
        hi, hi_err = r_start, err
        probe = hi // 2
        while probe >= 1:
            err = error_of(probe)
            if err > eps:
                lo, lo_err = probe, err
                break
            hi, hi_err = probe, err
            probe //= 2
        else:
            return 1, hi_err
    else:
        lo, lo_err = r_start, err
        hi = 2 * r_start
        while True:
            if hi > cap:
                raise SearchOverflowError(
                    f"criterion still above eps={eps} at the r cap {cap}")
            err = error_of(hi)
            if err <= eps:
                hi_err = err
                break
            lo, lo_err = hi, err
            hi *= 2
    while hi - lo > 1:
        mid = _interp_mid(lo, lo_err, hi, hi_err, eps)
        err = error_of(mid)
        if err <= eps:
            hi, hi_err = mid, err
        else:
            lo, lo_err = mid, err
    return hi, hi_err


def search_r_empirical(inst: HamiltonianInstance, p: int, t: float, eps: float,
                       kind: str = ensembles.HAAR, samples: int = 20,
                       seed: int = 0, cap: int = HARD_R_CAP,
                       r_start: int = 1) -> SearchResult:
    """Smallest r with mean ||U_p^r psi - U0 psi|| <= eps over sampled inputs.

    The same batch of input states (and the exactly evolved references,
    computed once) is reused for every probed r, so the noisy criterion
    becomes effectively monotone and bisection applies.  Past the dense
    cap the reference evolution runs through the Krylov propagator with
    tolerance eps/100, keeping reference error well below the threshold.
    """
    if eps <= 0:
        raise ArgumentError(f"threshold eps must be positive, got {eps}")
    if samples < 1:
        raise ArgumentError(f"need a positive sample count, got {samples}")
    gen = _rng.generator(seed, "r-search", inst.model, inst.n, p, kind)
    states = ensembles.sample_states(inst.n, kind, gen, samples)
    evolver = ExactEvolver(inst, tolerance=eps / 100)
    reference = evolver.evolve(states, t)

    cache: dict[int, float] = {}

    def error_of(r: int) -> float:
        if r not in cache:
            out = SegmentApplier(make_plan(inst, t, r, p))(states)
            cache[r] = float(np.mean(np.linalg.norm(out - reference, axis=0)))
        return cache[r]

    r_min, err = _bracket_and_bisect(error_of, eps, cap, r_start=r_start)
    return SearchResult(r_min, EMPIRICAL_AVG, float(t), eps, p, samples, seed, err)


def search_r_worst(inst: HamiltonianInstance, p: int, t: float, eps: float,
                   cap: int = HARD_R_CAP, r_start: int = 1) -> SearchResult:
    """Smallest r with ||U_p^r - U0|| <= eps in spectral norm (dense route)."""
    if eps <= 0:
        raise ArgumentError(f"threshold eps must be positive, got {eps}")
    if inst.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"worst-case search builds dense unitaries; n={inst.n} exceeds "
            f"the cap of {DENSE_QUBIT_CAP}")
    u0 = exact_unitary_dense(inst, t)

    cache: dict[int, float] = {}

    def error_of(r: int) -> float:
        if r not in cache:
            u = pf_unitary_dense(make_plan(inst, t, r, p))
            cache[r] = float(np.linalg.norm(u - u0, 2))
        return cache[r]

    r_min, err = _bracket_and_bisect(error_of, eps, cap, r_start=r_start)
    return SearchResult(r_min, EMPIRICAL_WORST, float(t), eps, p, 0, 0, err)


def _power_law_in_r(value_at: Callable[[int], float], q: int) -> Callable[[int], float]:
    """Fix the curve c / r^q from one evaluation at r = 1.

    Every analytic bound except interference scales exactly like that,
    so the commutator prefactor (the expensive part) is computed once
    per search instead of once per probed r.
    """
    v1 = value_at(1)
    return lambda r: v1 / float(r) ** q


def _bound_evaluator(bound_name: str, inst: HamiltonianInstance, p: int,
                     t: float) -> Callable[[int], float]:
    if bound_name == "triangle":
        if p == 1:
            return _power_law_in_r(lambda r: bounds.triangle_bound_pf1(inst, t, r).value, 1)
        if p == 2:
            return _power_law_in_r(lambda r: bounds.triangle_bound_pf2(inst, t, r).value, 2)
        return _power_law_in_r(lambda r: bounds.tp_bound(inst, p, t, r).value, p)
    if bound_name == "tp":
        return _power_law_in_r(lambda r: bounds.tp_bound(inst, p, t, r).value, p)
    if bound_name == "counting":
        if inst.model == "heisenberg_1d":
            return _power_law_in_r(
                lambda r: bounds.counting_bound_nn(inst.n, t, r, p=p).value, p)
        if inst.model == "power_law":
            if p != 1:
                raise ArgumentError(
                    "power-law counting bound is first order only")
            alpha = inst.params["alpha"]
            return _power_law_in_r(
                lambda r: bounds.counting_bound_power_law(inst.n, alpha, t, r).value, 1)
        raise ArgumentError(
            f"no counting bound for model {inst.model!r}")
    if bound_name == "interference":
        if p != 1:
            raise ArgumentError("interference bound applies to the first-order formula")
        return lambda r: bounds.interference_bound(inst, t, r).value
    if bound_name == "worst":
        # Dense spectral norms cost a full SVD per commutator; past a few
        # hundred dimensions the matrix-free power iteration wins big.
        method = "dense" if inst.n <= 8 else "power"
        return _power_law_in_r(
            lambda r: bounds.worst_case_bound(inst, p, t, r, norm_method=method).value, p)
    raise ArgumentError(
        f"unknown bound {bound_name!r}; expected one of {BOUND_NAMES}")


def search_r_from_bound(bound_name: str, inst: HamiltonianInstance, p: int,
                        t: float, eps: float, cap: int = HARD_R_CAP,
                        r_start: int = 1) -> SearchResult:
    """Smallest r at which the named analytic bound drops below eps.

    All implemented bounds are monotone decreasing in r.  The interference
    bound reports inf while its validity conditions fail, so the search
    lands on an r where the conditions hold by construction.
    """
    if eps <= 0:
        raise ArgumentError(f"threshold eps must be positive, got {eps}")
    evaluate = _bound_evaluator(bound_name, inst, p, t)
    cache: dict[int, float] = {}

    def error_of(r: int) -> float:
        if r not in cache:
            cache[r] = evaluate(r)
        return cache[r]

    r_min, err = _bracket_and_bisect(error_of, eps, cap, r_start=r_start)
    return SearchResult(r_min, bound_name, float(t), eps, p, 0, 0, err)
