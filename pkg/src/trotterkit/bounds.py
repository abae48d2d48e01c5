"""Analytic error bounds for product-formula and Taylor-series simulation.

Two families live here.  The commutator bounds (triangle, nested-tuple,
counting, interference) control the root-mean-square error
sqrt(E||U psi - U0 psi||^2) over random inputs, or its worst-case
companion, directly from the Hamiltonian grouping.  The closed forms
(fidelity, trace norm, measurement, subsystem) convert a concrete
multiplicative error matrix M = U0^dag U - I into average-case figures
of merit.

Frobenius norms are dimension-normalized throughout: fn(X) = ||X||_F /
sqrt(d), which for a Pauli sum is the root sum of squared coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, CapabilityError, ValidationError
from .formulas import stages_for_order
from .models import HamiltonianInstance
from .pauli import PauliSum, commutator, nested_commutator, spectral_norm

UNITARITY_TOL = 1e-8
DEFAULT_TUPLE_CAP = 10_000_000

# Constant from the interference analysis of the first-order formula; it
# absorbs the tail resummation of repeated error insertions.
INTERFERENCE_C = 2048.0 / (math.e**2 * (math.e - 1.0))


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: its value plus enough context to audit it.

    `assumptions_ok` is False when a validity condition of the derivation
    fails (the value is still reported, usually as inf).  `intermediates`
    holds named sub-quantities so tests and tables can check more than
    the final number.
    """

    name: str
    value: float
    inputs: dict
    intermediates: dict = field(default_factory=dict)
    assumptions_ok: bool = True


def _require_time_steps(t: float, r: int) -> None:
    if not (isinstance(r, (int, np.integer)) and r >= 1):
        raise ArgumentError(f"segment count r must be a positive integer, got {r!r}")
    if not math.isfinite(t):
        raise ArgumentError(f"time t must be finite, got {t!r}")


def _group_sums(inst: HamiltonianInstance) -> list[PauliSum]:
    return [g for _, g in inst.groups]


def _suffix_sums(groups: Sequence[PauliSum]) -> list[PauliSum]:
    """suffix[l] = sum of groups after position l (empty sum for the last)."""
    n = groups[0].n
    acc = PauliSum(n, {})
    out = [acc] * len(groups)
    for l in range(len(groups) - 2, -1, -1):
        acc = acc + groups[l + 1]
        out[l] = acc
    return out


def _base_inputs(inst: HamiltonianInstance, t: float, r: int, p: int) -> dict:
    return {"model": inst.model, "n": inst.n, "t": float(t), "r": int(r), "p": p}


# ---------------------------------------------------------------------------
# Mean and variance of the squared error over 1-design inputs
# ---------------------------------------------------------------------------

def multiplicative_error(u: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """M = U0^dag U - I, validating that both factors are unitary."""
    u = np.asarray(u)
    u0 = np.asarray(u0)
    if u.shape != u0.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ArgumentError(f"expected matching square matrices, got {u.shape} and {u0.shape}")
    d = u.shape[0]
    eye = np.eye(d)
    for label, mat in (("U", u), ("U0", u0)):
        resid = np.linalg.norm(mat.conj().T @ mat - eye) / math.sqrt(d)
        if resid > UNITARITY_TOL:
            raise ValidationError(f"{label} is not unitary (residual {resid:.3e})")
    return u0.conj().T @ u - eye


def _check_multiplicative(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    a = m + np.eye(d)
    resid = np.linalg.norm(a.conj().T @ a - np.eye(d)) / math.sqrt(d)
    if resid > UNITARITY_TOL:
        raise ValidationError(
            f"I + M is not unitary (residual {resid:.3e}); "
            "M must come from two unitary evolutions")
    return m


def multiplicative_error_stats(m: np.ndarray) -> tuple[float, float]:
    """Exact mean and a variance upper bound for S = ||M psi||^2.

    Over any input ensemble with first moment I/d, E[S] = Tr(M M^dag)/d.
    For Haar inputs Var[S] <= 4 Tr(M M^dag)/(d(d+1)).  Unitarity of
    I + M forces Tr(M + M^dag) = -Tr(M M^dag); both that identity and
    unitarity itself are checked to 1e-8.
    """
    m = _check_multiplicative(m)
    d = m.shape[0]
    frob_sq = float(np.einsum("ij,ij->", m.conj(), m).real)
    identity_resid = abs(2.0 * float(np.trace(m).real) + frob_sq) / d
    if identity_resid > UNITARITY_TOL:
        raise ValidationError(
            f"unitarity trace identity violated (residual {identity_resid:.3e})")
    return frob_sq / d, 4.0 * frob_sq / (d * (d + 1))


# ---------------------------------------------------------------------------
# Triangle-inequality commutator bounds (first and second order)
# ---------------------------------------------------------------------------

def triangle_bound_pf1(inst: HamiltonianInstance, t: float, r: int) -> BoundReport:
    """Average-case bound (t^2/r) * T1' for the first-order formula.

    T1' = (1/2) sum_l fn([H_l, sum_{l'>l} H_l']).
    """
    _require_time_steps(t, r)
    groups = _group_sums(inst)
    suffix = _suffix_sums(groups)
    per_group = tuple(
        0.5 * commutator(g, s).frobenius_normalized()
        for g, s in zip(groups, suffix))
    t1 = float(sum(per_group))
    return BoundReport(
        name="triangle_pf1",
        value=(t * t / r) * t1,
        inputs=_base_inputs(inst, t, r, 1),
        intermediates={"T1_prime": t1, "per_group": per_group},
    )


def triangle_bound_pf2(inst: HamiltonianInstance, t: float, r: int) -> BoundReport:
    """Average-case bound (t^3/r^2) * T2' for the second-order formula.

    T2' = (1/12) sum_l fn([S_l, [S_l, H_l]]) + (1/24) sum_l fn([H_l, [H_l, S_l]])
    with S_l the suffix sum over later groups.
    """
    _require_time_steps(t, r)
    groups = _group_sums(inst)
    suffix = _suffix_sums(groups)
    sum_ssh = 0.0
    sum_hhs = 0.0
    for g, s in zip(groups, suffix):
        if not s.terms:
            continue
        sum_ssh += commutator(s, commutator(s, g)).frobenius_normalized()
        sum_hhs += commutator(g, commutator(g, s)).frobenius_normalized()
    t2 = sum_ssh / 12.0 + sum_hhs / 24.0
    return BoundReport(
        name="triangle_pf2",
        value=(abs(t) ** 3 / r**2) * t2,
        inputs=_base_inputs(inst, t, r, 2),
        intermediates={"T2_prime": t2, "sum_ssh": sum_ssh, "sum_hhs": sum_hhs},
    )


# ---------------------------------------------------------------------------
# Nested-commutator tuple sums (arbitrary order)
# ---------------------------------------------------------------------------

def _tuple_commutator_sum(groups: Sequence[PauliSum], p: int,
                          weight: Callable[[PauliSum], float],
                          tuple_cap: int) -> float:
    """sum over all (p+1)-tuples of groups of weight(nested commutator).

    The nesting is [H_{l1}, [H_{l2}, [... [H_{lp}, H_{l_{p+1}}]]]].  Tuples
    are enumerated depth-first from the innermost factor outward, pruning
    whole subtrees as soon as a partial commutator vanishes.
    """
    count = len(groups) ** (p + 1)
    if count > tuple_cap:
        raise CapabilityError(
            f"{count} commutator tuples exceed the cap of {tuple_cap}; "
            "raise tuple_cap explicitly to proceed")

    def descend(acc: PauliSum, depth: int) -> float:
        if depth == p + 1:
            return weight(acc)
        total = 0.0
        for g in groups:
            c = commutator(g, acc)
            if c.terms:
                total += descend(c, depth + 1)
        return total

    return sum(descend(g, 1) for g in groups)


def tp_bound(inst: HamiltonianInstance, p: int, t: float, r: int,
             tuple_cap: int = DEFAULT_TUPLE_CAP,
             proof_constant: bool = False) -> BoundReport:
    """Average-case nested-commutator bound at order p.

    T_p = (1/sqrt(d)) * sum over all (p+1)-tuples of ||nested commutator||_F,
    and the reported value is T_p * t^(p+1) / r^p.  By default this is an
    asymptotic expression: the O(1) prefactor of the underlying estimate is
    not tracked, which the report notes.  With proof_constant=True the
    explicit constant 2 * S^(p+1) from the derivation is attached, where S
    is the stage count of the order-p formula.
    """
    _require_time_steps(t, r)
    if p < 1:
        raise ArgumentError(f"order p must be >= 1, got {p}")
    groups = _group_sums(inst)
    t_p = _tuple_commutator_sum(
        groups, p, lambda s: s.frobenius_normalized(), tuple_cap)
    value = t_p * abs(t) ** (p + 1) / r**p
    intermediates = {
        "T_p": t_p,
        "tuples": len(groups) ** (p + 1),
        "note": "asymptotic, constant unknown",
    }
    if proof_constant:
        stages = stages_for_order(p).stage_count
        constant = 2.0 * stages ** (p + 1)
        value *= constant
        intermediates["stage_count"] = stages
        intermediates["constant"] = constant
        intermediates["note"] = "proof constant attached"
    return BoundReport(
        name="tp",
        value=value,
        inputs=_base_inputs(inst, t, r, p),
        intermediates=intermediates,
    )


def worst_case_bound(inst: HamiltonianInstance, p: int, t: float, r: int,
                     norm_method: str = "dense",
                     tuple_cap: int = DEFAULT_TUPLE_CAP) -> BoundReport:
    """Worst-case companion of `tp_bound`: spectral norms instead of fn.

    alpha_comm = sum over tuples of ||nested commutator||, value
    alpha_comm * t^(p+1)/r^p.  Spectral norms use `spectral_norm` with the
    given method; "dense" is exact but limited to small registers.
    """
    _require_time_steps(t, r)
    if p < 1:
        raise ArgumentError(f"order p must be >= 1, got {p}")
    groups = _group_sums(inst)
    alpha = _tuple_commutator_sum(
        groups, p, lambda s: spectral_norm(s, method=norm_method), tuple_cap)
    return BoundReport(
        name="worst_case",
        value=alpha * abs(t) ** (p + 1) / r**p,
        inputs=_base_inputs(inst, t, r, p),
        intermediates={"alpha_comm": alpha, "tuples": len(groups) ** (p + 1),
                       "norm_method": norm_method},
    )


# ---------------------------------------------------------------------------
# Closed-form counting bounds for structured models
# ---------------------------------------------------------------------------

def counting_bound_nn(n: int, t: float, r: int, p: int = 1) -> BoundReport:
    """Commutator-counting bound for the nearest-neighbour chain's A/B split.

    Counts Pauli strings instead of evaluating commutators, so it needs
    only (n, t, r).  First order: [A, B] contains at most 8n strings of
    coefficient magnitude 2, giving Tr|[A,B]|^2 <= 32 d n and the linear
    working form value = 2*sqrt(2) * n * t^2 / r (the root form
    2*sqrt(2n) * t^2 / r is recorded among the intermediates).

    Second order: every string of [B, A] has support in a 3-site window,
    so it anticommutes with at most 8 strings of a unit-strength group
    (2 bonds x 3 strings + 2 fields), and each collision contributes a
    coefficient of magnitude 2.  With W1 = ||[B,A]||_1 <= 12(n-2) + 4(n-1)
    that caps the nested one-norms as 16 W1, and the two nested sums with
    weights 1/12 + 1/24 give T2count = 2 W1 and value = T2count * t^3/r^2.
    """
    _require_time_steps(t, r)
    if n < 2:
        raise ArgumentError(f"the chain needs n >= 2 sites, got {n}")
    if p == 1:
        value = 2.0 * math.sqrt(2.0) * n * t * t / r
        return BoundReport(
            name="counting_nn",
            value=value,
            inputs={"model": "heisenberg_1d", "n": n, "t": float(t), "r": int(r), "p": 1},
            intermediates={
                "trace_square_count": 32.0 * n,
                "T1_count": 4.0 * math.sqrt(2.0) * n,
                "root_form_value": 2.0 * math.sqrt(2.0 * n) * t * t / r,
            },
        )
    if p == 2:
        w1 = 12.0 * max(n - 2, 0) + 4.0 * (n - 1)
        t2count = 2.0 * w1
        return BoundReport(
            name="counting_nn",
            value=t2count * abs(t) ** 3 / r**2,
            inputs={"model": "heisenberg_1d", "n": n, "t": float(t), "r": int(r), "p": 2},
            intermediates={
                "inner_one_norm": w1,
                "collision_budget": 8,
                "T2_count": t2count,
            },
        )
    raise ArgumentError(f"counting bound is available for p in (1, 2), got p={p}")


def counting_bound_power_law(n: int, alpha: float, t: float, r: int) -> BoundReport:
    """First-order counting bound for power-law couplings |j - k|^(-alpha).

    T1count = 2(sqrt(2)+1) * [ sum_{j,j',k} |j-k|^(-2a) |j'-k|^(-2a)
                               + 2 sum_{j<k} |j-k|^(-2a) ]^(1/2)
    over sites 1..n with j != k and j' != k (j = j' included), and the
    value is (t^2 / 2r) * T1count.
    """
    _require_time_steps(t, r)
    if n < 2:
        raise ArgumentError(f"need n >= 2 sites, got {n}")
    if alpha < 0:
        raise ArgumentError(f"decay exponent must be >= 0, got {alpha}")
    sites = np.arange(1, n + 1, dtype=float)
    dist = np.abs(sites[:, None] - sites[None, :])
    with np.errstate(divide="ignore"):
        w = np.where(dist > 0, dist, 1.0) ** (-2.0 * alpha)
    np.fill_diagonal(w, 0.0)
    row = w.sum(axis=0)           # for fixed k: sum over j != k
    triple = float(np.sum(row * row))
    pair = float(np.sum(np.triu(w, 1)))
    bracket = triple + 2.0 * pair
    t1count = 2.0 * (math.sqrt(2.0) + 1.0) * math.sqrt(bracket)
    return BoundReport(
        name="counting_power_law",
        value=(t * t / (2.0 * r)) * t1count,
        inputs={"model": "power_law", "n": n, "alpha": float(alpha),
                "t": float(t), "r": int(r), "p": 1},
        intermediates={"triple_sum": triple, "pair_sum": pair,
                       "T1_count": t1count},
    )


# ---------------------------------------------------------------------------
# Interference bound (first-order formula, two groups)
# ---------------------------------------------------------------------------

def interference_r_rule(n: int, t: float, eps: float,
                        comm_norm: float) -> int:
    """Segment count suggested by the interference analysis (unit constants).

    r = max( comm_norm * t^2 / 2,  sqrt(n) * t / eps,
             n^(1/4) * t^(3/2) / sqrt(eps) ), rounded up, at least 1.
    """
    if t <= 0 or eps <= 0:
        raise ArgumentError("need t > 0 and eps > 0")
    candidates = (
        comm_norm * t * t / 2.0,
        math.sqrt(n) * t / eps,
        n**0.25 * t**1.5 / math.sqrt(eps),
    )
    return max(1, math.ceil(max(candidates)))


def interference_bound(inst: HamiltonianInstance, t: float, r: int,
                       h_norm: str = "stated") -> BoundReport:
    """First-order average-case bound that credits cross-segment cancellation.

    Applies to a two-group split (A, B) of a nearest-neighbour chain.  The
    estimate chains three steps: a geometric resummation of repeated
    single-segment errors (valid while r||M1|| < 1), a per-segment leading
    term controlled by t||H||/r < 1, and a remainder V controlled by
    e||H||t/r < 1.  When any of those conditions fails the report carries
    assumptions_ok=False and the value degrades to inf.

    h_norm selects the spectral-norm estimate of the full Hamiltonian:
    "stated" uses the chain budget 4n, "computed" evaluates it.
    """
    _require_time_steps(t, r)
    if t <= 0:
        raise ArgumentError(f"interference bound needs t > 0, got {t}")
    groups = _group_sums(inst)
    if len(groups) != 2:
        raise ArgumentError(
            f"interference bound needs exactly two groups, got {len(groups)}")
    a, b = groups
    n = inst.n
    total = inst.total()

    if h_norm == "stated":
        h_norm_value = 4.0 * n
    elif h_norm == "computed":
        method = "dense" if n <= 12 else "power"
        h_norm_value = spectral_norm(total, method=method)
    else:
        raise ArgumentError(f"h_norm must be 'stated' or 'computed', got {h_norm!r}")

    comm_norm = commutator(a, b).one_norm()
    r_m1 = t * t * comm_norm / (2.0 * r)
    x = t * h_norm_value / r
    y = math.e * h_norm_value * t / r
    flags = {"x_lt_1": x < 1.0, "y_lt_1": y < 1.0, "rM1_lt_1": r_m1 < 1.0}

    # Leading single-segment term after summing the error-insertion series.
    if x < 1.0:
        geometric = 2.0 * math.sqrt(n) * (t / r) / (1.0 - x) ** 2
    else:
        geometric = math.inf

    # Remainder V: a resummed tail plus one explicitly evaluated commutator.
    tr_ahb = commutator(a, commutator(total, b)).frobenius_normalized() ** 2
    t6r6 = t**6 / r**6
    if y < 1.0:
        tail = ((INTERFERENCE_C**2 * math.e**2 * h_norm_value**2 / (36.0 * n))
                * t6r6 * (1.0 / (1.0 - y) ** 2 - 1.0))
    else:
        tail = math.inf
    vv = tail + tr_ahb * t6r6 / 36.0
    delta1 = geometric + r * math.sqrt(vv)

    if r_m1 < 1.0:
        value = delta1 / (1.0 - r_m1)
    else:
        value = math.inf

    return BoundReport(
        name="interference",
        value=value,
        inputs=_base_inputs(inst, t, r, 1),
        intermediates={
            "h_norm": h_norm_value,
            "h_norm_mode": h_norm,
            "comm_one_norm": comm_norm,
            "x": x,
            "y": y,
            "r_M1": r_m1,
            "geometric_term": geometric,
            "remainder_term": r * math.sqrt(vv) if math.isfinite(vv) else math.inf,
            "tr_AHB_normalized": tr_ahb,
            "C": INTERFERENCE_C,
            "flags": flags,
        },
        assumptions_ok=all(flags.values()),
    )


# ---------------------------------------------------------------------------
# Truncated-Taylor-series (LCU) bounds
# ---------------------------------------------------------------------------

def taylor_average_bound(alphas: Sequence[float], t: float,
                         truncation: int) -> tuple[float, float]:
    """Average and worst-case error of truncated-Taylor simulation.

    For H = sum_i alpha_i P_i with positive weights and segment length
    chosen so each segment's Taylor series runs to order `truncation`:
        average = max_i sqrt(alpha_i * alpha) * t * ln(2)^(K+1) / (K+1)!
        worst   = alpha * t * ln(2)^(K+1) / (K+1)!
    with alpha = sum_i alpha_i.  Equal weights make the ratio 1/sqrt(L).
    """
    arr = np.asarray(alphas, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ArgumentError("need a non-empty 1-D sequence of weights")
    if np.any(arr <= 0):
        raise ArgumentError("all Taylor weights must be positive")
    if truncation < 0:
        raise ArgumentError(f"truncation order must be >= 0, got {truncation}")
    if t < 0:
        raise ArgumentError(f"need t >= 0, got {t}")
    alpha = float(arr.sum())
    factor = math.log(2.0) ** (truncation + 1) / math.factorial(truncation + 1)
    worst = alpha * t * factor
    avg = math.sqrt(float(arr.max()) * alpha) * t * factor
    return avg, worst


def trace_power_check(h: PauliSum, power: int) -> tuple[float, float]:
    """Evaluate both sides of Tr(H^j)/d <= alpha^(j-1) * max_i alpha_i.

    H must be a positive-weight Pauli sum on at most 4 qubits with j <= 6
    (the left side is evaluated densely).  Returns (lhs, rhs).
    """
    if h.n > 4:
        raise ArgumentError(f"dense trace check is limited to n <= 4, got n={h.n}")
    if not 1 <= power <= 6:
        raise ArgumentError(f"power must be in 1..6, got {power}")
    if not h.terms:
        raise ArgumentError("need a non-empty Pauli sum")
    coeffs = np.array(list(h.terms.values()))
    if np.any(np.abs(coeffs.imag) > 1e-12) or np.any(coeffs.real <= 0):
        raise ArgumentError("all coefficients must be positive reals")
    alphas = coeffs.real
    eigs = np.linalg.eigvalsh(h.dense())
    lhs = float(np.mean(eigs**power))
    rhs = float(alphas.sum() ** (power - 1) * alphas.max())
    if lhs > rhs + 1e-9:
        raise ValidationError(
            f"trace-power inequality violated: {lhs} > {rhs}")
    return lhs, rhs


# ---------------------------------------------------------------------------
# Closed forms in the multiplicative error matrix
# ---------------------------------------------------------------------------

def fidelity_exact(m: np.ndarray) -> float:
    """Exact average fidelity F = E |<psi| U0^dag U |psi>|^2 over Haar inputs.

    F = 1 - ||M||_F^2/(d+1) + |Tr M|^2 / (d(d+1)).
    """
    m = _check_multiplicative(m)
    d = m.shape[0]
    frob_sq = float(np.einsum("ij,ij->", m.conj(), m).real)
    tr_sq = abs(np.trace(m)) ** 2
    return 1.0 - frob_sq / (d + 1) + tr_sq / (d * (d + 1))


def fidelity_second_moment(m: np.ndarray) -> float:
    """E[F^2] over Haar inputs, in closed form via A = I + M (unitary).

    Subtracting fidelity_exact(m)^2 gives the exact fidelity variance,
    which Monte Carlo sampling can verify directly.
    """
    m = _check_multiplicative(m)
    d = m.shape[0]
    a = m + np.eye(d)
    tr_a = complex(np.trace(a))
    tr_a2 = complex(np.einsum("ij,ji->", a, a))
    num = (abs(tr_a) ** 4
           + abs(tr_a) ** 2 * (4.0 * d + 8.0)
           + tr_a2 * np.conj(tr_a) ** 2
           + tr_a**2 * np.conj(tr_a2)
           + abs(tr_a2) ** 2
           + 2.0 * d * d + 6.0 * d)
    if abs(num.imag) > 1e-6 * max(1.0, abs(num.real)):
        raise ValidationError(f"second-moment numerator is not real: {num!r}")
    return float(num.real / ((d + 3) * (d + 2) * (d + 1) * d))


def trace_norm_bounds(m: np.ndarray) -> tuple[float, float]:
    """Two-sided bracket on the average trace-norm error.

    2(1 - sqrt(F)) <= R_t <= 2 sqrt(1 - F) with F the exact average
    fidelity; the upper limit never exceeds 2 ||M||_F / sqrt(d+1).
    """
    f = min(1.0, max(0.0, fidelity_exact(m)))
    return 2.0 * (1.0 - math.sqrt(f)), 2.0 * math.sqrt(1.0 - f)


def measurement_error_bound(m: np.ndarray) -> float:
    """Bound on the average measurement-probability error.

    R_m <= sqrt( 2||M||_F^2 / (d(d+1)^2) - 2|Tr M|^2 / (d^2 (d+1)^2) ),
    which is never above the trace-norm upper bound.
    """
    m = _check_multiplicative(m)
    d = m.shape[0]
    frob_sq = float(np.einsum("ij,ij->", m.conj(), m).real)
    tr_sq = abs(np.trace(m)) ** 2
    inner = 2.0 * frob_sq / (d * (d + 1) ** 2) - 2.0 * tr_sq / (d**2 * (d + 1) ** 2)
    value = math.sqrt(max(0.0, inner))
    _, upper = trace_norm_bounds(m)
    if value > upper + 1e-12:
        raise ValidationError(
            f"measurement bound {value} exceeds trace-norm upper bound {upper}")
    return value


def subsystem_bound(m: np.ndarray, fixed: int) -> float:
    """Error bound when only the low `fixed` qubits start in |0...0>.

    R <= ||M||_F / sqrt(d1) with d1 = 2^(n - fixed) the random register's
    dimension; fixed = 0 recovers the plain average-case bound.
    """
    m = _check_multiplicative(m)
    d = m.shape[0]
    n = d.bit_length() - 1
    if 1 << n != d:
        raise ArgumentError(f"matrix dimension {d} is not a power of two")
    if not 0 <= fixed < n:
        raise ArgumentError(
            f"fixed register must satisfy 0 <= fixed < n, got fixed={fixed}, n={n}")
    d1 = 1 << (n - fixed)
    return float(np.linalg.norm(m)) / math.sqrt(d1)


def multi_segment_total(per_segment: float, r: int) -> float:
    """Total bound from a per-segment bound: r segments add at most linearly."""
    if not (isinstance(r, (int, np.integer)) and r >= 1):
        raise ArgumentError(f"segment count r must be a positive integer, got {r!r}")
    if per_segment < 0:
        raise ArgumentError(f"per-segment bound must be >= 0, got {per_segment}")
    return r * per_segment


def trace_estimation_bound(m_frob_normalized: float, r: int, n: int) -> float:
    """Error bound for estimating a normalized trace of the evolution.

    Given the per-segment normalized Frobenius error ||m||_F / sqrt(d),
    the trace estimate |Tr(exact) - Tr(formula)| is off by at most
    r * d * (||m||_F / sqrt(d)).
    """
    if not (isinstance(r, (int, np.integer)) and r >= 1):
        raise ArgumentError(f"segment count r must be a positive integer, got {r!r}")
    if n < 1:
        raise ArgumentError(f"need n >= 1, got {n}")
    if m_frob_normalized < 0:
        raise ArgumentError("normalized Frobenius error must be >= 0")
    return r * (1 << n) * m_frob_normalized
