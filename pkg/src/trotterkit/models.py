"""Model Hamiltonians, their product-formula groupings, and norm profiles.

Three builders cover the study's models: a 1D Heisenberg chain with random
Z fields split into even/odd bond groups, all-to-all Heisenberg couplings
with power-law decay split by Pauli direction, and a k-local ensemble with
one random string per support.  Sites are 0-indexed qubits here; a chain
site j in 1-based physics notation is qubit j-1.

Norm profiles are computed on the support decomposition of the full
Hamiltonian (all strings sharing an exact support set form one local term),
independent of the product-formula grouping.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from trotterkit import rng
from trotterkit.errors import ArgumentError, ValidationError
from trotterkit.pauli import (
    PauliString,
    PauliSum,
    restrict_to_support,
    spectral_norm,
)

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianInstance:
    """A concrete Hamiltonian with an ordered product-formula grouping."""

    n: int
    model: str
    params: dict
    seed: int
    groups: tuple  # of (label, PauliSum), in product-formula order

    def total(self) -> PauliSum:
        acc = PauliSum(self.n)
        for _, op in self.groups:
            acc = acc + op
        return acc

    def group(self, label: str) -> PauliSum:
        for lab, op in self.groups:
            if lab == label:
                return op
        raise ArgumentError(f"no group labeled {label!r}")

    @property
    def group_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.groups)


@dataclass(frozen=True)
class NormProfile:
    """Norms of the support decomposition that parameterize error bounds.

    one_norm sums local-term spectral norms, frob_one_normalized sums
    dimension-normalized Frobenius norms, induced_one maximizes the
    per-site sum of term norms, induced_per is the permutation-induced
    norm, and max_term_norm is the largest single local-term norm.
    per_exact is False when induced_per is the documented upper bound
    sqrt(induced_one * max_term_norm) used above 3-local.
    """

    one_norm: float
    frob_one_normalized: float
    induced_one: float
    induced_per: float
    max_term_norm: float
    per_exact: bool = True


def _bond_pairs(n: int, q1: int, q2: int, coeff: float):
    m = (1 << q1) | (1 << q2)
    return [
        (coeff, PauliString(n, m, 0)),
        (coeff, PauliString(n, m, m)),
        (coeff, PauliString(n, 0, m)),
    ]


def _field_pair(n: int, q: int, h: float):
    return (h, PauliString(n, 0, 1 << q))


def build_heisenberg_1d(n: int, seed: int) -> HamiltonianInstance:
    """Heisenberg chain with uniform bonds and random fields in [-1, 1].

    Group A holds bonds (q, q+1) for even q plus fields on even qubits;
    group B holds the odd-q bonds and odd-qubit fields.  In 1-based site
    terms that is the usual even/odd bond bipartition with odd-site fields
    in A, and it makes each group a sum of mutually commuting terms.
    """
    if n < 2:
        raise ArgumentError(f"chain needs n >= 2, got {n}")
    h = rng.generator(seed, "heisenberg-1d", n).uniform(-1.0, 1.0, size=n)
    a_terms, b_terms = [], []
    for q in range(n - 1):
        (a_terms if q % 2 == 0 else b_terms).extend(_bond_pairs(n, q, q + 1, 1.0))
    for q in range(n):
        (a_terms if q % 2 == 0 else b_terms).append(_field_pair(n, q, float(h[q])))
    return HamiltonianInstance(
        n=n,
        model="heisenberg_1d",
        params={"field_range": [-1.0, 1.0]},
        seed=seed,
        groups=(
            ("A", PauliSum.from_strings(n, a_terms)),
            ("B", PauliSum.from_strings(n, b_terms)),
        ),
    )


def build_power_law(n: int, alpha: float, seed: int) -> HamiltonianInstance:
    """All-pairs Heisenberg couplings decaying as distance^-alpha.

    Couplings are grouped by Pauli direction (X, Y, Z in that order) so
    each group is internally commuting; the random fields h_q Z_q ride in
    the Z group, which they commute with.
    """
    if n < 2:
        raise ArgumentError(f"need n >= 2, got {n}")
    if alpha < 0:
        raise ArgumentError(f"decay exponent must be >= 0, got {alpha}")
    h = rng.generator(seed, "power-law", n).uniform(-1.0, 1.0, size=n)
    x_terms, y_terms, z_terms = [], [], []
    for q1, q2 in itertools.combinations(range(n), 2):
        c = float((q2 - q1) ** (-alpha)) if alpha else 1.0
        m = (1 << q1) | (1 << q2)
        x_terms.append((c, PauliString(n, m, 0)))
        y_terms.append((c, PauliString(n, m, m)))
        z_terms.append((c, PauliString(n, 0, m)))
    for q in range(n):
        z_terms.append(_field_pair(n, q, float(h[q])))
    return HamiltonianInstance(
        n=n,
        model="power_law",
        params={"alpha": float(alpha), "field_range": [-1.0, 1.0]},
        seed=seed,
        groups=(
            ("X", PauliSum.from_strings(n, x_terms)),
            ("Y", PauliSum.from_strings(n, y_terms)),
            ("Z", PauliSum.from_strings(n, z_terms)),
        ),
    )


def build_k_local_random(
    n: int, k: int, terms_per_support: int = 1, seed: int = 0
) -> HamiltonianInstance:
    """Random strings supported on every k-subset of qubits, one group each.

    Each support draws terms_per_support strings whose factors are X, Y, or
    Z on every support qubit, with coefficients uniform in [-1, 1] divided
    by terms_per_support, so every group norm is at most 1.
    """
    if not 1 <= k <= n:
        raise ArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    if terms_per_support < 1:
        raise ArgumentError("terms_per_support must be positive")
    gen = rng.generator(seed, "k-local", n, k, terms_per_support)
    groups = []
    for subset in itertools.combinations(range(n), k):
        pairs = []
        for _ in range(terms_per_support):
            x = z = 0
            for q in subset:
                which = int(gen.integers(1, 4))  # 1=X, 2=Y, 3=Z
                if which != 3:
                    x |= 1 << q
                if which != 1:
                    z |= 1 << q
            c = float(gen.uniform(-1.0, 1.0)) / terms_per_support
            pairs.append((c, PauliString(n, x, z)))
        label = "-".join(str(q) for q in subset)
        groups.append((label, PauliSum.from_strings(n, pairs)))
    return HamiltonianInstance(
        n=n,
        model="k_local_random",
        params={"k": k, "terms_per_support": terms_per_support},
        seed=seed,
        groups=tuple(groups),
    )


def custom_instance(n: int, groups, params=None, seed: int = 0) -> HamiltonianInstance:
    """Wrap explicit (label, PauliSum) groups as an instance."""
    return HamiltonianInstance(
        n=n, model="custom", params=dict(params or {}), seed=seed,
        groups=tuple(groups),
    )


def support_terms(total: PauliSum) -> dict[tuple[int, ...], PauliSum]:
    """Split a sum into local terms keyed by exact string support."""
    buckets: dict[tuple[int, ...], PauliSum] = {}
    for (x, z), c in total.terms.items():
        sup = PauliString(total.n, x, z).support
        if sup not in buckets:
            buckets[sup] = PauliSum(total.n)
        buckets[sup]._accumulate(x, z, c)
    return buckets


def _term_norm(op: PauliSum, sup: tuple[int, ...]) -> float:
    if not sup:
        return abs(op.normalized_trace())
    small = restrict_to_support(op, sup)
    if len(sup) <= 12:
        return spectral_norm(small, "dense")
    return spectral_norm(small, "coeff_upper")


def norm_profile(inst: HamiltonianInstance) -> NormProfile:
    """All five norms of the support decomposition of total(H)."""
    buckets = support_terms(inst.total())
    norms = {sup: _term_norm(op, sup) for sup, op in buckets.items()}
    one_norm = sum(norms.values())
    frob_one = sum(op.frobenius_normalized() for op in buckets.values())
    max_term = max(norms.values(), default=0.0)

    by_site: dict[int, list[tuple[int, ...]]] = {q: [] for q in range(inst.n)}
    for sup in buckets:
        for q in sup:
            by_site[q].append(sup)
    induced_one = max(
        (sum(norms[s] for s in sups) for sups in by_site.values()), default=0.0
    )

    k_max = max((len(s) for s in buckets), default=0)
    if k_max <= 3:
        per_sq = 0.0
        for q, sups in by_site.items():
            acc = 0.0
            for s in sups:
                rest = tuple(p for p in s if p != q)
                bracket = 0.0
                for u in range(inst.n):
                    if u in rest:
                        continue
                    cand = tuple(sorted(rest + (u,)))
                    if cand in norms:
                        bracket = max(bracket, norms[cand])
                acc += norms[s] * bracket
            per_sq = max(per_sq, acc)
        induced_per = float(np.sqrt(per_sq))
        per_exact = True
    else:
        induced_per = float(np.sqrt(induced_one * max_term))
        per_exact = False

    return NormProfile(
        one_norm=float(one_norm),
        frob_one_normalized=float(frob_one),
        induced_one=float(induced_one),
        induced_per=induced_per,
        max_term_norm=float(max_term),
        per_exact=per_exact,
    )


def to_json(inst: HamiltonianInstance) -> str:
    """Serialize an instance; floats survive the round trip exactly."""
    payload = {
        "n": inst.n,
        "model": inst.model,
        "params": inst.params,
        "seed": inst.seed,
        "groups": [
            {
                "label": lab,
                "terms": [
                    [c.real, c.imag, PauliString(inst.n, x, z).label]
                    for (x, z), c in sorted(
                        op.terms.items(),
                        key=lambda kv: PauliString(inst.n, *kv[0]).label,
                    )
                ],
            }
            for lab, op in inst.groups
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def from_json(text: str) -> HamiltonianInstance:
    """Parse to_json output; rejects non-Hermitian totals and bad labels."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from None
    for key in ("n", "model", "params", "seed", "groups"):
        if key not in payload:
            raise ValidationError(f"missing field {key!r}")
    n = payload["n"]
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"bad qubit count {n!r}")
    groups = []
    for g in payload["groups"]:
        if "label" not in g or "terms" not in g:
            raise ValidationError("group needs label and terms")
        pairs = []
        for entry in g["terms"]:
            if len(entry) != 3:
                raise ValidationError(f"bad term entry {entry!r}")
            re_c, im_c, label = entry
            if len(label) != n:
                raise ValidationError(
                    f"label {label!r} has length {len(label)}, expected {n}"
                )
            try:
                s = PauliString.from_label(label)
            except ArgumentError as exc:
                raise ValidationError(str(exc)) from None
            pairs.append((complex(re_c, im_c), s))
        groups.append((g["label"], PauliSum.from_strings(n, pairs)))
    inst = HamiltonianInstance(
        n=n,
        model=payload["model"],
        params=payload["params"],
        seed=payload["seed"],
        groups=tuple(groups),
    )
    if not inst.total().is_hermitian(HERMITICITY_TOL):
        raise ValidationError("total Hamiltonian is not Hermitian")
    return inst
