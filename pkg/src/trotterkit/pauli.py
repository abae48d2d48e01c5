"""Sparse Pauli-string algebra on bitmask pairs.

A string on n qubits is a pair of masks (x, z) with qubit q occupying bit q,
representing i^{popcount(x & z)} X^x Z^z.  That phase convention makes every
string equal to the literal tensor product of I, X, Y, Z factors, so strings
are Hermitian and multiply by a power of i times a sign.

Labels read qubit 0 first: "XIZ" is X on qubit 0, Z on qubit 2.  Qubit 0 is
the least significant bit of a computational basis index.

Sums are dicts from (x, z) to complex coefficients.  Products, commutators,
and Frobenius norms stay in this representation; dense matrices are built
only on demand and only up to 12 qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trotterkit.errors import (
    ArgumentError,
    CapabilityError,
    ConvergenceError,
    DimensionError,
)
from trotterkit import rng

PRUNE_TOL = 1e-14
DENSE_QUBIT_CAP = 12
STATE_QUBIT_CAP = 62

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {v: k for k, v in _CHAR_TO_XZ.items()}

_IDX_CACHE: dict[int, np.ndarray] = {}


def _basis_indices(n: int) -> np.ndarray:
    idx = _IDX_CACHE.get(n)
    if idx is None:
        idx = np.arange(1 << n, dtype=np.uint64)
        _IDX_CACHE[n] = idx
    return idx

_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_CHAR_TO_MAT = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}


@dataclass(frozen=True)
class PauliString:
    """One Pauli string: qubit count plus X and Z bitmasks."""

    n: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"need at least one qubit, got n={self.n}")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ArgumentError("mask has bits beyond qubit count")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for q, ch in enumerate(label):
            try:
                xb, zb = _CHAR_TO_XZ[ch]
            except KeyError:
                raise ArgumentError(f"bad Pauli character {ch!r} in {label!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(label), x, z)

    @property
    def label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]
            for q in range(self.n)
        )

    @property
    def support(self) -> tuple[int, ...]:
        occ = self.x_mask | self.z_mask
        return tuple(q for q in range(self.n) if (occ >> q) & 1)

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")
        anti = (self.x_mask & other.z_mask).bit_count() + (
            self.z_mask & other.x_mask
        ).bit_count()
        return anti % 2 == 0

    def dense(self) -> np.ndarray:
        _check_dense_cap(self.n)
        mat = np.array([[1.0 + 0j]])
        for q in range(self.n - 1, -1, -1):
            ch = _XZ_TO_CHAR[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]
            mat = np.kron(mat, _CHAR_TO_MAT[ch])
        return mat


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product of two strings as (phase, string); phase is a power of i."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")
    x3 = a.x_mask ^ b.x_mask
    z3 = a.z_mask ^ b.z_mask
    p1 = (a.x_mask & a.z_mask).bit_count()
    p2 = (b.x_mask & b.z_mask).bit_count()
    p3 = (x3 & z3).bit_count()
    exponent = (p1 + p2 - p3) % 4
    phase = _I_POW[exponent]
    if (a.z_mask & b.x_mask).bit_count() % 2:
        phase = -phase
    return phase, PauliString(a.n, x3, z3)


def _check_dense_cap(n: int):
    if n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"dense matrices are capped at {DENSE_QUBIT_CAP} qubits, got n={n}"
        )


class PauliSum:
    """Complex linear combination of Pauli strings on a fixed qubit count."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        if n < 1:
            raise ArgumentError(f"need at least one qubit, got n={n}")
        self.n = n
        self.terms: dict[tuple[int, int], complex] = {}
        if terms:
            for key, coeff in dict(terms).items():
                self._accumulate(key[0], key[1], complex(coeff))

    def _accumulate(self, x: int, z: int, coeff: complex):
        key = (x, z)
        new = self.terms.get(key, 0j) + coeff
        if new == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    @classmethod
    def from_strings(cls, n: int, pairs) -> "PauliSum":
        """Build from an iterable of (coeff, PauliString | label) pairs."""
        out = cls(n)
        for coeff, s in pairs:
            if isinstance(s, str):
                s = PauliString.from_label(s)
            if s.n != n:
                raise DimensionError(f"string on {s.n} qubits in a {n}-qubit sum")
            out._accumulate(s.x_mask, s.z_mask, complex(coeff))
        return out

    def copy(self) -> "PauliSum":
        return PauliSum(self.n, self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_same(other)
        out = self.copy()
        for (x, z), c in other.terms.items():
            out._accumulate(x, z, c)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        self._check_same(other)
        out = self.copy()
        for (x, z), c in other.terms.items():
            out._accumulate(x, z, -c)
        return out

    def __mul__(self, scalar) -> "PauliSum":
        scalar = complex(scalar)
        return PauliSum(self.n, {k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        self._check_same(other)
        out = PauliSum(self.n)
        for (x1, z1), c1 in self.terms.items():
            s1 = PauliString(self.n, x1, z1)
            for (x2, z2), c2 in other.terms.items():
                phase, s3 = multiply(s1, PauliString(self.n, x2, z2))
                out._accumulate(s3.x_mask, s3.z_mask, c1 * c2 * phase)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n == other.n
            and self.terms == other.terms
        )

    def _check_same(self, other: "PauliSum"):
        if not isinstance(other, PauliSum):
            raise ArgumentError(f"expected PauliSum, got {type(other).__name__}")
        if self.n != other.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")

    def adjoint(self) -> "PauliSum":
        # Strings are Hermitian in this convention, so only coefficients flip.
        return PauliSum(self.n, {k: c.conjugate() for k, c in self.terms.items()})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def prune(self, tol: float = PRUNE_TOL) -> "PauliSum":
        """Drop terms with |coeff| <= tol; returns a new sum."""
        return PauliSum(
            self.n, {k: c for k, c in self.terms.items() if abs(c) > tol}
        )

    def normalized_trace(self) -> complex:
        """Tr(S)/d: the identity-string coefficient."""
        return self.terms.get((0, 0), 0j)

    def one_norm(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def frobenius_normalized(self) -> float:
        """sqrt(Tr(S† S)/d); strings are orthonormal under Tr(.)/d."""
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    def dense(self) -> np.ndarray:
        _check_dense_cap(self.n)
        d = 1 << self.n
        out = np.zeros((d, d), dtype=complex)
        idx = _basis_indices(self.n)
        for (x, z), c in self.terms.items():
            phase = _I_POW[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (
                np.bitwise_count(idx & np.uint64(z)).astype(np.int64) & 1
            )
            out[idx ^ np.uint64(x), idx] += (c * phase) * signs
        return out

    def apply_to_state(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free S @ psi; psi is (d,) or (d, batch) with d = 2^n."""
        if self.n > STATE_QUBIT_CAP:
            raise CapabilityError(f"state vectors are capped at {STATE_QUBIT_CAP} qubits")
        psi = np.asarray(psi, dtype=complex)
        d = 1 << self.n
        if psi.shape[0] != d:
            raise DimensionError(f"state has leading dimension {psi.shape[0]}, need {d}")
        out = np.zeros_like(psi)
        idx = _basis_indices(self.n)
        col = (slice(None),) + (None,) * (psi.ndim - 1)
        for (x, z), c in self.terms.items():
            phase = _I_POW[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (
                np.bitwise_count(idx & np.uint64(z)).astype(np.int64) & 1
            )
            # b -> b ^ x is a bijection, so fancy-index accumulation is safe.
            out[idx ^ np.uint64(x)] += (c * phase) * (signs[col] * psi)
        return out


def support_components(s: PauliSum) -> list[PauliSum]:
    """Split a sum into parts whose supports are pairwise disjoint.

    Strings whose supports overlap (transitively) land in the same part,
    so distinct parts always commute.  Identity terms form their own part.
    """
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    keys = list(s.terms)
    for x, z in keys:
        occ = x | z
        first = None
        q = 0
        while occ >> q:
            if (occ >> q) & 1:
                parent.setdefault(q, q)
                if first is None:
                    first = q
                else:
                    union(first, q)
            q += 1
    grouped: dict[int, PauliSum] = {}
    identity_part = None
    for (x, z) in keys:
        occ = x | z
        if occ == 0:
            if identity_part is None:
                identity_part = PauliSum(s.n)
            identity_part._accumulate(x, z, s.terms[(x, z)])
            continue
        root = find((occ & -occ).bit_length() - 1)
        if root not in grouped:
            grouped[root] = PauliSum(s.n)
        grouped[root]._accumulate(x, z, s.terms[(x, z)])
    parts = [grouped[r] for r in sorted(grouped)]
    if identity_part is not None:
        parts.append(identity_part)
    return parts


def restrict_to_support(s: PauliSum, support: tuple[int, ...]) -> PauliSum:
    """Relabel a sum whose strings live inside `support` onto fewer qubits.

    Qubit support[i] becomes qubit i of the output.  Raises if any term
    touches a qubit outside the given support.
    """
    seen = set(support)
    if len(seen) != len(support):
        raise ArgumentError("support has repeated qubits")
    pos = {q: i for i, q in enumerate(support)}
    m = max(1, len(support))
    out = PauliSum(m)
    for (x, z), c in s.terms.items():
        nx = nz = 0
        occ = x | z
        q = 0
        while occ >> q:
            if (occ >> q) & 1:
                if q not in pos:
                    raise ArgumentError(
                        f"term touches qubit {q}, outside support {support}"
                    )
                nx |= ((x >> q) & 1) << pos[q]
                nz |= ((z >> q) & 1) << pos[q]
            q += 1
        out._accumulate(nx, nz, c)
    return out


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """[a, b], using that string pairs either commute or anticommute."""
    a._check_same(b)
    out = PauliSum(a.n)
    for (x1, z1), c1 in a.terms.items():
        s1 = PauliString(a.n, x1, z1)
        for (x2, z2), c2 in b.terms.items():
            s2 = PauliString(a.n, x2, z2)
            if s1.commutes_with(s2):
                continue
            phase, s3 = multiply(s1, s2)
            out._accumulate(s3.x_mask, s3.z_mask, 2 * c1 * c2 * phase)
    return out.prune()


def nested_commutator(ops: list[PauliSum]) -> PauliSum:
    """[ops[0], [ops[1], [... [ops[-2], ops[-1]] ...]]]."""
    if len(ops) < 2:
        raise ArgumentError("nested commutator needs at least two operands")
    acc = ops[-1]
    for op in reversed(ops[:-1]):
        acc = commutator(op, acc)
    return acc


def spectral_norm(
    s: PauliSum,
    method: str = "dense",
    tol: float = 1e-8,
    max_iters: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest singular value of the sum.

    "dense" diagonalizes explicitly (capped at 12 qubits),
    "power" runs matrix-free power iteration on S†S, and
    "coeff_upper" returns the coefficient 1-norm, a cheap upper bound.
    """
    if not s.terms:
        return 0.0
    if method == "coeff_upper":
        return s.one_norm()
    if method == "dense":
        return float(np.linalg.norm(s.dense(), 2))
    if method != "power":
        raise ArgumentError(f"unknown spectral norm method {method!r}")

    adj = s.adjoint()
    d = 1 << s.n
    gen = rng.generator(seed, "spectral-power", s.n)
    for _restart in range(3):
        v = gen.normal(size=d) + 1j * gen.normal(size=d)
        norm_v = np.linalg.norm(v)
        v /= norm_v
        rayleigh_prev = -1.0
        for _ in range(max_iters):
            w = adj.apply_to_state(s.apply_to_state(v))
            rayleigh = float(np.real(np.vdot(v, w)))
            norm_w = np.linalg.norm(w)
            if norm_w == 0.0:
                break  # v landed in the kernel; restart with a fresh vector
            v = w / norm_w
            if abs(rayleigh - rayleigh_prev) <= tol * max(abs(rayleigh), 1e-300):
                return float(np.sqrt(max(rayleigh, 0.0)))
            rayleigh_prev = rayleigh
        else:
            raise ConvergenceError(
                f"power iteration did not converge in {max_iters} iterations"
            )
    return 0.0  # every restart hit the kernel, so the operator is zero


def to_text(s: PauliSum) -> str:
    """Serialize one term per line as `re im label`, sorted by label.

    The %.17g float format makes the round trip through from_text exact.
    """
    lines = []
    for (x, z), c in sorted(
        s.terms.items(), key=lambda kv: PauliString(s.n, *kv[0]).label
    ):
        label = PauliString(s.n, x, z).label
        lines.append("%.17g %.17g %s" % (c.real, c.imag, label))
    return "\n".join(lines) + ("\n" if lines else "")


def from_text(text: str, n: int | None = None) -> PauliSum:
    """Parse the to_text format; blank lines and # comments are skipped."""
    pairs = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ArgumentError(f"line {ln}: expected `re im label`, got {raw!r}")
        try:
            re_c, im_c = float(parts[0]), float(parts[1])
        except ValueError:
            raise ArgumentError(f"line {ln}: bad coefficient in {raw!r}") from None
        label = parts[2]
        if n is None:
            n = len(label)
        if len(label) != n:
            raise DimensionError(
                f"line {ln}: label length {len(label)} does not match n={n}"
            )
        pairs.append((complex(re_c, im_c), label))
    if n is None:
        raise ArgumentError("no terms found and no qubit count given")
    return PauliSum.from_strings(n, pairs)
