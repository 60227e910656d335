"""Symplectic arithmetic for n-qubit Pauli operators.

A Pauli operator is stored as two packed integers (``z`` and ``x``) plus a
phase exponent.  Qubit ``i`` (0-based, leftmost in the string form) lives in
bit ``n - 1 - i`` so that the integer value of ``z``/``x`` reads like the
binary string.  The represented operator is::

    i**phase * mu_1 (x) mu_2 (x) ... (x) mu_n

where every ``mu_j`` is one of the Hermitian matrices I, X, Y, Z selected by
``(z_j, x_j)``.  Keeping the phase relative to the Hermitian tensor product
means stabilizer elements and logical operators always carry ``phase`` in
{0, 2}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

_CHAR_BITS = {"I": (0, 0), "X": (0, 1), "Y": (1, 1), "Z": (1, 0)}
_BITS_CHAR = {v: k for k, v in _CHAR_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}

# basis index used by process matrices: I, X, Y, Z
_BITS_INDEX = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


class DimensionError(ValueError):
    """Raised when operators on different numbers of qubits are combined."""


@dataclass(frozen=True, order=False)
class PauliOp:
    """An n-qubit Pauli operator ``i**phase * phi(z, x)``."""

    n: int
    z: int
    x: int
    phase: int = 0

    def __post_init__(self) -> None:
        limit = 1 << self.n
        if self.n < 1 or not (0 <= self.z < limit and 0 <= self.x < limit):
            raise ValueError(f"bit masks do not fit on {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_string(cls, label: str) -> "PauliOp":
        """Parse strings like ``"XZZXI"``, ``"-YY"`` or ``"+iZ"``."""
        phase = 0
        body = label.strip()
        for prefix, p in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if body.startswith(prefix) and len(body) > len(prefix):
                phase = p
                body = body[len(prefix):]
                break
        n = len(body)
        if n == 0:
            raise ValueError("empty Pauli string")
        z = x = 0
        for ch in body.upper():
            if ch not in _CHAR_BITS:
                raise ValueError(f"bad Pauli character {ch!r} in {label!r}")
            zb, xb = _CHAR_BITS[ch]
            z = (z << 1) | zb
            x = (x << 1) | xb
        return cls(n, z, x, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOp":
        """Single-qubit Pauli ``kind`` on ``qubit`` (0-based) of ``n`` qubits."""
        zb, xb = _CHAR_BITS[kind.upper()]
        shift = n - 1 - qubit
        return cls(n, zb << shift, xb << shift, 0)

    @classmethod
    def from_bits(cls, z_bits: Sequence[int], x_bits: Sequence[int], phase: int = 0) -> "PauliOp":
        if len(z_bits) != len(x_bits):
            raise DimensionError("z and x bit vectors differ in length")
        z = int("".join(str(int(b) & 1) for b in z_bits), 2)
        x = int("".join(str(int(b) & 1) for b in x_bits), 2)
        return cls(len(z_bits), z, x, phase)

    # -- views --------------------------------------------------------------
    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def letters(self) -> str:
        return "".join(_BITS_CHAR[(zb, xb)] for zb, xb in zip(self.z_bits, self.x_bits))

    def basis_indices(self) -> tuple[int, ...]:
        """Per-qubit index into the (I, X, Y, Z) process-matrix basis."""
        return tuple(_BITS_INDEX[(zb, xb)] for zb, xb in zip(self.z_bits, self.x_bits))

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters()

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators; raises for phases of +-i."""
        if self.phase % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def unsigned(self) -> "PauliOp":
        return PauliOp(self.n, self.z, self.x, 0)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix (for tests and the dense oracle)."""
        out = np.array([[1j**self.phase]], dtype=complex)
        for ch in self.letters():
            out = np.kron(out, _SINGLE[ch])
        return out

    # -- algebra ------------------------------------------------------------
    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliOp":
        return PauliOp(self.n, self.z, self.x, self.phase + 2)


def pauli_mul(p: PauliOp, q: PauliOp) -> PauliOp:
    """Exact product ``p @ q`` including phase.

    Each factor is first written as ``i**k Z(a) X(b)`` (a Y contributes a
    factor -i); moving ``X(b)`` past ``Z(c)`` costs ``(-1)**(b.c)``.
    """
    if p.n != q.n:
        raise DimensionError(f"cannot multiply {p.n}- and {q.n}-qubit Paulis")
    a, b, c, d = p.z, p.x, q.z, q.x
    z, x = a ^ c, b ^ d
    k = (
        p.phase
        + q.phase
        - _popcount(a & b)
        - _popcount(c & d)
        + 2 * _popcount(b & c)
        + _popcount(z & x)
    )
    return PauliOp(p.n, z, x, k)


def symplectic_product(p: PauliOp, q: PauliOp) -> int:
    """0 if ``p`` and ``q`` commute, 1 otherwise."""
    if p.n != q.n:
        raise DimensionError(f"cannot compare {p.n}- and {q.n}-qubit Paulis")
    return (_popcount(p.z & q.x) + _popcount(p.x & q.z)) & 1


def commutes(p: PauliOp, q: PauliOp) -> int:
    """Commutation sign eta(p, q): +1 if ``pq = qp``, -1 if ``pq = -qp``."""
    return -1 if symplectic_product(p, q) else 1


def weight(p: PauliOp) -> int:
    return _popcount(p.z | p.x)


def iter_paulis(n: int) -> Iterator[PauliOp]:
    """All 4**n unsigned Paulis, ordered by (weight, z, x)."""
    items = [(weight(PauliOp(n, z, x)), z, x) for z in range(1 << n) for x in range(1 << n)]
    items.sort()
    for _, z, x in items:
        yield PauliOp(n, z, x)


@dataclass(frozen=True)
class SignedStabilizerElement:
    """A stabilizer group element with its generator mask."""

    element: PauliOp
    generator_mask: int

    def __post_init__(self) -> None:
        if self.element.phase not in (0, 2):
            raise ValueError(f"stabilizer element {self.element} has a non-real sign")


def product_sign_f(generators: Sequence[PauliOp], mask: int) -> int:
    """Reordering exponent ``f = sum_{l<t} b_l . a_t`` over masked generators.

    Generators are multiplied in increasing index order.  Moving every Z
    factor to the left of every X factor in ``Z(a_1)X(b_1) Z(a_2)X(b_2) ...``
    produces ``(-1)**f``.
    """
    chosen = [g for j, g in enumerate(generators) if (mask >> j) & 1]
    f = 0
    for l in range(len(chosen)):
        for t in range(l + 1, len(chosen)):
            f += _popcount(chosen[l].x & chosen[t].z)
    return f


def zx_form(p: PauliOp) -> tuple[int, int, int]:
    """Return ``(k, a, b)`` with ``p = i**k Z(a) X(b)``."""
    return (p.phase - _popcount(p.z & p.x)) % 4, p.z, p.x


def stabilizer_group(generators: Sequence[PauliOp]) -> list[SignedStabilizerElement]:
    """All ``2**len(generators)`` signed products, ordered by generator mask.

    Raises:
        ValueError: if generators fail to commute or ``-I`` is generated.
    """
    if not generators:
        raise ValueError("no generators")
    n = generators[0].n
    for i, g in enumerate(generators):
        if g.n != n:
            raise DimensionError("generators act on different qubit counts")
        if g.phase not in (0, 2):
            raise ValueError(f"generator {g} is not Hermitian")
        for h in generators[i + 1:]:
            if symplectic_product(g, h):
                raise ValueError(f"generators {g} and {h} do not commute")
    out: list[SignedStabilizerElement] = []
    seen: set[tuple[int, int]] = set()
    for mask in range(1 << len(generators)):
        elem = PauliOp.identity(n)
        for j, g in enumerate(generators):
            if (mask >> j) & 1:
                elem = elem * g
        key = (elem.z, elem.x)
        if key in seen:
            if mask and key == (0, 0):
                raise ValueError("stabilizer group contains -I or dependent generators")
            raise ValueError("generators are not independent")
        seen.add(key)
        out.append(SignedStabilizerElement(elem, mask))
    return out
