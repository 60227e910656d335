"""Stabilizer codes, minimum-weight syndrome tables and transversal gate groups."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channels import PAULI_PROCESS, rotation_process, unitary_to_process
from .pauli import (
    PauliOp,
    SignedStabilizerElement,
    commutes,
    iter_paulis,
    stabilizer_group,
    symplectic_product,
    weight,
)

# logical gates available as transversal generators, as process matrices
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])
GATE_PROCESS = {
    "I": PAULI_PROCESS["I"],
    "X": PAULI_PROCESS["X"],
    "Y": PAULI_PROCESS["Y"],
    "Z": PAULI_PROCESS["Z"],
    "H": unitary_to_process(_H),
    "S": unitary_to_process(_S),
    "C3": rotation_process(np.pi / 3, (1.0, 1.0, 1.0)),
}

GROUP_TOL = 1e-10
MAX_GROUP_ORDER = 48


class CodeError(ValueError):
    """Invalid code definition or unknown code name."""


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, 1]] stabilizer code with its transversal logical gates."""

    name: str
    generators: tuple[PauliOp, ...]
    logical_x: PauliOp
    logical_z: PauliOp
    transversal_generators: tuple[str, ...] = ("X", "Z")
    concatenable: bool = True
    distance: int | None = None

    def __post_init__(self) -> None:
        n = self.n
        if len(self.generators) != n - 1:
            raise CodeError(f"{self.name}: expected {n - 1} generators, got {len(self.generators)}")
        for g in self.generators:
            if g.n != n:
                raise CodeError(f"{self.name}: generator {g} has wrong length")
        # raises on non-commuting / dependent generators
        try:
            stabilizer_group(self.generators)
        except ValueError as exc:
            raise CodeError(f"{self.name}: {exc}") from exc
        for lg in (self.logical_x, self.logical_z):
            if any(symplectic_product(lg, g) for g in self.generators):
                raise CodeError(f"{self.name}: logical {lg} does not commute with the stabilizer")
        if not symplectic_product(self.logical_x, self.logical_z):
            raise CodeError(f"{self.name}: logical X and Z must anticommute")
        for name in self.transversal_generators:
            if name not in GATE_PROCESS:
                raise CodeError(f"{self.name}: unknown transversal gate {name!r}")

    @property
    def n(self) -> int:
        return self.logical_x.n

    @property
    def num_syndromes(self) -> int:
        return 1 << (self.n - 1)

    @cached_property
    def logical_y(self) -> PauliOp:
        """Hermitian string of ``i X_L Z_L`` with sign ``sign(X_L) sign(Z_L)``.

        For ``X_L = X^n`` and ``Z_L = Z^n`` this is ``Y^n``.  When ``n = 3 mod 4``
        it equals ``-i X_L Z_L``, a mirror image of the Pauli algebra; see
        :attr:`frame_sign`.
        """
        xz = PauliOp(self.n, 0, 0, 1) * self.logical_x * self.logical_z
        return PauliOp(self.n, xz.z, xz.x, self.logical_x.phase + self.logical_z.phase)

    @cached_property
    def frame_sign(self) -> int:
        """+1 if ``Y_L = i X_L Z_L``, -1 if the logical frame is mirrored."""
        xz = PauliOp(self.n, 0, 0, 1) * self.logical_x * self.logical_z
        return 1 if xz == self.logical_y else -1

    def logical(self, label: str) -> PauliOp:
        return {
            "I": PauliOp.identity(self.n),
            "X": self.logical_x,
            "Y": self.logical_y,
            "Z": self.logical_z,
        }[label]

    @cached_property
    def stabilizers(self) -> tuple[SignedStabilizerElement, ...]:
        return tuple(stabilizer_group(self.generators))

    def syndrome(self, e: PauliOp) -> int:
        """Syndrome as an integer; bit ``n-2-i`` (string position ``i``) is generator ``i``."""
        return syndrome_bits_to_int(syndrome(e, self))

    def stabilizer_group(self) -> list[SignedStabilizerElement]:
        return list(self.stabilizers)


def syndrome(e: PauliOp, code: StabilizerCode) -> tuple[int, ...]:
    """Bit ``i`` is 1 iff ``e`` anticommutes with generator ``i``."""
    if e.n != code.n:
        raise CodeError(f"error acts on {e.n} qubits, code has {code.n}")
    return tuple(symplectic_product(e, g) for g in code.generators)


def syndrome_bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def syndrome_label(index: int, length: int) -> str:
    return format(index, f"0{length}b")


# -- registry -----------------------------------------------------------------
def _ops(*labels: str) -> tuple[PauliOp, ...]:
    return tuple(PauliOp.from_string(s) for s in labels)


def _swap_xz(p: PauliOp) -> PauliOp:
    return PauliOp.from_string(p.letters().translate(str.maketrans("XZ", "ZX")))


def _make(name: str, gens: Sequence[str], transversal: Sequence[str], concatenable: bool = True,
          distance: int | None = None) -> StabilizerCode:
    gs = _ops(*gens)
    n = gs[0].n
    return StabilizerCode(
        name=name,
        generators=gs,
        logical_x=PauliOp.from_string("X" * n),
        logical_z=PauliOp.from_string("Z" * n),
        transversal_generators=tuple(transversal),
        concatenable=concatenable,
        distance=distance,
    )


_SHOR_Z = (
    "ZZIIIIIII", "ZIZIIIIII", "IIIZZIIII", "IIIZIZIII",
    "IIIIIIZZI", "IIIIIIZIZ", "XXXXXXIII", "IIIXXXXXX",
)

_BUILTIN = {
    "five-qubit": lambda: _make("five-qubit", ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"), ("C3", "X", "Z"), distance=3),
    "steane": lambda: _make(
        "steane",
        ("IIIZZZZ", "IZZIIZZ", "ZIZIZIZ", "IIIXXXX", "IXXIIXX", "XIXIXIX"),
        ("H", "S"),
        distance=3,
    ),
    "shor-z": lambda: _make("shor-z", _SHOR_Z, ("X", "Z"), distance=3),
    "shor-x": lambda: _make("shor-x", tuple(_swap_xz(PauliOp.from_string(g)).letters() for g in _SHOR_Z),
                            ("X", "Z"), distance=3),
    "surface-17": lambda: _make(
        "surface-17",
        ("ZIIZIIIII", "IZZIZZIII", "IIIZZIZZI", "IIIIIZIIZ",
         "XXIXXIIII", "IXXIIIIII", "IIIIXXIXX", "IIIIIIXXI"),
        ("X", "Z"),
        concatenable=False,
        distance=3,
    ),
    "bitflip-3": lambda: StabilizerCode(
        name="bitflip-3",
        generators=_ops("ZZI", "IZZ"),
        logical_x=PauliOp.from_string("XXX"),
        logical_z=PauliOp.from_string("ZZZ"),
        transversal_generators=("X", "Z"),
        distance=1,
    ),
}

BUILTIN_CODES = tuple(_BUILTIN)
_CACHE: dict[str, StabilizerCode] = {}


def builtin_code(name: str) -> StabilizerCode:
    """Look up one of the built-in codes by name."""
    key = name.lower()
    if key not in _BUILTIN:
        raise CodeError(f"unknown code {name!r}; choose from {', '.join(BUILTIN_CODES)}")
    if key not in _CACHE:
        _CACHE[key] = _BUILTIN[key]()
    return _CACHE[key]


def load_code(path: str | Path, name: str | None = None) -> StabilizerCode:
    """Read a custom code from a text file.

    One generator per line as a Pauli string; lines ``X_L: <pauli>`` and
    ``Z_L: <pauli>`` give logical operators (default ``X^n`` / ``Z^n``), and a
    ``transversal: H S`` line lists gate names from {I, X, Y, Z, H, S, C3}.
    Blank lines and ``#`` comments are ignored.
    """
    path = Path(path)
    gens: list[str] = []
    logical: dict[str, str] = {}
    transversal = ["X", "Z"]
    concatenable = True
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, value = (s.strip() for s in line.split(":", 1))
            key = key.lower()
            if key in ("x_l", "logical_x"):
                logical["X"] = value
            elif key in ("z_l", "logical_z"):
                logical["Z"] = value
            elif key == "transversal":
                transversal = value.replace(",", " ").split()
            elif key == "concatenable":
                concatenable = value.lower() in ("1", "true", "yes")
            else:
                raise CodeError(f"{path}: unknown key {key!r}")
        else:
            gens.append(line)
    if not gens:
        raise CodeError(f"{path}: no generators")
    n = len(gens[0])
    return StabilizerCode(
        name=name or path.stem,
        generators=_ops(*gens),
        logical_x=PauliOp.from_string(logical.get("X", "X" * n)),
        logical_z=PauliOp.from_string(logical.get("Z", "Z" * n)),
        transversal_generators=tuple(transversal),
        concatenable=concatenable,
    )


# -- syndrome tables ------------------------------------------------------------
@dataclass(frozen=True)
class SyndromeTable:
    """One recovery Pauli per syndrome (indexed by the syndrome integer)."""

    code: StabilizerCode
    recoveries: tuple[PauliOp, ...]

    def __post_init__(self) -> None:
        if len(self.recoveries) != self.code.num_syndromes:
            raise CodeError("syndrome table does not cover every syndrome")
        for s, r in enumerate(self.recoveries):
            if self.code.syndrome(r) != s:
                raise CodeError(f"recovery {r} does not produce syndrome {s}")

    def __getitem__(self, s: int) -> PauliOp:
        return self.recoveries[s]

    def __len__(self) -> int:
        return len(self.recoveries)

    def weights(self) -> list[int]:
        return [weight(r) for r in self.recoveries]

    def coset(self, s: int) -> list[PauliOp]:
        """All ``2**(n+1)`` unsigned Paulis with syndrome ``s``."""
        base = self.recoveries[s]
        logicals = [self.code.logical(t) for t in "IXYZ"]
        return sorted(
            {(base * el.element * lg).unsigned() for el in self.code.stabilizers for lg in logicals},
            key=lambda p: (weight(p), p.z, p.x),
        )


def _fill_table(code: StabilizerCode, candidates: Iterable[PauliOp],
                table: list[PauliOp | None]) -> None:
    remaining = table.count(None)
    for p in candidates:
        if not remaining:
            break
        s = code.syndrome(p)
        if table[s] is None:
            table[s] = p
            remaining -= 1


def _tie_order(n: int, seed: int | None) -> Iterable[PauliOp]:
    """Paulis by increasing weight; equal weights in (z, x) order or shuffled."""
    if seed is None:
        yield from iter_paulis(n)
        return
    rng = np.random.default_rng(seed)
    by_weight: dict[int, list[PauliOp]] = {}
    for p in iter_paulis(n):
        by_weight.setdefault(weight(p), []).append(p)
    for w in sorted(by_weight):
        block = by_weight[w]
        for i in rng.permutation(len(block)):
            yield block[i]


@lru_cache(maxsize=64)
def symmetric_decoder(code: StabilizerCode, tie_seed: int | None = None) -> SyndromeTable:
    """Minimum-weight recovery for each syndrome.

    Equal-weight candidates are ordered by ``(z, x)`` as integers unless
    ``tie_seed`` is given, in which case each weight shell is shuffled.
    """
    table: list[PauliOp | None] = [None] * code.num_syndromes
    _fill_table(code, _tie_order(code.n, tie_seed), table)
    return SyndromeTable(code, tuple(table))  # type: ignore[arg-type]


def biased_decoder(code: StabilizerCode, error_subset: Iterable[str]) -> SyndromeTable:
    """Minimum weight among Paulis built only from ``error_subset``, then symmetric."""
    subset = {c.upper() for c in error_subset}
    if not subset:
        raise CodeError("error subset must be non-empty")
    if not subset <= {"X", "Y", "Z"}:
        raise CodeError(f"error subset {sorted(subset)} not within X, Y, Z")
    allowed = subset | {"I"}
    table: list[PauliOp | None] = [None] * code.num_syndromes
    _fill_table(code, (p for p in iter_paulis(code.n) if set(p.letters()) <= allowed), table)
    _fill_table(code, iter_paulis(code.n), table)
    return SyndromeTable(code, tuple(table))  # type: ignore[arg-type]


# -- transversal groups ------------------------------------------------------------
@dataclass(frozen=True)
class TransversalGroup:
    """Logical single-qubit gates as process matrices, identity first."""

    elements: tuple[np.ndarray, ...]
    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def pauli_subgroup(self) -> "TransversalGroup":
        keep = [i for i, e in enumerate(self.elements) if _is_pauli_process(e)]
        return TransversalGroup(tuple(self.elements[i] for i in keep), tuple(self.names[i] for i in keep))

    def index_of(self, m: np.ndarray) -> int:
        for i, e in enumerate(self.elements):
            if np.max(np.abs(e - m)) < GROUP_TOL:
                return i
        raise KeyError("matrix not in group")


def _is_pauli_process(m: np.ndarray) -> bool:
    return any(np.max(np.abs(m - p)) < GROUP_TOL for p in PAULI_PROCESS.values())


def _word_name(word: Sequence[str]) -> str:
    return "".join(word) if word else "I"


def transversal_group(code: StabilizerCode | Sequence[str]) -> TransversalGroup:
    """Closure of the transversal generators under multiplication.

    Enumeration order: identity, then the Paulis X, Y, Z (when present), then
    the remaining elements in breadth-first order from the identity.
    """
    gens = code.transversal_generators if isinstance(code, StabilizerCode) else tuple(code)
    mats = [GATE_PROCESS[g] for g in gens]
    found: list[np.ndarray] = [np.eye(4)]
    words: list[tuple[str, ...]] = [()]
    frontier = [0]
    while frontier:
        nxt = []
        for idx in frontier:
            for g, m in zip(gens, mats):
                cand = m @ found[idx]
                if any(np.max(np.abs(cand - f)) < GROUP_TOL for f in found):
                    continue
                found.append(cand)
                words.append((g,) + words[idx])
                nxt.append(len(found) - 1)
                if len(found) > MAX_GROUP_ORDER:
                    raise CodeError("transversal group closure exceeds 48 elements")
        frontier = nxt
    names = [_word_name(w) for w in words]
    order = [0]
    for label in ("X", "Y", "Z"):
        for i, m in enumerate(found):
            if i not in order and np.max(np.abs(m - PAULI_PROCESS[label])) < GROUP_TOL:
                order.append(i)
                names[i] = label
    order += [i for i in range(len(found)) if i not in order]
    return TransversalGroup(tuple(found[i] for i in order), tuple(names[i] for i in order))
