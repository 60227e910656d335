"""Hard-decoding optimization with transversal logical corrections.

At every concatenation level the conditional channels of the symmetric
decoder are grouped into distinct matrices, and for each group the logical
gate ``L`` from the code's transversal group that maximizes ``Tr(L g)`` is
appended to the recovery.  The corrected channel feeds the next level.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channels import infidelity
from .codes import StabilizerCode, SyndromeTable, TransversalGroup, symmetric_decoder, syndrome_label, transversal_group
from .logical import NoiseSpec, conditional_matrices
from .pauli import PauliOp

GROUP_TOL = 1e-9
TIE_RTOL = 1e-9
CONVERGENCE_TOL = 1e-8
DEFAULT_XI = 0.01
DEFAULT_MAX_LEVELS = 25
TIE_CAP = 4096
# groups whose total probability is below this carry no information for the argmax
NEGLIGIBLE = 1e-15

MODES = ("symmetric", "all-transversal", "pauli-only")
Score = Callable[[np.ndarray, np.ndarray], float]


class TieCapExceeded(RuntimeError):
    """The number of tied correction tuples exceeds the configured cap."""


def trace_score(gate: np.ndarray, g: np.ndarray) -> float:
    """``Tr(L g)``; maximizing it minimizes the infidelity of ``L g``."""
    return float(np.einsum("ab,ba->", gate, g))


@dataclass(frozen=True)
class DistinctGroup:
    """Syndromes whose conditional channels coincide."""

    representative: np.ndarray
    multiplicity: int
    member_syndromes: tuple[int, ...]

    @property
    def total(self) -> np.ndarray:
        """``m(k)`` times the representative."""
        return self.multiplicity * self.representative


def group_conditionals(conditionals: np.ndarray, tol: float = GROUP_TOL) -> list[DistinctGroup]:
    """Group conditional matrices that agree entrywise within ``tol``.

    Groups are ordered by their lowest syndrome, which is also the
    representative.
    """
    reps: list[np.ndarray] = []
    members: list[list[int]] = []
    flat = conditionals.reshape(len(conditionals), -1)
    for s, m in enumerate(flat):
        for j, r in enumerate(reps):
            if np.max(np.abs(m - r)) <= tol:
                members[j].append(s)
                break
        else:
            reps.append(m)
            members.append([s])
    return [
        DistinctGroup(conditionals[mem[0]].copy(), len(mem), tuple(mem))
        for mem in members
    ]


def gate_set(code: StabilizerCode, mode: str) -> TransversalGroup:
    """Transversal group filtered by ``mode``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    group = transversal_group(code)
    if mode == "pauli-only":
        return group.pauli_subgroup()
    if mode == "symmetric":
        return TransversalGroup(group.elements[:1], group.names[:1])
    return group


def _scores(group: DistinctGroup, gates: TransversalGroup, score: Score) -> np.ndarray:
    return np.array([score(gate, group.representative) for gate in gates.elements])


def _tied(scores: np.ndarray, scale: float) -> np.ndarray:
    best = scores.max()
    return np.flatnonzero(scores >= best - TIE_RTOL * max(abs(best), scale))


def optimize_level(groups: Sequence[DistinctGroup], gates: TransversalGroup,
                   score: Score = trace_score) -> list[int]:
    """Index of the best gate for each group; the first maximizer wins ties."""
    if len(gates) == 0:
        raise ValueError("empty gate group")
    out = []
    for g in groups:
        if g.representative[0, 0] <= NEGLIGIBLE:
            out.append(0)
            continue
        out.append(int(_tied(_scores(g, gates, score), 4 * g.representative[0, 0])[0]))
    return out


def tied_choices(groups: Sequence[DistinctGroup], gates: TransversalGroup,
                 score: Score = trace_score) -> list[tuple[int, ...]]:
    """All maximizing gate indices per group (first entry is the default choice)."""
    out = []
    for g in groups:
        if g.representative[0, 0] <= NEGLIGIBLE:
            out.append((0,))
            continue
        out.append(tuple(int(i) for i in _tied(_scores(g, gates, score), 4 * g.representative[0, 0])))
    return out


def enumerate_tie_schedules(groups: Sequence[DistinctGroup], gates: TransversalGroup,
                            score: Score = trace_score, cap: int = TIE_CAP) -> list[tuple[int, ...]]:
    """Cartesian product over tied maximizers of every group.

    Raises:
        TieCapExceeded: if the product has more than ``cap`` tuples.
    """
    choices = tied_choices(groups, gates, score)
    size = int(np.prod([len(c) for c in choices]))
    if size > cap:
        raise TieCapExceeded(f"{size} tie tuples exceed the cap of {cap}")
    return list(itertools.product(*choices))


def corrected_channel(groups: Sequence[DistinctGroup], gates: TransversalGroup,
                      choice: Sequence[int]) -> np.ndarray:
    """``sum_k L_k m(k) G_k``."""
    return sum(gates.elements[c] @ g.total for g, c in zip(groups, choice))


def per_syndrome(groups: Sequence[DistinctGroup], choice: Sequence[int], num_syndromes: int) -> tuple[int, ...]:
    out = [0] * num_syndromes
    for g, c in zip(groups, choice):
        for s in g.member_syndromes:
            out[s] = c
    return tuple(out)


def restore_trace_preservation(g: np.ndarray) -> np.ndarray:
    """Reset the first row to ``(1, 0, 0, 0)``.

    The exact logical channel of TP noise has this row; resetting it stops
    rounding drift from compounding over many levels near full depolarization.
    """
    g = np.array(g, dtype=float)
    g[0] = (1.0, 0.0, 0.0, 0.0)
    return g


@dataclass(frozen=True)
class LevelRecord:
    """Decoder and resulting channel at one concatenation level."""

    corrections: tuple[int, ...]   # per syndrome, index into the gate set
    channel: np.ndarray
    num_groups: int

    @property
    def trace(self) -> float:
        return float(np.trace(self.channel))

    @property
    def infidelity(self) -> float:
        return infidelity(self.channel)


@dataclass
class DecoderSchedule:
    """Per-level logical corrections on top of a fixed base syndrome table."""

    code: StabilizerCode
    table: SyndromeTable
    gates: TransversalGroup
    mode: str
    levels: list[LevelRecord] = field(default_factory=list)
    correctable: bool = False
    converged: bool = False
    levels_to_correct: int | None = None

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def channels(self) -> list[np.ndarray]:
        return [lv.channel for lv in self.levels]

    def correction_matrices(self, level: int) -> list[np.ndarray]:
        """Per-syndrome logical gates at ``level`` (0-based); reuses the deepest level beyond depth."""
        rec = self.levels[min(level, self.depth - 1)]
        return [self.gates.elements[c] for c in rec.corrections]

    def to_text(self) -> str:
        """Structured text: one ``syndrome recovery gate`` line per syndrome and level."""
        m = self.code.n - 1
        lines = [f"# code={self.code.name} mode={self.mode} levels={self.depth}"]
        for t, rec in enumerate(self.levels, start=1):
            lines.append(f"level {t}")
            for s, c in enumerate(rec.corrections):
                lines.append(f"{syndrome_label(s, m)} {self.table[s]} {self.gates.names[c]}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


def parse_schedule(text: str, code: StabilizerCode) -> tuple[SyndromeTable, str, list[tuple[str, ...]]]:
    """Inverse of :meth:`DecoderSchedule.to_text`: base table, mode, per-level gate names."""
    header, *rest = [ln for ln in text.splitlines() if ln.strip()]
    fields = dict(tok.split("=", 1) for tok in header.lstrip("# ").split())
    if fields.get("code") != code.name:
        raise ValueError(f"schedule is for code {fields.get('code')!r}, not {code.name!r}")
    recoveries: list[PauliOp | None] = [None] * code.num_syndromes
    levels: list[list[str]] = []
    for ln in rest:
        if ln.startswith("level"):
            levels.append([""] * code.num_syndromes)
            continue
        label, rec, gate = ln.split()
        s = int(label, 2)
        recoveries[s] = PauliOp.from_string(rec)
        levels[-1][s] = gate
    return SyndromeTable(code, tuple(recoveries)), fields["mode"], [tuple(lv) for lv in levels]


def load_schedule(path: str | Path, code: StabilizerCode) -> list[list[np.ndarray]]:
    """Per-level, per-syndrome correction matrices read from a schedule file."""
    _, mode, levels = parse_schedule(Path(path).read_text(encoding="utf-8"), code)
    gates = gate_set(code, mode)
    lookup = dict(zip(gates.names, gates.elements))
    return [[lookup[name] for name in lv] for lv in levels]


def _level_step(code: StabilizerCode, table: SyndromeTable, noise: NoiseSpec, gates: TransversalGroup,
                score: Score, forced: Sequence[int] | None = None):
    groups = group_conditionals(conditional_matrices(code, table, noise))
    choice = list(forced) if forced is not None else optimize_level(groups, gates, score)
    g = restore_trace_preservation(corrected_channel(groups, gates, choice))
    return groups, choice, g


def run_hard_decoder(code: StabilizerCode, noise: NoiseSpec, mode: str = "all-transversal",
                     max_levels: int = DEFAULT_MAX_LEVELS, xi: float = DEFAULT_XI,
                     table: SyndromeTable | None = None, score: Score = trace_score,
                     stop_when_correctable: bool = False, early_exit: int | None = None,
                     first_level_choice: Sequence[int] | None = None,
                     tol: float = CONVERGENCE_TOL) -> DecoderSchedule:
    """Iterate the optimizer over concatenation levels.

    Args:
        code: Code used at every level.
        noise: Physical noise at level 1 (may be a correlated mixture).
        mode: ``symmetric`` (no corrections), ``all-transversal`` or ``pauli-only``.
        max_levels: Hard cap on levels.
        xi: A level counts as corrected when ``Tr >= 4 - xi``.
        table: Base syndrome table, symmetric decoder by default.
        score: Gate-selection objective.
        stop_when_correctable: Stop at the first corrected level.
        early_exit: Declare failure after this many consecutive trace decreases.
        first_level_choice: Forced per-group gate indices at level 1.
        tol: Convergence tolerance on the entrywise change between levels.
    """
    if max_levels < 1:
        raise ValueError("max_levels must be >= 1")
    if max_levels > 1 and not code.concatenable:
        max_levels = 1
    table = table or symmetric_decoder(code)
    gates = gate_set(code, mode)
    sched = DecoderSchedule(code, table, gates, mode)
    current: NoiseSpec = noise
    # a single-qubit input channel counts as level 0 for the convergence test
    prev: np.ndarray | None = noise if isinstance(noise, np.ndarray) and noise.shape == (4, 4) else None
    decreases = 0
    for t in range(max_levels):
        forced = first_level_choice if t == 0 else None
        groups, choice, g = _level_step(code, table, current, gates, score, forced)
        sched.levels.append(LevelRecord(per_syndrome(groups, choice, code.num_syndromes), g, len(groups)))
        tr = float(np.trace(g))
        if sched.levels_to_correct is None and tr >= 4 - xi:
            sched.correctable = True
            sched.levels_to_correct = t + 1
            if stop_when_correctable:
                break
        if prev is not None:
            if np.max(np.abs(g - prev)) < tol:
                sched.converged = True
                break
            decreases = decreases + 1 if tr < np.trace(prev) else 0
            if early_exit and decreases >= early_exit and not sched.correctable:
                break
        prev = g
        current = g
    return sched


def apply_schedule(code: StabilizerCode, noise: NoiseSpec, schedule: DecoderSchedule | Sequence[Sequence[np.ndarray]],
                   levels: int, table: SyndromeTable | None = None) -> list[np.ndarray]:
    """Channels obtained by applying fixed per-level corrections to ``noise``.

    Levels deeper than the schedule reuse its last level.
    """
    from .logical import concatenate

    if isinstance(schedule, DecoderSchedule):
        table = schedule.table
        per_level = [schedule.correction_matrices(t) for t in range(levels)]
    else:
        per_level = [list(schedule[min(t, len(schedule) - 1)]) for t in range(levels)]
    table = table or symmetric_decoder(code)
    return concatenate(code, noise, table, levels, per_level)


def exhaustive_first_level(code: StabilizerCode, noise: NoiseSpec, mode: str = "all-transversal",
                           max_levels: int = DEFAULT_MAX_LEVELS, xi: float = DEFAULT_XI,
                           table: SyndromeTable | None = None, cap: int = TIE_CAP,
                           **kwargs) -> DecoderSchedule:
    """Try every tuple of tied level-1 choices; return the first that corrects.

    Later levels use the first-maximizer rule.  If no tuple corrects, the
    first-choice schedule is returned.
    """
    table = table or symmetric_decoder(code)
    gates = gate_set(code, mode)
    groups = group_conditionals(conditional_matrices(code, table, noise))
    tuples = enumerate_tie_schedules(groups, gates, cap=cap)
    first = None
    for tup in tuples:
        sched = run_hard_decoder(code, noise, mode, max_levels, xi, table, first_level_choice=tup, **kwargs)
        if sched.correctable:
            return sched
        first = first or sched
    return first  # type: ignore[return-value]


def twirl_compare(code: StabilizerCode, family, phis: Sequence[float], threshold_fn) -> dict[str, list[float]]:
    """Three threshold curves over ``phis``.

    ``family(phi, twirl)`` returns a NoiseFamily; ``threshold_fn(code, family, mode)``
    returns its threshold.  Curves: ``twirled`` (all transversal gates on the
    twirled noise), ``bare`` (all gates, bare noise), ``bare-pauli`` (Pauli
    gates, bare noise) and ``twirled-pauli``.
    """
    out: dict[str, list[float]] = {"twirled": [], "bare": [], "bare-pauli": [], "twirled-pauli": []}
    for phi in phis:
        out["twirled"].append(threshold_fn(code, family(phi, True), "all-transversal"))
        out["bare"].append(threshold_fn(code, family(phi, False), "all-transversal"))
        out["bare-pauli"].append(threshold_fn(code, family(phi, False), "pauli-only"))
        out["twirled-pauli"].append(threshold_fn(code, family(phi, True), "pauli-only"))
    return out
