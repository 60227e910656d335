"""Correctability verdicts and threshold searches.

The symmetric search scans forward in coarse steps to the first
uncorrectable point and bisects the last interval.  The optimized search
starts at the symmetric threshold and advances with shrinking steps, so it
returns a lower bound on the optimized threshold.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .channels import NoiseFamily, infidelity
from .codes import StabilizerCode, SyndromeTable, symmetric_decoder
from .decoder import (
    DEFAULT_MAX_LEVELS,
    DEFAULT_XI,
    DecoderSchedule,
    apply_schedule,
    exhaustive_first_level,
    run_hard_decoder,
)
from .logical import NoiseSpec, correlated_noise_terms

DECODERS = ("symmetric", "optimized-all", "optimized-pauli", "fixed-schedule")
_MODE = {"symmetric": "symmetric", "optimized-all": "all-transversal", "optimized-pauli": "pauli-only"}
SCAN_STEP = 0.05
GRANULARITY = 1e-4
REFINE_STEPS = (0.01, 0.001, 0.0001)


def family_noise(family: NoiseFamily, n: int) -> NoiseSpec:
    """Noise specification accepted by the coefficient engine."""
    local = family.process_matrix()
    if family.is_correlated:
        return correlated_noise_terms(n, local, float(family.params["q"]))
    return local


@dataclass(frozen=True)
class Verdict:
    correctable: bool
    levels: int                  # t(p) when correctable, levels computed otherwise
    level1_infidelity: float
    final_infidelity: float


def _verdict(channels: Sequence[np.ndarray], xi: float) -> Verdict:
    for t, g in enumerate(channels, start=1):
        if np.trace(g) >= 4 - xi:
            return Verdict(True, t, infidelity(channels[0]), infidelity(g))
    return Verdict(False, len(channels), infidelity(channels[0]), infidelity(channels[-1]))


def correctable(code: StabilizerCode, noise: NoiseSpec, decoder: str = "symmetric", xi: float = DEFAULT_XI,
                max_levels: int = DEFAULT_MAX_LEVELS, table: SyndromeTable | None = None,
                ties: str = "first", schedule: DecoderSchedule | None = None,
                early_exit: int | None = None) -> Verdict:
    """Whether repeated concatenation drives ``noise`` to ``Tr >= 4 - xi``.

    Args:
        decoder: One of :data:`DECODERS`.
        ties: ``first`` or ``exhaustive`` (search tied level-1 choices).
        schedule: Required for ``fixed-schedule``.
        early_exit: Give up after this many consecutive trace decreases.
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    if decoder not in DECODERS:
        raise ValueError(f"unknown decoder {decoder!r}")
    if decoder == "fixed-schedule":
        if schedule is None:
            raise ValueError("fixed-schedule decoding needs a schedule")
        levels = max_levels if code.concatenable else 1
        return _verdict(apply_schedule(code, noise, schedule, levels), xi)
    kwargs = dict(table=table, stop_when_correctable=True, early_exit=early_exit)
    if ties == "exhaustive" and decoder != "symmetric":
        sched = exhaustive_first_level(code, noise, _MODE[decoder], max_levels, xi, **kwargs)
    elif ties in ("first", "exhaustive"):
        sched = run_hard_decoder(code, noise, _MODE[decoder], max_levels, xi, **kwargs)
    else:
        raise ValueError(f"unknown tie handling {ties!r}")
    return _verdict(sched.channels, xi)


@dataclass(frozen=True)
class ThresholdQuery:
    """One threshold search: ``family`` swept over ``param``."""

    code: StabilizerCode
    family: NoiseFamily
    param: str = "p"
    decoder: str = "symmetric"
    xi: float = DEFAULT_XI
    max_levels: int = DEFAULT_MAX_LEVELS
    ties: str = "first"
    start: float = 0.0
    upper: float = 1.0
    scan_step: float = SCAN_STEP
    granularity: float = GRANULARITY
    table: SyndromeTable | None = None
    schedule: DecoderSchedule | None = None
    early_exit: int | None = None

    def __post_init__(self) -> None:
        if self.xi <= 0:
            raise ValueError("xi must be positive")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}")


@dataclass(frozen=True)
class Probe:
    value: float
    correctable: bool
    levels: int
    level1_infidelity: float
    final_infidelity: float


@dataclass
class ThresholdResult:
    threshold: float
    granularity: float
    probes: list[Probe] = field(default_factory=list)
    status: str = "ok"

    def bracket(self) -> tuple[float, float]:
        return self.threshold, self.threshold + self.granularity


class _Prober:
    def __init__(self, query: ThresholdQuery, decoder: str | None = None):
        self.q = query
        self.decoder = decoder or query.decoder
        self.probes: list[Probe] = []
        self._cache: dict[float, bool] = {}

    def __call__(self, value: float) -> bool:
        key = round(value, 12)
        if key in self._cache:
            return self._cache[key]
        q = self.q
        noise = family_noise(q.family.with_params(**{q.param: value}), q.code.n)
        v = correctable(q.code, noise, self.decoder, q.xi, q.max_levels, q.table, q.ties,
                        q.schedule, q.early_exit)
        self.probes.append(Probe(value, v.correctable, v.levels, v.level1_infidelity, v.final_infidelity))
        self._cache[key] = v.correctable
        return v.correctable


def _scan_bisect(prober: _Prober, q: ThresholdQuery) -> tuple[float, str]:
    lo = q.start
    value = q.start + q.scan_step
    while value <= q.upper + 1e-12:
        if not prober(value):
            hi = value
            while hi - lo > q.granularity + 1e-15:
                mid = (lo + hi) / 2
                if prober(mid):
                    lo = mid
                else:
                    hi = mid
            return lo, "ok"
        lo = value
        value += q.scan_step
    return q.upper, "no-uncorrectable-point"


def symmetric_threshold(query: ThresholdQuery) -> ThresholdResult:
    """Coarse forward scan, then bisection of the first failing step."""
    q = replace(query, decoder="symmetric") if query.decoder != "fixed-schedule" else query
    prober = _Prober(q)
    th, status = _scan_bisect(prober, q)
    return ThresholdResult(th, q.granularity, prober.probes, status)


def optimized_threshold(query: ThresholdQuery, p_sym: float | None = None) -> ThresholdResult:
    """Lower bound on the optimized threshold, starting from the symmetric one."""
    if query.decoder not in ("optimized-all", "optimized-pauli"):
        raise ValueError("optimized_threshold needs an optimized decoder")
    probes: list[Probe] = []
    if p_sym is None:
        sym = symmetric_threshold(query)
        probes.extend(sym.probes)
        p_sym = sym.threshold
    prober = _Prober(query)
    p_in = p_sym
    for step in REFINE_STEPS:
        if step < query.granularity - 1e-15:
            break
        while p_in + step <= query.upper + 1e-12 and prober(p_in + step):
            p_in += step
    probes.extend(prober.probes)
    gran = max(query.granularity, REFINE_STEPS[-1])
    status = "no-uncorrectable-point" if p_in + gran > query.upper + 1e-12 else "ok"
    return ThresholdResult(p_in, gran, probes, status)


def threshold(query: ThresholdQuery) -> ThresholdResult:
    """Dispatch on the query's decoder kind."""
    if query.decoder in ("optimized-all", "optimized-pauli"):
        return optimized_threshold(query)
    return symmetric_threshold(query)


def hypersurface_mesh(query: ThresholdQuery, mesh: Sequence[dict]) -> list[ThresholdResult]:
    """One threshold per co-parameter assignment, in mesh order.

    A failing point is recorded with status ``error: ...`` and a NaN threshold.
    """
    if not mesh:
        raise ValueError("mesh must be non-empty")
    out = []
    for point in mesh:
        try:
            out.append(threshold(replace(query, family=query.family.with_params(**point))))
        except Exception as exc:  # per-point failures are recorded, not fatal
            out.append(ThresholdResult(float("nan"), query.granularity, [], f"error: {exc}"))
    return out


PROBE_COLUMNS = ("value", "correctable", "levels", "level1_infidelity", "final_infidelity")


def probes_to_csv(rows: Iterable[tuple[dict, Probe]]) -> str:
    """CSV text: mesh coordinates first, then the probe columns."""
    rows = list(rows)
    coord_keys = sorted({k for coords, _ in rows for k in coords})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*coord_keys, *PROBE_COLUMNS])
    for coords, pr in rows:
        w.writerow([*(coords.get(k, "") for k in coord_keys), repr(pr.value), int(pr.correctable), pr.levels,
                    repr(pr.level1_infidelity), repr(pr.final_infidelity)])
    return buf.getvalue()
