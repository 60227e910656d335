"""Configuration-driven experiments producing CSV data and a JSON manifest.

A configuration is a JSON object with ``"schema": 1``.  Common keys:

``kind``
    ``channel``, ``infidelity-sweep``, ``threshold``, ``contour``,
    ``twirl-compare`` or ``perturbation``.
``code``
    Built-in code name, or ``{"path": "file.txt"}`` for a custom code.
``noise``
    ``{"kind": ..., "params": {...}, "twirl": false}``.
``decoder``
    ``symmetric``, ``optimized-all`` or ``optimized-pauli``.
``levels``, ``xi``, ``max_levels``, ``ties``, ``seed``
    As in the library functions.

Kind-specific keys are documented on each ``run_*`` function.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .channels import NOISE_KINDS, NoiseFamily, haar_random_unitary, infidelity, perturb, rotation_process
from .codes import BUILTIN_CODES, StabilizerCode, builtin_code, load_code
from .decoder import DEFAULT_MAX_LEVELS, DEFAULT_XI, apply_schedule, run_hard_decoder
from .threshold import DECODERS, ThresholdQuery, family_noise, threshold

SCHEMA_VERSION = 1
KINDS = ("channel", "infidelity-sweep", "threshold", "contour", "twirl-compare", "perturbation")
_DECODER_MODE = {"symmetric": "symmetric", "optimized-all": "all-transversal", "optimized-pauli": "pauli-only"}
F_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin2theta/10": lambda x: float(np.sin(x) ** 2 / 10),
    "lambda/10": lambda x: float(x / 10),
}


class ConfigError(ValueError):
    """An experiment configuration field is missing or invalid."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    kind: str
    code: str | dict
    noise: dict
    decoder: str = "symmetric"
    levels: int = 3
    xi: float = DEFAULT_XI
    max_levels: int = DEFAULT_MAX_LEVELS
    seed: int | None = None
    ties: str = "first"
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        schema = data.pop("schema", None)
        if schema != SCHEMA_VERSION:
            raise ConfigError("schema", f"expected {SCHEMA_VERSION}, got {schema!r}")
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        for required in ("kind", "code", "noise"):
            if required not in data:
                raise ConfigError(required, "missing")
        cfg = cls(**{k: data.pop(k) for k in list(data) if k in known}, extra=data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION}
        for k in self.__dataclass_fields__:
            if k != "extra":
                out[k] = getattr(self, k)
        out.update(self.extra)
        return out

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"unknown kind {self.kind!r}")
        if isinstance(self.code, str) and self.code not in BUILTIN_CODES:
            raise ConfigError("code", f"unknown code {self.code!r}")
        if not isinstance(self.noise, dict) or self.noise.get("kind") not in NOISE_KINDS:
            raise ConfigError("noise.kind", f"must be one of {', '.join(NOISE_KINDS)}")
        if self.decoder not in DECODERS[:3]:
            raise ConfigError("decoder", f"unknown decoder {self.decoder!r}")
        if self.ties not in ("first", "exhaustive"):
            raise ConfigError("ties", "must be 'first' or 'exhaustive'")
        if self.levels < 1 or self.max_levels < 1:
            raise ConfigError("levels", "must be >= 1")
        if self.xi <= 0:
            raise ConfigError("xi", "must be positive")
        for key in ("values", "grid"):
            if key in self.extra and not self.extra[key]:
                raise ConfigError(key, "grid must be non-empty")
        for key, grid in self.extra.get("mesh", {}).items():
            if not grid:
                raise ConfigError(f"mesh.{key}", "grid must be non-empty")
        if self.kind == "perturbation" and self.seed is None:
            raise ConfigError("seed", "required for randomized experiments")

    def build_code(self) -> StabilizerCode:
        if isinstance(self.code, dict):
            return load_code(self.code["path"], self.code.get("name"))
        return builtin_code(self.code)

    def family(self) -> NoiseFamily:
        return NoiseFamily(self.noise["kind"], dict(self.noise.get("params", {})),
                           twirl=bool(self.noise.get("twirl", False)))


def load_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- helpers ----------------------------------------------------------------------
def _fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _pool_map(fn, items: Sequence, workers: int) -> list:
    """Ordered map; results do not depend on the number of workers."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _mesh_points(mesh: dict) -> list[dict]:
    keys = sorted(mesh)
    return [dict(zip(keys, vals)) for vals in itertools.product(*(mesh[k] for k in keys))]


def _levels_for(cfg: ExperimentConfig, code: StabilizerCode) -> int:
    return cfg.levels if code.concatenable else 1


# -- experiment kinds ---------------------------------------------------------------
def run_channel(cfg: ExperimentConfig) -> dict[str, str]:
    """Per-level logical process matrices for the configured noise point.

    Optional ``values`` with ``param`` evaluates a list of parameter values.
    Columns: ``param_value, level, infidelity, trace, g00 ... g33``.
    """
    code = cfg.build_code()
    fam = cfg.family()
    param = cfg.extra.get("param")
    values = cfg.extra.get("values", [fam.params.get(param, 0.0)] if param else [None])
    rows = []
    for v in values:
        f = fam.with_params(**{param: v}) if param else fam
        sched = run_hard_decoder(code, family_noise(f, code.n), _DECODER_MODE[cfg.decoder],
                                 _levels_for(cfg, code), cfg.xi)
        for t, g in enumerate(sched.channels, start=1):
            rows.append(["" if v is None else v, t, infidelity(g), float(np.trace(g)), *g.ravel()])
    header = ["param_value", "level", "infidelity", "trace"] + [f"g{i}{j}" for i in range(4) for j in range(4)]
    return {"channel.csv": _csv(header, rows)}


def _sweep_point(args):
    code_name, fam, decoder, levels, xi = args
    code = builtin_code(code_name) if isinstance(code_name, str) else code_name
    sched = run_hard_decoder(code, family_noise(fam, code.n), _DECODER_MODE[decoder], levels, xi)
    return [lv.infidelity for lv in sched.levels]


def run_sweep(cfg: ExperimentConfig) -> dict[str, str]:
    """Infidelity per level over ``param`` / ``values`` for symmetric and configured decoders.

    Columns: ``value, level, infidelity_symmetric, infidelity_<decoder>``.
    """
    code = cfg.build_code()
    fam = cfg.family()
    param, values = _require(cfg, "param"), _require(cfg, "values")
    levels = _levels_for(cfg, code)
    code_ref = cfg.code if isinstance(cfg.code, str) else code
    decoders = ["symmetric"] if cfg.decoder == "symmetric" else ["symmetric", cfg.decoder]
    jobs = [(code_ref, fam.with_params(**{param: v}), d, levels, cfg.xi) for v in values for d in decoders]
    res = _pool_map(_sweep_point, jobs, cfg.workers)
    rows = []
    for i, v in enumerate(values):
        per = res[i * len(decoders):(i + 1) * len(decoders)]
        for t in range(levels):
            rows.append([v, t + 1, *(r[t] if t < len(r) else float("nan") for r in per)])
    header = ["value", "level"] + [f"infidelity_{d}" for d in decoders]
    return {"sweep.csv": _csv(header, rows)}


def _query(cfg: ExperimentConfig, code: StabilizerCode, fam: NoiseFamily) -> ThresholdQuery:
    param = cfg.extra.get("param", "theta" if fam.kind == "coherent" else "p")
    upper = cfg.extra.get("upper", float(np.pi / 4) if param == "theta" else 1.0)
    return ThresholdQuery(code, fam, param, cfg.decoder, cfg.xi, cfg.max_levels, cfg.ties,
                          upper=upper, scan_step=cfg.extra.get("scan_step", 0.05),
                          granularity=cfg.extra.get("granularity", 1e-4))


def _threshold_point(args):
    cfg, point = args
    code = cfg.build_code()
    fam = cfg.family().with_params(**point)
    try:
        res = threshold(_query(cfg, code, fam))
    except Exception as exc:  # recorded per point
        return point, float("nan"), f"error: {exc}", []
    return point, res.threshold, res.status, res.probes


def _run_mesh(cfg: ExperimentConfig, mesh: dict) -> tuple[list, list]:
    points = _mesh_points(mesh) if mesh else [{}]
    results = _pool_map(_threshold_point, [(cfg, p) for p in points], cfg.workers)
    keys = sorted(mesh)
    summary, probes = [], []
    for point, th, status, prs in results:
        coords = [point[k] for k in keys]
        summary.append([*coords, th, status])
        for pr in prs:
            probes.append([*coords, pr.value, pr.correctable, pr.levels, pr.level1_infidelity, pr.final_infidelity])
    return summary, probes


def run_threshold(cfg: ExperimentConfig) -> dict[str, str]:
    """Threshold of ``param`` (optionally over a ``mesh`` of co-parameters).

    Writes ``probes.csv`` (one row per probe) and ``threshold.csv`` (one row per
    mesh point, threshold last-but-one).
    """
    mesh = cfg.extra.get("mesh", {})
    summary, probes = _run_mesh(cfg, mesh)
    keys = sorted(mesh)
    probe_header = [*keys, "value", "correctable", "levels", "level1_infidelity", "final_infidelity"]
    return {
        "threshold.csv": _csv([*keys, "threshold", "status"], summary),
        "probes.csv": _csv(probe_header, probes),
    }


def run_contour(cfg: ExperimentConfig) -> dict[str, str]:
    """Threshold hypersurface over ``mesh`` (e.g. ``{"gamma": [...], "phi": [...]}``)."""
    mesh = _require(cfg, "mesh")
    summary, _ = _run_mesh(cfg, mesh)
    return {"contour.csv": _csv([*sorted(mesh), "threshold", "status"], summary)}


def _twirl_point(args):
    cfg, phi = args
    code = cfg.build_code()
    gamma = cfg.extra.get("gamma", float(np.pi / 4))
    out = [phi]
    for tw, dec in ((False, "optimized-all"), (True, "optimized-all"), (False, "optimized-pauli"),
                    (True, "optimized-pauli")):
        fam = NoiseFamily("coherent", {"theta": 0.0, "phi": phi, "gamma": gamma}, twirl=tw)
        q = replace(_query(cfg, code, fam), decoder=dec)
        out.append(threshold(q).threshold)
    return out


def run_twirl(cfg: ExperimentConfig) -> dict[str, str]:
    """Rotation thresholds over ``phis`` for the axis ``(sin phi cos gamma, sin phi sin gamma, cos phi)``.

    Columns: ``phi, bare, twirled, bare_pauli, twirled_pauli``.
    """
    phis = _require(cfg, "phis")
    rows = _pool_map(_twirl_point, [(cfg, p) for p in phis], cfg.workers)
    return {"twirl.csv": _csv(["phi", "bare", "twirled", "bare_pauli", "twirled_pauli"], rows)}


@dataclass(frozen=True)
class PerturbationStudy:
    """Robustness of optimized schedules to random unitary admixtures.

    ``base`` is ``coherent-random-axis`` (rotation by the grid value about a
    random axis per sample) or a NoiseFamily kind with the grid value bound to
    ``param``.
    """

    code: str
    base: str
    param: str
    grid: tuple[float, ...]
    f_function: str
    count: int = 100
    seed: int = 0
    fixed: dict = field(default_factory=dict)
    levels: int = 1

    def __post_init__(self) -> None:
        if self.f_function not in F_FUNCTIONS:
            raise ConfigError("f_function", f"choose from {', '.join(F_FUNCTIONS)}")
        f = F_FUNCTIONS[self.f_function]
        if any(not 0.0 <= f(v) <= 1.0 for v in self.grid):
            raise ConfigError("grid", "f(p) leaves [0, 1]")


def sample_unitary(seed: int, index: int) -> np.ndarray:
    """Haar unitary from a stream keyed by ``(seed, index)``."""
    return haar_random_unitary(np.random.SeedSequence([seed, index, 0]))


def sample_axis(seed: int, index: int) -> np.ndarray:
    v = np.random.default_rng(np.random.SeedSequence([seed, index, 1])).normal(size=3)
    return v / np.linalg.norm(v)


def _base_noise(study: PerturbationStudy, value: float, index: int) -> np.ndarray:
    if study.base == "coherent-random-axis":
        return rotation_process(value, sample_axis(study.seed, index))
    return NoiseFamily(study.base, {**study.fixed, study.param: value}).process_matrix()


PERTURB_COLUMNS = ("value", "weight", "G_base", "G_perturbed_opt", "G_sym_perturbed", "G_tilde")


def _perturb_point(args) -> list[float]:
    study, value = args
    code = builtin_code(study.code)
    weight = F_FUNCTIONS[study.f_function](value)
    levels = study.levels if code.concatenable else 1
    acc = np.zeros(4)
    base_shared = study.base != "coherent-random-axis"
    sched_shared = None
    for i in range(study.count):
        base = _base_noise(study, value, i)
        if base_shared and sched_shared is not None:
            sched = sched_shared
        else:
            sched = run_hard_decoder(code, base, "all-transversal", levels)
            sched_shared = sched
        pert = perturb(base, sample_unitary(study.seed, i), weight)
        re_opt = run_hard_decoder(code, pert, "all-transversal", levels)
        sym = run_hard_decoder(code, pert, "symmetric", levels)
        tilde = apply_schedule(code, pert, sched, levels)
        acc += [sched.levels[-1].infidelity, re_opt.levels[-1].infidelity, sym.levels[-1].infidelity,
                infidelity(tilde[-1])]
    return [value, weight, *(acc / study.count)]


def perturbation_experiment(study: PerturbationStudy, workers: int = 1) -> list[list[float]]:
    """Mean infidelities per grid point, columns as in :data:`PERTURB_COLUMNS`."""
    return _pool_map(_perturb_point, [(study, v) for v in study.grid], workers)


def run_perturbation(cfg: ExperimentConfig) -> dict[str, str]:
    """Keys: ``base``, ``param``, ``grid``, ``f_function``, ``count``, ``fixed``."""
    study = PerturbationStudy(
        code=cfg.code if isinstance(cfg.code, str) else cfg.code["name"],
        base=cfg.extra.get("base", cfg.noise["kind"]),
        param=_require(cfg, "param"),
        grid=tuple(_require(cfg, "grid")),
        f_function=_require(cfg, "f_function"),
        count=int(cfg.extra.get("count", 100)),
        seed=int(cfg.seed),  # validated non-None
        fixed=dict(cfg.extra.get("fixed", cfg.noise.get("params", {}))),
        levels=cfg.levels,
    )
    rows = perturbation_experiment(study, cfg.workers)
    return {"perturbation.csv": _csv(PERTURB_COLUMNS, rows)}


def _require(cfg: ExperimentConfig, key: str):
    if key not in cfg.extra:
        raise ConfigError(key, f"required for kind {cfg.kind!r}")
    return cfg.extra[key]


RUNNERS = {
    "channel": run_channel,
    "infidelity-sweep": run_sweep,
    "threshold": run_threshold,
    "contour": run_contour,
    "twirl-compare": run_twirl,
    "perturbation": run_perturbation,
}


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> list[Path]:
    """Run ``cfg`` and write its CSV files plus ``manifest.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files = RUNNERS[cfg.kind](cfg)
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    manifest = {
        "config": cfg.to_dict(),
        "tool": "hardecode",
        "version": __version__,
        "outputs": sorted(files),
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return written + [mpath]
