"""Self-checks: engine vs dense oracle, beta sign forms, Steane closed forms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import (
    NoiseFamily,
    amplitude_phase_damping,
    amplitude_phase_damping_kraus,
    coherent_rotation,
    depolarizing,
    depolarizing_kraus,
    kraus_to_process,
    random_kraus_channel,
    rotation_axis,
    rotation_process,
    rotation_unitary,
    KrausChannel,
)
from .codes import BUILTIN_CODES, StabilizerCode, builtin_code, symmetric_decoder
from .decoder import group_conditionals
from .logical import (
    AlgebraError,
    beta_closed_form,
    build_alpha,
    build_beta,
    conditional_matrices,
    correlated_noise_terms,
)
from .oracle import MAX_QUBITS, apply_correlated_noise, build_dense_code, oracle_conditionals
from .pauli import PauliOp

ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def named_noise_models(n: int) -> list[tuple[str, np.ndarray | list, object]]:
    """(label, engine noise, oracle noise) for each named family at a generic point."""
    apd = amplitude_phase_damping_kraus(0.17, 0.1)
    axis = rotation_axis(0.7, 0.4)
    rot = KrausChannel((rotation_unitary(0.3, axis),))
    dep = depolarizing_kraus(0.05)
    local = depolarizing(0.05)
    return [
        ("amplitude-phase-damping", amplitude_phase_damping(0.17, 0.1), apd),
        ("coherent", coherent_rotation(0.3, 0.7, 0.4), rot),
        ("depolarizing", local, dep),
        ("correlated-dephasing-mix", correlated_noise_terms(n, local, 0.2),
         lambda rho: apply_correlated_noise(rho, dep, 0.2, n)),
    ]


def random_noise_models(n: int, count: int, seed: int) -> list[tuple[str, list, list]]:
    """Independent random CPTP channel on each qubit."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        chans = [random_kraus_channel(rng) for _ in range(n)]
        out.append((f"random-{i}", [kraus_to_process(c) for c in chans], chans))
    return out


def oracle_difference(code: StabilizerCode, engine_noise, oracle_noise, dense=None) -> float:
    """Largest entrywise gap between engine and oracle conditionals (and their sum)."""
    dense = dense or build_dense_code(code)
    table = symmetric_decoder(code)
    eng = conditional_matrices(code, table, engine_noise)
    ora = oracle_conditionals(dense, oracle_noise, table)
    return float(max(np.max(np.abs(eng - ora)), np.max(np.abs(eng.sum(0) - ora.sum(0)))))


def check_oracle(codes: Iterable[str], random_count: int = 10, seed: int = 2024) -> list[CheckResult]:
    out = []
    for name in codes:
        code = builtin_code(name)
        if code.n > MAX_QUBITS:
            continue
        dense = build_dense_code(code)
        models = named_noise_models(code.n) + random_noise_models(code.n, random_count, seed)
        worst = max(oracle_difference(code, e, o, dense) for _, e, o in models)
        out.append(CheckResult(f"oracle[{name}]", worst <= ORACLE_TOL, f"max diff {worst:.2e}"))
    return out


def check_beta(codes: Iterable[str], corrupt: bool = False) -> list[CheckResult]:
    """Both beta sign forms agree for every syndrome of the symmetric table.

    ``corrupt`` flips one Z bit of the recovery fed to the closed form, as a
    negative control that must be reported as a failure.
    """
    out = []
    for name in codes:
        code = builtin_code(name)
        table = symmetric_decoder(code)
        try:
            if corrupt:
                alpha = build_alpha(code)
                r = table[1]
                bad = PauliOp(r.n, r.z ^ 1, r.x, r.phase)
                good = build_beta(code, table)[1].values
                if not np.array_equal(np.sign(good), np.sign(beta_closed_form(code, alpha, bad))):
                    raise AlgebraError("corrupted recovery changes beta signs")
            else:
                build_beta(code, table)
            out.append(CheckResult(f"beta[{name}]", True))
        except AlgebraError as exc:
            out.append(CheckResult(f"beta[{name}]", False, str(exc)))
    return out


def steane_phi(theta: float) -> float:
    c4, c8 = np.cos(4 * theta), np.cos(8 * theta)
    return float(np.arctan((3 * c4 + c8 + 10) * np.tan(2 * theta) ** 3 / (-3 * c4 + c8 + 10)))


def steane_closed_forms(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed forms for the trivial-syndrome channel and the summed X-syndrome channels."""
    x = (1.0, 0.0, 0.0)
    rz1 = (7 * np.cos(8 * theta) + 25) / 32 * rotation_process(steane_phi(theta) / 2, x)
    rz2 = 7 * np.sin(4 * theta) ** 2 / 16 * rotation_process(-3 * theta, x)
    return rz1, rz2


def steane_x_rotation_groups(theta: float):
    code = builtin_code("steane")
    noise = rotation_process(theta, (1.0, 0.0, 0.0))
    return group_conditionals(conditional_matrices(code, symmetric_decoder(code), noise))


def steane_closed_form_residual(theta: float) -> tuple[float, float]:
    """Max entrywise residuals against the two closed forms."""
    groups = steane_x_rotation_groups(theta)
    live = [g for g in groups if g.representative[0, 0] > 1e-14]
    rz1, rz2 = steane_closed_forms(theta)
    trivial = groups[0].total
    others = sum((g.total for g in live if 0 not in g.member_syndromes), np.zeros((4, 4)))
    return float(np.max(np.abs(trivial - rz1))), float(np.max(np.abs(others - rz2)))


def check_closed_forms(thetas: Sequence[float] = (0.05, 0.1, np.pi / 12)) -> list[CheckResult]:
    out = []
    for th in thetas:
        r1, r2 = steane_closed_form_residual(th)
        ok = max(r1, r2) <= ORACLE_TOL
        out.append(CheckResult(f"steane-closed-form[theta={th:.4f}]", ok, f"residuals {r1:.1e}, {r2:.1e}"))
    return out


def run_all(codes: Sequence[str] | None = None, corrupt: bool = False, random_count: int = 10) -> list[CheckResult]:
    codes = list(codes or BUILTIN_CODES)
    return check_beta(codes, corrupt) + check_oracle(codes, random_count) + check_closed_forms()
