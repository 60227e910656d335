"""Single-qubit channels as real 4x4 process matrices.

Rows and columns are indexed by the normalized Pauli basis (I, X, Y, Z)/sqrt(2);
entry ``(s, t)`` is ``Tr[s N(t)]``.  Every constructor returns a plain
``numpy.ndarray`` of shape (4, 4) and dtype float64.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X2, Y2, Z2)
BASIS = tuple(p / np.sqrt(2) for p in PAULIS)

TP_TOL = 1e-12
IMAG_TOL = 1e-12

IDENTITY = np.eye(4)
# conjugation by a Pauli flips the sign of the two anticommuting axes
PAULI_PROCESS = {
    "I": np.diag([1.0, 1.0, 1.0, 1.0]),
    "X": np.diag([1.0, 1.0, -1.0, -1.0]),
    "Y": np.diag([1.0, -1.0, 1.0, -1.0]),
    "Z": np.diag([1.0, -1.0, -1.0, 1.0]),
}


class ChannelError(ValueError):
    """Invalid channel input (non-TP Kraus set, parameter out of range)."""


def _check_unit(name: str, value: float, hi: float = 1.0) -> None:
    if not (0.0 <= value <= hi):
        raise ChannelError(f"{name}={value} outside [0, {hi}]")


@dataclass(frozen=True)
class KrausChannel:
    """A single-qubit channel given by Kraus operators."""

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(a, dtype=complex) for a in self.kraus_ops)
        if not ops or any(a.shape != (2, 2) for a in ops):
            raise ChannelError("Kraus operators must be a non-empty list of 2x2 matrices")
        object.__setattr__(self, "kraus_ops", ops)

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        total = sum(a.conj().T @ a for a in self.kraus_ops)
        return bool(np.max(np.abs(total - I2)) < tol)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(a @ rho @ a.conj().T for a in self.kraus_ops)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Kraus set of ``other`` applied after ``self``."""
        return KrausChannel(tuple(b @ a for b in other.kraus_ops for a in self.kraus_ops))


def kraus_to_process(channel: KrausChannel | Sequence[np.ndarray], check_tp: bool = True) -> np.ndarray:
    """Process matrix ``Tr[s N(t)]`` of a Kraus channel."""
    if not isinstance(channel, KrausChannel):
        channel = KrausChannel(tuple(channel))
    if check_tp and not channel.is_trace_preserving():
        raise ChannelError("Kraus operators are not trace preserving")
    out = np.empty((4, 4), dtype=complex)
    for j, t in enumerate(BASIS):
        image = channel.apply(t)
        for i, s in enumerate(BASIS):
            out[i, j] = np.trace(s @ image)
    if np.max(np.abs(out.imag)) > IMAG_TOL:
        raise ChannelError("process matrix has an imaginary part; map is not Hermiticity preserving")
    return out.real.copy()


def unitary_to_process(u: np.ndarray) -> np.ndarray:
    return kraus_to_process(KrausChannel((np.asarray(u, dtype=complex),)), check_tp=False)


# -- noise models ----------------------------------------------------------
def amplitude_damping_kraus(p: float) -> KrausChannel:
    _check_unit("p", p)
    return KrausChannel((
        np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
        np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex),
    ))


def phase_damping_kraus(lam: float) -> KrausChannel:
    _check_unit("lambda", lam)
    return KrausChannel((
        np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=complex),
        np.array([[0, 0], [0, np.sqrt(lam)]], dtype=complex),
    ))


def amplitude_phase_damping_kraus(p: float, lam: float) -> KrausChannel:
    """Phase damping applied after amplitude damping."""
    return amplitude_damping_kraus(p).then(phase_damping_kraus(lam))


def amplitude_phase_damping(p: float, lam: float) -> np.ndarray:
    """Amplitude damping with decay probability ``p`` composed with phase damping ``lam``.

    The two processes commute, so the order of composition is immaterial.
    """
    _check_unit("p", p)
    _check_unit("lambda", lam)
    c = np.sqrt((1 - p) * (1 - lam))
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, 0.0, 0.0],
        [0.0, 0.0, c, 0.0],
        [p, 0.0, 0.0, 1 - p],
    ])


def phase_flip_probability(lam: float) -> float:
    """Probability of a Z in the phase-flip form of phase damping."""
    _check_unit("lambda", lam)
    return (1 - np.sqrt(1 - lam)) / 2


def rotation_axis(phi: float, gamma: float) -> np.ndarray:
    return np.array([np.sin(phi) * np.cos(gamma), np.sin(phi) * np.sin(gamma), np.cos(phi)])


def rotation_unitary(theta: float, axis: Sequence[float]) -> np.ndarray:
    """``exp(i theta n.sigma)`` for a unit vector ``axis``."""
    nx, ny, nz = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    gen = nx * X2 + ny * Y2 + nz * Z2
    return np.cos(theta) * I2 + 1j * np.sin(theta) * gen


def coherent_rotation(theta: float, phi: float, gamma: float) -> np.ndarray:
    """Process matrix of ``rho -> e^{i theta n.s} rho e^{-i theta n.s}``.

    The axis is ``(sin phi cos gamma, sin phi sin gamma, cos phi)``.
    """
    return rotation_process(theta, rotation_axis(phi, gamma))


def rotation_process(theta: float, axis: Sequence[float]) -> np.ndarray:
    # Rodrigues formula for the rotation by -2 theta about n (e^{i theta n.s} conjugation)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    ang = -2.0 * theta
    r = np.eye(3) + np.sin(ang) * k + (1 - np.cos(ang)) * (k @ k)
    out = np.eye(4)
    out[1:, 1:] = r
    return out


def depolarizing_kraus(p: float) -> KrausChannel:
    _check_unit("p", p)
    return KrausChannel((np.sqrt(1 - p) * I2, np.sqrt(p / 3) * X2, np.sqrt(p / 3) * Y2, np.sqrt(p / 3) * Z2))


def depolarizing(p: float) -> np.ndarray:
    """``(1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)``; ``p`` in [0, 3/4]."""
    _check_unit("p", p, 0.75)
    c = 1 - 4 * p / 3
    return np.diag([1.0, c, c, c])


def pauli_channel(px: float, py: float, pz: float) -> np.ndarray:
    pi = 1 - px - py - pz
    if min(px, py, pz, pi) < 0:
        raise ChannelError("Pauli probabilities must be non-negative and sum to at most 1")
    return np.diag([1.0, pi + px - py - pz, pi - px + py - pz, pi - px - py + pz])


# -- derived quantities -----------------------------------------------------
def pauli_twirl(m: np.ndarray) -> np.ndarray:
    """Average of the four Pauli-conjugated channels: keeps only the diagonal."""
    return np.diag(np.diag(np.asarray(m, dtype=float)))


def infidelity(m: np.ndarray) -> float:
    """Average gate infidelity to the identity, ``(4 - Tr m) / 6``."""
    return float((4.0 - np.trace(m)) / 6.0)


def perturb(base: np.ndarray, u: np.ndarray, weight: float) -> np.ndarray:
    """Convex mixture ``(1 - weight) base + weight U.U^dag``."""
    _check_unit("weight", weight)
    return (1 - weight) * np.asarray(base, dtype=float) + weight * unitary_to_process(u)


def haar_random_unitary(seed: int | np.random.SeedSequence | np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary from the QR decomposition of a Ginibre matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_kraus_channel(rng: np.random.Generator, rank: int = 4) -> KrausChannel:
    """Random CPTP map from a Haar-ish isometry ``C^2 -> C^2 (x) C^rank``."""
    g = rng.standard_normal((2 * rank, 2)) + 1j * rng.standard_normal((2 * rank, 2))
    v, _ = np.linalg.qr(g)
    return KrausChannel(tuple(v[2 * j:2 * j + 2, :] for j in range(rank)))


def is_trace_preserving(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(np.asarray(m)[0] - np.array([1.0, 0.0, 0.0, 0.0]))) <= tol)


# -- parameterized families --------------------------------------------------
NOISE_KINDS = (
    "amplitude-phase-damping",
    "coherent",
    "depolarizing",
    "correlated-dephasing-mix",
    "perturbed",
    "identity",
)


@dataclass(frozen=True)
class NoiseFamily:
    """A named noise model with its parameters.

    ``params`` uses the keys ``p``, ``lam``, ``theta``, ``phi``, ``gamma``,
    ``q`` as appropriate.  ``perturbation`` (only for kind ``perturbed``)
    holds ``base`` (another NoiseFamily), ``unitary`` (2x2) and ``weight``.
    ``twirl`` replaces the single-qubit channel by its Pauli twirl.
    """

    kind: str
    params: dict = field(default_factory=dict)
    perturbation: dict | None = None
    twirl: bool = False

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ChannelError(f"unknown noise kind {self.kind!r}")
        for key in ("lam", "q"):
            if key in self.params:
                _check_unit(key, float(self.params[key]))
        if self.kind == "amplitude-phase-damping":
            _check_unit("p", float(self.params.get("p", 0.0)))
        if self.kind in ("depolarizing", "correlated-dephasing-mix"):
            _check_unit("p", float(self.params.get("p", 0.0)), 0.75)

    def with_params(self, **updates: float) -> "NoiseFamily":
        return NoiseFamily(self.kind, {**self.params, **updates}, self.perturbation, self.twirl)

    @property
    def is_correlated(self) -> bool:
        return self.kind == "correlated-dephasing-mix" and float(self.params.get("q", 0.0)) > 0

    def process_matrix(self) -> np.ndarray:
        """Single-qubit (local) part of the channel."""
        m = self._local()
        return pauli_twirl(m) if self.twirl else m

    def _local(self) -> np.ndarray:
        p = self.params
        if self.kind == "identity":
            return IDENTITY.copy()
        if self.kind == "amplitude-phase-damping":
            return amplitude_phase_damping(float(p.get("p", 0.0)), float(p.get("lam", 0.0)))
        if self.kind == "coherent":
            return coherent_rotation(float(p.get("theta", 0.0)), float(p.get("phi", 0.0)), float(p.get("gamma", 0.0)))
        if self.kind in ("depolarizing", "correlated-dephasing-mix"):
            return depolarizing(float(p.get("p", 0.0)))
        pert = self.perturbation or {}
        return perturb(pert["base"].process_matrix(), pert["unitary"], float(pert["weight"]))

    def kraus(self) -> KrausChannel:
        """Kraus form of the local channel (used by the dense oracle)."""
        p = self.params
        if self.twirl:
            m = self.process_matrix()
            d = np.diag(m)
            probs = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]) @ d / 4
            return KrausChannel(tuple(np.sqrt(max(w, 0.0)) * P for w, P in zip(probs, PAULIS)))
        if self.kind == "identity":
            return KrausChannel((I2,))
        if self.kind == "amplitude-phase-damping":
            return amplitude_phase_damping_kraus(float(p.get("p", 0.0)), float(p.get("lam", 0.0)))
        if self.kind == "coherent":
            axis = rotation_axis(float(p.get("phi", 0.0)), float(p.get("gamma", 0.0)))
            return KrausChannel((rotation_unitary(float(p.get("theta", 0.0)), axis),))
        if self.kind in ("depolarizing", "correlated-dephasing-mix"):
            return depolarizing_kraus(float(p.get("p", 0.0)))
        pert = self.perturbation or {}
        w = float(pert["weight"])
        base = pert["base"].kraus().kraus_ops
        return KrausChannel(tuple(np.sqrt(1 - w) * a for a in base) + (np.sqrt(w) * np.asarray(pert["unitary"]),))
