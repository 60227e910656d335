"""Brute-force density-matrix reference for logical channels.

Codewords are built explicitly, noise is applied through Kraus operators on
the full ``2**n``-dimensional operator space, the syndrome projector is applied
as a measurement (Lueders rule), then recovery and decoding.  Nothing here
uses the alpha/beta coefficient tables, so it serves as an independent check of
:mod:`hardecode.logical`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import BASIS, KrausChannel, Z2
from .codes import StabilizerCode, SyndromeTable
from .pauli import PauliOp

MAX_QUBITS = 9
_BASIS_ARR = np.stack(BASIS)


@dataclass(frozen=True)
class DenseCode:
    code: StabilizerCode
    codewords: np.ndarray        # (2**n, 2): columns |0_L>, |1_L>
    generator_mats: tuple[np.ndarray, ...]

    @property
    def encoder(self) -> np.ndarray:
        """Isometry ``B = |0_L><0| + |1_L><1|``."""
        return self.codewords

    def projector(self, syndrome: int) -> np.ndarray:
        """``prod_j (I + (-1)^{l_j} g_j) / 2``."""
        m = len(self.generator_mats)
        dim = self.codewords.shape[0]
        proj = np.eye(dim, dtype=complex)
        for j, g in enumerate(self.generator_mats):
            bit = (syndrome >> (m - 1 - j)) & 1
            proj = proj @ ((np.eye(dim) + (-1) ** bit * g) / 2)
        return proj

    def project_vectors(self, syndrome: int, vecs: np.ndarray) -> np.ndarray:
        """Apply the syndrome projector to the columns of ``vecs``."""
        m = len(self.code.generators)
        out = vecs
        for j, g in enumerate(self.code.generators):
            bit = (syndrome >> (m - 1 - j)) & 1
            out = (out + (-1) ** bit * pauli_action(g, out)) / 2
        return out


def pauli_action(p: PauliOp, vecs: np.ndarray) -> np.ndarray:
    """``P @ vecs`` without building the matrix (bit j of a basis index is qubit n-1-j)."""
    idx = np.arange(1 << p.n)
    parity = np.bitwise_count(idx & p.z).astype(np.int64) & 1
    signs = 1 - 2 * parity
    phase = 1j ** ((p.phase - bin(p.z & p.x).count("1")) % 4)
    flipped = vecs[idx ^ p.x]
    return phase * (signs.reshape((-1,) + (1,) * (vecs.ndim - 1)) * flipped)


def build_dense_code(code: StabilizerCode) -> DenseCode:
    """Explicit codewords: ``|0_L>`` from the code projector times a Z_L eigenvector."""
    n = code.n
    if n > MAX_QUBITS:
        raise MemoryError(f"dense oracle limited to {MAX_QUBITS} qubits")
    dim = 1 << n
    gens = tuple(g.to_matrix() for g in code.generators)
    p0 = np.eye(dim, dtype=complex)
    for g in gens:
        p0 = p0 @ (np.eye(dim) + g) / 2
    rank = int(round(np.trace(p0).real))
    if rank != 2:
        raise ValueError(f"code space has dimension {rank}, expected 2")
    zl = code.logical_z.to_matrix()
    xl = code.logical_x.to_matrix()
    # columns of the +1 projector of Z_L inside the code space; pick the largest
    p_zero = p0 @ (np.eye(dim) + zl) / 2
    col = int(np.argmax(np.linalg.norm(p_zero, axis=0)))
    v0 = p_zero[:, col]
    v0 = v0 / np.linalg.norm(v0)
    pivot = int(np.argmax(np.abs(v0)))
    v0 = v0 * (abs(v0[pivot]) / v0[pivot])
    v1 = xl @ v0
    return DenseCode(code, np.stack([v0, v1], axis=1), gens)


def _apply_local(rho: np.ndarray, kraus: Sequence[np.ndarray], qubit: int, n: int) -> np.ndarray:
    """Apply a single-qubit channel to ``qubit`` of an n-qubit operator."""
    sup = sum(np.einsum("ac,bd->abcd", a, a.conj()) for a in kraus)
    t = rho.reshape((2,) * (2 * n))
    out = np.tensordot(sup, t, axes=([2, 3], [qubit, n + qubit]))
    out = np.moveaxis(out, (0, 1), (qubit, n + qubit))
    return np.ascontiguousarray(out).reshape(rho.shape)


def apply_product_noise(rho: np.ndarray, channels: Sequence[KrausChannel]) -> np.ndarray:
    n = len(channels)
    out = rho
    for q, ch in enumerate(channels):
        out = _apply_local(out, ch.kraus_ops, q, n)
    return out


def apply_correlated_noise(rho: np.ndarray, local: KrausChannel, q: float, n: int) -> np.ndarray:
    """``(1-q) local^{(x)n} + q/n sum_j Z_j Z_{j+1}`` on a ring."""
    out = (1 - q) * apply_product_noise(rho, [local] * n)
    if q > 0:
        for j in range(n):
            k = (j + 1) % n
            pair = _apply_local(_apply_local(rho, [Z2], j, n), [Z2], k, n)
            out = out + (q / n) * pair
    return out


def _noise_fn(noise, n):
    if callable(noise):
        return noise
    if isinstance(noise, KrausChannel):
        return lambda rho: apply_product_noise(rho, [noise] * n)
    chans = list(noise)
    return lambda rho: apply_product_noise(rho, chans)


def oracle_conditionals(dense: DenseCode, noise, table: SyndromeTable | Sequence[PauliOp]) -> np.ndarray:
    """Unnormalized conditional process matrices for every entry of ``table``.

    ``noise`` is a KrausChannel (same on each qubit), a list of n
    KrausChannels, or a callable acting on ``2**n x 2**n`` operators.
    """
    recoveries = list(table.recoveries if isinstance(table, SyndromeTable) else table)
    n = dense.code.n
    apply = _noise_fn(noise, n)
    b = dense.encoder
    noisy = [apply(b @ t @ b.conj().T) for t in BASIS]
    out = np.empty((len(recoveries), 4, 4))
    for idx, r in enumerate(recoveries):
        s = dense.code.syndrome(r)
        r_dag = PauliOp(r.n, r.z, r.x, -r.phase)
        # K = P_l R^dag B, so E^dag(R P_l rho P_l R^dag) = K^dag rho K
        k = dense.project_vectors(s, pauli_action(r_dag, b))
        states = np.stack([k.conj().T @ rho @ k for rho in noisy])
        out[idx] = np.einsum("iab,jba->ij", _BASIS_ARR, states).real
    if dense.code.frame_sign < 0:
        # the encoder realizes Y_L = i X_L Z_L; mirror into the code's logical frame
        out[:, 2, :] *= -1
        out[:, :, 2] *= -1
    return out


def oracle_conditional(dense: DenseCode, noise, recovery: PauliOp) -> np.ndarray:
    return oracle_conditionals(dense, noise, [recovery])[0]


def oracle_effective(dense: DenseCode, noise, table: SyndromeTable) -> np.ndarray:
    return oracle_conditionals(dense, noise, table).sum(axis=0)
