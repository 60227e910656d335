"""Logical process matrices from per-qubit process matrices.

Everything here is driven by two coefficient tables built from the signed
stabilizer group:

* ``alpha[t, k]`` -- coefficient of the Pauli string ``S_k t_L`` in the
  encoded operator ``E_t``;
* ``beta_l[s, k] = alpha[s, k] * eta(R_l, S_k) * eta(R_l, s_L)`` -- the same
  for ``R_l^dag E_s R_l``.

A conditional logical channel is then

    G_st(l) = 1/2 * sum_{k', k} beta_l[s, k'] alpha[t, k] prod_i N_i[nu_i, mu_i]

with ``nu = S_k' s_L`` and ``mu = S_k t_L``.  The factor 1/2 converts the
unnormalized logical Paulis used by ``alpha`` into the normalized basis of the
process matrix.  Because ``alpha`` does not depend on the syndrome, the inner
sum over ``k`` is done once per noise model (:func:`noise_weights`) and every
syndrome costs one small matrix product.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .channels import IDENTITY, PAULI_PROCESS
from .codes import StabilizerCode, SyndromeTable
from .pauli import PauliOp, commutes, product_sign_f, zx_form

LABELS = ("I", "X", "Y", "Z")

# A noise specification is either one 4x4 matrix (same on every qubit), a
# list of n matrices, or a mixture: list of (weight, list-of-n-matrices).
ProductNoise = Sequence[np.ndarray]
Mixture = Sequence[tuple[float, ProductNoise]]
NoiseSpec = Union[np.ndarray, ProductNoise, Mixture]


class AlgebraError(RuntimeError):
    """Two independent coefficient formulas disagree (indicates a bug)."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class AlphaTable:
    """``values[t, k]`` for logical label ``t`` (I, X, Y, Z) and stabilizer ``k``."""

    code: StabilizerCode
    values: np.ndarray          # (4, K) real
    indices: np.ndarray         # (4, K, n) basis index (0..3) of phi(S_k t_L)
    strings: tuple[tuple[PauliOp, ...], ...]   # signed S_k t_L

    @property
    def scale(self) -> float:
        return 1.0 / 2 ** (self.code.n / 2 - 1)


def alpha_sign_closed_form(code: StabilizerCode, mask: int, label: str) -> int:
    """Sign of ``S_mask t_L`` from bit-vector formulas alone.

    ``S = i^{sum k_j} (-1)^f Z(a)X(b)`` with the reordering exponent ``f``;
    multiplying by ``t_L = i^{k_t} Z(t_z)X(t_x)`` adds ``(-1)^{b.t_z}`` and
    converting ``Z(a)X(b)`` to Hermitian factors costs ``i^{a.b}`` with a plain
    (not mod 2) dot product.
    """
    gens = code.generators
    k_sum = 0
    a = b = 0
    for j, g in enumerate(gens):
        if (mask >> j) & 1:
            k, gz, gx = zx_form(g)
            k_sum += k
            a ^= gz
            b ^= gx
    f = product_sign_f(gens, mask)
    kt, tz, tx = zx_form(code.logical(label))
    exponent_i = k_sum + kt + _popcount((a ^ tz) & (b ^ tx))
    exponent_i += 2 * (f + _popcount(b & tz))
    exponent_i %= 4
    if exponent_i % 2:
        raise AlgebraError(f"S t_L is not Hermitian for mask {mask}, label {label}")
    return 1 if exponent_i == 0 else -1


@lru_cache(maxsize=None)
def build_alpha(code: StabilizerCode) -> AlphaTable:
    """Alpha coefficients, checked against the closed-form sign."""
    stab = code.stabilizers
    n = code.n
    k_count = len(stab)
    values = np.empty((4, k_count))
    indices = np.empty((4, k_count, n), dtype=np.intp)
    strings = []
    scale = 1.0 / 2 ** (n / 2 - 1)
    for t, label in enumerate(LABELS):
        row = []
        lt = code.logical(label)
        for k, el in enumerate(stab):
            prod = el.element * lt
            sgn = prod.sign
            if sgn != alpha_sign_closed_form(code, el.generator_mask, label):
                raise AlgebraError(f"alpha sign mismatch for {prod} ({label})")
            values[t, k] = sgn * scale
            indices[t, k] = prod.basis_indices()
            row.append(prod)
        strings.append(tuple(row))
    values.setflags(write=False)
    indices.setflags(write=False)
    return AlphaTable(code, values, indices, tuple(strings))


@dataclass(frozen=True)
class BetaTable:
    """Beta coefficients for one syndrome: ``values[s, k]``."""

    syndrome: int
    recovery: PauliOp
    values: np.ndarray


def _eta_tables(code: StabilizerCode, recoveries: Sequence[PauliOp]) -> tuple[np.ndarray, np.ndarray]:
    """``eta_s[l, k] = eta(R_l, S_k)`` and ``eta_l[l, s] = eta(R_l, s_L)``."""
    stab = code.stabilizers
    eta_s = np.array([[commutes(r, el.element) for el in stab] for r in recoveries], dtype=float)
    eta_l = np.array([[commutes(r, code.logical(lab)) for lab in LABELS] for r in recoveries], dtype=float)
    return eta_s, eta_l


def beta_closed_form(code: StabilizerCode, alpha: AlphaTable, recovery: PauliOp) -> np.ndarray:
    """``alpha * (-1)^{a_l.(b + t_x) + b_l.(a + t_z)}`` with (a, b) the bits of ``S_k t_L``."""
    out = np.empty_like(alpha.values)
    for s in range(4):
        for k, prod in enumerate(alpha.strings[s]):
            e = _popcount(recovery.z & prod.x) + _popcount(recovery.x & prod.z)
            out[s, k] = alpha.values[s, k] * (-1) ** e
    return out


def build_beta(code: StabilizerCode, table: SyndromeTable | Sequence[PauliOp]) -> list[BetaTable]:
    """Beta tables for every syndrome, cross-checked between both sign formulas.

    Raises:
        AlgebraError: if the commutation-product and bit-vector forms disagree.
    """
    recoveries = list(table.recoveries if isinstance(table, SyndromeTable) else table)
    alpha = build_alpha(code)
    eta_s, eta_l = _eta_tables(code, recoveries)
    out = []
    for l, r in enumerate(recoveries):
        by_eta = alpha.values * eta_s[l][None, :] * eta_l[l][:, None]
        closed = beta_closed_form(code, alpha, r)
        if not np.array_equal(np.sign(by_eta), np.sign(closed)):
            raise AlgebraError(f"beta forms disagree for syndrome {l} with recovery {r}")
        out.append(BetaTable(l, r, by_eta))
    return out


# -- noise handling ------------------------------------------------------------
def as_mixture(noise: NoiseSpec, n: int) -> list[tuple[float, list[np.ndarray]]]:
    """Normalize a noise specification into a weighted list of product channels."""
    if isinstance(noise, np.ndarray) and noise.shape == (4, 4):
        return [(1.0, [noise] * n)]
    items = list(noise)  # type: ignore[arg-type]
    if items and isinstance(items[0], tuple):
        out = []
        for w, term in items:  # type: ignore[misc]
            term = list(term)
            if len(term) != n:
                raise ValueError(f"product noise has {len(term)} factors, code has {n} qubits")
            out.append((float(w), [np.asarray(m, dtype=float) for m in term]))
        return out
    if len(items) != n:
        raise ValueError(f"per-qubit noise has {len(items)} entries, code has {n} qubits")
    return [(1.0, [np.asarray(m, dtype=float) for m in items])]


def correlated_noise_terms(n: int, local: np.ndarray, q: float) -> list[tuple[float, list[np.ndarray]]]:
    """``(1-q) local^{(x)n} + q/n sum_j Z_j Z_{j+1}`` on a ring of ``n`` qubits."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    terms = [(1.0 - q, [local] * n)]
    if q > 0:
        for j in range(n):
            slots = [IDENTITY] * n
            slots[j] = PAULI_PROCESS["Z"]
            slots[(j + 1) % n] = PAULI_PROCESS["Z"]
            terms.append((q / n, slots))
    return terms


def noise_weights(code: StabilizerCode, noise: NoiseSpec) -> np.ndarray:
    """``W[s, k', t] = alpha[s, k'] sum_k alpha[t, k] prod_i N_i[nu_i, mu_i]``.

    Syndrome independent; shape (4, K, 4).
    """
    alpha = build_alpha(code)
    n = code.n
    k_count = alpha.values.shape[1]
    flat_idx = alpha.indices.reshape(4 * k_count, n)
    total = np.zeros((4, k_count, 4))
    for w, factors in as_mixture(noise, n):
        if w == 0.0:
            continue
        prod = np.ones((4 * k_count, 4 * k_count))
        for i, m in enumerate(factors):
            prod *= m[np.ix_(flat_idx[:, i], flat_idx[:, i])]
        prod = prod.reshape(4, k_count, 4, k_count)
        inner = np.einsum("akbc,bc->akb", prod, alpha.values)
        total += w * inner
    return total * alpha.values[:, :, None]


# -- conditional and effective channels -----------------------------------------
@dataclass(frozen=True)
class ConditionalChannel:
    """Unnormalized logical process matrix for one syndrome."""

    syndrome: int
    matrix: np.ndarray
    recovery_used: PauliOp

    @property
    def probability(self) -> float:
        return float(self.matrix[0, 0])


def conditional_matrices(code: StabilizerCode, table: SyndromeTable | Sequence[PauliOp],
                         noise: NoiseSpec) -> np.ndarray:
    """All unnormalized conditional channels, shape ``(num_syndromes, 4, 4)``."""
    recoveries = list(table.recoveries if isinstance(table, SyndromeTable) else table)
    eta_s, eta_l = _eta_tables_cached(code, tuple(recoveries))
    w = noise_weights(code, noise)
    g = np.einsum("lk,ska->lsa", eta_s, w)
    return 0.5 * g * eta_l[:, :, None]


@lru_cache(maxsize=64)
def _eta_tables_cached(code: StabilizerCode, recoveries: tuple[PauliOp, ...]) -> tuple[np.ndarray, np.ndarray]:
    return _eta_tables(code, recoveries)


def conditional_channel(code: StabilizerCode, noise: NoiseSpec, recovery: PauliOp) -> ConditionalChannel:
    """Conditional channel for the syndrome of ``recovery`` when ``recovery`` is applied."""
    mats = conditional_matrices(code, [recovery], noise)
    return ConditionalChannel(code.syndrome(recovery), mats[0], recovery)


def conditional_channels(code: StabilizerCode, table: SyndromeTable, noise: NoiseSpec) -> list[ConditionalChannel]:
    mats = conditional_matrices(code, table, noise)
    return [ConditionalChannel(s, mats[s], table[s]) for s in range(len(table))]


def effective_channel(code: StabilizerCode, noise: NoiseSpec, table: SyndromeTable,
                      corrections: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """Syndrome-averaged logical channel.

    ``corrections`` optionally gives one logical process matrix per syndrome,
    applied after recovery.
    """
    mats = conditional_matrices(code, table, noise)
    if corrections is None:
        return mats.sum(axis=0)
    return np.einsum("lab,lbc->ac", np.asarray(corrections), mats)


def correlated_effective_channel(code: StabilizerCode, local_noise: np.ndarray, q: float,
                                 table: SyndromeTable) -> np.ndarray:
    """Effective channel for local noise mixed with ring-correlated ZZ flips."""
    return effective_channel(code, correlated_noise_terms(code.n, local_noise, q), table)


def concatenate(code: StabilizerCode, noise: NoiseSpec, table: SyndromeTable, levels: int,
                corrections: Sequence[Sequence[np.ndarray] | None] | None = None,
                tp_input: bool = True) -> list[np.ndarray]:
    """Channels after 1..levels of concatenation with a fixed decoder.

    Level-1 noise may be correlated; higher levels see independent blocks
    each carrying the previous level's channel.  ``corrections[t]`` (if given)
    lists the per-syndrome logical gates used at level ``t + 1``.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels > 1 and not code.concatenable:
        raise ValueError(f"{code.name} is only used at the first level")
    out = []
    current: NoiseSpec = noise
    for t in range(levels):
        corr = None if corrections is None or t >= len(corrections) else corrections[t]
        g = effective_channel(code, current, table, corr)
        if t > 0 or tp_input:
            # exact for TP input; stops rounding drift compounding across levels
            g[0] = (1.0, 0.0, 0.0, 0.0)
        out.append(g)
        current = g
    return out
