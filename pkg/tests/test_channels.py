import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardecode.channels import (
    PAULIS,
    ChannelError,
    KrausChannel,
    NoiseFamily,
    amplitude_damping_kraus,
    amplitude_phase_damping,
    amplitude_phase_damping_kraus,
    coherent_rotation,
    depolarizing,
    depolarizing_kraus,
    haar_random_unitary,
    infidelity,
    is_trace_preserving,
    kraus_to_process,
    pauli_twirl,
    perturb,
    phase_damping_kraus,
    phase_flip_probability,
    random_kraus_channel,
    rotation_axis,
    rotation_process,
    rotation_unitary,
    unitary_to_process,
)

unit = st.floats(0.0, 1.0)
angle = st.floats(-np.pi, np.pi)


def direct_process(kraus):
    """Tr[s N(t)] evaluated entry by entry."""
    basis = [p / np.sqrt(2) for p in PAULIS]
    out = np.empty((4, 4))
    for i, s in enumerate(basis):
        for j, t in enumerate(basis):
            out[i, j] = np.trace(s @ sum(a @ t @ a.conj().T for a in kraus)).real
    return out


def test_identity_channel():
    np.testing.assert_allclose(kraus_to_process([np.eye(2)]), np.eye(4), atol=1e-15)


def test_phase_damping_example():
    np.testing.assert_allclose(kraus_to_process(phase_damping_kraus(0.36)), np.diag([1, 0.8, 0.8, 1]), atol=1e-15)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 1.0])
def test_amplitude_damping_pattern(p):
    m = kraus_to_process(amplitude_damping_kraus(p))
    np.testing.assert_allclose(m[:, 0], [1, 0, 0, p], atol=1e-15)
    np.testing.assert_allclose(np.diag(m), [1, np.sqrt(1 - p), np.sqrt(1 - p), 1 - p], atol=1e-15)


def test_non_tp_kraus_rejected():
    with pytest.raises(ChannelError):
        kraus_to_process([0.5 * np.eye(2)])


@pytest.mark.parametrize("bad", [-0.1, 1.2])
def test_out_of_range_parameters(bad):
    with pytest.raises(ChannelError):
        amplitude_phase_damping(bad, 0.1)
    with pytest.raises(ChannelError):
        amplitude_phase_damping(0.1, bad)


def test_apd_limits():
    np.testing.assert_array_equal(amplitude_phase_damping(0, 0), np.eye(4))
    np.testing.assert_allclose(amplitude_phase_damping(0.3, 0), kraus_to_process(amplitude_damping_kraus(0.3)), atol=1e-15)


@given(unit, unit)
def test_apd_matches_composed_kraus_both_orders(p, lam):
    m = amplitude_phase_damping(p, lam)
    ad, pd = amplitude_damping_kraus(p), phase_damping_kraus(lam)
    np.testing.assert_allclose(m, kraus_to_process(ad.then(pd)), atol=1e-12)
    np.testing.assert_allclose(m, kraus_to_process(pd.then(ad)), atol=1e-12)
    np.testing.assert_allclose(m, direct_process(amplitude_phase_damping_kraus(p, lam).kraus_ops), atol=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.19, 0.5, 1.0])
def test_phase_flip_probability_reproduces_dephasing(lam):
    # phase damping = (1 - q) rho + q Z rho Z with q the flip probability
    q = phase_flip_probability(lam)
    flip = KrausChannel((np.sqrt(1 - q) * PAULIS[0], np.sqrt(q) * PAULIS[3]))
    np.testing.assert_allclose(kraus_to_process(flip), kraus_to_process(phase_damping_kraus(lam)), atol=1e-12)


def test_zero_rotation():
    np.testing.assert_allclose(coherent_rotation(0.0, 0.3, 1.1), np.eye(4), atol=1e-15)


@given(angle)
def test_x_rotation_block_structure(theta):
    m = coherent_rotation(theta, np.pi / 2, 0.0)
    np.testing.assert_allclose(m[:2, :2], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(m[:2, 2:], 0, atol=1e-12)
    # e^{i theta X} turns the Y-Z plane by -2 theta
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    np.testing.assert_allclose(m[2:, 2:], [[c, s], [-s, c]], atol=1e-12)


@given(angle, st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_rotation_matches_unitary_conjugation(theta, phi, gamma):
    u = rotation_unitary(theta, rotation_axis(phi, gamma))
    np.testing.assert_allclose(coherent_rotation(theta, phi, gamma), direct_process([u]), atol=1e-12)


def test_c3_rotation_cycles_paulis():
    m = rotation_process(np.pi / 3, (1, 1, 1))
    # some cyclic permutation of X, Y, Z with positive signs
    block = m[1:, 1:]
    assert np.allclose(np.abs(block).sum(axis=0), 1)
    assert np.allclose(block @ block @ block, np.eye(3))
    assert not np.allclose(block, np.eye(3))
    assert np.all(block >= -1e-12)


@pytest.mark.parametrize("p, diag", [(0.0, [1, 1, 1, 1]), (0.75, [1, 0, 0, 0])])
def test_depolarizing_limits(p, diag):
    np.testing.assert_allclose(depolarizing(p), np.diag(diag), atol=1e-15)


def test_depolarizing_threshold_value():
    c = 1 - 4 * 0.0908 / 3
    np.testing.assert_allclose(depolarizing(0.0908), np.diag([1, c, c, c]), atol=1e-15)
    np.testing.assert_allclose(kraus_to_process(depolarizing_kraus(0.0908)), depolarizing(0.0908), atol=1e-15)


def test_twirl_examples():
    d = np.diag([1.0, 0.3, -0.2, 0.5])
    np.testing.assert_array_equal(pauli_twirl(d), d)
    np.testing.assert_array_equal(pauli_twirl(depolarizing(0.1)), depolarizing(0.1))
    th = 0.37
    c = np.cos(2 * th)
    np.testing.assert_allclose(pauli_twirl(coherent_rotation(th, np.pi / 2, 0)), np.diag([1, 1, c, c]), atol=1e-12)


@given(angle, st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_twirl_is_pauli_conjugation_average(theta, phi, gamma):
    m = coherent_rotation(theta, phi, gamma)
    paulis = [unitary_to_process(p) for p in PAULIS]
    avg = sum(p @ m @ p for p in paulis) / 4
    np.testing.assert_allclose(pauli_twirl(m), avg, atol=1e-12)


@pytest.mark.parametrize("m, r", [(np.eye(4), 0.0), (depolarizing(0.3), 0.2), (np.diag([1.0, 0, 0, 0]), 0.5)])
def test_infidelity(m, r):
    assert infidelity(m) == pytest.approx(r, abs=1e-15)


def test_perturb_examples():
    base = amplitude_phase_damping(0.2, 0.1)
    u = haar_random_unitary(3)
    np.testing.assert_array_equal(perturb(base, u, 0.0), base)
    np.testing.assert_allclose(perturb(base, np.eye(2), 1.0), np.eye(4), atol=1e-15)
    w = np.sin(np.pi / 4) ** 2 / 10
    np.testing.assert_allclose(perturb(base, u, w), 0.95 * base + 0.05 * unitary_to_process(u), atol=1e-15)


def test_haar_determinism_and_unitarity():
    a, b = haar_random_unitary(42), haar_random_unitary(42)
    np.testing.assert_array_equal(a, b)
    assert np.max(np.abs(a.conj().T @ a - np.eye(2))) < 1e-12


def test_haar_moment():
    rng = np.random.default_rng(5)
    vals = [abs(haar_random_unitary(rng)[0, 0]) ** 2 for _ in range(10_000)]
    assert abs(np.mean(vals) - 0.5) < 0.02


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_haar_process_is_rotation(seed):
    m = unitary_to_process(haar_random_unitary(seed))
    r = m[1:, 1:]
    np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_random_channels_are_cptp(seed):
    ch = random_kraus_channel(np.random.default_rng(seed))
    assert ch.is_trace_preserving()
    assert is_trace_preserving(kraus_to_process(ch))


@pytest.mark.parametrize(
    "kind, params",
    [
        ("identity", {}),
        ("amplitude-phase-damping", {"p": 0.17, "lam": 0.1}),
        ("coherent", {"theta": 0.3, "phi": 0.7, "gamma": 0.4}),
        ("depolarizing", {"p": 0.05}),
    ],
)
@pytest.mark.parametrize("twirl", [False, True])
def test_family_kraus_matches_process(kind, params, twirl):
    fam = NoiseFamily(kind, params, twirl=twirl)
    np.testing.assert_allclose(kraus_to_process(fam.kraus()), fam.process_matrix(), atol=1e-12)


def test_family_rejects_unknown_kind():
    with pytest.raises(ChannelError):
        NoiseFamily("bogus")
    with pytest.raises(ChannelError):
        NoiseFamily("depolarizing", {"p": 0.9})
