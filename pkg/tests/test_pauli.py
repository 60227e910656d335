import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardecode.pauli import (
    DimensionError,
    PauliOp,
    commutes,
    iter_paulis,
    pauli_mul,
    product_sign_f,
    stabilizer_group,
    weight,
    zx_form,
)


@st.composite
def paulis(draw, n=None):
    n = n or draw(st.integers(1, 4))
    z = draw(st.integers(0, (1 << n) - 1))
    x = draw(st.integers(0, (1 << n) - 1))
    return PauliOp(n, z, x, draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 4))
    return draw(paulis(n)), draw(paulis(n))


def test_xx_times_zz_is_minus_yy():
    assert PauliOp.from_string("XX") * PauliOp.from_string("ZZ") == PauliOp.from_string("-YY")


def test_z_times_x_is_iy():
    prod = PauliOp.from_string("Z") * PauliOp.from_string("X")
    assert prod == PauliOp.from_string("iY")
    assert prod.phase == 1


@given(paulis())
def test_identity_is_neutral(p):
    assert PauliOp.identity(p.n) * p == p
    assert p * PauliOp.identity(p.n) == p


@given(pauli_pairs())
@settings(max_examples=200)
def test_product_matches_dense_matrices(pair):
    p, q = pair
    np.testing.assert_allclose(pauli_mul(p, q).to_matrix(), p.to_matrix() @ q.to_matrix(), atol=1e-12)


@given(pauli_pairs())
def test_commutation_sign_matches_matrices(pair):
    p, q = pair
    a, b = p.to_matrix(), q.to_matrix()
    assert np.allclose(a @ b, commutes(p, q) * (b @ a))


def test_mismatched_lengths_raise():
    with pytest.raises(DimensionError):
        PauliOp.from_string("XX") * PauliOp.from_string("X")
    with pytest.raises(DimensionError):
        commutes(PauliOp.from_string("XX"), PauliOp.from_string("X"))


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ("X", "Z", -1),
        ("XZZXI", "IXZZX", 1),
        ("XYZ", "III", 1),
        ("Y", "Y", 1),
    ],
)
def test_eta(p, q, expected):
    assert commutes(PauliOp.from_string(p), PauliOp.from_string(q)) == expected


@pytest.mark.parametrize("label, w", [("IIIII", 0), ("XIIII", 1), ("IXX", 2), ("YZX", 3)])
def test_weight(label, w):
    assert weight(PauliOp.from_string(label)) == w


def test_string_round_trip_and_bit_order():
    p = PauliOp.from_string("-iXYZI")
    assert str(p) == "-iXYZI"
    assert p.x_bits == (1, 1, 0, 0)
    assert p.z_bits == (0, 1, 1, 0)
    assert PauliOp.single(4, 0, "X") == PauliOp.from_string("XIII")


@given(paulis())
def test_zx_form_reconstructs_operator(p):
    k, a, b = zx_form(p)
    z = PauliOp(p.n, a, 0)
    x = PauliOp(p.n, 0, b)
    assert PauliOp(p.n, 0, 0, k) * z * x == p


def test_iter_paulis_orders_by_weight():
    ws = [weight(p) for p in iter_paulis(3)]
    assert len(ws) == 64
    assert ws == sorted(ws)


def test_bitflip_stabilizer_group():
    group = stabilizer_group([PauliOp.from_string("ZZI"), PauliOp.from_string("IZZ")])
    assert sorted(str(g.element) for g in group) == ["+III", "+IZZ", "+ZIZ", "+ZZI"]


def test_group_contains_minus_yy():
    group = stabilizer_group([PauliOp.from_string("XX"), PauliOp.from_string("ZZ")])
    assert PauliOp.from_string("-YY") in {g.element for g in group}


def test_five_qubit_group_size():
    gens = [PauliOp.from_string(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    assert len(stabilizer_group(gens)) == 16


def test_noncommuting_generators_rejected():
    with pytest.raises(ValueError):
        stabilizer_group([PauliOp.from_string("XI"), PauliOp.from_string("ZI")])


@pytest.mark.parametrize("mask", range(16))
def test_reordering_sign_matches_products(mask):
    gens = [PauliOp.from_string(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    # Z(a1)X(b1) Z(a2)X(b2) ... = (-1)^f Z(sum a)X(sum b)
    chosen = [g for j, g in enumerate(gens) if (mask >> j) & 1]
    lhs = PauliOp.identity(5)
    a = b = 0
    for g in chosen:
        _, gz, gx = zx_form(g)
        lhs = lhs * PauliOp(5, gz, 0) * PauliOp(5, 0, gx)
        a ^= gz
        b ^= gx
    rhs = PauliOp(5, a, 0) * PauliOp(5, 0, b)
    sign = (-1) ** product_sign_f(gens, mask)
    assert lhs == (rhs if sign == 1 else -rhs)
