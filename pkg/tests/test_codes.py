import numpy as np
import pytest

from hardecode.codes import (
    BUILTIN_CODES,
    CodeError,
    GATE_PROCESS,
    StabilizerCode,
    biased_decoder,
    builtin_code,
    load_code,
    symmetric_decoder,
    syndrome,
    transversal_group,
)
from hardecode.pauli import PauliOp, commutes, iter_paulis, weight


def P(s):
    return PauliOp.from_string(s)


@pytest.mark.parametrize("name", BUILTIN_CODES)
def test_builtin_codes_are_consistent(name):
    code = builtin_code(name)
    assert len(code.generators) == code.n - 1
    assert len(code.stabilizers) == 2 ** (code.n - 1)
    assert commutes(code.logical_x, code.logical_z) == -1
    ly = code.logical_y
    assert ly.phase in (0, 2)
    assert all(commutes(ly, g) == 1 for g in code.generators)


def test_steane_registry_entry():
    code = builtin_code("steane")
    assert code.n == 7 and len(code.generators) == 6
    assert code.transversal_generators == ("H", "S")


def test_five_qubit_generators():
    assert [str(g) for g in builtin_code("five-qubit").generators] == ["+XZZXI", "+IXZZX", "+XIXZZ", "+ZXIXZ"]


def test_unknown_code():
    with pytest.raises(CodeError):
        builtin_code("toric-1000")


@pytest.mark.parametrize("error", ["XII", "IXX"])
def test_bitflip_syndrome_10(error):
    code = builtin_code("bitflip-3")
    assert syndrome(P(error), code) == (1, 0)


@pytest.mark.parametrize("name", BUILTIN_CODES)
def test_identity_has_trivial_syndrome(name):
    code = builtin_code(name)
    assert code.syndrome(PauliOp.identity(code.n)) == 0


def test_bitflip_coset_10():
    table = symmetric_decoder(builtin_code("bitflip-3"))
    coset = {str(p) for p in table.coset(0b10)}
    assert {"+XII", "+IXX"} <= coset
    assert table[0b10] == P("XII")


def test_five_qubit_symmetric_decoder_is_perfect():
    table = symmetric_decoder(builtin_code("five-qubit"))
    assert len(table) == 16
    assert table[0] == PauliOp.identity(5)
    assert sorted(table.weights()) == [0] + [1] * 15


@pytest.mark.parametrize("name", BUILTIN_CODES)
def test_symmetric_decoder_is_minimum_weight(name):
    code = builtin_code(name)
    table = symmetric_decoder(code)
    best = {}
    for p in iter_paulis(code.n):
        best.setdefault(code.syndrome(p), weight(p))
        if len(best) == code.num_syndromes:
            break
    assert table.weights() == [best[s] for s in range(code.num_syndromes)]


def test_tie_seed_keeps_minimum_weight():
    code = builtin_code("steane")
    a, b = symmetric_decoder(code), symmetric_decoder(code, tie_seed=3)
    assert a.weights() == b.weights()


def test_biased_decoder_five_qubit_z():
    code = builtin_code("five-qubit")
    table = biased_decoder(code, "Z")
    covered = {code.syndrome(p) for p in table.recoveries}
    assert len(covered) == 16
    z_errors = [p for p in iter_paulis(5) if set(p.letters()) <= {"I", "Z"} and 1 <= weight(p) <= 2]
    for e in z_errors:
        # corrected iff the recovery equals the error up to a stabilizer
        r = table[code.syndrome(e)]
        residual = (r * e).unsigned()
        assert any(residual == el.element.unsigned() for el in code.stabilizers), str(e)


def test_biased_decoder_unbiased_is_symmetric():
    code = builtin_code("five-qubit")
    assert biased_decoder(code, "XYZ") == symmetric_decoder(code)


def test_biased_decoder_falls_back():
    code = builtin_code("bitflip-3")
    table = biased_decoder(code, "Z")
    assert table[0b10] == P("XII")


def test_biased_decoder_rejects_bad_subset():
    with pytest.raises(CodeError):
        biased_decoder(builtin_code("steane"), "W")


@pytest.mark.parametrize("name, order", [("shor-z", 4), ("five-qubit", 12), ("steane", 24), ("surface-17", 4)])
def test_transversal_group_orders(name, order):
    group = transversal_group(builtin_code(name))
    assert len(group) == order
    np.testing.assert_array_equal(group.elements[0], np.eye(4))
    assert group.names[1:4] == ("X", "Y", "Z")


def test_pauli_subgroup():
    group = transversal_group(builtin_code("steane")).pauli_subgroup()
    assert group.names == ("I", "X", "Y", "Z")


def test_group_is_closed():
    group = transversal_group(builtin_code("five-qubit"))
    for a in group.elements:
        for b in group.elements:
            group.index_of(a @ b)


def test_invalid_codes_rejected():
    with pytest.raises(CodeError):
        StabilizerCode("bad", (P("XI"),), P("ZZ"), P("ZI"))
    with pytest.raises(CodeError):
        StabilizerCode("bad", (P("ZZI"), P("IZZ")), P("XXX"), P("ZZZ"), ("T",))


def test_load_code(tmp_path):
    path = tmp_path / "rep.txt"
    path.write_text("# repetition code\nZZI\nIZZ\nX_L: XXX\nZ_L: ZZZ\ntransversal: X Z\n")
    code = load_code(path)
    assert code.n == 3
    assert code.name == "rep"
    assert symmetric_decoder(code)[0b10] == P("XII")


def test_gate_processes_are_orthogonal():
    for m in GATE_PROCESS.values():
        np.testing.assert_allclose(m @ m.T, np.eye(4), atol=1e-12)
