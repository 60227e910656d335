import numpy as np
import pytest

from hardecode.codes import BUILTIN_CODES
from hardecode.verify import (
    check_beta,
    check_closed_forms,
    check_oracle,
    steane_closed_form_residual,
    steane_closed_forms,
    steane_x_rotation_groups,
)


def test_beta_consistent_for_every_code():
    assert all(r.passed for r in check_beta(BUILTIN_CODES))


def test_corrupted_recovery_is_reported():
    (res,) = check_beta(["steane"], corrupt=True)
    assert not res.passed
    assert res.line().startswith("FAIL")


def test_closed_form_prefactor_at_0_1():
    groups = steane_x_rotation_groups(0.1)
    assert groups[0].total[0, 0] == pytest.approx((7 * np.cos(0.8) + 25) / 32, abs=1e-12)


@pytest.mark.parametrize("theta", [0.02, 0.05, 0.1, np.pi / 12, 0.35])
def test_closed_form_residuals(theta):
    r1, r2 = steane_closed_form_residual(theta)
    assert max(r1, r2) < 1e-10


def test_closed_forms_sum_to_trace_preserving():
    rz1, rz2 = steane_closed_forms(0.17)
    assert rz1[0, 0] + rz2[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_check_closed_forms_default():
    assert all(r.passed for r in check_closed_forms())


def test_check_oracle_small_codes():
    results = check_oracle(["bitflip-3", "five-qubit"], random_count=3)
    assert [r.name for r in results] == ["oracle[bitflip-3]", "oracle[five-qubit]"]
    assert all(r.passed for r in results)
