import numpy as np
import pytest

from hardecode.channels import NoiseFamily, depolarizing
from hardecode.codes import builtin_code
from hardecode.decoder import run_hard_decoder
from hardecode.threshold import (
    ThresholdQuery,
    correctable,
    family_noise,
    hypersurface_mesh,
    optimized_threshold,
    probes_to_csv,
    symmetric_threshold,
    threshold,
)

STEANE = builtin_code("steane")


def test_identity_correctable_at_first_level():
    v = correctable(STEANE, np.eye(4))
    assert v.correctable and v.levels == 1


@pytest.mark.parametrize("p, expected", [(0.05, True), (0.12, False)])
def test_steane_depolarizing_verdicts(p, expected):
    assert correctable(STEANE, depolarizing(p)).correctable is expected


def test_xi_must_be_positive():
    with pytest.raises(ValueError):
        correctable(STEANE, np.eye(4), xi=0)
    with pytest.raises(ValueError):
        ThresholdQuery(STEANE, NoiseFamily("depolarizing"), xi=-1)


def test_unknown_decoder():
    with pytest.raises(ValueError):
        correctable(STEANE, np.eye(4), decoder="oracle")


def test_fixed_schedule_needs_schedule():
    with pytest.raises(ValueError):
        correctable(STEANE, np.eye(4), decoder="fixed-schedule")


def test_identity_family_threshold_is_upper_bound():
    res = symmetric_threshold(ThresholdQuery(STEANE, NoiseFamily("identity")))
    assert res.threshold >= 1.0
    assert res.status == "no-uncorrectable-point"


def test_symmetric_bracket_is_consistent():
    q = ThresholdQuery(STEANE, NoiseFamily("depolarizing"), upper=0.75)
    res = symmetric_threshold(q)
    lo, hi = res.bracket()
    assert hi - lo == pytest.approx(1e-4)
    below = [pr for pr in res.probes if pr.value <= lo + 1e-12]
    above = [pr for pr in res.probes if pr.value >= hi - 1e-12]
    assert all(pr.correctable for pr in below)
    assert not any(pr.correctable for pr in above)


def test_optimized_is_lower_bound_at_least_symmetric():
    q = ThresholdQuery(STEANE, NoiseFamily("amplitude-phase-damping", {"lam": 0.05}), decoder="optimized-all")
    sym = symmetric_threshold(q)
    opt = optimized_threshold(q, p_sym=sym.threshold)
    assert opt.threshold >= sym.threshold
    verdict = correctable(STEANE, family_noise(q.family.with_params(p=opt.threshold), 7), "optimized-all")
    assert verdict.correctable


def test_optimized_threshold_requires_optimized_decoder():
    with pytest.raises(ValueError):
        optimized_threshold(ThresholdQuery(STEANE, NoiseFamily("depolarizing")))


def test_five_qubit_x_rotation_reaches_quarter_turn():
    q = ThresholdQuery(builtin_code("five-qubit"), NoiseFamily("coherent", {"phi": np.pi / 2, "gamma": 0.0}),
                       param="theta", decoder="optimized-all", upper=np.pi / 4)
    assert abs(threshold(q).threshold - np.pi / 4) <= 5e-4


def test_single_point_mesh_equals_direct_query():
    q = ThresholdQuery(builtin_code("five-qubit"), NoiseFamily("amplitude-phase-damping"), granularity=1e-3)
    (res,) = hypersurface_mesh(q, [{"lam": 0.1}])
    direct = threshold(ThresholdQuery(q.code, q.family.with_params(lam=0.1), granularity=1e-3))
    assert res.threshold == direct.threshold


def test_empty_mesh_rejected():
    with pytest.raises(ValueError):
        hypersurface_mesh(ThresholdQuery(STEANE, NoiseFamily("depolarizing")), [])


def test_mesh_records_failures():
    q = ThresholdQuery(STEANE, NoiseFamily("depolarizing"), granularity=1e-2)
    (res,) = hypersurface_mesh(q, [{"q": 7.0}])
    assert np.isnan(res.threshold) and res.status.startswith("error")


def test_correlated_family_uses_mixture():
    fam = NoiseFamily("correlated-dephasing-mix", {"p": 0.003, "q": 0.02})
    noise = family_noise(fam, 7)
    assert isinstance(noise, list) and len(noise) == 8
    assert isinstance(family_noise(fam.with_params(q=0.0), 7), np.ndarray)


def test_probe_csv_has_mesh_columns():
    q = ThresholdQuery(builtin_code("five-qubit"), NoiseFamily("depolarizing"), granularity=1e-2)
    res = threshold(q)
    text = probes_to_csv(({"lam": 0.0}, pr) for pr in res.probes)
    header, first = text.splitlines()[:2]
    assert header == "lam,value,correctable,levels,level1_infidelity,final_infidelity"
    assert first.startswith("0.0,")


def test_verdict_levels_match_decoder():
    noise = depolarizing(0.05)
    v = correctable(STEANE, noise)
    sched = run_hard_decoder(STEANE, noise, "symmetric", stop_when_correctable=True)
    assert v.levels == sched.levels_to_correct
