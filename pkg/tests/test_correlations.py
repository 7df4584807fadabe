import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmoniccascade import (
    DegenerateVariance,
    QuadCovariance,
    classify,
    evaluate_report,
    obr_inferred,
    obr_product,
    vlf_pair,
    vlf_triple,
)
from harmoniccascade.correlations import OBR_ORDER, PAIR_ORDER, TRIPLE_ORDER

# Grid minima on the default 801-point grid, frozen from cross-checked runs
# (the spectra route agrees with an independent input-output computation to
# 1e-15, so these carry the full precision of the linear algebra).
R1_MIN = {
    "sum_obr": 2.7807079858409516,
    "obr": {(1, 2, 3): 0.95090870875361833,
            (2, 1, 3): 0.90854044959731195,
            (3, 1, 2): 0.90196660077743018},
    "v_pair": {(1, 2): 4.0000113035320028,
               (1, 3): 4.0000093667093397,
               (2, 3): 4.0000060945900628},
    "v_triple": {(1, 2, 3): 4.0000134157202734,
                 (2, 3, 1): 4.0000110402227689,
                 (3, 1, 2): 4.0000101144523663},
}
R2_MIN = {
    "sum_obr": 2.9971725735370756,
    "obr": {(1, 2, 3): 0.9850892084348718,
            (2, 1, 3): 1.0000000169099446,
            (3, 1, 2): 1.0000000000004012},
    "v_pair": {(1, 2): 3.3219897044575428,
               (1, 3): 4.0000046021824049,
               (2, 3): 4.0000001888772152},
    "v_triple": {(1, 2, 3): 3.4875866551270001,
                 (2, 3, 1): 3.5358729942968741,
                 (3, 1, 2): 3.9924767082510075},
}


def _diag_cov(variances):
    return QuadCovariance(omega=0.0, matrix=np.diag(np.asarray(variances, float)))


def test_permutation_guard():
    S = QuadCovariance.vacuum()
    with pytest.raises(ValueError):
        vlf_pair(S, 1, 1, 2)
    with pytest.raises(ValueError):
        vlf_triple(S, 0, 1, 2)
    with pytest.raises(ValueError):
        obr_product(S, 2, 2, 3)


def test_vacuum_values_exact():
    S = QuadCovariance.vacuum()
    for i, j in PAIR_ORDER:
        k = ({1, 2, 3} - {i, j}).pop()
        v, g = vlf_pair(S, i, j, k)
        assert v == 4.0 and g == 0.0
    for i, j, k in TRIPLE_ORDER:
        assert vlf_triple(S, i, j, k) == 4.0
    for i, j, k in OBR_ORDER:
        assert obr_product(S, i, j, k) == 1.0
        assert obr_inferred(S, i, j, k) == (1.0, 1.0)


def test_pair_symmetric_in_first_two_modes(spectra1):
    S = spectra1[400].s_quad
    v_ij, g_ij = vlf_pair(S, 1, 2, 3)
    v_ji, g_ji = vlf_pair(S, 2, 1, 3)
    assert v_ij == pytest.approx(v_ji, rel=1e-14)
    assert g_ij == pytest.approx(g_ji, rel=1e-14)


def test_triple_symmetric_in_last_two_modes(spectra1):
    S = spectra1[400].s_quad
    assert vlf_triple(S, 1, 2, 3) == pytest.approx(vlf_triple(S, 1, 3, 2),
                                                   rel=1e-14)


def test_optimal_gain_is_a_minimum(spectra2):
    S = spectra2[400].s_quad
    for i, j in PAIR_ORDER:
        k = ({1, 2, 3} - {i, j}).pop()
        v_opt, g = vlf_pair(S, i, j, k)
        for dg in (-1e-3, 1e-3):
            v_off, _ = vlf_pair(S, i, j, k, gain=g + dg)
            assert v_off >= v_opt - 1e-12


def test_gain_closed_form(spectra2):
    S = spectra2[400].s_quad
    V = S.matrix
    _, g = vlf_pair(S, 1, 2, 3)
    assert g == pytest.approx(-(V[5, 1] + V[5, 3]) / V[5, 5], rel=1e-12)


def test_inferred_variance_never_exceeds_unconditional(spectra2):
    for s in spectra2[::100]:
        V = s.s_quad.matrix
        for i, j, k in OBR_ORDER:
            vx, vy = obr_inferred(s.s_quad, i, j, k)
            assert vx <= V[2 * (i - 1), 2 * (i - 1)] + 1e-14
            assert vy <= V[2 * i - 1, 2 * i - 1] + 1e-14
            assert vx >= -1e-14 and vy >= -1e-14


def test_degenerate_variance_raises():
    v = np.ones(6)
    v[5] = 0.0     # Y_3 collapses
    with pytest.raises(DegenerateVariance):
        vlf_pair(_diag_cov(v), 1, 2, 3)
    v = np.ones(6)
    v[2] = v[4] = 0.0    # X_2 + X_3 sum variance collapses
    with pytest.raises(DegenerateVariance):
        obr_inferred(_diag_cov(v), 1, 2, 3)


@given(st.lists(st.floats(min_value=1.0, max_value=10.0), min_size=3, max_size=3))
@settings(max_examples=50, deadline=None)
def test_uncorrelated_states_violate_nothing(vs):
    # diagonal covariance at or above vacuum: no entanglement, no steering
    diag = np.repeat(vs, 2)
    S = _diag_cov(diag)
    for i, j in PAIR_ORDER:
        k = ({1, 2, 3} - {i, j}).pop()
        v, g = vlf_pair(S, i, j, k)
        assert g == 0.0
        assert v >= 4.0 - 1e-12
    for i, j, k in TRIPLE_ORDER:
        assert vlf_triple(S, i, j, k) >= 4.0 - 1e-12
    for i, j, k in OBR_ORDER:
        assert obr_product(S, i, j, k) >= 1.0 - 1e-12


def test_report_collects_all_families(spectra1):
    r = evaluate_report(spectra1[400].s_quad)
    assert set(r.v_pair) == set(PAIR_ORDER)
    assert set(r.v_triple) == set(TRIPLE_ORDER)
    assert set(r.obr) == set(OBR_ORDER)
    assert r.sum_v_pair == pytest.approx(sum(r.v_pair.values()))
    assert r.sum_obr == pytest.approx(sum(r.obr.values()))
    assert r.omega == spectra1[400].omega


def test_classify_flags_on_synthetic_values():
    v_pair = {(1, 2): 3.0, (1, 3): 3.9, (2, 3): 4.5}
    gains = {pq: 0.0 for pq in PAIR_ORDER}
    v_triple = {(1, 2, 3): 1.8, (2, 3, 1): 4.2, (3, 1, 2): 5.0}
    obr = {(1, 2, 3): 0.7, (2, 1, 3): 1.1, (3, 1, 2): 0.9}
    r = classify(0.0, v_pair, gains, v_triple, obr)
    assert r.inseparable_pairwise            # two pairs below 4
    assert r.inseparable_triple
    assert not r.tr_entangled_pairwise       # sum 11.4 not below 8
    assert not r.tr_genuine_steer_pairwise
    assert r.genuine_entangled_triple        # 1.8 below 2
    assert not r.genuine_steer_triple
    assert r.steer_1_by_23 and not r.steer_2_by_13 and r.steer_3_by_12
    assert not r.genuine_tri_steer           # sum 2.7 not below 1


@pytest.mark.parametrize("regime,frozen", [(1, R1_MIN), (2, R2_MIN)])
def test_grid_minima_frozen(regime, frozen, request):
    summary = request.getfixturevalue(f"summary{regime}")
    assert summary.min_sum_obr[0] == pytest.approx(frozen["sum_obr"], rel=1e-9)
    for key, want in frozen["obr"].items():
        assert summary.min_obr[key][0] == pytest.approx(want, rel=1e-9)
    for key, want in frozen["v_pair"].items():
        assert summary.min_v_pair[key][0] == pytest.approx(want, rel=1e-9)
    for key, want in frozen["v_triple"].items():
        assert summary.min_v_triple[key][0] == pytest.approx(want, rel=1e-9)


def test_regime1_minima_sit_at_center_frequencies(summary1):
    # the obr minima live within a gamma of omega = 0
    for key, (_, omega) in summary1.min_obr.items():
        assert abs(omega) <= 1.0


def test_sum_obr_minimum_at_zero_frequency(summary1):
    assert summary1.min_sum_obr[1] == 0.0
