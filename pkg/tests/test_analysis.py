import math

import numpy as np
import pytest
from oracles import phase_average_quad, projector

from qpurify import (
    HaarSampler,
    MeasurementRecord,
    PureState,
    analytic_fidelities,
    analytic_from_record,
    decompose,
    empirical_fidelities,
    haar_pure,
    haar_states,
    phase_average_adjudication,
    probabilities_from_state,
    pure,
    purify_a,
    to_bloch,
    unbiased_state,
    verify_inequality_chain,
)
from qpurify.analysis import (
    FIVE_EIGHTHS,
    check_chain,
    optimal_pair_phases,
    random_density,
)


class TestHaar:
    def test_golden_first_draw(self):
        psi = haar_pure(HaarSampler(seed=42))
        assert psi.amplitudes[0] == 0.6692276424105664
        assert psi.amplitudes[1] == complex(-0.427091150547519, 0.6080522278205972)

    def test_streams_are_reproducible_and_distinct(self):
        a = [s.amplitudes for s in haar_states(1, 5)]
        b = [s.amplitudes for s in haar_states(1, 5)]
        c = [s.amplitudes for s in haar_states(2, 5)]
        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, c)

    def test_start_offset(self):
        full = [s.amplitudes for s in haar_states(9, 6)]
        tail = [s.amplitudes for s in haar_states(9, 3, start=3)]
        np.testing.assert_array_equal(full[3:], tail)

    def test_normalised(self):
        for psi in haar_states(0, 1000):
            assert abs(np.linalg.norm(psi.amplitudes) - 1) <= 1e-10

    def test_isotropic(self):
        n = 100_000
        vecs = np.array([to_bloch(psi.density()).as_array() for psi in haar_states(123, n)])
        assert np.all(np.abs(vecs.mean(axis=0)) <= 3 / math.sqrt(n))
        # second moments of a uniform unit vector are 1/3 per axis
        np.testing.assert_allclose((vecs**2).mean(axis=0), 1 / 3, atol=0.01)

    def test_random_density_inside_ball(self):
        s = HaarSampler(seed=4)
        for i in range(200):
            assert to_bloch(random_density(s.advance(i))).norm <= 1 + 1e-12


class TestAnalytic:
    def test_complete(self):
        r = analytic_fidelities(pure(0.3, 0.4 - 0.5j), 3)
        assert (r.f_mixed, r.f_protocol_a_avg, r.f_protocol_b, r.f_maxent) == (2 / 3, 2 / 3, 1, 1)

    def test_two_axis_pole(self):
        r = analytic_fidelities(PureState([1, 0]), 2)
        assert r.f_mixed == 0.75
        assert r.f_protocol_b == 1.0
        assert r.f_maxent == 1.0
        assert not r.degeneracy_flag

    def test_two_axis_equator_degenerate(self):
        # A1 = A2 = 0 leaves rho_unb,2 = I/2
        r = analytic_fidelities(pure(1, 1), 2)
        assert r.bloch_norm == pytest.approx(0, abs=1e-15)
        assert r.degeneracy_flag
        assert r.f_mixed == pytest.approx(0.5)
        assert r.f_protocol_b == pytest.approx(0.5)

    def test_single_axis(self):
        r = analytic_from_record(MeasurementRecord.from_probs([0.8]))
        assert r.f_mixed == pytest.approx(0.68, abs=1e-15)
        assert r.f_protocol_b == 0.8
        assert r.f_maxent == r.f_mixed


class TestEmpirical:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_matches_analytic(self, k):
        for psi in haar_states(21, 300):
            emp = empirical_fidelities(psi, k)
            ana = analytic_fidelities(psi, k)
            for field in ("f_mixed", "f_protocol_a_avg", "f_protocol_b", "f_maxent",
                          "f_maxent_protocol_a_avg", "f_maxent_protocol_b", "mixed_purified_overlap"):
                assert getattr(emp, field) == pytest.approx(getattr(ana, field), abs=1e-10), field

    def test_phase_average_against_quadrature(self):
        for psi in haar_states(8, 20):
            unb = unbiased_state(probabilities_from_state(psi, ("z", "y")))
            mix = decompose(unb)
            target = psi.projector()

            def f(phi):
                return float(np.real(np.trace(target @ purify_a(mix, phi).projector())))

            expected = phase_average_quad(f)
            got = empirical_fidelities(psi, 2, phase_grid=1000).f_protocol_a_avg
            assert got == pytest.approx(expected, abs=1e-8)

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            empirical_fidelities(pure(1, 0), 2, phase_grid=4)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            empirical_fidelities(pure(1, 0), 2, mode="best")

    def test_optimal_pair_mode(self):
        for psi in haar_states(30, 200):
            emp = empirical_fidelities(psi, 2, mode="optimal-pair-average")
            assert emp.phase_mode == "optimal-pair-average"
            assert emp.f_protocol_a_avg == pytest.approx(analytic_fidelities(psi, 2).f_mixed, abs=1e-10)

    def test_optimal_pair_needs_finite_set(self):
        rec = MeasurementRecord.from_probs([0.7])
        with pytest.raises(ValueError):
            optimal_pair_phases(decompose(unbiased_state(rec)), rec)

    def test_complete_every_phase(self):
        # protocol A fidelity is 2/3 pointwise, not just on average
        for psi in haar_states(31, 50):
            mix = decompose(unbiased_state(probabilities_from_state(psi)))
            for phi in np.linspace(0, 2 * np.pi, 97):
                v = purify_a(mix, phi).amplitudes
                assert abs(np.vdot(psi.amplitudes, v)) ** 2 == pytest.approx(2 / 3, abs=1e-10)

    def test_single_axis_theta_average(self):
        # averaging over the unknown phase theta of the initial state
        for p1 in np.linspace(0, 1, 11):
            rec = MeasurementRecord.from_probs([p1])
            mix = decompose(unbiased_state(rec))
            rho_a = purify_a(mix, 0.0).projector()
            thetas = 2 * np.pi * np.arange(1000) / 1000
            vals = [
                np.real(np.trace(projector([math.sqrt(p1), math.sqrt(1 - p1) * np.exp(1j * t)]) @ rho_a))
                for t in thetas
            ]
            assert np.mean(vals) == pytest.approx(p1**2 + (1 - p1) ** 2, abs=1e-8)


class TestAdjudication:
    def test_closed_forms(self):
        for psi in haar_states(40, 50):
            rep = phase_average_adjudication(psi)
            assert rep["f_a_uniform_average"] == pytest.approx(rep["f_a_closed_form"], abs=1e-8)
            assert rep["f_a_optimal_pair_average"] == pytest.approx(rep["f_a_closed_form"], abs=1e-8)
            assert rep["mixed_purified_overlap_max"] == pytest.approx(
                rep["mixed_purified_overlap_closed_form"], abs=1e-10
            )
            assert rep["mixed_purified_overlap_min"] == pytest.approx(
                rep["mixed_purified_overlap_closed_form"], abs=1e-10
            )
            assert rep["mixed_purified_overlap_max"] <= FIVE_EIGHTHS + 1e-10
            assert rep["f_a_per_candidate_optimum_mean"] >= rep["f_a_closed_form"] - 1e-12
            assert rep["five_eighths_bound_holds_for"] == "mixed_purified_overlap"

    def test_fidelity_average_can_exceed_five_eighths(self):
        rep = phase_average_adjudication(PureState([1, 0]))
        assert rep["f_a_uniform_average"] == pytest.approx(0.75, abs=1e-12)
        assert rep["f_a_average_exceeds_five_eighths"]


class TestChain:
    def test_pole_example(self):
        # fB = 1, f_max = 1, f_unb = 3/4
        r = empirical_fidelities(PureState([1, 0]), 2)
        assert r.f_maxent_protocol_b == pytest.approx(1.0, abs=1e-12)
        assert r.f_protocol_b == pytest.approx(1.0, abs=1e-12)
        assert r.f_maxent == pytest.approx(1.0, abs=1e-12)
        assert r.f_maxent_protocol_a_avg == pytest.approx(1.0, abs=1e-12)
        assert r.f_mixed == pytest.approx(0.75, abs=1e-12)
        assert r.f_protocol_a_avg == pytest.approx(0.75, abs=1e-12)
        stats = check_chain(r)
        assert sum(s.violations for s in stats.values()) == 0

    def test_degenerate_input(self):
        r = empirical_fidelities(pure(1, -1), 2)
        assert r.degeneracy_flag
        assert sum(s.violations for s in check_chain(r).values()) == 0

    def test_sweep(self):
        summary = verify_inequality_chain(2000, seed=3)
        assert summary.violations == 0
        d = summary.as_dict()
        assert d["samples"] == 2000
        assert d["links"]["f_max >= f_unb"]["min_slack"] >= -1e-9

    def test_detects_violation(self):
        r = analytic_fidelities(pure(0.6, 0.8), 2)
        bad = type(r)(**{**r.as_dict(), "f_mixed": r.f_maxent + 0.1})
        stats = check_chain(bad)
        assert stats["f_max >= f_unb"].violations == 1
        assert stats["f_unb == fA_avg_unb"].violations == 1

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            verify_inequality_chain(0)

    def test_single_axis_grid(self):
        violations = 0
        for p1 in np.linspace(0, 1, 1000):
            r = analytic_from_record(MeasurementRecord.from_probs([p1]))
            violations += r.f_protocol_b < r.f_mixed - 1e-9
        assert violations == 0
