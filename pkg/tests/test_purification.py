import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st
from oracles import projector, random_rho, top_projector_closed_form

from conftest import density_matrices, pure_states
from qpurify import (
    DegenerateProjector,
    OrthogonalMixture,
    ProjectionChoice,
    PureState,
    decompose,
    make_density,
    overlap,
    pure,
    purify_a,
    purify_a_via_projection,
    purify_b,
    unbiased_state,
)
from qpurify.analysis import haar_states
from qpurify.purification import purify_a_amplitudes
from qpurify.reconstruction import MeasurementRecord

ZERO = PureState([1, 0])
ONE = PureState([0, 1])


def computational(p1):
    return OrthogonalMixture(p1, 1 - p1, ZERO, ONE)


class TestDecompose:
    def test_diagonal(self):
        mix = decompose(make_density(np.diag([2 / 3, 1 / 3])))
        assert (mix.p1, mix.p2) == pytest.approx((2 / 3, 1 / 3), abs=1e-15)
        assert mix.rho1.isclose(np.diag([1, 0]))
        assert mix.rho2.isclose(np.diag([0, 1]))

    def test_two_axis_unbiased_weights(self):
        rec = MeasurementRecord.from_probs([0.8, 0.35])
        a = rec.bloch_norm
        mix = decompose(unbiased_state(rec))
        assert mix.p1 == pytest.approx((2 + a) / 4, abs=1e-14)
        assert mix.p2 == pytest.approx((2 - a) / 4, abs=1e-14)

    def test_degenerate(self):
        mix = decompose(make_density(np.eye(2) / 2))
        assert (mix.p1, mix.p2) == (0.5, 0.5)
        assert mix.ket1.isclose(ZERO, atol=0)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            OrthogonalMixture(0.5, 0.5, ZERO, pure(1, 1))


class TestProtocolA:
    def test_equal_weights_zero_phase(self):
        assert purify_a(computational(0.5), 0.0).isclose(pure(1, 1))

    def test_two_thirds(self):
        out = purify_a(computational(2 / 3), ProjectionChoice.phase(0.0))
        assert out.isclose(PureState([math.sqrt(2 / 3), math.sqrt(1 / 3)]))

    def test_projector_phase(self):
        choice = ProjectionChoice.projector(1, 1j)
        # arg(mu conj(nu)) = arg(-i)
        assert choice.angle == pytest.approx(-math.pi / 2)
        out = purify_a(computational(2 / 3), choice)
        expected = PureState([math.sqrt(2 / 3), math.sqrt(1 / 3) * 1j])
        assert out.isclose(expected)

    def test_branch_cut(self):
        assert ProjectionChoice.projector(1, -1).angle == pytest.approx(math.pi)

    def test_degenerate_projector(self):
        with pytest.raises(DegenerateProjector):
            ProjectionChoice.projector(1, 0)
        with pytest.raises(DegenerateProjector):
            ProjectionChoice.projector(1e-13, 1)

    @pytest.mark.parametrize("p1", [0.5, 2 / 3])
    @pytest.mark.parametrize("chi", [(1, 1), (1, 1j), (0.3, -0.8 + 0.1j)])
    def test_matrix_form_matches_phase_form(self, p1, chi):
        choice = ProjectionChoice.projector(*chi)
        mix = computational(p1)
        m = purify_a_via_projection(mix, choice)
        assert m.isclose(purify_a(mix, choice).projector(), atol=1e-12)
        assert np.allclose(np.asarray(m) @ np.asarray(m), np.asarray(m), atol=1e-12)

    def test_pure_input_is_fixed(self):
        mix = computational(1.0)
        for chi in [(1, 1), (0.2, 0.9j)]:
            out = purify_a_via_projection(mix, ProjectionChoice.projector(*chi))
            assert out.isclose(np.diag([1, 0]), atol=0)

    def test_real_chi_gives_real_coherence(self):
        m = purify_a_via_projection(computational(0.7), ProjectionChoice.projector(0.6, 0.8))
        assert m.p == pytest.approx(math.sqrt(0.7 * 0.3), abs=1e-15)

    def test_probability_preservation_sweep(self, rng):
        worst = 0.0
        for _ in range(10_000):
            mix = decompose(make_density(random_rho(rng)))
            phi = rng.uniform(-math.pi, math.pi)
            out = purify_a(mix, phi).density()
            worst = max(
                worst,
                abs(overlap(out, mix.rho1) - mix.p1),
                abs(overlap(out, mix.rho2) - mix.p2),
                abs(out.purity - 1),
            )
        assert worst <= 1e-12

    @settings(max_examples=200)
    @given(density_matrices(), pure_states())
    # small nu: conditioning regression
    @example(make_density([[0.5, 0.096906], [0.096906, 0.5]]), PureState([0.999992, -0.00390622j], normalize=True))
    def test_matrix_form_general_basis(self, rho, chi):
        mix = decompose(rho)
        mu, nu = chi.amplitudes
        if abs(mu) < 1e-6 or abs(nu) < 1e-6:
            return
        choice = ProjectionChoice(chi=chi)
        via = purify_a_via_projection(mix, choice)
        assert via.isclose(purify_a(mix, choice).projector(), atol=1e-12)

    def test_vectorised_matches_scalar(self):
        mix = decompose(make_density([[0.6, 0.1 - 0.2j], [0.1 + 0.2j, 0.4]]))
        phases = np.linspace(0, 2 * np.pi, 17)
        rows = purify_a_amplitudes(mix, phases)
        for row, phi in zip(rows, phases):
            assert np.allclose(projector(row), purify_a(mix, phi).projector(), atol=1e-15)


class TestProtocolB:
    def test_diagonal(self):
        res = purify_b(make_density(np.diag([2 / 3, 1 / 3])))
        assert res.state.isclose(ZERO)
        assert not res.degenerate

    def test_real_coherence(self):
        res = purify_b(make_density([[0.5, 0.25], [0.25, 0.5]]))
        assert res.state.isclose(pure(1, 1))
        assert res.overlap == pytest.approx(0.75, abs=1e-15)

    def test_degenerate_flag(self):
        res = purify_b(make_density(np.eye(2) / 2))
        assert res.degenerate
        assert res.state.isclose(ZERO, atol=0)

    def test_closed_form_projector(self, rng):
        checked = 0
        for _ in range(5000):
            m = random_rho(rng)
            a, p = m[0, 0].real, m[0, 1]
            if abs(p) <= 1e-6:
                continue
            expected = top_projector_closed_form(a, p)
            got = purify_b(make_density(m)).state.projector()
            assert np.max(np.abs(got - expected)) <= 1e-10
            checked += 1
        assert checked > 4000

    def test_overlap_equals_lambda_plus(self, rng):
        for _ in range(1000):
            rho = make_density(random_rho(rng))
            res = purify_b(rho)
            assert overlap(res.density(), rho) == pytest.approx(res.overlap, abs=1e-12)

    def test_optimality_against_haar(self, rng):
        sigmas = np.array([s.amplitudes for s in haar_states(7, 1000)])
        for _ in range(1000):
            m = random_rho(rng)
            best = purify_b(make_density(m)).overlap
            ov = np.einsum("ni,ij,nj->n", sigmas.conj(), m, sigmas).real
            assert ov.max() <= best + 1e-12
            # dense sampling gets close to the optimum
            assert ov.max() >= best - 0.02

    @settings(max_examples=200)
    @given(density_matrices(), st.floats(0, 2 * math.pi))
    def test_b_beats_a(self, rho, phi):
        # maximal overlap dominates any probability-preserving purification
        a_out = purify_a(decompose(rho), phi).density()
        assert overlap(a_out, rho) <= purify_b(rho).overlap + 1e-12
