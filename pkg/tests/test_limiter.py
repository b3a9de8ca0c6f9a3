import numpy as np
import pytest

from entropydg import (Mesh1D, ConservedState, build_generator,
                       build_reference_element, corrected_rhs, stable_ratio)
from entropydg.dg import semidiscrete_rhs
from entropydg.limiter import (cell_dissipation_correction,
                               interface_rate_correction)
from entropydg.problems import make_config, initial_state

from conftest import random_admissible


class TestStableRatio:
    def test_regularization_negligible(self):
        assert stable_ratio(1.0, 1.0, 1e-8) == pytest.approx(1.0, abs=1e-15)

    def test_zero_denominator(self):
        assert stable_ratio(1.0, 0.0, 1e-8) == 0.0

    def test_clipped_at_zero(self):
        assert stable_ratio(-1.0, 1.0, 1e-8) == 0.0
        assert stable_ratio(1.0, -1.0, 1e-8) == 0.0

    def test_finite_for_extreme_inputs(self):
        vals = [stable_ratio(a, b, 1e-8)
                for a in (1e300, -1e300, 1e-300) for b in (1e-300, 1e300, 0.0)]
        assert all(np.isfinite(v) for v in vals)

    def test_exact_ratio_as_c_vanishes(self, rng):
        # on well-scaled same-sign inputs the regularized division matches
        # the exact ratio once c is negligible
        a = rng.uniform(0.5, 2.0, size=50)
        b = rng.uniform(0.5, 2.0, size=50) * np.where(rng.random(50) < 0.5,
                                                      1.0, -1.0)
        lam = stable_ratio(a * np.sign(b), b, 1e-300)
        assert np.allclose(lam, a / np.abs(b), rtol=1e-12)

    def test_rejects_nonpositive_c(self):
        with pytest.raises(ValueError):
            stable_ratio(1.0, 1.0, 0.0)


class TestCellCorrection:
    def test_dissipative_cell_untouched(self):
        assert cell_dissipation_correction(-0.3, -1.0) == 0.0

    def test_constant_cell_null_direction(self):
        assert cell_dissipation_correction(0.5, 0.0) == 0.0

    def test_violating_cell_corrected(self):
        # r > 0 with a usable direction: residual r + lam*D must collapse
        r, D = 0.7, -2.0
        lam = cell_dissipation_correction(r, D)
        assert lam > 0.0
        assert r + lam * D <= 1e-10 * abs(r)


class TestInterfaceCorrection:
    def test_idle_when_dissipative_enough(self):
        assert interface_rate_correction(0.0, 0.0, 0.0, -1.0, -1.0) == 0.0
        # combined rate already below sigma
        assert interface_rate_correction(-0.1, -0.3, -0.2, -1.0, -1.0) == 0.0

    def test_activates_when_under_dissipating(self):
        sigma = -0.5
        lam = interface_rate_correction(sigma, -0.1, 0.0, -1.0, -1.0)
        assert lam > 0.0
        combined = (-0.1 + 0.0) + lam * (-2.0)
        assert combined <= sigma + 1e-10


def _oscillatory_state(element, mesh, rng):
    """Admissible mesh data with strong intra-cell oscillations."""
    n = mesh.n_cells
    values = random_admissible(rng, shape=(n, element.p + 1),
                               rho_range=(0.6, 1.6), v_range=(-0.4, 0.4),
                               p_range=(0.6, 1.6))
    return ConservedState(mesh=mesh, values=values, t=0.0)


class TestCorrectedRhs:
    def test_constant_state_untouched(self, params):
        el = build_reference_element(3)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=8, x_left=0.0, x_right=4.0, boundary="periodic")
        values = np.tile(np.array([1.0, 0.3, 2.5]), (8, 4, 1))
        state = ConservedState(mesh=mesh, values=values, t=0.0)
        bundle, report = corrected_rhs(state, el, filt, params,
                                       lambda_max=1e6)
        assert np.max(np.abs(bundle.dudt)) < 1e-12
        # the reduced-order traces of a constant carry rounding dust only
        assert np.max(np.abs(report.sigma)) < 1e-15
        assert np.max(np.abs(report.residual_after)) < 1e-13

    def test_correction_preserves_cell_means(self, params, rng):
        el = build_reference_element(4)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=10, x_left=0.0, x_right=5.0,
                      boundary="periodic")
        state = _oscillatory_state(el, mesh, rng)
        raw = semidiscrete_rhs(state, el, params)
        bundle, report = corrected_rhs(state, el, filt, params,
                                       lambda_max=1e6)
        w = el.weights
        mean_raw = np.einsum("k,nkc->nc", w, raw.dudt)
        mean_cor = np.einsum("k,nkc->nc", w, bundle.dudt)
        assert np.max(np.abs(mean_cor - mean_raw)) < 1e-10
        assert np.any(report.lambda_total > 0)  # oscillations do trigger it

    def test_post_correction_cell_inequality(self, params, rng):
        # after the ED pass every cell with a usable direction satisfies
        # the entropy inequality up to regularization dust
        el = build_reference_element(3)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=12, x_left=0.0, x_right=6.0,
                      boundary="periodic")
        state = _oscillatory_state(el, mesh, rng)
        bundle, report = corrected_rhs(state, el, filt, params,
                                       lambda_max=1e12)
        scale = np.abs(report.residual_before) + 1e-8
        assert np.all(report.residual_after <= 1e-6 * scale + 1e-12)
        assert np.all(report.residual_after <= report.residual_before + 1e-14)

    def test_lambda_bounds(self, params, rng):
        el = build_reference_element(3)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=12, x_left=0.0, x_right=6.0,
                      boundary="periodic")
        state = _oscillatory_state(el, mesh, rng)
        lam_max = 7.5
        _, report = corrected_rhs(state, el, filt, params, lambda_max=lam_max)
        assert np.all(report.lambda_ed >= 0.0)
        assert np.all(report.lambda_er >= 0.0)
        assert np.all(report.lambda_total >= 0.0)
        assert np.all(report.lambda_total <= lam_max + 1e-15)
        assert np.all(np.isfinite(report.lambda_total))

    def test_sod_initial_jump_on_boundary(self, params):
        # N divides the domain evenly: both jump neighbors are exactly
        # constant, the local Lax-Friedrichs dissipation at the jump
        # already exceeds the cone bound, and the correction stays idle
        config = make_config("shocktube1", n_cells=20, degree=3)
        el = build_reference_element(3)
        filt = build_generator(el)
        state = initial_state(config, el)
        raw = semidiscrete_rhs(state, el, params)
        bundle, report = corrected_rhs(state, el, filt, params,
                                       lambda_max=1e6)
        assert report.sigma.min() < -1e-3   # the jump interface is seen
        assert np.max(report.residual_before) <= 1e-12
        assert np.max(np.abs(bundle.dudt - raw.dudt)) < 1e-12
        # the pair rates sit below the bounds without help
        pair = report.residual_after[:-1] + report.residual_after[1:]
        assert np.all(pair <= report.sigma[1:-1] + 1e-10)

    def test_sod_initial_jump_inside_cell(self, params):
        # N = 21 interpolates the jump inside a cell: the full-order
        # traces are continuous there, the truncated traces reveal the
        # hidden jump, and the rate correction fires immediately
        config = make_config("shocktube1", n_cells=21, degree=3)
        el = build_reference_element(3)
        filt = build_generator(el)
        state = initial_state(config, el)
        _, report = corrected_rhs(state, el, filt, params, lambda_max=1e6)
        assert report.sigma.min() < -1e-4   # truncation sees the jump
        assert np.max(report.lambda_er) > 0.0
        scale = np.abs(report.residual_before).sum() + np.abs(
            report.sigma).sum() + 1.0
        pair = report.residual_after[:-1] + report.residual_after[1:]
        assert np.all(pair <= report.sigma[1:-1] + 1e-8 * scale)
        # with the reduced-order branch off, the bound cannot see inside
        # the cell and the rate pass stays idle
        _, untruncated = corrected_rhs(state, el, filt, params,
                                       lambda_max=1e6, truncate=False)
        assert np.max(np.abs(untruncated.sigma)) < 1e-15

    def test_corrections_activate_during_sod_run(self, params):
        # after the profile develops, both passes must have fired
        from entropydg import runner
        config = make_config("shocktube1", n_cells=30, degree=3, t_end=0.3)
        out = runner.run_problem(config, write_outputs=False)
        assert out.status == "ok"
        el = build_reference_element(3)
        filt = build_generator(el)
        _, report = corrected_rhs(out.final_state, el, filt, params,
                                  lambda_max=1e6)
        assert np.any(report.lambda_ed > 0)
        assert np.any(report.lambda_er > 0)

    def test_transmissive_boundary_gets_no_rate_correction(self, params, rng):
        el = build_reference_element(3)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=9, x_left=0.0, x_right=3.0,
                      boundary="transmissive")
        state = _oscillatory_state(el, mesh, rng)
        _, report = corrected_rhs(state, el, filt, params, lambda_max=1e6)
        assert report.lambda_er[0] == 0.0
        assert report.lambda_er[-1] == 0.0

    def test_periodic_wrap_interface_consistent(self, params, rng):
        el = build_reference_element(2)
        filt = build_generator(el)
        mesh = Mesh1D(n_cells=6, x_left=0.0, x_right=3.0, boundary="periodic")
        state = _oscillatory_state(el, mesh, rng)
        _, report = corrected_rhs(state, el, filt, params, lambda_max=1e6)
        assert report.lambda_er[0] == report.lambda_er[-1]
        assert report.sigma[0] == report.sigma[-1]
