import numpy as np
import pytest

from entropydg import classical_lf_flux, fv_step, run_reference
from entropydg.dg import llf_flux
from entropydg.errors import InadmissibleStateError
from entropydg.euler import entropy_pair, flux, max_signal_speed, wave_speed_bounds
from entropydg.predictor import dissipation_rate_bound
from entropydg.problems import make_config, fv_initial_values
from entropydg.reference import FvState, fv_total_entropy

from conftest import random_admissible


class TestClassicalLfFlux:
    def test_consistency(self, params, rng):
        u = random_admissible(rng, shape=(30,))
        f = classical_lf_flux(u, u, 0.4, params)
        assert np.allclose(f, flux(u, params), atol=1e-13)

    def test_dissipation_vanishes_for_equal_states(self, params):
        u = np.array([0.7, 0.2, 2.0])
        for lam in (0.1, 0.5, 1.0):
            assert np.allclose(classical_lf_flux(u, u, lam, params),
                               flux(u, params), atol=0)

    def test_rejects_bad_ratio(self, params):
        u = np.array([1.0, 0.0, 2.5])
        with pytest.raises(ValueError):
            classical_lf_flux(u, u, 0.0, params)


def lf_burgers_sweep(theta_values, lam=0.5):
    """One-step total Burgers entropy for the viscosity family f_theta.

    Riemann data (1, 0); f_theta = (f_l + f_r)/2 + theta (u_l - u_r)/(2 lam).
    Returns the entropy change per theta (independent brute-force oracle).
    """
    u = np.array([1.0] * 10 + [0.0] * 10)
    out = []
    for theta in theta_values:
        f = 0.5 * (0.5 * u[:-1] ** 2 + 0.5 * u[1:] ** 2) \
            + theta * (u[:-1] - u[1:]) / (2.0 * lam)
        u1 = u.copy()
        u1[1:-1] += lam * (f[:-1] - f[1:])
        out.append(float(np.sum(0.5 * u1 ** 2 - 0.5 * u ** 2)))
    return np.array(out)


class TestMaximalDissipation:
    def test_burgers_family_minimized_at_classical_lf(self):
        thetas = np.arange(0.0, 2.01, 0.25)
        entropy_change = lf_burgers_sweep(thetas)
        best = int(np.argmin(entropy_change))
        assert thetas[best] == pytest.approx(1.0)
        others = np.delete(entropy_change, best)
        assert np.all(others > entropy_change[best] + 1e-12)

    def test_euler_lf_beats_llf_and_hll(self, params):
        # one step on the shock-tube jump at a shared grid ratio: the
        # classical LF update must dissipate at least as much total
        # entropy as the LLF and HLL competitors
        u_l = np.array([1.0, 0.0, 2.5])
        u_r = np.array([0.125, 0.0, 0.25])
        n = 20
        u0 = np.tile(u_l, (n, 1))
        u0[n // 2:] = u_r
        c_max = max(float(max_signal_speed(u_l, params)),
                    float(max_signal_speed(u_r, params)))
        lam = 0.5 / c_max

        def hll_flux(a, b):
            a_l, a_r = wave_speed_bounds(a, b, params)
            f_a, f_b = flux(a, params), flux(b, params)
            if a_l >= 0:
                return f_a
            if a_r <= 0:
                return f_b
            return (a_r * f_a - a_l * f_b + a_l * a_r * (b - a)) / (a_r - a_l)

        def step_with(flux_fn):
            g = np.concatenate((u0[:1], u0, u0[-1:]), axis=0)
            f = np.array([flux_fn(g[i], g[i + 1]) for i in range(n + 1)])
            u1 = u0 + lam * (f[:-1] - f[1:])
            U, _ = entropy_pair(u1, params)
            return float(U.sum())

        e_lf = step_with(lambda a, b: classical_lf_flux(a, b, lam, params))
        e_llf = step_with(lambda a, b: llf_flux(a, b, params))
        e_hll = step_with(hll_flux)
        assert e_lf <= e_llf + 1e-12
        assert e_lf <= e_hll + 1e-12


class TestFvStep:
    def test_constant_unchanged(self, params):
        state = FvState(values=np.tile([1.0, 0.2, 2.5], (16, 1)), dx=0.1)
        out = fv_step(state, params, dt=0.02)
        assert np.allclose(out.values, state.values, atol=1e-15)
        assert out.t == pytest.approx(0.02)

    def test_one_step_entropy_identity(self, params):
        # the one-step entropy change equals the closed-form expression
        # with the half-ratio flux difference (one LF update per cell)
        config = make_config("shocktube1")
        values, dx = fv_initial_values(config, 64)
        c_max = float(np.max(max_signal_speed(values, params)))
        dt = 0.5 * dx / c_max
        lam = dt / dx
        state = FvState(values=values, dx=dx)
        before = fv_total_entropy(state, params)
        after_state = fv_step(state, params, dt)
        after = fv_total_entropy(after_state, params)

        g = np.concatenate((values[:1], values, values[-1:]), axis=0)
        f = flux(g, params)
        u_pred = 0.5 * (g[:-2] + g[2:]) + 0.5 * lam * (f[:-2] - f[2:])
        U_pred, _ = entropy_pair(u_pred, params)
        U_old, _ = entropy_pair(values, params)
        predicted = dx * float((U_pred - U_old).sum())
        assert after - before == pytest.approx(predicted, abs=1e-12)

    def test_conservation(self, params):
        config = make_config("shocktube1")
        values, dx = fv_initial_values(config, 50)
        state = FvState(values=values, dx=dx)
        dt = 0.01
        out = fv_step(state, params, dt)
        change = dx * (out.values.sum(axis=0) - values.sum(axis=0))
        f_l = flux(values[0], params)   # transmissive ghosts
        f_r = flux(values[-1], params)
        assert np.allclose(change, dt * (f_l - f_r), atol=1e-12)

    def test_reports_inadmissible(self, params):
        values = np.tile([1.0, 0.0, 2.5], (8, 1))
        values[3] = [1.0, 3.0, 1.0]  # kinetic energy exceeds total: p < 0
        state = FvState(values=values, dx=0.01)
        with pytest.raises(InadmissibleStateError) as err:
            fv_step(state, params, dt=0.001)
        assert err.value.cell is not None


class TestRunReference:
    def test_constant_entropy_flat(self, params):
        values = np.tile([1.0, 0.2, 2.5], (32, 1))
        times, entropies, final = run_reference(values, 0.1, 0.5, params)
        assert np.max(np.abs(entropies - entropies[0])) < 1e-12
        assert final.t == pytest.approx(0.5)

    def test_sod_entropy_monotone(self, params):
        config = make_config("shocktube1")
        values, dx = fv_initial_values(config, 400)
        times, entropies, _ = run_reference(values, dx, 0.5, params)
        assert np.all(np.diff(entropies) <= 1e-12)

    def test_resolution_insensitivity(self, params):
        # at desk-scale resolution, halving dx moves the final entropy by
        # less than 1% of the problem's entropy scale
        config = make_config("shocktube1")
        finals = []
        e_scale = None
        for n in (3000, 6000):
            values, dx = fv_initial_values(config, n)
            _, entropies, _ = run_reference(values, dx, 0.4, params)
            finals.append(entropies[-1])
            e_scale = abs(entropies[0])
        assert abs(finals[0] - finals[1]) < 0.01 * e_scale

    def test_riemann_fan_rate_above_bound(self, params):
        # bound validity: the measured dissipation rate of the reference
        # solution across an isolated fan stays above the cone bound
        u_l = np.array([1.0, 0.0, 2.5])
        u_r = np.array([0.125, 0.0, 0.25])
        sigma, _, _, _ = dissipation_rate_bound(u_l, u_r, params)
        n = 2000
        values = np.tile(u_l, (n, 1))
        values[n // 2:] = u_r
        dx = 10.0 / n
        t_end = 0.5
        _, entropies, final = run_reference(values, dx, t_end, params)
        _, F_l = entropy_pair(u_l, params)
        _, F_r = entropy_pair(u_r, params)
        measured_rate = (entropies[-1] - entropies[0]) / t_end + (F_r - F_l)
        assert measured_rate >= sigma

    def test_wider_bounds_stay_valid(self, params, rng):
        # Monte-Carlo: widening the signal speeds never pushes the bound
        # above the measured fan rate. The pairs carry strong jumps so the
        # bound has slack over the scheme's own first-order dissipation.
        for _ in range(5):
            u_l = random_admissible(rng, rho_range=(0.8, 1.5),
                                    v_range=(-0.2, 0.2), p_range=(0.8, 1.5))
            factor = rng.uniform(0.25, 0.5)
            u_r = u_l * np.array([factor, factor, factor])
            n = 3000
            values = np.tile(u_l, (n, 1))
            values[n // 2:] = u_r
            dx = 10.0 / n
            t_end = 0.3
            _, entropies, _ = run_reference(values, dx, t_end, params)
            _, F_l = entropy_pair(u_l, params)
            _, F_r = entropy_pair(u_r, params)
            measured = (entropies[-1] - entropies[0]) / t_end + (F_r - F_l)
            from entropydg.predictor import hll_intermediate, rate_bound_core
            a_l, a_r = wave_speed_bounds(u_l, u_r, params)
            for s in (1.0, 1.5, 2.5):
                al, ar = s * a_l, s * a_r
                u_lr = hll_intermediate(u_l, u_r, flux(u_l, params),
                                        flux(u_r, params), al, ar)
                U_l, Fl = entropy_pair(u_l, params)
                U_r, Fr = entropy_pair(u_r, params)
                U_m, _ = entropy_pair(u_lr, params)
                sigma = rate_bound_core(U_l, U_r, U_m, Fl, Fr, al, ar)
                assert measured >= sigma - 1e-10
