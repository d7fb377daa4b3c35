from __future__ import annotations

import math

import numpy as np
import pytest

import naive_ops as ref
from fchsim.energy import ModelParams, energy_split
from fchsim.grid import CellField, GridSpec, cell_centers, mean, norm
from fchsim.poisson import SpectralPlan, inv_neg_laplacian
from fchsim.psd import PsdConfig
from fchsim.scheme import Hooks, StepError, apply_N, run, time_step


def make(m=16, L=3.2, eps=0.18, eta=1.0, A=1.0, s=1e-3):
    g = GridSpec(m, L)
    return g, ModelParams(eps=eps, eta=eta, A=A, s=s, grid=g), SpectralPlan.create(g)


def benchmark_field(grid):
    x, y = cell_centers(grid)
    a = np.sin(2 * np.pi * x / grid.L) + np.sin(2 * np.pi * y / grid.L)
    return CellField(grid, 2 * np.exp(a - 2) + 2.2 * np.exp(-a - 2) - 1)


def random_mix(grid, seed):
    rng = np.random.default_rng(seed)
    return CellField(grid, 0.5 + 0.05 * (2 * rng.random((grid.m, grid.m)) - 1))


class TestApplyN:
    def test_zero(self):
        g, p, plan = make()
        z = CellField.zeros(g)
        assert np.all(apply_N(z, z, p, plan).values == 0.0)

    @pytest.mark.parametrize("c", [0.5, -0.8])
    def test_constant_state(self, c):
        g, p, plan = make(eps=0.21, eta=0.6, A=1.4)
        phi = CellField.full(g, c)
        out = apply_N(phi, phi, p, plan)
        em2 = 1.0 / p.eps**2
        want = p.s * (3 * em2 * c**5 + 4 * p.A * c**3 + (em2 + p.eta) * c)
        np.testing.assert_allclose(out.values, want, rtol=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_naive_assembly(self, seed):
        g, p, plan = make(m=8)
        rng = np.random.default_rng(seed)
        base = 0.4 * rng.standard_normal((8, 8))
        gf = CellField(g, base)
        shift = rng.standard_normal((8, 8))
        phi = CellField(g, base + 0.1 * (shift - shift.mean()))

        def inv_lap(a):
            return inv_neg_laplacian(plan, CellField(g, a - a.mean())).values

        want = ref.apply_n(phi.values, gf.values, p.s, p.eps, p.eta, p.A, g.h, inv_lap)
        got = apply_N(phi, gf, p, plan).values
        np.testing.assert_allclose(got, want, atol=1e-11 * max(1.0, np.max(np.abs(want))))

    def test_mean_mismatch_raises(self):
        g, p, plan = make()
        with pytest.raises(ValueError):
            apply_N(CellField.full(g, 1.0), CellField.zeros(g), p, plan)


class TestTimeStep:
    def test_zero_data_is_fixed_point(self):
        g, p, plan = make()
        st = time_step(CellField.zeros(g), p, plan, PsdConfig())
        assert np.all(st.phi_next.values == 0.0)
        assert st.report.iters == 0

    def test_constant_state_is_equilibrium(self):
        g, p, plan = make(m=16, s=0.5)
        st = time_step(CellField.full(g, 0.3), p, plan, PsdConfig())
        np.testing.assert_allclose(st.phi_next.values, 0.3, rtol=0, atol=1e-12)

    def test_benchmark_step_dissipates_and_conserves(self):
        m, L = 32, 3.2
        g = GridSpec(m, L)
        p = ModelParams(eps=0.18, eta=1.0, A=1.0, s=0.1 * (L / m) ** 2, grid=g)
        plan = SpectralPlan.create(g)
        phi0 = benchmark_field(g)
        st = time_step(phi0, p, plan, PsdConfig())
        assert st.energy_after <= st.energy_before + 1e-12 * abs(st.energy_before)
        assert st.energy_after < st.energy_before  # strictly away from equilibrium
        assert st.mass == pytest.approx(mean(phi0), abs=1e-12 * (1 + abs(mean(phi0))))

    @pytest.mark.parametrize("s", [1e-5, 1e-3, 1e-1, 1.0])
    def test_dissipation_without_step_restriction(self, s):
        g, p, plan = make(m=32, L=6.4, s=s)
        phi = benchmark_field(g)
        st = time_step(phi, p, plan, PsdConfig(max_iters=2000))
        assert st.energy_after <= st.energy_before + 1e-12 * abs(st.energy_before)

    def test_residual_optimality_at_accepted_state(self):
        g, p, plan = make(m=16)
        cfg = PsdConfig()
        st = time_step(benchmark_field(g), p, plan, cfg)
        assert st.report.residual_history[-1] <= cfg.tol_residual_inf

    def test_two_half_steps_versus_full_step(self):
        # First-order accuracy probe: the Richardson gap shrinks ~4x when
        # the step halves.  The data keeps every active mode non-stiff
        # (s times its decay rate well below one), otherwise the asymptotic
        # regime is unreachable at practical step sizes.
        g = GridSpec(32, 3.2)
        plan = SpectralPlan.create(g)
        x, y = cell_centers(g)
        wave = np.sin(2 * np.pi * x / g.L) + np.sin(2 * np.pi * y / g.L)
        phi0 = CellField(g, 0.02 * wave + 0.05)
        cfg = PsdConfig(tol_residual_inf=1e-13)

        def gap(s):
            p_full = ModelParams(eps=0.3, eta=1.0, A=1.0, s=s, grid=g)
            p_half = ModelParams(eps=0.3, eta=1.0, A=1.0, s=s / 2, grid=g)
            full = time_step(phi0, p_full, plan, cfg).phi_next
            half = time_step(phi0, p_half, plan, cfg).phi_next
            half2 = time_step(half, p_half, plan, cfg).phi_next
            return norm(CellField(g, full.values - half2.values), 2)

        g1 = gap(1e-3)
        g2 = gap(5e-4)
        assert g1 / g2 == pytest.approx(4.0, rel=0.15)


class TestRun:
    def test_zero_steps_returns_initial_field(self):
        g, p, plan = make()
        phi0 = random_mix(g, 0)
        out = run(phi0, 0, p, plan, PsdConfig())
        assert out.steps == 0
        np.testing.assert_array_equal(out.phi.values, phi0.values)
        assert len(out.rows) == 1
        assert out.rows[0].step == 0

    def test_energy_series_monotone_and_mass_constant(self):
        g, p, plan = make(m=32, L=3.2, s=1e-4)
        phi0 = random_mix(g, 1)
        out = run(phi0, 100, p, plan, PsdConfig())
        energies = [r.energy for r in out.rows]
        assert all(b <= a + 1e-12 * abs(a) for a, b in zip(energies, energies[1:]))
        m0 = out.rows[0].mass
        assert all(abs(r.mass - m0) <= 1e-12 for r in out.rows)

    def test_hook_cadence(self):
        g, p, plan = make(m=16, s=1e-4)
        phi0 = random_mix(g, 2)
        snaps, series = [], []
        hooks = Hooks(
            series=lambda row: series.append(row.step),
            snapshot=lambda k, t, phi: snaps.append(k),
            series_every=2,
            snapshot_every=5,
        )
        out = run(phi0, 10, p, plan, PsdConfig(), hooks)
        assert series == [0, 2, 4, 6, 8, 10]
        assert snaps == [0, 5, 10]
        assert [r.step for r in out.rows] == series

    def test_final_step_always_sampled(self):
        g, p, plan = make(m=16, s=1e-4)
        phi0 = random_mix(g, 3)
        out = run(phi0, 7, p, plan, PsdConfig(), Hooks(series_every=3))
        assert [r.step for r in out.rows] == [0, 3, 6, 7]

    def test_step_error_carries_index(self):
        g, p, plan = make(m=16, s=1e-2)
        phi0 = benchmark_field(g)
        with pytest.raises(StepError) as exc:
            run(phi0, 5, p, plan, PsdConfig(max_iters=1))
        assert exc.value.step == 1

    def test_series_rows_time_axis(self):
        g, p, plan = make(m=16, s=2e-4)
        out = run(random_mix(g, 4), 4, p, plan, PsdConfig())
        times = [r.time for r in out.rows]
        np.testing.assert_allclose(times, [0, 2e-4, 4e-4, 6e-4, 8e-4], rtol=1e-14)
