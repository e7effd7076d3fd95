import numpy as np
import pytest

from qbattery import ModelSpec, ValidationError, chain_spec, fit_exponent, sweep_scaling
from qbattery.sweeps import (
    chain_analytic_quantities,
    quantities_for,
    trajectory_quantities,
)
from qbattery.trajectory import run_trajectory


class TestExponentFit:
    def test_exact_power_law(self):
        ns = [4, 8, 16, 32]
        values = [2.5 * n**1.7 for n in ns]
        result = fit_exponent(ns, values, "demo")
        assert result.exponent == pytest.approx(1.7, abs=1e-12)
        assert result.residual < 1e-12
        assert result.excluded == ()

    def test_nonpositive_values_dropped(self):
        result = fit_exponent([2, 4, 8, 16], [0.0, 1.0, 2.0, 4.0])
        assert result.excluded == (2,)
        assert result.exponent == pytest.approx(1.0, abs=1e-12)

    def test_too_few_usable_points(self):
        with pytest.raises(ValidationError):
            fit_exponent([2, 4, 8], [0.0, -1.0, 3.0])

    def test_small_size_transient_excluded(self):
        ns = [4, 8, 16, 32, 64]
        values = [50.0] + [n**2.0 for n in ns[1:]]  # first point off the law
        result = fit_exponent(ns, values)
        assert 4 in result.excluded
        assert result.exponent == pytest.approx(2.0, abs=1e-9)


class TestSweep:
    def test_parallel_average_power_is_linear(self):
        spec = ModelSpec(family="parallel", n_cells=2, lam=1.0)
        result, rows = sweep_scaling(spec, [2, 4, 6, 8], "avg_power", steps=300)
        assert result.exponent == pytest.approx(1.0, abs=0.01)
        assert len(rows) == 4 and all("t_f" in row for row in rows)

    def test_input_validation(self):
        spec = ModelSpec(family="parallel", n_cells=2)
        with pytest.raises(ValidationError):
            sweep_scaling(spec, [2, 4, 6], "avg_power")
        with pytest.raises(ValidationError):
            sweep_scaling(spec, [2, 4, 4, 8], "avg_power")
        with pytest.raises(ValidationError):
            sweep_scaling(spec, [2, 4, 6, 8], "not_a_quantity")

    def test_hybrid_resizing_keeps_blocks(self):
        spec = ModelSpec(family="hybrid", n_cells=4, lam=1.0, q=2, r=2)
        result, rows = sweep_scaling(spec, [4, 6, 8, 10], "avg_power", steps=200)
        assert result.exponent == pytest.approx(1.0, abs=0.02)

    def test_analytic_path_matches_dense(self):
        spec = chain_spec("xy_nn", 8)
        dense = quantities_for(spec, lam_t_max=6.0, steps=400, path="dense")
        analytic = quantities_for(spec, lam_t_max=6.0, steps=400, path="analytic")
        for key in ("energy_at_tf", "avg_power", "avg_var_battery", "avg_fisher_energy",
                    "cos_theta_timeavg", "cos_theta_timeavg_heis"):
            assert analytic[key] == pytest.approx(dense[key], rel=1e-6), key

    def test_analytic_path_reserved_for_chains(self):
        with pytest.raises(ValidationError):
            quantities_for(ModelSpec(family="lmg", n_cells=6, lam=5.0), path="analytic")

    def test_custom_multirange_chain_cannot_resize(self):
        spec = ModelSpec(
            family="jw_chain", n_cells=8, lambdas=(0.3, 0.9), gammas=(1.0, 0.1)
        )
        with pytest.raises(ValidationError):
            sweep_scaling(spec, [8, 10, 12, 14], "avg_power", steps=100)


class TestQuantities:
    def test_trajectory_quantities_consistency(self):
        traj = run_trajectory(ModelSpec(family="parallel", n_cells=4), steps=400)
        out = trajectory_quantities(traj)
        assert out["energy_at_tf"] == pytest.approx(4.0, abs=1e-8)
        assert out["avg_power"] == pytest.approx(4.0 / (np.pi / 2), rel=1e-6)
        assert out["cos_theta_timeavg"] == pytest.approx(2 * np.sqrt(2) / np.pi, rel=1e-3)
        assert out["initial_var_charger"] == pytest.approx(4.0, rel=1e-10)

    def test_cavity_quantities_include_entropy(self):
        out = quantities_for(
            ModelSpec(family="dicke", n_cells=3, lam=0.5), lam_t_max=3.0, steps=200
        )
        assert 0.0 <= out["final_battery_entropy"] <= 1.0

    def test_chain_quantities_at_scale(self):
        out = chain_analytic_quantities(chain_spec("xx_nn", 100), steps=400)
        assert out["energy_at_tf"] > 0
        assert np.isfinite(out["avg_fisher_energy"])

    def test_chain_relative_spread_decays_as_root_n(self):
        ns = [20, 50, 100, 200]
        for variant in ("xx_nn", "xy_nn"):
            rels = [
                chain_analytic_quantities(chain_spec(variant, n), steps=600)["rel_final_std"]
                for n in ns
            ]
            fit = fit_exponent(ns, rels, "rel_final_std")
            assert fit.exponent == pytest.approx(-0.5, abs=0.15)

    def test_collective_relative_spread_does_not_decay(self):
        # Needs the full sweep range: the small-N transient is excluded by
        # the residual rule only when more than 4 points remain.
        spec = ModelSpec(family="lmg", n_cells=10, lam=5.0, gamma=-1.0)
        result, _ = sweep_scaling(spec, [10, 20, 30, 40, 50, 60], "rel_final_std", steps=1000)
        assert result.exponent >= -0.1
