import math

import numpy as np
import pytest

from blochball import diagnostics as dg
from blochball.errors import DomainError
from blochball.symbols import ScalarDiskMap, SymbolSpec, build_symbol, restrict_component, scalar_power

from conftest import cvec, random_interior

BUDGET = dg.SweepBudget(samples=512)


def scan_component_quantity(k, step=1e-5):
    # dense 1-D oracle for sup over (0,1) of (1-t^2) k t^k / (1-t^2k)
    t = np.arange(step, 1.0, step)
    vals = (1.0 - t**2) * k * t**k / (1.0 - t ** (2 * k))
    return float(np.max(vals))


class TestSchwarzPick:
    def test_identity_equality_cases(self):
        ident = build_symbol(SymbolSpec("identity"), 4)
        z = random_interior(np.random.default_rng(0), 1, 4, rmax=0.9)[0]
        slacks = dg.schwarz_pick_residuals(ident, z)
        assert abs(slacks.sch2) < 1e-12
        assert abs(slacks.sl2) < 1e-12
        assert slacks.sch3 >= -1e-12
        assert slacks.sch1 >= -1e-12

    def test_constant_symbol_skips(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.3, 0.0)}), 2)
        z = cvec(0.2, 0.1)
        slacks = dg.schwarz_pick_residuals(const, z)
        assert "sl2" in slacks.skipped  # R phi = 0
        assert slacks.sch3 > 0.0

    def test_all_families_nonnegative(self, rng, dim):
        specs = [
            SymbolSpec("identity"),
            SymbolSpec("power"),
            SymbolSpec("block_power"),
            SymbolSpec("product_com1"),
            SymbolSpec("automorphism", {"a": 0.4 * np.eye(dim)[0]}),
        ]
        for spec in specs:
            sym = build_symbol(spec, dim)
            zs = random_interior(rng, 2000, dim, rmax=0.995)
            slacks = dg.schwarz_pick_batch(sym, zs)
            for name, arr in slacks.items():
                vals = arr[~np.isnan(arr)]
                assert vals.size == 0 or vals.min() >= -1e-9, (spec.family, name, vals.min())


class TestQ1Q2:
    def test_identity_algebra(self, rng, dim):
        ident = build_symbol(SymbolSpec("identity"), dim)
        for z in random_interior(rng, 10, dim, rmax=0.99):
            r = np.linalg.norm(z)
            assert dg.q2(ident, z) == pytest.approx(r**2, abs=1e-10)
            assert dg.q1(ident, z) == pytest.approx(r * math.sqrt(1.0 - r**2), abs=1e-10)

    def test_constant_is_zero(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.4, 0.0)}), 2)
        z = cvec(0.5, 0.2)
        assert dg.q1(const, z) == 0.0
        assert dg.q2(const, z) == 0.0

    def test_boundary_guard_finite(self):
        ident = build_symbol(SymbolSpec("identity"), 2)
        z = cvec(1.0 - 5e-14, 0.0)
        assert math.isfinite(dg.q2(ident, z))


class TestBoundarySweep:
    def test_identity_q2_bounded_away_profile(self):
        ident = build_symbol(SymbolSpec("identity"), 4)
        est = dg.boundary_sweep(ident, "q2", "phi", BUDGET)
        assert est.trend == "bounded_away"
        assert not est.vacuous
        for b in est.per_bin:
            if b.count == 0:
                continue
            assert b.sup >= (1.0 - 0.02) * b.high**2
            assert b.sup <= max(b.high**2, 1.0) * (1.0 + 0.02)

    def test_identity_q1_to_zero(self):
        ident = build_symbol(SymbolSpec("identity"), 4)
        est = dg.boundary_sweep(ident, "q1", "phi", BUDGET)
        assert est.trend == "to_zero"

    def test_product_vacuous(self):
        prod = build_symbol(SymbolSpec("product_com1"), 8)
        for quantity in ("q1", "q2"):
            est = dg.boundary_sweep(prod, quantity, "phi", BUDGET)
            assert est.trend == "to_zero"
            assert est.vacuous

    def test_witnesses_reevaluate(self):
        ident = build_symbol(SymbolSpec("identity"), 4)
        est = dg.boundary_sweep(ident, "q2", "phi", BUDGET)
        for b in est.per_bin:
            if b.count == 0:
                continue
            val = dg.q2(ident, b.witness)
            assert val == pytest.approx(b.sup, abs=1e-9)

    def test_rejects_bad_arguments(self):
        ident = build_symbol(SymbolSpec("identity"), 2)
        with pytest.raises(ValueError):
            dg.boundary_sweep(ident, "q3", "phi")
        with pytest.raises(ValueError):
            dg.boundary_sweep(ident, "q1", "radial")


class TestComponentCriterion:
    def test_power_k4_matches_dense_scan(self):
        power = build_symbol(SymbolSpec("power"), 8)
        oracle = scan_component_quantity(4)
        val, witness = dg.component_criterion(power, 3, BUDGET)  # exponent 4
        assert abs(val - oracle) < 1e-3
        assert val >= (1.0 - 1.0 / 4.0) ** 2 - 1e-9

    def test_power_lower_bound_all_k(self):
        n = 20
        power = build_symbol(SymbolSpec("power"), n)
        trend = dg.component_trend(power, BUDGET)
        for k in range(1, n):  # exponent k+1
            expo = k + 1
            bound = (1.0 - 1.0 / expo) ** (expo / 2.0)
            assert trend.per_bin[k].sup >= bound - 1e-9
        assert trend.trend == "bounded_away"

    def test_constant_components_zero(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.3, 0.0)}), 2)
        val, _ = dg.component_criterion(const, 0, BUDGET)
        assert val == 0.0

    def test_product_trend_to_zero(self):
        prod = build_symbol(SymbolSpec("product_com1"), 16)
        trend = dg.component_trend(prod, BUDGET)
        assert trend.trend == "to_zero"


class TestScalarCriterion:
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_even_power_limit_near_one(self, k):
        est = dg.scalar_criterion(scalar_power(2 * k), BUDGET)
        assert est.trend == "bounded_away"
        last = est.last_nonempty(1)[0]
        assert 0.9 <= last.sup <= 1.0 + 1e-9

    def test_scaled_map_vacuous(self):
        est = dg.scalar_criterion(ScalarDiskMap(lambda l: 0.5 * l, deriv=lambda l: 0.5, sup_norm_bound=0.5), BUDGET)
        assert est.trend == "to_zero"
        assert est.vacuous

    def test_square_dense_scan_oracle(self):
        t = np.arange(1e-5, 1.0, 1e-5)
        oracle = np.max((1.0 - t**2) * 2.0 * t / (1.0 - t**4))
        est = dg.scalar_criterion(scalar_power(2), BUDGET)
        last = est.last_nonempty(1)[0]
        assert last.sup == pytest.approx(oracle, abs=2e-3)

    def test_block_power_restrictions(self):
        sym = build_symbol(SymbolSpec("block_power"), 8)  # blocks {0,1},{2,3},{4..7}
        inside = dg.scalar_criterion(restrict_component(sym, 2, 5), BUDGET)  # k=3, 2k=6
        assert inside.trend == "bounded_away"
        outside = dg.scalar_criterion(restrict_component(sym, 2, 0), BUDGET)
        assert outside.trend == "to_zero"
        assert outside.vacuous


class TestXiDirection:
    def test_unit_norm_and_pairing(self, rng):
        power = build_symbol(SymbolSpec("power"), 4)
        for z in random_interior(rng, 20, 4, rmax=0.9):
            if np.linalg.norm(power(z)) < 1e-8 or np.linalg.norm(power.radial(z)) < 1e-8:
                continue
            xi, slack = dg.xi_direction(power, z)
            v = power(z)
            assert np.linalg.norm(xi) == pytest.approx(1.0, abs=1e-12)
            assert complex(np.vdot(xi, v)) == pytest.approx(np.linalg.norm(v) ** 2, abs=1e-12)
            assert slack >= -1e-9

    def test_parallel_radial_degenerate_alignment(self):
        # linear one-vector family: R phi is parallel to phi everywhere
        sym = build_symbol(SymbolSpec("linear", {"xi": [cvec(0.7, 0.0)]}), 2)
        z = cvec(0.5, 0.1)
        xi, slack = dg.xi_direction(sym, z)
        assert np.linalg.norm(xi) == pytest.approx(1.0, abs=1e-12)
        assert slack >= -1e-9

    def test_dimension_one_degenerate(self):
        sym = build_symbol(SymbolSpec("identity"), 1)
        with pytest.raises(DomainError):
            dg.xi_direction(sym, cvec(0.5))

    def test_random_sweep(self, rng, dim):
        for spec in [SymbolSpec("power"), SymbolSpec("block_power")]:
            sym = build_symbol(spec, dim)
            count = 0
            for z in random_interior(rng, 300, dim, rmax=0.95):
                if np.linalg.norm(sym(z)) < 1e-6 or np.linalg.norm(sym.radial(z)) < 1e-6:
                    continue
                _, slack = dg.xi_direction(sym, z)
                assert slack >= -1e-9
                count += 1
            assert count > 100


class TestCompactnessProxy:
    def test_constant_covers_with_one_ball(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.3, 0.0)}), 2)
        proxy = dg.compactness_proxy_c0(const, 0.9, BUDGET)
        assert all(full == 1 for (_, full) in proxy.covering_numbers.values())
        assert proxy.consistent

    def test_linear_tail_bounded_by_coefficient_sum(self):
        n = 16
        xi = [np.eye(n)[k] / (k + 2.0) for k in range(n)]
        sym = build_symbol(SymbolSpec("linear", {"xi": xi}), n)
        proxy = dg.compactness_proxy_c0(sym, 0.9, BUDGET)
        for cut, energy in proxy.tail_energy.items():
            bound = sum(1.0 / (k + 2.0) ** 2 for k in range(cut, n))
            assert energy <= bound * 0.81 + 1e-12  # |<z, xi_k>|^2 <= |xi_k|^2 delta^2

    def test_orthonormal_image_flags_growth(self):
        n = 16
        sym = build_symbol(SymbolSpec("linear", {"xi": list(np.eye(n))}), n)
        proxy = dg.compactness_proxy_c0(sym, 0.9, BUDGET)
        assert not proxy.saturated
        assert not proxy.consistent

    def test_rejects_bad_delta(self):
        sym = build_symbol(SymbolSpec("identity"), 2)
        with pytest.raises(DomainError):
            dg.compactness_proxy_c0(sym, 1.5, BUDGET)


class TestB0Membership:
    def test_constant_to_zero(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.3, 0.0)}), 2)
        assert dg.b0_membership(const, BUDGET).trend == "to_zero"

    def test_linear_to_zero(self):
        n = 8
        sym = build_symbol(SymbolSpec("linear", {"xi": [0.5 * e for e in np.eye(n)]}), n)
        assert dg.b0_membership(sym, BUDGET).trend == "to_zero"

    def test_identity_to_zero(self):
        ident = build_symbol(SymbolSpec("identity"), 4)
        assert dg.b0_membership(ident, BUDGET).trend == "to_zero"


class TestCompactnessReport:
    CONFIG = dg.DiagnosticsConfig(sweep=BUDGET)

    def test_identity_noncompact(self):
        verdict, estimates = dg.compactness_report(build_symbol(SymbolSpec("identity"), 8), self.CONFIG)
        assert verdict.verdict == "noncompact_necessary_violated"
        assert estimates["c2"].trend == "bounded_away"
        assert estimates["c1"].trend == "to_zero"

    def test_power_noncompact_via_c3(self):
        verdict, estimates = dg.compactness_report(build_symbol(SymbolSpec("power"), 8), self.CONFIG)
        assert verdict.verdict == "noncompact_necessary_violated"
        assert estimates["c3"].trend == "bounded_away"

    def test_block_power_noncompact_both_variants(self):
        for variant in ("sum", "pow"):
            sym = build_symbol(SymbolSpec("block_power", {"variant": variant}), 8)
            verdict, _ = dg.compactness_report(sym, self.CONFIG)
            assert verdict.verdict == "noncompact_necessary_violated"
            assert ("c4", "necessary", "fail") in verdict.reasons

    def test_product_compact(self):
        verdict, _ = dg.compactness_report(build_symbol(SymbolSpec("product_com1"), 8), self.CONFIG)
        assert verdict.verdict == "compact_sufficient"

    def test_unit_norm_linear_fails_q2(self):
        sym = build_symbol(SymbolSpec("linear", {"xi": list(np.eye(4))}), 4)
        verdict, estimates = dg.compactness_report(sym, self.CONFIG)
        assert verdict.verdict == "noncompact_necessary_violated"
        assert estimates["c2"].trend == "bounded_away"

    def test_verdict_invariants(self):
        for spec, n in [(SymbolSpec("identity"), 4), (SymbolSpec("product_com1"), 8)]:
            verdict, _ = dg.compactness_report(build_symbol(spec, n), self.CONFIG)
            if verdict.verdict == "compact_sufficient":
                assert any(r[1] == "sufficient" and r[2] == "pass" for r in verdict.reasons)
                assert not any(r[1] == "necessary" and r[2] == "fail" for r in verdict.reasons)
            if verdict.verdict == "noncompact_necessary_violated":
                assert any(r[1] == "necessary" and r[2] == "fail" for r in verdict.reasons)

    def test_mode_agreement_for_vanishing_radial_families(self):
        # origin-fixing maps with vanishing weighted radial derivative:
        # the two sweep modes must reach the same trend verdict
        n = 8
        fams = [
            build_symbol(SymbolSpec("linear", {"xi": [0.5 * e for e in np.eye(n)]}), n),
            build_symbol(SymbolSpec("linear", {"xi": list(np.eye(n))}), n),
            build_symbol(SymbolSpec("product_com1"), n),
        ]
        for sym in fams:
            assert dg.b0_membership(sym, BUDGET).trend == "to_zero"
            for quantity in ("q1", "q2"):
                phi_mode = dg.boundary_sweep(sym, quantity, "phi", BUDGET)
                z_mode = dg.boundary_sweep(sym, quantity, "z", BUDGET)
                assert phi_mode.trend == z_mode.trend, (sym.label, quantity)


class TestComponentBoundarySweep:
    def test_little_bloch_diagonal_passes(self):
        # scaled maps with derivative bounded and sup norm below one: the
        # per-component boundary ratio never reaches high bins
        sym = build_symbol(
            SymbolSpec("diagonal", {"maps": [(0.5 + 0j, 1), (0.5 + 0j, 2), (0.5 + 0j, 3), (0.5 + 0j, 4)]}),
            4,
        )
        for k in range(4):
            est = dg.component_boundary_sweep(sym, k, BUDGET)
            assert est.trend == "to_zero"
            assert est.vacuous

    def test_power_component_fails_boundary_limit(self):
        power = build_symbol(SymbolSpec("power"), 4)
        est = dg.component_boundary_sweep(power, 3, BUDGET)  # exponent 4
        assert est.trend == "bounded_away"

    def test_diagonal_displayed_bound_on_radial_sweeps(self):
        # the ratio is dominated by (1-|l|^2)|F'(l)| / (1-supF^2) along rays
        maps = [(0.5 + 0j, 2), (0.5 + 0j, 3)]
        sym = build_symbol(SymbolSpec("diagonal", {"maps": maps}), 2)
        lam = np.linspace(0.01, 0.999, 400).astype(np.complex128)
        for k, (c, m) in enumerate(maps):
            zs = np.zeros((lam.size, 2), dtype=np.complex128)
            zs[:, k] = lam
            v = sym.value_batch(zs)[:, k]
            r = sym.radial_batch(zs)[:, k]
            ratio = (1.0 - np.abs(lam) ** 2) * np.abs(r) / (1.0 - np.abs(v) ** 2)
            fprime = abs(c) * m * np.abs(lam) ** (m - 1)
            bound = (1.0 - np.abs(lam) ** 2) * fprime / (1.0 - abs(c) ** 2)
            assert np.all(ratio <= bound + 1e-12)


class TestRadialOfSymbolFunction:
    def test_module_level_wrapper(self, rng):
        from blochball.symbols import radial_of_symbol

        sym = build_symbol(SymbolSpec("power"), 4)
        z = random_interior(rng, 1, 4)[0]
        assert np.allclose(radial_of_symbol(sym, z), sym.radial(z))


class TestVacuityHandling:
    def test_constant_symbol_sweeps_vacuous(self):
        const = build_symbol(SymbolSpec("constant", {"c": cvec(0.3, 0.0)}), 2)
        for quantity in ("q1", "q2"):
            est = dg.boundary_sweep(const, quantity, "phi", BUDGET)
            assert est.trend == "to_zero"
            assert est.vacuous


class TestDiagonalFamilyVerdicts:
    def test_noncompact_scalar_component_fails_pairing_limit(self):
        # one coordinate carries lambda^2 (non-compact scalar operator); the
        # diagonal map must then fail the pairing limit
        sym = build_symbol(SymbolSpec("diagonal", {"maps": [(None, 2), (0.5 + 0j, 1)]}), 2)
        est = dg.boundary_sweep(sym, "q2", "phi", BUDGET)
        assert est.trend == "bounded_away"
        verdict, _ = dg.compactness_report(sym, dg.DiagnosticsConfig(sweep=BUDGET))
        assert verdict.verdict == "noncompact_necessary_violated"

    def test_uniformly_small_maps_pass_vacuously(self):
        sym = build_symbol(SymbolSpec("diagonal", {"maps": [(0.4 + 0j, 1), (0.4 + 0j, 2)]}), 2)
        for quantity in ("q1", "q2"):
            est = dg.boundary_sweep(sym, quantity, "phi", BUDGET)
            assert est.trend == "to_zero"
            assert est.vacuous
