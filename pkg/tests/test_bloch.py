import math

import numpy as np
import pytest

from blochball import bloch, holo
from blochball.sampling import SearchBudget

from conftest import cvec, random_interior


def scan_radial_linear():
    # one-variable oracle: max of t (1 - t^2) over a dense grid
    t = np.linspace(0.0, 1.0, 200001)
    return float(np.max(t * (1.0 - t**2)))


class TestEstimateSeminorm:
    def test_linear_derivative_attains_one(self):
        f = holo.coordinate(0, 4)
        est = bloch.estimate_seminorm(f, "derivative", SearchBudget(samples=50, depth=6))
        assert 0.999 <= est.value <= 1.0 + 1e-12
        assert est.reevaluate(f) == pytest.approx(est.value, abs=1e-9)

    def test_linear_radial_value(self):
        oracle = scan_radial_linear()
        assert oracle == pytest.approx(2.0 / (3.0 * math.sqrt(3.0)), abs=1e-9)
        f = holo.coordinate(0, 4)
        est = bloch.estimate_seminorm(f, "radial", SearchBudget(samples=100, depth=6))
        assert est.value == pytest.approx(oracle, rel=0.01)
        assert est.value <= oracle + 1e-9

    def test_constant_all_kinds_zero(self):
        f = holo.constant_fn(2.5, 3)
        for kind in bloch.SEMINORM_KINDS:
            est = bloch.estimate_seminorm(f, kind, SearchBudget(samples=20, depth=4, polish_iters=0))
            assert est.value == pytest.approx(0.0, abs=1e-12)

    def test_monotone_in_budget(self):
        f = holo.monomial({0: 2}, 4)
        small = bloch.estimate_seminorm(f, "derivative", SearchBudget(samples=20, depth=4), seed=7)
        large = bloch.estimate_seminorm(f, "derivative", SearchBudget(samples=200, depth=8), seed=7)
        assert large.value >= small.value - 1e-9

    def test_metric_ratio_one_dimensional_identity(self):
        f = holo.coordinate(0, 1)
        inv = bloch.estimate_seminorm(f, "invariant", SearchBudget(samples=100, depth=6))
        ratio = bloch.estimate_seminorm(f, "metric_ratio", SearchBudget(samples=100, depth=6))
        assert ratio.value == pytest.approx(inv.value, rel=0.05)
        assert ratio.reevaluate(f) == pytest.approx(ratio.value, abs=1e-9)

    def test_ordering_derivative_le_invariant(self, rng):
        for known in bloch.known_families(4, rng):
            der = bloch.estimate_seminorm(known.f, "derivative", SearchBudget(samples=60, depth=6), seed=3)
            inv = bloch.estimate_seminorm(
                known.f,
                "invariant",
                SearchBudget(samples=60, depth=6),
                seed=3,
                extra_starts=[der.argmax],
            )
            assert der.value <= inv.value * (1.0 + 1e-6)
            assert inv.value <= bloch.EQUIV_FACTOR * known.bloch_seminorm + 1e-6

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            bloch.estimate_seminorm(holo.coordinate(0, 2), "sup")


class TestPointwiseValues:
    def test_invariant_rows_match_scalar_path(self, rng, dim):
        f = holo.log_kernel(random_interior(rng, 1, dim, rmax=0.9)[0])
        zs = random_interior(rng, 20, dim, rmax=0.9)
        vals = bloch.pointwise_values(f, zs, "invariant")
        for z, v in zip(zs, vals):
            assert v == pytest.approx(np.linalg.norm(holo.invariant_gradient(f, z)), abs=1e-10)

    def test_origin_rows(self, dim):
        f = holo.coordinate(0, dim)
        vals = bloch.pointwise_values(f, np.zeros((1, dim)), "invariant")
        assert vals[0] == pytest.approx(1.0)


class TestEvalBound:
    def test_origin(self):
        assert bloch.eval_bound(np.zeros(3)).L_x == 1.0

    def test_crossover_at_tanh_one(self):
        r = math.tanh(1.0)
        x = cvec(r, 0.0)
        assert bloch.eval_bound(x).L_x == pytest.approx(1.0, abs=1e-12)

    def test_value_at_09(self):
        x = cvec(0.9, 0.0)
        assert bloch.eval_bound(x).L_x == pytest.approx(0.5 * math.log(19.0), abs=1e-12)
        assert bloch.eval_bound(x).L_x == pytest.approx(1.47222, abs=1e-5)

    def test_bounds_known_families(self, rng):
        for known in bloch.known_families(4, rng):
            if known.inv_seminorm is None:
                continue
            f = known.f
            f0 = abs(f(np.zeros(4)))
            for x in random_interior(rng, 50, 4, rmax=0.95):
                lx = bloch.eval_bound(x).L_x
                assert abs(f(x)) <= lx * (known.inv_seminorm + f0) + 1e-9


class TestLipschitzConstant:
    def test_half(self):
        assert bloch.lipschitz_constant(0.5) == pytest.approx(
            4.0 * (1.0 + math.sqrt(31.0) / 2.0) * 25.0, rel=1e-12
        )
        assert bloch.lipschitz_constant(0.5) == pytest.approx(378.39, abs=0.01)

    def test_zero(self):
        assert bloch.lipschitz_constant(0.0) == pytest.approx(
            2.0 * (1.0 + math.sqrt(31.0) / 2.0) * 5.0, rel=1e-12
        )
        assert bloch.lipschitz_constant(0.0) == pytest.approx(37.84, abs=0.01)

    def test_large_delta_flagged_finite(self):
        val = bloch.lipschitz_constant(0.9999)
        assert math.isfinite(val)
        assert val == bloch.lipschitz_constant(bloch.LIPSCHITZ_DELTA_CAP)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            bloch.lipschitz_constant(1.0)
        with pytest.raises(ValueError):
            bloch.lipschitz_constant(-0.1)

    def test_gradient_lipschitz_inequality_sampled(self, rng):
        delta = 0.5
        c = bloch.lipschitz_constant(delta)
        for known in bloch.known_families(4, rng):
            f = known.f
            for _ in range(30):
                x, xp = random_interior(rng, 2, 4, rmax=delta)
                y, yp = random_interior(rng, 2, 4, rmax=1.0 - 1e-9)
                lhs = abs(
                    np.sum(y * holo.gradient(f, x)) - np.sum(yp * holo.gradient(f, xp))
                )
                rhs = c * known.bloch_seminorm * (
                    np.linalg.norm(x - xp) + (1.0 - delta) / 2.0 * np.linalg.norm(y - yp)
                )
                assert lhs <= rhs + 1e-9


class TestBoundsOnKnownFamilies:
    def test_growth_bound(self, rng):
        for known in bloch.known_families(4, rng):
            f = known.f
            f0 = f(np.zeros(4))
            for x in random_interior(rng, 50, 4, rmax=0.97):
                r = np.linalg.norm(x)
                bound = 0.5 * known.bloch_seminorm * math.log((1.0 + r) / (1.0 - r))
                assert abs(f(x) - f0) <= bound + 1e-9

    def test_hinf_bound_bounded_families(self, rng):
        # derivative semi-norm <= sup norm for bounded monomials
        for known in bloch.known_families(4, rng):
            if known.sup_norm is None or known.bloch_seminorm >= known.sup_norm:
                continue
            est = bloch.estimate_seminorm(
                known.f, "derivative", SearchBudget(samples=60, depth=6), seed=5
            )
            assert est.value <= known.sup_norm + 1e-6

    def test_metric_characterization_pairs(self, rng):
        # |f(x) - f(y)| <= inv-seminorm * beta(x, y) for the family with known value
        from blochball.ball import hyperbolic_pairs

        for known in bloch.known_families(4, rng):
            if known.inv_seminorm is None:
                continue
            xs = random_interior(rng, 100, 4, rmax=0.95)
            ys = random_interior(rng, 100, 4, rmax=0.95)
            beta = hyperbolic_pairs(xs, ys)
            diff = np.abs(known.f.value_batch(xs) - known.f.value_batch(ys))
            assert np.all(diff <= known.inv_seminorm * beta + 1e-9)


class TestDualCharacterizationProbe:
    def test_metric_recovered_as_lower_bound_over_unit_family(self, rng):
        # sup over functions with invariant semi-norm <= 1 of |f(x)-f(y)|
        # stays below beta and approaches it along linear probes
        from blochball.ball import hyperbolic_pairs

        n = 4
        fams = [k.f for k in bloch.known_families(n, rng) if k.inv_seminorm == 1.0]
        xs = random_interior(rng, 200, n, rmax=0.9)
        ys = random_interior(rng, 200, n, rmax=0.9)
        beta = hyperbolic_pairs(xs, ys)
        best = np.zeros(len(xs))
        for f in fams:
            best = np.maximum(best, np.abs(f.value_batch(xs) - f.value_batch(ys)))
        assert np.all(best <= beta + 1e-9)
        assert np.max(best / np.maximum(beta, 1e-12)) > 0.5  # probe is not vacuous

    def test_norm_chain_outer_inequalities(self, rng):
        from blochball.ball import hyperbolic_pairs, pseudo_hyperbolic_pairs

        n = 4
        xs = random_interior(rng, 500, n, rmax=0.97)
        ys = random_interior(rng, 500, n, rmax=0.97)
        rho = pseudo_hyperbolic_pairs(xs, ys)
        beta = hyperbolic_pairs(xs, ys)
        half_dist = 0.5 * np.linalg.norm(xs - ys, axis=1)
        assert np.all(half_dist <= rho + 1e-9)
        assert np.all(rho <= beta + 1e-12)


class TestEvaluationErrors:
    def test_nonfinite_values_flagged_with_point(self):
        from blochball.errors import EvaluationError
        from blochball.sampling import SearchBudget

        f = holo.AnalyticFunction(
            lambda z: np.inf,
            label="blows-up",
            gradient=lambda z: np.full(2, np.inf, dtype=np.complex128),
            batch=lambda zs: np.full(zs.shape[0], np.inf, dtype=np.complex128),
            gradient_batch=lambda zs: np.full(zs.shape, np.inf, dtype=np.complex128),
            dim=2,
        )
        with pytest.raises(EvaluationError) as err:
            bloch.estimate_seminorm(f, "derivative", SearchBudget(samples=10, depth=2, polish_iters=0))
        assert err.value.point is not None
