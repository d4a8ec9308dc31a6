import math

import numpy as np
import pytest

from boxalgebra.boxmodel import (
    BehaviorBox,
    box_from_correlators,
    box_from_dict,
    box_to_dict,
    check_no_signaling,
    chsh_canonical,
    chsh_max,
    convex_mix,
    correlators,
    deterministic_box,
    is_local_facets,
    is_local_lp,
    isotropic_box,
    pr_box,
    random_correlator_box,
    tsirelson_box,
    uniform_box,
)
from boxalgebra.errors import ValidationError

SQRT2 = math.sqrt(2.0)


def signaling_box() -> BehaviorBox:
    """Alice's marginal at x=0 depends on y: uniform at y=0, a=0 forced at y=1."""
    p = np.full((2, 2, 2, 2), 0.25)
    p[0, 1] = [[0.5, 0.5], [0.0, 0.0]]
    return BehaviorBox(p)


class TestBehaviorBox:
    def test_flat_order_is_8x_4y_2a_b(self):
        flat = np.arange(16) / 120.0
        flat = flat / flat.reshape(4, 4).sum(axis=1).repeat(4)  # normalize each (x,y)
        box = BehaviorBox(flat)
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    for b in range(2):
                        assert box.p[x, y, a, b] == flat[8 * x + 4 * y + 2 * a + b]

    def test_accepts_shape_16_and_2222(self):
        assert BehaviorBox(uniform_box().flat()).approx_equal(uniform_box(), 0.0)

    def test_clamps_tiny_violations(self):
        p = uniform_box().p.copy()
        p[0, 0, 0, 0] = -1e-13
        p[0, 0, 1, 1] = 0.5 + 1e-13
        box = BehaviorBox(p)
        assert box.p[0, 0, 0, 0] == 0.0

    def test_rejects_entries_outside_clamp(self):
        p = uniform_box().p.copy()
        p[0, 0, 0, 0] = -1e-6
        with pytest.raises(ValidationError):
            BehaviorBox(p)
        with pytest.raises(ValidationError):
            BehaviorBox(np.full((2, 2, 2, 2), 0.3))  # rows sum to 1.2

    def test_rejects_bad_shape_and_nonfinite(self):
        with pytest.raises(ValidationError):
            BehaviorBox(np.zeros((2, 2, 2)))
        p = uniform_box().p.copy()
        p[1, 1, 1, 1] = float("nan")
        with pytest.raises(ValidationError):
            BehaviorBox(p)

    def test_immutable(self):
        box = pr_box()
        with pytest.raises(ValueError):
            box.p[0, 0, 0, 0] = 1.0


class TestCorrelators:
    def test_pr(self):
        assert correlators(pr_box()).as_tuple() == (1.0, 1.0, 1.0, -1.0)

    def test_uniform(self):
        assert correlators(uniform_box()).as_tuple() == (0.0, 0.0, 0.0, 0.0)

    def test_tsirelson(self):
        e = correlators(tsirelson_box()).as_tuple()
        expected = (1 / SQRT2, 1 / SQRT2, 1 / SQRT2, -1 / SQRT2)
        assert np.allclose(e, expected, atol=1e-15)

    def test_rejects_malformed_box(self):
        with pytest.raises(ValidationError):
            correlators(BehaviorBox(np.full(16, 0.26)))


class TestChshValues:
    def test_pr_canonical_is_4(self):
        assert chsh_canonical(pr_box()) == 4.0

    def test_tsirelson_canonical(self):
        assert abs(chsh_canonical(tsirelson_box()) - 2.0 * SQRT2) <= 1e-12

    def test_uniform_canonical_is_0(self):
        assert chsh_canonical(uniform_box()) == 0.0

    def test_chsh_max_identity_strategy_ties(self):
        # E = (1,-1,-1,1): all four symmetrized expressions equal 2
        assert chsh_max(deterministic_box(2, 2)) == (2.0, [0, 1, 2, 3])

    def test_chsh_max_pr(self):
        assert chsh_max(pr_box()) == (4.0, [3])

    def test_chsh_max_isotropic_half(self):
        value, facets = chsh_max(isotropic_box(0.5))
        assert abs(value - 2.0) <= 1e-12
        assert facets == [3]

    def test_all_deterministic_boxes_reach_exactly_2(self):
        values = [chsh_max(deterministic_box(fa, fb))[0] for fa in range(4) for fb in range(4)]
        assert max(values) == 2.0
        assert min(values) == 2.0


class TestNoSignaling:
    def test_pr_and_deterministic_pass(self):
        assert check_no_signaling(pr_box()).ok
        for fa in range(4):
            for fb in range(4):
                assert check_no_signaling(deterministic_box(fa, fb)).ok

    def test_signaling_box_detected(self):
        report = check_no_signaling(signaling_box())
        assert not report.ok
        assert report.max_residual == pytest.approx(0.5)
        assert report.alice_residuals[0][0] == pytest.approx(0.5)

    def test_residual_layout(self):
        report = check_no_signaling(uniform_box())
        assert report.max_residual == 0.0
        assert report.alice_residuals == ((0.0, 0.0), (0.0, 0.0))
        assert report.bob_residuals == ((0.0, 0.0), (0.0, 0.0))


class TestConstructors:
    def test_deterministic_identity_correlators(self):
        assert correlators(deterministic_box(2, 2)).as_tuple() == (1.0, -1.0, -1.0, 1.0)

    def test_deterministic_constant_correlators(self):
        assert correlators(deterministic_box(0, 0)).as_tuple() == (1.0, 1.0, 1.0, 1.0)

    def test_deterministic_rejects_bad_index(self):
        with pytest.raises(ValidationError):
            deterministic_box(4, 0)
        with pytest.raises(ValidationError):
            deterministic_box(0, -1)

    def test_pr_box_table(self):
        p = pr_box().p
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    for b in range(2):
                        expected = 0.5 if a ^ b == x * y else 0.0
                        assert p[x, y, a, b] == expected

    def test_isotropic_endpoints(self):
        assert isotropic_box(0.0).approx_equal(uniform_box(), 0.0)
        assert isotropic_box(1.0).approx_equal(pr_box(), 0.0)

    def test_isotropic_near_tsirelson_visibility(self):
        assert abs(chsh_canonical(isotropic_box(0.70711)) - 2.82843) <= 1e-4

    def test_isotropic_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            isotropic_box(1.5)

    def test_tsirelson_equals_isotropic_at_inverse_sqrt2(self):
        assert tsirelson_box().approx_equal(isotropic_box(1 / SQRT2), 1e-12)

    def test_box_from_correlators_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            box_from_correlators(1.2, 0.0, 0.0, 0.0)

    def test_random_correlator_box_is_no_signaling(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            assert check_no_signaling(random_correlator_box(rng)).ok


class TestConvexMix:
    def test_endpoints(self):
        assert convex_mix(pr_box(), uniform_box(), 1.0).approx_equal(pr_box(), 0.0)
        assert convex_mix(pr_box(), uniform_box(), 0.0).approx_equal(uniform_box(), 0.0)

    def test_rejects_bad_weight(self):
        with pytest.raises(ValidationError):
            convex_mix(pr_box(), uniform_box(), -0.1)

    def test_correlators_are_linear(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            b1 = random_correlator_box(rng)
            b2 = random_correlator_box(rng)
            lam = rng.uniform()
            mixed = np.array(correlators(convex_mix(b1, b2, lam)).as_tuple())
            direct = lam * np.array(correlators(b1).as_tuple()) + (1 - lam) * np.array(
                correlators(b2).as_tuple()
            )
            assert np.max(np.abs(mixed - direct)) <= 1e-12

    def test_mix_with_constant_box(self):
        # correlators(mix) = (1, 1, 1, 1-2*lam), so the canonical value is 2 + 2*lam
        for lam in (0.0, 0.25, 0.5, 1.0):
            mixed = convex_mix(pr_box(), deterministic_box(0, 0), lam)
            assert abs(chsh_canonical(mixed) - (2.0 + 2.0 * lam)) <= 1e-12

    def test_subadditivity(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            b1 = random_correlator_box(rng)
            b2 = random_correlator_box(rng)
            lam = rng.uniform()
            lhs = chsh_canonical(convex_mix(b1, b2, lam))
            rhs = lam * chsh_canonical(b1) + (1 - lam) * chsh_canonical(b2)
            assert lhs <= rhs + 1e-9

    def test_chsh_max_range_invariant(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            assert chsh_max(random_correlator_box(rng))[0] <= 4.0 + 1e-9


class TestLocality:
    def test_facets_accepts_all_vertices(self):
        for fa in range(4):
            for fb in range(4):
                report = is_local_facets(deterministic_box(fa, fb))
                assert report.is_local
                assert report.violated_facet is None

    def test_facets_rejects_pr(self):
        report = is_local_facets(pr_box())
        assert not report.is_local
        assert report.max_facet_value == 4.0
        assert report.violated_facet == 3

    def test_facets_isotropic_06(self):
        report = is_local_facets(isotropic_box(0.6))
        assert not report.is_local
        assert abs(report.max_facet_value - 2.4) <= 1e-12

    def test_facets_rejects_signaling_box(self):
        with pytest.raises(ValidationError):
            is_local_facets(signaling_box())

    @staticmethod
    def reconstruct(weights) -> np.ndarray:
        cols = [deterministic_box(i // 4, i % 4).flat() for i in range(16)]
        return np.array(weights) @ np.array(cols)

    def test_lp_accepts_uniform_with_witness(self):
        report = is_local_lp(uniform_box())
        assert report.is_local
        assert report.method == "lp"
        weights = np.array(report.lp_weights)
        assert abs(weights.sum() - 1.0) <= 1e-7
        assert np.all(weights >= 0.0)
        assert np.max(np.abs(self.reconstruct(weights) - uniform_box().flat())) <= 1e-7

    def test_lp_rejects_pr(self):
        report = is_local_lp(pr_box())
        assert not report.is_local
        assert report.lp_weights is None

    def test_lp_accepts_every_vertex(self):
        for fa in range(4):
            for fb in range(4):
                box = deterministic_box(fa, fb)
                report = is_local_lp(box)
                assert report.is_local
                assert np.max(np.abs(self.reconstruct(report.lp_weights) - box.flat())) <= 1e-7

    def test_facets_and_lp_agree_on_random_boxes(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            box = random_correlator_box(rng)
            assert is_local_facets(box).is_local == is_local_lp(box).is_local


class TestBoxJson:
    def test_round_trip(self):
        for box in (pr_box(), tsirelson_box(), uniform_box()):
            again = box_from_dict(box_to_dict(box))
            assert again.approx_equal(box, 0.0)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValidationError):
            box_from_dict({"p": [0.25] * 15})

    def test_rejects_out_of_range_entry(self):
        p = [0.25] * 16
        p[0] = 1.5
        with pytest.raises(ValidationError):
            box_from_dict({"p": p})

    def test_rejects_missing_key_and_bad_types(self):
        with pytest.raises(ValidationError):
            box_from_dict({"q": [0.25] * 16})
        with pytest.raises(ValidationError):
            box_from_dict({"p": "not-a-list"})
        with pytest.raises(ValidationError):
            box_from_dict({"p": [0.25] * 15 + ["x"]})
