"""Gap-sequence composition, chain complex data, and filtered realizations."""

import json
import random
from fractions import Fraction

import pytest

from conftest import random_filtered_complex, tampered_copy
from morseflow import (
    ChainComplexData,
    CoefficientRing,
    FilteredRealization,
    GapSequence,
    IntegerMatrix,
    InputError,
    all_homology,
    check_realization,
    compose,
    in_face_image,
    realize,
    total_homology,
)
from morseflow.errors import (
    BoundaryCompositeError,
    IndexRangeError,
    SourceTargetMismatchError,
    TotalDifferentialSquareError,
)


def random_morphism(rng: random.Random, source: int, target: int) -> GapSequence:
    if source > target and rng.random() < 0.2:
        return GapSequence.basepoint(source, target)
    coords = []
    for _ in range(max(source - target - 1, 0)):
        if rng.random() < 0.3:
            coords.append(Fraction(0))
        else:
            coords.append(Fraction(rng.randint(1, 12), rng.randint(1, 4)))
    return GapSequence(source, target, tuple(coords))


class TestGapSequence:
    def test_identity_has_no_coords(self):
        e = GapSequence.identity(3)
        assert e.source == e.target == 3 and e.coords == ()

    def test_identity_laws(self):
        f = GapSequence.of(5, 2, {3: Fraction(1, 2), 4: Fraction(2)})
        assert compose(GapSequence.identity(5), f) == f
        assert compose(f, GapSequence.identity(2)) == f

    def test_composition_pads_shared_slot_with_zero(self):
        f = GapSequence.of(3, 1, {2: Fraction(5)})
        g = GapSequence.of(5, 3, {4: Fraction(7)})
        h = compose(g, f)
        assert h.source == 5 and h.target == 1
        assert h.coords == (Fraction(5), Fraction(0), Fraction(7))
        assert h.coordinate(3) == 0

    def test_endpoint_mismatch(self):
        with pytest.raises(SourceTargetMismatchError):
            compose(GapSequence.identity(4), GapSequence.identity(3))

    def test_basepoint_requires_positive_gap(self):
        with pytest.raises(InputError):
            GapSequence.basepoint(2, 2)

    def test_negative_coordinate_rejected(self):
        with pytest.raises(InputError):
            GapSequence(3, 1, (Fraction(-1),))

    def test_wrong_coordinate_count(self):
        with pytest.raises(InputError):
            GapSequence(4, 1, (Fraction(1),))

    def test_raising_morphisms_rejected(self):
        with pytest.raises(InputError):
            GapSequence(1, 2, ())

    def test_coordinate_range(self):
        f = GapSequence.of(4, 1, {2: 1, 3: 2})
        with pytest.raises(IndexRangeError):
            f.coordinate(1)
        with pytest.raises(IndexRangeError):
            f.coordinate(4)

    def test_basepoint_absorbs(self):
        f = GapSequence.of(3, 1, {2: Fraction(5)})
        b = GapSequence.basepoint(5, 3)
        assert compose(b, f).is_basepoint
        assert compose(f, GapSequence.basepoint(1, 0)).is_basepoint

    def test_face_image_is_vanishing_coordinate(self):
        f = GapSequence.of(4, 0, {1: 1, 2: 0, 3: 2})
        assert in_face_image(f, 2)
        assert not in_face_image(f, 1)
        with pytest.raises(IndexRangeError):
            in_face_image(f, 0)

    def test_basepoint_in_no_face_image(self):
        assert not in_face_image(GapSequence.basepoint(4, 0), 2)

    def test_associativity_sampled(self):
        rng = random.Random(5)
        for _ in range(200):
            levels = sorted(rng.sample(range(0, 12), 4), reverse=True)
            n3, n2, n1, n0 = levels
            f = random_morphism(rng, n1, n0)
            g = random_morphism(rng, n2, n1)
            h = random_morphism(rng, n3, n2)
            assert compose(h, compose(g, f)) == compose(compose(h, g), f)

    def test_composites_lie_in_shared_face(self):
        rng = random.Random(6)
        for _ in range(100):
            a, b, c = sorted(rng.sample(range(0, 10), 3), reverse=True)
            f = random_morphism(rng, b, c)
            g = random_morphism(rng, a, b)
            x = compose(g, f)
            if x.is_basepoint:
                continue
            assert in_face_image(x, b)


class TestChainComplexData:
    def test_shape_validation(self):
        with pytest.raises(InputError):
            ChainComplexData((("x",), ("y",)), (IntegerMatrix.zeros(2, 1),))

    def test_square_zero_enforced(self):
        with pytest.raises(BoundaryCompositeError):
            ChainComplexData(
                (("x",), ("y",), ("z",)),
                (IntegerMatrix([[1]]), IntegerMatrix([[1]])),
            )

    def test_duplicate_labels_rejected(self):
        with pytest.raises(InputError):
            ChainComplexData((("x", "x"),), ())

    def test_boundary_off_the_ends(self):
        c = ChainComplexData((("a", "b"), ("c",)), (IntegerMatrix.zeros(2, 1),))
        assert c.boundary(0).shape == (0, 2)
        assert c.boundary(2).shape == (1, 0)
        with pytest.raises(IndexRangeError):
            c.boundary(5)

    def test_json_round_trip(self):
        c = ChainComplexData(
            (("a",), ("b", "c")),
            (IntegerMatrix([[2, 0]]),),
        )
        again = ChainComplexData.from_json(json.loads(json.dumps(c.to_json())))
        assert again == c

    def test_json_round_trip_with_empty_degree(self):
        c = ChainComplexData(
            ((), ("b",)),
            (IntegerMatrix.zeros(0, 1),),
        )
        assert ChainComplexData.from_json(c.to_json()) == c


class TestRealize:
    def test_adjacent_components_are_boundaries(self):
        c = ChainComplexData(
            (("a",), ("b",), ("c",)),
            (IntegerMatrix([[2]]), IntegerMatrix([[0]])),
        )
        x = realize(c, CoefficientRing.integers())
        assert x.component(1, 0) == c.boundary(1)
        assert x.component(2, 1) == c.boundary(2)
        assert x.component(2, 0).is_zero()
        assert not x.total_square_defects()

    def test_higher_component_must_skip(self):
        c = ChainComplexData(
            (("a",), ("b",)),
            (IntegerMatrix([[0]]),),
        )
        with pytest.raises(InputError):
            realize(c, CoefficientRing.integers(), {(1, 0): IntegerMatrix([[1]])})

    def test_bad_higher_component_breaks_square(self):
        # levels 0..3, zero adjacent maps except d1 = 1 and d3 = 1; a skip
        # component (3,1) then makes (d1 @ D31) a nonzero (3,0)-composite
        c = ChainComplexData(
            (("a",), ("b",), ("c",), ("d",)),
            (IntegerMatrix([[1]]), IntegerMatrix([[0]]), IntegerMatrix([[0]])),
        )
        with pytest.raises(TotalDifferentialSquareError):
            realize(
                c,
                CoefficientRing.integers(),
                {(3, 1): IntegerMatrix([[1]])},
            )

    def test_check_realization_passes_for_honest_build(self):
        c = ChainComplexData(
            (("a", "b"), ("c",)),
            (IntegerMatrix([[1], [1]]),),
        )
        x = realize(c, CoefficientRing.integers())
        rep = check_realization(x, c)
        assert rep.passed

    def test_tampered_component_reports_entry(self):
        c = ChainComplexData(
            (("a", "b"), ("c",)),
            (IntegerMatrix([[1], [1]]),),
        )
        x = realize(c, CoefficientRing.integers())
        bad = FilteredRealization(
            c, x.ring, {**x.components, (1, 0): IntegerMatrix([[1], [2]])}
        )
        rep = check_realization(bad, c)
        assert not rep.passed
        assert rep.check("free-subquotients").passed
        failures = rep.check("connecting-maps").failures
        assert any("b" in msg and "c" in msg for msg in failures)

    def test_component_shape_validated(self):
        c = ChainComplexData(
            (("a",), ("b",)),
            (IntegerMatrix([[0]]),),
        )
        with pytest.raises(InputError):
            FilteredRealization(
                c, CoefficientRing.integers(), {(1, 0): IntegerMatrix([[1, 1]])}
            )
        with pytest.raises(IndexRangeError):
            FilteredRealization(
                c, CoefficientRing.integers(), {(2, 0): IntegerMatrix([[1]])}
            )

    def test_total_differential_squares_to_zero_matrix(self):
        rng = random.Random(3)
        cx, higher = random_filtered_complex(rng)
        x = realize(cx, CoefficientRing.integers(), higher)
        d = x.total_differential()
        assert (d @ d).is_zero()

    def test_total_homology_matches_degreewise_sum(self):
        c = ChainComplexData(
            (("a",), ("b", "b2"), ("c",)),
            (IntegerMatrix([[2, 0]]), IntegerMatrix([[0], [3]])),
        )
        x = realize(c, CoefficientRing.integers())
        total = total_homology(x)
        groups = all_homology(c, CoefficientRing.integers())
        assert total.free_rank == sum(g.free_rank for g in groups)

        def primary(torsion):
            # multiset of prime-power cyclic factors; Z/6 = Z/2 + Z/3
            out = []
            for t in torsion:
                n, p = t, 2
                while n > 1:
                    while n % p == 0:
                        q = p
                        while n % (q * p) == 0:
                            q *= p
                        out.append(q)
                        n //= q
                    p += 1
            return sorted(out)

        assert primary(total.torsion) == primary(
            t for g in groups for t in g.torsion
        )

    def test_json_round_trip(self):
        rng = random.Random(4)
        cx, higher = random_filtered_complex(rng)
        x = realize(cx, CoefficientRing.modular(3), higher)
        again = FilteredRealization.from_json(json.loads(json.dumps(x.to_json())))
        assert again.complex == x.complex
        assert again.ring == x.ring
        assert again.components == x.components

    def test_random_tampering_detected(self):
        rng = random.Random(9)
        for _ in range(10):
            cx, higher = random_filtered_complex(rng)
            x = realize(cx, CoefficientRing.integers(), higher)
            assert check_realization(x, cx).passed
            bad = tampered_copy(x, rng)
            rep = check_realization(bad, cx)
            assert not rep.passed
            assert not rep.check("connecting-maps").passed
