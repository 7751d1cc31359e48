import random
from fractions import Fraction

import numpy as np
import pytest

from sphavg.admissibility import find_good_subgraph
from sphavg.chain import MarkovSystem, builtin_uniform
from sphavg.freegroup import format_word, reduce
from sphavg.tailmaps import (
    DegenerateWindowError,
    InsufficientOccurrencesError,
    ShiftedPair,
    block_swap,
    check_tail_maps,
    eligible_occurrence,
    occurrence_time,
    occurrences,
    sample_word,
    shift,
    swap_then_rewrite,
    tail_cocycle,
    tail_rewrite,
    weight_ratio_bound,
    word_distance,
)

UNIFORM = builtin_uniform(2)
CERT = find_good_subgraph(UNIFORM, 1)  # u=w=a, p=(b), q=(b')
WORD = ("a", "a", "a", "a", "b", "a", "a", "a", "a", "a")


def rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


class TestOccurrenceTime:
    def test_block_at_front(self):
        assert occurrence_time(("a", "b", "a", "a"), CERT, 1) == 1

    def test_block_in_middle(self):
        assert occurrence_time(WORD, CERT, 1) == 4

    def test_no_occurrence(self):
        with pytest.raises(InsufficientOccurrencesError) as err:
            occurrence_time(("a", "a", "a"), CERT, 1)
        assert err.value.found == 0

    def test_overlapping_occurrences_counted(self):
        word = ("a", "b", "a", "b'", "a")
        assert occurrences(word, CERT) == (1, 3)


class TestBlockSwap:
    def test_example(self):
        assert block_swap(WORD, CERT, 1) == (
            "a", "a", "a", "a", "b'", "a", "a", "a", "a", "a",
        )

    def test_front_block(self):
        assert block_swap(("a", "b", "a", "a"), CERT, 1) == ("a", "b'", "a", "a")

    def test_involution_on_samples(self):
        g = rng(1)
        for _ in range(100):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            assert n is not None
            assert block_swap(block_swap(word, CERT, n), CERT, n) == word

    def test_fixes_positions_outside_block(self):
        g = rng(2)
        for _ in range(50):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            t = occurrence_time(word, CERT, n)
            swapped = block_swap(word, CERT, n)
            k = CERT.k
            assert swapped[: t] == word[: t]
            assert swapped[t + k :] == word[t + k :]


class TestTailRewrite:
    def test_composite_example(self):
        assert swap_then_rewrite(WORD, CERT, 1) == (
            "a", "a", "b'", "b'", "b'", "a", "a", "a", "a", "a",
        )

    def test_standalone_matches_composite(self):
        g = rng(3)
        for _ in range(100):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            swapped = block_swap(word, CERT, n)
            assert tail_rewrite(swapped, CERT, n) == swap_then_rewrite(word, CERT, n)

    def test_degenerate_window(self):
        with pytest.raises(DegenerateWindowError):
            swap_then_rewrite(("a", "b", "a", "a"), CERT, 1)

    def test_agreement_past_occurrence(self):
        g = rng(4)
        for _ in range(50):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            t = occurrence_time(word, CERT, n)
            swapped = block_swap(word, CERT, n)
            rewritten = swap_then_rewrite(word, CERT, n)
            assert rewritten[t:] == swapped[t:]


class TestTailCocycle:
    def test_equal_words(self):
        pair = ShiftedPair(("a", "b"), ("a", "b"), 0, 1)
        assert tail_cocycle(pair, UNIFORM).is_identity

    def test_one_differing_letter(self):
        pair = ShiftedPair(("a", "b"), ("b", "b"), 0, 2)
        word = tail_cocycle(pair, UNIFORM)
        assert format_word(word, UNIFORM.generators) == "ab'"

    def test_derived_shifted_value(self):
        swapped = block_swap(WORD, CERT, 1)
        pair = ShiftedPair(shift(swapped, 2), WORD, -2, 6)
        word = tail_cocycle(pair, UNIFORM)
        assert word == reduce([1, 1, -2, -2, -1, -1, -1, -1], 2)

    def test_inconsistent_pair_rejected(self):
        pair = ShiftedPair(("a", "b"), ("a", "a"), 0, 1)
        with pytest.raises(ValueError, match="disagrees"):
            tail_cocycle(pair, UNIFORM)

    def test_invariant_under_enlarging_agreement(self):
        g = rng(5)
        for _ in range(50):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            t = occurrence_time(word, CERT, n)
            swapped = block_swap(word, CERT, n)
            values = {
                tail_cocycle(ShiftedPair(swapped, word, 0, start), UNIFORM)
                for start in range(t + CERT.k + 1, len(word) + 1)
            }
            assert len(values) == 1

    def test_cocycle_identity_on_triples(self):
        rnd = random.Random(6)
        verts = UNIFORM.vertices
        for _ in range(60):
            tail = tuple(rnd.choice(verts) for _ in range(6))
            s = tuple(rnd.choice(verts) for _ in range(3)) + tail
            t = tuple(rnd.choice(verts) for _ in range(3)) + tail
            u = tuple(rnd.choice(verts) for _ in range(3)) + tail
            a_st = tail_cocycle(ShiftedPair(s, t, 0, 4), UNIFORM)
            a_tu = tail_cocycle(ShiftedPair(t, u, 0, 4), UNIFORM)
            a_su = tail_cocycle(ShiftedPair(s, u, 0, 4), UNIFORM)
            assert a_st * a_tu == a_su


class TestWordDistance:
    def test_equal(self):
        assert word_distance(("a", "b"), ("a", "b")) == 0

    def test_first_symbol(self):
        assert word_distance(("a", "b"), ("b", "b")) == 1

    def test_half(self):
        assert word_distance(("a", "b", "a"), ("a", "b'", "a")) == Fraction(1, 2)

    def test_truncation_convention(self):
        assert word_distance(("a", "b"), ("a", "b", "a")) == 0


class TestWeightRatioBound:
    def test_uniform_is_one(self):
        assert weight_ratio_bound(UNIFORM, CERT) == 1

    def test_perturbed_swap_ratio(self):
        # row a reweighted so the p block weighs twice the q block
        m = UNIFORM
        row_a = (Fraction(1, 3), Fraction(4, 9), Fraction(0), Fraction(2, 9))
        perturbed = MarkovSystem(
            m.vertices, m.rank, m.generators, m.labels,
            (row_a,) + m.matrix[1:],
        )
        assert perturbed.validate() == []
        bound = weight_ratio_bound(perturbed, CERT)
        wp = perturbed.path_weight(("a", "b", "a"))
        wq = perturbed.path_weight(("a", "b'", "a"))
        assert wp / wq == 2
        extreme = Fraction(4, 9) / Fraction(2, 9)
        assert bound == 2 * extreme ** 2


class TestCheckTailMaps:
    def test_derived_example_passes(self):
        report = check_tail_maps(UNIFORM, CERT, WORD, 1)
        assert report.passed
        assert report.position == 4
        assert report.case == "upw"
        cocycle = next(c for c in report.checks if c.name == "cocycle_equal")
        assert "aab'b'a'a'a'a'" in cocycle.detail

    def test_randomized_words_pass(self):
        g = rng(7)
        nu = UNIFORM.stationary_distribution()
        for _ in range(200):
            word = sample_word(UNIFORM, CERT, g)
            n = eligible_occurrence(word, CERT)
            report = check_tail_maps(UNIFORM, CERT, word, n, nu)
            assert report.passed, report.to_dict()

    def test_tampered_rewrite_breaks_cocycle(self):
        # an off-by-one rewrite shifts the spliced block and the two
        # cocycle values separate
        word = WORD
        n = 1
        t = occurrence_time(word, CERT, n)
        swapped = block_swap(word, CERT, n)
        good = swap_then_rewrite(word, CERT, n)
        bad = good[1:] + good[:1]
        a_good = tail_cocycle(ShiftedPair(good, swapped, 0, t + 1), UNIFORM)
        a_ref = tail_cocycle(
            ShiftedPair(shift(swapped, 2 * CERT.k), word, -2 * CERT.k, t + CERT.k + 1),
            UNIFORM,
        )
        assert a_good == a_ref
        with pytest.raises(ValueError):
            # tampered word no longer agrees past the occurrence
            tail_cocycle(ShiftedPair(bad, swapped, 0, t + 1), UNIFORM)

    def test_report_serializes(self):
        report = check_tail_maps(UNIFORM, CERT, WORD, 1)
        data = report.to_dict()
        assert data["passed"] is True
        assert {c["name"] for c in data["checks"]} == {
            "occurrence_stable",
            "swap_involution",
            "swap_distance",
            "rewrite_distance",
            "cocycle_equal",
            "swap_weight_ratio",
            "rewrite_weight_ratio",
        }


class TestSampler:
    def test_words_are_paths_with_blocks(self):
        g = rng(8)
        for _ in range(50):
            word = sample_word(UNIFORM, CERT, g)
            assert UNIFORM.is_directed_path(word)
            assert eligible_occurrence(word, CERT) is not None

    def test_reproducible(self):
        first = [tuple(sample_word(UNIFORM, CERT, rng(9))) for _ in range(3)]
        second = [tuple(sample_word(UNIFORM, CERT, rng(9))) for _ in range(3)]
        assert first == second
