import random
from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import random_chain
from sphavg.admissibility import (
    GoodSubgraphCertificate,
    check_admissible,
    find_good_subgraph,
    is_strongly_connected,
    loop_subgroup_generators,
    loop_subgroup_is_full,
    loop_subgroup_walks,
    sufficient_condition,
    validate_certificate,
)
from sphavg.chain import MarkovSystem, builtin_surface, builtin_uniform
from sphavg.freegroup import ReducedWord, fold, format_word, reduce


def one_way_pair():
    """v1 -> v2 in the edge set, no way back."""
    return MarkovSystem(
        ("v1", "v2"),
        2,
        ("a", "b"),
        (ReducedWord((1,), 2), ReducedWord((2,), 2)),
        (
            (Fraction(1), Fraction(0)),
            (Fraction(1, 2), Fraction(1, 2)),
        ),
    )


def positive_power_chain():
    """Labels a and a^2: no label product can ever invert."""
    return MarkovSystem(
        ("v1", "v2"),
        2,
        ("a", "b"),
        (ReducedWord((1,), 2), ReducedWord((1, 1), 2)),
        (
            (Fraction(1, 2), Fraction(1, 2)),
            (Fraction(1, 2), Fraction(1, 2)),
        ),
    )


def loops_only_chain():
    """Two inverse-labeled vertices with loops and no crossing edges."""
    return MarkovSystem(
        ("va", "vA"),
        1,
        ("a",),
        (ReducedWord((1,), 1), ReducedWord((-1,), 1)),
        ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))),
    )


def bipartite_two_cycle():
    return MarkovSystem(
        ("va", "vA"),
        1,
        ("a",),
        (ReducedWord((1,), 1), ReducedWord((-1,), 1)),
        ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))),
    )


class TestStronglyConnected:
    def test_uniform(self):
        assert is_strongly_connected(builtin_uniform(2))

    def test_one_way(self):
        assert not is_strongly_connected(one_way_pair())

    def test_surface(self):
        assert is_strongly_connected(builtin_surface())


class TestLoopSubgroup:
    def test_uniform_contains_expected(self):
        m = builtin_uniform(2)
        words = {
            format_word(w, m.generators)
            for w in loop_subgroup_generators(m, "a")
        }
        assert {"a", "ab", "ab'"} <= words

    def test_one_vertex_loop(self):
        m = MarkovSystem(
            ("v",), 1, ("a",), (ReducedWord((1,), 1),), ((Fraction(1),),)
        )
        assert loop_subgroup_generators(m, "v") == (ReducedWord((1,), 1),)

    def test_surface_contains_expected(self):
        s = builtin_surface()
        words = {
            format_word(w, s.generators)
            for w in loop_subgroup_generators(s, "I_a")
        }
        assert {"a", "ac", "adc", "adb"} <= words

    def test_walks_are_closed_and_match_labels(self):
        for m in (builtin_uniform(2), builtin_surface()):
            v = m.vertices[0]
            for walk, word in loop_subgroup_walks(m, v):
                assert walk[0] == v and walk[-1] == v
                assert m.is_directed_path(walk)
                assert m.path_label(walk[:-1]) == word

    def test_sampled_completeness(self):
        rnd = random.Random(3)
        for m in (builtin_uniform(2), builtin_surface()):
            v = m.vertices[0]
            graph = fold(loop_subgroup_generators(m, v), m.rank)
            eadj = m.edge_successors()
            vi = m.index(v)
            dist = _distances_to(m, vi)
            for _ in range(200):
                walk = [vi]
                for _ in range(rnd.randint(0, 3 * len(m.vertices))):
                    walk.append(rnd.choice(eadj[walk[-1]]))
                while walk[-1] != vi:
                    walk.append(
                        min(y for y in eadj[walk[-1]] if dist[y] == dist[walk[-1]] - 1)
                    )
                names = [m.vertices[i] for i in walk]
                assert graph.contains(m.path_label(names[:-1]))

    def test_full_on_uniform(self):
        assert loop_subgroup_is_full(builtin_uniform(2), "a")

    def test_rank_deficit(self):
        m = MarkovSystem(
            ("v",), 2, ("a", "b"), (ReducedWord((1,), 2),), ((Fraction(1),),)
        )
        assert not loop_subgroup_is_full(m, "v")

    def test_full_on_surface(self):
        assert loop_subgroup_is_full(builtin_surface(), "I_a")

    def test_acyclic_vertex_rejected(self):
        # edge set: v2 -> v1 and a loop at v2, so v1 lies on no cycle
        m = MarkovSystem(
            ("v1", "v2"),
            2,
            ("a", "b"),
            (ReducedWord((1,), 2), ReducedWord((2,), 2)),
            ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(1))),
        )
        with pytest.raises(ValueError, match="no directed cycle"):
            loop_subgroup_generators(m, "v1")


def _distances_to(m, target):
    eadj = m.edge_successors()
    dist = [None] * len(m.vertices)
    dist[target] = 0
    frontier = [target]
    while frontier:
        nxt = []
        for x in frontier:
            for y in range(len(m.vertices)):
                if x in eadj[y] and dist[y] is None:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


class TestFindGoodSubgraph:
    def test_uniform_pinned_certificate(self):
        cert = find_good_subgraph(builtin_uniform(2), 1)
        assert cert == GoodSubgraphCertificate(
            k=1, u="a", w="a", p=("b",), q=("b'",), p_star=("b'",), q_star=("b",)
        )
        assert validate_certificate(builtin_uniform(2), cert) == []

    def test_surface_uses_first_vertex(self):
        s = builtin_surface()
        cert = find_good_subgraph(s, 1)
        assert cert.u == "I_a" and cert.w == "I_a"
        assert validate_certificate(s, cert) == []

    def test_positive_powers_have_none(self):
        m = positive_power_chain()
        for k in (1, 2, 3):
            assert find_good_subgraph(m, k) is None

    def test_deterministic(self):
        s = builtin_surface()
        assert find_good_subgraph(s, 1) == find_good_subgraph(s, 1)
        assert find_good_subgraph(s, 2) == find_good_subgraph(s, 2)

    def test_random_chains_round_trip(self):
        found = 0
        for seed in range(40):
            m = random_chain(random.Random(seed))
            cert = find_good_subgraph(m, 2)
            if cert is not None:
                found += 1
                assert validate_certificate(m, cert) == []
        assert found > 0


class TestValidateCertificate:
    def test_tampered_star_label(self):
        m = builtin_uniform(2)
        cert = find_good_subgraph(m, 1)
        bad = replace(cert, p_star=("b",))
        assert any("inverse label" in p for p in validate_certificate(m, bad))

    def test_tampered_connector(self):
        m = builtin_uniform(2)
        cert = find_good_subgraph(m, 1)
        # p = (a') keeps the label constraint with p* = (a) but breaks upw
        bad = replace(cert, p=("a'",), p_star=("a",))
        problems = validate_certificate(m, bad)
        assert any("upw" in p for p in problems)

    def test_wrong_length(self):
        m = builtin_uniform(2)
        cert = find_good_subgraph(m, 1)
        bad = replace(cert, k=2)
        assert any("length" in p for p in validate_certificate(m, bad))


class TestCheckAdmissible:
    def test_uniform(self):
        report = check_admissible(builtin_uniform(2), k_max=2)
        assert report.admissible
        assert report.order == 1
        assert report.full_gamma_vertex == "a"

    def test_surface(self):
        report = check_admissible(builtin_surface(), k_max=1)
        assert report.admissible
        assert report.order == 1
        assert report.certificate.u == "I_a"

    def test_one_way_not_admissible(self):
        report = check_admissible(one_way_pair(), k_max=2)
        assert not report.strongly_connected
        assert not report.admissible

    def test_report_dict(self):
        m = builtin_uniform(2)
        data = check_admissible(m, k_max=1).to_dict(m.generators)
        assert data["admissible"] is True
        assert data["order"] == 1
        assert "a" in data["gamma_generators"]


class TestSufficientCondition:
    def test_uniform_constructs_valid_certificate(self):
        m = builtin_uniform(2)
        result = sufficient_condition(m)
        assert result.failed_premise is None
        assert validate_certificate(m, result.certificate) == []

    def test_surface_constructs_valid_certificate(self):
        s = builtin_surface()
        result = sufficient_condition(s)
        assert result.failed_premise is None
        assert validate_certificate(s, result.certificate) == []

    def test_injectivity_failure(self):
        m = MarkovSystem(
            ("v1", "v2"),
            2,
            ("a", "b"),
            (ReducedWord((1,), 2), ReducedWord((1,), 2)),
            ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))),
        )
        assert sufficient_condition(m).failed_premise == "injectivity"

    def test_symmetry_failure(self):
        m = positive_power_chain()
        assert sufficient_condition(m).failed_premise == "symmetry"

    def test_pattern_failure(self):
        assert sufficient_condition(loops_only_chain()).failed_premise == "pattern"

    def test_primitivity_failure(self):
        assert (
            sufficient_condition(bipartite_two_cycle()).failed_premise
            == "primitivity"
        )
