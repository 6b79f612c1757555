import math
import random

import pytest
from hypothesis import given, strategies as st

import oracle
from cpaforge.cyber_topology import LogicalGraph
from cpaforge.errors import (
    EndpointMismatch,
    EnumerationBudgetExceeded,
    GraphTooSmall,
    UnknownVertex,
)
from cpaforge.resilience import (
    DEFAULT_LAMBDAS,
    DiversityParams,
    Path,
    all_simple_paths,
    effective_path_diversity,
    epd,
    format_report_table,
    k_sd_cumulative,
    k_sd_max,
    path_diversity,
    report_to_json_dict,
    resilience_report,
    shortest_path,
    tgd,
)


def graph(vertices, edges):
    return LogicalGraph.of(vertices, edges)


TRIANGLE = graph(
    "ABC",
    [("A", "B"), ("B", "A"), ("B", "C"), ("C", "B"), ("A", "C"), ("C", "A")],
)

DIAMOND = graph("ABCD", [("A", "B"), ("B", "D"), ("A", "C"), ("C", "D"), ("A", "D")])


class TestPathElements:
    def test_interior_vertices_and_edges(self):
        p = Path(("A", "B", "C"))
        assert p.elements() == frozenset({("A", "B"), ("B", "C"), "B"})

    def test_endpoints_excluded(self):
        p = Path(("A", "B"))
        assert p.elements() == frozenset({("A", "B")})
        assert "A" not in p.elements() and "B" not in p.elements()


class TestPathDiversity:
    def test_identical_paths_share_everything(self):
        p = Path(("A", "B", "C"))
        assert path_diversity(p, p) == 0.0

    def test_disjoint_paths(self):
        ref = Path(("A", "B", "C"))
        other = Path(("A", "D", "C"))
        assert path_diversity(ref, other) == 1.0

    def test_direct_edge_vs_detour(self):
        ref = Path(("A", "B", "C"))
        assert path_diversity(ref, Path(("A", "C"))) == 1.0

    def test_partial_overlap(self):
        ref = Path(("A", "B", "C", "D"))
        other = Path(("A", "B", "E", "D"))  # shares edge (A,B) and vertex B? no: B interior in both
        shared = ref.elements() & other.elements()
        assert path_diversity(ref, other) == 1.0 - len(shared) / len(other.elements())

    def test_endpoint_mismatch(self):
        with pytest.raises(EndpointMismatch):
            path_diversity(Path(("A", "B")), Path(("A", "C")))

    def test_asymmetry_by_denominator(self):
        long = Path(("A", "B", "C", "D"))
        short = Path(("A", "D"))
        assert path_diversity(long, short) == 1.0
        assert path_diversity(short, long) == 1.0


class TestShortestPath:
    def test_min_hop(self):
        assert shortest_path(DIAMOND, "A", "D") == Path(("A", "D"))

    def test_lexicographic_tie_break(self):
        two = graph("ABCD", [("A", "B"), ("B", "D"), ("A", "C"), ("C", "D")])
        assert shortest_path(two, "A", "D") == Path(("A", "B", "D"))

    def test_unreachable(self):
        g = graph("AB", [])
        assert shortest_path(g, "A", "B") is None

    def test_unknown_vertex(self):
        with pytest.raises(UnknownVertex):
            shortest_path(TRIANGLE, "A", "Z")

    def test_matches_oracle(self):
        rng = random.Random(52)
        for _ in range(80):
            vertices, edges = oracle.random_digraph(rng)
            g = graph(vertices, edges)
            for s in vertices:
                for d in vertices:
                    if s == d:
                        continue
                    expected = oracle.shortest_path(vertices, edges, s, d)
                    actual = shortest_path(g, s, d)
                    assert (actual.vertices if actual else None) == expected


class TestAllSimplePaths:
    def test_lexicographic_enumeration(self):
        paths = all_simple_paths(DIAMOND, "A", "D")
        assert [p.vertices for p in paths] == [
            ("A", "B", "D"), ("A", "C", "D"), ("A", "D"),
        ]

    def test_budget_overflow_raises(self):
        k6 = graph(
            "ABCDEF",
            [(a, b) for a in "ABCDEF" for b in "ABCDEF" if a != b],
        )
        with pytest.raises(EnumerationBudgetExceeded):
            all_simple_paths(k6, "A", "B", max_paths=3)

    def test_hop_limit(self):
        chain = graph("ABCD", [("A", "B"), ("B", "C"), ("C", "D")])
        assert all_simple_paths(chain, "A", "D", max_hops=2) == []
        assert len(all_simple_paths(chain, "A", "D", max_hops=3)) == 1

    def test_matches_oracle(self):
        rng = random.Random(53)
        for _ in range(60):
            vertices, edges = oracle.random_digraph(rng)
            g = graph(vertices, edges)
            for s in vertices:
                for d in vertices:
                    if s == d:
                        continue
                    expected = oracle.all_simple_paths(vertices, edges, s, d)
                    actual = [p.vertices for p in all_simple_paths(g, s, d)]
                    assert actual == expected


class TestKsd:
    def test_no_path(self):
        g = graph("AB", [])
        assert k_sd_max(g, "A", "B") == 0.0

    def test_no_alternate(self):
        g = graph("AB", [("A", "B")])
        assert k_sd_max(g, "A", "B") == 0.0

    def test_triangle_pair_fully_diverse(self):
        assert k_sd_max(TRIANGLE, "A", "B") == 1.0

    def test_threshold_filters_weak_alternates(self):
        # the only alternate path shares most elements with the base path
        g = graph(
            "ABCDE",
            [("A", "B"), ("B", "C"), ("C", "D"), ("B", "E"), ("E", "C")],
        )
        base = shortest_path(g, "A", "D").vertices
        alt = [p.vertices for p in all_simple_paths(g, "A", "D") if p.vertices != base]
        value = oracle.diversity(base, alt[0])
        assert 0 < value < 1
        assert k_sd_max(g, "A", "D") == value
        assert k_sd_max(g, "A", "D", t_ksd=value) == 0.0

    def test_cumulative_sums_marginal_minima(self):
        k = k_sd_cumulative(DIAMOND, "A", "D", k_paths=3)
        # p0=A->D, then A-B-D and A-C-D are each fully diverse from all chosen
        assert k == 2.0

    def test_cumulative_respects_budget(self):
        assert k_sd_cumulative(DIAMOND, "A", "D", k_paths=1) == 1.0

    def test_cumulative_threshold_stops_selection(self):
        assert k_sd_cumulative(DIAMOND, "A", "D", k_paths=3, t_ksd=1.0) == 0.0

    def test_matches_oracle(self):
        rng = random.Random(54)
        for _ in range(60):
            vertices, edges = oracle.random_digraph(rng)
            g = graph(vertices, edges)
            for s in vertices:
                for d in vertices:
                    if s != d:
                        assert k_sd_max(g, s, d) == oracle.k_sd_max(vertices, edges, s, d)


class TestEpd:
    def test_closed_form(self):
        assert effective_path_diversity(1.0, 1.0) == pytest.approx(0.632121, abs=1e-6)
        assert effective_path_diversity(1.0, 5.0) == pytest.approx(0.993262, abs=1e-6)
        assert effective_path_diversity(0.0, 5.0) == 0.0

    def test_epd_uses_graph(self):
        params = DiversityParams(lambda_=1.0)
        assert epd(TRIANGLE, "A", "B", params) == pytest.approx(1 - math.exp(-1))

    @given(
        st.floats(min_value=0.01, max_value=3),
        st.floats(min_value=0.0, max_value=3),
        st.floats(min_value=0.01, max_value=2),
    )
    def test_monotone_in_lambda_and_k(self, lam, k, bump):
        base = effective_path_diversity(k, lam)
        assert 0.0 <= base < 1.0
        assert effective_path_diversity(k + bump, lam) >= base
        assert effective_path_diversity(k, lam + bump) >= base


class TestTgd:
    def test_triangle_closed_form(self):
        for lam in (0.2, 1.0, 5.0):
            assert tgd(TRIANGLE, DiversityParams(lambda_=lam)) == pytest.approx(
                1 - math.exp(-lam), abs=1e-9
            )

    def test_unreachable_pairs_count_as_zero(self):
        g = graph("AB", [("A", "B")])
        assert tgd(g, DiversityParams()) == 0.0

    def test_too_small(self):
        with pytest.raises(GraphTooSmall):
            tgd(graph("A", []), DiversityParams())

    def test_matches_oracle(self):
        rng = random.Random(55)
        for _ in range(40):
            vertices, edges = oracle.random_digraph(rng)
            g = graph(vertices, edges)
            for lam in (0.2, 1.0, 5.0):
                assert tgd(g, DiversityParams(lambda_=lam)) == pytest.approx(
                    oracle.tgd(vertices, edges, lam), abs=1e-12
                )

    def test_relabeling_invariance_exact(self):
        rng = random.Random(56)
        for _ in range(20):
            vertices, edges = oracle.random_digraph(rng)
            mapping = dict(zip(vertices, rng.sample(range(1000, 9999), len(vertices))))
            relabeled_v = [f"X{mapping[v]}" for v in vertices]
            relabeled_e = [(f"X{mapping[a]}", f"X{mapping[b]}") for a, b in edges]
            for lam in (0.2, 1.0, 5.0):
                params = DiversityParams(lambda_=lam)
                assert tgd(graph(vertices, edges), params) == tgd(
                    graph(relabeled_v, relabeled_e), params
                )


class TestParams:
    def test_defaults(self):
        params = DiversityParams()
        assert params.lambda_ == 1.0
        assert params.mode == "max"
        assert params.lambdas == DEFAULT_LAMBDAS == (0.2, 1.0, 5.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"lambda_": 0.0},
            {"lambda_": -1.0},
            {"t_ksd": -0.1},
            {"t_ksd": 1.5},
            {"mode": "fancy"},
            {"k_paths": 0},
            {"max_paths": 0},
            {"max_hops": 0},
            {"lambdas": ()},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            DiversityParams(**kwargs)


class TestReport:
    def test_pairs_lexicographic_lambdas_ascending(self):
        report = resilience_report(TRIANGLE, lambdas=(5.0, 0.2, 1.0, 0.2))
        assert [lam for lam, _ in report.tgd_by_lambda] == [0.2, 1.0, 5.0]
        pairs = [(p.source, p.destination) for p in report.pairs]
        assert pairs == sorted(pairs)

    def test_tgd_accessor(self):
        report = resilience_report(TRIANGLE, lambdas=(1.0,))
        assert report.tgd(1.0) == pytest.approx(1 - math.exp(-1))
        with pytest.raises(KeyError):
            report.tgd(2.0)

    def test_cumulative_mode_report(self):
        params = DiversityParams(mode="cumulative", k_paths=3)
        report = resilience_report(DIAMOND, lambdas=(1.0,), params=params)
        by_pair = {(p.source, p.destination): p.k_sd for p in report.pairs}
        assert by_pair[("A", "D")] == 2.0

    def test_json_shape(self):
        doc = report_to_json_dict(resilience_report(TRIANGLE))
        assert doc["lambdas"] == [0.2, 1.0, 5.0]
        assert set(doc["tgd"]) == {"0.2", "1", "5"}
        assert len(doc["pairs"]) == 6
        assert doc["params"]["mode"] == "max"

    def test_table_contains_six_decimal_tgd(self):
        table = format_report_table(resilience_report(TRIANGLE, lambdas=(1.0,)))
        assert "0.632121" in table

    def test_deterministic(self):
        a = resilience_report(DIAMOND)
        b = resilience_report(DIAMOND)
        assert a == b
