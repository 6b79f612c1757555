"""Path-diversity resilience metrics over a logical cyber graph.

The pipeline is: enumerate simple paths between a vertex pair, measure how
much each alternate path shares with the minimum-hop path, aggregate that
into a per-pair diversity figure ``k_sd``, squash it through
``1 - exp(-lambda * k_sd)`` (effective path diversity, EPD), and average EPD
over every ordered vertex pair to get total graph diversity (TGD).

Two aggregation modes exist because the underlying definition admits both:

* ``max``         - k_sd is the best single alternate's diversity vs the
                    minimum-hop path.
* ``cumulative``  - k_sd sums the marginal diversity of up to ``k_paths``
                    greedily-chosen alternates, each scored against all
                    previously selected paths.

Logical graphs here are small (tens of control nodes), so exhaustive
enumeration is the intended regime; blowing the enumeration budget is a
hard error, never a silent truncation.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from math import fsum
from typing import Hashable, Iterable

from .cyber_topology import LogicalGraph
from .errors import (
    EndpointMismatch,
    EnumerationBudgetExceeded,
    GraphTooSmall,
    UnknownVertex,
)

MODE_MAX = "max"
MODE_CUMULATIVE = "cumulative"
MODES = (MODE_MAX, MODE_CUMULATIVE)

DEFAULT_MAX_PATHS = 10_000
DEFAULT_LAMBDAS = (0.2, 1.0, 5.0)


@dataclass(frozen=True)
class Path:
    """A simple directed path, held as its vertex sequence."""

    vertices: tuple[str, ...]

    @property
    def source(self) -> str:
        return self.vertices[0]

    @property
    def destination(self) -> str:
        return self.vertices[-1]

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1

    def elements(self) -> frozenset[Hashable]:
        """Traversed edges plus intermediate vertices; endpoints excluded."""
        edges = zip(self.vertices, self.vertices[1:])
        return frozenset(edges) | frozenset(self.vertices[1:-1])


@dataclass(frozen=True)
class DiversityParams:
    """Knobs for the diversity computation; validated on construction."""

    lambda_: float = 1.0
    t_ksd: float = 0.0
    mode: str = MODE_MAX
    k_paths: int = 3
    max_paths: int = DEFAULT_MAX_PATHS
    max_hops: int | None = None  # None: bounded only by simplicity (|V|)
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS

    def __post_init__(self) -> None:
        if not self.lambda_ > 0:
            raise ValueError(f"lambda must be positive, got {self.lambda_}")
        if not 0 <= self.t_ksd < 1:
            raise ValueError(f"t_ksd must be in [0, 1), got {self.t_ksd}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.k_paths < 1:
            raise ValueError("k_paths must be >= 1")
        if self.max_paths < 1:
            raise ValueError("max_paths must be >= 1")
        if self.max_hops is not None and self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        if not self.lambdas or any(not l > 0 for l in self.lambdas):
            raise ValueError("lambdas must be a nonempty list of positive values")


@dataclass(frozen=True)
class PairDiversity:
    source: str
    destination: str
    k_sd: float
    epd_by_lambda: tuple[tuple[float, float], ...]  # ((lambda, epd), ...) ascending


@dataclass(frozen=True)
class ResilienceReport:
    pairs: tuple[PairDiversity, ...]
    tgd_by_lambda: tuple[tuple[float, float], ...]
    params: DiversityParams

    def tgd(self, lambda_: float) -> float:
        for lam, value in self.tgd_by_lambda:
            if lam == lambda_:
                return value
        raise KeyError(lambda_)


def _adjacency(graph: LogicalGraph) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {v: [] for v in graph.vertices}
    for a, b in graph.edges:
        adj[a].append(b)
    for neighbours in adj.values():
        neighbours.sort()
    return adj


def _require_vertices(graph: LogicalGraph, *vertices: str) -> None:
    for v in vertices:
        if v not in graph.vertices:
            raise UnknownVertex(f"vertex {v!r} not in graph")


def path_diversity(reference: Path, other: Path) -> float:
    """Fraction of ``other``'s elements not shared with ``reference``.

    1.0 when the two paths are element-disjoint, 0.0 when ``other`` lies
    entirely inside ``reference``.
    """
    if (reference.source, reference.destination) != (other.source, other.destination):
        raise EndpointMismatch(
            f"paths {reference.vertices} and {other.vertices} do not share endpoints"
        )
    other_elements = other.elements()
    if not other_elements:
        return 0.0
    shared = len(reference.elements() & other_elements)
    return 1.0 - shared / len(other_elements)


def shortest_path(graph: LogicalGraph, source: str, destination: str) -> Path | None:
    """Minimum-hop path; ties resolved to the lexicographically smallest
    vertex sequence. None when the destination is unreachable."""
    _require_vertices(graph, source, destination)
    if source == destination:
        return Path((source,))
    adj = _adjacency(graph)
    heap: list[tuple[int, tuple[str, ...]]] = [(0, (source,))]
    done: set[str] = set()
    while heap:
        hops, vertices = heapq.heappop(heap)
        tail = vertices[-1]
        if tail == destination:
            return Path(vertices)
        if tail in done:
            continue
        done.add(tail)
        for nxt in adj[tail]:
            if nxt not in done and nxt not in vertices:
                heapq.heappush(heap, (hops + 1, vertices + (nxt,)))
    return None


def all_simple_paths(
    graph: LogicalGraph,
    source: str,
    destination: str,
    *,
    max_hops: int | None = None,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> list[Path]:
    """Every simple path within bounds, in lexicographic vertex-sequence
    order. Raises EnumerationBudgetExceeded rather than truncating."""
    _require_vertices(graph, source, destination)
    if source == destination:
        return [Path((source,))]
    hop_limit = len(graph.vertices) if max_hops is None else max_hops
    adj = _adjacency(graph)
    out: list[Path] = []
    trail: list[str] = [source]
    on_trail: set[str] = {source}

    def walk(vertex: str) -> None:
        if len(trail) - 1 >= hop_limit:
            return
        for nxt in adj[vertex]:
            if nxt in on_trail:
                continue
            if nxt == destination:
                if len(out) >= max_paths:
                    raise EnumerationBudgetExceeded(
                        f"more than {max_paths} simple paths "
                        f"between {source!r} and {destination!r}"
                    )
                out.append(Path(tuple(trail) + (nxt,)))
                continue
            trail.append(nxt)
            on_trail.add(nxt)
            walk(nxt)
            trail.pop()
            on_trail.remove(nxt)

    walk(source)
    return out


def k_sd_max(
    graph: LogicalGraph,
    source: str,
    destination: str,
    *,
    t_ksd: float = 0.0,
    max_hops: int | None = None,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> float:
    """Best single-alternate diversity against the minimum-hop path.

    0 when the pair is unreachable, when no alternate exists, or when no
    alternate clears the ``t_ksd`` threshold.
    """
    base = shortest_path(graph, source, destination)
    if base is None:
        return 0.0
    best = 0.0
    for candidate in all_simple_paths(
        graph, source, destination, max_hops=max_hops, max_paths=max_paths
    ):
        if candidate.vertices == base.vertices:
            continue
        diversity = path_diversity(base, candidate)
        if diversity > t_ksd and diversity > best:
            best = diversity
    return best


def k_sd_cumulative(
    graph: LogicalGraph,
    source: str,
    destination: str,
    k_paths: int = 3,
    *,
    t_ksd: float = 0.0,
    max_hops: int | None = None,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> float:
    """Summed marginal diversity of up to ``k_paths`` greedily-selected
    alternates.

    Selection starts from the minimum-hop path; each alternate contributes
    its minimum diversity against everything already selected, and once the
    best remaining contribution drops to ``t_ksd`` or below, selection stops
    (adding paths can only shrink later minima).
    """
    if k_paths < 1:
        raise ValueError("k_paths must be >= 1")
    base = shortest_path(graph, source, destination)
    if base is None:
        return 0.0
    candidates = [
        p
        for p in all_simple_paths(
            graph, source, destination, max_hops=max_hops, max_paths=max_paths
        )
        if p.vertices != base.vertices
    ]
    selected = [base]
    total = 0.0
    for _ in range(k_paths):
        if not candidates:
            break
        scored = [
            (min(path_diversity(chosen, c) for chosen in selected), c)
            for c in candidates
        ]
        # Deterministic pick: highest marginal diversity, then fewest hops,
        # then lexicographically smallest sequence.
        best_score, best_path = min(
            scored, key=lambda sc: (-sc[0], sc[1].hops, sc[1].vertices)
        )
        if best_score <= t_ksd:
            break
        total += best_score
        selected.append(best_path)
        candidates.remove(best_path)
    return total


def _pair_k_sd(graph: LogicalGraph, s: str, d: str, params: DiversityParams) -> float:
    if params.mode == MODE_MAX:
        return k_sd_max(
            graph, s, d,
            t_ksd=params.t_ksd, max_hops=params.max_hops, max_paths=params.max_paths,
        )
    return k_sd_cumulative(
        graph, s, d, params.k_paths,
        t_ksd=params.t_ksd, max_hops=params.max_hops, max_paths=params.max_paths,
    )


def effective_path_diversity(k_sd: float, lambda_: float) -> float:
    """1 - exp(-lambda * k_sd); exactly 0 when k_sd is 0."""
    return 1.0 - math.exp(-lambda_ * k_sd)


def epd(
    graph: LogicalGraph, source: str, destination: str, params: DiversityParams
) -> float:
    """Effective path diversity of one ordered pair under ``params``."""
    _require_vertices(graph, source, destination)
    return effective_path_diversity(
        _pair_k_sd(graph, source, destination, params), params.lambda_
    )


def _ordered_pairs(graph: LogicalGraph) -> list[tuple[str, str]]:
    vertices = sorted(graph.vertices)
    return [(s, d) for s in vertices for d in vertices if s != d]


def tgd(graph: LogicalGraph, params: DiversityParams) -> float:
    """Mean effective path diversity over all ordered vertex pairs.

    Unreachable pairs count, contributing 0. The mean uses an exact sum, so
    the result does not depend on vertex naming or iteration order.
    """
    if len(graph.vertices) < 2:
        raise GraphTooSmall("total graph diversity needs at least 2 vertices")
    values = [
        effective_path_diversity(_pair_k_sd(graph, s, d, params), params.lambda_)
        for s, d in _ordered_pairs(graph)
    ]
    return fsum(values) / len(values)


def resilience_report(
    graph: LogicalGraph,
    lambdas: Iterable[float] | None = None,
    params: DiversityParams | None = None,
) -> ResilienceReport:
    """Per-pair k_sd/EPD plus TGD for each lambda, in deterministic order
    (pairs lexicographic, lambdas ascending)."""
    params = params or DiversityParams()
    lams = sorted(set(lambdas if lambdas is not None else params.lambdas))
    if not lams:
        raise ValueError("at least one lambda is required")
    if any(not l > 0 for l in lams):
        raise ValueError("lambdas must be positive")
    if len(graph.vertices) < 2:
        raise GraphTooSmall("total graph diversity needs at least 2 vertices")

    pairs = []
    for s, d in _ordered_pairs(graph):
        k_sd = _pair_k_sd(graph, s, d, params)
        pairs.append(
            PairDiversity(
                source=s,
                destination=d,
                k_sd=k_sd,
                epd_by_lambda=tuple(
                    (lam, effective_path_diversity(k_sd, lam)) for lam in lams
                ),
            )
        )
    tgd_rows = tuple(
        (lam, fsum(p.epd_by_lambda[i][1] for p in pairs) / len(pairs))
        for i, lam in enumerate(lams)
    )
    return ResilienceReport(pairs=tuple(pairs), tgd_by_lambda=tgd_rows, params=params)


# --- presentation -----------------------------------------------------------

def report_to_json_dict(report: ResilienceReport) -> dict:
    return {
        "lambdas": [lam for lam, _ in report.tgd_by_lambda],
        "tgd": {_fmt_lambda(lam): value for lam, value in report.tgd_by_lambda},
        "pairs": [
            {
                "source": p.source,
                "destination": p.destination,
                "k_sd": p.k_sd,
                "epd": {_fmt_lambda(lam): value for lam, value in p.epd_by_lambda},
            }
            for p in report.pairs
        ],
        "params": {
            "t_ksd": report.params.t_ksd,
            "mode": report.params.mode,
            "k_paths": report.params.k_paths,
            "max_paths": report.params.max_paths,
            "max_hops": report.params.max_hops,
        },
    }


def _fmt_lambda(lam: float) -> str:
    return f"{lam:g}"


def format_report_table(report: ResilienceReport, *, include_pairs: bool = False) -> str:
    """Aligned text table: one TGD row, lambda values as columns."""
    lams = [_fmt_lambda(lam) for lam, _ in report.tgd_by_lambda]
    width = max(10, *(len(l) for l in lams)) + 2
    lines = [
        "lambda".ljust(10) + "".join(l.rjust(width) for l in lams),
        "TGD".ljust(10)
        + "".join(f"{value:.6f}".rjust(width) for _, value in report.tgd_by_lambda),
    ]
    if include_pairs:
        lines.append("")
        header = "pair".ljust(24) + "k_sd".rjust(10)
        lines.append(header + "".join(("EPD@" + l).rjust(width) for l in lams))
        for p in report.pairs:
            row = f"{p.source}->{p.destination}".ljust(24) + f"{p.k_sd:.6f}".rjust(10)
            row += "".join(f"{v:.6f}".rjust(width) for _, v in p.epd_by_lambda)
            lines.append(row)
    return "\n".join(lines) + "\n"
