"""Naive reference implementations used to cross-check the metric engine.

Everything here is written the slow, obvious way on top of networkx and
deliberately shares no code with the package under test: paths come from
full enumeration, shortest paths from a min() over that enumeration, and
the aggregate from a literal sum over ordered pairs.
"""

import math
import random

import networkx as nx


def build_nx(vertices, edges):
    g = nx.DiGraph()
    g.add_nodes_from(vertices)
    g.add_edges_from(edges)
    return g


def all_simple_paths(vertices, edges, source, destination):
    """Every simple path as a vertex tuple, lexicographically sorted."""
    g = build_nx(vertices, edges)
    if source not in g or destination not in g:
        return []
    return sorted(tuple(p) for p in nx.all_simple_paths(g, source, destination))


def shortest_path(vertices, edges, source, destination):
    """Minimum-hop path, ties broken by smallest vertex sequence."""
    paths = all_simple_paths(vertices, edges, source, destination)
    if not paths:
        return None
    return min(paths, key=lambda p: (len(p), p))


def path_elements(path):
    """Directed edges plus interior vertices; endpoints excluded."""
    edges = {(path[i], path[i + 1]) for i in range(len(path) - 1)}
    interior = set(path[1:-1])
    return edges | interior


def diversity(reference, other):
    shared = path_elements(reference) & path_elements(other)
    return 1.0 - len(shared) / len(path_elements(other))


def k_sd_max(vertices, edges, source, destination, t_ksd=0.0):
    """Best single-alternate diversity against the shortest path."""
    base = shortest_path(vertices, edges, source, destination)
    if base is None:
        return 0.0
    best = 0.0
    for candidate in all_simple_paths(vertices, edges, source, destination):
        if candidate == base:
            continue
        value = diversity(base, candidate)
        if value > t_ksd:
            best = max(best, value)
    return best


def epd(k_sd, lam):
    return 1.0 - math.exp(-lam * k_sd)


def tgd(vertices, edges, lam, t_ksd=0.0):
    """Mean EPD over all ordered vertex pairs; unreachable pairs count as 0."""
    ordered = sorted(vertices)
    total = 0.0
    count = 0
    for s in ordered:
        for d in ordered:
            if s == d:
                continue
            total += epd(k_sd_max(vertices, edges, s, d, t_ksd), lam)
            count += 1
    return total / count


def random_digraph(rng: random.Random, max_vertices=6, edge_probability=0.4):
    """Seeded random directed graph with stable vertex labels."""
    n = rng.randint(2, max_vertices)
    vertices = [f"V{i}" for i in range(n)]
    edges = [
        (a, b)
        for a in vertices
        for b in vertices
        if a != b and rng.random() < edge_probability
    ]
    return vertices, edges
