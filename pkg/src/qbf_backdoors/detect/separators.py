"""
Important X-Y separators.

S is an X-Y separator when G − S has no path from X ∖ S to Y ∖ S; separators may contain
vertices of X and Y. An important separator is an inclusion-minimal one whose reach from
X cannot be enlarged by any separator of the same or smaller size.

Enumeration follows the farthest minimum cut: either its lowest vertex v is in the
separator (delete v, lower the cap) or it is not (v joins X and becomes undeletable, which
raises the minimum cut). That yields at most 4^cap candidates holding every important
separator; candidates dominated by another one are then dropped.
"""

from itertools import chain, combinations
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from qbf_backdoors.core.graph import PrimalGraph
from qbf_backdoors.errors import QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger

SOURCE = "source"
SINK = "sink"


class SeparatorQuery(NamedTuple):
    graph: PrimalGraph
    source: FrozenSet[int]
    sink: FrozenSet[int]
    size_cap: int


def separator_query(graph: PrimalGraph, source, sink, size_cap: int) -> SeparatorQuery:
    if size_cap < 0:
        raise QbkValidationError("separator size cap must be non-negative, got {}".format(size_cap))
    vertices = graph.vertices
    return SeparatorQuery(graph, frozenset(source) & vertices, frozenset(sink) & vertices, size_cap)


def _flow_network(graph: nx.Graph, source, sink, undeletable) -> nx.DiGraph:
    """
    Every vertex v becomes (v, 0) -> (v, 1) with capacity 1, or unbounded when v may not
    be deleted. Edges without a capacity are unbounded.
    """
    network = nx.DiGraph()
    network.add_nodes_from([SOURCE, SINK])
    for vertex in sorted(graph.nodes):
        if vertex in undeletable:
            network.add_edge((vertex, 0), (vertex, 1))
        else:
            network.add_edge((vertex, 0), (vertex, 1), capacity=1)
    for first, second in sorted(tuple(sorted(edge)) for edge in graph.edges):
        network.add_edge((first, 1), (second, 0))
        network.add_edge((second, 1), (first, 0))
    for vertex in sorted(source):
        network.add_edge(SOURCE, (vertex, 0))
    for vertex in sorted(sink):
        network.add_edge((vertex, 1), SINK)
    return network


def farthest_min_cut(
    graph: nx.Graph, source, sink, cap: int, undeletable=frozenset()
) -> Tuple[Optional[int], FrozenSet[int]]:
    """
    (λ, Δ): the minimum separator size and the minimum separator farthest from the source.
    λ is None when it exceeds cap.
    """
    network = _flow_network(graph, source, sink, undeletable)
    residual = edmonds_karp(network, SOURCE, SINK, cutoff=cap + 1)
    value = residual.graph["flow_value"]
    if value > cap:
        return None, frozenset()

    # vertices that still reach the sink in the residual network
    near_sink = {SINK}
    frontier = [SINK]
    while frontier:
        node = frontier.pop()
        for before in residual.predecessors(node):
            edge = residual[before][node]
            if before not in near_sink and edge["capacity"] - edge["flow"] > 0:
                near_sink.add(before)
                frontier.append(before)
    cut = frozenset(
        vertex
        for vertex in graph.nodes
        if (vertex, 0) not in near_sink and (vertex, 1) in near_sink
    )
    check_bound(len(cut) == value, "cut of {} vertices for flow {}".format(len(cut), value))
    return value, cut


def minimum_separator_size(query: SeparatorQuery) -> Optional[int]:
    """
    Size of a smallest X-Y separator, or None when it exceeds the cap
    """
    value, _ = farthest_min_cut(query.graph.graph, query.source, query.sink, query.size_cap)
    return value


def _candidates(graph: nx.Graph, source, sink, cap: int, undeletable) -> List[FrozenSet[int]]:
    value, cut = farthest_min_cut(graph, source, sink, cap, undeletable)
    if value is None:
        return []
    if value == 0:
        return [frozenset()]
    vertex = min(cut)
    smaller = graph.subgraph(set(graph.nodes) - {vertex})
    found = _candidates(smaller, source - {vertex}, sink - {vertex}, cap - 1, undeletable)
    found = [separator | {vertex} for separator in found]
    if vertex not in sink:
        found += _candidates(graph, source | {vertex}, sink, cap, undeletable | {vertex})
    return found


def is_separator(graph: PrimalGraph, source, sink, separator: Iterable[int]) -> bool:
    separator = frozenset(separator)
    return not graph.reach(source, separator) & (frozenset(sink) - separator)


def is_minimal_separator(graph: PrimalGraph, source, sink, separator: Iterable[int]) -> bool:
    separator = frozenset(separator)
    return is_separator(graph, source, sink, separator) and not any(
        is_separator(graph, source, sink, separator - {vertex}) for vertex in separator
    )


def _ordered(separators: Iterable[FrozenSet[int]]) -> List[FrozenSet[int]]:
    return sorted(set(separators), key=lambda s: (len(s), sorted(s)))


def _undominated(graph: PrimalGraph, source, separators, rivals) -> List[FrozenSet[int]]:
    """
    Separators whose reach no rival of the same or smaller size strictly contains
    """
    reach = {s: graph.reach(source, s) for s in set(separators) | set(rivals)}
    return [
        s for s in separators if not any(len(o) <= len(s) and reach[s] < reach[o] for o in rivals)
    ]


def important_separators(
    query: SeparatorQuery, log_object: QbkLogger = None
) -> List[FrozenSet[int]]:
    """
    All important separators of size at most the cap, smallest first. [∅] when source and
    sink are already apart, [] when every separator is larger than the cap.
    """
    graph, source, sink, cap = query
    candidates = _candidates(graph.graph, source, sink, cap, frozenset())
    check_bound(
        len(candidates) <= 4**cap,
        "{} separator candidates exceed 4^{}".format(len(candidates), cap),
    )
    candidates = [s for s in _ordered(candidates) if is_minimal_separator(graph, source, sink, s)]
    important = _undominated(graph, source, candidates, candidates)
    if log_object:
        log_object.write_log(
            "QBK0502",
            None,
            {
                "source": sorted(source),
                "cap": cap,
                "candidates": len(candidates),
                "important": len(important),
            },
        )
    return important


def brute_force_important_separators(query: SeparatorQuery) -> List[FrozenSet[int]]:
    """
    Important separators straight from the definition, over every vertex subset up to the
    cap. Exponential; small graphs only.
    """
    graph, source, sink, cap = query
    vertices = sorted(graph.vertices)
    subsets = chain.from_iterable(combinations(vertices, size) for size in range(cap + 1))
    separators = [frozenset(s) for s in subsets if is_separator(graph, source, sink, s)]
    minimal = [s for s in separators if is_minimal_separator(graph, source, sink, s)]
    return _ordered(_undominated(graph, source, minimal, separators))
