from itertools import combinations
from typing import FrozenSet, Iterable

import networkx as nx

from qbf_backdoors.core.formula import as_disjunct_qbf


class PrimalGraph:
    """
    Variables as vertices, an edge between two variables sharing a constraint.
    """

    def __init__(self, graph: nx.Graph):
        self.graph = graph

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(self.graph.nodes)

    def neighbours(self, variable: int) -> FrozenSet[int]:
        return frozenset(self.graph.adj[variable])

    def has_edge(self, first: int, second: int) -> bool:
        return self.graph.has_edge(first, second)

    def without(self, variables: Iterable[int]) -> "PrimalGraph":
        removed = frozenset(variables)
        return PrimalGraph(self.graph.subgraph(self.vertices - removed).copy())

    def components(self):
        return [frozenset(component) for component in nx.connected_components(self.graph)]

    def reach(self, sources: Iterable[int], removed: Iterable[int] = ()) -> FrozenSet[int]:
        """
        R_{G−S}(Z ∖ S): vertices reachable from the sources once S is deleted
        """
        removed = frozenset(removed)
        graph = self.graph.subgraph(self.vertices - removed)
        reached = set()
        for source in sources:
            if source in removed or source in reached or source not in graph:
                continue
            reached |= nx.node_connected_component(graph, source)
        return frozenset(reached)


def primal_graph(phi) -> PrimalGraph:
    """
    Primal graph over the prefix variables of a QBF or k-disjunct QBF
    """
    phi = as_disjunct_qbf(phi)
    graph = nx.Graph()
    graph.add_nodes_from(phi.prefix.variables)
    for disjunct in phi.disjuncts:
        for variables in disjunct.constraint_variable_sets():
            graph.add_edges_from(combinations(sorted(variables), 2))
    return PrimalGraph(graph)


def boundary(g: PrimalGraph, y_set: Iterable[int]) -> FrozenSet[int]:
    """
    δ(Y) = N(Y) ∖ Y
    """
    y_set = frozenset(y_set)
    found = set()
    for variable in y_set:
        if variable in g.graph:
            found.update(g.graph.adj[variable])
    return frozenset(found - y_set)


def universal_components(phi, b_set: Iterable[int]) -> FrozenSet[int]:
    """
    U(Φ, B): union of the components of G_P(Φ) − B holding no existential variable
    """
    phi = as_disjunct_qbf(phi)
    existential = phi.prefix.existential_variables
    reduced = primal_graph(phi).without(b_set)
    found = set()
    for component in reduced.components():
        if not component & existential:
            found |= component
    return frozenset(found)
