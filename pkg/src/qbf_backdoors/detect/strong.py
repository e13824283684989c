"""
Strong backdoors to 2CNF and Horn by bounded branching.

For both classes deleting a variable set and instantiating it leave the same clause shapes,
so the searches only ever delete. Every clause that is still too wide (or still has two
positive literals) names a handful of variables one of which has to go; the search branches
on those, lowest id first.
"""

from typing import Callable, FrozenSet, Optional, Tuple

from qbf_backdoors.core.formula import DisjunctQbf, as_disjunct_qbf, var_of
from qbf_backdoors.errors import QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger

Picker = Callable[[DisjunctQbf, FrozenSet[int]], Optional[Tuple[int, ...]]]


def _clausal(phi) -> DisjunctQbf:
    phi = as_disjunct_qbf(phi)
    if not all(disjunct.is_clausal for disjunct in phi.disjuncts):
        raise QbkValidationError("strong backdoor detection needs a clausal matrix")
    return phi


def _remaining(clause, removed: FrozenSet[int]):
    return [literal for literal in clause if var_of(literal) not in removed]


def wide_clause_variables(phi: DisjunctQbf, removed: FrozenSet[int]) -> Optional[Tuple[int, ...]]:
    """
    The three lowest variables of the first clause wider than two once removed is deleted
    """
    for disjunct in phi.disjuncts:
        for clause in disjunct.clauses:
            remaining = _remaining(clause, removed)
            if len(remaining) > 2:
                return tuple(sorted(var_of(literal) for literal in remaining)[:3])
    return None


def positive_pair_variables(
    phi: DisjunctQbf, removed: FrozenSet[int]
) -> Optional[Tuple[int, ...]]:
    """
    The two lowest positive variables of the first clause with two positive literals left
    """
    for disjunct in phi.disjuncts:
        for clause in disjunct.clauses:
            positive = sorted(lit for lit in _remaining(clause, removed) if lit > 0)
            if len(positive) > 1:
                return tuple(positive[:2])
    return None


class BranchingSearch:
    """
    Depth-bounded search over deletion sets. The picker returns the variables to branch on
    or None once the chosen set is a backdoor.
    """

    def __init__(self, phi: DisjunctQbf, picker: Picker, fan_out: int):
        self.phi = phi
        self.picker = picker
        self.fan_out = fan_out
        self.nodes = 0

    def run(self, k: int) -> Optional[FrozenSet[int]]:
        found = self._branch(frozenset(), k)
        check_bound(
            self.nodes <= self.fan_out ** (k + 1),
            "{} search nodes for k = {}".format(self.nodes, k),
        )
        return found

    def _branch(self, chosen: FrozenSet[int], budget: int) -> Optional[FrozenSet[int]]:
        self.nodes += 1
        candidates = self.picker(self.phi, chosen)
        if candidates is None:
            return chosen
        if budget == 0:
            return None
        for variable in candidates:
            found = self._branch(chosen | {variable}, budget - 1)
            if found is not None:
                return found
        return None


def _detect(phi, k: int, picker: Picker, fan_out: int, tag: str, log_object: QbkLogger):
    if k < 0:
        raise QbkValidationError("k must be non-negative, got {}".format(k))
    search = BranchingSearch(_clausal(phi), picker, fan_out)
    found = search.run(k)
    if log_object:
        log_object.write_log(
            "QBK0501",
            None,
            {
                "class": tag,
                "k": k,
                "nodes": search.nodes,
                "backdoor": sorted(found) if found is not None else None,
            },
        )
    return found


def strong_backdoor_2cnf(phi, k: int, log_object: QbkLogger = None) -> Optional[FrozenSet[int]]:
    return _detect(phi, k, wide_clause_variables, 3, "2cnf", log_object)


def strong_backdoor_horn(phi, k: int, log_object: QbkLogger = None) -> Optional[FrozenSet[int]]:
    return _detect(phi, k, positive_pair_variables, 2, "horn", log_object)
