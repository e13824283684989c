"""
Enhanced backdoor detection.

B is an enhanced backdoor when deleting B together with U(Φ, B), the purely universal
components of G_P(Φ) − B, leaves a formula in the target class. The search tree labels
every node with a candidate B′; a node either succeeds on its residual Φ − (B′ ∪ U(Φ, B′))
or branches on a few variables of which some must end up in B ∪ U(Φ, B). A universal pick
x can reach U(Φ, B) only by being cut off from the existential variables, so it also
branches over the important x-to-existential separators.

The first phase brings the residual within the alternation bound, branching on one
variable of each of the outermost bound + 2 blocks. The second phase fixes the constraints
that break the base class.
"""

from typing import FrozenSet, List, NamedTuple, Optional, Sequence

from qbf_backdoors.core.formula import DisjunctQbf, Equation, as_disjunct_qbf, var_of
from qbf_backdoors.core.graph import primal_graph, universal_components
from qbf_backdoors.core.measures import first_violation
from qbf_backdoors.detect.separators import important_separators, separator_query
from qbf_backdoors.detect.validation import BaseClass, base_class_of, constraint_fits
from qbf_backdoors.errors import QbkBusinessError, QbkErrorBase, QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger


class SearchNode(NamedTuple):
    chosen: FrozenSet[int]
    depth: int


def residual_formula(phi, chosen) -> DisjunctQbf:
    """
    Φ − (B′ ∪ U(Φ, B′))
    """
    phi = as_disjunct_qbf(phi)
    chosen = frozenset(chosen)
    return phi.delete_variables(chosen | universal_components(phi, chosen))


def residual_alternations(phi, chosen) -> int:
    residual = residual_formula(phi, chosen)
    return residual.prefix.restricted_to(residual.variables).alternations


def _constraint_variables(constraint) -> List[int]:
    if isinstance(constraint, Equation):
        return list(constraint.sorted_vars())
    return sorted(var_of(literal) for literal in constraint)


class EnhancedSearch:
    """
    Depth-first search tree over candidate backdoors. Children are explored in order and the
    first success wins; sets already explored are not visited twice.
    """

    def __init__(
        self,
        phi: DisjunctQbf,
        k: int,
        alternation_bound: Optional[int],
        base: Optional[BaseClass] = None,
        q: Optional[int] = None,
        d: Optional[int] = None,
        max_nodes: Optional[int] = None,
        log_object: QbkLogger = None,
    ):
        self.phi = phi
        self.k = k
        self.alternation_bound = alternation_bound
        self.base = base
        self.q = q
        self.d = d
        self.max_nodes = max_nodes
        self.log_object = log_object
        self.existential = phi.prefix.existential_variables
        self.expanded = 0
        self._seen = set()

    def run(self) -> Optional[FrozenSet[int]]:
        return self._explore(SearchNode(frozenset(), 0))

    def _explore(self, node: SearchNode) -> Optional[FrozenSet[int]]:
        if node.chosen in self._seen:
            return None
        self._seen.add(node.chosen)
        children = self.children(node.chosen)
        if children is None:
            return node.chosen
        if not children:
            return None

        self.expanded += 1
        if self.max_nodes is not None and self.expanded > self.max_nodes:
            raise QbkBusinessError(
                QbkErrorBase.SEARCH_BUDGET_EXCEEDED,
                "enhanced backdoor search expanded more than {} nodes".format(self.max_nodes),
            )
        for child in children:
            found = self._explore(SearchNode(child, node.depth + 1))
            if found is not None:
                return found
        return None

    def children(self, chosen: FrozenSet[int]) -> Optional[List[FrozenSet[int]]]:
        """
        None when chosen is already a backdoor, otherwise the child labels (possibly none)
        """
        residual = residual_formula(self.phi, chosen)
        prefix = residual.prefix.restricted_to(residual.variables)
        budget = self.k - len(chosen)

        bound = self.alternation_bound
        if bound is not None and prefix.alternations > bound:
            if budget == 0:
                return []
            picks = [min(block.variables) for block in prefix.blocks[: bound + 2]]
            return self._expand(chosen, picks, budget)
        if self.base is None:
            return None
        if self.base is BaseClass.HORN_EXISTS and prefix.universal_variables:
            return []

        witness = None
        for disjunct in residual.disjuncts:
            witness = first_violation(disjunct, lambda c: constraint_fits(c, self.base, self.d))
            if witness is not None:
                break
        if witness is None:
            return None
        if budget == 0:
            return []
        return self._expand(chosen, self._class_picks(witness, budget), budget)

    def _class_picks(self, witness, budget: int) -> List[int]:
        variables = _constraint_variables(witness)
        if self.base is BaseClass.AFFINE and not isinstance(witness, Equation):
            # deletion never turns a clause into an equation
            return []
        if isinstance(witness, Equation):
            if self.base is BaseClass.AFFINE and self.d is not None:
                # too wide for B alone and too existential to vanish into U(Φ, B)
                existential = len(self.existential.intersection(variables))
                if len(variables) - self.d > budget and existential > budget:
                    return []
            return variables
        if self.base is BaseClass.TWO_CNF:
            return variables[:3]
        return sorted(literal for literal in witness if literal > 0)[:2]

    def _expand(self, chosen: FrozenSet[int], picks: Sequence[int], budget: int):
        children = []
        graph = None
        for variable in picks:
            children.append(chosen | {variable})
            if not self.phi.prefix.is_universal(variable):
                continue
            if graph is None:
                graph = primal_graph(self.phi).without(chosen)
            query = separator_query(graph, {variable}, self.existential - chosen, budget)
            for separator in important_separators(query, self.log_object):
                if separator:
                    children.append(chosen | separator)
        check_bound(
            len(children) <= len(picks) * (1 + 4**budget),
            "{} children for {} picks".format(len(children), len(picks)),
        )
        return list(dict.fromkeys(children))


def _report(search: EnhancedSearch, tag: str, found, log_object: QbkLogger):
    if log_object:
        log_object.write_log(
            "QBK0503",
            None,
            {
                "class": tag,
                "k": search.k,
                "q": search.q,
                "nodes": search.expanded,
                "backdoor": sorted(found) if found is not None else None,
            },
        )


def _check_k(k: int):
    if k < 0:
        raise QbkValidationError("k must be non-negative, got {}".format(k))


def enhanced_backdoor_qalt(
    phi, k: int, q: int, max_nodes: Optional[int] = None, log_object: QbkLogger = None
) -> Optional[FrozenSet[int]]:
    """
    B with |B| ≤ k such that Φ − (B ∪ U(Φ, B)) has at most q quantifier alternations
    """
    _check_k(k)
    if q < 0:
        raise QbkValidationError("q must be non-negative, got {}".format(q))
    search = EnhancedSearch(
        as_disjunct_qbf(phi), k, q, q=q, max_nodes=max_nodes, log_object=log_object
    )
    found = search.run()
    check_bound(
        search.expanded <= ((q + 2) * (2 + 4**k)) ** k,
        "{} search nodes for k = {}, q = {}".format(search.expanded, k, q),
    )
    _report(search, "qalt", found, log_object)
    return found


def enhanced_backdoor(
    phi,
    k: int,
    base_class,
    q: Optional[int] = None,
    d: Optional[int] = None,
    max_nodes: Optional[int] = None,
    log_object: QbkLogger = None,
) -> Optional[FrozenSet[int]]:
    """
    B with |B| ≤ k such that B ∪ U(Φ, B) is a deletion backdoor to the base class with at
    most q alternations (2cnf, aff) or to existential Horn. The alternation phase runs with
    bound q, or 0 for Horn; without q the 2cnf and aff searches skip it.
    """
    _check_k(k)
    base = base_class_of(base_class)
    alternation_bound = 0 if base is BaseClass.HORN_EXISTS else q
    search = EnhancedSearch(
        as_disjunct_qbf(phi), k, alternation_bound, base, q, d, max_nodes, log_object
    )
    found = search.run()
    _report(search, base.value, found, log_object)
    return found
