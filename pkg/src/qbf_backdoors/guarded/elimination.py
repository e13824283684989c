"""
Elimination of guarded universal sets.

A set Y of universal variables is closed in Φ when every constraint touching Y lies
inside Y. For such a Y a partial assignment β of Y with Φ ⇔ Φ[β] is computed that leaves
only a bounded number of Y variables unassigned: disjuncts whose Y-constraints are units
are handled by a maximum matching, the others are falsified greedily, and a disjunct that
resists falsification is split with part() over a hitting set of its Y-constraints.
"""

from collections import Counter
from typing import FrozenSet, Iterable, Optional, Tuple, Union

import networkx as nx

from qbf_backdoors.core.assignment import (
    PartialAssignment,
    apply_assignment,
    assign_disjuncts,
    assign_qbf,
)
from qbf_backdoors.core.constants import FORALL
from qbf_backdoors.core.formula import (
    ConjunctiveFormula,
    DisjunctQbf,
    Equation,
    QbfFormula,
    as_disjunct_qbf,
    var_of,
)
from qbf_backdoors.core.graph import boundary, primal_graph, universal_components
from qbf_backdoors.core.measures import is_closed, max_y_arity
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.detect.validation import BaseClass, base_class_of, class_violation
from qbf_backdoors.errors import (
    QbkBusinessError,
    QbkErrorBase,
    QbkValidationError,
    check_bound,
    check_invariant,
)
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.solvers.affine import solve_affine
from qbf_backdoors.solvers.horn import solve_existential_horn
from qbf_backdoors.solvers.two_cnf import solve_2cnf
from qbf_backdoors.transforms.backdoor import backdoor_to_disjunct
from qbf_backdoors.transforms.elimination import backdoor_to_disjunct_qe
from qbf_backdoors.transforms.expansion import disj_expand, part_expand


def disjunct_arity(disjunct: ConjunctiveFormula, y_set: FrozenSet[int]) -> int:
    return max((len(v & y_set) for v in disjunct.constraint_variable_sets()), default=0)


def progress_vector(phi: DisjunctQbf, y_set: FrozenSet[int], top: int) -> Tuple[int, ...]:
    """
    Disjunct counts per Y-arity, highest arity first
    """
    counts = Counter(disjunct_arity(d, y_set) for d in phi.disjuncts)
    return tuple(counts[arity] for arity in range(top, -1, -1))


def _check_guarded(phi: DisjunctQbf, y_set: FrozenSet[int]):
    unknown = y_set - phi.prefix.variables
    if unknown:
        raise QbkValidationError("variables {} are not quantified".format(sorted(unknown)))
    existential = y_set & phi.prefix.existential_variables
    if existential:
        raise QbkValidationError("Y contains existential variables {}".format(sorted(existential)))
    if not is_closed(phi, y_set):
        raise QbkValidationError("Y is not closed in the formula")


def closed_unit_reduce(phi, y_set: Iterable[int]) -> FrozenSet[int]:
    """
    Y_N: the Y variables left over by a maximum matching between Y and the disjuncts that
    mention them. Setting the leftovers cannot help the universal player.
    """
    phi = as_disjunct_qbf(phi)
    y_set = frozenset(y_set)
    if not y_set:
        return y_set
    arity = max_y_arity(phi, y_set)
    if arity > 1:
        raise QbkValidationError("unit reduction needs Y-arity at most 1, got {}".format(arity))
    if not is_closed(phi, y_set):
        raise QbkValidationError("Y is not closed in the formula")

    # disjunct i is the node -(i + 1)
    graph = nx.Graph()
    graph.add_nodes_from(sorted(y_set))
    graph.add_nodes_from(-(index + 1) for index in range(phi.k))
    for index, disjunct in enumerate(phi.disjuncts):
        graph.add_edges_from((v, -(index + 1)) for v in sorted(disjunct.variables & y_set))
    matching = nx.bipartite.maximum_matching(graph, top_nodes=sorted(y_set))
    matched = frozenset(node for node in matching if node > 0)
    check_bound(
        len(matched) <= phi.k, "{} matched variables for {} disjuncts".format(len(matched), phi.k)
    )
    return y_set - matched


def _falsifying_assignment(constraint) -> dict:
    if isinstance(constraint, Equation):
        first, *rest = constraint.sorted_vars()
        assignment = {v: 0 for v in rest}
        assignment[first] = constraint.rhs ^ 1
        return assignment
    return {var_of(literal): int(literal < 0) for literal in constraint}


def _inside(constraint, y_n: FrozenSet[int]) -> bool:
    if isinstance(constraint, Equation):
        return bool(constraint.vars) and constraint.vars <= y_n
    return bool(constraint) and all(var_of(literal) in y_n for literal in constraint)


def greedy_falsify(
    phi, y_set: Iterable[int], y_n: Iterable[int]
) -> Union[PartialAssignment, Tuple[int, FrozenSet[int]]]:
    """
    Falsify the disjuncts of Y-arity above one by assigning Y_N, one constraint inside Y_N at
    a time. Returns the assignment, extended with 0 over the rest of Y_N, when every such
    disjunct is falsified. Otherwise returns the first disjunct left standing together with
    a set of its Y variables that meets each of its Y-constraints.
    """
    phi = as_disjunct_qbf(phi)
    y_set = frozenset(y_set)
    y_n = frozenset(y_n)
    long_disjuncts = [i for i, d in enumerate(phi.disjuncts) if disjunct_arity(d, y_set) > 1]

    beta = PartialAssignment()
    falsified = set()
    changed = True
    while changed:
        changed = False
        for index in long_disjuncts:
            if index in falsified:
                continue
            reduced = apply_assignment(phi.disjuncts[index], beta)
            if reduced.is_bottom:
                falsified.add(index)
                continue
            constraints = list(reduced.clauses) + list(reduced.equations)
            chosen = next((c for c in constraints if _inside(c, y_n)), None)
            if chosen is None:
                continue
            beta = beta.extended(_falsifying_assignment(chosen))
            falsified.add(index)
            changed = True

    standing = [index for index in long_disjuncts if index not in falsified]
    if standing:
        index = standing[0]
        hitting = (beta.domain | (y_set - y_n)) & phi.disjuncts[index].variables
        return index, hitting
    return beta.extended({v: 0 for v in y_n - beta.domain})


def compute_beta(
    phi, y_set: Iterable[int], pool: Optional[FreshVarPool] = None, log_object: QbkLogger = None
) -> Tuple[PartialAssignment, DisjunctQbf]:
    """
    β over Y with Φ ⇔ Φ[β], and Φ[β]. Each round splits one resisting disjunct with part()
    over its hitting set; the part selectors join an innermost universal block and stay
    there, which keeps every round equivalent to the input.
    """
    phi = as_disjunct_qbf(phi)
    y_set = frozenset(y_set)
    _check_guarded(phi, y_set)
    if not y_set:
        return PartialAssignment(), phi
    if pool is None:
        pool = FreshVarPool.for_formula(phi)
    else:
        pool.ensure_above(phi)

    top = max_y_arity(phi, y_set)
    current = phi
    step = 0
    while True:
        short = current.with_disjuncts(
            d for d in current.disjuncts if disjunct_arity(d, y_set) <= 1
        )
        outcome = greedy_falsify(current, y_set, closed_unit_reduce(short, y_set))
        if isinstance(outcome, PartialAssignment):
            break

        index, hitting = outcome
        arity = max_y_arity(current, y_set)
        parts, selectors = part_expand(current.disjuncts[index], hitting, pool)
        remaining = current.disjuncts[:index] + current.disjuncts[index + 1 :]
        following = DisjunctQbf(
            current.prefix.appended(FORALL, selectors), remaining + tuple(parts)
        )
        check_bound(
            progress_vector(following, y_set, top) < progress_vector(current, y_set, top),
            "round {} made no progress".format(step),
        )
        check_bound(
            following.k <= (2 * arity + 1) * current.k,
            "round {} grew {} disjuncts into {}".format(step, current.k, following.k),
        )
        check_invariant(is_closed(following, y_set), "round {} broke closure".format(step))
        if log_object:
            log_object.write_log(
                "QBK0401",
                None,
                {"step": step, "disjunct": index, "hittingSet": sorted(hitting), "k": following.k},
            )
        current = following
        step += 1

    beta = outcome
    check_invariant(beta.domain <= y_set, "assignment leaves Y")
    if log_object:
        log_object.write_log(
            "QBK0402",
            None,
            {"steps": step, "assigned": len(beta), "unassigned": len(y_set - beta.domain)},
        )
    return beta, assign_disjuncts(phi, beta)


def guarded_beta(
    phi: QbfFormula,
    y_set: Iterable[int],
    pool: Optional[FreshVarPool] = None,
    log_object: QbkLogger = None,
) -> PartialAssignment:
    """
    β for a conjunctive QBF. Expanding the matrix over δ(Y) makes Y closed.
    """
    if not isinstance(phi, QbfFormula):
        raise QbkValidationError("guarded elimination needs a conjunctive QBF")
    y_set = frozenset(y_set)
    guard = boundary(primal_graph(phi), y_set)
    expanded = tuple(d for d in disj_expand(phi.matrix, guard) if not d.is_bottom)
    beta, _ = compute_beta(DisjunctQbf(phi.prefix, expanded), y_set, pool, log_object)
    return beta


def eliminate_guarded(
    phi: QbfFormula,
    y_set: Iterable[int],
    pool: Optional[FreshVarPool] = None,
    log_object: QbkLogger = None,
) -> QbfFormula:
    return assign_qbf(phi, guarded_beta(phi, y_set, pool, log_object))


def evaluate_with_enhanced_backdoor(
    phi: QbfFormula,
    b_set: Iterable[int],
    base_class,
    q: Optional[int] = None,
    d: Optional[int] = None,
    pool: Optional[FreshVarPool] = None,
    log_object: QbkLogger = None,
) -> bool:
    """
    Evaluate phi given an enhanced backdoor B: eliminate the guarded set Y = U(Φ, B), then
    B ∪ (Y ∖ V(β)) is a backdoor of the reduced formula and the class solver takes over.
    """
    base = base_class_of(base_class)
    b_set = frozenset(b_set)
    if pool is None:
        pool = FreshVarPool.for_formula(phi)
    y_set = universal_components(phi, b_set)
    beta = guarded_beta(phi, y_set, pool, log_object)
    reduced = assign_qbf(phi, beta)
    backdoor = (b_set | y_set) - beta.domain

    violation = class_violation(reduced.as_disjunct().delete_variables(backdoor), base, q, d)
    if violation is not None:
        raise QbkBusinessError(QbkErrorBase.CLASS_MEMBERSHIP_VIOLATED, violation)
    if log_object:
        log_object.write_log(
            "QBK0403",
            None,
            {
                "class": base.value,
                "backdoor": sorted(b_set),
                "guarded": len(y_set),
                "assigned": len(beta),
            },
        )

    if base is BaseClass.TWO_CNF:
        return solve_2cnf(backdoor_to_disjunct(reduced, backdoor), log_object=log_object)
    if base is BaseClass.AFFINE:
        disjunct_form = backdoor_to_disjunct(reduced, backdoor, units_as_equations=True)
        return solve_affine(disjunct_form, log_object=log_object)
    disjunct_form = backdoor_to_disjunct_qe(reduced, backdoor, pool, log_object)
    return solve_existential_horn(disjunct_form, log_object)
