"""
Evaluation of k-disjunct QBFs over 2CNF matrices.

Existential blocks are removed from the inside out. An innermost existential block is simply
dropped from propagated disjuncts. An existential block followed by a universal one is traded
for selector variables: SEL splits the disjuncts into groups guarded by selector literals,
REDup refines groups until no variable of the block occurs with both signs next to the
universal block, heavy disjuncts are pruned, the block is dropped and the selectors are
quantified away group by group. A purely universal remainder is a tautology check.
"""

from collections import deque
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from pysat.solvers import Solver

from qbf_backdoors.core.assignment import apply_assignment
from qbf_backdoors.core.constants import EXISTS, FORALL, SEL_MAX_DISJUNCTS
from qbf_backdoors.core.formula import (
    BOTTOM,
    ConjunctiveFormula,
    DisjunctQbf,
    QuantifierPrefix,
    as_disjunct_qbf,
    var_of,
)
from qbf_backdoors.core.measures import first_violation
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import (
    QbkBusinessError,
    QbkErrorBase,
    QbkValidationError,
    check_bound,
    check_invariant,
)
from qbf_backdoors.logger import QbkLogger

SelectorKey = Tuple[int, ...]


def _check_2cnf(phi: ConjunctiveFormula):
    if phi.equations:
        raise QbkValidationError("equations are not 2CNF constraints")
    wide = first_violation(phi, lambda clause: len(clause) <= 2)
    if wide is not None:
        raise QbkValidationError("clause {} is wider than two".format(wide))


def implication_graph(phi: ConjunctiveFormula) -> nx.DiGraph:
    """
    Literal vertices with an arc l -> l' for every clause (¬l ∨ l'); a unit (l) is the arc ¬l -> l
    """
    _check_2cnf(phi)
    graph = nx.DiGraph()
    for variable in phi.variables:
        graph.add_nodes_from((variable, -variable))
    for clause in phi.clauses:
        if len(clause) == 1:
            graph.add_edge(-clause[0], clause[0])
        elif len(clause) == 2:
            first, second = clause
            graph.add_edge(-first, second)
            graph.add_edge(-second, first)
    return graph


def _literal_order(literal: int):
    return var_of(literal), literal


def propagate(phi: ConjunctiveFormula) -> ConjunctiveFormula:
    """
    prop(φ): closed under resolution with no clause a super-clause of another. Forced literals
    become units, binaries come from the transitive closure of the implication graph, and a
    contradiction gives the bottom formula.
    """
    _check_2cnf(phi)
    if phi.is_bottom:
        return BOTTOM
    graph = implication_graph(phi)
    reach = {literal: nx.descendants(graph, literal) for literal in graph}
    forced = {literal for literal in graph if literal in reach[-literal]}
    if any(-literal in forced for literal in forced):
        return BOTTOM

    settled = {var_of(literal) for literal in forced}
    clauses = [[literal] for literal in sorted(forced, key=_literal_order)]
    for source in sorted(reach, key=_literal_order):
        if var_of(source) in settled:
            continue
        for target in sorted(reach[source], key=_literal_order):
            if var_of(target) not in settled and var_of(target) != var_of(source):
                clauses.append([-source, target])
    return ConjunctiveFormula.build(clauses)


def is_propagated(phi: ConjunctiveFormula) -> bool:
    return propagate(phi).key() == phi.key()


def two_sat(phi: ConjunctiveFormula) -> bool:
    return not propagate(phi).is_bottom


def _innermost_block(phi: DisjunctQbf, quantifier: str, operation: str) -> FrozenSet[int]:
    block = phi.prefix.innermost
    if block is None or block.quantifier != quantifier:
        raise QbkValidationError(
            "{} needs an innermost {} block".format(
                operation, "existential" if quantifier == EXISTS else "universal"
            )
        )
    return block.variables


def _check_propagated(phi: DisjunctQbf):
    for index, disjunct in enumerate(phi.disjuncts, start=1):
        if not is_propagated(disjunct):
            raise QbkValidationError("disjunct {} is not propagated".format(index))


def drop_innermost_existential(phi: DisjunctQbf) -> DisjunctQbf:
    """
    X_q is redundant in a propagated formula whose innermost block is existential
    """
    x_q = _innermost_block(phi, EXISTS, "drop_innermost_existential")
    _check_propagated(phi)
    return DisjunctQbf(
        phi.prefix.without(x_q), tuple(d.constraints_avoiding(x_q) for d in phi.disjuncts)
    )


def unit_count(phi: ConjunctiveFormula, variables: FrozenSet[int]) -> int:
    return sum(1 for clause in phi.clauses if len(clause) == 1 and var_of(clause[0]) in variables)


@dataclass(frozen=True)
class SelState:
    """
    The groups Φ_L of SEL/RED. Keys are the selector literals of L in selector order; each
    group holds at most k propagated disjuncts sharing their clauses free of X_q.
    """

    prefix: QuantifierPrefix
    groups: Dict[SelectorKey, Tuple[ConjunctiveFormula, ...]]
    selectors: Tuple[int, ...]
    innermost: FrozenSet[int]
    reducible_block: FrozenSet[int]
    k: int
    updates: int = 0

    @property
    def unit_count_cap(self) -> int:
        return 2 * self.k

    @property
    def disjunct_count(self) -> int:
        return sum(len(members) for members in self.groups.values())

    def disjuncts(self) -> List[ConjunctiveFormula]:
        return [member for key in sorted(self.groups) for member in self.groups[key]]

    def as_disjunct_qbf(self) -> DisjunctQbf:
        return DisjunctQbf(self.prefix, tuple(self.disjuncts()))


def _unique_live(members: Iterable[ConjunctiveFormula]) -> Tuple[ConjunctiveFormula, ...]:
    kept = {}
    for member in members:
        if not member.is_bottom:
            kept.setdefault(member.key(), member)
    return tuple(kept.values())


def _satisfiable_selections(bases: List[ConjunctiveFormula]):
    """
    (I, prop(φ^SEL_I)) for every non-empty I whose shared part is satisfiable; a superset of an
    unsatisfiable selection is unsatisfiable as well
    """
    found = []

    def extend(chosen, base, start):
        for index in range(start, len(bases)):
            combined = propagate(base.conjoin(bases[index]))
            if combined.is_bottom:
                continue
            selection = chosen + (index,)
            found.append((selection, combined))
            extend(selection, combined, index + 1)

    extend((), ConjunctiveFormula(), 0)
    return found


def _check_shared_parts(state: SelState):
    for key, members in state.groups.items():
        shared = {member.constraints_avoiding(state.innermost).key() for member in members}
        check_invariant(len(shared) <= 1, "group {} disagrees outside X_q".format(list(key)))
        check_bound(len(members) <= state.k, "group {} has {} members".format(key, len(members)))


def sel(phi: DisjunctQbf, pool: FreshVarPool, log_object: QbkLogger = None) -> SelState:
    """
    SEL(Φ): for each non-empty I ⊆ [k] the group of prop(φ_i ∧ φ^SEL_I ∧ a_I ∧ ¬a_{[k]∖I}),
    i ∈ I, under the prefix … ∃(X_{q−1} ∪ A_Φ) ∀X_q with |A_Φ| = 2k² + k
    """
    x_q = _innermost_block(phi, FORALL, "sel")
    if len(phi.prefix.blocks) < 2:
        raise QbkValidationError("sel needs an existential block before the universal one")
    _check_propagated(phi)
    k = phi.k
    if k > SEL_MAX_DISJUNCTS:
        raise QbkBusinessError(
            QbkErrorBase.SEARCH_BUDGET_EXCEEDED,
            "sel over {} disjuncts exceeds the limit of {}".format(k, SEL_MAX_DISJUNCTS),
        )
    pool.ensure_above(phi)
    selectors = pool.fresh_block(2 * k * k + k)
    x_q1 = phi.prefix.blocks[-2].variables

    groups = {}
    bases = [d.constraints_avoiding(x_q) for d in phi.disjuncts]
    for selection, shared in _satisfiable_selections(bases):
        key = tuple(a if index in selection else -a for index, a in enumerate(selectors[:k]))
        guard = ConjunctiveFormula.build([[literal] for literal in key])
        members = _unique_live(
            propagate(phi.disjuncts[index].conjoin(shared, guard)) for index in selection
        )
        if members:
            groups[key] = members

    blocks = [(b.quantifier, b.variables) for b in phi.prefix.blocks[:-1]]
    blocks.append((EXISTS, selectors))
    blocks.append((FORALL, x_q))
    state = SelState(QuantifierPrefix.build(blocks), groups, selectors, x_q, x_q1, k)
    _check_shared_parts(state)
    if log_object:
        log_object.write_log(
            "QBK0302", None, {"groups": len(groups), "disjuncts": state.disjunct_count}
        )
    return state


def _literals_next_to_innermost(phi: ConjunctiveFormula, variable: int, innermost) -> set:
    signs = set()
    for clause in phi.clauses:
        variables = {var_of(literal) for literal in clause}
        if variable in variables and variables & innermost:
            signs.update(literal for literal in clause if var_of(literal) == variable)
    return signs


def _light(state: SelState, members) -> List[ConjunctiveFormula]:
    return [m for m in members if unit_count(m, state.innermost) < state.unit_count_cap]


def reducible_variables(state: SelState, key: SelectorKey) -> List[int]:
    """
    Variables of X_{q−1} occurring positively next to X_q in one light member of the group
    and negatively in another (possibly the same) light member
    """
    light = _light(state, state.groups[key])
    found = []
    for variable in sorted(state.reducible_block):
        signs = set()
        for member in light:
            signs |= _literals_next_to_innermost(member, variable, state.innermost)
        if signs == {variable, -variable}:
            found.append(variable)
    return found


def red_update(
    state: SelState, key: SelectorKey, variable: int, log_object: QbkLogger = None
) -> SelState:
    """
    REDup: replace Φ_L by Φ_{L∪{a}} = {prop(φ[x=1]) ∧ x ∧ a}
    and Φ_{L∪{¬a}} = {prop(φ[x=0]) ∧ ¬x ∧ ¬a} with a = a_{|L|+1}
    """
    if key not in state.groups or variable not in reducible_variables(state, key):
        raise QbkValidationError(
            "variable {} is not reducible for group {}".format(variable, list(key))
        )
    check_bound(
        len(key) < len(state.selectors),
        "group {} has used all {} selectors".format(list(key), len(state.selectors)),
    )
    selector = state.selectors[len(key)]
    groups = {k: v for k, v in state.groups.items() if k != key}
    for value, literal in ((1, selector), (0, -selector)):
        guard = ConjunctiveFormula.build([[variable if value else -variable], [literal]])
        members = _unique_live(
            propagate(apply_assignment(member, {variable: value}).conjoin(guard))
            for member in state.groups[key]
        )
        if members:
            groups[key + (literal,)] = members
    if log_object:
        log_object.write_log(
            "QBK0303", None, {"group": list(key), "variable": variable, "groups": len(groups)}
        )
    return replace(state, groups=groups, updates=state.updates + 1)


def red_fixpoint(state: SelState, log_object: QbkLogger = None) -> SelState:
    """
    Apply REDup until no group has a reducible variable. Groups are visited in key order and
    the children of a split group right after it.
    """
    pending = deque(sorted(state.groups))
    while pending:
        key = pending.popleft()
        if key not in state.groups:
            continue
        candidates = reducible_variables(state, key)
        if not candidates:
            continue
        state = red_update(state, key, candidates[0], log_object)
        selector = state.selectors[len(key)]
        pending.extendleft(c for c in (key + (selector,), key + (-selector,)) if c in state.groups)

    limit = 2 ** len(state.selectors)
    check_bound(len(state.groups) <= limit, "{} groups after RED".format(len(state.groups)))
    check_bound(
        state.disjunct_count <= state.k * limit,
        "{} disjuncts after RED".format(state.disjunct_count),
    )
    _check_shared_parts(state)
    return state


def prune_heavy_disjuncts(state: SelState) -> SelState:
    """
    Disjuncts with at least 2k units over X_q can always be falsified by the universal player
    """
    groups = {}
    for key, members in state.groups.items():
        light = tuple(_light(state, members))
        if light:
            groups[key] = light
    return replace(state, groups=groups)


def drop_xqminus1(state: SelState) -> DisjunctQbf:
    """
    X_{q−1} is redundant once every light group uses each of its variables with one sign next
    to X_q; the used selectors stay behind as the innermost existential block
    """
    for key, members in state.groups.items():
        check_invariant(
            not reducible_variables(state, key),
            "group {} still has a reducible variable".format(list(key)),
        )
    disjuncts = tuple(d.constraints_avoiding(state.reducible_block) for d in state.disjuncts())
    used = frozenset().union(*(d.variables for d in disjuncts))
    unused = frozenset(state.selectors) - used
    return DisjunctQbf(state.prefix.without(state.reducible_block | unused), disjuncts)


def _selector_key(phi: ConjunctiveFormula, selectors: FrozenSet[int]) -> SelectorKey:
    units = [c[0] for c in phi.clauses if len(c) == 1 and var_of(c[0]) in selectors]
    return tuple(sorted(units, key=var_of))


def eliminate_selector_block(
    phi: DisjunctQbf, selectors: Iterable[int], pool: FreshVarPool
) -> DisjunctQbf:
    """
    ∃A ∀X_q over mutually exclusive selector groups: each group keeps its own copy of X_q and
    loses its selector units, which is quantifier elimination of A without the falsified
    combinations. Equivalent to eliminate_variable applied to each selector innermost first;
    grouping keeps one copy of X_q per selector pattern instead of one per elimination step.
    """
    x_q = _innermost_block(phi, FORALL, "eliminate_selector_block")
    selectors = frozenset(selectors) & phi.prefix.variables
    pool.ensure_above(phi)
    groups: Dict[SelectorKey, List[ConjunctiveFormula]] = {}
    for disjunct in phi.disjuncts:
        key = _selector_key(disjunct, selectors)
        groups.setdefault(key, []).append(disjunct.constraints_avoiding(selectors))

    disjuncts = []
    copies = []
    for position, key in enumerate(sorted(groups)):
        members = groups[key]
        if position == 0:
            disjuncts.extend(members)
            continue
        occurring = sorted(x_q & frozenset().union(*(m.variables for m in members)))
        renamed = dict(zip(occurring, pool.fresh_block(len(occurring))))
        copies.extend(renamed.values())
        disjuncts.extend(member.rename(renamed) for member in members)
    prefix = phi.prefix.without(selectors).appended(FORALL, copies)
    return DisjunctQbf(prefix, tuple(disjuncts))


def solve_universal_only(phi: DisjunctQbf) -> bool:
    """
    A purely universal disjunction is true iff it is a tautology, i.e. iff no assignment
    falsifies one clause of every disjunct. Selector s_{i,c} picks the falsified clause c of
    disjunct i.
    """
    if phi.prefix.existential_variables:
        raise QbkValidationError("solve_universal_only needs a purely universal prefix")
    if any(d.equations for d in phi.disjuncts):
        raise QbkValidationError("solve_universal_only needs clausal disjuncts")
    if any(d.is_empty for d in phi.disjuncts):
        return True
    live = [d for d in phi.disjuncts if not d.is_bottom]
    if not live:
        return False

    pool = FreshVarPool.for_formula(phi)
    clauses = []
    for index, disjunct in enumerate(live):
        choices = []
        for clause in disjunct.clauses:
            chosen = pool.fresh(("falsify", index, clause))
            choices.append(chosen)
            clauses.extend([-chosen, -literal] for literal in clause)
        clauses.append(choices)
    with Solver(name="g3", bootstrap_with=clauses) as solver:
        falsifiable = solver.solve()
    return not falsifiable


def _without_subsumed(disjuncts: Iterable[ConjunctiveFormula]) -> Tuple[ConjunctiveFormula, ...]:
    """
    Drop bottoms, duplicates and every disjunct whose clauses include all clauses of another
    """
    unique = list(_unique_live(disjuncts))
    clause_sets = [frozenset(d.clauses) for d in unique]
    kept = []
    for index, clauses in enumerate(clause_sets):
        if not any(other < clauses for other in clause_sets):
            kept.append(unique[index])
    return tuple(kept)


def _record(trace: Optional[list], log_object: QbkLogger, stage: str, count: int):
    if trace is not None:
        trace.append((stage, count))
    if log_object:
        log_object.write_log("QBK0301", None, {"stage": stage, "count": count})


def solve_2cnf(phi, trace: Optional[list] = None, log_object: QbkLogger = None) -> bool:
    """
    Truth value of a k-disjunct QBF whose disjuncts are all 2CNF. When a list is passed as
    trace, (stage, disjunct count) pairs are appended to it.
    """
    phi = as_disjunct_qbf(phi)
    for disjunct in phi.disjuncts:
        _check_2cnf(disjunct)
    pool = FreshVarPool.for_formula(phi)

    while True:
        disjuncts = _without_subsumed(propagate(d) for d in phi.disjuncts)
        occurring = frozenset().union(*(d.variables for d in disjuncts))
        phi = DisjunctQbf(phi.prefix.restricted_to(occurring), disjuncts)
        _record(trace, log_object, "propagate", phi.k)
        if not disjuncts:
            return False
        if any(d.is_empty for d in disjuncts):
            return True
        innermost = phi.prefix.innermost
        if innermost.quantifier == EXISTS:
            phi = drop_innermost_existential(phi)
            _record(trace, log_object, "drop-existential", phi.k)
            continue
        if not phi.prefix.existential_variables:
            result = solve_universal_only(phi)
            _record(trace, log_object, "universal-only", phi.k)
            return result

        state = sel(phi, pool, log_object)
        _record(trace, log_object, "sel", state.disjunct_count)
        state = red_fixpoint(state, log_object)
        _record(trace, log_object, "red", state.disjunct_count)
        state = prune_heavy_disjuncts(state)
        _record(trace, log_object, "prune", state.disjunct_count)
        reduced = drop_xqminus1(state)
        _record(trace, log_object, "drop-block", reduced.k)
        phi = eliminate_selector_block(reduced, state.selectors, pool)
        _record(trace, log_object, "eliminate-selectors", phi.k)
