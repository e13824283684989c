"""
disj and part: rewriting a conjunctive matrix as a disjunction that isolates a variable set.
"""

from itertools import product
from typing import Iterable, List, Tuple

from qbf_backdoors.core.assignment import apply_assignment
from qbf_backdoors.core.constants import DISJ_MAX_VARS
from qbf_backdoors.core.formula import ConjunctiveFormula, var_of
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError, check_bound


def unit_constraints(tau: dict, as_equations: bool = False) -> ConjunctiveFormula:
    """
    U_τ: the assignment written as unit clauses, or as unit equations
    """
    if as_equations:
        return ConjunctiveFormula.build(equations=[([v], value) for v, value in tau.items()])
    return ConjunctiveFormula.build([[v if value else -v] for v, value in tau.items()])


def disj_expand(
    phi: ConjunctiveFormula, x_set: Iterable[int], units_as_equations: bool = False
) -> List[ConjunctiveFormula]:
    """
    The 2^|X| disjuncts φ[τ] ∧ U_τ, τ counting upwards with the smallest variable most
    significant
    """
    variables = sorted(x_set)
    if len(variables) > DISJ_MAX_VARS:
        raise QbkValidationError(
            "disj over {} variables exceeds the limit of {}".format(len(variables), DISJ_MAX_VARS)
        )
    disjuncts = []
    for bits in product((0, 1), repeat=len(variables)):
        tau = dict(zip(variables, bits))
        units = unit_constraints(tau, units_as_equations)
        disjuncts.append(apply_assignment(phi, tau).conjoin(units))
    return disjuncts


def partition_by_first_variable(
    phi: ConjunctiveFormula, variables: List[int]
) -> Tuple[ConjunctiveFormula, List[ConjunctiveFormula]]:
    """
    φ⁰ = φ ∖ C(φ, X) and φ¹..φᵗ; each constraint of C(φ, X) goes to its smallest X variable
    """
    position = {v: index for index, v in enumerate(variables)}
    parts_clauses = [[] for _ in variables]
    parts_equations = [[] for _ in variables]
    rest_clauses, rest_equations = [], []
    for clause in phi.clauses:
        owners = [position[var_of(lit)] for lit in clause if var_of(lit) in position]
        if owners:
            parts_clauses[min(owners)].append(clause)
        else:
            rest_clauses.append(clause)
    for equation in phi.equations:
        owners = [position[v] for v in equation.vars if v in position]
        if owners:
            parts_equations[min(owners)].append(equation)
        else:
            rest_equations.append(equation)
    rest = ConjunctiveFormula(tuple(rest_clauses), tuple(rest_equations))
    parts = [
        ConjunctiveFormula(tuple(clauses), tuple(equations))
        for clauses, equations in zip(parts_clauses, parts_equations)
    ]
    return rest, parts


def part_expand(
    phi: ConjunctiveFormula, x_set: Iterable[int], pool: FreshVarPool
) -> Tuple[List[ConjunctiveFormula], Tuple[int, ...]]:
    """
    The 2|X|+1 disjuncts of part(φ, X) with their fresh selector variables a_1..a_t.
    Conjoining the result over every assignment of the selectors is equisatisfiable with φ.
    """
    variables = sorted(x_set)
    if not variables:
        return [phi], ()
    rest, parts = partition_by_first_variable(phi, variables)
    selectors = pool.fresh_block(len(variables))
    disjuncts = [rest.conjoin(ConjunctiveFormula.build([[-a] for a in selectors]))]
    for x, a, part in zip(variables, selectors, parts):
        for value in (1, 0):
            guard = ConjunctiveFormula.build([[a], [x if value else -x]])
            disjuncts.append(guard.conjoin(apply_assignment(part, {x: value})))

    check_bound(len(disjuncts) == 2 * len(variables) + 1, "part produced the wrong count")
    if phi.constraints_on(variables).is_clausal:
        total = sum(d.length for d in disjuncts)
        check_bound(
            total <= phi.length + 5 * len(variables) + 2,
            "part length {} above {}".format(total, phi.length + 5 * len(variables) + 2),
        )
    return disjuncts, selectors
