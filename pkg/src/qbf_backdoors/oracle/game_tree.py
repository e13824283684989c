"""
Exhaustive evaluation of QBFs and k-disjunct QBFs by walking the game tree.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple

from qbf_backdoors.core.assignment import PartialAssignment
from qbf_backdoors.core.constants import (
    DEFAULT_ORACLE_MAX_NODES,
    DEFAULT_ORACLE_MAX_VARS,
    FORALL,
    ORACLE_MAX_VARS_CAP,
)
from qbf_backdoors.core.formula import ConjunctiveFormula, DisjunctQbf, as_disjunct_qbf, var_of
from qbf_backdoors.errors import OracleBudgetExceeded, QbkValidationError
from qbf_backdoors.logger import QbkLogger


@dataclass(frozen=True)
class OracleBudget:
    max_vars: int = DEFAULT_ORACLE_MAX_VARS
    max_nodes: int = DEFAULT_ORACLE_MAX_NODES

    def __post_init__(self):
        if not 0 <= self.max_vars <= ORACLE_MAX_VARS_CAP:
            raise QbkValidationError(
                "max_vars must be between 0 and {}".format(ORACLE_MAX_VARS_CAP)
            )
        if self.max_nodes < 1:
            raise QbkValidationError("max_nodes must be positive")


DEFAULT_BUDGET = OracleBudget()

# Internal constraint forms: ("c", literals) and ("x", variables, rhs)
_CLAUSE = "c"
_EQUATION = "x"


def _compile(disjunct: ConjunctiveFormula) -> Optional[Tuple]:
    """
    Compact constraint tuple of a disjunct, or None when it is already falsified
    """
    if disjunct.is_bottom:
        return None
    constraints = [(_CLAUSE, clause) for clause in disjunct.clauses]
    constraints += [(_EQUATION, equation.vars, equation.rhs) for equation in disjunct.equations]
    return tuple(constraints)


def _assign(constraints: Tuple, variable: int, value: int) -> Optional[Tuple]:
    """
    Simplify one disjunct under variable=value; None when falsified
    """
    reduced = []
    true_literal = variable if value else -variable
    for constraint in constraints:
        if constraint[0] == _CLAUSE:
            literals = constraint[1]
            if true_literal in literals:
                continue
            if -true_literal in literals:
                literals = tuple(lit for lit in literals if lit != -true_literal)
                if not literals:
                    return None
                reduced.append((_CLAUSE, literals))
            else:
                reduced.append(constraint)
        else:
            _, variables, rhs = constraint
            if variable in variables:
                variables = variables - {variable}
                rhs ^= value
                if not variables:
                    if rhs:
                        return None
                    continue
                reduced.append((_EQUATION, variables, rhs))
            else:
                reduced.append(constraint)
    return tuple(reduced)


def _occurring(disjuncts: Iterable[Tuple]) -> set:
    found = set()
    for constraints in disjuncts:
        for constraint in constraints:
            if constraint[0] == _CLAUSE:
                found.update(var_of(lit) for lit in constraint[1])
            else:
                found.update(constraint[1])
    return found


class _GameTree:
    def __init__(self, phi: DisjunctQbf, budget: OracleBudget, memoize: bool):
        phi = as_disjunct_qbf(phi)
        occurring = phi.variables
        if len(occurring) > budget.max_vars:
            raise OracleBudgetExceeded(
                "{} variables exceed the oracle limit of {}".format(
                    len(occurring), budget.max_vars
                )
            )
        self.budget = budget
        self.order: List[int] = [
            v for block in phi.prefix.blocks for v in sorted(block.variables) if v in occurring
        ]
        self.quantifier: Dict[int, str] = {v: phi.prefix.quantifier_of(v) for v in self.order}
        self.roots = tuple(c for c in map(_compile, phi.disjuncts) if c is not None)
        self.nodes = 0
        self.memo = {} if memoize else None

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise OracleBudgetExceeded(
                "game tree exceeds {} nodes".format(self.budget.max_nodes)
            )

    def _next_index(self, index: int, disjuncts: Tuple) -> int:
        occurring = _occurring(disjuncts)
        while index < len(self.order) and self.order[index] not in occurring:
            index += 1
        return index

    def children(self, disjuncts: Tuple, variable: int, value: int) -> Tuple:
        reduced = (_assign(constraints, variable, value) for constraints in disjuncts)
        return tuple(c for c in reduced if c is not None)

    def value(self, index: int, disjuncts: Tuple) -> bool:
        if not disjuncts:
            return False
        if any(not constraints for constraints in disjuncts):
            return True
        self._tick()
        index = self._next_index(index, disjuncts)
        if self.memo is not None:
            key = (index, frozenset(disjuncts))
            if key in self.memo:
                return self.memo[key]
        variable = self.order[index]
        branches = (
            self.value(index + 1, self.children(disjuncts, variable, value)) for value in (0, 1)
        )
        if self.quantifier[variable] == FORALL:
            result = all(branches)
        else:
            result = any(branches)
        if self.memo is not None:
            self.memo[key] = result
        return result

    def losing_line(self, index: int, disjuncts: Tuple, line: Dict[int, int]):
        """
        Follow a falsifying play: a false universal branch, value 0 for existential moves
        """
        while disjuncts and all(disjuncts):
            index = self._next_index(index, disjuncts)
            variable = self.order[index]
            chosen = 0
            if self.quantifier[variable] == FORALL:
                zero_branch = self.children(disjuncts, variable, 0)
                chosen = 1 if self.value(index + 1, zero_branch) else 0
            line[variable] = chosen
            disjuncts = self.children(disjuncts, variable, chosen)
            index += 1


def evaluate(
    phi, budget: OracleBudget = DEFAULT_BUDGET, memoize=False, log_object: QbkLogger = None
) -> bool:
    """
    Truth value of a QBF or k-disjunct QBF. Raises OracleBudgetExceeded rather than guessing.
    """
    tree = _GameTree(phi, budget, memoize)
    result = tree.value(0, tree.roots)
    if log_object:
        log_object.write_log("QBK0101", None, {"nodes": tree.nodes, "result": result})
    return result


def winning_counterexample(
    phi, budget: OracleBudget = DEFAULT_BUDGET
) -> Optional[PartialAssignment]:
    """
    A total assignment along one play the universal player wins, or None for a true formula
    """
    phi = as_disjunct_qbf(phi)
    tree = _GameTree(phi, budget, memoize=False)
    if tree.value(0, tree.roots):
        return None
    line: Dict[int, int] = {}
    tree.losing_line(0, tree.roots, line)
    return PartialAssignment({v: line.get(v, 0) for v in phi.prefix.variables})


def matrix_value(disjuncts: Iterable[ConjunctiveFormula], assignment: Dict[int, int]) -> bool:
    """
    Truth of a disjunction of matrices under a total assignment
    """
    for disjunct in disjuncts:
        constraints = _compile(disjunct)
        if constraints is None:
            continue
        if all(_constraint_holds(c, assignment) for c in constraints):
            return True
    return False


def _constraint_holds(constraint, assignment) -> bool:
    if constraint[0] == _CLAUSE:
        return any(assignment[var_of(lit)] == (lit > 0) for lit in constraint[1])
    _, variables, rhs = constraint
    return sum(assignment[v] for v in variables) % 2 == rhs


def assignments(variables: Iterable[int]):
    """
    Every total assignment of the variables, first variable most significant
    """
    ordered = sorted(variables)
    for bits in product((0, 1), repeat=len(ordered)):
        yield dict(zip(ordered, bits))


def equisatisfiable(a, b, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    """
    Same prefix and the same satisfying assignments of the two matrices
    """
    a, b = as_disjunct_qbf(a), as_disjunct_qbf(b)
    if a.prefix != b.prefix:
        raise QbkValidationError("equisatisfiability needs identical prefixes")
    variables = a.variables | b.variables
    if len(variables) > budget.max_vars:
        raise OracleBudgetExceeded(
            "{} variables exceed the oracle limit of {}".format(len(variables), budget.max_vars)
        )
    return all(
        matrix_value(a.disjuncts, assignment) == matrix_value(b.disjuncts, assignment)
        for assignment in assignments(variables)
    )


def count_models(phi: ConjunctiveFormula, variables: Iterable[int] = None) -> int:
    variables = phi.variables if variables is None else frozenset(variables)
    return sum(1 for assignment in assignments(variables) if matrix_value([phi], assignment))


def satisfiable(phi: ConjunctiveFormula) -> bool:
    return any(matrix_value([phi], assignment) for assignment in assignments(phi.variables))
