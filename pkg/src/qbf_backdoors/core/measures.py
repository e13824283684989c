from typing import Iterable, Optional

from qbf_backdoors.core.formula import ConjunctiveFormula, as_disjunct_qbf


def max_y_arity(phi, y_set: Iterable[int]) -> int:
    """
    Δ(Φ, Y): the largest number of Y variables in a single constraint
    """
    phi = as_disjunct_qbf(phi)
    y_set = frozenset(y_set)
    return max(
        (
            len(variables & y_set)
            for disjunct in phi.disjuncts
            for variables in disjunct.constraint_variable_sets()
        ),
        default=0,
    )


def is_closed(phi, y_set: Iterable[int]) -> bool:
    """
    Y is Φ-closed when every constraint touching Y lies inside Y
    """
    phi = as_disjunct_qbf(phi)
    y_set = frozenset(y_set)
    return all(
        variables <= y_set
        for disjunct in phi.disjuncts
        for variables in disjunct.constraint_variable_sets()
        if variables & y_set
    )


def width(phi: ConjunctiveFormula) -> int:
    return max((len(clause) for clause in phi.clauses), default=0)


def is_2cnf(phi: ConjunctiveFormula) -> bool:
    return phi.is_clausal and width(phi) <= 2


def positive_count(clause) -> int:
    return sum(1 for literal in clause if literal > 0)


def is_horn(phi: ConjunctiveFormula) -> bool:
    return phi.is_clausal and all(positive_count(clause) <= 1 for clause in phi.clauses)


def is_affine(phi: ConjunctiveFormula, arity: Optional[int] = None) -> bool:
    """
    All constraints are equations, of at most the given arity when one is given
    """
    if not phi.is_affine:
        return False
    return arity is None or all(len(equation.vars) <= arity for equation in phi.equations)


def first_violation(phi: ConjunctiveFormula, predicate):
    """
    First constraint (clause or equation) of phi rejected by the predicate, or None
    """
    for constraint in list(phi.clauses) + list(phi.equations):
        if not predicate(constraint):
            return constraint
    return None
