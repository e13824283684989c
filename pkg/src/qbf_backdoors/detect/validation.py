"""
Base classes for backdoors and independent membership checks for backdoors found by the
detection searches.

For the three base classes instantiating a variable set and deleting it leave the same
constraint shapes behind, so a deletion check stands in for the strong check once the
instantiation grid gets too large.
"""

from enum import Enum
from itertools import combinations, product
from typing import Iterable, Optional

from qbf_backdoors.core.assignment import assign_disjuncts
from qbf_backdoors.core.constants import STRONG_CHECK_MAX_VARS
from qbf_backdoors.core.formula import Equation, as_disjunct_qbf
from qbf_backdoors.core.graph import universal_components
from qbf_backdoors.core.measures import first_violation, positive_count
from qbf_backdoors.errors import QbkBusinessError, QbkErrorBase, QbkValidationError


class BaseClass(Enum):
    TWO_CNF = "2cnf"
    AFFINE = "aff"
    HORN_EXISTS = "horn"


def base_class_of(tag) -> BaseClass:
    if isinstance(tag, BaseClass):
        return tag
    try:
        return BaseClass(tag)
    except ValueError as error:
        raise QbkBusinessError(
            QbkErrorBase.UNKNOWN_CLASS, "unknown base class {}".format(tag)
        ) from error


def constraint_fits(constraint, base: BaseClass, d: Optional[int] = None) -> bool:
    if base is BaseClass.AFFINE:
        return isinstance(constraint, Equation) and (d is None or len(constraint.vars) <= d)
    if isinstance(constraint, Equation):
        return False
    if base is BaseClass.TWO_CNF:
        return len(constraint) <= 2
    return positive_count(constraint) <= 1


def describe_constraint(constraint) -> str:
    if isinstance(constraint, Equation):
        return "{} = {}".format(list(constraint.sorted_vars()), constraint.rhs)
    return str(list(constraint))


def class_violation(phi, base, q: Optional[int] = None, d: Optional[int] = None) -> Optional[str]:
    """
    Describe the first reason phi lies outside the base class, or None when it is a member.
    The alternation bound q is ignored for existential Horn, which allows no universal
    variable at all.
    """
    phi = as_disjunct_qbf(phi)
    base = base_class_of(base)
    for index, disjunct in enumerate(phi.disjuncts):
        witness = first_violation(disjunct, lambda c: constraint_fits(c, base, d))
        if witness is not None:
            return "constraint {} of disjunct {}".format(describe_constraint(witness), index)

    occurring = phi.prefix.restricted_to(phi.variables)
    if base is BaseClass.HORN_EXISTS:
        if occurring.universal_variables:
            return "universal variables {} occur".format(sorted(occurring.universal_variables))
    elif q is not None and occurring.alternations > q:
        return "{} quantifier alternations exceed {}".format(occurring.alternations, q)
    return None


def in_class(phi, base, q: Optional[int] = None, d: Optional[int] = None) -> bool:
    return class_violation(phi, base, q, d) is None


def validate_deletion_backdoor(phi, b_set: Iterable[int], base, q=None, d=None) -> bool:
    return in_class(as_disjunct_qbf(phi).delete_variables(b_set), base, q, d)


def validate_strong_backdoor(phi, b_set: Iterable[int], base, q=None, d=None) -> bool:
    """
    Every instantiation of the backdoor variables lands in the base class
    """
    phi = as_disjunct_qbf(phi)
    variables = sorted(b_set)
    if len(variables) > STRONG_CHECK_MAX_VARS:
        raise QbkValidationError(
            "strong backdoor check over {} variables exceeds the limit of {}".format(
                len(variables), STRONG_CHECK_MAX_VARS
            )
        )
    return all(
        in_class(assign_disjuncts(phi, dict(zip(variables, bits))), base, q, d)
        for bits in product((0, 1), repeat=len(variables))
    )


def validate_enhanced_backdoor(phi, b_set: Iterable[int], base, q=None, d=None) -> bool:
    """
    B ∪ U(Φ, B) is a backdoor; instantiated when small enough, deleted otherwise
    """
    extended = frozenset(b_set) | universal_components(phi, b_set)
    if len(extended) <= STRONG_CHECK_MAX_VARS:
        return validate_strong_backdoor(phi, extended, base, q, d)
    return validate_deletion_backdoor(phi, extended, base, q, d)


def smallest_backdoor(phi, k: int, base, q=None, d=None, enhanced: bool = False):
    """
    Brute force: the first set of at most k occurring variables, by size then by id order,
    that is a deletion backdoor (together with U(Φ, B) when enhanced). None when there is
    none.
    """
    phi = as_disjunct_qbf(phi)
    candidates = sorted(phi.variables)
    for size in range(k + 1):
        for chosen in combinations(candidates, size):
            deleted = frozenset(chosen)
            if enhanced:
                deleted |= universal_components(phi, deleted)
            if validate_deletion_backdoor(phi, deleted, base, q, d):
                return frozenset(chosen)
    return None
