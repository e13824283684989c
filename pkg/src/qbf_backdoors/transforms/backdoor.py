from math import ceil, log2
from typing import Iterable, Optional, Tuple

from qbf_backdoors.core.constants import EXISTS
from qbf_backdoors.core.formula import BOTTOM, ConjunctiveFormula, DisjunctQbf, QbfFormula
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.transforms.expansion import disj_expand


def backdoor_to_disjunct(
    phi: QbfFormula, b_set: Iterable[int], units_as_equations: bool = False
) -> DisjunctQbf:
    """
    2^|B| disjuncts over the unchanged prefix, equisatisfiable with phi
    """
    return DisjunctQbf(phi.prefix, tuple(disj_expand(phi.matrix, b_set, units_as_equations)))


def selector_bits(index: int, width: int) -> Tuple[int, ...]:
    """
    Binary digits of index, most significant first
    """
    return tuple((index >> (width - 1 - position)) & 1 for position in range(width))


def disjunct_to_backdoor(
    phi: DisjunctQbf, pool: Optional[FreshVarPool] = None
) -> Tuple[QbfFormula, frozenset]:
    """
    Conjunctive QBF with a fresh innermost existential block Z, |Z| = ceil(log2 k).
    Clause c of disjunct i is widened to c ∨ T_i(Z), where T_i is false exactly when Z
    spells the digits of i.
    """
    if any(d.equations for d in phi.disjuncts):
        raise QbkValidationError("disjunct_to_backdoor needs clausal disjuncts")
    if phi.k == 0:
        return QbfFormula(phi.prefix, BOTTOM), frozenset()
    if phi.k == 1:
        return QbfFormula(phi.prefix, phi.disjuncts[0]), frozenset()

    if pool is None:
        pool = FreshVarPool.for_formula(phi)
    width = ceil(log2(phi.k))
    padded = list(phi.disjuncts) + [phi.disjuncts[0]] * (2**width - phi.k)
    z_vars = pool.fresh_block(width)
    clauses = []
    for index, disjunct in enumerate(padded):
        selector = [z if bit == 0 else -z for z, bit in zip(z_vars, selector_bits(index, width))]
        clauses.extend(list(clause) + selector for clause in disjunct.clauses)
    matrix = ConjunctiveFormula.build(clauses)
    return QbfFormula(phi.prefix.appended(EXISTS, z_vars), matrix), frozenset(z_vars)
