"""
Squishing: trading disjuncts for quantifier blocks in the unit/equality fragment.
"""

from itertools import combinations
from math import comb
from typing import List, Tuple

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import BOTTOM, ConjunctiveFormula, DisjunctQbf
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkSystemError, QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.transforms.affine_atoms import split_formula, to_gamma_aff

SQUISH_TARGET = 4


def colex_subsets(k: int, size: int) -> List[Tuple[int, ...]]:
    """
    All size-subsets of range(k) in colexicographic order
    """
    return sorted(combinations(range(k), size), key=lambda subset: tuple(reversed(subset)))


def squish(
    phi: DisjunctQbf, k: int, p: int, pool: FreshVarPool, log_object: QbkLogger = None
) -> DisjunctQbf:
    """
    Equivalent formula with k disjuncts from one with at most C(k, 2^p). Disjunct j is
    split into 2^p pieces handed to the members of the j-th subset; the new block
    ∃(Y ∪ Z) ∀W lets the universal player pick which piece set is checked.
    """
    pieces = 2**p
    if p < 0 or pieces > k:
        raise QbkValidationError("squish needs 2^p <= k")
    capacity = comb(k, pieces)
    if phi.k > capacity:
        raise QbkValidationError(
            "{} disjuncts do not fit into C({}, {}) = {}".format(phi.k, k, pieces, capacity)
        )
    pool.ensure_above(phi)
    sources = [to_gamma_aff(d) for d in phi.disjuncts if not d.is_bottom]
    if not sources:
        return DisjunctQbf(phi.prefix, (BOTTOM,) * k)
    sources += [sources[0]] * (capacity - len(sources))

    members = [[] for _ in range(k)]
    for subset, source in zip(colex_subsets(k, pieces), sources):
        for member, piece in zip(subset, split_formula(source, pieces, pool)):
            members[member].append(piece)

    y_vars = set()
    for source_pieces in members:
        for piece in source_pieces:
            y_vars |= piece.variables
    y_vars -= phi.prefix.variables

    w_vars = pool.fresh_block(p)
    z_vars = []
    disjuncts = []
    for member_pieces in members:
        z_row = pool.fresh_block(p)
        z_vars.extend(z_row)
        equalities = [({z, w}, 0) for z, w in zip(z_row, w_vars)]
        selector = ConjunctiveFormula.build(equations=equalities)
        disjuncts.append(selector.conjoin(*member_pieces))

    atoms = sum(d.size for d in disjuncts)
    check_bound(
        atoms <= k * p + pieces * sum(s.size for s in sources),
        "squish produced {} atoms".format(atoms),
    )
    prefix = phi.prefix.appended(EXISTS, y_vars | set(z_vars)).appended(FORALL, w_vars)
    if log_object:
        log_object.write_log("QBK0202", None, {"k_in": phi.k, "k_out": k, "p": p, "atoms": atoms})
    return DisjunctQbf(prefix, tuple(disjuncts))


def squish_parameters(count: int) -> Tuple[int, int]:
    """
    Smallest k' in [4, count) with a p such that k'/3 <= 2^p <= 2k'/3 and C(k', 2^p) >= count
    """
    for target in range(SQUISH_TARGET, count):
        p = 0
        while 2**p <= 2 * target / 3:
            if 3 * 2**p >= target and comb(target, 2**p) >= count:
                return target, p
            p += 1
    raise QbkSystemError(
        QbkSystemError.INVARIANT_VIOLATION, "no squish parameters for {}".format(count)
    )


def squish_to_four(
    phi: DisjunctQbf, pool: FreshVarPool, log_object: QbkLogger = None
) -> DisjunctQbf:
    """
    Repeated squishing down to at most four disjuncts; inputs with four or fewer are returned
    as they are
    """
    while phi.k > SQUISH_TARGET:
        target, p = squish_parameters(phi.k)
        phi = squish(phi, target, p, pool, log_object)
    return phi
