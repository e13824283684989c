"""
Quantifier elimination of single variables from k-disjunct QBFs.
"""

from typing import Iterable, List

from qbf_backdoors.core.assignment import apply_assignment
from qbf_backdoors.core.constants import FORALL
from qbf_backdoors.core.formula import DisjunctQbf, QbfFormula, QuantifierPrefix
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger


def _later_variables(prefix: QuantifierPrefix, variable: int) -> frozenset:
    position = prefix.block_index_of(variable)
    return frozenset(v for block in prefix.blocks[position + 1 :] for v in block.variables)


def eliminate_variable(
    phi: DisjunctQbf, variable: int, pool: FreshVarPool, log_object: QbkLogger = None
) -> DisjunctQbf:
    """
    Remove one variable, treating it as the last of its block. Variables of later blocks that
    occur on the variable=1 side are renamed apart and join their block. An existential
    doubles the disjuncts, a universal squares their number; falsified disjuncts are dropped.
    """
    if variable not in phi.prefix.variables:
        raise QbkValidationError("variable {} is not quantified".format(variable))
    later = _later_variables(phi.prefix, variable)
    zero_side = [apply_assignment(d, {variable: 0}) for d in phi.disjuncts]
    one_side = [apply_assignment(d, {variable: 1}) for d in phi.disjuncts]

    renamed = sorted(later & frozenset().union(*(d.variables for d in one_side)))
    copies = dict(zip(renamed, pool.fresh_block(len(renamed))))
    one_side = [d.rename(copies) for d in one_side]

    if phi.prefix.quantifier_of(variable) == FORALL:
        disjuncts = [a.conjoin(b) for a in zero_side for b in one_side]
    else:
        disjuncts = zero_side + one_side
    disjuncts = [d for d in disjuncts if not d.is_bottom]

    blocks = []
    for block in phi.prefix.blocks:
        variables = (block.variables - {variable}) | {
            copies[v] for v in block.variables if v in copies
        }
        blocks.append((block.quantifier, variables))
    if log_object:
        log_object.write_log(
            "QBK0201",
            None,
            {"variable": variable, "k_in": phi.k, "k_out": len(disjuncts), "renamed": len(copies)},
        )
    return DisjunctQbf(QuantifierPrefix.build(blocks), tuple(disjuncts))


def innermost_first(prefix: QuantifierPrefix, variables: Iterable[int]) -> List[int]:
    return sorted(variables, key=lambda v: (prefix.block_index_of(v), v), reverse=True)


def backdoor_to_disjunct_qe(
    phi: QbfFormula, b_set: Iterable[int], pool: FreshVarPool, log_object: QbkLogger = None
) -> DisjunctQbf:
    """
    Quantifier-eliminate the backdoor variables innermost first
    """
    b_set = frozenset(b_set)
    pool.ensure_above(phi)
    result = phi.as_disjunct()
    for variable in innermost_first(phi.prefix, b_set):
        result = eliminate_variable(result, variable, pool, log_object)
    if b_set:
        check_bound(
            result.k <= 2 ** (2 ** (len(b_set) - 1)),
            "{} disjuncts after eliminating {} variables".format(result.k, len(b_set)),
        )
    return result
