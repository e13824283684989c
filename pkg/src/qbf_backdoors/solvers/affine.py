"""
Evaluation of k-disjunct QBFs whose disjuncts are GF(2) equation systems.

Each disjunct is kept in reduced echelon form over a column order running from the innermost
variable outwards, so the leading column of a row is its innermost variable. Innermost
existential blocks are dropped, innermost universal blocks are eliminated through the
classes their equations induce on the block.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import (
    ConjunctiveFormula,
    DisjunctQbf,
    Equation,
    QuantifierPrefix,
    as_disjunct_qbf,
)
from qbf_backdoors.errors import QbkValidationError, check_bound
from qbf_backdoors.logger import QbkLogger


def column_order(prefix: QuantifierPrefix) -> Tuple[int, ...]:
    """
    Prefix variables from right to left; descending id inside a block
    """
    return tuple(
        variable
        for block in reversed(prefix.blocks)
        for variable in sorted(block.variables, reverse=True)
    )


def reduce_rows(rows: Sequence[int], width: int) -> Optional[Tuple[int, ...]]:
    """
    Gauss-Jordan elimination over bitset rows; bit c is column c and bit width is the
    right-hand side. Returns the non-zero rows ordered by leading column, or None when a row
    0 … 0 | 1 appears.
    """
    work = list(rows)
    row_idx = 0
    for col in range(width):
        pivot = None
        for r in range(row_idx, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and (work[r] >> col) & 1:
                work[r] ^= work[row_idx]
        row_idx += 1
        if row_idx == len(work):
            break
    if any(work[r] for r in range(row_idx, len(work))):
        return None
    return tuple(work[:row_idx])


@lru_cache(maxsize=65536)
def _consistent(rows: Tuple[int, ...], width: int) -> bool:
    return reduce_rows(rows, width) is not None


def leading_column(row: int) -> int:
    return (row & -row).bit_length() - 1


@dataclass(frozen=True)
class AffineMatrix:
    """
    M_φ: bitset rows over the given column order with the right-hand side as the last bit
    """

    columns: Tuple[int, ...]
    rows: Tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.columns)

    @classmethod
    def from_formula(cls, phi: ConjunctiveFormula, columns: Sequence[int]) -> "AffineMatrix":
        if phi.clauses:
            raise QbkValidationError("clause {} is not an equation".format(phi.clauses[0]))
        index = {variable: col for col, variable in enumerate(columns)}
        missing = phi.variables - index.keys()
        if missing:
            raise QbkValidationError("variables {} have no column".format(sorted(missing)))
        rows = []
        for equation in phi.equations:
            row = equation.rhs << len(columns)
            for variable in equation.vars:
                row |= 1 << index[variable]
            rows.append(row)
        return cls(tuple(columns), tuple(rows))

    def to_formula(self) -> ConjunctiveFormula:
        return ConjunctiveFormula.build(
            equations=(
                (
                    [v for col, v in enumerate(self.columns) if (row >> col) & 1],
                    (row >> self.width) & 1,
                )
                for row in self.rows
                if row
            )
        )

    @property
    def is_reduced_echelon(self) -> bool:
        """
        Non-zero rows with strictly increasing leading columns, each leading column clear in
        every other row
        """
        mask = (1 << self.width) - 1
        leads = []
        for row in self.rows:
            if not row & mask:
                return False
            leads.append(leading_column(row))
        if leads != sorted(set(leads)):
            return False
        return all(
            not (other >> lead) & 1
            for i, lead in enumerate(leads)
            for j, other in enumerate(self.rows)
            if i != j
        )


def gaussian_reduce(phi: ConjunctiveFormula, prefix: QuantifierPrefix) -> Optional[AffineMatrix]:
    """
    The reduced echelon form of φ under the prefix column order, or None when φ is
    inconsistent
    """
    matrix = AffineMatrix.from_formula(phi, column_order(prefix))
    rows = reduce_rows(matrix.rows, matrix.width)
    if rows is None:
        return None
    return AffineMatrix(matrix.columns, rows)


def _reduced_formula(phi: ConjunctiveFormula, prefix: QuantifierPrefix):
    matrix = gaussian_reduce(phi, prefix)
    return None if matrix is None else matrix.to_formula()


def _check_affine(phi: DisjunctQbf, operation: str):
    for disjunct in phi.disjuncts:
        if disjunct.clauses:
            raise QbkValidationError("{} needs affine disjuncts".format(operation))


def triangulate(phi: DisjunctQbf) -> DisjunctQbf:
    """
    Drop inconsistent disjuncts and put the others in reduced echelon form
    """
    phi = as_disjunct_qbf(phi)
    _check_affine(phi, "triangulate")
    reduced = {}
    for disjunct in phi.disjuncts:
        formula = _reduced_formula(disjunct, phi.prefix)
        if formula is not None:
            reduced.setdefault(formula.key(), formula)
    return phi.with_disjuncts(reduced.values())


def drop_implied_disjuncts(phi: DisjunctQbf) -> DisjunctQbf:
    """
    Remove every disjunct whose solutions are among those of another disjunct. Expects
    triangulated input, where equal solution sets mean equal equation sets.
    """
    columns = column_order(phi.prefix)
    matrices = [AffineMatrix.from_formula(d, columns) for d in phi.disjuncts]
    kept = []
    for index, matrix in enumerate(matrices):
        implied = any(
            other != index and _implies(matrix, matrices[other])
            for other in range(len(matrices))
        )
        if not implied:
            kept.append(phi.disjuncts[index])
    return phi.with_disjuncts(kept)


def _implies(first: AffineMatrix, second: AffineMatrix) -> bool:
    combined = reduce_rows(first.rows + second.rows, first.width)
    return combined is not None and len(combined) == len(first.rows)


def _check_reduced(phi: DisjunctQbf):
    for index, disjunct in enumerate(phi.disjuncts, start=1):
        formula = _reduced_formula(disjunct, phi.prefix)
        if formula is None or formula.key() != disjunct.key():
            raise QbkValidationError("disjunct {} is not in reduced echelon form".format(index))


def _innermost(phi: DisjunctQbf, quantifier: str, operation: str) -> FrozenSet[int]:
    block = phi.prefix.innermost
    if block is None or block.quantifier != quantifier:
        raise QbkValidationError(
            "{} needs an innermost {} block".format(
                operation, "existential" if quantifier == EXISTS else "universal"
            )
        )
    return block.variables


def drop_innermost_existential_aff(phi: DisjunctQbf) -> DisjunctQbf:
    """
    Equations led by X_q can always be met by the existential player, their leading columns
    being independent
    """
    x_q = _innermost(phi, EXISTS, "drop_innermost_existential_aff")
    _check_reduced(phi)
    return DisjunctQbf(
        phi.prefix.without(x_q), tuple(d.constraints_avoiding(x_q) for d in phi.disjuncts)
    )


def _block_equations(phi: ConjunctiveFormula, x_q: FrozenSet[int]) -> List[Equation]:
    return [equation for equation in phi.equations if equation.vars & x_q]


def prune_heavy_disjuncts_aff(phi: DisjunctQbf) -> DisjunctQbf:
    """
    Remove disjuncts with at least k equations over X_q until none is left
    """
    x_q = _innermost(phi, FORALL, "prune_heavy_disjuncts_aff")
    while True:
        kept = tuple(d for d in phi.disjuncts if len(_block_equations(d, x_q)) < phi.k)
        if len(kept) == phi.k:
            return phi
        phi = phi.with_disjuncts(kept)


@dataclass(frozen=True)
class AffineClass:
    """
    One class of assignments to X_q: the system S over X_q that defines it and the residual
    disjunct φ[τ] shared by its members
    """

    defining: Tuple[Tuple[FrozenSet[int], int], ...]
    residual: ConjunctiveFormula


def affine_classes(phi: ConjunctiveFormula, x_q: FrozenSet[int]) -> List[AffineClass]:
    """
    One class per sign pattern over the equations of φ led by X_q
    """
    led = _block_equations(phi, x_q)
    rest = phi.constraints_avoiding(x_q)
    classes = []
    for signs in product((0, 1), repeat=len(led)):
        defining = tuple((equation.vars & x_q, sign) for equation, sign in zip(led, signs))
        residual = rest.conjoin(
            ConjunctiveFormula.build(
                equations=[
                    (equation.vars - x_q, equation.rhs ^ sign)
                    for equation, sign in zip(led, signs)
                ]
            )
        )
        classes.append(AffineClass(defining, residual))
    return classes


def covers_block(systems: Sequence[Tuple], x_q: FrozenSet[int]) -> bool:
    """
    Whether every assignment to X_q satisfies one of the systems. Searches for an assignment
    violating one chosen equation of each system.
    """
    if any(not system for system in systems):
        return True
    index = {variable: col for col, variable in enumerate(sorted(x_q))}
    width = len(index)

    def row(variables, rhs):
        bits = rhs << width
        for variable in variables:
            bits |= 1 << index[variable]
        return bits

    def falsifiable(position, chosen):
        if position == len(systems):
            return True
        for variables, rhs in systems[position]:
            flipped = chosen + (row(variables, 1 - rhs),)
            if _consistent(tuple(sorted(flipped)), width) and falsifiable(position + 1, flipped):
                return True
        return False

    return not falsifiable(0, ())


def eliminate_universal_block_aff(phi: DisjunctQbf, log_object: QbkLogger = None) -> DisjunctQbf:
    """
    ∀X_q over light disjuncts: one candidate ⋀_{i∈I} φ_i[τ_i] per non-empty I and choice of
    classes, kept when the defining systems of the chosen classes cover every assignment
    to X_q
    """
    x_q = _innermost(phi, FORALL, "eliminate_universal_block_aff")
    _check_reduced(phi)
    k = phi.k
    for index, disjunct in enumerate(phi.disjuncts, start=1):
        count = len(_block_equations(disjunct, x_q))
        if count >= k:
            raise QbkValidationError(
                "disjunct {} has {} equations over the universal block".format(index, count)
            )

    options = [[None] + affine_classes(disjunct, x_q) for disjunct in phi.disjuncts]
    kept: Dict = {}
    candidates = 0
    for choice in product(*options):
        chosen = [cls for cls in choice if cls is not None]
        if not chosen:
            continue
        candidates += 1
        if covers_block([cls.defining for cls in chosen], x_q):
            residual = ConjunctiveFormula().conjoin(*(cls.residual for cls in chosen))
            kept.setdefault(residual.key(), residual)

    check_bound(
        len(kept) <= (2 ** max(k - 1, 0) + 1) ** k,
        "{} disjuncts after eliminating a universal block".format(len(kept)),
    )
    if log_object:
        log_object.write_log(
            "QBK0312", None, {"k_in": k, "candidates": candidates, "k_out": len(kept)}
        )
    return DisjunctQbf(phi.prefix.without(x_q), tuple(kept.values()))


def _record(trace: Optional[list], log_object: QbkLogger, stage: str, count: int):
    if trace is not None:
        trace.append((stage, count))
    if log_object:
        log_object.write_log("QBK0311", None, {"stage": stage, "count": count})


def solve_affine(phi, trace: Optional[list] = None, log_object: QbkLogger = None) -> bool:
    """
    Truth value of a k-disjunct QBF over GF(2) equation systems
    """
    phi = as_disjunct_qbf(phi)
    _check_affine(phi, "solve_affine")
    while True:
        phi = drop_implied_disjuncts(triangulate(phi))
        phi = DisjunctQbf(phi.prefix.restricted_to(phi.variables), phi.disjuncts)
        _record(trace, log_object, "triangulate", phi.k)
        if not phi.disjuncts:
            return False
        if any(d.is_empty for d in phi.disjuncts):
            return True
        if phi.prefix.innermost.quantifier == EXISTS:
            phi = drop_innermost_existential_aff(phi)
            _record(trace, log_object, "drop-existential", phi.k)
            continue
        phi = prune_heavy_disjuncts_aff(phi)
        _record(trace, log_object, "prune", phi.k)
        if not phi.disjuncts:
            return False
        phi = eliminate_universal_block_aff(phi, log_object)
        _record(trace, log_object, "eliminate-universal", phi.k)

