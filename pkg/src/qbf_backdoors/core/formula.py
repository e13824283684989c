"""
Formula data model.

Literals are signed integers (x and -x), variables are positive integers. A clause is a
tuple of literals ordered by variable id with no repeated variable; tautologies never
survive construction and the empty tuple is the falsified clause. A GF(2) equation is a
pair (A, b) meaning that the variables of A sum to b; (∅, 1) is kept as an explicit
falsity marker and (∅, 0) is dropped.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Mapping, NamedTuple, Optional, Tuple

from qbf_backdoors.core.constants import EXISTS, FORALL, QUANTIFIERS
from qbf_backdoors.errors import QbkValidationError

Literal = int
Clause = Tuple[Literal, ...]


def var_of(literal: Literal) -> int:
    return literal if literal > 0 else -literal


def make_clause(literals: Iterable[Literal]) -> Optional[Clause]:
    """
    Normalise a collection of literals. Returns None for a tautological clause.
    """
    chosen: Dict[int, int] = {}
    for literal in literals:
        if literal == 0:
            raise QbkValidationError("0 is not a literal")
        variable = var_of(literal)
        previous = chosen.get(variable)
        if previous is None:
            chosen[variable] = literal
        elif previous != literal:
            return None
    return tuple(chosen[variable] for variable in sorted(chosen))


class Equation(NamedTuple):
    """
    GF(2) equation: the variables in vars sum to rhs.
    """

    vars: FrozenSet[int]
    rhs: int

    @property
    def is_bottom(self) -> bool:
        return not self.vars and self.rhs == 1

    def sorted_vars(self) -> Tuple[int, ...]:
        return tuple(sorted(self.vars))


def make_equation(variables: Iterable[int], rhs: int) -> Optional[Equation]:
    """
    Normalise an equation; repeated variables cancel. Returns None for (∅, 0).
    """
    remaining = set()
    for variable in variables:
        if variable < 1:
            raise QbkValidationError("equation variable {} is not positive".format(variable))
        remaining ^= {variable}
    rhs = rhs & 1
    if not remaining and rhs == 0:
        return None
    return Equation(frozenset(remaining), rhs)


BOTTOM_EQUATION = Equation(frozenset(), 1)


@dataclass(frozen=True)
class ConjunctiveFormula:
    """
    A conjunction of clauses and equations. Build instances through build() so that
    constraints are normalised and duplicates removed.
    """

    clauses: Tuple[Clause, ...] = ()
    equations: Tuple[Equation, ...] = ()

    @classmethod
    def build(
        cls, clauses: Iterable[Iterable[Literal]] = (), equations: Iterable = ()
    ) -> "ConjunctiveFormula":
        kept_clauses = {}
        for literals in clauses:
            clause = make_clause(literals)
            if clause is not None:
                kept_clauses.setdefault(clause, None)
        kept_equations = {}
        for equation in equations:
            variables, rhs = equation
            normalised = make_equation(variables, rhs)
            if normalised is not None:
                kept_equations.setdefault(normalised, None)
        return cls(tuple(kept_clauses), tuple(kept_equations))

    @cached_property
    def variables(self) -> FrozenSet[int]:
        found = set()
        for clause in self.clauses:
            found.update(var_of(literal) for literal in clause)
        for equation in self.equations:
            found.update(equation.vars)
        return frozenset(found)

    @property
    def size(self) -> int:
        """
        Number of constraints |φ|
        """
        return len(self.clauses) + len(self.equations)

    @property
    def length(self) -> int:
        """
        Number of literal occurrences ‖φ‖; an equation counts its variables
        """
        return sum(len(clause) for clause in self.clauses) + sum(
            len(equation.vars) for equation in self.equations
        )

    @property
    def is_clausal(self) -> bool:
        return not self.equations

    @property
    def is_affine(self) -> bool:
        return not self.clauses

    @property
    def is_bottom(self) -> bool:
        return any(not clause for clause in self.clauses) or any(
            equation.is_bottom for equation in self.equations
        )

    @property
    def is_empty(self) -> bool:
        return not self.clauses and not self.equations

    def constraint_variable_sets(self) -> Iterable[FrozenSet[int]]:
        for clause in self.clauses:
            yield frozenset(var_of(literal) for literal in clause)
        for equation in self.equations:
            yield equation.vars

    def constraints_on(self, variables: Iterable[int]) -> "ConjunctiveFormula":
        """
        C(φ, S): the constraints mentioning a variable of S
        """
        chosen = frozenset(variables)
        return ConjunctiveFormula(
            tuple(c for c in self.clauses if any(var_of(literal) in chosen for literal in c)),
            tuple(e for e in self.equations if e.vars & chosen),
        )

    def constraints_avoiding(self, variables: Iterable[int]) -> "ConjunctiveFormula":
        """
        φ ∖ C(φ, S)
        """
        chosen = frozenset(variables)
        return ConjunctiveFormula(
            tuple(c for c in self.clauses if not any(var_of(literal) in chosen for literal in c)),
            tuple(e for e in self.equations if not e.vars & chosen),
        )

    def conjoin(self, *others: "ConjunctiveFormula") -> "ConjunctiveFormula":
        clauses = list(self.clauses)
        equations = list(self.equations)
        for other in others:
            clauses.extend(other.clauses)
            equations.extend(other.equations)
        return ConjunctiveFormula.build(clauses, equations)

    def delete_variables(self, variables: Iterable[int]) -> "ConjunctiveFormula":
        """
        φ − B: remove every occurrence of the variables
        """
        removed = frozenset(variables)
        return ConjunctiveFormula.build(
            (tuple(lit for lit in clause if var_of(lit) not in removed) for clause in self.clauses),
            ((equation.vars - removed, equation.rhs) for equation in self.equations),
        )

    def rename(self, mapping: Mapping[int, int]) -> "ConjunctiveFormula":
        def rename_literal(literal):
            target = mapping.get(var_of(literal), var_of(literal))
            return target if literal > 0 else -target

        return ConjunctiveFormula.build(
            (tuple(rename_literal(lit) for lit in clause) for clause in self.clauses),
            (
                (frozenset(mapping.get(v, v) for v in equation.vars), equation.rhs)
                for equation in self.equations
            ),
        )

    def key(self):
        """
        Order-insensitive identity of the constraint set
        """
        return frozenset(self.clauses), frozenset(self.equations)


TOP = ConjunctiveFormula()
BOTTOM = ConjunctiveFormula(((),))


class QuantifierBlock(NamedTuple):
    quantifier: str
    variables: FrozenSet[int]


@dataclass(frozen=True)
class QuantifierPrefix:
    """
    Quantifier blocks from outermost to innermost. build() drops empty blocks and merges
    neighbours with the same quantifier.
    """

    blocks: Tuple[QuantifierBlock, ...] = ()

    @classmethod
    def build(cls, blocks: Iterable[Tuple[str, Iterable[int]]]) -> "QuantifierPrefix":
        merged = []
        seen = set()
        for quantifier, variables in blocks:
            if quantifier not in QUANTIFIERS:
                raise QbkValidationError("unknown quantifier {}".format(quantifier))
            variables = frozenset(variables)
            if variables & seen:
                raise QbkValidationError(
                    "variables {} quantified twice".format(sorted(variables & seen))
                )
            seen |= variables
            if not variables:
                continue
            if merged and merged[-1].quantifier == quantifier:
                merged[-1] = QuantifierBlock(quantifier, merged[-1].variables | variables)
            else:
                merged.append(QuantifierBlock(quantifier, variables))
        return cls(tuple(merged))

    @cached_property
    def _position(self) -> Dict[int, int]:
        return {v: index for index, block in enumerate(self.blocks) for v in block.variables}

    @cached_property
    def variables(self) -> FrozenSet[int]:
        return frozenset(self._position)

    def block_index_of(self, variable: int) -> int:
        return self._position[variable]

    def quantifier_of(self, variable: int) -> str:
        return self.blocks[self._position[variable]].quantifier

    def is_universal(self, variable: int) -> bool:
        return self.quantifier_of(variable) == FORALL

    def is_left_of(self, first: int, second: int) -> bool:
        return self._position[first] < self._position[second]

    @property
    def universal_variables(self) -> FrozenSet[int]:
        return self._variables_of(FORALL)

    @property
    def existential_variables(self) -> FrozenSet[int]:
        return self._variables_of(EXISTS)

    def _variables_of(self, quantifier: str) -> FrozenSet[int]:
        return frozenset(
            v for block in self.blocks if block.quantifier == quantifier for v in block.variables
        )

    @property
    def alternations(self) -> int:
        return max(len(self.blocks) - 1, 0)

    @property
    def innermost(self) -> Optional[QuantifierBlock]:
        return self.blocks[-1] if self.blocks else None

    def without(self, variables: Iterable[int]) -> "QuantifierPrefix":
        removed = frozenset(variables)
        return QuantifierPrefix.build((b.quantifier, b.variables - removed) for b in self.blocks)

    def restricted_to(self, variables: Iterable[int]) -> "QuantifierPrefix":
        kept = frozenset(variables)
        return QuantifierPrefix.build((b.quantifier, b.variables & kept) for b in self.blocks)

    def appended(self, quantifier: str, variables: Iterable[int]) -> "QuantifierPrefix":
        return QuantifierPrefix.build(list(self.blocks) + [(quantifier, variables)])

    def max_variable(self) -> int:
        return max(self._position, default=0)


def _check_scope(prefix: QuantifierPrefix, matrix: ConjunctiveFormula):
    free = matrix.variables - prefix.variables
    if free:
        raise QbkValidationError("unquantified matrix variables {}".format(sorted(free)))


@dataclass(frozen=True)
class QbfFormula:
    prefix: QuantifierPrefix
    matrix: ConjunctiveFormula

    def __post_init__(self):
        _check_scope(self.prefix, self.matrix)

    def as_disjunct(self) -> "DisjunctQbf":
        return DisjunctQbf(self.prefix, (self.matrix,))


@dataclass(frozen=True)
class DisjunctQbf:
    """
    A shared prefix over a disjunction of conjunctive matrices. k = 0 is the false formula.
    """

    prefix: QuantifierPrefix
    disjuncts: Tuple[ConjunctiveFormula, ...]

    def __post_init__(self):
        for disjunct in self.disjuncts:
            _check_scope(self.prefix, disjunct)

    @property
    def k(self) -> int:
        return len(self.disjuncts)

    @cached_property
    def variables(self) -> FrozenSet[int]:
        """
        Variables occurring in some disjunct
        """
        return frozenset().union(*(d.variables for d in self.disjuncts))

    def with_disjuncts(self, disjuncts: Iterable[ConjunctiveFormula]) -> "DisjunctQbf":
        return DisjunctQbf(self.prefix, tuple(disjuncts))

    def delete_variables(self, variables: Iterable[int]) -> "DisjunctQbf":
        removed = frozenset(variables)
        return DisjunctQbf(
            self.prefix.without(removed),
            tuple(d.delete_variables(removed) for d in self.disjuncts),
        )


def as_disjunct_qbf(phi) -> DisjunctQbf:
    if isinstance(phi, QbfFormula):
        return phi.as_disjunct()
    return phi
