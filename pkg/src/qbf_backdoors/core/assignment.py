from typing import Dict, FrozenSet, Iterator, Mapping, Optional

from qbf_backdoors.core.formula import (
    ConjunctiveFormula,
    DisjunctQbf,
    Literal,
    QbfFormula,
    var_of,
)
from qbf_backdoors.errors import QbkValidationError


class PartialAssignment(Mapping[int, int]):
    """
    Read-only map from variables to bits.
    """

    def __init__(self, bindings: Optional[Mapping[int, int]] = None):
        self._bindings: Dict[int, int] = {}
        for variable, value in (bindings or {}).items():
            if variable < 1 or value not in (0, 1):
                raise QbkValidationError(
                    "invalid binding {}={} in partial assignment".format(variable, value)
                )
            self._bindings[variable] = value

    @classmethod
    def from_literals(cls, literals) -> "PartialAssignment":
        """
        The assignment making every given literal true
        """
        return cls({var_of(lit): int(lit > 0) for lit in literals})

    def __getitem__(self, variable: int) -> int:
        return self._bindings[variable]

    def __iter__(self) -> Iterator[int]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __repr__(self):
        return "PartialAssignment({})".format(dict(sorted(self._bindings.items())))

    @property
    def domain(self) -> FrozenSet[int]:
        return frozenset(self._bindings)

    def literal_value(self, literal: Literal) -> Optional[int]:
        value = self._bindings.get(var_of(literal))
        if value is None:
            return None
        return value if literal > 0 else 1 - value

    def extended(self, other: Mapping[int, int]) -> "PartialAssignment":
        merged = dict(self._bindings)
        for variable, value in other.items():
            if merged.get(variable, value) != value:
                raise QbkValidationError("conflicting values for variable {}".format(variable))
            merged[variable] = value
        return PartialAssignment(merged)

    def as_literals(self):
        return [v if value else -v for v, value in sorted(self._bindings.items())]


def apply_assignment(phi: ConjunctiveFormula, tau: Mapping[int, int]) -> ConjunctiveFormula:
    """
    φ[τ]: drop satisfied clauses, strip falsified literals and fold assigned equation
    variables into the right-hand side
    """
    if not isinstance(tau, PartialAssignment):
        tau = PartialAssignment(tau)
    clauses = []
    for clause in phi.clauses:
        remaining = []
        for literal in clause:
            value = tau.literal_value(literal)
            if value is None:
                remaining.append(literal)
            elif value == 1:
                break
        else:
            clauses.append(remaining)
    equations = []
    for equation in phi.equations:
        rhs = equation.rhs
        for variable in equation.vars & tau.domain:
            rhs ^= tau[variable]
        equations.append((equation.vars - tau.domain, rhs))
    return ConjunctiveFormula.build(clauses, equations)


def assign_qbf(phi: QbfFormula, tau: Mapping[int, int]) -> QbfFormula:
    """
    Φ[τ]: the assigned variables leave the prefix
    """
    return QbfFormula(phi.prefix.without(tau.keys()), apply_assignment(phi.matrix, tau))


def assign_disjuncts(phi: DisjunctQbf, tau: Mapping[int, int]) -> DisjunctQbf:
    return DisjunctQbf(
        phi.prefix.without(tau.keys()),
        tuple(apply_assignment(disjunct, tau) for disjunct in phi.disjuncts),
    )
