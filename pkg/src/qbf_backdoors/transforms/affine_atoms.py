"""
The unit/equality fragment: every atom is a unit (x = b) or an equality (x = y), kept as
GF(2) equations ({x}, b) and ({x, y}, 0).
"""

from typing import List

from qbf_backdoors.core.formula import BOTTOM_EQUATION, ConjunctiveFormula, Equation, var_of
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError


def _is_atom(equation: Equation) -> bool:
    return len(equation.vars) == 1 or (len(equation.vars) == 2 and equation.rhs == 0)


def to_gamma_aff(phi: ConjunctiveFormula) -> ConjunctiveFormula:
    """
    Read units, unit equations, equalities and equality clause pairs into equation form
    """
    equations = []
    pending = set()
    for clause in phi.clauses:
        if not clause:
            equations.append(BOTTOM_EQUATION)
        elif len(clause) == 1:
            equations.append(([var_of(clause[0])], int(clause[0] > 0)))
        elif len(clause) == 2 and (clause[0] > 0) != (clause[1] > 0):
            partner = (-clause[0], -clause[1])
            if partner in pending:
                pending.remove(partner)
                equations.append(([var_of(clause[0]), var_of(clause[1])], 0))
            else:
                pending.add(clause)
        else:
            raise QbkValidationError("clause {} is not a unit or equality atom".format(clause))
    if pending:
        raise QbkValidationError("clause {} has no equality partner".format(min(pending)))
    for equation in phi.equations:
        if not _is_atom(equation) and not equation.is_bottom:
            raise QbkValidationError(
                "equation {} is not a unit or equality atom".format(equation.sorted_vars())
            )
        equations.append(equation)
    return ConjunctiveFormula.build(equations=equations)


def split_formula(phi: ConjunctiveFormula, q: int, pool: FreshVarPool) -> List[ConjunctiveFormula]:
    """
    q formulas, each satisfiable for every value of the old variables, whose conjunction
    under fresh existential variables is equivalent to phi. The smallest variable v_i of
    atom i is chained v_i ← y_{i,1} = y_{i,2} = … = y_{i,q−1} = v_i.
    """
    if q < 1:
        raise QbkValidationError("split needs q >= 1")
    atoms = to_gamma_aff(phi).equations
    if q == 1:
        return [ConjunctiveFormula.build(equations=atoms)]
    pieces = [[] for _ in range(q)]
    for atom in atoms:
        if atom.is_bottom:
            pieces[0].append(atom)
            continue
        chosen = min(atom.vars)
        chain = pool.fresh_block(q - 1)
        pieces[0].append(((atom.vars - {chosen}) | {chain[0]}, atom.rhs))
        for index in range(1, q - 1):
            pieces[index].append(({chain[index - 1], chain[index]}, 0))
        pieces[q - 1].append(({chain[-1], chosen}, 0))
    return [ConjunctiveFormula.build(equations=piece) for piece in pieces]


def equalities_to_clauses(phi: ConjunctiveFormula) -> ConjunctiveFormula:
    """
    Clause form of the fragment; an equality becomes two binary clauses
    """
    clauses = [list(clause) for clause in phi.clauses]
    for equation in phi.equations:
        variables = equation.sorted_vars()
        if equation.is_bottom:
            clauses.append([])
        elif len(variables) == 1:
            clauses.append([variables[0] if equation.rhs else -variables[0]])
        elif len(variables) == 2:
            x, y = variables
            if equation.rhs == 0:
                clauses += [[-x, y], [x, -y]]
            else:
                clauses += [[x, y], [-x, -y]]
        else:
            raise QbkValidationError(
                "equation {} has no binary clause form".format(list(variables))
            )
    return ConjunctiveFormula.build(clauses)

