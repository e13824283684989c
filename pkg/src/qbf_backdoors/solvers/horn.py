from collections import deque
from typing import Dict, FrozenSet, List, Optional

from qbf_backdoors.core.formula import ConjunctiveFormula, as_disjunct_qbf
from qbf_backdoors.core.measures import first_violation, positive_count
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.logger import QbkLogger


def _check_horn(phi: ConjunctiveFormula):
    if phi.equations:
        raise QbkValidationError("equations are not Horn constraints")
    violation = first_violation(phi, lambda clause: positive_count(clause) <= 1)
    if violation is not None:
        raise QbkValidationError("clause {} is not Horn".format(violation))


def horn_minimal_model(phi: ConjunctiveFormula) -> Optional[FrozenSet[int]]:
    """
    The variables true in the least model of a Horn formula, or None when it has no model.
    Each clause counts its body literals not yet made true and fires its head at zero.
    """
    _check_horn(phi)
    pending: List[int] = []
    heads: List[Optional[int]] = []
    watchers: Dict[int, List[int]] = {}
    queue = deque()
    for index, clause in enumerate(phi.clauses):
        head = next((literal for literal in clause if literal > 0), None)
        body = [-literal for literal in clause if literal < 0]
        heads.append(head)
        pending.append(len(body))
        for variable in body:
            watchers.setdefault(variable, []).append(index)
        if not body:
            if head is None:
                return None
            queue.append(head)

    model = set()
    while queue:
        variable = queue.popleft()
        if variable in model:
            continue
        model.add(variable)
        for index in watchers.get(variable, ()):
            pending[index] -= 1
            if pending[index] == 0:
                if heads[index] is None:
                    return None
                queue.append(heads[index])
    return frozenset(model)


def horn_satisfiable(phi: ConjunctiveFormula) -> bool:
    return horn_minimal_model(phi) is not None


def solve_existential_horn(phi, log_object: QbkLogger = None) -> bool:
    """
    A disjunction of Horn matrices in which only existential variables occur is true iff one
    disjunct has a model
    """
    phi = as_disjunct_qbf(phi)
    universal = phi.variables & phi.prefix.universal_variables
    if universal:
        raise QbkValidationError(
            "universal variables {} occur in an existential Horn formula".format(sorted(universal))
        )
    for index, disjunct in enumerate(phi.disjuncts):
        if horn_satisfiable(disjunct):
            if log_object:
                log_object.write_log("QBK0321", None, {"disjunct": index, "k": phi.k})
            return True
    return False
