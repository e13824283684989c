from enum import Enum


class QbkSystemError(Exception):
    """
    Exception to be raised if an internal invariant or structural bound is violated.
    """

    BOUND_VIOLATION = "boundViolation"
    INVARIANT_VIOLATION = "invariantViolation"

    def __init__(self, error_topic, *args):  # noqa: B042
        """
        error_topic names the family of internal check that failed
        """
        super(QbkSystemError, self).__init__(*args)
        self.error_topic = error_topic


class QbkErrorBase(Enum):
    """
    To be used as error_code for QbkBusinessError.
    """

    ORACLE_BUDGET_EXCEEDED = 0
    CLASS_MEMBERSHIP_VIOLATED = 1
    UNKNOWN_CLASS = 2
    UNKNOWN_SOLVER = 3
    SEARCH_BUDGET_EXCEEDED = 4
    SOLVER_DISAGREEMENT = 5


class QbkBusinessError(Exception):
    """
    Exception to be raised when an expected but unwanted outcome is reached, e.g. a search
    running out of budget or a reduced formula leaving its target class.
    """

    def __init__(self, error_code: QbkErrorBase, supp_info=None):  # noqa: B042
        super(QbkBusinessError, self).__init__()
        self.error_code: QbkErrorBase = error_code
        self.supplementary_information = supp_info

    def __str__(self):
        if self.supplementary_information:
            return "{} {}".format(self.error_code, self.supplementary_information)
        return str(self.error_code)


class OracleBudgetExceeded(QbkBusinessError):
    """
    The exhaustive oracle refused or abandoned an evaluation. Never a truth value.
    """

    def __init__(self, supp_info=None):  # noqa: B042
        super(OracleBudgetExceeded, self).__init__(QbkErrorBase.ORACLE_BUDGET_EXCEEDED, supp_info)


class QbkValidationError(Exception):
    """
    Exception to be raised for malformed input or a violated precondition.
    Must be passed supplementary information describing the problem.
    """

    def __init__(self, supplementary_info, line=None, column=None):
        """
        Add supplementary information, prefixed by the input position when known
        """
        if line is not None:
            position = "line {}".format(line)
            if column is not None:
                position += ", column {}".format(column)
            supplementary_info = "{}: {}".format(position, supplementary_info)
        super(QbkValidationError, self).__init__(supplementary_info)
        self.supp_info = supplementary_info
        self.line = line
        self.column = column


def check_bound(condition, supp_info):
    """
    Raise a bound violation unless condition holds.
    """
    if not condition:
        raise QbkSystemError(QbkSystemError.BOUND_VIOLATION, supp_info)


def check_invariant(condition, supp_info):
    if not condition:
        raise QbkSystemError(QbkSystemError.INVARIANT_VIOLATION, supp_info)
