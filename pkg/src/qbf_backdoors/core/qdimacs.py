"""
Readers and writers for QDIMACS and for the k-disjunct format.

The k-disjunct format extends QDIMACS:

    p dqbf <n> <k>
    a 1 2 0
    e 3 0
    d 1 0
    1 -3 0
    x 2 3 0 = 1
    d 2 0
    ...

Each `d <i> 0` line opens disjunct i; clause lines are QDIMACS clauses and `x <vars> 0 = <b>`
lines are GF(2) equations. `x 0 = 1` is the falsified equation.
"""

from typing import List, Tuple, Union

from qbf_backdoors.core.constants import (
    EXISTS,
    QUANTIFIERS,
    REGEX_DISJUNCT_OPEN,
    REGEX_EQUATION,
    REGEX_HEADER_CNF,
    REGEX_HEADER_DQBF,
    REGEX_INTEGER,
    REGEX_TOKEN,
)
from qbf_backdoors.core.formula import (
    ConjunctiveFormula,
    DisjunctQbf,
    QbfFormula,
    QuantifierPrefix,
    as_disjunct_qbf,
    var_of,
)
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.logger import QbkLogger

FORMATS = ("qdimacs", "dqbf")


def _lines(text: Union[bytes, str]):
    """
    Numbered content lines, skipping blank lines and comments
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        yield number, line


def _integers(line: str, number: int, declared: int) -> List[int]:
    """
    Parse a 0-terminated integer line, bounds-checking variables against the header
    """
    values = []
    tokens = list(REGEX_TOKEN.finditer(line))
    for token in tokens:
        column = token.start() + 1
        if not REGEX_INTEGER.match(token.group()):
            raise QbkValidationError("unexpected token '{}'".format(token.group()), number, column)
        value = int(token.group())
        if var_of(value) > declared:
            raise QbkValidationError(
                "variable {} exceeds declared count {}".format(var_of(value), declared),
                number,
                column,
            )
        values.append(value)
    if not values or values[-1] != 0:
        raise QbkValidationError("line is not terminated by 0", number, len(line.rstrip()) + 1)
    if 0 in values[:-1]:
        column = tokens[values.index(0)].start() + 1
        raise QbkValidationError("0 before the end of the line", number, column)
    return values[:-1]


class _PrefixReader:
    def __init__(self, declared: int):
        self.declared = declared
        self.blocks: List[Tuple[str, List[int]]] = []
        self.closed = False

    def accepts(self, line: str) -> bool:
        return line.split()[0] in QUANTIFIERS

    def read(self, line: str, number: int):
        if self.closed:
            raise QbkValidationError("quantifier line after the matrix started", number, 1)
        quantifier = line.split()[0]
        variables = _integers(_mask_first_token(line), number, self.declared)
        if not variables:
            raise QbkValidationError("empty prefix block", number, 1)
        if any(v < 0 for v in variables):
            raise QbkValidationError("negative variable in prefix block", number, 1)
        self.blocks.append((quantifier, variables))

    def prefix(self) -> QuantifierPrefix:
        quantified = {v for _, variables in self.blocks for v in variables}
        implicit = [v for v in range(1, self.declared + 1) if v not in quantified]
        return QuantifierPrefix.build(self.blocks + [(EXISTS, implicit)])


def _mask_first_token(line: str) -> str:
    """
    Blank out the leading keyword so that token columns stay aligned with the input
    """
    token = REGEX_TOKEN.search(line)
    return line[: token.start()] + " " * len(token.group()) + line[token.end() :]


def _header(lines, pattern, kind):
    for number, line in lines:
        match = pattern.match(line.strip())
        if not match:
            raise QbkValidationError("expected 'p {}' header".format(kind), number, 1)
        return int(match.group(1)), int(match.group(2))
    raise QbkValidationError("missing 'p {}' header".format(kind))


def parse_qdimacs(text: Union[bytes, str], log_object: QbkLogger = None) -> QbfFormula:
    lines = _lines(text)
    declared, clause_count = _header(lines, REGEX_HEADER_CNF, "cnf")
    prefix_reader = _PrefixReader(declared)
    clauses = []
    for number, line in lines:
        if prefix_reader.accepts(line):
            prefix_reader.read(line, number)
            continue
        prefix_reader.closed = True
        clauses.append(_integers(line, number, declared))
    if len(clauses) != clause_count and log_object:
        log_object.write_log("QBK0001", None, {"declared": clause_count, "found": len(clauses)})
    return QbfFormula(prefix_reader.prefix(), ConjunctiveFormula.build(clauses))


def parse_disjunct_format(
    text: Union[bytes, str], allow_mixed: bool = False, log_object: QbkLogger = None
) -> DisjunctQbf:
    lines = _lines(text)
    declared, disjunct_count = _header(lines, REGEX_HEADER_DQBF, "dqbf")
    prefix_reader = _PrefixReader(declared)
    sections = []
    for number, line in lines:
        stripped = line.strip()
        if prefix_reader.accepts(line):
            prefix_reader.read(line, number)
            continue
        prefix_reader.closed = True
        opened = REGEX_DISJUNCT_OPEN.match(stripped)
        if opened:
            if int(opened.group(1)) != len(sections) + 1:
                raise QbkValidationError(
                    "disjunct {} out of sequence".format(opened.group(1)), number, 1
                )
            sections.append(([], [], number))
            continue
        if not sections:
            raise QbkValidationError("constraint before the first 'd' line", number, 1)
        clauses, equations, _ = sections[-1]
        if stripped.startswith("x"):
            if not REGEX_EQUATION.match(stripped):
                raise QbkValidationError("malformed equation", number, 1)
            left, rhs = line.rsplit("=", 1)
            variables = _integers(_mask_first_token(left), number, declared)
            if any(v < 0 for v in variables):
                raise QbkValidationError("negative variable in equation", number, 1)
            equations.append((variables, int(rhs)))
        else:
            clauses.append(_integers(line, number, declared))

    if len(sections) != disjunct_count:
        raise QbkValidationError(
            "header declares {} disjuncts but {} found".format(disjunct_count, len(sections))
        )
    disjuncts = []
    for clauses, equations, number in sections:
        if clauses and equations and not allow_mixed:
            raise QbkValidationError("disjunct mixes clauses and equations", number, 1)
        disjuncts.append(ConjunctiveFormula.build(clauses, equations))
    if log_object:
        log_object.write_log("QBK0002", None, {"k": len(disjuncts), "n": declared})
    return DisjunctQbf(prefix_reader.prefix(), tuple(disjuncts))


def _prefix_lines(prefix: QuantifierPrefix) -> List[str]:
    return [
        " ".join([block.quantifier] + [str(v) for v in sorted(block.variables)] + ["0"])
        for block in prefix.blocks
    ]


def _clause_line(clause) -> str:
    return " ".join([str(literal) for literal in clause] + ["0"])


def _equation_line(equation) -> str:
    variables = [str(v) for v in equation.sorted_vars()]
    return " ".join(["x"] + variables + ["0", "=", str(equation.rhs)])


def write_qdimacs(phi: QbfFormula) -> str:
    if phi.matrix.equations:
        raise QbkValidationError("equations cannot be written as QDIMACS")
    lines = ["p cnf {} {}".format(phi.prefix.max_variable(), len(phi.matrix.clauses))]
    lines += _prefix_lines(phi.prefix)
    lines += [_clause_line(clause) for clause in phi.matrix.clauses]
    return "\n".join(lines) + "\n"


def write_disjunct_format(phi: DisjunctQbf) -> str:
    lines = ["p dqbf {} {}".format(phi.prefix.max_variable(), phi.k)]
    lines += _prefix_lines(phi.prefix)
    for index, disjunct in enumerate(phi.disjuncts, start=1):
        lines.append("d {} 0".format(index))
        lines += [_clause_line(clause) for clause in disjunct.clauses]
        lines += [_equation_line(equation) for equation in disjunct.equations]
    return "\n".join(lines) + "\n"


def parse_formula(text: Union[bytes, str], log_object: QbkLogger = None):
    """
    QbfFormula for a 'p cnf' header, DisjunctQbf for 'p dqbf'
    """
    for _, line in _lines(text):
        if REGEX_HEADER_DQBF.match(line.strip()):
            return parse_disjunct_format(text, log_object=log_object)
        break
    return parse_qdimacs(text, log_object)


def write_formula(phi, output_format: str = None) -> str:
    """
    Write phi in the named format; by default a QbfFormula is written as QDIMACS and a
    DisjunctQbf in the k-disjunct format. A single disjunct may be written as QDIMACS.
    """
    if output_format is None:
        output_format = "qdimacs" if isinstance(phi, QbfFormula) else "dqbf"
    if output_format not in FORMATS:
        raise QbkValidationError("unknown format {}".format(output_format))
    if output_format == "dqbf":
        return write_disjunct_format(as_disjunct_qbf(phi))
    if isinstance(phi, DisjunctQbf):
        if phi.k != 1:
            raise QbkValidationError("{} disjuncts cannot be written as QDIMACS".format(phi.k))
        phi = QbfFormula(phi.prefix, phi.disjuncts[0])
    return write_qdimacs(phi)
