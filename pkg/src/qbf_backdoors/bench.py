"""
Benchmark harness: every requested solver over every corpus file, each answer checked
against the exhaustive oracle when the instance fits its budget.
"""

import csv
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import IO, Iterable, List, Tuple

import simplejson

from qbf_backdoors.core.qdimacs import parse_formula
from qbf_backdoors.errors import (
    OracleBudgetExceeded,
    QbkBusinessError,
    QbkErrorBase,
    QbkValidationError,
)
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.oracle.game_tree import DEFAULT_BUDGET, OracleBudget, evaluate
from qbf_backdoors.solvers.affine import solve_affine
from qbf_backdoors.solvers.horn import solve_existential_horn
from qbf_backdoors.solvers.two_cnf import solve_2cnf

BENCH_SCHEMA_VERSION = 1
FIELDNAMES = ["instance", "solver", "answer", "oracle", "agrees", "stages", "seconds", "error"]

TRUE = "TRUE"
FALSE = "FALSE"
ERROR = "ERROR"


def _solve_horn(phi, trace):
    return solve_existential_horn(phi)


SOLVERS = {"2cnf": solve_2cnf, "affine": solve_affine, "horn": _solve_horn}


@dataclass(frozen=True)
class BenchConfig:
    solvers: Tuple[str, ...] = ("2cnf",)
    workers: int = 1
    oracle_budget: OracleBudget = DEFAULT_BUDGET
    check: bool = True

    def __post_init__(self):
        for tag in self.solvers:
            if tag not in SOLVERS:
                raise QbkBusinessError(QbkErrorBase.UNKNOWN_SOLVER, "unknown solver {}".format(tag))
        if self.workers < 1:
            raise QbkValidationError("workers must be positive, got {}".format(self.workers))


@dataclass
class BenchReport:
    rows: List[dict] = field(default_factory=list)

    @property
    def disagreements(self) -> List[dict]:
        return [row for row in self.rows if row["agrees"] == "false"]


def _truth(value: bool) -> str:
    return TRUE if value else FALSE


def _row(instance, solver, answer, oracle="", trace=(), seconds=0.0, error="") -> dict:
    agrees = "" if answer == ERROR or not oracle else str(answer == oracle).lower()
    return {
        "instance": instance,
        "solver": solver,
        "answer": answer,
        "oracle": oracle,
        "agrees": agrees,
        "stages": simplejson.dumps(list(trace)),
        "seconds": "{:.6f}".format(seconds),
        "error": error,
    }


def _oracle_column(phi, budget: OracleBudget) -> str:
    try:
        return _truth(evaluate(phi, budget))
    except OracleBudgetExceeded:
        return ""


def bench_instance(task: Tuple[str, BenchConfig]) -> List[dict]:
    """
    Rows for one corpus file. Runs inside a worker, so unreadable files and solver
    refusals come back as ERROR rows instead of exceptions.
    """
    path, config = task
    try:
        with open(path, encoding="utf-8") as source:
            phi = parse_formula(source.read())
    except (OSError, QbkValidationError) as error:
        return [_row(path, tag, ERROR, error=str(error)) for tag in config.solvers]

    oracle = _oracle_column(phi, config.oracle_budget) if config.check else ""
    rows = []
    for tag in config.solvers:
        trace = []
        started = time.perf_counter()
        try:
            answer, error = _truth(SOLVERS[tag](phi, trace)), ""
        except (QbkValidationError, QbkBusinessError) as failure:
            answer, error = ERROR, str(failure)
        rows.append(_row(path, tag, answer, oracle, trace, time.perf_counter() - started, error))
    return rows


def bench_run(
    corpus: Iterable[str], config: BenchConfig = BenchConfig(), log_object: QbkLogger = None
) -> BenchReport:
    """
    Rows follow the corpus order whatever order the workers finish in
    """
    tasks = [(path, config) for path in corpus]
    if config.workers > 1 and len(tasks) > 1:
        with Pool(min(config.workers, len(tasks))) as pool:
            results = pool.map(bench_instance, tasks)
    else:
        results = [bench_instance(task) for task in tasks]
    report = BenchReport([row for rows in results for row in rows])

    if log_object:
        for row in report.rows:
            log_object.write_log(
                "QBK0602",
                None,
                {key: row[key] for key in ("instance", "solver", "answer", "oracle", "seconds")},
            )
        log_object.write_log(
            "QBK0603",
            None,
            {
                "instances": len(tasks),
                "rows": len(report.rows),
                "disagreements": len(report.disagreements),
            },
        )
    return report


def check_agreement(report: BenchReport):
    disagreements = report.disagreements
    if disagreements:
        first = disagreements[0]
        raise QbkBusinessError(
            QbkErrorBase.SOLVER_DISAGREEMENT,
            "{} disagreements, first {} on {}".format(
                len(disagreements), first["solver"], first["instance"]
            ),
        )


def write_csv(report: BenchReport, stream: IO[str]):
    stream.write("# qbk-bench schema {}\n".format(BENCH_SCHEMA_VERSION))
    writer = csv.DictWriter(stream, fieldnames=FIELDNAMES, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report.rows)


def write_json(report: BenchReport, stream: IO[str]):
    document = {
        "schema": BENCH_SCHEMA_VERSION,
        "rows": report.rows,
        "disagreements": len(report.disagreements),
    }
    simplejson.dump(document, stream, indent=2)
    stream.write("\n")
