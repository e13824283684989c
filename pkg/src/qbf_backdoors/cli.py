"""
The qbk command line. Commands that decide a formula exit 10 for TRUE and 20 for FALSE,
the other commands exit 0, and rejected input exits 1 with the reason on stderr.
"""

import argparse
import io
import sys
from typing import List, Optional

import simplejson

from qbf_backdoors.bench import (
    SOLVERS,
    BenchConfig,
    bench_run,
    check_agreement,
    write_csv,
    write_json,
)
from qbf_backdoors.core.assignment import assign_qbf
from qbf_backdoors.core.constants import (
    DEFAULT_ORACLE_MAX_NODES,
    DEFAULT_ORACLE_MAX_VARS,
    EXISTS,
    FORALL,
    QUANTIFIERS,
)
from qbf_backdoors.core.formula import DisjunctQbf, QbfFormula, as_disjunct_qbf
from qbf_backdoors.core.graph import universal_components
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.core.qdimacs import FORMATS, parse_formula, write_formula
from qbf_backdoors.detect.enhanced import enhanced_backdoor, enhanced_backdoor_qalt
from qbf_backdoors.detect.strong import strong_backdoor_2cnf, strong_backdoor_horn
from qbf_backdoors.detect.validation import BaseClass
from qbf_backdoors.errors import QbkBusinessError, QbkValidationError
from qbf_backdoors.generators.families import gen_enhanced_instance, generate
from qbf_backdoors.generators.random_instances import CONSTRAINT_CLASSES, FAMILIES, GeneratorSpec
from qbf_backdoors.guarded.elimination import evaluate_with_enhanced_backdoor, guarded_beta
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.oracle.game_tree import OracleBudget, evaluate, winning_counterexample
from qbf_backdoors.solvers.affine import solve_affine
from qbf_backdoors.solvers.horn import solve_existential_horn
from qbf_backdoors.solvers.two_cnf import solve_2cnf
from qbf_backdoors.transforms.backdoor import backdoor_to_disjunct, disjunct_to_backdoor
from qbf_backdoors.transforms.elimination import backdoor_to_disjunct_qe
from qbf_backdoors.transforms.expansion import part_expand
from qbf_backdoors.transforms.squish import squish, squish_to_four

EXIT_SUCCESS = 0
EXIT_ERROR = 1
EXIT_TRUE = 10
EXIT_FALSE = 20

BASE_CLASSES = [base.value for base in BaseClass]
TRANSFORMS = ("disj", "part", "squish", "to-backdoor", "to-disjunct")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise QbkValidationError(message)


def variable_list(text: str) -> List[int]:
    """
    Variables written as 1,2,3 or "1 2 3"
    """
    try:
        values = [int(token) for token in text.replace(",", " ").split()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(
            "expected variables like 1,2,3, got {}".format(text)
        ) from error
    if any(value < 1 for value in values):
        raise argparse.ArgumentTypeError("variables must be positive, got {}".format(text))
    return values


def _read(path: str, log_object: QbkLogger):
    with open(path, encoding="utf-8") as source:
        return parse_formula(source.read(), log_object)


def _conjunctive(phi, command: str) -> QbfFormula:
    if isinstance(phi, DisjunctQbf):
        if phi.k != 1:
            raise QbkValidationError(
                "{} needs a conjunctive QBF, got {} disjuncts".format(command, phi.k)
            )
        return QbfFormula(phi.prefix, phi.disjuncts[0])
    return phi


def _required(value, flag: str, command: str):
    if value is None:
        raise QbkValidationError("{} needs {}".format(command, flag))
    return value


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as target:
            target.write(text)
    else:
        sys.stdout.write(text)


def _comment(label: str, variables) -> str:
    return "c {}\n".format(" ".join([label] + [str(v) for v in sorted(variables)]))


def _decide(value: bool) -> int:
    print("TRUE" if value else "FALSE")
    return EXIT_TRUE if value else EXIT_FALSE


def run_oracle(args, log_object: QbkLogger) -> int:
    phi = _read(args.file, log_object)
    budget = OracleBudget(args.max_vars, args.max_nodes)
    value = evaluate(phi, budget, args.memoize, log_object)
    code = _decide(value)
    if not value and args.counterexample:
        line = winning_counterexample(phi, budget)
        print(" ".join(["v"] + [str(v if line[v] else -v) for v in sorted(line)] + ["0"]))
    return code


def run_solve(args, log_object: QbkLogger) -> int:
    phi = _read(args.file, log_object)
    trace = []
    if args.solver == "2cnf":
        value = solve_2cnf(phi, trace, log_object)
    elif args.solver == "affine":
        value = solve_affine(phi, trace, log_object)
    else:
        value = solve_existential_horn(phi, log_object)
    if args.stages:
        print(simplejson.dumps(trace), file=sys.stderr)
    return _decide(value)


def run_transform(args, log_object: QbkLogger) -> int:
    args.output = args.output or args.out
    phi = _read(args.file, log_object)
    pool = FreshVarPool.for_formula(phi)
    command = "transform {}".format(args.transform)
    header = ""
    if args.transform == "disj":
        variables = _required(args.vars, "--vars", command)
        result = backdoor_to_disjunct(_conjunctive(phi, command), variables)
    elif args.transform == "part":
        variables = _required(args.vars, "--vars", command)
        phi = _conjunctive(phi, command)
        parts, selectors = part_expand(phi.matrix, variables, pool)
        result = DisjunctQbf(phi.prefix.appended(FORALL, selectors), tuple(parts))
        header = _comment("selectors", selectors)
    elif args.transform == "squish" and (args.k is not None or args.p is not None):
        k = _required(args.k, "--k", command)
        p = _required(args.p, "--p", command)
        result = squish(as_disjunct_qbf(phi), k, p, pool, log_object)
    elif args.transform == "squish":
        result = squish_to_four(as_disjunct_qbf(phi), pool, log_object)
    elif args.transform == "to-backdoor":
        result, selectors = disjunct_to_backdoor(as_disjunct_qbf(phi), pool)
        header = _comment("backdoor", selectors)
    else:
        variables = _required(args.vars, "--vars", command)
        result = backdoor_to_disjunct_qe(_conjunctive(phi, command), variables, pool, log_object)
    _emit(args, header + write_formula(result, args.format))
    return EXIT_SUCCESS


def run_detect(args, log_object: QbkLogger) -> int:
    phi = _read(args.file, log_object)
    if args.detector == "2cnf":
        found = strong_backdoor_2cnf(phi, args.k, log_object)
    elif args.detector == "horn":
        found = strong_backdoor_horn(phi, args.k, log_object)
    elif args.detector == "qalt":
        q = _required(args.q, "-q", "detect qalt")
        found = enhanced_backdoor_qalt(phi, args.k, q, args.max_nodes, log_object)
    else:
        found = enhanced_backdoor(
            phi, args.k, args.base_class, args.q, args.d, args.max_nodes, log_object
        )
    if found is None:
        print("NONE")
    else:
        print(" ".join(["BACKDOOR"] + [str(v) for v in sorted(found)]))
    return EXIT_SUCCESS


def run_guarded(args, log_object: QbkLogger) -> int:
    command = "guarded {}".format(args.action)
    phi = _conjunctive(_read(args.file, log_object), command)
    if args.action == "solve":
        backdoor = _required(args.backdoor, "--backdoor", command)
        value = evaluate_with_enhanced_backdoor(
            phi, backdoor, args.base_class, args.q, args.d, log_object=log_object
        )
        return _decide(value)
    if args.y is not None:
        y_set = frozenset(args.y)
    elif args.backdoor is not None:
        y_set = universal_components(phi, args.backdoor)
    else:
        raise QbkValidationError("{} needs --y or --backdoor".format(command))
    beta = guarded_beta(phi, y_set, log_object=log_object)
    reduced = assign_qbf(phi, beta)
    print(" ".join(["v"] + [str(literal) for literal in beta.as_literals()] + ["0"]))
    _emit(args, _comment("guarded", y_set) + write_formula(reduced, args.format))
    return EXIT_SUCCESS


def run_generate(args, log_object: QbkLogger) -> int:
    spec = GeneratorSpec(
        family=args.family,
        seed=args.seed,
        n=args.n,
        k=args.k,
        q=args.q,
        d=args.d,
        density=args.density,
        constraint_class=args.constraint_class,
        first_quantifier=args.first,
        cliqueify=args.cliqueify,
    )
    result = generate(spec, log_object)
    header = ""
    if spec.family == "enhanced":
        header = _comment("backdoor", gen_enhanced_instance(spec)[1])
    _emit(args, header + write_formula(result, args.format))
    return EXIT_SUCCESS


def run_bench(args, log_object: QbkLogger) -> int:
    config = BenchConfig(
        solvers=tuple(args.solvers.split(",")),
        workers=args.workers,
        oracle_budget=OracleBudget(args.max_vars),
        check=not args.no_oracle,
    )
    report = bench_run(args.files, config, log_object)
    stream = io.StringIO()
    if args.json:
        write_json(report, stream)
    else:
        write_csv(report, stream)
    _emit(args, stream.getvalue())
    check_agreement(report)
    return EXIT_SUCCESS


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qbk", description="Backdoor-based solving of quantified formulas.")
    parser.add_argument("--trace", action="store_true", help="echo structured logs to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=FORMATS, help="output format")
    output.add_argument("-o", "--output", help="write to this file instead of stdout")

    classes = argparse.ArgumentParser(add_help=False)
    classes.add_argument("--class", dest="base_class", choices=BASE_CLASSES, default="2cnf")
    classes.add_argument("-q", "--q", dest="q", type=int, help="bound on quantifier alternations")
    classes.add_argument("-d", "--d", dest="d", type=int, help="bound on equation arity")

    oracle = commands.add_parser("oracle", help="exhaustive evaluation")
    oracle_actions = oracle.add_subparsers(dest="action", required=True)
    oracle_eval = oracle_actions.add_parser("eval")
    oracle_eval.add_argument("file")
    oracle_eval.add_argument("--max-vars", type=int, default=DEFAULT_ORACLE_MAX_VARS)
    oracle_eval.add_argument("--max-nodes", type=int, default=DEFAULT_ORACLE_MAX_NODES)
    oracle_eval.add_argument("--memoize", action="store_true")
    oracle_eval.add_argument(
        "--counterexample", action="store_true", help="print a losing line for FALSE"
    )
    oracle_eval.set_defaults(handler=run_oracle)

    solve = commands.add_parser("solve", help="decide a formula with a class solver")
    solve.add_argument("solver", choices=sorted(SOLVERS))
    solve.add_argument("file")
    solve.add_argument(
        "--stages",
        "--trace",
        dest="stages",
        action="store_true",
        help="print stage counts to stderr",
    )
    solve.set_defaults(handler=run_solve)

    transform = commands.add_parser("transform", parents=[output], help="rewrite a formula")
    transform.add_argument("transform", choices=TRANSFORMS)
    transform.add_argument("file")
    transform.add_argument("out", nargs="?", help="write to this file instead of stdout")
    transform.add_argument("--vars", type=variable_list)
    transform.add_argument("--k", type=int, help="squish to this many disjuncts")
    transform.add_argument("--p", type=int, help="squish into 2^p pieces per disjunct")
    transform.set_defaults(handler=run_transform)

    detect = commands.add_parser("detect", parents=[classes], help="search for a backdoor")
    detect.add_argument("detector", choices=("2cnf", "horn", "enhanced", "qalt"))
    detect.add_argument("file")
    detect.add_argument("-k", type=int, required=True, help="backdoor size bound")
    detect.add_argument("--max-nodes", type=int)
    detect.set_defaults(handler=run_detect)

    guarded = commands.add_parser(
        "guarded", parents=[classes, output], help="guarded elimination of universal components"
    )
    guarded.add_argument("action", choices=("eliminate", "solve"))
    guarded.add_argument("file")
    guarded.add_argument("--backdoor", type=variable_list)
    guarded.add_argument("--y", type=variable_list, help="closed universal set to eliminate")
    guarded.set_defaults(handler=run_guarded)

    generator = commands.add_parser("generate", parents=[output], help="generate an instance")
    generator.add_argument("family", choices=FAMILIES)
    generator.add_argument("--seed", type=int, default=0)
    generator.add_argument("-n", type=int, default=8)
    generator.add_argument("-k", type=int, default=1)
    generator.add_argument("-q", "--q", dest="q", type=int, default=1)
    generator.add_argument("-d", "--d", dest="d", type=int, default=3)
    generator.add_argument("--density", type=float, default=1.0)
    generator.add_argument(
        "--class", dest="constraint_class", choices=CONSTRAINT_CLASSES, default="cnf"
    )
    generator.add_argument("--first", choices=QUANTIFIERS, default=EXISTS)
    generator.add_argument("--cliqueify", action="store_true")
    generator.set_defaults(handler=run_generate)

    bench = commands.add_parser("bench", help="run solvers over a corpus")
    bench.add_argument("files", nargs="*")
    bench.add_argument("--solvers", default="2cnf")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--max-vars", type=int, default=DEFAULT_ORACLE_MAX_VARS)
    bench.add_argument("--no-oracle", action="store_true")
    bench.add_argument("--json", action="store_true")
    bench.add_argument("-o", "--output")
    bench.set_defaults(handler=run_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args, QbkLogger(echo=args.trace))
    except (QbkValidationError, QbkBusinessError, OSError) as error:
        print("qbk: error: {}".format(error), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
