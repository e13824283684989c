import unittest

from parameterized import parameterized

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import DisjunctQbf, QbfFormula
from qbf_backdoors.core.qdimacs import (
    parse_disjunct_format,
    parse_formula,
    parse_qdimacs,
    write_disjunct_format,
    write_formula,
    write_qdimacs,
)
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.testing.mock_logger import MockLogObject


class ParseQdimacsTest(unittest.TestCase):
    def test_forall_exists_clause(self):
        phi = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0")

        self.assertEqual([b.quantifier for b in phi.prefix.blocks], [FORALL, EXISTS])
        self.assertEqual(phi.matrix.clauses, ((1, 2),))

    def test_implicit_existential_block_and_empty_clause(self):
        phi = parse_qdimacs(b"p cnf 1 1\n0")

        self.assertEqual(phi.prefix.blocks[0].quantifier, EXISTS)
        self.assertEqual(phi.prefix.blocks[0].variables, frozenset({1}))
        self.assertTrue(phi.matrix.is_bottom)

    def test_comments_and_tautologies_skipped(self):
        phi = parse_qdimacs("c hello\np cnf 2 2\ne 1 2 0\n1 -1 0\nc inner\n-2 0\n")

        self.assertEqual(phi.matrix.clauses, ((-2,),))

    @parameterized.expand(
        [
            (
                "variable_exceeds",
                "p cnf 2 1\na 1 0\n1 3 0",
                "line 3, column 3: variable 3 exceeds declared count 2",
            ),
            ("empty_block", "p cnf 2 1\ne 0\n1 2 0", "line 2, column 1: empty prefix block"),
            ("missing_header", "1 2 0", "line 1, column 1: expected 'p cnf' header"),
            ("bad_token", "p cnf 2 1\n1 y 0", "line 2, column 3: unexpected token 'y'"),
            ("unterminated", "p cnf 2 1\n1 2", "line 2, column 4: line is not terminated by 0"),
            (
                "late_prefix",
                "p cnf 2 1\n1 2 0\na 1 0",
                "line 3, column 1: quantifier line after the matrix started",
            ),
        ]
    )
    def test_errors(self, _, text, message):
        with self.assertRaises(QbkValidationError) as cm:
            parse_qdimacs(text)

        self.assertEqual(str(cm.exception), message)

    def test_clause_count_mismatch_logged(self):
        mock_log = MockLogObject()

        parse_qdimacs("p cnf 2 3\n1 2 0", log_object=QbkLogger(mock_log))

        self.assertTrue(mock_log.was_value_logged("QBK0001", "found", 1))

    def test_round_trip(self):
        text = "p cnf 4 3\na 1 3 0\ne 2 4 0\n1 2 0\n-3 4 0\n-1 -2 -4 0\n"

        self.assertEqual(write_qdimacs(parse_qdimacs(text)), text)


class ParseDisjunctFormatTest(unittest.TestCase):
    def test_single_section(self):
        phi = parse_disjunct_format("p dqbf 2 1\na 1 0\ne 2 0\nd 1 0\n1 2 0\n")

        self.assertEqual(phi.k, 1)
        self.assertEqual(phi.disjuncts[0].clauses, ((1, 2),))

    def test_equation_section(self):
        phi = parse_disjunct_format("p dqbf 2 2\ne 1 2 0\nd 1 0\n1 0\nd 2 0\nx 1 2 0 = 1\n")

        self.assertEqual(phi.disjuncts[1].equations, ((frozenset({1, 2}), 1),))

    def test_bottom_equation_and_empty_section(self):
        phi = parse_disjunct_format("p dqbf 1 2\ne 1 0\nd 1 0\nx 0 = 1\nd 2 0\n")

        self.assertTrue(phi.disjuncts[0].is_bottom)
        self.assertTrue(phi.disjuncts[1].is_empty)

    @parameterized.expand(
        [
            (
                "missing_d",
                "p dqbf 2 1\ne 1 2 0\n1 2 0\n",
                "line 3, column 1: constraint before the first 'd' line",
            ),
            (
                "count",
                "p dqbf 2 2\ne 1 2 0\nd 1 0\n1 0\n",
                "header declares 2 disjuncts but 1 found",
            ),
            ("sequence", "p dqbf 2 1\nd 2 0\n", "line 2, column 1: disjunct 2 out of sequence"),
            (
                "mixed",
                "p dqbf 2 1\nd 1 0\n1 0\nx 2 0 = 1\n",
                "line 2, column 1: disjunct mixes clauses and equations",
            ),
            (
                "equation_bound",
                "p dqbf 2 1\nd 1 0\nx 1 5 0 = 1\n",
                "line 3, column 5: variable 5 exceeds declared count 2",
            ),
        ]
    )
    def test_errors(self, _, text, message):
        with self.assertRaises(QbkValidationError) as cm:
            parse_disjunct_format(text)

        self.assertEqual(str(cm.exception), message)

    def test_mixed_allowed_with_flag(self):
        phi = parse_disjunct_format("p dqbf 2 1\nd 1 0\n1 0\nx 2 0 = 1\n", allow_mixed=True)

        self.assertEqual(phi.disjuncts[0].size, 2)

    def test_random_round_trip(self):
        for seed in range(20):
            spec = GeneratorSpec(seed=seed, n=7, k=3, q=2, constraint_class="mixed")
            phi = gen_random(spec)
            again = parse_disjunct_format(write_disjunct_format(phi), allow_mixed=True)
            self.assertEqual(again, phi)


class FormulaDispatchTest(unittest.TestCase):
    def test_header_picks_the_reader(self):
        self.assertIsInstance(parse_formula("c note\np cnf 1 1\n1 0\n"), QbfFormula)
        self.assertIsInstance(parse_formula("p dqbf 1 1\nd 1 0\n1 0\n"), DisjunctQbf)

    def test_default_format_follows_type(self):
        phi = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n")

        self.assertEqual(write_formula(phi), "p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n")
        self.assertEqual(write_formula(phi, "dqbf"), "p dqbf 2 1\na 1 0\ne 2 0\nd 1 0\n1 2 0\n")
        self.assertEqual(write_formula(phi.as_disjunct(), "qdimacs"), write_formula(phi))

    @parameterized.expand(
        [
            ("two_disjuncts", "qdimacs", "2 disjuncts cannot be written as QDIMACS"),
            ("unknown", "json", "unknown format json"),
        ]
    )
    def test_write_errors(self, _, output_format, message):
        phi = parse_disjunct_format("p dqbf 1 2\nd 1 0\n1 0\nd 2 0\n-1 0\n")

        with self.assertRaises(QbkValidationError) as cm:
            write_formula(phi, output_format)

        self.assertEqual(str(cm.exception), message)
