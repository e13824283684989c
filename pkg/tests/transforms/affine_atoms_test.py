import unittest

from parameterized import parameterized

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import ConjunctiveFormula, QbfFormula, QuantifierPrefix
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random
from qbf_backdoors.oracle.game_tree import evaluate
from qbf_backdoors.transforms.affine_atoms import (
    equalities_to_clauses,
    split_formula,
    to_gamma_aff,
)

X, Y, Z = 1, 2, 3


def _equations(*pairs):
    return ConjunctiveFormula.build(equations=pairs)


class ToGammaAffTest(unittest.TestCase):
    def test_units(self):
        result = to_gamma_aff(ConjunctiveFormula.build([[X], [-Y]]))

        self.assertEqual(result.key(), _equations(({X}, 1), ({Y}, 0)).key())

    def test_equality_clause_pair(self):
        result = to_gamma_aff(ConjunctiveFormula.build([[-X, Y], [X, -Y]]))

        self.assertEqual(result.equations, ((frozenset({X, Y}), 0),))

    def test_empty_clause_is_bottom(self):
        self.assertTrue(to_gamma_aff(ConjunctiveFormula.build([[]])).is_bottom)

    @parameterized.expand(
        [
            ([[X, Y]], [], "clause (1, 2) is not a unit or equality atom"),
            ([[-X, Y]], [], "clause (-1, 2) has no equality partner"),
            ([], [({X, Y, Z}, 0)], "equation (1, 2, 3) is not a unit or equality atom"),
            ([], [({X, Y}, 1)], "equation (1, 2) is not a unit or equality atom"),
        ]
    )
    def test_outside_fragment(self, clauses, equations, message):
        with self.assertRaises(QbkValidationError) as cm:
            to_gamma_aff(ConjunctiveFormula.build(clauses, equations))

        self.assertEqual(str(cm.exception), message)


class SplitFormulaTest(unittest.TestCase):
    def test_single_unit_two_pieces(self):
        pieces = split_formula(ConjunctiveFormula.build([[X]]), 2, FreshVarPool(above=1))

        expected = [_equations(({2}, 1)), _equations(({2, X}, 0))]
        self.assertEqual([p.key() for p in pieces], [e.key() for e in expected])

    def test_chain_of_three(self):
        pieces = split_formula(_equations(({X}, 1)), 3, FreshVarPool(above=1))

        expected = [_equations(({2}, 1)), _equations(({2, 3}, 0)), _equations(({3, X}, 0))]
        self.assertEqual([p.key() for p in pieces], [e.key() for e in expected])

    def test_equality_replaces_smallest_variable(self):
        pieces = split_formula(_equations(({X, Y}, 0)), 2, FreshVarPool(above=2))

        self.assertEqual(pieces[0].equations, ((frozenset({Y, 3}), 0),))
        self.assertEqual(pieces[1].equations, ((frozenset({3, X}), 0),))

    def test_single_piece(self):
        phi = _equations(({X}, 1), ({X, Y}, 0))

        self.assertEqual(split_formula(phi, 1, FreshVarPool(above=2)), [phi])

    def test_invalid_piece_count(self):
        with self.assertRaises(QbkValidationError) as cm:
            split_formula(_equations(({X}, 1)), 0, FreshVarPool())

        self.assertEqual(str(cm.exception), "split needs q >= 1")

    @parameterized.expand([(seed, 2 + seed % 2) for seed in range(10)])
    def test_pieces_satisfiable_and_conjunction_equivalent(self, seed, q):
        spec = GeneratorSpec(seed=seed, n=5, q=2, constraint_class="gamma-aff")
        phi = gen_random(spec)
        matrix = phi.disjuncts[0]

        pieces = split_formula(matrix, q, FreshVarPool(above=5))

        y_vars = frozenset().union(*(p.variables for p in pieces)) - phi.prefix.variables
        for piece in pieces:
            prefix = QuantifierPrefix.build([(FORALL, range(1, 6)), (EXISTS, y_vars)])
            self.assertTrue(evaluate(QbfFormula(prefix, piece)))
        joined = QbfFormula(
            phi.prefix.appended(EXISTS, y_vars), ConjunctiveFormula().conjoin(*pieces)
        )
        self.assertEqual(evaluate(joined), evaluate(phi))


class EqualitiesToClausesTest(unittest.TestCase):
    def test_clause_forms(self):
        phi = _equations(({X}, 1), ({X, Y}, 0), ({Y, Z}, 1))

        result = equalities_to_clauses(phi)

        expected = [[X], [-X, Y], [X, -Y], [Y, Z], [-Y, -Z]]
        self.assertEqual(result.key(), ConjunctiveFormula.build(expected).key())

    def test_bottom(self):
        self.assertTrue(equalities_to_clauses(_equations((set(), 1))).is_bottom)

    def test_wide_equation(self):
        with self.assertRaises(QbkValidationError) as cm:
            equalities_to_clauses(_equations(({X, Y, Z}, 0)))

        self.assertEqual(str(cm.exception), "equation [1, 2, 3] has no binary clause form")

    def test_read_back(self):
        phi = _equations(({X}, 0), ({Y, Z}, 0))

        self.assertEqual(to_gamma_aff(equalities_to_clauses(phi)).key(), phi.key())
