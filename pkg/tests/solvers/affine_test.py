import random
import unittest

from parameterized import parameterized

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import ConjunctiveFormula, DisjunctQbf, QbfFormula, QuantifierPrefix
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.oracle.game_tree import assignments, evaluate, matrix_value
from qbf_backdoors.solvers.affine import (
    AffineMatrix,
    affine_classes,
    column_order,
    covers_block,
    drop_implied_disjuncts,
    drop_innermost_existential_aff,
    eliminate_universal_block_aff,
    gaussian_reduce,
    prune_heavy_disjuncts_aff,
    solve_affine,
    triangulate,
)
from qbf_backdoors.testing.mock_logger import MockLogObject

X, Y = 1, 2


def _aff(*equations):
    return ConjunctiveFormula.build(equations=equations)


def _keys(disjuncts):
    return [d.key() for d in disjuncts]


def _xor_pair():
    # ∃x ∀z . (x ⊕ z = 0) ∨ (x ⊕ z = 1)
    prefix = QuantifierPrefix.build([(EXISTS, [X]), (FORALL, [Y])])
    return DisjunctQbf(prefix, (_aff(({X, Y}, 0)), _aff(({X, Y}, 1))))


class ColumnOrderTest(unittest.TestCase):
    def test_innermost_first(self):
        prefix = QuantifierPrefix.build([(EXISTS, [1, 2]), (FORALL, [3]), (EXISTS, [4, 5])])

        self.assertEqual(column_order(prefix), (5, 4, 3, 2, 1))


class GaussianReduceTest(unittest.TestCase):
    def setUp(self):
        self.prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])

    def test_back_substitution(self):
        result = gaussian_reduce(_aff(({X, Y}, 0), ({Y}, 1)), self.prefix)

        self.assertEqual(result.columns, (Y, X))
        self.assertEqual(result.rows, (0b101, 0b110))
        self.assertTrue(result.is_reduced_echelon)
        self.assertEqual(result.to_formula().key(), _aff(({X}, 1), ({Y}, 1)).key())

    def test_inconsistent(self):
        self.assertIsNone(gaussian_reduce(_aff(({X}, 0), ({X}, 1)), self.prefix))

    def test_clause_rejected(self):
        with self.assertRaises(QbkValidationError) as cm:
            gaussian_reduce(ConjunctiveFormula.build([[X, Y]]), self.prefix)

        self.assertEqual(str(cm.exception), "clause (1, 2) is not an equation")

    def test_unreduced_matrix_detected(self):
        self.assertFalse(AffineMatrix((Y, X), (0b011, 0b101)).is_reduced_echelon)
        self.assertFalse(AffineMatrix((Y, X), (0b111, 0b110)).is_reduced_echelon)

    @parameterized.expand([(seed,) for seed in range(10)])
    def test_random_same_solutions_any_row_order(self, seed):
        spec = GeneratorSpec(seed=seed, n=6, density=1.0, constraint_class="aff")
        phi = gen_random(spec)
        matrix = phi.disjuncts[0]
        shuffled = list(matrix.equations)
        random.Random(seed).shuffle(shuffled)

        result = gaussian_reduce(matrix, phi.prefix)
        again = gaussian_reduce(ConjunctiveFormula(equations=tuple(shuffled)), phi.prefix)

        if result is None:
            self.assertIsNone(again)
            self.assertFalse(any(matrix_value([matrix], a) for a in assignments(range(1, 7))))
            return
        self.assertEqual(again, result)
        self.assertTrue(result.is_reduced_echelon)
        reduced = result.to_formula()
        for assignment in assignments(range(1, 7)):
            expected = matrix_value([matrix], assignment)
            self.assertEqual(matrix_value([reduced], assignment), expected)


class TriangulateTest(unittest.TestCase):
    def test_inconsistent_disjunct_dropped(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])
        phi = DisjunctQbf(prefix, (_aff(({X}, 0), ({X}, 1)), _aff(({X, Y}, 0), ({Y}, 1))))

        result = triangulate(phi)

        self.assertEqual(result.k, 1)
        self.assertEqual(_keys(result.disjuncts), [_aff(({X}, 1), ({Y}, 1)).key()])

    def test_reduced_input_kept(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])
        phi = DisjunctQbf(prefix, (_aff(({X}, 1), ({Y}, 1)),))

        self.assertEqual(_keys(triangulate(phi).disjuncts), _keys(phi.disjuncts))

    def test_clausal_rejected(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X])])

        with self.assertRaises(QbkValidationError) as cm:
            triangulate(DisjunctQbf(prefix, (ConjunctiveFormula.build([[X]]),)))

        self.assertEqual(str(cm.exception), "triangulate needs affine disjuncts")

    @parameterized.expand([(seed,) for seed in range(8)])
    def test_random_equivalent(self, seed):
        spec = GeneratorSpec(seed=seed, n=6, k=3, q=2, density=0.8, constraint_class="aff")
        phi = gen_random(spec)

        self.assertEqual(evaluate(triangulate(phi)), evaluate(phi))
        self.assertEqual(evaluate(drop_implied_disjuncts(triangulate(phi))), evaluate(phi))

    def test_implied_disjunct_dropped(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])
        phi = DisjunctQbf(prefix, (_aff(({X}, 1), ({Y}, 1)), _aff(({X}, 1)), _aff(({Y}, 0))))

        result = drop_implied_disjuncts(phi)

        self.assertEqual(_keys(result.disjuncts), [_aff(({X}, 1)).key(), _aff(({Y}, 0)).key()])


class DropInnermostExistentialAffTest(unittest.TestCase):
    def setUp(self):
        # y is universal and outermost, x existential and innermost
        self.prefix = QuantifierPrefix.build([(FORALL, [Y]), (EXISTS, [X])])

    def test_choice_always_possible(self):
        phi = triangulate(DisjunctQbf(self.prefix, (_aff(({X, Y}, 1)),)))

        result = drop_innermost_existential_aff(phi)

        self.assertEqual(result.prefix, QuantifierPrefix.build([(FORALL, [Y])]))
        self.assertTrue(result.disjuncts[0].is_empty)
        self.assertTrue(evaluate(phi))

    def test_outer_equation_kept(self):
        phi = triangulate(DisjunctQbf(self.prefix, (_aff(({Y}, 1), ({X, Y}, 0)),)))

        result = drop_innermost_existential_aff(phi)

        self.assertEqual(_keys(result.disjuncts), [_aff(({Y}, 1)).key()])
        self.assertFalse(evaluate(result))
        self.assertFalse(evaluate(phi))

    def test_unreduced_rejected(self):
        phi = DisjunctQbf(self.prefix, (_aff(({Y}, 1), ({X, Y}, 0)),))

        with self.assertRaises(QbkValidationError) as cm:
            drop_innermost_existential_aff(phi)

        self.assertEqual(str(cm.exception), "disjunct 1 is not in reduced echelon form")

    def test_universal_innermost_rejected(self):
        phi = DisjunctQbf(QuantifierPrefix.build([(FORALL, [X])]), (_aff(({X}, 1)),))

        with self.assertRaises(QbkValidationError) as cm:
            drop_innermost_existential_aff(phi)

        self.assertEqual(
            str(cm.exception), "drop_innermost_existential_aff needs an innermost existential block"
        )


class PruneHeavyDisjunctsAffTest(unittest.TestCase):
    def test_single_disjunct_with_block_equation(self):
        result = prune_heavy_disjuncts_aff(_xor_pair().with_disjuncts([_aff(({X, Y}, 0))]))

        self.assertEqual(result.k, 0)

    def test_light_disjuncts_kept(self):
        phi = _xor_pair()

        self.assertEqual(prune_heavy_disjuncts_aff(phi), phi)

    def test_repeated_until_stable(self):
        prefix = QuantifierPrefix.build([(FORALL, [X, Y])])
        phi = DisjunctQbf(prefix, (_aff(({X}, 0), ({Y}, 0)), _aff(({X}, 1))))

        self.assertEqual(prune_heavy_disjuncts_aff(phi).k, 0)
        self.assertFalse(evaluate(phi))


class CoversBlockTest(unittest.TestCase):
    @parameterized.expand(
        [
            ("both_signs", [[({1}, 0)], [({1}, 1)]], True),
            ("one_sign", [[({1}, 0)]], False),
            ("empty_system", [[], [({1}, 0)]], True),
            ("pair_and_complements", [[({1}, 0), ({2}, 0)], [({1}, 1)], [({2}, 1)]], True),
            ("parity_and_unit", [[({1, 2}, 0)], [({1}, 1)]], False),
        ]
    )
    def test_cover(self, _, systems, expected):
        self.assertEqual(covers_block(systems, frozenset({1, 2})), expected)


class EliminateUniversalBlockAffTest(unittest.TestCase):
    def test_class_count(self):
        classes = affine_classes(_aff(({1, 3}, 0), ({2}, 1), ({3}, 1)), frozenset({1, 2}))

        self.assertEqual(len(classes), 4)
        for cls in classes:
            self.assertEqual(len(cls.defining), 2)

    def test_xor_pair(self):
        mock_log = MockLogObject()

        result = eliminate_universal_block_aff(_xor_pair(), QbkLogger(mock_log))

        self.assertEqual(result.prefix, QuantifierPrefix.build([(EXISTS, [X])]))
        self.assertEqual(_keys(result.disjuncts), [_aff(({X}, 0)).key(), _aff(({X}, 1)).key()])
        self.assertTrue(mock_log.was_value_logged("QBK0312", "candidates", 8))
        self.assertTrue(evaluate(result))

    def test_heavy_disjunct_rejected(self):
        phi = DisjunctQbf(QuantifierPrefix.build([(FORALL, [X])]), (_aff(({X}, 0)),))

        with self.assertRaises(QbkValidationError) as cm:
            eliminate_universal_block_aff(phi)

        self.assertEqual(str(cm.exception), "disjunct 1 has 1 equations over the universal block")

    @parameterized.expand([(seed,) for seed in range(8)])
    def test_random_equivalent(self, seed):
        spec = GeneratorSpec(seed=seed, n=5, k=3, q=1, density=0.6, constraint_class="aff")
        phi = prune_heavy_disjuncts_aff(triangulate(gen_random(spec)))
        if not phi.disjuncts or phi.prefix.innermost.quantifier != FORALL:
            self.assertEqual(solve_affine(phi), evaluate(phi))
            return

        self.assertEqual(evaluate(eliminate_universal_block_aff(phi)), evaluate(phi))


class SolveAffineTest(unittest.TestCase):
    def test_xor_pair_true(self):
        self.assertTrue(solve_affine(_xor_pair()))

    def test_universal_unit_false(self):
        prefix = QuantifierPrefix.build([(FORALL, [X])])

        self.assertFalse(solve_affine(QbfFormula(prefix, _aff(({X}, 0)))))

    def test_trace(self):
        mock_log = MockLogObject()
        trace = []

        solve_affine(_xor_pair(), trace, QbkLogger(mock_log))

        stages = [stage for stage, _ in trace]
        self.assertEqual(stages[:3], ["triangulate", "prune", "eliminate-universal"])
        self.assertEqual(trace[-1], ("triangulate", 1))
        self.assertEqual(mock_log.log_occurrence_count("QBK0311"), len(trace))

    def test_clausal_rejected(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X])])

        with self.assertRaises(QbkValidationError) as cm:
            solve_affine(QbfFormula(prefix, ConjunctiveFormula.build([[X]])))

        self.assertEqual(str(cm.exception), "solve_affine needs affine disjuncts")

    @parameterized.expand(
        [
            (seed, k, q, first)
            for seed in range(3)
            for k, q in ((2, 1), (3, 2), (1, 4))
            for first in (EXISTS, FORALL)
        ]
    )
    def test_random_match_oracle(self, seed, k, q, first):
        spec = GeneratorSpec(
            seed=seed,
            n=6,
            k=k,
            q=q,
            density=0.6,
            constraint_class="aff",
            first_quantifier=first,
        )
        phi = gen_random(spec)

        self.assertEqual(solve_affine(phi), evaluate(phi))
