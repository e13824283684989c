import unittest

from parameterized import parameterized

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import (
    BOTTOM,
    ConjunctiveFormula,
    DisjunctQbf,
    QbfFormula,
    QuantifierPrefix,
)
from qbf_backdoors.core.measures import is_affine
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random
from qbf_backdoors.oracle.game_tree import equisatisfiable, evaluate
from qbf_backdoors.transforms.backdoor import (
    backdoor_to_disjunct,
    disjunct_to_backdoor,
    selector_bits,
)

X, V, W, Y, Z, U = 1, 2, 3, 4, 5, 6


def _related_instance():
    # ∃x ∀v,w ∃y,z,u . (x) ∧ (x ⊕ y ⊕ z ⊕ u = 0) ∧ (x ∨ v ∨ w) ∧ (x ∨ v)
    prefix = QuantifierPrefix.build([(EXISTS, [X]), (FORALL, [V, W]), (EXISTS, [Y, Z, U])])
    matrix = ConjunctiveFormula.build([[X], [X, V, W], [X, V]], [({X, Y, Z, U}, 0)])
    return QbfFormula(prefix, matrix)


class BackdoorToDisjunctTest(unittest.TestCase):
    def test_single_variable_adds_units(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])
        phi = QbfFormula(prefix, ConjunctiveFormula.build([[X, Y], [-X, -Y]]))

        result = backdoor_to_disjunct(phi, {X})

        self.assertEqual(result.k, 2)
        self.assertEqual(result.prefix, prefix)
        self.assertIn((-X,), result.disjuncts[0].clauses)
        self.assertIn((X,), result.disjuncts[1].clauses)

    def test_backdoor_to_affine(self):
        phi = _related_instance()

        result = backdoor_to_disjunct(phi, {X, V}, units_as_equations=True)

        self.assertEqual(result.k, 4)
        for disjunct in result.disjuncts:
            self.assertTrue(disjunct.is_bottom or is_affine(disjunct))
        self.assertEqual(sum(not d.is_bottom for d in result.disjuncts), 2)
        self.assertTrue(evaluate(result))
        self.assertTrue(evaluate(phi))

    @parameterized.expand([(seed,) for seed in range(8)])
    def test_random_equisatisfiable(self, seed):
        phi = gen_random(GeneratorSpec(seed=seed, n=8, q=2, density=1.4))
        qbf = QbfFormula(phi.prefix, phi.disjuncts[0])

        result = backdoor_to_disjunct(qbf, {1 + seed % 8, 1 + (seed + 5) % 8})

        self.assertTrue(equisatisfiable(qbf, result))


class SelectorBitsTest(unittest.TestCase):
    @parameterized.expand([(0, 2, (0, 0)), (1, 2, (0, 1)), (2, 2, (1, 0)), (5, 3, (1, 0, 1))])
    def test_most_significant_first(self, index, width, expected):
        self.assertEqual(selector_bits(index, width), expected)


class DisjunctToBackdoorTest(unittest.TestCase):
    def test_single_disjunct_unchanged(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X, Y])])
        matrix = ConjunctiveFormula.build([[X, Y]])

        result, z_set = disjunct_to_backdoor(DisjunctQbf(prefix, (matrix,)))

        self.assertEqual(result, QbfFormula(prefix, matrix))
        self.assertEqual(z_set, frozenset())

    def test_no_disjuncts_is_false(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X])])

        result, _ = disjunct_to_backdoor(DisjunctQbf(prefix, ()))

        self.assertEqual(result.matrix, BOTTOM)
        self.assertFalse(evaluate(result))

    def test_two_opposite_units(self):
        prefix = QuantifierPrefix.build([(FORALL, [X])])
        phi = DisjunctQbf(
            prefix, (ConjunctiveFormula.build([[X]]), ConjunctiveFormula.build([[-X]]))
        )

        result, z_set = disjunct_to_backdoor(phi)

        self.assertEqual(z_set, frozenset({2}))
        self.assertEqual(set(result.matrix.clauses), {(X, 2), (-X, -2)})
        self.assertEqual(result.prefix.innermost.quantifier, EXISTS)
        self.assertTrue(evaluate(result))
        self.assertTrue(evaluate(phi))

    def test_three_disjuncts_padded(self):
        phi = gen_random(GeneratorSpec(seed=2, n=5, k=3))

        result, z_set = disjunct_to_backdoor(phi, FreshVarPool.for_formula(phi))

        self.assertEqual(len(z_set), 2)
        self.assertEqual(z_set, frozenset({6, 7}))

    def test_equations_rejected(self):
        prefix = QuantifierPrefix.build([(EXISTS, [X])])
        phi = DisjunctQbf(prefix, (ConjunctiveFormula.build(equations=[({X}, 1)]),) * 2)

        with self.assertRaises(QbkValidationError) as cm:
            disjunct_to_backdoor(phi)

        self.assertEqual(str(cm.exception), "disjunct_to_backdoor needs clausal disjuncts")

    @parameterized.expand([(seed,) for seed in range(10)])
    def test_random_equivalent(self, seed):
        phi = gen_random(GeneratorSpec(seed=seed, n=7, k=2 + seed % 4, q=2, density=1.2))

        result, _ = disjunct_to_backdoor(phi)

        self.assertEqual(evaluate(result), evaluate(phi))
