import unittest
from itertools import combinations, product

from parameterized import parameterized

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import DisjunctQbf, QbfFormula
from qbf_backdoors.core.graph import universal_components
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.families import (
    gen_enhanced_instance,
    gen_mcis,
    gen_negated_3cnf,
    gen_phi_n,
    gen_squished,
    gen_unmixed,
    generate,
    negate,
    random_3cnf,
    random_coloured_graph,
)
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random, layered_prefix
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.oracle.game_tree import evaluate
from qbf_backdoors.testing.mock_logger import MockLogObject


def _has_multicoloured_independent_set(adjacency, classes):
    edges = {frozenset((v, u)) for v, adjacent in adjacency.items() for u in adjacent}
    for chosen in product(*classes):
        if not any(frozenset(pair) in edges for pair in combinations(chosen, 2)):
            return True
    return False


class RandomInstancesTest(unittest.TestCase):
    def test_layered_prefix(self):
        prefix = layered_prefix(6, 2)

        self.assertEqual(
            [(b.quantifier, sorted(b.variables)) for b in prefix.blocks],
            [(EXISTS, [1, 2]), (FORALL, [3, 4]), (EXISTS, [5, 6])],
        )
        self.assertEqual(layered_prefix(3, 1, FORALL).blocks[0].quantifier, FORALL)

    def test_seed_determines_output(self):
        spec = GeneratorSpec(seed=11, n=7, k=3, q=2, constraint_class="mixed")

        self.assertEqual(gen_random(spec), gen_random(spec))
        self.assertEqual(gen_random(spec).k, 3)

    @parameterized.expand(
        [
            ("family", {"family": "tree"}, "unknown generator family tree"),
            ("class", {"constraint_class": "dnf"}, "unknown constraint class dnf"),
            ("size", {"n": 0}, "generator sizes out of range"),
        ]
    )
    def test_spec_rejected(self, _, kwargs, message):
        with self.assertRaises(QbkValidationError) as cm:
            GeneratorSpec(**kwargs)

        self.assertEqual(str(cm.exception), message)


class NegatedTest(unittest.TestCase):
    @parameterized.expand([(seed,) for seed in range(15)])
    def test_negation_flips_truth(self, seed):
        spec = GeneratorSpec(seed=seed, n=6, q=2, density=1.5)
        phi = random_3cnf(spec)

        negated = gen_negated_3cnf(spec, phi)

        self.assertEqual(negated.k, phi.matrix.size)
        self.assertEqual(evaluate(negated), not evaluate(phi))

    def test_flipped_prefix_and_units(self):
        phi = random_3cnf(GeneratorSpec(seed=2, n=4, q=1))

        negated = negate(phi)

        for original, flipped in zip(phi.prefix.blocks, negated.prefix.blocks):
            self.assertNotEqual(original.quantifier, flipped.quantifier)
            self.assertEqual(original.variables, flipped.variables)
        for disjunct in negated.disjuncts:
            self.assertTrue(disjunct.is_affine)
            self.assertTrue(all(len(equation.vars) == 1 for equation in disjunct.equations))

    def test_equations_rejected(self):
        phi = gen_random(GeneratorSpec(n=3, constraint_class="aff"))

        with self.assertRaises(QbkValidationError) as cm:
            negate(QbfFormula(phi.prefix, phi.disjuncts[0]))

        self.assertEqual(str(cm.exception), "negate needs a clausal matrix")

    @parameterized.expand([(seed,) for seed in range(6)])
    def test_squished_keeps_truth(self, seed):
        spec = GeneratorSpec(seed=seed, n=4, q=1, density=1.5)

        squished = gen_squished(spec)

        self.assertLessEqual(squished.k, 4)
        self.assertEqual(evaluate(squished, memoize=True), evaluate(gen_negated_3cnf(spec)))


class MulticolouredIndependentSetTest(unittest.TestCase):
    def test_edge_blocks_independent_set(self):
        phi = gen_mcis({1: [2]}, [[1], [2]])

        self.assertTrue(evaluate(phi))
        self.assertEqual(phi.matrix.size, 3)

    def test_isolated_vertices(self):
        phi = gen_mcis({1: [], 2: []}, [[1], [2]])

        self.assertFalse(evaluate(phi))

    def test_layout(self):
        phi = gen_mcis({10: [20]}, [[10], [20, 30]])

        self.assertEqual(phi.matrix.size, 4)
        self.assertEqual(phi.prefix.universal_variables, frozenset({1, 2, 3}))
        self.assertEqual(phi.prefix.existential_variables, frozenset({4, 5}))
        self.assertIn((4, 5), phi.matrix.clauses)

    @parameterized.expand(
        [
            ("empty_class", {1: []}, [[1], []], "class 1 is empty"),
            ("two_classes", {1: []}, [[1], [1]], "vertex 1 is in two classes"),
            ("no_class", {1: [2]}, [[1]], "vertices [2] have no class"),
        ]
    )
    def test_rejected(self, _, adjacency, classes, message):
        with self.assertRaises(QbkValidationError) as cm:
            gen_mcis(adjacency, classes)

        self.assertEqual(str(cm.exception), message)

    @parameterized.expand([(seed, k) for seed in range(10) for k in (2, 3)])
    def test_random_graphs(self, seed, k):
        adjacency, classes = random_coloured_graph(GeneratorSpec(seed=seed, n=6, k=k, density=2.5))
        expected = not _has_multicoloured_independent_set(adjacency, classes)

        self.assertEqual(evaluate(gen_mcis(adjacency, classes)), expected)
        self.assertEqual(evaluate(gen_mcis(adjacency, classes, cliqueify=True)), expected)


class PhiNTest(unittest.TestCase):
    def test_smallest_member(self):
        phi = gen_phi_n(1)

        self.assertEqual(phi.matrix.size, 18)
        self.assertEqual(phi.prefix.universal_variables, frozenset({1, 2, 3}))
        self.assertEqual(phi.prefix.existential_variables, frozenset({4}))
        self.assertFalse(evaluate(phi))

    @parameterized.expand([(n,) for n in (1, 2, 4)])
    def test_clause_shapes(self, n):
        phi = gen_phi_n(n)

        self.assertEqual(phi.matrix.size, 3 * (n + 2) * (n + 1))
        for clause in phi.matrix.clauses:
            self.assertEqual(len(clause), 3)
            self.assertLessEqual(sum(1 for lit in clause if 0 < lit < n + 3), 1)

    def test_rejected(self):
        with self.assertRaises(QbkValidationError) as cm:
            gen_phi_n(0)

        self.assertEqual(str(cm.exception), "phi-n needs n >= 1")


class PlantedInstancesTest(unittest.TestCase):
    @parameterized.expand([(seed, tag) for seed in range(6) for tag in ("2cnf", "horn", "aff")])
    def test_planted_layout(self, seed, tag):
        spec = GeneratorSpec(seed=seed, n=9, k=2, d=2, density=1.0, constraint_class=tag)

        phi, planted = gen_enhanced_instance(spec)

        self.assertEqual(planted, frozenset({1, 2}))
        self.assertTrue(frozenset({3, 4, 5}) <= phi.prefix.universal_variables)
        self.assertTrue(universal_components(phi, planted) >= frozenset({3, 4, 5}))
        self.assertEqual(gen_enhanced_instance(spec), (phi, planted))

    @parameterized.expand(
        [
            (
                "class",
                {"constraint_class": "cnf"},
                "enhanced instances need class 2cnf, horn or aff, not cnf",
            ),
            (
                "size",
                {"n": 3, "k": 2, "constraint_class": "horn"},
                "enhanced instances need n above k + |Y|",
            ),
        ]
    )
    def test_rejected(self, _, kwargs, message):
        with self.assertRaises(QbkValidationError) as cm:
            gen_enhanced_instance(GeneratorSpec(**kwargs))

        self.assertEqual(str(cm.exception), message)

    @parameterized.expand([(seed, tag) for seed in range(6) for tag in ("2cnf", "horn", "aff")])
    def test_unmixed(self, seed, tag):
        phi = gen_unmixed(GeneratorSpec(seed=seed, n=8, q=2, constraint_class=tag))
        universal = phi.prefix.universal_variables

        for variables in phi.matrix.constraint_variable_sets():
            self.assertTrue(variables <= universal or not variables & universal)


class GenerateTest(unittest.TestCase):
    @parameterized.expand(
        [
            ("random", DisjunctQbf),
            ("negated", DisjunctQbf),
            ("squished", DisjunctQbf),
            ("mcis", QbfFormula),
            ("phi-n", QbfFormula),
            ("enhanced", QbfFormula),
            ("unmixed", QbfFormula),
        ]
    )
    def test_dispatch(self, family, expected_type):
        mock_log = MockLogObject()
        spec = GeneratorSpec(family=family, seed=3, n=6, k=2, constraint_class="horn")

        result = generate(spec, QbkLogger(mock_log))

        self.assertIsInstance(result, expected_type)
        self.assertTrue(mock_log.was_value_logged("QBK0601", "family", family))
        self.assertTrue(mock_log.was_value_logged("QBK0601", "seed", 3))
