import unittest

from qbf_backdoors.generators.families import gen_negated_3cnf, gen_squished, random_3cnf
from qbf_backdoors.generators.random_instances import GeneratorSpec
from qbf_backdoors.oracle.game_tree import evaluate

NEGATED_INSTANCES = 100
SQUISHED_INSTANCES = 50


class NegatedAgreementTest(unittest.TestCase):
    def test_seeded_negations_flip_truth(self):
        for seed in range(NEGATED_INSTANCES):
            spec = GeneratorSpec(seed=seed, n=6, q=2, density=1.5)
            phi = random_3cnf(spec)

            negated = gen_negated_3cnf(spec, phi)

            message = "seed {}".format(seed)
            self.assertEqual(negated.k, phi.matrix.size, message)
            self.assertEqual(evaluate(negated), not evaluate(phi), message)


class SquishedAgreementTest(unittest.TestCase):
    def test_seeded_squished_keep_truth(self):
        for seed in range(SQUISHED_INSTANCES):
            spec = GeneratorSpec(seed=seed, n=4, q=1, density=1.5)

            squished = gen_squished(spec)

            message = "seed {}".format(seed)
            self.assertLessEqual(squished.k, 4, message)
            self.assertEqual(
                evaluate(squished, memoize=True), evaluate(gen_negated_3cnf(spec)), message
            )
