import unittest

from qbf_backdoors.generators.families import gen_enhanced_instance
from qbf_backdoors.generators.random_instances import GeneratorSpec
from qbf_backdoors.guarded.elimination import compute_beta, evaluate_with_enhanced_backdoor
from qbf_backdoors.oracle.game_tree import evaluate
from qbf_backdoors.testing.instances import closed_instance

INSTANCES = 500

PLANTED_CLASSES = (("2cnf", 6), ("horn", 6), ("aff", 5))


class ComputeBetaAgreementTest(unittest.TestCase):
    def test_seeded_residuals_keep_truth(self):
        for seed in range(INSTANCES):
            phi, y_set = closed_instance(seed)

            beta, residual = compute_beta(phi, y_set)

            message = "seed {}".format(seed)
            self.assertLessEqual(beta.domain, y_set, message)
            self.assertEqual(evaluate(residual), evaluate(phi), message)


class EnhancedBackdoorEvaluationAgreementTest(unittest.TestCase):
    def test_seeded_planted_instances_match_oracle(self):
        for seed in range(INSTANCES):
            constraint_class, n = PLANTED_CLASSES[seed % len(PLANTED_CLASSES)]
            spec = GeneratorSpec(
                family="enhanced",
                seed=seed,
                n=n,
                k=1,
                d=2,
                density=1.2,
                constraint_class=constraint_class,
            )
            phi, backdoor = gen_enhanced_instance(spec)

            self.assertEqual(
                evaluate_with_enhanced_backdoor(phi, backdoor, constraint_class),
                evaluate(phi),
                "seed {} {}".format(seed, constraint_class),
            )
