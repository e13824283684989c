import unittest

from qbf_backdoors.core.assignment import PartialAssignment, apply_assignment, assign_qbf
from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import ConjunctiveFormula, QbfFormula, QuantifierPrefix
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import GeneratorSpec, gen_random

X, Y, Z = 1, 2, 3


class ApplyAssignmentTest(unittest.TestCase):
    def test_unit_propagation_of_x(self):
        phi = ConjunctiveFormula.build([[X, Y], [-X, Z]])

        self.assertEqual(apply_assignment(phi, {X: 1}).clauses, ((Z,),))

    def test_equation_rhs_updated(self):
        phi = ConjunctiveFormula.build(equations=[({X, Y}, 1)])

        self.assertEqual(apply_assignment(phi, {Y: 1}).equations, ((frozenset({X}), 0),))

    def test_falsified_unit_leaves_empty_clause(self):
        reduced = apply_assignment(ConjunctiveFormula.build([[X]]), {X: 0})

        self.assertEqual(reduced.clauses, ((),))
        self.assertTrue(reduced.is_bottom)

    def test_satisfied_equation_dropped_and_bottom_kept(self):
        phi = ConjunctiveFormula.build(equations=[({X}, 1), ({Y}, 1)])

        reduced = apply_assignment(phi, {X: 1, Y: 0})

        self.assertEqual(reduced.equations, ((frozenset(), 1),))

    def test_disjoint_assignments_compose(self):
        for seed in range(30):
            spec = GeneratorSpec(seed=seed, n=6, density=1.5, constraint_class="mixed")
            phi = gen_random(spec).disjuncts[0]
            first, second = {1: seed % 2, 2: 1}, {4: 0, 5: (seed // 2) % 2}
            once = apply_assignment(phi, {**first, **second})
            twice = apply_assignment(apply_assignment(phi, first), second)
            self.assertEqual(once.key(), twice.key())

    def test_assign_qbf_drops_prefix_variables(self):
        prefix = QuantifierPrefix.build([(FORALL, [X]), (EXISTS, [Y])])
        phi = QbfFormula(prefix, ConjunctiveFormula.build([[X, Y]]))

        reduced = assign_qbf(phi, {X: 0})

        self.assertEqual(reduced.prefix.variables, frozenset({Y}))
        self.assertEqual(reduced.matrix.clauses, ((Y,),))


class PartialAssignmentTest(unittest.TestCase):
    def test_literal_value(self):
        tau = PartialAssignment({1: 1, 2: 0})
        self.assertEqual(tau.literal_value(-1), 0)
        self.assertEqual(tau.literal_value(-2), 1)
        self.assertIsNone(tau.literal_value(3))

    def test_from_literals(self):
        self.assertEqual(PartialAssignment.from_literals([1, -2]), {1: 1, 2: 0})

    def test_conflicting_extension_rejected(self):
        with self.assertRaises(QbkValidationError):
            PartialAssignment({1: 1}).extended({1: 0})

    def test_bad_value_rejected(self):
        with self.assertRaises(QbkValidationError) as cm:
            PartialAssignment({1: 2})

        self.assertEqual(str(cm.exception), "invalid binding 1=2 in partial assignment")
