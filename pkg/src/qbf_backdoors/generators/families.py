"""
Structured instance families: negated 3-CNF duals, squished duals, the multicolored
independent set reduction, the Φₙ family separating backdoors from dependency schemes,
and planted enhanced-backdoor and unmixed instances.
"""

import random
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import (
    ConjunctiveFormula,
    DisjunctQbf,
    QbfFormula,
    QuantifierPrefix,
    var_of,
)
from qbf_backdoors.core.pool import FreshVarPool
from qbf_backdoors.errors import QbkValidationError
from qbf_backdoors.generators.random_instances import (
    GeneratorSpec,
    gen_random,
    layered_prefix,
    random_matrix,
)
from qbf_backdoors.logger import QbkLogger
from qbf_backdoors.transforms.squish import squish_to_four

FLIPPED = {EXISTS: FORALL, FORALL: EXISTS}


def random_3cnf(spec: GeneratorSpec) -> QbfFormula:
    rng = random.Random(spec.seed)
    prefix = layered_prefix(spec.n, spec.q, spec.first_quantifier)
    source = GeneratorSpec(n=spec.n, d=3, density=spec.density, constraint_class="cnf")
    return QbfFormula(prefix, random_matrix(rng, source))


def negate(phi: QbfFormula) -> DisjunctQbf:
    """
    ¬Φ with the flipped prefix: one disjunct of unit equations per clause, each equation
    falsifying one literal of the clause
    """
    if not phi.matrix.is_clausal:
        raise QbkValidationError("negate needs a clausal matrix")
    prefix = QuantifierPrefix.build((FLIPPED[b.quantifier], b.variables) for b in phi.prefix.blocks)
    disjuncts = []
    for clause in phi.matrix.clauses:
        units = [({var_of(literal)}, int(literal < 0)) for literal in clause]
        disjuncts.append(ConjunctiveFormula.build(equations=units))
    return DisjunctQbf(prefix, tuple(disjuncts))


def gen_negated_3cnf(spec: GeneratorSpec, source: Optional[QbfFormula] = None) -> DisjunctQbf:
    if source is None:
        source = random_3cnf(spec)
    return negate(source)


def gen_squished(
    spec: GeneratorSpec, pool: Optional[FreshVarPool] = None, log_object: QbkLogger = None
) -> DisjunctQbf:
    """
    A negated random 3-CNF squished down to at most four disjuncts
    """
    negated = gen_negated_3cnf(spec)
    if pool is None:
        pool = FreshVarPool.for_formula(negated)
    return squish_to_four(negated, pool, log_object)


def gen_mcis(
    adjacency: Dict[int, Iterable[int]], classes: Sequence[Iterable[int]], cliqueify=False
) -> QbfFormula:
    """
    ∀X∃Z. ⋀_v (x_v ∨ ⋁_{u ∈ N(v)} ¬x_u ∨ ¬z_c(v)) ∧ (z_1 ∨ … ∨ z_k), false exactly when the
    graph has an independent set with one vertex from every class. Vertices are numbered
    1..|V| in sorted order; z_i follows them. cliqueify adds the edges inside each class.
    """
    classes = [sorted(members) for members in classes]
    for index, members in enumerate(classes):
        if not members:
            raise QbkValidationError("class {} is empty".format(index))
    vertices = set(adjacency) | {v for members in classes for v in members}
    vertices = sorted(vertices | {u for adjacent in adjacency.values() for u in adjacent})
    neighbours = {v: set() for v in vertices}
    for vertex, adjacent in adjacency.items():
        for other in adjacent:
            if other != vertex:
                neighbours[vertex].add(other)
                neighbours[other].add(vertex)
    if cliqueify:
        for members in classes:
            for first, second in combinations(members, 2):
                neighbours[first].add(second)
                neighbours[second].add(first)

    colour = {}
    for index, members in enumerate(classes):
        for vertex in members:
            if vertex in colour:
                raise QbkValidationError("vertex {} is in two classes".format(vertex))
            colour[vertex] = index
    uncoloured = [v for v in vertices if v not in colour]
    if uncoloured:
        raise QbkValidationError("vertices {} have no class".format(uncoloured))

    x_id = {v: index + 1 for index, v in enumerate(vertices)}
    z_ids = [len(vertices) + index + 1 for index in range(len(classes))]
    clauses = []
    for vertex in vertices:
        clause = [x_id[vertex], -z_ids[colour[vertex]]]
        clause += [-x_id[u] for u in sorted(neighbours[vertex])]
        clauses.append(clause)
    clauses.append(z_ids)
    prefix = QuantifierPrefix.build([(FORALL, x_id.values()), (EXISTS, z_ids)])
    return QbfFormula(prefix, ConjunctiveFormula.build(clauses))


def random_coloured_graph(spec: GeneratorSpec) -> Tuple[Dict[int, List[int]], List[List[int]]]:
    """
    spec.n vertices dealt round-robin into spec.k classes, edges with probability
    spec.density / n
    """
    rng = random.Random(spec.seed)
    vertices = list(range(1, spec.n + 1))
    classes = [vertices[index :: max(spec.k, 1)] for index in range(max(spec.k, 1))]
    adjacency = {v: [] for v in vertices}
    for first, second in combinations(vertices, 2):
        if rng.random() < spec.density / spec.n:
            adjacency[first].append(second)
    return adjacency, [members for members in classes if members]


def gen_phi_n(n: int) -> QbfFormula:
    """
    ∀y_1…y_{n+2}∃x with every clause over x and two y's having at most one positive
    y-literal. {x} is a strong backdoor to both 2CNF and Horn.
    """
    if n < 1:
        raise QbkValidationError("phi-n needs n >= 1")
    y_vars = list(range(1, n + 3))
    x = n + 3
    clauses = []
    for first, second in combinations(y_vars, 2):
        for y_literals in ((-first, -second), (first, -second), (-first, second)):
            for x_literal in (x, -x):
                clauses.append(list(y_literals) + [x_literal])
    prefix = QuantifierPrefix.build([(FORALL, y_vars), (EXISTS, [x])])
    return QbfFormula(prefix, ConjunctiveFormula.build(clauses))


def _class_constraint(
    rng: random.Random, variables: Sequence[int], constraint_class: str, d: int
) -> Tuple[List[int], Optional[Tuple[List[int], int]]]:
    """
    One random constraint of the class over the variables: (clause, None) or ([], equation)
    """
    if constraint_class == "aff":
        chosen = rng.sample(variables, min(rng.randint(1, d), len(variables)))
        return [], (chosen, rng.randint(0, 1))
    width = 2 if constraint_class == "2cnf" else d
    chosen = rng.sample(variables, min(rng.randint(1, width), len(variables)))
    if constraint_class == "horn":
        literals = [-v for v in chosen]
        if rng.random() < 0.5:
            literals[0] = chosen[0]
        return literals, None
    return [v if rng.random() < 0.5 else -v for v in chosen], None


def gen_enhanced_instance(spec: GeneratorSpec) -> Tuple[QbfFormula, FrozenSet[int]]:
    """
    A planted enhanced backdoor B of size spec.k. Variables 1..k form B, the next
    min(3, n // 3) variables form a universal set Y touching nothing but B, and the rest is
    an existential core whose constraints fall into spec.constraint_class once B is
    deleted. Y-constraints have up to spec.d variables of Y.
    """
    if spec.constraint_class not in ("2cnf", "horn", "aff"):
        raise QbkValidationError(
            "enhanced instances need class 2cnf, horn or aff, not {}".format(spec.constraint_class)
        )
    y_size = min(3, spec.n // 3)
    if spec.k + y_size >= spec.n:
        raise QbkValidationError("enhanced instances need n above k + |Y|")
    rng = random.Random(spec.seed)
    backdoor = list(range(1, spec.k + 1))
    y_vars = list(range(spec.k + 1, spec.k + y_size + 1))
    core = list(range(spec.k + y_size + 1, spec.n + 1))
    affine = spec.constraint_class == "aff"

    clauses, equations = [], []
    count = round(spec.density * spec.n)
    for _ in range(count):
        if y_vars and rng.random() < len(y_vars) / spec.n:
            chosen = rng.sample(y_vars, min(rng.randint(1, spec.d), len(y_vars)))
            if backdoor and rng.random() < 0.5:
                chosen.append(rng.choice(backdoor))
            if affine:
                equations.append((chosen, rng.randint(0, 1)))
            else:
                clauses.append([v if rng.random() < 0.5 else -v for v in chosen])
            continue
        clause, equation = _class_constraint(rng, core, spec.constraint_class, spec.d)
        if backdoor and rng.random() < 0.5:
            extra = rng.choice(backdoor)
            if equation is not None:
                equation[0].append(extra)
            else:
                clause.append(extra if rng.random() < 0.5 else -extra)
        if equation is not None:
            equations.append(equation)
        else:
            clauses.append(clause)

    universal_backdoor = [v for v in backdoor if rng.random() < 0.5]
    existential_backdoor = [v for v in backdoor if v not in universal_backdoor]
    prefix = QuantifierPrefix.build(
        [
            (EXISTS, existential_backdoor),
            (FORALL, y_vars + universal_backdoor),
            (EXISTS, core),
        ]
    )
    matrix = ConjunctiveFormula.build(clauses, equations)
    return QbfFormula(prefix, matrix), frozenset(backdoor)


def gen_unmixed(spec: GeneratorSpec) -> QbfFormula:
    """
    Layered prefix where no constraint mixes universal and existential variables.
    Universal constraints are arbitrary clauses, existential ones follow the class.
    """
    rng = random.Random(spec.seed)
    prefix = layered_prefix(spec.n, spec.q, spec.first_quantifier)
    universal = sorted(prefix.universal_variables)
    existential = sorted(prefix.existential_variables)
    constraint_class = spec.constraint_class
    if constraint_class not in ("2cnf", "horn", "aff"):
        constraint_class = "cnf"

    clauses, equations = [], []
    for _ in range(round(spec.density * spec.n)):
        side = universal if rng.random() < len(universal) / spec.n else existential
        if not side:
            side = universal or existential
        if side is universal:
            width = rng.randint(1, min(spec.d, len(side)))
            clauses.append([v if rng.random() < 0.5 else -v for v in rng.sample(side, width)])
            continue
        clause, equation = _class_constraint(rng, side, constraint_class, spec.d)
        if equation is not None:
            equations.append(equation)
        else:
            clauses.append(clause)
    return QbfFormula(prefix, ConjunctiveFormula.build(clauses, equations))


def generate(spec: GeneratorSpec, log_object: QbkLogger = None):
    """
    Builds the family named by spec.family. Returns a QbfFormula or a DisjunctQbf.
    """
    if spec.family == "random":
        result = gen_random(spec)
    elif spec.family == "negated":
        result = gen_negated_3cnf(spec)
    elif spec.family == "squished":
        result = gen_squished(spec, log_object=log_object)
    elif spec.family == "mcis":
        adjacency, classes = random_coloured_graph(spec)
        result = gen_mcis(adjacency, classes, spec.cliqueify)
    elif spec.family == "phi-n":
        result = gen_phi_n(spec.n)
    elif spec.family == "enhanced":
        result, _ = gen_enhanced_instance(spec)
    else:
        result = gen_unmixed(spec)
    if log_object:
        log_object.write_log(
            "QBK0601",
            None,
            {"family": spec.family, "seed": spec.seed, "variables": len(result.prefix.variables)},
        )
    return result
