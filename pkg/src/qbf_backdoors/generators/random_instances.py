import random
from dataclasses import dataclass
from typing import List

from qbf_backdoors.core.constants import EXISTS, FORALL
from qbf_backdoors.core.formula import ConjunctiveFormula, DisjunctQbf, QuantifierPrefix
from qbf_backdoors.errors import QbkValidationError

CONSTRAINT_CLASSES = ("cnf", "2cnf", "horn", "aff", "mixed", "gamma-aff")
FAMILIES = ("random", "squished", "mcis", "phi-n", "negated", "enhanced", "unmixed")


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Everything a generator needs; the seed fully determines the output.
    q counts quantifier alternations, density is constraints per variable per disjunct.
    cliqueify adds the edges inside each colour class of mcis graphs.
    """

    family: str = "random"
    seed: int = 0
    n: int = 8
    k: int = 1
    q: int = 1
    d: int = 3
    density: float = 1.0
    constraint_class: str = "cnf"
    first_quantifier: str = EXISTS
    cliqueify: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise QbkValidationError("unknown generator family {}".format(self.family))
        if self.constraint_class not in CONSTRAINT_CLASSES:
            raise QbkValidationError("unknown constraint class {}".format(self.constraint_class))
        if self.n < 1 or self.k < 0 or self.q < 0 or self.d < 1 or self.density < 0:
            raise QbkValidationError("generator sizes out of range")


def layered_prefix(n: int, q: int, first_quantifier: str = EXISTS) -> QuantifierPrefix:
    """
    Variables 1..n in q+1 consecutive alternating blocks
    """
    block_count = min(q + 1, n)
    other = FORALL if first_quantifier == EXISTS else EXISTS
    blocks = []
    for index in range(block_count):
        variables = [v for v in range(1, n + 1) if (v - 1) * block_count // n == index]
        blocks.append((first_quantifier if index % 2 == 0 else other, variables))
    return QuantifierPrefix.build(blocks)


def _random_clause(rng: random.Random, n: int, width: int, horn: bool) -> List[int]:
    variables = rng.sample(range(1, n + 1), min(width, n))
    if horn:
        literals = [-v for v in variables]
        if rng.random() < 0.5:
            literals[0] = variables[0]
        return literals
    return [v if rng.random() < 0.5 else -v for v in variables]


def random_matrix(rng: random.Random, spec: GeneratorSpec) -> ConjunctiveFormula:
    count = round(spec.density * spec.n)
    max_width = min(spec.d, 2) if spec.constraint_class in ("2cnf", "gamma-aff") else spec.d
    clauses, equations = [], []
    for _ in range(count):
        width = rng.randint(1, max_width)
        kind = spec.constraint_class
        if kind == "mixed":
            kind = rng.choice(("cnf", "aff"))
        if kind == "aff":
            variables = rng.sample(range(1, spec.n + 1), min(width, spec.n))
            equations.append((variables, rng.randint(0, 1)))
        elif kind == "gamma-aff":
            variables = rng.sample(range(1, spec.n + 1), min(width, spec.n))
            rhs = rng.randint(0, 1) if len(variables) == 1 else 0
            equations.append((variables, rhs))
        else:
            clauses.append(_random_clause(rng, spec.n, width, kind == "horn"))
    return ConjunctiveFormula.build(clauses, equations)


def gen_random(spec: GeneratorSpec) -> DisjunctQbf:
    """
    Uniformly random constraints over a layered prefix with spec.q alternations
    """
    rng = random.Random(spec.seed)
    prefix = layered_prefix(spec.n, spec.q, spec.first_quantifier)
    return DisjunctQbf(prefix, tuple(random_matrix(rng, spec) for _ in range(spec.k)))
