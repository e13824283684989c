import re

EXISTS = "e"
FORALL = "a"
QUANTIFIERS = (EXISTS, FORALL)

REGEX_INTEGER = re.compile(r"^-?\d+$")
REGEX_TOKEN = re.compile(r"\S+")
REGEX_HEADER_CNF = re.compile(r"^p\s+cnf\s+(\d+)\s+(\d+)\s*$")
REGEX_HEADER_DQBF = re.compile(r"^p\s+dqbf\s+(\d+)\s+(\d+)\s*$")
REGEX_DISJUNCT_OPEN = re.compile(r"^d\s+(\d+)\s+0\s*$")
REGEX_EQUATION = re.compile(r"^x((?:\s+\d+)*)\s+0\s*=\s*([01])\s*$")

# Oracle game trees above this many variables are refused outright
ORACLE_MAX_VARS_CAP = 30
DEFAULT_ORACLE_MAX_VARS = 20
DEFAULT_ORACLE_MAX_NODES = 2_000_000

# disj produces 2^|X| disjuncts
DISJ_MAX_VARS = 20

# SEL enumerates every non-empty subset of the disjuncts
SEL_MAX_DISJUNCTS = 16

# Strong backdoor validation instantiates all 2^|B| assignments up to this size
STRONG_CHECK_MAX_VARS = 10
