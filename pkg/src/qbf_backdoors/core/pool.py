from itertools import count
from typing import Hashable, Optional, Tuple

from pysat.formula import IDPool

from qbf_backdoors.core.formula import as_disjunct_qbf


class FreshVarPool:
    """
    Issues variable ids above every id of the formula being extended. Labelled requests
    are memoised, so asking twice for the same label gives the same variable.
    """

    def __init__(self, above: int = 0):
        self._pool = IDPool(start_from=above + 1)
        self._floor = above
        self._anonymous = count()

    @classmethod
    def for_formula(cls, *formulas) -> "FreshVarPool":
        pool = cls()
        pool.ensure_above(*formulas)
        return pool

    def ensure_above(self, *formulas):
        """
        Skip ids already used by the formulas
        """
        above = 0
        for phi in formulas:
            phi = as_disjunct_qbf(phi)
            above = max(above, phi.prefix.max_variable(), max(phi.variables, default=0))
        if above >= self.next_id:
            self._pool.occupy(self.next_id, above)
            self._floor = above

    @property
    def next_id(self) -> int:
        return max(self._pool.top, self._floor) + 1

    def fresh(self, label: Optional[Hashable] = None) -> int:
        if label is None:
            label = ("anonymous", next(self._anonymous))
        return self._pool.id(label)

    def fresh_block(self, size: int, label: Optional[Hashable] = None) -> Tuple[int, ...]:
        if label is None:
            return tuple(self.fresh() for _ in range(size))
        return tuple(self.fresh((label, index)) for index in range(size))
