# """Exact Gaussian elimination over a FieldSpec."""
from typing import Dict, Hashable, List, Optional, Sequence

from src.algebra.exactfield import FieldSpec, Raw

SparseRow = Dict[Hashable, Raw]


class SparseEliminator:
    """Incremental row echelon form for sparse rows keyed by column labels.

    Rows are reduced against the stored pivots as they arrive; ``rank`` is the
    number of independent rows seen so far.
    """

    def __init__(self, field: FieldSpec, column_key=None):
        self.field = field
        self.pivots: Dict[Hashable, SparseRow] = {}
        self._key = column_key

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _lead(self, row: SparseRow) -> Hashable:
        return max(row, key=self._key) if self._key else max(row)

    def reduce(self, row: SparseRow) -> SparseRow:
        field = self.field
        row = {c: v for c, v in row.items() if not field.is_zero(v)}
        done: SparseRow = {}
        while row:
            lead = self._lead(row)
            pivot = self.pivots.get(lead)
            if pivot is None:
                done[lead] = row.pop(lead)
                continue
            factor = row[lead]
            for col, v in pivot.items():
                value = field.sub(row.get(col, field.zero), field.mul(factor, v))
                if field.is_zero(value):
                    row.pop(col, None)
                else:
                    row[col] = value
        return done

    def add(self, row: SparseRow) -> bool:
        """Insert a row; True when it raised the rank."""
        reduced = self.reduce(row)
        if not reduced:
            return False
        lead = self._lead(reduced)
        inv = self.field.inv(reduced[lead])
        self.pivots[lead] = {c: self.field.mul(v, inv) for c, v in reduced.items()}
        return True


def rank(field: FieldSpec, rows: Sequence[Sequence[Raw]]) -> int:
    elim = SparseEliminator(field)
    for row in rows:
        elim.add({j: v for j, v in enumerate(row)})
    return elim.rank


def inverse(field: FieldSpec, matrix: Sequence[Sequence[Raw]]) -> Optional[List[List[Raw]]]:
    """Gauss-Jordan inverse; None for a singular matrix."""
    n = len(matrix)
    aug = [list(row) + [field.one if i == j else field.zero for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not field.is_zero(aug[r][col])), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = field.inv(aug[col][col])
        aug[col] = [field.mul(v, inv) for v in aug[col]]
        for r in range(n):
            if r != col and not field.is_zero(aug[r][col]):
                factor = aug[r][col]
                aug[r] = [field.sub(a, field.mul(factor, b)) for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def mat_vec(field: FieldSpec, matrix: Sequence[Sequence[Raw]], vector: Sequence[Raw]) -> List[Raw]:
    out = []
    for row in matrix:
        acc = field.zero
        for a, b in zip(row, vector):
            acc = field.add(acc, field.mul(a, b))
        out.append(acc)
    return out
