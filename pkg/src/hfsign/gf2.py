"""Sparse parity systems over GF(2).

A sign s = (-1)^b turns each multiplicative relation into a parity row.
The solver propagates rows with one unknown, then runs Gaussian
elimination (rows as int bitsets) on whatever is left.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence


@dataclass
class GF2System:
    variables: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    rows: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)
    instance_counts: dict[str, int] = field(default_factory=dict)
    _seen: dict = field(default_factory=dict, repr=False)

    def add_variable(self, key: Hashable) -> int:
        k = self.index.get(key)
        if k is None:
            k = len(self.variables)
            self.index[key] = k
            self.variables.append(key)
        return k

    def add_row(self, keys: Iterable[Hashable], rhs: int, tag: str) -> bool:
        """Add a parity row; repeated variables cancel.  Returns False on a duplicate."""
        odd: set[int] = set()
        for key in keys:
            k = self.index[key]
            odd ^= {k}
        row = (tuple(sorted(odd)), rhs & 1)
        if row in self._seen:
            return False
        self._seen[row] = len(self.rows)
        self.rows.append(row)
        self.provenance.append(tag)
        return True

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def export_text(self) -> str:
        lines = [f"vars {self.n_vars} rows {len(self.rows)}"]
        for idx, rhs in self.rows:
            lines.append(" ".join(str(k) for k in idx) + f" | {rhs}")
        return "\n".join(lines) + "\n"

    def satisfied_by(self, values: Sequence[int]) -> list[int]:
        """Indices of rows violated by a 0/1 assignment."""
        bad = []
        for r, (idx, rhs) in enumerate(self.rows):
            if sum(values[k] for k in idx) & 1 != rhs:
                bad.append(r)
        return bad


@dataclass
class GF2Solution:
    consistent: bool
    values: list[int]
    free_dim: int
    free_vars: list[int]
    conflict_row: int | None = None


def solve(system: GF2System, fixed: dict[int, int] | None = None) -> GF2Solution:
    """Solve with some variables pinned; free variables are set to 0.

    ``free_dim`` is the kernel dimension with the pinned variables held fixed.
    """
    m = system.n_vars
    rows = system.rows
    values: list[int | None] = [None] * m
    incidence: list[list[int]] = [[] for _ in range(m)]
    for r, (idx, _) in enumerate(rows):
        for k in idx:
            incidence[k].append(r)
    unknown = [len(idx) for idx, _ in rows]
    parity = [rhs for _, rhs in rows]
    queue: deque[int] = deque()

    def assign(k: int, v: int) -> int | None:
        values[k] = v
        for r in incidence[k]:
            unknown[r] -= 1
            parity[r] ^= v
            if unknown[r] == 1:
                queue.append(r)
            elif unknown[r] == 0 and parity[r]:
                return r
        return None

    def propagate() -> int | None:
        while queue:
            r = queue.popleft()
            if unknown[r] != 1:
                continue
            k = next(k for k in rows[r][0] if values[k] is None)
            bad = assign(k, parity[r])
            if bad is not None:
                return bad
        return None

    for r, (idx, rhs) in enumerate(rows):
        if not idx and rhs:
            return GF2Solution(False, [], 0, [], r)
        if len(idx) == 1:
            queue.append(r)
    for k, v in sorted((fixed or {}).items()):
        if values[k] is not None:
            if values[k] != v:
                return GF2Solution(False, [], 0, [], None)
            continue
        bad = assign(k, v & 1)
        if bad is not None:
            return GF2Solution(False, [], 0, [], bad)
    bad = propagate()
    if bad is not None:
        return GF2Solution(False, [], 0, [], bad)

    # Gaussian elimination on the residual rows
    residual = [r for r in range(len(rows)) if unknown[r] > 0]
    unk_vars = sorted({k for r in residual for k in rows[r][0] if values[k] is None})
    free_untouched = [k for k in range(m) if values[k] is None and not incidence[k]]
    local = {k: p for p, k in enumerate(unk_vars)}
    width = len(unk_vars)
    pivots: dict[int, int] = {}  # pivot bit -> reduced row (bit width = rhs)
    for r in residual:
        vec = parity[r] << width
        for k in rows[r][0]:
            if values[k] is None:
                vec |= 1 << local[k]
        for bit, prow in pivots.items():
            if vec >> bit & 1:
                vec ^= prow
        low = vec & ((1 << width) - 1)
        if not low:
            if vec:
                return GF2Solution(False, [], 0, [], r)
            continue
        bit = low.bit_length() - 1
        for other, prow in pivots.items():
            if prow >> bit & 1:
                pivots[other] = prow ^ vec
        pivots[bit] = vec
    free_local = [p for p in range(width) if p not in pivots]
    for p in free_local:
        values[unk_vars[p]] = 0
    for bit, prow in pivots.items():
        values[unk_vars[bit]] = prow >> width & 1
    for k in free_untouched:
        values[k] = 0
    result = [int(v) for v in values]  # type: ignore[arg-type]
    free_vars = sorted([unk_vars[p] for p in free_local] + free_untouched)
    return GF2Solution(True, result, len(free_vars), free_vars)


def rank(rows: Iterable[Iterable[int]]) -> int:
    """Rank of 0/1 rows given as column-index collections, by plain bitset elimination."""
    basis: dict[int, int] = {}
    r = 0
    for row in rows:
        vec = 0
        for k in row:
            vec ^= 1 << k
        while vec:
            top = vec.bit_length() - 1
            if top in basis:
                vec ^= basis[top]
            else:
                basis[top] = vec
                r += 1
                break
    return r


def rank_augmented(system: GF2System) -> tuple[int, int]:
    """(rank of coefficient matrix, rank of augmented matrix)."""
    width = system.n_vars
    coeff = rank(idx for idx, _ in system.rows)
    aug = rank(tuple(idx) + ((width,) if rhs else ()) for idx, rhs in system.rows)
    return coeff, aug
