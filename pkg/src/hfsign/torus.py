"""Rectangles on the n x n toroidal grid.

Rows and columns are 0-based here.  A grid state ``x`` is a tuple with
``x[r]`` the column of the point on row r.  A rectangle is given by the rows
of its bottom-left and top-right corners; it runs rightward and upward mod n
from (x[r1], r1) to (x[r2], r2).  Cell (c, r) is bit ``r * n + c`` of a mask.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import DecompositionCountMismatch
from .formal import FormalGenerator, FormalRectangle, drawn_rectangle


class TorusRect(NamedTuple):
    r1: int
    r2: int
    c1: int
    c2: int


@lru_cache(maxsize=None)
def cell_mask(n: int, rect: TorusRect) -> int:
    width = (rect.c2 - rect.c1) % n
    height = (rect.r2 - rect.r1) % n
    mask = 0
    for b in range(height):
        row = (rect.r1 + b) % n
        for a in range(width):
            mask |= 1 << (row * n + (rect.c1 + a) % n)
    return mask


def cell_bit(n: int, col: int, row: int) -> int:
    return 1 << ((row % n) * n + col % n)


def rects_from(x: Sequence[int]) -> list[TorusRect]:
    n = len(x)
    return [TorusRect(r1, r2, x[r1], x[r2])
            for r1 in range(n) for r2 in range(n) if r1 != r2]


def end_state(x: Sequence[int], rect: TorusRect) -> tuple[int, ...]:
    y = list(x)
    y[rect.r1], y[rect.r2] = rect.c2, rect.c1
    return tuple(y)


def interior_points(x: Sequence[int], rect: TorusRect) -> list[tuple[int, int]]:
    """Points of ``x`` strictly inside the rectangle, as (col, row)."""
    n = len(x)
    width = (rect.c2 - rect.c1) % n
    height = (rect.r2 - rect.r1) % n
    out = []
    for b in range(1, height):
        row = (rect.r1 + b) % n
        if 0 < (x[row] - rect.c1) % n < width:
            out.append((x[row], row))
    return out


def complexity(x: Sequence[int], rect: TorusRect) -> int:
    return len(interior_points(x, rect))


def is_empty(x: Sequence[int], rect: TorusRect, blocked: int = 0) -> bool:
    n = len(x)
    return not (cell_mask(n, rect) & blocked) and not interior_points(x, rect)


def _rect_between(n: int, w: Sequence[int], z: Sequence[int]) -> list[TorusRect]:
    """Rectangles from w whose end is z."""
    diff = [r for r in range(n) if w[r] != z[r]]
    if len(diff) != 2:
        return []
    a, b = diff
    if z[a] != w[b] or z[b] != w[a]:
        return []
    return [TorusRect(a, b, w[a], w[b]), TorusRect(b, a, w[b], w[a])]


def decompositions(x: Sequence[int], first: TorusRect, second: TorusRect
                   ) -> list[tuple[TorusRect, TorusRect]]:
    """All ordered pairs of rectangles x -> w -> z covering the same cells
    (with multiplicity) as ``first`` followed by ``second``."""
    n = len(x)
    y = end_state(x, first)
    z = end_state(y, second)
    ma, mb = cell_mask(n, first), cell_mask(n, second)
    m1, m2 = ma | mb, ma & mb
    delta = [r for r in range(n) if x[r] != z[r]]
    out = []
    for ra in delta:
        for rb in delta:
            if ra == rb:
                continue
            rect = TorusRect(ra, rb, x[ra], x[rb])
            mr = cell_mask(n, rect)
            if mr & ~m1:
                continue
            rest1 = (m1 & ~mr) | (m2 & mr)
            if m2 & ~mr:
                continue
            w = end_state(x, rect)
            for other in _rect_between(n, w, z):
                if cell_mask(n, other) == rest1:
                    out.append((rect, other))
    return out


def composite_squares(x: Sequence[int]) -> list[tuple[TorusRect, TorusRect, TorusRect, TorusRect]]:
    """Every composable pair from ``x`` with distinct endpoints, matched with
    its other decomposition.  Each square appears once per decomposition."""
    x = tuple(x)
    out = []
    for first in rects_from(x):
        y = end_state(x, first)
        for second in rects_from(y):
            if end_state(y, second) == x:
                continue
            found = decompositions(x, first, second)
            if len(found) != 2 or (first, second) not in found:
                raise DecompositionCountMismatch(
                    f"state {x}: composite {first},{second} has {len(found)} decompositions")
            other = found[0] if found[1] == (first, second) else found[1]
            out.append((first, second, other[0], other[1]))
    return out


class Realization(NamedTuple):
    """How grid curves become formal coordinates.

    ``alpha_index[r]`` is the formal alpha index of the circle on row r,
    ``beta_index[c]`` that of the circle on column c; ``h[r]`` is +1 when the
    row circle points right and ``v[c]`` is +1 when the column circle points up.
    """
    alpha_index: tuple[int, ...]
    beta_index: tuple[int, ...]
    h: tuple[int, ...]
    v: tuple[int, ...]

    @classmethod
    def default(cls, n: int) -> "Realization":
        ids = tuple(range(1, n + 1))
        return cls(ids, ids, (1,) * n, (1,) * n)


def formal_state(x: Sequence[int], real: Realization, extra: tuple[int, ...] = ()
                 ) -> FormalGenerator:
    """Formal generator of a grid state; ``extra`` appends fixed coordinates with given signs."""
    n = len(x)
    sigma = [0] * n
    eps = [0] * n
    for r in range(n):
        k = real.alpha_index[r] - 1
        sigma[k] = real.beta_index[x[r]]
        eps[k] = real.h[r] * real.v[x[r]]
    sigma.extend(range(n + 1, n + len(extra) + 1))
    eps.extend(extra)
    return FormalGenerator(tuple(sigma), tuple(eps))


def formal_rect(x: Sequence[int], rect: TorusRect, real: Realization,
                extra: tuple[int, ...] = ()) -> FormalRectangle:
    start = formal_state(x, real, extra)
    return drawn_rectangle(start, real.alpha_index[rect.r1], real.alpha_index[rect.r2],
                           real.h[rect.r1], real.h[rect.r2],
                           real.v[rect.c1], real.v[rect.c2])
