"""Toroidal grid diagrams and their translation into formal flows.

Rows and columns are 1-based, bottom to top and left to right.  Row i holds
an O in column O(i) (and an X in column X(i) when present); a generator puts
one point on each row, at column base(i).  ``alpha_order[i-1]`` is the formal
alpha index of the row-i circle and ``alpha_orient[i-1]`` is +1 when it
points right; ``beta_order``/``beta_orient`` do the same for columns (+1 up).

A type-b stabilization is modelled as a unit with two states u and d and two
bigons from u to d; unit t becomes formal coordinate n + t.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

import jsonschema

from . import torus
from .errors import BadDiagram, FlowNotInDiagram
from .formal import FormalBigon, FormalFlow, FormalGenerator


@dataclass(frozen=True)
class GridDiagram:
    n: int
    O: tuple[int, ...]
    X: tuple[int, ...] | None = None
    alpha_order: tuple[int, ...] | None = None
    beta_order: tuple[int, ...] | None = None
    alpha_orient: tuple[int, ...] | None = None
    beta_orient: tuple[int, ...] | None = None
    b_stab: int = 0

    def __post_init__(self):
        n = self.n
        ident = tuple(range(1, n + 1))
        for name, default in (("alpha_order", ident), ("beta_order", ident),
                              ("alpha_orient", (1,) * n), ("beta_orient", (1,) * n)):
            value = getattr(self, name)
            object.__setattr__(self, name, default if value is None else tuple(value))
        object.__setattr__(self, "O", tuple(self.O))
        if self.X is not None:
            object.__setattr__(self, "X", tuple(self.X))

    @property
    def power(self) -> int:
        return self.n + self.b_stab

    @property
    def realization(self) -> torus.Realization:
        return torus.Realization(self.alpha_order, self.beta_order,
                                 self.alpha_orient, self.beta_orient)

    def blocked_mask(self) -> int:
        mask = 0
        for markings in (self.O, self.X):
            if markings is None:
                continue
            for row, col in enumerate(markings):
                mask |= torus.cell_bit(self.n, col - 1, row)
        return mask


class DiagramGenerator(NamedTuple):
    base: tuple[int, ...]
    stab: tuple[str, ...] = ()


class GridRectangleFlow(NamedTuple):
    """Rectangle with bottom-left corner on row ``r1`` and top-right on ``r2``."""
    r1: int
    r2: int
    c1: int
    c2: int
    width: int
    height: int

    kind = "grid_rectangle"

    @property
    def wraps(self) -> tuple[bool, bool]:
        """(horizontal, vertical): the far corner comes before the near one."""
        return (self.c2 < self.c1, self.r2 < self.r1)


class StabBigon(NamedTuple):
    unit: int
    variant: int

    kind = "stab_bigon"


DiagramFlow = Union[GridRectangleFlow, StabBigon]


def _is_perm(p, n: int) -> bool:
    return (isinstance(p, tuple) and len(p) == n
            and sorted(p) == list(range(1, n + 1)))


def validate_diagram(d: GridDiagram) -> tuple[bool, str]:
    """(valid, diagnostic naming the first violation)."""
    if not isinstance(d.n, int) or d.n < 1:
        return False, "n must be a positive integer"
    n = d.n
    if not _is_perm(d.O, n):
        return False, "O must have one marking per row and per column"
    if d.X is not None:
        if not _is_perm(d.X, n):
            return False, "X must have one marking per row and per column"
        for row, (o, x) in enumerate(zip(d.O, d.X), start=1):
            if o == x:
                return False, f"O and X share the cell in row {row}"
    if not _is_perm(d.alpha_order, n):
        return False, "alpha_order must be a permutation"
    if not _is_perm(d.beta_order, n):
        return False, "beta_order must be a permutation"
    for name in ("alpha_orient", "beta_orient"):
        value = getattr(d, name)
        if len(value) != n or any(v not in (1, -1) for v in value):
            return False, f"{name} must be {n} values in {{1, -1}}"
    if not isinstance(d.b_stab, int) or d.b_stab < 0:
        return False, "b_stab must be a nonnegative integer"
    return True, "ok"


def _require(d: GridDiagram) -> None:
    ok, why = validate_diagram(d)
    if not ok:
        raise BadDiagram(why)


def generators(d: GridDiagram) -> list[DiagramGenerator]:
    _require(d)
    out = []
    for base in itertools.permutations(range(1, d.n + 1)):
        for stab in itertools.product("ud", repeat=d.b_stab):
            out.append(DiagramGenerator(base, stab))
    return out


def _state(x: DiagramGenerator) -> tuple[int, ...]:
    return tuple(c - 1 for c in x.base)


def _grid_flow(n: int, r: torus.TorusRect) -> GridRectangleFlow:
    return GridRectangleFlow(r.r1 + 1, r.r2 + 1, r.c1 + 1, r.c2 + 1,
                             (r.c2 - r.c1) % n, (r.r2 - r.r1) % n)


def _torus_rect(f: GridRectangleFlow) -> torus.TorusRect:
    return torus.TorusRect(f.r1 - 1, f.r2 - 1, f.c1 - 1, f.c2 - 1)


def _end(x: DiagramGenerator, flow: DiagramFlow) -> DiagramGenerator:
    if isinstance(flow, StabBigon):
        stab = list(x.stab)
        stab[flow.unit - 1] = "d"
        return DiagramGenerator(x.base, tuple(stab))
    base = torus.end_state(_state(x), _torus_rect(flow))
    return DiagramGenerator(tuple(c + 1 for c in base), x.stab)


def flows_from(d: GridDiagram, x: DiagramGenerator, blocked: int | None = None
               ) -> list[tuple[DiagramFlow, DiagramGenerator]]:
    """Empty rectangles with start corners on x, then stabilization bigons."""
    _require(d)
    if not _is_perm(tuple(x.base), d.n) or len(x.stab) != d.b_stab:
        raise BadDiagram(f"{x!r} is not a generator of this diagram")
    mask = d.blocked_mask() if blocked is None else blocked
    state = _state(x)
    out: list[tuple[DiagramFlow, DiagramGenerator]] = []
    for r in torus.rects_from(state):
        if torus.is_empty(state, r, mask):
            f = _grid_flow(d.n, r)
            out.append((f, _end(x, f)))
    for unit, s in enumerate(x.stab, start=1):
        if s == "u":
            for variant in (1, 2):
                f = StabBigon(unit, variant)
                out.append((f, _end(x, f)))
    return out


def _stab_signs(x: DiagramGenerator) -> tuple[int, ...]:
    return tuple(1 if s == "u" else -1 for s in x.stab)


def formal_generator(d: GridDiagram, x: DiagramGenerator) -> FormalGenerator:
    return torus.formal_state(_state(x), d.realization, _stab_signs(x))


def to_formal(d: GridDiagram, flow: DiagramFlow, x: DiagramGenerator) -> FormalFlow:
    """The formal flow of power n + b_stab underlying ``flow``."""
    if isinstance(flow, StabBigon):
        if not (1 <= flow.unit <= d.b_stab and flow.variant in (1, 2)
                and x.stab[flow.unit - 1] == "u"):
            raise FlowNotInDiagram(f"{flow!r} does not start at {x!r}")
        o = 1 if flow.variant == 1 else -1
        return FormalBigon(formal_generator(d, x), d.n + flow.unit, o, o)
    if not isinstance(flow, GridRectangleFlow):
        raise FlowNotInDiagram(f"unknown flow {flow!r}")
    state = _state(x)
    r = _torus_rect(flow)
    if not (0 <= r.r1 < d.n and 0 <= r.r2 < d.n and r.r1 != r.r2
            and state[r.r1] == r.c1 and state[r.r2] == r.c2
            and torus.is_empty(state, r, d.blocked_mask())):
        raise FlowNotInDiagram(f"{flow!r} is not an empty rectangle from {x!r}")
    return torus.formal_rect(state, r, d.realization, _stab_signs(x))


def b_stabilize(d: GridDiagram, times: int = 1) -> GridDiagram:
    return replace(d, b_stab=d.b_stab + times)


# JSON

DIAGRAM_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type", "n", "O"],
    "properties": {
        "type": {"const": "grid"},
        "n": {"type": "integer", "minimum": 1},
        "O": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "X": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "alpha_orient": {"type": "array", "items": {"enum": [1, -1]}},
        "beta_orient": {"type": "array", "items": {"enum": [1, -1]}},
        "alpha_order": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "beta_order": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "b_stab": {"type": "integer", "minimum": 0},
    },
}


def diagram_from_json(data: dict) -> GridDiagram:
    try:
        jsonschema.validate(data, DIAGRAM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise BadDiagram(f"diagram JSON: {exc.message}") from exc
    opt = {k: tuple(data[k]) for k in ("X", "alpha_order", "beta_order",
                                        "alpha_orient", "beta_orient") if k in data}
    d = GridDiagram(data["n"], tuple(data["O"]), b_stab=data.get("b_stab", 0), **opt)
    _require(d)
    return d


def diagram_to_json(d: GridDiagram) -> dict:
    out = {"type": "grid", "n": d.n, "O": list(d.O)}
    if d.X is not None:
        out["X"] = list(d.X)
    out.update(alpha_orient=list(d.alpha_orient), beta_orient=list(d.beta_orient),
               alpha_order=list(d.alpha_order), beta_order=list(d.beta_order),
               b_stab=d.b_stab)
    return out


def load_diagram(path: str) -> GridDiagram:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BadDiagram(f"{path}: not valid JSON ({exc.msg})") from exc
    return diagram_from_json(data)


# sample diagrams

def s3_grid(n: int, O: tuple[int, ...] | None = None) -> GridDiagram:
    """Grid with only O markings (a multi-pointed diagram of the 3-sphere)."""
    return GridDiagram(n, tuple(O) if O else tuple(range(1, n + 1)))


def unknot_grid() -> GridDiagram:
    return GridDiagram(2, (1, 2), (2, 1))


def trefoil_grid() -> GridDiagram:
    """5 x 5 grid of the trefoil: O on the diagonal, X shifted two columns."""
    return GridDiagram(5, (1, 2, 3, 4, 5), (3, 4, 5, 1, 2))


def figure_eight_grid() -> GridDiagram:
    """6 x 6 grid of the figure-eight knot (one component, mod 2 rank 5 * 2^5)."""
    return GridDiagram(6, (4, 3, 1, 2, 5, 6), (2, 5, 4, 6, 1, 3))


NAMED_DIAGRAMS = {
    "unknot": unknot_grid,
    "trefoil": trefoil_grid,
    "figure_eight": figure_eight_grid,
}


def link_components(d: GridDiagram) -> int:
    """Number of components of the link drawn by the O and X markings."""
    if d.X is None:
        raise BadDiagram("component count needs X markings")
    # each row joins its O to its X; the column of that X leads to the next row
    o_row = {c: r for r, c in enumerate(d.O)}
    seen = [False] * d.n
    comps = 0
    for start in range(d.n):
        if seen[start]:
            continue
        comps += 1
        row = start
        while not seen[row]:
            seen[row] = True
            row = o_row[d.X[row]]
    return comps
