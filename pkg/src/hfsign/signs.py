"""Sign assignments: construction, evaluation, gauge tools and verification.

A sign source is anything callable on formal flows with attributes ``n`` and
``scope``.  Scopes are ``bigons``, ``profile1_rectangles`` and ``all_flows``.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import gf2, relations, torus
from .errors import (
    DimensionMismatch,
    InconsistentSystem,
    InvalidFlow,
    NotEquivalent,
    PowerMismatch,
    PowerTooLarge,
    ScopeMismatch,
)
from .formal import (
    EDGES,
    FormalBigon,
    FormalFlow,
    FormalGenerator,
    FormalRectangle,
    _require,
    _simple_flip,
    all_plus,
    check_power,
    end_generator,
    enumerate_flows,
    flow_from_key,
    flow_key,
    generator_sort_key,
    sign_of_permutation,
    validate_flow,
)
from .relations_sampling import sample_instances

PROFILE1_BOUND = 6
GLOBAL_BOUND = 3


def bigon_sign(b: FormalBigon) -> int:
    """o_alpha times the product of the signs at smaller alpha indices."""
    _require(b)
    return _bigon_sign(b)


def _bigon_sign(b: FormalBigon) -> int:
    s = b.o_alpha
    for e in b.start.epsilon[: b.i - 1]:
        s *= e
    return s


@dataclass
class SignTable:
    n: int
    scope: str
    entries: dict
    gauge_id: str = "none"
    solution_dim: int | None = None

    def __call__(self, flow: FormalFlow) -> int:
        try:
            return self.entries[flow]
        except KeyError:
            raise ScopeMismatch(f"flow outside table scope {self.scope}: {flow!r}") from None

    def to_json(self) -> dict:
        return {"n": self.n, "scope": self.scope, "gauge_id": self.gauge_id,
                "entries": [[flow_key(f), s] for f, s in self.entries.items()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "SignTable":
        entries = {flow_from_key(k): int(s) for k, s in data["entries"]}
        return cls(int(data["n"]), data["scope"], entries, data.get("gauge_id", "none"))


# gauge fixing

def spanning_tree(nodes: Sequence, out_flows: Callable[[object], Iterable[FormalFlow]],
                  rng: random.Random | None = None) -> list[FormalFlow]:
    """Tree flows of a BFS forest.  Roots are taken in ``nodes`` order; with
    ``rng`` the root order and neighbour order are shuffled."""
    order = list(nodes)
    if rng is not None:
        rng.shuffle(order)
    seen = set()
    tree = []
    for root in order:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            flows = list(out_flows(x))
            if rng is not None:
                rng.shuffle(flows)
            for f in flows:
                y = end_generator(f)
                if y not in seen:
                    seen.add(y)
                    tree.append(f)
                    queue.append(y)
    return tree


def _solve(system: gf2.GF2System, tree: list[FormalFlow], n_nodes: int):
    fixed = {system.index[f]: 0 for f in tree}
    sol = gf2.solve(system, fixed)
    if not sol.consistent:
        raise InconsistentSystem(
            f"relation system inconsistent (row {sol.conflict_row}: "
            f"{system.provenance[sol.conflict_row] if sol.conflict_row is not None else 'pinned'})")
    return sol, len(tree) + sol.free_dim


def profile1_system(n: int) -> gf2.GF2System:
    return relations.enumerate_relation_rows(n, ("degenerations", "grid"), scope="profile1")


def solve_profile1(n: int, bound: int = PROFILE1_BOUND) -> SignTable:
    """Canonically gauge-fixed sign table on rectangles between all-plus generators.

    Solutions are cached per power; each call returns its own copy.
    """
    check_power(n)
    if n > bound:
        raise PowerTooLarge(f"profile-1 solver bound is {bound}, got {n}")
    t = _profile1_cached(n)
    return SignTable(t.n, t.scope, dict(t.entries), t.gauge_id, t.solution_dim)


@functools.lru_cache(maxsize=None)
def _profile1_cached(n: int) -> SignTable:
    system = profile1_system(n)
    by_start: dict = {}
    for f in system.variables:
        by_start.setdefault(f.start, []).append(f)
    nodes = [all_plus(s) for s in itertools.permutations(range(1, n + 1))]
    tree = spanning_tree(nodes, lambda x: by_start.get(x, ()))
    sol, dim = _solve(system, tree, len(nodes))
    entries = {f: (-1 if sol.values[k] else 1) for k, f in enumerate(system.variables)}
    return SignTable(n, "profile1_rectangles", entries, "bfs-lexmin", dim)


def solve_global(n: int, seed: int | None = None, allow_n4: bool = False
                 ) -> tuple[SignTable, int]:
    """Solve all relation families over every flow; returns (table, pre-gauge dimension)."""
    check_power(n)
    limit = 4 if allow_n4 else GLOBAL_BOUND
    if n > limit:
        raise PowerTooLarge(f"global solver bound is {limit}, got {n}")
    system = relations.enumerate_relation_rows(n, relations.FAMILIES)
    by_start: dict = {}
    for f in system.variables:
        by_start.setdefault(f.start, []).append(f)
    nodes = sorted(by_start, key=generator_sort_key)
    rng = None if seed is None else random.Random(seed)
    tree = spanning_tree(nodes, lambda x: by_start[x], rng)
    sol, dim = _solve(system, tree, len(nodes))
    expected = len(nodes) - 1
    if dim != expected:
        raise DimensionMismatch(f"solution dimension {dim}, expected {expected}")
    entries = {f: (-1 if sol.values[k] else 1) for k, f in enumerate(system.variables)}
    gid = "bfs-lexmin" if seed is None else f"bfs-seed-{seed}"
    return SignTable(n, "all_flows", entries, gid, dim), dim


# evaluation

class SignEvaluator:
    """Total sign assignment built from the bigon formula and a profile-1 table.

    A rectangle is reduced to an all-plus profile-1 rectangle by simple flips
    and edge reversals; each step contributes the sign forced by a square.
    The table may have smaller power than the evaluator, in which case only
    rectangles whose permutation fixes the extra coordinates are supported.
    """

    scope = "all_flows"

    def __init__(self, n: int, table: SignTable, bigon_base: int = 1,
                 flip_order: Sequence[int] | None = None,
                 edge_order: Sequence[str] = EDGES):
        if table.scope != "profile1_rectangles":
            raise ScopeMismatch("evaluator needs a profile-1 rectangle table")
        if table.n > n:
            raise PowerMismatch(f"table power {table.n} exceeds evaluator power {n}")
        self.n = n
        self.table = table
        self.bigon_base = bigon_base
        self.flip_order = tuple(flip_order) if flip_order else tuple(range(1, n + 1))
        self.edge_order = tuple(edge_order)
        self._memo: dict = {}

    def __call__(self, flow: FormalFlow) -> int:
        return self.evaluate(flow)

    def evaluate(self, flow: FormalFlow) -> int:
        s = self._memo.get(flow)
        if s is not None:
            return s
        if not validate_flow(flow):
            raise InvalidFlow(f"invalid flow: {flow!r}")
        if flow.n != self.n:
            raise PowerMismatch(f"flow power {flow.n}, evaluator power {self.n}")
        if isinstance(flow, FormalBigon):
            s = self.bigon_base * _bigon_sign(flow)
        else:
            s = self._rectangle(flow)
        self._memo[flow] = s
        return s

    def _bigon(self, b: FormalBigon) -> int:
        return self.bigon_base * _bigon_sign(b)

    def _rectangle(self, r: FormalRectangle) -> int:
        sign = 1
        for p in self.flip_order:
            if p in (r.i, r.j) or r.start.epsilon[p - 1] == 1:
                continue
            # square (B, R', R, B') with B, B' at p
            b1 = FormalBigon(r.start, p, 1, -1)
            b2 = FormalBigon(end_generator(r), p, 1, -1)
            sign *= -self._bigon(b1) * self._bigon(b2)
            r = _simple_flip(r, p)
        for edge in self.edge_order:
            bit = r.bits[EDGES.index(edge)]
            if bit == 1:
                continue
            _, g1, g2, rev = relations._edge_square(r, edge, True)
            sign *= -self._bigon(g1) * self._bigon(g2)
            r = rev
        return sign * self._lookup(r)

    def _lookup(self, r: FormalRectangle) -> int:
        m = self.table.n
        if m < self.n:
            sigma = r.start.sigma
            if any(sigma[k] != k + 1 for k in range(m, self.n)) or r.j > m:
                raise PowerMismatch(
                    f"table of power {m} cannot evaluate {r!r}")
            r = r._replace(start=all_plus(sigma[:m]))
        return self.table(r)


def build_evaluator(n: int, table_power: int | None = None, **kwargs) -> SignEvaluator:
    m = n if table_power is None else table_power
    return SignEvaluator(n, solve_profile1(max(m, 1)) if m >= 2 else
                         SignTable(m, "profile1_rectangles", {}, "empty", 0), **kwargs)


# gauges

@dataclass
class GaugeMap:
    """u on generators, as a dict or a function; ``restricted`` when u
    depends only on the permutation."""
    u: object
    restricted: bool = False

    def __call__(self, x: FormalGenerator) -> int:
        if callable(self.u):
            return self.u(x)
        return self.u.get(x, 1)

    @classmethod
    def random(cls, seed: int, restricted: bool = False) -> "GaugeMap":
        """A deterministic pseudo-random gauge, total on every power."""
        def u(x: FormalGenerator) -> int:
            data = repr((seed, x.sigma) if restricted else (seed, x.sigma, x.epsilon))
            return 1 if hashlib.blake2b(data.encode(), digest_size=1).digest()[0] & 1 else -1
        return cls(u, restricted)


class GaugedSign:
    def __init__(self, base, u: GaugeMap):
        self.base = base
        self.u = u
        self.n = base.n
        self.scope = base.scope

    def __call__(self, flow: FormalFlow) -> int:
        return self.u(flow.start) * self.base(flow) * self.u(end_generator(flow))


def apply_gauge(s, u: GaugeMap):
    """S^u(phi) = u(start) S(phi) u(end).  Tables map to tables."""
    if isinstance(s, SignTable):
        entries = {f: u(f.start) * v * u(end_generator(f)) for f, v in s.entries.items()}
        return SignTable(s.n, s.scope, entries, s.gauge_id + "+gauge")
    if isinstance(s, GaugedSign) and s.u is u:
        return s.base
    return GaugedSign(s, u)


def scope_flows(n: int, scope: str) -> list[FormalFlow]:
    if scope == "all_flows":
        bigons, rects = enumerate_flows(n)
        return [*bigons, *rects]
    if scope == "bigons":
        return enumerate_flows(n)[0]
    if scope == "profile1_rectangles":
        return relations.profile1_rectangles(n)
    raise ScopeMismatch(f"unknown scope {scope!r}")


def find_gauge(s1, s2, flows: Sequence[FormalFlow] | None = None) -> GaugeMap:
    """A gauge u with s2 = s1^u on ``flows``; raises NotEquivalent otherwise."""
    if s1.n != s2.n or (s1.scope != s2.scope and "all_flows" not in (s1.scope, s2.scope)):
        raise ScopeMismatch(f"cannot compare {s1.scope}/{s1.n} with {s2.scope}/{s2.n}")
    if flows is None:
        scope = s1.scope if s1.scope != "all_flows" else s2.scope
        flows = scope_flows(s1.n, scope)
    by_start: dict = {}
    for f in flows:
        by_start.setdefault(f.start, []).append(f)
    nodes = sorted({f.start for f in flows} | {end_generator(f) for f in flows},
                   key=generator_sort_key)
    u: dict = {}
    for root in nodes:
        if root in u:
            continue
        u[root] = 1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for f in by_start.get(x, ()):
                y = end_generator(f)
                if y not in u:
                    u[y] = s1(f) * s2(f) * u[x]
                    queue.append(y)
    for f in flows:
        if u[f.start] * s1(f) * u[end_generator(f)] != s2(f):
            raise NotEquivalent(f"gauge check fails on {flow_key(f)}")
    return GaugeMap(u, restricted=_is_restricted(u))


def _is_restricted(u: dict) -> bool:
    seen: dict = {}
    for x, v in u.items():
        if seen.setdefault(x.sigma, v) != v:
            return False
    return True


def m_value(x: FormalGenerator) -> int:
    return sign_of_permutation(x.sigma) * math.prod(x.epsilon)


class TwistedSign:
    """S'(phi) = S(phi) m(start(phi)) with m = sgn(sigma) prod(epsilon)."""

    def __init__(self, base):
        if base.scope != "all_flows":
            raise ScopeMismatch("the twist needs a sign on all flows")
        self.base = base
        self.n = base.n
        self.scope = base.scope

    def __call__(self, flow: FormalFlow) -> int:
        return self.base(flow) * m_value(flow.start)


def m_twist(s) -> TwistedSign:
    return TwistedSign(s)


class RestrictedSign:
    """Power-n signs read off a power-(n+1) assignment with coordinate n+1 fixed."""

    def __init__(self, base, fixed_epsilon: int):
        self.base = base
        self.fixed_epsilon = fixed_epsilon
        self.n = base.n - 1
        self.scope = base.scope

    def embed(self, flow: FormalFlow) -> FormalFlow:
        x = flow.start
        start = FormalGenerator(x.sigma + (x.n + 1,), x.epsilon + (self.fixed_epsilon,))
        return flow._replace(start=start)

    def __call__(self, flow: FormalFlow) -> int:
        if flow.n != self.n:
            raise PowerMismatch(f"flow power {flow.n}, expected {self.n}")
        return self.base(self.embed(flow))


def restrict(ev, fixed_epsilon: int) -> RestrictedSign:
    return RestrictedSign(ev, fixed_epsilon)


# verification

@dataclass
class VerificationReport:
    n: int
    swapped: bool
    counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    sampled: bool = False
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"n": self.n, "swapped": self.swapped, "sampled": self.sampled,
                "seed": self.seed, "counts": self.counts, "violations": self.violations,
                "ok": self.ok}

    def text(self) -> str:
        lines = [f"power {self.n}" + (" (alpha/beta swapped)" if self.swapped else "")]
        for fam, c in self.counts.items():
            bad = sum(1 for v in self.violations if v["family"] == fam)
            lines.append(f"  {fam}: {c} instances, {bad} violations")
        lines.append("OK" if self.ok else f"FAILED: {len(self.violations)} violations")
        return "\n".join(lines)


def expected_product(rel: relations.RelationInstance, swapped: bool = False) -> int:
    if rel.kind == "square":
        return -1
    alpha = rel.kind == "alpha_degeneration"
    if swapped:
        alpha = not alpha
    return 1 if alpha else -1


def verify(s, n: int, families: Iterable[str] = relations.FAMILIES,
           sample: int | None = None, seed: int = 0, swapped: bool = False,
           max_report: int = 20) -> VerificationReport:
    """Check every relation instance (or ``sample`` seeded random ones per family)."""
    if s.n != n:
        raise ScopeMismatch(f"sign source has power {s.n}, asked to verify power {n}")
    report = VerificationReport(n, swapped, sampled=sample is not None,
                                seed=seed if sample is not None else None)
    rng = random.Random(seed)
    for family in families:
        if sample is None:
            flows = scope_flows(n, "all_flows") if family == "degenerations" else None
            stream = relations.instances(n, family, flows)
        else:
            stream = sample_instances(n, family, sample, rng)
        count = 0
        for rel in stream:
            count += 1
            prod = math.prod(s(f) for f in rel.flows)
            if prod != expected_product(rel, swapped):
                report.violations.append({
                    "family": family, "kind": rel.kind,
                    "flows": [flow_key(f) for f in rel.flows],
                    "signs": [s(f) for f in rel.flows], "product": prod})
                if len(report.violations) >= max_report:
                    break
        report.counts[family] = count
    return report


# three-piece cuts of rectangles with generator points inside

DECOMPOSITIONS = {
    "BL_right_TL": ((0, 1), (0, 2), (1, 2)),
    "BL_top_BR": ((0, 1), (1, 2), (0, 1)),
    "TR_left_BR": ((1, 2), (0, 2), (0, 1)),
    "TR_bottom_TL": ((1, 2), (0, 1), (1, 2)),
}
# The two decompositions whose products equal the sign of the whole
# rectangle; found by calibration against the solved table.
CONVENTIONAL = ("BL_right_TL", "TR_left_BR")


def three_piece_products(table: SignTable, x: tuple[int, ...], rect: torus.TorusRect,
                         point_row: int) -> dict[str, int]:
    """Sign products of the four ways to cut ``rect`` at the interior point on ``point_row``."""
    real = torus.Realization.default(len(x))
    rows = (rect.r1, point_row, rect.r2)
    out = {}
    for name, steps in DECOMPOSITIONS.items():
        state = x
        prod = 1
        for a, b in steps:
            piece = torus.TorusRect(rows[a], rows[b], state[rows[a]], state[rows[b]])
            prod *= table(torus.formal_rect(state, piece, real))
            state = torus.end_state(state, piece)
        if state != torus.end_state(x, rect):
            raise AssertionError(f"decomposition {name} does not end at the rectangle's end")
        out[name] = prod
    return out


def conventional_decomposition_check(table: SignTable) -> dict:
    """Count rectangles (and interior points) where the conventional decompositions
    reproduce the table value and the other two give its negative."""
    n = table.n
    real = torus.Realization.default(n)
    stats = {"rectangles": 0, "points": 0, "conventional_ok": 0, "pattern_ok": 0,
             "multi_point_rectangles": 0, "failures": []}
    for x in itertools.permutations(range(n)):
        for rect in torus.rects_from(x):
            pts = torus.interior_points(x, rect)
            if not pts:
                continue
            stats["rectangles"] += 1
            if len(pts) > 1:
                stats["multi_point_rectangles"] += 1
            value = table(torus.formal_rect(x, rect, real))
            for _, row in pts:
                stats["points"] += 1
                prods = three_piece_products(table, x, rect, row)
                conv = all(prods[k] == value for k in CONVENTIONAL)
                others = all(v == -value for k, v in prods.items() if k not in CONVENTIONAL)
                stats["conventional_ok"] += conv
                stats["pattern_ok"] += conv and others
                if not conv and len(stats["failures"]) < 10:
                    stats["failures"].append((x, tuple(rect), row, prods, value))
    return stats
