"""Signed differential of a grid diagram and its homology over the integers.

Three independent rank computations are kept apart on purpose:
``smith_normal_form`` (integers, gives torsion), ``rational_rank``
(fraction-free elimination) and ``f2_homology_dim`` (sign-free counting
mod 2, built straight from the diagram without any sign assignment).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from . import diagram as dg
from . import gf2
from .errors import DifferentialNotSquareZero, PowerMismatch


@dataclass
class SparseIntMatrix:
    rows: int
    cols: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    def add(self, r: int, c: int, v: int) -> None:
        nv = self.entries.get((r, c), 0) + v
        if nv:
            self.entries[(r, c)] = nv
        else:
            self.entries.pop((r, c), None)

    def columns(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        mine = self.columns()
        out = SparseIntMatrix(self.rows, other.cols)
        for (k, c), v in other.entries.items():
            for r, w in mine[k].items():
                out.add(r, c, w * v)
        return out

    def is_zero(self) -> bool:
        return not self.entries

    @classmethod
    def from_dense(cls, rows: list[list[int]]) -> "SparseIntMatrix":
        m = cls(len(rows), len(rows[0]) if rows else 0)
        for r, row in enumerate(rows):
            for c, v in enumerate(row):
                if v:
                    m.entries[(r, c)] = v
        return m

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def to_triplets(self) -> str:
        lines = [f"{self.rows} {self.cols} {len(self.entries)}"]
        for (r, c), v in sorted(self.entries.items()):
            lines.append(f"{r} {c} {v}")
        return "\n".join(lines) + "\n"


@dataclass
class ChainComplexZ:
    basis: list
    d: SparseIntMatrix
    # per column: (row, sign, diagram flow)
    terms: list[list[tuple[int, int, object]]]


def chain_complex(d: dg.GridDiagram, ev) -> ChainComplexZ:
    if ev.n != d.power:
        raise PowerMismatch(f"evaluator power {ev.n}, diagram needs {d.power}")
    basis = dg.generators(d)
    index = {x: k for k, x in enumerate(basis)}
    mask = d.blocked_mask()
    mat = SparseIntMatrix(len(basis), len(basis))
    terms = []
    for c, x in enumerate(basis):
        col = []
        for flow, y in dg.flows_from(d, x, mask):
            s = ev(dg.to_formal(d, flow, x))
            r = index[y]
            mat.add(r, c, s)
            col.append((r, s, flow))
        terms.append(col)
    return ChainComplexZ(basis, mat, terms)


def differential(d: dg.GridDiagram, ev) -> SparseIntMatrix:
    """Entry (y, x) is the signed count of empty flows from x to y."""
    return chain_complex(d, ev).d


def d_squared_is_zero(d: dg.GridDiagram, ev, cx: ChainComplexZ | None = None
                      ) -> tuple[bool, dict | None]:
    """Check d∘d = 0; on failure report (x, z) with the signed flow pairs."""
    cx = cx or chain_complex(d, ev)
    for c, col in enumerate(cx.terms):
        acc: dict[int, int] = {}
        for r, s, _ in col:
            for r2, s2, _ in cx.terms[r]:
                acc[r2] = acc.get(r2, 0) + s * s2
        for z, v in sorted(acc.items()):
            if v:
                paths = [(f1, cx.basis[r], f2, s * s2)
                         for r, s, f1 in col for r2, s2, f2 in cx.terms[r] if r2 == z]
                return False, {"x": cx.basis[c], "z": cx.basis[z], "coefficient": v,
                               "paths": paths}
    return True, None


def _chain_normalize(diag: list[int]) -> list[int]:
    """Turn a list of nonzero diagonal entries into invariant factors."""
    vals = sorted(abs(v) for v in diag)
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a // g * b
                    changed = True
        vals.sort()
    return vals


def _dense_snf(mat: list[list[int]]) -> list[int]:
    """Diagonal of a dense Smith form; pivot = least |value|, then (row, col)."""
    a = [row[:] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ai, at = a[i], a[t]
                        for k in range(t, n):
                            ai[k] -= q * at[k]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a[t:]:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        dirty = True
            if dirty:
                # a smaller remainder exists in row or column t; make it the pivot
                best = None
                for i in range(t, m):
                    v = a[i][t]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, "r")
                for j in range(t, n):
                    v = a[t][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), j, "c")
                _, k, kind = best
                if kind == "r":
                    a[t], a[k] = a[k], a[t]
                else:
                    for row in a:
                        row[t], row[k] = row[k], row[t]
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            # fold the offending row into row t and reduce again
            i = bad[0]
            for k in range(t, n):
                a[t][k] += a[i][k]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def smith_normal_form(m: SparseIntMatrix) -> tuple[list[int], int]:
    """Invariant factors (with multiplicity, each dividing the next) and rank.

    Unit pivots are eliminated sparsely first, choosing the pivot with the
    smallest fill estimate; the remaining block is reduced densely.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (r, c), v in m.entries.items():
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)
    heap = [((len(rows[r]) - 1) * (len(cols[c]) - 1), r, c)
            for (r, c), v in m.entries.items() if abs(v) == 1]
    heapq.heapify(heap)
    units = 0
    while heap:
        cost, r, c = heapq.heappop(heap)
        prow = rows.get(r)
        if prow is None or abs(prow.get(c, 0)) != 1:
            continue
        now = (len(prow) - 1) * (len(cols[c]) - 1)
        if now > cost:
            heapq.heappush(heap, (now, r, c))
            continue
        del rows[r]
        pv = prow.pop(c)
        for c2 in prow:
            cols[c2].discard(r)
        others = cols.pop(c)
        others.discard(r)
        for k in sorted(others):
            krow = rows[k]
            f = krow.pop(c) * pv
            for c2, v in prow.items():
                nv = krow.get(c2, 0) - f * v
                if nv:
                    if c2 not in krow:
                        cols[c2].add(k)
                    krow[c2] = nv
                    if abs(nv) == 1:
                        heapq.heappush(heap, ((len(krow) - 1) * (len(cols[c2]) - 1), k, c2))
                elif c2 in krow:
                    del krow[c2]
                    cols[c2].discard(k)
            if not krow:
                del rows[k]
        units += 1
    rest_rows = sorted(rows)
    rest_cols = sorted({c for row in rows.values() for c in row})
    cpos = {c: j for j, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for i, r in enumerate(rest_rows):
        for c, v in rows[r].items():
            dense[i][cpos[c]] = v
    factors = [1] * units + (_chain_normalize(_dense_snf(dense)) if dense else [])
    factors = _chain_normalize(factors)
    return factors, len(factors)


def rational_rank(m: SparseIntMatrix) -> int:
    """Rank over Q by fraction-free row elimination (rows kept primitive)."""
    by_row: dict[int, dict[int, int]] = {}
    for (r, c), v in m.entries.items():
        by_row.setdefault(r, {})[c] = v
    pivots: dict[int, dict[int, int]] = {}
    for r in sorted(by_row):
        row = dict(by_row[r])
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                pivots[c] = row
                break
            a, p = row[c], prow[c]
            new = {k: p * v for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - a * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            g = 0
            for v in new.values():
                g = math.gcd(g, v)
            row = {k: v // g for k, v in new.items()} if g > 1 else new
    return len(pivots)


def f2_rank(m: SparseIntMatrix) -> int:
    cols: dict[int, list[int]] = {}
    for (r, c), v in m.entries.items():
        if v % 2:
            cols.setdefault(c, []).append(r)
    return gf2.rank(cols.values())


def f2_differential(d: dg.GridDiagram) -> SparseIntMatrix:
    """Sign-free differential mod 2, counted directly from the diagram."""
    basis = dg.generators(d)
    index = {x: k for k, x in enumerate(basis)}
    mask = d.blocked_mask()
    mat = SparseIntMatrix(len(basis), len(basis))
    for c, x in enumerate(basis):
        for _, y in dg.flows_from(d, x, mask):
            r = index[y]
            if mat.entries.pop((r, c), 0) == 0:
                mat.entries[(r, c)] = 1
    return mat


def f2_homology_dim(d: dg.GridDiagram) -> int:
    mat = f2_differential(d)
    return mat.rows - 2 * f2_rank(mat)


@dataclass
class HomologyResult:
    betti: int
    torsion: list[int]
    f2_dim: int
    q_rank: int

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion),
                "f2_dim": self.f2_dim, "q_rank": self.q_rank}


def homology(d: dg.GridDiagram, ev) -> HomologyResult:
    cx = chain_complex(d, ev)
    ok, witness = d_squared_is_zero(d, ev, cx)
    if not ok:
        raise DifferentialNotSquareZero(f"d^2 != 0 at {witness['x']} -> {witness['z']}")
    factors, rank = smith_normal_form(cx.d)
    size = len(cx.basis)
    betti = size - 2 * rank
    q_rank = size - 2 * rational_rank(cx.d)
    return HomologyResult(betti, [f for f in factors if f > 1], f2_homology_dim(d), q_rank)
