"""Formal generators, bigons and rectangles.

A generator of power n is a permutation ``sigma`` (alpha index -> beta index)
together with a sign profile ``epsilon`` indexed by alpha index.  Indices are
1-based throughout and tuples store ``sigma[k - 1] = sigma(k)``.

Bigons are encoded in a local model with the alpha arc below the beta arc;
bit +1 means the arc points left to right.  Rectangles have the two alpha
sides horizontal with the lower moving index on the bottom; horizontal bits
+1 point right, vertical bits +1 point up.  Start corners are bottom-left and
top-right and a corner sign is the product of its two adjacent side bits.
"""

from __future__ import annotations

import itertools
import json
import os
from typing import NamedTuple, Union

from .errors import InvalidFlow, MovingCoordinate, PowerTooLarge

DEFAULT_MAX_N = 8
EDGES = ("bottom", "top", "left", "right")


def max_power() -> int:
    """Enumeration bound, overridable through ``HFSIGN_MAX_N``."""
    raw = os.environ.get("HFSIGN_MAX_N")
    return int(raw) if raw else DEFAULT_MAX_N


def check_power(n: int, bound: int | None = None) -> None:
    if n < 1:
        raise ValueError(f"power must be positive, got {n}")
    limit = max_power() if bound is None else bound
    if n > limit:
        raise PowerTooLarge(f"power {n} exceeds enumeration bound {limit}")


class FormalGenerator(NamedTuple):
    sigma: tuple[int, ...]
    epsilon: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.sigma)


class FormalBigon(NamedTuple):
    start: FormalGenerator
    i: int
    o_alpha: int
    o_beta: int

    @property
    def n(self) -> int:
        return len(self.start.sigma)

    @property
    def coords(self) -> tuple[int, ...]:
        return (self.i,)


class FormalRectangle(NamedTuple):
    start: FormalGenerator
    i: int
    j: int
    o_bottom: int
    o_top: int
    o_left: int
    o_right: int

    @property
    def n(self) -> int:
        return len(self.start.sigma)

    @property
    def coords(self) -> tuple[int, ...]:
        return (self.i, self.j)

    @property
    def bits(self) -> tuple[int, int, int, int]:
        return (self.o_bottom, self.o_top, self.o_left, self.o_right)


FormalFlow = Union[FormalBigon, FormalRectangle]


def identity(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def all_plus(sigma: tuple[int, ...]) -> FormalGenerator:
    return FormalGenerator(tuple(sigma), (1,) * len(sigma))


def enumerate_generators(n: int) -> list[FormalGenerator]:
    """All n!·2^n generators, lexicographic with +1 before -1."""
    check_power(n)
    out = []
    for sigma in itertools.permutations(range(1, n + 1)):
        for eps in itertools.product((1, -1), repeat=n):
            out.append(FormalGenerator(sigma, eps))
    return out


def bigons_from(x: FormalGenerator) -> list[FormalBigon]:
    out = []
    for i in range(1, x.n + 1):
        e = x.epsilon[i - 1]
        for oa in (1, -1):
            out.append(FormalBigon(x, i, oa, e * oa))
    return out


def rectangles_from(x: FormalGenerator) -> list[FormalRectangle]:
    out = []
    n = x.n
    for i in range(1, n + 1):
        ei = x.epsilon[i - 1]
        for j in range(i + 1, n + 1):
            ej = x.epsilon[j - 1]
            for ob in (1, -1):
                for ot in (1, -1):
                    out.append(FormalRectangle(x, i, j, ob, ot, ei * ob, ej * ot))
    return out


def flows_from(x: FormalGenerator) -> list[FormalFlow]:
    return [*bigons_from(x), *rectangles_from(x)]


def enumerate_flows(n: int) -> tuple[list[FormalBigon], list[FormalRectangle]]:
    bigons: list[FormalBigon] = []
    rects: list[FormalRectangle] = []
    for x in enumerate_generators(n):
        bigons.extend(bigons_from(x))
        rects.extend(rectangles_from(x))
    return bigons, rects


def _pm(v: object) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v in (1, -1)


def validate_generator(x: object) -> bool:
    if not isinstance(x, FormalGenerator):
        return False
    n = len(x.sigma)
    if n < 1 or len(x.epsilon) != n:
        return False
    if sorted(x.sigma) != list(range(1, n + 1)):
        return False
    return all(_pm(e) for e in x.epsilon)


def validate_flow(flow: object) -> bool:
    """True iff the flow satisfies its index and corner-sign invariants."""
    if isinstance(flow, FormalBigon):
        x = flow.start
        if not validate_generator(x) or not (_pm(flow.o_alpha) and _pm(flow.o_beta)):
            return False
        if not (isinstance(flow.i, int) and 1 <= flow.i <= x.n):
            return False
        return x.epsilon[flow.i - 1] == flow.o_alpha * flow.o_beta
    if isinstance(flow, FormalRectangle):
        x = flow.start
        if not validate_generator(x) or not all(_pm(b) for b in flow.bits):
            return False
        i, j = flow.i, flow.j
        if not (isinstance(i, int) and isinstance(j, int) and 1 <= i < j <= x.n):
            return False
        return (x.epsilon[i - 1] == flow.o_bottom * flow.o_left
                and x.epsilon[j - 1] == flow.o_top * flow.o_right)
    return False


def _require(flow: object) -> None:
    if not validate_flow(flow):
        raise InvalidFlow(f"invalid flow: {flow!r}")


def end_generator(flow: FormalFlow) -> FormalGenerator:
    x = flow.start
    eps = list(x.epsilon)
    if isinstance(flow, FormalBigon):
        eps[flow.i - 1] = -eps[flow.i - 1]
        return FormalGenerator(x.sigma, tuple(eps))
    i, j = flow.i - 1, flow.j - 1
    sigma = list(x.sigma)
    sigma[i], sigma[j] = sigma[j], sigma[i]
    eps[i] = flow.o_bottom * flow.o_right
    eps[j] = flow.o_top * flow.o_left
    return FormalGenerator(tuple(sigma), tuple(eps))


def flow_endpoints(flow: FormalFlow) -> tuple[FormalGenerator, FormalGenerator]:
    _require(flow)
    return flow.start, end_generator(flow)


def companion(flow: FormalFlow, kind: str) -> FormalFlow:
    """The flow closing ``flow`` into a boundary degeneration of ``kind``."""
    _require(flow)
    if kind not in ("alpha", "beta"):
        raise ValueError(f"kind must be 'alpha' or 'beta', got {kind!r}")
    y = end_generator(flow)
    if isinstance(flow, FormalBigon):
        if kind == "alpha":
            return FormalBigon(y, flow.i, flow.o_alpha, -flow.o_beta)
        return FormalBigon(y, flow.i, -flow.o_alpha, flow.o_beta)
    b, t, l, r = flow.bits
    if kind == "alpha":
        return FormalRectangle(y, flow.i, flow.j, b, t, r, l)
    return FormalRectangle(y, flow.i, flow.j, -b, -t, -r, -l)


def _with_eps(x: FormalGenerator, k: int, value: int) -> FormalGenerator:
    eps = list(x.epsilon)
    eps[k - 1] = value
    return FormalGenerator(x.sigma, tuple(eps))


def reverse_edge(rect: FormalRectangle, edge: str) -> FormalRectangle:
    """Negate one side's bit, fixing the start sign at the adjacent start corner."""
    _require(rect)
    return _reverse_edge(rect, edge)


def _reverse_edge(rect: FormalRectangle, edge: str) -> FormalRectangle:
    b, t, l, r = rect.bits
    x = rect.start
    if edge == "bottom":
        b = -b
        x = _with_eps(x, rect.i, b * l)
    elif edge == "top":
        t = -t
        x = _with_eps(x, rect.j, t * r)
    elif edge == "left":
        l = -l
        x = _with_eps(x, rect.i, b * l)
    elif edge == "right":
        r = -r
        x = _with_eps(x, rect.j, t * r)
    else:
        raise ValueError(f"unknown edge {edge!r}")
    return FormalRectangle(x, rect.i, rect.j, b, t, l, r)


def simple_flip(rect: FormalRectangle, p: int) -> FormalRectangle:
    """Negate the sign at the non-moving coordinate ``p`` on both endpoints."""
    _require(rect)
    if p in (rect.i, rect.j):
        raise MovingCoordinate(f"coordinate {p} moves in {rect!r}")
    if not 1 <= p <= rect.n:
        raise ValueError(f"coordinate {p} out of range")
    return _simple_flip(rect, p)


def _simple_flip(rect: FormalRectangle, p: int) -> FormalRectangle:
    x = _with_eps(rect.start, p, -rect.start.epsilon[p - 1])
    return rect._replace(start=x)


def drawn_rectangle(start: FormalGenerator, a: int, b: int,
                    h_a: int, h_b: int, v_l: int, v_r: int) -> FormalRectangle:
    """Normalize a rectangle drawn with alpha_a at the bottom and alpha_b on top.

    ``h_*`` are the rightward bits of the horizontal sides and ``v_*`` the
    upward bits of the vertical sides, in the drawn frame.
    """
    if a < b:
        return FormalRectangle(start, a, b, h_a, h_b, v_l, v_r)
    return FormalRectangle(start, b, a, -h_b, -h_a, -v_r, -v_l)


def drawn_frame(rect: FormalRectangle, bottom: int) -> tuple[int, int, int, int]:
    """Bits (h_bottom, h_top, v_left, v_right) seen with alpha ``bottom`` below."""
    b, t, l, r = rect.bits
    if bottom == rect.i:
        return (b, t, l, r)
    if bottom == rect.j:
        return (-t, -b, -r, -l)
    raise ValueError(f"{bottom} is not a moving coordinate")


def relabel_generator(x: FormalGenerator, alpha_perm, beta_perm) -> FormalGenerator:
    """Rename alpha_k as alpha_{alpha_perm(k)} and beta_l as beta_{beta_perm(l)}."""
    n = x.n
    sigma = [0] * n
    eps = [0] * n
    for k in range(n):
        pk = alpha_perm[k] - 1
        sigma[pk] = beta_perm[x.sigma[k] - 1]
        eps[pk] = x.epsilon[k]
    return FormalGenerator(tuple(sigma), tuple(eps))


def relabel_flow(flow: FormalFlow, alpha_perm, beta_perm) -> FormalFlow:
    x = relabel_generator(flow.start, alpha_perm, beta_perm)
    if isinstance(flow, FormalBigon):
        return FormalBigon(x, alpha_perm[flow.i - 1], flow.o_alpha, flow.o_beta)
    b, t, l, r = flow.bits
    return drawn_rectangle(x, alpha_perm[flow.i - 1], alpha_perm[flow.j - 1], b, t, l, r)


def reorient_generator(x: FormalGenerator, alpha_flip, beta_flip) -> FormalGenerator:
    """Reverse the curves whose entries in the flip vectors are -1."""
    eps = tuple(e * alpha_flip[k] * beta_flip[x.sigma[k] - 1]
                for k, e in enumerate(x.epsilon))
    return FormalGenerator(x.sigma, eps)


def reorient_flow(flow: FormalFlow, alpha_flip, beta_flip) -> FormalFlow:
    x = flow.start
    y = reorient_generator(x, alpha_flip, beta_flip)
    if isinstance(flow, FormalBigon):
        return FormalBigon(y, flow.i, flow.o_alpha * alpha_flip[flow.i - 1],
                           flow.o_beta * beta_flip[x.sigma[flow.i - 1] - 1])
    i, j = flow.i, flow.j
    return FormalRectangle(
        y, i, j,
        flow.o_bottom * alpha_flip[i - 1],
        flow.o_top * alpha_flip[j - 1],
        flow.o_left * beta_flip[x.sigma[i - 1] - 1],
        flow.o_right * beta_flip[x.sigma[j - 1] - 1],
    )


def _gen_key(x: FormalGenerator) -> tuple:
    return (x.sigma, tuple(-e for e in x.epsilon))


def flow_sort_key(flow: FormalFlow) -> tuple:
    """Lexicographic on (sigma, epsilon, coords, bits) with +1 before -1."""
    if isinstance(flow, FormalBigon):
        return (_gen_key(flow.start), 0, (flow.i,), (-flow.o_alpha, -flow.o_beta))
    return (_gen_key(flow.start), 1, (flow.i, flow.j), tuple(-b for b in flow.bits))


def generator_sort_key(x: FormalGenerator) -> tuple:
    return _gen_key(x)


def sign_of_permutation(sigma) -> int:
    seen = [False] * len(sigma)
    sign = 1
    for k in range(len(sigma)):
        if seen[k]:
            continue
        length = 0
        m = k
        while not seen[m]:
            seen[m] = True
            m = sigma[m] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# JSON codecs

def generator_to_json(x: FormalGenerator) -> dict:
    return {"sigma": list(x.sigma), "epsilon": list(x.epsilon)}


def generator_from_json(data: dict) -> FormalGenerator:
    try:
        x = FormalGenerator(tuple(int(v) for v in data["sigma"]),
                            tuple(int(v) for v in data["epsilon"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidFlow(f"malformed generator: {data!r}") from exc
    if not validate_generator(x):
        raise InvalidFlow(f"invalid generator: {data!r}")
    return x


def flow_to_json(flow: FormalFlow) -> dict:
    if isinstance(flow, FormalBigon):
        return {"kind": "bigon", "start": generator_to_json(flow.start), "i": flow.i,
                "o_alpha": flow.o_alpha, "o_beta": flow.o_beta}
    return {"kind": "rect", "start": generator_to_json(flow.start), "i": flow.i,
            "j": flow.j, "o": list(flow.bits)}


def flow_from_json(data: dict) -> FormalFlow:
    try:
        start = generator_from_json(data["start"])
        if data["kind"] == "bigon":
            flow = FormalBigon(start, int(data["i"]), int(data["o_alpha"]), int(data["o_beta"]))
        elif data["kind"] == "rect":
            b, t, l, r = (int(v) for v in data["o"])
            flow = FormalRectangle(start, int(data["i"]), int(data["j"]), b, t, l, r)
        else:
            raise InvalidFlow(f"unknown flow kind {data['kind']!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidFlow(f"malformed flow: {data!r}") from exc
    _require(flow)
    return flow


def flow_key(flow: FormalFlow) -> str:
    """Canonical string encoding, reversible through ``flow_from_key``."""
    return json.dumps(flow_to_json(flow), separators=(",", ":"), sort_keys=True)


def flow_from_key(key: str) -> FormalFlow:
    return flow_from_json(json.loads(key))
