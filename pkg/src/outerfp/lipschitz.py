"""Stretching factors, displacement on a simplex and simplicial paths.

Lengths are linear in the edge lengths: a hyperbolic ``g`` has
``l(g) = n_g . x`` where ``n_g`` counts the edges of its cyclically reduced
loop, and its twisted length is ``m_g . x`` with ``m_g`` the count for
``(g)alpha``.  The right stretching factor at ``x`` is the maximum of
``(m . x) / (n . x)`` over a finite candidate set of loops.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from . import fourier_motzkin
from .bass_serre import crossing_vector, is_elliptic, path_syllables
from .graphs import GraphOfGroups, fraction_str, to_fraction
from .groups import FiniteGroup
from .words import Word, conjugacy_canonical, enumerate_words, format_word, reduce

EPSILON = Fraction(1, 1000)

SIMPLE, FIGURE_EIGHT, BARBELL, DUMBBELL = "simple", "figure-eight", "barbell", "dumbbell"


class MetricError(ValueError):
    pass


class MalformedPath(ValueError):
    pass


# -- simplex coordinates --------------------------------------------------

@dataclass(frozen=True)
class SimplexCoords:
    """Edge lengths on the covolume-1 open simplex of a fixed graph."""

    edges: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.values):
            raise MetricError("edges and values differ in length")
        vals = tuple(to_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(v <= 0 for v in vals):
            raise MetricError("simplex coordinates must be positive")
        if sum(vals) != 1:
            raise MetricError(f"simplex coordinates sum to {sum(vals)}, not 1")

    @classmethod
    def of(cls, X: GraphOfGroups, values: Sequence) -> "SimplexCoords":
        return cls(X.unoriented, tuple(to_fraction(v) for v in values))

    @classmethod
    def barycenter(cls, X: GraphOfGroups) -> "SimplexCoords":
        n = len(X.unoriented)
        return cls(X.unoriented, (Fraction(1, n),) * n)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.edges, self.values))

    def strings(self) -> list[str]:
        return [fraction_str(v) for v in self.values]


def metric_vector(X: GraphOfGroups, x=None) -> tuple[Fraction, ...]:
    """Edge lengths in the order of ``X.unoriented``: from ``x`` (coords, a
    mapping or a sequence) or from ``X`` itself."""
    if x is None:
        vec = tuple(X.lengths[e] for e in X.unoriented)
    elif isinstance(x, SimplexCoords):
        d = x.as_dict()
        vec = tuple(d[e] for e in X.unoriented)
    elif isinstance(x, Mapping):
        vec = tuple(to_fraction(x[e]) for e in X.unoriented)
    else:
        vec = tuple(to_fraction(v) for v in x)
    if len(vec) != len(X.unoriented):
        raise MetricError(f"metric has {len(vec)} entries for {len(X.unoriented)} edges")
    if any(v <= 0 for v in vec):
        raise MetricError("edge lengths must be positive")
    return vec


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((p * q for p, q in zip(a, b)), Fraction(0))


def _crossings(u: Word, X: GraphOfGroups) -> tuple[int, ...]:
    cv = crossing_vector(u, X)
    return tuple(cv[e] for e in X.unoriented)


def word_order(w: Word) -> tuple[int, str]:
    """Deterministic tie-break: shorter first, then lexicographic."""
    return len(w), format_word(w)


# -- candidate loops ------------------------------------------------------

@dataclass(frozen=True)
class CandidateLoop:
    kind: str
    witness: Word
    crossing: tuple[int, ...]


def _simple_cycles(X: GraphOfGroups) -> list[tuple[str, ...]]:
    g = X.graph
    order = {v: i for i, v in enumerate(sorted(g.vertices))}
    seen: set[frozenset] = set()
    cycles = []

    def dfs(start, v, path, visited):
        for e in g.out_edges(v):
            w = g.terminal(e)
            if path and e == g.reverse[path[-1]]:
                continue
            if w == start:
                cyc = tuple(path + [e])
                key = frozenset(g.canonical(f) for f in cyc)
                if len(key) == len(cyc) and key not in seen:
                    seen.add(key)
                    cycles.append(cyc)
            elif order[w] > order[start] and w not in visited:
                visited.add(w)
                dfs(start, w, path + [e], visited)
                visited.discard(w)

    for s in sorted(g.vertices):
        dfs(s, s, [], {s})
    return cycles


def _cycle_vertices(X: GraphOfGroups, cyc: Sequence[str]) -> set[str]:
    return {X.graph.initial[e] for e in cyc}


def _rotate(X: GraphOfGroups, cyc: Sequence[str], v: str) -> tuple[str, ...]:
    for i, e in enumerate(cyc):
        if X.graph.initial[e] == v:
            return tuple(cyc[i:]) + tuple(cyc[:i])
    raise ValueError(f"{v} not on cycle")


def _reverse_path(X: GraphOfGroups, path: Sequence[str]) -> tuple[str, ...]:
    return tuple(X.graph.reverse[e] for e in reversed(path))


def _simple_paths(X: GraphOfGroups, a: str, targets: set[str], avoid: set[str]):
    """Vertex-simple paths with at least one edge from ``a`` to a target,
    whose interior avoids ``avoid`` and the targets."""
    g = X.graph

    def dfs(v, path, visited):
        for e in g.out_edges(v):
            w = g.terminal(e)
            if w in visited:
                continue
            if w in targets:
                yield tuple(path + [e])
            elif w not in avoid:
                visited.add(w)
                yield from dfs(w, path + [e], visited)
                visited.discard(w)

    yield from dfs(a, [], {a})


def _decoration_choices(X: GraphOfGroups, edges: Sequence[str]) -> list[list]:
    g = X.graph
    out = []
    n = len(edges)
    for i in range(n):
        v = g.initial[edges[i]]
        grp = X.groups[v]
        if grp is None:
            out.append([0])
        elif not isinstance(grp, FiniteGroup):
            raise ValueError(f"candidate loops need finite vertex groups (vertex {v})")
        elif edges[i] == g.reverse[edges[i - 1]]:
            out.append([grp.nonidentity()[0]])
        else:
            out.append(list(grp.elements()))
    return out


def _closed_paths(X: GraphOfGroups):
    """Yield ``(kind, edge sequence)`` for the four candidate shapes."""
    g = X.graph
    cycles = _simple_cycles(X)
    both = [(c, _reverse_path(X, c)) for c in cycles]
    for c in cycles:
        yield SIMPLE, c
    for (i, c1), (j, c2) in itertools.combinations(enumerate(cycles), 2):
        v1, v2 = _cycle_vertices(X, c1), _cycle_vertices(X, c2)
        e1 = {g.canonical(e) for e in c1}
        e2 = {g.canonical(e) for e in c2}
        if e1 & e2:
            continue
        common = v1 & v2
        if len(common) == 1:
            (v,) = common
            for c2o in both[j]:
                yield FIGURE_EIGHT, _rotate(X, c1, v) + _rotate(X, c2o, v)
        elif not common:
            for x in sorted(v1):
                for p in _simple_paths(X, x, v2, v1):
                    y = g.terminal(p[-1])
                    for c2o in both[j]:
                        yield BARBELL, _rotate(X, c1, x) + p + _rotate(X, c2o, y) + _reverse_path(X, p)
    nonfree = X.nonfree_vertices()
    for u, v in itertools.combinations(nonfree, 2):
        for p in _simple_paths(X, u, {v}, set()):
            yield DUMBBELL, p + _reverse_path(X, p)
    for u in nonfree:
        for j, c in enumerate(cycles):
            vc = _cycle_vertices(X, c)
            if u in vc:
                continue
            for p in _simple_paths(X, u, vc, set()):
                y = g.terminal(p[-1])
                for co in both[j]:
                    yield DUMBBELL, p + _rotate(X, co, y) + _reverse_path(X, p)


def enumerate_candidates(X: GraphOfGroups) -> list[CandidateLoop]:
    """Simple loops, figure-eights, barbells and dumbbells with elliptic ends,
    decorated in every way at non-free pass-through vertices, one per
    conjugacy class."""
    g = X.graph
    found: dict[str, CandidateLoop] = {}
    for kind, edges in _closed_paths(X):
        start = g.initial[edges[0]]
        for decos in itertools.product(*_decoration_choices(X, edges)):
            w = reduce(path_syllables(start, tuple(decos) + (0,), edges, X), X)
            if not w.syllables or is_elliptic(w, X):
                continue
            canon = conjugacy_canonical(w, X)
            key = format_word(canon)
            if key not in found:
                found[key] = CandidateLoop(kind, canon, _crossings(canon, X))
    return sorted(found.values(), key=lambda c: word_order(c.witness))


# -- stretching factors ---------------------------------------------------

@dataclass(frozen=True)
class RatioTable:
    """Pairs ``(n, m, witness)``: crossing counts of ``g`` and of ``(g)alpha``."""

    rows: tuple[tuple[tuple[int, ...], tuple[int, ...], Word], ...]

    @classmethod
    def build(cls, spec, X: GraphOfGroups, words: Iterable[Word]) -> "RatioTable":
        best: dict[tuple, Word] = {}
        seen: set[Word] = set()
        for w in words:
            if not w.syllables or is_elliptic(w, X):
                continue
            w = conjugacy_canonical(w, X)
            if w in seen:
                continue
            seen.add(w)
            img = spec.apply(w)
            key = (_crossings(w, X), _crossings(img, X))
            cur = best.get(key)
            if cur is None or word_order(w) < word_order(cur):
                best[key] = w
        return cls(tuple((n, m, w) for (n, m), w in sorted(best.items(), key=lambda kv: word_order(kv[1]))))

    def maximum(self, x: Sequence[Fraction]) -> tuple[Fraction, Word]:
        best_val, best_w, best_key = None, None, None
        for n, m, w in self.rows:
            r = _dot(m, x) / _dot(n, x)
            k = word_order(w)
            if best_val is None or r > best_val or (r == best_val and k < best_key):
                best_val, best_w, best_key = r, w, k
        if best_val is None:
            raise ValueError("no hyperbolic elements: the tree is a point")
        return best_val, best_w

    def active(self, x: Sequence[Fraction], value: Fraction) -> list[Word]:
        return [w for n, m, w in self.rows if _dot(m, x) / _dot(n, x) == value]


@dataclass(frozen=True)
class StretchReport:
    lambdaR: Fraction
    lambdaL: Fraction
    witnessR: Word
    witnessL: Word

    @property
    def lambdaSym(self) -> Fraction:
        return self.lambdaR * self.lambdaL

    def to_json(self) -> dict:
        return {
            "lambdaR": fraction_str(self.lambdaR),
            "lambdaL": fraction_str(self.lambdaL),
            "lambdaSym": fraction_str(self.lambdaSym),
            "witnessR": format_word(self.witnessR),
            "witnessL": format_word(self.witnessL),
        }


class StretchOracle:
    """Ratio tables for ``alpha`` and its inverse over a fixed word set, so
    that many metrics can be evaluated cheaply."""

    def __init__(self, alpha, X: GraphOfGroups, words: Sequence[Word]):
        self.X = X
        self.right = RatioTable.build(alpha.forward, X, words)
        self.left = RatioTable.build(alpha.backward, X, words)

    @classmethod
    def candidates(cls, alpha, X: GraphOfGroups) -> "StretchOracle":
        return cls(alpha, X, [c.witness for c in enumerate_candidates(X)])

    @classmethod
    def brute_force(cls, alpha, X: GraphOfGroups, L: int) -> "StretchOracle":
        if L < 2:
            raise ValueError("word bound must be at least 2")
        return cls(alpha, X, list(enumerate_words(X, L, 1)))

    def lambda_r(self, x=None) -> Fraction:
        return self.right.maximum(metric_vector(self.X, x))[0]

    def report(self, x=None) -> StretchReport:
        vec = metric_vector(self.X, x)
        r, wr = self.right.maximum(vec)
        l, wl = self.left.maximum(vec)
        return StretchReport(r, l, wr, wl)


def stretch_factor(alpha, X: GraphOfGroups, x=None) -> StretchReport:
    return StretchOracle.candidates(alpha, X).report(x)


def brute_force_stretch(alpha, X: GraphOfGroups, x=None, L: int = 8) -> StretchReport:
    """Maximum ratio over every hyperbolic word of syllable length <= L; a
    lower bound for the true stretching factor."""
    return StretchOracle.brute_force(alpha, X, L).report(x)


@dataclass(frozen=True)
class FixedPointCertificate:
    fixed: bool
    report: StretchReport

    def __bool__(self):
        return self.fixed


def is_fixed_point(alpha, X: GraphOfGroups, x=None) -> FixedPointCertificate:
    rep = stretch_factor(alpha, X, x)
    return FixedPointCertificate(rep.lambdaR == 1 and rep.lambdaL == 1, rep)


# -- displacement ---------------------------------------------------------

@dataclass(frozen=True)
class DisplacementReport:
    value: Fraction
    bracket: tuple[Fraction, Fraction]
    exact: bool
    argmin: SimplexCoords
    witnesses: tuple[Word, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "displacement": fraction_str(self.value),
            "bracket": [fraction_str(self.bracket[0]), fraction_str(self.bracket[1])],
            "exact": self.exact,
            "argmin": self.argmin.strings(),
            "witnesses": [format_word(w) for w in self.witnesses],
        }


def _feasible(table: RatioTable, lam: Fraction, n: int, eps: Fraction, strict: bool):
    """A point of the open simplex with ``m.x <= lam n.x`` for every row (``<``
    if strict) and coordinates >= eps; ``None`` if there is none.

    The last coordinate is eliminated through ``sum x = 1``.
    """
    rows = []

    def add(full: Sequence[Fraction], rhs: Fraction, s: bool):
        # full . x <= rhs with x_last = 1 - sum(others)
        last = full[-1]
        rows.append((tuple(c - last for c in full[:-1]), rhs - last, s))

    for nv, mv, _ in table.rows:
        add([Fraction(m) - lam * k for m, k in zip(mv, nv)], Fraction(0), strict)
    for i in range(n):
        add([Fraction(-1) if j == i else Fraction(0) for j in range(n)], -eps, False)
    pt = fourier_motzkin.solve(rows, n - 1)
    if pt is None:
        return None
    return pt + (1 - sum(pt, Fraction(0)),)


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator in ``[lo, hi]``."""
    if lo > hi:
        lo, hi = hi, lo
    fl = lo.numerator // lo.denominator
    if Fraction(fl) == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # continued-fraction step on the fractional parts
    inner = _simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def displacement_on_simplex(
    alpha,
    X: GraphOfGroups,
    tolerance=Fraction(1, 10**6),
    eps: Fraction = EPSILON,
    oracle: StretchOracle | None = None,
) -> DisplacementReport:
    """Minimise the right stretching factor over the simplex of ``X``.

    Bisection on the value with exact feasibility tests; whenever a rational
    ``q`` is feasible with ``<=`` and infeasible with ``<`` the value is
    exactly ``q`` and the bracket collapses.
    """
    tolerance = to_fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = len(X.unoriented)
    if n == 0:
        raise MetricError("the graph has no edges")
    if eps * n >= 1:
        raise MetricError(f"coordinate floor {eps} is infeasible in dimension {n - 1}")
    oracle = oracle or StretchOracle.candidates(alpha, X)
    table = oracle.right
    bary = SimplexCoords.barycenter(X)

    def value_at(pt) -> Fraction:
        return table.maximum(pt)[0]

    def certify(q: Fraction):
        pt = _feasible(table, q, n, eps, False)
        if pt is None or _feasible(table, q, n, eps, True) is not None:
            return None
        return pt

    def finish(q: Fraction, pt, lo, hi, exact):
        if value_at(bary.values) == q:
            pt = bary.values
        coords = SimplexCoords(X.unoriented, tuple(pt))
        return DisplacementReport(q, (lo, hi), exact, coords, tuple(table.active(coords.values, q)))

    if n == 1:
        q = value_at((Fraction(1),))
        return finish(q, (Fraction(1),), q, q, True)

    pt = certify(Fraction(1))
    if pt is not None:
        return finish(Fraction(1), pt, Fraction(1), Fraction(1), True)

    best_pt = bary.values
    hi = value_at(best_pt) + 1
    lo = 1 - tolerance
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        pt = _feasible(table, mid, n, eps, False)
        if pt is None:
            lo = mid
        else:
            hi, best_pt = mid, pt
            hi = min(hi, value_at(pt))
    for q in (value_at(best_pt), _simplest_between(lo, hi)):
        if lo <= q <= hi:
            pt = certify(q)
            if pt is not None:
                return finish(q, pt, q, q, True)
    return finish(value_at(best_pt), best_pt, lo, hi, False)


# -- centres and simplicial paths -----------------------------------------

def is_simplex_center(x) -> bool:
    vals = x.values if isinstance(x, SimplexCoords) else tuple(to_fraction(v) for v in x)
    return len(set(vals)) <= 1


def grid_points(n: int, resolution: int) -> Iterable[tuple[Fraction, ...]]:
    """Points of the open (n-1)-simplex with coordinates in (1/resolution)Z."""
    def parts(total, k):
        if k == 1:
            yield (total,)
            return
        for first in range(1, total - k + 2):
            for rest in parts(total - first, k - 1):
                yield (first,) + rest

    for p in parts(resolution, n):
        yield tuple(Fraction(c, resolution) for c in p)


@dataclass(frozen=True)
class GridScan:
    resolution: int
    points: int
    minimum: Fraction
    minimizers: tuple[tuple[Fraction, ...], ...]
    off_center_min: Fraction | None

    @property
    def strict_off_center(self) -> bool:
        """Every sampled non-centre point has stretching factor > 1."""
        return self.off_center_min is None or self.off_center_min > 1


def grid_scan(alpha, X: GraphOfGroups, resolution: int, oracle: StretchOracle | None = None) -> GridScan:
    oracle = oracle or StretchOracle.candidates(alpha, X)
    n = len(X.unoriented)
    best, argbest, off, count = None, [], None, 0
    for pt in grid_points(n, resolution):
        count += 1
        v = oracle.right.maximum(pt)[0]
        if best is None or v < best:
            best, argbest = v, [pt]
        elif v == best:
            argbest.append(pt)
        if not is_simplex_center(pt) and (off is None or v < off):
            off = v
    return GridScan(resolution, count, best, tuple(argbest), off)


@dataclass(frozen=True)
class SimplicialPath:
    """Points ``(simplex id, coordinates)`` joined by straight segments."""

    points: tuple[tuple[Hashable, tuple[Fraction, ...]], ...]


@dataclass(frozen=True)
class SegmentReport:
    index: int
    center_params: str  # "none", "all" or a single parameter "t=p/q"
    has_noncenter: bool


@dataclass(frozen=True)
class PathReport:
    segments: tuple[SegmentReport, ...]

    @property
    def through_centers_only(self) -> bool:
        return not any(s.has_noncenter for s in self.segments)


def _center_params(p: Sequence[Fraction], q: Sequence[Fraction]) -> str:
    """Parameters ``t`` in [0,1] where ``(1-t)p + tq`` has equal coordinates."""
    d = [b - a for a, b in zip(p, q)]
    # need p_i + t d_i == p_0 + t d_0 for every i
    t = None
    for i in range(1, len(p)):
        a = p[i] - p[0]
        b = d[0] - d[i]
        if b == 0:
            if a != 0:
                return "none"
            continue
        ti = a / b
        if t is not None and ti != t:
            return "none"
        t = ti
    if t is None:
        return "all"
    if not 0 <= t <= 1:
        return "none"
    return f"t={fraction_str(t)}"


def validate_simplicial_path(path: SimplicialPath) -> PathReport:
    pts = path.points
    segs = []
    for i in range(len(pts) - 1):
        (s0, p), (s1, q) = pts[i], pts[i + 1]
        if s0 != s1:
            raise MalformedPath(f"points {i} and {i + 1} are not in a common simplex")
        p = tuple(to_fraction(v) for v in p)
        q = tuple(to_fraction(v) for v in q)
        if len(p) != len(q):
            raise MalformedPath(f"points {i} and {i + 1} have different dimensions")
        if sum(p) != sum(q):
            raise MalformedPath(f"points {i} and {i + 1} have different covolumes")
        cp = _center_params(p, q)
        segs.append(SegmentReport(i, cp, cp != "all"))
    return PathReport(tuple(segs))
