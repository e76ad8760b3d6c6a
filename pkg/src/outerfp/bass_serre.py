"""Loops in the quotient graph, translation lengths on the Bass-Serre tree,
and finite balls of the tree used as a brute-force oracle.

Tree vertices are labelled by reduced paths ``d0 e1 d1 ... en`` starting at
the basepoint lift, modulo the stabiliser at the endpoint (so the final
decoration is always the identity).  G acts on the left by concatenation.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import kernels
from .graphs import GraphOfGroups, fraction_str
from .groups import FiniteGroup
from .words import Word, format_word, reduce


class EllipticWord(ValueError):
    """The word fixes a vertex of the tree, so it has no crossing vector."""


def _identity(X: GraphOfGroups, v: str):
    grp = X.groups[v]
    return 0 if grp is None else grp.identity


def _mul(X: GraphOfGroups, v: str, a, b):
    grp = X.groups[v]
    return 0 if grp is None else grp.mul(a, b)


def _inv(X: GraphOfGroups, v: str, a):
    grp = X.groups[v]
    return 0 if grp is None else grp.inv(a)


@dataclass(frozen=True)
class BassLoop:
    """Closed path ``d0 e1 d1 ... en dn``: ``decorations[i]`` sits at the
    vertex reached after ``i`` edges."""

    start: str
    decorations: tuple
    edges: tuple[str, ...]

    def vertices(self, X: GraphOfGroups) -> list[str]:
        vs = [self.start]
        for e in self.edges:
            vs.append(X.graph.terminal(e))
        return vs

    def length(self, X: GraphOfGroups) -> Fraction:
        return sum((X.lengths[e] for e in self.edges), Fraction(0))

    def format(self, X: GraphOfGroups) -> str:
        parts = []
        for v, d, e in zip(self.vertices(X), self.decorations, self.edges + (None,)):
            if X.groups[v] is not None and not X.groups[v].is_identity(d):
                parts.append(f"[{v}.g{d}]")
            if e is not None:
                parts.append(e)
        return " ".join(parts) or f"<{self.start}>"


class _PathBuilder:
    def __init__(self, X: GraphOfGroups, start: str):
        self.X = X
        self.start = start
        self.decos = [_identity(X, start)]
        self.edges: list[str] = []

    def here(self) -> str:
        return self.X.graph.terminal(self.edges[-1]) if self.edges else self.start

    def push_deco(self, d):
        self.decos[-1] = _mul(self.X, self.here(), self.decos[-1], d)

    def push_edge(self, e: str):
        X = self.X
        if self.edges and self.edges[-1] == X.graph.reverse[e] and self.decos[-1] == _identity(X, self.here()):
            self.edges.pop()
            self.decos.pop()
        else:
            if X.graph.initial[e] != self.here():
                raise ValueError(f"edge {e} does not start at {self.here()}")
            self.edges.append(e)
            self.decos.append(_identity(X, X.graph.terminal(e)))

    def push_path(self, path):
        for e in path:
            self.push_edge(e)

    def loop(self) -> BassLoop:
        return BassLoop(self.start, tuple(self.decos), tuple(self.edges))


def word_to_loop(u: Word, X: GraphOfGroups) -> BassLoop:
    """Reduced loop at the basepoint representing ``u``."""
    b = X.basepoint
    g = X.graph
    pb = _PathBuilder(X, b)
    for s in u.syllables:
        if s[0] == "v":
            v = s[1]
            pb.push_path(X.tree_path(b, v))
            pb.push_deco(s[2])
            pb.push_path(X.tree_path(v, b))
        else:
            e = s[1] if s[2] > 0 else g.reverse[s[1]]
            pb.push_path(X.tree_path(b, g.initial[e]))
            pb.push_edge(e)
            pb.push_path(X.tree_path(g.terminal(e), b))
    return pb.loop()


def path_syllables(start: str, decorations, edges, X: GraphOfGroups) -> list:
    """Syllables read off a decorated path (tree edges are dropped)."""
    g = X.graph
    out = []
    v = start
    for i, d in enumerate(decorations):
        if X.groups[v] is not None and not X.groups[v].is_identity(d):
            out.append(("v", v, d))
        if i < len(edges):
            e = edges[i]
            c = g.canonical(e)
            if c not in X.spanning_tree:
                out.append(("e", c, 1 if e == c else -1))
            v = g.terminal(e)
    return out


def loop_to_word(loop: BassLoop, X: GraphOfGroups) -> Word:
    return reduce(path_syllables(loop.start, loop.decorations, loop.edges, X), X)


def reduce_loop(loop: BassLoop, X: GraphOfGroups) -> BassLoop:
    pb = _PathBuilder(X, loop.start)
    pb.push_deco(loop.decorations[0])
    for e, d in zip(loop.edges, loop.decorations[1:]):
        pb.push_edge(e)
        pb.push_deco(d)
    return pb.loop()


def cyclically_reduce_loop(loop: BassLoop, X: GraphOfGroups) -> tuple[BassLoop, BassLoop]:
    """Return ``(core, prefix)``: the cyclically reduced loop and the path
    stripped from the front (``loop = prefix . core . prefix^-1``)."""
    g = X.graph
    decos = list(loop.decorations)
    edges = list(loop.edges)
    start = loop.start
    pre_decos: list = []
    pre_edges: list[str] = []
    while len(edges) >= 2:
        e1, en = edges[0], edges[-1]
        if en != g.reverse[e1]:
            break
        junction = _mul(X, start, decos[-1], decos[0])
        if junction != _identity(X, start):
            break
        pre_decos.append(decos[0])
        pre_edges.append(e1)
        start = g.terminal(e1)
        # d1 e2 ... e_{n-1} d_{n-1}
        decos = decos[1:-1]
        edges = edges[1:-1]
    prefix = BassLoop(loop.start, tuple(pre_decos) + (_identity(X, start),), tuple(pre_edges))
    return BassLoop(start, tuple(decos), tuple(edges)), prefix


def cyclic_core(u: Word, X: GraphOfGroups) -> BassLoop:
    return cyclically_reduce_loop(word_to_loop(u, X), X)[0]


def is_elliptic(u: Word, X: GraphOfGroups) -> bool:
    return not cyclic_core(u, X).edges


def translation_length(u: Word, X: GraphOfGroups) -> Fraction:
    return cyclic_core(u, X).length(X)


def crossing_vector(u: Word, X: GraphOfGroups) -> dict[str, int]:
    core = cyclic_core(u, X)
    if not core.edges:
        raise EllipticWord(f"{format_word(u)} is elliptic")
    counts = {e: 0 for e in X.unoriented}
    for e in core.edges:
        counts[X.graph.canonical(e)] += 1
    return counts


def fixed_vertex(u: Word, X: GraphOfGroups) -> tuple | None:
    """Label of the unique fixed vertex of a nontrivial elliptic word, ``None``
    for hyperbolic words.  Raises for the identity (it fixes everything)."""
    if not u.syllables:
        raise ValueError("the identity fixes every vertex")
    core, prefix = cyclically_reduce_loop(word_to_loop(u, X), X)
    if core.edges:
        return None
    label = []
    for d, e in zip(prefix.decorations, prefix.edges):
        label.extend((d, e))
    end = prefix.edges[-1] if prefix.edges else None
    w = X.graph.terminal(end) if end else X.basepoint
    label.append(_identity(X, w))
    return tuple(label)


def elliptic_parts(u: Word, X: GraphOfGroups) -> tuple[str, Word, object] | None:
    """Write a nontrivial elliptic ``u`` as ``c * (v, h) * c^-1`` with ``h`` in
    G_v; ``c`` is read off the path to the fixed vertex.  ``None`` if
    hyperbolic."""
    if not u.syllables:
        raise ValueError("the identity fixes every vertex")
    core, prefix = cyclically_reduce_loop(word_to_loop(u, X), X)
    if core.edges:
        return None
    c = reduce(path_syllables(prefix.start, prefix.decorations, prefix.edges, X), X)
    return core.start, c, core.decorations[0]


# -- integer encoding for the ball kernels --------------------------------

class TreeEncoding:
    """Integer tables describing X for :mod:`outerfp.kernels`.

    Oriented edge ``c`` (canonical) gets index ``2k`` and its reverse ``2k+1``.
    """

    def __init__(self, X: GraphOfGroups):
        g = X.graph
        self.X = X
        self.vindex = {v: i for i, v in enumerate(g.vertices)}
        self.eindex: dict[str, int] = {}
        self.edge_ids: list[str] = []
        for k, c in enumerate(g.unoriented):
            self.eindex[c] = 2 * k
            self.eindex[g.reverse[c]] = 2 * k + 1
            self.edge_ids.extend([c, g.reverse[c]])
        self.scale = 1
        for e in g.edges:
            self.scale = self.scale * X.lengths[e].denominator // math.gcd(self.scale, X.lengths[e].denominator)
        tab: list[int] = []
        goff, gord, gid = [], [], []
        for v in g.vertices:
            grp = X.groups[v]
            if grp is None:
                grp = FiniteGroup(((0,),))
            if not isinstance(grp, FiniteGroup):
                raise ValueError(f"vertex {v} has an infinite group; the tree is not locally finite")
            goff.append(len(tab))
            gord.append(grp.order)
            gid.append(grp.identity)
            for row in grp.table:
                tab.extend(row)
        initial = [self.vindex[g.initial[e]] for e in self.edge_ids]
        elen = [int(X.lengths[e] * self.scale) for e in self.edge_ids]
        self.ctx = kernels.Context(initial, tab, goff, gord, gid, elen, self.vindex[X.basepoint])

    def encode_loop(self, loop: BassLoop) -> tuple[int, ...]:
        out = [int(loop.decorations[0])]
        for e, d in zip(loop.edges, loop.decorations[1:]):
            out.extend((self.eindex[e], int(d)))
        return tuple(out)

    def encode_word(self, u: Word) -> tuple[int, ...]:
        return self.encode_loop(word_to_loop(u, self.X))

    def decode_label(self, label: tuple[int, ...]) -> tuple:
        return tuple(self.edge_ids[x] if i % 2 else x for i, x in enumerate(label))


@dataclass(eq=False)
class CoverBall:
    """The ball of given radius about the basepoint lift in the Bass-Serre tree."""

    X: GraphOfGroups
    radius: Fraction
    labels: list[tuple[int, ...]]
    depths: list[int]  # scaled integer depths
    parents: list[int]
    encoding: TreeEncoding = field(repr=False)
    index: dict = field(default_factory=dict, repr=False)

    @property
    def scale(self) -> int:
        return self.encoding.scale

    def __len__(self):
        return len(self.labels)

    def depth(self, i: int) -> Fraction:
        return Fraction(self.depths[i], self.scale)

    def projection(self, i: int) -> str:
        lab = self.labels[i]
        if len(lab) == 1:
            return self.X.basepoint
        return self.X.graph.terminal(self.encoding.edge_ids[lab[-2]])

    def edges(self) -> list[tuple[int, int, Fraction]]:
        out = []
        for i, p in enumerate(self.parents):
            if p >= 0:
                e = self.encoding.edge_ids[self.labels[i][-2]]
                out.append((p, i, self.X.lengths[e]))
        return out

    def label_str(self, i: int) -> str:
        X = self.X
        lab = self.encoding.decode_label(self.labels[i])
        parts = []
        v = X.basepoint
        for j, x in enumerate(lab[:-1]):
            if j % 2 == 0:
                grp = X.groups[v]
                if grp is not None and not grp.is_identity(x):
                    parts.append(f"{v}.g{x}")
            else:
                parts.append(x)
                v = X.graph.terminal(x)
        return "*".join(parts) if parts else "base"

    @cached_property
    def _flat(self) -> tuple[list[int], list[int]]:
        flat: list[int] = []
        offsets = [0]
        for lab in self.labels:
            flat.extend(lab)
            offsets.append(len(flat))
        return flat, offsets

    def image(self, u: Word, i: int) -> int | None:
        """Index of ``u . vertex_i`` when it lies in the ball."""
        img = kernels.act(self.encoding.ctx, self.encoding.encode_word(u), self.labels[i])
        return self.index.get(img)

    def action(self, u: Word) -> dict[int, int]:
        loop = self.encoding.encode_word(u)
        out = {}
        for i, lab in enumerate(self.labels):
            j = self.index.get(kernels.act(self.encoding.ctx, loop, lab))
            if j is not None:
                out[i] = j
        return out

    def displacements(self, u: Word) -> tuple[list[int], list[int]]:
        flat, offsets = self._flat
        return kernels.displacements(self.encoding.ctx, self.encoding.encode_word(u), flat, offsets)

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for i in range(len(self.labels)):
            lines.append(f'  n{i} [label="{self.label_str(i)}"];')
        for p, i, length in self.edges():
            lines.append(f'  n{p} -- n{i} [label="{fraction_str(length)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(X: GraphOfGroups, radius, max_vertices: int = 2_000_000) -> CoverBall:
    radius = Fraction(radius)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    enc = TreeEncoding(X)
    g = X.graph
    R = radius * enc.scale
    base = enc.vindex[X.basepoint]
    gord = enc.ctx.gord
    gid = enc.ctx.gid
    root = (gid[base],)
    labels = [root]
    depths = [0]
    parents = [-1]
    index = {root: 0}
    out_edges = {v: [enc.eindex[e] for e in g.out_edges(v)] for v in g.vertices}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        lab = labels[i]
        if len(lab) == 1:
            v, back = X.basepoint, None
        else:
            last = lab[-2]
            v, back = g.terminal(enc.edge_ids[last]), last ^ 1
        vi = enc.vindex[v]
        for d in range(gord[vi]):
            for e in out_edges[v]:
                if d == gid[vi] and e == back:
                    continue
                depth = depths[i] + enc.ctx.elen[e]
                if depth > R:
                    continue
                tip = enc.vindex[g.terminal(enc.edge_ids[e])]
                child = lab[:-1] + (d, e, gid[tip])
                index[child] = len(labels)
                labels.append(child)
                depths.append(depth)
                parents.append(i)
                queue.append(len(labels) - 1)
                if len(labels) > max_vertices:
                    raise ValueError("ball too large; lower the radius")
    return CoverBall(X, radius, labels, depths, parents, enc, index)


def oracle_translation_length(u: Word, ball: CoverBall) -> Fraction | None:
    """min d(x, u.x) over ball vertices x with u.x in the ball, or ``None``
    when the radius cannot certify that minimum.

    The displacement of the basepoint lift is D = l + 2 d(base, axis); the
    projection p of the base onto the axis (or fixed point) is a vertex with
    depth <= D/2 and u.p has depth <= (D + l)/2, so the minimum is certain
    once 2R >= D + m for the observed minimum m >= l.
    """
    dists, img_depths = ball.displacements(u)
    R = ball.radius * ball.scale
    D = dists[0]
    m = None
    for d, h in zip(dists, img_depths):
        if h <= R and (m is None or d < m):
            m = d
    if m is None or 2 * R < D + m:
        return None
    return Fraction(m, ball.scale)


def fixed_vertices(u: Word, ball: CoverBall) -> list[int]:
    dists, _ = ball.displacements(u)
    return [i for i, d in enumerate(dists) if d == 0]
