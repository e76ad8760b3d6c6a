"""Isometric representatives as decorated automorphisms of the quotient
graph, the invariant-subgraph reducibility scan, and forest collapse."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .automorphisms import EndoSpec, is_inner
from .bass_serre import path_syllables, word_to_loop
from .graphs import GraphOfGroups, SerreGraph, fraction_str, graph_to_json
from .groups import FiniteGroup, FormalProduct
from .lipschitz import metric_vector, stretch_factor
from .words import Word, format_word, invert, reduce, standard_generators, syllable_str

MAX_ORBITS = 20
ELLIPTIC, HYPERBOLIC = "Elliptic", "Hyperbolic"


class NoneWithinBound(LookupError):
    """No isometric representative found; ``lambdaR`` is the certified right
    stretching factor at the point, which decides fixed-point status."""

    def __init__(self, message: str, lambdaR: Fraction):
        super().__init__(message)
        self.lambdaR = lambdaR


class NotAForest(ValueError):
    pass


class NotProper(ValueError):
    pass


# -- graph automorphisms --------------------------------------------------

def _same_group_type(X: GraphOfGroups, u: str, v: str) -> bool:
    a, b = X.groups[u], X.groups[v]
    if a is None or b is None:
        return a is None and b is None
    if not (isinstance(a, FiniteGroup) and isinstance(b, FiniteGroup)):
        return False
    return a.order == b.order and next(a.isomorphisms_to(b), None) is not None


def graph_automorphisms(X: GraphOfGroups) -> Iterator[tuple[dict[str, str], dict[str, str]]]:
    """Automorphisms of the quotient graph preserving edge lengths and vertex
    group types, as ``(vertex map, oriented edge map)``.  The identity comes
    first."""
    g = X.graph
    edges = list(g.unoriented)
    oriented = sorted(g.edges)

    def extend(i, vmap, emap, used):
        if i == len(edges):
            if len(vmap) == len(g.vertices):
                yield dict(vmap), dict(emap)
            else:
                # isolated vertices (only in the one-vertex graph)
                rest = [v for v in g.vertices if v not in vmap]
                free = [v for v in g.vertices if v not in vmap.values()]
                for perm in itertools.permutations(free):
                    if all(_same_group_type(X, a, b) for a, b in zip(rest, perm)):
                        yield {**vmap, **dict(zip(rest, perm))}, dict(emap)
            return
        e = edges[i]
        a, b = g.initial[e], g.terminal(e)
        choices = [e] + [f for f in oriented if f != e]
        for f in choices:
            if g.canonical(f) in used or X.lengths[f] != X.lengths[e]:
                continue
            fa, fb = g.initial[f], g.terminal(f)
            new = {}
            ok = True
            for src, dst in ((a, fa), (b, fb)):
                cur = vmap.get(src, new.get(src))
                if cur is None:
                    if dst in vmap.values() or dst in new.values() or not _same_group_type(X, src, dst):
                        ok = False
                        break
                    new[src] = dst
                elif cur != dst:
                    ok = False
                    break
            if not ok:
                continue
            vmap.update(new)
            emap[e], emap[g.reverse[e]] = f, g.reverse[f]
            used.add(g.canonical(f))
            yield from extend(i + 1, vmap, emap, used)
            used.discard(g.canonical(f))
            del emap[e], emap[g.reverse[e]]
            for k in new:
                del vmap[k]

    yield from extend(0, {}, {}, set())


# -- decorated maps -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GraphMapRep:
    """A graph automorphism with vertex-group isomorphisms and edge twists.

    A decorated path ``d0 e1 d1 ... en dn`` maps to
    ``psi(d0) t(e1) phi(e1) t(~e1)^-1 psi(d1) ...`` where ``t(e)`` lies in the
    group at ``phi(initial(e))``.
    """

    X: GraphOfGroups
    phi_vertices: Mapping[str, str]
    phi_edges: Mapping[str, str]
    vertex_iso: Mapping[str, tuple]
    twists: Mapping[str, object]
    conjugator: Word | None = None

    def _twist(self, e: str):
        v = self.phi_vertices[self.X.graph.initial[e]]
        grp = self.X.groups[v]
        return self.twists.get(e, 0 if grp is None else grp.identity)

    def _psi(self, v: str, d):
        grp = self.X.groups[v]
        if grp is None:
            return 0
        return self.vertex_iso[v][d]

    def image(self, u: Word) -> Word:
        X = self.X
        g = X.graph
        loop = word_to_loop(u, X)
        start = self.phi_vertices[loop.start]
        verts = loop.vertices(X)
        decos = []
        edges = []
        for i, d in enumerate(loop.decorations):
            v = verts[i]
            w = self.phi_vertices[v]
            grp = X.groups[w]
            x = self._psi(v, d)
            if grp is not None:
                if i > 0:
                    x = grp.mul(grp.inv(self._twist(g.reverse[loop.edges[i - 1]])), x)
                if i < len(loop.edges):
                    x = grp.mul(x, self._twist(loop.edges[i]))
            decos.append(x)
            if i < len(loop.edges):
                edges.append(self.phi_edges[loop.edges[i]])
        return reduce(path_syllables(start, tuple(decos), tuple(edges), X), X)

    def induced(self) -> EndoSpec:
        X = self.X
        return EndoSpec(X, {s: self.image(Word((s,))) for s in standard_generators(X)})

    def edge_permutation(self) -> dict[str, str]:
        g = self.X.graph
        return {e: g.canonical(self.phi_edges[e]) for e in g.unoriented}

    def to_json(self) -> dict:
        g = self.X.graph
        return {
            "phi_vertices": dict(sorted(self.phi_vertices.items())),
            "phi_edges": {e: self.phi_edges[e] for e in g.unoriented},
            "vertex_iso": {v: list(t) for v, t in sorted(self.vertex_iso.items())},
            "twists": {e: t for e, t in sorted(self.twists.items())},
            "edge_cycles": edge_orbit_cycle_check(self).notation,
            "conjugator": None if self.conjugator is None else format_word(self.conjugator),
        }


def _twist_slots(X: GraphOfGroups, vmap: Mapping[str, str]) -> list[str]:
    """Oriented edges whose twist is free after fixing the gauge: at each
    vertex the first outgoing edge gets the trivial twist."""
    g = X.graph
    slots = []
    for v in g.vertices:
        if X.groups[vmap[v]] is None:
            continue
        outs = sorted(g.out_edges(v))
        slots.extend(outs[1:])
    return slots


def iter_isometric_representatives(alpha, X: GraphOfGroups, x=None, bound: int = 4) -> Iterator[GraphMapRep]:
    """Decorated graph automorphisms of ``X`` (with lengths ``x``) whose
    induced map agrees with ``alpha`` up to an inner automorphism found
    within ``bound``."""
    if x is not None:
        vec = metric_vector(X, x)
        X = X.with_lengths(dict(zip(X.unoriented, vec)))
    backward = EndoSpec(X, dict(alpha.backward.images))
    for vmap, emap in graph_automorphisms(X):
        nonfree = X.nonfree_vertices()
        iso_choices = [list(X.groups[v].isomorphisms_to(X.groups[vmap[v]])) for v in nonfree]
        slots = _twist_slots(X, vmap)
        twist_choices = [list(X.groups[vmap[X.graph.initial[e]]].elements()) for e in slots]
        for isos in itertools.product(*iso_choices):
            for tw in itertools.product(*twist_choices):
                twists = {e: t for e, t in zip(slots, tw) if t != X.groups[vmap[X.graph.initial[e]]].identity}
                rep = GraphMapRep(X, vmap, emap, dict(zip(nonfree, isos)), twists)
                beta = rep.induced()
                w = is_inner(beta.then(backward), bound)
                if w is not None:
                    yield GraphMapRep(X, vmap, emap, dict(zip(nonfree, isos)), twists, w)


def find_isometric_representative(alpha, X: GraphOfGroups, x=None, bound: int = 4) -> GraphMapRep:
    for rep in iter_isometric_representatives(alpha, X, x, bound):
        return rep
    lam = stretch_factor(alpha, X, x).lambdaR
    raise NoneWithinBound(f"no isometric representative within bound {bound} (lambdaR = {fraction_str(lam)})", lam)


@dataclass(frozen=True)
class CycleCheck:
    single_cycle: bool
    cycles: tuple[tuple[str, ...], ...]

    @property
    def notation(self) -> str:
        return "".join("(" + " ".join(c) + ")" for c in self.cycles)

    def __bool__(self):
        return self.single_cycle


def permutation_cycles(perm: Mapping[str, str]) -> tuple[tuple[str, ...], ...]:
    seen: set[str] = set()
    cycles = []
    for start in sorted(perm):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def edge_orbit_cycle_check(rep: GraphMapRep) -> CycleCheck:
    cycles = permutation_cycles(rep.edge_permutation())
    return CycleCheck(len(cycles) == 1, cycles)


# -- subgraphs ------------------------------------------------------------

@dataclass(frozen=True)
class SubgraphSelection:
    edges: frozenset

    @classmethod
    def of(cls, X: GraphOfGroups, edges) -> "SubgraphSelection":
        g = X.graph
        return cls(frozenset(g.canonical(e) for e in edges))

    def vertices(self, X: GraphOfGroups) -> set[str]:
        g = X.graph
        return {v for e in self.edges for v in (g.initial[e], g.terminal(e))}

    def label(self) -> str:
        return "{" + ",".join(sorted(self.edges)) + "}"


@dataclass(frozen=True)
class ComponentInfo:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    is_tree: bool
    nonfree: tuple[str, ...]

    @property
    def elliptic(self) -> bool:
        return self.is_tree and len(self.nonfree) <= 1


def subgraph_components(S: SubgraphSelection, X: GraphOfGroups) -> list[ComponentInfo]:
    g = X.graph
    oriented = [f for e in S.edges for f in (e, g.reverse[e])]
    remaining = set(S.vertices(X))
    comps = []
    for v in sorted(S.vertices(X)):
        if v not in remaining:
            continue
        verts = g.component_of(v, oriented)
        remaining -= verts
        es = tuple(sorted(e for e in S.edges if g.initial[e] in verts))
        comps.append(
            ComponentInfo(
                tuple(sorted(verts)),
                es,
                len(es) == len(verts) - 1,
                tuple(sorted(u for u in verts if not X.is_free(u))),
            )
        )
    return comps


def classify_subgraph(S: SubgraphSelection, X: GraphOfGroups) -> str:
    """Elliptic iff every component is a tree with at most one non-free vertex."""
    return ELLIPTIC if all(c.elliptic for c in subgraph_components(S, X)) else HYPERBOLIC


@dataclass(frozen=True)
class ReductionCertificate:
    selection: SubgraphSelection
    classification: str
    components: tuple[ComponentInfo, ...]
    orbits: tuple[tuple[str, ...], ...]

    def to_json(self) -> dict:
        return {
            "certificate": sorted(self.selection.edges),
            "classification": self.classification,
            "components": [
                {
                    "vertices": list(c.vertices),
                    "edges": list(c.edges),
                    "tree": c.is_tree,
                    "nonfree": list(c.nonfree),
                    "classification": ELLIPTIC if c.elliptic else HYPERBOLIC,
                }
                for c in self.components
            ],
            "orbits": [list(o) for o in self.orbits],
        }


def reducibility_scan(rep: GraphMapRep, X: GraphOfGroups | None = None) -> ReductionCertificate | None:
    """Smallest proper union of edge orbits of ``phi`` that is hyperbolic, or
    ``None``.  ``None`` does not prove irreducibility."""
    X = X or rep.X
    orbits = permutation_cycles(rep.edge_permutation())
    if len(orbits) > MAX_ORBITS:
        raise ValueError(f"{len(orbits)} edge orbits exceeds the scan limit of {MAX_ORBITS}")
    unions = []
    for r in range(1, len(orbits)):
        for combo in itertools.combinations(orbits, r):
            edges = frozenset(e for o in combo for e in o)
            unions.append(edges)
    unions.sort(key=lambda s: (len(s), sorted(s)))
    for edges in unions:
        sel = SubgraphSelection(edges)
        comps = subgraph_components(sel, X)
        if not all(c.elliptic for c in comps):
            return ReductionCertificate(sel, HYPERBOLIC, tuple(comps), orbits)
    return None


# -- collapse -------------------------------------------------------------

def change_tree(u: Word, source: GraphOfGroups, target: GraphOfGroups) -> Word:
    """Rewrite ``u`` from ``source``'s spanning tree to ``target``'s (same
    underlying graph and groups)."""
    loop = word_to_loop(u, source)
    return reduce(path_syllables(loop.start, loop.decorations, loop.edges, target), target)


@dataclass(frozen=True, eq=False)
class Collapse:
    old: GraphOfGroups
    new: GraphOfGroups
    vertex_map: Mapping[str, str]
    forward: Mapping[str, Word]
    backward: Mapping[str, Word]

    def to_json(self) -> dict:
        return {
            "graph": graph_to_json(self.new),
            "vertex_map": dict(sorted(self.vertex_map.items())),
            "forward": {k: format_word(w) for k, w in sorted(self.forward.items())},
            "backward": {k: format_word(w) for k, w in sorted(self.backward.items())},
        }


def _component_name(comp: ComponentInfo) -> str:
    if comp.nonfree:
        return "+".join(comp.nonfree)
    return comp.vertices[0]


def collapse_subforest(X: GraphOfGroups, S: SubgraphSelection) -> Collapse:
    g = X.graph
    if not S.edges:
        raise NotProper("nothing to collapse")
    comps = subgraph_components(S, X)
    for c in comps:
        if not c.is_tree:
            raise NotAForest(f"component {','.join(c.edges)} contains a loop")
    if set(S.edges) == set(g.unoriented):
        raise NotProper("collapsing every edge leaves a point")

    vmap = {v: v for v in g.vertices}
    new_groups: dict = {}
    for c in comps:
        name = _component_name(c)
        for v in c.vertices:
            vmap[v] = name
        nontrivial = [(v, X.groups[v]) for v in c.nonfree]
        if not nontrivial:
            new_groups[name] = None
        elif len(nontrivial) == 1:
            new_groups[name] = nontrivial[0][1]
        else:
            new_groups[name] = FormalProduct(tuple(nontrivial))
    for v in g.vertices:
        if vmap[v] == v and v not in new_groups:
            new_groups[v] = X.groups[v]
    new_vertices = tuple(sorted(new_groups))

    kept = [e for e in g.edges if g.canonical(e) not in S.edges]
    reverse = {e: g.reverse[e] for e in kept}
    initial = {e: vmap[g.initial[e]] for e in kept}
    graph = SerreGraph(new_vertices, tuple(sorted(kept)), reverse, initial)
    Y = GraphOfGroups(graph, {e: X.lengths[e] for e in kept}, new_groups)
    # old graph re-rooted on a tree containing the collapsed forest
    mid_tree = frozenset(S.edges) | Y.spanning_tree
    Xm = GraphOfGroups(g, X.lengths, X.groups, mid_tree)

    def down(s):
        if s[0] == "e":
            return s
        v, x = s[1], s[2]
        grp = Y.groups[vmap[v]]
        if isinstance(grp, FormalProduct):
            return ("v", vmap[v], grp.embed(v, x))
        return ("v", vmap[v], x)

    def up(s):
        if s[0] == "e":
            return [s]
        w, x = s[1], s[2]
        grp = Y.groups[w]
        if isinstance(grp, FormalProduct):
            return [("v", f, y) for f, y in x]
        (src,) = [v for v in g.vertices if vmap[v] == w and not X.is_free(v)]
        return [("v", src, x)]

    forward = {}
    for s in standard_generators(X):
        w = change_tree(Word((s,)), X, Xm)
        forward[syllable_str(s)] = reduce([down(t) for t in w.syllables], Y)
    backward = {}
    for s in standard_generators(Y):
        w = reduce(up(s), Xm)
        backward[syllable_str(s)] = change_tree(w, Xm, X)
    return Collapse(X, Y, vmap, forward, backward)


def translate(u: Word, collapse: Collapse, direction: str = "forward") -> Word:
    """Image of a word under a collapse dictionary."""
    src, dst, table = (
        (collapse.old, collapse.new, collapse.forward)
        if direction == "forward"
        else (collapse.new, collapse.old, collapse.backward)
    )
    pieces = []
    for s in u.syllables:
        if s[0] == "v":
            grp = src.groups[s[1]]
            if isinstance(grp, FormalProduct):
                for f, y in s[2]:
                    pieces.extend(table[syllable_str(("v", s[1], ((f, y),)))].syllables)
                continue
            pieces.extend(table[syllable_str(s)].syllables)
        else:
            w = table[syllable_str(("e", s[1], 1))]
            if s[2] < 0:
                w = invert(w, dst)
            pieces.extend(w.syllables)
    return reduce(pieces, dst)
