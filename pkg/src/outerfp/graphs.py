"""Serre graphs, metrics and graphs of groups with trivial edge groups.

A graph of groups here is the quotient data of an edge-free tree: a connected
Serre graph, positive rational edge lengths and, per vertex, either a finite
group (given by its table), a formal free product (after collapses) or
``None`` for the trivial group.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

from .groups import FiniteGroup, FormalProduct, group_from_json

VertexGroup = FiniteGroup | FormalProduct | None


class StructuralError(ValueError):
    """Raised when an operation needs a valid graph of groups and gets one
    that fails validation."""


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("lengths must be exact (int, Fraction or string), not float")
    return Fraction(str(value).strip())


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=False)
class SerreGraph:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    reverse: Mapping[str, str]
    initial: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "edges", tuple(sorted(set(self.edges))))
        object.__setattr__(self, "reverse", MappingProxyType(dict(self.reverse)))
        object.__setattr__(self, "initial", MappingProxyType(dict(self.initial)))

    def terminal(self, e: str) -> str:
        return self.initial[self.reverse[e]]

    def canonical(self, e: str) -> str:
        return min(e, self.reverse[e])

    @cached_property
    def unoriented(self) -> tuple[str, ...]:
        return tuple(sorted({self.canonical(e) for e in self.edges}))

    @cached_property
    def _out(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out.setdefault(self.initial[e], []).append(e)
        return {v: tuple(sorted(es)) for v, es in out.items()}

    def out_edges(self, v: str) -> tuple[str, ...]:
        return self._out.get(v, ())

    def degree(self, v: str) -> int:
        return len(self.out_edges(v))

    def structure_problems(self) -> list[tuple[str, str]]:
        probs = []
        if not self.vertices:
            probs.append(("empty", "graph has no vertices"))
        vs = set(self.vertices)
        for e in self.edges:
            r = self.reverse.get(e)
            if r is None or r not in self.reverse:
                probs.append(("reverse-missing", f"edge {e} has no reverse edge"))
                continue
            if r == e:
                probs.append(("reverse-fixed-point", f"edge {e} is its own reverse"))
            if self.reverse.get(r) != e:
                probs.append(("reverse-not-involution", f"reverse(reverse({e})) != {e}"))
            if self.initial.get(e) not in vs:
                probs.append(("unknown-vertex", f"edge {e} starts at unknown vertex"))
        if probs:
            return probs
        if self.vertices and len(self.component_of(self.vertices[0])) != len(vs):
            probs.append(("disconnected", "graph is not connected"))
        return probs

    def component_of(self, v: str, edges: Iterable[str] | None = None) -> set[str]:
        allowed = None if edges is None else set(edges)
        seen = {v}
        todo = [v]
        while todo:
            u = todo.pop()
            for e in self.out_edges(u):
                if allowed is not None and self.canonical(e) not in allowed:
                    continue
                w = self.terminal(e)
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen


@dataclass(frozen=True, eq=False)
class ValidationReport:
    violations: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {c for c, _ in self.violations}

    def messages(self) -> list[str]:
        return [m for _, m in self.violations]

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    graph: SerreGraph
    lengths: Mapping[str, Fraction]
    groups: Mapping[str, VertexGroup]
    spanning_tree: frozenset = field(default=None)

    def __post_init__(self):
        g = self.graph
        lengths = {}
        for e, val in dict(self.lengths).items():
            lengths[e] = to_fraction(val)
        for e in g.edges:
            if e not in lengths and g.reverse.get(e) in lengths:
                lengths[e] = lengths[g.reverse[e]]
        object.__setattr__(self, "lengths", MappingProxyType(lengths))
        groups = {v: self._normalize_group(dict(self.groups).get(v)) for v in g.vertices}
        object.__setattr__(self, "groups", MappingProxyType(groups))
        if self.spanning_tree is None:
            tree = default_spanning_tree(g) if not g.structure_problems() else frozenset()
        else:
            tree = frozenset(g.canonical(e) if e in g.reverse else e for e in self.spanning_tree)
        object.__setattr__(self, "spanning_tree", tree)

    @staticmethod
    def _normalize_group(grp):
        if isinstance(grp, FiniteGroup) and grp.order == 1:
            return None
        return grp

    # identity is structural, used by caches and tests
    def _key(self):
        return (
            self.graph.vertices,
            self.graph.edges,
            tuple(sorted(self.graph.reverse.items())),
            tuple(sorted(self.graph.initial.items())),
            tuple(sorted(self.lengths.items())),
            tuple(sorted((v, repr(self._group_key(g))) for v, g in self.groups.items())),
            tuple(sorted(self.spanning_tree)),
        )

    @staticmethod
    def _group_key(g):
        if g is None:
            return None
        if isinstance(g, FiniteGroup):
            return g.table
        return tuple((v, h.table) for v, h in g.factors)

    def __eq__(self, other):
        return isinstance(other, GraphOfGroups) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # -- basic queries -------------------------------------------------
    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def unoriented(self) -> tuple[str, ...]:
        return self.graph.unoriented

    def is_free(self, v: str) -> bool:
        return self.groups[v] is None

    def nonfree_vertices(self) -> list[str]:
        return [v for v in self.vertices if not self.is_free(v)]

    def length(self, e: str) -> Fraction:
        return self.lengths[e]

    @property
    def basepoint(self) -> str:
        return self.vertices[0]

    @cached_property
    def nontree_edges(self) -> tuple[str, ...]:
        return tuple(e for e in self.unoriented if e not in self.spanning_tree)

    @cached_property
    def tree_paths(self) -> dict[str, tuple[str, ...]]:
        """Oriented edge path in the spanning tree from the basepoint to each vertex."""
        g = self.graph
        paths = {self.basepoint: ()}
        queue = deque([self.basepoint])
        while queue:
            u = queue.popleft()
            for e in g.out_edges(u):
                if g.canonical(e) not in self.spanning_tree:
                    continue
                w = g.terminal(e)
                if w not in paths:
                    paths[w] = paths[u] + (e,)
                    queue.append(w)
        return paths

    def tree_path(self, u: str, v: str) -> tuple[str, ...]:
        """Reduced path in the spanning tree from u to v."""
        pu, pv = self.tree_paths[u], self.tree_paths[v]
        i = 0
        while i < len(pu) and i < len(pv) and pu[i] == pv[i]:
            i += 1
        back = tuple(self.graph.reverse[e] for e in reversed(pu[i:]))
        return back + pv[i:]

    def with_lengths(self, lengths: Mapping[str, object]) -> "GraphOfGroups":
        full = {}
        for e in self.graph.edges:
            c = self.graph.canonical(e)
            if c in lengths:
                full[e] = lengths[c]
            elif e in lengths:
                full[e] = lengths[e]
            else:
                raise KeyError(f"no length for edge {c}")
        return GraphOfGroups(self.graph, full, self.groups, self.spanning_tree)

    def metric(self) -> dict[str, Fraction]:
        return {e: self.lengths[e] for e in self.unoriented}


def default_spanning_tree(g: SerreGraph) -> frozenset:
    """Breadth-first tree from the smallest vertex, edges taken in id order."""
    if not g.vertices:
        return frozenset()
    root = g.vertices[0]
    seen = {root}
    tree = set()
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e in sorted(g.out_edges(u), key=g.canonical):
            w = g.terminal(e)
            if w not in seen:
                seen.add(w)
                tree.add(g.canonical(e))
                queue.append(w)
    return frozenset(tree)


def build_graph(
    vertices: Mapping[str, VertexGroup] | Iterable[str],
    edges: Iterable[tuple],
    spanning_tree: Iterable[str] | None = None,
) -> GraphOfGroups:
    """Convenience constructor.

    ``edges`` holds tuples ``(id, reverse_id, from, to, length)``.
    """
    if isinstance(vertices, Mapping):
        groups = dict(vertices)
    else:
        groups = {v: None for v in vertices}
    reverse, initial, lengths = {}, {}, {}
    for eid, rid, a, b, length in edges:
        reverse[eid], reverse[rid] = rid, eid
        initial[eid], initial[rid] = a, b
        lengths[eid] = lengths[rid] = to_fraction(length)
    graph = SerreGraph(tuple(groups), tuple(reverse), reverse, initial)
    tree = None if spanning_tree is None else frozenset(spanning_tree)
    return GraphOfGroups(graph, lengths, groups, tree)


def validate_graph_of_groups(X: GraphOfGroups) -> ValidationReport:
    g = X.graph
    out = list(g.structure_problems())
    if out:
        return ValidationReport(tuple(out))
    if not g.edges:
        out.append(("isolated-vertex", f"vertex {g.vertices[0]} has degree 0 (no edges)"))
    for e in g.edges:
        length = X.lengths.get(e)
        if length is None:
            out.append(("missing-length", f"edge {e} has no length"))
        elif length <= 0:
            out.append(("nonpositive-length", f"edge {e} has length {fraction_str(length)}"))
        elif X.lengths.get(g.reverse[e]) != length:
            out.append(("asymmetric-length", f"edge {e} and its reverse differ in length"))
    for v in g.vertices:
        grp = X.groups[v]
        if isinstance(grp, FiniteGroup) and grp.associativity_violations():
            out.append(("group-table", f"vertex {v}: table is not associative"))
    tree = X.spanning_tree
    if not tree <= set(g.unoriented):
        out.append(("bad-spanning-tree", "spanning tree names unknown edges"))
    elif len(tree) != len(g.vertices) - 1 or len(g.component_of(g.vertices[0], tree)) != len(g.vertices):
        out.append(("bad-spanning-tree", "spanning tree does not span the graph as a tree"))
    for v in g.vertices:
        if not X.is_free(v):
            continue
        d = g.degree(v)
        if d == 1:
            out.append(("free-degree-1", f"degree 1 vertex is free: {v}"))
        elif d == 2:
            out.append(("free-degree-2", f"free vertex of degree 2: {v}"))
    return ValidationReport(tuple(out))


def require_valid(X: GraphOfGroups) -> None:
    rep = validate_graph_of_groups(X)
    if not rep.ok:
        raise StructuralError("; ".join(rep.messages()))


def rank_and_factors(X: GraphOfGroups) -> tuple[int, int]:
    require_valid(X)
    k = len(X.nonfree_vertices())
    r = len(X.unoriented) - len(X.vertices) + 1
    return k, r


def covolume(X: GraphOfGroups) -> Fraction:
    return sum((X.lengths[e] for e in X.unoriented), Fraction(0))


def rescale(X: GraphOfGroups, mu) -> GraphOfGroups:
    mu = to_fraction(mu)
    if mu <= 0:
        raise ValueError("rescaling factor must be positive")
    return GraphOfGroups(
        X.graph, {e: mu * x for e, x in X.lengths.items()}, X.groups, X.spanning_tree
    )


def relabel(X: GraphOfGroups, vmap: Mapping[str, str], emap: Mapping[str, str]) -> GraphOfGroups:
    """Rename vertex and oriented edge ids (bijections)."""
    g = X.graph
    reverse = {emap[e]: emap[g.reverse[e]] for e in g.edges}
    initial = {emap[e]: vmap[g.initial[e]] for e in g.edges}
    graph = SerreGraph(tuple(vmap[v] for v in g.vertices), tuple(reverse), reverse, initial)
    lengths = {emap[e]: x for e, x in X.lengths.items()}
    groups = {vmap[v]: grp for v, grp in X.groups.items()}
    return GraphOfGroups(graph, lengths, groups, None)


# -- JSON -----------------------------------------------------------------

def graph_from_json(obj: Mapping) -> GraphOfGroups:
    groups = {}
    for item in obj["vertices"]:
        groups[str(item["id"])] = group_from_json(item.get("group", "trivial"))
    reverse, initial, lengths = {}, {}, {}
    for item in obj["edges"]:
        eid, rid = str(item["id"]), str(item["reverse"])
        reverse[eid], reverse[rid] = rid, eid
        initial[eid], initial[rid] = str(item["from"]), str(item["to"])
        lengths[eid] = lengths[rid] = to_fraction(item.get("length", 1))
    graph = SerreGraph(tuple(groups), tuple(reverse), reverse, initial)
    tree = obj.get("spanning_tree")
    return GraphOfGroups(graph, lengths, groups, None if tree is None else frozenset(tree))


def graph_to_json(X: GraphOfGroups) -> dict:
    g = X.graph
    verts = []
    for v in g.vertices:
        grp = X.groups[v]
        verts.append({"id": v, "group": "trivial" if grp is None else grp.to_json()})
    edges = []
    for e in g.unoriented:
        edges.append(
            {
                "id": e,
                "reverse": g.reverse[e],
                "from": g.initial[e],
                "to": g.terminal(e),
                "length": fraction_str(X.lengths[e]),
            }
        )
    return {"vertices": verts, "edges": edges, "spanning_tree": sorted(X.spanning_tree)}
