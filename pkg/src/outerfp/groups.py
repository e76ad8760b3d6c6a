"""Vertex groups: finite groups given by multiplication tables, and formal
free products of them (the groups that appear after collapsing a subforest).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence


class GroupTableError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group on ``{0, ..., order-1}`` with an explicit product table."""

    table: tuple[tuple[int, ...], ...]
    name: str = ""
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise GroupTableError("product table must be square and nonempty")
        if any(not 0 <= x < n for row in table for x in row):
            raise GroupTableError("table entries out of range")
        ident = None
        for e in range(n):
            if all(table[e][a] == a and table[a][e] == a for a in range(n)):
                ident = e
                break
        if ident is None:
            raise GroupTableError("no identity element")
        inv = []
        for a in range(n):
            cands = [b for b in range(n) if table[a][b] == ident and table[b][a] == ident]
            if not cands:
                raise GroupTableError(f"element {a} has no inverse")
            inv.append(cands[0])
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def is_identity(self, a) -> bool:
        return a == self.identity

    def elements(self) -> range:
        return range(self.order)

    def nonidentity(self) -> list[int]:
        return [a for a in range(self.order) if a != self.identity]

    def generators(self) -> list[int]:
        return self.nonidentity()

    def is_trivial(self) -> bool:
        return self.order == 1

    def associativity_violations(self) -> list[tuple[int, int, int]]:
        t = self.table
        n = self.order
        return [
            (a, b, c)
            for a in range(n)
            for b in range(n)
            for c in range(n)
            if t[t[a][b]][c] != t[a][t[b][c]]
        ]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def power(self, a: int, k: int) -> int:
        x = self.identity
        for _ in range(k):
            x = self.table[x][a]
        return x

    def generating_set(self) -> list[int]:
        """Greedy small generating set (deterministic)."""
        gens: list[int] = []
        span = {self.identity}
        for a in range(self.order):
            if a in span:
                continue
            gens.append(a)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens: Sequence[int]) -> set[int]:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        return span

    def isomorphisms_to(self, other: "FiniteGroup") -> Iterator[tuple[int, ...]]:
        """Yield every isomorphism self -> other as an image tuple, in lex order
        of the generator images."""
        if self.order != other.order:
            return
        gens = self.generating_set()
        # express each element as a word in gens (BFS tree)
        words: dict[int, list[int]] = {self.identity: []}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for i, g in enumerate(gens):
                    y = self.table[x][g]
                    if y not in words:
                        words[y] = words[x] + [i]
                        nxt.append(y)
            frontier = nxt
        pools = [
            [b for b in other.elements() if other.element_order(b) == self.element_order(g)]
            for g in gens
        ]
        for images in itertools.product(*pools):
            phi = [0] * self.order
            for x, w in words.items():
                y = other.identity
                for i in w:
                    y = other.table[y][images[i]]
                phi[x] = y
            if len(set(phi)) != self.order:
                continue
            if all(
                phi[self.table[a][b]] == other.table[phi[a]][phi[b]]
                for a in range(self.order)
                for b in range(self.order)
            ):
                yield tuple(phi)

    def to_json(self) -> dict:
        out = {"order": self.order, "table": [list(r) for r in self.table]}
        if self.name:
            out["name"] = self.name
        return out

    def __repr__(self):
        return f"FiniteGroup({self.name or self.order})"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), name=f"Z{n}")


def symmetric3() -> FiniteGroup:
    perms = sorted(itertools.permutations(range(3)))
    # identity (0,1,2) sorts first, so it gets index 0
    index = {p: i for i, p in enumerate(perms)}

    def compose(p, q):  # apply p then q
        return tuple(q[p[i]] for i in range(3))

    table = tuple(tuple(index[compose(p, q)] for q in perms) for p in perms)
    return FiniteGroup(table, name="S3")


def group_from_shorthand(text: str) -> FiniteGroup:
    """``"Z2"`` .. ``"Z12"`` or ``"S3"``."""
    t = text.strip()
    if t.upper() == "S3":
        return symmetric3()
    if t[:1] in "Zz" and t[1:].isdigit():
        n = int(t[1:])
        if 1 <= n <= 12:
            return cyclic(n)
    raise ValueError(f"unknown group shorthand {text!r} (use Z1..Z12 or S3)")


def group_from_json(obj) -> "FiniteGroup | FormalProduct | None":
    """Parse a vertex group entry; ``None`` means trivial."""
    if obj is None or obj == "trivial":
        return None
    if isinstance(obj, str):
        return group_from_shorthand(obj)
    if "formal_product" in obj:
        factors = []
        for f in obj["formal_product"]:
            g = group_from_json({k: val for k, val in f.items() if k != "factor"})
            if g is None:
                raise GroupTableError("formal product factors must be nontrivial")
            factors.append((f["factor"], g))
        return FormalProduct(tuple(factors))
    table = obj["table"]
    if "order" in obj and int(obj["order"]) != len(table):
        raise GroupTableError("declared order does not match table size")
    g = FiniteGroup(tuple(tuple(r) for r in table), name=obj.get("name", ""))
    if g.order == 1:
        return None
    return g


@dataclass(frozen=True)
class FormalProduct:
    """Free product of finite groups, kept symbolic.

    Elements are alternating normal forms: tuples of ``(factor, element)``
    with consecutive factors distinct and no identity entries.
    """

    factors: tuple[tuple[str, FiniteGroup], ...]

    @property
    def name(self) -> str:
        return "*".join(f"{v}:{g.name or g.order}" for v, g in self.factors)

    @property
    def identity(self):
        return ()

    def _group(self, factor: str) -> FiniteGroup:
        for v, g in self.factors:
            if v == factor:
                return g
        raise KeyError(factor)

    def mul(self, a, b):
        out = list(a)
        for f, x in b:
            if out and out[-1][0] == f:
                g = self._group(f)
                y = g.mul(out[-1][1], x)
                out.pop()
                if y != g.identity:
                    out.append((f, y))
            else:
                out.append((f, x))
        return tuple(out)

    def inv(self, a):
        return tuple((f, self._group(f).inv(x)) for f, x in reversed(a))

    def is_identity(self, a) -> bool:
        return a == ()

    def embed(self, factor: str, x: int):
        g = self._group(factor)
        return () if x == g.identity else ((factor, x),)

    def generators(self) -> list:
        return [((v, x),) for v, g in self.factors for x in g.nonidentity()]

    def is_trivial(self) -> bool:
        return False

    @property
    def order(self) -> float:
        return float("inf")

    def to_json(self) -> dict:
        return {"formal_product": [{"factor": v, **g.to_json()} for v, g in self.factors]}

    def __repr__(self):
        return f"FormalProduct({self.name})"
