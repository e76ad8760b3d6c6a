"""Free factor systems as conjugacy classes of vertex groups, the thistle
graph of groups realising a free product decomposition, and containment."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .bass_serre import fixed_vertex
from .graphs import GraphOfGroups, build_graph, require_valid, to_fraction
from .groups import FiniteGroup, FormalProduct
from .words import Word, format_word, multiply, syllable_str


class InvalidConfiguration(ValueError):
    pass


CENTER = "vinf"


def build_thistle(
    factors: Sequence[FiniteGroup],
    rank: int = 0,
    lengths: Sequence | None = None,
) -> GraphOfGroups:
    """Graph of groups for ``G_1 * ... * G_k * F_r``.

    Vertices ``v1..vk`` carry the factors and are joined by spokes ``e1..ek``
    to a free centre ``vinf`` with petals ``p1..pr``.  Two special shapes:
    ``k=1, r=0`` is the single vertex carrying G_1 (degenerate, it fails
    validation because the tree is a point) and ``k=2, r=0`` is the single
    edge ``e1`` from ``v1`` to ``v2``, since the centre would be a free vertex
    of degree 2.  ``k=0, r=1`` cannot be realised and raises.
    """
    k = len(factors)
    if rank < 0 or k + rank < 1:
        raise InvalidConfiguration("need at least one factor or petal")
    if k == 0 and rank == 1:
        raise InvalidConfiguration("a single petal gives a free vertex of degree 2")
    groups: dict = {f"v{i + 1}": g for i, g in enumerate(factors)}
    if k == 1 and rank == 0:
        return build_graph(groups, [])
    if k == 2 and rank == 0:
        n_edges = 1
    else:
        n_edges = k + rank
    if lengths is None:
        lens = [Fraction(1, n_edges)] * n_edges
    else:
        lens = [to_fraction(x) for x in lengths]
        if len(lens) != n_edges:
            raise InvalidConfiguration(f"expected {n_edges} lengths, got {len(lens)}")
    if k == 2 and rank == 0:
        return build_graph(groups, [("e1", "e1'", "v1", "v2", lens[0])])
    groups[CENTER] = None
    edges = [(f"e{i + 1}", f"e{i + 1}'", f"v{i + 1}", CENTER, lens[i]) for i in range(k)]
    edges += [(f"p{j + 1}", f"p{j + 1}'", CENTER, CENTER, lens[k + j]) for j in range(rank)]
    return build_graph(groups, edges)


@dataclass(frozen=True, eq=False)
class FreeFactorSystem:
    """The classes ``[G_v]`` for the non-free vertices of ``reference``."""

    representatives: tuple[str, ...]
    reference: GraphOfGroups

    def __len__(self):
        return len(self.representatives)

    @property
    def is_proper(self) -> bool:
        # G itself is elliptic only when the tree is a point
        X = self.reference
        return len(X.vertices) > 1 or bool(X.graph.edges)

    def generators(self, v: str) -> list[tuple]:
        grp = self.reference.groups[v]
        if isinstance(grp, FiniteGroup):
            return [("v", v, x) for x in grp.nonidentity()]
        return [("v", v, x) for x in grp.generators()]

    def describe(self) -> list[str]:
        out = []
        for v in self.representatives:
            grp = self.reference.groups[v]
            name = grp.name if isinstance(grp, FormalProduct) else (grp.name or f"order {grp.order}")
            out.append(f"[{v}: {name}]")
        return out


def ffs_of(X: GraphOfGroups) -> FreeFactorSystem:
    return FreeFactorSystem(tuple(X.nonfree_vertices()), X)


def identity_dictionary(F: FreeFactorSystem) -> dict[str, Word]:
    return {
        syllable_str(s): Word((s,)) for v in F.representatives for s in F.generators(v)
    }


def common_fixed_vertex(words: Sequence[Word], X: GraphOfGroups):
    """The vertex fixed by every word, if the subgroup they generate is
    elliptic; otherwise ``None``.  Nontrivial elliptic elements of an
    edge-free tree fix exactly one vertex, so all fixed vertices must agree."""
    fixed = None
    for w in words:
        if not w.syllables:
            continue
        p = fixed_vertex(w, X)
        if p is None:
            return None
        if fixed is None:
            fixed = p
        elif p != fixed:
            return None
    return fixed if fixed is not None else ()


def subgroup_is_elliptic(words: Sequence[Word], X: GraphOfGroups) -> bool:
    if common_fixed_vertex(words, X) is None:
        return False
    # pairwise products must stay elliptic; a cheap consistency check
    nontrivial = [w for w in words if w.syllables]
    for i in range(len(nontrivial)):
        for j in range(i + 1, len(nontrivial)):
            uv = multiply(nontrivial[i], nontrivial[j], X)
            if uv.syllables and fixed_vertex(uv, X) is None:
                return False
    return True


def ffs_leq(
    F1: FreeFactorSystem,
    F2: FreeFactorSystem,
    dictionary: Mapping[str, Word] | None = None,
) -> bool:
    """True when every class of F1 is elliptic in F2's tree.

    ``dictionary`` maps the generator tokens of F1's vertex groups (e.g.
    ``"v1.g1"``) to words over F2's reference graph.
    """
    require_valid(F2.reference)
    if dictionary is None:
        if F1.reference != F2.reference:
            raise ValueError("a dictionary is required for different reference graphs")
        dictionary = identity_dictionary(F1)
    for v in F1.representatives:
        images = []
        for s in F1.generators(v):
            key = syllable_str(s)
            if key not in dictionary:
                raise KeyError(f"dictionary incomplete: no image for {key}")
            images.append(dictionary[key])
        if not subgroup_is_elliptic(images, F2.reference):
            return False
    return True


def describe_dictionary(d: Mapping[str, Word]) -> dict[str, str]:
    return {k: format_word(v) for k, v in sorted(d.items())}
