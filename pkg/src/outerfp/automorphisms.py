"""Automorphisms of pi_1 given by images of the standard generators.

Automorphisms act on the right, ``(g)alpha``, and composition ``a.then(b)``
means apply ``a`` first.  An :class:`OuterAutomorphism` carries an explicit
inverse and a witness that it permutes the conjugacy classes of the vertex
groups.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .bass_serre import elliptic_parts, translation_length
from .graphs import GraphOfGroups
from .groups import FiniteGroup, FormalProduct
from .words import (
    EMPTY,
    Syllable,
    Word,
    alphabet,
    conjugate,
    format_word,
    invert,
    parse_syllables,
    parse_word,
    product,
    standard_generators,
    syllable_str,
    _interacts,
)


class NotAHomomorphism(ValueError):
    pass


class NotInvariant(ValueError):
    def __init__(self, message: str, generator: str | None = None):
        super().__init__(message)
        self.generator = generator


class InverseNotVerified(ValueError):
    pass


def _vertex_blocks(X: GraphOfGroups):
    """Yield ``(vertex, group, key)`` where ``key(x)`` builds the syllable
    element for ``x`` in ``group``; formal products give one block per factor."""
    for v in X.nonfree_vertices():
        grp = X.groups[v]
        if isinstance(grp, FiniteGroup):
            yield v, grp, (lambda x: x)
        else:
            for f, g in grp.factors:
                yield v, g, (lambda x, f=f, g=g: () if x == g.identity else ((f, x),))


def extend_images(X: GraphOfGroups, partial: Mapping[Syllable, Word]) -> dict[Syllable, Word]:
    """Complete generator images to every standard generator.

    Images given for some elements of a vertex group are extended
    multiplicatively; those elements must generate the group and the
    resulting map must respect the multiplication table.  Generators with no
    image at all are sent to themselves.
    """
    full: dict[Syllable, Word] = {}
    for v, grp, key in _vertex_blocks(X):
        given = {x: partial[("v", v, key(x))] for x in grp.nonidentity() if ("v", v, key(x)) in partial}
        if not given:
            for x in grp.nonidentity():
                full[("v", v, key(x))] = Word((("v", v, key(x)),))
            continue
        img = {grp.identity: EMPTY}
        queue = deque([grp.identity])
        while queue:
            x = queue.popleft()
            for s, ws in given.items():
                y = grp.mul(x, s)
                cand = product([img[x], ws], X)
                if y not in img:
                    img[y] = cand
                    queue.append(y)
                elif img[y] != cand:
                    raise NotAHomomorphism(
                        f"images at {v} violate the group relations ({syllable_str(('v', v, key(y)))})"
                    )
        if len(img) != grp.order:
            raise NotAHomomorphism(f"given images at {v} do not generate the vertex group")
        for a in grp.elements():
            for b in grp.elements():
                if img[grp.mul(a, b)] != product([img[a], img[b]], X):
                    raise NotAHomomorphism(f"images at {v} are not multiplicative")
        for x in grp.nonidentity():
            full[("v", v, key(x))] = img[x]
    for e in X.nontree_edges:
        s = ("e", e, 1)
        full[s] = partial.get(s, Word((s,)))
    return full


@dataclass(frozen=True, eq=False)
class EndoSpec:
    """An endomorphism given on the standard generators of ``X``."""

    X: GraphOfGroups
    images: Mapping[Syllable, Word]

    @classmethod
    def from_partial(cls, X: GraphOfGroups, partial: Mapping[Syllable, Word], validate: bool = True):
        if validate:
            return cls(X, extend_images(X, partial))
        full = {s: Word((s,)) for s in standard_generators(X)}
        full.update(partial)
        return cls(X, full)

    @classmethod
    def identity(cls, X: GraphOfGroups) -> "EndoSpec":
        return cls(X, {s: Word((s,)) for s in standard_generators(X)})

    def image_of(self, s: Syllable) -> Word:
        X = self.X
        if s[0] == "e":
            w = self.images[("e", s[1], 1)]
            return w if s[2] > 0 else invert(w, X)
        grp = X.groups[s[1]]
        if isinstance(grp, FormalProduct):
            return product([self.images[("v", s[1], (p,))] for p in s[2]], X)
        return self.images[s]

    def apply(self, u: Word) -> Word:
        return product([self.image_of(s) for s in u.syllables], self.X)

    def then(self, other: "EndoSpec") -> "EndoSpec":
        """``g -> ((g)self)other``."""
        return EndoSpec(self.X, {s: other.apply(w) for s, w in self.images.items()})

    def max_image_length(self) -> int:
        return max((len(w) for w in self.images.values()), default=0)

    def generator_images(self) -> dict[str, str]:
        return {syllable_str(s): format_word(w) for s, w in self.images.items()}


def default_inner_bound(beta: EndoSpec) -> int:
    return 2 * beta.max_image_length() + 2


def is_inner(beta: EndoSpec, bound: int | None = None) -> Word | None:
    """A word ``w`` with ``(g)beta = w^-1 g w`` on every standard generator,
    the first in length-then-lexicographic order, or ``None`` if no such word
    of syllable length <= ``bound`` exists (inconclusive, not a proof that
    beta is outer)."""
    X = beta.X
    if bound is None:
        bound = default_inner_bound(beta)
    gens = [(Word((s,)), beta.images[s]) for s in standard_generators(X)]
    letters = alphabet(X)

    def works(w: Word) -> bool:
        return all(conjugate(g, w, X) == img for g, img in gens)

    # depth-first by length keeps memory flat
    def search(prefix: tuple, n: int):
        if n == 0:
            w = Word(prefix)
            return w if works(w) else None
        for s in letters:
            if prefix and _interacts(prefix[-1], s):
                continue
            hit = search(prefix + (s,), n - 1)
            if hit is not None:
                return hit
        return None

    for n in range(bound + 1):
        hit = search((), n)
        if hit is not None:
            return hit
    return None


@dataclass(frozen=True)
class InvarianceWitness:
    """``(G_v)alpha = w_v^-1 G_sigma(v) w_v`` for every non-free vertex v."""

    sigma: Mapping[str, str]
    conjugators: Mapping[str, Word]

    def cycle_notation(self) -> str:
        seen: set[str] = set()
        parts = []
        for v in sorted(self.sigma):
            if v in seen or self.sigma[v] == v:
                seen.add(v)
                continue
            cyc = [v]
            seen.add(v)
            w = self.sigma[v]
            while w != v:
                cyc.append(w)
                seen.add(w)
                w = self.sigma[w]
            parts.append("(" + " ".join(cyc) + ")")
        return "".join(parts) or "id"

    def to_json(self) -> dict:
        return {
            "sigma": dict(sorted(self.sigma.items())),
            "conjugators": {v: format_word(w) for v, w in sorted(self.conjugators.items())},
        }


def check_invariance(alpha) -> InvarianceWitness:
    """Find the permutation of vertex-group classes induced by ``alpha``
    (an :class:`EndoSpec` or :class:`OuterAutomorphism`), or raise
    :class:`NotInvariant` naming an offending generator."""
    spec = alpha.forward if isinstance(alpha, OuterAutomorphism) else alpha
    X = spec.X
    sigma: dict[str, str] = {}
    conj: dict[str, Word] = {}
    for v in X.nonfree_vertices():
        grp = X.groups[v]
        gens = [s for s in standard_generators(X) if s[0] == "v" and s[1] == v]
        target = None
        hs = set()
        for s in gens:
            img = spec.image_of(s)
            name = syllable_str(s)
            if not img.syllables:
                raise NotInvariant(f"{name} maps to the identity", name)
            parts = elliptic_parts(img, X)
            if parts is None:
                raise NotInvariant(
                    f"image of {name} is hyperbolic (translation length {translation_length(img, X)})", name
                )
            u, c, h = parts
            if target is None:
                target = (u, c)
            elif target != (u, c):
                raise NotInvariant(f"images of the group at {v} do not fix a common vertex", name)
            hs.add(h)
        u, c = target
        tgt = X.groups[u]
        if isinstance(grp, FiniteGroup):
            if not isinstance(tgt, FiniteGroup) or tgt.order != grp.order or len(hs) != grp.order - 1:
                raise NotInvariant(f"group at {v} is not mapped onto a conjugate of G_{u}")
        sigma[v] = u
        conj[v] = invert(c, X)
    if len(set(sigma.values())) != len(sigma):
        raise NotInvariant("vertex groups are not permuted: two classes map to the same class")
    return InvarianceWitness(sigma, conj)


@dataclass(frozen=True, eq=False)
class OuterAutomorphism:
    forward: EndoSpec
    backward: EndoSpec
    witness: InvarianceWitness = field(compare=False)

    @property
    def X(self) -> GraphOfGroups:
        return self.forward.X

    @classmethod
    def from_specs(cls, forward: EndoSpec, backward: EndoSpec, bound: int | None = None):
        for a, b, label in ((forward, backward, "backward after forward"), (backward, forward, "forward after backward")):
            comp = a.then(b)
            if is_inner(comp, bound) is None:
                raise InverseNotVerified(f"{label} is not inner within the search bound")
        return cls(forward, backward, check_invariance(forward))

    @classmethod
    def from_images(
        cls,
        X: GraphOfGroups,
        images: Mapping[str, str],
        inverse_images: Mapping[str, str],
        bound: int | None = None,
    ) -> "OuterAutomorphism":
        fwd = EndoSpec.from_partial(X, parse_images(X, images))
        bwd = EndoSpec.from_partial(X, parse_images(X, inverse_images))
        return cls.from_specs(fwd, bwd, bound)

    @classmethod
    def identity(cls, X: GraphOfGroups) -> "OuterAutomorphism":
        e = EndoSpec.identity(X)
        return cls(e, e, check_invariance(e))

    def apply(self, u: Word) -> Word:
        return self.forward.apply(u)

    def inverse(self) -> "OuterAutomorphism":
        return OuterAutomorphism(self.backward, self.forward, check_invariance(self.backward))

    def then(self, other: "OuterAutomorphism") -> "OuterAutomorphism":
        fwd = self.forward.then(other.forward)
        bwd = other.backward.then(self.backward)
        return OuterAutomorphism(fwd, bwd, check_invariance(fwd))

    def to_json(self) -> dict:
        return {
            "images": dict(sorted(self.forward.generator_images().items())),
            "inverse_images": dict(sorted(self.backward.generator_images().items())),
        }


def apply(alpha, u: Word) -> Word:
    return alpha.apply(u)


def twisted_translation_length(alpha, u: Word, X: GraphOfGroups | None = None):
    """Length of ``u`` in the twisted tree: ``l((u)alpha)``."""
    X = X or alpha.X
    return translation_length(alpha.apply(u), X)


def parse_images(X: GraphOfGroups, images: Mapping[str, str]) -> dict[Syllable, Word]:
    out: dict[Syllable, Word] = {}
    for key, text in images.items():
        syl = parse_syllables(key, X)
        if len(syl) != 1:
            raise ValueError(f"image key {key!r} is not a single generator")
        s = syl[0]
        w = parse_word(text, X)
        if s[0] == "e" and s[2] < 0:
            s, w = ("e", s[1], 1), invert(w, X)
        if s in out and out[s] != w:
            raise ValueError(f"conflicting images for {key!r}")
        out[s] = w
    return out


def automorphism_from_json(obj: Mapping, X: GraphOfGroups, bound: int | None = None) -> OuterAutomorphism:
    images = obj.get("images", {})
    inverse = obj.get("inverse_images")
    if inverse is None:
        if images:
            raise InverseNotVerified("inverse_images must be supplied")
        inverse = {}
    return OuterAutomorphism.from_images(X, images, inverse, bound)


def inner_automorphism(X: GraphOfGroups, w: Word) -> OuterAutomorphism:
    """Conjugation ``g -> w^-1 g w``."""
    wi = invert(w, X)
    fwd = EndoSpec(X, {s: conjugate(Word((s,)), w, X) for s in standard_generators(X)})
    bwd = EndoSpec(X, {s: conjugate(Word((s,)), wi, X) for s in standard_generators(X)})
    return OuterAutomorphism(fwd, bwd, check_invariance(fwd))
