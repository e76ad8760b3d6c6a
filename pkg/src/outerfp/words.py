"""Normal-form words for pi_1 of a graph of groups with trivial edge groups.

pi_1(X) is the free product of the vertex groups with the free group on the
non-tree edges.  A syllable is either ``("v", vertex, element)`` or
``("e", edge, sign)`` where ``edge`` is the canonical id of a non-tree edge
and ``sign`` is +1/-1.  Words are reduced alternating products.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .graphs import GraphOfGroups
from .groups import FiniteGroup, FormalProduct

Syllable = tuple


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    syllables: tuple = ()

    def __len__(self):
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __getitem__(self, i):
        return self.syllables[i]

    def __str__(self):
        return format_word(self)

    def __bool__(self):
        return bool(self.syllables)


EMPTY = Word(())


def _elem_str(vertex: str, elem) -> str:
    if isinstance(elem, tuple):
        inner = "*".join(f"{f}.g{x}" for f, x in elem)
        return f"{vertex}.({inner})"
    return f"{vertex}.g{elem}"


def syllable_str(s: Syllable) -> str:
    if s[0] == "v":
        return _elem_str(s[1], s[2])
    return s[1] if s[2] > 0 else s[1] + "'"


def format_word(u: Word | Sequence[Syllable]) -> str:
    syl = u.syllables if isinstance(u, Word) else tuple(u)
    return "*".join(syllable_str(s) for s in syl) if syl else "1"


def _split_top(text: str, sep: str = "*") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_elem_index(tok: str) -> int:
    if not tok.startswith("g") or not tok[1:].isdigit():
        raise WordError(f"bad element token {tok!r} (expected g<index>)")
    return int(tok[1:])


def parse_syllables(text: str, X: GraphOfGroups) -> list[Syllable]:
    text = text.strip()
    if text in ("", "1", "e", "id"):
        return []
    g = X.graph
    out: list[Syllable] = []
    for tok in _split_top(text):
        tok = tok.strip()
        if not tok:
            raise WordError(f"empty token in {text!r}")
        if tok in g.reverse:
            c = g.canonical(tok)
            out.append(("e", c, 1 if tok == c else -1))
            continue
        if tok.endswith("'") and tok[:-1] in g.reverse:
            base = tok[:-1]
            c = g.canonical(base)
            out.append(("e", c, -1 if base == c else 1))
            continue
        if "." in tok:
            vertex, rest = tok.split(".", 1)
            if vertex not in X.groups:
                raise WordError(f"unknown vertex {vertex!r}")
            grp = X.groups[vertex]
            if rest.startswith("(") and rest.endswith(")"):
                if not isinstance(grp, FormalProduct):
                    raise WordError(f"vertex {vertex} is not a formal product")
                elem = grp.identity
                for sub in _split_top(rest[1:-1]):
                    f, idx = sub.strip().split(".", 1)
                    elem = grp.mul(elem, grp.embed(f, _parse_elem_index(idx)))
                out.append(("v", vertex, elem))
            else:
                out.append(("v", vertex, _parse_elem_index(rest)))
            continue
        raise WordError(f"cannot parse token {tok!r}")
    return out


def parse_word(text: str, X: GraphOfGroups) -> Word:
    return reduce(parse_syllables(text, X), X)


def _check(s: Syllable, X: GraphOfGroups) -> None:
    if s[0] == "v":
        v, x = s[1], s[2]
        if v not in X.groups:
            raise WordError(f"syllable references unknown vertex {v!r}")
        grp = X.groups[v]
        if grp is None:
            if x not in (0, ()):
                raise WordError(f"vertex {v} has trivial group")
        elif isinstance(grp, FiniteGroup):
            if not isinstance(x, int) or not 0 <= x < grp.order:
                raise WordError(f"element {x!r} not in group at {v}")
        elif not isinstance(x, tuple):
            raise WordError(f"element {x!r} not in formal product at {v}")
    elif s[0] == "e":
        if s[1] not in X.nontree_edges:
            raise WordError(f"syllable references unknown or tree edge {s[1]!r}")
        if s[2] not in (1, -1):
            raise WordError("edge letter sign must be +1 or -1")
    else:
        raise WordError(f"bad syllable {s!r}")


def _is_identity_syllable(s: Syllable, X: GraphOfGroups) -> bool:
    if s[0] != "v":
        return False
    grp = X.groups[s[1]]
    return grp is None or grp.is_identity(s[2])


def reduce(raw: Iterable[Syllable], X: GraphOfGroups) -> Word:
    stack: list[Syllable] = []
    for s in raw:
        _check(s, X)
        if _is_identity_syllable(s, X):
            continue
        if stack:
            top = stack[-1]
            if s[0] == "v" and top[0] == "v" and top[1] == s[1]:
                grp = X.groups[s[1]]
                y = grp.mul(top[2], s[2])
                stack.pop()
                if not grp.is_identity(y):
                    stack.append(("v", s[1], y))
                continue
            if s[0] == "e" and top[0] == "e" and top[1] == s[1] and top[2] == -s[2]:
                stack.pop()
                continue
        stack.append(s)
    return Word(tuple(stack))


def invert_syllable(s: Syllable, X: GraphOfGroups) -> Syllable:
    if s[0] == "v":
        return ("v", s[1], X.groups[s[1]].inv(s[2]))
    return ("e", s[1], -s[2])


def invert(u: Word, X: GraphOfGroups) -> Word:
    return Word(tuple(invert_syllable(s, X) for s in reversed(u.syllables)))


def multiply(u: Word, v: Word, X: GraphOfGroups) -> Word:
    return reduce(u.syllables + v.syllables, X)


def product(words: Iterable[Word], X: GraphOfGroups) -> Word:
    raw: list[Syllable] = []
    for w in words:
        raw.extend(w.syllables)
    return reduce(raw, X)


def power(u: Word, n: int, X: GraphOfGroups) -> Word:
    if n < 0:
        return power(invert(u, X), -n, X)
    return reduce(u.syllables * n, X)


def conjugate(u: Word, w: Word, X: GraphOfGroups) -> Word:
    """w^-1 u w."""
    return product([invert(w, X), u, w], X)


def _interacts(last: Syllable, first: Syllable) -> bool:
    if last[0] == "v" and first[0] == "v":
        return last[1] == first[1]
    if last[0] == "e" and first[0] == "e":
        return last[1] == first[1] and last[2] == -first[2]
    return False


def cyclic_reduce(u: Word, X: GraphOfGroups) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with u = conjugator * core * conjugator^-1.

    Strips the first syllable into the conjugator until the last and first
    syllables no longer interact.
    """
    core = u.syllables
    conj: list[Syllable] = []
    while len(core) >= 2 and _interacts(core[-1], core[0]):
        conj.append(core[0])
        core = reduce(core[1:] + core[:1], X).syllables
    return Word(core), reduce(conj, X)


def rotations(core: Word) -> list[Word]:
    s = core.syllables
    return [Word(s[i:] + s[:i]) for i in range(len(s))] or [core]


def conjugacy_canonical(u: Word, X: GraphOfGroups) -> Word:
    core, _ = cyclic_reduce(u, X)
    return min(rotations(core), key=format_word)


def alphabet(X: GraphOfGroups) -> list[Syllable]:
    letters: list[Syllable] = []
    for v in X.nonfree_vertices():
        grp = X.groups[v]
        if not isinstance(grp, FiniteGroup):
            raise WordError(f"cannot enumerate elements of formal product at {v}")
        letters.extend(("v", v, x) for x in grp.nonidentity())
    for e in X.nontree_edges:
        letters.append(("e", e, 1))
        letters.append(("e", e, -1))
    return sorted(letters, key=syllable_str)


def enumerate_words(X: GraphOfGroups, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All reduced words with ``min_len <= length <= max_len``, grouped by
    length and in lexicographic syllable order within a length."""
    letters = alphabet(X)

    def extend(prefix: tuple, n: int):
        if n == 0:
            yield Word(prefix)
            return
        for s in letters:
            if prefix and (_interacts(prefix[-1], s)):
                continue
            yield from extend(prefix + (s,), n - 1)

    for n in range(min_len, max_len + 1):
        yield from extend((), n)


def standard_generators(X: GraphOfGroups) -> list[Syllable]:
    """Vertex-group generators (all nonidentity elements, or the factor
    elements of a formal product) followed by positive non-tree edge letters."""
    gens: list[Syllable] = []
    for v in X.nonfree_vertices():
        grp = X.groups[v]
        if isinstance(grp, FiniteGroup):
            gens.extend(("v", v, x) for x in grp.nonidentity())
        else:
            gens.extend(("v", v, x) for x in grp.generators())
    gens.extend(("e", e, 1) for e in X.nontree_edges)
    return gens
