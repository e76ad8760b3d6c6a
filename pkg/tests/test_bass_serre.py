import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from outerfp import _kernels_py
from outerfp.bass_serre import (
    EllipticWord,
    build_ball,
    crossing_vector,
    elliptic_parts,
    fixed_vertex,
    fixed_vertices,
    loop_to_word,
    oracle_translation_length,
    translation_length,
    word_to_loop,
)
from outerfp.factor_systems import build_thistle
from outerfp.words import EMPTY, alphabet, conjugate, enumerate_words, parse_word, power, product, reduce

from conftest import Z2, Z3, cyclic_auto, edge23, rose2, star3, two_spoke23

try:
    from outerfp import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

X = build_thistle([Z2, Z3], 1, ["1/2", "1/3", "1/6"])


def words(G, max_size=6):
    return st.lists(st.sampled_from(alphabet(G)), max_size=max_size).map(lambda raw: reduce(raw, G))


def test_word_to_loop_examples():
    E = edge23()
    loop = word_to_loop(EMPTY, E)
    assert loop.edges == () and loop.start == E.basepoint
    R = rose2()
    x = parse_word("x", R)
    assert word_to_loop(x, R).edges == ("x",)
    S = two_spoke23()
    ab = parse_word("v1.g1*v2.g1", S)
    loop = word_to_loop(ab, S)
    assert loop.edges == ("e1", "e2'", "e2", "e1'")
    assert loop_to_word(loop, S) == ab


def test_translation_length_examples():
    S = two_spoke23()
    a, ab = parse_word("v1.g1", S), parse_word("v1.g1*v2.g1", S)
    assert translation_length(a, S) == 0
    assert translation_length(ab, S) == 2
    assert translation_length(power(ab, 2, S), S) == 4
    ball = build_ball(S, 5)
    assert oracle_translation_length(ab, ball) == 2
    assert oracle_translation_length(power(ab, 2, S), ball) == 4
    E = edge23()
    assert translation_length(parse_word("v1.g1*v2.g1", E), E) == 2


def test_crossing_vector_examples():
    S = two_spoke23()
    ab = parse_word("v1.g1*v2.g1", S)
    assert crossing_vector(ab, S) == {"e1": 2, "e2": 2}
    rng = random.Random(7)
    for _ in range(3):
        l1, l2 = Fraction(rng.randint(1, 9), 7), Fraction(rng.randint(1, 9), 5)
        S2 = two_spoke23(l1, l2)
        assert translation_length(ab, S2) == 2 * l1 + 2 * l2
    R = rose2()
    assert crossing_vector(parse_word("x", R), R) == {"x": 1, "y": 0}
    with pytest.raises(EllipticWord):
        crossing_vector(parse_word("v1.g1", S), S)


def test_ball_size_and_unique_fixed_vertex():
    E = edge23()
    ball = build_ball(E, 2)
    assert len(ball) == 7
    a = parse_word("v1.g1", E)
    assert oracle_translation_length(a, ball) == 0
    assert len(fixed_vertices(a, ball)) == 1
    assert "n0" in ball.to_dot()


def test_oracle_is_unknown_when_radius_too_small():
    E = edge23()
    u = parse_word("v1.g1*v2.g1*v1.g1*v2.g2", E)
    assert oracle_translation_length(u, build_ball(E, 1)) is None
    assert oracle_translation_length(u, build_ball(E, 6)) == translation_length(u, E)


def test_oracle_agreement_small_words():
    ball = build_ball(X, 3)
    for u in enumerate_words(X, 4):
        if not u.syllables:
            continue
        lam = oracle_translation_length(u, ball)
        if lam is not None:
            assert lam == translation_length(u, X)


def test_fixed_vertex_matches_ball():
    T = star3()
    ball = build_ball(T, 3)
    for u in enumerate_words(T, 5, 1):
        fv = fixed_vertex(u, T)
        hits = fixed_vertices(u, ball)
        if fv is None:
            assert hits == []
        else:
            assert len(hits) == 1
            depth = sum((T.lengths[e] for e in fv[1::2]), Fraction(0))
            assert ball.depth(hits[0]) == depth
            assert ball.projection(hits[0]) == (T.graph.terminal(fv[-2]) if len(fv) > 1 else T.basepoint)


@given(st.data())
def test_elliptic_parts_recombine(data):
    u = data.draw(words(X))
    if not u.syllables:
        return
    parts = elliptic_parts(u, X)
    if parts is None:
        assert translation_length(u, X) > 0
        return
    v, c, h = parts
    from outerfp.words import Word, invert

    assert product([c, Word((("v", v, h),)), invert(c, X)], X) == u


@given(st.data())
def test_conjugacy_invariance(data):
    u, w = data.draw(words(X)), data.draw(words(X))
    assert translation_length(conjugate(u, w, X), X) == translation_length(u, X)


@given(st.data(), st.integers(1, 4))
def test_homogeneity(data, n):
    u = data.draw(words(X))
    assert translation_length(power(u, n, X), X) == n * translation_length(u, X)


@given(st.data())
def test_crossing_vector_is_linear(data):
    u = data.draw(words(X))
    if translation_length(u, X) == 0:
        return
    cv = crossing_vector(u, X)
    assert translation_length(u, X) == sum(cv[e] * X.lengths[e] for e in X.unoriented)


def test_twisted_orbits_match_projection_classes():
    T = star3()
    alpha = cyclic_auto(T)
    ball = build_ball(T, 3)
    for s in alphabet(T):
        from outerfp.words import Word

        g = Word((s,))
        for act in (ball.action(g), ball.action(alpha.apply(g))):
            for i, j in act.items():
                assert ball.projection(i) == ball.projection(j)
    # every vertex over the basepoint is reached from the base lift by some word
    reached = {0}
    for u in enumerate_words(T, 3):
        j = ball.image(alpha.apply(u), 0)
        if j is not None:
            reached.add(j)
    over_base = {i for i in range(len(ball)) if ball.projection(i) == T.basepoint and ball.depth(i) <= 2}
    assert over_base <= reached


@pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")
def test_kernel_backends_agree():
    rng = random.Random(3)
    for G in (X, star3(), edge23()):
        ball = build_ball(G, 2)
        flat, offsets = ball._flat
        enc = ball.encoding
        c = enc.ctx
        ctx_py = _kernels_py.Context(c.initial, c.gtab, c.goff, c.gord, c.gid, c.elen, c.base)
        ctx_c = _kernels_c.Context(c.initial, c.gtab, c.goff, c.gord, c.gid, c.elen, c.base)
        letters = alphabet(G)
        for _ in range(30):
            u = reduce([rng.choice(letters) for _ in range(rng.randint(0, 6))], G)
            loop = enc.encode_word(u)
            assert _kernels_py.displacements(ctx_py, loop, flat, offsets) == _kernels_c.displacements(
                ctx_c, loop, flat, offsets
            )
            lab = ball.labels[rng.randrange(len(ball))]
            assert _kernels_py.act(ctx_py, loop, lab) == _kernels_c.act(ctx_c, loop, lab)
