import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from outerfp.automorphisms import OuterAutomorphism
from outerfp.bass_serre import crossing_vector, translation_length
from outerfp.factor_systems import build_thistle
from outerfp.groups import FiniteGroup
from outerfp.lipschitz import (
    DUMBBELL,
    MalformedPath,
    MetricError,
    SimplexCoords,
    SimplicialPath,
    StretchOracle,
    brute_force_stretch,
    displacement_on_simplex,
    enumerate_candidates,
    grid_points,
    grid_scan,
    is_fixed_point,
    is_simplex_center,
    metric_vector,
    stretch_factor,
    validate_simplicial_path,
)
from outerfp.words import Word, conjugacy_canonical, format_word, parse_word

from conftest import Z2, Z3, cyclic_auto, edge23, instance_suite, rose2, star3

SUITE = instance_suite()
IDS = [s[0] for s in SUITE]


def canon(text, X):
    return conjugacy_canonical(parse_word(text, X), X)


def test_rose_candidates():
    R = rose2()
    ws = {c.witness for c in enumerate_candidates(R)}
    for t in ("x", "y", "x*y", "x*y'"):
        assert canon(t, R) in ws
    assert len(ws) == 4


def test_star_candidates_are_the_three_dumbbells(T3):
    cands = enumerate_candidates(T3)
    assert {format_word(c.witness) for c in cands} == {
        format_word(canon(t, T3)) for t in ("v1.g1*v2.g1", "v1.g1*v3.g1", "v2.g1*v3.g1")
    }
    assert all(c.kind == DUMBBELL for c in cands)


def test_single_edge_has_one_candidate(E):
    cands = enumerate_candidates(E)
    assert len(cands) == 1 and cands[0].witness == canon("v1.g1*v2.g1", E)


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
def test_candidates_are_cyclically_reduced_and_hyperbolic(name, X, a):
    for c in enumerate_candidates(X):
        assert conjugacy_canonical(c.witness, X) == c.witness
        assert translation_length(c.witness, X) > 0
        cv = crossing_vector(c.witness, X)
        assert c.crossing == tuple(cv[e] for e in X.unoriented)
        assert max(c.crossing) <= 2


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
def test_dumbbell_element_independence(name, X, a):
    # swapping any vertex-group element for another nontrivial one keeps both crossing vectors
    table = StretchOracle.candidates(a, X).right
    for n, m, w in table.rows:
        for i, s in enumerate(w.syllables):
            if s[0] != "v" or not isinstance(X.groups[s[1]], FiniteGroup):
                continue
            for h in X.groups[s[1]].nonidentity():
                w2 = Word(w.syllables[:i] + (("v", s[1], h),) + w.syllables[i + 1 :])
                cv = crossing_vector(w2, X)
                assert tuple(cv[e] for e in X.unoriented) == n
                cm = crossing_vector(a.apply(w2), X)
                assert tuple(cm[e] for e in X.unoriented) == m


def test_stretch_examples():
    X = star3(["1/2", "1/4", "1/4"])
    a = cyclic_auto(X)
    rep = stretch_factor(a, X)
    assert rep.lambdaR == Fraction(3, 2)
    assert format_word(rep.witnessR) == "v2.g1*v3.g1"
    assert rep.lambdaSym == rep.lambdaR * rep.lambdaL
    assert stretch_factor(a, X, ["1/3"] * 3).lambdaR == 1
    ident = stretch_factor(OuterAutomorphism.identity(X), X)
    assert ident.lambdaR == ident.lambdaL == 1


def test_brute_force_examples(T3, alpha):
    x = ["1/2", "1/4", "1/4"]
    bf2 = brute_force_stretch(alpha, T3, x, L=2)
    assert bf2.lambdaR == Fraction(3, 2)
    assert brute_force_stretch(OuterAutomorphism.identity(T3), T3, x, L=3).lambdaR == 1
    with pytest.raises(ValueError):
        brute_force_stretch(alpha, T3, x, L=1)


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
def test_brute_force_never_exceeds_candidates(name, X, a):
    rng = random.Random(name)
    bf = StretchOracle.brute_force(a, X, 5)
    cand = StretchOracle.candidates(a, X)
    n = len(X.unoriented)
    for _ in range(5):
        raw = [rng.randint(1, 9) for _ in range(n)]
        x = [Fraction(r, sum(raw)) for r in raw]
        b, c = bf.report(x), cand.report(x)
        assert b.lambdaR <= c.lambdaR and b.lambdaL <= c.lambdaL


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
@settings(max_examples=15)
@given(raw=st.lists(st.integers(1, 20), min_size=4, max_size=4), mu=st.fractions(Fraction(1, 10), 10))
def test_rescaling_invariance(name, X, a, raw, mu):
    raw = raw[: len(X.unoriented)]
    x = [Fraction(r, sum(raw)) for r in raw]
    oracle = StretchOracle.candidates(a, X)
    assert oracle.report(x) == oracle.report([mu * v for v in x])


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
def test_submultiplicativity(name, X, a):
    rng = random.Random(1)
    sq = a.then(a)
    one, two = StretchOracle.candidates(a, X), StretchOracle.candidates(sq, X)
    for _ in range(5):
        raw = [rng.randint(1, 9) for _ in range(len(X.unoriented))]
        x = [Fraction(r, sum(raw)) for r in raw]
        # Lambda(alpha T, alpha^2 T) equals Lambda(T, alpha T)
        assert two.lambda_r(x) <= one.lambda_r(x) ** 2


def test_metric_errors(T3):
    with pytest.raises(MetricError):
        SimplexCoords.of(T3, [1, 0, 0])
    with pytest.raises(MetricError):
        SimplexCoords.of(T3, ["1/2", "1/2", "1/2"])
    with pytest.raises(MetricError):
        metric_vector(T3, [1, 1])


def test_fixed_point_examples(alpha):
    X = alpha.X
    assert is_fixed_point(alpha, X, ["1/3"] * 3)
    cert = is_fixed_point(alpha, X, ["1/2", "1/4", "1/4"])
    assert not cert and cert.report.lambdaR == Fraction(3, 2)
    assert is_fixed_point(OuterAutomorphism.identity(X), X, ["1/5", "1/5", "3/5"])


def test_displacement_examples(alpha):
    X = alpha.X
    d = displacement_on_simplex(alpha, X)
    assert d.value == 1 and d.exact
    assert d.argmin.values == (Fraction(1, 3),) * 3
    assert d.to_json()["displacement"] == "1"
    ident = displacement_on_simplex(OuterAutomorphism.identity(X), X)
    assert ident.value == 1 and ident.exact
    Y = build_thistle([Z2, Z2], 0)
    swap = OuterAutomorphism.from_images(Y, {"v1.g1": "v2.g1", "v2.g1": "v1.g1"}, {"v1.g1": "v2.g1", "v2.g1": "v1.g1"})
    d1 = displacement_on_simplex(swap, Y)
    assert d1.value == 1 and d1.argmin.values == (1,)


def test_displacement_rejects_bad_eps(alpha):
    with pytest.raises(MetricError):
        displacement_on_simplex(alpha, alpha.X, eps=Fraction(1, 3))
    with pytest.raises(ValueError):
        displacement_on_simplex(alpha, alpha.X, tolerance=0)


@pytest.mark.parametrize("name,X,a", SUITE, ids=IDS)
def test_displacement_below_grid(name, X, a):
    oracle = StretchOracle.candidates(a, X)
    d = displacement_on_simplex(a, X, oracle=oracle)
    tol = Fraction(1, 10**6)
    assert oracle.lambda_r(d.argmin) - d.value <= tol
    assert d.bracket[1] - d.bracket[0] <= tol
    for pt in grid_points(len(X.unoriented), 12):
        assert d.value <= oracle.lambda_r(pt) + tol


def test_grid_scan_cyclic(alpha):
    scan = grid_scan(alpha, alpha.X, 12)
    assert scan.points == 55
    assert scan.minimum == 1 and scan.minimizers == ((Fraction(1, 3),) * 3,)
    assert scan.strict_off_center


def test_simplex_centers():
    assert is_simplex_center(["1/3"] * 3)
    assert not is_simplex_center(["1/2", "1/4", "1/4"])
    assert is_simplex_center([1])


def test_simplicial_paths():
    c = ("1/3", "1/3", "1/3")
    rep = validate_simplicial_path(SimplicialPath((("s", c), ("s", ("1/2", "1/4", "1/4")))))
    assert not rep.through_centers_only
    assert rep.segments[0].center_params == "t=0"
    assert validate_simplicial_path(SimplicialPath((("s", c), ("s", c)))).through_centers_only
    crossing = validate_simplicial_path(SimplicialPath((("s", ("1/2", "1/4", "1/4")), ("s", ("1/6", "5/12", "5/12")))))
    assert crossing.segments[0].center_params == "t=1/2"
    with pytest.raises(MalformedPath):
        validate_simplicial_path(SimplicialPath((("s", c), ("t", c))))
    with pytest.raises(MalformedPath):
        validate_simplicial_path(SimplicialPath((("s", c), ("s", ("1/2", "1/2")))))
