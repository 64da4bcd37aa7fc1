from __future__ import annotations

import collections
import itertools
import math

import numpy as np
import pytest

import dangular.sampler_limit as sl
from dangular.asymptotics_enum import exact_count
from dangular.exact_series import ContractViolation
from dangular.maps import CombinatorialMap, generate_rooted_maps
from dangular.sampler_limit import (
    Coeffs,
    DecoratedScheme,
    assemble_map,
    choose_split,
    condition_a_sequence,
    count_tables,
    density_gk,
    dual_is_dissection,
    is_balanced,
    is_one_sided,
    make_rng,
    randbelow,
    runs,
    sample_batch,
    sample_uniform,
    spine_length,
    spine_profile,
    structuring_edges,
    theoretical_moment,
)
from dangular.scheme_constants import Surface
from dangular.tree_gf import DegreeSet, PlaneTree

CYL = Surface.parse("cylinder")


def _census(surface, D, n):
    return set(generate_rooted_maps(n, n - 2 * surface.chi, D, surface.boundaries, surface.orientable))


def _caterpillar(sides):
    """Binary doubly-rooted tree; sides[i] is 'L' or 'R' for the pendant leaf at spine node i."""
    if not sides:
        return [0], 0
    rest, mk = _caterpillar(sides[1:])
    if sides[0] == "L":
        return [2, 0] + rest, mk + 2
    return [2] + rest + [0], mk + 1


def caterpillar(sides):
    word, mk = _caterpillar(sides)
    return PlaneTree(np.array(word), {mk: "marked"})


# ---------------------------------------------------------------------------
# counting tables


def test_count_tables_examples():
    assert count_tables(CYL, 3, 4).total == 64
    torus = Surface.parse("O1.1")
    assert count_tables(torus, 3, 3).total == 70 == exact_count(torus, 3, 3)
    # odd size with even degrees is inadmissible
    t = count_tables(CYL, 4, 5)
    assert t.total == 0 and not t.admissible
    with pytest.raises(ContractViolation):
        sample_uniform(CYL, 4, 5, seed=1, tables=t)


@pytest.mark.parametrize("code, D", [("cylinder", (3,)), ("moebius", (4,)), ("O1.1", (3, 4)), ("N1.2", (3,))])
def test_count_tables_match_series(code, D):
    s = Surface.parse(code)
    for n in range(1, 9):
        t = count_tables(s, D, n)
        assert t.total == exact_count(s, D, n)
        assert sum(t.scheme_totals()) == t.total


# ---------------------------------------------------------------------------
# randomness helpers


def test_randbelow_range():
    rng = make_rng(0)
    big = 3 * 10 ** 40 + 7
    xs = [randbelow(rng, big) for _ in range(2000)]
    assert all(0 <= x < big for x in xs)
    assert min(xs) < big // 10 and max(xs) > big - big // 10
    with pytest.raises(ValueError):
        randbelow(rng, 0)


def test_choose_split_is_exact(monkeypatch):
    a = Coeffs([1, 3, 0, 7, 2, 5])
    b = Coeffs([2, 0, 1, 4, 1, 9])
    rem = 5
    w = [a[m] * b[rem - m] for m in range(rem + 1)]
    total = sum(w)
    first = [choose_split(make_rng(11), a, b, rem, total) for _ in range(1)]
    rng = make_rng(11)
    draws = [choose_split(rng, a, b, rem, total) for _ in range(400)]
    # forcing the integer fallback must give the same draws
    monkeypatch.setattr(sl, "_MARGIN", 2.0)
    rng = make_rng(11)
    assert [choose_split(rng, a, b, rem, total) for _ in range(400)] == draws
    assert first[0] == draws[0]
    assert all(w[m] > 0 for m in draws)


# ---------------------------------------------------------------------------
# trees and spines


def test_spine_profile_matches_tree_walk():
    rng = make_rng(5)
    D = DegreeSet.of((3, 4))
    for _ in range(200):
        t = sl.random_doubly_rooted(rng, D, int(rng.integers(0, 30)))
        prof = spine_profile(t)
        assert [v for v, _, _ in prof] == t.spine()[:-1]
        kids = t.children()
        path = t.spine()
        for (v, left, right), nxt in zip(prof, path[1:]):
            c = kids[v].index(nxt)
            assert (left, right) == (c, len(kids[v]) - 1 - c)
        assert spine_length(t) == t.spine_length()


def test_one_sided_and_balanced_basics():
    bare = PlaneTree(np.array([0]), {0: "marked"})
    assert is_one_sided(bare) and not is_balanced(bare)
    assert spine_length(bare) == 1
    assert is_one_sided(caterpillar("LLLLL"))
    assert not is_one_sided(caterpillar("LLR"))
    # four two-sided blocks in a row
    assert is_balanced(caterpillar("LRLRLRLR"))
    assert not is_balanced(caterpillar("LRLRLRL"))
    assert not is_balanced(caterpillar("L" * 10))


def _balanced_brute(sides):
    k = len(sides)
    for cuts in itertools.combinations(range(1, k), 3):
        bounds = (0,) + cuts + (k,)
        if all({"L", "R"} <= set(sides[bounds[i]:bounds[i + 1]]) for i in range(4)):
            return True
    return False


def test_balanced_greedy_equals_exhaustive():
    for k in range(0, 11):
        for sides in itertools.product("LR", repeat=k):
            assert is_balanced(caterpillar(sides)) == _balanced_brute(sides)


# ---------------------------------------------------------------------------
# decorated schemes and maps


def _cylinder_scheme():
    return count_tables(CYL, 3, 3).groups[0][0]


def test_hand_built_decorated_scheme():
    rec = _cylinder_scheme()
    bare = PlaneTree(np.array([0]), {0: "marked"})
    two = PlaneTree(np.array([2, 0, 2, 0, 0]), {4: "marked"})  # spine of three edges
    legs = PlaneTree(np.array([2, 0, 0]), {1: "leg", 2: "leg"})
    d = DecoratedScheme(CYL, DegreeSet.of(3), 3, rec, [bare, two], [legs])
    assert d.plain_leaf_count() == 3
    assert structuring_edges(d) == 3
    # the root-edge tree does not count
    d2 = DecoratedScheme(CYL, DegreeSet.of(3), 3, rec, [two, bare], [legs])
    assert structuring_edges(d2) == 1
    m = assemble_map(d)
    assert m.canonical_code() in _census(CYL, (3,), 3)
    assert m.num_faces() == 2 and m.euler_characteristic() == 2


def test_all_bare_edges():
    rec = _cylinder_scheme()
    bare = PlaneTree(np.array([0]), {0: "marked"})
    legs = PlaneTree(np.array([2, 0, 0]), {1: "leg", 2: "leg"})
    d = DecoratedScheme(CYL, DegreeSet.of(3), 1, rec, [bare, bare], [legs])
    assert structuring_edges(d) == len(rec.edges) - 1 == 1
    assert assemble_map(d).canonical_code() == rec.scheme.canonical_code()


def test_determinism_and_size():
    for code, D, n in (("cylinder", (3,), 40), ("moebius", (3, 4), 30), ("O1.1", (4,), 24)):
        s = Surface.parse(code)
        t = count_tables(s, D, n)
        a = sample_uniform(s, D, n, 99, t)
        b = sample_uniform(s, D, n, 99, t)
        assert a.scheme.scheme == b.scheme.scheme
        assert [x.outdeg.tolist() for x in a.edge_trees] == [x.outdeg.tolist() for x in b.edge_trees]
        assert [x.tags for x in a.edge_trees + a.vertex_trees] == [x.tags for x in b.edge_trees + b.vertex_trees]
        rng = make_rng(1)
        for _ in range(50):
            d = sample_uniform(s, D, n, rng, t)
            assert d.plain_leaf_count() == n
            m = assemble_map(d)
            assert m.num_faces() == s.boundaries
            assert m.euler_characteristic() == s.chi_closed
            assert sum(1 for r in m.rotations if len(r) == 1) == n


@pytest.mark.parametrize("code, D, n", [("moebius", (3,), 5), ("O1.1", (3,), 4), ("O1.1", (3, 4), 3),
                                        ("N1.2", (3,), 3)])
def test_samples_lie_in_census(code, D, n):
    s = Surface.parse(code)
    census = _census(s, D, n)
    t = count_tables(s, D, n)
    rng = make_rng(4)
    seen = {assemble_map(sample_uniform(s, D, n, rng, t)).canonical_code() for _ in range(20 * len(census))}
    assert seen <= census
    assert len(seen) == len(census)


def test_uniformity_chi_square():
    scipy_stats = pytest.importorskip("scipy.stats")
    census = sorted(_census(CYL, (3,), 6))
    assert len(census) == 1024
    t = count_tables(CYL, 3, 6)
    rng = make_rng(2024)
    counts = collections.Counter(assemble_map(sample_uniform(CYL, 3, 6, rng, t)).canonical_code()
                                 for _ in range(100_000))
    assert set(counts) <= set(census)
    res = scipy_stats.chisquare([counts[c] for c in census])
    assert res.pvalue > 1e-3


# ---------------------------------------------------------------------------
# runs and dissections


def test_tree_fragment_is_dissection():
    # plane binary tree with four leaves
    m = CombinatorialMap([[0], [1, 2, 3], [4], [5, 6, 7], [8], [9]], [1, 0, 4, 5, 2, 3, 8, 9, 6, 7])
    vr, er, ok = runs(m)
    assert ok and len(vr) == 4
    assert dual_is_dissection(m)


def test_face_without_leaf_fails():
    # root leaf on a vertex carrying a loop: the loop bounds a face with no leaf
    m = CombinatorialMap([[0], [1, 2, 3]], [1, 0, 3, 2])
    assert m.num_faces() == 2
    assert not runs(m)[2]
    assert not dual_is_dissection(m)


def test_repeated_vertex_in_run_fails():
    found = False
    for code in sorted(_census(CYL, (3,), 3)):
        m = CombinatorialMap.from_code(code)
        vr, er, ok = runs(m)
        if ok and any(len(set(v)) < len(v) for v in vr):
            assert not dual_is_dissection(m)
            found = True
    assert found


def test_census_dissections_have_simple_duals():
    # a dual edge joins the runs on the two sides of an edge of the map
    for code in _census(CYL, (3,), 6):
        m = CombinatorialMap.from_code(code)
        vr, er, ok = runs(m)
        simple = ok
        if ok:
            where = collections.defaultdict(list)
            for i, es in enumerate(er):
                for e in es:
                    where[e].append(i)
            pairs = [tuple(sorted(v)) for v in where.values()]
            simple = all(len(p) == 2 and p[0] != p[1] for p in pairs) and len(set(pairs)) == len(pairs)
        assert dual_is_dissection(m) == simple


def test_pruned_and_full_maps_agree():
    for code, D, n in (("cylinder", (3,), 150), ("moebius", (3,), 120), ("O1.1", (3, 4), 80)):
        s = Surface.parse(code)
        t = count_tables(s, D, n)
        rng = make_rng(8)
        for _ in range(60):
            d = sample_uniform(s, D, n, rng, t)
            assert dual_is_dissection(d) == dual_is_dissection(assemble_map(d))


def test_balanced_implies_dissection():
    s = Surface.parse("moebius")
    t = count_tables(s, 3, 400)
    rng = make_rng(3)
    hits = 0
    for _ in range(300):
        d = sample_uniform(s, 3, 400, rng, t)
        if all(is_balanced(x) for x in d.edge_trees):
            hits += 1
            assert dual_is_dissection(d)
    assert hits > 0


# ---------------------------------------------------------------------------
# limit law


def test_theoretical_moments():
    assert theoretical_moment(0, CYL, 3) == 1
    assert theoretical_moment(1, CYL, 3) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)
    assert theoretical_moment(2, CYL, 3) == pytest.approx(2.0, rel=1e-12)
    assert theoretical_moment(3, CYL, 3) == pytest.approx(8 / math.sqrt(math.pi), rel=1e-12)


def test_density_moments_by_quadrature():
    integrate = pytest.importorskip("scipy.integrate")
    surfaces = {0: CYL, 1: Surface.parse("O1.1"), 2: Surface.parse("O0.4"), 3: Surface.parse("N2.3")}
    for k, s in surfaces.items():
        assert -s.chi == k
        mass = integrate.quad(lambda t: density_gk(k, t), 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
        assert mass == pytest.approx(1.0, abs=1e-8)
        for r in range(7):
            m = integrate.quad(lambda t: t ** r * density_gk(k, t), 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
            # X = (gamma/rho) t with t ~ g_k; gamma/rho = 2 for triangles
            assert m * 2 ** r == pytest.approx(theoretical_moment(r, s, 3), rel=1e-8)
    assert density_gk(1, -1.0) == 0.0


def test_condition_a_decreases():
    seq = condition_a_sequence(Surface.parse("O1.1"), 3, 40)
    assert all(b < a for a, b in zip(seq[1:], seq[2:]))
    assert seq[-1] < 1e-6


def test_batch_reproducible_across_threads():
    a = sample_batch(CYL, 3, 60, 4100, 17)
    b = sample_batch(CYL, 3, 60, 4100, 17, threads=2)
    assert np.array_equal(a.structuring, b.structuring)
    assert np.array_equal(a.dissection, b.dissection)
    assert len(a.structuring) == 4100


def test_mean_scaling():
    # E[U] grows like sqrt(n), so quadrupling n doubles the mean
    a = sample_batch(CYL, 3, 200, 4000, 5, check_dissection=False).structuring.mean()
    b = sample_batch(CYL, 3, 800, 4000, 6, check_dissection=False).structuring.mean()
    assert b / a == pytest.approx(2.0, rel=0.08)


def test_limit_check_small():
    res = sl.limit_check(CYL, 3, 100, 2000, 3, seed=7)
    assert res.moments[0].empirical == 1.0
    assert res.moments_4n is not None and res.nondissection_4n is not None
    d = res.as_dict()
    assert set(d) >= {"moments", "nonDissectionFraction", "decayRatio"}
