from __future__ import annotations

import random

import pytest

from dangular.maps import CombinatorialMap, generate_rooted_maps


def _plane_star():
    # leaf 0 - centre of degree 3 with two more leaves: a plane tree
    return CombinatorialMap([[0], [1, 2, 3], [4], [5]], [1, 0, 4, 5, 2, 3])


def test_plane_tree_counts():
    m = _plane_star()
    assert (m.num_vertices, m.num_edges, m.num_faces()) == (4, 3, 1)
    assert m.euler_characteristic() == 2
    assert m.is_orientable()


def test_torus_and_projective_plane():
    # one vertex, two loops interleaved: the torus
    torus = CombinatorialMap([[0, 1, 2, 3]], [2, 3, 0, 1])
    assert torus.num_faces() == 1 and torus.euler_characteristic() == 0
    # one vertex, one twisted loop: the projective plane
    rp2 = CombinatorialMap([[0, 1]], [1, 0], [1, 1])
    assert rp2.euler_characteristic() == 1 and not rp2.is_orientable()


def test_validation():
    with pytest.raises(ValueError):
        CombinatorialMap([[0, 1]], [0, 1])
    with pytest.raises(ValueError):
        CombinatorialMap([[0], [1]], [1, 0], [1, 0])
    with pytest.raises(ValueError):
        CombinatorialMap([[0], [1], [2], [3]], [1, 0, 3, 2])


def test_canonical_code_is_relabelling_invariant():
    code = next(iter(generate_rooted_maps(4, 4, (3,), 2, True)))
    m = CombinatorialMap.from_code(code)
    rnd = random.Random(3)
    for _ in range(10):
        H = m.num_halfedges
        perm = list(range(H))
        rnd.shuffle(perm)
        rots = []
        for r in m.rotations:
            k = rnd.randrange(len(r))
            rots.append([perm[h] for h in r[k:] + r[:k]])
        rnd.shuffle(rots)
        partner = [0] * H
        twist = [0] * H
        for h in range(H):
            partner[perm[h]] = perm[m.partner[h]]
            twist[perm[h]] = m.twist[h]
        m2 = CombinatorialMap(rots, partner, twist, perm[m.root], m.root_side)
        assert m2.canonical_code() == m.canonical_code()
        assert m2 == m


def test_generated_codes_are_canonical_and_distinct():
    codes = list(generate_rooted_maps(5, 5, (3,), 2, False))
    assert len(set(codes)) == len(codes)
    for c in codes:
        m = CombinatorialMap.from_code(c)
        assert m.canonical_code() == c
        assert m.num_faces() == 2 and m.euler_characteristic() == 1
        assert not m.is_orientable()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_cylinder_census(n):
    # leaf-rooted cubic maps on the sphere with two faces: 4^(n-1)
    assert sum(1 for _ in generate_rooted_maps(n, n, (3,), 2, True)) == 4 ** (n - 1)


def test_disc_census_is_catalan():
    # plane trees: binary trees with n leaves
    for n, c in ((2, 1), (3, 1), (4, 2), (5, 5), (6, 14)):
        assert sum(1 for _ in generate_rooted_maps(n, n - 2, (3,), 1, True)) == c
