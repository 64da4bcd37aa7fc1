"""Exact uniform sampling of leaf-rooted maps and limit-law statistics.

A map of size n is drawn by choosing a scheme and slot sizes with exact
integer weights, then one uniform tree per slot: a doubly-rooted tree on
every scheme edge and a leg-tree on every non-root scheme vertex.  Trees
are generated from uniformly shuffled Lukasiewicz words rotated by the
cycle lemma.  Gluing the pieces back gives the map (the inverse of the
decomposition), on which runs and the dissection conditions are checked.

Random numbers come from numpy's PCG64 seeded through ``SeedSequence``;
child streams are obtained with ``spawn``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .asymptotics_enum import gamma_exact, gamma_value
from .char_system import solve_characteristic
from .exact_series import ContractViolation, TruncSeries, ts_mul, ts_pow
from .maps import CombinatorialMap
from .scheme_constants import Surface, brute_force_schemes, require_not_disc
from .tree_gf import DegreeSet, PlaneTree, degree_profiles, legs_series, tree_series

# ---------------------------------------------------------------------------
# randomness


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed, k: int) -> List[np.random.Generator]:
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(k)]


def randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) for arbitrarily large n."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n < 1 << 62:
        return int(rng.integers(n))
    k = n.bit_length()
    nbytes = (k + 7) // 8
    extra = nbytes * 8 - k
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> extra
        if x < n:
            return x


def choose_weighted(rng, weights: Sequence[int]) -> int:
    total = sum(weights)
    if total <= 0:
        raise ContractViolation("empty class: all weights are zero")
    x = randbelow(rng, total)
    for i, w in enumerate(weights):
        if x < w:
            return i
        x -= w
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# counting tables


class Coeffs:
    """Exact nonnegative coefficients with cached natural logs."""

    def __init__(self, values: Sequence[int]):
        self.exact = [int(v) for v in values]
        self.log = np.array([math.log(v) if v > 0 else -np.inf for v in self.exact])

    def __getitem__(self, i: int) -> int:
        return self.exact[i] if 0 <= i < len(self.exact) else 0

    def __len__(self):
        return len(self.exact)


_MARGIN = 1e-9


def choose_split(rng, a: Coeffs, b: Coeffs, rem: int, total: int) -> int:
    """m in [0, rem] with probability a[m] b[rem-m] / total, exactly.

    A float cumulative table locates the bucket of an exact uniform integer;
    only when the draw lands within a relative 1e-9 of a bucket edge is the
    exact integer scan used.
    """
    if total <= 0:
        raise ContractViolation("empty class: all weights are zero")
    x = randbelow(rng, total)
    if rem < len(a) and rem < len(b):
        v = a.log[:rem + 1] + b.log[rem::-1]
        mx = v.max()
        c = np.cumsum(np.exp(v - mx))
        F = c / c[-1]
        u = x / total
        k = int(np.searchsorted(F, u, side="right"))
        if k < len(F):
            lower = F[k - 1] if k else 0.0
            if u - lower > _MARGIN and F[k] - u > _MARGIN:
                return k
    acc = 0
    for m in range(rem + 1):
        acc += a[m] * b[rem - m]
        if x < acc:
            return m
    raise AssertionError("weights do not sum to the stated total")


@dataclass
class SchemeRecord:
    scheme: CombinatorialMap
    edges: List[Tuple[int, int]]  # (start half-edge, end half-edge), root edge first
    vertex_degrees: List[int]  # non-root vertices in label order


def _scheme_record(m: CombinatorialMap) -> SchemeRecord:
    edges = sorted({(min(h, m.partner[h]), max(h, m.partner[h])) for h in range(m.num_halfedges)})
    return SchemeRecord(m, edges, m.degrees()[1:])


@dataclass
class CountTables:
    """Exact counts for sampling maps of one size on one surface.

    Schemes are grouped by (edge count, degree sequence); ``weights[i]`` is
    the number of maps whose scheme lies in group i.  ``suffix[i][j]`` is
    the product of the slot series j, j+1, ... of group i, so that slot
    sizes can be drawn one at a time conditionally on the remaining size.
    """

    surface: Surface
    D: DegreeSet
    n: int
    groups: List[List[SchemeRecord]]
    slot_kinds: List[List[Tuple[str, int]]]
    weights: List[int]
    series: Dict[Tuple[str, int], Coeffs]
    suffix: List[List[Coeffs]]
    tree_powers: Dict[int, Coeffs] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def admissible(self) -> bool:
        return (self.n - 2 * self.surface.chi) % self.D.p == 0

    def scheme_totals(self) -> List[int]:
        """[z^n]F_S for each scheme, group by group."""
        out = []
        for g, w in zip(self.groups, self.weights):
            out.extend([w // len(g)] * len(g))
        return out

    def tree_power(self, k: int) -> Coeffs:
        """[z^m] T^k for m <= n - 1."""
        if k not in self.tree_powers:
            N = max(self.n - 1, 1)
            T = tree_series(self.D, N).truncate(N)
            self.tree_powers[k] = Coeffs(ts_pow(T, k).coeffs if k else TruncSeries.one(N).coeffs)
        return self.tree_powers[k]


def count_tables(surface: Surface, D, n: int, schemes: Sequence[CombinatorialMap] | None = None) -> CountTables:
    """Counting tables for A_S^Delta(n); an inadmissible n gives total 0."""
    require_not_disc(surface)
    D = DegreeSet.of(D)
    if n < 1:
        raise ContractViolation("n must be >= 1")
    if schemes is None:
        schemes, _ = brute_force_schemes(surface, cubic_only=False)
    N = n - 1
    T = tree_series(D, N + 1)
    zero = TruncSeries.zero(N)
    series: Dict[Tuple[str, int], TruncSeries] = {
        ("edge", 0): TruncSeries([(m + 1) * T.coeffs[m + 1] for m in range(N + 1)], N)}
    by_key: Dict[Tuple[int, Tuple[int, ...]], List[SchemeRecord]] = {}
    for m in schemes:
        rec = _scheme_record(m)
        by_key.setdefault((len(rec.edges), tuple(rec.vertex_degrees)), []).append(rec)
    groups, kinds, weights, suffix = [], [], [], []
    for key in sorted(by_key):
        e, degs = key
        kind = [("edge", 0)] * e + [("leg", d - 1) for d in degs]
        for k in kind:
            if k not in series:
                series[k] = legs_series(D, k[1], N) if k[1] < max(D.degrees) else zero
        suf = [TruncSeries.one(N)]
        for k in reversed(kind):
            suf.append(ts_mul(series[k], suf[-1]))
        suf.reverse()
        groups.append(by_key[key])
        kinds.append(kind)
        weights.append(int(suf[0][N]) * len(by_key[key]))
        suffix.append([Coeffs(s.coeffs) for s in suf])
    coeffs = {k: Coeffs(s.coeffs) for k, s in series.items()}
    return CountTables(surface, D, n, groups, kinds, weights, coeffs, suffix)


# ---------------------------------------------------------------------------
# random trees


@lru_cache(maxsize=4096)
def _profile_table(D: DegreeSet, leaves: int):
    if len(D.degrees) == 1:
        c, r = divmod(leaves - 1, D.degrees[0] - 2)
        return ([{D.degrees[0]: c} if c else {}], [1]) if r == 0 else ([], [])
    profs = degree_profiles(D, leaves)
    cum, acc = [], 0
    for _, w in profs:
        acc += w
        cum.append(acc)
    return [p for p, _ in profs], cum


def random_tree_word(rng, D: DegreeSet, leaves: int) -> np.ndarray:
    """Preorder out-degree word of a uniform tree with ``leaves`` leaves.

    A degree profile is drawn with its exact tree count, the multiset is
    shuffled and the unique valid rotation is kept (cycle lemma).
    """
    profs, cum = _profile_table(D, leaves)
    if not profs:
        raise ContractViolation(f"no tree with {leaves} leaves")
    i = bisect.bisect_right(cum, randbelow(rng, cum[-1])) if len(profs) > 1 else 0
    parts = [np.zeros(leaves, dtype=np.int64)]
    for d, c in sorted(profs[i].items()):
        parts.append(np.full(c, d - 1, dtype=np.int64))
    word = rng.permutation(np.concatenate(parts))
    start = int(np.argmin(np.cumsum(word - 1))) + 1
    if start == len(word):
        return word
    return np.concatenate((word[start:], word[:start]))


def random_doubly_rooted(rng, D: DegreeSet, plain: int) -> PlaneTree:
    """Uniform doubly-rooted tree with ``plain`` unmarked non-root leaves."""
    word = random_tree_word(rng, D, plain + 1)
    leaves = np.flatnonzero(word == 0)
    mk = int(leaves[int(rng.integers(len(leaves)))])
    return PlaneTree(word, {mk: "marked"})


def random_forest_words(rng, tables: CountTables, k: int, size: int) -> List[np.ndarray]:
    """k uniform trees with ``size`` leaves in total, in order."""
    out = []
    T1 = tables.tree_power(1)
    for j in range(k, 1, -1):
        m = choose_split(rng, T1, tables.tree_power(j - 1), size, tables.tree_power(j)[size])
        out.append(random_tree_word(rng, tables.D, m))
        size -= m
    out.append(random_tree_word(rng, tables.D, size))
    return out


def random_leg_tree(rng, tables: CountTables, ell: int, size: int) -> PlaneTree:
    """Uniform tree with ``ell`` legs and ``size`` plain leaves.

    The root vertex has degree delta >= ell + 1; ``ell`` of its delta - 1
    child slots are legs and the others carry a forest.
    """
    cands, weights = [], []
    for d in tables.D.degrees:
        k = d - 1 - ell
        if k >= 0:
            cands.append(d)
            weights.append(comb(d - 1, ell) * tables.tree_power(k)[size])
    d = cands[choose_weighted(rng, weights)]
    slots = d - 1
    legpos = set(int(x) for x in rng.choice(slots, size=ell, replace=False)) if ell else set()
    forest = iter(random_forest_words(rng, tables, slots - ell, size) if slots > ell else [])
    word = [slots]
    tags = {}
    for pos in range(slots):
        if pos in legpos:
            tags[len(word)] = "leg"
            word.append(0)
        else:
            word.extend(int(x) for x in next(forest))
    return PlaneTree(np.array(word, dtype=np.int64), tags)


# ---------------------------------------------------------------------------
# decorated schemes


@dataclass
class DecoratedScheme:
    surface: Surface
    D: DegreeSet
    n: int
    scheme: SchemeRecord
    edge_trees: List[PlaneTree]
    vertex_trees: List[PlaneTree]

    def plain_leaf_count(self) -> int:
        """Leaves of the assembled map, root leaf included."""
        total = 1
        for t in self.edge_trees:
            total += int(np.count_nonzero(np.asarray(t.outdeg) == 0)) - 1
        for t in self.vertex_trees:
            legs = sum(1 for v in t.tags.values() if v == "leg")
            total += int(np.count_nonzero(np.asarray(t.outdeg) == 0)) - legs
        return total


def _slot_sizes(rng, tables: CountTables, gi: int) -> List[int]:
    kinds = tables.slot_kinds[gi]
    suf = tables.suffix[gi]
    rem = tables.n - 1
    sizes = []
    for j, kind in enumerate(kinds[:-1]):
        m = choose_split(rng, tables.series[kind], suf[j + 1], rem, suf[j][rem])
        sizes.append(m)
        rem -= m
    sizes.append(rem)
    return sizes


def sample_uniform(surface: Surface, D, n: int, seed=None, tables: CountTables | None = None) -> DecoratedScheme:
    """One uniform map of A_S^Delta(n), as a decorated scheme."""
    D = DegreeSet.of(D)
    rng = make_rng(seed)
    if tables is None:
        tables = count_tables(surface, D, n)
    if tables.total == 0:
        raise ContractViolation(f"no map of size {n} on {surface} with degrees {D}")
    gi = choose_weighted(rng, tables.weights)
    group = tables.groups[gi]
    rec = group[int(rng.integers(len(group)))]
    sizes = _slot_sizes(rng, tables, gi)
    e = len(rec.edges)
    edge_trees = [random_doubly_rooted(rng, D, m) for m in sizes[:e]]
    vertex_trees = [random_leg_tree(rng, tables, kind[1], m)
                    for kind, m in zip(tables.slot_kinds[gi][e:], sizes[e:])]
    return DecoratedScheme(surface, D, n, rec, edge_trees, vertex_trees)


# ---------------------------------------------------------------------------
# spine statistics


def spine_profile(t: PlaneTree) -> List[Tuple[int, int, int]]:
    """(node, left-children, right-children) for each internal spine vertex.

    Vectorised on the preorder word: j is an ancestor of i iff the running
    open-slot count never drops below its value at j on (j, i].
    """
    w = np.asarray(t.outdeg, dtype=np.int64)
    mk = t.marked_leaf()
    if mk is None:
        raise ContractViolation("tree has no marked leaf")
    if mk == 0:
        return []
    h = np.empty(len(w) + 1, dtype=np.int64)
    h[0] = 1
    np.cumsum(w - 1, out=h[1:])
    h[1:] += 1
    seg = h[1:mk + 1]
    sufmin = np.minimum.accumulate(seg[::-1])[::-1]
    anc = np.flatnonzero(h[:mk] <= sufmin)
    nxt = np.append(anc[1:], mk)
    c = h[anc] + w[anc] - h[nxt]  # 1-based index of the child on the spine
    left = c - 1
    right = w[anc] - c
    return list(zip(anc.tolist(), left.tolist(), right.tolist()))


def spine_length(t: PlaneTree) -> int:
    """Edges on the path from the root leaf to the marked leaf."""
    return len(spine_profile(t)) + 1


def is_one_sided(t: PlaneTree) -> bool:
    prof = spine_profile(t)
    return all(l == 0 for _, l, _ in prof) or all(r == 0 for _, _, r in prof)


def is_two_sided(t: PlaneTree) -> bool:
    return not is_one_sided(t)


def is_balanced(t: PlaneTree) -> bool:
    """Three spine cuts leaving four two-sided pieces, by a greedy scan."""
    cuts, has_l, has_r = 0, False, False
    for _, l, r in spine_profile(t):
        has_l |= l > 0
        has_r |= r > 0
        if has_l and has_r and cuts < 3:
            cuts += 1
            has_l = has_r = False
    return cuts == 3 and has_l and has_r


def structuring_edges(d: DecoratedScheme) -> int:
    """Total spine length over the trees of the non-root scheme edges."""
    return sum(spine_length(t) for t in d.edge_trees[1:])


# ---------------------------------------------------------------------------
# gluing back to a map


class _Builder:
    def __init__(self):
        self.rot: List[List[int]] = []
        self.partner: List[int] = []
        self.twist: List[int] = []
        self.root = 0

    def vertex(self, deg: int) -> List[int]:
        base = len(self.partner)
        hs = list(range(base, base + deg))
        self.partner.extend([-1] * deg)
        self.twist.extend([0] * deg)
        self.rot.append(hs)
        return hs

    def link(self, a: int, b: int, t: int = 0):
        self.partner[a], self.partner[b] = b, a
        self.twist[a] = self.twist[b] = t

    def leaf(self, parent_half: int):
        (h,) = self.vertex(1)
        self.link(parent_half, h)

    def subtree(self, word, start: int, parent_half: int):
        """Attach the subtree whose preorder starts at ``start``; return its end."""
        i = start
        pending = [parent_half]
        while True:
            d = int(word[i])
            hs = self.vertex(d + 1)
            self.link(pending.pop(), hs[0])
            if d:
                pending.extend(reversed(hs[1:]))
            i += 1
            if not pending:
                return i


def _root_child_starts(word) -> List[int]:
    """Preorder positions of the children of node 0."""
    w = np.asarray(word, dtype=np.int64)
    h = np.cumsum(w - 1) + 1  # h[j-1] = open slots before position j
    return [int(np.flatnonzero(h == v)[0]) + 1 for v in range(int(w[0]), 0, -1)]


def assemble_map(d: DecoratedScheme, pruned: bool = False) -> CombinatorialMap:
    """Glue the trees onto the scheme.

    The tree of a scheme edge is drawn in the frame of its start half-edge
    and the twist of the edge sits on the last link.  With ``pruned`` every
    pendant subtree is replaced by a single leaf: runs between spine
    vertices are unchanged, so the dissection test gives the same answer.
    """
    b = _build(d, pruned)
    return CombinatorialMap(b.rot, b.partner, b.twist, b.root, 1)


def _build(d: DecoratedScheme, pruned: bool) -> _Builder:
    S = d.scheme.scheme
    b = _Builder()
    role: Dict[int, int] = {}  # scheme half-edge -> half-edge of the new map
    (root_half,) = b.vertex(1)
    role[S.rotations[0][0]] = root_half
    for v, t in zip(range(1, S.num_vertices), d.vertex_trees):
        word = np.asarray(t.outdeg)
        slots = int(word[0])
        hs = b.vertex(slots + 1)
        srot = S.rotations[v]
        role[srot[0]] = hs[0]
        legs_seen = 0
        for pos, i in enumerate(_root_child_starts(word)):
            if t.tags.get(i) == "leg":
                legs_seen += 1
                role[srot[legs_seen]] = hs[pos + 1]
            elif pruned:
                b.leaf(hs[pos + 1])
            else:
                b.subtree(word, i, hs[pos + 1])
        if legs_seen != len(srot) - 1:
            raise ContractViolation("leg count does not match scheme degree")
    for (ha, hb), t in zip(d.scheme.edges, d.edge_trees):
        word = np.asarray(t.outdeg)
        cur = role[ha]
        for node, left, right in spine_profile(t):
            deg = int(word[node])
            hs = b.vertex(deg + 1)
            b.link(cur, hs[0])
            cur = hs[left + 1]
            if pruned:
                for c in list(range(left)) + list(range(left + 1, deg)):
                    b.leaf(hs[c + 1])
                continue
            j = node + 1
            for c in range(deg):
                if c == left:
                    j = _subtree_end(word, j)  # skip the spine child
                else:
                    j = b.subtree(word, j, hs[c + 1])
        b.link(cur, role[hb], S.twist[ha])
    b.root = root_half
    return b


def _subtree_end(word, start: int) -> int:
    need = 1
    i = start
    while need:
        need += int(word[i]) - 1
        i += 1
    return i


# ---------------------------------------------------------------------------
# runs and the dissection test


def _runs_raw(rot: List[List[int]], partner: List[int], twist: List[int]):
    H = len(partner)
    vert = [0] * H
    pos = [0] * H
    for v, r in enumerate(rot):
        for k, h in enumerate(r):
            vert[h] = v
            pos[h] = k
    vruns, eruns = [], []
    seen = set()
    states = 0
    # a run leaves a leaf in either direction and stops at the next leaf
    for v, r in enumerate(rot):
        if len(r) != 1:
            continue
        for eps in (1, -1):
            h = r[0]
            vs, es = [v], []
            while True:
                q = partner[h]
                es.append(h if h < q else q)
                if twist[h]:
                    eps = -eps
                w = vert[q]
                vs.append(w)
                states += 1
                rw = rot[w]
                if len(rw) == 1:
                    break
                h = rw[(pos[q] + eps) % len(rw)]
            key = min(tuple(es), tuple(reversed(es)))
            if key not in seen:
                seen.add(key)
                vruns.append(vs)
                eruns.append(es)
    # the runs cover 2H face-walk states iff every face has a leaf
    return vruns, eruns, states == 2 * H


def runs(m: CombinatorialMap) -> Tuple[List[List[int]], List[List[int]], bool]:
    """Leaf-to-leaf boundary walks, as vertex lists and edge lists.

    Each run is kept in one direction only.  Returns (vertex runs, edge
    runs, every face has a leaf).
    """
    return _runs_raw(m.rotations, m.partner, m.twist)


def dual_is_dissection(m) -> bool:
    """Run conditions for the dual of ``m`` to be a dissection.

    Every face needs a leaf; no vertex may repeat inside a run; two runs
    may share nothing, one vertex, or one edge with its two endpoints.
    Accepts a map or a decorated scheme (checked on its pruned map).
    """
    if isinstance(m, DecoratedScheme):
        b = _build(m, pruned=True)
        vruns, eruns, ok = _runs_raw(b.rot, b.partner, b.twist)
    else:
        vruns, eruns, ok = runs(m)
    if not ok:
        return False
    vshare: Dict[Tuple[int, int], int] = {}
    eshare: Dict[Tuple[int, int], int] = {}
    by_vertex: Dict[int, List[int]] = {}
    by_edge: Dict[int, List[int]] = {}
    for i, (vs, es) in enumerate(zip(vruns, eruns)):
        if len(set(vs)) != len(vs):
            return False
        for v in vs:
            by_vertex.setdefault(v, []).append(i)
        for e in set(es):
            by_edge.setdefault(e, []).append(i)
    for table, counts in ((by_vertex, vshare), (by_edge, eshare)):
        for lst in table.values():
            for a in range(len(lst)):
                for c in range(a + 1, len(lst)):
                    key = (lst[a], lst[c])
                    counts[key] = counts.get(key, 0) + 1
    for key, nv in vshare.items():
        ne = eshare.get(key, 0)
        if not ((nv == 1 and ne == 0) or (nv == 2 and ne == 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# limit law


def theoretical_moment(r: int, surface: Surface, D) -> float:
    """(gamma/rho)^r Gamma((r+1-3chi)/2) / Gamma((1-3chi)/2)."""
    D = DegreeSet.of(D)
    c = solve_characteristic(D)
    q1, k1 = gamma_exact(r + 1 - 3 * surface.chi)
    q0, k0 = gamma_exact(1 - 3 * surface.chi)
    ratio = float(q1 / q0) * math.sqrt(math.pi) ** (k1 - k0)
    return (c.gamma / c.rho) ** r * ratio


def density_gk(k: int, t: float) -> float:
    """2 t^(3k) exp(-t^2) / Gamma((1+3k)/2) on t >= 0."""
    if t < 0:
        return 0.0
    return 2.0 * t ** (3 * k) * math.exp(-t * t) / gamma_value(1 + 3 * k)


def condition_a_sequence(surface: Surface, D, rmax: int = 40) -> List[float]:
    """R^r m_r / r! with R = rho / (2 gamma); should decrease to 0."""
    D = DegreeSet.of(D)
    c = solve_characteristic(D)
    R = c.rho / (2 * c.gamma)
    out = []
    for r in range(rmax + 1):
        lg = (r * math.log(R) + math.log(theoretical_moment(r, surface, D)) - math.lgamma(r + 1))
        out.append(math.exp(lg))
    return out


@dataclass
class MomentReport:
    order: int
    empirical: float
    theoretical: float
    sample_count: int
    standard_error: float

    @property
    def relative_error(self) -> float:
        return abs(self.empirical / self.theoretical - 1.0) if self.theoretical else math.inf

    def as_dict(self):
        return {"order": self.order, "empirical": self.empirical, "theoretical": self.theoretical,
                "sampleCount": self.sample_count, "standardError": self.standard_error}


@dataclass
class SampleBatch:
    structuring: np.ndarray
    dissection: np.ndarray
    balanced: np.ndarray

    @property
    def nondissection_fraction(self) -> float:
        return 1.0 - float(self.dissection.mean())


CHUNK = 2000  # samples per seed stream; fixed so results do not depend on --threads


@lru_cache(maxsize=8)
def _cached_tables(surface: Surface, D: DegreeSet, n: int) -> CountTables:
    return count_tables(surface, D, n)


def _run_chunk(args) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    surface, D, n, count, seed, check = args
    tables = _cached_tables(surface, D, n)
    rng = make_rng(seed)
    U = np.empty(count, dtype=np.int64)
    ok = np.ones(count, dtype=bool)
    bal = np.zeros(count, dtype=bool)
    for i in range(count):
        d = sample_uniform(surface, D, n, rng, tables)
        U[i] = structuring_edges(d)
        bal[i] = all(is_balanced(t) for t in d.edge_trees)
        if check:
            ok[i] = dual_is_dissection(d)
    return U, ok, bal


def sample_batch(surface: Surface, D, n: int, count: int, seed, check_dissection: bool = True,
                 threads: int = 1) -> SampleBatch:
    """Draw ``count`` independent maps; record U, the dissection flag and balance.

    Sample i belongs to chunk i // CHUNK, whose generator is the chunk-th
    child of ``SeedSequence(seed)``; the output is identical for any
    number of worker processes.
    """
    D = DegreeSet.of(D)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sizes = [min(CHUNK, count - k) for k in range(0, count, CHUNK)]
    jobs = [(surface, D, n, c, child, check_dissection) for c, child in zip(sizes, ss.spawn(len(sizes)))]
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    if not parts:
        e = np.empty(0)
        return SampleBatch(e.astype(np.int64), e.astype(bool), e.astype(bool))
    return SampleBatch(*(np.concatenate(x) for x in zip(*parts)))


def empirical_moments(values: np.ndarray, n: int, rmax: int) -> List[Tuple[float, float]]:
    """(mean, standard error) of (U / sqrt n)^r for r = 0..rmax."""
    x = values.astype(float) / math.sqrt(n)
    out = []
    for r in range(rmax + 1):
        xr = x ** r
        se = float(xr.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else math.nan
        out.append((float(xr.mean()), se))
    return out


def moment_reports(values: np.ndarray, n: int, rmax: int, surface: Surface, D) -> List[MomentReport]:
    return [MomentReport(r, mean, theoretical_moment(r, surface, D), len(values), se)
            for r, (mean, se) in enumerate(empirical_moments(values, n, rmax))]


@dataclass
class LimitCheck:
    n: int
    samples: int
    moments: List[MomentReport]
    nondissection_n: float
    moments_4n: List[MomentReport] | None = None
    nondissection_4n: float | None = None

    @property
    def decay_ratio(self) -> float | None:
        if not self.nondissection_4n:
            return None
        return self.nondissection_n / self.nondissection_4n

    def as_dict(self):
        return {"n": self.n, "samples": self.samples,
                "moments": [m.as_dict() for m in self.moments],
                "nonDissectionFraction": self.nondissection_n,
                "moments4n": None if self.moments_4n is None else [m.as_dict() for m in self.moments_4n],
                "nonDissectionFraction4n": self.nondissection_4n,
                "decayRatio": self.decay_ratio}


def limit_check(surface: Surface, D, n: int, samples: int, rmax: int, seed,
                with_4n: bool = True, threads: int = 1) -> LimitCheck:
    """Moments of U/sqrt(n) and the non-dissection fraction at n (and 4n)."""
    D = DegreeSet.of(D)
    s1, s2 = np.random.SeedSequence(seed).spawn(2)
    b1 = sample_batch(surface, D, n, samples, s1, threads=threads)
    out = LimitCheck(n, samples, moment_reports(b1.structuring, n, rmax, surface, D), b1.nondissection_fraction)
    if with_4n:
        b4 = sample_batch(surface, D, 4 * n, samples, s2, threads=threads)
        out.moments_4n = moment_reports(b4.structuring, 4 * n, rmax, surface, D)
        out.nondissection_4n = b4.nondissection_fraction
    return out
