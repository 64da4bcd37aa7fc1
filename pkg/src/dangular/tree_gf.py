"""Generating series of the tree families used by the decomposition.

All trees are leaf-rooted plane trees whose internal vertices have degree
in a finite set Delta of integers >= 3.  Sizes count non-root leaves.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import comb, gcd
from typing import Dict, Iterable, List, Sequence, Tuple

from .exact_series import (
    ContractViolation,
    Rat,
    TruncSeries,
    norm,
    power_online,
    ts_derive,
    ts_inv,
    ts_mul,
    ts_pow,
    ts_scale,
    ts_sub,
)


@dataclass(frozen=True)
class DegreeSet:
    """A finite set of admissible internal degrees."""

    degrees: Tuple[int, ...]
    period: int = field(init=False)
    shifted: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        ds = tuple(sorted(set(int(d) for d in self.degrees)))
        if not ds:
            raise ContractViolation("degree set must be nonempty")
        if ds[0] < 3:
            raise ContractViolation("degrees must be >= 3")
        p = reduce(gcd, (d - 2 for d in ds))
        object.__setattr__(self, "degrees", ds)
        object.__setattr__(self, "period", p)
        object.__setattr__(self, "shifted", tuple((d - 2) // p for d in ds))

    @classmethod
    def of(cls, value) -> "DegreeSet":
        if isinstance(value, DegreeSet):
            return value
        if isinstance(value, str):
            value = [int(s) for s in value.replace(" ", "").split(",") if s]
        elif isinstance(value, int):
            value = [value]
        return cls(tuple(value))

    @property
    def p(self) -> int:
        return self.period

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.degrees)) + "}"


@dataclass
class PlaneTree:
    """Leaf-rooted plane tree stored as a preorder out-degree word.

    The root leaf itself is implicit; ``outdeg[0]`` is the vertex next to
    it.  Leaves (out-degree 0) may carry a tag: ``"marked"`` or ``"leg"``.
    """

    outdeg: List[int]
    tags: Dict[int, str] = field(default_factory=dict)

    def leaves(self) -> List[int]:
        return [i for i, d in enumerate(self.outdeg) if d == 0]

    def children(self) -> List[List[int]]:
        kids: List[List[int]] = [[] for _ in self.outdeg]
        stack: List[int] = []
        for i, d in enumerate(self.outdeg):
            if stack:
                kids[stack[-1]].append(i)
                if len(kids[stack[-1]]) == self.outdeg[stack[-1]]:
                    stack.pop()
            if d:
                stack.append(i)
        return kids

    def parents(self) -> List[int]:
        par = [-1] * len(self.outdeg)
        for v, ks in enumerate(self.children()):
            for c in ks:
                par[c] = v
        return par

    def marked_leaf(self) -> int | None:
        for i, t in self.tags.items():
            if t == "marked":
                return i
        return None

    def spine(self) -> List[int]:
        """Vertices from the root side to the marked leaf (inclusive)."""
        m = self.marked_leaf()
        if m is None:
            raise ContractViolation("tree has no marked leaf")
        par = self.parents()
        path = [m]
        while par[path[-1]] != -1:
            path.append(par[path[-1]])
        return path[::-1]

    def spine_length(self) -> int:
        # edges from the root leaf to the marked leaf
        return len(self.spine())


def is_valid_word(outdeg: Sequence[int]) -> bool:
    h = 1
    for i, d in enumerate(outdeg):
        h += d - 1
        if h == 0 and i != len(outdeg) - 1:
            return False
    return h == 0


def tree_series(D, N: int) -> TruncSeries:
    """T_Delta(z) = z + sum_delta T^(delta-1), solved order by order."""
    D = DegreeSet.of(D)
    if N < 1:
        raise ContractViolation("N must be >= 1")
    top = max(D.degrees) - 1
    # pw[m][n] = [z^n] T^m for m = 1..top
    pw: List[List[Rat]] = [[] for _ in range(top + 1)]
    for m in range(1, top + 1):
        pw[m] = [0] * (N + 1)
    needed = set(d - 1 for d in D.degrees)
    for n in range(1, N + 1):
        # [z^n] T^m for m >= 2 only involves T_1..T_{n-1}
        for m in range(2, top + 1):
            s = 0
            prev = pw[m - 1]
            T = pw[1]
            for i in range(1, n):
                if T[i] and prev[n - i]:
                    s += T[i] * prev[n - i]
            pw[m][n] = s
        t_n = 1 if n == 1 else 0
        for m in needed:
            t_n += pw[m][n]
        pw[1][n] = t_n
    return TruncSeries(pw[1], N)


def y_series(D, N: int) -> TruncSeries:
    """Y_Delta(t) = 1 + sum_k t^k Y^(kp+1), so that T(z) = z Y(z^p)."""
    D = DegreeSet.of(D)
    exps = {k: k * D.p + 1 for k in D.shifted}
    y: List[Rat] = [1]
    w: Dict[int, List[Rat]] = {m: [1] for m in exps.values()}
    for n in range(1, N + 1):
        c = 0
        for k, m in exps.items():
            if n - k >= 0:
                c += w[m][n - k]
        y.append(c)
        for m in w:
            w[m].append(power_online(y, w[m], m, n))
    return TruncSeries(y, N)


def z_series(D, N: int) -> TruncSeries:
    """Z = p t Y' + Y; Z(z^p) is the derivative of T_Delta."""
    D = DegreeSet.of(D)
    Y = y_series(D, N)
    return TruncSeries([(D.p * n + 1) * c for n, c in enumerate(Y.coeffs)], N)


def tree_derivative(D, N: int) -> TruncSeries:
    """T'_Delta(z): doubly-rooted trees counted by plain leaves."""
    return ts_derive(tree_series(D, N + 1))


def legs_series(D, ell: int, N: int, route: str = "A") -> TruncSeries:
    """Trees with ``ell`` legs.

    Route ``"A"`` returns T_{Delta,ell}(z) to order N from the binomial sum
    over the root degree.  Route ``"B"`` returns Y_{Delta,ell}(t) to order N
    from the recurrence through Z; the two are linked by
    T_{Delta,ell}(z) = z^(1-ell) Y_{Delta,ell}(z^p).
    """
    D = DegreeSet.of(D)
    if ell < 1:
        raise ContractViolation("ell must be >= 1")
    if route == "A":
        T = tree_series(D, max(N, 1)).truncate(N) if N >= 1 else TruncSeries([0], 0)
        out = TruncSeries.zero(N)
        for d in D.degrees:
            if d > ell:
                out = out + ts_scale(ts_pow(T, d - ell - 1), comb(d - 1, ell))
        return out
    if route == "B":
        return _legs_y(D, N)[ell] if ell <= _max_legs(D) else TruncSeries.zero(N)
    raise ContractViolation(f"unknown route {route!r}")


def _max_legs(D: DegreeSet) -> int:
    return max(D.degrees) - 1


def _legs_y(D: DegreeSet, N: int) -> Dict[int, TruncSeries]:
    Zs = z_series(D, N + 1)
    Zinv = ts_inv(Zs).truncate(N)
    out = {1: ts_sub(TruncSeries.one(N), Zinv)}
    prev1 = ts_sub(TruncSeries.one(N + 1), ts_inv(Zs))  # one extra order for the derivative
    for ell in range(2, _max_legs(D) + 1):
        # p t Y'_{ell-1} + (2 - ell) Y_{ell-1}
        num = [(D.p * n + 2 - ell) * c for n, c in enumerate(prev1.coeffs)]
        num_s = TruncSeries(num, N + 1)
        cur1 = ts_scale(ts_mul(num_s, ts_inv(Zs)), Fraction(1, ell))
        out[ell] = cur1.truncate(N)
        prev1 = cur1
    return out


def legs_from_y(D, ell: int, Yl: TruncSeries, N: int) -> TruncSeries:
    """Convert Y_{Delta,ell}(t) to T_{Delta,ell}(z) up to order N."""
    D = DegreeSet.of(D)
    out = [0] * (N + 1)
    for j, c in enumerate(Yl.coeffs):
        n = j * D.p + 1 - ell
        if n < 0:
            if c:
                raise ContractViolation("negative power in legs series")
            continue
        if n > N:
            break
        out[n] = c
    if (N + ell - 1) // D.p > Yl.order:
        raise ContractViolation("Y series too short for requested order")
    return TruncSeries(out, N)


def one_sided_series(D, N: int) -> TruncSeries:
    """2 T(z)/z - 1: doubly-rooted trees with all leaves on one spine side."""
    T = tree_series(D, N + 1)
    cs = [2 * T.coeffs[n + 1] for n in range(N + 1)]
    cs[0] -= 1
    return TruncSeries(cs, N)


def spine_bivariate(D, N: int, R: int) -> List[TruncSeries]:
    """[u^r] of u/(1 - u T_{Delta,1}(z)) for r = 0..R, each to order N."""
    T1 = legs_series(D, 1, N)
    out = [TruncSeries.zero(N)]
    cur = TruncSeries.one(N)
    for r in range(1, R + 1):
        out.append(cur)
        cur = ts_mul(cur, T1)
    return out


def tree_count(D, leaves: int) -> int:
    """Number of trees with the given number of non-root leaves.

    Uses the cycle lemma over degree compositions, so it is exact and fast
    for a single large size.
    """
    return sum(w for _, w in degree_profiles(D, leaves))


def degree_profiles(D, leaves: int) -> List[Tuple[Dict[int, int], int]]:
    """All internal-degree profiles of trees with ``leaves`` leaves, with counts.

    A profile {delta: n_delta} satisfies sum (delta-2) n_delta = leaves - 1;
    its tree count is multinomial(V; leaves, n_delta...)/V with V the
    number of non-root vertices.
    """
    D = DegreeSet.of(D)
    if leaves < 1:
        return []
    target = leaves - 1
    degs = list(D.degrees)
    out: List[Tuple[Dict[int, int], int]] = []

    def rec(i: int, remaining: int, acc: Dict[int, int]):
        if i == len(degs):
            if remaining == 0:
                V = leaves + sum(acc.values())
                num = _multinomial([leaves] + list(acc.values()))
                q, r = divmod(num, V)
                assert r == 0
                out.append((dict(acc), q))
            return
        d = degs[i]
        if i == len(degs) - 1:
            # the last degree is forced
            c, r = divmod(remaining, d - 2)
            if r == 0:
                if c:
                    acc[d] = c
                rec(i + 1, 0, acc)
                acc.pop(d, None)
            return
        for c in range(remaining // (d - 2) + 1):
            if c:
                acc[d] = c
            rec(i + 1, remaining - c * (d - 2), acc)
            acc.pop(d, None)

    rec(0, target, {})
    return out


def _multinomial(parts: Iterable[int]) -> int:
    total, res = 0, 1
    for k in parts:
        total += k
        res *= comb(total, k)
    return res
