"""Cubic-scheme constants a(S).

Near-cubic maps with k marked vertices are counted by series O_{g,k}
(orientable genus g) and Q_{g,k} = O_{g/2,k} + P_{g,k} (mixing in the
non-orientable genus-g maps P_{g,k}).  The series are solved order by order
in z from Tutte-style root-edge decompositions; a(S) is the coefficient
of x^1 z^(2-3 chi(S)).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Tuple

from .exact_series import ContractViolation, Poly, SchemePoly, norm
from .maps import CombinatorialMap, generate_rooted_maps

BRUTE_FORCE_EDGE_CAP = 8


@dataclass(frozen=True)
class Surface:
    """Compact surface with boundary, up to homeomorphism."""

    orientable: bool
    genus: int
    boundaries: int

    def __post_init__(self):
        if self.genus < 0 or self.boundaries < 1:
            raise ContractViolation("genus must be >= 0 and boundaries >= 1")
        if not self.orientable and self.genus < 1:
            raise ContractViolation("non-orientable genus counts cross-caps and must be >= 1")

    @property
    def chi_closed(self) -> int:
        return 2 - 2 * self.genus if self.orientable else 2 - self.genus

    @property
    def chi(self) -> int:
        return self.chi_closed - self.boundaries

    @property
    def is_disc(self) -> bool:
        return self.orientable and self.genus == 0 and self.boundaries == 1

    @property
    def scheme_edges(self) -> int:
        """Edge count of a cubic scheme."""
        return 2 - 3 * self.chi

    @property
    def code(self) -> str:
        return f"{'O' if self.orientable else 'N'}{self.genus}.{self.boundaries}"

    def __str__(self) -> str:
        return self.code

    @classmethod
    def parse(cls, text: str) -> "Surface":
        t = text.strip()
        aliases = {
            "disc": (True, 0, 1), "disk": (True, 0, 1),
            "cylinder": (True, 0, 2), "cyl": (True, 0, 2), "annulus": (True, 0, 2),
            "moebius": (False, 1, 1), "mobius": (False, 1, 1), "möbius": (False, 1, 1),
        }
        if t.lower() in aliases:
            return cls(*aliases[t.lower()])
        m = re.fullmatch(r"([ONon])(\d+)\.(\d+)", t)
        if not m:
            raise ValueError(f"bad surface code {text!r}; expected O<g>.<b>, N<g>.<b> or an alias")
        return cls(m.group(1).upper() == "O", int(m.group(2)), int(m.group(3)))


def require_not_disc(surface: Surface):
    if surface.is_disc:
        raise ContractViolation("disc handled in closed form (Catalan numbers), not by schemes")


# ---------------------------------------------------------------------------
# Functional equations


def _closure(gMax: int, kMax: int, nonorientable: bool) -> List[Tuple[int, int]]:
    # (g,k) is solvable iff every series it depends on is inside the box
    step = 2 if nonorientable else 1
    return [(g, k) for g in range(gMax + 1) for k in range(kMax + 1) if k + g // step <= kMax]


def _solve(gMax: int, kMax: int, zMax: int, nonorientable: bool,
           degree_cap: bool) -> Dict[Tuple[int, int], SchemePoly]:
    if kMax < gMax:
        raise ContractViolation("kMax must be >= gMax")
    keys = _closure(gMax, kMax, nonorientable)
    keyset = set(keys)
    data: Dict[Tuple[int, int], List[Poly]] = {key: [] for key in keys}
    handle_genus, handle_factor = (2, 2) if nonorientable else (1, 1)

    for e in range(zMax + 1):
        # monomials of total degree D at order e can only feed [x^1 z^zMax]
        # when D <= zMax - e + 1: the z/x term is the only one lowering D
        cap = zMax - e + 1 if degree_cap else None
        for g, k in keys:
            out: Dict[Tuple[int, ...], int] = {}
            if e == 0:
                if g == 0 and k == 0:
                    out[(0,)] = 1
                data[(g, k)].append(out)
                continue

            def put(m, v):
                if cap is None or sum(m) <= cap:
                    out[m] = out.get(m, 0) + v

            # root edge to an unmarked cubic vertex: (z/x)(O - c0 - x[x^1]O)
            for m, v in data[(g, k)][e - 1].items():
                if m[0] >= 2:
                    put((m[0] - 1,) + m[1:], v)
            # root edge to the last marked vertex: x x_k z divided difference
            if k >= 1:
                for m, v in data[(g, k - 1)][e - 1].items():
                    d, rest = m[0], m[1:]
                    for i in range(d + 1):
                        put((i + 1,) + rest + (d - i + 1,), v)
            # separating root loop
            for i in range(g + 1):
                for j in range(k + 1):
                    if (i, j) not in keyset or (g - i, k - j) not in keyset:
                        continue
                    left, right = data[(i, j)], data[(g - i, k - j)]
                    for a in range(e):
                        P, Q = left[a], right[e - 1 - a]
                        if not P or not Q:
                            continue
                        for m1, v1 in P.items():
                            s1 = sum(m1) + 2
                            if cap is not None and s1 > cap:
                                continue
                            for m2, v2 in Q.items():
                                if cap is not None and s1 + sum(m2) > cap:
                                    continue
                                m = (m1[0] + m2[0] + 2,) + m1[1:] + m2[1:]
                                out[m] = out.get(m, 0) + v1 * v2
            # non-separating root loop: new vertex j merged into the root
            hg = g - handle_genus
            if hg >= 0:
                for m, v in data[(hg, k + 1)][e - 1].items():
                    for j in range(1, k + 2):
                        dj = m[j]
                        if dj:
                            put((m[0] + dj + 2,) + m[1:j] + m[j + 1:], handle_factor * dj * v)
            # twisted root loop: x^2 z d/dx (x Q_{g-1,k})
            if nonorientable and g >= 1:
                for m, v in data[(g - 1, k)][e - 1].items():
                    put((m[0] + 2,) + m[1:], (m[0] + 1) * v)
            data[(g, k)].append({m: v for m, v in out.items() if v})
    return {key: SchemePoly(polys, key[1]) for key, polys in data.items()}


def solve_O(gMax: int, kMax: int | None = None, zMax: int = 0,
            degree_cap: bool = False) -> Dict[Tuple[int, int], SchemePoly]:
    """Series O_{g,k} for the closure of (gMax, kMax), exact to z^zMax.

    With ``degree_cap`` only monomials that can still contribute to
    [x^1 z^zMax] are kept; the result is then exact for that extraction
    only, and much cheaper.
    """
    kMax = gMax if kMax is None else kMax
    return _solve(gMax, kMax, zMax, False, degree_cap)


def solve_Q(gMax: int, kMax: int | None = None, zMax: int = 0,
            degree_cap: bool = False) -> Dict[Tuple[int, int], SchemePoly]:
    """Series Q_{g,k} = O_{g/2,k} + P_{g,k}; see :func:`solve_O`."""
    kMax = gMax if kMax is None else kMax
    return _solve(gMax, kMax, zMax, True, degree_cap)


def series_P(Q: Dict[Tuple[int, int], SchemePoly], O: Dict[Tuple[int, int], SchemePoly],
             g: int, k: int) -> SchemePoly:
    """P_{g,k} = Q_{g,k} - O_{g/2,k}."""
    if (g, k) not in Q:
        raise ContractViolation(f"Q_{{{g},{k}}} is outside the computed closure")
    q = Q[(g, k)]
    if g % 2:
        return q
    if (g // 2, k) not in O:
        raise ContractViolation(f"O_{{{g // 2},{k}}} is outside the computed closure")
    o = O[(g // 2, k)]
    polys = []
    for e in range(q.order + 1):
        p = dict(q.zcoeffs[e])
        if e <= o.order:
            for m, v in o.zcoeffs[e].items():
                p[m] = p.get(m, 0) - v
        polys.append({m: norm(v) for m, v in p.items() if v})
    return SchemePoly(polys, k)


def get_series(table: Dict[Tuple[int, int], SchemePoly], g: int, k: int) -> SchemePoly:
    if (g, k) not in table:
        raise ContractViolation(f"series ({g},{k}) is outside the computed closure")
    return table[(g, k)]


def _integral(c) -> int:
    c = Fraction(c)
    if c.denominator != 1:
        raise ArithmeticError(f"non-integral scheme count {c}")
    return c.numerator


def cubic_scheme_count(surface: Surface) -> int:
    """a(S): number of rooted cubic schemes of S."""
    require_not_disc(surface)
    e = surface.scheme_edges
    if surface.orientable:
        g = surface.genus
        O = solve_O(g, g, e, degree_cap=True)
        return _integral(O[(g, 0)].coeff(e, (1,)))
    g = surface.genus
    Q = solve_Q(g, g, e, degree_cap=True)
    total = Q[(g, 0)].coeff(e, (1,))
    if g % 2 == 0:
        O = solve_O(g // 2, g // 2, e, degree_cap=True)
        total -= O[(g // 2, 0)].coeff(e, (1,))
    return _integral(total)


def scheme_table(orientable: bool, genera, boundaries) -> Dict[Tuple[int, int], int]:
    """a(S) for a grid of surfaces, sharing one solve per family."""
    genera, boundaries = list(genera), list(boundaries)
    out: Dict[Tuple[int, int], int] = {}
    if not genera or not boundaries:
        return out
    gtop = max(genera)
    surfaces = [Surface(orientable, g, b) for g in genera for b in boundaries]
    surfaces = [s for s in surfaces if not s.is_disc]
    if not surfaces:
        return out
    zMax = max(s.scheme_edges for s in surfaces)
    # the degree cap for zMax keeps every monomial feeding [x^1 z^e], e <= zMax
    if orientable:
        O = solve_O(gtop, gtop, zMax, degree_cap=True)
        for s in surfaces:
            out[(s.genus, s.boundaries)] = _integral(O[(s.genus, 0)].coeff(s.scheme_edges, (1,)))
        return out
    Q = solve_Q(gtop, gtop, zMax, degree_cap=True)
    O = solve_O(gtop // 2, gtop // 2, zMax, degree_cap=True)
    for s in surfaces:
        P = series_P(Q, O, s.genus, 0)
        out[(s.genus, s.boundaries)] = _integral(P.coeff(s.scheme_edges, (1,)))
    return out


# ---------------------------------------------------------------------------
# Closed forms and independent cross-checks


def unicellular_closed_form(g: int) -> int:
    """Rooted one-face cubic schemes on the genus-g torus."""
    if g < 1:
        raise ContractViolation("g must be >= 1")
    num = 2 * factorial(6 * g - 3)
    den = 12 ** g * factorial(g) * factorial(3 * g - 2)
    q, r = divmod(num, den)
    assert r == 0
    return q


@lru_cache(maxsize=None)
def _triangulations(n: int, g: int) -> Fraction:
    if n == -1:
        return Fraction(-1, 2) if g == 0 else Fraction(0)
    if n < -1 or g < 0:
        return Fraction(0)
    if n == 0:
        return Fraction(1 if g == 0 else 0)
    s = 4 * n * (3 * n - 2) * (3 * n - 4) * _triangulations(n - 2, g - 1)
    s += 4 * (3 * n - 1) * _triangulations(n - 1, g)
    for i in range(n - 1):
        j = n - 2 - i
        for h in range(g + 1):
            s += 4 * (3 * i + 2) * (3 * j + 2) * _triangulations(i, h) * _triangulations(j, g - h)
    return s / (n + 1)


def triangulation_count(n: int, g: int) -> int:
    """Rooted triangulations of the genus-g torus with 2n faces.

    Goulden-Jackson quadratic recurrence, with loops and multiple edges
    allowed.  Dually these are rooted cubic maps with 2n vertices.
    """
    return _integral(_triangulations(n, g))


def orientable_count_via_triangulations(g: int, beta: int) -> int:
    """a(S) for orientable S from the triangulation recurrence.

    Deleting the root leaf of a cubic scheme and smoothing its neighbour
    leaves a rooted cubic map with beta faces on the closed surface (the
    leaf sits on an edge side, matching the root choice), except for the
    cylinder whose smoothing leaves a vertex-free loop.
    """
    s = Surface(True, g, beta)
    require_not_disc(s)
    if (g, beta) == (0, 2):
        return 1
    return triangulation_count(2 * g + beta - 2, g)


# ---------------------------------------------------------------------------
# Brute force


def brute_force_schemes(surface: Surface, max_edges: int | None = None,
                        cubic_only: bool = True) -> Tuple[List[CombinatorialMap], int]:
    """Exhaustive list of rooted schemes of ``surface``.

    Schemes are leaf-rooted maps on the closed surface with one face per
    boundary and all other vertices of degree >= 3 (exactly 3 if
    ``cubic_only``).
    """
    require_not_disc(surface)
    e = surface.scheme_edges
    if max_edges is None:
        max_edges = e
    if max_edges > BRUTE_FORCE_EDGE_CAP:
        raise ContractViolation(f"brute force limited to {BRUTE_FORCE_EDGE_CAP} edges, asked for {max_edges}")
    if cubic_only and max_edges != e:
        raise ContractViolation(f"cubic schemes of {surface} have exactly {e} edges")
    excess = 1 - 2 * surface.chi
    degs = [3] if cubic_only else list(range(3, excess + 3))
    maps = []
    for code in generate_rooted_maps(1, excess, degs, surface.boundaries, surface.orientable):
        if len(code[1]) // 2 <= max_edges:
            maps.append(CombinatorialMap.from_code(code))
    return maps, len(maps)


# Reference values as published (rows genus, columns boundaries 1..4).
PUBLISHED_ORIENTABLE = {
    0: (None, 1, 4, 32),
    1: (1, 28, 664, 14912),
    2: (105, 8112, 396792, 15663360),
    3: (50050, 6718856, 51778972, 30074896256),
}
PUBLISHED_NONORIENTABLE = {
    1: (1, 9, 118, 1773),
    2: (6, 174, 4236, 97134),
    3: (128, 6786, 249416, 7820190),
    4: (3780, 301680, 15139800, 610410600),
}
