"""Exact counting series of leaf-rooted maps and their asymptotics.

A_S^Delta(z) counts leaf-rooted (Delta u {1})-valent maps on the closed
surface with one face per boundary of S, by number of leaves (root
included).  It is assembled from the scheme inventory:

    A(z) = z^(2 chi) B(z^p),  B(t) = sum_S Z(t)^e_S prod_u Y_{Delta, deg u - 1}(t).
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from .char_system import solve_characteristic
from .exact_series import ContractViolation, TruncSeries, ts_binomial, ts_mul, ts_pow
from .scheme_constants import (
    BRUTE_FORCE_EDGE_CAP,
    Surface,
    brute_force_schemes,
    cubic_scheme_count,
    require_not_disc,
)
from .tree_gf import DegreeSet, _legs_y, z_series


@dataclass(frozen=True)
class InventoryEntry:
    edges: int
    degrees: Tuple[int, ...]  # non-root degrees, sorted
    multiplicity: int


class SchemeInventory(list):
    """List of :class:`InventoryEntry`, one per (edge count, degree multiset)."""

    def total(self, edges: int | None = None) -> int:
        return sum(x.multiplicity for x in self if edges is None or x.edges == edges)


def scheme_inventory(surface: Surface, max_edges: int | None = None) -> SchemeInventory:
    require_not_disc(surface)
    e = surface.scheme_edges
    if e > BRUTE_FORCE_EDGE_CAP:
        raise ContractViolation(
            f"scheme inventory needs 2-3chi(S) <= {BRUTE_FORCE_EDGE_CAP}; {surface} has {e}")
    maps, _ = brute_force_schemes(surface, max_edges or e, cubic_only=False)
    groups = Counter()
    for m in maps:
        groups[(m.num_edges, tuple(sorted(m.degrees()[1:])))] += 1
    return SchemeInventory(InventoryEntry(k[0], k[1], v) for k, v in sorted(groups.items()))


@lru_cache(maxsize=64)
def _inventory_cached(surface: Surface) -> SchemeInventory:
    return scheme_inventory(surface)


# ---------------------------------------------------------------------------


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def disc_count(n: int) -> int:
    """Triangulations of an n-gon: C(n-2) (leaf-rooted binary trees with n leaves)."""
    if n < 2:
        return 0
    return catalan(n - 2)


def triangular_series(surface: Surface, N: int) -> TruncSeries:
    """a(S) z (1-4z)^(3 chi/2 - 1) to order N."""
    require_not_disc(surface)
    a = cubic_scheme_count(surface)
    if N < 1:
        return TruncSeries([0], N)
    base = ts_binomial(3 * surface.chi - 2, 2, 4, N - 1)
    return TruncSeries([0] + [a * c for c in base.coeffs], N)


class ShiftedSeries:
    """A(z) = z^shift B(z^p), with B stored as an ordinary truncated series."""

    def __init__(self, B: TruncSeries, shift: int, p: int):
        self.B, self.shift, self.p = B, shift, p

    @property
    def order(self) -> int:
        # largest n whose coefficient is known
        return self.shift + self.p * self.B.order + (self.p - 1)

    def coeff(self, n: int):
        j, r = divmod(n - self.shift, self.p)
        if r or j < 0:
            return 0
        if j > self.B.order:
            raise ContractViolation(f"coefficient {n} beyond truncation")
        return self.B[j]

    def coefficients(self, upto: int) -> List:
        return [self.coeff(n) for n in range(upto + 1)]


def assemble_B(surface: Surface, D, inventory: Sequence[InventoryEntry], N: int,
               cubic_only: bool = False) -> TruncSeries:
    """B_S^Delta(t) to order N from a scheme inventory."""
    require_not_disc(surface)
    D = DegreeSet.of(D)
    Z = z_series(D, N)
    legs = _legs_y(D, N)
    out = TruncSeries.zero(N)
    zpow: Dict[int, TruncSeries] = {}
    for entry in inventory:
        if cubic_only and entry.edges != surface.scheme_edges:
            continue
        if any(d - 1 not in legs for d in entry.degrees):
            continue  # a vertex no leg-tree can realise
        if entry.edges not in zpow:
            zpow[entry.edges] = ts_pow(Z, entry.edges)
        term = zpow[entry.edges]
        for d in entry.degrees:
            term = ts_mul(term, legs[d - 1])
        out = out + entry.multiplicity * term
    return out


def exact_series(surface: Surface, D, nmax: int, inventory: Sequence[InventoryEntry] | None = None) -> ShiftedSeries:
    """A_S^Delta(z) with every coefficient up to z^nmax available."""
    D = DegreeSet.of(D)
    shift = 2 * surface.chi
    N = max(0, (nmax - shift) // D.p)
    if D.degrees == (3,) and inventory is None:
        # only cubic schemes survive: A = a z (T')^(2-3chi)
        A = triangular_series(surface, nmax)
        B = TruncSeries([A.coeffs[j + shift] if 0 <= j + shift <= nmax else 0 for j in range(N + 1)], N)
        return ShiftedSeries(B, shift, 1)
    inv = inventory if inventory is not None else _inventory_cached(surface)
    return ShiftedSeries(assemble_B(surface, D, inv, N), shift, D.p)


def exact_count(surface: Surface, D, n: int) -> int:
    if surface.is_disc:
        D = DegreeSet.of(D)
        if D.degrees != (3,):
            raise ContractViolation("disc counts implemented for triangulations only")
        return disc_count(n)
    return int(exact_series(surface, D, n).coeff(n))


# ---------------------------------------------------------------------------
# Asymptotics


def gamma_exact(twice_x: int) -> Tuple[Fraction, int]:
    """Gamma(twice_x / 2) as (q, k) meaning q * sqrt(pi)^k, for twice_x >= 1."""
    if twice_x < 1:
        raise ValueError("argument must be positive")
    if twice_x % 2 == 0:
        return Fraction(factorial(twice_x // 2 - 1)), 0
    m = (twice_x - 1) // 2  # Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
    return Fraction(factorial(2 * m), 4 ** m * factorial(m)), 1


def gamma_value(twice_x: int) -> float:
    q, k = gamma_exact(twice_x)
    return float(q) * math.sqrt(math.pi) ** k


@dataclass(frozen=True)
class AsymptoticEstimate:
    constant: float
    base: float
    poly_exponent: Fraction
    period: int
    residue: int
    scheme_count: int = 0

    def log_value(self, n: int) -> float:
        return math.log(self.constant) + float(self.poly_exponent) * math.log(n) + n * math.log(self.base)

    def value(self, n: int) -> float:
        return math.exp(self.log_value(n))

    def admissible(self, n: int) -> bool:
        return (n - self.residue) % self.period == 0

    def as_dict(self):
        return {
            "constant": self.constant,
            "base": self.base,
            "polyExponent": str(self.poly_exponent),
            "period": self.period,
            "residue": self.residue,
            "a": self.scheme_count,
        }


def asymptotic_estimate(surface: Surface, D) -> AsymptoticEstimate:
    """[z^n]A ~ c n^(-3chi/2) rho^(-n) for n = 2chi mod p."""
    require_not_disc(surface)
    D = DegreeSet.of(D)
    c = solve_characteristic(D)
    chi = surface.chi
    a = cubic_scheme_count(surface)
    const = a * D.p * (8 * c.gamma * c.rho) ** chi / (4 * gamma_value(2 - 3 * chi))
    return AsymptoticEstimate(const, 1.0 / c.rho, Fraction(-3 * chi, 2), D.p, (2 * chi) % D.p, a)


def disc_asymptotic_log(n: int) -> float:
    """log of n^(-3/2) 4^n / sqrt(pi)."""
    return -1.5 * math.log(n) + n * math.log(4) - 0.5 * math.log(math.pi)


@dataclass
class ConvergenceRow:
    n: int
    exact: int
    estimate: float
    ratio: float
    deviation: float  # (ratio - 1) sqrt(n)


def convergence_report(surface: Surface, D, n_list: Sequence[int]) -> List[ConvergenceRow]:
    D = DegreeSet.of(D)
    est = asymptotic_estimate(surface, D)
    A = exact_series(surface, D, max(n_list))
    rows = []
    for n in n_list:
        if not est.admissible(n):
            raise ContractViolation(f"n={n} is not congruent to {est.residue} mod {est.period}")
        ex = int(A.coeff(n))
        ratio = math.exp(math.log(ex) - est.log_value(n)) if ex > 0 else 0.0
        rows.append(ConvergenceRow(n, ex, est.value(n) if est.log_value(n) < 700 else math.inf,
                                   ratio, (ratio - 1.0) * math.sqrt(n)))
    return rows
