"""Characteristic constants (tau, rho, gamma) of a degree set.

tau solves sum (d-1) tau^(d-2) = 1 on (0,1); then
rho = tau - sum tau^(d-1) and gamma = sqrt(2 rho / sum (d-1)(d-2) tau^(d-3)).
rho^p is the radius of convergence of Y_Delta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

from .tree_gf import DegreeSet


@dataclass(frozen=True)
class CharConstants:
    tau: float
    rho: float
    gamma: float
    period: int
    tolerance: float
    residual: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return {"tau": self.tau, "rho": self.rho, "gamma": self.gamma, "p": self.period}


@dataclass(frozen=True)
class SingularExpansion:
    alpha0: float
    alpha1: float
    radius: float


def _f(D: DegreeSet, tau: float) -> float:
    return math.fsum((d - 1) * tau ** (d - 2) for d in D.degrees) - 1.0


def solve_characteristic(D, tol: float = 1e-14) -> CharConstants:
    """Bisection for tau, then closed forms for rho and gamma."""
    D = DegreeSet.of(D)
    if tol <= 0:
        raise ValueError("tol must be positive")
    # f(0) = -1 and f(1) >= 1, f increasing: run to the float resolution
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _f(D, mid) < 0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    res = _f(D, tau)
    rho = tau - math.fsum(tau ** (d - 1) for d in D.degrees)
    second = math.fsum((d - 1) * (d - 2) * tau ** (d - 3) for d in D.degrees)
    gamma = math.sqrt(2.0 * rho / second)
    return CharConstants(tau, rho, gamma, D.p, tol, abs(res))


def singular_expansion(D, c: CharConstants | None = None) -> SingularExpansion:
    """Y(t) = alpha0 + alpha1 sqrt(1 - t/rho^p) + ..."""
    D = DegreeSet.of(D)
    c = c or solve_characteristic(D)
    return SingularExpansion(c.tau / c.rho, -c.gamma / (c.rho * math.sqrt(D.p)), c.rho ** D.p)


@dataclass
class SchemaReport:
    r: float
    s: float
    G: float
    G_w: float
    G_t: float
    G_ww: float
    residual_G: float
    residual_Gw: float
    residual_Gt: float
    alpha1_schema: float
    alpha1_closed: float
    ok: bool
    tol: float = field(default=1e-10)

    def as_dict(self):
        return dict(self.__dict__)


def verify_schema(D, c: CharConstants | None = None, tol: float = 1e-10) -> SchemaReport:
    """Check the implicit-function schema G(t,w) = sum_k t^k (w+1)^(kp+1) at (r,s).

    Y - 1 = G(t, Y - 1); the singular point is r = rho^p, s = tau/rho - 1
    where G = s and G_w = 1.
    """
    D = DegreeSet.of(D)
    c = c or solve_characteristic(D)
    p = D.p
    r = c.rho ** p
    s = c.tau / c.rho - 1.0
    w1 = s + 1.0
    G = math.fsum(r ** k * w1 ** (k * p + 1) for k in D.shifted)
    Gw = math.fsum((k * p + 1) * r ** k * w1 ** (k * p) for k in D.shifted)
    Gt = math.fsum(k * r ** (k - 1) * w1 ** (k * p + 1) for k in D.shifted)
    Gww = math.fsum((k * p + 1) * k * p * r ** k * w1 ** (k * p - 1) for k in D.shifted)
    a1_schema = -math.sqrt(2.0 * r * Gt / Gww)
    a1_closed = -c.gamma / (c.rho * math.sqrt(p))
    rg, rgw, rgt = abs(G - s), abs(Gw - 1.0), abs(Gt - 1.0 / (r * p))
    ok = rg <= tol and rgw <= tol and rgt <= tol * max(1.0, 1.0 / (r * p)) \
        and abs(a1_schema - a1_closed) <= tol * max(1.0, abs(a1_closed))
    return SchemaReport(r, s, G, Gw, Gt, Gww, rg, rgw, rgt, a1_schema, a1_closed, ok, tol)


def closed_form_single_degree(p: int) -> CharConstants:
    """Constants for Delta = {p+2}, in closed form."""
    tau = (p + 1) ** (-1.0 / p)
    rho = (p ** p / (p + 1) ** (p + 1)) ** (1.0 / p)
    gamma = math.sqrt(2.0 * (p + 1) ** (-(p + 2) / p))
    return CharConstants(tau, rho, gamma, p, 0.0)


def tree_asymptotic_log(D, n: int, c: CharConstants | None = None) -> float:
    """log of p gamma / (2 sqrt(pi)) n^(-3/2) rho^(-n): trees with n leaves, n = 1 mod p."""
    D = DegreeSet.of(D)
    c = c or solve_characteristic(D)
    return (math.log(D.p * c.gamma / (2.0 * math.sqrt(math.pi)))
            - 1.5 * math.log(n) - n * math.log(c.rho))
