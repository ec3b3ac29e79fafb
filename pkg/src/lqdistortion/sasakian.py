"""Sasakian and 3-Sasakian curvature formulas feeding the comparison engine.

Curvature inputs (the J-plane sectional value, the Tanno Ricci value, the
sectional-sum invariant of the 3-Sasakian case) are caller-supplied
scalars; this module evaluates the published formulas and the derived
bounds, it does not build manifolds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .closed_forms import beta_two_column_k2zero, sin_ratio

__all__ = [
    "SasakianData",
    "ThreeSasakianData",
    "sasakian_ricci",
    "sasakian_be_ricci",
    "sasakian_sharp_bound",
    "three_sasakian_ricci",
    "three_sasakian_kappas",
    "three_sasakian_mcp_condition",
    "THREE_SASAKIAN_K_THRESHOLD",
]

# smallest sectional lower bound K for which the two-column conditions hold
# for every geodesic: K >= -(13 + 2 sqrt(70)) / 3 ~ -9.911
THREE_SASAKIAN_K_THRESHOLD = -(13.0 + 2.0 * math.sqrt(70.0)) / 3.0


@dataclass(frozen=True)
class SasakianData:
    """Per-geodesic inputs on a (2d+1)-dimensional Sasakian manifold.

    ``r_term`` is R(gdot, J gdot, J gdot, gdot) and ``ric_term`` the Tanno
    Ricci value Ric(gdot); the weight enters through g(grad psi, gdot),
    g(grad psi, J gdot) and Hess psi(gdot, gdot).
    """

    d: int
    h0: float
    speed: float = 1.0
    r_term: float = 0.0
    ric_term: float = 0.0
    grad_dot: float = 0.0
    grad_J: float = 0.0
    hess_dot: float = 0.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("Sasakian dimension parameter d must be >= 1")
        if self.speed <= 0:
            raise ValueError("speed must be positive")


def sasakian_ricci(data: SasakianData) -> tuple[float, float, float | None]:
    """Superbox Ricci values (Ric^a, Ric^b, Ric^c); Ric^c is absent for d = 1."""
    s2 = data.speed ** 2
    ric_a = 0.0
    ric_b = data.r_term / s2 + data.h0 ** 2
    if data.d == 1:
        return ric_a, ric_b, None
    ric_c = (data.ric_term - data.r_term) / s2 + 0.25 * data.h0 ** 2 * (2 * data.d - 2)
    return ric_a, ric_b, ric_c


def sasakian_be_ricci(data: SasakianData, N: float) -> tuple[float, float, float | None]:
    """Bakry-Emery superbox values for a weighted Sasakian manifold.

    The c-superbox uses the effective size 2d - 2 of the sharp convention
    (the motion direction removed); for d = 1 it is reported as absent.
    """
    d = data.d
    n = 2 * d + 1
    if N <= n:
        raise ValueError(f"N must exceed 2d+1 = {n}")
    k = 2 * d
    s2 = data.speed ** 2
    weight_lin = data.hess_dot + data.h0 * data.grad_J
    weight_quad = (n / (N - n)) * data.grad_dot ** 2 / k ** 2

    ric_a = 0.0
    ric_b = data.r_term / s2 + data.h0 ** 2 + weight_lin / k - weight_quad
    if d == 1:
        return ric_a, ric_b, None
    ric_c = ((data.ric_term - data.r_term) / s2 + 0.25 * data.h0 ** 2 * (2 * d - 2)
             + (2 * d - 2) * weight_lin / k - (2 * d - 2) * weight_quad)
    return ric_a, ric_b, ric_c


def sasakian_sharp_bound(d: int, N: float, kappa_b: float, kappa_c: float, t: float) -> float:
    """Sharp lower bound for beta_t^{1/(N-1)} under the two Sasakian Ricci bounds.

    t^{1/(N-1)} * sin_ratio(kappa_c, t)^{(2d-2)/2d}
    * two-column-k2zero(kappa_b, t)^{1/2d}; the kappa_c factor drops out
    at d = 1.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if N <= 2 * d + 1:
        raise ValueError(f"N must exceed 2d+1 = {2 * d + 1}")
    out = t ** (1.0 / (N - 1.0)) * beta_two_column_k2zero(kappa_b, t) ** (1.0 / (2 * d))
    if d > 1:
        out *= sin_ratio(kappa_c, t) ** ((2.0 * d - 2.0) / (2.0 * d))
    return out


@dataclass(frozen=True)
class ThreeSasakianData:
    """Unit-speed geodesic data on a (4d+3)-dimensional 3-Sasakian manifold.

    ``v`` collects the three vertical constants of the geodesic equation and
    ``varrho`` the sectional-sum invariant over the associated triple.
    """

    d: int
    v: tuple[float, float, float]
    varrho: float = 0.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("3-Sasakian dimension parameter d must be >= 1")

    @property
    def v_norm_sq(self) -> float:
        return sum(x * x for x in self.v)


def three_sasakian_ricci(data: ThreeSasakianData) -> tuple[float, float, float]:
    """Superbox Ricci values (Ric^a, Ric^b, Ric^c) of a unit-speed geodesic."""
    s = data.v_norm_sq
    ric_a = 3.0 * (0.75 * data.varrho - 3.5 * s - 1.875 * s * s)
    ric_b = 3.0 * (4.0 + 5.0 * s)
    ric_c = (4.0 * data.d - 4.0) * (1.0 + s)
    return ric_a, ric_b, ric_c


def three_sasakian_kappas(v_norm_sq: float, K: float) -> tuple[float, float, float]:
    """Normalized bounds (kappa_a, kappa_b, kappa_c) under Sec >= K.

    From varrho(v) >= 2 K ||v||^2: kappa_a = ||v||^2 (3K/2 - 7/2 - 15||v||^2/8),
    kappa_b = 4 + 5 ||v||^2, kappa_c = 0.
    """
    s = float(v_norm_sq)
    if s < 0:
        raise ValueError("||v||^2 must be non-negative")
    kappa_a = s * (1.5 * K - 3.5 - 1.875 * s)
    kappa_b = 4.0 + 5.0 * s
    return kappa_a, kappa_b, 0.0


def three_sasakian_mcp_condition(K: float) -> bool:
    """Whether Sec >= K forces the two-column conditions for every geodesic.

    Equivalent to (35/2) s^2 + (26 + 6K) s + 16 >= 0 for all s >= 0, i.e.
    K >= -(13 + 2 sqrt(70)) / 3.
    """
    return K >= THREE_SASAKIAN_K_THRESHOLD
