"""Closed-form distortion coefficients of the constant-curvature model families.

Every formula is the real-analytic continuation in the curvature parameters,
evaluated in complex arithmetic under the principal square-root branch, with
Taylor fallbacks near removable singularities so each function is total away
from genuine poles.  Poles are conjugate times and surface as PoleError.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError

__all__ = [
    "sin_ratio",
    "beta_riemannian",
    "beta_riemannian_sharp",
    "TwoColumnParams",
    "beta_two_column",
    "beta_two_column_k2zero",
    "beta_two_column_resonant",
    "g_of_z",
    "check_g_bound",
    "conjugate_time_single_kappa",
    "conjugate_time_two_column_bound",
    "model_beta_single_row",
    "model_product_beta",
]

_SERIES_Z = 0.05       # |theta * t| below which series evaluation kicks in
_POLE_REL = 1e-12      # normalized denominator magnitude treated as a pole
_IMAG_TOL = 1e-10      # residual imaginary part allowed after continuation


def _pole_guard(den: complex, scale: float, where: str) -> None:
    if abs(den) < _POLE_REL * max(scale, 1e-300):
        raise PoleError(f"conjugate-point pole in {where}")


def _realize(z: complex, where: str) -> float:
    if abs(z.imag) > _IMAG_TOL * max(1.0, abs(z.real)):
        raise PoleError(f"excessive imaginary residue {z.imag:.3e} in {where} (branch bug)")
    return z.real


def sin_ratio(kappa: float, t: float) -> float:
    """Analytic continuation of sin(sqrt(kappa) t) / sin(sqrt(kappa)).

    Trigonometric for kappa > 0, t at kappa = 0, hyperbolic for kappa < 0;
    series through |kappa| < 1e-6 keeps the crossing smooth.  Poles sit at
    kappa = (m pi)^2, m >= 1.
    """
    if abs(kappa) < 1e-6:
        # sin(sqrt(k) x)/ (sqrt(k) x) = 1 - k x^2/6 + k^2 x^4/120 - ...
        num = t * (1 - kappa * t * t / 6 + kappa * kappa * t ** 4 / 120)
        den = 1 - kappa / 6 + kappa * kappa / 120
        return num / den
    if kappa > 0:
        a = math.sqrt(kappa)
        den = math.sin(a)
        _pole_guard(den, 1.0, "sin_ratio")
        return math.sin(a * t) / den
    a = math.sqrt(-kappa)
    return math.sinh(a * t) / math.sinh(a)


def beta_riemannian(kappa: float, n: int, t: float) -> float:
    """Model coefficient of the single-column diagram with Q = kappa * I."""
    return sin_ratio(kappa, t) ** n


def beta_riemannian_sharp(kappa: float, n: int, t: float) -> float:
    """Sharp variant t * sin_ratio^{n-1} (no curvature along the motion)."""
    return t * sin_ratio(kappa, t) ** (n - 1)


@dataclass(frozen=True)
class TwoColumnParams:
    """Spectral parameters of the one-row, two-column model."""

    kappa1: float
    kappa2: float

    @property
    def x(self) -> float:
        return self.kappa1 / 2

    @property
    def y(self) -> complex:
        return cmath.sqrt(4 * self.kappa2 + self.kappa1 ** 2) / 2

    @property
    def theta_plus(self) -> complex:
        return (cmath.sqrt(self.x + self.y) + cmath.sqrt(self.x - self.y)) / 2

    @property
    def theta_minus(self) -> complex:
        return (cmath.sqrt(self.x + self.y) - cmath.sqrt(self.x - self.y)) / 2

    def identity_defects(self) -> tuple[float, float]:
        """|theta+^2 + theta-^2 - kappa1/2| and |theta+^2 theta-^2 - (kappa1^2+4 kappa2)/16|."""
        tp2 = self.theta_plus ** 2
        tm2 = self.theta_minus ** 2
        return (abs(tp2 + tm2 - self.kappa1 / 2),
                abs(tp2 * tm2 - (self.kappa1 ** 2 + 4 * self.kappa2) / 16))


def _two_column_series(S: complex, P: complex, t: float) -> complex:
    # num(t) / (P D) with num = th-^2 sin^2(th+ t) - th+^2 sin^2(th- t);
    # S = th+^2 + th-^2, P = th+^2 th-^2.  Valid for small |theta t|.
    t2 = t * t
    return (-(t2 ** 2) / 3 + (2 * S / 45) * t2 ** 3 - ((S * S - P) / 315) * t2 ** 4
            + (2 * S * (S * S - 2 * P) / 14175) * t2 ** 5
            - ((S ** 4 - 3 * S * S * P + P * P) / 233887.5) * t2 ** 6)


def beta_two_column(kappa1: float, kappa2: float, t: float) -> float:
    """Two-column model coefficient for Q = diag(kappa1, kappa2).

    Evaluates the closed form in complex arithmetic; dispatches to the
    degenerate formulas when 4*kappa2 + kappa1^2 ~ 0 (resonant) or
    kappa2 ~ 0, and to a bivariate series when the parameters are tiny.
    """
    if abs(4 * kappa2 + kappa1 ** 2) < 1e-7 * max(1.0, kappa1 ** 2):
        return beta_two_column_resonant(kappa1, t)
    if abs(kappa2) < 1e-7 * max(1.0, abs(kappa1)):
        return beta_two_column_k2zero(kappa1, t)
    p = TwoColumnParams(kappa1, kappa2)
    tp, tm = p.theta_plus, p.theta_minus
    S = tp * tp + tm * tm
    P = tp * tp * tm * tm
    D = tp * tp - tm * tm

    def num_over_pd(s: float) -> complex:
        if max(abs(tp), abs(tm)) * s < _SERIES_Z:
            return _two_column_series(S, P, s)
        raw = tm ** 2 * cmath.sin(tp * s) ** 2 - tp ** 2 * cmath.sin(tm * s) ** 2
        return raw / (P * D)

    if max(abs(tp), abs(tm)) >= _SERIES_Z:
        raw1 = tm ** 2 * cmath.sin(tp) ** 2
        raw2 = tp ** 2 * cmath.sin(tm) ** 2
        _pole_guard(raw1 - raw2, max(abs(raw1), abs(raw2)), "beta_two_column")
    # -num/(P D) is a positive multiple of det N; a sign flip at either
    # evaluation point certifies a conjugate time at or before it
    det_t = _realize(-num_over_pd(t), "beta_two_column")
    det_1 = _realize(-num_over_pd(1.0), "beta_two_column")
    if det_t <= 0 or det_1 <= 0:
        raise PoleError("conjugate time at or before the evaluation point in beta_two_column")
    return det_t / det_1


def beta_two_column_k2zero(kappa1: float, t: float) -> float:
    """Two-column coefficient at kappa2 = 0, theta = sqrt(kappa1)/2.

    sin(t th)/sin(th) * (t th cos(t th) - sin(t th)) / (th cos th - sin th),
    with the t^4 series through theta ~ 0.
    """
    w = kappa1 / 4.0  # theta^2, real in all branches

    def factor(s: float) -> complex:
        # f(s) = sin(s th) (s th cos(s th) - sin(s th)) / (-th^4 s^4 / 3):
        # -> series in s^2 w, real; keeps the removable singularity smooth
        z2 = s * s * w
        if abs(z2) < _SERIES_Z ** 2:
            sin_part = 1 - z2 / 6 + z2 * z2 / 120 - z2 ** 3 / 5040
            bracket = 1 - z2 / 10 + z2 * z2 / 280 - z2 ** 3 / 15120
            return sin_part * bracket
        th = cmath.sqrt(complex(kappa1)) / 2
        return (cmath.sin(s * th) * (s * th * cmath.cos(s * th) - cmath.sin(s * th))) / (-(th ** 4) * s ** 4 / 3)

    den = _realize(factor(1.0), "beta_two_column_k2zero")
    _pole_guard(complex(den), 1.0, "beta_two_column_k2zero")
    num = _realize(factor(t), "beta_two_column_k2zero")
    if num <= 0 or den <= 0:  # factor is a positive multiple of det N / t^4
        raise PoleError("conjugate time at or before the evaluation point in beta_two_column_k2zero")
    return t ** 4 * num / den


def beta_two_column_resonant(kappa1: float, t: float) -> float:
    """Two-column coefficient on the locus 4*kappa2 + kappa1^2 = 0.

    (sin^2(t th) - (t th)^2) / (sin^2 th - th^2) with th^2 = kappa1/2 (the
    limit of the spectral parameters as the discriminant vanishes), series
    fallback near th = 0.  No poles for real kappa1.
    """
    w = kappa1 / 2.0  # theta^2

    def factor(s: float) -> complex:
        # (sin^2(s th) - (s th)^2) / (-s^4 th^4 / 3), series in s^2 w
        z2 = s * s * w
        if abs(z2) < _SERIES_Z ** 2:
            return 1 - 2 * z2 / 15 + z2 * z2 / 105 - 2 * z2 ** 3 / 4725
        th = cmath.sqrt(complex(kappa1) / 2)
        return (cmath.sin(s * th) ** 2 - (s * th) ** 2) / (-(s ** 4) * th ** 4 / 3)

    den = _realize(factor(1.0), "beta_two_column_resonant")
    _pole_guard(complex(den), 1.0, "beta_two_column_resonant")
    num = _realize(factor(t), "beta_two_column_resonant")
    if num <= 0 or den <= 0:
        raise PoleError("conjugate time at or before the evaluation point in beta_two_column_resonant")
    return t ** 4 * num / den


def g_of_z(z: float) -> float:
    """g(z) = 2 z (z - sin z) / (z^2 + 2 cos z - 2), with g(0) = 4 by limit.

    Bounded above by 4 for z >= 0 with equality only at 0; series evaluation
    below z = 0.25 avoids the quartic cancellation of the denominator.
    """
    if z < 0:
        raise ValueError("g is defined for z >= 0")
    if z < 0.25:
        u = z * z
        num = 1 - u / 20 + u * u / 840 - u ** 3 / 60480 + u ** 4 / 6652800
        den = 1 - u / 30 + u * u / 1680 - u ** 3 / 151200 + u ** 4 / 19958400
        return 4 * num / den
    return 2 * z * (z - math.sin(z)) / (z * z + 2 * math.cos(z) - 2)


@dataclass(frozen=True)
class GBoundReport:
    z_max: float
    samples: int
    max_value: float
    argmax: float
    all_below_4: bool


def check_g_bound(z_max: float = 200.0, samples: int = 100000) -> GBoundReport:
    """Sample g on (0, z_max] and report the maximum (must stay below 4)."""
    zs = np.linspace(z_max / samples, z_max, samples)
    vals = np.array([g_of_z(z) for z in zs])
    j = int(np.argmax(vals))
    return GBoundReport(z_max=z_max, samples=samples, max_value=float(vals[j]),
                        argmax=float(zs[j]), all_below_4=bool(vals[j] < 4.0))


def conjugate_time_single_kappa(kappa: float) -> float:
    """First conjugate time pi/sqrt(kappa) of the scalar model; inf for kappa <= 0."""
    if kappa > 0:
        return math.pi / math.sqrt(kappa)
    return math.inf


def conjugate_time_two_column_bound(kappa1: float, kappa2: float) -> float:
    """Upper bound 2 pi / Re(sqrt(x+y) - sqrt(x-y)) on the first conjugate time.

    Finite exactly under (kappa1 > 0 and kappa1^2 + 4 kappa2 > 0) or
    (kappa1 <= 0 and kappa2 > 0); returns inf otherwise.
    """
    finite = (kappa1 > 0 and kappa1 ** 2 + 4 * kappa2 > 0) or (kappa1 <= 0 and kappa2 > 0)
    if not finite:
        return math.inf
    p = TwoColumnParams(kappa1, kappa2)
    denom = (2 * p.theta_minus).real  # sqrt(x+y) - sqrt(x-y)
    if denom <= 0:
        return math.inf
    return 2 * math.pi / denom


def model_beta_single_row(kappas, t: float) -> float:
    """Coefficient of the single-row model of length len(kappas), Q = diag(kappas).

    Closed forms for lengths 1 and 2; longer rows fall back to the
    Hamiltonian determinant route.
    """
    kappas = tuple(float(k) for k in kappas)
    if len(kappas) == 1:
        return sin_ratio(kappas[0], t)
    if len(kappas) == 2:
        return beta_two_column(kappas[0], kappas[1], t)
    from .lq import LQProblem, beta_from_determinant
    from .young import YoungDiagram
    problem = LQProblem.from_diagram(YoungDiagram((len(kappas),)), Q=np.diag(kappas))
    return float(beta_from_determinant(problem, np.array([t])).beta[0])


def model_product_beta(levels, t: float, sharp: bool = False) -> float:
    """Product over levels of single-row model coefficients raised to level sizes.

    ``levels`` is a sequence of (size, kappas); each factor is the model of
    the single row of length len(kappas) with Q = diag(kappas).  With
    ``sharp`` the length-1 level's exponent drops by one (omitting it when
    zero) and the explicit factor t multiplies the result.
    """
    levels = [(int(r), tuple(float(k) for k in kaps)) for r, kaps in levels]
    out = 1.0
    if sharp:
        if not any(len(kaps) == 1 for _, kaps in levels):
            raise ValueError("sharp convention needs a level of length 1")
        out = t
    for r, kaps in levels:
        if r < 1:
            raise ValueError("level size must be positive")
        r_eff = r - 1 if (sharp and len(kaps) == 1) else r
        if r_eff == 0:
            continue
        out *= model_beta_single_row(kaps, t) ** r_eff
    return out
