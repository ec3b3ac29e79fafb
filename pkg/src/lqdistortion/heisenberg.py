"""Heisenberg group backend: geodesics, direct Jacobian distortion, weights.

Conventions are fixed by the left-invariant frame
X1 = d/dx1 - (x2/2) d/dx3, X2 = d/dx2 + (x1/2) d/dx3 and locked by the
regression requirement that the profile's first-column Ricci value equal
h0^2 (the model-exactness invariant).  The vertical momentum h0 is the
constant of the geodesic equation; for covectors based at the origin the
exponential map has the usual rotating-momenta closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConjugatePointError
from .lq import DistortionCurve
from .riccati import CurvatureProfile
from .young import YoungDiagram

__all__ = [
    "HeisenbergCovector",
    "HeisenbergWeight",
    "BallConstants",
    "heisenberg_exp",
    "group_product",
    "jacobian_determinant",
    "heisenberg_distortion_direct",
    "heisenberg_profile",
    "heisenberg_distance",
    "ball_constants",
    "heisenberg_n0",
    "heisenberg_rho_shift_bound",
]

H0_CUT = 2 * math.pi  # covectors with |h0| >= 2 pi hit the cut locus before t = 1
N0_EPS = 1e-9         # convention for the L_R = 0 degenerate limit of N0


@dataclass(frozen=True)
class HeisenbergCovector:
    p1: float
    p2: float
    h0: float
    base: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def speed(self) -> float:
        return math.hypot(self.p1, self.p2)

    def unit(self) -> "HeisenbergCovector":
        """Covector of the unit-speed reparametrization (all momenta divided by speed)."""
        c = self.speed
        if c == 0:
            raise ValueError("trivial covector has no unit normalization")
        return HeisenbergCovector(self.p1 / c, self.p2 / c, self.h0 / c, self.base)


def group_product(a, b):
    """Heisenberg product (a1,a2,a3)*(b1,b2,b3) matching the frame convention."""
    return (a[0] + b[0], a[1] + b[1],
            a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0]))


def _phi(u: float) -> complex:
    """(e^{iu} - 1) / (iu), series through u = 0."""
    if abs(u) < 1e-3:
        return (1 + 1j * u / 2 - u * u / 6 - 1j * u ** 3 / 24 + u ** 4 / 120
                + 1j * u ** 5 / 720 - u ** 6 / 5040)
    return (complex(math.cos(u), math.sin(u)) - 1) / complex(0, u)


def _psi(u: float) -> float:
    """(u - sin u) / u^3, series through u = 0 (third-coordinate kernel)."""
    if abs(u) < 1e-3:
        u2 = u * u
        return (1 - u2 / 20 + u2 * u2 / 840 - u2 ** 3 / 60480) / 6.0
    return (u - math.sin(u)) / u ** 3


def heisenberg_exp(cov: HeisenbergCovector, t: float):
    """Endpoint at time t of the normal geodesic with initial covector cov.

    Closed form with rotating horizontal momenta for h0 != 0; the straight
    line for h0 = 0.  Both branches share a series through h0*t = 0, so the
    map is smooth in all arguments.
    """
    w = complex(cov.p1, cov.p2)
    u = cov.h0 * t
    z = w * t * _phi(u)
    # |w|^2 (h0 t - sin h0 t) / (2 h0^2) = |w|^2 h0 t^3 psi(h0 t) / 2
    x3 = 0.5 * (cov.p1 ** 2 + cov.p2 ** 2) * cov.h0 * t ** 3 * _psi(u)
    point = (z.real, z.imag, x3)
    if cov.base != (0.0, 0.0, 0.0):
        point = group_product(cov.base, point)
    return np.array(point)


def jacobian_determinant(cov: HeisenbergCovector, t: float, step: float = 1e-5) -> float:
    """Signed det of d exp(t .) / d covector, Richardson-extrapolated central differences."""
    lam = np.array([cov.p1, cov.p2, cov.h0])

    def jac(h):
        cols = []
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            plus = heisenberg_exp(HeisenbergCovector(*(lam + e), base=cov.base), t)
            minus = heisenberg_exp(HeisenbergCovector(*(lam - e), base=cov.base), t)
            cols.append((plus - minus) / (2 * h))
        return np.column_stack(cols)

    J = (4 * jac(step / 2) - jac(step)) / 3
    return float(np.linalg.det(J))


@dataclass(frozen=True)
class HeisenbergWeight:
    """Weight psi with horizontal gradient and symmetrized horizontal Hessian."""

    psi: Callable[[np.ndarray], float]
    grad_h: Callable[[np.ndarray], tuple[float, float]]
    hess_h: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    @staticmethod
    def quadratic() -> "HeisenbergWeight":
        """psi = (x1^2 + x2^2)/2; horizontally 1-convex, L_R = R, C_R = 1."""
        return HeisenbergWeight(
            psi=lambda x: 0.5 * (x[0] ** 2 + x[1] ** 2),
            grad_h=lambda x: (x[0], x[1]),
            hess_h=lambda x: np.eye(2),
            name="quadratic",
        )

    @staticmethod
    def polynomial(terms) -> "HeisenbergWeight":
        """psi = sum c * x1^i * x2^j from (c, i, j) triples.

        Weights independent of x3, so the horizontal derivatives reduce to
        plain partials and the symmetrized horizontal Hessian is the
        Euclidean one in (x1, x2).
        """
        terms = [(float(c), int(i), int(j)) for c, i, j in terms]

        def psi(x):
            return sum(c * x[0] ** i * x[1] ** j for c, i, j in terms)

        def grad_h(x):
            g1 = sum(c * i * x[0] ** (i - 1) * x[1] ** j for c, i, j in terms if i > 0)
            g2 = sum(c * j * x[0] ** i * x[1] ** (j - 1) for c, i, j in terms if j > 0)
            return g1, g2

        def hess_h(x):
            h11 = sum(c * i * (i - 1) * x[0] ** (i - 2) * x[1] ** j
                      for c, i, j in terms if i > 1)
            h22 = sum(c * j * (j - 1) * x[0] ** i * x[1] ** (j - 2)
                      for c, i, j in terms if j > 1)
            h12 = sum(c * i * j * x[0] ** (i - 1) * x[1] ** (j - 1)
                      for c, i, j in terms if i > 0 and j > 0)
            return np.array([[h11, h12], [h12, h22]])

        return HeisenbergWeight(psi=psi, grad_h=grad_h, hess_h=hess_h, name="custom-poly")

    def exact_ball_constants(self, radius: float) -> "BallConstants | None":
        if self.name == "quadratic":
            return BallConstants(L=radius, C=1.0, radius=radius, samples=0, method="exact")
        return None


def heisenberg_profile(cov: HeisenbergCovector, weight: HeisenbergWeight | None = None,
                       speed_normalized: bool = False) -> CurvatureProfile:
    """Curvature profile of a Heisenberg geodesic on the diagram [2, 1].

    The canonical curvature is constant diag(h0^2, 0, 0) in the box order
    (first-column box of the length-2 row, its second column, the motion
    box).  A weight contributes rho = -g(grad psi, gdot) and
    rho_dot = -Hess psi(gdot, gdot) - h0 g(grad psi, J gdot) along the
    geodesic.
    """
    if cov.speed == 0:
        raise ValueError("profile needs a non-trivial geodesic")
    if speed_normalized:
        cov = cov.unit()
    diagram = YoungDiagram((2, 1))
    R = np.diag([cov.h0 ** 2, 0.0, 0.0])
    if weight is None:
        return CurvatureProfile.constant(diagram, R)

    def momenta(t: float) -> tuple[float, float]:
        a = cov.h0 * t
        ca, sa = math.cos(a), math.sin(a)
        return ca * cov.p1 - sa * cov.p2, sa * cov.p1 + ca * cov.p2

    def rho(t: float) -> float:
        x = heisenberg_exp(cov, t)
        g1, g2 = weight.grad_h(x)
        h1, h2 = momenta(t)
        return -(g1 * h1 + g2 * h2)

    def rho_dot(t: float) -> float:
        x = heisenberg_exp(cov, t)
        g1, g2 = weight.grad_h(x)
        h1, h2 = momenta(t)
        h = np.array([h1, h2])
        hess = np.asarray(weight.hess_h(x), float)
        # J gdot has frame components (-h2, h1)
        return -(h @ hess @ h) - cov.h0 * (g1 * (-h2) + g2 * h1)

    return CurvatureProfile(diagram=diagram, matrix=lambda t, _R=R: _R,
                            rho=rho, rho_dot=rho_dot)


def heisenberg_distortion_direct(cov: HeisenbergCovector, t_grid,
                                 weight: HeisenbergWeight | None = None,
                                 step: float = 1e-5) -> DistortionCurve:
    """Distortion from the Jacobian of the exponential, beta_t = J_t / J_1.

    With a weight the densities e^{-psi} at the moving and final points
    enter the ratio.  Requires |h0| < 2 pi so t = 1 is not conjugate.
    """
    if abs(cov.h0) >= H0_CUT * (1 - 1e-9):
        raise ConjugatePointError(f"|h0| = {abs(cov.h0):.4f} >= 2 pi: endpoint beyond cut locus")
    ts = np.asarray(t_grid, float)
    if np.any(ts <= 0) or np.any(ts > 1):
        raise ValueError("t_grid must lie in (0, 1]")
    J1 = jacobian_determinant(cov, 1.0, step=step)
    vals = np.array([jacobian_determinant(cov, t, step=step) for t in ts]) / J1
    if weight is not None:
        psi1 = weight.psi(heisenberg_exp(cov, 1.0))
        w = np.array([math.exp(psi1 - weight.psi(heisenberg_exp(cov, t))) for t in ts])
        vals = vals * w
    return DistortionCurve(t=ts, beta=vals, method="geometric-jacobian")


def heisenberg_distance(point) -> float:
    """d_SR from the origin, by inverting the exponential map.

    Uses the monotone ratio x3/|z|^2 to recover h0, then the horizontal
    chord length; the vertical axis is the h0 -> 2 pi limit.
    """
    x1, x2, x3 = float(point[0]), float(point[1]), float(point[2])
    r = math.hypot(x1, x2)
    if abs(x3) < 1e-15:
        return r
    if r < 1e-12:
        return math.sqrt(4 * math.pi * abs(x3))

    # mu(u) = (u - sin u) / (8 sin^2(u/2)) solves x3/r^2 = mu(h0) on (-2pi, 2pi)
    target = abs(x3) / r ** 2

    def mu(u):
        s = math.sin(u / 2)
        return (u - math.sin(u)) / (8 * s * s)

    lo, hi = 1e-9, 2 * math.pi - 1e-9
    if mu(hi) < target:
        return math.sqrt(4 * math.pi * abs(x3))  # effectively on the axis
    for _ in range(200):
        mid = (lo + hi) / 2
        if mu(mid) < target:
            lo = mid
        else:
            hi = mid
    u = (lo + hi) / 2
    return r * u / (2 * math.sin(u / 2))


@dataclass(frozen=True)
class BallConstants:
    """Estimated sup-gradient and inf-Hessian constants over a metric ball.

    Sample-cloud values are estimates, not exact suprema; ``samples``
    records the cloud size and ``method`` whether the numbers are exact.
    """

    L: float
    C: float
    radius: float
    samples: int
    method: str = "sample-cloud"


def ball_constants(weight: HeisenbergWeight, radius: float, samples: int = 10000,
                   seed: int = 0) -> BallConstants:
    """Estimate L_R = sup ||grad_H psi|| and C_R = inf eig Hess_H psi over B_R(0).

    Low-discrepancy points fill the bounding box of the ball and are kept
    when their sub-Riemannian distance to the origin is at most R.
    """
    from scipy.stats import qmc

    exact = weight.exact_ball_constants(radius)
    if exact is not None:
        return exact
    sampler = qmc.Halton(d=3, seed=seed)
    box = sampler.random(samples)
    x3max = radius ** 2 / (4 * math.pi)
    pts = np.column_stack([
        (2 * box[:, 0] - 1) * radius,
        (2 * box[:, 1] - 1) * radius,
        (2 * box[:, 2] - 1) * x3max,
    ])
    kept = 0
    L = 0.0
    C = math.inf
    for p in pts:
        if heisenberg_distance(p) > radius:
            continue
        kept += 1
        g1, g2 = weight.grad_h(p)
        L = max(L, math.hypot(g1, g2))
        C = min(C, float(np.linalg.eigvalsh(np.asarray(weight.hess_h(p), float)).min()))
    if kept == 0:
        raise ValueError("no sample points landed in the ball; increase samples")
    return BallConstants(L=L, C=C, radius=radius, samples=kept, method="sample-cloud")


def heisenberg_n0(C_R: float, L_R: float, h0: float, dist: float) -> float | None:
    """Effective dimension N0 = 5 + (3/2) L^2 / (C - |h0| L / dist) of the convex-weight bound.

    None when the admissibility condition |h0| < (C/L) * dist fails
    (strict); the L = 0 degenerate limit returns 5 + N0_EPS.
    """
    if C_R <= 0:
        raise ValueError("C_R must be positive")
    if L_R < 0 or dist <= 0:
        raise ValueError("L_R must be >= 0 and dist > 0")
    if L_R == 0.0:
        return 5.0 + N0_EPS
    if not abs(h0) < (C_R / L_R) * dist:
        return None
    return 5.0 + 1.5 * L_R ** 2 / (C_R - abs(h0) * L_R / dist)


def heisenberg_rho_shift_bound(dist: float, L_R: float, t: float) -> float:
    """Shift-mode lower bound t^5 e^{dist * L_R (t - 1)} for the weighted coefficient."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    return t ** 5 * math.exp(dist * L_R * (t - 1.0))
