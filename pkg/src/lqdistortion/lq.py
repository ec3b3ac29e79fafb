"""Linear-quadratic model problems and their distortion coefficients.

A problem is a triple (A, B, Q) of n x n matrices: drift, controllable
directions (symmetric PSD) and potential (symmetric).  The distortion
coefficient is computed by two independent routes: the determinant of the
propagated Hamiltonian block, and quadrature of the Riccati trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import AmbiguousRootError, ConjugatePointError
from .young import YoungDiagram, kalman_rank, normal_form_matrices, vanishing_order

__all__ = [
    "LQProblem",
    "HamiltonianPropagation",
    "DistortionCurve",
    "propagate",
    "beta_from_determinant",
    "beta_from_riccati_trace",
    "first_conjugate_time",
    "homogeneity_check",
]

PSD_TOL = 1e-10


def _sym_check(M: np.ndarray, name: str, tol: float = 1e-10) -> None:
    if np.max(np.abs(M - M.T)) > tol * max(1.0, np.max(np.abs(M))):
        raise ValueError(f"{name} must be symmetric")


@dataclass(frozen=True)
class LQProblem:
    """Controllable LQ model (A, B, Q); B symmetric PSD, Kalman rank n."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, float))
        B = np.atleast_2d(np.asarray(self.B, float))
        Q = np.atleast_2d(np.asarray(self.Q, float))
        n = A.shape[0]
        if A.shape != (n, n) or B.shape != (n, n) or Q.shape != (n, n):
            raise ValueError(f"A, B, Q must be square of equal size, got {A.shape}, {B.shape}, {Q.shape}")
        _sym_check(B, "B")
        _sym_check(Q, "Q")
        if np.linalg.eigvalsh((B + B.T) / 2).min() < -PSD_TOL:
            raise ValueError("B must be positive semidefinite")
        if kalman_rank(A, B) != n:
            raise ValueError("(A, B) fails the Kalman rank condition")
        for M in (A, B, Q):
            M.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def hamiltonian_matrix(self) -> np.ndarray:
        """Constant 2n x 2n block matrix [[-A^T, -Q], [B, A]]."""
        n = self.n
        H = np.zeros((2 * n, 2 * n))
        H[:n, :n] = -self.A.T
        H[:n, n:] = -self.Q
        H[n:, :n] = self.B
        H[n:, n:] = self.A
        return H

    def scaled(self, eps_B: float = 1.0, eps_Q: float = 1.0) -> "LQProblem":
        return LQProblem(self.A.copy(), eps_B * self.B, eps_Q * self.Q)

    @classmethod
    def from_diagram(cls, diagram: YoungDiagram, Q: np.ndarray | None = None,
                     superbox_kappas=None) -> "LQProblem":
        """Constant-curvature model of a diagram: A = gamma1^T, B = gamma2.

        ``superbox_kappas`` assigns one number per superbox (in
        ``diagram.superboxes`` order) and produces the diagonal Q with that
        value on every box of the superbox.
        """
        nf = normal_form_matrices(diagram)
        n = diagram.n
        if superbox_kappas is not None:
            if Q is not None:
                raise ValueError("pass either Q or superbox_kappas, not both")
            kappas = list(superbox_kappas)
            if len(kappas) != len(diagram.superboxes):
                raise ValueError(
                    f"need {len(diagram.superboxes)} superbox values, got {len(kappas)}")
            Q = np.zeros((n, n))
            for sb, kap in zip(diagram.superboxes, kappas):
                for g in sb.boxes:
                    Q[g, g] = kap
        elif Q is None:
            Q = np.zeros((n, n))
        return cls(nf.A, nf.B, np.asarray(Q, float))

    def to_json(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "Q": self.Q.tolist()}


@dataclass(frozen=True)
class HamiltonianPropagation:
    """Sampled solution (M(t), N(t)) of the linear Hamiltonian system."""

    t: np.ndarray
    M: np.ndarray  # (J, n, n)
    N: np.ndarray  # (J, n, n)

    def symplectic_defect(self) -> float:
        """max_t || M(t)^T N(t) - N(t)^T M(t) ||_inf (Lagrangianity)."""
        G = np.einsum("jki,jkl->jil", self.M, self.N)
        return float(np.max(np.abs(G - np.transpose(G, (0, 2, 1)))))

    def det_N(self) -> np.ndarray:
        return np.linalg.det(self.N)


def _propagate_nodes(H: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """exp(H t) at each node.  Uniform spacing reuses a single stepper.

    The stepping chain is re-anchored with a direct exponential every 64
    nodes: long products let rounding in decaying modes get swamped by
    growing ones (relative error ~ eps * e^{spectral width * t}).
    """
    ts = np.asarray(ts, float)
    n2 = H.shape[0]
    out = np.empty((len(ts), n2, n2))
    if len(ts) == 0:
        return out
    dts = np.diff(ts)
    if len(ts) > 2 and dts.size and np.allclose(dts, dts[0], rtol=0, atol=1e-13):
        S = expm(H * dts[0])
        E = expm(H * ts[0])
        out[0] = E
        for j in range(1, len(ts)):
            E = expm(H * ts[j]) if j % 64 == 0 else S @ E
            out[j] = E
    else:
        for j, t in enumerate(ts):
            out[j] = expm(H * t)
    return out


def propagate(problem: LQProblem, T: float = 1.0, steps: int = 2048) -> HamiltonianPropagation:
    """Integrate d/dt (M; N) = [[-A^T, -Q], [B, A]] (M; N) from (I; 0) on [0, T].

    The coefficients are constant, so each step applies the matrix
    exponential of the block matrix; exact up to exponential-evaluation
    error.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = problem.n
    ts = np.linspace(0.0, T, steps + 1)
    E = _propagate_nodes(problem.hamiltonian_matrix, ts)
    return HamiltonianPropagation(t=ts, M=E[:, :n, :n].copy(), N=E[:, n:, :n].copy())


@dataclass(frozen=True)
class DistortionCurve:
    """Sampled distortion coefficient t -> beta_t, normalized to beta_1 = 1."""

    t: np.ndarray
    beta: np.ndarray
    method: str

    def __post_init__(self):
        if np.any(self.beta <= 0):
            raise ConjugatePointError("distortion coefficient must stay positive on (0, 1]")

    def to_rows(self):
        return [(float(t), float(b), self.method) for t, b in zip(self.t, self.beta)]


def _det_N_at(problem: LQProblem, ts: np.ndarray) -> np.ndarray:
    n = problem.n
    E = _propagate_nodes(problem.hamiltonian_matrix, np.asarray(ts, float))
    return np.linalg.det(E[:, n:, :n])


def _det_N_with_floor(problem: LQProblem, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """det N plus a rounding floor below which its sign is not trustworthy.

    The floor is eps-scaled by the Hadamard bound (product of row norms):
    dets closer to zero than that are indistinguishable from rounding noise
    of the entries, which happens for strongly hyperbolic problems at
    large t.
    """
    n = problem.n
    E = _propagate_nodes(problem.hamiltonian_matrix, np.asarray(ts, float))
    N = E[:, n:, :n]
    dets = np.linalg.det(N)
    hadamard = np.prod(np.linalg.norm(N, axis=2), axis=1)
    floor = 64 * n * np.finfo(float).eps * hadamard
    return dets, floor


def beta_from_determinant(problem: LQProblem, t_grid) -> DistortionCurve:
    """beta_t = det N(t) / det N(1); requires no conjugate time in (0, 1]."""
    ts = np.asarray(t_grid, float)
    if np.any(ts <= 0) or np.any(ts > 1):
        raise ValueError("t_grid must lie in (0, 1]")
    dets = _det_N_at(problem, ts)
    det1 = _det_N_at(problem, np.array([1.0]))[0]
    if det1 <= 0 or np.any(dets <= 0):
        raise ConjugatePointError("det N vanishes on (0, 1]: conjugate time inside the interval")
    return DistortionCurve(t=ts, beta=dets / det1, method="hamiltonian-determinant")


def beta_from_riccati_trace(problem: LQProblem, t_grid, steps: int = 4096) -> DistortionCurve:
    """beta_t = exp(-int_t^1 tr(B V + A) ds) with V from the limit Cauchy problem.

    V is obtained through the (M, N) linear lift integrated by RK4 (an
    independent route from the determinant formula).  The integrand carries
    a nu/s singularity at zero, nu being the vanishing order of det N;
    the smooth remainder is integrated by spline quadrature.
    """
    from .riccati import trace_log_beta  # local import; riccati builds on young only

    ts = np.asarray(t_grid, float)
    if np.any(ts <= 0) or np.any(ts > 1):
        raise ValueError("t_grid must lie in (0, 1]")
    nu = vanishing_order(problem.A, problem.B)
    log_beta = trace_log_beta(problem.A, problem.B, lambda t: problem.Q, None, nu, ts, steps=steps)
    return DistortionCurve(t=ts, beta=np.exp(log_beta), method="riccati-trace")


def first_conjugate_time(problem: LQProblem, t_max: float, scan_points: int = 4096,
                         t_start: float = 1e-3, xtol: float = 1e-12) -> float | None:
    """Smallest root of det N on (0, t_max], or None.

    Roots are located by a sign-change scan plus Brent refinement.  det N
    vanishes to high order at 0, so the scan starts at ``t_start``.  A dip
    of |det N| to zero without sign change (even-multiplicity root) raises
    AmbiguousRootError instead of guessing.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    ts = np.linspace(t_start, t_max, scan_points)
    d, floor = _det_N_with_floor(problem, ts)
    scale = float(np.max(np.abs(d)))
    if scale == 0.0:
        raise AmbiguousRootError("det N is identically zero on the scan grid")

    f = lambda t: _det_N_at(problem, np.array([t]))[0]

    flips = np.nonzero((d[:-1] > 0) != (d[1:] > 0))[0]
    # a bracket is a certified crossing only if it rises above rounding noise
    healthy = [int(j) for j in flips
               if max(abs(d[j]), abs(d[j + 1])) > max(floor[j], floor[j + 1])]
    first_cross = healthy[0] if healthy else None

    # near-zero dips before the first crossing signal an even-order root;
    # only trustworthy neighborhoods count (well above the rounding floor)
    guard = 1e-8
    limit = first_cross if first_cross is not None else len(ts) - 1
    for j in range(1, limit):
        if abs(d[j]) <= abs(d[j - 1]) and abs(d[j]) <= abs(d[j + 1]):
            lo = max(0, j - 10)
            hi = min(len(ts), j + 11)
            local = float(np.max(np.abs(d[lo:hi])))
            if local <= 100 * float(np.max(floor[lo:hi])):
                continue
            # parabola through the three points, value at its vertex
            a = (d[j - 1] - 2 * d[j] + d[j + 1]) / 2
            b = (d[j + 1] - d[j - 1]) / 2
            vertex = d[j] - b * b / (4 * a) if a != 0 else d[j]
            if abs(vertex) <= guard * local and abs(d[j]) <= 1e-4 * local:
                raise AmbiguousRootError(
                    f"det N dips to zero near t={ts[j]:.6f} without sign change")
    if first_cross is None:
        return None
    lo, hi = ts[first_cross], ts[first_cross + 1]
    if d[first_cross] == 0.0:
        return float(lo)
    root = brentq(f, lo, hi, xtol=xtol, rtol=8 * np.finfo(float).eps)
    return float(root)


def homogeneity_check(problem: LQProblem, eps: float, t_grid) -> float:
    """max_t |beta^{A, eps B, Q}_t - beta^{A, B, eps Q}_t| (both must be conjugate-free)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    left = beta_from_determinant(problem.scaled(eps_B=eps), t_grid)
    right = beta_from_determinant(problem.scaled(eps_Q=eps), t_grid)
    return float(np.max(np.abs(left.beta - right.beta)))
