"""Shared oracles: independent numerical routes used to pin expected values."""

import numpy as np
from scipy.linalg import expm


def det_n_oracle(A, B, Q, t):
    """det N(t) via a single matrix exponential of the block Hamiltonian."""
    A = np.asarray(A, float)
    n = A.shape[0]
    H = np.zeros((2 * n, 2 * n))
    H[:n, :n] = -A.T
    H[:n, n:] = -np.asarray(Q, float)
    H[n:, :n] = np.asarray(B, float)
    H[n:, n:] = A
    E = expm(H * t)
    return float(np.linalg.det(E[n:, :n]))


def beta_oracle(A, B, Q, t):
    """Distortion coefficient by the determinant route (expm-based)."""
    return det_n_oracle(A, B, Q, t) / det_n_oracle(A, B, Q, 1.0)


def rk4(f, y0, t0, t1, steps):
    """Fixed-step RK4 for y' = f(t, y), generic oracle integrator."""
    y = np.array(y0, float)
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def random_normal_curvature(diagram, rng, scale=0.3):
    """Random Zelenko-Li-normal matrix: diagonal boxes, same-column couplings
    and skew-symmetric (i, i+1) pairs across equal-length rows."""
    n = diagram.n
    R = np.zeros((n, n))
    for a, i in diagram.boxes:
        g = diagram.box_index(a, i)
        R[g, g] = rng.uniform(-scale, scale)
    for a in range(1, diagram.k + 1):
        for b in range(a + 1, diagram.k + 1):
            if diagram.rows[a - 1] != diagram.rows[b - 1]:
                continue
            for i in range(1, diagram.rows[a - 1] + 1):
                v = rng.uniform(-scale, scale)
                R[diagram.box_index(a, i), diagram.box_index(b, i)] = v
                R[diagram.box_index(b, i), diagram.box_index(a, i)] = v
            for i in range(1, diagram.rows[a - 1]):
                s = rng.uniform(-scale, scale)
                R[diagram.box_index(a, i), diagram.box_index(b, i + 1)] = s
                R[diagram.box_index(b, i + 1), diagram.box_index(a, i)] = s
                R[diagram.box_index(b, i), diagram.box_index(a, i + 1)] = -s
                R[diagram.box_index(a, i + 1), diagram.box_index(b, i)] = -s
    return R


def heisenberg_ode_endpoint(p1, p2, h0, t, steps=4000):
    """Heisenberg geodesic endpoint by direct integration of Hamilton's equations.

    State (x1, x2, x3, hh1, hh2) with hh the frame momenta; h0 is constant.
    """
    def f(_t, y):
        x1, x2, x3, g1, g2 = y
        return np.array([g1, g2, 0.5 * (x1 * g2 - x2 * g1), -h0 * g2, h0 * g1])

    y = rk4(f, [0.0, 0.0, 0.0, p1, p2], 0.0, t, steps)
    return y[:3]
