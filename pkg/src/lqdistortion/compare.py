"""End-to-end verification of the comparison theorems.

Given a curvature profile, bounds and a Young diagram, the engine computes
the distortion coefficient numerically, builds the matching model
comparison function, and checks the claimed ratio monotonicity together
with the endpoint inequality.  A failing bound hypothesis raises
HypothesisViolatedError before any verdict is computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import conjugate_time_single_kappa, model_product_beta
from .errors import HypothesisViolatedError
from .lq import DistortionCurve, LQProblem, first_conjugate_time
from .riccati import CurvatureProfile, min_eig, solve_riccati_limit, trace_log_beta
from .young import YoungDiagram, geodesic_dimension, normal_form_matrices

__all__ = [
    "ComparisonTask",
    "MonotonicityVerdict",
    "beta_from_profile",
    "log_derivative",
    "verify",
    "verify_sectional",
    "verify_bakry_emery",
    "verify_ricci",
    "verify_mcp_two_column",
    "check_conjugate_free",
    "default_grid",
]

HYP_TOL = 1e-9

MODES = ("sectional", "sectional-shifted", "bakry-emery",
         "ricci", "ricci-be", "ricci-sharp", "mcp-two-column")


def default_grid(points: int = 2048, t_min: float = 1e-3) -> np.ndarray:
    return np.linspace(t_min, 1.0, points)


@dataclass(frozen=True)
class ComparisonTask:
    mode: str
    profile: CurvatureProfile
    Q: np.ndarray | None = None                 # sectional / bakry-emery bound
    kappas: tuple | None = None                 # one value per superbox (ricci modes)
    kappa_abc: tuple | None = None              # (kappa_a, kappa_b, kappa_c) for mcp
    N: float | None = None                      # effective dimension (BE / sharp)
    c: float = 0.0                              # volume-derivative shift
    reversed: bool = False                      # sectional only: R <= Q, rho >= c
    grid: np.ndarray = field(default_factory=default_grid)
    tol: float = 1e-7
    hyp_tol: float = HYP_TOL
    steps: int = 4096

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.Q is not None:
            object.__setattr__(self, "Q", np.asarray(self.Q, float))


@dataclass
class MonotonicityVerdict:
    mode: str
    t: np.ndarray
    quantity: np.ndarray
    max_increment: float
    tol: float
    verdict: bool
    refined: bool = False
    inequality_margin: float = 0.0  # min over grid of (lhs - rhs) for the endpoint bound
    beta: np.ndarray | None = None   # measured coefficient on t
    model: np.ndarray | None = None  # comparison curve (endpoint-inequality RHS)
    details: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["t,beta,model,ratio"]
        beta = self.beta if self.beta is not None else np.full(len(self.t), math.nan)
        model = self.model if self.model is not None else np.full(len(self.t), math.nan)
        for t, b, m, q in zip(self.t, beta, model, self.quantity):
            lines.append(f"{float(t)!r},{float(b)!r},{float(m)!r},{float(q)!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": bool(self.verdict),
            "max_increment": float(self.max_increment),
            "tol": float(self.tol),
            "refined": bool(self.refined),
            "inequality_margin": float(self.inequality_margin),
            "grid": {"t_min": float(self.t[0]), "t_max": float(self.t[-1]), "points": len(self.t)},
            "details": self.details,
        }


def beta_from_profile(profile: CurvatureProfile, t_grid, steps: int = 4096) -> DistortionCurve:
    """Distortion curve of a profile: d/dt log beta = tr(B V + A) + rho.

    V solves the limit Riccati problem of the profile's diagram; the
    logarithmic derivative is integrated by quadrature with beta_1 = 1.
    """
    nf = normal_form_matrices(profile.diagram)
    nu = geodesic_dimension(profile.diagram)
    ts = np.asarray(t_grid, float)
    log_beta = trace_log_beta(nf.A, nf.B, profile.matrix, profile.rho, nu, ts, steps=steps)
    return DistortionCurve(t=ts, beta=np.exp(log_beta), method="riccati-trace")


def log_derivative(profile: CurvatureProfile, t: float, steps: int = 4096) -> float:
    """t * d/dt log beta_t, the sub-Laplacian of the half-squared distance."""
    nf = normal_form_matrices(profile.diagram)
    sol = solve_riccati_limit(nf.A, nf.B, profile.matrix, np.array([t]), steps=steps)
    return t * (float(np.trace(nf.B @ sol.V[0])) + float(np.trace(nf.A)) + profile.rho(t))


def _check_non_increasing(make_quantity, grid: np.ndarray, tol: float,
                          reverse: bool = False) -> tuple[np.ndarray, np.ndarray, float, bool, bool]:
    """Discrete monotonicity with one refinement pass near the tolerance."""
    q = make_quantity(grid)
    inc = np.diff(q) if not reverse else -np.diff(q)
    max_inc = float(np.max(inc)) if len(inc) else 0.0
    refined = False
    if max_inc > tol / 10:
        fine = np.linspace(grid[0], grid[-1], 2 * len(grid) - 1)
        qf = make_quantity(fine)
        incf = np.diff(qf) if not reverse else -np.diff(qf)
        max_inc = float(np.max(incf))
        refined = True
        grid, q = fine, qf
    return grid, q, max_inc, max_inc <= tol, refined


def _rho_bound_check(profile: CurvatureProfile, grid, c: float, hyp_tol: float,
                     lower: bool = False) -> None:
    rho = np.array([profile.rho(t) for t in grid])
    if lower:
        bad = rho.min() < c - hyp_tol
        word = ">="
    else:
        bad = rho.max() > c + hyp_tol
        word = "<="
    if bad:
        raise HypothesisViolatedError(
            f"volume derivative fails rho {word} {c}",
            {"rho_extreme": float(rho.min() if lower else rho.max()), "c": c})


def verify_sectional(task: ComparisonTask) -> MonotonicityVerdict:
    """Matrix bound R(t) >= Q with rho <= c: beta/beta^model * e^{c(1-t)} non-increasing.

    The reversed variant (R <= Q, rho >= c) checks non-decrease and the
    opposite endpoint inequality.
    """
    if task.Q is None:
        raise ValueError("sectional mode needs a matrix bound Q")
    profile, grid, c = task.profile, task.grid, task.c
    if task.mode == "sectional" and c != 0.0:
        raise ValueError("use mode 'sectional-shifted' for a nonzero shift c")
    sign = -1.0 if task.reversed else 1.0
    worst = min(min_eig(sign * (np.asarray(profile.matrix(t), float) - task.Q)) for t in grid)
    if worst < -task.hyp_tol:
        raise HypothesisViolatedError(
            f"curvature bound fails: min eig of {'R-Q' if not task.reversed else 'Q-R'} = {worst:.3e}",
            {"min_eig": worst})
    _rho_bound_check(profile, grid, c, task.hyp_tol, lower=task.reversed)

    problem = LQProblem.from_diagram(profile.diagram, Q=task.Q)

    def quantity(ts):
        beta = beta_from_profile(profile, ts, steps=task.steps).beta
        from .lq import beta_from_determinant
        model = beta_from_determinant(problem, ts).beta
        return beta / model * np.exp(c * (1.0 - ts))

    ts, q, max_inc, ok, refined = _check_non_increasing(quantity, grid, task.tol,
                                                        reverse=task.reversed)
    beta = beta_from_profile(profile, ts, steps=task.steps).beta
    from .lq import beta_from_determinant
    model = beta_from_determinant(problem, ts).beta
    bound = model * np.exp(c * (ts - 1.0))
    margin = float(np.min((beta - bound) if not task.reversed else (bound - beta)))
    return MonotonicityVerdict(mode=task.mode, t=ts, quantity=q, max_increment=max_inc,
                               tol=task.tol, verdict=ok, refined=refined,
                               inequality_margin=margin, beta=beta, model=bound,
                               details={"c": c, "reversed": task.reversed})


def verify_bakry_emery(task: ComparisonTask) -> MonotonicityVerdict:
    """(1/N) R_mu^N(t) >= (1/n) Q: beta^{1/N} / (beta^model)^{1/n} non-increasing."""
    if task.Q is None or task.N is None:
        raise ValueError("bakry-emery mode needs Q and N")
    profile, grid, N = task.profile, task.grid, float(task.N)
    n, k = profile.n, profile.rank
    if N <= n:
        raise ValueError(f"N must exceed n={n}")
    B = normal_form_matrices(profile.diagram).B

    def R_N(t):
        corr = profile.rho_dot(t) / k + (n / (N - n)) * profile.rho(t) ** 2 / k ** 2
        return np.asarray(profile.matrix(t), float) - corr * B

    worst = min(min_eig(R_N(t) / N - task.Q / n) for t in grid)
    if worst < -task.hyp_tol:
        raise HypothesisViolatedError(
            f"Bakry-Emery bound fails: min eig of R_N/N - Q/n = {worst:.3e}", {"min_eig": worst})

    problem = LQProblem.from_diagram(profile.diagram, Q=task.Q)
    from .lq import beta_from_determinant

    def quantity(ts):
        beta = beta_from_profile(profile, ts, steps=task.steps).beta
        model = beta_from_determinant(problem, ts).beta
        return beta ** (1.0 / N) / model ** (1.0 / n)

    ts, q, max_inc, ok, refined = _check_non_increasing(quantity, grid, task.tol)
    beta = beta_from_profile(profile, ts, steps=task.steps).beta
    model = beta_from_determinant(problem, ts).beta
    margin = float(np.min(beta ** (1.0 / N) - model ** (1.0 / n)))
    return MonotonicityVerdict(mode=task.mode, t=ts, quantity=q, max_increment=max_inc,
                               tol=task.tol, verdict=ok, refined=refined,
                               inequality_margin=margin, beta=beta, model=model,
                               details={"N": N})


def _superbox_levels(diagram: YoungDiagram):
    """(level index, level, columns) in superbox order used by CurvatureProfile."""
    return [(li, lev) for li, lev in enumerate(diagram.levels)]


def _ricci_quantities(profile: CurvatureProfile, t: float, N: float | None,
                      sharp: bool) -> list[tuple[int, int, float, int]]:
    """Per superbox: (level index, column, normalized Ricci value, effective size).

    The value is Ric^{lambda_i}(t)/r_eff minus, on first columns, the
    Bakry-Emery correction (skipped when N is None, the formal N = n case).
    Levels whose effective size vanishes are omitted.
    """
    diagram = profile.diagram
    n, k = profile.n, profile.rank
    traces = profile.ricci_superbox(t)
    out = []
    for sb, ric in zip(diagram.superboxes, traces):
        lev = diagram.levels[sb.level]
        r_eff = lev.size - 1 if (sharp and lev.length == 1) else lev.size
        if r_eff == 0:
            continue
        val = ric / r_eff
        if N is not None and sb.column == 1:
            val -= profile.rho_dot(t) / k + (n / (N - n)) * profile.rho(t) ** 2 / k ** 2
        out.append((sb.level, sb.column, val, r_eff))
    return out


def verify_ricci(task: ComparisonTask) -> MonotonicityVerdict:
    """Per-superbox traced bounds against the product of single-row models.

    Modes: 'ricci' (plain, rho <= c), 'ricci-be' (Bakry-Emery scaling N/n),
    'ricci-sharp' (scaling (N-1)/(n-1), the length-1 level losing one row
    and the motion factor t split off).  In sharp mode N may be None,
    meaning the formal N = n case, which requires rho <= 0.
    """
    if task.kappas is None:
        raise ValueError("ricci modes need per-superbox kappas")
    profile, grid = task.profile, task.grid
    diagram = profile.diagram
    n = profile.n
    mode = task.mode
    sharp = mode == "ricci-sharp"
    N = float(task.N) if task.N is not None else None
    kappas = tuple(float(x) for x in task.kappas)
    if len(kappas) != len(diagram.superboxes):
        raise ValueError(f"need {len(diagram.superboxes)} kappas, got {len(kappas)}")

    if mode == "ricci":
        scale = 1.0
        use_N = None
        _rho_bound_check(profile, grid, task.c, task.hyp_tol)
    elif mode == "ricci-be":
        if N is None or N <= n:
            raise ValueError(f"ricci-be needs N > n={n}")
        scale = N / n
        use_N = N
    else:
        if N is None:
            _rho_bound_check(profile, grid, 0.0, task.hyp_tol)
            scale = 1.0
        else:
            if N <= n:
                raise ValueError(f"ricci-sharp needs N > n={n} (or None for the formal case)")
            scale = (N - 1) / (n - 1)
        use_N = N

    kap_by_sb = {(sb.level, sb.column): kap for sb, kap in zip(diagram.superboxes, kappas)}
    worst = np.inf
    worst_sb = None
    for t in grid:
        for li, col, val, _r in _ricci_quantities(profile, t, use_N, sharp):
            m = val - scale * kap_by_sb[(li, col)]
            if m < worst:
                worst, worst_sb = m, (li, col)
    if worst < -task.hyp_tol:
        raise HypothesisViolatedError(
            f"superbox Ricci bound fails at level {worst_sb[0]} column {worst_sb[1]} "
            f"(margin {worst:.3e})", {"margin": float(worst), "superbox": worst_sb})

    levels_kaps = []
    for li, lev in _superbox_levels(diagram):
        levels_kaps.append((lev.size, tuple(kap_by_sb[(li, i)] for i in range(1, lev.length + 1))))

    def model(ts):
        return np.array([model_product_beta(levels_kaps, t, sharp=sharp) for t in ts])

    if mode == "ricci":
        c = task.c

        def quantity(ts):
            beta = beta_from_profile(profile, ts, steps=task.steps).beta
            return beta / model(ts) * np.exp(c * (1.0 - ts))
    elif mode == "ricci-be":
        def quantity(ts):
            beta = beta_from_profile(profile, ts, steps=task.steps).beta
            return beta ** (1.0 / N) / model(ts) ** (1.0 / n)
    else:
        expo = 1.0 / (N - 1) if N is not None else 1.0 / (n - 1)

        def quantity(ts):
            beta = beta_from_profile(profile, ts, steps=task.steps).beta
            # model() carries the explicit motion factor t of the sharp convention
            perp_model = model(ts) / ts
            return (beta / ts) ** expo / perp_model ** expo

    ts, q, max_inc, ok, refined = _check_non_increasing(quantity, grid, task.tol)
    beta = beta_from_profile(profile, ts, steps=task.steps).beta
    if mode == "ricci":
        bound = model(ts) * np.exp(task.c * (ts - 1.0))
        margin = float(np.min(beta - bound))
    elif mode == "ricci-be":
        margin = float(np.min(beta ** (1.0 / N) - model(ts) ** (1.0 / n)))
    else:
        expo = 1.0 / (N - 1) if N is not None else 1.0 / (n - 1)
        margin = float(np.min(beta ** expo - model(ts) ** expo))
    return MonotonicityVerdict(mode=mode, t=ts, quantity=q, max_increment=max_inc,
                               tol=task.tol, verdict=ok, refined=refined,
                               inequality_margin=margin, beta=beta, model=model(ts),
                               details={"N": N, "c": task.c, "kappas": list(kappas)})


def verify_mcp_two_column(task: ComparisonTask) -> MonotonicityVerdict:
    """Two-column measure-contraction verdict: beta / t^{k + 3(n-k)} non-increasing.

    Hypotheses: rho <= 0, Ric^a >= (n-k) kappa_a, Ric^b >= (n-k) kappa_b,
    Ric^c >= (2k-n-1) kappa_c, with 4 kappa_a + kappa_b^2 >= 0, kappa_b >= 0
    and kappa_c >= 0.  The proof's reduction kappa_1 = kappa_b,
    kappa_2 = -kappa_b^2/4 <= kappa_a is recorded in the details.
    """
    if task.kappa_abc is None:
        raise ValueError("mcp mode needs (kappa_a, kappa_b, kappa_c)")
    profile, grid = task.profile, task.grid
    diagram = profile.diagram
    ka, kb, kc = (float(x) for x in task.kappa_abc)
    n, k = diagram.n, diagram.k
    heights = diagram.column_heights
    if len(heights) != 2:
        raise HypothesisViolatedError("mcp mode needs a two-column diagram",
                                      {"rows": list(diagram.rows)})
    if 2 * k - n < 1:
        raise HypothesisViolatedError("two-column diagram must have a length-1 level",
                                      {"rows": list(diagram.rows)})
    if not (kb >= 0 and kc >= 0 and 4 * ka + kb * kb >= 0):
        raise HypothesisViolatedError(
            "bounds fail 4 kappa_a + kappa_b^2 >= 0, kappa_b >= 0, kappa_c >= 0",
            {"kappa_a": ka, "kappa_b": kb, "kappa_c": kc})
    _rho_bound_check(profile, grid, 0.0, task.hyp_tol)

    # superbox order for the two-column diagram: b (level 0, col 1), a (level 0, col 2), c
    ric_named = {"b": (0, 1, (n - k) * kb), "a": (0, 2, (n - k) * ka),
                 "c": (1, 1, (2 * k - n - 1) * kc)}
    for name, (li, col, rhs) in ric_named.items():
        for t in grid:
            traces = profile.ricci_superbox(t)
            by_key = {(sb.level, sb.column): v for sb, v in zip(diagram.superboxes, traces)}
            if by_key[(li, col)] < rhs - task.hyp_tol:
                raise HypothesisViolatedError(
                    f"Ricci bound for superbox {name} fails at t={t:.4f}",
                    {"superbox": name, "value": by_key[(li, col)], "rhs": rhs})

    exponent = k + 3 * (n - k)
    kappa1, kappa2 = kb, -kb * kb / 4.0

    def quantity(ts):
        beta = beta_from_profile(profile, ts, steps=task.steps).beta
        return beta / ts ** exponent

    ts, q, max_inc, ok, refined = _check_non_increasing(quantity, grid, task.tol)
    beta = beta_from_profile(profile, ts, steps=task.steps).beta
    margin = float(np.min(beta - ts ** exponent))
    return MonotonicityVerdict(mode=task.mode, t=ts, quantity=q, max_increment=max_inc,
                               tol=task.tol, verdict=ok, refined=refined,
                               inequality_margin=margin, beta=beta, model=ts ** exponent,
                               details={"exponent": exponent,
                                        "reduced_kappa1": kappa1, "reduced_kappa2": kappa2,
                                        "geodesic_dimension": geodesic_dimension(diagram)})


def check_conjugate_free(level_kappas, profile: CurvatureProfile | None = None,
                         t_max: float = 50.0) -> dict:
    """Minimum over levels of the single-row model's first conjugate time.

    ``level_kappas`` is a sequence of kappa tuples, one per level, already
    under the length-1 convention (size r replaced by r - 1 there).  When a
    profile is supplied, its lift is checked to stay conjugate-free before
    the returned bound.
    """
    times = []
    for kaps in level_kappas:
        kaps = tuple(float(x) for x in kaps)
        if len(kaps) == 1:
            tc = conjugate_time_single_kappa(kaps[0])
            if np.isfinite(tc):  # refine against the root finder for consistency
                problem = LQProblem.from_diagram(YoungDiagram((1,)), Q=np.array([[kaps[0]]]))
                found = first_conjugate_time(problem, t_max=min(t_max, 2 * tc))
                tc = found if found is not None else tc
        else:
            problem = LQProblem.from_diagram(YoungDiagram((len(kaps),)), Q=np.diag(kaps))
            found = first_conjugate_time(problem, t_max=t_max)
            tc = found if found is not None else np.inf
        times.append(float(tc))
    bound = min(times) if times else np.inf
    report = {"per_level": times, "max_length": bound}
    if profile is not None and np.isfinite(bound):
        nf = normal_form_matrices(profile.diagram)
        horizon = min(bound * 0.999, t_max)
        ts = np.linspace(horizon / 512, horizon, 512)
        sol = solve_riccati_limit(nf.A, nf.B, profile.matrix, ts, steps=2048)
        dets = np.linalg.det(sol.N)
        report["profile_conjugate_free"] = bool(np.all(dets > 0))
    return report


def verify(task: ComparisonTask) -> MonotonicityVerdict:
    """Dispatch a task to its mode's verifier."""
    if task.mode in ("sectional", "sectional-shifted"):
        return verify_sectional(task)
    if task.mode == "bakry-emery":
        return verify_bakry_emery(task)
    if task.mode in ("ricci", "ricci-be", "ricci-sharp"):
        return verify_ricci(task)
    return verify_mcp_two_column(task)
