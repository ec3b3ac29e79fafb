"""Command-line front end.

Subcommands: ``beta`` (coefficient tables as CSV/JSON), ``verify``
(theorem-verification tasks and campaigns, JSON verdicts) and
``validate-normal`` (Zelenko-Li normality reports).

Exit codes: 0 success/verified, 2 parse or shape error, 3 conjugate-point
or pole error, 4 hypothesis violated, 5 monotonicity violated (never
expected; signals a bug).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import closed_forms, compare
from .errors import ConjugatePointError, HypothesisViolatedError, InvalidDiagramError
from .heisenberg import HeisenbergCovector, HeisenbergWeight, heisenberg_profile
from .lq import LQProblem, beta_from_determinant
from .riccati import CurvatureProfile, comparison_campaign
from .young import YoungDiagram, is_zelenko_li_normal

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONJUGATE = 3
EXIT_HYPOTHESIS = 4
EXIT_MONOTONICITY = 5


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_report(report: dict, args) -> None:
    _emit(json.dumps(_jsonify(report), sort_keys=True, indent=2) + "\n", args.output)


def _grid(args) -> np.ndarray:
    return np.linspace(args.t_min, 1.0, args.grid)


def _cmd_beta(args) -> int:
    rows = []
    if args.input:
        spec = _load_json(args.input)
        problem = _problem_from_json(spec)
        curve = beta_from_determinant(problem, _grid(args))
        family = "lq"
        rows = [(t, b, curve.method, family) for t, b in zip(curve.t, curve.beta)]
    else:
        family = args.family
        if family is None:
            raise ValueError("either --input or --family is required")
        for t in _grid(args):
            if family == "riemannian":
                b = closed_forms.beta_riemannian(args.kappa, args.n, t)
            elif family == "riemannian-sharp":
                b = closed_forms.beta_riemannian_sharp(args.kappa, args.n, t)
            elif family == "two-column":
                b = closed_forms.beta_two_column(args.kappa1, args.kappa2, t)
            elif family == "two-column-resonant":
                b = closed_forms.beta_two_column_resonant(args.kappa1, t)
            else:
                raise ValueError(f"unknown family {family!r}")
            rows.append((t, b, "closed-form", family))
    if args.format == "json":
        payload = [{"t": float(t), "beta": float(b), "method": m, "family": f}
                   for t, b, m, f in rows]
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    else:
        lines = ["t,beta,method,family"]
        lines += [f"{float(t)!r},{float(b)!r},{m},{f}" for t, b, m, f in rows]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _load_json(path_or_inline: str) -> dict:
    if path_or_inline.strip().startswith("{"):
        return json.loads(path_or_inline)
    with open(path_or_inline) as fh:
        return json.load(fh)


def _problem_from_json(spec: dict) -> LQProblem:
    if "A" in spec:
        return LQProblem(np.asarray(spec["A"], float), np.asarray(spec["B"], float),
                         np.asarray(spec["Q"], float))
    diagram = YoungDiagram.from_json(spec["diagram"])
    if "Q_superbox" in spec:
        return LQProblem.from_diagram(diagram, superbox_kappas=spec["Q_superbox"])
    return LQProblem.from_diagram(diagram, Q=np.asarray(spec["Q"], float))


def _profile_from_json(spec: dict) -> CurvatureProfile:
    if spec.get("geometry") == "heisenberg":
        p = spec.get("p", [1.0, 0.0])
        cov = HeisenbergCovector(float(p[0]), float(p[1]), float(spec.get("h0", 0.0)))
        weight = None
        wspec = spec.get("weight", {"name": "none"})
        if wspec.get("name") == "quadratic":
            weight = HeisenbergWeight.quadratic()
        elif wspec.get("name") == "custom-poly":
            weight = HeisenbergWeight.polynomial(wspec["coeffs"])
        elif wspec.get("name") not in (None, "none"):
            raise ValueError(f"unknown weight {wspec.get('name')!r}")
        return heisenberg_profile(cov, weight=weight)
    if "constant" in spec:
        c = spec["constant"]
        diagram = YoungDiagram.from_json(c["diagram"])
        return CurvatureProfile.constant(diagram, np.asarray(c["R"], float),
                                         rho=float(c.get("rho", 0.0)))
    if "sampled" in spec:
        s = spec["sampled"]
        diagram = YoungDiagram.from_json(s["diagram"])
        return CurvatureProfile.sampled(diagram, np.asarray(s["t"], float),
                                        np.asarray(s["R"], float),
                                        rho_samples=s.get("rho"),
                                        rho_dot_samples=s.get("rho_dot"))
    raise ValueError("profile spec needs 'geometry', 'constant' or 'sampled'")


def _cmd_verify(args) -> int:
    spec = _load_json(args.input)
    mode = spec.get("mode")
    if mode == "riccati-comparison":
        report = comparison_campaign(
            n=int(spec.get("n", 2)), trials=int(spec.get("trials", 50)),
            seed=int(spec.get("seed", args.seed)), steps=int(spec.get("steps", 1024)),
            tol=float(spec.get("tol", args.tol or 1e-6)),
            t_min=float(spec.get("t_min", 1e-3)))
        _emit_report(report.to_json(), args)
        return EXIT_OK if report.verdict else EXIT_MONOTONICITY

    profile = _profile_from_json(spec["profile"])
    bounds = spec.get("bounds", {})
    grid = np.linspace(float(spec.get("t_min", 1e-3)), 1.0, int(args.grid or spec.get("grid", 2048)))
    task = compare.ComparisonTask(
        mode=mode,
        profile=profile,
        Q=np.asarray(bounds["Q"], float) if "Q" in bounds else None,
        kappas=tuple(bounds["kappas"]) if "kappas" in bounds else None,
        kappa_abc=((bounds["kappa_a"], bounds["kappa_b"], bounds.get("kappa_c", 0.0))
                   if "kappa_b" in bounds else None),
        N=spec.get("N"),
        c=float(spec.get("c", 0.0)),
        reversed=bool(spec.get("reversed", False)),
        grid=grid,
        tol=float(args.tol or spec.get("tol", 1e-7)),
        steps=int(spec.get("steps", 4096)),
    )
    verdict = compare.verify(task)
    if args.format == "csv":
        _emit(verdict.to_csv(), args.output)
    else:
        report = verdict.to_json()
        report["seed"] = args.seed
        _emit_report(report, args)
    return EXIT_OK if verdict.verdict else EXIT_MONOTONICITY


def _cmd_validate_normal(args) -> int:
    spec = _load_json(args.input)
    diagram = YoungDiagram.from_json(spec["diagram"])
    R = np.asarray(spec["matrix"], float)
    if R.shape != (diagram.n, diagram.n):
        raise InvalidDiagramError(
            f"matrix shape {R.shape} does not match diagram n={diagram.n}")
    report = is_zelenko_li_normal(R, diagram, tol=float(args.tol or spec.get("tol", 1e-12)))
    _emit_report(report.to_json(), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lqd", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=0, help="campaign random seed")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)

    p_beta = sub.add_parser("beta", help="emit a coefficient table")
    common(p_beta, "csv")
    p_beta.add_argument("--family", choices=("riemannian", "riemannian-sharp",
                                             "two-column", "two-column-resonant"))
    p_beta.add_argument("--input", help="LQ problem JSON (path or inline)")
    p_beta.add_argument("--kappa", type=float, default=0.0)
    p_beta.add_argument("--n", type=int, default=1)
    p_beta.add_argument("--kappa1", type=float, default=0.0)
    p_beta.add_argument("--kappa2", type=float, default=0.0)
    p_beta.add_argument("--grid", type=int, default=201)
    p_beta.add_argument("--t-min", type=float, default=0.01, dest="t_min")
    p_beta.set_defaults(func=_cmd_beta)

    p_verify = sub.add_parser("verify", help="run a verification task")
    common(p_verify, "json")
    p_verify.add_argument("--input", required=True, help="task JSON (path or inline)")
    p_verify.add_argument("--grid", type=int, default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_norm = sub.add_parser("validate-normal", help="check Zelenko-Li normality of a matrix")
    common(p_norm, "json")
    p_norm.add_argument("--input", required=True, help="matrix+diagram JSON (path or inline)")
    p_norm.set_defaults(func=_cmd_validate_normal)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HypothesisViolatedError as exc:
        _emit(json.dumps(_jsonify({"status": "hypothesis-violated", "message": str(exc),
                                   "details": exc.details}), sort_keys=True, indent=2) + "\n",
              args.output)
        return EXIT_HYPOTHESIS
    except ConjugatePointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONJUGATE
    except (KeyError, ValueError, OSError, json.JSONDecodeError, InvalidDiagramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
