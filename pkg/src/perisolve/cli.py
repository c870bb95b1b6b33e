"""Command-line driver.

Subcommands: classify, solve, cauchy, necessity, normal-form, diagnose.
Each reads a problem specification, writes report.json plus CSV tables to
the output directory and exits with 0 on success, 2 when the input is not
solvable and a witness was produced, 3 on numerical failure and 1 on an
invalid specification.
"""

from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path

import numpy as np

from . import __version__
from .admissibility import ModeData
from .classifier import classify
from .diophantine import condition_A_scan, zset
from .modes import NumericalFailure, cauchy_solve, solve_all
from .necessity import (
    NormParams,
    diophantine_counterexample,
    hormander_curve,
    laplace_blowup,
)
from .normal_form import roundtrip_error, transfer_admissibility, verify_conjugation
from .problem import SpecError, load_problem
from .report import write_csv, write_json
from .spectral import synthesize
from .torus import TorusFunction, nodes

EXIT_OK = 0
EXIT_SPEC = 1
EXIT_WITNESS = 2
EXIT_NUMERICAL = 3


def _base_report(command, prob):
    return {
        "command": command,
        "version": __version__,
        "spec": prob.document,
        "numerics": prob.numerics,
        "seed": prob.seed,
    }


def _scan_evidence(scan):
    return {
        "condition": scan.condition,
        "verdict": scan.verdict,
        "branch": scan.branch,
        "J": scan.J,
        "trend_ratio": scan.ratio,
        "min_distance": scan.min_distance,
        "witnesses": [int(j) for j in scan.witnesses],
        "kappa": scan.kappa,
        "resonances": [int(j) for j in scan.resonances],
    }


def _connectedness_evidence(conn):
    return {
        "connected": conn.connected,
        "r_witness": conn.r_witness,
        "components": conn.components,
        "local_maxima": conn.n_local_max,
        "levels": conn.levels,
        "counts": [int(k) for k in conn.counts],
    }


def _resonance_evidence(zs):
    return {
        "classification": zs.classification,
        "complement": zs.complement_classification(),
        "count": zs.count,
        "J": zs.J,
        "tail_density": zs.density,
        "members": [int(j) for j in zs.members[:256]],
    }


# -- commands ---------------------------------------------------------------------


def cmd_classify(prob, out, args):
    nm = prob.numerics
    v = classify(prob.coefficient, prob.system, nm["mu"], nm["scan_J"], c0=prob.c0)
    evidence = {}
    if v.scan is not None:
        evidence["diophantine_scan"] = _scan_evidence(v.scan)
    if v.resonance is not None:
        evidence["resonance"] = _resonance_evidence(v.resonance)
    if v.connectedness is not None:
        evidence["connectedness"] = _connectedness_evidence(v.connectedness)
    hyp = v.hypoellipticity
    rep = _base_report("classify", prob)
    rep["verdict"] = {
        "solvability": v.decision,
        "branch": v.branch,
        "reason": v.reason,
        "sign_profile": v.sign_profile,
        "b0": v.b0,
        "evidence": sorted(evidence),
    }
    rep["hypoellipticity"] = {
        "decision": hyp.decision,
        "reason": hyp.reason,
        "evidence": _scan_evidence(hyp.scan) if hyp.scan is not None else None,
    }
    rep["witness"] = v.witness
    rep["evidence"] = evidence
    write_json(out / "report.json", rep)
    return EXIT_WITNESS if v.decision == "NotSolvable" else EXIT_OK


def _require_modes(prob):
    if not prob.modes:
        raise SpecError("spec.rhs", "this command needs right-hand-side modes")
    return prob.modes


def _mode_rows(sols):
    return [(s.j, s.lam, s.strategy, s.log_sup, s.residual, s.periodicity_gap, s.diagnostics.get("N", s.N))
            for s in sols]


MODE_HEADER = ["j", "lam", "strategy", "log_sup", "residual", "periodicity_gap", "N"]


def _write_values(out, sols):
    rows = []
    for s in sols:
        t = nodes(s.N)
        vals = s.values()
        rows.extend((s.j, float(tk), float(v.real), float(v.imag)) for tk, v in zip(t, vals))
    write_csv(out / "mode_values.csv", ["j", "t", "re", "im"], rows)


def _write_field(out, prob, sols, opts):
    if not prob.system.has_eigenfunctions or prob.system.n != 1:
        raise SpecError("spec.options.field", "field output needs a one-dimensional system with eigenfunctions")
    nt = int(opts.get("nt", 32))
    x0, x1, nx = opts.get("x", [-4.0, 4.0, 33])
    x = np.linspace(x0, x1, int(nx))
    t = nodes(nt)
    J = max(s.j for s in sols)
    coeffs = np.zeros((nt, J + 1), dtype=complex)
    for s in sols:
        u = TorusFunction(s.u.samples).resample(nt) if s.N != nt else s.u
        coeffs[:, s.j] = u.samples * np.exp(s.log_scale)
    rows = []
    for k in range(nt):
        vals = synthesize(prob.system, coeffs[k], x)
        rows.extend((float(t[k]), float(xi), float(v.real), float(v.imag)) for xi, v in zip(x, vals))
    write_csv(out / "field.csv", ["t", "x", "re", "im"], rows)


def cmd_solve(prob, out, args):
    if prob.initial is not None:
        return cmd_cauchy(prob, out, args)
    modes = _require_modes(prob)
    nm = prob.numerics
    rep = _base_report("solve", prob)
    try:
        res = solve_all(prob.coefficient, prob.system, modes, None, tol=nm["tol"],
                        threads=args.threads, project=bool(prob.options.get("project", False)))
    except NumericalFailure as exc:
        rep["error"] = str(exc)
        write_json(out / "report.json", rep)
        return EXIT_NUMERICAL
    write_csv(out / "modes.csv", MODE_HEADER, _mode_rows(res.solutions))
    if prob.options.get("values"):
        _write_values(out, res.solutions)
    if "field" in prob.options:
        _write_field(out, prob, res.solutions, prob.options["field"])
    rep["decay"] = _decay_report(res.decay)
    rep["failures"] = res.failures
    rep["max_residual"] = max((s.residual for s in res.solutions), default=0.0)
    rep["max_periodicity_gap"] = max((s.periodicity_gap for s in res.solutions), default=0.0)
    write_json(out / "report.json", rep)
    return EXIT_NUMERICAL if res.failures else EXIT_OK


def _decay_report(fit):
    return {
        "defined": fit.defined,
        "eps_hat": fit.eps_hat,
        "mu_hat": fit.mu_hat,
        "fit_residual": fit.fit_residual,
        "per_mu": {str(mu): {"eps_hat": e, "normalized_rms": r} for mu, (e, r) in fit.per_mu.items()},
    }


def cmd_cauchy(prob, out, args):
    if prob.initial is None:
        raise SpecError("spec.initial", "the Cauchy problem needs initial data")
    nm = prob.numerics
    J = nm["J"]
    rep = _base_report("cauchy", prob)
    try:
        res = cauchy_solve(prob.coefficient, prob.system, prob.modes, prob.initial, J, nm["tol"])
    except NumericalFailure as exc:
        rep["error"] = str(exc)
        write_json(out / "report.json", rep)
        return EXIT_NUMERICAL
    rows = []
    for cm in res:
        s = cm.solution
        rows.append((cm.j, cm.lam, cm.resonant, s.strategy if s else "none",
                     s.log_sup if s else float("nan"), s.residual if s else float("nan"),
                     cm.mismatch, cm.admissibility))
    write_csv(out / "modes.csv", ["j", "lam", "resonant", "strategy", "log_sup", "residual",
                                  "initial_mismatch", "admissibility"], rows)
    sols = [cm.solution for cm in res if cm.solution is not None]
    if prob.options.get("values", True):
        _write_values(out, sols)
    if "field" in prob.options:
        _write_field(out, prob, sols, prob.options["field"])
    rep["max_residual"] = max((s.residual for s in sols), default=0.0)
    rep["max_initial_mismatch"] = max((cm.mismatch for cm in res), default=0.0)
    rep["unsolvable_modes"] = [cm.j for cm in res if cm.solution is None]
    write_json(out / "report.json", rep)
    return EXIT_WITNESS if rep["unsolvable_modes"] else EXIT_OK


def cmd_necessity(prob, out, args):
    opts = prob.options
    nm = prob.numerics
    kind = opts.get("kind", "hormander")
    rep = _base_report("necessity", prob)
    rep["kind"] = kind
    c, sys = prob.coefficient, prob.system
    try:
        if kind == "hormander":
            ells = opts.get("ells", list(range(1, 21)))
            params = NormParams(nm["sigma"], nm["mu"], nm["C"], nm["M_cap"], nm["gamma_cap"])
            w, pts = hormander_curve(c, sys, ells, params, N=int(opts.get("N", 4096)))
            rows = [(p.ell, p.lam, p.log_ratio, p.log_pairing, p.log_norm_f, p.log_norm_tLv,
                     p.saturated, p.admissible) for p in pts]
            write_csv(out / "curve.csv", ["ell", "lam", "log_ratio", "log_pairing", "log_norm_f",
                                          "log_norm_tLv", "saturated", "admissible"], rows)
            vals = [p.log_ratio for p in pts]
            diverging = all(b > a for a, b in zip(vals, vals[1:]))
            rep["witness"] = {"level": w.level, "r0": w.r0, "eps": w.eps, "M": w.M, "c1": w.c1,
                              "c2": w.c2, "pairing": pts[0].pairing if pts else None}
            rep["gain"] = vals[-1] - vals[0] if vals else 0.0
        elif kind == "laplace":
            js = opts.get("js", [2 ** k for k in range(18)])
            cur = laplace_blowup(c, sys, js)
            rows = [(p.j, p.lam, p.log_abs_u, p.scaled) for p in cur.points]
            write_csv(out / "curve.csv", ["j", "lam", "log_abs_u", "scaled"], rows)
            diverging = cur.increasing
            rep["witness"] = {"direction": cur.direction, "s_star": cur.s_star, "t_star": cur.t_star,
                              "peak": cur.peak, "k": cur.k, "curvature": cur.curvature,
                              "psi_min": cur.psi_min, "max_scaled": max(p.scaled for p in cur.points)}
        elif kind == "diophantine":
            scan = condition_A_scan(sys, prob.c0, nm["mu"], sys.n, nm["scan_J"])
            cur = diophantine_counterexample(c, sys, scan, nm["mu"], sys.n,
                                             float(opts.get("delta", 0.5)), c0=prob.c0)
            rows = [(p.j, p.lam, p.log_theta, p.log_abs_u, p.lower_bound_ok) for p in cur.points]
            write_csv(out / "curve.csv", ["j", "lam", "log_theta", "log_abs_u", "lower_bound_ok"], rows)
            diverging = all(p.lower_bound_ok for p in cur.points)
            rep["witness"] = {"eps0": cur.eps0, "delta": cur.delta, "scan": _scan_evidence(scan)}
        else:
            raise SpecError("spec.options.kind", f"unknown necessity construction {kind!r}")
    except SpecError:
        raise
    except ValueError as exc:
        rep["decision"] = "NoWitness"
        rep["reason"] = str(exc)
        write_json(out / "report.json", rep)
        return EXIT_OK
    rep["decision"] = "Diverges" if diverging else "NoDivergence"
    write_json(out / "report.json", rep)
    return EXIT_WITNESS if diverging else EXIT_OK


def _default_modes(prob, J):
    lams = prob.system.eigenvalues(J)
    t = nodes(prob.N)
    f = TorusFunction(np.exp(1j * np.cos(t)) * (1 + 0.5 * np.sin(2 * t)))
    return [ModeData(j, float(lams[j]), f) for j in range(J + 1)]


def cmd_normal_form(prob, out, args):
    full = bool(prob.options.get("full", False))
    J = prob.numerics["J"]
    modes = prob.modes or _default_modes(prob, J)
    c = prob.coefficient
    rep = _base_report("normal-form", prob)
    rep["full"] = full
    tol = float(prob.options.get("verify_tol", 1e-9))
    status = EXIT_OK
    if args.verify:
        try:
            disc = verify_conjugation(c, modes, full, prob.system)
        except ValueError as exc:
            raise SpecError("spec.options.full", str(exc)) from exc
        rt = roundtrip_error(modes, c)
        resonant = zset(prob.system, prob.c0, max(m.j for m in modes)).members
        adm = transfer_admissibility(modes, c, resonant)
        rep["verification"] = {"conjugation_discrepancy": disc, "roundtrip_error": rt,
                               "transfer_admissible": adm.admissible,
                               "transfer_residuals": {str(k): v for k, v in sorted(adm.residuals.items())}}
        if disc > tol or rt > 1e-12:
            status = EXIT_NUMERICAL
    rep["normal_form"] = {"a0": c.a0, "b0": c.b0}
    write_json(out / "report.json", rep)
    return status


def cmd_diagnose(prob, out, args):
    modes = _require_modes(prob)
    nm = prob.numerics
    rep = _base_report("diagnose", prob)
    try:
        res = solve_all(prob.coefficient, prob.system, modes, None, tol=nm["tol"], threads=args.threads)
    except NumericalFailure as exc:
        rep["error"] = str(exc)
        write_json(out / "report.json", rep)
        return EXIT_NUMERICAL
    write_csv(out / "modes.csv", MODE_HEADER, _mode_rows(res.solutions))
    rep["decay"] = _decay_report(res.decay)
    if prob.planted:
        p = prob.planted
        rep["planted"] = {
            "eps": p["eps"], "mu": p["mu"],
            "eps_rel_error": abs(res.decay.eps_hat - p["eps"]) / p["eps"],
            "mu_rel_error": abs(res.decay.mu_hat - p["mu"]) / p["mu"],
        }
    write_json(out / "report.json", rep)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "cauchy": cmd_cauchy,
    "necessity": cmd_necessity,
    "normal-form": cmd_normal_form,
    "diagnose": cmd_diagnose,
}


def build_parser():
    p = argparse.ArgumentParser(prog="perisolve", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"perisolve {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--spec", required=True, type=Path, help="problem specification (JSON or TOML)")
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None, help="seed for randomized inputs")
        if name == "normal-form":
            sp.add_argument("--verify", action="store_true", help="check the conjugation numerically")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.spec, args.seed)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](prob, args.out, args)
    except SpecError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_SPEC
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    _sys.exit(main())
