"""Command-line front end.

Exit codes: 0 success, 2 config error, 3 solver error, 4 search-bracket error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager

from .closedform import amplification_approx
from .config import ConfigError, SweepSpec, load_config
from .dynamics import precise_steady_state
from .errors import DegenerateInput, NoBracket, NoInteriorMinimum, SingularSystem
from .model import enumerate_states
from .observables import (
    amplification,
    find_jm_minimum,
    find_jm_zero,
    rectification_point,
    solution_currents,
    solve_currents,
)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_BRACKET = 0, 2, 3, 4
SWEEP_HEADER = ["temperature", "J_L", "J_M", "J_R", "alpha_L", "alpha_R", "diverged"]
RECTIFICATION_HEADER = ["T_L", "T_R", "J_forward", "J_reversed", "R", "degenerate"]


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return ""
    return f"{x + 0.0:.16e}"  # + 0.0 turns an underflowed -0.0 into 0.0


def _json_float(x):
    return x if x is None or math.isfinite(x) else None


@contextmanager
def _open_output(path):
    if path in (None, "-", "stdout"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _current_columns(network):
    """Bath indices for the fixed J_L, J_M, J_R columns (None = blank)."""
    n = network.n_sites
    if n == 2:
        return (0, None, 1)
    if n == 3:
        return (0, 1, 2)
    raise ConfigError("sites", f"sweep output supports 2 or 3 sites, got {n}")


def cmd_simulate(args) -> int:
    network = load_config(args.config)
    solution = precise_steady_state(network)
    p = solution.populations_array()
    report = solution_currents(solution)
    states = enumerate_states(network)
    with _open_output(args.output) as out:
        if args.format == "csv":
            rows = [["population", s.index, fmt(s.energy), fmt(x)] for s, x in zip(states, p)]
            rows += [["current", lab, "", fmt(j)] for lab, j in zip(report.labels, report.current)]
            rows.append(["conservation_residual", "", "", fmt(report.conservation_residual)])
            _write_rows(out, ["quantity", "key", "energy", "value"], rows)
        else:
            doc = {
                "populations": [
                    {"index": s.index, "spins": list(s.spins), "energy": s.energy, "population": float(x)}
                    for s, x in zip(states, p)
                ],
                "currents": report.as_dict(),
                "conservation_residual": report.conservation_residual,
            }
            json.dump(doc, out, indent=2)
            out.write("\n")
    return EXIT_OK


def sweep_rows(network, spec: SweepSpec, with_alpha=False, delta_t=None):
    cols = _current_columns(network)
    bath = network.bath_index(spec.bath)
    for T in spec.grid():
        T = float(T)
        net = network.with_temperature(bath, T)
        J = solve_currents(net).current
        row = [fmt(T)] + [fmt(J[c]) if c is not None else "" for c in cols]
        if with_alpha and network.n_sites == 3:
            a = amplification(net, T, delta_t, base=bath)
            row += [fmt(a.alpha_L), fmt(a.alpha_R), str(int(a.diverged))]
        else:
            row += ["", "", ""]
        yield row


def cmd_sweep(args) -> int:
    network = load_config(args.config)
    bath = args.bath if args.bath is not None else ("M" if "M" in network.labels else network.labels[0])
    try:
        network.bath_index(bath)
    except (KeyError, IndexError) as exc:
        raise ConfigError("bath", str(exc)) from None
    spec = SweepSpec(bath, args.start, args.stop, args.points, args.scale)
    rows = list(sweep_rows(network, spec, args.alpha, args.delta_t))
    with _open_output(args.output) as out:
        if args.format == "json":
            json.dump([dict(zip(SWEEP_HEADER, r)) for r in rows], out, indent=2)
            out.write("\n")
        else:
            _write_rows(out, SWEEP_HEADER, rows)
    return EXIT_OK


def rectification_rows(network, t_fixed, spec: SweepSpec):
    for T_R in t_fixed:
        for T in spec.grid():
            T = float(T)
            try:
                j_fwd, j_rev, R = rectification_point(network, T, T_R)
            except DegenerateInput:
                yield [fmt(T), fmt(T_R), "", "", "", "1"]
                continue
            yield [fmt(T), fmt(T_R), fmt(j_fwd), fmt(j_rev), fmt(R), "0"]


def cmd_rectification(args) -> int:
    network = load_config(args.config)
    if network.n_sites != 2:
        raise ConfigError("sites", f"rectification needs exactly 2 sites, got {network.n_sites}")
    spec = SweepSpec(network.labels[0], args.start, args.stop, args.points, args.scale)
    t_fixed = args.t_fixed or [network.bath_temperature[1]]
    rows = list(rectification_rows(network, t_fixed, spec))
    with _open_output(args.output) as out:
        if args.format == "json":
            json.dump([dict(zip(RECTIFICATION_HEADER, r)) for r in rows], out, indent=2)
            out.write("\n")
        else:
            _write_rows(out, RECTIFICATION_HEADER, rows)
    return EXIT_OK


def transistor_report(network, bracket, base="M", plateau_temperature=None, delta_t=None, tol=1e-8):
    """Minimum and zero of J_M, amplification there and on the low-T_M plateau.

    Returns (report, errors) where ``errors`` lists the search failures;
    fields that could not be computed are left as None.
    """
    if network.n_sites != 3:
        raise ConfigError("sites", f"transistor analysis needs exactly 3 sites, got {network.n_sites}")
    lo, hi = bracket
    m = network.bath_index(base)
    left, right = (i for i in range(3) if i != m)
    delta = network.coupling[left][m]
    T_L = network.bath_temperature[left]
    report = {
        "base": network.labels[m],
        "bracket": [lo, hi],
        "jm_min_temperature": None,
        "jm_min_diverged": None,
        "jm_zero_temperature": None,
        "currents_at_zero": None,
        "alpha_at_zero": None,
        "alpha_plateau": None,
        "alpha_plateau_estimate": amplification_approx(abs(delta), T_L) if delta and T_L > 0 else None,
    }
    errors = []
    try:
        t_min = find_jm_minimum(network, lo, hi, base=m, tol=tol, delta_T=delta_t)
        report["jm_min_temperature"] = t_min
        report["jm_min_diverged"] = amplification(network, t_min, delta_t, base=m).diverged
    except NoInteriorMinimum as exc:
        errors.append(exc)
    try:
        t_zero = find_jm_zero(network, lo, hi, base=m)
        report["jm_zero_temperature"] = t_zero
        report["currents_at_zero"] = solve_currents(network.with_temperature(m, t_zero)).as_dict()
        a = amplification(network, t_zero, delta_t, base=m)
        report["alpha_at_zero"] = {
            network.labels[left]: _json_float(a.alpha_L),
            network.labels[right]: _json_float(a.alpha_R),
        }
    except NoBracket as exc:
        errors.append(exc)
    t_plat = plateau_temperature if plateau_temperature is not None else T_L / 5
    a = amplification(network, t_plat, delta_t, base=m)
    report["alpha_plateau"] = {
        "temperature": t_plat,
        network.labels[left]: _json_float(a.alpha_L),
        network.labels[right]: _json_float(a.alpha_R),
    }
    if report["alpha_plateau_estimate"] and not a.diverged:
        report["plateau_ratio"] = abs(a.alpha_L) / report["alpha_plateau_estimate"]
    return report, errors


def cmd_transistor_analysis(args) -> int:
    network = load_config(args.config)
    base = args.base if args.base is not None else ("M" if "M" in network.labels else 1)
    report, errors = transistor_report(
        network, tuple(args.bracket), base, args.plateau_temperature, args.delta_t, args.tol
    )
    if errors:
        report["errors"] = [f"{type(e).__name__}: {e}" for e in errors]
    with _open_output(args.output) as out:
        json.dump(report, out, indent=2)
        out.write("\n")
    for message in report.get("errors", ()):
        print(message, file=sys.stderr)
    if errors:
        return EXIT_BRACKET
    return EXIT_OK


def _add_common(p, formats=("csv", "json"), default="csv"):
    p.add_argument("--config", required=True, help="device config (JSON)")
    p.add_argument("--output", default="-", help="output file, '-' for stdout")
    p.add_argument("--format", choices=formats, default=default)


def _add_grid(p):
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlsheat",
        description="Steady-state heat transport through coupled two-level systems (hbar = k_B = 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="steady state and heat currents of one configuration")
    _add_common(p, default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="currents (and amplification) versus one bath temperature")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--bath", help="label of the swept bath (default M, else the first)")
    p.add_argument("--alpha", action="store_true", help="add amplification columns (3 sites)")
    p.add_argument("--delta-t", type=float, default=None, help="finite-difference step (default T/1000)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rectification", help="rectification ratio versus the first bath temperature")
    _add_common(p)
    _add_grid(p)
    p.add_argument(
        "--t-fixed", type=float, action="append", help="second bath temperature; repeat for several families"
    )
    p.set_defaults(func=cmd_rectification)

    p = sub.add_parser("transistor-analysis", help="J_M minimum/zero and amplification report")
    _add_common(p, formats=("json",), default="json")
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--base", help="label of the base bath (default M)")
    p.add_argument("--plateau-temperature", type=float, default=None, help="default: T_emitter / 5")
    p.add_argument("--delta-t", type=float, default=None, help="finite-difference step (default T/1000)")
    p.add_argument("--tol", type=float, default=1e-8, help="golden-section bracket width")
    p.set_defaults(func=cmd_transistor_analysis)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularSystem as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
