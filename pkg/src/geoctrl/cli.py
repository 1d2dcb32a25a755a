"""Command-line front end.

Every subcommand prints one envelope ``{command, inputs, results, meta}``
as JSON (sorted keys) or, for tabular payloads, CSV. Exit codes: 0 ok,
1 numerical failure (the envelope then carries ``error``), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__

FORMAT_ENV = "GEOCTRL_FORMAT"
COMMANDS = ("kalman", "linearize", "bracket", "larc", "involutive",
            "train", "dubins", "elastica", "hb-exp", "hb-dist")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _json_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {text!r} ({exc.msg})") from None


def _json_matrix(text: str) -> list[list[float]]:
    val = _json_value(text)
    if isinstance(val, (int, float)):
        val = [[val]]
    if not isinstance(val, list) or not val or not all(isinstance(r, list) for r in val):
        raise argparse.ArgumentTypeError(f"expected a JSON matrix like [[0,1],[0,0]], got {text!r}")
    try:
        return [[float(v) for v in row] for row in val]
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"matrix entries must be numbers: {text!r}") from None


def _json_vector(text: str) -> list[float]:
    val = _json_value(text)
    if isinstance(val, (int, float)):
        val = [val]
    try:
        return [float(v) for v in val]
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"expected a JSON number array, got {text!r}") from None


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pose(text: str) -> list[float]:
    vals = _csv_floats(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"pose needs x,y,theta, got {text!r}")
    return vals


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _count(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    from .catalog import CONTROL_SYSTEMS, FIELD_SYSTEMS

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help=f"output format (default: ${FORMAT_ENV} or json)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomly drawn points")

    p = _Parser(prog="geoctrl", description="Geometric control toolkit.")
    p.add_argument("--version", action="version", version=f"geoctrl {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    s = add("kalman", "Kalman rank test for x' = Ax + Bu")
    s.add_argument("--A", type=_json_matrix, required=True)
    s.add_argument("--B", type=_json_matrix, required=True)
    s.add_argument("--gramian-T", type=_finite, default=None,
                   help="also report the controllability Gramian rank on [0, T]")

    s = add("linearize", "linearize a catalog system at an equilibrium and test controllability")
    s.add_argument("--system", choices=sorted(CONTROL_SYSTEMS), required=True)
    s.add_argument("--x0", type=_json_vector, required=True)
    s.add_argument("--u0", type=_json_vector, required=True)

    field_names = sorted(FIELD_SYSTEMS)
    s = add("bracket", "Lie bracket of two catalog fields at a point")
    s.add_argument("--system", choices=field_names, required=True)
    s.add_argument("--i", type=_count(0), default=0)
    s.add_argument("--j", type=_count(0), default=1)
    s.add_argument("--at", type=_csv_floats, default=None, help="point (default: catalog default)")
    s.add_argument("--random-point", action="store_true", help="draw the point with --seed")
    s.add_argument("--flows", type=_finite, default=None,
                   help="also estimate the bracket from the flow commutator at this t")

    s = add("larc", "Lie algebra rank condition at a point")
    s.add_argument("--system", choices=field_names, required=True)
    s.add_argument("--depth", type=_count(1), default=4)
    s.add_argument("--at", type=_csv_floats, default=None)
    s.add_argument("--random-point", action="store_true")

    s = add("involutive", "Frobenius involutivity check on sampled points")
    s.add_argument("--system", choices=field_names, required=True)
    s.add_argument("--points", type=_count(1), default=5, help="number of random sample points")

    s = add("train", "time-optimal stopping of the double integrator")
    s.add_argument("--x1", type=_finite, required=True)
    s.add_argument("--x2", type=_finite, required=True)
    s.add_argument("--samples", type=_count(2), default=None)

    s = add("dubins", "shortest Dubins path")
    s.add_argument("--from", dest="q0", type=_pose, required=True, metavar="X,Y,THETA")
    s.add_argument("--to", dest="q1", type=_pose, required=True, metavar="X,Y,THETA")
    s.add_argument("--samples", type=_count(2), default=None)

    s = add("elastica", "integrate an Euler elastica extremal")
    s.add_argument("--r", type=_finite, required=True)
    s.add_argument("--beta0", type=_finite, required=True)
    s.add_argument("--h20", type=_finite, required=True)
    s.add_argument("--length", type=_finite, default=1.0)
    s.add_argument("--steps", type=_count(1), default=None)
    s.add_argument("--stride", type=_count(1), default=1, help="emit every k-th sample")

    s = add("hb-exp", "Heisenberg exponential map")
    s.add_argument("--theta0", type=_finite, required=True)
    s.add_argument("--h3", type=_finite, required=True)
    s.add_argument("--t", type=_finite, required=True)
    s.add_argument("--samples", type=_count(2), default=None)

    s = add("hb-dist", "Heisenberg sub-Riemannian distance from the origin")
    s.add_argument("--x", type=_finite)
    s.add_argument("--y", type=_finite)
    s.add_argument("--z", type=_finite)
    s.add_argument("--batch", default=None, metavar="FILE.csv", help="CSV rows x,y,z")
    return p


# -- JSON / CSV ---------------------------------------------------------------

def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    return obj


def dumps(envelope: dict) -> str:
    return json.dumps(_clean(envelope), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def _point(args, system) -> np.ndarray:
    if args.at is not None:
        q = np.array(args.at, dtype=float)
        if q.shape != (system.dim,):
            raise UsageError(f"--at needs {system.dim} coordinates ({','.join(system.coords)})")
        return q
    if args.random_point:
        return np.asarray(system.sampler(np.random.default_rng(args.seed)), dtype=float)
    return np.array(system.default_point, dtype=float)


def cmd_kalman(args):
    from .linear_ctrl import LinearSystem, gramian_rank, kalman_test

    sys_ = LinearSystem(args.A, args.B)
    rep = kalman_test(sys_)
    res = {"rank": rep.rank, "controllable": rep.controllable, "n": sys_.n,
           "singular_values": rep.singular_values}
    if args.gramian_T is not None:
        res["gramian_rank"] = gramian_rank(sys_, args.gramian_T)
    inputs = {"A": args.A, "B": args.B, "gramian_T": args.gramian_T}
    return inputs, res, None


def cmd_linearize(args):
    from .catalog import CONTROL_SYSTEMS
    from .linear_ctrl import kalman_test, linearize

    lin = linearize(CONTROL_SYSTEMS[args.system], args.x0, args.u0)
    rep = kalman_test(lin)
    res = {"A": lin.A, "B": lin.B, "rank": rep.rank, "controllable": rep.controllable}
    return {"system": args.system, "x0": args.x0, "u0": args.u0}, res, None


def cmd_bracket(args):
    from .catalog import field_system
    from .vf_calculus import bracket, bracket_by_flows

    system = field_system(args.system)
    m = len(system.fields)
    if args.i >= m or args.j >= m:
        raise UsageError(f"{args.system} has fields 0..{m - 1}")
    q = _point(args, system)
    V, W = system.fields[args.i], system.fields[args.j]
    res = {"bracket": bracket(V, W, q), "fields": [V.name, W.name]}
    if args.flows is not None:
        if args.flows <= 0:
            raise UsageError("--flows must be positive")
        res["flow_estimate"] = bracket_by_flows(V, W, q, args.flows)
    inputs = {"system": args.system, "i": args.i, "j": args.j, "point": q, "flows": args.flows}
    return inputs, res, None


def cmd_larc(args):
    from .catalog import field_system
    from .vf_calculus import larc_rank

    system = field_system(args.system)
    q = _point(args, system)
    out = larc_rank(system.fields, q, args.depth)
    names = system.field_names
    res = {
        "rank": out.rank,
        "rank_is": "certified >=",
        "dim": out.dim,
        "full_rank": out.full_rank,
        "full_rank_depth": out.full_rank_depth,
        "basis": [t.label(names) for t in out.basis],
    }
    return {"system": args.system, "depth": args.depth, "point": q}, res, None


def cmd_involutive(args):
    from .catalog import field_system
    from .vf_calculus import is_involutive

    system = field_system(args.system)
    rng = np.random.default_rng(args.seed)
    pts = [np.asarray(system.sampler(rng), dtype=float) for _ in range(args.points)]
    res = {"involutive": is_involutive(system.fields, pts)}
    return {"system": args.system, "points": pts, "seed": args.seed}, res, None


def cmd_train(args):
    from .bangbang_di import DIState, feedback, min_time, simulate

    s = DIState(args.x1, args.x2)
    plan = min_time(s)
    res = {"u_first": plan.u_first, "t_switch": plan.t_switch, "t_total": plan.t_total,
           "feedback": feedback(s)}
    table = None
    if args.samples:
        times = np.linspace(0.0, plan.t_total, args.samples)
        states = simulate(s, plan, args.samples)
        res["samples"] = [{"t": t, "x1": st.x1, "x2": st.x2} for t, st in zip(times, states)]
        table = (("t", "x1", "x2"), [(t, st.x1, st.x2) for t, st in zip(times, states)])
    return {"x1": args.x1, "x2": args.x2, "samples": args.samples}, res, table


def cmd_dubins(args):
    from .dubins import PlanarPose, candidates, sample_path, shortest_path

    q0, q1 = PlanarPose(*args.q0), PlanarPose(*args.q1)
    best = shortest_path(q0, q1)
    res = {
        "word": best.word,
        "segment_params": best.segment_params,
        "length": best.length,
        "candidates": {c.word: c.length for c in candidates(q0, q1)},
    }
    table = None
    if args.samples:
        pts = sample_path(best, q0, args.samples)
        res["samples"] = [p.as_tuple() for p in pts]
        table = (("x", "y", "theta"), [p.as_tuple() for p in pts])
    return {"from": q0.as_tuple(), "to": q1.as_tuple(), "samples": args.samples}, res, table


def cmd_elastica(args):
    from .elastica import ElasticaParams, classify, elastic_energy, integrate_extremal

    params = ElasticaParams(args.r, args.beta0, args.h20, args.length)
    curve = integrate_extremal(params, args.steps)
    cols = (curve.t, curve.x, curve.y, curve.theta, curve.beta, curve.h2)
    idx = list(range(0, len(curve), args.stride))
    if idx[-1] != len(curve) - 1:
        idx.append(len(curve) - 1)
    rows = [tuple(c[i] for c in cols) for i in idx]
    res = {
        "regime": classify(params).value,
        "energy": params.energy,
        "elastic_energy": elastic_energy(curve),
        "endpoint": [curve.x[-1], curve.y[-1], curve.theta[-1]],
        "samples": rows,
        "columns": ["t", "x", "y", "theta", "beta", "h2"],
    }
    inputs = {"r": args.r, "beta0": args.beta0, "h20": args.h20, "length": args.length,
              "steps": len(curve) - 1, "stride": args.stride}
    return inputs, res, (("t", "x", "y", "theta", "beta", "h2"), rows)


def cmd_hb_exp(args):
    from .heisenberg import GeodesicParam, conjugate_time, exp_map, geodesic, maxwell_time

    if args.t < 0:
        raise UsageError("--t must be nonnegative")
    g = GeodesicParam(args.theta0, args.h3, args.t)
    end = exp_map(g)
    res = {"endpoint": end.as_tuple(), "conjugate_time": conjugate_time(g.h3),
           "maxwell_time": maxwell_time(g.h3)}
    table = None
    if args.samples:
        pts = geodesic(g, args.samples)
        res["samples"] = pts
        table = (("x", "y", "z"), pts)
    return {"theta0": g.theta0, "h3": g.h3, "t": g.t, "samples": args.samples}, res, table


def _distance_payload(x, y, z):
    from .heisenberg import HPoint, solve_geodesic

    r = solve_geodesic(HPoint(x, y, z))
    return {
        "distance": r.distance,
        "family": r.family,
        "minimizers": [{"theta0": m.theta0, "h3": m.h3, "t": m.t} for m in r.minimizers],
    }


def _read_batch(path: str) -> list[tuple[float, float, float]]:
    rows = []
    try:
        fh = sys.stdin if path == "-" else open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise UsageError(f"{path}:{lineno}: expected numbers x,y,z") from None
            if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
                raise UsageError(f"{path}:{lineno}: expected three finite numbers x,y,z")
            rows.append(tuple(vals))
    return rows


def cmd_hb_dist(args):
    from .heisenberg import distance

    if args.batch is not None:
        if any(v is not None for v in (args.x, args.y, args.z)):
            raise UsageError("--batch excludes --x/--y/--z")
        pts = _read_batch(args.batch)
        rows = [(x, y, z, distance(x, y, z)) for x, y, z in pts]
        res = {"rows": [{"x": x, "y": y, "z": z, "d": d} for x, y, z, d in rows]}
        return {"batch": args.batch, "count": len(rows)}, res, (("x", "y", "z", "d"), rows)
    if any(v is None for v in (args.x, args.y, args.z)):
        raise UsageError("hb-dist needs --x, --y and --z (or --batch)")
    res = _distance_payload(args.x, args.y, args.z)
    table = (("x", "y", "z", "d"), [(args.x, args.y, args.z, res["distance"])])
    return {"x": args.x, "y": args.y, "z": args.z}, res, table


HANDLERS = {
    "kalman": cmd_kalman,
    "linearize": cmd_linearize,
    "bracket": cmd_bracket,
    "larc": cmd_larc,
    "involutive": cmd_involutive,
    "train": cmd_train,
    "dubins": cmd_dubins,
    "elastica": cmd_elastica,
    "hb-exp": cmd_hb_exp,
    "hb-dist": cmd_hb_dist,
}


def _meta() -> dict:
    from . import bangbang_di, dubins, elastica, heisenberg, linear_ctrl, vf_calculus

    return {
        "version": __version__,
        "tolerances": {
            "rank": "sigma > max(rows, cols) * eps * sigma_max",
            "equilibrium": linear_ctrl.EQUILIBRIUM_TOL,
            "gramian_panels": linear_ctrl.GRAMIAN_PANELS,
            "involutive_rtol": vf_calculus.INVOLUTIVE_RTOL,
            "flow_steps": vf_calculus.FLOW_STEPS,
            "train_on_curve_rtol": bangbang_di.ON_CURVE_RTOL,
            "dubins_tie": dubins.TIE_TOL,
            "elastica_regime": elastica.REGIME_TOL,
            "heisenberg_p_xtol": heisenberg.P_XTOL,
        },
    }


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        fmt = args.format or os.environ.get(FORMAT_ENV, "json").lower()
        if fmt not in ("json", "csv"):
            raise UsageError(f"{FORMAT_ENV} must be json or csv, got {fmt!r}")
        try:
            inputs, results, table = HANDLERS[args.command](args)
        except UsageError:
            raise
        except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
            env = {"command": args.command, "inputs": vars_for(args), "meta": _meta(),
                   "error": {"type": type(exc).__name__, "message": str(exc)}}
            stdout.write(dumps(env))
            return 1
        if fmt == "csv":
            if table is None:
                raise UsageError(f"--format csv is not available for {args.command} "
                                 "without a tabular payload")
            stdout.write(_csv_text(*table))
        else:
            env = {"command": args.command, "inputs": inputs, "results": results, "meta": _meta()}
            stdout.write(dumps(env))
        return 0
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 2


def vars_for(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "format")}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
