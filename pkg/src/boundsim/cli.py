"""``boundsim`` command-line interface.

Every subcommand writes its artifact to ``--out`` (stdout if omitted).  A JSON
file passed with ``--config`` may supply any flag of the chosen subcommand,
keyed by its long name with dashes replaced by underscores; flags given on the
command line win.  Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import expsim, mubs, search, simplex, witness
from .errors import BoundsimError, InvalidConfig, NumericalError, ValidationError
from .numkernel import check_state, fidelity, load_matrix, matrix_to_dict

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
SIG = 12

# Defaults applied after merging the config file, so "flag given" is detectable.
DEFAULTS = {
    "d": 3,
    "labeling": "max",
    "threads": 1,
    "q3": -0.5776,
    "q1_range": "-1,1",
    "q2_range": "-3,0",
    "resolution": "200",
    "lo": 1.0,
    "hi": 4.0,
    "step": 0.05,
    "noise": "1500,5",
    "windows": 1,
    "protocol": "mcp",
    "background": None,
}


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG}g}"
    return str(x)


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidConfig(f"--{name}: expected comma-separated numbers, got {text!r}") from exc


def _seed_default() -> int:
    env = os.environ.get("BOUNDSIM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InvalidConfig(f"BOUNDSIM_SEED must be an integer, got {env!r}") from exc


@contextmanager
def _sink(path: str | None, binary: bool = False):
    if path is None or path == "-":
        if binary:
            yield sys.stdout.buffer
        else:
            yield sys.stdout
        return
    try:
        fh = open(path, "wb" if binary else "w", newline=None if binary else "")
    except OSError as exc:
        raise InvalidConfig(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def _write_json(obj, path):
    with _sink(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(header, rows, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    with _sink(path) as fh:
        fh.write(buf.getvalue())


# -- input helpers ---------------------------------------------------------------


def _params(args) -> simplex.FamilyParams:
    q = _floats(args.q, "q")
    try:
        return simplex.FamilyParams.from_vector(args.d, q)
    except ValidationError as exc:
        raise InvalidConfig(str(exc)) from exc


def _state_input(args) -> tuple[np.ndarray, int, simplex.SimplexCoeffs | None]:
    """Density matrix, local dimension and (if known) simplex weights; params XOR state file."""
    has_q = getattr(args, "q", None) is not None
    has_state = getattr(args, "state", None) is not None
    if has_q == has_state:
        raise InvalidConfig("give exactly one of --q or --state")
    if has_q:
        c = simplex.coeffs_from_family(_params(args))
        return simplex.state_from_coeffs(c), args.d, c
    try:
        rho = load_matrix(args.state)
    except (OSError, KeyError, ValueError) as exc:
        raise InvalidConfig(f"cannot read state {args.state}: {exc}") from exc
    rho = check_state(rho)
    d = int(round(np.sqrt(rho.shape[0])))
    if d * d != rho.shape[0]:
        raise InvalidConfig(f"state dimension {rho.shape[0]} is not a square")
    return rho, d, None


def _labeling(text: str):
    if text in ("max", "maximize"):
        return "maximize"
    if text in ("methods", "methods_d3"):
        return "methods_d3"
    try:
        with open(text) as fh:
            obj = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InvalidConfig(f"--labeling must be methods, max or a readable JSON file ({exc})") from exc
    perms = obj["perms"] if isinstance(obj, dict) else obj
    conj = obj.get("conjugate_bob", True) if isinstance(obj, dict) else True
    return witness.Labeling(tuple(tuple(p) for p in perms), conj)


# -- subcommands -----------------------------------------------------------------


def cmd_mubs(args):
    fam = mubs.mub_family(args.dim)
    if args.action == "export":
        _write_json(mubs.family_to_json(fam), args.out)
    else:
        rep = mubs.verify_mub(fam)
        _write_json(
            {
                "d": fam.d,
                "bases": fam.m,
                "max_overlap_deviation": rep.max_overlap_deviation,
                "max_orthonormality_deviation": rep.max_orthonormality_deviation,
            },
            args.out,
        )


def cmd_state(args):
    if args.horodecki is not None:
        if args.q is not None:
            raise InvalidConfig("give either --q or --horodecki")
        p = simplex.horodecki_params(args.horodecki)
    else:
        if args.q is None:
            raise InvalidConfig("--q or --horodecki is required")
        p = _params(args)
    c = simplex.coeffs_from_family(p)
    _write_json(matrix_to_dict(simplex.state_from_coeffs(c)), args.out)
    if args.coeffs is not None:
        _write_csv(("k", "l", "c"), c.rows(), args.coeffs)


def cmd_witness(args):
    rho, d, c = _state_input(args)
    lab = _labeling(args.labeling)
    rep = witness.mcp_coeffs(c, lab) if c is not None else witness.mcp(rho, labeling=lab)
    _write_json(rep.to_dict(), args.out)


def cmd_ppt(args):
    rho, d, c = _state_input(args)
    lam = simplex.ppt_min_eig(rho, d)
    out = {"d": d, "min_pt_eig": lam, "ppt": lam >= -search.PPT_TOL}
    if c is not None:
        out["min_coeff"] = float(c.c.min())
        out["physical"] = c.physical
    _write_json(out, args.out)


def cmd_scan(args):
    res = [int(x) for x in _floats(args.resolution, "resolution")]
    if len(res) == 1:
        res = res * 2
    spec = search.SliceSpec(
        q3=args.q3,
        q1_range=tuple(_floats(args.q1_range, "q1-range")),
        q2_range=tuple(_floats(args.q2_range, "q2-range")),
        resolution=tuple(res),
    )
    grid = search.scan_slice(spec, _labeling(args.labeling), threads=args.threads)
    _write_csv(("q1", "q2", "class", "witness", "min_pt_eig"), grid.rows(), args.out)
    if args.pgm is not None:
        with _sink(args.pgm, binary=True) as fh:
            fh.write(grid.to_pgm())


def cmd_optimize(args):
    res = search.optimize_witness(args.d, _labeling(args.labeling), budget=args.budget, seed=args.seed, threads=args.threads)
    _write_json(res.to_dict(), args.out)


def cmd_horodecki(args):
    rows = search.horodecki_sweep(args.lo, args.hi, args.step, _labeling(args.labeling))
    _write_csv(
        ("lambda", "min_pt_eig", "witness", "ppt", "bound_entangled"),
        ((r.lam, r.min_pt_eig, r.witness, int(r.ppt), int(r.bound_entangled)) for r in rows),
        args.out,
    )


def _noise(args) -> expsim.NoiseModel:
    vals = _floats(args.noise, "noise")
    if len(vals) != 2:
        raise InvalidConfig("--noise expects peak,background")
    return expsim.NoiseModel(peak=vals[0], background=vals[1], windows=args.windows, seed=args.seed)


def _coeffs_input(args) -> tuple[simplex.SimplexCoeffs, np.ndarray]:
    rho, d, c = _state_input(args)
    if c is None:
        c = simplex.coeffs_from_state(rho, d)
    return c, rho


def cmd_simulate(args):
    c, rho = _coeffs_input(args)
    noise = _noise(args)
    d = c.d
    if args.protocol == "mcp":
        mixed = expsim.retroactive_mix(expsim.simulate_mcp(d, noise), c)
        header = ["setting", "basis", "i", "j"] + [f"n{k}{l}" for k in range(d) for l in range(d)] + ["mixed"]
        rows = ([r.setting_id, r.basis, *r.outcome, *r.counts.tolist(), r.mixed] for r in mixed)
        report = expsim.mcp_from_counts(mixed, d, _labeling(args.labeling)).to_dict()
    elif args.protocol == "tomography":
        tset = expsim.tomography_settings(d)
        mixed = expsim.retroactive_mix(expsim.simulate_tomography(tset, noise), c)
        header = ["setting"] + [f"n{k}{l}" for k in range(d) for l in range(d)] + ["mixed"]
        rows = ([r.setting_id, *r.counts.tolist(), r.mixed] for r in mixed)
        est = expsim.reconstruct(mixed, tset, background=noise.windows * noise.background)
        report = {
            "fidelity": fidelity(est, rho),
            "min_pt_eig": simplex.ppt_min_eig(est, d),
            "state": matrix_to_dict(est),
        }
    else:
        raise InvalidConfig(f"unknown protocol {args.protocol!r}")
    _write_csv(header, rows, args.out)
    if args.report is not None:
        report["noise"] = {"peak": noise.peak, "background": noise.background, "windows": noise.windows, "seed": noise.seed}
        _write_json(report, args.report)


def cmd_tomography(args):
    tset = expsim.tomography_settings(args.d)
    if args.counts is None:
        n = tset.n_side
        rows = (
            [sid, sid // n, sid % n]
            + [fmt(float(x)) for x in tset.kets[sid // n].view(float)]
            + [fmt(float(x)) for x in tset.kets[sid % n].view(float)]
            for sid in range(tset.n_pairs)
        )
        comps = [f"{s}{i}_{part}" for s in "ab" for i in range(args.d) for part in ("re", "im")]
        _write_csv(["setting", "ket_a", "ket_b"] + comps, rows, args.out)
        return
    try:
        with open(args.counts, newline="") as fh:
            table = list(csv.DictReader(fh))
        counts = [float(r["mixed"]) for r in sorted(table, key=lambda r: int(r["setting"]))]
    except (OSError, KeyError, ValueError) as exc:
        raise InvalidConfig(f"cannot read counts {args.counts}: {exc}") from exc
    bg = args.background if args.background is not None else 0.0
    _write_json(matrix_to_dict(expsim.reconstruct(counts, tset, background=bg)), args.out)


def cmd_variants(args):
    p = _params(args)
    if p.d != 3:
        raise InvalidConfig("variants are defined for d = 3")
    specs = simplex.variant_specs()
    header = ["index", "line", "apex", "parallel"] + [f"c{k}{l}" for k in range(3) for l in range(3)] + ["min_pt_eig", "witness"]

    def pts(ps):
        return " ".join(f"{a}{b}" for a, b in ps)

    rows = []
    for i, (s, c) in enumerate(zip(specs, simplex.equivalent_variants(p))):
        w = witness.mcp_coeffs(c, _labeling(args.labeling)).witness
        rows.append([i, pts(s.line), pts([s.apex]), pts(s.parallel), *c.c.ravel().tolist(), simplex.ppt_min_eig_coeffs(c), w])
    _write_csv(header, rows, args.out)


def cmd_budget(args):
    _write_csv(("n_qst", "n_mcp1", "n_mcp2"), [expsim.measurement_budget(args.d).as_tuple()], args.out)


# -- parser ----------------------------------------------------------------------


def _add_common(p, threads=False, seed=False):
    p.add_argument("--config", help="JSON file with flag values (flags on the command line win)")
    p.add_argument("--out", help="output path (default: stdout)")
    if threads:
        p.add_argument("--threads", type=int, help="worker threads; output does not depend on it (default 1)")
    if seed:
        p.add_argument("--seed", type=int, help="RNG seed (default: $BOUNDSIM_SEED or 0)")


def _add_state(p):
    p.add_argument("--d", type=int, help="local dimension (default 3)")
    p.add_argument("--q", help="family parameters q1,q2,q3[,q4]")
    p.add_argument("--state", help="density matrix JSON file {dim, re, im}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boundsim", description="Bound-entanglement detection with MUB correlations and PPT.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mubs", help="export or verify a MUB family")
    p.add_argument("action", choices=("export", "verify"))
    p.add_argument("--dim", type=int, required=False, help="dimension (default 3)")
    _add_common(p)
    p.set_defaults(func=cmd_mubs)

    p = sub.add_parser("state", help="density matrix JSON of a family state")
    p.add_argument("--d", type=int, help="local dimension (default 3)")
    p.add_argument("--q", help="family parameters q1,q2,q3[,q4]")
    p.add_argument("--horodecki", type=float, help="Horodecki parameter lambda in [0, 5] instead of --q")
    p.add_argument("--coeffs", help="also write the coefficient table as CSV (k,l,c)")
    _add_common(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("witness", help="MUB correlation report")
    _add_state(p)
    p.add_argument("--labeling", help="methods | max | path to labeling JSON (default max)")
    _add_common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("ppt", help="minimum eigenvalue of the partial transpose")
    _add_state(p)
    _add_common(p)
    p.set_defaults(func=cmd_ppt)

    p = sub.add_parser("scan", help="classify a (q1, q2) slice at fixed q3 (d = 3)")
    p.add_argument("--q3", type=float, help="fixed q3 (default -0.5776)")
    p.add_argument("--q1-range", help="lo,hi (default -1,1)")
    p.add_argument("--q2-range", help="lo,hi (default -3,0)")
    p.add_argument("--resolution", help="cells per axis, N or N1,N2 (default 200)")
    p.add_argument("--labeling", help="methods | max | labeling JSON (default max)")
    p.add_argument("--pgm", help="also write a P5 PGM class heatmap")
    _add_common(p, threads=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="minimise the witness over PPT family states")
    p.add_argument("--d", type=int, help="dimension in {3,4,5,7,8,9} (default 3)")
    p.add_argument("--labeling", help="methods | max | labeling JSON (default max)")
    p.add_argument("--budget", type=int, help="Nelder-Mead iterations per restart round (default 2000)")
    _add_common(p, threads=True, seed=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("horodecki", help="sweep the Horodecki parameter")
    p.add_argument("--lo", type=float, help="first lambda (default 1)")
    p.add_argument("--hi", type=float, help="last lambda (default 4)")
    p.add_argument("--step", type=float, help="lambda step (default 0.05)")
    p.add_argument("--labeling", help="methods | max | labeling JSON (default max)")
    _add_common(p)
    p.set_defaults(func=cmd_horodecki)

    p = sub.add_parser("simulate", help="simulate coincidence counts with retroactive mixing")
    _add_state(p)
    p.add_argument("--noise", help="peak,background per window (default 1500,5)")
    p.add_argument("--windows", type=int, help="integration windows per setting (default 1)")
    p.add_argument("--protocol", choices=("mcp", "tomography"), help="default mcp")
    p.add_argument("--labeling", help="methods | max | labeling JSON (default max)")
    p.add_argument("--report", help="write the downstream report JSON here")
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tomography", help="list tomography settings or reconstruct from counts")
    p.add_argument("--d", type=int, help="local dimension (default 3)")
    p.add_argument("--counts", help="counts CSV from `simulate --protocol tomography`")
    p.add_argument("--background", type=float, help="flat background per setting to subtract (default 0)")
    _add_common(p)
    p.set_defaults(func=cmd_tomography)

    p = sub.add_parser("variants", help="the 72 unitary-equivalent relabellings (d = 3)")
    p.add_argument("--d", type=int, help="must be 3 (default 3)")
    p.add_argument("--q", required=False, help="family parameters q1,q2,q3")
    p.add_argument("--labeling", help="methods | max | labeling JSON (default max)")
    _add_common(p)
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("budget", help="measurement counts N_QST, N_MCP1, N_MCP2")
    p.add_argument("--d", type=int, help="local dimension (default 3)")
    _add_common(p)
    p.set_defaults(func=cmd_budget)
    return parser


def _merge_config(args, parser_for_cmd: argparse.ArgumentParser) -> None:
    valid = {a.dest for a in parser_for_cmd._actions} - {"help", "config", "func", "command"}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise InvalidConfig(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InvalidConfig("config must be a JSON object")
        for key, value in cfg.items():
            if key not in valid:
                raise InvalidConfig(f"unknown config key {key!r} for {args.command}")
            if getattr(args, key) is None:
                if isinstance(value, list):
                    value = ",".join(str(v) for v in value)
                setattr(args, key, value)
    for key in valid:
        if getattr(args, key, None) is None:
            if key == "seed":
                setattr(args, key, _seed_default())
            elif key == "dim":
                setattr(args, key, 3)
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])
    for key, typ in (("d", int), ("dim", int), ("threads", int), ("seed", int), ("windows", int), ("budget", int)):
        if key in valid and getattr(args, key) is not None:
            try:
                setattr(args, key, typ(getattr(args, key)))
            except (TypeError, ValueError) as exc:
                raise InvalidConfig(f"{key} must be an integer") from exc
    if "threads" in valid and args.threads < 1:
        raise InvalidConfig("--threads must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        _merge_config(args, sub)
        args.func(args)
    except NumericalError as exc:
        print(f"boundsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, BoundsimError) as exc:
        print(f"boundsim: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
