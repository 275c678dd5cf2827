"""Reproducible experiment runner.

``ncvharm <suite> --config cfg.json --seed N --out DIR`` executes one named
suite and writes ``results.csv`` (one row per check), ``summary.json`` and,
for the cz suite, ``cz_report.csv``.  Identical (config, seed) pairs produce
byte-identical reports.  ``--replay witness.json`` re-runs a single failed
case from its witness row.  ``ncvharm verify FILE`` re-validates a serialized
atomic decomposition.

Exit codes: 0 all checks passed, 1 some inequality failed, 2 unknown suite,
3 unwritable output, 4 config schema violation.

Only the standard library is imported at module level so that the
``NCVHARM_THREADS`` cap can be applied before numpy loads its thread pools.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_FAIL = 1
EXIT_UNKNOWN_SUITE = 2
EXIT_UNWRITABLE = 3
EXIT_BAD_CONFIG = 4

_SCHEMA_KEYS = {"suite", "seed", "dim", "grid", "corpus", "out_dir", "tolerances"}
_GRID_KEYS = {"origin", "cell_width", "num_cells"}


def _apply_thread_cap() -> None:
    cap = os.environ.get("NCVHARM_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def load_config(path: str | None, suite: str, seed: int | None, out_dir: str | None):
    from .gridfn import Grid
    from .suites import SUITES, SuiteConfig

    raw: dict = {}
    if path is not None:
        with open(path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict) or not set(raw) <= _SCHEMA_KEYS:
            raise ValueError(f"config keys must be a subset of {sorted(_SCHEMA_KEYS)}")
    suite = raw.get("suite", suite)
    if suite not in SUITES:
        raise KeyError(suite)
    grid = None
    if raw.get("grid") is not None:
        g = raw["grid"]
        if not isinstance(g, dict) or set(g) != _GRID_KEYS:
            raise ValueError(f"grid needs exactly the keys {sorted(_GRID_KEYS)}")
        grid = Grid(float(g["origin"]), float(g["cell_width"]), int(g["num_cells"]))
    for key, kind in (("seed", int), ("dim", int), ("corpus", int)):
        if key in raw and raw[key] is not None and not isinstance(raw[key], kind):
            raise ValueError(f"config field {key!r} must be {kind.__name__}")
    tolerances = raw.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ValueError("tolerances must be an object")
    return SuiteConfig(
        suite=suite,
        seed=seed if seed is not None else int(raw.get("seed", 0)),
        dim=raw.get("dim"),
        grid=grid,
        corpus=raw.get("corpus"),
        out_dir=out_dir if out_dir is not None else raw.get("out_dir"),
        tolerances=tolerances,
    )


def write_reports(cfg, rows, out_dir: str) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w", newline="\n") as fh:
        fh.write("suite,check,case,value,bound,passed,witness\n")
        for r in rows:
            witness = r.witness_json().replace('"', '""')
            fh.write(f'{r.suite},{r.check},{r.case},{_fmt(r.value)},{_fmt(r.bound)},'
                     f'{_fmt(r.passed)},"{witness}"\n')

    cz_rows = [r for r in rows if r.check == "atom_endpoint_bound"]
    if cz_rows:
        with open(os.path.join(out_dir, "cz_report.csv"), "w", newline="\n") as fh:
            fh.write("kernel,lambda,C_lambda,T_norm,atom_seed,near,far,total,bound,pass\n")
            for r in cz_rows:
                w = r.witness
                fh.write(
                    f'{w["kernel"]},{_fmt(2.0)},{_fmt(w["c_lambda"])},{_fmt(w["t_norm"])},'
                    f'{w["seed"]}:{w["k"]},{_fmt(w["near"])},{_fmt(w["far"])},'
                    f'{_fmt(r.value)},{_fmt(r.bound)},{_fmt(r.passed)}\n'
                )

    from .frozen import FROZEN

    checks: dict[str, dict] = {}
    for r in rows:
        slot = checks.setdefault(r.check, {"pass": 0, "fail": 0})
        slot["pass" if r.passed else "fail"] += 1
    failures = [json.loads(r.witness_json()) for r in rows if not r.passed]
    summary = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "rows": len(rows),
        "passed": sum(1 for r in rows if r.passed),
        "failed": sum(1 for r in rows if not r.passed),
        "checks": checks,
        "frozen_constants": {k: v for k, v in sorted(FROZEN.items())},
        "threads_cap": os.environ.get("NCVHARM_THREADS"),
    }
    with open(os.path.join(out_dir, "summary.json"), "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if failures:
        with open(os.path.join(out_dir, "failures.json"), "w", newline="\n") as fh:
            json.dump(failures, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return summary


def cmd_suite(args) -> int:
    try:
        cfg = load_config(args.config, args.suite, args.seed, args.out)
    except KeyError as exc:
        print(f"unknown suite: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_SUITE
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    from .suites import run_suite_rows

    only = None
    if args.replay:
        with open(args.replay) as fh:
            witness = json.load(fh)
        only = witness.get("case")
        if witness.get("seed") is not None:
            cfg = type(cfg)(suite=witness.get("suite", cfg.suite), seed=int(witness["seed"]),
                            dim=cfg.dim, grid=cfg.grid, corpus=cfg.corpus,
                            out_dir=cfg.out_dir, tolerances=cfg.tolerances)

    out_dir = cfg.out_dir or "ncvharm-out"
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        print(f"output directory not writable: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE

    rows = run_suite_rows(cfg, only)
    summary = write_reports(cfg, rows, out_dir)
    for r in rows:
        if not r.passed:
            print(f"FAIL {r.suite}/{r.check}/{r.case}: value={_fmt(r.value)} "
                  f"bound={_fmt(r.bound)}")
    print(f"{summary['passed']}/{summary['rows']} checks passed -> {out_dir}")
    return 0 if summary["failed"] == 0 else EXIT_FAIL


def cmd_verify(args) -> int:
    from .hardy import CDecomposition, validate_atom

    with open(args.file) as fh:
        dec = CDecomposition.from_json(json.load(fh))
    bad = 0
    for idx, (lam, atom) in enumerate(dec.terms):
        rep = validate_atom(atom)
        status = "ok" if rep.valid else "INVALID"
        print(f"term {idx}: |lambda|={abs(lam):.6g} l1={rep.l1_norm:.6g} "
              f"norm_slack={rep.norm_slack:.6g} {status}")
        bad += 0 if rep.valid else 1
    print(f"{len(dec.terms) - bad}/{len(dec.terms)} atoms valid; "
          f"sum|lambda| = {dec.coefficient_sum:.6g}")
    return 0 if bad == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncvharm", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("bmo", "atoms", "garnett", "duality", "cz", "lp", "all"):
        sp = sub.add_parser(name, help=f"run the {name} suite")
        sp.add_argument("--config", default=None, help="JSON suite config")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--replay", default=None, help="witness JSON of a single case")
        sp.set_defaults(func=cmd_suite, suite=name)
    vp = sub.add_parser("verify", help="re-validate a serialized decomposition")
    vp.add_argument("file")
    vp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
