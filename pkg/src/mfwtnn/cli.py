"""Command-line front end: ``mfwtnn simulate | denoise | metrics | bench``.

Exit codes
----------
0  success (for ``denoise``: the stopping rule was met)
1  runtime failure (I/O, numerical)
2  usage, config or dimension error
3  ``denoise`` stopped at the iteration cap without meeting the stopping rule

The default worker cap for BLAS/LAPACK comes from ``MFWTNN_THREADS`` and
can be overridden with ``--threads``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cubeio import (
    ConfigError,
    CubeFormatError,
    load_cube,
    load_noise_spec,
    load_solver_config,
    noise_spec_to_dict,
    save_cube,
    solver_config_to_dict,
    write_config,
)
from .metrics import report
from .noise import apply_noise, case_spec
from .solver import SolverConfig, denoise, init_state, iterate

log = logging.getLogger("mfwtnn")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MAXITER = 0, 1, 2, 3
THREADS_ENV = "MFWTNN_THREADS"


def _thread_limit(n: int | None):
    if n is None:
        env = os.environ.get(THREADS_ENV)
        n = int(env) if env else None
    if not n:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, inputs: dict, config: dict, files: dict, seconds: float, **extra) -> Path:
    manifest = {
        "command": command,
        "version": __version__,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "config": config,
        "outputs": {k: {"path": str(v), "sha256": _sha256(v)} for k, v in files.items()},
        # timing and platform fields are not reproducible
        "timing": {"wall_seconds": seconds},
        "platform": {"python": platform.python_version(), "numpy": np.__version__},
    }
    manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return path


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    clean = load_cube(args.clean, normalize=args.normalize)
    if args.spec:
        spec = load_noise_spec(args.spec)
        if args.seed is not None:
            from dataclasses import replace

            spec = replace(spec, seed=args.seed)
    else:
        stripe = tuple(args.stripe_bands) if args.stripe_bands else None
        spec = case_spec(args.case, clean.shape[2], seed=args.seed or 0, stripe_bands=stripe)
    noisy = apply_noise(clean, spec)
    out = _outdir(args.out)
    files = {
        "noisy": save_cube(noisy, out / "noisy.cube", width=args.width, force=args.force),
        "noise_spec": write_config(noise_spec_to_dict(spec), out / "noise.cfg", force=args.force),
    }
    if args.normalize:
        files["clean"] = save_cube(clean, out / "clean.cube", width=args.width, force=args.force)
    _write_manifest(
        out, "simulate", {"clean": args.clean}, noise_spec_to_dict(spec), files, time.perf_counter() - t0, seed=spec.seed
    )
    print(f"wrote {files['noisy']} (case={spec.case}, G={spec.gaussian}, P={spec.impulse}, seed={spec.seed})")
    return EXIT_OK


def _history_csv(history, path: Path) -> Path:
    fields = ["iteration", "residual", "z_residual", "rel_change", "objective", "mu", "beta", "seconds"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(fields)
        for rec in history:
            w.writerow([rec.iteration] + [repr(float(getattr(rec, k))) for k in fields[1:]])
    return path


def cmd_denoise(args) -> int:
    t0 = time.perf_counter()
    cfg = load_solver_config(args.config) if args.config else SolverConfig()
    y = load_cube(args.noisy, normalize=args.normalize)
    with _thread_limit(args.threads):
        result = denoise(y, cfg)
    out = _outdir(args.out)
    files = {
        "x_hat": save_cube(result.x_hat, out / "x_hat.cube", force=args.force),
        "s_hat": save_cube(result.s_hat, out / "s_hat.cube", force=args.force),
        "n_hat": save_cube(result.n_hat, out / "n_hat.cube", force=args.force),
        "history": _history_csv(result.history, out / "history.csv"),
        "config": write_config(solver_config_to_dict(cfg), out / "config.cfg", force=True),
    }
    extra = {"iterations": result.iterations, "converged": result.converged, "lambda": result.lam, "tau": result.tau}
    if args.reference:
        rep = report(load_cube(args.reference, normalize=args.normalize), result.x_hat)
        (out / "metrics.csv").write_text(rep.to_csv())
        files["metrics"] = out / "metrics.csv"
        print(rep)
    _write_manifest(
        out, "denoise", {"noisy": args.noisy, "config": args.config}, solver_config_to_dict(cfg), files,
        time.perf_counter() - t0, **extra,
    )
    state = "converged" if result.converged else "stopped at iteration cap"
    print(f"{cfg.model}: {state} after {result.iterations} iterations; wrote {out}")
    return EXIT_OK if result.converged else EXIT_MAXITER


def cmd_metrics(args) -> int:
    t0 = time.perf_counter()
    ref = load_cube(args.ref, normalize=args.normalize)
    est = load_cube(args.est)
    rep = report(ref, est)
    print(rep)
    if args.out:
        out = _outdir(args.out)
        files = {"metrics": out / "metrics.csv", "bands": out / "bands.csv"}
        files["metrics"].write_text(rep.to_csv())
        files["bands"].write_text(rep.bands_csv())
        _write_manifest(out, "metrics", {"ref": args.ref, "est": args.est}, {}, files, time.perf_counter() - t0)
    return EXIT_OK


def bench_sizes(sizes, cfg: SolverConfig, repeats: int = 3, seed: int = 0) -> list[dict]:
    """Time single solver iterations on random ``n x n x n`` cubes."""
    rows = []
    for n in sizes:
        rng = np.random.default_rng([seed, n])
        y = rng.uniform(0.0, 1.0, size=(n, n, n))
        lam, tau = cfg.resolve_lambda(y.shape), cfg.resolve_tau()
        times = []
        for _ in range(repeats):
            state = init_state(y, cfg)
            t0 = time.perf_counter()
            iterate(state, cfg, y, lam, tau)
            times.append(time.perf_counter() - t0)
        t = np.array(times)
        rows.append(
            {
                "n1": n, "n2": n, "n3": n, "repeats": repeats,
                "median_s": float(np.median(t)), "mean_s": float(t.mean()),
                "std_s": float(t.std(ddof=1)) if repeats > 1 else 0.0, "min_s": float(t.min()),
            }
        )
    return rows


def cmd_bench(args) -> int:
    cfg = load_solver_config(args.config) if args.config else SolverConfig(sigma=0.1)
    with _thread_limit(args.threads):
        rows = bench_sizes(args.sizes, cfg, args.repeats, args.seed or 0)
    out = _outdir(args.out)
    path = out / "bench.csv"
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(f"{r['n1']:>4}^3  median {r['median_s']:.4f} s  (std {r['std_s']:.4f}, {r['repeats']} runs)")
    return EXIT_OK


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfwtnn", description="Mixed-noise restoration of third-order data cubes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="degrade a clean cube with a reference noise case or a noise spec")
    p.add_argument("clean")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--case", type=int, choices=range(1, 9))
    g.add_argument("--spec", help="noise spec config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--stripe-bands", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--width", type=int, choices=(32, 64), default=64)
    p.add_argument("--normalize", action="store_true", help="min-max map the clean cube to [0, 1] first")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("denoise", help="run the ADMM solver")
    p.add_argument("noisy")
    p.add_argument("--config", help="solver config file (defaults otherwise)")
    p.add_argument("--reference", help="clean cube; writes metrics.csv when given")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("metrics", help="MPSNR / MSSIM / ERGAS / MSAM of an estimate against a reference")
    p.add_argument("ref")
    p.add_argument("est")
    p.add_argument("--normalize", action="store_true", help="normalize the reference to [0, 1]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="time one solver iteration over a size sweep")
    p.add_argument("--sizes", type=_int_list, default=[16, 32, 64])
    p.add_argument("--config")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CubeFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
