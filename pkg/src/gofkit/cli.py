"""Command-line entry point: decompose | test | calibrate | power | reproduce."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import shutil
import sys

import numpy as np

from . import bench, calibrate as cal, dists, kernels
from .embedding import Sample, adaptive_grid, adaptive_stat, run_test
from .spectrum import (
    DecompositionError,
    cosine_basis,
    gauss_legendre_01,
    load_spectrum,
    nystrom_decompose,
    save_spectrum,
    sphere_zonal_spectrum,
    tensor_product_basis,
)

CACHE_VERSION = "GOFKIT-SPEC v1"


class CliError(Exception):
    """Validation failure; maps to exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _common_flags(p):
    p.add_argument("--seed", type=int, default=None,
                   help="master seed; required on all Monte-Carlo paths")
    p.add_argument("--workers", type=int, default=1,
                   help="worker budget (execution is sequential and "
                        "deterministic regardless; default 1)")
    p.add_argument("--config", default=None,
                   help="JSON file of flag defaults; explicit flags override")
    p.add_argument("--quiet", action="store_true",
                   help="suppress the human-readable report; keep JSON/CSV")


def build_parser() -> _Parser:
    parser = _Parser(prog="gofkit",
                     description="Kernel-embedding goodness-of-fit tests")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="compute and cache a kernel spectrum")
    p.add_argument("--kernel", required=True,
                   help="kernel id (cosine-ref[:terms], gaussian:BW, linear, "
                        "constant; gaussian-sphere:S2 or constant on spheres)")
    p.add_argument("--null", required=True,
                   help="null id: uniform-cube-1 or uniform-sphere-D")
    p.add_argument("--trunc", type=int, required=True,
                   help="truncation K (max sphere degree for zonal kernels)")
    p.add_argument("--nodes", type=int, required=True,
                   help="quadrature node count")
    p.add_argument("--out", required=True, help="spectrum cache output path")
    p.add_argument("--center", action="store_true",
                   help="center the kernel to make the basis degenerate")
    p.add_argument("--no-cache", action="store_true",
                   help="ignore the content-addressed cache and recompute")
    _common_flags(p)

    p = sub.add_parser("test", help="run one goodness-of-fit test on a CSV sample")
    p.add_argument("--kind", required=True, choices=["mmd", "m3d", "adaptive"])
    p.add_argument("--spectrum", required=True, help="spectrum cache file")
    p.add_argument("--data", required=True,
                   help="CSV sample: one row per observation, columns = coordinates")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--rho", type=float, default=None,
                   help="moderation parameter (m3d)")
    p.add_argument("--theta", type=float, default=None,
                   help="derive rho from the rate-optimal schedule (m3d)")
    p.add_argument("--grid", default="auto",
                   help="adaptive grid; only 'auto' is supported")
    p.add_argument("--calibrate", default=None,
                   help="mc:REPS | theory | normal (default per kind)")
    p.add_argument("--calibration", default=None,
                   help="load a calibration file written by `gofkit calibrate`")
    _common_flags(p)

    p = sub.add_parser("calibrate", help="precompute a null calibration file")
    p.add_argument("--kind", required=True, choices=["mmd", "m3d", "adaptive"])
    p.add_argument("--spectrum", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--out", required=True)
    _common_flags(p)

    p = sub.add_parser("power", help="run a power experiment from a plan file")
    p.add_argument("--plan", required=True, help="JSON plan file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--alt", action="append", default=[],
                   metavar="LABEL=FAMILY:key=val,...",
                   help="add an alternative on top of the plan "
                        "(vector values use semicolons)")
    _common_flags(p)

    p = sub.add_parser("reproduce",
                       help="rerun a named simulation study end to end")
    p.add_argument("target", choices=["fig1"])
    p.add_argument("--scale", default="desk", choices=["desk", "full"])
    p.add_argument("--out", default=None,
                   help="output directory (default reproduce-<target>)")
    _common_flags(p)
    parser.subcommand_parsers = dict(sub.choices)
    return parser


# ---------------------------------------------------------------------------
# helpers


def _require_seed(seed, what: str) -> int:
    if seed is None:
        raise CliError("--seed is required for %s" % what)
    return seed


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def _cache_dir() -> str:
    return os.environ.get(
        "GOFKIT_CACHE_DIR",
        os.path.join(os.path.expanduser("~"), ".cache", "gofkit"))


def _cache_key(kernel, null, trunc, nodes, center) -> str:
    raw = "|".join([kernel, null, str(trunc), str(nodes), str(int(center)),
                    CACHE_VERSION])
    return hashlib.sha256(raw.encode()).hexdigest()[:24] + ".spec"


def _build_spectrum(args):
    null = args.null
    if null.startswith("uniform-sphere-"):
        d = int(null[len("uniform-sphere-"):])
        name, _, arg = args.kernel.partition(":")
        if name == "gaussian-sphere":
            profile = kernels.gaussian_sphere_profile(float(arg))
        elif name == "constant":
            profile = lambda t: np.ones_like(np.asarray(t, float))
        else:
            raise CliError("sphere nulls need a zonal kernel "
                           "(gaussian-sphere:S2 or constant), got %r" % args.kernel)
        basis = sphere_zonal_spectrum(profile, d, args.trunc,
                                      quad_points=args.nodes,
                                      include_degree_zero=not args.center
                                      and name == "constant")
        basis.meta["kernel_id"] = args.kernel
        return basis
    if null == "uniform-cube-1":
        kernel = kernels.resolve_kernel(args.kernel)
        quad = gauss_legendre_01(args.nodes)
        if args.center:
            from .spectrum import center_kernel
            kernel = center_kernel(kernel, quad)
        return nystrom_decompose(kernel, quad, args.trunc,
                                 null_id=null, kernel_id=args.kernel)
    raise CliError("unsupported null id for decompose: %r "
                   "(use uniform-cube-1 or uniform-sphere-D)" % null)


def _basis_from_config(cfg: dict):
    kind = cfg.get("type", "cosine")
    if kind == "cosine":
        return cosine_basis(int(cfg.get("K", 64)))
    if kind == "tensor-cosine":
        factor = cosine_basis(int(cfg.get("factor_K", 32)))
        return tensor_product_basis(factor, int(cfg["d"]), int(cfg.get("K", 256)))
    if kind == "spectrum":
        return load_spectrum(cfg["path"])
    if kind == "sphere":
        name, _, arg = cfg["profile"].partition(":")
        if name != "gaussian-sphere":
            raise CliError("unsupported sphere profile %r" % cfg["profile"])
        profile = kernels.gaussian_sphere_profile(float(arg))
        return sphere_zonal_spectrum(profile, int(cfg["d"]),
                                     int(cfg.get("degree_max", 10)))
    raise CliError("unknown basis type %r in plan" % kind)


def _calibration_to_dict(c: cal.NullCalibration) -> dict:
    return {
        "method": c.method,
        "alpha": c.alpha,
        "quantile": c.quantile,
        "reps": c.reps,
        "seed": c.seed,
        "truncation_bias": c.truncation_bias,
        "replicates": None if c.replicates is None else c.replicates.tolist(),
    }


def _calibration_from_file(path) -> cal.NullCalibration:
    with open(path) as fh:
        d = json.load(fh)
    reps = d["replicates"]
    return cal.NullCalibration(
        method=d["method"], alpha=d["alpha"], quantile=d["quantile"],
        reps=d["reps"], seed=d["seed"],
        replicates=None if reps is None else np.asarray(reps, float),
        truncation_bias=d.get("truncation_bias", 0.0))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_decompose(args) -> int:
    cache_dir = _cache_dir()
    cache_path = os.path.join(
        cache_dir, _cache_key(args.kernel, args.null, args.trunc, args.nodes,
                              args.center))
    if not args.no_cache and os.path.exists(cache_path):
        shutil.copyfile(cache_path, args.out)
        _say(args, "cache hit: %s" % cache_path)
        return 0
    basis = _build_spectrum(args)
    save_spectrum(basis, args.out)
    if not args.no_cache:
        os.makedirs(cache_dir, exist_ok=True)
        shutil.copyfile(args.out, cache_path)
        _say(args, "cache stored: %s" % cache_path)
    _say(args, "wrote %s (K=%d)" % (args.out, basis.truncation))
    return 0


def _cmd_test(args) -> int:
    basis = load_spectrum(args.spectrum)
    sample = Sample.from_csv(args.data)
    if args.grid != "auto":
        raise CliError("--grid supports only 'auto'")

    calibration = None
    threshold = "mc"
    calibrate_reps = None
    if args.calibration is not None:
        calibration = _calibration_from_file(args.calibration)
    elif args.calibrate is not None:
        mode, _, arg = args.calibrate.partition(":")
        if mode == "mc":
            calibrate_reps = int(arg) if arg else None
        elif mode == "theory":
            if args.kind != "adaptive":
                raise CliError("theory calibration applies to the adaptive test")
            threshold = "theory"
        elif mode == "normal":
            if args.kind != "m3d":
                raise CliError("normal calibration applies to the m3d test")
        else:
            raise CliError("unknown --calibrate mode %r" % args.calibrate)

    needs_mc = calibration is None and threshold == "mc" and args.kind != "m3d"
    seed = args.seed
    if needs_mc:
        seed = _require_seed(seed, "Monte-Carlo calibration")

    report = run_test(args.kind, basis, sample, args.alpha,
                      rho=args.rho, theta=args.theta,
                      calibration=calibration,
                      calibrate_reps=calibrate_reps,
                      seed=seed, threshold=threshold)
    _say(args, report.to_text())
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0


def _cmd_calibrate(args) -> int:
    basis = load_spectrum(args.spectrum)
    if args.kind == "m3d":
        c = cal.normal_calibration(args.alpha)
    elif args.kind == "mmd":
        seed = _require_seed(args.seed, "Monte-Carlo calibration")
        c = cal.chisq_mix_quantile(basis.eigenvalues, args.alpha,
                                   reps=args.reps or 100_000, seed=seed)
    else:
        seed = _require_seed(args.seed, "Monte-Carlo calibration")
        grid = adaptive_grid(args.n, basis.decay_exponent)
        sampler = dists.null_sampler(basis.null_id)
        c = cal.empirical_null_quantile(
            lambda s: adaptive_stat(basis, grid, s).value,
            lambda size, rng: Sample(sampler(size, rng)),
            args.n, args.alpha, reps=args.reps or 200, seed=seed)
    with open(args.out, "w") as fh:
        json.dump(_calibration_to_dict(c), fh)
        fh.write("\n")
    _say(args, "method: %s\nquantile: %.10g\nwrote %s"
         % (c.method, c.quantile, args.out))
    return 0


def _plan_from_config(cfg: dict, seed_override=None) -> bench.ExperimentPlan:
    basis = _basis_from_config(cfg.get("basis", {}))
    alts = {}
    for label, alt_cfg in cfg["alternatives"].items():
        alts[label] = dists.spec_from_config(alt_cfg, basis=basis)
    calib = cfg.get("calibration", {})
    seed = seed_override if seed_override is not None else cfg.get("seed")
    if seed is None:
        raise CliError("--seed is required (or a 'seed' field in the plan)")
    return bench.ExperimentPlan(
        basis=basis, alternatives=alts,
        tests=list(cfg["tests"]), n_list=[int(n) for n in cfg["n"]],
        reps=int(cfg.get("reps", 100)), alpha=float(cfg.get("alpha", 0.05)),
        seed=int(seed),
        mmd_calibration_reps=int(calib.get("mmd_reps", 100_000)),
        adaptive_calibration_reps=int(calib.get("adaptive_reps", 200)),
        theta=float(calib.get("theta", 0.0)))


def _run_and_emit(plan: bench.ExperimentPlan, out_dir: str, args) -> int:
    table = bench.run_plan(plan)
    paths = bench.emit(table, out_dir)
    for cell in table.aggregate():
        _say(args, "%(test)s n=%(n)d %(alternative)s: "
             "reject_rate=%(reject_rate).3f" % cell)
    print(json.dumps(paths, sort_keys=True))
    return 0


def _cmd_power(args) -> int:
    with open(args.plan) as fh:
        cfg = json.load(fh)
    plan = _plan_from_config(cfg, seed_override=args.seed)
    for entry in args.alt:
        label, eq, flag = entry.partition("=")
        if not eq:
            raise CliError("--alt expects LABEL=FAMILY:key=val,...")
        plan.alternatives[label] = dists.alt_from_flag(flag, basis=plan.basis)
    return _run_and_emit(plan, args.out, args)


def _cmd_reproduce(args) -> int:
    seed = _require_seed(args.seed, "the reproduction run")
    d = 5 if args.scale == "desk" else 100
    out_dir = args.out or ("reproduce-%s" % args.target)
    basis = tensor_product_basis(cosine_basis(32), d, 256)
    mixture = dists.make_gaussian_mixture_spec(d, seed=seed, uniform_weight=0.9)
    plan = bench.ExperimentPlan(
        basis=basis,
        alternatives={"gaussian-mixture": mixture},
        tests=["mmd", "m3d"],
        n_list=[200, 400, 600, 800, 1000],
        reps=100, alpha=0.05, seed=seed,
        mmd_calibration_reps=100_000)
    return _run_and_emit(plan, out_dir, args)


_COMMANDS = {
    "decompose": _cmd_decompose,
    "test": _cmd_test,
    "calibrate": _cmd_calibrate,
    "power": _cmd_power,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            with open(args.config) as fh:
                defaults = json.load(fh)
            # subparsers keep their own defaults, so overlay the config onto
            # each of them before reparsing; explicit flags still win
            for sub in parser.subcommand_parsers.values():
                sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (DecompositionError, RuntimeError, ArithmeticError, OSError) as exc:
        print("runtime error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
