"""Command-line front end.

Subcommands: ``laplacian``, ``eigens``, ``bank``, ``simulate``,
``augment``, ``stats``, ``bench``. Every command is deterministic given
its inputs and seed (``bench`` timings excepted). Exit codes: 0 on
success, 1 on computation failure, 2 on usage or I/O errors.

A JSON config file passed with ``--config`` overrides any flag of the
same (underscored) name after parsing, so a run is fully describable by
one file. All randomness flows from the single ``--seed`` value, which
is mandatory for ``simulate`` and ``augment``.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import augment as aug
from . import filters, mesh, operator, simulate, spectrum


class UsageError(Exception):
    """Bad arguments or missing inputs; maps to exit code 2."""


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            print(f"error: config file not found: {args.config}", file=sys.stderr)
            return 2
        for key, value in overrides.items():
            setattr(args, key.replace("-", "_"), value)
    try:
        args.validate(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except (operator.ConvergenceError, filters.RecurrenceDivergenceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="surfaug",
        description="Augment scalar signals on triangulated surface meshes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, run, validate):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file whose keys override flags")
        p.set_defaults(run=run, validate=validate)
        return p

    p = add("laplacian", "assemble the operator and export it",
            cmd_laplacian, _validate_laplacian)
    _mesh_args(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="spectral radius tolerance (default 1e-8)")

    p = add("eigens", "compute and store an eigenbasis",
            cmd_eigens, _validate_eigens)
    _mesh_args(p)
    p.add_argument("--num-eigs", type=int, help="number of eigenpairs")
    p.add_argument("--out", help="output basis file")

    p = add("bank", "design a bandpass filter bank", cmd_bank, _validate_bank)
    _mesh_args(p, required=False)
    p.add_argument("--lambda-max", type=float,
                   help="normalization constant (alternative to a mesh)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--design", choices=["uniform", "dyadic"])
    p.add_argument("--band-width", type=float, help="uniform band width")
    p.add_argument("--levels", type=int, help="dyadic level count")
    p.add_argument("--order", type=int, default=filters.DEFAULT_ORDER,
                   help="Chebyshev order K (default 5000)")
    p.add_argument("--no-mean", action="store_true",
                   help="omit the exact mean channel")
    p.add_argument("--out", help="output JSON file")

    p = add("simulate", "generate two-group patch-signal data",
            cmd_simulate, _validate_simulate)
    _mesh_args(p, default_synthetic="icosphere:3")
    p.add_argument("--group0", type=int, default=2000)
    p.add_argument("--group1", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--patch-center", type=int, default=0)
    p.add_argument("--patch-hops", type=int, default=2)
    p.add_argument("--signal-level", type=float, default=1.0)
    p.add_argument("--seed", type=int, help="RNG seed (required)")
    p.add_argument("--out", help="output signals file (.csv or binary)")

    p = add("augment", "generate augmented signals", cmd_augment,
            _validate_augment)
    _mesh_args(p)
    p.add_argument("--input", help="real signals file")
    p.add_argument("--method", choices=["lb-eigda", "c-pda"])
    p.add_argument("--seed", type=int, help="RNG seed (required)")
    p.add_argument("--counts",
                   help="per-class output counts, e.g. '0=400,1=200'")
    p.add_argument("--num-eigs", type=int,
                   help="lb-eigda: basis size (default: all modes)")
    p.add_argument("--bank", help="c-pda: bank JSON from the bank command")
    p.add_argument("--design", choices=["uniform", "dyadic"],
                   help="c-pda: design a bank in place of --bank")
    p.add_argument("--band-width", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--order", type=int, default=filters.DEFAULT_ORDER)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads over augmentation rounds")
    p.add_argument("--out", help="output signals file")
    p.add_argument("--report", help="report JSON path (default <out>.report.json)")

    p = add("stats", "compare augmented against real signals", cmd_stats,
            _validate_stats)
    p.add_argument("--real", help="real signals file")
    p.add_argument("--augmented", help="augmented signals file")
    p.add_argument("--out", help="output prefix for CSV/JSON files")

    p = add("bench", "time both methods on a mesh", cmd_bench, _validate_bench)
    _mesh_args(p)
    p.add_argument("--orders", default="500,1000,2000,4000",
                   help="comma-separated Chebyshev orders for c-pda")
    p.add_argument("--num-eigs-list", default="",
                   help="comma-separated basis sizes for lb-eigda")
    p.add_argument("--signals", type=int, default=8,
                   help="observations per timing run")
    p.add_argument("--bands", type=int, default=8,
                   help="uniform bands in the timing bank")
    p.add_argument("--trials", type=int, default=3,
                   help="repetitions; the median is reported")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="output CSV file")

    return parser


def _mesh_args(p, required=True, default_synthetic=None):
    p.add_argument("--mesh", help="mesh file (.off or .ply)")
    p.add_argument("--synthetic", default=default_synthetic,
                   help="synthetic mesh spec, e.g. icosphere:3")


def _require(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            raise UsageError(f"--{name} is required")


def _check_mesh_source(args, required=True):
    path = getattr(args, "mesh", None)
    synth = getattr(args, "synthetic", None)
    if path and synth:
        raise UsageError("pass either --mesh or --synthetic, not both")
    if path and not Path(path).exists():
        raise UsageError(f"mesh file not found: {path}")
    if required and not path and not synth:
        raise UsageError("a mesh is required: pass --mesh or --synthetic")


def _check_input_file(args, attr):
    path = getattr(args, attr, None)
    if path and not Path(path).exists():
        raise UsageError(f"{attr} file not found: {path}")


def _load_mesh(args):
    if getattr(args, "mesh", None):
        return mesh.load_mesh(args.mesh)
    return mesh.make_synthetic(args.synthetic)


def _normalized(m, tol):
    op = operator.assemble(m)
    operator.spectral_radius(op, tol=tol)
    return op, operator.normalize(op)


def _parse_counts(text):
    counts = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        if not value:
            raise UsageError(f"bad --counts entry {item!r}; use label=count")
        label = aug._parse_label(key.strip())
        counts[label] = int(value)
    return counts


def _parse_int_list(text, flag):
    if not text:
        return []
    try:
        values = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{flag} must be comma-separated integers")
    if any(v < 1 for v in values):
        raise UsageError(f"--{flag} entries must be >= 1")
    return values


# ---------------------------------------------------------------------------
# validation (usage errors -> exit 2)


def _validate_laplacian(args):
    _check_mesh_source(args)
    _require(args, "out")


def _validate_eigens(args):
    _check_mesh_source(args)
    _require(args, "num-eigs", "out")


def _validate_bank(args):
    _require(args, "design", "out")
    if args.lambda_max is None:
        _check_mesh_source(args)
    if args.design == "uniform" and args.band_width is None:
        raise UsageError("uniform design needs --band-width")
    if args.design == "dyadic" and args.levels is None:
        raise UsageError("dyadic design needs --levels")
    if args.order < 1:
        raise UsageError(f"--order must be >= 1, got {args.order}")


def _validate_simulate(args):
    _check_mesh_source(args)
    _require(args, "seed", "out")


def _validate_augment(args):
    _check_mesh_source(args)
    _require(args, "input", "method", "seed", "out")
    _check_input_file(args, "input")
    if args.method == "c-pda":
        if args.bank is None and args.design is None:
            raise UsageError("c-pda needs --bank or --design")
        _check_input_file(args, "bank")
        if args.order < 1:
            raise UsageError(f"--order must be >= 1, got {args.order}")


def _validate_stats(args):
    _require(args, "real", "augmented", "out")
    _check_input_file(args, "real")
    _check_input_file(args, "augmented")


def _validate_bench(args):
    _check_mesh_source(args)
    _require(args, "out")
    args.orders_list = _parse_int_list(args.orders, "orders")
    args.eigs_list = _parse_int_list(args.num_eigs_list, "num-eigs-list")
    if not args.orders_list and not args.eigs_list:
        raise UsageError("nothing to benchmark: give --orders or --num-eigs-list")


# ---------------------------------------------------------------------------
# commands


def cmd_laplacian(args) -> int:
    m = _load_mesh(args)
    op = operator.assemble(m)
    lam = operator.spectral_radius(op, tol=args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    operator.export_operator(op, out / "stiffness.txt", out / "areas.csv")
    summary = {
        "vertices": m.num_vertices,
        "triangles": m.num_triangles,
        "lambda_max": lam,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    print(f"V={m.num_vertices} T={m.num_triangles} lambda_max={lam!r}")
    return 0


def cmd_eigens(args) -> int:
    m = _load_mesh(args)
    op = operator.assemble(m)
    basis = spectrum.eigendecompose(op, args.num_eigs)
    spectrum.save_basis(basis, args.out)
    print(
        f"wrote {basis.num_modes} eigenpairs on {basis.num_vertices} "
        f"vertices to {args.out}"
    )
    return 0


def _design_bank(args, lambda_max):
    include_mean = not getattr(args, "no_mean", False)
    if args.design == "uniform":
        return filters.design_uniform(lambda_max, args.band_width,
                                      include_mean=include_mean,
                                      order=args.order)
    return filters.design_dyadic(lambda_max, args.levels,
                                 include_mean=include_mean, order=args.order)


def cmd_bank(args) -> int:
    if args.lambda_max is not None:
        lam = args.lambda_max
    else:
        m = _load_mesh(args)
        op = operator.assemble(m)
        lam = operator.spectral_radius(op, tol=args.tol)
    bank = _design_bank(args, lam)
    filters.save_bank(bank, args.out)
    print(f"wrote {bank.num_bands} bands (K={bank.order}) to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    m = _load_mesh(args)
    patch = simulate.select_patch(m, args.patch_center, args.patch_hops)
    cfg = simulate.SimulationConfig(
        group0=args.group0, group1=args.group1, sigma=args.sigma,
        patch=patch, signal_level=args.signal_level, seed=args.seed,
    )
    signals = simulate.generate(m, cfg)
    aug.save_signals(signals, args.out)
    print(
        f"wrote {signals.num_observations} signals "
        f"({args.group0}+{args.group1}) on {m.num_vertices} vertices, patch "
        f"size {patch.size}, to {args.out}"
    )
    return 0


def cmd_augment(args) -> int:
    stages = {}
    t0 = time.perf_counter()
    m = _load_mesh(args)
    real = aug.load_signals(args.input)
    if real.num_vertices != m.num_vertices:
        raise UsageError(
            f"signals have {real.num_vertices} vertices, mesh has "
            f"{m.num_vertices}"
        )
    stages["load"] = time.perf_counter() - t0

    counts = _parse_counts(args.counts) if args.counts else None
    report = {"method": args.method, "seed": args.seed}

    t0 = time.perf_counter()
    op = operator.assemble(m)
    lam = operator.spectral_radius(op, tol=args.tol)
    stages["operator"] = time.perf_counter() - t0

    kwargs = {}
    t0 = time.perf_counter()
    if args.method == "lb-eigda":
        num = args.num_eigs if args.num_eigs is not None else m.num_vertices
        kwargs["basis"] = spectrum.eigendecompose(op, num)
        report["num_eigs"] = num
        stages["eigendecompose"] = time.perf_counter() - t0
    else:
        kwargs["opn"] = operator.normalize(op)
        if args.bank:
            bank = filters.load_bank(args.bank)
        else:
            bank = _design_bank(args, lam)
        kwargs["bank"] = bank
        report["num_bands"] = bank.num_bands
        report["order"] = bank.order
        stages["bank"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = aug.augment_dataset(real, args.method, counts, args.seed,
                                 threads=args.threads, **kwargs)
    stages["augment"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    aug.save_signals(result, args.out)
    stages["write"] = time.perf_counter() - t0

    deviations = {}
    for label in result.classes():
        want = result.data[result.labels == label].mean(axis=0)
        have = real.data[real.labels == label].mean(axis=0)
        deviations[str(label)] = float(np.abs(want - have).max())
    report["max_mean_deviation"] = deviations
    report["counts"] = {
        str(label): int((result.labels == label).sum())
        for label in result.classes()
    }
    report["wall_clock_seconds"] = stages
    report_path = args.report or f"{args.out}.report.json"
    Path(report_path).write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    worst = max(deviations.values())
    print(
        f"wrote {result.num_observations} augmented signals to {args.out} "
        f"(max per-class mean deviation {worst:.3e})"
    )
    return 0


def cmd_stats(args) -> int:
    real = aug.load_signals(args.real)
    augmented = aug.load_signals(args.augmented)
    if real.num_vertices != augmented.num_vertices:
        raise UsageError(
            f"vertex counts differ: real {real.num_vertices}, augmented "
            f"{augmented.num_vertices}"
        )
    real_mean = real.data.mean(axis=0)
    aug_mean = augmented.data.mean(axis=0)
    order = np.argsort(-real_mean, kind="stable")

    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{prefix}_sorted_means.csv", "w") as fh:
        fh.write("vertex,real_mean,augmented_mean\n")
        for v in order:
            fh.write(f"{v},{float(real_mean[v])!r},{float(aug_mean[v])!r}\n")

    warned = False
    with open(f"{prefix}_correlations.csv", "w") as fh:
        fh.write("set,index,correlation\n")
        for name, signals in (("real", real), ("augmented", augmented)):
            for i, row in enumerate(signals.data):
                r = _pearson(row, real_mean)
                if r is None:
                    warned = True
                    fh.write(f"{name},{i},null\n")
                else:
                    fh.write(f"{name},{i},{r!r}\n")
    if warned:
        print(
            "warning: zero-variance signal(s); correlation reported as null",
            file=sys.stderr,
        )

    summary = {
        "max_mean_deviation": float(np.abs(real_mean - aug_mean).max()),
        "real_observations": real.num_observations,
        "augmented_observations": augmented.num_observations,
        "vertices": real.num_vertices,
    }
    Path(f"{prefix}_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    print(
        f"max per-vertex mean deviation {summary['max_mean_deviation']:.3e}; "
        f"outputs at {prefix}_*.csv/json"
    )
    return 0


def _pearson(x, y):
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.linalg.norm(xc) * np.linalg.norm(yc)
    if denom == 0.0:
        return None
    return float(xc @ yc / denom)


def cmd_bench(args) -> int:
    m = _load_mesh(args)
    op = operator.assemble(m)
    lam = operator.spectral_radius(op, tol=args.tol)
    opn = operator.normalize(op)
    rng = np.random.default_rng(args.seed)
    data = rng.normal(size=(args.signals, m.num_vertices))
    signals = aug.SignalSet(data=data, labels=np.zeros(args.signals, dtype=int))

    rows = []
    for order in args.orders_list:
        bank = filters.design_uniform(lam, lam / args.bands, order=order)
        plan = aug.make_plan(args.signals, bank.num_bands + 1, args.seed)
        times = []
        for _ in range(args.trials):
            t0 = time.perf_counter()
            aug.c_pda(opn, bank, signals, plan)
            times.append(time.perf_counter() - t0)
        rows.append(("c-pda", order, float(np.median(times))))
        print(f"c-pda    K={order:<6d} median {rows[-1][2]:.4f} s")

    for num in args.eigs_list:
        if num > m.num_vertices:
            raise UsageError(
                f"--num-eigs-list entry {num} exceeds V={m.num_vertices}"
            )
        times = []
        for _ in range(args.trials):
            t0 = time.perf_counter()
            basis = spectrum.eigendecompose(op, num)
            plan = aug.make_plan(args.signals, num, args.seed)
            aug.lb_eig_da(basis, signals, plan)
            times.append(time.perf_counter() - t0)
        rows.append(("lb-eigda", num, float(np.median(times))))
        print(f"lb-eigda J={num:<6d} median {rows[-1][2]:.4f} s")

    with open(args.out, "w") as fh:
        fh.write("method,parameter,median_seconds\n")
        for method, param, seconds in rows:
            fh.write(f"{method},{param},{seconds!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
