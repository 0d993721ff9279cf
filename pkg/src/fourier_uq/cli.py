"""Command-line entry points.

Subcommands:
  coherence  compute (and optionally cache) the local-coherence profile
  phantom    rasterize the test image and dump graymap/binary files
  run        execute the full experiment sweep and emit tables/figures
  plot       regenerate SVG figures from existing CSV tables
  verify     run the fast self-checks (gram identity, disc calibration)
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .coherence import local_coherence
from .experiments import (
    ExperimentConfig,
    load_config,
    regenerate_plots,
    run_experiment,
)
from .operators import multiset_gram_identity_check
from .phantom import (
    format_ellipse_table,
    load_ellipses,
    rasterize,
    save_complex,
    save_pgm,
    shepp_logan,
)
from .sampling import SCHEMES, sample_reweighted
from .uq import RADII_MODES, confidence_radii, coverage

__all__ = ["main"]


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().replace("x", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"size must look like 64x64, got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_lambdas(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from err


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourier-uq",
        description="Debiased-LASSO uncertainty quantification for subsampled Fourier imaging",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_coh = sub.add_parser("coherence", help="compute the local-coherence profile")
    p_coh.add_argument("--size", type=_parse_size, default=(64, 64), metavar="RxC")
    p_coh.add_argument("--cache", default=None, help="directory for the profile cache")

    p_ph = sub.add_parser("phantom", help="emit the test image")
    p_ph.add_argument("--size", type=_parse_size, default=(64, 64), metavar="RxC")
    p_ph.add_argument("--out", default=None, help="output prefix for .pgm/.npy dumps")
    p_ph.add_argument("--ellipses", default=None, help="custom ellipse table file")
    p_ph.add_argument("--print-table", action="store_true", help="print the ellipse table")

    p_run = sub.add_parser("run", help="run the experiment sweep")
    p_run.add_argument("--config", default=None, help="TOML config file")
    p_run.add_argument("--scheme", choices=SCHEMES + ("both",), default=None)
    p_run.add_argument("--size", type=_parse_size, default=None, metavar="RxC")
    p_run.add_argument("--fraction", type=float, default=None)
    p_run.add_argument("--lambdas", type=_parse_lambdas, default=None)
    p_run.add_argument("--realizations", type=int, default=None)
    p_run.add_argument("--snr", type=float, default=None)
    p_run.add_argument("--alpha", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--radii-mode", choices=RADII_MODES, default=None)
    p_run.add_argument("--cache", default=None, help="coherence cache directory")
    p_run.add_argument("--out", required=True, help="output directory")

    p_plot = sub.add_parser("plot", help="regenerate SVGs from CSV tables")
    p_plot.add_argument("--out", required=True, help="directory holding the CSV tables")

    p_ver = sub.add_parser("verify", help="run the fast self-checks")
    p_ver.add_argument("--seeds", type=int, default=100, help="number of gram-identity seeds")

    return parser


def _cmd_coherence(args) -> int:
    rows, cols = args.size
    profile = local_coherence((rows, cols), cache_dir=args.cache)
    print(f"size={rows}x{cols} N={profile.size}")
    print(f"kappa_norm={profile.kappa_norm:.12g}")
    print(
        f"kappa_min={float(profile.kappa.min()):.12g} "
        f"kappa_max={float(profile.kappa.max()):.12g}"
    )
    if args.cache:
        print(f"cached under {args.cache}")
    return 0


def _cmd_phantom(args) -> int:
    if args.print_table:
        sys.stdout.write(format_ellipse_table())
        return 0
    rows, cols = args.size
    if args.ellipses:
        img = rasterize(load_ellipses(args.ellipses), rows, cols)
    else:
        img = shepp_logan(rows, cols)
    nonzero = float(np.mean(np.abs(img) > 0))
    print(f"size={rows}x{cols} nonzero_fraction={nonzero:.4f}")
    if args.out:
        save_pgm(img, args.out + ".pgm")
        save_complex(img, args.out + ".npy")
        print(f"wrote {args.out}.pgm and {args.out}.npy")
    return 0


def _cmd_run(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig()
    updates = {}
    if args.size is not None:
        updates["rows"], updates["cols"] = args.size
    if args.fraction is not None:
        updates["subsampling_fraction"] = args.fraction
    if args.lambdas is not None:
        updates["lambda_multipliers"] = args.lambdas
    if args.realizations is not None:
        updates["realizations"] = args.realizations
    if args.snr is not None:
        updates["target_snr"] = args.snr
    if args.alpha is not None:
        updates["alpha"] = args.alpha
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.radii_mode is not None:
        updates["radii_mode"] = args.radii_mode
    if args.cache is not None:
        updates["cache_dir"] = args.cache
    if args.scheme is not None and args.scheme != "both":
        updates["scheme"] = args.scheme
    if updates:
        config = dataclasses.replace(config, **updates)
    schemes = ("without_replacement", "reweighted") if args.scheme == "both" else (config.scheme,)
    results = run_experiment(config, args.out, schemes=schemes)
    for scheme in sorted(results):
        res = results[scheme]
        print(f"[{scheme}] {len(res.raw)} records, {len(res.failures)} failures")
        for rec in res.averaged:
            print(
                f"[{scheme}] k={rec.lambda_multiplier}: "
                f"l2_x_hat={rec.l2_x_hat:.4f} l2_x_deb={rec.l2_x_deb:.4f} "
                f"l2_r={rec.l2_r:.4f} l2_w={rec.l2_w:.4f} "
                f"coverage={rec.coverage_overall:.4f}"
            )
    print(f"outputs written to {args.out}")
    return 0


def _cmd_plot(args) -> int:
    written = regenerate_plots(args.out)
    if not written:
        print(f"no CSV tables found in {args.out}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    ok = True

    profile = local_coherence((64,))
    worst = 0.0
    for seed in range(args.seeds):
        pattern = sample_reweighted(profile.nu, 20, seed)
        worst = max(worst, multiset_gram_identity_check(pattern, profile))
    passed = worst <= 1e-10
    ok &= passed
    print(f"{'PASS' if passed else 'FAIL'} gram identity: max deviation {worst:.3e} over {args.seeds} seeds")

    # disc calibration against pure complex Gaussian noise at N = 16
    from .operators import MeasurementOperator
    from .sampling import sample_uniform

    n = 16
    pattern = sample_uniform(n, n, 0)
    op = MeasurementOperator(
        pattern=pattern,
        shape=(n,),
        row_weights=np.ones(n),
        domain="haar",
        normalization=n,
        fourier_scale="unitary",
    )
    alpha = 0.05
    sigma = 1.0
    radii = confidence_radii(op, sigma, alpha)
    rng = np.random.default_rng(7)
    draws = 10_000
    misses = 0
    from .operators import op_adjoint

    for _ in range(draws):
        eps = sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        w = op_adjoint(op, op.row_weights * eps) / op.normalization
        overall, _ = coverage(np.zeros(n), w, radii)
        misses += round((1.0 - overall) * n)
    rate = misses / (draws * n)
    se = np.sqrt(alpha * (1 - alpha) / (draws * n))
    passed = abs(rate - alpha) <= 3 * se
    ok &= passed
    print(
        f"{'PASS' if passed else 'FAIL'} disc calibration: non-coverage {rate:.4f} "
        f"target {alpha} (3 SE = {3 * se:.4f})"
    )
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "coherence": _cmd_coherence,
        "phantom": _cmd_phantom,
        "run": _cmd_run,
        "plot": _cmd_plot,
        "verify": _cmd_verify,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
