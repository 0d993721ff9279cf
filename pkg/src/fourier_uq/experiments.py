"""End-to-end experiment protocol: sample a pattern, calibrate noise,
sweep the regularization strength, decompose errors, and emit tables.

For each realization the driver draws a sampling pattern, builds the
scheme's operator, calibrates sigma so the expected measurement-space
signal-to-noise ratio hits the target, draws complex Gaussian noise,
then solves the LASSO for every lambda multiplier k (lambda = k *
lambda_base with lambda_base = (sigma/m)(2 + sqrt(12 log N))).  Every
solve is debiased and split into its Gaussian and remainder terms in
both the Haar and image domains, and per-pixel confidence discs are
scored against the ground truth.

Outputs: averaged and per-realization metric CSVs, a side-by-side
scheme comparison CSV, SVG figures, an interval table, and a metadata
echo.  Identical configs produce byte-identical CSVs.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .coherence import CoherenceProfile, local_coherence
from .debias import decompose, to_image_domain
from .operators import (
    MeasurementOperator,
    op_forward,
    preconditioned_operator,
    reweighted_operator,
    standard_operator,
    unweighted_forward,
)
from .phantom import ground_truth_pair, shepp_logan
from .sampling import (
    SCHEMES,
    SamplingPattern,
    sample_reweighted,
    sample_uniform,
    sample_with_replacement,
    sample_without_replacement,
)
from .solver import SolverDivergenceError, SolverOptions, kkt_residual, lasso_solve
from .transforms import haar2_adjoint, is_power_of_two
from .uq import RADII_MODES, confidence_radii, coverage, interval_export, write_interval_csv

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "RealizationRecord",
    "SweepResult",
    "METRIC_FIELDS",
    "CSV_COLUMNS",
    "pipeline_operator",
    "calibrate_sigma",
    "lambda_base",
    "run_sweep",
    "run_experiment",
    "emit_outputs",
    "regenerate_plots",
    "load_config",
    "config_from_mapping",
]

# Deterministic side stream for noise draws, separate from pattern seeds.
_NOISE_STREAM = 193

METRIC_FIELDS = (
    "linf_z_hat",
    "linf_x_hat",
    "l2_z_hat",
    "l2_x_hat",
    "linf_z_deb",
    "linf_x_deb",
    "l2_z_deb",
    "l2_x_deb",
    "linf_r_z",
    "linf_r_x",
    "l2_r",
    "linf_w_z",
    "linf_w_x",
    "l2_w",
    "ratio_r_w",
)

COVERAGE_FIELDS = ("coverage_overall", "coverage_support")

CSV_COLUMNS = ("lambda_multiplier",) + METRIC_FIELDS + COVERAGE_FIELDS

RAW_EXTRA_COLUMNS = (
    "realization",
    "pattern_seed",
    "sigma",
    "lambda0",
    "lam",
    "n_virtual",
    "solver_iterations",
    "solver_converged",
    "kkt",
    "identity_gap",
)

_DOMAIN_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class ExperimentConfig:
    rows: int = 64
    cols: int = 64
    subsampling_fraction: float = 0.6
    scheme: str = "reweighted"
    lambda_multipliers: tuple[int, ...] = (5, 10, 15, 20, 25)
    realizations: int = 25
    target_snr: float = 0.045
    alpha: float = 0.05
    seed: int = 1234
    solver: SolverOptions = field(default_factory=SolverOptions)
    radii_mode: str = "exact_variance"
    lambda0_normalization: str = "m"
    cache_dir: str | None = None

    def __post_init__(self):
        if not (is_power_of_two(self.rows) and is_power_of_two(self.cols)):
            raise ValueError("image dimensions must be powers of two")
        if not 0.0 < self.subsampling_fraction <= 1.0:
            raise ValueError("subsampling_fraction must lie in (0, 1]")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.lambda_multipliers:
            raise ValueError("need at least one lambda multiplier")
        object.__setattr__(
            self, "lambda_multipliers", tuple(int(k) for k in self.lambda_multipliers)
        )
        if any(k < 1 for k in self.lambda_multipliers):
            raise ValueError("lambda multipliers must be positive")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.target_snr <= 0:
            raise ValueError("target_snr must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.radii_mode not in RADII_MODES:
            raise ValueError(f"unknown radii mode {self.radii_mode!r}")
        if self.lambda0_normalization not in ("m", "n"):
            raise ValueError("lambda0_normalization must be 'm' or 'n'")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def num_samples(self) -> int:
        return max(1, round(self.subsampling_fraction * self.size))


@dataclass(frozen=True)
class ExperimentRecord:
    scheme: str
    lambda_multiplier: int
    linf_z_hat: float
    linf_x_hat: float
    l2_z_hat: float
    l2_x_hat: float
    linf_z_deb: float
    linf_x_deb: float
    l2_z_deb: float
    l2_x_deb: float
    linf_r_z: float
    linf_r_x: float
    l2_r: float
    linf_w_z: float
    linf_w_x: float
    l2_w: float
    ratio_r_w: float
    coverage_overall: float
    coverage_support: float


@dataclass(frozen=True)
class RealizationRecord:
    realization: int
    pattern_seed: int
    sigma: float
    lambda0: float
    lam: float
    n_virtual: int
    solver_iterations: int
    solver_converged: bool
    kkt: float
    identity_gap: float
    record: ExperimentRecord


@dataclass(frozen=True)
class SweepResult:
    scheme: str
    averaged: tuple[ExperimentRecord, ...]
    deviations: tuple[ExperimentRecord, ...]
    raw: tuple[RealizationRecord, ...]
    interval_records: tuple[dict, ...]
    failures: tuple[str, ...]


def pipeline_operator(
    pattern: SamplingPattern, shape, profile: CoherenceProfile | None
) -> MeasurementOperator:
    """Operator matching the sampling scheme's estimation pipeline.

    uniform and without_replacement use the unweighted entry-magnitude-one
    pipeline; with_replacement uses the preconditioned unitary pipeline;
    reweighted uses count-weighted preconditioned rows normalized by n.
    """
    scheme = pattern.scheme
    if scheme in ("uniform", "without_replacement"):
        return standard_operator(pattern, shape)
    if profile is None:
        raise ValueError(f"scheme {scheme} needs a coherence profile")
    if scheme == "with_replacement":
        return preconditioned_operator(pattern, shape, profile)
    return reweighted_operator(pattern, shape, profile)


def calibrate_sigma(op: MeasurementOperator, ground_truth, target_snr: float) -> float:
    """sigma with E ||weighted noise||_2 matching target_snr * ||weighted signal||_2.

    E ||diag(w) eps||_2^2 = sigma^2 * sum w_j^2, so sigma =
    target_snr * ||op_forward(truth)||_2 / ||row_weights||_2; with unit
    weights this is the familiar target_snr * ||signal||_2 / sqrt(m).
    """
    if target_snr <= 0:
        raise ValueError("target_snr must be positive")
    signal = float(np.linalg.norm(op_forward(op, ground_truth)))
    if signal == 0.0:
        raise ValueError("cannot calibrate noise against a zero signal")
    return target_snr * signal / float(np.linalg.norm(op.row_weights))


def lambda_base(sigma: float, count: int, size: int) -> float:
    """(sigma / count) * (2 + sqrt(12 log N)) with the natural logarithm."""
    if sigma <= 0 or count < 1 or size < 2:
        raise ValueError("need sigma > 0, count >= 1, N >= 2")
    return sigma / count * (2.0 + np.sqrt(12.0 * np.log(size)))


def _draw_pattern(config: ExperimentConfig, nu, seed: int) -> SamplingPattern:
    if config.scheme == "uniform":
        return sample_uniform(config.size, config.num_samples, seed)
    if config.scheme == "with_replacement":
        return sample_with_replacement(nu, config.num_samples, seed)
    if config.scheme == "without_replacement":
        return sample_without_replacement(nu, config.num_samples, seed)
    return sample_reweighted(nu, config.num_samples, seed)


def _check_domain_match(name: str, a: float, b: float) -> None:
    if abs(a - b) > _DOMAIN_MATCH_TOL * max(1.0, abs(a)):
        raise RuntimeError(f"{name} l2 norm differs across domains: {a!r} vs {b!r}")


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Execute every (realization, lambda) cell for one sampling scheme."""
    shape = config.shape
    image = shepp_logan(*shape)
    x0, z0 = ground_truth_pair(image)
    profile = None
    if config.scheme != "uniform":
        profile = local_coherence(shape, cache_dir=config.cache_dir)

    multipliers = tuple(sorted(config.lambda_multipliers))
    interval_multiplier = multipliers[len(multipliers) // 2]
    raw: list[RealizationRecord] = []
    failures: list[str] = []
    interval_records: tuple[dict, ...] = ()

    for r in range(config.realizations):
        pattern_seed = config.seed + r
        pattern = _draw_pattern(config, profile.nu if profile is not None else None, pattern_seed)
        op = pipeline_operator(pattern, shape, profile)
        sigma = calibrate_sigma(op, z0, config.target_snr)
        noise_rng = np.random.default_rng([config.seed, r, _NOISE_STREAM])
        eps = sigma * (
            noise_rng.standard_normal(op.m) + 1j * noise_rng.standard_normal(op.m)
        ) / np.sqrt(2.0)
        y_raw = unweighted_forward(op, z0) + eps
        y_weighted = op.row_weights * y_raw
        count = op.m if config.lambda0_normalization == "m" else pattern.n
        lam0 = lambda_base(sigma, count, config.size)
        radii_image = confidence_radii(
            op.with_domain("image"), sigma, config.alpha, config.radii_mode
        )
        solver_opts = config.solver
        if solver_opts.lipschitz is None:
            from .solver import estimate_lipschitz

            solver_opts = dataclasses.replace(solver_opts, lipschitz=estimate_lipschitz(op))

        for k in multipliers:
            lam = k * lam0
            try:
                result = lasso_solve(op, y_weighted, lam, solver_opts)
            except SolverDivergenceError as err:
                failures.append(
                    f"scheme={config.scheme} realization={r} multiplier={k}: {err}"
                )
                continue
            z_hat = result.solution
            dec = decompose(op, z_hat, z0, eps)
            dec_x = to_image_domain(dec)
            x_hat = haar2_adjoint(z_hat.reshape(shape)).ravel()

            dz = z_hat - z0
            dx = x_hat - x0
            dz_u = dec.debiased - z0
            dx_u = dec_x.debiased - x0
            l2_r = float(np.linalg.norm(dec.r_term))
            l2_w = float(np.linalg.norm(dec.w_term))
            _check_domain_match("estimate", float(np.linalg.norm(dz)), float(np.linalg.norm(dx)))
            _check_domain_match("debiased", float(np.linalg.norm(dz_u)), float(np.linalg.norm(dx_u)))
            _check_domain_match("remainder", l2_r, float(np.linalg.norm(dec_x.r_term)))
            _check_domain_match("gaussian term", l2_w, float(np.linalg.norm(dec_x.w_term)))

            cov_overall, cov_support = coverage(x0, dec_x.debiased, radii_image)
            record = ExperimentRecord(
                scheme=config.scheme,
                lambda_multiplier=k,
                linf_z_hat=float(np.max(np.abs(dz))),
                linf_x_hat=float(np.max(np.abs(dx))),
                l2_z_hat=float(np.linalg.norm(dz)),
                l2_x_hat=float(np.linalg.norm(dx)),
                linf_z_deb=float(np.max(np.abs(dz_u))),
                linf_x_deb=float(np.max(np.abs(dx_u))),
                l2_z_deb=float(np.linalg.norm(dz_u)),
                l2_x_deb=float(np.linalg.norm(dx_u)),
                linf_r_z=float(np.max(np.abs(dec.r_term))),
                linf_r_x=float(np.max(np.abs(dec_x.r_term))),
                l2_r=l2_r,
                linf_w_z=float(np.max(np.abs(dec.w_term))),
                linf_w_x=float(np.max(np.abs(dec_x.w_term))),
                l2_w=l2_w,
                ratio_r_w=l2_r / l2_w if l2_w > 0 else float("inf"),
                coverage_overall=cov_overall,
                coverage_support=cov_support,
            )
            identity_gap = float(
                np.max(np.abs((dec.debiased - z0) - (dec.w_term + dec.r_term)))
            )
            raw.append(
                RealizationRecord(
                    realization=r,
                    pattern_seed=pattern_seed,
                    sigma=sigma,
                    lambda0=lam0,
                    lam=lam,
                    n_virtual=pattern.n,
                    solver_iterations=result.iterations_used,
                    solver_converged=result.converged,
                    kkt=kkt_residual(op, y_weighted, lam, z_hat),
                    identity_gap=identity_gap,
                    record=record,
                )
            )
            if r == config.realizations - 1 and k == interval_multiplier:
                interval_records = tuple(
                    interval_export(dec_x.debiased, radii_image, shape[0] // 2, shape, truth=x0)
                )

    averaged = []
    deviations = []
    for k in multipliers:
        cell = [rr.record for rr in raw if rr.record.lambda_multiplier == k]
        if not cell:
            continue
        averaged.append(_reduce_records(config.scheme, k, cell, np.mean))
        deviations.append(_reduce_records(config.scheme, k, cell, np.std))
    return SweepResult(
        scheme=config.scheme,
        averaged=tuple(averaged),
        deviations=tuple(deviations),
        raw=tuple(raw),
        interval_records=interval_records,
        failures=tuple(failures),
    )


def _reduce_records(scheme, k, cell, reducer) -> ExperimentRecord:
    values = {
        name: float(reducer([getattr(rec, name) for rec in cell]))
        for name in METRIC_FIELDS + COVERAGE_FIELDS
    }
    return ExperimentRecord(scheme=scheme, lambda_multiplier=k, **values)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _record_row(rec: ExperimentRecord):
    return [rec.lambda_multiplier] + [
        getattr(rec, name) for name in METRIC_FIELDS + COVERAGE_FIELDS
    ]


def emit_outputs(results: dict[str, SweepResult], config: ExperimentConfig, out_dir: str) -> dict:
    """Write CSV tables, SVG figures, and a metadata echo; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for scheme in sorted(results):
        res = results[scheme]
        metrics_path = os.path.join(out_dir, f"metrics_{scheme}.csv")
        _write_csv(metrics_path, CSV_COLUMNS, [_record_row(r) for r in res.averaged])
        paths[f"metrics_{scheme}"] = metrics_path
        std_path = os.path.join(out_dir, f"metrics_{scheme}_std.csv")
        _write_csv(std_path, CSV_COLUMNS, [_record_row(r) for r in res.deviations])
        paths[f"metrics_{scheme}_std"] = std_path
        raw_path = os.path.join(out_dir, f"raw_{scheme}.csv")
        raw_header = RAW_EXTRA_COLUMNS + CSV_COLUMNS
        raw_rows = [
            [getattr(rr, name) for name in RAW_EXTRA_COLUMNS] + _record_row(rr.record)
            for rr in res.raw
        ]
        _write_csv(raw_path, raw_header, raw_rows)
        paths[f"raw_{scheme}"] = raw_path
        if res.interval_records:
            ipath = os.path.join(out_dir, f"intervals_{scheme}.csv")
            write_interval_csv(list(res.interval_records), ipath)
            paths[f"intervals_{scheme}"] = ipath

    comparison_path = os.path.join(out_dir, "comparison.csv")
    _write_comparison(comparison_path, results)
    paths["comparison"] = comparison_path

    series = {
        scheme: [dataclasses.asdict(rec) for rec in res.averaged]
        for scheme, res in results.items()
    }
    errors_path = os.path.join(out_dir, "errors_vs_lambda.svg")
    _plot_errors(series, errors_path)
    paths["errors_plot"] = errors_path

    interval_scheme = _interval_scheme(results)
    if interval_scheme is not None:
        intervals_path = os.path.join(out_dir, "intervals.svg")
        _plot_intervals(
            [dict(rec) for rec in results[interval_scheme].interval_records],
            interval_scheme,
            intervals_path,
        )
        paths["intervals_plot"] = intervals_path

    meta_path = os.path.join(out_dir, "metadata.txt")
    _write_metadata(meta_path, config, results)
    paths["metadata"] = meta_path
    return paths


def _interval_scheme(results: dict[str, SweepResult]):
    candidates = [s for s, res in results.items() if res.interval_records]
    if not candidates:
        return None
    return "reweighted" if "reweighted" in candidates else sorted(candidates)[0]


def _write_comparison(path: str, results: dict[str, SweepResult]) -> None:
    schemes = sorted(results)
    multipliers = sorted(
        {rec.lambda_multiplier for res in results.values() for rec in res.averaged}
    )
    header = ["lambda_multiplier"]
    for scheme in schemes:
        header.extend(f"{scheme}_{name}" for name in METRIC_FIELDS + COVERAGE_FIELDS)
    rows = []
    for k in multipliers:
        row = [k]
        for scheme in schemes:
            match = [r for r in results[scheme].averaged if r.lambda_multiplier == k]
            if match:
                row.extend(getattr(match[0], name) for name in METRIC_FIELDS + COVERAGE_FIELDS)
            else:
                row.extend(float("nan") for _ in METRIC_FIELDS + COVERAGE_FIELDS)
        rows.append(row)
    _write_csv(path, header, rows)


_PLOT_SERIES = (
    ("l2_x_hat", "estimate l2 error"),
    ("l2_x_deb", "debiased l2 error"),
    ("l2_r", "remainder l2 norm"),
)


def _plot_errors(series: dict[str, list[dict]], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for scheme in sorted(series):
        rows = sorted(series[scheme], key=lambda rec: rec["lambda_multiplier"])
        ks = [rec["lambda_multiplier"] for rec in rows]
        for name, label in _PLOT_SERIES:
            ax.plot(ks, [rec[name] for rec in rows], marker="o", label=f"{scheme}: {label}")
    ax.set_xlabel("lambda multiplier k")
    ax.set_ylabel("error norm")
    ax.set_title("Estimation error versus regularization strength")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_intervals(records: list[dict], scheme: str, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    xs = list(range(len(records)))
    centers = [rec["center_re"] for rec in records]
    radii = [rec["radius"] for rec in records]
    ax.errorbar(xs, centers, yerr=radii, fmt=".", capsize=2, label="debiased with disc radius")
    truths = [rec["truth_re"] for rec in records]
    if not any(np.isnan(truths)):
        ax.plot(xs, truths, "r-", linewidth=1.0, label="ground truth")
    ax.set_xlabel("pixel along the marked row")
    ax.set_ylabel("real part")
    ax.set_title(f"Per-pixel confidence intervals ({scheme})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _write_metadata(path: str, config: ExperimentConfig, results: dict[str, SweepResult]) -> None:
    lines = [
        f"package_version={__version__}",
        f"numpy_version={np.__version__}",
        "rng=numpy default_rng (PCG64); pattern seed = seed + realization; "
        f"noise stream = default_rng([seed, realization, {_NOISE_STREAM}])",
    ]
    for name, value in dataclasses.asdict(config).items():
        lines.append(f"config.{name}={value}")
    for scheme in sorted(results):
        res = results[scheme]
        lines.append(f"{scheme}.records={len(res.raw)}")
        lines.append(f"{scheme}.failures={len(res.failures)}")
        lines.extend(f"{scheme}.failure={msg}" for msg in res.failures)
        if res.raw:
            lines.append(f"{scheme}.sigma_first={res.raw[0].sigma!r}")
            lines.append(f"{scheme}.lambda0_first={res.raw[0].lambda0!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_experiment(config: ExperimentConfig, out_dir: str, schemes=None) -> dict[str, SweepResult]:
    """Run one or more schemes off a shared config and emit all outputs."""
    if schemes is None:
        schemes = (config.scheme,)
    results = {}
    for scheme in schemes:
        cfg = dataclasses.replace(config, scheme=scheme)
        results[scheme] = run_sweep(cfg)
    emit_outputs(results, config, out_dir)
    return results


def _read_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        rows.append({k: float(v) for k, v in zip(header, ln.split(","))})
    return rows


def regenerate_plots(out_dir: str) -> list[str]:
    """Rebuild the SVG figures from the CSV tables in out_dir."""
    written = []
    series = {}
    for name in sorted(os.listdir(out_dir)):
        if name.startswith("metrics_") and name.endswith(".csv") and not name.endswith("_std.csv"):
            scheme = name[len("metrics_") : -len(".csv")]
            series[scheme] = _read_csv(os.path.join(out_dir, name))
    if series:
        path = os.path.join(out_dir, "errors_vs_lambda.svg")
        _plot_errors(series, path)
        written.append(path)
    for name in sorted(os.listdir(out_dir)):
        if name.startswith("intervals_") and name.endswith(".csv"):
            scheme = name[len("intervals_") : -len(".csv")]
            records = _read_csv(os.path.join(out_dir, name))
            path = os.path.join(out_dir, "intervals.svg")
            _plot_intervals(records, scheme, path)
            written.append(path)
            break
    return written


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build a config from a flat mapping, e.g. a parsed TOML document."""
    data = dict(mapping)
    solver_table = data.pop("solver", {})
    if not isinstance(solver_table, dict):
        raise ValueError("solver section must be a table")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"solver"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    solver_known = {f.name for f in dataclasses.fields(SolverOptions)}
    solver_unknown = set(solver_table) - solver_known
    if solver_unknown:
        raise ValueError(f"unknown solver keys: {sorted(solver_unknown)}")
    if "lambda_multipliers" in data:
        data["lambda_multipliers"] = tuple(int(k) for k in data["lambda_multipliers"])
    return ExperimentConfig(solver=SolverOptions(**solver_table), **data)


def load_config(path: str) -> ExperimentConfig:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return config_from_mapping(tomllib.load(fh))
