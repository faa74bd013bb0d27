import functools
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
from loguru import logger

from physics import __version__
from physics.errors import ConfigError, TwinBeamError
from physics.moments import report_columns
from scripts.pipelines.squeeze_pipeline import (
    TwinBeamPipeline,
    calibrate_to_noise_figure,
    current_peak_chi,
)
from scripts.sweeps.noise_map import noise_figure_map
from scripts.sweeps.parameter_sweep import SWEEP_COLUMNS, SweepSpec, run_sweep
from scripts.validation.oracle_suite import CHECK_COLUMNS, OracleSuite
from utils import units
from utils.config import SimulationConfig, load_config
from utils.log import setup_logging
from utils.summarize import print_key_values, print_table
from utils.writers import RunManifest, write_json, write_table

EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class RunContext:
    config: SimulationConfig
    output_dir: Path
    fmt: str
    threads: Optional[int]
    db: bool

    def columns(self, columns: Sequence[str]) -> List[str]:
        """dB columns only with --db."""
        return [c for c in columns if self.db or not c.endswith("_db")]

    def manifest(self, command: str) -> RunManifest:
        return RunManifest(
            command=command,
            config_snapshot=self.config.to_dict(),
            config_hash=self.config.config_hash(),
            version=__version__,
            solver_method=self.config.solver.method,
        )

    def write(self, manifest: RunManifest, name: str, rows: Sequence[Dict[str, Any]], columns: Sequence[str]):
        path = write_table(
            self.output_dir / name, rows, self.columns(columns), manifest.config_hash, self.fmt
        )
        manifest.add_output(path)
        return path


def handle_errors(fn):
    """ConfigError -> exit 2, any other TwinBeamError -> exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as e:
            logger.error(f"Configuration error: {e}")
            sys.exit(EXIT_CONFIG_ERROR)
        except TwinBeamError as e:
            logger.error(f"{type(e).__name__}: {e}")
            sys.exit(EXIT_FAILURE)

    return wrapper


def record_calibration(manifest: RunManifest, pipeline: TwinBeamPipeline) -> None:
    target = pipeline.config.dipole.calibrate_peak_chi
    if target is not None:
        manifest.calibration.update(
            {"target_peak_chi": target, "amplitude_scale": pipeline.model.calibration_scale}
        )


# ============================================================================
# CLI with Click
# ============================================================================


@click.group()
@click.option("--config", "-c", "config_path", default=None, help="YAML config (built-in defaults if omitted)")
@click.option("--output", "-o", "output_dir", default="outputs", help="Output directory (default: outputs)")
@click.option(
    "--format", "-f", "fmt", type=click.Choice(["csv", "json"]), default="csv", help="Result file format"
)
@click.option("--threads", "-t", type=int, default=None, help="Worker threads (default: machine parallelism)")
@click.option(
    "--calibrate-peak-chi",
    type=float,
    default=None,
    help="Rescale dipoles so that the peak |chi_c| equals this value",
)
@click.option("--db", is_flag=True, help="Add 10*log10 noise-figure columns")
@click.pass_context
def cli(ctx, config_path, output_dir, fmt, threads, calibrate_peak_chi, db):
    """Relative-intensity squeezing of high-harmonic twin beams."""
    try:
        config = load_config(config_path)
        if calibrate_peak_chi is not None:
            config = config.with_section("dipole", calibrate_peak_chi=calibrate_peak_chi)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        sys.exit(EXIT_CONFIG_ERROR)

    setup_logging(config.logging.level, config.logging.save_logs, config.logging.log_file)
    ctx.obj = RunContext(
        config=config,
        output_dir=Path(output_dir),
        fmt=fmt,
        threads=threads if threads is not None else config.processing.max_workers,
        db=db,
    )


@cli.command()
@click.option("--q", "q", type=int, default=None, help="Probe harmonic order (default: config)")
@click.option("--n", "n", type=int, required=True, help="Pump photon number n of the conjugate channel")
@click.option("--target-snf-db", type=float, default=None, help="Calibrate dipoles to reach this noise figure")
@click.pass_obj
@handle_errors
def pair(run: RunContext, q, n, target_snf_db):
    """Full pipeline for one (probe, conjugate) pair."""
    target_snf_db = target_snf_db if target_snf_db is not None else run.config.dipole.target_snf_db
    pipeline = TwinBeamPipeline(run.config)
    q = q if q is not None else pipeline.cfg.probe_order_q
    manifest = run.manifest("pair")
    record_calibration(manifest, pipeline)

    if target_snf_db is not None:
        calibration = calibrate_to_noise_figure(pipeline, q, n, target_snf_db)
        pipeline = pipeline.with_model(calibration.model)
        manifest.calibration.update(
            {
                "target_snf_db": target_snf_db,
                "peak_chi": calibration.peak_chi,
                "amplitude_scale": calibration.model.calibration_scale,
            }
        )

    report = pipeline.pair(q, n)
    row = report.as_row()
    run.write(manifest, f"pair_q{q}_n{n}", [row], report_columns())
    summary_columns = ["n", "snf_log10", "snf_db", "two_mode_snf_log10", "var", "var_snl"]
    print_table(f"pair q={q} n={n}", [row], run.columns(summary_columns))
    if manifest.calibration:
        manifest.calibration["peak_chi_at_pair"] = current_peak_chi(pipeline, q, n)
    manifest.save(run.output_dir)
    logger.success(f"Pair (q={q}, n={n}): S_NF = {report.snf_log10:.6g} ({report.snf_db:.4f} dB)")


@cli.command(name="map")
@click.option("--probe-orders", default=None, help="Comma-separated probe orders (default: config)")
@click.pass_obj
@handle_errors
def noise_map(run: RunContext, probe_orders):
    """Noise figure over (probe order, conjugate order)."""
    orders = [int(v) for v in probe_orders.split(",")] if probe_orders else run.config.map.probe_orders
    pipeline = TwinBeamPipeline(run.config)
    manifest = run.manifest("map")
    record_calibration(manifest, pipeline)

    result = noise_figure_map(pipeline, orders, run.config.map.channel_orders, max_workers=run.threads)
    columns = result.columns()
    path = write_table(run.output_dir / "noise_map", result.rows(), columns, manifest.config_hash, run.fmt)
    manifest.add_output(path)
    if run.db:
        path = write_table(
            run.output_dir / "noise_map_db", result.rows(db=True), columns, manifest.config_hash, run.fmt
        )
        manifest.add_output(path)
    run.write(manifest, "noise_map_long", result.long_rows(), ["q", "m", "n", "snf_log10", "snf_db"])

    print_table("noise figure map (log10)", result.rows(), columns)
    manifest.save(run.output_dir)
    logger.success(f"Noise-figure map over {len(orders)} probe orders written to {run.output_dir}")


@cli.command()
@click.option(
    "--variable",
    type=click.Choice(["pump_intensity", "cell_length", "probe_order", "gas_pressure"]),
    default=None,
    help="Swept parameter (default: config)",
)
@click.option("--start", type=float, default=None)
@click.option("--stop", type=float, default=None)
@click.option("--count", type=int, default=None)
@click.option("--spacing", type=click.Choice(["linear", "log"]), default=None)
@click.option("--channel-n", type=int, default=None, help="Conjugate channel n reported at every point")
@click.option("--q", "probe_order_q", type=int, default=None, help="Probe harmonic order (default: config)")
@click.pass_obj
@handle_errors
def sweep(run: RunContext, variable, start, stop, count, spacing, channel_n, probe_order_q):
    """One-dimensional sweep of the noise figure."""
    overrides = {
        k: v
        for k, v in dict(
            variable=variable,
            start=start,
            stop=stop,
            count=count,
            spacing=spacing,
            channel_n=channel_n,
            probe_order_q=probe_order_q,
        ).items()
        if v is not None
    }
    config = run.config.with_section("sweep", **overrides) if overrides else run.config
    section = config.sweep
    try:
        spec = SweepSpec(
            variable=section.variable,
            start=section.start,
            stop=section.stop,
            count=section.count,
            spacing=section.spacing,
            channel_n=section.channel_n,
            probe_order_q=section.probe_order_q,
        )
    except ValueError as e:
        raise ConfigError(f"sweep section: {e}") from e

    run.config = config
    pipeline = TwinBeamPipeline(config)
    manifest = run.manifest("sweep")
    record_calibration(manifest, pipeline)

    rows = run_sweep(pipeline, spec, max_workers=run.threads)
    run.write(manifest, f"sweep_{spec.variable.value}", rows, SWEEP_COLUMNS)
    print_table(f"sweep over {spec.variable.value}", rows, run.columns(SWEEP_COLUMNS))
    manifest.save(run.output_dir)
    logger.success(f"Sweep of {len(rows)} points written to {run.output_dir}")


@cli.command()
@click.option("--n", "n", type=int, default=None, help="Conjugate channel n (default: config)")
@click.pass_obj
@handle_errors
def wigner(run: RunContext, n):
    """2-D Wigner slice over (x_pr, x_cn) of the output state."""
    n = n if n is not None else run.config.wigner.channel_n
    pipeline = TwinBeamPipeline(run.config)
    manifest = run.manifest("wigner")
    record_calibration(manifest, pipeline)

    grid, diagnostics = pipeline.wigner(n)
    if run.fmt == "json":
        payload = {
            "mode_pair": list(grid.mode_pair),
            "x_axis": grid.x_axis,
            "y_axis": grid.y_axis,
            "values": grid.values,
            "normalization": grid.normalization,
            "metadata": grid.metadata,
            "diagnostics": diagnostics,
        }
        manifest.add_output(write_json(run.output_dir / f"wigner_n{n}.json", payload, manifest.config_hash))
    else:
        rows = [
            {"x": x, "y": y, "W": grid.values[a, b]}
            for a, x in enumerate(grid.x_axis)
            for b, y in enumerate(grid.y_axis)
        ]
        run.write(manifest, f"wigner_n{n}", rows, ["x", "y", "W"])
        diag_rows = [{"quantity": k, "value": v} for k, v in diagnostics.items()]
        run.write(manifest, f"wigner_n{n}_diagnostics", diag_rows, ["quantity", "value"])

    print_key_values(f"wigner slice n={n}", diagnostics)
    manifest.save(run.output_dir)
    logger.success(f"Wigner slice for n={n} written to {run.output_dir}")


@cli.command(name="dump-chi")
@click.option("--q", "q", type=int, default=None, help="Probe harmonic order (default: config)")
@click.pass_obj
@handle_errors
def dump_chi(run: RunContext, q):
    """Per-channel dipoles, susceptibilities and couplings."""
    pipeline = TwinBeamPipeline(run.config)
    manifest = run.manifest("dump-chi")
    record_calibration(manifest, pipeline)
    rows = pipeline.chi_rows(pipeline.grid(q))
    run.write(manifest, "chi", rows, list(rows[0]))
    print_table("susceptibilities", rows, ["n", "chi_c_re", "chi_c_im", "kappa_c_re", "kappa_c_im"])
    manifest.save(run.output_dir)


@cli.command(name="dump-transfer")
@click.option("--q", "q", type=int, default=None, help="Probe harmonic order (default: config)")
@click.option("--z-mm", type=float, default=None, help="Propagation length in mm (default: cell length)")
@click.pass_obj
@handle_errors
def dump_transfer(run: RunContext, q, z_mm):
    """Entries of the transfer matrix T(z)."""
    pipeline = TwinBeamPipeline(run.config)
    manifest = run.manifest("dump-transfer")
    record_calibration(manifest, pipeline)
    grid = pipeline.grid(q)
    rows = pipeline.transfer_rows(grid, units.mm_to_m(z_mm) if z_mm is not None else None)
    run.write(manifest, "transfer", rows, ["row", "col", "re", "im"])
    manifest.save(run.output_dir)
    logger.success(f"T(z) for {grid.n_modes} modes ({pipeline.method.value}) written to {run.output_dir}")


@cli.command()
@click.option("--tolerance-scale", type=float, default=1.0, help="Multiply every tolerance (below 1 tightens)")
@click.option("--inject-fault", is_flag=True, help="Perturb one transfer-matrix entry by 1e-3")
@click.option("--seed", type=int, default=20240101)
@click.option("--solver-cases", type=int, default=200, help="Random coupling sets for solver agreement")
@click.option("--wick-cases", type=int, default=100, help="Random operator combos for Wick vs Fock")
@click.pass_obj
@handle_errors
def validate(run: RunContext, tolerance_scale, inject_fault, seed, solver_cases, wick_cases):
    """Run the oracle suite; exit 0 iff every check passes."""
    suite = OracleSuite(
        run.config,
        tolerance_scale=tolerance_scale,
        inject_fault=inject_fault,
        seed=seed,
        solver_cases=solver_cases,
        wick_cases=wick_cases,
    )
    results = suite.run()
    manifest = run.manifest("validate")
    run.write(manifest, "validation", suite.rows(), CHECK_COLUMNS)
    print_table("oracle suite", suite.rows(), CHECK_COLUMNS)
    manifest.save(run.output_dir)
    OracleSuite.summary(results)

    if not suite.all_passed:
        logger.error(f"Failed checks: {', '.join(suite.failed())}")
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    cli()
