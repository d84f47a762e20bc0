"""Command Line Interface for the pre-log verification toolkit."""

import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import typer
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .analysis.bounds import chi_low, prelog_report
from .analysis.index_sets import build_selection, lemma5_sets, pilot_fill_order, validate_selection
from .analysis.jacobian import (
    bezout_exponent,
    build_layout,
    constant_fading_Z,
    genericity_trial,
    witness,
)
from .channel.model import complex_normal, random_coloring
from .channel.types import ColoringMatrix, Dims
from .estimation.montecarlo import SlopeFit, SnrGrid, hyx_growth_check, mc_logdet, mc_mi_slope
from .exceptions import ErrorHandler, PrelogError
from .utils.config import get_config
from .utils.display import print_error, print_summary
from .utils.logger import get_logger, setup_logger
from .utils.serialization import OutputFormat, rational_fields, to_csv, to_json, write_report

setup_logger(log_level=get_config().log_level)
logger = get_logger(__name__)

# Z is drawn from its own stream so it never overlaps the sampling streams.
COLORING_STREAM = 0x5A

app = typer.Typer(
    name="mimo-prelog",
    help="Pre-log bounds, index sets, Jacobian checks and Monte Carlo estimates "
    "for correlated block-fading MIMO channels.",
    add_completion=False,
    no_args_is_help=True,
)


class ColoringKind(str, Enum):
    generic = "generic"
    constant = "constant"


class RunConfig(BaseModel):
    """Validated arguments of one CLI invocation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: str
    dims: Dims
    seed: Optional[int] = None
    samples: int = Field(default=10_000, ge=2)
    trials: int = Field(default=1000, ge=1)
    snr_start_db: Optional[float] = None
    snr_stop_db: Optional[float] = None
    snr_points: Optional[int] = None
    tol: Optional[float] = Field(default=None, gt=0)
    workers: int = Field(default=1, ge=1)
    fmt: OutputFormat = OutputFormat.json
    out: Optional[Path] = None

    @property
    def grid(self) -> SnrGrid:
        """SNR grid from the flags, falling back to the configured defaults."""
        settings = get_config().with_overrides(
            snr_start_db=self.snr_start_db,
            snr_stop_db=self.snr_stop_db,
            snr_points=self.snr_points,
        )
        return SnrGrid.from_db(settings.snr_start_db, settings.snr_stop_db, settings.snr_points)


# Shared options
T_OPT = typer.Option(..., "--T", min=1, help="Transmit antennas")
R_OPT = typer.Option(..., "--R", min=1, help="Receive antennas")
L_OPT = typer.Option(..., "--L", min=1, help="Block length")
Q_OPT = typer.Option(..., "--Q", min=1, help="Rank of the temporal correlation")
SEED_OPT = typer.Option(..., "--seed", help="Master seed (required)")
FORMAT_OPT = typer.Option(OutputFormat.json, "--format", help="Report format")
OUT_OPT = typer.Option(
    None, "--out", help="Report file; relative paths honour PRELOG_OUTPUT_DIR"
)
TOL_OPT = typer.Option(None, "--tol", help="Nonsingularity tolerance sigma_min / sigma_max")
WORKERS_OPT = typer.Option(1, "--workers", min=1, help="Worker threads")
COLORING_OPT = typer.Option(
    ColoringKind.generic, "--coloring", help="Seeded generic Z or constant fading"
)
SNR_START_OPT = typer.Option(None, "--snr-start-db", help="First SNR point (dB) [default: 20]")
SNR_STOP_OPT = typer.Option(None, "--snr-stop-db", help="Last SNR point (dB) [default: 40]")
SNR_POINTS_OPT = typer.Option(None, "--snr-points", help="Number of SNR points [default: 5]")


def _make_config(subcommand: str, T: int, R: int, L: int, Q: int, **values: Any) -> RunConfig:
    return RunConfig(subcommand=subcommand, dims=Dims(T=T, R=R, L=L, Q=Q), **values)


def _coloring(cfg: RunConfig, kind: ColoringKind) -> ColoringMatrix:
    rng = np.random.default_rng([cfg.seed, COLORING_STREAM])
    if kind is ColoringKind.constant:
        return constant_fading_Z(cfg.dims, complex_normal(rng, (cfg.dims.L, cfg.dims.Q)))
    return random_coloring(cfg.dims, rng)


def _emit(cfg: RunConfig, fields: Dict[str, Any], table: Optional[str] = None) -> None:
    """Write the report; CSV holds the ``fields[table]`` rows, or one row of ``fields``."""
    if cfg.fmt is OutputFormat.csv:
        text = to_csv(fields[table] if table is not None else [fields])
    else:
        report = {
            "tool_version": __version__,
            "subcommand": cfg.subcommand,
            "dims": cfg.dims.as_dict(),
            "seed": cfg.seed,
            **fields,
        }
        text = to_json(report)
    write_report(text, cfg.out)


def _slope_rows(fit: SlopeFit, grid: SnrGrid) -> List[Dict[str, Any]]:
    return [
        {
            "snr_db": db,
            "rho": estimate.rho,
            "mean": estimate.mean,
            "std_err": estimate.std_err,
            "samples": estimate.samples,
        }
        for db, estimate in zip(grid.db, fit.per_point)
    ]


@app.callback(invoke_without_command=True)
def main_callback(
    version: bool = typer.Option(False, "--version", help="Show version and exit."),
    log_level: str = typer.Option(
        get_config().log_level, "--log-level", help="DEBUG, INFO, WARNING or ERROR"
    ),
    log_file: Optional[Path] = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """
    Pre-log verification toolkit CLI
    """
    setup_logger(log_level=log_level.upper(), log_file=str(log_file) if log_file else None)
    if version:
        typer.echo(f"mimo-prelog {__version__}")
        raise typer.Exit()


@app.command("bounds")
def bounds_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Closed-form pre-log bounds as exact rationals."""
    cfg = _make_config("bounds", T, R, L, Q, fmt=fmt, out=out)
    report = prelog_report(cfg.dims)
    fields: Dict[str, Any] = {
        "chi_low_per_T": [
            {"T_prime": Tprime, **rational_fields("chi_low", value)}
            for Tprime, value in report.chi_low_per_T.items()
        ],
        "m_star": report.m_star,
        "best_T": report.best_T,
    }
    for name in ("t_opt", "eta", "chi_star", "chi_star_clamped", "zheng_tse", "chi_star_ceiling"):
        fields.update(rational_fields(name, getattr(report, name)))
    fields.update(rational_fields("best_chi", report.best_chi))
    _emit(cfg, fields, table="chi_low_per_T")


@app.command("index-sets")
def index_sets_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Row-selection, pilot and data sets (pilot sets listed in fill order)."""
    cfg = _make_config("index-sets", T, R, L, Q, out=out)
    selection = build_selection(cfg.dims)
    checks = validate_selection(cfg.dims, selection)
    fields: Dict[str, Any] = {
        "theta": selection.theta,
        "k": selection.k,
        "ell": selection.ell,
        "I": selection.I,
        "P": pilot_fill_order(cfg.dims),
        "P_sorted": selection.P,
        "D": selection.D,
        "rows": selection.rows,
        "checks": checks.checks,
    }
    if cfg.dims.R > cfg.dims.T:
        aux = lemma5_sets(cfg.dims)
        fields["step_sets"] = {"L": aux.Lsets, "G": aux.Gsets, "anchors": aux.anchors}
    _emit(cfg, fields)


@app.command("jacobian-check")
def jacobian_check_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    seed: int = SEED_OPT,
    trials: int = typer.Option(1000, "--trials", help="Random draws"),
    tol: Optional[float] = TOL_OPT,
    constant_fading: bool = typer.Option(
        False, "--constant-fading", help="All blocks Z_rt equal to one random base"
    ),
    zero_input: bool = typer.Option(False, "--zero-input", help="Force x = 0"),
    workers: int = WORKERS_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Genericity test: fraction of random draws with a nonsingular Jacobian."""
    cfg = _make_config(
        "jacobian-check", T, R, L, Q,
        seed=seed, trials=trials, tol=tol, workers=workers, fmt=fmt, out=out,
    )
    selection = build_selection(cfg.dims)
    layout = build_layout(cfg.dims, selection)
    result = genericity_trial(
        cfg.dims,
        selection,
        cfg.trials,
        seed,
        cfg.tol,
        zero_input=zero_input,
        constant_fading=constant_fading,
        max_workers=cfg.workers,
    )
    fields = {
        "N": layout.N,
        "fading_columns": layout.fading_columns,
        "data_columns": layout.data_columns,
        **result.model_dump(exclude={"seed"}),
    }
    print_summary("Genericity", {"fraction": result.fraction, "min ratio": result.min_ratio})
    _emit(cfg, fields)


@app.command("witness")
def witness_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    seed: int = SEED_OPT,
    tol: Optional[float] = TOL_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Explicit (Z, x, s) with a certified nonsingular Jacobian."""
    cfg = _make_config("witness", T, R, L, Q, seed=seed, tol=tol, out=out)
    result = witness(cfg.dims, seed, tol=cfg.tol)
    certificate = result.certificate
    layout = build_layout(cfg.dims, result.selection)
    fields = {
        "Z": result.Z.stacked(),
        "x": result.x.x,
        "s": result.s.s,
        "N": layout.N,
        "layout": layout.describe(),
        "attempts": result.attempts,
        "certificate": {
            "log_abs_det": certificate.log_abs,
            "phase": certificate.phase,
            "singular_value_ratio": certificate.ratio,
            "singular": certificate.singular,
        },
    }
    _emit(cfg, fields)


@app.command("bezout")
def bezout_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Exponent e of the 2^e bound on isolated preimages."""
    cfg = _make_config("bezout", T, R, L, Q, fmt=fmt, out=out)
    selection = build_selection(cfg.dims)
    bound = bezout_exponent(cfg.dims, selection)
    fields = {
        "exponent": bound.exponent,
        "bound": bound.describe(),
        "data_unknowns": selection.data_count,
        "fading_unknowns": cfg.dims.TQR,
    }
    _emit(cfg, fields)


@app.command("mc-logdet")
def mc_logdet_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    seed: int = SEED_OPT,
    samples: int = typer.Option(10_000, "--samples", help="Monte Carlo draws"),
    tol: Optional[float] = TOL_OPT,
    coloring: ColoringKind = COLORING_OPT,
    workers: int = WORKERS_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Estimate E[log |det J|^2] over random inputs and fading."""
    cfg = _make_config(
        "mc-logdet", T, R, L, Q,
        seed=seed, samples=samples, tol=tol, workers=workers, fmt=fmt, out=out,
    )
    selection = build_selection(cfg.dims)
    estimate = mc_logdet(
        cfg.dims,
        _coloring(cfg, coloring),
        selection,
        cfg.samples,
        seed,
        tol=cfg.tol,
        max_workers=cfg.workers,
    )
    fields = {
        "coloring": coloring.value,
        "mean": estimate.mean,
        "std_err": estimate.std_err,
        "samples": estimate.samples,
        "floored": estimate.floored,
        "floored_fraction": estimate.floored_fraction,
    }
    _emit(cfg, fields)


@app.command("mc-mi")
def mc_mi_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    seed: int = SEED_OPT,
    samples: int = typer.Option(20_000, "--samples", help="Draws per SNR point"),
    knn_k: int = typer.Option(4, "--knn-k", min=1, help="Neighbour rank k"),
    snr_start_db: Optional[float] = SNR_START_OPT,
    snr_stop_db: Optional[float] = SNR_STOP_OPT,
    snr_points: Optional[int] = SNR_POINTS_OPT,
    coloring: ColoringKind = COLORING_OPT,
    workers: int = WORKERS_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Slope of the Gaussian-input mutual information (per channel use) in ln(rho)."""
    cfg = _make_config(
        "mc-mi", T, R, L, Q,
        seed=seed, samples=samples, snr_start_db=snr_start_db, snr_stop_db=snr_stop_db,
        snr_points=snr_points, workers=workers, fmt=fmt, out=out,
    )
    grid = cfg.grid
    fit = mc_mi_slope(
        cfg.dims, _coloring(cfg, coloring), grid, cfg.samples, seed,
        knn_k=knn_k, max_workers=cfg.workers,
    )
    fields: Dict[str, Any] = {
        "coloring": coloring.value,
        "knn_k": knn_k,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "slope_std_err": fit.slope_std_err,
        "quantity": fit.quantity,
        "per_point": _slope_rows(fit, grid),
    }
    if T <= R:
        fields.update(rational_fields("chi_low_reference", chi_low(cfg.dims, T)))
    _emit(cfg, fields, table="per_point")


@app.command("hyx-growth")
def hyx_growth_command(
    T: int = T_OPT,
    R: int = R_OPT,
    L: int = L_OPT,
    Q: int = Q_OPT,
    seed: int = SEED_OPT,
    samples: int = typer.Option(10_000, "--samples", help="Draws per SNR point"),
    snr_start_db: Optional[float] = SNR_START_OPT,
    snr_stop_db: Optional[float] = SNR_STOP_OPT,
    snr_points: Optional[int] = SNR_POINTS_OPT,
    coloring: ColoringKind = COLORING_OPT,
    workers: int = WORKERS_OPT,
    fmt: OutputFormat = FORMAT_OPT,
    out: Optional[Path] = OUT_OPT,
):
    """Growth rate of h(y | x) in ln(rho); generic inputs give about TQR."""
    cfg = _make_config(
        "hyx-growth", T, R, L, Q,
        seed=seed, samples=samples, snr_start_db=snr_start_db, snr_stop_db=snr_stop_db,
        snr_points=snr_points, workers=workers, fmt=fmt, out=out,
    )
    grid = cfg.grid
    fit = hyx_growth_check(
        cfg.dims, _coloring(cfg, coloring), grid, cfg.samples, seed, max_workers=cfg.workers
    )
    fields = {
        "coloring": coloring.value,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "slope_std_err": fit.slope_std_err,
        "expected_slope": cfg.dims.TQR,
        "quantity": fit.quantity,
        "per_point": _slope_rows(fit, grid),
    }
    _emit(cfg, fields, table="per_point")


def click_error_kind(exc: BaseException) -> Optional[str]:
    """Name of the click base class behind ``exc``, or None.

    typer either depends on click or ships its own copy of it, so the classes
    are matched by name rather than imported.
    """
    for cls in type(exc).__mro__:
        if cls.__name__ in ("ClickException", "Abort"):
            return cls.__name__
    return None


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Dispatch one invocation and return its exit code.

    0 on success, 2 for invalid arguments or refused estimates, 1 when a
    construction or verification fails.
    """
    command = typer.main.get_command(app)
    try:
        result = command.main(
            args=list(argv) if argv is not None else None,
            prog_name="mimo-prelog",
            standalone_mode=False,
        )
    except PrelogError as exc:
        logger.error(f"{exc.error_code}: {exc.message}")
        print_error(" ".join(exc.message.split()))
        return ErrorHandler.exit_code(exc)
    except Exception as exc:
        kind = click_error_kind(exc)
        if kind == "ClickException":
            print_error(" ".join(exc.format_message().split()))
            return exc.exit_code
        if kind == "Abort":
            print_error("aborted")
            return ErrorHandler.FAILURE_EXIT_CODE
        converted = ErrorHandler.handle_exception(exc, logger=logger, reraise=False)
        print_error(" ".join(str(converted.message).split()))
        return ErrorHandler.exit_code(converted)
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
