from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import fft as sp_fft

from varcoorbit.analyzers import admissibility_defect, meyer_generators, moment_check, tauberian_check
from varcoorbit.config import load_config, render_defaults
from varcoorbit.coorbit import (
    Covering,
    discretization_sweep,
    frame_kernel,
    gram_cross_kernel,
    kernel_a1_norm,
    kernel_amnu_norm,
    osc_kernel,
    sweep_monotone,
    wavelet_frame_expand,
)
from varcoorbit.serde import write_kernel_table
from varcoorbit.signals import make_signal
from varcoorbit.spaces import b_norm, equivalence_study, evaluate_norm, f_norm, quasi_triangle_constant
from varcoorbit.tables import write_plot_data, write_table
from varcoorbit.transform import VoiceTransform
from varcoorbit.varexp import log_holder_report, make_exponent
from varcoorbit.weights import ReservoirWeight, check_admissible, estimate_class_parameters

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from varcoorbit.analyzers import AnalyzerPair, FrequencyProfile
    from varcoorbit.config import ExperimentConfig
    from varcoorbit.grid import GridSignal
    from varcoorbit.spaces import SpaceSpec
    from varcoorbit.typing import FloatArray

__all__ = ("build_parser", "main")

logger = logging.getLogger("varcoorbit")

EXIT_INVALID = 2
PROFILE_SAMPLES = 1024


def _out_dir(config: ExperimentConfig) -> Path:
    path = Path(config.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _plain(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    msg = f"Cannot serialize {type(value).__name__}"
    raise TypeError(msg)


def _write_json(payload: dict[str, Any], path: Path) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_plain)
    path.write_text(text + "\n", encoding="utf-8")
    print(text)  # noqa: T201


def cmd_norm(config: ExperimentConfig, args: argparse.Namespace) -> int:
    """Evaluate one norm variant of one signal."""
    spec = config.space_spec(args.family, args.variant)
    f = make_signal(args.signal, spec.grid)
    report = evaluate_norm(
        spec, f, pair=config.analyzer.build(), axis=config.axis.build(), check_refinement=args.refine
    )
    _write_json({"signal": args.signal, **report.to_record()}, _out_dir(config) / "norm.json")
    return 0


def cmd_equiv(config: ExperimentConfig, args: argparse.Namespace) -> int:  # noqa: ARG001
    """Norm values of the battery under every configured variant and the ratio bands between them."""
    spec = config.space_spec()
    battery = config.battery.build(spec.grid, config.seed)
    study = equivalence_study(
        spec, battery, pair=config.analyzer.build(), axis=config.axis.build(), variants=config.space.variants
    )
    out = _out_dir(config)
    write_table(study.rows(), out / "equiv_values.csv")
    bands = [
        {"left": left, "right": right, "low": low, "high": high, "width": high / low}
        for (left, right), (low, high) in study.bands.items()
    ]
    write_table(bands, out / "equiv_bands.csv")
    if config.output.plots:
        for variant in study.variants:
            values = study.values[variant]
            write_plot_data(np.arange(len(values)), values, out / f"plot_equiv_{variant}.csv")
    logger.info("Equivalence study over %d signals and %d variants", len(battery), len(study.variants))
    return 0


def _window(config: ExperimentConfig) -> tuple[VoiceTransform, SpaceSpec]:
    grid, axis = config.kernel_window.build()
    vt = VoiceTransform(config.analyzer.build(), grid, axis)
    return vt, config.space_spec(grid=grid)


def cmd_discretize(config: ExperimentConfig, args: argparse.Namespace) -> int:  # noqa: ARG001
    """Discretization sweep over the configured (α, β) grid on the kernel window."""
    vt, spec = _window(config)
    battery = config.battery.build(vt.grid, config.seed)
    rows = discretization_sweep(
        vt,
        battery,
        spec,
        alphas=config.covering.alphas,
        betas=config.covering.betas,
        tol=config.covering.tolerance,
        max_iter=config.covering.max_iter,
    )
    out = _out_dir(config)
    write_table([row.to_record() for row in rows], out / "sweep.csv")
    summary = {
        "osc_a1_monotone": sweep_monotone(rows, "osc_a1"),
        "residual_monotone": sweep_monotone(rows, "discretization_residual"),
        "finest_converged": rows[-1].converged if rows else False,
    }
    _write_json(summary, out / "sweep_summary.json")
    if config.output.plots:
        for idx, beta in enumerate(config.covering.betas):
            group = [row for row in rows if row.beta == beta]
            write_plot_data(
                [row.alpha for row in group],
                [row.discretization_residual for row in group],
                out / f"plot_residual_beta{idx}.csv",
            )
    return 0


def _function_norm(spec: SpaceSpec, f: GridSignal) -> float:
    if spec.family == "F":
        return f_norm(spec, f)
    if spec.family == "B":
        return b_norm(spec, f)
    return math.nan


def cmd_recon(config: ExperimentConfig, args: argparse.Namespace) -> int:
    """Meyer expansion of the battery with reconstruction residuals and coefficient norms."""
    levels = config.recon.levels if args.levels is None else args.levels
    spec = config.space_spec()
    grid = spec.grid
    system = meyer_generators(config.recon.smoothness)  # type: ignore[arg-type]
    band = min(config.battery.band_fraction * grid.band, 2.0**levels * system.scaling_support)
    battery = config.battery.build(grid, config.seed, band=band)
    rows = []
    for idx, f in enumerate(battery):
        expansion = wavelet_frame_expand(f, system, levels, spec if spec.family in {"F", "B"} else None)
        function_norm = _function_norm(spec, f)
        natural = sum(norms[1] for norms in expansion.norms.values()) if expansion.norms else math.nan
        rows.append(
            {
                "signal_id": idx,
                "residual": expansion.residual,
                "coefficient_norm": natural,
                "function_norm": function_norm,
                "ratio": natural / function_norm if function_norm > 0 else math.nan,
            }
        )
    out = _out_dir(config)
    write_table(rows, out / "recon.csv")
    _write_json({"levels": levels, "max_residual": max(row["residual"] for row in rows)}, out / "recon.json")
    return 0


def cmd_kernels(config: ExperimentConfig, args: argparse.Namespace) -> int:  # noqa: ARG001
    """A₁ and A_{m_ν} norms of the frame, Gramian and oscillation kernels for every covering."""
    vt, spec = _window(config)
    frame = frame_kernel(vt)
    nu = ReservoirWeight.associated(spec.w, spec.p, vt.axis)
    frame_a1, frame_amnu = kernel_a1_norm(frame), kernel_amnu_norm(frame, nu)
    rows = []
    for beta in config.covering.betas:
        for alpha in config.covering.alphas:
            covering = Covering(alpha, beta, vt.grid, vt.axis)
            gram = gram_cross_kernel(None, vt, covering)
            osc = osc_kernel(vt, covering, frame=frame)
            rows.append(
                {
                    "alpha": alpha,
                    "beta": beta,
                    "boxes": covering.size,
                    "intersection_number": covering.intersection_number(),
                    "frame_a1": frame_a1,
                    "frame_amnu": frame_amnu,
                    "gram_a1": kernel_a1_norm(gram),
                    "gram_amnu": kernel_amnu_norm(gram, nu),
                    "osc_a1": kernel_a1_norm(osc),
                    "osc_amnu": kernel_amnu_norm(osc, nu),
                }
            )
    out = _out_dir(config)
    write_table(rows, out / "kernels.csv")
    write_kernel_table(frame.table, out / "frame_kernel.bin")
    summary = {"quasi_triangle_constant": quasi_triangle_constant(spec), "coverings": len(rows)}
    _write_json(summary, out / "kernels.json")
    return 0


def _profile_curve(profile: FrequencyProfile, radius: float) -> tuple[FloatArray, FloatArray]:
    xi = np.linspace(0.0, radius, PROFILE_SAMPLES)
    return xi, np.abs(profile.func(xi))


def cmd_check(config: ExperimentConfig, args: argparse.Namespace) -> int:  # noqa: ARG001
    """Tauberian, moment, admissibility and weight-class reports of the configured analyzer and space."""
    pair: AnalyzerPair = config.analyzer.build()
    grid, axis = config.grid.build(), config.axis.build()
    tauber = tauberian_check(pair)
    moments = moment_check(pair, order=4)
    weight = config.weight.build()
    admissible = check_admissible(weight, seed=config.seed)
    estimate = estimate_class_parameters(weight, seed=config.seed)
    payload: dict[str, Any] = {
        "analyzer": pair.name,
        "supports": {
            "phi0": [0.0, pair.phi0_hat.outer_radius],
            "phi": [pair.phi_hat.inner_radius, pair.phi_hat.outer_radius],
        },
        "tauberian": {**asdict(tauber), "passes": tauber.passes},
        "moments": asdict(moments),
        "admissibility_defect": admissibility_defect(pair, grid, axis),
        "weight": {**asdict(admissible), "passes": admissible.passes, "estimate": asdict(estimate)},
        "exponent": asdict(log_holder_report(make_exponent(config.exponents.p, grid))),
    }
    out = _out_dir(config)
    _write_json(payload, out / "check.json")
    if config.output.plots:
        radius = 2 * pair.phi_hat.outer_radius
        for name, profile in (("phi0", pair.phi0_hat), ("phi", pair.phi_hat)):
            write_plot_data(*_profile_curve(profile, radius), out / f"plot_profile_{name}.csv")
    return 0


COMMANDS: dict[str, Callable[[ExperimentConfig, argparse.Namespace], int]] = {
    "norm": cmd_norm,
    "equiv": cmd_equiv,
    "discretize": cmd_discretize,
    "recon": cmd_recon,
    "kernels": cmd_kernels,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varcoorbit", description="Coorbit experiments on variable exponent spaces.")
    parser.add_argument("--config", type=Path, default=None, help="TOML experiment file.")
    parser.add_argument("--out", default=None, help="Output directory, overrides [output] directory.")
    parser.add_argument("--seed", type=int, default=None, help="Battery seed, overrides the file.")
    parser.add_argument("--threads", type=int, default=None, help="FFT worker threads, overrides the file.")
    parser.add_argument("--print-defaults", action="store_true", help="Print the default configuration and exit.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Repeat for more logging.")

    sub = parser.add_subparsers(dest="command")
    norm = sub.add_parser("norm", help="Evaluate one norm of one signal.")
    norm.add_argument("--family", choices=("F", "B"), default=None)
    norm.add_argument("--variant", choices=("def", "norm1", "norm2", "norm3", "norm4"), default=None)
    norm.add_argument("--signal", default="gaussian(sigma=1.0)", help="Signal generator spec.")
    norm.add_argument(
        "--refine", action="store_true", help="Re-evaluate on a grid refined by 2 and flag a discretization change."
    )
    sub.add_parser("equiv", help="Equivalence bands between norm variants.")
    sub.add_parser("discretize", help="Discretization sweep over coverings.")
    recon = sub.add_parser("recon", help="Meyer expansion and reconstruction.")
    recon.add_argument("--levels", "-J", type=int, default=None, help="Finest expansion level.")
    sub.add_parser("kernels", help="Kernel norms for every covering.")
    sub.add_parser("check", help="Analyzer and weight checks.")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.print_defaults:
        print(render_defaults(), end="")  # noqa: T201
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID

    try:
        config = load_config(args.config).with_overrides(seed=args.seed, threads=args.threads, out=args.out)
        with sp_fft.set_workers(config.threads):
            logger.info("Running %s", args.command)
            return COMMANDS[args.command](config, args)
    except (ValueError, ArithmeticError) as exc:
        print(f"varcoorbit {args.command}: {exc}", file=sys.stderr)  # noqa: T201
        return EXIT_INVALID
