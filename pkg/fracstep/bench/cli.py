# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Command line interface::

    fracstep study --problem allen-cahn-1d --alpha 0.3,0.5,0.7 --k 2,3,6 --out report.csv
    fracstep weights --k 2 --alpha 0.5 --n 10
    fracstep solve --problem allen-cahn-1d --alpha 0.5 --k 3 --steps 100 --out u.csv
"""
import logging
import os
from typing import Optional

import click
from dotenv import load_dotenv

from ..config import reload_from_env
from ..constants import (
    BACKENDS,
    EXIT_SOLVER_FAILURE,
    FORMAT_CSV,
    FORMAT_JSON,
    REF_EXACT,
    REF_FINE,
)
from ..exceptions import ConfigError, ReportIOError
from ..problems import available_problems, get_problem
from ..quadrature import cq_weights, cq_weights_fft
from ..spatial import assemble
from ..timestepping import StepperConfig, run
from ..utils import exit_on_error, format_float, get_stdout_logger, write_csv
from .report import emit_report
from .study import StudyConfig, run_study

__all__ = ["cli", "main"]

logger = logging.getLogger(__name__)

DEFAULT_MESH_1D = 200
DEFAULT_MESH_2D = 32


def parse_floats(text: str) -> tuple[float, ...]:
    """Parse "0.3,0.5,0.7"."""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise click.BadParameter("expected at least one value")
    return values


def parse_ints(text: str) -> tuple[int, ...]:
    """Parse "2,3,6" or a range "1..6"."""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            values = tuple(range(int(low), int(high) + 1))
        else:
            values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected integers like '2,3,6' or '1..6', got {text!r}") from None
    if not values:
        raise click.BadParameter("expected at least one value")
    return values


def parse_reference(text: str) -> tuple[str, Optional[int]]:
    """Parse "exact", "fine" or "fine:<multiplier>"."""
    mode, _, multiplier = text.partition(":")
    if mode in ("exact", REF_EXACT) and not multiplier:
        return REF_EXACT, None
    if mode in ("fine", REF_FINE):
        try:
            return REF_FINE, int(multiplier) if multiplier else None
        except ValueError:
            pass
    raise click.BadParameter(f"expected 'exact' or 'fine:<multiplier>', got {text!r}")


@click.group()
@click.option("--verbose", is_flag=True, help="Log study progress")
@click.option("--debug", is_flag=True, help="Log Newton traces of every step")
@exit_on_error()
def cli(verbose, debug):
    """Corrected BDF convolution quadrature for semilinear subdiffusion."""
    load_dotenv()
    config = reload_from_env()
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = getattr(logging, config.log_level)
    get_stdout_logger("fracstep", debug_modules=["fracstep"] if debug else None, default_level=level)
    logging.getLogger("fracstep").setLevel(level)


@cli.command()
@click.option("--problem", required=True, type=click.Choice(available_problems()), help="Problem name")
@click.option("--alpha", "alphas", default="0.3,0.5,0.7", show_default=True, help="Comma-separated alphas")
@click.option("--k", "ks", default="1..6", show_default=True, help="BDF orders: '2,3,6' or '1..6'")
@click.option("--uncorrected", is_flag=True, help="Disable the starting-step corrections")
@click.option("--base-steps", default=50, show_default=True, type=int, help="Step count N0 of level 0")
@click.option("--levels", default=4, show_default=True, type=int, help="Number of halvings L")
@click.option("--mesh", default=None, type=int, help="Subdivisions M (200 in 1D, 32 in 2D)")
@click.option("--backend", default=None, type=click.Choice(BACKENDS), help="Spatial backend")
@click.option("--ref", "reference", default=None, help="'exact' or 'fine:<multiplier>'")
@click.option("--ref-k", default=6, show_default=True, type=int, help="BDF order of the reference run")
@click.option("--cutoff", default=None, type=float, help="Globally Lipschitz cutoff of f at this level")
@click.option("--workers", default=None, type=int, help="Concurrent cells (FRACSTEP_WORKERS)")
@click.option("--format", "fmt", default=FORMAT_CSV, type=click.Choice([FORMAT_CSV, FORMAT_JSON]))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Report path")
@exit_on_error()
def study(
    problem, alphas, ks, uncorrected, base_steps, levels, mesh, backend, reference, ref_k, cutoff, workers, fmt, out
):
    """Run a temporal convergence study and write the report."""
    spec = get_problem(problem)
    mode, multiplier = parse_reference(reference) if reference else (None, None)
    if mesh is None:
        mesh = DEFAULT_MESH_2D if spec.dim == 2 else DEFAULT_MESH_1D
    config = StudyConfig(
        problem=problem,
        alphas=parse_floats(alphas),
        ks=parse_ints(ks),
        corrected=not uncorrected,
        base_steps=base_steps,
        levels=levels,
        backend=backend,
        mesh=mesh,
        reference=mode,
        ref_multiplier=multiplier or 16,
        ref_k=ref_k,
        cutoff=cutoff,
        workers=workers,
        output=out,
        format=fmt,
    )
    report = run_study(config)
    emit_report(report, fmt, out)
    for cell in report.cells:
        tail = "n/a" if cell.tail_rate is None else f"{cell.tail_rate:.2f}"
        click.echo(f"alpha={cell.alpha:g} k={cell.k}: rate {tail} ({cell.expected_rate:.2f})")
    if report.failures:
        click.echo(f"{len(report.failures)} cells had failing steps", err=True)
        raise SystemExit(EXIT_SOLVER_FAILURE)


@cli.command()
@click.option("--k", required=True, type=int, help="BDF order")
@click.option("--alpha", required=True, type=float, help="Fractional order")
@click.option("--n", "n_max", required=True, type=int, help="Index of the last weight")
@click.option("--fft", is_flag=True, help="Use the FFT route instead of the recurrence")
@exit_on_error()
def weights(k, alpha, n_max, fft):
    """Print omega_0..omega_n, one per line."""
    generator = cq_weights_fft if fft else cq_weights
    for value in generator(k, alpha, n_max).weights:
        click.echo(format_float(value))


@cli.command()
@click.option("--problem", required=True, type=click.Choice(available_problems()), help="Problem name")
@click.option("--alpha", default=None, type=float, help="Fractional order")
@click.option("--k", required=True, type=int, help="BDF order")
@click.option("--steps", required=True, type=int, help="Number of time steps N")
@click.option("--mesh", default=None, type=int, help="Subdivisions M (200 in 1D, 32 in 2D)")
@click.option("--backend", default=None, type=click.Choice(BACKENDS), help="Spatial backend")
@click.option("--snapshot", default="", help="Comma-separated step indices to keep besides 0 and N")
@click.option("--cutoff", default=None, type=float, help="Globally Lipschitz cutoff of f at this level")
@click.option("--uncorrected", is_flag=True, help="Disable the starting-step corrections")
@click.option("--dump-matrices", default=None, type=click.Path(file_okay=False), help="Write mass/stiffness triplets")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Snapshot CSV path")
@exit_on_error()
def solve(problem, alpha, k, steps, mesh, backend, snapshot, cutoff, uncorrected, dump_matrices, out):
    """Solve one problem and write nodal snapshots as CSV."""
    spec = get_problem(problem, alpha=alpha)
    if cutoff is not None:
        spec = spec.with_lipschitz_cutoff(cutoff)
    backend = backend or spec.default_backend
    if mesh is None:
        mesh = DEFAULT_MESH_2D if spec.dim == 2 else DEFAULT_MESH_1D
    ops = assemble(backend, mesh, spec.kappa)
    if ops.mesh.dim != spec.dim:
        raise ConfigError(f"Configuration error: backend {backend!r} does not match the {spec.dim}D problem.")
    if dump_matrices:
        os.makedirs(dump_matrices, exist_ok=True)
        ops.mass.write_triplets(os.path.join(dump_matrices, "mass.txt"))
        ops.stiffness.write_triplets(os.path.join(dump_matrices, "stiffness.txt"))

    stepper_config = StepperConfig(
        alpha=spec.alpha, k=k, N=steps, T=spec.T, corrected=not uncorrected
    )
    wanted = parse_ints(snapshot) if snapshot else ()
    trajectory = run(stepper_config, ops, spec.rhs, spec.initial_nodal(ops), snapshot_at=wanted)

    coord_names = ["x", "y"][: spec.dim]
    value_names = [f"u[{n}]" for n in trajectory.snapshots]
    rows = []
    for row, coords in enumerate(ops.mesh.interior_nodes):
        entry = {name: format_float(c) for name, c in zip(coord_names, coords)}
        for name, values in zip(value_names, trajectory.snapshots.values()):
            entry[name] = format_float(values[row])
        rows.append(entry)
    try:
        write_csv(out, coord_names + value_names, rows)
    except OSError as e:
        raise ReportIOError(out, e) from e
    logger.info(f"Wrote {len(value_names)} snapshots of {ops.n} nodes to {out}")
    click.echo(f"{spec.name}: N={steps}, average Newton iterations {trajectory.newton_avg:.2f}")


def main():
    cli()


if __name__ == "__main__":
    main()
