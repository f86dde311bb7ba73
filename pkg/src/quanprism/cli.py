"""Command line front end.

Machine-readable output (JSON, CSV, circuit text) goes to stdout or the
``--out`` file; human-readable summaries go to stderr. Exit codes form a
stable scripting contract:

* 0: success, or a check command whose predicate holds
* 1: predicate false (pair not preserved, channel not GPD-equivalent)
* 2: usage error (bad flags, malformed input documents, empty grids)
* 3: validation error (well-formed input violating a physical invariant)
* 4: numerical failure (circuit verification beyond tolerance)
"""

from __future__ import annotations

import json
import math
import re
import sys

import click
import numpy as np

from .channels import (
    KrausChannel,
    MixedUnitaryChannel,
    choi_distance,
    choi_rank,
    kraus_ops_of,
)
from .circuits import CircuitSyntaxError, circuit_to_channel, emit_text, parse_text, synth_gpd, to_channel
from .dephasing import (
    GPDChannel,
    SweepSpec,
    decoherence_sweep,
    from_phase_damping,
    make_gpd,
    preserved_set_probe,
    recognize_gpd,
    to_mixed_unitary,
)
from .linalg import dagger
from .preservation import (
    diagonal_criterion_qubit,
    is_schur_channel,
    preserves_fidelity_direct,
    rank2_fidelity_criterion,
    rank_n_necessary_condition,
    two_level_criterion_qutrit,
)
from .serialization import (
    FormatError,
    channel_to_json,
    load_channel,
    matrix_to_json,
    parse_state,
)
from .states import PureState

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

DISTINGUISHABLE_TOL = 1e-8
VERIFY_TOL = 1e-9

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/([+-]?(?:\d+\.?\d*|\.\d+)))?$")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _json_ready(value):
    """Round floats to 12 significant digits for byte-stable output."""
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def emit_json(obj) -> None:
    click.echo(json.dumps(_json_ready(obj), sort_keys=True))


def parse_angle(text: str) -> float:
    """Radians from a float literal or a pi expression like ``pi/2`` or ``3pi/4``."""
    t = text.strip().lower().replace(" ", "")
    try:
        return float(t)
    except ValueError:
        pass
    m = _PI_RE.match(t)
    if not m:
        raise FormatError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    if coef in ("", "+"):
        num = 1.0
    elif coef == "-":
        num = -1.0
    else:
        num = float(coef)
    value = num * math.pi
    if m.group(2):
        value /= float(m.group(2))
    return value


def parse_grid(text: str) -> list[float]:
    """Grid spec ``start:stop:count`` (inclusive linspace) or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_angle(parts[0])]
    if len(parts) != 3:
        raise FormatError(f"grid spec must be start:stop:count, got {text!r}")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise FormatError(f"grid count must be an integer, got {parts[2]!r}") from exc
    if count < 1:
        raise FormatError("grid is empty")
    return [float(v) for v in np.linspace(start, stop, count)]


def parse_float_list(text: str) -> list[float]:
    try:
        return [parse_angle(tok) for tok in text.split(",") if tok.strip() != ""]
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"cannot parse list {text!r}") from exc


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def guarded(fn):
    """Map exception classes onto the exit-code contract."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FormatError, CircuitSyntaxError, json.JSONDecodeError, OSError) as exc:
            _fail(EXIT_USAGE, str(exc))
        except AssertionError as exc:
            _fail(EXIT_NUMERIC, str(exc))
        except ValueError as exc:
            _fail(EXIT_VALIDATION, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.option("--tol", type=float, default=1e-9, show_default=True,
              help="Tolerance for preservation and equality checks.")
@click.option("--seed", type=int, default=0x5EED, show_default=True,
              help="Seed for randomized subcommands.")
@click.option("--json", "json_out", is_flag=True, help="Force JSON output on stdout.")
@click.pass_context
def main(ctx, tol, seed, json_out):
    """Analysis toolkit for mixed unitary quantum channels."""
    if tol < 0:
        raise click.UsageError("--tol must be nonnegative")
    ctx.obj = {"tol": tol, "seed": seed, "json": json_out}


def _as_analysis_channel(channel):
    """Mixed-unitary view when available, plus the raw channel."""
    if isinstance(channel, GPDChannel):
        return to_mixed_unitary(channel), "gpd"
    if isinstance(channel, MixedUnitaryChannel):
        return channel, "mixed_unitary"
    return channel, "kraus"


@main.command()
@click.argument("channel_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@guarded
def inspect(ctx, channel_file):
    """Report structure of a channel file: rank, residuals, recognition."""
    raw = load_channel(channel_file)
    channel, kind = _as_analysis_channel(raw)
    ops = kraus_ops_of(channel)
    dim = ops[0].shape[1]
    ident = sum(dagger(a) @ a for a in ops)
    residual = float(np.abs(ident - np.eye(dim)).max())
    recognition = recognize_gpd(channel, ctx.obj["tol"])
    report = {
        "kind": kind,
        "dim": dim,
        "branches": len(ops),
        "completeness_residual": residual,
        "choi_rank": choi_rank(channel),
        "schur": is_schur_channel(channel, ctx.obj["tol"]),
        "gpd_recognizable": recognition is not None,
    }
    if recognition is not None:
        u0, gpd = recognition
        report["gpd_probs"] = [float(p) for p in gpd.probs]
        report["gpd_phases"] = gpd.phases.tolist()
        if ctx.obj["json"]:
            report["gpd_u0"] = matrix_to_json(u0)
    if ctx.obj["json"]:
        emit_json(report)
    else:
        for key in ("kind", "dim", "branches", "completeness_residual", "choi_rank",
                    "schur", "gpd_recognizable", "gpd_probs", "gpd_phases"):
            if key in report:
                value = report[key]
                if isinstance(value, float):
                    value = fmt(value)
                elif isinstance(value, list):
                    value = json.dumps(_json_ready(value))
                click.echo(f"{key}: {value}")
    sys.exit(EXIT_OK)


def _criterion_for(channel, phi1, phi2, orthogonal, mode, tol):
    """Pick the structural criterion matching pair type and channel rank."""
    if mode == "distinguishability" or orthogonal:
        if mode == "fidelity":
            return None, "n/a (orthogonal pair)"
        dim = phi1.dim
        if dim == 2:
            return diagonal_criterion_qubit(channel, (phi1, phi2), tol), None
        if dim == 3:
            basis = _complete_basis(phi1, phi2)
            return two_level_criterion_qutrit(channel, basis, tol), None
        return None, "n/a (no structural criterion at this dimension)"
    if not isinstance(channel, MixedUnitaryChannel):
        return None, "n/a (criterion needs a mixed unitary form)"
    if channel.rank == 2:
        return (
            rank2_fidelity_criterion(
                channel.unitaries[0], channel.unitaries[1],
                float(channel.probs[0]), phi1, phi2, tol
            ),
            None,
        )
    return rank_n_necessary_condition(channel, phi1, phi2, tol), "necessary condition only"


def _complete_basis(phi1: PureState, phi2: PureState) -> tuple[PureState, ...]:
    d = phi1.dim
    cols = [phi1.amplitudes, phi2.amplitudes]
    for k in range(d):
        e = np.zeros(d, dtype=complex)
        e[k] = 1.0
        v = e - sum(np.vdot(c, e) * c for c in cols)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
        if len(cols) == d:
            break
    return tuple(PureState(c) for c in cols)


@main.command("check-preserve")
@click.argument("channel_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--state1", required=True, help="Named state (|0>, |1>, |+>, |->) or JSON amplitudes.")
@click.option("--state2", required=True, help="Second state, same formats.")
@click.option("--mode", type=click.Choice(["fidelity", "distinguishability"]),
              default="fidelity", show_default=True)
@click.option("--criterion", is_flag=True, help="Also run the applicable structural criterion.")
@click.pass_context
@guarded
def check_preserve(ctx, channel_file, state1, state2, mode, criterion):
    """Check whether the channel preserves fidelity between two pure states."""
    raw = load_channel(channel_file)
    channel, _ = _as_analysis_channel(raw)
    phi1, phi2 = parse_state(state1), parse_state(state2)
    tol = ctx.obj["tol"]
    verdict = preserves_fidelity_direct(channel, phi1, phi2, tol)
    orthogonal = verdict.fidelity_in <= DISTINGUISHABLE_TOL
    if mode == "distinguishability":
        if not orthogonal:
            raise ValueError("distinguishability mode needs an orthogonal input pair")
        preserved = verdict.fidelity_out <= DISTINGUISHABLE_TOL
    else:
        preserved = verdict.preserved
    crit_value, certificate = (None, None)
    if criterion:
        crit_value, certificate = _criterion_for(channel, phi1, phi2, orthogonal, mode, tol)
    emit_json({
        "preserved": preserved,
        "fidelity_in": verdict.fidelity_in,
        "fidelity_out": verdict.fidelity_out,
        "criterion": crit_value,
        "certificate": certificate,
    })
    sys.exit(EXIT_OK if preserved else EXIT_FALSE)


@main.group()
def gpd():
    """Build, convert, recognize, and probe phase damping channels."""


@gpd.command("make")
@click.option("--probs", required=True, help="Comma-separated branch probabilities.")
@click.option("--phases", required=True, help="Comma-separated phases (pi expressions allowed).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write channel JSON here instead of stdout.")
@guarded
def gpd_make(probs, phases, out):
    """Emit a general phase damping channel file."""
    channel = make_gpd(parse_float_list(probs), parse_float_list(phases))
    _write_channel(channel, out)
    sys.exit(EXIT_OK)


@gpd.command("from-pd")
@click.option("--lambda", "lam", required=True, help="Damping parameter in [0, 1].")
@click.option("--out", type=click.Path(dir_okay=False))
@guarded
def gpd_from_pd(lam, out):
    """Convert a phase damping parameter to its phase-mixture form."""
    channel = from_phase_damping(parse_angle(lam))
    _write_channel(channel, out)
    sys.exit(EXIT_OK)


def _write_channel(channel, out) -> None:
    text = json.dumps(_json_ready(channel_to_json(channel)), sort_keys=True, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text)


@gpd.command("recognize")
@click.argument("channel_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@guarded
def gpd_recognize(ctx, channel_file):
    """Decide unitary equivalence to a general phase damping channel."""
    raw = load_channel(channel_file)
    channel, _ = _as_analysis_channel(raw)
    result = recognize_gpd(channel, ctx.obj["tol"])
    if result is None:
        if ctx.obj["json"]:
            emit_json({"gpd_recognizable": False})
        else:
            click.echo("not GPD-equivalent")
        sys.exit(EXIT_FALSE)
    u0, form = result
    report = {
        "gpd_recognizable": True,
        "probs": [float(p) for p in form.probs],
        "phases": form.phases.tolist(),
        "u0": matrix_to_json(u0),
    }
    if ctx.obj["json"]:
        emit_json(report)
    else:
        click.echo("GPD-equivalent")
        click.echo(f"probs: {json.dumps(_json_ready(report['probs']))}")
        click.echo(f"phases: {json.dumps(_json_ready(report['phases']))}")
        click.echo(f"u0: {json.dumps(_json_ready(report['u0']))}")
    sys.exit(EXIT_OK)


@gpd.command("probe")
@click.argument("channel_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--samples", type=int, default=10000, show_default=True)
@click.pass_context
@guarded
def gpd_probe(ctx, channel_file, samples):
    """Randomized search for preserved superposition pairs of a qubit GPD."""
    raw = load_channel(channel_file)
    if not isinstance(raw, GPDChannel):
        raise ValueError("the probe needs a gpd-kind channel file")
    report = preserved_set_probe(raw, samples=samples, seed=ctx.obj["seed"])
    emit_json({
        "samples": report.samples,
        "seed": report.seed,
        "pair_tolerance": report.pair_tolerance,
        "anchor_max_error": report.anchor_max_error,
        "min_gap": report.min_gap,
        "preserved_pairs_found": report.found,
    })
    sys.exit(EXIT_OK)


@main.command()
@click.option("--family", type=click.Choice(["rank2", "rank3"]), required=True)
@click.option("--theta", help="Fixed relative phase (rank2).")
@click.option("--theta-grid", help="Phase grid start:stop:count (rank2 one axis, rank3 both).")
@click.option("--p", "p_value", help="Fixed rank-2 mixing parameter.")
@click.option("--p-grid", help="Mixing parameter grid start:stop:count (rank2).")
@click.option("--probs", help="Three fixed branch probabilities (rank3).")
@click.option("--state", help="Input state; defaults to the maximally coherent state.")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output path (default stdout).")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False),
              help="Also render the sweep as a figure at this path.")
@guarded
def sweep(family, theta, theta_grid, p_value, p_grid, probs, state, out, plot_path):
    """Tabulate coherence decay over a parameter grid (CSV, optional figure)."""
    thetas: list[float] = []
    if theta is not None:
        thetas = [parse_angle(theta)]
    if theta_grid is not None:
        thetas = parse_grid(theta_grid)
    state_amps = parse_state(state).amplitudes if state else None
    if family == "rank2":
        ps: list[float] = []
        if p_value is not None:
            ps = [parse_angle(p_value)]
        if p_grid is not None:
            ps = parse_grid(p_grid)
        if not ps or not thetas:
            raise click.UsageError("rank2 sweep needs --p/--p-grid and --theta/--theta-grid")
        spec = SweepSpec("rank2", p_grid=tuple(ps), theta_grid=tuple(thetas),
                         state=tuple(state_amps) if state_amps is not None else None)
    else:
        if probs is None or not thetas:
            raise click.UsageError("rank3 sweep needs --probs and --theta-grid")
        spec = SweepSpec("rank3", theta_grid=tuple(thetas),
                         probs=tuple(parse_float_list(probs)),
                         state=tuple(state_amps) if state_amps is not None else None)
    table = decoherence_sweep(spec)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            table.to_csv(fh)
    else:
        table.to_csv(sys.stdout)
    coherences = [row[-1] for row in table.rows]
    click.echo(
        f"{len(table.rows)} rows; coherence min {fmt(min(coherences))} max {fmt(max(coherences))}",
        err=True,
    )
    if plot_path:
        from .plotting import plot_sweep

        plot_sweep(table, plot_path)
        click.echo(f"figure written to {plot_path}", err=True)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("gpd_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Circuit text path (default stdout).")
@click.option("--verify", is_flag=True, help="Rebuild the channel from the circuit and compare.")
@guarded
def synth(gpd_file, out, verify):
    """Synthesize a circuit realizing a qubit phase damping channel."""
    raw = load_channel(gpd_file)
    if not isinstance(raw, GPDChannel):
        raise ValueError("synthesis needs a gpd-kind channel file")
    circuit = synth_gpd(raw)
    text = emit_text(circuit)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)
    if verify:
        distance = choi_distance(circuit_to_channel(circuit), to_channel(raw))
        click.echo(f"choi distance: {fmt(distance)}", err=True)
        if distance > VERIFY_TOL:
            sys.exit(EXIT_NUMERIC)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("gpd_file", type=click.Path(exists=True, dir_okay=False))
@guarded
def verify(circuit_file, gpd_file):
    """Compare a circuit against a phase damping channel (Choi distance)."""
    with open(circuit_file, "r", encoding="utf-8") as fh:
        circuit = parse_text(fh.read())
    raw = load_channel(gpd_file)
    if not isinstance(raw, GPDChannel):
        raise ValueError("verification needs a gpd-kind channel file")
    distance = choi_distance(circuit_to_channel(circuit), to_channel(raw))
    emit_json({"choi_distance": distance, "pass": bool(distance <= VERIFY_TOL)})
    sys.exit(EXIT_OK if distance <= VERIFY_TOL else EXIT_NUMERIC)


if __name__ == "__main__":
    main()
