"""Command-line interface: config ingestion, dispatch, CSV and manifest output.

Config files are flat INI-style text with ``[system]``, ``[integration]``
and optional ``[sweep]`` sections, one assignment per line, ``#`` comments.
All frequencies are in units of the cavity frequency omega, lengths in
units of the wavelength lambda, times in units of 1/omega, so figure-style
parameter sets transcribe literally::

    [system]
    g0 = 1.0
    kappa = 0.1
    omega0 = 0.99
    L = 0.5
    d = 0.0
    mode = nonrwa

Exit codes: 0 success, 2 parse error, 3 validation error, 4 integration
failure, 5 convergence failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import ConfigParseError, IntegrationError, ValidationError
from .evolution import OBSERVABLE_NAMES, FullState, Trajectory, evolve
from .experiment import (
    MIN_WIDTH,
    ZERO_TOL,
    AuditResult,
    SweepResult,
    SweepSpec,
    convergence_audit,
    detect_dead_intervals,
    run_sweep,
)
from .model import Mode, SystemConfig, initial_state

_SYSTEM_KEYS = {
    "omega": ("omega", float, "cavity frequency (the frequency unit)"),
    "omega0": ("omega0", float, "qubit transition frequency [omega]"),
    "g0": ("g0", float, "peak qubit-cavity coupling [omega]"),
    "kappa": ("kappa", float, "cavity damping rate [omega]"),
    "L": ("L", float, "cavity size [lambda]"),
    "lambda": ("lam", float, "cavity wavelength (the length unit)"),
    "d": ("d", float, "inter-qubit distance [lambda]"),
    "n_max": ("n_max", int, "Fock-space truncation [photons]"),
    "mode": ("mode", Mode.parse, "interaction treatment: rwa | nonrwa"),
    "kind": ("kind", str, "initial Bell state: s | a | alpha | beta"),
}
_INTEGRATION_KEYS = {
    "dt": ("dt", float, "integrator step [1/omega]"),
    "t_end": ("t_end", float, "final time [1/omega]"),
    "sample_every": ("sample_every", int, "output decimation [steps]"),
}
_SWEEP_KEYS = ("d_values", "d_count", "modes")

#: Column layouts of the emitted CSV files.
TRAJECTORY_COLUMNS = (
    "t",
    "C_wootters",
    "C_block",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "abs_rho23",
    "abs_rho14",
    "n_photon",
    "trace_err",
)
SURFACE_COLUMNS = ("mode", "d", "t", "C_wootters", "C_block", "rho44")
ESD_COLUMNS = ("mode", "d", "t_start", "t_end", "width")
AUDIT_COLUMNS = ("parameter", "levels", "max_deviation", "tolerance", "passed", "order_ratio")


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved configuration: system parameters plus optional sweep."""

    system: SystemConfig
    sweep: SweepSpec | None


def _fmt(x: float) -> str:
    """Fixed scientific notation with 12 significant digits."""
    return f"{x:.11e}"


def _read_section(parser, section, known, target, path):
    if not parser.has_section(section):
        return
    for key, raw in parser.items(section):
        if key not in known:
            raise ConfigParseError(f"{path}: unknown key '{key}' in section [{section}]")
        attr, convert, _ = known[key]
        try:
            target[attr] = convert(raw)
        except (ValueError, ValidationError) as exc:
            raise ConfigParseError(
                f"{path}: bad value for {section}.{key}: {raw!r} ({exc})"
            ) from exc


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


def parse_config(path: str | Path) -> RunConfig:
    """Parse and resolve a config file; raises ConfigParseError on bad input.

    Validation of the resolved values happens separately (see
    :meth:`SystemConfig.validate`), mapping to exit code 3 instead of 2.
    """
    path = Path(path)
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",), interpolation=None, strict=True
    )
    parser.optionxform = str  # keep 'L' distinct from 'l'
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc

    for section in parser.sections():
        if section not in ("system", "integration", "sweep"):
            raise ConfigParseError(f"{path}: unknown section [{section}]")

    values: dict = {}
    _read_section(parser, "system", _SYSTEM_KEYS, values, path)
    _read_section(parser, "integration", _INTEGRATION_KEYS, values, path)
    system = SystemConfig(**values)

    sweep = None
    if parser.has_section("sweep"):
        raw = dict(parser.items("sweep"))
        unknown = set(raw) - set(_SWEEP_KEYS)
        if unknown:
            raise ConfigParseError(
                f"{path}: unknown key '{sorted(unknown)[0]}' in section [sweep]"
            )
        if "d_values" in raw and "d_count" in raw:
            raise ConfigParseError(f"{path}: give either sweep.d_values or sweep.d_count, not both")
        try:
            if "d_values" in raw:
                d_values = _parse_float_list(raw["d_values"])
            else:
                count = int(raw.get("d_count", 26))
                if count < 1:
                    raise ValueError("d_count must be >= 1")
                d_values = tuple(float(x) for x in np.linspace(0.0, system.L, count))
            modes = tuple(
                Mode.parse(tok) for tok in raw.get("modes", "rwa, nonrwa").split(",") if tok.strip()
            )
        except (ValueError, ValidationError) as exc:
            raise ConfigParseError(f"{path}: bad value in section [sweep]: {exc}") from exc
        # Deterministic mode-major output order: modes sorted by name.
        modes = tuple(sorted(set(modes), key=lambda m: m.value))
        sweep = SweepSpec(base=system, d_values=d_values, modes=modes)
    return RunConfig(system=system, sweep=sweep)


def _canonical_lines(run: RunConfig) -> list[str]:
    """One ``section.key=value`` line per consumed value, fixed order."""
    s = run.system
    lines = [
        f"system.omega={s.omega!r}",
        f"system.omega0={s.omega0!r}",
        f"system.g0={s.g0!r}",
        f"system.kappa={s.kappa!r}",
        f"system.L={s.L!r}",
        f"system.lambda={s.lam!r}",
        f"system.d={s.d!r}",
        f"system.n_max={s.n_max!r}",
        f"system.mode={s.mode.value}",
        f"system.kind={s.kind}",
        f"integration.dt={s.dt!r}",
        f"integration.t_end={s.t_end!r}",
        f"integration.sample_every={s.sample_every!r}",
    ]
    if run.sweep is not None:
        lines.append("sweep.d_values=" + ",".join(repr(d) for d in run.sweep.d_values))
        lines.append("sweep.modes=" + ",".join(m.value for m in run.sweep.modes))
    return lines


def config_digest(run: RunConfig) -> str:
    """Content digest over every consumed value; changes when any of them does."""
    text = "\n".join(_canonical_lines(run))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def resolved_dump(run: RunConfig) -> str:
    """The resolved configuration as parseable config text, units annotated."""
    s = run.system
    out = ["# resolved configuration (all defaults materialized)"]
    out.append(f"# config_digest = {config_digest(run)}")
    out.append("")
    out.append("[system]")
    for key, (attr, _, unit) in _SYSTEM_KEYS.items():
        value = getattr(s, attr)
        value = value.value if isinstance(value, Mode) else repr(value) if not isinstance(value, str) else value
        out.append(f"{key} = {value}  # {unit}")
    out.append("")
    out.append("[integration]")
    for key, (attr, _, unit) in _INTEGRATION_KEYS.items():
        out.append(f"{key} = {getattr(s, attr)!r}  # {unit}")
    if run.sweep is not None:
        out.append("")
        out.append("[sweep]")
        out.append("d_values = " + ", ".join(repr(d) for d in run.sweep.d_values) + "  # [lambda]")
        out.append("modes = " + ", ".join(m.value for m in run.sweep.modes))
    out.append("")
    return "\n".join(out)


def write_manifest(
    out_dir: Path,
    command: str,
    run: RunConfig,
    outputs: list[str],
    extra: dict[str, str] | None = None,
) -> Path:
    """Write the reproduction manifest next to the data files."""
    lines = [
        f"tool = cavityesd {__version__}",
        f"command = {command}",
        f"backend = {kernels.default_backend()}",
        f"config_digest = {config_digest(run)}",
    ]
    lines += [f"output = {name}" for name in outputs]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append("# resolved configuration consumed by this run")
    lines += _canonical_lines(run)
    path = out_dir / "manifest.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def _write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    columns = [traj.times] + [traj.observable(name) for name in OBSERVABLE_NAMES]
    rows = ([_fmt(col[k]) for col in columns] for k in range(len(traj)))
    _write_csv(path, TRAJECTORY_COLUMNS, rows)


def write_surface_csv(path: Path, result: SweepResult) -> None:
    def rows():
        for mode in result.spec.modes:
            surf = result.surfaces[mode]
            for k, d in enumerate(surf.d_values):
                for j, t in enumerate(surf.times):
                    yield (
                        mode.value,
                        _fmt(d),
                        _fmt(t),
                        _fmt(surf.c_wootters[k, j]),
                        _fmt(surf.c_block[k, j]),
                        _fmt(surf.rho44[k, j]),
                    )

    _write_csv(path, SURFACE_COLUMNS, rows())


def write_esd_csv(path: Path, result: SweepResult) -> None:
    def rows():
        for mode in result.spec.modes:
            surf = result.surfaces[mode]
            for k, d in enumerate(surf.d_values):
                for iv in detect_dead_intervals(surf.c_wootters[k], surf.times):
                    yield (mode.value, _fmt(d), _fmt(iv.t_start), _fmt(iv.t_end), _fmt(iv.width))

    _write_csv(path, ESD_COLUMNS, rows())


def write_audit_csv(path: Path, audit: AuditResult) -> None:
    def row(report):
        return (
            report.parameter,
            ";".join(repr(level) for level in report.levels),
            _fmt(report.deviations[0]),
            _fmt(report.tolerance),
            "true" if report.passed else "false",
            _fmt(report.order_ratio) if report.order_ratio is not None else "",
        )

    _write_csv(path, AUDIT_COLUMNS, [row(audit.n_max_report), row(audit.dt_report)])


def audit_text(audit: AuditResult) -> str:
    lines = []
    for report in (audit.n_max_report, audit.dt_report):
        status = "PASS" if report.passed else "FAIL"
        levels = " -> ".join(f"{level:g}" for level in report.levels)
        devs = ", ".join(f"{d:.3e}" for d in report.deviations)
        lines.append(f"{status} {report.parameter}: levels {levels}, deviation(s) {devs}, "
                     f"tolerance {report.tolerance:g}")
        if report.order_ratio is not None:
            lines.append(f"     step-halving error ratio {report.order_ratio:.2f} (RK4 target 16)")
        if report.concurrence_deviation is not None:
            lines.append(f"     concurrence deviation (informational) "
                         f"{report.concurrence_deviation:.3e}")
        if report.failure:
            lines.append(f"     {report.failure}")
    return "\n".join(lines)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityesd",
        description="Two qubits in a damped cavity: master-equation dynamics and entanglement",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate one trajectory and write trajectory.csv"),
        ("sweep", "sweep distance and mode grids; write surface.csv and esd.csv"),
        ("audit", "run the truncation and step-size convergence audit"),
        ("validate", "print the fully resolved configuration and exit"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="path to the config file")
        cmd.add_argument("--out", default=".", help="output directory (default: current)")
        cmd.add_argument("--mode", choices=["rwa", "nonrwa"], help="override the configured mode")
        cmd.add_argument(
            "--threads", type=int, default=1,
            help="sweep worker processes; 0 = one per CPU (default: 1)",
        )
    return parser


def _apply_mode_override(run: RunConfig, mode_text: str | None) -> RunConfig:
    if mode_text is None:
        return run
    mode = Mode.parse(mode_text)
    system = run.system.replace(mode=mode)
    sweep = run.sweep
    if sweep is not None:
        sweep = SweepSpec(base=system, d_values=sweep.d_values, modes=(mode,))
    return RunConfig(system=system, sweep=sweep)


def _cmd_simulate(run: RunConfig, out_dir: Path, threads: int) -> int:
    config = run.system
    config.validate()
    layout = config.layout()
    rho0 = FullState(layout, initial_state(config.kind, layout))
    traj = evolve(rho0, config)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out_dir / "trajectory.csv", traj)
    write_manifest(
        out_dir,
        "simulate",
        run,
        ["trajectory.csv"],
        extra={"c_block_mismatch_samples": str(traj.block_mismatch_count())},
    )
    print(f"wrote {out_dir / 'trajectory.csv'} ({len(traj)} samples)")
    return 0


def _cmd_sweep(run: RunConfig, out_dir: Path, threads: int) -> int:
    if run.sweep is None:
        raise ValidationError("the sweep command needs a [sweep] section in the config")
    run.sweep.validate()
    result = run_sweep(run.sweep, workers=threads)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_surface_csv(out_dir / "surface.csv", result)
    write_esd_csv(out_dir / "esd.csv", result)
    mismatch = sum(
        int(np.sum(np.abs(surf.c_wootters - surf.c_block) > 1e-6))
        for surf in result.surfaces.values()
    )
    write_manifest(
        out_dir,
        "sweep",
        run,
        ["surface.csv", "esd.csv"],
        extra={"c_block_mismatch_samples": str(mismatch)},
    )
    print(f"wrote {out_dir / 'surface.csv'} and {out_dir / 'esd.csv'}")
    return 0


def _cmd_audit(run: RunConfig, out_dir: Path, threads: int) -> int:
    run.system.validate()
    audit = convergence_audit(run.system, include_order_check=True)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_audit_csv(out_dir / "audit.csv", audit)
    write_manifest(out_dir, "audit", run, ["audit.csv"])
    print(audit_text(audit))
    return 0 if audit.passed else 5


def _cmd_validate(run: RunConfig, out_dir: Path, threads: int) -> int:
    run.system.validate()
    if run.sweep is not None:
        run.sweep.validate()
    print(resolved_dump(run))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "audit": _cmd_audit,
        "validate": _cmd_validate,
    }[args.command]
    try:
        run = parse_config(args.config)
        run = _apply_mode_override(run, args.mode)
        return handler(run, Path(args.out), args.threads)
    except ConfigParseError as exc:
        print(f"config parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
