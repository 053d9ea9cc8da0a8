"""Command-line front end.

Invocation::

    dpt <command> --config <file> [--out PATH] [--format csv|json]

with commands {ground-state, steady-states, excitations, stability,
variance, response, sweep, boundary} acting on models {kpo, idtc,
oscillator}.  Configs are line-oriented ``key = value`` text with ``#``
comments; unknown or malformed keys are rejected with one aggregated
report.  Exit codes: 0 success, 2 validation error, 3 numerical failure.

CSV output is deterministic byte-for-byte: a single header line, ``\n``
line endings, floats at 17 significant digits.  JSON output carries the
same rows with full-precision floats and a stable field order.
"""

from __future__ import annotations

import argparse
import json
import sys
import numpy as np
from dataclasses import dataclass, replace

from . import idtc, kpo, oscillator, phasediag, response
from .bogoliubov import QuadraticForm, diagonalize_excitations
from .numerics import (
    BracketingError,
    ConvergenceError,
    DegenerateInputError,
    NumericsError,
    PoleError,
    StabilityError,
    ValidationError,
    eig,
)
from .phasediag import GridSpec

MODELS = ("kpo", "idtc", "oscillator")
COMMANDS = (
    "ground-state",
    "steady-states",
    "excitations",
    "stability",
    "variance",
    "response",
    "sweep",
    "boundary",
)

_COMMON_KEYS = {"model", "command", "format", "out", "mode", "branch", "omega_max", "omega_count", "tol"}
_MODEL_KEYS = {
    "kpo": {"delta", "kerr", "pump_re", "pump_im", "kappa"},
    "idtc": {"omega_c", "omega_z", "lambda_x", "lambda_y", "kappa"},
    "oscillator": {"omega0", "kappa", "sigma", "detuning"},
}
_COMMAND_KEYS = {
    "sweep": {"x_name", "x_start", "x_stop", "x_count", "y_name", "y_start", "y_stop", "y_count"},
    "boundary": {"axis", "axis_start", "axis_stop"},
}
_STRING_KEYS = {"model", "command", "format", "out", "mode", "x_name", "y_name", "axis"}
_INT_KEYS = {"branch", "omega_count", "x_count", "y_count"}

_MODEL_DEFAULTS = {
    "kpo": {"delta": 0.0, "kerr": 1.0, "pump_re": 0.0, "pump_im": 0.0, "kappa": 0.0},
    "idtc": {"omega_c": 1.0, "omega_z": 1.0, "lambda_x": 0.0, "lambda_y": 0.0, "kappa": 0.0},
    "oscillator": {"omega0": 1.0, "kappa": 0.1, "sigma": 1.0, "detuning": 0.0},
}
_SWEEP_DEFAULTS = {
    "kpo": (("delta", -1.0, 1.0, 101), ("pump", 0.0, 1.0, 101)),
    "idtc": (("lambda_x", 0.0, 1.0, 61), ("lambda_y", 0.0, 1.0, 61)),
}
_BOUNDARY_DEFAULTS = {"kpo": ("delta", -2.0, 0.0), "idtc": ("lambda_x", 0.0, 1.0)}

_NUMERICAL_FAILURES = (
    NumericsError,
    StabilityError,
    ConvergenceError,
    PoleError,
    BracketingError,
    DegenerateInputError,
    np.linalg.LinAlgError,
)


@dataclass
class RunConfig:
    """Validated run description (model, command, parameters, output)."""

    model: str
    command: str
    fmt: str
    out: str | None
    mode: str
    branch: int
    omega_max: float | None
    omega_count: int
    tol: float
    params: object
    detuning: float = 0.0
    x: GridSpec | None = None
    y: GridSpec | None = None
    axis: str | None = None
    axis_start: float | None = None
    axis_stop: float | None = None


def _build_params(model: str, values: dict):
    if model == "kpo":
        return kpo.KpoParams(
            delta=values["delta"],
            kerr=values["kerr"],
            pump=complex(values["pump_re"], values["pump_im"]),
            kappa=values["kappa"],
        )
    if model == "idtc":
        return idtc.IdtcParams(
            omega_c=values["omega_c"],
            omega_z=values["omega_z"],
            lambda_x=values["lambda_x"],
            lambda_y=values["lambda_y"],
            kappa=values["kappa"],
        )
    return oscillator.OscParams(
        omega0=values["omega0"], kappa=values["kappa"], sigma=values["sigma"]
    )


def parse_config(text: str, default_command: str | None = None) -> RunConfig:
    """Parse and validate a config document.

    All problems (unknown keys, malformed values, violated parameter
    invariants, missing required keys) are collected into a single
    aggregated ValidationError report.
    """
    errors: list[str] = []
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got '{stripped}'")
            continue
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            errors.append(f"line {lineno}: duplicate key '{key}'")
            continue
        raw[key] = value

    model = raw.get("model")
    if model is None:
        errors.append("missing required key: model (one of kpo, idtc, oscillator)")
    elif model not in MODELS:
        errors.append(f"unknown model '{model}' (one of kpo, idtc, oscillator)")
        model = None

    command = raw.get("command", default_command)
    if command is None:
        errors.append("missing required key: command")
    elif default_command is not None and "command" in raw and raw["command"] != default_command:
        errors.append(
            f"config command '{raw['command']}' contradicts the invoked command '{default_command}'"
        )
    elif command not in COMMANDS:
        errors.append(f"unknown command '{command}'")
        command = None

    allowed = set(_COMMON_KEYS)
    if model is not None:
        allowed |= _MODEL_KEYS[model]
    if command is not None:
        allowed |= _COMMAND_KEYS.get(command, set())
    for key in raw:
        if key not in allowed:
            errors.append(f"unknown key '{key}'")

    def get_float(key, default=None):
        if key not in raw:
            return default
        try:
            return float(raw[key])
        except ValueError:
            errors.append(f"key '{key}': expected a number, got '{raw[key]}'")
            return default

    def get_int(key, default=None):
        if key not in raw:
            return default
        try:
            return int(raw[key])
        except ValueError:
            errors.append(f"key '{key}': expected an integer, got '{raw[key]}'")
            return default

    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        errors.append(f"format must be csv or json, got '{fmt}'")
        fmt = "csv"
    mode = raw.get("mode", "open")
    if mode not in ("open", "closed"):
        errors.append(f"mode must be open or closed, got '{mode}'")
        mode = "open"
    branch = get_int("branch", 0)
    omega_max = get_float("omega_max")
    if omega_max is not None and omega_max <= 0:
        errors.append("omega_max must be > 0")
    omega_count = get_int("omega_count", 4001)
    if omega_count is not None and omega_count < 16:
        errors.append("omega_count must be >= 16")
    tol = get_float("tol", 1e-6)
    if tol is not None and tol <= 0:
        errors.append("tol must be > 0")

    params = None
    detuning = 0.0
    if model is not None:
        values = dict(_MODEL_DEFAULTS[model])
        for key in _MODEL_KEYS[model]:
            values[key] = get_float(key, values[key])
        detuning = values.get("detuning", 0.0)
        try:
            params = _build_params(model, values)
        except ValidationError as exc:
            errors.append(f"invalid parameters: {exc}")

    x_spec = y_spec = None
    axis = axis_start = axis_stop = None
    if command == "sweep" and model in _SWEEP_DEFAULTS:
        dx, dy = _SWEEP_DEFAULTS[model]
        try:
            x_spec = GridSpec(
                name=raw.get("x_name", dx[0]),
                start=get_float("x_start", dx[1]),
                stop=get_float("x_stop", dx[2]),
                count=get_int("x_count", dx[3]),
            )
            y_spec = GridSpec(
                name=raw.get("y_name", dy[0]),
                start=get_float("y_start", dy[1]),
                stop=get_float("y_stop", dy[2]),
                count=get_int("y_count", dy[3]),
            )
        except ValidationError as exc:
            errors.append(f"invalid sweep grid: {exc}")
    elif command in ("sweep", "boundary") and model == "oscillator":
        errors.append(f"command '{command}' does not apply to the oscillator model")
    elif command == "boundary" and model in _BOUNDARY_DEFAULTS:
        da = _BOUNDARY_DEFAULTS[model]
        axis = raw.get("axis", da[0])
        axis_start = get_float("axis_start", da[1])
        axis_stop = get_float("axis_stop", da[2])
        if axis_start is not None and axis_stop is not None and axis_stop <= axis_start:
            errors.append("axis_stop must exceed axis_start")
    if command == "ground-state" and model == "oscillator":
        errors.append("command 'ground-state' does not apply to the oscillator model")
    if command == "steady-states" and model == "oscillator":
        errors.append("command 'steady-states' does not apply to the oscillator model")

    if errors:
        raise ValidationError("configuration errors:\n  - " + "\n  - ".join(errors))
    return RunConfig(
        model=model,
        command=command,
        fmt=fmt,
        out=raw.get("out"),
        mode=mode,
        branch=branch,
        omega_max=omega_max,
        omega_count=omega_count,
        tol=tol,
        params=params,
        detuning=detuning,
        x=x_spec,
        y=y_spec,
        axis=axis,
        axis_start=axis_start,
        axis_stop=axis_stop,
    )


# --------------------------------------------------------------------------
# table assembly
# --------------------------------------------------------------------------

@dataclass
class Table:
    """Columnar result payload shared by the CSV and JSON writers."""

    columns: list
    rows: list


def _max_decay_rate(report) -> float:
    eigs = report.eigenvalues
    if report.constraint_index is not None:
        keep = np.ones(eigs.size, dtype=bool)
        keep[report.constraint_index] = False
        eigs = eigs[keep]
    return float(np.max(eigs.real))


def _select_state(states, branch: int):
    for state in states:
        if state.branch == branch:
            return state
    raise ValidationError(f"no state with branch {branch} at these parameters")


def _ground_state_table(cfg: RunConfig) -> Table:
    if cfg.model == "kpo":
        rows = [
            [s.branch, s.label, s.alpha.real, s.alpha.imag, s.energy]
            for s in kpo.closed_ground_state(cfg.params)
        ]
        return Table(["branch", "label", "alpha_re", "alpha_im", "energy"], rows)
    rows = [
        [s.branch, s.label, s.alpha.real, s.alpha.imag, s.spin_x, s.spin_y, s.spin_z, s.energy]
        for s in idtc.closed_ground_state(cfg.params)
    ]
    return Table(
        ["branch", "label", "alpha_re", "alpha_im", "spin_x", "spin_y", "spin_z", "energy"],
        rows,
    )


def _steady_states_table(cfg: RunConfig) -> Table:
    if cfg.model == "kpo":
        rows = []
        for s in kpo.open_steady_states(cfg.params):
            rep = kpo.stability_report(cfg.params, s, want_covariance=False)
            rows.append(
                [
                    s.branch,
                    s.label,
                    s.alpha.real,
                    s.alpha.imag,
                    abs(s.alpha) ** 2,
                    rep.stable,
                    rep.boundary,
                    _max_decay_rate(rep),
                ]
            )
        return Table(
            ["branch", "label", "alpha_re", "alpha_im", "photon_number", "stable", "boundary", "max_rate"],
            rows,
        )
    rows = []
    for s in idtc.open_steady_states(cfg.params):
        rep = idtc.stability_report(cfg.params, s, want_covariance=False)
        rows.append(
            [
                s.branch,
                s.label,
                s.alpha.real,
                s.alpha.imag,
                s.spin_x,
                s.spin_y,
                s.spin_z,
                rep.stable,
                rep.boundary,
                _max_decay_rate(rep),
            ]
        )
    return Table(
        ["branch", "label", "alpha_re", "alpha_im", "spin_x", "spin_y", "spin_z", "stable", "boundary", "max_rate"],
        rows,
    )


def _excitations_table(cfg: RunConfig) -> Table:
    if cfg.model == "oscillator":
        values, overdamped = oscillator.overdamped_eigenvalues(cfg.params)
        rows = [[v.real, v.imag, overdamped] for v in values]
        return Table(["eigenvalue_re", "eigenvalue_im", "overdamped"], rows)
    if cfg.model == "kpo":
        state = _select_state(kpo.closed_ground_state(cfg.params), cfg.branch)
        modes, _ = diagonalize_excitations(kpo.closed_excitation_form(cfg.params, state))
        rows = [
            [m.frequency.real, m.frequency.imag, m.symplectic_norm, m.physical]
            for m in modes
        ]
        return Table(["frequency_re", "frequency_im", "norm", "physical"], rows)
    pairs = idtc.closed_np_excitations(cfg.params)
    rows = []
    for kind, pair in (("soft", pairs.soft), ("hard", pairs.hard)):
        for m in pair:
            rows.append([kind, m.frequency.real, m.frequency.imag, m.symplectic_norm, m.physical])
    return Table(["kind", "frequency_re", "frequency_im", "norm", "physical"], rows)


def _stability_table(cfg: RunConfig) -> Table:
    if cfg.model == "oscillator":
        values, overdamped = oscillator.overdamped_eigenvalues(cfg.params)
        stable = bool(np.max(np.real(values)) < -1e-9)
        rows = [[stable, overdamped, values[0].real, values[0].imag, values[1].real, values[1].imag]]
        return Table(["stable", "overdamped", "eig1_re", "eig1_im", "eig2_re", "eig2_im"], rows)
    if cfg.model == "kpo":
        rows = []
        for s in kpo.open_steady_states(cfg.params):
            rep = kpo.stability_report(cfg.params, s, want_covariance=False)
            e = rep.eigenvalues
            rows.append(
                [s.branch, s.label, rep.stable, rep.boundary, rep.overdamped,
                 e[0].real, e[0].imag, e[1].real, e[1].imag]
            )
        return Table(
            ["branch", "label", "stable", "boundary", "overdamped",
             "eig1_re", "eig1_im", "eig2_re", "eig2_im"],
            rows,
        )
    rows = []
    for s in idtc.open_steady_states(cfg.params):
        rep = idtc.stability_report(cfg.params, s, want_covariance=False)
        e = rep.eigenvalues
        row = [s.branch, s.label, rep.stable, rep.boundary, rep.overdamped,
               -1 if rep.constraint_index is None else rep.constraint_index]
        for v in e:
            row.extend([v.real, v.imag])
        rows.append(row)
    cols = ["branch", "label", "stable", "boundary", "overdamped", "constraint_index"]
    for k in range(1, 6):
        cols.extend([f"eig{k}_re", f"eig{k}_im"])
    return Table(cols, rows)


def _variance_table(cfg: RunConfig) -> Table:
    if cfg.model == "oscillator":
        var_pos, var_mom = oscillator.overdamped_variance(cfg.params)
        return Table(["var_position", "var_momentum"], [[var_pos, var_mom]])
    if cfg.model == "kpo":
        states = kpo.open_steady_states(cfg.params)
        state = _select_state(states, cfg.branch)
        rep = kpo.stability_report(cfg.params, state, want_covariance=True)
        if rep.covariance is None:
            raise StabilityError(
                "no stationary covariance: state unstable or loss-free"
            )
        k = rep.covariance
        rows = [["lyapunov", k[0, 0], k[1, 1], k[0, 1]]]
        if state.branch == 0:
            var_re, var_im = kpo.np_variance_closed_form(cfg.params)
            rows.insert(0, ["closed_form", var_re, var_im, k[0, 1]])
        return Table(["route", "var_re", "var_im", "cov_re_im"], rows)
    states = idtc.open_steady_states(cfg.params)
    state = _select_state(states, cfg.branch)
    rep = idtc.stability_report(cfg.params, state, want_covariance=True)
    if rep.covariance is None:
        raise StabilityError("no stationary covariance: state unstable or loss-free")
    rows = []
    for i in range(rep.covariance.shape[0]):
        for j in range(rep.covariance.shape[1]):
            rows.append([i, j, rep.covariance[i, j]])
    return Table(["row", "col", "covariance"], rows)


def _response_table(cfg: RunConfig) -> Table:
    if cfg.model == "oscillator":
        p = cfg.params
        if p.kappa <= 0:
            raise StabilityError("response requires kappa > 0")
        # rotating-frame single mode at the configured detuning
        form = QuadraticForm(np.diag([-cfg.detuning, -cfg.detuning]).astype(complex))
        losses = (p.kappa,)
        poles = response.greens_poles(form, losses)
        grid = response.build_default_grid(poles, cfg.omega_max, cfg.omega_count)
        gset = response.keldysh_green(form, losses, grid)
    else:
        gset = _model_greens(cfg)
    table = response.build_spectra(gset)
    rows = [
        [w, a, c, s]
        for w, a, c, s in zip(table.omega, table.spectral, table.power, table.fluorescence)
    ]
    return Table(["omega", "A", "C", "S"], rows)


def _model_greens(cfg: RunConfig):
    if cfg.model == "kpo":
        states = kpo.open_steady_states(cfg.params)
        state = _select_state(states, cfg.branch)
        rep = kpo.stability_report(cfg.params, state, want_covariance=False)
        if not (rep.stable or rep.boundary):
            raise StabilityError("response requires a dynamically stable state")
        if state.branch == 0:
            form, losses = kpo.keldysh_fluctuation_form(cfg.params, state)
            poles = response.greens_poles(form, losses)
            grid = response.build_default_grid(poles, cfg.omega_max, cfg.omega_count)
            return response.keldysh_green(form, losses, grid)
        jac = kpo.fluctuation_matrix(cfg.params, state)
        poles = 1j * eig(jac).values
        grid = response.build_default_grid(poles, cfg.omega_max, cfg.omega_count)
        return response.response_from_jacobian(jac, (cfg.params.kappa,), response.kpo_quadrature_map(), grid)
    states = idtc.open_steady_states(cfg.params)
    state = _select_state(states, cfg.branch)
    rep = idtc.stability_report(cfg.params, state, want_covariance=False)
    if not (rep.stable or rep.boundary):
        raise StabilityError("response requires a dynamically stable state")
    if state.branch == 0:
        form, losses = idtc.keldysh_fluctuation_form_np(cfg.params)
        poles = response.greens_poles(form, losses)
        grid = response.build_default_grid(poles, cfg.omega_max, cfg.omega_count)
        return response.keldysh_green(form, losses, grid)
    jac_r, _ = idtc.tangent_system(cfg.params, state)
    poles = 1j * eig(jac_r).values
    grid = response.build_default_grid(poles, cfg.omega_max, cfg.omega_count)
    return response.response_from_jacobian(
        jac_r, (cfg.params.kappa, 0.0), response.cavity_only_map(), grid
    )


def _sweep_table(cfg: RunConfig) -> Table:
    diagram = phasediag.sweep(cfg.model, cfg.params, cfg.x, cfg.y, mode=cfg.mode)
    xs, ys = cfg.x.values(), cfg.y.values()
    rows = []
    for iy in range(cfg.y.count):
        for ix in range(cfg.x.count):
            rows.append(
                [xs[ix], ys[iy], diagram.labels[iy, ix].value, bool(diagram.boundary_mask[iy, ix])]
            )
    return Table([cfg.x.name, cfg.y.name, "label", "boundary"], rows)


def _boundary_table(cfg: RunConfig) -> Table:
    low = replace(cfg.params, **{cfg.axis: cfg.axis_start})
    high = replace(cfg.params, **{cfg.axis: cfg.axis_stop})
    point = phasediag.trace_boundary(cfg.model, low, high, mode=cfg.mode, tol=cfg.tol)
    value = getattr(point.params, cfg.axis)
    if isinstance(value, complex):
        value = value.real
    return Table(
        ["t", cfg.axis, "label_low", "label_high"],
        [[point.t, float(value), point.label_low.value, point.label_high.value]],
    )


_BUILDERS = {
    "ground-state": _ground_state_table,
    "steady-states": _steady_states_table,
    "excitations": _excitations_table,
    "stability": _stability_table,
    "variance": _variance_table,
    "response": _response_table,
    "sweep": _sweep_table,
    "boundary": _boundary_table,
}


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------

def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def render_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_cell(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def render_json(cfg: RunConfig, table: Table) -> str:
    payload = {
        "model": cfg.model,
        "command": cfg.command,
        "mode": cfg.mode,
        "columns": list(table.columns),
        "rows": [[_json_cell(v) for v in row] for row in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the process exit status."""
    try:
        table = _BUILDERS[cfg.command](cfg)
        text = render_csv(table) if cfg.fmt == "csv" else render_json(cfg, table)
    except ValidationError as exc:
        print(f"dpt: validation error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_FAILURES as exc:
        print(f"dpt: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dpt",
        description="Mean-field phases, excitations, and Keldysh response of "
        "driven-dissipative models (kpo, idtc, oscillator).",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="key = value config file")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", default=None, choices=("csv", "json"))
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"dpt: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text, default_command=args.command)
    except ValidationError as exc:
        print(f"dpt: {exc}", file=sys.stderr)
        return 2
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.fmt = args.format
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
