"""Command-line front end: config ingestion, simulation runs, deterministic logs.

Subcommands
-----------
simulate <config> [--preset paper_default] [--out DIR]
    Run the configured scenario, write ``trajectory.csv`` and ``summary.txt``.
certify <config> [--preset paper_default]
    Build the stability certificate and print it in the summary format.
align <csv> [--preset paper_default | --config FILE] [--out PATH]
    Remove the final-time yaw/translation offset from a finished log and
    write the re-aligned CSV.

Identical configs produce byte-identical CSV files and, apart from the
trailing wall-clock line, byte-identical summaries.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (
    MetricRecord,
    align_estimate,
    build_certificate,
    total_error,
)
from .errors import (
    GainConditionViolated,
    LislamError,
    NonFiniteState,
    NotHurwitz,
    ParseError,
    ValidationError,
    YawDegenerate,
)
from .matgroups import E3, ExtendedPose, so3_exp
from .observer import Gains, init_auxiliary
from .simkit import (
    INTEGRATORS,
    CircularProfile,
    ConstantProfile,
    InitialState,
    ScenarioConfig,
    TableProfile,
    TrajectoryLog,
    _batch_metrics,
    reference_scenario,
    run_simulation,
)
from .slam_core import build_structural

__all__ = ["parse_config", "emit_csv", "build_summary", "run_command", "main"]

log = logging.getLogger("lislam")

PRESETS = ("paper_default",)


def _fmt(x: float) -> str:
    """17 significant digits, scientific; the summary float format."""
    return f"{float(x):.16e}"


# ---------------------------------------------------------------------------
# config parsing


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(where, f"unknown keys {sorted(unknown)}")


def _as_vec3(value, where: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(where, "must be a 3-vector")
    return arr


def _as_rot(value, where: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3, 3):
        raise ValidationError(where, "must be a 3x3 matrix")
    return arr


def _parse_init(section: dict, n: int, where: str) -> InitialState:
    _reject_unknown(section, {"r", "v", "x", "landmarks"}, where)
    for key in ("r", "v", "x", "landmarks"):
        if key not in section:
            raise ValidationError(f"{where}.{key}", "is required")
    landmarks = np.asarray(section["landmarks"], dtype=float)
    if landmarks.shape != (n, 3):
        raise ValidationError(f"{where}.landmarks", f"must be {n} rows of [x, y, z]")
    return InitialState(
        r=_as_rot(section["r"], f"{where}.r"),
        v=_as_vec3(section["v"], f"{where}.v"),
        x=_as_vec3(section["x"], f"{where}.x"),
        landmarks=landmarks.T,
    )


def _parse_profile(section: dict, where: str):
    _reject_unknown(section, {"kind", "omega", "accel", "times"}, where)
    kind = section.get("kind")
    if kind == "circular":
        return CircularProfile()
    if kind == "constant":
        return ConstantProfile(
            omega=_as_vec3(section.get("omega", [0, 0, 0]), f"{where}.omega"),
            accel=_as_vec3(section.get("accel", [0, 0, 0]), f"{where}.accel"),
        )
    if kind == "table":
        for key in ("times", "omega", "accel"):
            if key not in section:
                raise ValidationError(f"{where}.{key}", "is required for table profiles")
        times = np.asarray(section["times"], dtype=float)
        omega = np.asarray(section["omega"], dtype=float)
        accel = np.asarray(section["accel"], dtype=float)
        if omega.shape != (len(times), 3) or accel.shape != (len(times), 3):
            raise ValidationError(where, "omega/accel must have one 3-vector per time")
        return TableProfile(times=times, omega=omega, accel=accel)
    raise ValidationError(f"{where}.kind", "must be circular, constant, or table")


def _default_with_warning(section: dict, key: str, default, where: str):
    if key in section:
        return section[key]
    log.warning("%s.%s missing, defaulting to %r", where, key, default)
    return default


def parse_config(path: str | Path | None, preset: str | None = None) -> ScenarioConfig:
    """Load and validate a scenario config.

    With ``preset='paper_default'`` the reference scenario provides every
    value and the file (if given) overrides individual keys.  Unknown keys
    are rejected; defaulted keys are logged as warnings.

    Raises
    ------
    ParseError
        On malformed JSON (with line and column).
    ValidationError
        On unknown keys, missing required keys, or constraint violations.
    """
    if preset is not None and preset not in PRESETS:
        raise ValidationError("preset", f"must be one of {PRESETS}")

    raw: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
        if not isinstance(raw, dict):
            raise ValidationError("config", "top level must be an object")

    _reject_unknown(raw, {"scenario", "flags"}, "config")
    scenario = dict(raw.get("scenario", {}))
    flags = dict(raw.get("flags", {}))
    _reject_unknown(
        scenario,
        {
            "n", "g", "duration_s", "rate_hz", "integrator", "gains",
            "true_init", "est_init", "input_profile",
        },
        "scenario",
    )
    _reject_unknown(flags, {"orthonormalize_rotations", "debug_sync_check"}, "flags")

    base = reference_scenario() if preset == "paper_default" else None
    if base is None:
        for key in ("n", "gains", "true_init", "est_init"):
            if key not in scenario:
                raise ValidationError(f"scenario.{key}", "is required without a preset")

    n = int(scenario.get("n", base.n if base else 0))
    if n < 1:
        raise ValidationError("scenario.n", "must be at least 1")

    g = float(
        scenario["g"] if "g" in scenario
        else (base.g if base else _default_with_warning(scenario, "g", 9.81, "scenario"))
    )
    duration_s = float(
        scenario["duration_s"] if "duration_s" in scenario
        else (base.duration_s if base else _default_with_warning(scenario, "duration_s", 10.0, "scenario"))
    )
    rate_hz = float(
        scenario["rate_hz"] if "rate_hz" in scenario
        else (base.rate_hz if base else _default_with_warning(scenario, "rate_hz", 500.0, "scenario"))
    )
    integrator = str(
        scenario["integrator"] if "integrator" in scenario
        else (base.integrator if base else _default_with_warning(scenario, "integrator", "euler", "scenario"))
    )
    if integrator not in INTEGRATORS:
        raise ValidationError("scenario.integrator", f"must be one of {INTEGRATORS}")

    if "gains" in scenario:
        gains_raw = dict(scenario["gains"])
        _reject_unknown(gains_raw, {"k_r", "k_v", "k_x", "k_p"}, "scenario.gains")
        for key in ("k_r", "k_v", "k_x", "k_p"):
            if key not in gains_raw:
                raise ValidationError(f"scenario.gains.{key}", "is required")
        gains = Gains(**{k: float(v) for k, v in gains_raw.items()})
    else:
        gains = base.gains
    try:
        gains.validate(n)
    except GainConditionViolated as exc:
        raise ValidationError("scenario.gains", f"stability conditions violated: {exc}") from exc

    true_init = (
        _parse_init(dict(scenario["true_init"]), n, "scenario.true_init")
        if "true_init" in scenario
        else base.true_init
    )
    est_init = (
        _parse_init(dict(scenario["est_init"]), n, "scenario.est_init")
        if "est_init" in scenario
        else base.est_init
    )
    profile = (
        _parse_profile(dict(scenario["input_profile"]), "scenario.input_profile")
        if "input_profile" in scenario
        else (base.input_profile if base else CircularProfile())
    )
    if base is None and "input_profile" not in scenario:
        log.warning("scenario.input_profile missing, defaulting to circular")

    cfg = ScenarioConfig(
        n=n,
        g=g,
        duration_s=duration_s,
        rate_hz=rate_hz,
        integrator=integrator,
        gains=gains,
        true_init=true_init,
        est_init=est_init,
        input_profile=profile,
        orthonormalize_rotations=bool(flags.get("orthonormalize_rotations", True)),
        debug_sync_check=bool(flags.get("debug_sync_check", False)),
    )
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# CSV emission


def _csv_header(n: int) -> list[str]:
    cols = ["t"]
    state = [f"R{i}{j}" for i in range(3) for j in range(3)]
    state += ["vx", "vy", "vz", "x1", "x2", "x3"]
    state += [f"p{i}_{j}" for i in range(1, n + 1) for j in (1, 2, 3)]
    cols += state
    cols += [f"hat_{name}" for name in state]
    cols += ["err_att_reduced", "err_vel_body"]
    cols += [f"err_lm{i}_body" for i in range(1, n + 1)]
    cols += ["lyap_V", "lyap_L", "roll_err", "pitch_err", "yaw_err", "err_pos_inertial"]
    cols += [f"err_lm{i}_inertial" for i in range(1, n + 1)]
    return cols


def _state_cells(pose: ExtendedPose) -> list[float]:
    return (
        [pose.r[i, j] for i in range(3) for j in range(3)]
        + list(pose.v)
        + list(pose.x)
        + [pose.landmarks[j, i] for i in range(pose.n) for j in range(3)]
    )


def _metric_cells(m: MetricRecord) -> list[float]:
    return (
        [m.att_reduced, m.vel_body]
        + list(m.lm_body)
        + [m.lyap_v, m.lyap_l, m.roll_err, m.pitch_err, m.yaw_err, m.pos_inertial]
        + list(m.lm_inertial)
    )


def _write_csv(
    path: str | Path,
    times: np.ndarray,
    true_states: list[ExtendedPose],
    est_states: list[ExtendedPose],
    metrics: list[MetricRecord],
) -> None:
    n = true_states[0].n
    lines = [",".join(_csv_header(n))]
    for t in range(len(times)):
        cells = (
            [float(times[t])]
            + _state_cells(true_states[t])
            + _state_cells(est_states[t])
            + _metric_cells(metrics[t])
        )
        lines.append(",".join(repr(float(c)) for c in cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def emit_csv(log_: TrajectoryLog, path: str | Path) -> None:
    """Write a trajectory log in the fixed CSV schema.

    One header row, then one row per sample; floats use the shortest
    round-trip decimal form and lines end with LF.
    """
    if len(log_) == 0:
        raise ValidationError("log", "must contain at least one sample")
    _write_csv(path, log_.times, log_.true_states, log_.est_states, log_.metrics)


def read_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read a trajectory CSV back into (times, r, v, rhat, vhat) arrays."""
    text = Path(path).read_text(encoding="utf-8").strip().split("\n")
    header = text[0].split(",")
    n_lm = sum(1 for name in header if re.fullmatch(r"p\d+_1", name))
    expected = _csv_header(n_lm)
    if header != expected:
        raise ValidationError("csv", "header does not match the trajectory schema")
    data = np.array([[float(cell) for cell in line.split(",")] for line in text[1:]])
    k = n_lm + 2
    times = data[:, 0]
    true_block = data[:, 1 : 1 + 9 + 3 * k]
    est_block = data[:, 1 + 9 + 3 * k : 1 + 2 * (9 + 3 * k)]

    def unpack(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        r = block[:, :9].reshape(-1, 3, 3)
        cols = block[:, 9:].reshape(-1, k, 3)  # v, x, p_i as row triples
        return r, np.swapaxes(cols, 1, 2)

    r, v = unpack(true_block)
    rh, vh = unpack(est_block)
    return times, r, v, rh, vh


# ---------------------------------------------------------------------------
# summary


@dataclass(frozen=True)
class SummaryReport:
    """Deterministic run summary; wall clock is the only nonreproducible field."""

    config_echo: list[tuple[str, str]]
    step_count: int
    eigenvalues: list[complex]
    lyapunov_residual: float
    final_metrics: list[tuple[str, float]]
    wall_clock_s: float

    def to_text(self) -> str:
        lines = ["[config]"]
        lines += [f"{key} = {value}" for key, value in self.config_echo]
        lines.append("[certificate]")
        for i, ev in enumerate(self.eigenvalues, start=1):
            lines.append(f"eigenvalue_{i} = {_fmt(ev.real)} {'+' if ev.imag >= 0 else '-'} {_fmt(abs(ev.imag))}j")
        lines.append(f"lyapunov_residual = {_fmt(self.lyapunov_residual)}")
        lines.append("[result]")
        lines.append(f"step_count = {self.step_count}")
        lines += [f"{key} = {_fmt(value)}" for key, value in self.final_metrics]
        lines.append(f"wall_clock_s = {_fmt(self.wall_clock_s)}")
        return "\n".join(lines) + "\n"


def _echo_config(cfg: ScenarioConfig) -> list[tuple[str, str]]:
    def vec(a: np.ndarray) -> str:
        return " ".join(_fmt(x) for x in np.asarray(a).reshape(-1))

    items = [
        ("n", str(cfg.n)),
        ("g", _fmt(cfg.g)),
        ("duration_s", _fmt(cfg.duration_s)),
        ("rate_hz", _fmt(cfg.rate_hz)),
        ("integrator", cfg.integrator),
        ("gains.k_r", _fmt(cfg.gains.k_r)),
        ("gains.k_v", _fmt(cfg.gains.k_v)),
        ("gains.k_x", _fmt(cfg.gains.k_x)),
        ("gains.k_p", _fmt(cfg.gains.k_p)),
        ("true_init.r", vec(cfg.true_init.r)),
        ("true_init.v", vec(cfg.true_init.v)),
        ("true_init.x", vec(cfg.true_init.x)),
        ("true_init.landmarks", vec(cfg.true_init.landmarks)),
        ("est_init.r", vec(cfg.est_init.r)),
        ("est_init.v", vec(cfg.est_init.v)),
        ("est_init.x", vec(cfg.est_init.x)),
        ("est_init.landmarks", vec(cfg.est_init.landmarks)),
        ("input_profile", cfg.input_profile.kind),
    ]
    if isinstance(cfg.input_profile, ConstantProfile):
        items.append(("input_profile.omega", vec(cfg.input_profile.omega)))
        items.append(("input_profile.accel", vec(cfg.input_profile.accel)))
    elif isinstance(cfg.input_profile, TableProfile):
        items.append(("input_profile.samples", str(len(cfg.input_profile.times))))
        items.append(("input_profile.times", vec(cfg.input_profile.times)))
        items.append(("input_profile.omega", vec(cfg.input_profile.omega)))
        items.append(("input_profile.accel", vec(cfg.input_profile.accel)))
    items += [
        ("orthonormalize_rotations", str(cfg.orthonormalize_rotations).lower()),
        ("debug_sync_check", str(cfg.debug_sync_check).lower()),
    ]
    return items


def _sorted_eigenvalues(values: np.ndarray) -> list[complex]:
    return sorted((complex(v) for v in values), key=lambda c: (c.real, c.imag))


def build_summary(cfg: ScenarioConfig, log_: TrajectoryLog, wall_clock_s: float) -> SummaryReport:
    sm = build_structural(cfg.n, cfg.g)
    cert = build_certificate(cfg.gains, sm)
    residual = float(
        np.linalg.norm(
            cert.a_mat @ cert.p_mat + cert.p_mat @ cert.a_mat.T + np.eye(cfg.n + 1)
        )
    )
    final = log_.metrics[-1]
    final_metrics = [
        ("final.err_att_reduced", final.att_reduced),
        ("final.err_vel_body", final.vel_body),
    ]
    final_metrics += [
        (f"final.err_lm{i + 1}_body", float(val)) for i, val in enumerate(final.lm_body)
    ]
    final_metrics += [
        ("final.lyap_V", final.lyap_v),
        ("final.lyap_L", final.lyap_l),
        ("final.roll_err", final.roll_err),
        ("final.pitch_err", final.pitch_err),
        ("final.yaw_err", final.yaw_err),
        ("final.err_pos_inertial", final.pos_inertial),
    ]
    return SummaryReport(
        config_echo=_echo_config(cfg),
        step_count=len(log_),
        eigenvalues=_sorted_eigenvalues(cert.eigenvalues),
        lyapunov_residual=residual,
        final_metrics=final_metrics,
        wall_clock_s=wall_clock_s,
    )


# ---------------------------------------------------------------------------
# subcommands


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lislam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    sim = sub.add_parser("simulate", help="run a scenario and emit CSV + summary")
    sim.add_argument("config", nargs="?", default=None)
    sim.add_argument("--preset", choices=PRESETS, default=None)
    sim.add_argument("--out", default=".", help="output directory")
    sim.add_argument("--kernel", choices=("auto", "pure", "compiled"), default="auto")

    cert = sub.add_parser("certify", help="print the stability certificate")
    cert.add_argument("config", nargs="?", default=None)
    cert.add_argument("--preset", choices=PRESETS, default=None)

    align = sub.add_parser("align", help="remove the final frame offset from a log")
    align.add_argument("csv")
    align.add_argument("--preset", choices=PRESETS, default=None)
    align.add_argument("--config", default=None)
    align.add_argument("--out", default=None, help="output CSV path")
    return parser


def _load_config(args) -> ScenarioConfig:
    if args.config is None and args.preset is None:
        raise ValidationError("config", "either a config file or --preset is required")
    return parse_config(args.config, preset=args.preset)


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    backend = None if args.kernel == "auto" else args.kernel
    start = time.perf_counter()
    log_ = run_simulation(cfg, backend=backend)
    wall = time.perf_counter() - start
    emit_csv(log_, out_dir / "trajectory.csv")
    summary = build_summary(cfg, log_, wall)
    (out_dir / "summary.txt").write_text(summary.to_text(), encoding="utf-8", newline="\n")
    print(f"wrote {out_dir / 'trajectory.csv'} ({len(log_)} samples)")
    return 0


def _cmd_certify(args) -> int:
    cfg = _load_config(args)
    sm = build_structural(cfg.n, cfg.g)
    cert = build_certificate(cfg.gains, sm)
    residual = float(
        np.linalg.norm(
            cert.a_mat @ cert.p_mat + cert.p_mat @ cert.a_mat.T + np.eye(cfg.n + 1)
        )
    )
    lines = ["[certificate]"]
    lines.append(f"n = {cfg.n}")
    for key in ("k_r", "k_v", "k_x", "k_p"):
        lines.append(f"gains.{key} = {_fmt(getattr(cfg.gains, key))}")
    for i, ev in enumerate(_sorted_eigenvalues(cert.eigenvalues), start=1):
        lines.append(
            f"eigenvalue_{i} = {_fmt(ev.real)} {'+' if ev.imag >= 0 else '-'} {_fmt(abs(ev.imag))}j"
        )
    lines.append(f"lyapunov_residual = {_fmt(residual)}")
    lines.append(f"q = {_fmt(cert.q)}")
    lines.append(f"local_rate = {_fmt(cert.local_rate)}")
    print("\n".join(lines))
    return 0


def _cmd_align(args) -> int:
    if args.preset is None and args.config is None:
        args = argparse.Namespace(**{**vars(args), "preset": "paper_default"})
        log.warning("no gains source given, using the paper_default preset")
    cfg = parse_config(args.config, preset=args.preset)
    times, r, v, rh, vh = read_csv(args.csv)

    sm = build_structural(cfg.n, cfg.g)
    z = init_auxiliary(cfg.gains, sm)
    cert = build_certificate(cfg.gains, sm)

    x_final = ExtendedPose(r[-1], v[-1])
    xh_final = ExtendedPose(rh[-1], vh[-1])
    e_bar = total_error(x_final, xh_final, z)
    transform, _ = align_estimate(xh_final, e_bar)

    # re-express every estimate through the inverse frame action in batch
    r_s = so3_exp(transform.theta * E3)
    rh_al = np.einsum("ij,tjk->tik", r_s, rh)
    vh_al = np.einsum("ij,tjk->tik", r_s, vh)
    vh_al[:, :, 1:] += transform.t[None, :, None]

    metrics = _batch_metrics(r, v, rh_al, vh_al, z, sm, cert)
    out = Path(args.out) if args.out else Path(args.csv).with_name(
        Path(args.csv).stem + "_aligned.csv"
    )
    _write_csv(
        out,
        times,
        [ExtendedPose(r[t], v[t]) for t in range(len(times))],
        [ExtendedPose(rh_al[t], vh_al[t]) for t in range(len(times))],
        metrics,
    )
    print(f"wrote {out} (yaw removed: {transform.theta:.6f} rad)")
    return 0


def run_command(argv: list[str] | None = None) -> int:
    """Entry point; returns 0 on success, 1 on bad input, 2 on numerical failure."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "certify":
            return _cmd_certify(args)
        if args.command == "align":
            return _cmd_align(args)
        raise _UsageError(f"unknown subcommand {args.command!r}")
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NotHurwitz, NonFiniteState, YawDegenerate, GainConditionViolated) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except LislamError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    sys.exit(run_command())
