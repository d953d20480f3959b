"""Scenario runner: flat key-value configs in, deterministic data files out.

Config format: one ``key = value`` per line, ``#`` starts a comment, dotted
keys group related fields (``trunc.n_vib = 25``).  Times in configs are in
units of one over the trap frequency.  Every run writes its data files plus a
``summary.txt`` with the regime report and tolerance outcomes; identical
configs produce byte-identical outputs (floats are printed with 12
significant digits).

Exit codes: 0 success, 1 config or validation error (message on stderr),
2 numerical tolerance violation (guard-band leak from an under-sized
truncation, or a dressed-frame residual above tolerance).

Scenarios
---------
validate-transform   dressed-frame identity and unitarity residuals
evolve-regime        trajectory of the dressed-reference evolution
evolve-full          trajectory of the brute-force full-model evolution
cat-protocol         collapse probabilities, cat fidelities, parities
wigner               phase-space grid of the collapsed motional state

A ``sweep.<field> = v1, v2, ...`` line (field naming a system parameter)
repeats the scenario per value, one output file per point with the value
embedded in the file name.  The environment variable ``IONCAT_SWEEP_JOBS``
selects how many sweep points run in parallel (default: sequential).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from itertools import product
from pathlib import Path

import numpy as np

from .dynamics import (
    TruncationError,
    analytic_state,
    apply_pulse_v,
    cat_protocol,
    collapse_measure,
    phase_space_grid,
    validation_run,
    wigner_grid,
)
from .linalg import DEFAULT_TOLS, max_abs, propagator
from .model import (
    SystemParams,
    build_h_full,
    build_h_transformed,
    build_t,
    regime_report,
)
from .spaces import TruncationScheme, interior_block, phase_of_position

SCENARIOS = (
    "validate-transform",
    "evolve-regime",
    "evolve-full",
    "cat-protocol",
    "wigner",
)

TRAJECTORY_HEADER = (
    "time,norm,fidelity_regime,fidelity_full,p_e,p_g,n_vib_mean,n_cav_mean,parity"
)
WIGNER_HEADER = "alpha_re,alpha_im,w"

PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))

JOBS_ENV = "IONCAT_SWEEP_JOBS"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: SystemParams
    trunc: TruncationScheme
    t_max: float
    n_steps: int
    sweep: tuple              # ((field, (token, ...), (value, ...)), ...)
    output_dir: Path
    wigner_half_width: float
    wigner_points: int
    cat_branches: tuple


def fmt(x: float) -> str:
    """Fixed formatting for all emitted floats: 12 significant digits."""
    return f"{x:.11e}"


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a mapping; duplicates are errors."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {ln}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ValueError(f"config line {ln}: empty key or value")
        if key in out:
            raise ValueError(f"config line {ln}: duplicate key {key!r}")
        out[key] = value
    return out


def _to_float(mapping: dict[str, str], key: str, default: float) -> float:
    if key not in mapping:
        return default
    try:
        return float(mapping.pop(key))
    except ValueError:
        raise ValueError(f"config key {key!r}: not a number") from None


def _to_int(mapping: dict[str, str], key: str, default: int) -> int:
    if key not in mapping:
        return default
    token = mapping.pop(key)
    try:
        return int(token)
    except ValueError:
        raise ValueError(f"config key {key!r}: not an integer") from None


def build_config(
    mapping: dict[str, str], output_dir_override: Path | None = None
) -> ScenarioConfig:
    """Validate a parsed mapping and assemble the typed configuration."""
    mapping = dict(mapping)
    scenario = mapping.pop("scenario", None)
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")

    params = SystemParams(
        nu=_to_float(mapping, "params.nu", 1.0),
        omega=_to_float(mapping, "params.omega", 1.0),
        omega0=_to_float(mapping, "params.omega0", 0.2),
        g=_to_float(mapping, "params.g", 0.005),
        eta=_to_float(mapping, "params.eta", 0.5),
    )
    trunc = TruncationScheme(
        n_vib=_to_int(mapping, "trunc.n_vib", 25),
        n_cav=_to_int(mapping, "trunc.n_cav", 8),
        guard=_to_int(mapping, "trunc.guard", 5),
    )
    t_max = _to_float(mapping, "time.t_max", 2 * np.pi)
    n_steps = _to_int(mapping, "time.n_steps", 64)
    if t_max < 0 or n_steps < 1:
        raise ValueError("time.t_max must be >= 0 and time.n_steps >= 1")

    sweep = []
    for key in sorted(k for k in mapping if k.startswith("sweep.")):
        field_name = key.split(".", 1)[1]
        if field_name not in PARAM_FIELDS:
            raise ValueError(
                f"sweep field {field_name!r} is not a system parameter "
                f"(expected one of {PARAM_FIELDS})"
            )
        tokens = tuple(tok.strip() for tok in mapping.pop(key).split(","))
        if not tokens or any(not tok for tok in tokens):
            raise ValueError(f"config key {key!r}: empty sweep value list")
        try:
            values = tuple(float(tok) for tok in tokens)
        except ValueError:
            raise ValueError(f"config key {key!r}: sweep values must be numbers") from None
        sweep.append((field_name, tokens, values))

    output_dir = Path(mapping.pop("output_dir", "ioncat_out"))
    if output_dir_override is not None:
        output_dir = output_dir_override

    half_width = _to_float(mapping, "wigner.half_width", 1.5)
    points = _to_int(mapping, "wigner.points", 41)
    if half_width <= 0 or points < 2:
        raise ValueError("wigner.half_width must be > 0 and wigner.points >= 2")

    branches_token = mapping.pop("cat.branches", "both")
    branch_map = {
        "both": ("plus", "minus"),
        "plus": ("plus",),
        "minus": ("minus",),
    }
    if branches_token not in branch_map:
        raise ValueError(
            f"cat.branches must be one of {tuple(branch_map)}, got {branches_token!r}"
        )

    if mapping:
        raise ValueError(f"unknown config keys: {sorted(mapping)}")

    return ScenarioConfig(
        scenario=scenario,
        params=params,
        trunc=trunc,
        t_max=t_max,
        n_steps=n_steps,
        sweep=tuple(sweep),
        output_dir=output_dir,
        wigner_half_width=half_width,
        wigner_points=points,
        cat_branches=branch_map[branches_token],
    )


def load_config(path: Path, output_dir_override: Path | None = None) -> ScenarioConfig:
    return build_config(parse_config_text(path.read_text(encoding="utf-8")),
                        output_dir_override)


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------


def _times(cfg: ScenarioConfig, p: SystemParams) -> np.ndarray:
    # config times are in units of 1/nu
    return np.linspace(0.0, cfg.t_max / p.nu, cfg.n_steps)


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _run_validate_transform(cfg: ScenarioConfig, p: SystemParams):
    trunc = cfg.trunc
    h = build_h_full(p, trunc)
    t_op = build_t(p, trunc)
    ht = build_h_transformed(p, trunc)
    resid_mat = t_op.mat @ h.mat @ t_op.mat.conj().T - ht.mat
    residual = max_abs(interior_block(resid_mat, trunc))
    h_max = max_abs(h.mat)
    relative = residual / h_max if h_max else 0.0

    idx = np.where(trunc.interior_mask())[0]
    eye_int = np.eye(idx.size)

    def interior_unitarity(u: np.ndarray) -> float:
        gram = u.conj().T @ u
        return max_abs(gram[np.ix_(idx, idx)] - eye_int)

    d = phase_of_position(trunc.n_vib, p.eta / 2)
    d_gram = d.conj().T @ d
    vib_idx = np.arange(trunc.n_vib - trunc.guard)
    d_unit = max_abs(d_gram[np.ix_(vib_idx, vib_idx)] - np.eye(vib_idx.size))
    rows = [
        ("transform_residual_max", residual),
        ("h_max_abs", h_max),
        ("transform_residual_relative", relative),
        ("tolerance_relative", DEFAULT_TOLS.transform_identity),
        ("t_unitarity_interior", interior_unitarity(t_op.mat)),
        ("displacement_unitarity_interior", d_unit),
        ("propagator_unitarity_interior", interior_unitarity(propagator(h.mat, 1.0))),
    ]
    body = "quantity,value\n" + "\n".join(f"{k},{fmt(v)}" for k, v in rows) + "\n"
    summary = {
        "transform_residual_relative": fmt(relative),
        "transform_within_tolerance": _bool(relative <= DEFAULT_TOLS.transform_identity),
    }
    exit_code = 0 if relative <= DEFAULT_TOLS.transform_identity else 2
    return {"residuals.csv": body}, summary, exit_code


def _run_trajectory(cfg: ScenarioConfig, p: SystemParams):
    report = validation_run(p, cfg.trunc, _times(cfg, p))
    traj = (
        report.trajectory_reference
        if cfg.scenario == "evolve-regime"
        else report.trajectory_full
    )
    rows = zip(
        traj.times, traj.norms, report.fidelity_regime, report.fidelity_full,
        traj.p_e, traj.p_g, traj.n_vib_mean, traj.n_cav_mean, traj.parity,
    )
    summary = {
        "min_fidelity_regime": fmt(float(np.min(report.fidelity_regime))),
        "min_fidelity_full": fmt(float(np.min(report.fidelity_full))),
        "min_fidelity_reference_vs_full": fmt(
            float(np.min(report.fidelity_reference_vs_full))
        ),
        "deviation_analytic_t0": fmt(float(report.deviation_analytic[0])),
        "max_deviation_analytic": fmt(float(np.max(report.deviation_analytic))),
        "max_guard_leak": fmt(float(np.max(traj.guard_leak))),
        "max_norm_error": fmt(float(np.max(np.abs(traj.norms - 1.0)))),
    }
    return {"trajectory.csv": _csv(TRAJECTORY_HEADER, rows)}, summary, 0


def _run_cat_protocol(cfg: ScenarioConfig, p: SystemParams):
    rec = cat_protocol(p, cfg.trunc, _times(cfg, p), cfg.cat_branches)
    header = ["time", "p_e", "p_g"]
    columns = [rec.times, rec.p_e, rec.p_g]
    if "plus" in rec.branches:
        header += ["fidelity_cat_plus", "parity_e"]
        columns += [rec.fidelity_plus, rec.parity_e]
    if "minus" in rec.branches:
        header += ["fidelity_cat_minus", "parity_g"]
        columns += [rec.fidelity_minus, rec.parity_g]
    rows = zip(*columns)
    summary = {
        "branches": "+".join(rec.branches),
        "min_p_e": fmt(float(np.min(rec.p_e))),
    }
    if "plus" in rec.branches:
        summary["min_fidelity_cat_plus"] = fmt(float(np.nanmin(rec.fidelity_plus)))
    if "minus" in rec.branches:
        summary["min_fidelity_cat_minus"] = fmt(float(np.nanmin(rec.fidelity_minus)))
    return {"cat_protocol.csv": _csv(",".join(header), rows)}, summary, 0


def _run_wigner(cfg: ScenarioConfig, p: SystemParams):
    t_final = _times(cfg, p)[-1]
    branch = cfg.cat_branches[0]
    outcome = "e" if branch == "plus" else "g"
    pulsed = apply_pulse_v(analytic_state(p, t_final, cfg.trunc))
    res = collapse_measure(pulsed, outcome, require_cavity_vacuum=True)
    if res.motional is None:
        raise ValueError(
            f"wigner scenario: outcome {outcome!r} has zero probability at "
            f"t = {t_final:.6g}"
        )
    grid = phase_space_grid(cfg.wigner_half_width, cfg.wigner_points)
    w = wigner_grid(res.motional, grid, guard=cfg.trunc.guard)
    rows = zip(grid.real.ravel(), grid.imag.ravel(), w.ravel())
    cell = (2 * cfg.wigner_half_width / (cfg.wigner_points - 1)) ** 2
    summary = {
        "wigner_branch": branch,
        "wigner_riemann_sum": fmt(float(np.sum(w) * cell)),
        "collapse_probability": fmt(res.probability),
    }
    return {"wigner.csv": _csv(WIGNER_HEADER, rows)}, summary, 0


_RUNNERS = {
    "validate-transform": _run_validate_transform,
    "evolve-regime": _run_trajectory,
    "evolve-full": _run_trajectory,
    "cat-protocol": _run_cat_protocol,
    "wigner": _run_wigner,
}


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


def _sweep_points(cfg: ScenarioConfig):
    """Yield (label, params) pairs; a single unlabeled point without sweep."""
    if not cfg.sweep:
        return [("", cfg.params)]
    axes = []
    for field_name, tokens, values in cfg.sweep:
        axes.append([(field_name, tok, val) for tok, val in zip(tokens, values)])
    points = []
    for combo in product(*axes):
        label = "_".join(f"{f}-{tok}" for f, tok, _ in combo)
        overrides = {f: val for f, _, val in combo}
        points.append((label, replace(cfg.params, **overrides)))
    return points


def _run_point(args) -> tuple[str, dict[str, str], int]:
    """Execute one sweep point and write its files; returns (label, summary, code)."""
    cfg, label, params = args
    files, summary, exit_code = _RUNNERS[cfg.scenario](cfg, params)
    for name, content in files.items():
        if label:
            stem, dot, suffix = name.partition(".")
            name = f"{stem}_{label}{dot}{suffix}"
        (cfg.output_dir / name).write_text(content, encoding="utf-8", newline="\n")
    return label, summary, exit_code


def run_scenario(cfg: ScenarioConfig) -> int:
    """Run every point of the (possibly swept) scenario and write the summary."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    points = _sweep_points(cfg)
    jobs = int(os.environ.get(JOBS_ENV, "1"))
    work = [(cfg, label, params) for label, params in points]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, work))
    else:
        results = [_run_point(item) for item in work]

    lines = [f"scenario = {cfg.scenario}"]
    for name in PARAM_FIELDS:
        lines.append(f"params.{name} = {fmt(getattr(cfg.params, name))}")
    lines.append(f"trunc.n_vib = {cfg.trunc.n_vib}")
    lines.append(f"trunc.n_cav = {cfg.trunc.n_cav}")
    lines.append(f"trunc.guard = {cfg.trunc.guard}")
    lines.append(f"time.t_max = {fmt(cfg.t_max)}")
    lines.append(f"time.n_steps = {cfg.n_steps}")

    exit_code = 0
    for (label, params), (_, summary, code) in zip(points, results):
        exit_code = max(exit_code, code)
        prefix = f"point.{label}." if label else ""
        report = regime_report(params)
        entries = {
            "regime.ratio_drive": fmt(report.ratio_drive),
            "regime.ratio_ld": fmt(report.ratio_ld),
            "regime.regime_ok": _bool(report.regime_ok),
            "regime.beyond_ld": _bool(report.beyond_ld),
            **summary,
        }
        lines.extend(f"{prefix}{key} = {value}" for key, value in entries.items())
    lines.append(f"exit = {exit_code}")
    (cfg.output_dir / "summary.txt").write_text(
        "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
    )
    return exit_code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ioncat",
        description="Deterministic scenario runner for the ion-cavity simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="execute a scenario from a config file")
    run_parser.add_argument("--config", required=True, type=Path,
                            help="path to a key-value config file")
    run_parser.add_argument("--output-dir", type=Path, default=None,
                            help="override the config's output directory")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.output_dir)
        return run_scenario(cfg)
    except TruncationError as exc:
        print(f"ioncat: numerical tolerance violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"ioncat: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
