"""Acceptance suite: every criterion at its stated tolerance.

One test per criterion; each prints a single ``[acceptance] criterion N``
PASS/FAIL line (run with ``pytest -s`` to see them live).  Expected values
that are not closed forms come from the frozen pre-build brute-force record
in ``fixtures/oracle_values.json`` (regenerated by ``oracles.py``, which
shares no code with the package).
"""

import math
import time

import numpy as np
import pytest

from ioncat import (
    SystemParams,
    TruncationScheme,
    analytic_state,
    apply_pulse_v,
    build_h_full,
    build_h_regime,
    build_h_transformed,
    build_t,
    collapse_measure,
    fidelity,
    initial_state,
    interior_block,
    max_abs,
    parity_diag,
    phase_of_position,
    propagator,
    validation_run,
)
from ioncat.cli import main as cli_main

NU, OMEGA, OMEGA0 = 1.0, 1.0, 0.2
TRUNC = TruncationScheme(n_vib=25, n_cav=8, guard=5)
TIMES = np.linspace(0.0, 2 * np.pi, 64)


def report(number: int, label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" - {detail}" if detail else ""
    print(f"[acceptance] criterion {number} ({label}): {status}{suffix}")


def interior_unitarity(u: np.ndarray, trunc: TruncationScheme) -> float:
    idx = np.where(trunc.interior_mask())[0]
    gram = u.conj().T @ u
    return max_abs(gram[np.ix_(idx, idx)] - np.eye(idx.size))


def protocol_quantities(n_vib: int):
    """Collapse statistics of the pulse-and-measure protocol at nu t = 1."""
    trunc = TruncationScheme(n_vib, 8, 5)
    p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=0.005, eta=0.5)
    pulsed = apply_pulse_v(analytic_state(p, 1.0, trunc))
    res_e = collapse_measure(pulsed, "e")
    res_g = collapse_measure(pulsed, "g")
    par = parity_diag(n_vib)
    return {
        "p_e": res_e.probability,
        "p_g": res_g.probability,
        "parity_e": float(par @ np.abs(res_e.motional) ** 2),
        "parity_g": float(par @ np.abs(res_g.motional) ** 2),
        "max_odd_amp_e": float(np.abs(res_e.motional[1::2]).max()),
    }


def test_criterion_1_transform_identity():
    """Dressed-frame identity residual on the interior block."""
    start = time.monotonic()
    failures = []
    table = []
    for eta in (0.1, 0.5, 1.0, 1.5):
        for g in (0.0, 0.01):
            p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=g, eta=eta)
            h = build_h_full(p, TRUNC)
            t_op = build_t(p, TRUNC)
            ht = build_h_transformed(p, TRUNC)
            residual = max_abs(
                interior_block(t_op.mat @ h.mat @ t_op.mat.conj().T - ht.mat, TRUNC)
            )
            tol = 1e-6 * max_abs(h.mat)
            table.append(f"eta={eta:4.2f} g={g:5.3f}: residual={residual:.3e} tol={tol:.3e}")
            if residual > tol:
                failures.append(table[-1])
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 30.0
    report(1, "transform identity", ok,
           f"{len(failures)} of 8 combinations above tolerance, {elapsed:.1f}s")
    assert elapsed < 30.0
    assert not failures, "interior residual above 1e-6 * |H|_max for:\n" + "\n".join(table)


def test_criterion_2_unitarity_suite():
    p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=0.01, eta=0.5)
    defects = {
        "T^dag T": interior_unitarity(build_t(p, TRUNC).mat, TRUNC),
    }
    d = phase_of_position(TRUNC.n_vib, p.eta / 2)
    vib_idx = np.arange(TRUNC.n_vib - TRUNC.guard)
    defects["D^dag D"] = max_abs(
        (d.conj().T @ d)[np.ix_(vib_idx, vib_idx)] - np.eye(vib_idx.size)
    )
    t_mat = build_t(p, TRUNC).mat
    h_ref = t_mat.conj().T @ build_h_regime(p, TRUNC).mat @ t_mat
    for name, h in (
        ("U_full", build_h_full(p, TRUNC).mat),
        ("U_regime", build_h_regime(p, TRUNC).mat),
        ("U_reference", h_ref),
    ):
        for t in (0.7, 1.9):
            defects[f"{name}(t={t})"] = interior_unitarity(propagator(h, t), TRUNC)
    worst = max(defects.values())
    ok = worst <= 1e-8
    report(2, "unitarity suite", ok, f"worst interior defect {worst:.3e}")
    assert ok, defects


@pytest.fixture(scope="module")
def g0_validation():
    p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=0.0, eta=0.5)
    return validation_run(p, TRUNC, TIMES)


def test_criterion_3_zero_coupling_exactness(g0_validation, oracle):
    worst = float(np.min(g0_validation.fidelity_reference_vs_full))
    ok = worst >= 1 - 1e-8
    report(3, "g = 0 exactness", ok, f"min fidelity {worst:.12f}")
    assert worst >= 1 - 1e-8
    # agrees with the independent Pade-exponential oracle route
    assert worst == pytest.approx(oracle["g0_reference_min_fidelity"], abs=1e-9)


def test_criterion_4_internal_consistency():
    from ioncat import analytic_propagator

    psi0 = initial_state(TRUNC)
    worst = 1.0
    for eta in (0.25, 0.5, 1.0):
        p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=0.005, eta=eta)
        for t in TIMES:
            propagated = analytic_propagator(p, t, TRUNC).mat @ psi0.vec
            worst = min(worst, fidelity(propagated, analytic_state(p, t, TRUNC).vec))
    ok = worst >= 1 - 1e-9
    report(4, "closed-form pair", ok,
           f"min fidelity {worst:.12f} over eta in (0.25, 0.5, 1.0)")
    assert ok


def test_criterion_5_cat_certification(oracle):
    got = protocol_quantities(25)
    expected_p_e = (1 + math.exp(-0.125)) / 2
    checks = {
        "p_e": abs(got["p_e"] - expected_p_e) <= 1e-9,
        "parity_e": abs(got["parity_e"] - 1.0) <= 1e-9,
        "parity_g": abs(got["parity_g"] + 1.0) <= 1e-9,
        "odd_amplitudes_zero": got["max_odd_amp_e"] == 0.0,
    }
    ok = all(checks.values())
    report(5, "cat certification", ok,
           f"p_e={got['p_e']:.12f} (closed form {expected_p_e:.12f})")
    assert ok, (got, checks)
    # cross-check against the frozen brute-force protocol record
    ora = oracle["protocol_nt1"]
    assert got["p_e"] == pytest.approx(ora["p_e"], abs=1e-12)
    assert got["parity_e"] == pytest.approx(ora["parity_e"], abs=1e-9)
    assert got["parity_g"] == pytest.approx(ora["parity_g"], abs=1e-9)


def test_criterion_6_regime_degradation_report(oracle):
    # the frozen record must describe exactly this configuration
    cfg = oracle["config"]
    assert (cfg["nu"], cfg["omega"], cfg["omega0"], cfg["eta"]) == (NU, OMEGA, OMEGA0, 0.5)
    assert (cfg["n_vib"], cfg["n_cav"], cfg["guard"]) == (25, 8, 5)
    assert cfg["n_times"] == len(TIMES) and cfg["t_max"] == pytest.approx(2 * np.pi)

    floors = {}
    deviation_t0 = {}
    for ratio in (10, 50, 100, 1000):
        g = 0.5 * NU / ratio
        p = SystemParams(nu=NU, omega=OMEGA, omega0=OMEGA0, g=g, eta=0.5)
        rep = validation_run(p, TRUNC, TIMES)
        track_b = rep.fidelity_full
        assert track_b.shape == TIMES.shape
        assert np.all(np.isfinite(track_b)) and np.all((track_b >= 0) & (track_b <= 1))
        floors[ratio] = float(np.min(track_b))
        deviation_t0[ratio] = float(rep.deviation_analytic[0])
        assert rep.regime.ratio_drive == pytest.approx(ratio)

    oracle_floor = oracle["track_b_min_fidelity"]["1000"]
    ok = floors[1000] >= oracle_floor - 1e-9
    report(
        6, "regime degradation", ok,
        f"floor(ratio=1000)={floors[1000]:.9f} vs oracle {oracle_floor:.9f}; "
        f"note: far below the informal 0.99 expectation, because the "
        f"closed-form branches never develop under the dressed dynamics",
    )
    assert ok
    # every floor reproduces the independent oracle route
    for ratio, floor in floors.items():
        assert floor == pytest.approx(oracle["track_b_min_fidelity"][str(ratio)], abs=1e-9)
    # the closed-form/reference gap at t = 0 is recorded and nonzero
    for ratio, dev in deviation_t0.items():
        assert np.isfinite(dev) and dev > 0.0


def test_criterion_7_truncation_robustness(oracle):
    base = protocol_quantities(25)
    doubled = protocol_quantities(50)
    diffs = {key: abs(base[key] - doubled[key]) for key in base}
    worst = max(diffs.values())
    ok = worst < 1e-8
    report(7, "truncation robustness", ok, f"max change 25 -> 50: {worst:.3e}")
    assert ok, diffs
    assert doubled["p_e"] == pytest.approx(oracle["protocol_nt1_doubled"]["p_e"], abs=1e-12)


def test_criterion_8_cli_determinism(tmp_path):
    cfg = tmp_path / "protocol.cfg"
    cfg.write_text(
        "scenario = cat-protocol\n"
        "params.eta = 0.5\n"
        "params.g = 0.005\n"
        "trunc.n_vib = 25\n"
        "trunc.n_cav = 8\n"
        "trunc.guard = 5\n"
        "time.t_max = 6.283185307179586\n"
        "time.n_steps = 8\n"
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli_main(["run", "--config", str(cfg), "--output-dir", str(out_a)]) == 0
    assert cli_main(["run", "--config", str(cfg), "--output-dir", str(out_b)]) == 0
    names_a = sorted(f.name for f in out_a.iterdir())
    names_b = sorted(f.name for f in out_b.iterdir())
    identical = names_a == names_b and all(
        (out_a / n).read_bytes() == (out_b / n).read_bytes() for n in names_a
    )
    report(8, "CLI determinism", identical, f"files: {', '.join(names_a)}")
    assert identical
