"""Command line tool: verification suites, eigenstructure scans and runs.

Subcommands:

  check    kinetic-oracle verification of the closure over a (Z, D) grid
  eigen    characteristic speeds, coupling condition and convexity at a state
  run      march a configured scenario, writing snapshot and diagnostic CSVs
  relax    homogeneous relaxation against the exact exponential solution
  nslimit  stiff-limit comparison of Pi with the bulk-viscosity relation
  sweep    (Z, D) property sweeps: hyperbolicity, round trips, convexity

Exit codes: 0 all enabled assertions pass, 1 an assertion failed, 2 usage
or configuration error.  Identical config and seed give byte-identical CSV
output.  Output directory resolution: --output-dir flag, then the config
[output] directory, then $ET6_OUTPUT_DIR, then ./et6_out.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .closure import distribution_value, entropy_parts, equilibrium_distribution_value
from .config import ConfigError, RunConfig, apply_updates, load_config
from .eigen import (
    convexity_check,
    et6_sound_speed,
    euler_sound_speed,
    hyperbolicity_scan,
    k_condition,
    wave_fan,
)
from .gas import State6, conserved_from_primitive
from .oracle import (
    QuadratureSpec,
    mep_optimality_probe,
    oracle_constraint_check,
    oracle_entropy,
    oracle_flux_check,
    rel_err,
)
from .closure import multipliers_from_state, state_from_multipliers
from .solver import Scenario, bulk_viscosity, ns_limit_diagnostic, run_scenario


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _status(ok: bool, name: str, detail: str = "") -> bool:
    mark = "PASS" if ok else "FAIL"
    suffix = f": {detail}" if detail else ""
    print(f"[{mark}] {name}{suffix}")
    return ok


def _resolve_output_dir(args, cfg: RunConfig) -> Path:
    if getattr(args, "output_dir", None):
        chosen = args.output_dir
    elif cfg.output.directory:
        chosen = cfg.output.directory
    elif os.environ.get("ET6_OUTPUT_DIR"):
        chosen = os.environ["ET6_OUTPUT_DIR"]
    else:
        chosen = "et6_out"
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _quick_config(cfg: RunConfig) -> RunConfig:
    """Scale sweep sizes and quadrature orders down roughly eightfold."""
    check = replace(
        cfg.check,
        hermite_order=max(8, cfg.check.hermite_order // 8),
        laguerre_order=max(8, cfg.check.laguerre_order // 8),
        grid_z_count=max(2, cfg.check.grid_z_count // 2),
        grid_d_values=cfg.check.grid_d_values[::3] or cfg.check.grid_d_values,
        probe_betas=cfg.check.probe_betas[:1],
    )
    sweep = replace(
        cfg.sweep,
        z_count=max(5, cfg.sweep.z_count // 3),
        d_count=max(5, cfg.sweep.d_count // 3),
        round_trip_points=max(13, cfg.sweep.round_trip_points // 8),
        convexity_states=max(6, cfg.sweep.convexity_states // 8),
    )
    n_quick = max(64, cfg.nslimit.N // 2)
    nslimit = replace(
        cfg.nslimit,
        N=n_quick,
        # keep dt (hence the splitting error) fixed as the grid coarsens
        cfl=cfg.nslimit.cfl * n_quick / cfg.nslimit.N,
        t_end=cfg.nslimit.t_end / 4.0,
    )
    return replace(cfg, check=check, sweep=sweep, nslimit=nslimit)


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def cmd_check(cfg: RunConfig, out_dir: Path) -> bool:
    chk = cfg.check
    quad = QuadratureSpec(
        hermite_order=chk.hermite_order,
        laguerre_order=chk.laguerre_order,
        adaptive_tol=chk.adaptive_tol,
        flux_tol=chk.flux_tol,
        validate=chk.validate,
    )
    velocity = np.array([0.4, -0.25, 0.15])
    rows: list[list] = []
    ok = True
    worst_moment = 0.0
    worst_flux = 0.0
    worst_entropy = 0.0
    worst_decomp = 0.0
    for d_val in chk.grid_d_values:
        spec = replace(cfg.gas, D=float(d_val))
        zs = np.linspace(-0.9, chk.z_span * spec.z_upper, chk.grid_z_count)
        for z in zs:
            p0 = spec.gas_constant * 1.0 * 1.0
            s = State6(rho=1.0, v=velocity, T=1.0, Pi=float(z) * p0)
            tag = f"[D={d_val:g},Z={z:.4g}]"
            for rep in oracle_constraint_check(s, spec, quad):
                rows.append([rep.quantity + tag, rep.closed_form, rep.quadrature,
                             rep.rel_err, rep.rule])
                worst_moment = max(worst_moment, rep.rel_err)
            flux_reports = oracle_flux_check(s, spec, quad, raise_on_failure=False)
            for rep in flux_reports:
                rows.append([rep.quantity + tag, rep.closed_form, rep.quadrature,
                             rep.rel_err, rep.rule])
                worst_flux = max(worst_flux, rep.rel_err)
            h_quad = oracle_entropy(s, spec, quad)
            parts = entropy_parts(s, spec)
            e_h = rel_err(h_quad, parts.h)
            e_split = rel_err(parts.h, parts.h_E + s.rho * parts.k)
            worst_entropy = max(worst_entropy, e_h)
            worst_decomp = max(worst_decomp, e_split)
            rows.append(["entropy" + tag, parts.h, h_quad, e_h, "gauss"])
    ok &= _status(worst_moment <= chk.moment_tol, "constraint moments",
                  f"max rel err {worst_moment:.3e} <= {chk.moment_tol:g}")
    ok &= _status(worst_flux <= chk.flux_tol, "closed fluxes",
                  f"max rel err {worst_flux:.3e} <= {chk.flux_tol:g}")
    ok &= _status(worst_entropy <= chk.entropy_tol, "entropy quadrature",
                  f"max rel err {worst_entropy:.3e} <= {chk.entropy_tol:g}")
    ok &= _status(worst_decomp <= chk.decomposition_tol, "entropy decomposition",
                  f"max rel err {worst_decomp:.3e} <= {chk.decomposition_tol:g}")

    # equilibrium reduction on a 10x10x10 (C, I) sample
    worst_eq = 0.0
    spec = cfg.gas
    s_eq = State6(rho=1.3, v=0.0, T=0.8, Pi=0.0)
    for cx in np.linspace(-2.5, 2.5, 10):
        for cy in np.linspace(-2.0, 2.0, 10):
            for i_val in np.linspace(0.0, 4.0, 10):
                f = distribution_value([cx, cy, 0.3], i_val, s_eq, spec)
                f_eq = equilibrium_distribution_value([cx, cy, 0.3], i_val, 1.3, 0.8, spec)
                worst_eq = max(worst_eq, rel_err(f, f_eq))
    ok &= _status(worst_eq <= chk.equilibrium_tol, "equilibrium reduction",
                  f"max rel err {worst_eq:.3e} <= {chk.equilibrium_tol:g}")

    # optimality probe (non-convergence is reported, not fatal)
    s_probe = State6(rho=1.0, v=0.0, T=1.0, Pi=0.3 * spec.gas_constant)
    probe = mep_optimality_probe(s_probe, spec, trial_amplitudes=chk.probe_betas)
    if probe.inconclusive:
        print("[WARN] optimality probe inconclusive (trial solve did not converge)")
    else:
        ok &= _status(probe.optimal, "entropy optimality probe",
                      f"h(beta) <= h(0) across betas {chk.probe_betas}")
    for point in probe.points:
        rows.append([f"probe_entropy[beta={point.beta:g}]", probe.reference_entropy,
                     point.entropy, rel_err(point.entropy, probe.reference_entropy),
                     "radial+laguerre"])

    path = _write_csv(out_dir / "oracle_report.csv",
                      ["quantity", "closed_form", "quadrature", "rel_err", "rule"],
                      rows)
    print(f"report: {path}")
    return bool(ok)


# ---------------------------------------------------------------------------
# eigen
# ---------------------------------------------------------------------------

def cmd_eigen(cfg: RunConfig, out_dir: Path, args) -> bool:
    spec = cfg.gas
    rho = args.rho
    if args.p is not None:
        temperature = args.p * spec.m / (rho * spec.kB)
    else:
        temperature = args.T
    p0 = spec.gas_constant * rho * temperature
    s = State6(rho=rho, v=[args.vx, args.vy, args.vz], T=temperature, Pi=args.Z * p0)
    n = np.array([args.nx, args.ny, args.nz])
    u = conserved_from_primitive(s, spec)
    fan = wave_fan(u, n, spec)
    print("speeds: " + "  ".join(f"{v:+.7f}" for v in fan.speeds))
    ok = True
    at_equilibrium = abs(args.Z) < 1e-12
    k_overall = ""
    k_marginal = ""
    if at_equilibrium:
        krep = k_condition(u, n, spec)
        k_overall = krep.overall_pass
        k_marginal = krep.marginal
        ok &= _status(krep.overall_pass, "coupling condition",
                      "all six eigenvectors couple to the production"
                      + (" (marginal)" if krep.marginal else ""))
    conv = convexity_check(u, spec, grad_tol=cfg.sweep.gradient_tol)
    ok &= _status(conv.passed, "entropy convexity",
                  f"gradient mismatch {conv.gradient_mismatch:.3e}, "
                  f"max Hessian eigenvalue {conv.hessian_max_eigenvalue:.3e}")
    header = ["D", "rho", "T", "Z", "vx", "vy", "vz", "nx", "ny", "nz",
              "speed_1", "speed_2", "speed_3", "speed_4", "speed_5", "speed_6",
              "k_condition_pass", "k_condition_marginal",
              "gradient_mismatch", "hessian_max_eigenvalue", "convexity_pass",
              "reduced_confidence"]
    row = [spec.D, rho, temperature, args.Z, args.vx, args.vy, args.vz,
           args.nx, args.ny, args.nz, *fan.speeds.tolist(),
           k_overall, k_marginal, conv.gradient_mismatch,
           conv.hessian_max_eigenvalue, conv.passed, conv.reduced_confidence]
    path = _write_csv(out_dir / "eigen_report.csv", header, [row])
    print(f"report: {path}")
    return bool(ok)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _write_timeseries(ts, out_dir: Path, prefix: str) -> list[Path]:
    files = []
    for idx, (t, snap) in enumerate(zip(ts.snapshot_times, ts.snapshots)):
        rows = [
            [x, snap["rho"][j], snap["vx"][j], snap["T"][j], snap["p"][j],
             snap["Pi"][j], snap["Pi_over_p"][j], snap["h"][j], snap["k"][j]]
            for j, x in enumerate(ts.x)
        ]
        files.append(_write_csv(
            out_dir / f"{prefix}_snapshot_{idx:04d}.csv",
            ["x", "rho", "vx", "T", "p", "Pi", "Pi_over_p", "h", "k"],
            rows,
        ))
    diag_rows = [
        [ts.diag_t[i], ts.total_F[i], ts.total_Fx[i], ts.total_Gll[i],
         ts.total_entropy[i], ts.max_abs_z[i], ts.projections[i]]
        for i in range(len(ts.diag_t))
    ]
    files.append(_write_csv(
        out_dir / f"{prefix}_diagnostics.csv",
        ["t", "total_F", "total_Fx", "total_Gll", "total_entropy",
         "max_abs_Z", "projections"],
        diag_rows,
    ))
    return files


def cmd_run(cfg: RunConfig, out_dir: Path) -> bool:
    sc = cfg.build_scenario()
    ts = run_scenario(sc)
    files = _write_timeseries(ts, out_dir, "run")
    ok = True
    if sc.boundary == "periodic":
        worst = 0.0
        for series in (ts.total_F, ts.total_Fx, ts.total_Gll):
            arr = np.array(series)
            scale = max(abs(arr[0]), float(np.max(np.abs(arr))), 1e-300)
            worst = max(worst, float(np.max(np.abs(arr - arr[0]))) / scale)
        ok &= _status(worst <= cfg.scenario.conservation_tol, "conservation",
                      f"max drift {worst:.3e} <= {cfg.scenario.conservation_tol:g}")
    h = np.array(ts.total_entropy)
    min_step = float(np.min(np.diff(h))) if len(h) > 1 else 0.0
    bound = -cfg.scenario.entropy_step_tol * abs(h[0])
    ok &= _status(min_step >= bound, "entropy monotonicity",
                  f"min step change {min_step:.3e} >= {bound:.3e}")
    ok &= _status(ts.projections[-1] == 0, "admissibility",
                  f"{ts.projections[-1]} projections")
    print(f"wrote {len(files)} files to {out_dir}")
    return bool(ok)


# ---------------------------------------------------------------------------
# relax
# ---------------------------------------------------------------------------

def cmd_relax(cfg: RunConfig, out_dir: Path) -> bool:
    spec = cfg.gas
    z0 = cfg.relax.z0
    t_end = cfg.relax.t_end if cfg.relax.t_end > 0 else min(1.0, 10.0 * spec.tau)
    cadence = cfg.relax.cadence if cfg.relax.cadence > 0 else t_end / 20.0
    sc = Scenario(kind="uniform_relaxation", spec=spec, N=50, t_end=t_end,
                  output_cadence=cadence, z0=z0)
    ts = run_scenario(sc)
    p0 = spec.gas_constant * 1.0 * 1.0
    rows = []
    worst = 0.0
    for t, snap in zip(ts.snapshot_times, ts.snapshots):
        exact = z0 * p0 * math.exp(-t / spec.tau)
        measured = float(snap["Pi"][0])
        err = abs(measured - exact)
        worst = max(worst, err)
        rows.append([t, measured, exact, err])
    path = _write_csv(out_dir / "relax.csv", ["t", "Pi", "Pi_exact", "abs_err"], rows)
    ok = _status(worst <= cfg.relax.tol * p0, "exact relaxation",
                 f"max |Pi - Pi0 exp(-t/tau)| = {worst:.3e} <= {cfg.relax.tol:g} * p")
    print(f"report: {path}")
    return bool(ok)


# ---------------------------------------------------------------------------
# nslimit
# ---------------------------------------------------------------------------

def cmd_nslimit(cfg: RunConfig, out_dir: Path) -> bool:
    ns = cfg.nslimit
    spec = replace(cfg.gas, tau=ns.tau)
    sc = Scenario(kind="smooth_wave", spec=spec, N=ns.N, x_left=0.0,
                  x_right=ns.domain_length, wavelength=ns.domain_length,
                  cfl=ns.cfl, t_end=ns.t_end, amplitude=ns.amplitude,
                  scheme="muscl", limiter="minmod", pi_init="ns")
    ts = run_scenario(sc)
    rep = ns_limit_diagnostic(ts, spec, mask_fraction=ns.mask_fraction)
    rows = [[x, rep.pi[j], rep.target[j]] for j, x in enumerate(rep.x)]
    path = _write_csv(out_dir / "nslimit.csv", ["x", "Pi", "minus_nu_dvdx"], rows)
    bound = ns.deviation_factor * ns.tau
    p0 = spec.gas_constant  # rho0 = T0 = 1 in the stiff-limit scenario
    nu = bulk_viscosity(p0, spec)
    print(f"bulk viscosity nu = {nu:.6g} at p = {p0:g}, tau = {ns.tau:g}")
    ok = _status(rep.max_rel_deviation <= bound, "stiff-limit relation",
                 f"max rel deviation {rep.max_rel_deviation:.3e} <= {bound:g}"
                 + (" [reduced confidence]" if rep.reduced_confidence else ""))
    print(f"report: {path}")
    return bool(ok)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(cfg: RunConfig, out_dir: Path) -> bool:
    sw = cfg.sweep
    ok = True
    rows_summary: list[list] = []

    d_values = np.linspace(sw.d_min, sw.d_max, sw.d_count)
    points = hyperbolicity_scan(d_values, n_z=sw.z_count, coverage=sw.coverage)
    hyp_rows = [[p.D, p.z, p.max_imag_over_scale, p.all_real] for p in points]
    _write_csv(out_dir / "sweep_hyperbolicity.csv",
               ["D", "Z", "max_imag_over_scale", "all_real"], hyp_rows)
    n_bad = sum(0 if p.all_real else 1 for p in points)
    hyp_ok = n_bad == 0
    ok &= _status(hyp_ok, "hyperbolicity scan",
                  f"{len(points)} states, {n_bad} with complex speeds")
    rows_summary.append(["hyperbolicity", f"{len(points)} states", n_bad, 0, hyp_ok])

    worst_rt = 0.0
    for d_val in (3.5, 4.0, 5.0, 7.0, 12.0):
        spec = replace(cfg.gas, D=float(d_val))
        for z in np.linspace(-0.97, 0.97 * spec.z_upper, sw.round_trip_points):
            p0 = spec.gas_constant
            s = State6(rho=1.0, v=0.0, T=1.0, Pi=float(z) * p0)
            mul = multipliers_from_state(s, spec)
            rho, ppi, rho_eps = state_from_multipliers(mul, spec)
            worst_rt = max(worst_rt,
                           rel_err(rho, 1.0),
                           rel_err(ppi, p0 + s.Pi),
                           rel_err(rho_eps, 0.5 * spec.D * p0))
    rt_ok = worst_rt <= sw.round_trip_tol
    ok &= _status(rt_ok, "closure round trip",
                  f"max rel err {worst_rt:.3e} <= {sw.round_trip_tol:g}")
    rows_summary.append(["closure_round_trip", "multipliers<->state", worst_rt,
                         sw.round_trip_tol, rt_ok])

    for d_val in sw.k_d_values:
        spec = replace(cfg.gas, D=float(d_val))
        u = conserved_from_primitive(State6(rho=1.0, v=0.0, T=1.0, Pi=0.0), spec)
        krep = k_condition(u, [1, 0, 0], spec)
        ok &= _status(krep.overall_pass, f"coupling condition D={d_val:g}",
                      "marginal" if krep.marginal else "")
        rows_summary.append([f"k_condition_D_{d_val:g}", "equilibrium",
                             int(krep.overall_pass), 1, krep.overall_pass])
        fan = wave_fan(u, [1, 0, 0], spec)
        expected = et6_sound_speed(1.0, spec.gas_constant)
        speed_err = abs(fan.speeds[-1] - expected) / expected
        sp_ok = speed_err <= sw.speed_tol
        ok &= _status(sp_ok, f"sound speed D={d_val:g}",
                      f"rel err {speed_err:.3e}")
        rows_summary.append([f"sound_speed_D_{d_val:g}", "vs sqrt(5p/3rho)",
                             speed_err, sw.speed_tol, sp_ok])

    rng = np.random.default_rng(cfg.output.seed)
    n_fail = 0
    n_reduced = 0
    for _ in range(sw.convexity_states):
        d_val = float(rng.choice([4.0, 5.0, 7.0]))
        spec = replace(cfg.gas, D=d_val)
        rho = float(rng.uniform(0.5, 2.0))
        temperature = float(rng.uniform(0.5, 2.0))
        v = rng.uniform(-1.0, 1.0, size=3)
        z = float(rng.uniform(-0.7, 0.7 * spec.z_upper))
        p0 = spec.gas_constant * rho * temperature
        s = State6(rho=rho, v=v, T=temperature, Pi=z * p0)
        rep = convexity_check(conserved_from_primitive(s, spec), spec,
                              grad_tol=sw.gradient_tol)
        n_fail += 0 if rep.passed else 1
        n_reduced += 1 if rep.reduced_confidence else 0
    conv_ok = n_fail == 0
    ok &= _status(conv_ok, "convexity sweep",
                  f"{sw.convexity_states} random states, {n_fail} failures, "
                  f"{n_reduced} reduced-confidence")
    rows_summary.append(["convexity", f"{sw.convexity_states} random states",
                         n_fail, 0, conv_ok])

    sub_ok = True
    for d_val in np.linspace(3.0 + 1e-6, sw.d_max, 25):
        sub_ok &= euler_sound_speed(1.0, 1.0, float(d_val)) <= et6_sound_speed(1.0, 1.0) + 1e-15
    ok &= _status(bool(sub_ok), "subcharacteristic ordering",
                  "five-field speed <= six-field speed across D")
    rows_summary.append(["subcharacteristic", "speed ordering", int(sub_ok), 1, sub_ok])

    path = _write_csv(out_dir / "sweep_report.csv",
                      ["check", "detail", "value", "threshold", "passed"],
                      rows_summary)
    print(f"report: {path}")
    return bool(ok)


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="et6",
        description="Six-field moment model of a polyatomic gas: "
                    "verification suites and 1-D solver runs.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style configuration file")
    common.add_argument("--output-dir", help="directory for CSV reports")
    common.add_argument("--quick", action="store_true",
                        help="scale sweeps and quadrature orders down ~8x")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps")
    common.add_argument("--D", type=float, help="degrees of freedom (> 3)")
    common.add_argument("--m", type=float, help="molecular mass")
    common.add_argument("--kB", type=float, help="Boltzmann constant")
    common.add_argument("--tau", type=float, help="relaxation time")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check", help="kinetic-oracle verification suite", parents=[common])

    p_eigen = sub.add_parser("eigen", help="characteristic analysis at a state",
                             parents=[common])
    p_eigen.add_argument("--rho", type=float, default=1.0)
    p_eigen.add_argument("--T", type=float, default=1.0)
    p_eigen.add_argument("--p", type=float, default=None,
                         help="pressure (overrides --T)")
    p_eigen.add_argument("--Z", type=float, default=0.0, help="Pi / p")
    p_eigen.add_argument("--vx", type=float, default=0.0)
    p_eigen.add_argument("--vy", type=float, default=0.0)
    p_eigen.add_argument("--vz", type=float, default=0.0)
    p_eigen.add_argument("--nx", type=float, default=1.0)
    p_eigen.add_argument("--ny", type=float, default=0.0)
    p_eigen.add_argument("--nz", type=float, default=0.0)

    p_run = sub.add_parser("run", help="march a scenario and emit CSVs",
                           parents=[common])
    p_run.add_argument("--kind", choices=("riemann", "smooth_wave", "uniform_relaxation"))
    p_run.add_argument("--N", type=int)
    p_run.add_argument("--cfl", type=float)
    p_run.add_argument("--t-end", type=float, dest="t_end")
    p_run.add_argument("--cadence", type=float)
    p_run.add_argument("--scheme", choices=("rusanov", "muscl"))
    p_run.add_argument("--limiter", choices=("minmod", "none"))
    p_run.add_argument("--boundary", choices=("periodic", "outflow", "reflective"))
    p_run.add_argument("--amplitude", type=float)

    p_relax = sub.add_parser("relax", help="homogeneous relaxation check",
                             parents=[common])
    p_relax.add_argument("--Pi0-over-p", type=float, dest="z0")
    p_relax.add_argument("--t-end", type=float, dest="t_end")
    p_relax.add_argument("--cadence", type=float)

    p_ns = sub.add_parser("nslimit", help="stiff-limit bulk-viscosity check",
                          parents=[common])
    p_ns.add_argument("--N", type=int)
    p_ns.add_argument("--cfl", type=float)
    p_ns.add_argument("--t-end", type=float, dest="t_end")

    sub.add_parser("sweep", help="(Z, D) grid property sweeps", parents=[common])
    return parser


def _collect_updates(args) -> dict[str, dict[str, object]]:
    updates: dict[str, dict[str, object]] = {"gas": {}, "scenario": {}, "relax": {},
                                             "nslimit": {}, "output": {}}
    for key in ("D", "m", "kB", "tau"):
        value = getattr(args, key, None)
        if value is not None:
            updates["gas"][key] = value
    if getattr(args, "seed", None) is not None:
        updates["output"]["seed"] = args.seed
    if args.command == "run":
        for key in ("kind", "N", "cfl", "t_end", "scheme", "limiter", "boundary",
                    "amplitude"):
            value = getattr(args, key, None)
            if value is not None:
                updates["scenario"][key] = value
        if getattr(args, "cadence", None) is not None:
            updates["scenario"]["output_cadence"] = args.cadence
    elif args.command == "relax":
        for key in ("z0", "t_end", "cadence"):
            value = getattr(args, key, None)
            if value is not None:
                updates["relax"][key] = value
    elif args.command == "nslimit":
        for key in ("N", "cfl", "t_end"):
            value = getattr(args, key, None)
            if value is not None:
                updates["nslimit"][key] = value
    return updates


def dispatch(args) -> int:
    try:
        cfg = load_config(args.config)
        cfg = apply_updates(cfg, _collect_updates(args))
        if args.quick or cfg.output.quick:
            cfg = _quick_config(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    out_dir = _resolve_output_dir(args, cfg)
    commands = {
        "check": lambda: cmd_check(cfg, out_dir),
        "eigen": lambda: cmd_eigen(cfg, out_dir, args),
        "run": lambda: cmd_run(cfg, out_dir),
        "relax": lambda: cmd_relax(cfg, out_dir),
        "nslimit": lambda: cmd_nslimit(cfg, out_dir),
        "sweep": lambda: cmd_sweep(cfg, out_dir),
    }
    try:
        ok = commands[args.command]()
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
