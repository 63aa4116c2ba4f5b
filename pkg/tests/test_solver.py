import math

import numpy as np
import pytest

from et6.gas import GasSpec
from et6.solver import (
    Grid1D,
    Scenario,
    SolverError,
    bulk_viscosity,
    entropy_density_fields,
    euler_reference,
    flux_fields,
    hyperbolic_step,
    initial_grid,
    max_wave_speed,
    ns_limit_diagnostic,
    primitive_fields,
    relaxation_step_exact,
    run_scenario,
)


def uniform_grid(spec, N=16, rho=1.0, T=1.0, vx=0.0, z=0.0, boundary="periodic"):
    p = spec.gas_constant * rho * T
    U = np.zeros((6, N))
    U[0] = rho
    U[1] = rho * vx
    U[4] = rho * vx**2 + 3.0 * (p + z * p)
    U[5] = rho * vx**2 + spec.D * p
    return Grid1D(x_left=0.0, x_right=1.0, U=U, boundary=boundary)


def test_primitive_fields_match_point_conversions():
    from et6.gas import Conserved6, primitive_from_conserved

    spec = GasSpec(D=7.0)
    rng = np.random.default_rng(5)
    N = 32
    U = np.zeros((6, N))
    for j in range(N):
        rho = rng.uniform(0.2, 3.0)
        v = rng.uniform(-1, 1, size=3)
        T = rng.uniform(0.3, 2.0)
        z = rng.uniform(-0.8, 0.8 * spec.z_upper)
        p = spec.gas_constant * rho * T
        v2 = float(np.dot(v, v))
        U[:, j] = [rho, rho * v[0], rho * v[1], rho * v[2],
                   rho * v2 + 3 * (p + z * p), rho * v2 + spec.D * p]
    w = primitive_fields(U, spec)
    for j in range(N):
        s = primitive_from_conserved(Conserved6.from_array(U[:, j]), spec)
        assert w["rho"][j] == pytest.approx(s.rho, rel=1e-13)
        assert w["vx"][j] == pytest.approx(s.v[0], rel=1e-13)
        assert w["T"][j] == pytest.approx(s.T, rel=1e-12)
        assert w["Pi"][j] == pytest.approx(s.Pi, rel=1e-10, abs=1e-13)


def test_flux_fields_match_closed_fluxes():
    from et6.closure import closed_fluxes
    from et6.gas import State6

    spec = GasSpec(D=5.0)
    g = uniform_grid(spec, N=4, rho=1.2, T=0.8, vx=0.6, z=0.2)
    fl_arrays = flux_fields(g.U, spec)
    s = State6(rho=1.2, v=[0.6, 0.0, 0.0], T=0.8, Pi=0.2 * 1.2 * 0.8)
    fl = closed_fluxes(s, spec)
    assert fl_arrays[1, 0] == pytest.approx(fl.F_ik[0, 0], rel=1e-14)
    assert fl_arrays[4, 0] == pytest.approx(fl.F_llk[0], rel=1e-14)
    assert fl_arrays[5, 0] == pytest.approx(fl.G_llk[0], rel=1e-14)


def test_entropy_fields_match_point_values():
    from et6.closure import entropy_parts
    from et6.gas import State6

    spec = GasSpec(D=4.5)
    g = uniform_grid(spec, N=4, rho=0.7, T=1.1, z=-0.3)
    h, k = entropy_density_fields(g.U, spec)
    parts = entropy_parts(State6(rho=0.7, v=0.0, T=1.1, Pi=-0.3 * 0.7 * 1.1), spec)
    assert h[0] == pytest.approx(parts.h, rel=1e-13)
    assert k[0] == pytest.approx(parts.k, rel=1e-13)


@pytest.mark.parametrize("scheme", ["rusanov", "muscl"])
def test_uniform_state_is_exact_steady_state(scheme):
    spec = GasSpec(D=5.0)
    g = uniform_grid(spec, vx=0.3, z=0.1)
    g2, projections, _ = hyperbolic_step(g, 1e-3, spec, scheme=scheme)
    np.testing.assert_array_equal(g2.U, g.U)
    assert projections == 0


def test_single_sod_step_conserves_mass():
    spec = GasSpec(D=5.0, tau=1e-2)
    sc = Scenario(kind="riemann", spec=spec, N=200, boundary="outflow", t_end=0.1)
    g = initial_grid(sc)
    dt = 0.45 * g.dx / max_wave_speed(g.U, spec)
    g2, _, _ = hyperbolic_step(g, dt, spec)
    before = np.sum(g.U[0]) * g.dx
    after = np.sum(g2.U[0]) * g2.dx
    assert abs(after - before) <= 1e-14 * before


def test_relaxation_identity_at_equilibrium():
    spec = GasSpec(D=5.0, tau=0.1)
    g = uniform_grid(spec, z=0.0)
    g2 = relaxation_step_exact(g, 0.05, spec)
    np.testing.assert_allclose(g2.U, g.U, rtol=0, atol=1e-15)


def test_relaxation_exact_exponential():
    spec = GasSpec(D=5.0, tau=0.1)
    g = uniform_grid(spec, z=0.3)  # p = 1, Pi = 0.3
    g2 = relaxation_step_exact(g, 0.1, spec)
    w = primitive_fields(g2.U, spec)
    assert w["Pi"][0] == pytest.approx(0.3 / math.e, rel=1e-14)
    # rho, v, T untouched
    assert w["rho"][0] == 1.0
    assert w["T"][0] == pytest.approx(1.0, rel=1e-14)


def test_relaxation_semigroup_composition():
    spec = GasSpec(D=5.0, tau=0.07)
    g = uniform_grid(spec, z=-0.5)
    dt = 0.033
    one = relaxation_step_exact(g, dt, spec)
    two = relaxation_step_exact(relaxation_step_exact(g, dt / 2, spec), dt / 2, spec)
    np.testing.assert_allclose(two.U, one.U, rtol=1e-14)


@pytest.mark.parametrize("tau", [1.0, 0.1, 1e-3])
def test_homogeneous_relaxation_matches_ode(tau):
    spec = GasSpec(D=5.0, tau=tau)
    t_end = min(1.0, 10.0 * tau)
    sc = Scenario(kind="uniform_relaxation", spec=spec, N=50, t_end=t_end,
                  output_cadence=t_end / 10.0, z0=0.3)
    ts = run_scenario(sc)
    assert len(ts.snapshot_times) >= 10
    p_scale = 1.0
    for t, snap in zip(ts.snapshot_times, ts.snapshots):
        exact = 0.3 * p_scale * math.exp(-t / tau)
        assert np.max(np.abs(snap["Pi"] - exact)) <= 1e-12 * p_scale


def test_sod_entropy_nondecreasing_every_step():
    spec = GasSpec(D=5.0, tau=1e-3)
    sc = Scenario(kind="riemann", spec=spec, N=200, t_end=0.15, boundary="outflow")
    ts = run_scenario(sc)
    h = np.array(ts.total_entropy)
    assert np.min(np.diff(h)) >= -1e-10 * abs(h[0])


def test_periodic_conservation_thousand_steps():
    spec = GasSpec(D=5.0, tau=1e-2)
    sc = Scenario(kind="smooth_wave", spec=spec, N=100, t_end=3.2, amplitude=1e-2)
    ts = run_scenario(sc)
    assert len(ts.diag_t) > 1000
    for series in (ts.total_F, ts.total_Fx, ts.total_Gll):
        arr = np.array(series)
        scale = max(abs(arr[0]), float(np.max(np.abs(arr))))
        assert np.max(np.abs(arr - arr[0])) <= 1e-13 * scale


def test_trace_moment_obeys_discrete_production_balance():
    # d(total F_ll)/dt = total P_ll; with the exact relaxation substep the
    # discrete balance is sum Delta F_ll = 3 (p + Pi)(e^-dt/tau - 1) summed
    spec = GasSpec(D=5.0, tau=0.05)
    sc = Scenario(kind="uniform_relaxation", spec=spec, N=50, t_end=0.2, z0=0.3)
    ts = run_scenario(sc)
    # no gradients: F_ll(t) - F_ll(0) = 3 (Pi(t) - Pi(0)) * volume
    f_ll = np.array(ts.total_Fll)
    t = np.array(ts.diag_t)
    exact = f_ll[0] + 3.0 * 0.3 * (np.exp(-t / 0.05) - 1.0)
    np.testing.assert_allclose(f_ll, exact, rtol=1e-12)


def test_transport_alone_conserves_trace_moment():
    # with the production switched off (huge tau) the periodic hyperbolic
    # update must conserve total F_ll to round-off, so the only source of
    # total F_ll change in a real run is the relaxation substep
    spec = GasSpec(D=5.0, tau=1e12)
    sc = Scenario(kind="smooth_wave", spec=spec, N=100, t_end=1.0, amplitude=1e-2)
    ts = run_scenario(sc)
    arr = np.array(ts.total_Fll)
    assert np.max(np.abs(arr - arr[0])) <= 1e-13 * abs(arr[0])


@pytest.mark.parametrize("scheme,limiter,threshold", [
    ("rusanov", "minmod", 0.9),
    ("muscl", "minmod", 1.8),
])
def test_smooth_wave_convergence_order(scheme, limiter, threshold):
    spec = GasSpec(D=5.0, tau=1e-2)
    sols = {}
    for N in (100, 200, 400):
        sc = Scenario(kind="smooth_wave", spec=spec, N=N, t_end=0.3, amplitude=1e-2,
                      cfl=0.4, scheme=scheme, limiter=limiter)
        sols[N] = run_scenario(sc).snapshots[-1]["rho"]

    def restrict(f):
        return 0.5 * (f[0::2] + f[1::2])

    e1 = np.mean(np.abs(restrict(sols[200]) - sols[100]))
    e2 = np.mean(np.abs(restrict(sols[400]) - sols[200]))
    assert math.log2(e1 / e2) >= threshold


def test_admissibility_projection_counts_and_clamps():
    spec = GasSpec(D=5.0)
    g = uniform_grid(spec, N=8, z=0.0)
    # push Pi above the window by hand: F_ll = 3 (p + Pi) with Pi = p
    g.U[4, :] = 3.0 * (1.0 + 1.0)
    g2, projections, _ = hyperbolic_step(g, 1e-4, spec)
    assert projections == 8
    w = primitive_fields(g2.U, spec)
    upper = (spec.D - 3.0) / 3.0 * w["p"]
    np.testing.assert_allclose(w["Pi"], 0.999 * upper, rtol=1e-12)


def test_run_aborts_on_mass_projection():
    # an initial state far outside the window on every cell must abort on
    # the first step (the relaxation half-step barely moves Pi at huge tau)
    spec = GasSpec(D=5.0, tau=1e9)
    sc = Scenario(kind="uniform_relaxation", spec=spec, N=50, t_end=0.1, z0=0.3)
    g = initial_grid(sc)
    g.U[4, :] = 3.0 * (1.0 + 2.0)  # Pi = 2 p, far above (D-3)/3 = 2/3
    with pytest.raises(SolverError, match="projection"):
        run_scenario(sc, initial=g)


def test_cfl_bound_dominates_wave_fan():
    from et6.eigen import wave_fan
    from et6.gas import Conserved6

    spec = GasSpec(D=12.0)
    rng = np.random.default_rng(9)
    for _ in range(20):
        rho = rng.uniform(0.3, 2.0)
        T = rng.uniform(0.3, 2.0)
        vx = rng.uniform(-1.5, 1.5)
        z = rng.uniform(-0.9, 0.95 * spec.z_upper)
        p = spec.gas_constant * rho * T
        U = np.zeros((6, 4))
        U[0] = rho
        U[1] = rho * vx
        U[4] = rho * vx**2 + 3 * (p + z * p)
        U[5] = rho * vx**2 + spec.D * p
        bound = max_wave_speed(U, spec)
        fan = wave_fan(Conserved6.from_array(U[:, 0]), [1, 0, 0], spec)
        assert bound >= np.max(np.abs(fan.speeds))


def test_ns_limit_diagnostic_formula():
    spec = GasSpec(D=5.0, tau=1.0)
    assert bulk_viscosity(1.0, spec) == pytest.approx(4.0 / 15.0, rel=1e-15)


def test_ns_limit_smooth_acoustic_run():
    spec = GasSpec(D=5.0, tau=1e-3)
    sc = Scenario(kind="smooth_wave", spec=spec, N=400, x_right=8.0, wavelength=8.0,
                  t_end=0.75, amplitude=1e-3, cfl=0.02, scheme="muscl",
                  limiter="minmod", pi_init="ns")
    ts = run_scenario(sc)
    rep = ns_limit_diagnostic(ts, spec)
    assert rep.max_rel_deviation <= 10.0 * spec.tau
    assert rep.l2_rel_deviation <= rep.max_rel_deviation
    assert not rep.reduced_confidence


def test_ns_limit_monatomic_collapse():
    # nu ~ (D-3): both the coefficient and the measured Pi vanish
    pis = []
    nus = []
    for D in (3.0 + 1e-6, 3.5, 5.0):
        spec = GasSpec(D=D, tau=1e-3)
        sc = Scenario(kind="smooth_wave", spec=spec, N=200, x_right=8.0,
                      wavelength=8.0, t_end=0.4, amplitude=1e-3, cfl=0.05,
                      scheme="muscl", pi_init="ns")
        ts = run_scenario(sc)
        nus.append(bulk_viscosity(1.0, spec))
        pis.append(float(np.max(np.abs(ts.snapshots[-1]["Pi"]))))
    assert nus[0] < 1e-9 and pis[0] < 1e-11
    assert pis[0] < pis[1] < pis[2]


def test_euler_reference_steady_uniform():
    spec = GasSpec(D=5.0, tau=1e-2)
    sc = Scenario(kind="uniform_relaxation", spec=spec, N=50, t_end=0.05, z0=0.0)
    ts = euler_reference(sc)
    rho0 = ts.snapshots[0]["rho"]
    rho1 = ts.snapshots[-1]["rho"]
    np.testing.assert_array_equal(rho0, rho1)


def test_monatomic_limit_matches_euler():
    spec = GasSpec(D=3.0 + 1e-6, tau=1e-2)
    sc = Scenario(kind="smooth_wave", spec=spec, N=200, t_end=0.4, amplitude=1e-2,
                  cfl=0.45, scheme="rusanov")
    ts = run_scenario(sc)
    eu = euler_reference(sc)
    for name in ("rho", "vx", "T"):
        diff = np.sum(np.abs(ts.snapshots[-1][name] - eu.snapshots[-1][name])) * ts.dx
        assert diff <= 1e-6


def test_riemann_et6_approaches_euler_for_small_tau():
    spec = GasSpec(D=5.0, tau=1e-3)
    sc = Scenario(kind="riemann", spec=spec, N=400, t_end=0.15, boundary="outflow")
    ts = run_scenario(sc)
    eu = euler_reference(sc)
    rho_et6 = ts.snapshots[-1]["rho"]
    rho_eu = eu.snapshots[-1]["rho"]
    # L1 distance, allowing up to two cells of shift
    best = min(
        float(np.sum(np.abs(np.roll(rho_et6, shift) - rho_eu))) * ts.dx
        for shift in range(-2, 3)
    )
    assert best <= 1e-2


def test_reflective_walls_conserve_mass():
    # mirrored ghosts with flipped normal momentum give exactly zero mass
    # flux through the walls
    spec = GasSpec(D=5.0, tau=1e-2)
    sc = Scenario(kind="smooth_wave", spec=spec, N=100, t_end=0.3, amplitude=1e-2,
                  boundary="reflective", scheme="muscl")
    ts = run_scenario(sc)
    arr = np.array(ts.total_F)
    assert np.max(np.abs(arr - arr[0])) <= 1e-13 * abs(arr[0])


def test_scenario_validation():
    with pytest.raises(SolverError):
        Scenario(cfl=1.5)
    with pytest.raises(SolverError):
        Scenario(t_end=-1.0)
    with pytest.raises(SolverError):
        Scenario(kind="warp")
    with pytest.raises(SolverError):
        Scenario(scheme="weno5")
    with pytest.raises(SolverError):
        Grid1D(x_left=0.0, x_right=1.0, U=np.ones((6, 3)))
