"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``[ACnn] PASS|FAIL`` line with the measured values.
The sweeps (criteria 5, 6, 8, 9) run at the default resolution and take
about a minute together on one core.
"""

import time

import numpy as np
import pytest

from cssr.cli import main
from cssr.config import OUTPUT_ENV
from cssr.dynamics import evolve_1d, evolve_2d
from cssr.energy import energy_1d, energy_2d_gauged, gradient_1d, gradient_2d
from cssr.gauge import f_profile, nonlinearity
from cssr.ground_state import FlowConfig, minimize_1d, minimize_2d
from cssr.reduction import default_initial_1d, fit_rate, run_dynamics_sweep, run_gse_sweep
from cssr.snapshot import read_snapshot, write_snapshot
from cssr.spectral import inner, integrate, mass, normalize

SWEEP = [0.4, 0.2, 0.1, 0.05]
# closed-form Gaussian trial energy sqrt(1 + 2 pi/(3 sqrt 3)) at beta = 1
GAUSSIAN_BOUND = 1.48633763868


def report(capsys, n, title, ok, detail):
    with capsys.disabled():
        print(f"\n[AC{n:02d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
    assert ok, detail


def profiles(ws):
    x = ws.grid_x.nodes
    raw = (np.exp(-0.5 * x**2), np.exp(-0.5 * (x - 1.0) ** 2),
           np.exp(-(x - 1.5) ** 2) + np.exp(-(x + 1.5) ** 2))
    return [normalize(p.astype(complex), ws) for p in raw]


@pytest.fixture(scope="module")
def gse(ws):
    t0 = time.perf_counter()
    rep = run_gse_sweep(1.0, SWEEP, FlowConfig(), ws, workers=1)
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def dyn(ws):
    t0 = time.perf_counter()
    rep = run_dynamics_sweep(1.0, SWEEP, 0.5, 2.5e-4, ws, workers=1)
    return rep, time.perf_counter() - t0


def test_ac01_f_moments(ws, capsys):
    t0 = time.perf_counter()
    m1 = m2 = 0.0
    for eps in (1.0, 0.25, 0.05):
        _, w, f, u2 = f_profile(eps, ws)
        m1 = max(m1, abs(np.sum(w * f * u2)))
        m2 = max(m2, abs(np.sum(w * f**2 * u2) - 1 / 3))
    dt = time.perf_counter() - t0
    report(capsys, 1, "f-moment identities", m1 <= 1e-10 and m2 <= 1e-8 and dt < 1,
           f"max|int f u^2|={m1:.2e}, max|int f^2 u^2 - 1/3|={m2:.2e}, {dt:.2f}s")


def test_ac02_decoupling(ws, capsys):
    t0 = time.perf_counter()
    u1 = ws.basis_y.mode_matrix[:, 0]
    worst = 0.0
    for p in profiles(ws):
        for beta in (0.0, 0.5, 1.0, 2.0):
            e1 = energy_1d(p, beta, ws).total
            for eps in (0.5, 0.1):
                e2 = energy_2d_gauged(np.outer(p, u1), beta, eps, ws).total
                worst = max(worst, abs(e2 - 1 / eps - e1) / (1 + abs(e1)))
    dt = time.perf_counter() - t0
    report(capsys, 2, "energy decoupling", worst <= 1e-6 and dt < 5,
           f"max relative gap {worst:.2e}, {dt:.2f}s")


def test_ac03_linear_limit(ws, capsys):
    t0 = time.perf_counter()
    e1 = minimize_1d(0.0, FlowConfig(), ws).energy.total
    e2 = minimize_2d(0.0, 0.25, FlowConfig(), ws).energy.total
    dt = time.perf_counter() - t0
    ok = abs(e1 - 1) <= 1e-6 and abs(e2 - 5) <= 1e-5 and dt < 30
    report(capsys, 3, "linear limit", ok,
           f"E1D={e1:.10f}, E2D(0.25)={e2:.10f}, {dt:.2f}s")


def test_ac04_variational_sandwich(ws, capsys):
    t0 = time.perf_counter()
    e = minimize_1d(1.0, FlowConfig(), ws).energy.total
    dt = time.perf_counter() - t0
    ok = 1.0 <= e <= GAUSSIAN_BOUND and GAUSSIAN_BOUND - e >= 1e-3 and dt < 30
    report(capsys, 4, "variational sandwich", ok,
           f"E1D(beta=1)={e:.9f}, Gaussian bound {GAUSSIAN_BOUND:.9f}, {dt:.2f}s")


def test_ac05_energy_upper_bound(gse, capsys):
    rep, _ = gse
    margins = [rep.e1d + 1e-4 - (e2 - 1 / eps) for eps, e2 in zip(rep.epsilons, rep.e2d)]
    report(capsys, 5, "energy upper bound", min(margins) >= 0 and all(rep.converged),
           "E2D - e_eps - E1D = " + ", ".join(f"{e2 - 1 / e - rep.e1d:+.5f}"
                                              for e, e2 in zip(rep.epsilons, rep.e2d)))


def test_ac06_gse_convergence(gse, capsys):
    rep, dt = gse
    g = rep.gse_gap
    mono = all(b <= a for a, b in zip(g, g[1:]))
    ok = mono and g[-1] <= g[0] / 2 and dt < 600
    report(capsys, 6, "GSE convergence", ok,
           "gaps " + ", ".join(f"{v:.5f}" for v in g)
           + f", slope {rep.fitted_rates['gse_gap'].slope:.3f}, {dt:.1f}s")


def test_ac07_effective_nonlinearity(ws, capsys):
    t0 = time.perf_counter()
    u1 = ws.basis_y.mode_matrix[:, 0]
    worst = 0.0
    for p in profiles(ws):
        for beta in (0.5, 1.0):
            avg = nonlinearity(np.outer(p, u1), beta, ws) @ (ws.basis_y.weights * u1)
            d = avg - np.pi**2 * beta**2 * np.abs(p) ** 4 * p
            worst = max(worst, np.sqrt(integrate(np.abs(d) ** 2, ws).real))
    dt = time.perf_counter() - t0
    report(capsys, 7, "effective quintic nonlinearity", worst <= 1e-6 and dt < 5,
           f"max L2 error {worst:.2e}, {dt:.2f}s")


def test_ac08_projection_residual(dyn, capsys):
    rep, _ = dyn
    fit = rep.fitted_rates["proj_residual"]
    bound_ok = all(r <= 2 * np.sqrt(e) * fit.constant
                   for e, r in zip(rep.epsilons, rep.proj_residual))
    report(capsys, 8, "projection residual", fit.slope >= 0.45 and bound_ok,
           "residuals " + ", ".join(f"{v:.4f}" for v in rep.proj_residual)
           + f", slope {fit.slope:.3f}+-{fit.stderr:.3f}, C={fit.constant:.3f}")


def test_ac09_dynamics_reduction(dyn, capsys):
    rep, dt = dyn
    r = rep.dyn_residual
    fit = rep.fitted_rates["dyn_residual"]
    dec = all(b < a for a, b in zip(r, r[1:]))
    ok = dec and fit.slope >= 0.20 and dt < 1800
    report(capsys, 9, "dynamics reduction", ok,
           "residuals " + ", ".join(f"{v:.4f}" for v in r)
           + f", slope {fit.slope:.3f}+-{fit.stderr:.3f}, {dt:.1f}s")


def _final(dim, dt, t_final, ws, phi0):
    if dim == 1:
        return evolve_1d(phi0, 1.0, t_final, dt, ws, snapshot_stride=t_final)
    return evolve_2d(phi0, 1.0, 0.25, t_final, dt, ws, snapshot_stride=t_final)


def test_ac10_conservation_and_consistency(ws, capsys):
    phi1 = default_initial_1d(ws)
    phi2 = np.outer(phi1, ws.basis_y.mode_matrix[:, 0])
    lines, ok = [], True
    # reference runs at the default step
    for name, tr in (("1D", evolve_1d(phi1, 1.0, 2.0, 1e-3, ws, store_fields=False)),
                     ("2D", evolve_2d(phi2, 1.0, 0.25, 1.0, 2.5e-4, ws, store_fields=False))):
        md = np.abs(tr.mass_series - tr.mass_series[0])
        e = tr.energy_series
        ed = np.max(np.abs(e - e[0])) / abs(e[0])
        ok &= bool(np.all(md <= 1e-8 * (1 + tr.times))) and ed <= 1e-5
        lines.append(f"{name} mass drift {md.max():.1e}, energy drift {ed:.1e}")
    # self-convergence against a dt/8 reference, and continuity-residual shrinkage
    dts = [4e-3, 2e-3, 1e-3]
    for dim, t_final, phi0 in ((1, 1.0, phi1), (2, 0.2, phi2)):
        ref = _final(dim, dts[-1] / 8, t_final, ws, phi0).snapshots[-1]
        errs, conts = [], []
        for dt in dts:
            tr = _final(dim, dt, t_final, ws, phi0)
            errs.append(np.sqrt(mass(tr.snapshots[-1] - ref, ws)))
            conts.append(tr.continuity_residual_series[-1])
        order = fit_rate(dts, errs).slope
        shrink = [a / b for a, b in zip(conts, conts[1:])]
        ok &= abs(order - 2.0) <= 0.2 and min(shrink) >= 1.7
        lines.append(f"{dim}D order {order:.3f}, continuity shrink "
                     + "/".join(f"{s:.2f}" for s in shrink))
    report(capsys, 10, "conservation and consistency", ok, "; ".join(lines))


def _fd_worst(energy, gradient, phi, ws, rng, n_dirs=20, h=1e-5):
    g = gradient(phi)
    x = ws.grid_x.nodes if phi.ndim == 1 else ws.grid_x.nodes[:, None]
    y = 0.0 if phi.ndim == 1 else ws.basis_y.nodes[None, :]
    env = np.exp(-0.5 * x**2 - 0.5 * y**2)
    worst = 0.0
    for _ in range(n_dirs):
        c = rng.standard_normal(8)
        d = env * (c[0] + c[1] * x + c[2] * x**2 + c[3] * y
                   + 1j * (c[4] + c[5] * x + c[6] * y + c[7] * x * y))
        fd = (energy(phi + h * d) - energy(phi - h * d)) / (2 * h)
        an = 2 * inner(g, d, ws).real
        worst = max(worst, abs(fd - an) / abs(an))
    return worst


def test_ac11_gradient_checks(ws, capsys):
    rng = np.random.default_rng(2024)
    x = ws.grid_x.nodes
    p1 = normalize(np.exp(-0.5 * x**2) * (1 + 0.3 * x + 0.2j * x**2), ws)
    X, Y = np.meshgrid(ws.x, ws.y, indexing="ij")
    p2 = normalize(np.exp(-0.5 * (X**2 + Y**2)) * (1 + 0.3 * X + 0.2j * Y + 0.1 * X * Y), ws)
    w1 = _fd_worst(lambda p: energy_1d(p, 1.0, ws).total, lambda p: gradient_1d(p, 1.0, ws),
                   p1, ws, rng)
    w2 = _fd_worst(lambda p: energy_2d_gauged(p, 1.0, 0.25, ws).total,
                   lambda p: gradient_2d(p, 1.0, 0.25, ws), p2, ws, rng)
    report(capsys, 11, "gradient checks", w1 <= 1e-6 and w2 <= 1e-5,
           f"worst relative gap 1D {w1:.2e}, 2D {w2:.2e} (20 directions each)")


def test_ac12_infrastructure(ws, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    rng = np.random.default_rng(5)
    z = rng.standard_normal(ws.shape) + 1j * rng.standard_normal(ws.shape)
    write_snapshot(z, {"l_x": 12.0, "time": 0.5, "epsilon": 0.1, "beta": 1.0}, tmp_path / "z.bin")
    back, _ = read_snapshot(tmp_path / "z.bin")
    snap_ok = back.tobytes() == z.tobytes()
    verify_code = main(["verify", "--output-dir", str(tmp_path / "v")])
    args = ["sweep-gse", "--epsilons", "0.4,0.2,0.1", "--workers", "1"]
    codes = [main(args + ["--output-dir", str(tmp_path / d)]) for d in ("a", "b")]
    capsys.readouterr()
    same = (tmp_path / "a" / "sweep_gse.csv").read_bytes() == \
        (tmp_path / "b" / "sweep_gse.csv").read_bytes()
    ok = snap_ok and verify_code == 0 and codes == [0, 0] and same
    report(capsys, 12, "infrastructure", ok,
           f"snapshot bit-exact={snap_ok}, verify exit={verify_code}, identical CSV={same}")
