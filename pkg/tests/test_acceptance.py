"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Tolerances are pinned here and nowhere else.

Criterion 5 carries a known-red clause: with a constant intensity floor
g0 = 0.5 < 1 the floor-scaled bound g0 * U <= 2 E* is checked exactly as
stated, and fails, because the sharp scaling of the action under constant
intensity is 1/g0^2 (see test_action.py::TestReversedFlow, which verifies
the g0^2-scaled bound).  The clause is kept faithful rather than weakened.
"""

import numpy as np
import pytest

from acldp.action import action_gradient, mam_minimize
from acldp.config import default_config
from acldp.energy import energy_gradient, energy_star
from acldp.errors import ConfigurationError
from acldp.flow import Path, gradient_flow
from acldp.grid import (Boundary, Field, basis_eval, build_domain, h1_distance,
                        l2_inner)
from acldp.ldp import tightness_monotone
from acldp.noise import NoiseModel
from acldp.pipeline import run_concentration
from acldp.profile import compute_profile, energy_formula, solve_e_L
from acldp.spde import (SdeParams, check_factorization_params, ensemble_run,
                        factorization_identity_error)

from .conftest import band_limited

SEED = 20260808


def check(criterion: int, description: str, conditions: dict[str, bool]):
    ok = all(conditions.values())
    print(f"[criterion {criterion:>2}] {'PASS' if ok else 'FAIL'} - {description}")
    failed = [name for name, good in conditions.items() if not good]
    assert ok, f"criterion {criterion} failed: {failed}"


# -- criterion 1: profile energy identity and first integral -----------------

def test_criterion_01_profile_identity():
    conditions = {}
    for L in (2.0, 5.0, 10.0):
        d = build_domain(L, 255, 128)
        p = compute_profile(d)
        direct = d.h * (np.sum(0.5 * p.m_prime ** 2
                               + 0.25 * (p.m.values ** 2 - 1.0) ** 2) + 0.5 * p.e_L)
        conditions[f"energy identity L={L}"] = (
            abs(direct - p.energy_value) <= 1e-4 * abs(p.energy_value))
        ext = np.concatenate(([-1.0], p.m.values, [1.0]))
        dm = (ext[2:] - ext[:-2]) / (2.0 * d.h)
        fi = dm ** 2 - 0.5 * (p.m.values ** 2 - 1.0) ** 2
        conditions[f"first integral L={L}"] = (fi.max() - fi.min()) <= 2.0 * d.h ** 2
    check(1, "profile energy identity + first-integral constancy, L in {2,5,10}",
          conditions)


# -- criterion 2: large-L limit ----------------------------------------------

def test_criterion_02_large_L_limit():
    e20 = solve_e_L(20.0)
    energy_gap = abs(energy_formula(20.0, e20) - 2.0 * np.sqrt(2.0) / 3.0)
    d = build_domain(20.0, 511, 256)
    p = compute_profile(d)
    mask = np.abs(d.xi) <= 10.0
    tanh_gap = np.max(np.abs(p.m.values - np.tanh(d.xi / np.sqrt(2.0)))[mask])
    check(2, "E_L -> 2 sqrt(2)/3 and profile -> tanh(xi/sqrt(2)) at L=20",
          {"energy limit < 1e-3": energy_gap < 1e-3,
           "tanh distance < 1e-3 on |xi| <= L/2": tanh_gap < 1e-3})


# -- criterion 3: gradient-flow relaxation ------------------------------------

def test_criterion_03_gradient_flow():
    d = build_domain(2.0, 255, 128)
    prof = compute_profile(d)
    eq = Field(prof.shifted_values(d), Boundary.ZERO_DIRICHLET)
    starts = {
        "x = 0": Field(np.zeros(d.n), Boundary.ZERO_DIRICHLET),
        "x = -(m-psi)-2psi": Field(-prof.shifted_values(d) - 2.0 * d.psi,
                                   Boundary.ZERO_DIRICHLET),
    }
    conditions = {}
    for name, x in starts.items():
        res = gradient_flow(d, x, dt=1e-3, T=60.0, stop_tol=1e-11,
                            record_every=10 ** 6, profile=prof)
        conditions[f"H1 terminal < 1e-3 from {name}"] = (
            h1_distance(d, res.terminal(), eq) < 1e-3)
        conditions[f"energy monotone from {name}"] = bool(
            np.all(np.diff(res.energy_star) <= 1e-8))
        if name == "x = 0":
            de = np.diff(res.energy_star) / 1e-3
            gsq = 0.5 * (res.grad_norm[:-1] ** 2 + res.grad_norm[1:] ** 2)
            active = gsq > 1e-3 * gsq[0]
            rel = np.abs(de[active] + gsq[active]) / gsq[active]
            conditions["dissipation identity to 5%"] = bool(np.max(rel) <= 0.05)
    check(3, "gradient flow relaxes to the equilibrium with the energy identity",
          conditions)


# -- criterion 4: gradient consistency checks ---------------------------------

def test_criterion_04_gradient_checks():
    d = build_domain(2.0, 127, 64)
    prof = compute_profile(d)
    rng = np.random.default_rng(SEED)
    worst_energy = 0.0
    for _ in range(50):
        ubar = band_limited(d, rng, k_max=16, amp=0.4)
        h = band_limited(d, rng, k_max=16, amp=1.0)
        tau = 1e-4
        up = energy_star(d, Field(ubar.values + tau * h.values, ubar.bc), prof)
        dn = energy_star(d, Field(ubar.values - tau * h.values, ubar.bc), prof)
        an = l2_inner(d, energy_gradient(d, ubar), h)
        worst_energy = max(worst_energy, abs((up - dn) / (2 * tau) - an) / max(abs(an), 1e-12))

    da = build_domain(2.0, 63, 63)
    nm = NoiseModel(kind="smooth_bounded_below", g0=0.6, c=0.8)
    steps, dt = 12, 0.05
    base = np.array([band_limited(da, rng, k_max=6, amp=0.3).values
                     for _ in range(steps + 1)])
    pth = Path(base, Boundary.ZERO_DIRICHLET, 0.0, dt)
    grad = action_gradient(pth, nm, da)
    from acldp.action import action as action_eval
    worst_action = 0.0
    for _ in range(20):
        v = rng.standard_normal((steps - 1, da.n))
        v /= np.sqrt(np.sum(v * v))
        tau = 1e-6
        up_p = Path(np.vstack([base[:1], base[1:-1] + tau * v, base[-1:]]),
                    Boundary.ZERO_DIRICHLET, 0.0, dt)
        dn_p = Path(np.vstack([base[:1], base[1:-1] - tau * v, base[-1:]]),
                    Boundary.ZERO_DIRICHLET, 0.0, dt)
        fd = (action_eval(up_p, nm, da).value - action_eval(dn_p, nm, da).value) / (2 * tau)
        an = da.h * np.sum(grad * v)
        worst_action = max(worst_action, abs(fd - an) / max(abs(an), 1e-12))

    check(4, "energy and action gradients match central differences to 1e-4",
          {"energy gradient (50 cases)": worst_energy <= 1e-4,
           "action gradient (20 cases)": worst_action <= 1e-4})


# -- criterion 5: quasi-potential sandwich -------------------------------------

def _mam_domain():
    d = build_domain(2.0, 63, 63)
    return d, compute_profile(d)


def _test_states(d, prof):
    amps = [
        [(1, 0.25)],
        [(1, -0.2), (2, 0.1)],
        [(2, 0.2), (3, -0.1)],
        [(1, 0.15), (3, 0.1), (4, -0.05)],
        [(1, -0.1), (2, -0.1), (5, 0.05)],
    ]
    states = []
    for spec_ in amps:
        vals = prof.shifted_values(d).copy()
        for k, a in spec_:
            vals += a * basis_eval(d, k).values
        states.append(Field(vals, Boundary.ZERO_DIRICHLET))
    return states


def test_criterion_05_quasipotential_sandwich_unit_intensity():
    d, prof = _mam_domain()
    nm = NoiseModel(kind="constant", g0=1.0)
    conditions = {}
    for i, zeta in enumerate(_test_states(d, prof)):
        estar = energy_star(d, zeta, prof)
        res = mam_minimize(d, zeta, nm, T=6.0, steps=96, ladder=3,
                           maxiter=600, profile=prof)
        rel = abs(res.value - 2.0 * estar) / (2.0 * estar)
        conditions[f"state {i}: within 5% of 2E*"] = rel <= 0.05
        conditions[f"state {i}: g0-scaled upper bound"] = (
            nm.g0 * res.value <= 2.0 * estar * 1.05)
    check(5, "minimized action matches 2 E* under unit intensity (5 states)",
          conditions)


def test_criterion_05_low_floor_scaling_as_stated():
    # Stated clause: with g == g0 = 0.5, g0 * mam_value <= 2 E* (1 + 0.05).
    # Under constant intensity the action scales as 1/g0^2, so the minimized
    # value is close to 2 E* / g0^2 and the floor-scaled product is ~2 E*/g0,
    # twice the stated bound.  Kept faithful; expected to fail.
    d, prof = _mam_domain()
    nm = NoiseModel(kind="constant", g0=0.5)
    zeta = _test_states(d, prof)[0]
    estar = energy_star(d, zeta, prof)
    res = mam_minimize(d, zeta, nm, T=6.0, steps=96, ladder=2,
                       maxiter=600, profile=prof)
    check(5, "floor-scaled upper bound at g0 = 0.5, exactly as stated",
          {"g0 * value <= 2 E* (1.05)": nm.g0 * res.value <= 2.0 * estar * 1.05})


# -- criterion 6: OU closed forms ----------------------------------------------

def test_criterion_06_ou_closed_forms():
    d = build_domain(2.0, 63, 32)
    prof = compute_profile(d)
    eps, g0, dt = 0.08, 0.8, 5e-4      # lambda_k dt <= 5e-3: scheme bias ~0.25%
    nm = NoiseModel(kind="constant", g0=g0)
    p = SdeParams(eps=eps, dt=dt, modes_noise=8, seed=SEED)
    x = Field(np.zeros(d.n), Boundary.ZERO_DIRICHLET)
    n_chains = 10_000
    ens = ensemble_run(d, x, nm, p, 2.5, n_chains, profile=prof,
                       linear_hook=True, mode_checkpoint_times=(0.5, 2.5))
    band = 3.0 * np.sqrt(2.0 / (n_chains - 1))   # 3 MC standard errors
    conditions = {}
    snap_t = ens.mode_snaps[int(round(0.5 / dt))]
    for k in (1, 2, 3, 4):
        lam = d.lambda_k[k - 1]
        expect = eps * g0 ** 2 * (1.0 - np.exp(-2.0 * lam * 0.5)) / (2.0 * lam)
        got = np.var(snap_t[:, k - 1], ddof=1)
        conditions[f"transient var mode {k}"] = abs(got - expect) <= band * expect
    snap_s = ens.mode_snaps[int(round(2.5 / dt))]
    for k in (2, 3, 4):
        lam = d.lambda_k[k - 1]
        stat = eps * g0 ** 2 / (2.0 * lam)
        got = np.var(snap_s[:, k - 1], ddof=1)
        conditions[f"stationary var mode {k}"] = abs(got - stat) <= band * stat
    check(6, "linear hook reproduces OU transient and stationary variances (1e4 chains)",
          conditions)


# -- criterion 7: factorization identity ----------------------------------------

def test_criterion_07_factorization_identity():
    check_factorization_params(0.24, 0.2, 8)   # programmatic feasibility check
    lhs = (0.24 - 1.0 - 0.2 / 2.0) * 8.0 / (8.0 - 1.0)
    d = build_domain(2.0, 63, 32)
    err = factorization_identity_error(d, alpha=0.24, lam=1.0, t_eval=0.7)
    guard_raises = False
    try:
        check_factorization_params(0.26, 0.2, 8)
    except ConfigurationError:
        guard_raises = True
    check(7, "factorized reconstruction of the damped convolution",
          {"feasibility inequality > -1": lhs > -1.0,
           "deterministic reconstruction < 1e-3": err < 1e-3,
           "infeasible alpha rejected": guard_raises})


# -- criteria 8 and 9: concentration and tightness -------------------------------

@pytest.fixture(scope="module")
def concentration_result():
    cfg = default_config()
    cfg.values.update({
        "L": 2.0, "n": 255, "modes": 128, "modes_noise": 64,
        "eps": [0.1, 0.05, 0.025], "dt": 1e-3, "burn_in": 20.0,
        "stride": 1.0, "n_chains": 64, "n_samples": 2688,
        "seed": SEED, "workers": 1,
    })
    return run_concentration(cfg)


def test_criterion_08_concentration(concentration_result):
    res = concentration_result
    r1, r2 = res.report_delta, res.report_2delta
    conditions = {
        "rarest tail count >= 10": int(min(r1.counts.min(), r2.counts.min())) >= 10,
        "slope(delta) > 0": r1.slope is not None and r1.slope > 0,
        "slope(2delta) > 0": r2.slope is not None and r2.slope > 0,
        "r2 >= 0.8 at delta": bool(r1.slope_valid),
        "r2 >= 0.8 at 2delta": bool(r2.slope_valid),
        "slope ratio in [2, 8]": res.slope_ratio is not None
                                 and 2.0 <= res.slope_ratio <= 8.0,
    }
    check(8, "tail decay fits exp(-C delta^2 / eps) at desk scale", conditions)


def test_criterion_09_tightness(concentration_result):
    res = concentration_result
    tight = tightness_monotone(res.measures, res.radius, 0.2, 8)
    fr = [e.p_hat for e in tight["estimates"]]
    check(9, "Sobolev-ball exceedance nonincreasing across eps",
          {"nonincreasing within 2 sigma": bool(tight["nonincreasing"]),
           "strictly ordered ends": fr[0] >= fr[-1]})


# -- criterion 10: determinism ----------------------------------------------------

def test_criterion_10_determinism(tmp_path, monkeypatch):
    from acldp.cli import run as cli_run
    cfg_text = "\n".join([
        "L = 2.0", "n = 63", "modes = 32", "modes_noise = 16",
        "eps = 0.1", "dt = 0.005", "burn_in = 1.0", "stride = 0.25",
        "n_chains = 48", "n_samples = 96", f"seed = {SEED}",
    ]) + "\n"
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(cfg_text)
    outs = []
    for name, workers in (("a", "1"), ("b", "1"), ("c", "2")):
        monkeypatch.setenv("ACLDP_WORKERS", workers)
        out = tmp_path / name
        assert cli_run(["invariant", "--config", str(cfg_file), "--out", str(out)]) == 0
        outs.append((out / "samples.csv").read_bytes())
    check(10, "same seed gives byte-identical data; workers change nothing",
          {"rerun byte-identical": outs[0] == outs[1],
           "worker count irrelevant": outs[0] == outs[2]})
