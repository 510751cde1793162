"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a PASS/FAIL line (also echoed in the pytest terminal
summary) and then asserts the verdict.
"""

import hashlib
import math
import time

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from conftest import ACCEPTANCE_LINES, make_cfg
from nomaiot import aerial as A
from nomaiot import montecarlo as mc
from nomaiot import selftest
from nomaiot import specfun as S
from nomaiot import terrestrial as T
from nomaiot.config import dbm_to_watt
from nomaiot.errors import NomaError

TRIALS = 1_000_000
WORKERS = 4


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


@pytest.fixture(scope="module")
def selftest_run():
    t0 = time.perf_counter()
    rows = selftest.run_selftest(trials=TRIALS, workers=WORKERS)
    return rows, time.perf_counter() - t0


def test_c1_analytic_simulation_grid(selftest_run):
    rows, dt = selftest_run
    bad = [r for r in rows if not r.passed]
    for r in bad:
        print(f"  {r.point} {r.tier} {r.estimator} device {r.device}: "
              f"analytic {r.analytic:.6f} vs MC {r.simulated:.6f} (z = {r.z:.1f})")
    points = {r.point for r in rows}
    ok = not bad and len(points) == 20 and dt <= 600
    assert verdict(1, ok, f"{len(rows) - len(bad)}/{len(rows)} comparisons within 3 SE on "
                          f"{len(points)} points, {dt:.0f} s")


def test_c2_two_device_laplace():
    cfg = make_cfg(M=2)
    s = np.logspace(-4, 4, 201) * cfg.R ** cfg.alpha_g / cfg.P_g
    diff = max(abs(T.laplace_terr_closed_M2(x, cfg) - T.laplace_terr(x, 1, cfg)) for x in s)
    assert verdict(2, diff < 1e-9, f"max |closed - product| = {diff:.2e} over 201 values of s")


def test_c3_low_rate_series():
    worst = 0.0
    for M in (2, 3):
        for tau in (0.1, 0.5, 0.9):
            for pg in (-20, 0, 20, 40):
                cfg = make_cfg(M=M, tau=tau, Pg_dBm=pg)
                for i in range(1, M + 1):
                    worst = max(worst, abs(T.coverage_low_rate(i, cfg) - T.coverage_exact(i, cfg)))
    assert verdict(3, worst < 1e-3, f"max |low-rate - exact| = {worst:.2e} (M in 2,3; tau < 1; P_u = 0)")


def test_c4_aerial_gamma_paths():
    worst_closed, worst_m1 = 0.0, 0.0
    for tau in (0.1, 0.5, 1.0, 2.0):
        for m in (2, 3):
            cfg = make_cfg(M=2, tau=tau, Pg_dBm=None, Pu_dBm=0, m=(m, 1))
            gap = abs(A.coverage_aerial_nearest_closed(cfg) - A.coverage_aerial_nearest_gamma(cfg))
            print(f"  tau={tau} m={m}: |closed - numeric| = {gap:.4f}")
            worst_closed = max(worst_closed, gap)
        cfg = make_cfg(M=2, tau=tau, Pg_dBm=-10, Pu_dBm=0)
        worst_m1 = max(worst_m1, abs(A.coverage_aerial_nearest_gamma(cfg, m=1) - A.coverage_aerial_rayleigh(1, cfg)))
    ok = worst_closed < 1e-3 and worst_m1 < 1e-6
    assert verdict(4, ok, f"m=2,3 closed vs numeric max gap {worst_closed:.2e} (tol 1e-3); "
                          f"m=1 vs Rayleigh {worst_m1:.2e} (tol 1e-6)")


def test_c5_resource_blocks():
    got = (T.required_rbs("oma", 1000), T.required_rbs("scma", 1000), T.required_rbs("noma", 1000, 5))
    assert verdict(5, got == (1000, 667, 200), f"oma/scma/noma(M=5) = {got}")


def _chain(values, ses, increasing):
    """Strict ordering with every step larger than 2 SE of the difference."""
    steps = []
    for (a, sa), (b, sb) in zip(zip(values, ses), zip(values[1:], ses[1:])):
        d = (b - a) if increasing else (a - b)
        steps.append(d > 2 * math.hypot(sa, sb))
    return all(steps)


def _terr_mc(cfg, device=1, seed=61):
    rep = mc.run_coverage_sim(cfg, TRIALS, seed, WORKERS)["terrestrial"]
    return rep.per_device[device - 1], rep.std_error[device - 1]


def _aerial_mc(cfg, seed=62):
    rep = mc.run_coverage_sim(cfg, TRIALS, seed, WORKERS)["aerial"]
    return rep.per_device[0], rep.std_error[0]


def test_c6_figure_orderings():
    checks = {}

    def run(name, pairs, increasing):
        vals, ses = zip(*pairs)
        checks[name] = _chain(vals, ses, increasing)
        print(f"  {name}: {', '.join(f'{v:.5f}' for v in vals)} -> {'ok' if checks[name] else 'no'}")

    for dev in (1, 2):
        run(f"tau (device {dev})", [_terr_mc(make_cfg(tau=t), dev) for t in (0.5, 1.0, 2.0)], False)
        run(f"R (device {dev})", [_terr_mc(make_cfg(tau=0.5, R=R), dev) for R in (500.0, 1000.0, 1500.0)], False)
    run("P_u", [_terr_mc(make_cfg(tau=0.5, Pu_dBm=p)) for p in (-70, -60, -50)], False)
    run("m1", [_aerial_mc(make_cfg(tau=1.0, Pg_dBm=None, Pu_dBm=0, m=(m, 1))) for m in (1, 2, 3)], True)
    run("m2", [_aerial_mc(make_cfg(tau=2.0, Pg_dBm=None, Pu_dBm=0, m=(1, m))) for m in (1, 2, 3)], False)

    # NOMA SIC-chain coverage of the whole cluster against the OMA product
    noma_ok = []
    for bpcu in (0.1, 0.25, 0.5):
        cfg = make_cfg(M=2).with_rates_bpcu(bpcu)
        rep = mc.run_coverage_sim(cfg, TRIALS, 63, WORKERS)["terrestrial"]
        oma = mc.run_oma_sim(cfg, TRIALS, 64, WORKERS)
        prod = float(np.prod(oma.per_device))
        se_prod = prod * math.hypot(*(s / p for s, p in zip(oma.std_error, oma.per_device)))
        noma, se_noma = rep.cumulative[-1], rep.cumulative_std_error[-1]
        noma_ok.append(noma - prod > 2 * math.hypot(se_noma, se_prod))
        print(f"  NOMA vs OMA at {bpcu} BPCU: {noma:.5f} vs {prod:.5f}")
    checks["NOMA > OMA"] = all(noma_ok)

    cfg = make_cfg(M=2, tau=0.5)
    ceil = [T.coverage_exact(1, cfg.replace(P_g=p)) for p in (1e3, 1e4, 1e5)]
    checks["ceiling"] = max(abs(b - a) for a, b in zip(ceil, ceil[1:])) < 1e-3 and ceil[-1] < 1
    print(f"  ceiling: {', '.join(f'{v:.6f}' for v in ceil)}")

    failed = [k for k, v in checks.items() if not v]
    assert verdict(6, not failed, f"{len(checks) - len(failed)}/{len(checks)} orderings hold"
                                  + (f" (failed: {', '.join(failed)})" if failed else ""))


FIG9_ANCHOR = {5: (15.9, 3.18), 7: (17.8, 2.54), 15: (22.2, 1.48)}


def fig9_cfg(M, tier="terrestrial"):
    cfg = make_cfg(M=M, m=(3,) + (1,) * (M - 1)).with_rates_bpcu([1.5] + [1.0] * (M - 1))
    P = dbm_to_watt(10)
    return cfg.replace(P_g=P if tier == "terrestrial" else 0.0, P_u=P if tier == "aerial" else 0.0)


def test_c7_throughput_anchor():
    problems = []
    gaps = {}
    for M, (total, per_rb) in FIG9_ANCHOR.items():
        cfg = fig9_cfg(M)
        cov = mc.run_coverage_sim(cfg, TRIALS, 9, WORKERS)["terrestrial"]
        for mode in ("threshold", "instantaneous"):
            rates = {}
            for nf in (math.inf, 300, 100):
                try:
                    rates[nf] = mc.network_throughput(cfg, nf, TRIALS, 9, sinr_mode=mode,
                                                      workers=WORKERS, coverage=cov).sum_rate
                except NomaError as exc:
                    rates[nf] = None
                    problems.append(f"M={M} {mode} N_f={nf}: {exc}")
            print(f"  M={M} {mode}: " + ", ".join(
                f"N_f={nf}: {'undefined' if v is None else f'{v:.3f}'}" for nf, v in rates.items()))
            r_inf, r300, r100 = rates[math.inf], rates[300], rates[100]
            if None not in (r300, r100) and not r_inf > r300 > r100:
                problems.append(f"M={M} {mode}: rate not increasing in N_f")
            gaps[(M, mode)] = None if r100 is None else r_inf - r100
            if mode == "instantaneous":
                rb = r_inf / M
                if abs(r_inf - total) > 0.1 * total or abs(rb - per_rb) > 0.1 * per_rb:
                    problems.append(f"M={M}: anchor missed ({r_inf:.2f}, {rb:.3f} per RB)")
    for mode in ("threshold", "instantaneous"):
        g = [gaps[(M, mode)] for M in FIG9_ANCHOR]
        if None in g or not g[0] < g[1] < g[2]:
            problems.append(f"{mode}: N_f gap not growing with M ({g})")
    for p in problems:
        print("  " + p)
    assert verdict(7, not problems, "anchor and N_f monotonicity (terrestrial tier, P = 10 dBm)"
                                    + (f"; {len(problems)} problem(s)" if problems else ""))


def _oracle_2f1(delta, z):
    # 1 + delta y int_0^1 t^-delta / (1 + y t) dt; t = u^(1/(1-delta)) removes the singularity
    y, p = -z, 1.0 / (1.0 - delta)
    with mp.workdps(20):
        knee = min(mp.mpf(1), mp.mpf(y) ** (-(1 - delta)))
        val = mp.quad(lambda u: 1 / (1 + y * u ** p), [0, knee, 1]) * p
    return 1.0 + delta * y * float(val)


def _oracle_beta(x, a, b):
    # finite part of int_0^|x| w^(a-1) (1+w)^(b-1) dw, with w = v^(1/(a+1))
    y, q = -x, 1.0 / (a + 1.0)

    def g(v):
        w = v ** q
        return mp.expm1((b - 1) * mp.log1p(w)) / w if w > 0 else mp.mpf(b - 1)

    with mp.workdps(20):
        val = mp.quad(g, [0, mp.mpf(y) ** (a + 1)]) * q
    return float(val) + y ** a / a


def _oracle_gamma(s, x):
    val, _ = integrate.quad(lambda t: math.exp(-t), 0, x, weight="alg", wvar=(s - 1, 0),
                            epsabs=0, epsrel=1e-12, limit=200)
    return val


def _rel_ok(got, ref, rel=1e-8, abs_=1e-10):
    return abs(got - ref) <= max(abs_, rel * abs(ref))


def test_c8_special_function_oracles():
    rng = np.random.default_rng(8)
    n = 1000
    t0 = time.perf_counter()
    fails = {}

    deltas = rng.uniform(0.05, 0.95, n)
    zs = -10 ** rng.uniform(-4, 6, n)
    fails["gauss_2f1_neg"] = sum(not _rel_ok(S.gauss_2f1_neg(d, z), _oracle_2f1(d, z))
                                 for d, z in zip(deltas, zs))

    xs = -10 ** rng.uniform(-3, 2, n)
    a_s = rng.uniform(-0.95, -0.05, n)
    bs = 1.0 - rng.integers(1, 4, n)
    fails["inc_beta_gen"] = sum(not _rel_ok(S.inc_beta_gen(x, a, b), _oracle_beta(x, a, b))
                                for x, a, b in zip(xs, a_s, bs))

    ss = rng.uniform(0.05, 30, n)
    gx = rng.uniform(0, 60, n)
    fails["lower_inc_gamma"] = sum(not _rel_ok(S.lower_inc_gamma(s, x), _oracle_gamma(s, x))
                                   for s, x in zip(ss, gx))
    fails["lower_inc_gamma_scaled"] = sum(
        not _rel_ok(S.lower_inc_gamma_scaled(s, x), _oracle_gamma(s, x) / x ** s)
        for s, x in zip(ss, np.maximum(gx, 1e-6)))

    px = rng.uniform(-20, 20, n)
    pn = rng.integers(0, 40, n)
    fails["pochhammer"] = sum(not _rel_ok(S.pochhammer(x, int(k)), float(mp.rf(x, int(k))), rel=1e-12)
                              for x, k in zip(px, pn))

    bad_rules = 0
    for N in rng.integers(1, 2000, n):
        rule = S.chebyshev_rule(int(N))
        k = np.arange(1, N + 1)
        bad_rules += not (np.allclose(rule.nodes, np.cos((2 * k - 1) * np.pi / (2 * N)), rtol=0, atol=1e-15)
                          and np.all(rule.weights == np.pi / N) and rule.order == N)
    fails["chebyshev_rule"] = bad_rules

    dt = time.perf_counter() - t0
    for name, k in fails.items():
        print(f"  {name}: {n - k}/{n} within tolerance")
    ok = not any(fails.values()) and dt <= 60
    assert verdict(8, ok, f"{len(fails)} operations x {n} random inputs, {dt:.1f} s")


def test_c9_determinism(selftest_run):
    first = selftest.render(selftest_run[0])
    second = selftest.render(selftest.run_selftest(trials=TRIALS, workers=1))
    h1, h2 = (hashlib.sha256(t.encode()).hexdigest() for t in (first, second))
    assert verdict(9, h1 == h2, f"selftest sha256 {h1[:16]} vs {h2[:16]} (4 workers vs 1)")
