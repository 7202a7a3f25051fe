"""Acceptance criteria, each at its stated tolerance and time budget.

Run with pytest, or directly (``python tests/test_acceptance.py``) for the
one-line-per-criterion report alone.
"""

import io
import math
import time

import numpy as np
import pytest

import conftest
from piecewise_ldp import Duchi, Laplace, Ptt, RandomSource, derive_ptt_params, ldp_ratio_audit
from piecewise_ldp.aggregate import ExperimentConfig, fit_error_slope, run_scaling_experiment
from piecewise_ldp.analysis import (ComparisonKind, central_moment, comparison_polynomial,
                                    crossover_gap, crossover_root, eta_cubic, h2_quadratic,
                                    lower_bound_curves, min_variance_numeric, moments_by_quadrature,
                                    noisy_variance_gaps, optimal_eta_closed_form, psi1, psi2,
                                    scan_eta_feasibility, theorem7_gap, variance_analytic,
                                    worst_case_gap_vs_duchi)
from piecewise_ldp.analysis.curves import CurvePoint
from piecewise_ldp.cli import run_command
from piecewise_ldp.core import eta_upper_bound, preset_params

LN3 = math.log(3.0)


def _record(number, title, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail} ({elapsed:.2f}s / {budget:g}s)"
    conftest.ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


# 1 ---------------------------------------------------------------------------

def _type_i_at_eta0(eps):
    eta0 = optimal_eta_closed_form(eps).eta0
    if eta0 <= eta_upper_bound(eps, "type-i"):
        return Ptt(derive_ptt_params(eps, eta0, "type-i"))
    # eta0 lies outside the normalized range: audit the analysis-only bundle
    return preset_params("optimal", eps, 0.5)


def criterion_1():
    inputs = np.linspace(-1.0, 1.0, 21)
    worst_excess, worst_gap, n = 0.0, 0.0, 0
    for eps in (0.1, 1.0, LN3, 5.0):
        mechs = [Laplace(eps), Duchi(eps)]
        ptts = [Ptt(derive_ptt_params(eps, eta, "type-i")) for eta in (1.5, 2.0)]
        ptts += [_type_i_at_eta0(eps), Ptt(derive_ptt_params(eps, 2.0, "type-ii"))]
        bound = math.exp(eps)
        for m in mechs + ptts:
            rep = ldp_ratio_audit(m, inputs)
            worst_excess = max(worst_excess, rep.max_ratio / bound - 1.0)
            if m in ptts:
                worst_gap = max(worst_gap, abs(rep.max_ratio - bound) / bound)
            n += 1
    ok = worst_excess <= 1e-9 and worst_gap <= 1e-9
    return ok, f"{n} audits, max ratio/e^eps - 1 = {worst_excess:.2e}, PTT |ratio - e^eps| rel = {worst_gap:.2e}"


# 2 ---------------------------------------------------------------------------

def criterion_2():
    worst_var, worst_mass, n = 0.0, 0.0, 0
    for eps in (0.1, 1.0, LN3, 5.0):
        for fam in ("type-i", "type-ii"):
            hi = eta_upper_bound(eps, fam)
            for frac in (0.1, 0.3, 0.5, 0.8, 1.0):
                prm = derive_ptt_params(eps, 1.0 + frac * (hi - 1.0), fam)
                for A in (-1.0, -0.5, 0.0, 0.3, 1.0):
                    m = moments_by_quadrature(prm, A)
                    worst_var = max(worst_var, abs(m.variance - variance_analytic(prm, A)))
                    worst_mass = max(worst_mass, abs(m.mass - 1.0))
                    n += 1
    ok = worst_var <= 1e-10 and worst_mass <= 1e-12
    return ok, f"{n} grid points, max |var diff| = {worst_var:.2e}, max |mass - 1| = {worst_mass:.2e}"


# 3 ---------------------------------------------------------------------------

def _mc_mechanisms(eps):
    return [Laplace(eps), Duchi(eps), Ptt(derive_ptt_params(eps, 1.9, "type-i")),
            Ptt(preset_params("pm", eps)), Ptt(derive_ptt_params(eps, 2.0, "type-ii"))]


def criterion_3():
    N = 1_000_000
    root = RandomSource(20240601)
    worst_mean_z, worst_var_z, n = 0.0, 0.0, 0
    for i, eps in enumerate((0.5, 1.0, LN3)):
        for j, mech in enumerate(_mc_mechanisms(eps)):
            for k, A in enumerate((-1.0, -0.5, 0.0, 0.5, 1.0)):
                ys = mech.perturb(np.full(N, A), root.child(i, j, k))
                var = variance_analytic(mech, A)
                mu4 = central_moment(mech, A, 4)
                mean_z = abs(ys.mean() - A) / math.sqrt(var / N)
                # exact variance of the unbiased sample variance
                sd_s2 = math.sqrt((mu4 - var * var * (N - 3) / (N - 1)) / N)
                var_z = abs(ys.var(ddof=1) - var) / sd_s2
                worst_mean_z = max(worst_mean_z, mean_z)
                worst_var_z = max(worst_var_z, var_z)
                n += 1
    ok = worst_mean_z <= 4.0 and worst_var_z <= 4.0
    return ok, f"{n} cases x 1e6 draws, worst mean z = {worst_mean_z:.2f}, worst variance z = {worst_var_z:.2f}"


# 4 ---------------------------------------------------------------------------

def criterion_4():
    worst_res, worst_off = 0.0, 0.0
    for eps in (0.01, 0.1, 1.0, 5.0, 10.0):
        opt = optimal_eta_closed_form(eps)
        worst_res = max(worst_res, abs(eta_cubic(opt.eta0, eps)))
        grid = np.linspace(1.05, 3.0 * opt.eta0, 400_001)
        step = grid[1] - grid[0]
        g = (grid**3 / math.expm1(eps) + 1.0) / (3.0 * (grid - 1.0) ** 2)
        off = abs(grid[np.argmin(g)] - opt.eta0) / step
        worst_off = max(worst_off, off)
    limit = abs(optimal_eta_closed_form(1e-6).eta0 - 3.0)
    ok = worst_res <= 1e-9 and worst_off <= 1.0 and limit <= 1e-3
    return ok, (f"max |f(eta0)| = {worst_res:.2e}, grid argmin within {worst_off:.2f} steps, "
                f"|eta0(1e-6) - 3| = {limit:.1e}")


# 5 ---------------------------------------------------------------------------

def criterion_5():
    eps = np.linspace(0.0, LN3, 102)[1:-1]
    lowest = min(float(np.min(theorem7_gap(eps, a, eta))) for a in (1.0, 2.0) for eta in (1.5, 2.0, 3.0))
    return lowest > 0, f"min gap over 6 (a, eta) x 100 eps = {lowest:.4f}"


# 6 ---------------------------------------------------------------------------

def criterion_6():
    etas = np.linspace(1.05, 20.0, 400)
    neg = {eps: int(sum(comparison_polynomial("i1", e, epsilon=eps) < 0 for e in etas)) for eps in (0.1, 1.0)}
    rng = np.random.default_rng(6)
    in_domain, worst = 0, math.inf
    for _ in range(5000):
        eta = rng.uniform(1.01, 20.0)
        # any admissible width exceeds 1/(eta-1), its limit as t -> 0
        a = (1.0 + rng.uniform(0.0, 100.0)) / (eta - 1.0)
        b = 4.0 - a * eta**3 / (3.0 * (eta - 1.0))
        t_vertex = -b / 8.0
        if t_vertex > 0:
            in_domain += 1
            worst = min(worst, comparison_polynomial("p1", t_vertex, a=a, eta=eta))
    ok = all(v > 0 for v in neg.values()) and in_domain > 0 and worst > 0
    return ok, (f"I1 < 0 at {neg[0.1]}/{len(etas)} (eps=0.1), {neg[1.0]}/{len(etas)} (eps=1) eta values; "
                f"{in_domain} vertices in t > 0, min p1(vertex) = {worst:.3g}")


# 7 ---------------------------------------------------------------------------

def criterion_7():
    feas = scan_eta_feasibility([1.9])[0]
    member = feas.f1 <= 0 and feas.f2 < 0 and feas.system29_satisfied
    rng = np.random.default_rng(7)
    worst_quad, worst_sub = 0.0, 0.0
    for _ in range(2000):
        eps, a, eta = rng.uniform(0.01, 10.0), rng.uniform(0.05, 20.0), rng.uniform(1.05, 15.0)
        t = 1.0 / math.expm1(eps)
        direct = worst_case_gap_vs_duchi(eps, a, eta)
        quad = comparison_polynomial(ComparisonKind.S1, t, a=a, eta=eta)
        worst_quad = max(worst_quad, abs(quad - direct) / max(1.0, abs(direct)))
        lower = (1.0 + t) / (eta - 1.0)
        p2 = comparison_polynomial("p2", t, eta=eta)
        s1 = comparison_polynomial("s1", t, a=lower, eta=eta)
        worst_sub = max(worst_sub, abs(p2 - s1) / max(1.0, abs(s1)))
    # sign record of the fixed-eta configuration against Duchi
    curve = []
    for eps in np.geomspace(0.01, 10.0, 200):
        prm = preset_params("theorem9", eps)
        curve.append(CurvePoint(eps, worst_case_gap_vs_duchi(eps, prm.a, prm.eta), "s1(eta=1.9)"))
    positive = sum(pt.y > 0 for pt in curve)
    prm1 = preset_params("theorem9", 1.0)
    closed = worst_case_gap_vs_duchi(1.0, prm1.a, prm1.eta)
    in_t = comparison_polynomial("s1", 1.0 / math.expm1(1.0), a=prm1.a, eta=prm1.eta)
    via_mechs = noisy_variance_gaps(Ptt(prm1), Duchi(1.0))
    at_one = abs(closed - 0.7487) <= 1e-3 and abs(in_t - 0.7487) <= 1e-3 and abs(via_mechs - closed) <= 1e-12
    ok = member and worst_quad <= 1e-10 and worst_sub <= 1e-10 and at_one
    return ok, (f"eta=1.9 in system (f1={feas.f1:.3f}, f2={feas.f2:.3f}); identity residuals "
                f"{worst_quad:.1e}, {worst_sub:.1e}; s1(1) = {closed:.4f} / {in_t:.4f}; "
                f"s1 > 0 at {positive}/{len(curve)} eps in [0.01, 10] (recorded, not asserted)")


# 8 ---------------------------------------------------------------------------

def criterion_8():
    etas = np.linspace(1.0, 20.0, 20_001)[1:]
    p1 = min(psi1(e) for e in etas)
    p2 = min(psi2(e) for e in etas)
    h2 = min(h2_quadratic(t, e) for t in np.geomspace(1e-3, 100.0, 120) for e in etas[::50])
    dominated = True
    for eps in (0.01, 0.1, 0.5, 1.0):
        g1 = lower_bound_curves(eps, 2.0).g1
        for eta in np.linspace(1.0, eta_upper_bound(eps, "type-i"), 201)[1:]:
            prm = derive_ptt_params(eps, eta, "type-i")
            dominated &= variance_analytic(prm, 1.0) > g1
    scaled = [eps * eps * min_variance_numeric(eps, 1.0, "type-i").var_star for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    ok = p1 >= -1e-9 and p2 >= -1e-9 and h2 >= -1e-9 and dominated and all(2 <= s <= 8 for s in scaled)
    return ok, (f"min psi1 = {p1:.1e}, min psi2 = {p2:.1e}, min h2 = {h2:.1e}, "
                f"worst case above g1: {dominated}, eps^2 * min var = "
                + ", ".join(f"{s:.3f}" for s in scaled))


# 9 ---------------------------------------------------------------------------

def criterion_9():
    eps = np.linspace(0.0, 1.0, 1001)[1:]
    below = bool(np.all(crossover_gap(eps, 0.0) < 0))
    root = crossover_root(0.0, (0.01, 10.0))
    none_at_edge = crossover_root(1.0, (0.01, 10.0)) is None
    ok = below and root is not None and 2.3 < root < 2.4 and abs(crossover_gap(root, 0.0)) <= 1e-10 and none_at_edge
    return ok, f"F1(eps, 0) < 0 on (0, 1]: {below}; root(A=0) = {root:.6f}; no root for A=1: {none_at_edge}"


# 10 --------------------------------------------------------------------------

def criterion_10():
    ns = [1_000, 10_000, 100_000, 1_000_000]
    cases = [("duchi", Duchi(1.0), 1), ("laplace", Laplace(1.0), 1),
             ("type-i eta=1.9", Ptt(derive_ptt_params(1.0, 1.9, "type-i")), 1),
             ("type-ii eta=2", Ptt(derive_ptt_params(1.0, 2.0, "type-ii")), 1),
             ("type-i eta=1.9 d=5", Ptt(derive_ptt_params(1.0, 1.9, "type-i")), 5)]
    slopes = {}
    for i, (label, mech, d) in enumerate(cases):
        cfg = ExperimentConfig(ns, mech, trials=50, d=d, master_seed=1000 + i)
        slopes[label] = fit_error_slope(run_scaling_experiment(cfg)).slope
    ok = all(-0.6 <= s <= -0.4 for s in slopes.values())
    return ok, "slopes " + ", ".join(f"{k}: {v:.3f}" for k, v in slopes.items())


# 11 --------------------------------------------------------------------------

def _cli_bytes(argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    rep = run_command(argv, io.StringIO(stdin_text), out, err)
    return rep.status, out.getvalue().encode()


def criterion_11():
    values = "\n".join(f"{x:.3f}" for x in np.linspace(-1, 1, 2001))
    table = "a,b,c\n" + "\n".join("0.1,-0.4,0.9" for _ in range(500))
    commands = [
        (["perturb", "--mechanism", "duchi", "--epsilon", "1", "--seed", "7"], values),
        (["perturb", "--mechanism", "laplace", "--epsilon", "0.5", "--seed", "7"], values),
        (["perturb", "--epsilon", "1", "--eta", "2", "--family", "type-ii", "--seed", "11"], values),
        (["perturb", "--multidim", "--epsilon", "1", "--preset", "pm", "--seed", "3"], table),
        (["simulate", "--mechanism", "duchi", "--epsilon", "1", "--n", "100,1000,10000",
          "--trials", "10", "--seed", "5"], ""),
        (["simulate", "--epsilon", "1", "--eta", "1.9", "--d", "3", "--n", "100,1000",
          "--trials", "5", "--seed", "5"], ""),
    ]
    same = 0
    for argv, stdin_text in commands:
        first, second = _cli_bytes(argv, stdin_text), _cli_bytes(argv, stdin_text)
        same += first == second and first[0] == 0 and len(first[1]) > 0
    return same == len(commands), f"{same}/{len(commands)} stochastic commands byte-identical on re-run"


CRITERIA = [
    (1, "LDP ratio audit", criterion_1, 10),
    (2, "moment oracle equivalence", criterion_2, 5),
    (3, "Monte Carlo mean and variance", criterion_3, 120),
    (4, "optimal eta cubic", criterion_4, 5),
    (5, "matched-width family gap sign", criterion_5, 1),
    (6, "vertex obstruction and I1 sign", criterion_6, 1),
    (7, "fixed-eta comparison identities and sign record", criterion_7, 2),
    (8, "lower bound and eps^-2 scaling", criterion_8, 30),
    (9, "Duchi/Laplace crossover", criterion_9, 1),
    (10, "error scaling slopes", criterion_10, 300),
    (11, "determinism", criterion_11, 10),
]


@pytest.mark.parametrize("number,title,fn,budget", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(number, title, fn, budget):
    ok, detail, elapsed = _timed(fn)
    assert _record(number, title, ok, detail, elapsed, budget), conftest.ACCEPTANCE_LINES[number]


if __name__ == "__main__":
    results = [_record(n, t, *_timed(f), b) for n, t, f, b in CRITERIA]
    raise SystemExit(0 if all(results) else 1)
