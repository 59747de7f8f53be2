"""Acceptance run: criteria 1-8 at their stated tolerances and runtime budgets.

Each test prints one PASS/FAIL line (outside pytest's capture; the lines are
repeated in the terminal summary) and then asserts. Orbits are integrated once per module; a criterion's runtime
includes the integrations it triggers first.

Run standalone with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from functools import lru_cache

import numpy as np

from hlk.classify import classify_offaxis_surface
from hlk.cylindrical import CylCase, auto_case, verify_closed_forms
from hlk.geometry import crossings_between
from hlk.model import ModelParams, PrescribedFunction, Setting, SolutionKind, special_solutions
from hlk.orbits import (
    EventKind, OrbitOptions, OrbitSeed, OrbitTrace, comparison_orbit_check, curvature_residual,
    exact_cylinder_profile, exact_hyperplane_profile, integrate_orbit, reconstruct_profile,
)
from hlk.phaseplane import (
    PhaseState, Region, Regime, classify_region, equilibrium_analysis, gamma_curve, regime_of, rhs,
)


RESULT_LINES = []


def report(num, ok, elapsed, budget, detail, capsys=None):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s / {budget:g}s) {detail}"
    RESULT_LINES.append(line)
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


@lru_cache(maxsize=None)
def axis(n, lam, delta):
    p = ModelParams(n, lam)
    return integrate_orbit(OrbitSeed.axis_up(p) if delta == 1 else OrbitSeed.axis_down(p))


@lru_cache(maxsize=None)
def interior(n, lam, x0, direction):
    p = ModelParams(n, lam)
    return integrate_orbit(OrbitSeed.interior(p, x0, 0.0, 1), opts=OrbitOptions(direction=direction))


@lru_cache(maxsize=None)
def offaxis(n, lam, x_hat):
    return classify_offaxis_surface(ModelParams(n, lam), x_hat)


_profiles = {}


def profile(trace):
    if id(trace) not in _profiles:
        _profiles[id(trace)] = reconstruct_profile(trace)
    return _profiles[id(trace)]


# --- criteria ---------------------------------------------------------------------

def criterion_1():
    worst, notes, ok = 0.0, [], True
    for n in (2, 3):
        for lam, v in ((2.0, 1.0), (1.0, 1.0), (0.5, 1.0)):
            p = ModelParams(n, lam, v)
            cases = [auto_case(p)] + ([CylCase.LAMBDA_LESS_PI] if lam < v else [])
            for case in cases:
                rep = verify_closed_forms(p, case, (-5.0, 5.0), tol=1e-8, int_tol=1e-10, step=1e-3)
                dev = max(rep.max_dev["theta"], rep.max_dev["z"])
                worst = max(worst, dev)
                ok &= dev < 1e-8
                if case is CylCase.LAMBDA_EQUAL:
                    ok &= any("2/n" in note for note in rep.notes)
                    notes += [note for note in rep.notes if "2/n" in note][:1] if n == 3 else []
    return ok, f"max theta/z deviation {worst:.2e}; {notes[0] if notes else ''}"


def criterion_2():
    ok, worst_char, worst_bis = True, 0.0, 0.0
    for n in range(2, 13):
        for lam in (0.25, 0.5, 1.0, 2.0, 3.0):
            p = ModelParams(n, lam)
            eq = equilibrium_analysis(p)
            ok &= eq.x0 == (n - 1) / (lam * n)
            for mu in (eq.mu1, eq.mu2):
                worst_char = max(worst_char, abs(mu * mu + n * mu + n * n * lam * lam / (n - 1)))
        lo, hi = 1e-6, 10.0
        while hi - lo > 1e-15:
            mid = 0.5 * (lo + hi)
            if regime_of(ModelParams(n, mid)) is Regime.SPIRAL:
                hi = mid
            else:
                lo = mid
        worst_bis = max(worst_bis, abs(hi - math.sqrt(n - 1) / 2))
    node = equilibrium_analysis(ModelParams(5, 1.0))
    ok &= worst_char < 1e-12 and worst_bis < 1e-12
    ok &= node.regime is Regime.IMPROPER_NODE and node.mu1 == node.mu2 == -2.5
    return ok, (f"char-poly residual {worst_char:.1e}, boundary error {worst_bis:.1e}, "
                f"n=5 lam=1 mu={node.mu1.real}")


def criterion_3():
    a = axis(2, 2.0, 1)
    ok_a = (a.termination.kind is EventKind.CONVERGED_E0 and a.winding >= 2
            and a.cylinder_crossings >= 3)
    b = axis(10, 0.5, 1)
    pb = profile(b)
    ok_b = b.winding == 0 and pb.is_graph_over_axis and pb.is_horizontal_graph
    c = axis(5, 1.0, 1)
    direct = c.termination.kind is EventKind.CONVERGED_E0 and c.winding == 0
    ok_c = c.termination.kind is EventKind.CONVERGED_E0 and (c.winding > 0 or direct)
    return ok_a and ok_b and ok_c, (
        f"(2,2) winding {a.winding}, crossings {a.cylinder_crossings}; (10,0.5) winding {b.winding}, "
        f"graph {pb.is_graph_over_axis}; (5,1) winding {c.winding}"
        + (" (direct convergence inside e0 ball)" if direct else ""))


def criterion_4():
    up, down = axis(2, 2.0, 1), axis(2, 2.0, -1)
    x_plus = up.events_of(EventKind.CROSS_Y0)[0].x
    x_minus = down.events_of(EventKind.CROSS_Y0)[0].x
    e0 = ModelParams(2, 2.0).cylinder_radius
    turns = [e.x for e in down.turns]
    ok = e0 <= x_plus and x_minus - x_plus > 1e-3 and len(turns) >= 3 and turns[0] < turns[2]
    return ok, f"x+={x_plus:.6f} < x-={x_minus:.6f}; x1={turns[0]:.6f} < x3={turns[2]:.6f}"


def criterion_5():
    p = ModelParams(2, 1.0)
    hyper = [s for s in special_solutions(p, Setting.ROTATIONAL) if s.kind is SolutionKind.HYPERPLANE]
    res_special = hyper[0].residual(p)
    res_fd = curvature_residual(exact_hyperplane_profile(p)).max_residual
    closed = all(comparison_orbit_check(p, x0) for x0 in (0.3, 0.6))
    back = interior(2, 1.0, 3.0, -1)
    first = back.turns[0] if back.turns else None
    reaches = first is not None and first.kind is EventKind.TURN_PLUS and first.x > 0
    ok = res_special == 0.0 and res_fd == 0.0 and closed and reaches
    return ok, (f"hyperplane residual {res_special} / fd {res_fd}; comparison orbits closed {closed}; "
                f"backward from 3 reaches y=1 at x1={first.x if first else float('nan'):.6f}")


def criterion_6():
    tr = axis(2, 0.5, -1)
    pr = profile(tr)
    gap = abs(tr.y[-1] + 0.5)
    sign = pr.convexity_sign()
    kappa = pr.kappa
    convex = sign != 0 and np.all(sign * kappa > 0)
    below, above = offaxis(2, 0.5, 0.5), offaxis(2, 0.5, 3.0)
    dich = (below.embedded is True and below.metadata["self_intersections"] == 0
            and above.embedded is False and above.metadata["self_intersections"] == 1)
    ok = (tr.termination.kind is EventKind.CONVERGED_ASYMPTOTE and gap < 1e-4 and convex
          and pr.self_intersections == 0 and dich)
    return ok, (f"|y+lam|={gap:.1e}; kappa_alpha one-signed ({'>' if sign > 0 else '<'}0 with the "
                f"integration normal, max |.| {np.abs(kappa).max():.2f}), "
                f"{pr.self_intersections} self-intersections; off-axis x_hat=0.5 -> "
                f"{below.metadata['self_intersections']}, x_hat=3 -> {above.metadata['self_intersections']}")


def _offaxis_profile(n, lam, x_hat):
    return reconstruct_profile(OrbitTrace.join(interior(n, lam, x_hat, -1), interior(n, lam, x_hat, 1)))


def criterion_7():
    profs = {f"axis({n},{lam},{d})": profile(axis(n, lam, d))
             for n, lam, d in [(2, 2.0, 1), (2, 2.0, -1), (10, 0.5, 1), (5, 1.0, 1), (2, 0.5, -1)]}
    for n, lam, x_hat in [(2, 0.5, 0.5), (2, 0.5, 3.0), (2, 1.0, 3.0)]:
        profs[f"offaxis({n},{lam},{x_hat})"] = _offaxis_profile(n, lam, x_hat)
    profs["hyperplane"] = exact_hyperplane_profile(ModelParams(2, 1.0))
    profs["cylinder"] = exact_cylinder_profile(ModelParams(3, 2.0))
    worst, name = 0.0, ""
    for key, pr in profs.items():
        r = curvature_residual(pr, max_step=1e-3).max_residual
        if not r <= worst:
            worst, name = r, key
    return worst < 1e-4, f"max |H_fd - (x'+lam)| = {worst:.2e} over {len(profs)} profiles (worst {name})"


def _polylines(tr, eps, x_cut):
    o = np.argsort(tr.s)
    x, y, e = tr.x[o], tr.y[o], tr.eps[o]
    e = np.where(x <= x_cut, e, 0)
    cut = np.flatnonzero(np.diff(e)) + 1
    return [np.column_stack([x[a:b], y[a:b]])
            for a, b in zip(np.r_[0, cut], np.r_[cut, len(x)]) if e[a] == eps and b - a >= 2]


def criterion_8():
    rng = np.random.default_rng(8)
    bad_sign = bad_null = 0
    for n, lam in [(2, 2.0), (3, 1.0), (4, 0.5), (7, 0.3), (12, 3.0)]:
        p, f = ModelParams(n, lam), PrescribedFunction.linear(lam)
        for eps in (1, -1):
            for x, y in zip(np.exp(rng.uniform(-6, 4, 4000)), rng.uniform(-0.999, 0.999, 4000)):
                s = PhaseState(float(x), float(y), eps)
                info = classify_region(p, s)
                if info.label in (Region.ON_AXIS_Y0, Region.ON_GAMMA):
                    continue
                dx, dy = rhs(p, f, s)
                bad_sign += info.sign_dx != np.sign(dx) or (abs(dy) > 1e-9 and info.sign_dy != np.sign(dy))
            for y in rng.uniform(-0.999, 0.999, 200):
                g = gamma_curve(p, eps, float(y))
                if g is not None:
                    bad_null += abs(rhs(p, f, PhaseState(g, float(y), eps))[1]) > 1e-12 * max(1.0, n / g)
    groups = [([axis(2, 2.0, 1), axis(2, 2.0, -1), interior(2, 2.0, 0.1, 1), interior(2, 2.0, 0.1, -1)], 50.0),
              ([axis(2, 0.5, -1), interior(2, 0.5, 0.5, -1), interior(2, 0.5, 0.5, 1)], 6.0)]
    crossings = 0
    for traces, x_cut in groups:
        for eps in (1, -1):
            for i in range(len(traces)):
                for j in range(i + 1, len(traces)):
                    crossings += crossings_between(_polylines(traces[i], eps, x_cut),
                                                   _polylines(traces[j], eps, x_cut))
    all_traces = [t for g, _ in groups for t in g] + [axis(10, 0.5, 1), axis(5, 1.0, 1), axis(3, 0.5, 1)]
    two_contacts = sum(len(t.events_of(EventKind.AXIS_CONTACT)) > 1 for t in all_traces)
    worst_orth = max(abs(math.cos(t.state_at(e.s)[2]))
                     for t in all_traces for e in t.events_of(EventKind.CROSS_Y0))
    ok = bad_sign == 0 and bad_null == 0 and crossings == 0 and two_contacts == 0 and worst_orth < 1e-9
    return ok, (f"region/rhs mismatches {bad_sign}, nullcline misses {bad_null}, orbit crossings "
                f"{crossings}, traces with two axis contacts {two_contacts}, max |x'| at y=0 {worst_orth:.1e}")


BUDGETS = {1: 10, 2: 1, 3: 30, 4: 30, 5: 30, 6: 30, 7: 20, 8: 60}
CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run(num, capsys=None):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[num]()
    elapsed = time.perf_counter() - t0
    ok = bool(ok) and elapsed < BUDGETS[num]
    report(num, ok, elapsed, BUDGETS[num], detail, capsys)
    return ok, detail


def test_criterion_1_closed_form_fidelity(capsys):
    ok, detail = run(1, capsys)
    assert ok, detail


def test_criterion_2_equilibrium_and_regimes(capsys):
    ok, detail = run(2, capsys)
    assert ok, detail


def test_criterion_3_axis_up_classification(capsys):
    ok, detail = run(3, capsys)
    assert ok, detail


def test_criterion_4_lambda_greater_ordering(capsys):
    ok, detail = run(4, capsys)
    assert ok, detail


def test_criterion_5_lambda_one_cases(capsys):
    ok, detail = run(5, capsys)
    assert ok, detail


def test_criterion_6_lambda_less_asymptote(capsys):
    ok, detail = run(6, capsys)
    assert ok, detail


def test_criterion_7_curvature_residual(capsys):
    ok, detail = run(7, capsys)
    assert ok, detail


def test_criterion_8_structural_properties(capsys):
    ok, detail = run(8, capsys)
    assert ok, detail


if __name__ == "__main__":
    results = [run(k)[0] for k in CRITERIA]
    sys.exit(0 if all(results) else 1)
