"""Acceptance criteria, one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""
import itertools
import time

import numpy as np
import pytest

from nkverify import _pykernels
from nkverify._table import INDEX, SIGN
from nkverify.chart import SphereChart, random_tangent_frame
from nkverify.cli import main
from nkverify.integrability import (
    DEFAULT_THRESHOLDS,
    NIJENHUIS_BASELINE,
    NIJENHUIS_FLOOR_FRACTION,
    NON_INTEGRABLE,
    flat_integrable_field,
    nijenhuis_baseline,
    nijenhuis_fd,
    nijenhuis_norm,
)
from nkverify.nk import NKStructure, random_rotation
from nkverify.octonion import basis, cross7, oct_mul, oct_norm
from nkverify.report import CampaignConfig, run_certify_tamed
from nkverify.tamed import (
    degenerate_acs,
    i_from_k,
    k_formulas,
    k_from_i,
    k_property_residuals,
    lemma_nondegeneracy_check,
    sample_k,
    sample_tamed_direct,
    taming_membership,
    theorem_chain,
)
from nkverify.nk import j_adapted_frame

RESULTS = []


def record(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def point_frame(rng):
    p = rng.normal(size=7)
    p /= np.linalg.norm(p)
    return p, random_tangent_frame(p, rng)


def nk_domega(frame, rotation=None):
    f = frame if rotation is None else rotation.T @ frame
    return 3 * np.einsum("abc,ai,bj,ck->ijk", _pykernels.PHI, f, f, f)


# independent oracle: Cayley-Dickson doubling of quaternions -------------


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def _qconj(a):
    return np.array([a[0], -a[1], -a[2], -a[3]])


def cayley_dickson(x, y):
    # (a, b)(c, d) = (ac - conj(d) b, da + b conj(c)); coordinates (1, i, j, k, l, il, jl, kl)
    # reordered to the table's basis e0..e7 = 1, i, j, k, l, il, jl, kl after a fixed relabelling
    a, b = x[[0, 1, 2, 3]], x[[4, 5, 6, 7]]
    c, d = y[[0, 1, 2, 3]], y[[4, 5, 6, 7]]
    return np.concatenate([_qmul(a, c) - _qmul(_qconj(d), b), _qmul(d, a) + _qmul(b, _qconj(c))])


# relabelling between the doubling coordinates and the table basis; the
# table puts e4 = l, so e5 = e1 e4 = i l, e6 = e2 e4 = j l, e7 = e3 e4 = k l
def _doubling_basis():
    e = np.eye(8)
    mats = np.zeros((8, 8))
    mats[:, 0:4] = e[:, 0:4]
    mats[:, 4] = e[:, 4]
    for i, col in zip((1, 2, 3), (5, 6, 7)):
        mats[:, col] = cayley_dickson(e[i], e[4])
    return mats


def test_octonion_suite():
    t0 = time.perf_counter()
    m = _doubling_basis()
    minv = np.linalg.inv(m)
    table_err = 0.0
    for i, j in itertools.product(range(8), repeat=2):
        ours = oct_mul(basis(i), basis(j))
        oracle = minv @ cayley_dickson(m[:, i], m[:, j])
        table_err = max(table_err, np.max(np.abs(ours - oracle)),
                        np.max(np.abs(ours - SIGN[i][j] * basis(INDEX[i][j]))))
    rng = np.random.default_rng(1)
    a = rng.normal(size=(1000, 8))
    b = rng.normal(size=(1000, 8))
    ab = oct_mul(a, b)
    norm_err = np.max(np.abs(oct_norm(ab) - oct_norm(a) * oct_norm(b)) / (oct_norm(a) * oct_norm(b)))
    u = rng.normal(size=(1000, 7))
    v = rng.normal(size=(1000, 7))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    w = np.array([cross7(x, y) for x, y in zip(u, v)])
    orth_err = max(np.max(np.abs(np.sum(w * u, 1))), np.max(np.abs(np.sum(w * v, 1))))
    lag = np.sum(u * u, 1) * np.sum(v * v, 1) - np.sum(u * v, 1) ** 2
    lag_err = np.max(np.abs(np.sum(w * w, 1) - lag))
    elapsed = time.perf_counter() - t0
    worst = max(table_err, norm_err, orth_err, lag_err)
    ok = record(
        "octonion suite",
        worst < 1e-12 and elapsed < 1.0,
        f"64 products + 1000 pairs, worst residual {worst:.2e} (tol 1e-12), {elapsed:.2f}s (limit 1s)",
    )
    assert ok


def test_nearly_kaehler_verification():
    from nkverify.nk import verify_nk_conditions

    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    structures = [NKStructure()] + [NKStructure(random_rotation(rng)) for _ in range(5)]
    worst = {"skew": 0.0, "nabla_omega": 0.0, "domega_type": 0.0, "dim_omega": 0.0}
    spreads, lambdas, strict = [], [], np.inf
    for s in structures:
        chart = SphereChart.random(rng)
        pts = rng.normal(size=(20, 6))
        pts *= 0.4 * rng.uniform(0, 1, size=(20, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
        rep = verify_nk_conditions(s, chart, pts)
        worst["skew"] = max(worst["skew"], rep.skew_residual.max())
        worst["nabla_omega"] = max(worst["nabla_omega"], rep.nabla_omega_residual.max())
        worst["domega_type"] = max(worst["domega_type"], rep.domega_type_residual.max())
        worst["dim_omega"] = max(worst["dim_omega"], rep.dim_omega_residual.max())
        strict = min(strict, rep.nabla_j_min_norm.min())
        spreads.append(rep.lambda_spread)
        lambdas.extend(rep.lambdas)
    elapsed = time.perf_counter() - t0
    ok = (
        all(v < 1e-4 for v in worst.values())
        and max(spreads) < 1e-5
        and strict > 0
        and elapsed < 30
    )
    record(
        "nearly Kaehler verification",
        ok,
        "6 structures x 20 points, residuals "
        + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        + f" (tol 1e-4); lambda {np.mean(lambdas):.10f} spread {max(spreads):.1e} (tol 1e-5);"
        f" min |nabla_X J| {strict:.6f}; {elapsed:.1f}s (limit 30s)",
    )
    assert ok


def test_lemma_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    s = NKStructure()
    n = 10_000
    min_det = np.inf
    all_tamed = True
    for _ in range(n):
        p, frame = point_frame(rng)
        j = s.acs_in_frame(p, frame)
        acs = sample_tamed_direct(j, rng, scale=rng.uniform(0.1, 1.5))
        all_tamed &= bool(taming_membership(acs, j.T))
        min_det = min(min_det, abs(lemma_nondegeneracy_check(acs, j)))
    # hand-built degenerate structure: -J on one J-invariant plane
    p = np.eye(7)[0]
    j = s.acs_in_frame(p, j_adapted_frame(s, p, rng))
    bad = degenerate_acs(j, plane=1)
    rejected = not taming_membership(bad, j.T)
    bad_det = abs(lemma_nondegeneracy_check(bad, j))
    elapsed = time.perf_counter() - t0
    ok = all_tamed and min_det > 0 and rejected and bad_det < 1e-12 and elapsed < 30
    record(
        "Lemma suite",
        ok,
        f"{n} tamed I, min |det(J+I)| = {min_det:.3e}; degenerate I rejected={rejected}"
        f" (|det| {bad_det:.1e}); {elapsed:.1f}s (limit 30s)",
    )
    assert ok


def test_k_correspondence():
    rng = np.random.default_rng(4)
    s = NKStructure()
    rt_k = rt_i = prop = formula = 0.0
    min_eig = np.inf
    for _ in range(1000):
        p, frame = point_frame(rng)
        j = s.acs_in_frame(p, frame)
        k = sample_k(j, rng.uniform(0.01, 0.99), rng)
        rt_k = max(rt_k, np.max(np.abs(k_from_i(i_from_k(k, j), j) - k)))
        acs = sample_tamed_direct(j, rng, scale=rng.uniform(0.1, 1.0))
        rt_i = max(rt_i, np.max(np.abs(i_from_k(k_from_i(acs, j), j) - acs)))
        res = k_property_residuals(k, j)
        prop = max(prop, res["anticommute"], res["g_symmetric"], res["omega_skew"])
        min_eig = min(min_eig, res["min_eig_1_minus_k2"])
        k1, k2 = k_formulas(acs, j)
        formula = max(formula, np.max(np.abs(k1 - k2)))
        res = k_property_residuals(k1, j)
        prop = max(prop, res["anticommute"], res["g_symmetric"], res["omega_skew"])
        min_eig = min(min_eig, res["min_eig_1_minus_k2"])
    ok = rt_k < 1e-9 and rt_i < 1e-9 and prop < 1e-10 and min_eig > -1e-10 and formula < 1e-9
    record(
        "K-correspondence",
        ok,
        f"1000 samples, round-trips {rt_k:.1e}/{rt_i:.1e} (tol 1e-9), properties {prop:.1e} (tol 1e-10),"
        f" min eig(1-K^2) {min_eig:.3e}, formulas agree {formula:.1e} (tol 1e-9)",
    )
    assert ok


def test_proof_chain():
    rng = np.random.default_rng(5)
    r = random_rotation(rng)
    s = NKStructure(r)
    om11 = block = theta = oracle = 0.0
    bound_slack = np.inf
    short_dev = []
    min_coef = np.inf
    rank_ok = True
    for _ in range(1000):
        p, frame = point_frame(rng)
        j = s.acs_in_frame(p, frame)
        k = sample_k(j, rng.uniform(0.01, 0.99), rng)
        c = theorem_chain(k, j, nk_domega(frame, r))
        om11 = max(om11, c.omega_11_residual)
        block = max(block, c.block_inverse_residual)
        theta = max(theta, c.theta_residual)
        rank_ok &= c.theta_rank == 6
        bound_slack = min(bound_slack, abs(c.coefficient) - (c.lower_bound - 1e-9))
        oracle = max(oracle, abs(c.coefficient - c.extended_value))
        min_coef = min(min_coef, abs(c.coefficient))
        short_dev.append(abs(c.coefficient - c.short_value) / abs(c.coefficient))
    ok = om11 < 1e-9 and block < 1e-9 and theta < 1e-9 and rank_ok and bound_slack >= 0 and oracle < 1e-8 and min_coef > 0
    record(
        "Theorem proof chain",
        ok,
        f"1000 K, omega(1,1) {om11:.1e}, block inverse {block:.1e}, theta (1,0) {theta:.1e} (tol 1e-9);"
        f" min |coef| {min_coef:.4f}, bound slack >= {bound_slack:.2e}; closed form vs oracle {oracle:.1e} (tol 1e-8)",
    )
    # informational: the short closed form without the conj(nu) term
    print(
        f"       short form mu/sqrt(det(1-K^2)) vs oracle: median rel. dev {np.median(short_dev):.2e},"
        f" max {np.max(short_dev):.2e}"
    )
    RESULTS.append(
        f"       (logged) short closed form vs oracle: median rel. dev {np.median(short_dev):.2e}, max {np.max(short_dev):.2e}"
    )
    assert ok


def test_non_integrability_certification():
    t0 = time.perf_counter()
    report, code = run_certify_tamed(CampaignConfig(seed=7, samples=10, points=20, rho=0.5))
    recs = report["records"]
    verdicts_ok = len(recs) == 200 and all(r["verdict"] == NON_INTEGRABLE for r in recs)
    floor = DEFAULT_THRESHOLDS["nijenhuis_floor"]
    min_n = min(r["nijenhuis_norm"] for r in recs)
    bound_ok = all(r["abs_domega30_coefficient"] >= r["lower_bound"] - 1e-9 for r in recs)
    om11 = max(r["omega_11_residual"] for r in recs)
    # floor is calibrated from the measured baseline of J itself
    rng = np.random.default_rng(8)
    measured = nijenhuis_baseline(NKStructure(), [(SphereChart.random(rng), np.zeros(6)) for _ in range(3)])
    calibrated = NIJENHUIS_FLOOR_FRACTION * measured.min()
    flat = flat_integrable_field(strength=0.5, linear=np.eye(6) + 0.3 * rng.normal(size=(6, 6)))
    flat_n = max(
        nijenhuis_norm(nijenhuis_fd(flat, flat.chart, x)) for x in rng.uniform(-1, 1, size=(20, 6))
    )
    elapsed = time.perf_counter() - t0
    ok = (
        code == 0
        and verdicts_ok
        and min_n > floor
        and abs(calibrated - floor) < 1e-6 * floor
        and bound_ok
        and om11 < 1e-9
        and flat_n < 1e-5
        and elapsed < 120
    )
    record(
        "Non-integrability certification",
        ok,
        f"10 fields x 20 points all NonIntegrable={verdicts_ok}; min |N| {min_n:.3f} > floor {floor:.3f}"
        f" (baseline {measured.min():.6f}, frozen {NIJENHUIS_BASELINE:.6f}); flat control |N| {flat_n:.1e}"
        f" (tol 1e-5); {elapsed:.1f}s (limit 120s)",
    )
    assert ok


def test_determinism(tmp_path):
    args = ["certify-tamed", "--seed", "11", "--samples", "4", "--points", "3"]
    one, many = tmp_path / "w1.json", tmp_path / "w3.json"
    c1 = main(args + ["--workers", "1", "--json-out", str(one)])
    c3 = main(args + ["--workers", "3", "--json-out", str(many)])
    same = one.read_bytes() == many.read_bytes()
    ok = c1 == c3 == 0 and same
    record("Determinism", ok, f"byte-identical report for 1 and 3 workers: {same}")
    assert ok
