"""Acceptance criteria 1-8, one test each; each prints a PASS/FAIL line."""

import time

import numpy as np

from boundsim.expsim import (
    NoiseModel,
    mcp_from_counts,
    measurement_budget,
    reconstruct,
    retroactive_mix,
    simulate_mcp,
    simulate_tomography,
    tomography_settings,
)
from boundsim.mubs import conjugate_basis, mub_family, verify_mub
from boundsim.numkernel import fidelity, herm_eigvals, partial_transpose
from boundsim.search import (
    BOUND_ENTANGLED,
    CLASS_NAMES,
    SliceSpec,
    horodecki_sweep,
    optimize_witness,
    region_components,
    region_has_holes,
    scan_slice,
)
from boundsim.simplex import (
    FamilyParams,
    coeffs_from_family,
    equivalent_variants,
    family_state,
    ppt_min_eig,
    random_simplex,
    state_from_coeffs,
)
from boundsim.witness import joint_prob_table, mcp, witness_coeffs

FEATURED = (-0.07, -1.73, -0.5774)
W = np.exp(2j * np.pi / 3)


def test_criterion_1_correlation_table(acceptance):
    t0 = time.perf_counter()
    rep = mcp(family_state(FamilyParams(3, *FEATURED)), labeling="methods_d3")
    target = (0.675, 0.468, 0.468, 0.468)
    ok = all(abs(c - t) <= 1e-3 for c, t in zip(rep.correlations, target)) and abs(rep.witness + 0.079) <= 1e-3
    detail = "C=(" + ", ".join(f"{c:.4f}" for c in rep.correlations) + f"), 2-I4={rep.witness:.4f}"
    acceptance(1, ok, detail, time.perf_counter() - t0, 1)


def test_criterion_2_featured_state_is_ppt_and_physical(acceptance):
    t0 = time.perf_counter()
    p = FamilyParams(3, *FEATURED)
    c = coeffs_from_family(p).c
    lam = ppt_min_eig(family_state(p), 3)
    ok = (
        lam > 0
        and c.min() >= 0
        and abs(c[0, 0] - 0.2109) <= 1e-4
        and all(abs(c[i, 2] - 0.2249) <= 1e-4 for i in range(3))
    )
    detail = f"min eig(rho^T_A)={lam:.6f}, c00={c[0, 0]:.5f}, c_i2={c[0, 2]:.5f}, min c={c.min():.5f}"
    acceptance(2, ok, detail, time.perf_counter() - t0, 1)


def test_criterion_3_horodecki_sweep(acceptance):
    t0 = time.perf_counter()
    rows = horodecki_sweep(1.0, 4.0, 0.05)
    inner = min(r.min_pt_eig for r in rows)
    lo, hi = horodecki_sweep(0.5, 0.5, 0.1)[0], horodecki_sweep(4.5, 4.5, 0.1)[0]
    w35 = next(r for r in rows if r.lam == 3.5).witness
    ok = len(rows) == 61 and inner >= -1e-9 and lo.min_pt_eig < -1e-6 and hi.min_pt_eig < -1e-6 and w35 < 0
    detail = (
        f"min PT eig on [1,4]={inner:.2e}, at 0.5={lo.min_pt_eig:.4f}, at 4.5={hi.min_pt_eig:.4f}, "
        f"witness(3.5)={w35:.4f}"
    )
    acceptance(3, ok, detail, time.perf_counter() - t0, 5)


def test_criterion_4_optimization_minima(acceptance):
    t0 = time.perf_counter()
    targets = {3: (-0.15, 0.005), 4: (-0.125, 0.005), 5: (-0.106, 0.005), 7: (-0.081, 0.01), 8: (-0.073, 0.01), 9: (-0.067, 0.01)}
    parts, ok = [], True
    for d, (target, tol) in targets.items():
        res = optimize_witness(d, threads=4)
        good = abs(res.witness - target) <= tol and res.feasible
        ok &= good
        parts.append(f"d={d}:{res.witness:.5f}{'' if good else '!'}")
    acceptance(4, ok, " ".join(parts), time.perf_counter() - t0, 600)


def test_criterion_5_slice_geometry(acceptance):
    t0 = time.perf_counter()
    spec = SliceSpec(-0.5776, (-1.0, 1.0), (-3.0, 0.0), (200, 200))
    g1 = scan_slice(spec, threads=1)
    g4 = scan_slice(spec, threads=4)
    j, i = g1.cell_of(-0.07, -1.73)
    region = g1.bound_region
    point = scan_slice(SliceSpec(-0.5776, (-0.07, 0.93), (-1.73, -0.73), (2, 2)))
    same = all(np.array_equal(getattr(g1, f), getattr(g4, f)) for f in ("cls", "witness", "min_pt_eig"))
    ok = (
        region.any()
        and g1.cls[j, i] == BOUND_ENTANGLED
        and point.cls[0, 0] == BOUND_ENTANGLED
        and not region_has_holes(region)
        and same
    )
    detail = (
        f"{int(region.sum())} bound-entangled cells, {region_components(region)} component(s), "
        f"holes={region_has_holes(region)}, featured cell class={CLASS_NAMES[g1.cls[j, i]]}, threads 1 vs 4 identical={same}"
    )
    acceptance(5, ok, detail, time.perf_counter() - t0, 120)


def test_criterion_6_mub_suite(acceptance):
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for d in (2, 3, 4, 5, 7, 8, 9):
        fam = mub_family(d)
        rep = verify_mub(fam)
        worst = max(worst, rep.max_overlap_deviation)
        ok &= fam.m == d + 1 and rep.max_overlap_deviation <= 1e-10 and rep.max_orthonormality_deviation <= 1e-10
    lab = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 1, 1], [1, W, W**2], [1, W**2, W]],
        [[1, W, W], [1, W**2, 1], [1, 1, W**2]],
        [[1, W**2, W**2], [1, 1, W], [1, W, 1]],
    ]
    fam3 = mub_family(3)
    phase_dev = 0.0
    for k in range(4):
        for i in range(3):
            ref = np.array(lab[k][i], dtype=complex) / np.linalg.norm(lab[k][i])
            ph = np.vdot(fam3.bases[k][i], ref)
            phase_dev = max(phase_dev, float(np.abs(fam3.bases[k][i] * ph / abs(ph) - ref).max()))
    f6 = mub_family(6)
    ok &= phase_dev <= 1e-12 and f6.m == 3 and verify_mub(f6).ok()
    detail = f"max overlap deviation={worst:.1e}, d=3 lab-basis deviation={phase_dev:.1e}, d=6 bases={f6.m}"
    acceptance(6, ok, detail, time.perf_counter() - t0, 5)


def test_criterion_7_property_suites(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    checks = {}

    spec_err = 0.0
    for n in range(1000):
        d = (3, 4, 5)[n % 3]
        c = random_simplex(d, rng)
        spec_err = max(spec_err, float(np.abs(herm_eigvals(state_from_coeffs(c)) - c.sorted_values()).max()))
    checks["spectrum"] = spec_err <= 1e-10

    def ket(n):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        return v / np.linalg.norm(v)

    worst_I = 0.0
    for _ in range(10_000):
        k = int(rng.integers(1, 10))
        w = rng.dirichlet(np.ones(k))
        vs = [np.kron(ket(3), ket(3)) for _ in range(k)]
        rho = sum(wi * np.outer(v, v.conj()) for wi, v in zip(w, vs))
        worst_I = max(worst_I, mcp(rho).I)
    checks["separable"] = worst_I <= 2 + 1e-9

    p = FamilyParams(3, *FEATURED)
    variants = equivalent_variants(p)
    pt = [herm_eigvals(partial_transpose(state_from_coeffs(v), 3, 3)) for v in variants]
    ws = [witness_coeffs(v) for v in variants]
    pt_spread = max(float(np.abs(x - pt[0]).max()) for x in pt)
    checks["variants"] = len(variants) == 72 and pt_spread <= 1e-9 and max(ws) - min(ws) <= 1e-9

    inv = True
    for _ in range(100):
        m = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        inv &= np.array_equal(partial_transpose(partial_transpose(m, 3, 3), 3, 3), m)
    checks["involution"] = bool(inv)

    fam = mub_family(3)
    v = np.zeros(9)
    v[0] = 1
    prod = np.outer(v, v)
    pred = max(
        float(np.abs(joint_prob_table(prod, fam.bases[k], conjugate_basis(fam.bases[k])) - 1 / 9).max()) for k in (1, 2, 3)
    )
    checks["predictability"] = pred <= 1e-12

    detail = (
        f"spectrum err={spec_err:.1e}, max separable I4={worst_I:.6f}, variant PT spread={pt_spread:.1e}, "
        f"witness spread={max(ws) - min(ws):.1e}, product-state dev={pred:.1e}, "
        + ",".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
    )
    acceptance(7, all(checks.values()), detail, time.perf_counter() - t0, 600)


def test_criterion_8_experiment_simulation(acceptance):
    t0 = time.perf_counter()
    c = coeffs_from_family(FamilyParams(3, *FEATURED))
    rho = state_from_coeffs(c)
    budget = measurement_budget(3).as_tuple()
    tset = tomography_settings(3)
    clean = reconstruct(retroactive_mix(simulate_tomography(tset, NoiseModel(), expected=True), c), tset, background=5)
    f_clean = fidelity(clean, rho)
    fids, wits = [], []
    for seed in range(100):
        noise = NoiseModel(peak=1500, background=5, seed=seed)
        est = reconstruct(retroactive_mix(simulate_tomography(tset, noise), c), tset, background=5)
        fids.append(fidelity(est, rho))
        wits.append(mcp_from_counts(retroactive_mix(simulate_mcp(3, noise), c), 3, "methods_d3").witness)
    fids, wits = np.array(fids), np.array(wits)
    frac_f, frac_w = float(np.mean(fids >= 0.97)), float(np.mean(wits < 0))
    ok = budget == (225, 12, 36) and f_clean >= 0.999 and frac_f >= 0.9 and frac_w >= 0.95
    detail = (
        f"budget={budget}, noiseless fidelity={f_clean:.6f}, noisy fidelity mean={fids.mean():.4f} "
        f"(>=0.97 in {frac_f:.0%}), witness mean={wits.mean():.4f}+-{wits.std():.4f} (negative in {frac_w:.0%})"
    )
    acceptance(8, ok, detail, time.perf_counter() - t0, 600)
