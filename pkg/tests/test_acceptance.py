"""Acceptance criteria 1 to 12; each test prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from forest_gen import random_forest

from mirrorpoly.corpus import RIGHT, block, block_with_special, examples, exceptional_prism, rad, tetra_labels
from mirrorpoly.ecimahedron import NotEcimahedron, cap_name, decompose
from mirrorpoly.graph_model import AngleLabel, enumerate_three_circuits, r_threshold, three_circuit
from mirrorpoly.moduli import classify_moduli, coordinate_schema, interval, random_point
from mirrorpoly.orientation import brute_force_kappa, kappa, kappa_fixed
from mirrorpoly.realization import (
    CUTS,
    MEETS,
    MISSES,
    _block_realization,
    circuit_determinant,
    coordinates,
    glue,
    glue_with,
    gluing_parameter,
    r_invariant,
    realize,
    realize_tetrahedron,
    realize_triangle,
    solve_exceptional_prism,
    triangle_det_class,
    triangle_det_closed_form,
    truncation_plane,
    verify,
)


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {text}")
        assert ok, text

    return emit


def mu(theta):
    return 4 * math.cos(theta) ** 2


def test_01_kappa_table(report):
    # [PAPER] rows of the block table
    table = {0: [1], 1: [1, 2], 2: [1, 2, 4], 3: [1, 2, 4, 8], 4: [1, 2, 4, 8, 14]}
    start = time.perf_counter()
    got, counts_ok = {}, True
    for i, row in table.items():
        got[i] = []
        for k in range(len(row)):
            g = block_with_special(i, k)
            counts_ok &= sum(c.special for c in enumerate_three_circuits(g)) == k
            got[i].append(kappa(decompose(g)))
    elapsed = time.perf_counter() - start
    ok = got == table and counts_ok and elapsed < 1.0
    report(1, ok, f"kappa(T_i, k special) = {got}, {elapsed:.2f} s")


def test_02_fixed_circuit_table(report):
    # [PAPER] kappa with one special circuit fixed; k counts the other special circuits
    table = {1: [1], 2: [1, 2], 3: [1, 2, 4], 4: [1, 2, 4, 7]}
    start = time.perf_counter()
    got, split_ok = {}, True
    for i, row in table.items():
        got[i] = []
        for k in range(len(row)):
            forest = decompose(block_with_special(i, k + 1))
            key = forest.forest().special_keys()[0]
            plus, minus = kappa_fixed(forest, key, "+"), kappa_fixed(forest, key, "-")
            split_ok &= plus + minus == kappa(forest)
            got[i].append(plus)
    elapsed = time.perf_counter() - start
    ok = got == table and split_ok and elapsed < 1.0
    report(2, ok, f"kappa(G, Gamma) = {got}, + and - add up to kappa: {split_ok}, {elapsed:.2f} s")


def test_03_figure_examples(report):
    # [PAPER] component counts stated for the three figures
    expected = {
        "fig1_kappa1": 1, "fig1_kappa14": 14, "fig2_kappa32": 32,
        "fig2_kappa56": 56, "fig3_kappa33614": 33614, "fig3_kappa4094": 4094,
    }
    ex = examples()
    start = time.perf_counter()
    got = {name: kappa(decompose(ex[name])) for name in expected}
    elapsed = time.perf_counter() - start
    report(3, got == expected and elapsed < 5.0, f"{got}, {elapsed:.2f} s")


def test_04_orientation_oracle(report):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        f = random_forest(rng, max_edges=12)
        mismatches += kappa(f) != brute_force_kappa(f)
    elapsed = time.perf_counter() - start
    report(4, mismatches == 0 and elapsed < 30, f"{mismatches} mismatches on 200 forests, {elapsed:.2f} s")


def test_05_exceptional_prism(report):
    counts, worst = [], 0.0
    for frac in (0.4, 1 / 3, 0.25):
        theta = frac * math.pi
        found = solve_exceptional_prism(mu(theta), mu(theta), mu(theta))
        counts.append(len(found))
        g = exceptional_prism(theta, theta, theta)
        for P in found:
            rep = verify(P, g)
            worst = max(worst, rep.max_residual if rep.passed else math.inf)
    ok = counts == [2, 1, 0] and worst < 1e-9
    report(5, ok, f"realizations {counts}, max residual {worst:.1e}")


def test_06_triangle_round_trip(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in range(1000):
        m = rng.uniform(0, 4, 3)
        if n % 10 == 0:
            m[rng.integers(3)] = 0.0
        R = 0.0 if m.min() == 0 else rng.uniform(-10, 10)
        P = realize_triangle(*m, R)
        worst = max(worst, abs(r_invariant(P, ("1", "2", "3"), right_angle_zero=True) - R))
    report(6, worst < 1e-9, f"max |R - recomputed| = {worst:.1e} over 1000 triangles")


def _spherical_mus(rng):
    while True:
        theta = rng.uniform(0.02, math.pi / 2 - 0.02, 3)
        if theta.sum() > math.pi + 1e-3:
            return [mu(t) for t in theta]


def test_07_determinant_trichotomy(report):
    rng = np.random.default_rng(7)
    disagree = 0
    for _ in range(1000):
        m = rng.uniform(0.01, 3.99, 3)
        R = rng.uniform(-8, 8)
        closed = triangle_det_closed_form(*m, R)
        disagree += triangle_det_class(*m, R) != np.sign(closed)
    worst = 0.0
    for _ in range(100):
        m = _spherical_mus(rng)
        r = r_threshold(sum(m), math.sqrt(math.prod(m)))
        for R in (r, -r):
            worst = max(worst, abs(circuit_determinant(realize_triangle(*m, R), ("1", "2", "3"))))
    ok = disagree == 0 and worst < 1e-8
    report(7, ok, f"{disagree} sign disagreements in 1000, max |D| at +-r = {worst:.1e}")


def test_08_tetrahedron_parametrization(report):
    rng = np.random.default_rng(8)
    base = block(0)
    worst = 0.0
    circuits = (("1", "3", "2"), ("1", "2", "4"), ("1", "4", "3"), ("2", "3", "4"))
    for _ in range(500):
        g = base.with_labels({tuple(e): AngleLabel.from_radians(t) for e, t in
                              zip(base.edges, rng.uniform(0.05, math.pi / 2 - 0.05, 6))})
        r = list(rng.uniform(-3, 3, 3))
        r.append(-sum(r))
        P = realize_tetrahedron(g, dict(zip(circuits, r)))
        worst = max(worst, max(abs(r_invariant(P, c) - x) for c, x in zip(circuits, r)))
    report(8, worst < 1e-10, f"max coordinate error {worst:.1e} over 500 tetrahedra")


def test_09_cut_trichotomy(report):
    g = tetra_labels(block(0), {"12": rad(0.4), "23": rad(0.4), "13": rad(0.4),
                                "14": rad(0.3), "24": rad(0.3), "34": rad(0.3)})
    r = three_circuit(g, ("1", "2", "3")).r_gamma

    def cut(R):
        coords = {("1", "3", "2"): R, ("1", "2", "4"): -R / 2, ("1", "4", "3"): -R / 2, ("2", "3", "4"): 0.0}
        return truncation_plane(realize_tetrahedron(g, coords), ("1", "2", "3")).report

    sweep = np.linspace(-r - 2, r + 2, 81)
    predicted = [CUTS if abs(R) > r else MISSES for R in sweep]
    order_ok = [cut(R) for R in sweep] == predicted and cut(r) == MEETS and cut(-r) == MEETS

    def transition(inside, outside, reached):
        for _ in range(80):
            mid = (inside + outside) / 2
            if cut(mid) in reached:
                outside = mid
            else:
                inside = mid
        return (inside + outside) / 2

    def boundary(sign):
        # the boundary is the centre of the tolerance band reported as MEETS
        first = transition(0.0, sign * (r + 2), (MEETS, CUTS))
        last = transition(0.0, sign * (r + 2), (CUTS,))
        return (first + last) / 2

    err = max(abs(boundary(1) - r), abs(boundary(-1) + r))
    report(9, order_ok and err < 1e-8, f"reports follow |R| vs r = {r:.6f}: {order_ok}, boundary error {err:.1e}")


def _round_trip(g, n, rng):
    schema = coordinate_schema(g)
    circuits = enumerate_three_circuits(g)
    worst, failures, outside = 0.0, 0, 0
    for _ in range(n):
        point = random_point(schema, rng)
        P = realize(g, point, schema)
        failures += not verify(P, g).passed
        back = coordinates(P, schema)
        diffs = [abs(back.c3[k] - point.c3[k]) for k in point.c3]
        diffs += [abs(back.c4[k] - point.c4[k]) for k in point.c4]
        diffs += [abs(back.gluing[k] - point.gluing[k]) for k in point.gluing]
        worst = max(worst, max(diffs))
        for c in circuits:
            if not c.prismatic:
                continue
            value = r_invariant(P, c.faces, right_angle_zero=True)
            outside += value not in interval(c)
    return worst, failures, outside


def test_10_end_to_end(report):
    ex = examples()
    rng = np.random.default_rng(10)
    start = time.perf_counter()
    results = {name: _round_trip(ex[name], 100, rng) for name in ("T4_pi3", "fig2_kappa32")}
    elapsed = time.perf_counter() - start
    ok = all(w < 1e-8 and f == 0 and o == 0 for w, f, o in results.values()) and elapsed < 60
    text = ", ".join(f"{k}: err {w:.1e}, verify failures {f}, out of interval {o}" for k, (w, f, o) in results.items())
    report(10, ok, f"{text}, {elapsed:.1f} s")


def test_11_gluing(report):
    g = examples()["fig2_kappa56"]
    schema = coordinate_schema(g)
    point = random_point(schema, np.random.default_rng(11))
    L, D = (_block_realization(g, b, schema, point) for b in schema.forest.blocks)
    entry = schema.gluing[0]
    cap = cap_name(g, frozenset(entry.circuit))
    ratios = [r_invariant(glue_with(L, D, entry.circuit, lam, cap), entry.triple)
              for lam in np.geomspace(0.1, 10, 41)]
    monotone = all(b > a for a, b in zip(ratios, ratios[1:]))
    at_one = r_invariant(glue_with(L, D, entry.circuit, 1.0, cap), entry.triple)
    fixed = abs(gluing_parameter(L, D, entry.circuit, at_one, entry.triple, cap) - 1.0)
    sides = abs(r_invariant(L, entry.circuit) - r_invariant(D, entry.circuit))
    P = glue(L, D, entry.circuit, -0.8, entry.triple, cap)
    target = abs(r_invariant(P, entry.triple) + 0.8)
    ok = monotone and fixed < 1e-9 and sides < 1e-9 and target < 1e-9
    report(11, ok, f"increasing: {monotone}, |lambda - 1| = {fixed:.1e}, "
                   f"R_Gamma sides differ by {sides:.1e}, target error {target:.1e}")


def test_12_parity(report):
    bad = []
    for name, g in examples().items():
        try:
            k = kappa(decompose(g))
        except NotEcimahedron:
            continue
        if k != 1 and k % 2:
            bad.append(name)
    rng = np.random.default_rng(12)
    for _ in range(200):
        k = kappa(random_forest(rng))
        if k != 1 and k % 2:
            bad.append(k)
    labels = [RIGHT, rad(1 / 3), rad(0.25), rad(0.4), rad(0.2)]
    for _ in range(100):
        base = block(int(rng.integers(5)))
        g = base.with_labels({tuple(e): labels[rng.integers(len(labels))] for e in base.edges})
        desc = classify_moduli(g)
        if desc.kappa is not None and desc.kappa != 1 and desc.kappa % 2:
            bad.append(desc.kappa)
    report(12, not bad, f"kappa is 1 or even on corpus, 200 forests, 100 labelings; exceptions {bad}")
