"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from qubitnet import linalg as la
from qubitnet.analysis import (
    BlochVector,
    OverlapParameters,
    bloch_single_qubit_asymptote,
    consensus_observable_check,
    conserved_overlap_check,
    correlation_sweep,
    entropy_pair,
    family_asymptote,
    hs_distance,
    parity_populations,
    permutation_asymmetry,
)
from qubitnet.attractors import (
    asymptotic_state,
    attractor_residual,
    closed_form_attractor_space,
    mixture_space,
    pi_half_asymptote,
    solve_attractors,
    space_intersection,
    space_subset,
    spaces_equal,
    subspace_distance,
    x_minus_one_f1,
    x_minus_one_two_qubit,
)
from qubitnet.ruo import evolve, from_topology, iterate, mix, with_probs
from qubitnet.topology import DirectedGraph, F2Graph, KINDS, maximal_topology, random_topology, star_f1, star_f2

from oracles import channel_by_units, unit_circle_multiplicities

PHIS = (math.pi / 3, math.pi / 2, 2.0)
FIG2 = F2Graph(4, (((1, 2), 3), ((1, 3), 2), ((1, 4), 2), ((2, 3), 4), ((2, 4), 1), ((3, 4), 1)))
TOL = 1e-7


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - start:.1f}s) {detail}")
        assert ok, detail

    return emit


def dims(space):
    return space.dim(1), space.dim(-1)


def max_residual(ruo, space):
    return max((attractor_residual(ruo, x, lam) for lam in space.lambdas() for x in space.basis(lam)), default=0.0)


def projection_residual(x, space, lam):
    q = space.columns(lam)
    v = la.vec(x) / np.linalg.norm(x)
    return float(np.linalg.norm(v - q @ (q.conj().T @ v)))


def test_criterion_1_two_qubit_dimensions(report):
    rng = np.random.default_rng(1)
    bad = []
    count = 0
    for n in (3, 4):
        graphs = [maximal_topology("cu2", n)] + [random_topology("cu2", n, rng, base=True) for _ in range(5)]
        for g in graphs:
            for phi in PHIS:
                r = from_topology(g, phi)
                s = solve_attractors(r, tol=1e-10)
                count += 1
                if dims(s) != (5, 0) or max_residual(r, s) > 1e-8:
                    bad.append((n, g.edges, phi, dims(s)))
    mutual = DirectedGraph(2, ((1, 2), (2, 1)))
    for phi in PHIS:
        r = from_topology(mutual, phi)
        s = solve_attractors(r, tol=1e-10)
        count += 1
        x = x_minus_one_two_qubit(phi)
        if dims(s) != (5, 1) or max_residual(r, s) > 1e-8 or projection_residual(x, s, -1) > 1e-8:
            bad.append((2, mutual.edges, phi, dims(s)))
    report(1, not bad, f"{count} graph/angle cases, failures={bad}")


def test_criterion_2_f1_theorem(report):
    bad = []
    count = 0
    for n in (3, 4):
        for g in (star_f1(n), maximal_topology("cu31", n)):
            for phi in PHIS:
                r = from_topology(g, phi)
                numeric = solve_attractors(r, tol=1e-10)
                closed = closed_form_attractor_space("f1", n, phi, g)
                if abs(phi - math.pi / 2) > 1e-12:
                    want = (10, 0)
                else:
                    want = (11, 1) if n == 3 else (11, 0)
                ok = dims(numeric) == want and spaces_equal(numeric, closed, TOL)
                if want[1]:
                    ok &= projection_residual(x_minus_one_f1(), numeric, -1) <= 1e-8
                count += 1
                if not ok:
                    bad.append((n, len(g.hyperedges), phi, dims(numeric), dims(closed)))
    report(2, not bad, f"{count} cases, failures={bad}")


def test_criterion_3_f2_theorem(report):
    bad = []
    seen = {}
    for n in (3, 4):
        graphs = [star_f2(n), maximal_topology("cu32", n)] + ([FIG2] if n == 4 else [])
        for g in graphs:
            for phi in (math.pi / 3, math.pi / 2):
                numeric = solve_attractors(from_topology(g, phi), tol=1e-10)
                closed = closed_form_attractor_space("f2", n, phi, g)
                want = {3: 26, 4: 37}[n]
                seen.setdefault(n, set()).add(numeric.dim(1))
                if dims(numeric) != (want, 0) or dims(closed) != (want, 0) or not spaces_equal(numeric, closed, TOL):
                    bad.append((n, len(g.hyperedges), phi, dims(numeric), dims(closed)))
    report(3, not bad, f"dim(lambda=1) by n: {seen}, failures={bad}")


def _supergraph(g, rng):
    pool = [e for e in maximal_topology(g.kind, g.n).hyperedges if e not in g.hyperedges]
    if not pool:
        return g
    k = int(rng.integers(1, len(pool) + 1))
    extra = [pool[i] for i in rng.choice(len(pool), size=k, replace=False)]
    return KINDS[g.kind](g.n, tuple(sorted(set(g.hyperedges) | set(extra))))


def test_criterion_4_monotonicity_and_mixtures(report):
    rng = np.random.default_rng(4)
    bad = []
    for k in range(20):
        kind = ("cu2", "cu31", "cu32")[k % 3]
        n = 3 + k % 2
        phi = float(rng.uniform(0.1, math.pi - 0.1))
        g = random_topology(kind, n, rng)
        h = _supergraph(g, rng)
        ag, ah = (solve_attractors(from_topology(t, phi)) for t in (g, h))
        if not space_subset(ah, ag, TOL):
            bad.append(("monotone", kind, n, g.hyperedges, h.hyperedges))
    triples = 0
    for n in (3, 4):
        for phi in (math.pi / 3, 2.0):
            gs = [(DirectedGraph(n, tuple((i, i % n + 1) for i in range(1, n + 1))), star_f1(n), star_f2(n))]
            gs += [tuple(random_topology(kd, n, rng, base=True) for kd in ("cu2", "cu31", "cu32")) for _ in range(2)]
            for g2, g31, g32 in gs:
                r2, r31, r32 = (from_topology(t, phi) for t in (g2, g31, g32))
                a2, a31, a32 = (solve_attractors(r) for r in (r2, r31, r32))
                asim = mixture_space([r2, r31, r32], [0.4, 0.3, 0.3])
                inter = space_intersection(a31, a32, TOL)
                triples += 1
                if not (spaces_equal(asim, a2, TOL) and spaces_equal(a2, inter, TOL)):
                    bad.append(("mixture", n, phi, dims(asim), dims(a2), dims(inter)))
    report(4, not bad, f"20 subgraph pairs, {triples} base triples, failures={bad}")


def test_criterion_5_convergence(report):
    n, phi, steps = 4, math.pi / 3, 500
    g2, g31, g32 = maximal_topology("cu2", n), star_f1(n), star_f2(n)
    r2, r31, r32 = (from_topology(t, phi) for t in (g2, g31, g32))
    rsim = mix([(r2, 0.4), (r31, 0.3), (r32, 0.3)])
    r3 = mix([(r31, 0.5), (r32, 0.5)])
    space2 = solve_attractors(r2)
    worst_sim = worst_three = 0.0
    for seed in range(50):
        rho0 = la.random_density(n, seed)
        a = iterate(rsim, rho0, steps, every=steps)[-1]
        b = iterate(r2, rho0, steps, every=steps)[-1]
        worst_sim = max(worst_sim, hs_distance(a, b))
        _, dists = evolve(r3, rho0, steps, reference=asymptotic_state(space2, rho0))
        worst_three = max(worst_three, dists[-1])
    ok = worst_sim < 1e-6 and worst_three < 1e-6
    report(5, ok, f"max ||sim-two_qubit||={worst_sim:.2e}, max ||three_qubit-limit||={worst_three:.2e} at step {steps}")


def test_criterion_6_probability_independence(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in (3, 4):
        for g in (maximal_topology("cu2", n), star_f1(n), star_f2(n), random_topology("cu32", n, rng, base=True)):
            base = from_topology(g, 1.1)
            ref = solve_attractors(base)
            for _ in range(3):
                w = rng.uniform(0.05, 1.0, size=len(base))
                worst = max(worst, subspace_distance(ref, solve_attractors(with_probs(base, tuple(w / w.sum())))))
    report(6, worst < TOL, f"max principal-angle residual {worst:.2e}")


def test_criterion_7_consensus(report):
    asym = {}
    conserved = True
    for n in (3, 4):
        for kind, topo in (("cu2", DirectedGraph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))),
                           ("cu31", star_f1(n)), ("cu32", star_f2(n))):
            for phi in (math.pi / 3, math.pi / 2):
                r = from_topology(topo, phi)
                space = solve_attractors(r)
                worst = 0.0
                for seed in range(20):
                    rho0 = la.random_density(n, seed)
                    if space.dim(-1):
                        # period-two limit cycle: compare the time average
                        limit = (asymptotic_state(space, rho0, "even") + asymptotic_state(space, rho0, "odd")) / 2
                    else:
                        limit = asymptotic_state(space, rho0)
                    worst = max(worst, permutation_asymmetry(limit, n))
                    conserved &= conserved_overlap_check(r, rho0, 50)
                asym[(kind, n, round(phi, 4))] = worst
    g2 = DirectedGraph(4, ((1, 2), (2, 3), (3, 4), (4, 1)))
    observable = all(consensus_observable_check(la.random_density(4, s), 4, g2) for s in range(100))
    broken = {k: f"{v:.2e}" for k, v in asym.items() if v > 1e-8}
    ok = not broken and conserved and observable
    report(7, ok, f"overlap conserved={conserved}, observable={observable}, "
                  f"non-invariant limits (max asymmetry)={broken}")


def test_criterion_8_closed_form_properties(report):
    notes = []
    ok = True
    n = 4
    g2 = DirectedGraph(n, ((1, 2), (2, 3), (3, 4), (4, 1)))
    margin = math.inf
    for phi in (math.pi / 3, math.pi / 2):
        for g3 in (star_f1(n), star_f2(n)):
            for seed in range(100):
                s2, s3 = entropy_pair(la.random_density(n, seed), n, phi, g2, g3)
                margin = min(margin, s2 - s3)
    ok &= margin >= -1e-9
    notes.append(f"entropy min margin={margin:.2e}")

    drift = 0.0
    r = from_topology(star_f1(n), math.pi / 2)
    for seed in range(10):
        rho0 = la.random_density(n, seed)
        start = np.array(parity_populations(rho0, n))
        for rho in iterate(r, rho0, 50):
            drift = max(drift, float(np.max(np.abs(np.array(parity_populations(rho, n)) - start))))
    ok &= drift <= 1e-10
    notes.append(f"parity drift={drift:.1e}")

    gap = 0.0
    space = closed_form_attractor_space("f1", n, math.pi / 2, star_f1(n))
    for seed in range(10):
        rho0 = la.random_density(n, seed)
        gap = max(gap, hs_distance(pi_half_asymptote(n, rho0), asymptotic_state(space, rho0)))
    ok &= gap <= 1e-10
    notes.append(f"pi/2 state gap={gap:.1e}")

    phi = 2.0
    errs = []
    for m in (4, 6, 8):
        e = 0.0
        for seed in range(3):
            rho0 = la.random_density(m, seed)
            exact = la.partial_trace(family_asymptote(rho0, star_f1(m), phi), [1], m)
            pred = bloch_single_qubit_asymptote(OverlapParameters.from_state(rho0, m, phi), phi)
            e = max(e, float(np.linalg.norm(BlochVector.of(exact).components - pred.components)))
        errs.append(e)
    ok &= errs[0] > errs[1] > errs[2] and errs[2] <= 2e-2
    notes.append("bloch errors n=4,6,8: " + ", ".join(f"{e:.4f}" for e in errs))

    ic = correlation_sweep(10, math.pi / 3, star_f1(10), "p0_zero", [0.5])[0]["index_of_correlation_bits"]
    ok &= abs(ic - 1) <= 0.05
    notes.append(f"index of correlation={ic:.4f} bits")
    report(8, ok, "; ".join(notes))


def test_criterion_9_oracle_equivalence(report):
    bad = []
    found = {}
    for kind in ("cu2", "cu31", "cu32"):
        r = from_topology(maximal_topology(kind, 3), math.pi / 3)
        s = solve_attractors(r)
        oracle = unit_circle_multiplicities(channel_by_units(r.unitaries, r.probs))
        got = {lam: s.dim(lam) for lam in s.lambdas() if s.dim(lam)}
        want = {lam: m for lam, m in oracle.items() if m}
        found[kind] = got
        if {complex(k): v for k, v in got.items()} != want:
            bad.append((kind, got, want))
    report(9, not bad, f"dims={found}, failures={bad}")
