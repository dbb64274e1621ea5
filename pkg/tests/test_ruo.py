import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitnet import linalg as la
from qubitnet.attractors import asymptotic_state, solve_attractors, spaces_equal, subspace_distance
from qubitnet.ruo import (
    apply,
    evolve,
    from_topology,
    iterate,
    make_ruo,
    mix,
    superoperator_matrix,
    with_probs,
)
from qubitnet.topology import DirectedGraph, F1Graph, maximal_topology, random_topology, star_f1, star_f2

from oracles import channel_by_units

CNOT12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
CNOT21 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])


def test_from_topology_two_cnots():
    r = from_topology(DirectedGraph(2, ((1, 2), (2, 1))), math.pi / 2)
    assert len(r) == 2 and r.probs == (0.5, 0.5)
    assert np.allclose(r.unitaries[0], CNOT12)
    assert np.allclose(r.unitaries[1], CNOT21)


def test_from_topology_fig1_labels():
    g = F1Graph(4, ((1, (2, 3)), (3, (1, 4)), (2, (1, 3))))
    r = from_topology(g, 1.1)
    assert r.labels == ("(1,23)", "(3,14)", "(2,13)")


def test_from_topology_rejects_empty_and_bad_phi():
    with pytest.raises(ValueError):
        from_topology(DirectedGraph(3, ()), 1.0)
    with pytest.raises(ValueError):
        from_topology(star_f1(3), math.pi)


def test_construction_validation():
    with pytest.raises(ValueError):
        make_ruo([np.eye(2)], [0.5])
    with pytest.raises(ValueError):
        make_ruo([np.eye(2), np.eye(2)], [1.0, 0.0])
    with pytest.raises(ValueError):
        make_ruo([np.array([[1, 1], [0, 1]])])


def test_apply_examples():
    r = from_topology(star_f2(3), 0.8)
    assert np.allclose(apply(r, np.eye(8) / 8), np.eye(8) / 8, atol=1e-12)
    u = from_topology(DirectedGraph(2, ((1, 2),)), 0.4).unitaries[0]
    rho = la.random_density(2, 1)
    assert np.allclose(apply(make_ruo([u]), rho), u @ rho @ u.conj().T)
    with pytest.raises(ValueError):
        apply(r, np.eye(4) / 4)


@st.composite
def ruos(draw, max_n=5):
    kind = draw(st.sampled_from(["cu2", "cu31", "cu32"]))
    n = draw(st.integers(3, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    phi = draw(st.floats(0.05, math.pi - 0.05))
    return from_topology(random_topology(kind, n, np.random.default_rng(seed)), phi), seed


@given(ruos(max_n=4))
@settings(max_examples=30, deadline=None)
def test_channel_properties(case):
    r, seed = case
    rho = la.random_density(r.n, seed)
    out = apply(r, rho)
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(out).min() >= -1e-9
    assert np.max(np.abs(apply(r, np.eye(r.dim) / r.dim) - np.eye(r.dim) / r.dim)) < 1e-12


@given(ruos(max_n=5))
@settings(max_examples=50, deadline=None)
def test_zero_overlap_conserved(case):
    r, seed = case
    rho = la.random_density(r.n, seed)
    assert abs(apply(r, rho)[0, 0] - rho[0, 0]) < 1e-12


def test_iterate_and_evolve():
    r = from_topology(maximal_topology("cu2", 3), 1.0)
    rho0 = la.random_density(3, 2)
    assert len(iterate(r, rho0, 0)) == 1
    traj = iterate(r, rho0, 10)
    assert len(traj) == 11
    assert all(abs(np.trace(x) - 1) < 1e-9 for x in traj)
    assert len(iterate(r, rho0, 10, every=4)) == 4  # 0, 4, 8, 10
    final, dists = evolve(r, rho0, 10, reference=traj[-1])
    assert np.allclose(final, traj[-1]) and len(dists) == 11 and dists[-1] < 1e-15
    with pytest.raises(ValueError):
        iterate(r, rho0, -1)


def test_two_qubit_base_trajectory_converges_by_200():
    r = from_topology(maximal_topology("cu2", 4), math.pi / 3)
    rho0 = la.random_density(4, 0)
    limit = asymptotic_state(solve_attractors(r), rho0)
    _, dists = evolve(r, rho0, 200, reference=limit)
    assert dists[200] < 1e-6
    # the decay is monotone on a coarse grid
    coarse = dists[::25]
    assert all(b <= a + 1e-15 for a, b in zip(coarse, coarse[1:]))


def test_mix_rules():
    a = from_topology(maximal_topology("cu2", 3), 1.0)
    b = from_topology(star_f1(3), 1.0)
    same = mix([(a, 1.0)])
    assert same.probs == a.probs and len(same) == len(a)
    m = mix([(a, 0.5), (b, 0.5)])
    assert abs(sum(m.probs) - 1) < 1e-12 and len(m) == len(a) + len(b)
    with pytest.raises(ValueError):
        mix([(a, 0.5), (b, 0.4)])
    with pytest.raises(ValueError):
        mix([(a, 1.0), (b, 0.0)])
    with pytest.raises(ValueError):
        mix([(a, 0.5), (from_topology(star_f1(4), 1.0), 0.5)])


def test_superoperator_examples():
    ident = make_ruo([np.eye(4)])
    assert np.array_equal(superoperator_matrix(ident), np.eye(16))
    r = from_topology(star_f1(3), 0.9)
    m = superoperator_matrix(r)
    assert np.allclose(m @ la.vec(np.eye(8)), la.vec(np.eye(8)))
    with pytest.raises(ValueError):
        superoperator_matrix(make_ruo([np.eye(128)]))


@pytest.mark.parametrize("kind,n", [("cu2", 2), ("cu2", 3), ("cu31", 3), ("cu32", 3)])
def test_superoperator_matches_matrix_unit_oracle(kind, n):
    r = from_topology(maximal_topology(kind, n), 0.7)
    assert np.allclose(superoperator_matrix(r), channel_by_units(r.unitaries, r.probs), atol=1e-13)
    rho = la.random_density(n, 3)
    assert np.allclose(superoperator_matrix(r) @ la.vec(rho), la.vec(apply(r, rho)), atol=1e-13)


@pytest.mark.parametrize("kind,n", [("cu2", 2), ("cu2", 3), ("cu31", 3), ("cu32", 3),
                                    ("cu2", 4), ("cu31", 4), ("cu32", 4)])
def test_unit_circle_spectrum_is_plus_minus_one(kind, n):
    rng = np.random.default_rng(n)
    phi = float(rng.uniform(0.1, math.pi - 0.1))
    for p in (phi, math.pi / 2):
        ev = np.linalg.eigvals(superoperator_matrix(from_topology(maximal_topology(kind, n), p)))
        peripheral = ev[np.abs(np.abs(ev) - 1) < 1e-9]
        assert peripheral.size > 0
        assert np.all(np.minimum(np.abs(peripheral - 1), np.abs(peripheral + 1)) < 1e-9)


@pytest.mark.parametrize("kind,topo", [
    ("cu2", DirectedGraph(4, ((1, 2), (2, 3), (3, 4), (4, 1)))),
    ("cu31", star_f1(4)),
    ("cu32", star_f2(4)),
])
def test_probability_independence(kind, topo):
    rng = np.random.default_rng(8)
    base = from_topology(topo, math.pi / 3)
    ref = solve_attractors(base)
    for _ in range(3):
        w = rng.uniform(0.05, 1.0, size=len(base))
        other = solve_attractors(with_probs(base, tuple(w / w.sum())))
        assert subspace_distance(ref, other) < 1e-7
        assert spaces_equal(ref, other)
