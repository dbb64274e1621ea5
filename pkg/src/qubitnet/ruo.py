"""Random unitary operations ``rho -> sum_i p_i U_i rho U_i^dagger``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gates import GateSpec, build_gate, check_phi
from .linalg import hs_norm, num_qubits
from .topology import DirectedGraph, F1Graph, F2Graph, Topology

PROB_TOL = 1e-9
UNITARY_TOL = 1e-10
SUPEROP_MAX_DIM = 64


@dataclass(frozen=True)
class RandomUnitaryOperation:
    n: int
    unitaries: tuple[np.ndarray, ...]
    probs: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.unitaries:
            raise ValueError("random unitary operation needs at least one branch")
        if not len(self.unitaries) == len(self.probs) == len(self.labels):
            raise ValueError("unitaries, probabilities and labels differ in length")
        if any(p <= 0 for p in self.probs):
            raise ValueError("branch probabilities must be positive")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise ValueError(f"branch probabilities sum to {sum(self.probs):.12g}, expected 1")
        d = 1 << self.n
        eye = np.eye(d)
        for u in self.unitaries:
            if u.shape != (d, d):
                raise ValueError(f"unitary of shape {u.shape} on {self.n} qubits")
            if np.max(np.abs(u @ u.conj().T - eye)) > UNITARY_TOL:
                raise ValueError("branch operator is not unitary")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def __len__(self) -> int:
        return len(self.unitaries)


def make_ruo(unitaries: Sequence[np.ndarray], probs: Sequence[float] | None = None,
             labels: Sequence[str] | None = None) -> RandomUnitaryOperation:
    """Convenience constructor; uniform probabilities and index labels by default."""
    unitaries = tuple(np.asarray(u, dtype=complex) for u in unitaries)
    if not unitaries:
        raise ValueError("random unitary operation needs at least one branch")
    m = len(unitaries)
    probs = tuple([1.0 / m] * m) if probs is None else tuple(float(p) for p in probs)
    labels = tuple(str(i) for i in range(m)) if labels is None else tuple(labels)
    return RandomUnitaryOperation(num_qubits(unitaries[0].shape[0]), unitaries, probs, labels)


def gate_specs(t: Topology, phi: float) -> list[GateSpec]:
    if isinstance(t, DirectedGraph):
        return [GateSpec("cu2", (a,), (b,), phi, t.n) for a, b in t.edges]
    if isinstance(t, F1Graph):
        return [GateSpec("cu31", (c,), ts, phi, t.n) for c, ts in t.hyperedges]
    if isinstance(t, F2Graph):
        return [GateSpec("cu32", cs, (k,), phi, t.n) for cs, k in t.hyperedges]
    raise TypeError(f"not a topology: {t!r}")


def from_topology(t: Topology, phi: float) -> RandomUnitaryOperation:
    """One branch per (hyper)edge, with the topology's probabilities."""
    check_phi(phi)
    if not t.hyperedges:
        raise ValueError("topology has no edges; probabilities cannot sum to 1")
    gates = tuple(build_gate(s) for s in gate_specs(t, phi))
    return RandomUnitaryOperation(t.n, gates, tuple(t.probs), tuple(t.labels()))


def apply(ruo: RandomUnitaryOperation, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (ruo.dim, ruo.dim):
        raise ValueError(f"state shape {rho.shape} does not match {ruo.n} qubits")
    out = np.zeros((ruo.dim, ruo.dim), dtype=complex)
    for u, p in zip(ruo.unitaries, ruo.probs):
        out += p * (u @ rho @ u.conj().T)
    return out


def iterate(ruo: RandomUnitaryOperation, rho0: np.ndarray, steps: int, every: int = 1) -> list[np.ndarray]:
    """Trajectory ``[rho(0), rho(every), ...]`` up to ``rho(steps)``.

    The final state is always included.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rho = np.asarray(rho0, dtype=complex)
    traj = [rho]
    for k in range(1, steps + 1):
        rho = apply(ruo, rho)
        if k % every == 0 or k == steps:
            traj.append(rho)
    return traj


def evolve(ruo: RandomUnitaryOperation, rho0: np.ndarray, steps: int,
           reference: np.ndarray | None = None) -> tuple[np.ndarray, list[float]]:
    """Final state after ``steps`` and the HS distance to ``reference`` at each step.

    Only O(d^2) memory is held; the distance list is empty without a reference.
    """
    rho = np.asarray(rho0, dtype=complex)
    dists = [] if reference is None else [hs_norm(rho - reference)]
    for _ in range(steps):
        rho = apply(ruo, rho)
        if reference is not None:
            dists.append(hs_norm(rho - reference))
    return rho, dists


def mix(parts: Sequence[tuple[RandomUnitaryOperation, float]]) -> RandomUnitaryOperation:
    """Convex combination of operations: branch lists concatenated, probabilities scaled."""
    if not parts:
        raise ValueError("nothing to mix")
    weights = [float(w) for _, w in parts]
    if any(w <= 0 for w in weights):
        raise ValueError("mixture weights must be positive")
    if abs(sum(weights) - 1.0) > PROB_TOL:
        raise ValueError(f"mixture weights sum to {sum(weights):.12g}, expected 1")
    n = parts[0][0].n
    if any(r.n != n for r, _ in parts):
        raise ValueError("cannot mix operations on different qubit counts")
    us, ps, ls = [], [], []
    for r, w in parts:
        us.extend(r.unitaries)
        ps.extend(w * p for p in r.probs)
        ls.extend(r.labels)
    return RandomUnitaryOperation(n, tuple(us), tuple(ps), tuple(ls))


def superoperator_matrix(ruo: RandomUnitaryOperation) -> np.ndarray:
    """Matrix of the channel on column-stacked operators: ``sum p conj(U) (x) U``."""
    d = ruo.dim
    if d > SUPEROP_MAX_DIM:
        raise ValueError(f"superoperator of a {d}-dimensional system exceeds the d <= {SUPEROP_MAX_DIM} guard")
    m = np.zeros((d * d, d * d), dtype=complex)
    for u, p in zip(ruo.unitaries, ruo.probs):
        m += p * np.kron(u.conj(), u)
    return m


def with_probs(ruo: RandomUnitaryOperation, probs: Sequence[float]) -> RandomUnitaryOperation:
    return RandomUnitaryOperation(ruo.n, ruo.unitaries, tuple(probs), ruo.labels)
