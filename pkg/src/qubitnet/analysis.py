"""Diagnostics on states and trajectories: distances, consensus, entropies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .attractors import (
    asymptotic_state,
    closed_form_attractor_space,
    phi_minus,
    phi_plus,
    zero_ket,
)
from .gates import PAULI_X, PAULI_Y, PAULI_Z, check_phi
from .ruo import RandomUnitaryOperation, apply
from .topology import FAMILY_OF_KIND, DirectedGraph, Topology, is_base, base_failure


def hs_distance(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return la.hs_norm(a - b)


# -- consensus ------------------------------------------------------------------

def permute_qubits(rho: np.ndarray, perm: Sequence[int], n: int) -> np.ndarray:
    """``Pi rho Pi^dagger`` where qubit ``q`` is moved to position ``perm[q-1]`` (1-based)."""
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    # new axis perm[q]-1 takes old axis q-1
    src = [0] * n
    for q, p in enumerate(perm):
        src[p - 1] = q
    t = np.asarray(rho).reshape([2] * (2 * n))
    t = t.transpose(src + [n + s for s in src])
    return t.reshape(1 << n, 1 << n)


def is_permutation_invariant(rho: np.ndarray, n: int, tol: float = 1e-8) -> bool:
    """Invariance under the generators ``(1 2)`` and ``(1 2 ... n)`` of S_n."""
    if n == 1:
        return True
    swap = [2, 1] + list(range(3, n + 1))
    cycle = list(range(2, n + 1)) + [1]
    return all(hs_distance(permute_qubits(rho, g, n), rho) <= tol for g in (swap, cycle))


def permutation_asymmetry(rho: np.ndarray, n: int) -> float:
    """Largest HS change of ``rho`` under the two generators of S_n."""
    if n == 1:
        return 0.0
    swap = [2, 1] + list(range(3, n + 1))
    cycle = list(range(2, n + 1)) + [1]
    return max(hs_distance(permute_qubits(rho, g, n), rho) for g in (swap, cycle))


def space_permutation_closed(space, tol: float = 1e-8) -> bool:
    """Every permuted basis element stays in the span of its component.

    This is weaker than invariance of each element: F2 spaces contain
    ``|1_i><0_N|``, which permutations map to other elements of the space.
    """
    n = space.n
    if n == 1:
        return True
    gens = ([2, 1] + list(range(3, n + 1)), list(range(2, n + 1)) + [1])
    for lam in space.lambdas():
        cols = space.columns(lam)
        for x in space.basis(lam):
            for g in gens:
                v = la.vec(permute_qubits(x, g, n))
                if np.linalg.norm(v - cols @ (cols.conj().T @ v)) > tol:
                    return False
    return True


def zero_overlap(rho: np.ndarray) -> float:
    """``<0_N| rho |0_N>``."""
    return float(np.real(np.asarray(rho)[0, 0]))


def consensus_observable(n: int) -> np.ndarray:
    """Local observable ``diag(1, -(2^n - 2)/2^n)``."""
    return np.diag([1.0, -(2.0**n - 2) / 2.0**n]).astype(complex)


def consensus_observable_check(rho0: np.ndarray, n: int, topo2: DirectedGraph, tol: float = 1e-8) -> bool:
    """``<0_N|rho0|0_N>`` equals ``Tr[rho_i sigma]`` for every qubit of the CNOT-network limit."""
    if not is_base(topo2):
        raise ValueError(base_failure(topo2))
    limit = asymptotic_state(closed_form_attractor_space("two_qubit", n, math.pi / 2, topo2), rho0, "even")
    lhs = zero_overlap(rho0)
    sigma = consensus_observable(n)
    return all(
        abs(lhs - np.trace(la.partial_trace(limit, [i], n) @ sigma).real) <= tol for i in range(1, n + 1)
    )


def conserved_overlap_check(ruo: RandomUnitaryOperation, rho0: np.ndarray, steps: int, tol: float = 1e-10) -> bool:
    """``<0_N|rho(k)|0_N>`` stays at its initial value along the trajectory."""
    rho = np.asarray(rho0, dtype=complex)
    start = zero_overlap(rho)
    for _ in range(steps):
        rho = apply(ruo, rho)
        if abs(zero_overlap(rho) - start) > tol:
            return False
    return True


def parity_populations(rho: np.ndarray, n: int) -> tuple[float, float]:
    """Total weight on even- and odd-popcount basis labels."""
    diag = np.real(np.diag(np.asarray(rho)))
    odd = np.array([la.popcount(z) % 2 for z in range(1 << n)], dtype=bool)
    return float(diag[~odd].sum()), float(diag[odd].sum())


# -- single-qubit asymptotics ------------------------------------------------------

@dataclass(frozen=True)
class OverlapParameters:
    p0: float
    p_plus: float
    p_minus: float

    def __post_init__(self):
        for name in ("p0", "p_plus", "p_minus"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @classmethod
    def from_state(cls, rho0: np.ndarray, n: int, phi: float) -> "OverlapParameters":
        rho0 = np.asarray(rho0)

        def ev(v):
            return float(np.real(np.vdot(v, rho0 @ v)))

        return cls(ev(zero_ket(n)), ev(phi_plus(n, phi)), ev(phi_minus(n, phi)))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def components(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def eigenvalues(self) -> tuple[float, float]:
        r = self.norm
        return (1 - r) / 2, (1 + r) / 2

    def density(self) -> np.ndarray:
        return 0.5 * (np.eye(2) + self.x * PAULI_X + self.y * PAULI_Y + self.z * PAULI_Z)

    @classmethod
    def of(cls, rho1: np.ndarray) -> "BlochVector":
        rho1 = np.asarray(rho1)
        return cls(*(float(np.trace(rho1 @ p).real) for p in (PAULI_X, PAULI_Y, PAULI_Z)))


def bloch_single_qubit_asymptote(params: OverlapParameters, phi: float) -> BlochVector:
    """Large-N single-qubit limit of one-control three-qubit networks."""
    phi = check_phi(phi)
    diff = params.p_plus - params.p_minus
    return BlochVector(diff * math.sin(phi), 0.0, params.p0 + diff * math.cos(phi))


def overlap_state(n: int, phi: float, p0: float, p_plus: float, p_minus: float) -> np.ndarray:
    """Mixture of ``|0_N>``, ``|phi_N^+>``, ``|phi_N^->`` with the given weights.

    Leftover weight goes to the maximally mixed state on the complement of
    their span. Overlaps only match the weights up to the O(cos^N) overlaps of
    the three kets.
    """
    total = p0 + p_plus + p_minus
    if min(p0, p_plus, p_minus) < 0 or total > 1 + 1e-12:
        raise ValueError("weights must be non-negative with sum <= 1")
    kets = [zero_ket(n), phi_plus(n, phi), phi_minus(n, phi)]
    rho = sum(w * la.dyad(k, k) for w, k in zip((p0, p_plus, p_minus), kets))
    rest = 1 - total
    if rest > 1e-15:
        q = np.eye(1 << n) - la.span_projector(kets)
        rho = rho + rest * q / np.trace(q).real
    return np.asarray(rho, dtype=complex)


# -- entropies ------------------------------------------------------------------------

def index_of_correlation(rho: np.ndarray, qubit_a: int, qubit_b: int, n: int, base: float | None = None) -> float:
    """``S(A) + S(B) - S(A,B)``; natural log unless ``base`` is given."""
    if qubit_a == qubit_b:
        raise ValueError("qubits must differ")
    s_a = la.von_neumann_entropy(la.partial_trace(rho, [qubit_a], n), base)
    s_b = la.von_neumann_entropy(la.partial_trace(rho, [qubit_b], n), base)
    s_ab = la.von_neumann_entropy(la.partial_trace(rho, [qubit_a, qubit_b], n), base)
    return s_a + s_b - s_ab


def family_asymptote(rho0: np.ndarray, topology: Topology, phi: float, step_parity="even") -> np.ndarray:
    """Closed-form limit state of a base topology."""
    space = closed_form_attractor_space(FAMILY_OF_KIND[topology.kind], topology.n, phi, topology)
    return asymptotic_state(space, rho0, step_parity)


def entropy_pair(rho0: np.ndarray, n: int, phi: float, topo2: DirectedGraph, topo3: Topology) -> tuple[float, float]:
    """Entropies (nats) of the two-qubit and three-qubit network limits from the same start."""
    for t in (topo2, topo3):
        if t.n != n:
            raise ValueError("topology size does not match n")
    s2 = la.von_neumann_entropy(family_asymptote(rho0, topo2, phi))
    s3 = la.von_neumann_entropy(family_asymptote(rho0, topo3, phi))
    return s2, s3


def entropy_inequality_check(
    rho0: np.ndarray, n: int, phi: float, topo2: DirectedGraph, topo3: Topology, family3: str | None = None
) -> bool:
    if family3 is not None and FAMILY_OF_KIND[topo3.kind] != family3:
        raise ValueError(f"topology kind {topo3.kind} is not family {family3}")
    s2, s3 = entropy_pair(rho0, n, phi, topo2, topo3)
    return s2 >= s3 - 1e-9


# -- trajectories ------------------------------------------------------------------------

def convergence_trace(
    ruo: RandomUnitaryOperation,
    rho0: np.ndarray,
    reference: np.ndarray | RandomUnitaryOperation,
    steps: int,
) -> list[tuple[int, float]]:
    """HS distance per step to a fixed state, or to ``rho0`` co-evolving under another operation."""
    rho = np.asarray(rho0, dtype=complex)
    co = isinstance(reference, RandomUnitaryOperation)
    ref = rho.copy() if co else np.asarray(reference, dtype=complex)
    rows = [(0, hs_distance(rho, ref))]
    for k in range(1, steps + 1):
        rho = apply(ruo, rho)
        if co:
            ref = apply(reference, ref)
        rows.append((k, hs_distance(rho, ref)))
    return rows


def correlation_sweep(
    n: int,
    phi: float,
    topology: Topology,
    mode: str = "p0_zero",
    ps: Iterable[float] | None = None,
    qubits: tuple[int, int] = (1, 2),
) -> list[dict]:
    """Index of correlation (bits) of the limit state while sweeping ``p``.

    ``mode="p0_zero"`` uses weights ``(0, p, p)`` for ``p <= 1/2``;
    ``mode="p0_one_minus_p"`` uses ``(1 - p, p, p)`` rescaled to unit sum.
    """
    if ps is None:
        ps = [round(0.01 * k, 2) for k in range(101)]
    space = closed_form_attractor_space(FAMILY_OF_KIND[topology.kind], n, phi, topology)
    rows = []
    for p in ps:
        if mode == "p0_zero":
            if p > 0.5 + 1e-12:
                continue
            w = (0.0, p, p)
        elif mode == "p0_one_minus_p":
            w = tuple(x / (1 + p) for x in (1 - p, p, p))
        else:
            raise ValueError(f"unknown sweep mode {mode!r}")
        rho0 = overlap_state(n, phi, *w)
        limit = asymptotic_state(space, rho0, "even")
        ov = OverlapParameters.from_state(rho0, n, phi)
        rows.append({
            "p": p,
            "p0": ov.p0,
            "p_plus": ov.p_plus,
            "p_minus": ov.p_minus,
            "index_of_correlation_bits": index_of_correlation(limit, *qubits, n, base=2),
        })
    return rows
