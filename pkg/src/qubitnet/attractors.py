"""Attractor spaces of random unitary operations.

The attractor space is the span of all ``X`` with ``U_i X U_i^dagger = lambda X``
for every branch and ``|lambda| = 1``. For the controlled-unitary families
here the gate spectra are ``{+1, -1}``, so only those two eigenvalues are
searched by default.

Two routes are provided: a numeric solver on the stacked linear system, and
closed-form bases for base topologies (common eigenvectors, their dyads, the
identity and the listed special-case operators).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .gates import check_phi, is_pi_half
from .ruo import RandomUnitaryOperation, from_topology, mix, superoperator_matrix
from .topology import (
    FAMILY_OF_KIND,
    Topology,
    base_failure,
    maximal_topology,
)

FAMILIES = ("two_qubit", "f1", "f2")
DEFAULT_LAMBDAS = (1.0, -1.0)
RESIDUAL_TOL = 1e-8
SUBSPACE_TOL = 1e-7


class NotBaseGraphError(ValueError):
    """Closed-form attractors were requested for a topology that is not a base graph."""


def _key(lam: complex) -> complex:
    lam = complex(lam)
    return complex(round(lam.real, 12) + 0.0, round(lam.imag, 12) + 0.0)


def format_lambda(lam: complex) -> str:
    lam = _key(lam)
    if lam.imag == 0:
        return f"{lam.real:g}"
    return f"{lam.real:g}{lam.imag:+g}j"


@dataclass
class AttractorSpace:
    """Per-eigenvalue Hilbert-Schmidt orthonormal operator bases."""

    n: int
    components: dict[complex, list[np.ndarray]]
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.components = {_key(k): list(v) for k, v in self.components.items()}

    def basis(self, lam: complex) -> list[np.ndarray]:
        return self.components.get(_key(lam), [])

    def dim(self, lam: complex) -> int:
        return len(self.basis(lam))

    def dims(self) -> dict[complex, int]:
        return {k: len(v) for k, v in self.components.items()}

    @property
    def total_dim(self) -> int:
        return sum(len(v) for v in self.components.values())

    def lambdas(self) -> list[complex]:
        return list(self.components)

    def columns(self, lam: complex) -> np.ndarray:
        """Vectorized basis of one component as the columns of a matrix."""
        d = 1 << self.n
        b = self.basis(lam)
        if not b:
            return np.zeros((d * d, 0), dtype=complex)
        return np.column_stack([la.vec(x) for x in b])

    def report(self, ruo: RandomUnitaryOperation | None = None, include_basis: bool = False) -> dict:
        out = {"n": self.n, "components": []}
        for lam, b in self.components.items():
            comp = {"lambda": format_lambda(lam), "dimension": len(b)}
            if ruo is not None:
                comp["max_residual"] = max((attractor_residual(ruo, x, lam) for x in b), default=0.0)
            if include_basis:
                comp["basis"] = [{"real": x.real.tolist(), "imag": x.imag.tolist()} for x in b]
            out["components"].append(comp)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class CommonEigenbasis:
    """Common eigenvectors ``U_i |v> = alpha |v>`` for all branches.

    ``vectors`` is orthonormal. ``raw``, when set, is the unorthogonalized
    family the basis was built from; it spans the same space.
    """

    n: int
    vectors: list[tuple[np.ndarray, complex]]
    raw: list[tuple[np.ndarray, complex]] | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def projector(self) -> np.ndarray:
        d = 1 << self.n
        p = np.zeros((d, d), dtype=complex)
        for v, _ in self.vectors:
            p += np.outer(v, v.conj())
        return p


# -- numeric route ------------------------------------------------------------

def attractor_residual(ruo: RandomUnitaryOperation, x: np.ndarray, lam: complex) -> float:
    """``max_i ||U_i X U_i^dagger - lambda X||_HS``."""
    return max(la.hs_norm(u @ x @ u.conj().T - lam * x) for u in ruo.unitaries)


def _maybe_real(m: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(m) and not np.any(m.imag):
        return m.real.copy()
    return m


def solve_attractors(
    ruo: RandomUnitaryOperation, lambdas: Iterable[complex] = DEFAULT_LAMBDAS, tol: float = la.RANK_RTOL
) -> AttractorSpace:
    """Joint null spaces of ``X -> U_i X U_i^dagger - lambda X`` over all branches."""
    d = ruo.dim
    eye = np.eye(d * d)
    comps = {}
    for lam in lambdas:
        lam = complex(lam)
        if abs(abs(lam) - 1) > 1e-12:
            raise ValueError(f"candidate eigenvalue {lam} is not on the unit circle")
        if lam.imag == 0:
            lam_c = lam.real
        else:
            lam_c = lam
        blocks = (_maybe_real(np.kron(u.conj(), u)) - lam_c * eye for u in ruo.unitaries)
        ns = la.null_space_stacked(blocks, tol)
        comps[lam] = [la.unvec(ns[:, k], d).astype(complex) for k in range(ns.shape[1])]
    return AttractorSpace(ruo.n, comps)


def peripheral_spectrum(ruo: RandomUnitaryOperation, tol: float = 1e-7) -> dict[complex, int]:
    """Unit-circle eigenvalues of the dense superoperator with their multiplicities.

    Validation route for small systems: it does not assume the spectrum lies
    in {+1, -1}.
    """
    m = superoperator_matrix(ruo)
    ev = np.linalg.eigvals(m)
    found: dict[complex, int] = {}
    for lam in ev[np.abs(np.abs(ev) - 1) < tol]:
        lam = complex(lam) / abs(lam)
        if any(abs(lam - k) < 1e-6 for k in found):
            continue
        found[_key(np.round(lam.real, 9) + 1j * np.round(lam.imag, 9))] = 0
    for lam in found:
        # peripheral eigenvalues of a channel are semisimple, so algebraic and
        # geometric multiplicities agree
        found[lam] = la.null_space(m - lam * np.eye(m.shape[0]), la.RANK_RTOL).shape[1]
    return found


def common_eigenvectors(
    ruo: RandomUnitaryOperation, tol: float = la.RANK_RTOL, alphas: Sequence[complex] = (1.0, -1.0)
) -> CommonEigenbasis:
    d = ruo.dim
    eye = np.eye(d)
    vectors = []
    for alpha in alphas:
        ns = la.null_space_stacked((_maybe_real(u) - alpha * eye for u in ruo.unitaries), tol)
        vectors.extend((ns[:, k].astype(complex), complex(alpha)) for k in range(ns.shape[1]))
    return CommonEigenbasis(ruo.n, vectors)


def p_attractors(basis: CommonEigenbasis, lam: complex, rtol: float = la.RANK_RTOL) -> list[np.ndarray]:
    """Orthonormal basis of span{|a><b| : alpha_a conj(alpha_b) = lambda}."""
    family = basis.raw if basis.raw is not None else basis.vectors
    dyads = [
        la.dyad(a, b)
        for a, alpha in family
        for b, beta in family
        if abs(alpha * np.conj(beta) - lam) < 1e-9
    ]
    return la.orthonormalize(dyads, rtol)


# -- closed-form route --------------------------------------------------------

def zero_ket(n: int) -> np.ndarray:
    return la.basis_state("0" * n)


def phi_plus(n: int, phi: float) -> np.ndarray:
    q = np.array([math.cos(phi / 2), math.sin(phi / 2)], dtype=complex)
    return la.kron(*[q] * n)


def phi_minus(n: int, phi: float) -> np.ndarray:
    q = np.array([math.sin(phi / 2), -math.cos(phi / 2)], dtype=complex)
    return la.kron(*[q] * n)


def one_hot_ket(i: int, n: int) -> np.ndarray:
    """``|0...1_i...0>`` with the single excitation on 1-based qubit ``i``."""
    return la.basis_state("".join("1" if q == i else "0" for q in range(1, n + 1)))


def _min_n(family: str) -> int:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return 2 if family == "two_qubit" else 3


def closed_form_vectors(family: str, n: int, phi: float) -> CommonEigenbasis:
    """Predicted common eigenvectors of a base topology (all with alpha = 1)."""
    if n < _min_n(family):
        raise ValueError(f"family {family} needs n >= {_min_n(family)}")
    check_phi(phi)
    raw = [zero_ket(n), phi_plus(n, phi)]
    if family == "f1":
        raw.append(phi_minus(n, phi))
    elif family == "f2":
        raw.extend(one_hot_ket(i, n) for i in range(1, n + 1))
    ortho = la.orthonormalize_vectors(raw)
    return CommonEigenbasis(n, [(v, 1.0 + 0j) for v in ortho], raw=[(v, 1.0 + 0j) for v in raw])


def parity_identity(n: int, even: bool) -> np.ndarray:
    """``sum_z (1 +/- (-1)^popcount(z)) |z><z|``."""
    sign = 1 if even else -1
    diag = [1 + sign * (-1) ** la.popcount(z) for z in range(1 << n)]
    return np.diag(np.array(diag, dtype=complex))


def x_minus_one_two_qubit(phi: float, literal: bool = False) -> np.ndarray:
    """Period-two attractor of the mutual two-qubit network on N = 2 (normalized).

    ``literal=True`` returns the operator exactly as printed,
    ``c(|01><11| - |10><11|) + s|01><10| + h.c.``, which does not solve the
    attractor equations. The working form is
    ``c(|01><11| - |10><11|) + s|10><01| - h.c.``.
    """
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    k = la.basis_state
    a = c * (la.dyad(k("01"), k("11")) - la.dyad(k("10"), k("11")))
    if literal:
        x = a + s * la.dyad(k("01"), k("10"))
        x = x + x.conj().T
    else:
        x = a + s * la.dyad(k("10"), k("01"))
        x = x - x.conj().T
    return x / la.hs_norm(x)


def x_minus_one_f1(literal: bool = False) -> np.ndarray:
    """Period-two attractor of F1 networks at N = 3, phi = pi/2 (normalized).

    Built from ``|101><011| - |110><011| + |110><101|``; the printed ``+ h.c.``
    (``literal=True``) fails the attractor equations, the anti-Hermitian
    completion ``- h.c.`` solves them.
    """
    k = la.basis_state
    a = la.dyad(k("101"), k("011")) - la.dyad(k("110"), k("011")) + la.dyad(k("110"), k("101"))
    x = a / 6
    x = x + x.conj().T if literal else x - x.conj().T
    return x / la.hs_norm(x)


def _reference_ruo(family: str, n: int, phi: float, topology: Topology | None) -> RandomUnitaryOperation:
    if topology is None:
        from .topology import KIND_OF_FAMILY

        topology = maximal_topology(KIND_OF_FAMILY[family], n)
    return from_topology(topology, phi)


def check_base(family: str, topology: Topology) -> None:
    if FAMILY_OF_KIND[topology.kind] != family:
        raise ValueError(f"topology of kind {topology.kind} does not belong to family {family}")
    why = base_failure(topology)
    if why:
        raise NotBaseGraphError(why)


def closed_form_attractor_space(
    family: str, n: int, phi: float, topology: Topology | None = None
) -> AttractorSpace:
    """Predicted base attractor space of a family.

    ``topology`` (optional) must be a base graph of the family; it is also the
    network against which the period-two special cases are residual-checked.
    Without it the maximal topology is used.
    """
    if topology is not None:
        if topology.n != n:
            raise ValueError("topology size does not match n")
        check_base(family, topology)
    vecs = closed_form_vectors(family, n, phi)
    ops = p_attractors(vecs, 1.0)
    d = 1 << n
    if family == "f1" and is_pi_half(phi):
        ops += la.orthonormalize([parity_identity(n, True), parity_identity(n, False)])
    ops.append(np.eye(d, dtype=complex) / math.sqrt(d))
    comps = {1.0: la.orthonormalize(ops), -1.0: []}
    notes: list[str] = []

    special = None
    if family == "two_qubit" and n == 2:
        special = (x_minus_one_two_qubit(phi), x_minus_one_two_qubit(phi, literal=True))
    elif family == "f1" and n == 3 and is_pi_half(phi):
        special = (x_minus_one_f1(), x_minus_one_f1(literal=True))
    if special is not None:
        ruo = _reference_ruo(family, n, phi, topology)
        fixed, literal = special
        r_lit = attractor_residual(ruo, literal, -1)
        r_fix = attractor_residual(ruo, fixed, -1)
        if r_fix <= RESIDUAL_TOL:
            comps[-1.0] = [fixed]
            if r_lit > RESIDUAL_TOL:
                notes.append(
                    f"lambda=-1: printed '+h.c.' operator has residual {r_lit:.3g}; "
                    f"anti-Hermitian completion used (residual {r_fix:.3g})"
                )
        else:
            comps[-1.0] = solve_attractors(ruo, [-1.0]).basis(-1)
            notes.append(
                f"lambda=-1: closed-form operator has residual {r_fix:.3g}; numeric basis substituted"
            )
    return AttractorSpace(n, comps, notes)


def closed_form_mixture(topologies: Sequence[Topology], phi: float) -> AttractorSpace:
    """Closed-form space of a mixture: intersection of each family's base space."""
    if not topologies:
        raise ValueError("no topologies given")
    spaces = [
        closed_form_attractor_space(FAMILY_OF_KIND[t.kind], t.n, phi, t) for t in topologies
    ]
    out = spaces[0]
    for s in spaces[1:]:
        out = space_intersection(out, s)
    return out


# -- asymptotics ----------------------------------------------------------------

def _step_exponent(step_parity) -> int | None:
    if step_parity is None:
        return None
    if step_parity in ("even", "odd"):
        return 0 if step_parity == "even" else 1
    return int(step_parity)


def asymptotic_state(space: AttractorSpace, rho0: np.ndarray, step_parity=None) -> np.ndarray:
    """``sum_lambda lambda^n sum_i Tr[rho0 X_i^dagger] X_i``.

    ``step_parity`` is an integer step count or ``"even"`` / ``"odd"``; it is
    required when the space has a component other than lambda = 1.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    k = _step_exponent(step_parity)
    oscillating = any(lam != 1 and b for lam, b in space.components.items())
    if oscillating and k is None:
        raise ValueError("attractor space has a lambda != 1 component; pass step_parity")
    out = np.zeros_like(rho0)
    for lam, basis in space.components.items():
        if not basis:
            continue
        phase = 1.0 if lam == 1 else lam**k
        for x in basis:
            out += phase * la.hs_inner(x, rho0) * x
    return out


def asymptotic_cycle(space: AttractorSpace, rho0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Even- and odd-step limit states."""
    return asymptotic_state(space, rho0, "even"), asymptotic_state(space, rho0, "odd")


def stationary_state(common: CommonEigenbasis, rho0: np.ndarray) -> np.ndarray:
    """``P rho0 P + Tr[rho0 P~]/Tr[P~] P~`` with P onto the common eigenvectors."""
    if any(abs(a - 1) > 1e-12 for _, a in common.vectors):
        raise ValueError("stationary form needs all common eigenvalues equal to 1")
    rho0 = np.asarray(rho0, dtype=complex)
    p = common.projector()
    q = np.eye(p.shape[0]) - p
    out = p @ rho0 @ p
    tq = np.trace(q).real
    if tq > 0.5:
        out = out + np.trace(rho0 @ q) / tq * q
    return out


def chi_vectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform superpositions over even-weight (nonzero) and odd-weight labels."""
    d = 1 << n
    even = np.array([la.popcount(z) % 2 == 0 and z != 0 for z in range(d)], dtype=complex)
    odd = np.array([la.popcount(z) % 2 == 1 for z in range(d)], dtype=complex)
    return even / math.sqrt(2 ** (n - 1) - 1), odd / math.sqrt(2 ** (n - 1))


def parity_projector(n: int, even: bool) -> np.ndarray:
    return parity_identity(n, even) / 2


def pi_half_projectors(n: int) -> dict[str, np.ndarray]:
    """Projectors of the phi = pi/2 one-control three-qubit asymptotics."""
    e, o = chi_vectors(n)
    z = zero_ket(n)
    p_e = la.dyad(z, z) + la.dyad(e, e)
    p_o = la.dyad(o, o)
    return {
        "P": p_e + p_o,
        "P_E": p_e,
        "P_O": p_o,
        "Pt_E": parity_projector(n, True) - p_e,
        "Pt_O": parity_projector(n, False) - p_o,
    }


def pi_half_asymptote(n: int, rho0: np.ndarray) -> np.ndarray:
    """Limit state for base F1 networks at phi = pi/2 and n > 3."""
    if n <= 3:
        raise ValueError("the three-term phi = pi/2 form needs n > 3")
    rho0 = np.asarray(rho0, dtype=complex)
    pr = pi_half_projectors(n)
    out = pr["P"] @ rho0 @ pr["P"]
    for name in ("Pt_E", "Pt_O"):
        q = pr[name]
        out = out + np.trace(q @ rho0) / np.trace(q).real * q
    return out


# -- subspace comparisons -------------------------------------------------------

def _projection_residuals(a_cols: np.ndarray, b_cols: np.ndarray) -> np.ndarray:
    if a_cols.shape[1] == 0:
        return np.zeros(0)
    if b_cols.shape[1] == 0:
        return np.linalg.norm(a_cols, axis=0)
    resid = a_cols - b_cols @ (b_cols.conj().T @ a_cols)
    return np.linalg.norm(resid, axis=0)


def space_subset(a: AttractorSpace, b: AttractorSpace, tol: float = SUBSPACE_TOL) -> bool:
    """Each basis element of ``a`` lies in the same-lambda span of ``b``."""
    if a.n != b.n:
        raise ValueError("attractor spaces on different qubit counts")
    for lam in a.components:
        r = _projection_residuals(a.columns(lam), b.columns(lam))
        if r.size and r.max() > tol:
            return False
    return True


def spaces_equal(a: AttractorSpace, b: AttractorSpace, tol: float = SUBSPACE_TOL) -> bool:
    return space_subset(a, b, tol) and space_subset(b, a, tol)


def subspace_distance(a: AttractorSpace, b: AttractorSpace) -> float:
    """Largest sine of a principal angle over all components (1.0 on a dimension mismatch)."""
    worst = 0.0
    for lam in set(a.components) | set(b.components):
        ca, cb = a.columns(lam), b.columns(lam)
        if ca.shape[1] != cb.shape[1]:
            return 1.0
        for r in (_projection_residuals(ca, cb), _projection_residuals(cb, ca)):
            if r.size:
                worst = max(worst, float(r.max()))
    return worst


def space_intersection(a: AttractorSpace, b: AttractorSpace, tol: float = SUBSPACE_TOL) -> AttractorSpace:
    """Per-lambda intersection via principal vectors with sine of angle <= tol."""
    if a.n != b.n:
        raise ValueError("attractor spaces on different qubit counts")
    d = 1 << a.n
    comps = {}
    for lam in set(a.components) | set(b.components):
        ca, cb = a.columns(lam), b.columns(lam)
        if ca.shape[1] == 0 or cb.shape[1] == 0:
            comps[lam] = []
            continue
        u, _, _ = np.linalg.svd(ca.conj().T @ cb, full_matrices=True)
        cand = ca @ u
        keep = _projection_residuals(cand, cb) <= tol
        basis = [la.unvec(c, d) for c in cand[:, keep].T]
        comps[lam] = la.orthonormalize(basis)
    return AttractorSpace(a.n, comps)


def projector_range_included(p_small: np.ndarray, p_big: np.ndarray, tol: float = 1e-10) -> bool:
    """Range of ``p_small`` lies in the range of ``p_big``."""
    return la.hs_norm(p_big @ p_small - p_small) <= tol


def mixture_space(ruos: Sequence[RandomUnitaryOperation], weights: Sequence[float] | None = None,
                  tol: float = la.RANK_RTOL) -> AttractorSpace:
    """Numeric attractor space of a convex mixture of operations."""
    weights = [1.0 / len(ruos)] * len(ruos) if weights is None else list(weights)
    return solve_attractors(mix(list(zip(ruos, weights))), tol=tol)
