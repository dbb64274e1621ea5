"""One-parameter controlled-unitary gates on an N-qubit register.

The target operation is ``U(phi) = cos(phi) Z + sin(phi) X``. Three gate
families are built as dense ``2^n x 2^n`` matrices:

* ``cu2``  - one control, one target (``phi = pi/2`` gives CNOT)
* ``cu31`` - one control, two targets, both receiving ``U(phi)``
* ``cu32`` - two controls, one target (``phi = pi/2`` gives Toffoli)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import kron

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PROJ0 = np.diag([1, 0]).astype(complex)
PROJ1 = np.diag([0, 1]).astype(complex)

ARITY = {"cu2": (1, 1), "cu31": (1, 2), "cu32": (2, 1)}
PI_HALF_TOL = 1e-12


def check_phi(phi: float) -> float:
    phi = float(phi)
    if not 0.0 < phi < math.pi:
        raise ValueError(f"phi={phi!r} must lie strictly inside (0, pi)")
    return phi


def is_pi_half(phi: float) -> bool:
    return abs(phi - math.pi / 2) < PI_HALF_TOL


def u_phi(phi: float) -> np.ndarray:
    phi = check_phi(phi)
    return math.cos(phi) * PAULI_Z + math.sin(phi) * PAULI_X


@dataclass(frozen=True)
class GateSpec:
    kind: str
    controls: tuple[int, ...]
    targets: tuple[int, ...]
    phi: float
    n: int

    def __post_init__(self):
        if self.kind not in ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        controls = tuple(int(c) for c in self.controls)
        targets = tuple(int(t) for t in self.targets)
        nc, nt = ARITY[self.kind]
        if len(controls) != nc or len(targets) != nt:
            raise ValueError(f"{self.kind} needs {nc} control(s) and {nt} target(s)")
        qubits = controls + targets
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind}: qubit indices must be distinct, got {qubits}")
        if any(not 1 <= q <= self.n for q in qubits):
            raise ValueError(f"{self.kind}: qubit indices must lie in 1..{self.n}")
        check_phi(self.phi)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "targets", targets)


def embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Tensor product placing ``ops[q]`` on qubit q and identity elsewhere."""
    return kron(*[ops.get(q, I2) for q in range(1, n + 1)])


def build_gate(spec: GateSpec) -> np.ndarray:
    """Dense unitary ``(I - P) + P (x) U(phi)^{(x) targets}``, P = all controls in |1>."""
    u = u_phi(spec.phi)
    on = {c: PROJ1 for c in spec.controls}
    p_on = embed(on, spec.n)
    active = embed({**on, **{t: u for t in spec.targets}}, spec.n)
    return np.eye(1 << spec.n, dtype=complex) - p_on + active


def gate_eigenvalues_check(spec: GateSpec, tol: float = 1e-9) -> bool:
    w = np.linalg.eigvals(build_gate(spec))
    return bool(np.all(np.minimum(np.abs(w - 1), np.abs(w + 1)) <= tol))


def controls_active(z: int, controls: tuple[int, ...], n: int) -> bool:
    """Whether every control bit of basis label ``z`` is 1."""
    return all((z >> (n - c)) & 1 for c in controls)
