"""Dense complex linear algebra for small qubit registers.

Matrices are plain ``numpy`` arrays. Qubit 1 is the most significant bit of
a computational-basis index, so ``|z_1 z_2 ... z_N>`` sits at the integer
whose binary expansion reads ``z_1 z_2 ... z_N``.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

RANK_RTOL = 1e-10
ENTROPY_CUTOFF = 1e-12


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of the arguments, folded from the left."""
    if not mats:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, mats)


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 0 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def basis_state(bits: str) -> np.ndarray:
    """Computational basis ket for a bit string such as ``"101"``."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"invalid bit string {bits!r}")
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def dyad(ket: np.ndarray, bra: np.ndarray) -> np.ndarray:
    """``|ket><bra|``."""
    return np.outer(ket, np.conj(bra))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``Tr[a^dagger b]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def null_space(m: np.ndarray, tol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``m``.

    A right singular vector belongs to the null space when its singular value
    is at most ``tol * sigma_max``. A zero matrix yields the whole space.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.atleast_2d(np.asarray(m))
    cols = m.shape[1]
    if m.shape[0] == 0 or not np.any(m):
        return np.eye(cols, dtype=m.dtype if np.iscomplexobj(m) else float)
    _, s, vh = np.linalg.svd(m, full_matrices=m.shape[0] < cols)
    smax = s[0]
    # rows beyond len(s) correspond to structurally zero singular values
    rank = int(np.count_nonzero(s > tol * smax))
    return vh[rank:].conj().T


def null_space_stacked(
    blocks: Iterable[np.ndarray], tol: float = RANK_RTOL, chunk_rows: int = 1 << 14
) -> np.ndarray:
    """Null space of the vertical stack of ``blocks`` without forming it whole.

    Blocks are compressed with QR in chunks of roughly ``chunk_rows`` rows; the
    triangular factor has the singular values of the full stack, so the rank
    decision matches :func:`null_space` on the stacked matrix.
    """
    r = None
    pending: list[np.ndarray] = []
    rows = 0
    for b in blocks:
        pending.append(b)
        rows += b.shape[0]
        if rows >= chunk_rows:
            r = _compress(r, pending)
            pending, rows = [], 0
    if pending:
        r = _compress(r, pending)
    if r is None:
        raise ValueError("no blocks given")
    return null_space(r, tol)


def _compress(r: np.ndarray | None, blocks: list[np.ndarray]) -> np.ndarray:
    stack = np.vstack(blocks if r is None else [r, *blocks])
    if stack.shape[0] <= stack.shape[1]:
        return stack
    return np.linalg.qr(stack, mode="r")


def orthonormalize(ops: Sequence[np.ndarray], rtol: float = RANK_RTOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of the span of ``ops``.

    Modified Gram-Schmidt with one re-orthogonalization pass, so inputs that
    are already orthogonal are only rescaled and order is kept. An input is
    dropped when its residual falls below ``rtol`` times the largest input norm.
    """
    ops = [np.asarray(o, dtype=complex) for o in ops]
    if not ops:
        return []
    scale = max(hs_norm(o) for o in ops)
    if scale == 0:
        return []
    basis: list[np.ndarray] = []
    for o in ops:
        w = o.copy()
        for _ in range(2):
            for q in basis:
                w -= hs_inner(q, w) * q
        nrm = hs_norm(w)
        if nrm > rtol * scale:
            basis.append(w / nrm)
    return basis


def orthonormalize_vectors(vectors: Sequence[np.ndarray], rtol: float = RANK_RTOL) -> list[np.ndarray]:
    """Same as :func:`orthonormalize` for kets."""
    return [v.reshape(-1) for v in orthonormalize([np.asarray(v).reshape(-1, 1) for v in vectors], rtol)]


def span_projector(vectors: Sequence[np.ndarray], rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthogonal projector onto the span of the given kets."""
    basis = orthonormalize_vectors(vectors, rtol)
    if not basis:
        raise ValueError("empty span")
    q = np.column_stack(basis)
    return q @ q.conj().T


def _keep_indices(keep: Iterable[int], n: int) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 1 <= k <= n:
            raise ValueError(f"qubit index {k} outside 1..{n}")
    return keep


def partial_trace(rho: np.ndarray, keep: Iterable[int], n: int) -> np.ndarray:
    """Reduced operator on the 1-based qubits in ``keep`` (others traced out)."""
    keep = _keep_indices(keep, n)
    rho = np.asarray(rho)
    if rho.shape != (1 << n, 1 << n):
        raise ValueError(f"operator shape {rho.shape} does not match {n} qubits")
    t = rho.reshape([2] * (2 * n))
    traced = [q for q in range(1, n + 1) if q not in keep]
    # trace out from the highest axis down so earlier axis numbers stay valid
    m = n
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q - 1, axis2=q - 1 + m)
        m -= 1
    k = 1 << len(keep)
    return t.reshape(k, k)


def von_neumann_entropy(rho: np.ndarray, base: float | None = None) -> float:
    """``-Tr[rho ln rho]``; pass ``base=2`` to get bits."""
    w = np.linalg.eigvalsh(np.asarray(rho))
    w = w[w > ENTROPY_CUTOFF]
    s = float(-np.sum(w * np.log(w)))
    if base is not None:
        s /= np.log(base)
    return s + 0.0


def random_density(n: int, seed: int) -> np.ndarray:
    """Ginibre-ensemble density operator ``G G^dagger / Tr[G G^dagger]`` on n qubits."""
    if n < 1:
        raise ValueError("need at least one qubit")
    rng = np.random.default_rng(seed)
    d = 1 << n
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def is_density(rho: np.ndarray, herm_tol: float = 1e-10, trace_tol: float = 1e-10, psd_tol: float = 1e-9) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        return False
    if abs(np.trace(rho) - 1) > trace_tol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] >= -psd_tol)


def check_density(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as an array, raising ``ValueError`` if it is not a state."""
    rho = np.asarray(rho, dtype=complex)
    if not is_density(rho):
        raise ValueError("operator is not a valid density operator")
    num_qubits(rho.shape[0])
    return rho


def maximally_mixed(n: int) -> np.ndarray:
    d = 1 << n
    return np.eye(d, dtype=complex) / d


def popcount(z: int) -> int:
    return bin(z).count("1")
