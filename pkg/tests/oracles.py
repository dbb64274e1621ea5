"""Independent reference implementations used to cross-check the package.

Written from the definitions with plain loops; they share no code with
``qubitnet`` beyond numpy.
"""

import itertools
import math

import numpy as np


def bit(z, q, n):
    """Value of qubit ``q`` (1-based, qubit 1 most significant) in label ``z``."""
    return (z >> (n - q)) & 1


def flip(z, q, n):
    return z ^ (1 << (n - q))


def gate_by_loops(controls, targets, phi, n):
    """Controlled ``U_phi^{(x) targets}`` built column by column.

    ``U_phi = cos(phi) Z + sin(phi) X`` sends |0> to cos|0> + sin|1> and
    |1> to sin|0> - cos|1>.
    """
    d = 2**n
    c, s = math.cos(phi), math.sin(phi)
    g = np.zeros((d, d))
    for z in range(d):
        if not all(bit(z, q, n) for q in controls):
            g[z, z] = 1.0
            continue
        # expand U on each target in turn
        amps = {z: 1.0}
        for t in targets:
            nxt = {}
            for w, a in amps.items():
                if bit(w, t, n) == 0:
                    terms = ((w, c), (flip(w, t, n), s))
                else:
                    terms = ((flip(w, t, n), s), (w, -c))
                for v, b in terms:
                    nxt[v] = nxt.get(v, 0.0) + a * b
            amps = nxt
        for w, a in amps.items():
            g[w, z] += a
    return g


def channel_by_units(unitaries, probs):
    """Superoperator on column-stacked operators, built from matrix units."""
    d = unitaries[0].shape[0]
    m = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        i, j = col % d, col // d  # column-stacking: vec index = i + d*j
        e = np.zeros((d, d), dtype=complex)
        e[i, j] = 1.0
        out = sum(p * u @ e @ u.conj().T for u, p in zip(unitaries, probs))
        m[:, col] = out.reshape(-1, order="F")
    return m


def unit_circle_multiplicities(superop, tol=1e-7):
    """Dimensions of ker(S - lambda) for every eigenvalue on the unit circle."""
    ev = np.linalg.eigvals(superop)
    out = {}
    for lam in ev[np.abs(np.abs(ev) - 1) < tol]:
        key = complex(round(lam.real, 6), round(lam.imag, 6))
        if key in out:
            continue
        s = np.linalg.svd(superop - key * np.eye(superop.shape[0]), compute_uv=False)
        out[key] = int(np.sum(s <= 1e-8 * s[0]))
    return out


def partial_trace_by_loops(rho, keep, n):
    keep = sorted(keep)
    k = len(keep)
    traced = [q for q in range(1, n + 1) if q not in keep]
    out = np.zeros((2**k, 2**k), dtype=complex)

    def label(kept_bits, traced_bits):
        z = 0
        for q in range(1, n + 1):
            b = kept_bits[keep.index(q)] if q in keep else traced_bits[traced.index(q)]
            z = (z << 1) | b
        return z

    for a in itertools.product((0, 1), repeat=k):
        for b in itertools.product((0, 1), repeat=k):
            ia = int("".join(map(str, a)) or "0", 2)
            ib = int("".join(map(str, b)) or "0", 2)
            for t in itertools.product((0, 1), repeat=n - k):
                out[ia, ib] += rho[label(a, t), label(b, t)]
    return out


def closure(vertices, arcs):
    """Reachability by paths of length >= 1 (Warshall)."""
    vs = list(vertices)
    idx = {v: i for i, v in enumerate(vs)}
    r = np.zeros((len(vs), len(vs)), dtype=bool)
    for a, b in arcs:
        r[idx[a], idx[b]] = True
    for k in range(len(vs)):
        r |= r[:, [k]] & r[[k], :]
    return {v: {w for w in vs if r[idx[v], idx[w]]} for v in vs}


def strongly_connected_by_closure(n, arcs):
    reach = closure(range(1, n + 1), arcs)
    return n == 1 or all(reach[v] >= set(range(1, n + 1)) - {v} for v in range(1, n + 1))


def f1_arcs(hyperedges):
    return [(c, t) for c, ts in hyperedges for t in ts]


def f2_base_by_closure(n, hyperedges):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    arcs = []
    for (i, j), k in hyperedges:
        arcs += [((i, j), tuple(sorted((i, k)))), ((i, j), tuple(sorted((j, k))))]
    reach = closure(pairs, arcs)
    for ij in pairs:
        seen = set(itertools.chain.from_iterable(reach[ij]))
        if not all(k in seen for k in range(1, n + 1) if k not in ij):
            return False
    return True


def iterate_to_limit(unitaries, probs, rho0, steps):
    rho = np.array(rho0, dtype=complex)
    for _ in range(steps):
        rho = sum(p * u @ rho @ u.conj().T for u, p in zip(unitaries, probs))
    return rho


def entropy_by_eig(rho, base=math.e):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-12]
    return float(-(w * np.log(w)).sum() / math.log(base))
