"""Check batteries behind ``qubitnet verify``.

Each suite returns a list of check records ``{"name", "passed", ...}`` with
the measured quantities; failures are reported, never raised.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from . import linalg as la
from .analysis import (
    conserved_overlap_check,
    consensus_observable_check,
    entropy_pair,
    permutation_asymmetry,
    space_permutation_closed,
)
from .attractors import (
    asymptotic_state,
    attractor_residual,
    closed_form_attractor_space,
    solve_attractors,
    space_intersection,
    space_subset,
    spaces_equal,
)
from .gates import is_pi_half
from .ruo import from_topology, mix
from .topology import (
    FAMILY_OF_KIND,
    DirectedGraph,
    maximal_topology,
    random_topology,
    star_f1,
    star_f2,
)

SUITES: dict[str, Callable] = {}


def suite(name):
    def deco(fn):
        SUITES[name] = fn
        return fn
    return deco


def _dims(space) -> dict[str, int]:
    return {"lambda=1": space.dim(1), "lambda=-1": space.dim(-1)}


def _max_residual(ruo, space) -> float:
    return max(
        (attractor_residual(ruo, x, lam) for lam in space.lambdas() for x in space.basis(lam)),
        default=0.0,
    )


def _dimension_check(name, family, topo, phi, expected, tol):
    ruo = from_topology(topo, phi)
    numeric = solve_attractors(ruo, tol=tol)
    closed = closed_form_attractor_space(family, topo.n, phi, topo)
    got = _dims(numeric)
    return {
        "name": name,
        "n": topo.n,
        "phi": phi,
        "expected": expected,
        "numeric": got,
        "closed_form": _dims(closed),
        "max_residual": _max_residual(ruo, numeric),
        "mutual_subset": spaces_equal(numeric, closed),
        "notes": closed.notes,
        "passed": got == expected and _dims(closed) == expected and spaces_equal(numeric, closed)
        and _max_residual(ruo, numeric) <= 1e-8,
    }


def expected_dims(family: str, n: int, phi: float) -> dict[str, int]:
    if family == "two_qubit":
        return {"lambda=1": 5, "lambda=-1": 1 if n == 2 else 0}
    if family == "f1":
        if not is_pi_half(phi):
            return {"lambda=1": 10, "lambda=-1": 0}
        return {"lambda=1": 11, "lambda=-1": 1 if n == 3 else 0}
    return {"lambda=1": (n + 2) ** 2 + 1, "lambda=-1": 0}


@suite("twoqubit")
def verify_two_qubit(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 5):
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        for phi in phis:
            graphs = [maximal_topology("cu2", n)]
            if n == 2:
                graphs = [DirectedGraph(2, ((1, 2), (2, 1)))]
            else:
                graphs += [random_topology("cu2", n, rng, base=True) for _ in range(samples)]
            for k, g in enumerate(graphs):
                checks.append(_dimension_check(f"two_qubit n={n} graph#{k}", "two_qubit", g, phi,
                                               expected_dims("two_qubit", n, phi), tol))
    return checks


@suite("theorem1")
def verify_theorem1(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 0):
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        for phi in phis:
            graphs = [("star", star_f1(n)), ("maximal", maximal_topology("cu31", n))]
            graphs += [(f"random#{k}", random_topology("cu31", n, rng, base=True)) for k in range(samples)]
            for label, g in graphs:
                checks.append(_dimension_check(f"theorem1 {label} n={n}", "f1", g, phi,
                                               expected_dims("f1", n, phi), tol))
    return checks


@suite("theorem2")
def verify_theorem2(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 0):
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        for phi in phis:
            graphs = [("star", star_f2(n)), ("maximal", maximal_topology("cu32", n))]
            graphs += [(f"random#{k}", random_topology("cu32", n, rng, base=True)) for k in range(samples)]
            for label, g in graphs:
                checks.append(_dimension_check(f"theorem2 {label} n={n}", "f2", g, phi,
                                               expected_dims("f2", n, phi), tol))
    return checks


def base_triple(n: int, rng: np.random.Generator | None = None):
    """A strongly connected graph with star F1 and F2 graphs, or random base graphs."""
    if rng is None:
        g2 = DirectedGraph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))
        return g2, star_f1(n), star_f2(n)
    return tuple(random_topology(k, n, rng, base=True) for k in ("cu2", "cu31", "cu32"))


@suite("simultaneous")
def verify_simultaneous(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 0):
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        for phi in phis:
            triples = [base_triple(n)] + [base_triple(n, rng) for _ in range(samples)]
            for k, (g2, g31, g32) in enumerate(triples):
                r2, r31, r32 = (from_topology(t, phi) for t in (g2, g31, g32))
                a2, a31, a32 = (solve_attractors(r, tol=tol) for r in (r2, r31, r32))
                asim = solve_attractors(mix([(r2, 0.4), (r31, 0.3), (r32, 0.3)]), tol=tol)
                a3 = solve_attractors(mix([(r31, 0.5), (r32, 0.5)]), tol=tol)
                inter3 = space_intersection(a31, a32)
                inter_all = space_intersection(space_intersection(a2, a31), a32)
                res = {
                    "sim_equals_two_qubit": spaces_equal(asim, a2),
                    "sim_equals_intersection": spaces_equal(asim, inter_all),
                    "three_qubit_intersection_equals_two_qubit": spaces_equal(inter3, a2),
                    "pure_three_qubit_mix_equals_two_qubit": spaces_equal(a3, a2),
                    "two_qubit_subset_f1": space_subset(a2, a31),
                    "two_qubit_subset_f2": space_subset(a2, a32),
                }
                checks.append({
                    "name": f"simultaneous n={n} triple#{k}",
                    "n": n,
                    "phi": phi,
                    "dims": {"two_qubit": _dims(a2), "f1": _dims(a31), "f2": _dims(a32), "sim": _dims(asim)},
                    **res,
                    "passed": all(res.values()),
                })
    return checks


@suite("consensus")
def verify_consensus(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 20):
    checks = []
    for n in ns:
        g2, g31, g32 = base_triple(n)
        for phi in phis:
            for topo in (g2, g31, g32):
                ruo = from_topology(topo, phi)
                space = closed_form_attractor_space(FAMILY_OF_KIND[topo.kind], n, phi, topo)
                # period-two attractors are odd under transpositions, so only
                # the time-averaged limit can be symmetric there
                periodic = space.dim(-1) > 0
                asym = 0.0
                conserved_ok = True
                for s in range(samples):
                    rho0 = la.random_density(n, seed + s)
                    limits = [asymptotic_state(space, rho0, p) for p in ("even", "odd")]
                    if periodic:
                        limits = [(limits[0] + limits[1]) / 2]
                    asym = max(asym, *(permutation_asymmetry(x, n) for x in limits))
                    conserved_ok &= conserved_overlap_check(ruo, rho0, 50)
                perm_ok = asym <= 1e-8
                checks.append({
                    "name": f"consensus {topo.kind} n={n}",
                    "n": n,
                    "phi": phi,
                    "period_two": periodic,
                    "permutation_invariant": bool(perm_ok),
                    "max_asymmetry": asym,
                    "attractor_space_permutation_closed": space_permutation_closed(space),
                    "overlap_conserved": bool(conserved_ok),
                    "passed": bool(perm_ok and conserved_ok),
                })
        observable_ok = all(
            consensus_observable_check(la.random_density(n, seed + s), n, g2) for s in range(samples)
        )
        checks.append({"name": f"consensus observable n={n}", "n": n, "phi": math.pi / 2,
                       "passed": bool(observable_ok)})
    return checks


@suite("entropy")
def verify_entropy(ns: Iterable[int], phis: Iterable[float], seed: int = 0, tol: float = 1e-10, samples: int = 100):
    checks = []
    for n in ns:
        g2, g31, g32 = base_triple(n)
        for phi in phis:
            for g3 in (g31, g32):
                margins = []
                for s in range(samples):
                    s2, s3 = entropy_pair(la.random_density(n, seed + s), n, phi, g2, g3)
                    margins.append(s2 - s3)
                checks.append({
                    "name": f"entropy {g3.kind} n={n}",
                    "n": n,
                    "phi": phi,
                    "min_margin_nats": min(margins),
                    "passed": min(margins) >= -1e-9,
                })
    return checks


def run_suite(name: str, ns, phis, seed: int = 0, tol: float = 1e-10, samples: int | None = None) -> list[dict]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    kwargs = {} if samples is None else {"samples": samples}
    return SUITES[name](ns, phis, seed=seed, tol=tol, **kwargs)
