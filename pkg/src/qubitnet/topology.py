"""Interaction topologies: directed graphs, F1-graphs and F2-graphs.

A two-qubit network is a directed graph whose edge ``(i, j)`` means qubit
``i`` controls qubit ``j``. Three-qubit networks are F-graphs: an F1 hyperedge
``(c, {t1, t2})`` has one control and two targets, an F2 hyperedge
``({c1, c2}, t)`` has two controls and one target. F2 connectivity lives on
pair-vertices ``ij`` (see :class:`PairVertexGraph`).

Vertices are 1-based. Hyperedges are stored in canonical (sorted) form and
probabilities never enter any connectivity predicate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence, Union

import numpy as np

PROB_TOL = 1e-9
COUPLING_TOL = 1e-12

Edge = tuple[int, int]
F1Edge = tuple[int, tuple[int, int]]
F2Edge = tuple[tuple[int, int], int]
Pair = tuple[int, int]


def _normalize_probs(count: int, probs: Sequence[float] | None, what: str) -> tuple[float, ...]:
    if probs is None:
        return tuple([1.0 / count] * count) if count else ()
    probs = tuple(float(p) for p in probs)
    if len(probs) != count:
        raise ValueError(f"{what}: {len(probs)} probabilities for {count} edges")
    if any(p <= 0 for p in probs):
        raise ValueError(f"{what}: probabilities must be positive")
    if count and abs(sum(probs) - 1.0) > PROB_TOL:
        raise ValueError(f"{what}: probabilities sum to {sum(probs):.12g}, expected 1")
    return probs


def _check_vertex(v: int, n: int, what: str) -> None:
    if not 1 <= v <= n:
        raise ValueError(f"{what}: vertex {v} outside 1..{n}")


@dataclass(frozen=True)
class DirectedGraph:
    """Two-qubit interaction graph; edge ``(tail, head)`` = (control, target)."""

    n: int
    edges: tuple[Edge, ...]
    probs: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    kind = "cu2"

    def __post_init__(self):
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            _check_vertex(a, self.n, "graph")
            _check_vertex(b, self.n, "graph")
            if a == b:
                raise ValueError(f"graph: self-loop at vertex {a}")
        if len(set(edges)) != len(edges):
            raise ValueError("graph: duplicate edge")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "probs", _normalize_probs(len(edges), self.probs, "graph"))

    @property
    def hyperedges(self) -> tuple[Edge, ...]:
        return self.edges

    def labels(self) -> list[str]:
        return [f"({a},{b})" for a, b in self.edges]

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in range(1, self.n + 1)}
        for a, b in self.edges:
            adj[a].add(b)
        return adj


@dataclass(frozen=True)
class F1Graph:
    """Hyperedges ``(control, (t1, t2))`` with ``t1 < t2``."""

    n: int
    hyperedges: tuple[F1Edge, ...]
    probs: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    kind = "cu31"

    def __post_init__(self):
        canon = []
        for c, ts in self.hyperedges:
            c = int(c)
            t1, t2 = sorted(int(t) for t in ts)
            for v in (c, t1, t2):
                _check_vertex(v, self.n, "F1-graph")
            if t1 == t2 or c in (t1, t2):
                raise ValueError(f"F1-graph: hyperedge ({c},{{{t1},{t2}}}) needs three distinct qubits")
            canon.append((c, (t1, t2)))
        if len(set(canon)) != len(canon):
            raise ValueError("F1-graph: duplicate hyperedge")
        object.__setattr__(self, "hyperedges", tuple(canon))
        object.__setattr__(self, "probs", _normalize_probs(len(canon), self.probs, "F1-graph"))

    def labels(self) -> list[str]:
        sep = "" if self.n < 10 else ","
        return [f"({c},{t1}{sep}{t2})" for c, (t1, t2) in self.hyperedges]

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in range(1, self.n + 1)}
        for c, ts in self.hyperedges:
            adj[c].update(ts)
        return adj


@dataclass(frozen=True)
class F2Graph:
    """Hyperedges ``((c1, c2), target)`` with ``c1 < c2``; ``(i,j;k) = (j,i;k)``."""

    n: int
    hyperedges: tuple[F2Edge, ...]
    probs: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    kind = "cu32"

    def __post_init__(self):
        canon = []
        for cs, t in self.hyperedges:
            c1, c2 = sorted(int(c) for c in cs)
            t = int(t)
            for v in (c1, c2, t):
                _check_vertex(v, self.n, "F2-graph")
            if c1 == c2 or t in (c1, c2):
                raise ValueError(f"F2-graph: hyperedge ({c1},{c2};{t}) needs three distinct qubits")
            canon.append(((c1, c2), t))
        if len(set(canon)) != len(canon):
            raise ValueError("F2-graph: duplicate hyperedge")
        object.__setattr__(self, "hyperedges", tuple(canon))
        object.__setattr__(self, "probs", _normalize_probs(len(canon), self.probs, "F2-graph"))

    def labels(self) -> list[str]:
        sep = "" if self.n < 10 else ","
        return [f"({c1}{sep}{c2};{t})" for (c1, c2), t in self.hyperedges]


Topology = Union[DirectedGraph, F1Graph, F2Graph]
KINDS = {"cu2": DirectedGraph, "cu31": F1Graph, "cu32": F2Graph}
FAMILY_OF_KIND = {"cu2": "two_qubit", "cu31": "f1", "cu32": "f2"}
KIND_OF_FAMILY = {v: k for k, v in FAMILY_OF_KIND.items()}


# -- strongly connected components -------------------------------------------

def strongly_connected_components(adj: dict) -> list[set]:
    """Tarjan's algorithm, iterative. ``adj`` maps every vertex to its successors."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[set] = []
    counter = itertools.count()

    for root in adj:
        if root in index:
            continue
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def is_strongly_connected(g: DirectedGraph) -> bool:
    if g.n < 1:
        raise ValueError("graph needs at least one vertex")
    return len(strongly_connected_components(g.adjacency())) == 1


def f1_is_strongly_connected(g: F1Graph) -> bool:
    """Directed hypergraph paths step from a control to either of its targets."""
    if g.n < 3:
        raise ValueError("F1-graph needs at least three vertices")
    return len(strongly_connected_components(g.adjacency())) == 1


# -- F2 pair-vertex representation -------------------------------------------

@dataclass(frozen=True)
class PairVertexGraph:
    """F-graph over qubit pairs; arc ``ij -> {ik, jk}`` per hyperedge ``(i,j;k)``."""

    n: int
    vertices: tuple[Pair, ...]
    f_arcs: tuple[tuple[Pair, tuple[Pair, Pair]], ...]

    def adjacency(self) -> dict[Pair, set[Pair]]:
        adj = {v: set() for v in self.vertices}
        for tail, head in self.f_arcs:
            adj[tail].update(head)
        return adj

    def reachable(self, start: Pair) -> set[Pair]:
        """Pair-vertices at the end of a directed path of length >= 1 from ``start``."""
        adj = self.adjacency()
        seen: set[Pair] = set()
        todo = list(adj[start])
        while todo:
            v = todo.pop()
            if v not in seen:
                seen.add(v)
                todo.extend(adj[v])
        return seen


def _pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


def derive_pair_vertex_graph(g: F2Graph) -> PairVertexGraph:
    if g.n < 3:
        raise ValueError("F2-graph needs at least three qubits")
    vertices = tuple(itertools.combinations(range(1, g.n + 1), 2))
    arcs = tuple(((i, j), (_pair(i, k), _pair(j, k))) for (i, j), k in g.hyperedges)
    return PairVertexGraph(g.n, vertices, arcs)


def f2_is_base(g: F2Graph) -> bool:
    """Every pair ``ij`` reaches, for each other qubit ``k``, some pair ``k l``.

    Paths are directed (tail pair to head pairs).
    """
    pv = derive_pair_vertex_graph(g)
    for ij in pv.vertices:
        reach = pv.reachable(ij)
        covered = {q for pair in reach for q in pair}
        if any(k not in covered for k in range(1, g.n + 1) if k not in ij):
            return False
    return True


def is_base(t: Topology) -> bool:
    """Base-graph predicate for the topology's own family."""
    if isinstance(t, DirectedGraph):
        return is_strongly_connected(t)
    if isinstance(t, F1Graph):
        return f1_is_strongly_connected(t)
    return f2_is_base(t)


def base_failure(t: Topology) -> str | None:
    """Human-readable name of the failed base predicate, or None."""
    if is_base(t):
        return None
    if isinstance(t, F2Graph):
        return "F2-graph does not satisfy the pair-vertex path condition"
    what = "graph" if isinstance(t, DirectedGraph) else "F1-graph"
    return f"{what} is not strongly connected"


# -- appendix constructions ---------------------------------------------------

def star_f1(n: int) -> F1Graph:
    if n < 3:
        raise ValueError("star F1-graph needs n >= 3")
    rest = range(3, n + 1)
    edges = [(1, (2, j)) for j in rest] + [(2, (1, j)) for j in rest] + [(j, (1, 2)) for j in rest]
    return F1Graph(n, tuple(edges))


def star_f2(n: int) -> F2Graph:
    """F2-graph whose derived graphs G_1, G_2 are bidirected stars.

    G_1 is centred on qubit 2 and G_2 on qubit 1. Every other G_k (k >= 3) is
    the 2-cycle ``1 <-> 2`` plus edges ``j -> 1`` from the remaining qubits, so
    those graphs are mutually isomorphic.
    """
    if n < 3:
        raise ValueError("star F2-graph needs n >= 3")
    rest = range(3, n + 1)
    edges = (
        [((1, 2), k) for k in rest]
        + [((1, k), 2) for k in rest]
        + [((2, k), 1) for k in rest]
        + [((j, k), 1) for j, k in itertools.combinations(rest, 2)]
    )
    return F2Graph(n, tuple(edges))


def derive_graph_set(g: F2Graph) -> list[DirectedGraph]:
    """Graphs ``G_i`` on vertices ``{1..n} \\ {i}`` with ``(j,k) in E_i`` iff ``(i,j;k) in E``.

    Vertex labels keep their original numbering; ``G_i`` is returned as a graph
    on ``n`` vertices in which vertex ``i`` is isolated. Edge probabilities are
    the hyperedge probabilities rescaled to sum to one within each ``G_i``.
    """
    if g.n < 3:
        raise ValueError("F2-graph needs at least three qubits")
    out = []
    for i in range(1, g.n + 1):
        edges, ps = [], []
        for ((c1, c2), k), p in zip(g.hyperedges, g.probs):
            if i in (c1, c2):
                j = c2 if c1 == i else c1
                edges.append((j, k))
                ps.append(p)
        total = sum(ps)
        out.append(DirectedGraph(g.n, tuple(edges), tuple(p / total for p in ps) if ps else None))
    return out


def is_star_graph(g: DirectedGraph, exclude: Iterable[int] = ()) -> bool:
    """True if the edges form a bidirected star over the vertices not excluded."""
    verts = [v for v in range(1, g.n + 1) if v not in set(exclude)]
    if len(verts) < 2:
        return False
    es = set(g.edges)
    for c in verts:
        want = {(c, v) for v in verts if v != c} | {(v, c) for v in verts if v != c}
        if es == want:
            return True
    return False


def _canonical_edges(t: Topology) -> frozenset:
    return frozenset(t.hyperedges)


def is_subgraph(g: Topology, h: Topology) -> bool:
    """``g`` and ``h`` share the vertex set and every (hyper)edge of g is in h."""
    if type(g) is not type(h):
        raise TypeError(f"cannot compare {type(g).__name__} with {type(h).__name__}")
    return g.n == h.n and _canonical_edges(g) <= _canonical_edges(h)


def all_hyperedges(kind: str, n: int) -> list:
    """Every admissible (hyper)edge of the given kind in canonical order."""
    vs = range(1, n + 1)
    if kind == "cu2":
        return [(i, j) for i in vs for j in vs if i != j]
    if kind == "cu31":
        return [(c, ts) for c in vs for ts in itertools.combinations([v for v in vs if v != c], 2)]
    if kind == "cu32":
        return [(cs, k) for cs in itertools.combinations(vs, 2) for k in vs if k not in cs]
    raise ValueError(f"unknown kind {kind!r}")


def maximal_topology(kind: str, n: int) -> Topology:
    kind = KIND_OF_FAMILY.get(kind, kind)
    need = 2 if kind == "cu2" else 3
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if n < need:
        raise ValueError(f"{kind} topology needs n >= {need}")
    return KINDS[kind](n, tuple(all_hyperedges(kind, n)))


def expected_hyperedge_count(kind: str, n: int) -> int:
    return {"cu2": n * (n - 1), "cu31": n * comb(n - 1, 2), "cu32": comb(n, 2) * (n - 2)}[kind]


def random_topology(
    kind: str, n: int, rng: np.random.Generator, base: bool | None = None, max_tries: int = 10_000
) -> Topology:
    """Random topology with random positive probabilities.

    ``base=True`` / ``False`` rejection-samples until the base predicate agrees.
    """
    pool = all_hyperedges(kind, n)
    for _ in range(max_tries):
        m = int(rng.integers(1, len(pool) + 1))
        idx = sorted(rng.choice(len(pool), size=m, replace=False))
        w = rng.uniform(0.1, 1.0, size=m)
        t = KINDS[kind](n, tuple(pool[i] for i in idx), tuple(w / w.sum()))
        if base is None or is_base(t) == base:
            return t
    raise RuntimeError(f"no {kind} topology with base={base} found on {n} vertices")


def with_probs(t: Topology, probs: Sequence[float]) -> Topology:
    return type(t)(t.n, t.hyperedges, tuple(probs))


# -- index graph --------------------------------------------------------------

@dataclass(frozen=True)
class IndexGraph:
    """Undirected colored graph on computational-basis labels."""

    vertices: tuple[int, ...]
    colored_edges: tuple[tuple[int, int, str], ...]

    def adjacency(self, colors: Iterable[str] | None = None) -> dict[int, set[int]]:
        keep = None if colors is None else set(colors)
        adj = {v: set() for v in self.vertices}
        for a, b, c in self.colored_edges:
            if keep is None or c in keep:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def edge_set(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for a, b, _ in self.colored_edges}


def build_index_graph(ruo, n: int | None = None) -> IndexGraph:
    """Basis labels ``z, z'`` are joined with color ``e`` when ``<z'|U_e|z> != 0``.

    Labels with no incident edge are dropped.
    """
    n = ruo.n if n is None else n
    d = 1 << n
    edges = set()
    for u, label in zip(ruo.unitaries, ruo.labels):
        if u.shape != (d, d):
            raise ValueError("unitary does not act on 2^n dimensions")
        rows, cols = np.nonzero(np.abs(u) > COUPLING_TOL)
        for zp, z in zip(rows, cols):
            if zp != z:
                edges.add((min(z, zp), max(z, zp), label))
    verts = sorted({v for a, b, _ in edges for v in (a, b)})
    return IndexGraph(tuple(verts), tuple(sorted(edges)))


def _connected(adj: dict, removed=None) -> bool:
    verts = [v for v in adj if v != removed]
    if not verts:
        return False
    seen = {verts[0]}
    todo = [verts[0]]
    while todo:
        v = todo.pop()
        for w in adj[v]:
            if w != removed and w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(verts)


def is_two_connected(g: IndexGraph) -> bool:
    """Connected, and still connected after deleting any one vertex."""
    adj = g.adjacency()
    if not _connected(adj):
        return False
    if len(adj) <= 2:
        return True
    return all(_connected(adj, removed=v) for v in adj)
