"""Independent brute-force oracles.

Everything here recomputes library results from first principles by a
different route (transitive closure, delete-and-recount, direct map
enumeration, explicit Kronecker products) so the tests never check an
implementation against itself.
"""

from __future__ import annotations

import itertools

import numpy as np

from permprod.digraphs import DiGraph
from permprod.partitions import Partition


def brute_join(p: Partition, q: Partition) -> Partition:
    """Finest common coarsening by repeated pairwise merging to a fixpoint."""
    blocks = [set(b) for b in p.blocks] + [set(b) for b in q.blocks]
    changed = True
    while changed:
        changed = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if blocks[i] & blocks[j]:
                    blocks[i] |= blocks[j]
                    del blocks[j]
                    changed = True
                    break
            if changed:
                break
    return Partition.of(p.ground_size, blocks)


def brute_meet(p: Partition, q: Partition) -> Partition:
    blocks = []
    for a in p.blocks:
        for b in q.blocks:
            inter = set(a) & set(b)
            if inter:
                blocks.append(inter)
    return Partition.of(p.ground_size, blocks)


def brute_refines(p: Partition, q: Partition) -> bool:
    return all(any(set(a) <= set(b) for b in q.blocks) for a in p.blocks)


def all_partitions_brute(n: int) -> list[Partition]:
    """Every set partition, generated by placing elements one at a time."""
    if n == 0:
        return [Partition(0, ())]
    outs: list[list[list[int]]] = [[[0]]]
    for x in range(1, n):
        nxt = []
        for blocks in outs:
            for i in range(len(blocks)):
                nxt.append([b + [x] if j == i else list(b) for j, b in enumerate(blocks)])
            nxt.append([list(b) for b in blocks] + [[x]])
        outs = nxt
    return [Partition.of(n, blocks) for blocks in outs]


def components_by_bfs(n: int, undirected_edges) -> list[set[int]]:
    adj = {v: set() for v in range(n)}
    for u, v in undirected_edges:
        adj[u].add(v)
        adj[v].add(u)
    seen: set[int] = set()
    comps = []
    for v in range(n):
        if v in seen:
            continue
        comp = {v}
        frontier = [v]
        while frontier:
            w = frontier.pop()
            for x in adj[w]:
                if x not in comp:
                    comp.add(x)
                    frontier.append(x)
        seen |= comp
        comps.append(comp)
    return comps


def brute_cut_edges(g: DiGraph) -> set[int]:
    """Delete each edge in turn and recount components."""
    base = len(components_by_bfs(g.vertex_count, g.edges))
    out = set()
    for i in range(g.edge_count):
        rest = [e for j, e in enumerate(g.edges) if j != i]
        if len(components_by_bfs(g.vertex_count, rest)) > base:
            out.add(i)
    return out


def brute_raw_sum(g: DiGraph, mats, dim: int, loops=None):
    """Direct enumeration over all vertex labelings."""
    total = 0
    for lab in itertools.product(range(dim), repeat=g.vertex_count):
        term = 1
        if loops is not None:
            for v in range(g.vertex_count):
                term = term * loops[v][lab[v]]
        for (src, dst), m in zip(g.edges, mats):
            term = term * m[lab[dst], lab[src]]
        total = total + term
    return total


def brute_injective_sum(g: DiGraph, mats, dim: int, loops=None):
    total = 0
    for lab in itertools.permutations(range(dim), g.vertex_count):
        term = 1
        if loops is not None:
            for v in range(g.vertex_count):
                term = term * loops[v][lab[v]]
        for (src, dst), m in zip(g.edges, mats):
            term = term * m[lab[dst], lab[src]]
        total = total + term
    return total


def kron_lift_oracle(entries: np.ndarray, positions: list[int], k: int, n: int) -> np.ndarray:
    """Lift by explicit Kronecker products: expand the operand into per-string
    factors is impossible in general, so place it by permuting a kron with
    identity blocks.  positions: sorted slots of the support inside k slots."""
    m = len(positions)
    rest = [i for i in range(k) if i not in positions]
    big = np.kron(entries, np.eye(n ** len(rest), dtype=entries.dtype))
    # big is ordered support-strings-first; permute tensor axes to slot order
    t = big.reshape((n,) * m + (n,) * len(rest) + (n,) * m + (n,) * len(rest))
    order = positions + rest
    inv = [order.index(i) for i in range(k)]
    axes = inv + [k + i for i in inv]
    return t.transpose(axes).reshape(n**k, n**k)


def dense_conjugation_oracle(x: np.ndarray, perm_images) -> np.ndarray:
    """Sigma^* X Sigma as literal matrix products, with Sigma e_i = e_sigma(i)."""
    n = len(perm_images)
    s = np.zeros((n, n), dtype=x.dtype)
    for i, j in enumerate(perm_images):
        s[j, i] = 1
    return s.conj().T @ x @ s


def connected_multidigraphs(num_vertices: int, max_edges: int):
    """All weakly connected directed multigraphs on a fixed vertex set with at
    most max_edges edges, up to relabeling of the vertices."""
    slots = [(a, b) for a in range(num_vertices) for b in range(num_vertices)]
    seen = set()
    out = []
    for m in range(1, max_edges + 1):
        for combo in itertools.combinations_with_replacement(slots, m):
            comps = components_by_bfs(num_vertices, combo)
            if len(comps) != 1:
                continue
            key = _canonical_digraph_key(num_vertices, combo)
            if key in seen:
                continue
            seen.add(key)
            out.append(DiGraph.of(num_vertices, combo))
    return out


def _canonical_digraph_key(n: int, edges) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        relabeled = tuple(sorted((perm[a], perm[b]) for a, b in edges))
        if best is None or relabeled < best:
            best = relabeled
    return best
