"""Edge-colored test digraphs and their moment calculus.

A test graph is a finite directed multigraph whose edges carry colors and
matrix labels living on the color's string block.  Its trace sums, over all
labelings of vertices by full-space indices, the product of label entries
(target index, source index); the injective trace restricts to injective
labelings.  Everything downstream of the kernel decomposition lives here:
the minimal kernels rho_s, the per-color meets and quotients, the bipartite
graph of colored components and its tree test, the exact expectation
formula for a kernel class, and the growth exponent that decides which
kernel classes survive as N grows.

Exact arithmetic: whenever every label involved is integer valued the sums
are taken in integer arithmetic and traces come back as Fractions; any
float or complex label switches the computation to complex.
"""

from __future__ import annotations

import itertools
import math
import string as _stringmod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .digraphs import (
    DiGraph,
    Multigraph,
    TwoEdgeDecomposition,
    quotient_digraph,
    two_edge_decompose,
    weak_components,
)
from .partitions import (
    Partition,
    bell_number,
    enumerate_partitions,
    meet_many,
    mobius_from_bottom,
)
from .strings import StringAssignment
from .tensor import (
    GuardExceeded,
    MultiIndexSpace,
    Permutation,
    StructuredMatrix,
    conjugate_by_color,
    lift,
)

MAP_GUARD = 2**24
PARTITION_GUARD = 10**7


@dataclass(frozen=True)
class TestGraph:
    __test__ = False  # keep pytest from collecting the class by name

    assignment: StringAssignment
    digraph: DiGraph
    edge_colors: tuple[str, ...]
    labels: tuple[StructuredMatrix, ...]

    def __post_init__(self):
        if len(self.edge_colors) != self.digraph.edge_count or len(self.labels) != self.digraph.edge_count:
            raise ValueError("edge colors/labels must match edge count")
        for c, lab in zip(self.edge_colors, self.labels):
            want = self.assignment.sorted_strings_of(c)
            if not want:
                raise ValueError(f"color {c!r} has no strings")
            if lab.support != want:
                raise ValueError(f"label support {lab.support} does not match strings of color {c!r}")

    @property
    def n(self) -> int:
        return self.labels[0].n if self.labels else 1

    def full_space(self, n: int | None = None) -> MultiIndexSpace:
        return MultiIndexSpace.of(self.assignment.strings, n if n is not None else self.n)

    def color_space(self, color: str, n: int | None = None) -> MultiIndexSpace:
        return MultiIndexSpace.of(self.assignment.strings_of(color), n if n is not None else self.n)


@dataclass(frozen=True)
class LoopedTestGraph:
    """A test graph with a diagonal label (a full-space vector) at each vertex."""

    base: TestGraph
    vertex_labels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.vertex_labels) != self.base.digraph.vertex_count:
            raise ValueError("one vertex label per vertex")

    @staticmethod
    def with_identity(base: TestGraph) -> "LoopedTestGraph":
        dim = base.full_space().total_dim
        ones = np.ones(dim, dtype=np.int64)
        return LoopedTestGraph(base, tuple(ones for _ in range(base.digraph.vertex_count)))


@dataclass(frozen=True)
class MultiPartition:
    """One vertex partition per string, aligned with the sorted string list."""

    strings: tuple[str, ...]
    parts: tuple[Partition, ...]

    def __post_init__(self):
        if tuple(sorted(self.strings)) != self.strings:
            raise ValueError("strings must be sorted")
        if len(self.parts) != len(self.strings):
            raise ValueError("one partition per string")
        sizes = {p.ground_size for p in self.parts}
        if len(sizes) > 1:
            raise ValueError("partitions have mismatched ground sets")

    @staticmethod
    def of(mapping: dict[str, Partition]) -> "MultiPartition":
        keys = tuple(sorted(mapping))
        return MultiPartition(keys, tuple(mapping[s] for s in keys))

    def part(self, s: str) -> Partition:
        return self.parts[self.strings.index(s)]

    def items(self):
        return zip(self.strings, self.parts)


# ---------------------------------------------------------------------------
# dense graph-sum evaluation


def _as_exact_or_complex(arrays: Sequence[np.ndarray]) -> tuple[list[np.ndarray], bool]:
    exact = all(a.dtype == object or np.issubdtype(a.dtype, np.integer) for a in arrays)
    if exact:
        return list(arrays), True
    return [np.asarray(a, dtype=np.complex128) for a in arrays], False


def raw_graph_sum(
    g: DiGraph,
    edge_matrices: Sequence[np.ndarray],
    dim: int,
    vertex_vectors: Sequence[np.ndarray] | None = None,
    map_guard_total: int | None = None,
):
    """Sum over all vertex labelings i of prod_e M_e[i(target), i(source)]
    (times prod_v vec_v[i(v)] when vertex vectors are given).

    Evaluated as a tensor-network contraction, so the cost is far below the
    dim**V count the guard bounds.  Exact for integer/object inputs.
    """
    nv = g.vertex_count
    if map_guard_total is not None and dim**nv > map_guard_total:
        raise GuardExceeded(f"labeling count {dim}**{nv} exceeds map guard")
    if nv == 0:
        return 1
    if nv > len(_stringmod.ascii_letters):
        raise GuardExceeded("too many vertices for subscript labels")
    letters = _stringmod.ascii_letters
    operands: list[np.ndarray] = []
    subs: list[str] = []
    for (s, t), m in zip(g.edges, edge_matrices):
        operands.append(m)
        subs.append(letters[t] + letters[s])
    if vertex_vectors is None:
        vertex_vectors = [None] * nv  # type: ignore[list-item]
    for v in range(nv):
        vec = vertex_vectors[v]
        if vec is None:
            vec = np.ones(dim, dtype=np.int64)
        operands.append(np.asarray(vec))
        subs.append(letters[v])
    operands, exact = _as_exact_or_complex(operands)
    expr = ",".join(subs) + "->"
    if exact:
        if all(a.dtype != object for a in operands):
            bound = dim**nv
            for a in operands:
                m = int(np.max(np.abs(a))) if a.size else 0
                bound *= max(m, 1)
            if bound < 2**62:
                return int(np.einsum(expr, *operands, optimize=True))
        ops = [a.astype(object) for a in operands]
        return np.einsum(expr, *ops, optimize=False)
    return complex(np.einsum(expr, *operands, optimize=True))


def raw_injective_graph_sum(
    g: DiGraph,
    edge_matrices: Sequence[np.ndarray],
    dim: int,
    vertex_vectors: Sequence[np.ndarray] | None = None,
    map_guard_total: int | None = None,
):
    """Same sum restricted to injective labelings, via partition-lattice
    inversion over vertex identifications."""
    if g.vertex_count > dim:
        return 0
    total = 0
    for p in enumerate_partitions(g.vertex_count):
        q, vmap = quotient_digraph(g, p)
        vecs = None
        if vertex_vectors is not None:
            vecs = _merge_vertex_vectors(vertex_vectors, p)
        term = raw_graph_sum(q, edge_matrices, dim, vecs, map_guard_total)
        total = total + mobius_from_bottom(p) * term
    return total


def _merge_vertex_vectors(vectors: Sequence[np.ndarray], p: Partition) -> list[np.ndarray]:
    out = []
    for b in p.blocks:
        acc = vectors[b[0]]
        for v in b[1:]:
            acc = acc * vectors[v]
        out.append(acc)
    return out


def _normalize(raw, dim: int, comps: int):
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw, dim**comps)
    return raw / dim**comps


# ---------------------------------------------------------------------------
# full-space traces of (looped) test graphs


def underline_labels(
    t: TestGraph,
    sigmas: dict[str, Permutation] | None,
    n: int | None = None,
    dense_guard: int | None = None,
) -> list[np.ndarray]:
    """Dense full-space edge labels: each label conjugated by its color's
    permutation (identity when absent) and lifted against identity factors."""
    space = t.full_space(n)
    out = []
    kwargs = {} if dense_guard is None else {"dense_guard": dense_guard}
    for c, lab in zip(t.edge_colors, t.labels):
        x = lab
        if sigmas is not None and c in sigmas:
            x = conjugate_by_color(lab, sigmas[c])
        out.append(lift(x, space, **kwargs))
    return out


def _trace_impl(t, sigmas, n, injective, normalized, map_guard):
    base = t.base if isinstance(t, LoopedTestGraph) else t
    loops = t.vertex_labels if isinstance(t, LoopedTestGraph) else None
    nn = n if n is not None else base.n
    space = base.full_space(nn)
    nv = base.digraph.vertex_count
    if nv and nn**nv > map_guard:
        raise GuardExceeded(f"per-string labeling count {nn}**{nv} exceeds map guard {map_guard}")
    guard_total = map_guard ** max(1, len(space.strings))
    mats = underline_labels(base, sigmas, nn)
    fn = raw_injective_graph_sum if injective else raw_graph_sum
    raw = fn(base.digraph, mats, space.total_dim, loops, guard_total)
    if not normalized:
        return raw
    comps = weak_components(base.digraph).num_blocks
    return _normalize(raw, space.total_dim, comps)


def trace_test_graph(
    t: TestGraph | LoopedTestGraph,
    n: int | None = None,
    sigmas: dict[str, Permutation] | None = None,
    normalized: bool = True,
    map_guard: int = MAP_GUARD,
):
    """The trace of the test graph over its full space: the sum over all
    vertex labelings, divided by dim per weakly connected component."""
    return _trace_impl(t, sigmas, n, False, normalized, map_guard)


def injective_trace(
    t: TestGraph | LoopedTestGraph,
    n: int | None = None,
    sigmas: dict[str, Permutation] | None = None,
    normalized: bool = True,
    map_guard: int = MAP_GUARD,
):
    """The trace restricted to injective vertex labelings."""
    return _trace_impl(t, sigmas, n, True, normalized, map_guard)


# ---------------------------------------------------------------------------
# kernels, per-color quotients, graph of colored components


def rho(t: TestGraph, s: str) -> Partition:
    """Vertex partition into components of the subgraph of edges whose colors
    avoid string s: the minimal admissible kernel for that string."""
    if s not in t.assignment.strings:
        raise ValueError(f"unknown string {s!r}")
    keep = [i for i, c in enumerate(t.edge_colors) if s not in t.assignment.strings_of(c)]
    return weak_components(t.digraph.restrict_edges(keep))


def all_rho(t: TestGraph) -> MultiPartition:
    return MultiPartition.of({s: rho(t, s) for s in t.assignment.strings})


def omega(pi: MultiPartition, assignment: StringAssignment, c: str) -> Partition:
    strings = assignment.sorted_strings_of(c)
    if not strings:
        raise ValueError(f"color {c!r} has no strings")
    return meet_many([pi.part(s) for s in strings])


@dataclass(frozen=True)
class ColoredQuotient:
    """A color- or string-restricted subgraph of a test graph, with its
    vertices identified along a partition.  Edge ids refer to the parent."""

    digraph: DiGraph
    partition: Partition
    edge_ids: tuple[int, ...]
    labels: tuple[StructuredMatrix, ...]

    @property
    def vertex_blocks(self) -> tuple[tuple[int, ...], ...]:
        return self.partition.blocks

    def components(self) -> Partition:
        return weak_components(self.digraph)

    def decomposition(self) -> TwoEdgeDecomposition:
        return two_edge_decompose(self.digraph)


def color_quotient(t: TestGraph, pi: MultiPartition, c: str) -> ColoredQuotient:
    """The c-colored subgraph with vertices identified along the meet of the
    kernels over c's strings."""
    om = omega(pi, t.assignment, c)
    keep = tuple(i for i, col in enumerate(t.edge_colors) if col == c)
    q, _ = quotient_digraph(t.digraph.restrict_edges(keep), om)
    return ColoredQuotient(q, om, keep, tuple(t.labels[i] for i in keep))


def string_quotient(t: TestGraph, pi: MultiPartition, s: str) -> ColoredQuotient:
    """The subgraph of edges colored by colors meeting string s, with
    vertices identified along pi_s."""
    ps = pi.part(s)
    keep = tuple(i for i, col in enumerate(t.edge_colors) if s in t.assignment.strings_of(col))
    q, _ = quotient_digraph(t.digraph.restrict_edges(keep), ps)
    return ColoredQuotient(q, ps, keep, tuple(t.labels[i] for i in keep))


def h_sc(t: TestGraph, pi: MultiPartition, s: str, c: str) -> tuple[int, ...]:
    """Block map from the c-quotient's vertices to the s-quotient's vertices;
    well defined because the meet refines every string's kernel."""
    om = omega(pi, t.assignment, c)
    ps = pi.part(s)
    return tuple(ps.block_index(b[0]) for b in om.blocks)


@dataclass(frozen=True)
class GCCGraph:
    """Bipartite multigraph tying string-quotient vertices to colored
    components; one edge per vertex of each colored quotient."""

    graph: Multigraph
    left_blocks: tuple[tuple[int, ...], ...]  # blocks of pi_s
    right_comps: tuple[tuple[str, tuple[int, ...]], ...]  # (color, parent vertices)
    edge_keys: tuple[tuple[str, tuple[int, ...]], ...]  # (color, omega block)

    @property
    def left_count(self) -> int:
        return len(self.left_blocks)

    def is_tree(self) -> bool:
        return self.graph.is_tree()

    def vertex_desc(self, v: int):
        if v < self.left_count:
            return ("block", self.left_blocks[v])
        return ("comp",) + self.right_comps[v - self.left_count]


def gcc(t: TestGraph, pi: MultiPartition, s: str) -> GCCGraph:
    ps = pi.part(s)
    left = ps.blocks
    colors = sorted(t.assignment.colors_of(s))
    right: list[tuple[str, tuple[int, ...]]] = []
    edges: list[tuple[int, int]] = []
    keys: list[tuple[str, tuple[int, ...]]] = []
    for c in colors:
        q = color_quotient(t, pi, c)
        comps = q.components()
        offset = len(left) + len(right)
        for comp in comps.blocks:
            members = tuple(sorted(v for b in comp for v in q.partition.blocks[b]))
            right.append((c, members))
        hmap = h_sc(t, pi, s, c)
        for v, block in enumerate(q.partition.blocks):
            edges.append((hmap[v], offset + comps.block_index(v)))
            keys.append((c, block))
    graph = Multigraph(len(left) + len(right), tuple(edges))
    return GCCGraph(graph, left, tuple(right), tuple(keys))


@dataclass(frozen=True)
class GCCWalk:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    vertex_descs: tuple
    edge_keys: tuple


def induced_gcc_walk(
    t: TestGraph, pi: MultiPartition, s: str, edge_sequence: Sequence[int]
) -> GCCWalk:
    """The walk a quotient-graph walk induces in the graph of colored
    components: alternates string-quotient blocks with colored components,
    one GCC edge per endpoint of each relevant edge."""
    rhos = all_rho(t)
    for st, part in pi.items():
        if not rhos.part(st).refines(part):
            raise ValueError(f"pi_{st} is not above rho_{st}")
    if not edge_sequence:
        raise ValueError("empty edge sequence")
    cs = sorted(t.assignment.colors_of(s))
    if not any(_is_quotient_walk(t, pi, c, edge_sequence) for c in cs):
        raise ValueError("edge sequence is not a walk in any relevant color quotient")
    g = gcc(t, pi, s)
    ps = pi.part(s)
    relevant = [j for j in edge_sequence if t.edge_colors[j] in cs]
    first_src = t.digraph.edges[edge_sequence[0]][0]
    verts = [ps.block_index(first_src)]
    edge_ids: list[int] = []
    key_index = {k_eid: i for i, k_eid in enumerate(g.edge_keys)}
    for j in relevant:
        c = t.edge_colors[j]
        om = omega(pi, t.assignment, c)
        src, dst = t.digraph.edges[j]
        comp_vertex = _gcc_comp_vertex(g, c, src)
        e_in = key_index[(c, om.block_containing(src))]
        e_out = key_index[(c, om.block_containing(dst))]
        if verts[-1] != ps.block_index(src):
            raise ValueError("walk is not consistent in the string quotient")
        verts.append(comp_vertex)
        verts.append(ps.block_index(dst))
        edge_ids.extend([e_in, e_out])
    last_dst = t.digraph.edges[edge_sequence[-1]][1]
    if verts[-1] != ps.block_index(last_dst):
        raise ValueError("walk does not end where the edge sequence does")
    _assert_walk_valid(g, verts, edge_ids)
    return GCCWalk(
        tuple(verts),
        tuple(edge_ids),
        tuple(g.vertex_desc(v) for v in verts),
        tuple(g.edge_keys[e] for e in edge_ids),
    )


def _is_quotient_walk(t: TestGraph, pi: MultiPartition, c: str, seq: Sequence[int]) -> bool:
    om = omega(pi, t.assignment, c)
    for a, b in zip(seq, seq[1:]):
        if not om.same_block(t.digraph.edges[a][1], t.digraph.edges[b][0]):
            return False
    return True


def _gcc_comp_vertex(g: GCCGraph, c: str, parent_vertex: int) -> int:
    for i, (col, members) in enumerate(g.right_comps):
        if col == c and parent_vertex in members:
            return g.left_count + i
    raise ValueError("vertex not found in any component")


def _assert_walk_valid(g: GCCGraph, verts: Sequence[int], edges: Sequence[int]):
    if len(verts) != len(edges) + 1:
        raise AssertionError("walk shape mismatch")
    for i, e in enumerate(edges):
        u, v = g.graph.edges[e]
        if {u, v} != {verts[i], verts[i + 1]} and not (u == v == verts[i] == verts[i + 1]):
            raise AssertionError("edge does not join consecutive walk vertices")


# ---------------------------------------------------------------------------
# kernel-class sums: empirical, exact-in-lambda, and in expectation


def _kernel_labelings(pi: MultiPartition, n: int, map_guard: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All per-string injective block labelings realizing the kernels."""
    counts = [math.perm(n, p.num_blocks) for p in pi.parts]
    total = math.prod(counts)
    if total > map_guard:
        raise GuardExceeded(f"kernel labeling count {total} exceeds map guard {map_guard}")
    pools = [itertools.permutations(range(n), p.num_blocks) for p in pi.parts]
    return itertools.product(*pools)


def _encode_vertices(pi: MultiPartition, labeling, n: int, nv: int) -> list[int]:
    codes = [0] * nv
    for vals, part in zip(labeling, pi.parts):
        for v in range(nv):
            codes[v] = codes[v] * n + vals[part.block_index(v)]
    return codes


def lambda_value(t: LoopedTestGraph, pi: MultiPartition, n: int, map_guard: int = MAP_GUARD):
    """Normalized sum of the vertex-label products over labelings whose
    per-string kernels are exactly pi."""
    nv = t.base.digraph.vertex_count
    denom = n ** sum(p.num_blocks for p in pi.parts)
    if any(p.num_blocks > n for p in pi.parts):
        return Fraction(0)
    if all(_is_ones(vec) for vec in t.vertex_labels):
        num = math.prod(math.perm(n, p.num_blocks) for p in pi.parts)
        return Fraction(num, denom)
    vecs, exact = _as_exact_or_complex(list(t.vertex_labels))
    total = 0
    for labeling in _kernel_labelings(pi, n, map_guard):
        codes = _encode_vertices(pi, labeling, n, nv)
        term = 1
        for v in range(nv):
            term = term * vecs[v][codes[v]]
        total = total + term
    if exact:
        return Fraction(int(total), denom) if isinstance(total, (int, np.integer)) else Fraction(total, denom)
    return complex(total) / denom


def _is_ones(vec: np.ndarray) -> bool:
    return vec.dtype != object and np.issubdtype(vec.dtype, np.integer) and bool(np.all(vec == 1))


def gamma_empirical(
    t: LoopedTestGraph,
    pi: MultiPartition,
    sigmas: dict[str, Permutation],
    n: int,
    map_guard: int = MAP_GUARD,
):
    """The kernel-class contribution to the looped trace for one concrete
    draw of the color permutations: sums only labelings whose per-string
    kernels equal pi."""
    base = t.base
    nv = base.digraph.vertex_count
    space = base.full_space(n)
    if any(p.num_blocks > n for p in pi.parts):
        return Fraction(0)
    strings = space.strings
    # per-edge data: positions of support strings, conjugating permutation
    edge_data = []
    for c, lab in zip(base.edge_colors, base.labels):
        sup = lab.support
        sub = MultiIndexSpace(sup, n)
        off_support = [i for i, s in enumerate(strings) if s not in set(sup)]
        sup_pos = [strings.index(s) for s in sup]
        edge_data.append((sigmas[c], lab, sub, off_support, sup_pos))
    vecs, exact_loops = _as_exact_or_complex(list(t.vertex_labels))
    exact = exact_loops and all(lab.is_exact() for lab in base.labels)
    total = 0
    for labeling in _kernel_labelings(pi, n, map_guard):
        digits = [
            [vals[part.block_index(v)] for vals, part in zip(labeling, pi.parts)]
            for v in range(nv)
        ]
        # digits[v][k] = value of string k at vertex v (strings sorted)
        term = 1
        for v in range(nv):
            code = 0
            for d in digits[v]:
                code = code * n + d
            term = term * vecs[v][code]
            if term == 0:
                break
        if term == 0:
            continue
        ok = True
        for (src, dst), (sigma, lab, sub, off_support, sup_pos) in zip(base.digraph.edges, edge_data):
            for k in off_support:
                if digits[src][k] != digits[dst][k]:
                    ok = False
                    break
            if not ok:
                break
            row = sub.encode([digits[dst][k] for k in sup_pos])
            col = sub.encode([digits[src][k] for k in sup_pos])
            entry = lab.entries[sigma(row), sigma(col)]
            if entry == 0:
                ok = False
                break
            term = term * entry
        if ok:
            total = total + term
    if exact:
        return Fraction(int(total), space.total_dim) if isinstance(total, (int, np.integer)) else Fraction(total, space.total_dim)
    return complex(total) / space.total_dim


def gamma_expected_formula(
    t: LoopedTestGraph,
    pi: MultiPartition,
    n: int,
    map_guard: int = MAP_GUARD,
):
    """Exact expectation of the kernel-class sum over the uniform draws,
    valid for connected graphs and kernels above every rho_s: a power of N
    times the vertex-label sum times one factorial-weighted injective sum
    per color."""
    base = t.base
    if weak_components(base.digraph).num_blocks != 1:
        raise ValueError("graph must be weakly connected")
    rhos = all_rho(base)
    for s, part in pi.items():
        if not rhos.part(s).refines(part):
            raise ValueError(f"pi_{s} is not above rho_{s}")
    lam = lambda_value(t, pi, n, map_guard)
    if lam == 0:
        return Fraction(0) if isinstance(lam, Fraction) else 0.0
    exponent = sum(p.num_blocks - 1 for p in pi.parts)
    prefactor = Fraction(n) ** exponent
    out = prefactor * lam
    for c in sorted(set(base.edge_colors)):
        q = color_quotient(base, pi, c)
        d_c = n ** len(base.assignment.strings_of(c))
        v_c = q.partition.num_blocks
        if v_c > d_c:
            return Fraction(0) if isinstance(lam, Fraction) else 0.0
        raw_inj = raw_injective_graph_sum(
            q.digraph, [lab.entries for lab in q.labels], d_c, None, map_guard
        )
        factor = Fraction(1, math.perm(d_c, v_c)) if isinstance(raw_inj, (int, Fraction)) else 1.0 / math.perm(d_c, v_c)
        out = out * factor * raw_inj
    return out


def color_injective_trace(t: TestGraph, pi: MultiPartition, c: str, n: int, map_guard: int = MAP_GUARD):
    """Normalized injective trace of the c-colored quotient, over the color's
    own string block."""
    q = color_quotient(t, pi, c)
    d_c = n ** len(t.assignment.strings_of(c))
    raw = raw_injective_graph_sum(q.digraph, [lab.entries for lab in q.labels], d_c, None, map_guard)
    comps = q.components().num_blocks
    return _normalize(raw, d_c, comps)


# ---------------------------------------------------------------------------
# growth exponents and surviving kernel classes


def growth_exponent(t: TestGraph, pi: MultiPartition) -> tuple[Fraction, dict[str, Fraction]]:
    """The power of N carried by a kernel class: per string, the block count
    minus one plus, over the string's colors, half the bridge-forest leaf
    count minus the vertex count of the colored quotient.  Nonpositive on
    two-edge-connected graphs, zero exactly when every colored-component
    graph is a tree."""
    rhos = all_rho(t)
    for s, part in pi.items():
        if not rhos.part(s).refines(part):
            raise ValueError(f"pi_{s} is not above rho_{s}")
    per_string: dict[str, Fraction] = {}
    for s in t.assignment.sorted_strings():
        term = Fraction(pi.part(s).num_blocks - 1)
        for c in sorted(t.assignment.colors_of(s)):
            q = color_quotient(t, pi, c)
            dec = q.decomposition()
            term += Fraction(dec.leaf_count, 2) - q.partition.num_blocks
        per_string[s] = term
    return sum(per_string.values(), Fraction(0)), per_string


def enumerate_admissible(
    t: TestGraph, partition_guard: int = PARTITION_GUARD
) -> Iterator[MultiPartition]:
    """All kernel tuples lying above every minimal kernel rho_s."""
    rhos = all_rho(t)
    strings = t.assignment.sorted_strings()
    total = math.prod(bell_number(rhos.part(s).num_blocks) for s in strings)
    if total > partition_guard:
        raise GuardExceeded(f"partition tuple count {total} exceeds guard {partition_guard}")
    pools = [list(enumerate_partitions(t.digraph.vertex_count, rhos.part(s))) for s in strings]
    for combo in itertools.product(*pools):
        yield MultiPartition(strings, tuple(combo))


def all_gcc_trees(t: TestGraph, pi: MultiPartition) -> bool:
    return all(gcc(t, pi, s).is_tree() for s in t.assignment.sorted_strings())


def enumerate_tree_partitions(
    t: TestGraph, partition_guard: int = PARTITION_GUARD
) -> Iterator[MultiPartition]:
    """Admissible kernel tuples whose colored-component graphs are all trees.

    Enumerates string by string and discards a prefix as soon as some string's
    tree test is already decided and fails; the test for string s only needs
    the partitions of the strings sharing a color with s.
    """
    rhos = all_rho(t)
    strings = t.assignment.sorted_strings()
    total = math.prod(bell_number(rhos.part(s).num_blocks) for s in strings)
    if total > partition_guard:
        raise GuardExceeded(f"partition tuple count {total} exceeds guard {partition_guard}")
    deps = {}
    for s in strings:
        need = set()
        for c in t.assignment.colors_of(s):
            need |= set(t.assignment.strings_of(c))
        deps[s] = max(strings.index(x) for x in need)
    check_at: dict[int, list[str]] = {}
    for s in strings:
        check_at.setdefault(deps[s], []).append(s)
    pools = [list(enumerate_partitions(t.digraph.vertex_count, rhos.part(s))) for s in strings]

    def rec(level: int, chosen: list[Partition]):
        if level == len(strings):
            yield MultiPartition(strings, tuple(chosen))
            return
        for part in pools[level]:
            chosen.append(part)
            pi = _partial_multipartition(strings, chosen)
            if all(gcc(t, pi, s).is_tree() for s in check_at.get(level, [])):
                yield from rec(level + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def _partial_multipartition(strings, chosen):
    # pad with singleton placeholders; only used for strings whose GCC
    # does not depend on the missing entries
    nv = chosen[0].ground_size
    parts = list(chosen) + [Partition.singletons(nv)] * (len(strings) - len(chosen))
    return MultiPartition(tuple(strings), tuple(parts))


def expected_trace_leading_terms(
    t: LoopedTestGraph,
    n: int,
    partition_guard: int = PARTITION_GUARD,
    map_guard: int = MAP_GUARD,
):
    """Sum, over kernel tuples whose colored-component graphs are all trees,
    of the vertex-label sum times the product of normalized injective traces
    of the colored quotients; the surviving part of the expected looped trace
    as N grows.  Returns (value, list of (pi, term))."""
    base = t.base
    if not _is_two_edge_connected(base.digraph):
        raise ValueError("graph must be two-edge connected")
    terms = []
    total = Fraction(0)
    for pi in enumerate_tree_partitions(base, partition_guard):
        term = lambda_value(t, pi, n, map_guard)
        for c in sorted(set(base.edge_colors)):
            if term == 0:
                break
            term = term * color_injective_trace(base, pi, c, n, map_guard)
        if term != 0:
            terms.append((pi, term))
            total = total + term
    return total, terms


def expected_trace_full_sum(
    t: LoopedTestGraph,
    n: int,
    partition_guard: int = PARTITION_GUARD,
    map_guard: int = MAP_GUARD,
):
    """Exact expected looped trace: the expectation formula summed over every
    admissible kernel tuple."""
    total = Fraction(0)
    for pi in enumerate_admissible(t.base, partition_guard):
        total = total + gamma_expected_formula(t, pi, n, map_guard)
    return total


def _is_two_edge_connected(g: DiGraph) -> bool:
    dec = two_edge_decompose(g)
    return not dec.cut_edges and weak_components(g).num_blocks == 1
