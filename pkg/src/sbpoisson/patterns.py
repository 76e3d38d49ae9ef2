"""Small fixed pattern graphs and their exact combinatorics.

Covers automorphism counts, density and strict balancedness, the exponents
governing approximation rates, copy enumeration in complete graphs, and
overlap tables classifying ordered pairs of copies by shared-edge count and
merged-vertex count.  Everything here is exact, desk-scale enumeration.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

from .errors import ParameterError, ResourceError

Edge = tuple[int, int]

AUTOMORPHISM_VERTEX_CAP = 10
OVERLAP_VERTEX_CAP = 12
COPY_ENUMERATION_CAP = 12
SUBGRAPH_EDGE_CAP = 20


@dataclass(frozen=True)
class PatternGraph:
    """A simple graph on vertices 0..v-1 with no isolated vertices."""

    v: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.v <= 0:
            raise ParameterError("pattern needs at least one vertex")
        if not self.edges:
            raise ParameterError("pattern needs at least one edge")
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < b < self.v):
                raise ParameterError(f"bad edge ({a},{b}) for v={self.v}")
            seen.add(a)
            seen.add(b)
        if seen != set(range(self.v)):
            raise ParameterError("pattern has isolated vertices")

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def density(self) -> float:
        return self.e / self.v

    def __repr__(self) -> str:
        return f"PatternGraph(v={self.v}, edges={sorted(self.edges)})"


def _norm_edges(pairs) -> frozenset[Edge]:
    return frozenset((min(a, b), max(a, b)) for a, b in pairs)


def single_edge() -> PatternGraph:
    return PatternGraph(2, _norm_edges([(0, 1)]))


def path_graph(k_edges: int) -> PatternGraph:
    """Path with k edges (k+1 vertices)."""
    if k_edges < 1:
        raise ParameterError("path needs at least one edge")
    return PatternGraph(k_edges + 1, _norm_edges((i, i + 1) for i in range(k_edges)))


def cycle_graph(k: int) -> PatternGraph:
    if k < 3:
        raise ParameterError("cycle needs at least 3 vertices")
    return PatternGraph(k, _norm_edges((i, (i + 1) % k) for i in range(k)))


def complete_graph(k: int) -> PatternGraph:
    if k < 2:
        raise ParameterError("complete graph needs at least 2 vertices")
    return PatternGraph(k, _norm_edges(itertools.combinations(range(k), 2)))


def star_graph(k_leaves: int) -> PatternGraph:
    if k_leaves < 1:
        raise ParameterError("star needs at least one leaf")
    return PatternGraph(k_leaves + 1, _norm_edges((0, i + 1) for i in range(k_leaves)))


_EDGELIST_RE = re.compile(r"^\s*v\s*=\s*(\d+)\s*;\s*edges\s*=\s*(.+)$")


def parse_pattern(text: str) -> PatternGraph:
    """Parse a named builtin or an explicit 1-indexed edge-list specification.

    Builtins: ``edge``, ``triangle``, ``path_k``, ``cycle_k``, ``complete_k``,
    ``star_k``.  Edge lists look like ``v=5; edges=1-2,2-3,3-4,4-5,5-1``.
    """
    name = text.strip().lower()
    if name == "edge":
        return single_edge()
    if name == "triangle":
        return cycle_graph(3)
    m = re.fullmatch(r"(path|cycle|complete|star)_(\d+)", name)
    if m:
        kind, k = m.group(1), int(m.group(2))
        builder = {
            "path": path_graph,
            "cycle": cycle_graph,
            "complete": complete_graph,
            "star": star_graph,
        }[kind]
        return builder(k)
    m = _EDGELIST_RE.match(text.strip())
    if m:
        v = int(m.group(1))
        edges = []
        for chunk in m.group(2).split(","):
            ends = chunk.strip().split("-")
            if len(ends) != 2:
                raise ParameterError(f"malformed edge {chunk!r}")
            try:
                a, b = int(ends[0]), int(ends[1])
            except ValueError as exc:
                raise ParameterError(f"malformed edge {chunk!r}") from exc
            if a == b:
                raise ParameterError(f"loop edge {chunk!r}")
            edges.append((a - 1, b - 1))
        return PatternGraph(v, _norm_edges(edges))
    raise ParameterError(f"unrecognized pattern specification {text!r}")


def parse_pattern_list(text: str) -> tuple[PatternGraph, ...]:
    return tuple(parse_pattern(part) for part in text.split(",") if part.strip())


def automorphism_count(H: PatternGraph) -> int:
    """Exact automorphism-group size by enumeration over vertex permutations."""
    if H.v > AUTOMORPHISM_VERTEX_CAP:
        raise ResourceError(f"automorphism enumeration capped at v={AUTOMORPHISM_VERTEX_CAP}")
    count = 0
    for perm in itertools.permutations(range(H.v)):
        if all((min(perm[a], perm[b]), max(perm[a], perm[b])) in H.edges for a, b in H.edges):
            count += 1
    return count


@lru_cache(maxsize=None)
def labeled_copies(H: PatternGraph) -> tuple[frozenset[Edge], ...]:
    """All distinct edge sets on vertex labels 0..v-1 isomorphic to H.

    There are exactly v!/a_H of them.
    """
    if H.v > AUTOMORPHISM_VERTEX_CAP:
        raise ResourceError(f"copy enumeration capped at v={AUTOMORPHISM_VERTEX_CAP}")
    out = set()
    for perm in itertools.permutations(range(H.v)):
        out.add(_norm_edges((perm[a], perm[b]) for a, b in H.edges))
    return tuple(sorted(out, key=sorted))


def are_isomorphic(H1: PatternGraph, H2: PatternGraph) -> bool:
    if H1.v != H2.v or H1.e != H2.e:
        return False
    return H2.edges in labeled_copies(H1)


def _relabel(copy: frozenset[Edge], vertices) -> frozenset[Edge]:
    vs = list(vertices)
    return _norm_edges((vs[a], vs[b]) for a, b in copy)


def enumerate_copies(H: PatternGraph, n: int, cap: int = COPY_ENUMERATION_CAP):
    """All copies (edge subsets) of H in the complete graph K_n."""
    if n > cap:
        raise ResourceError(f"copy enumeration in K_n capped at n={cap}")
    base = labeled_copies(H)
    out = []
    for subset in itertools.combinations(range(n), H.v):
        for copy in base:
            out.append(_relabel(copy, subset))
    return out


def copy_count(H: PatternGraph, n: int) -> int:
    """|Gamma_H| = C(n, v) * v!/a in K_n, without materializing the copies."""
    return comb(n, H.v) * (factorial(H.v) // automorphism_count(H))


def _incident(edges) -> set[int]:
    out: set[int] = set()
    for a, b in edges:
        out.add(a)
        out.add(b)
    return out


def proper_edge_subgraphs(H: PatternGraph):
    """Yield (edge subset, incident vertex count) over proper subgraphs with e > 0.

    Subgraphs are taken on the vertices incident to the chosen edges; adding
    isolated vertices only lowers the density and raises the rate exponent, so
    these representatives suffice for both balance and gamma computations.
    """
    if H.e > SUBGRAPH_EDGE_CAP:
        raise ResourceError(f"subgraph enumeration capped at e={SUBGRAPH_EDGE_CAP}")
    edges = sorted(H.edges)
    for r in range(1, H.e):
        for subset in itertools.combinations(edges, r):
            yield subset, len(_incident(subset))


def density_and_balance(H: PatternGraph):
    """Density, strict-balancedness flag, and a densest proper subgraph witness."""
    best = None  # (density, edge subset, vertex count)
    for subset, nv in proper_edge_subgraphs(H):
        dens = len(subset) / nv
        if best is None or dens > best[0]:
            best = (dens, subset, nv)
    if best is None:
        # Single-edge pattern: no proper subgraph with an edge.
        return H.density, True, None
    relabel = {old: new for new, old in enumerate(sorted(_incident(best[1])))}
    witness = PatternGraph(best[2], _norm_edges((relabel[a], relabel[b]) for a, b in best[1]))
    return H.density, best[0] < H.density, witness


def is_strictly_balanced(H: PatternGraph) -> bool:
    return density_and_balance(H)[1]


@dataclass(frozen=True)
class OverlapTable:
    """Counts of ordered copy pairs classified by shared edges and merged vertices.

    ``entries[(k, s)]`` counts ordered pairs (alpha, beta) of copies of the two
    patterns placed on s labeled vertices, with union spanning all s vertices
    and exactly k shared edges.  ``ell`` maps each feasible k >= 1 to the
    minimum number of vertices incident to the shared edges.  For a self pair
    the identical pair (alpha, alpha) is stored at (e_H, v_H).
    """

    pattern_i: PatternGraph
    pattern_j: PatternGraph
    entries: dict[tuple[int, int], int]
    ell: dict[int, int]
    identical_k: int | None  # e_H for self pairs, else None

    def total_pairs(self, n: int) -> int:
        """Sum of N_{k,s} * C(n, s); must equal |Gamma_i| * |Gamma_j|."""
        return sum(cnt * comb(n, s) for (k, s), cnt in self.entries.items())


def overlap_table(H_i: PatternGraph, H_j: PatternGraph, cap: int = OVERLAP_VERTEX_CAP) -> OverlapTable:
    """Exact overlap classification of ordered pairs of copies of H_i and H_j.

    For each merged vertex count s the first copy is pinned to a canonical
    placement; all spanning pairs arise from it by symmetry, so the pair count
    is the partner count times the number of copies of H_i on s vertices.
    """
    vi, vj = H_i.v, H_j.v
    if vi + vj > cap:
        raise ResourceError(f"overlap enumeration capped at v_i+v_j={cap}")
    self_pair = are_isomorphic(H_i, H_j)
    alpha = labeled_copies(H_i)[0]  # canonical copy on vertices 0..vi-1
    base_j = labeled_copies(H_j)
    entries: dict[tuple[int, int], int] = {}
    ell: dict[int, int] = {}
    for s in range(max(vi, vj), vi + vj + 1):
        n_alpha = comb(s, vi) * len(labeled_copies(H_i))
        outside = tuple(range(vi, s))
        t = vj - (s - vi)  # vertices of beta that fall inside alpha
        for inside in itertools.combinations(range(vi), t):
            vset = inside + outside
            for copy in base_j:
                beta = _relabel(copy, vset)
                shared = beta & alpha
                k = len(shared)
                key = (k, s)
                entries[key] = entries.get(key, 0) + n_alpha
                if k >= 1:
                    nv = len(_incident(shared))
                    if k not in ell or nv < ell[k]:
                        ell[k] = nv
    identical_k = H_i.e if self_pair else None
    return OverlapTable(H_i, H_j, entries, ell, identical_k)


@dataclass(frozen=True)
class SharedEdgeStats:
    """Maximum shared edges, minimum incident vertices per count, feasible counts."""

    M: int
    ell: dict[int, int]  # k -> minimum vertices incident to k shared edges; 0 if infeasible
    K: frozenset[int]
    includes_identical: bool


def shared_edge_stats(
    H_i: PatternGraph,
    H_j: PatternGraph,
    include_identical: bool = False,
    table: OverlapTable | None = None,
) -> SharedEdgeStats:
    """Shared-edge statistics for a pattern pair, from its overlap table.

    For a self pair the identical pair (alpha, alpha) is excluded by default;
    ``include_identical=True`` keeps its shared-edge count e_H in K.
    """
    if table is None:
        table = overlap_table(H_i, H_j)
    drop = None
    if table.identical_k is not None and not include_identical:
        # Two distinct copies sharing all e_H edges would coincide (no isolated
        # vertices), so k = e_H arises only from the identical pair.
        drop = table.identical_k
    feasible = {k for k in table.ell if k != drop}
    m = max(feasible, default=0)
    ell = {k: (table.ell[k] if k in feasible else 0) for k in range(1, m + 1)}
    return SharedEdgeStats(m, ell, frozenset(feasible), include_identical)


@dataclass(frozen=True)
class GammaEta:
    """Rate exponents of a pattern at a given density scaling alpha."""

    gamma_subgraph: float
    gamma_overlap: float  # over proper overlaps only (k < e_H)
    gamma_overlap_full: float  # including the identical-pair count k = e_H
    eta: float


def gamma_eta(H: PatternGraph, alpha: float) -> GammaEta:
    """Exponents min{v' - e'/alpha} over subgraphs / overlaps, and the vanishing rate."""
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    gamma_sub = min(
        (nv - len(sub) / alpha for sub, nv in proper_edge_subgraphs(H)),
        default=H.v - H.e / alpha,
    )
    table = overlap_table(H, H)
    proper = shared_edge_stats(H, H, include_identical=False, table=table)
    full = shared_edge_stats(H, H, include_identical=True, table=table)
    gamma_overlap = min((proper.ell[k] - k / alpha for k in proper.K), default=float("inf"))
    gamma_full = min(full.ell[k] - k / alpha for k in full.K)
    eta = H.v * (H.density / alpha - 1.0)
    return GammaEta(gamma_sub, gamma_overlap, gamma_full, eta)
