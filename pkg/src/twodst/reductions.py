"""Reductions between problem variants.

* pairwise 2-edge-connectivity on a terminal set via two rooted solves
  (out-rooted plus in-rooted on the reversed graph), union of results;
* vertex connectivity via vertex splitting (each v becomes v_in -> v_out
  with a zero-cost internal edge), which turns internally-vertex-disjoint
  paths into edge-disjoint ones;
* pairwise 2-vertex-connectivity via a two-vertex root gadget plus
  min-cost two-disjoint-path sets between the gadget pair.

A `solver` argument is any callable DstInstance -> SolutionSubgraph that
raises InfeasibleInstanceError when no feasible subgraph exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import InfeasibleInstanceError, ModelInconsistencyError
from .graph import DirectedMultigraph, DstInstance, max_flow_unit
from .solution import SolutionSubgraph

Solver = Callable[[DstInstance], SolutionSubgraph]


@dataclass(frozen=True)
class DssInstance:
    """Pairwise variant: every ordered terminal pair needs two disjoint paths."""

    graph: DirectedMultigraph
    terminals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        if len(self.terminals) < 2:
            raise ValueError("pairwise connectivity needs at least 2 terminals")
        missing = self.terminals - self.graph.vertices
        if missing:
            raise ValueError(f"terminals not in graph: {sorted(missing, key=str)}")

    def sorted_terminals(self) -> list:
        return sorted(self.terminals)


@dataclass(frozen=True)
class SplitMap:
    """Bookkeeping for a vertex-split graph.

    Original edge ids are preserved (0..m-1); internal edges occupy
    m..m+n-1 and all cost 0.
    """

    vertex_copies: Mapping[object, tuple]  # v -> ((v,"in"), (v,"out"))
    edge_map: Mapping[int, int]  # original edge id -> split edge id
    internal_edges: frozenset  # split edge ids of the zero-cost v_in->v_out edges

    def in_copy(self, v):
        return self.vertex_copies[v][0]

    def out_copy(self, v):
        return self.vertex_copies[v][1]

    def to_original_edges(self, split_edge_ids: Iterable[int]) -> frozenset:
        """Drop internal edges and map the rest back to original ids."""
        inverse = {se: e for e, se in self.edge_map.items()}
        return frozenset(
            inverse[se] for se in split_edge_ids if se not in self.internal_edges
        )


def vertex_split(graph: DirectedMultigraph) -> tuple[DirectedMultigraph, SplitMap]:
    """Split every vertex v into (v, "in") -> (v, "out") with a free edge.

    Original edges keep their ids and run (tail, "out") -> (head, "in"),
    so k edge-disjoint (s,"out") -> (t,"in") paths in the split graph
    correspond to k internally-vertex-disjoint s -> t paths.
    """
    vertices = []
    copies = {}
    for v in graph.vertices:
        vin, vout = (v, "in"), (v, "out")
        copies[v] = (vin, vout)
        vertices.extend((vin, vout))
    edges = [
        ((graph.tails[e], "out"), (graph.heads[e], "in"), graph.costs[e])
        for e in range(graph.num_edges)
    ]
    internal = []
    for v in sorted(graph.vertices, key=str):
        internal.append(len(edges))
        edges.append(((v, "in"), (v, "out"), 0.0))
    split = DirectedMultigraph(vertices, edges)
    smap = SplitMap(
        vertex_copies=copies,
        edge_map={e: e for e in range(graph.num_edges)},
        internal_edges=frozenset(internal),
    )
    return split, smap


def dss_via_dst(instance: DssInstance, solver: Solver) -> SolutionSubgraph:
    """Pairwise 2-edge-connectivity from two rooted solves.

    Roots at the smallest terminal, solves the out-rooted problem on G and
    the in-rooted one on the reversed graph, and returns the union. Edge
    ids survive reversal unchanged, so the union is a plain set union.
    """
    g = instance.graph
    terminals = instance.sorted_terminals()
    root = terminals[0]
    others = frozenset(terminals[1:])

    out_sol = solver(DstInstance(g, root, others))
    in_sol = solver(DstInstance(g.reversed(), root, others))

    union = out_sol.edges | in_sol.edges
    _check_pairwise(g, union, instance.terminals)
    return SolutionSubgraph.from_edges(
        g,
        union,
        meta={
            "out_rooted_cost": out_sol.cost,
            "in_rooted_cost": in_sol.cost,
            "root": root,
        },
    )


def _check_pairwise(graph, edge_ids, terminals, required=2) -> None:
    for s in sorted(terminals):
        for t in sorted(terminals):
            if s == t:
                continue
            value, _ = max_flow_unit(graph, s, t, restrict_to=edge_ids)
            if value < required:
                raise ModelInconsistencyError(
                    f"union solution carries only {value} disjoint paths "
                    f"from {s!r} to {t!r}"
                )


def solve_vertex_2dst(instance: DstInstance, solver: Solver) -> SolutionSubgraph:
    """Vertex-connectivity via the split graph; result in original edges."""
    g = instance.graph
    split, smap = vertex_split(g)
    root = smap.out_copy(instance.root)
    terminals = frozenset(smap.in_copy(t) for t in instance.terminals)

    for t in sorted(instance.terminals):
        value, _ = max_flow_unit(split, root, smap.in_copy(t))
        if value < 2:
            raise InfeasibleInstanceError(
                f"no two internally-vertex-disjoint paths from "
                f"{instance.root!r} to {t!r} (split flow {value})"
            )

    split_sol = solver(DstInstance(split, root, terminals))
    check_edges = set(split_sol.edges) | smap.internal_edges
    for t in sorted(instance.terminals):
        value, _ = max_flow_unit(split, root, smap.in_copy(t), restrict_to=check_edges)
        if value < 2:
            raise ModelInconsistencyError(
                f"split solution carries only {value} disjoint paths to {t!r}"
            )
    original = smap.to_original_edges(split_sol.edges)
    return SolutionSubgraph.from_edges(
        g, original, meta={"split_cost": split_sol.cost}
    )


def _fresh_vertex(vertices):
    vs = set(vertices)
    if vs and all(isinstance(v, int) for v in vs):
        return max(vs) + 1
    name = "__root__"
    while name in vs:
        name += "_"
    return name


def _disjoint_pair_cost(graph: DirectedMultigraph, source, target):
    """Cheapest union of two edge-disjoint, internally-vertex-disjoint
    source -> target paths, by exhaustive enumeration. Returns
    (cost, edge set) or (None, None). Exponential; fine at desk scale.
    """
    paths: list[tuple[tuple[int, ...], frozenset]] = []

    def extend(v, used_vertices, edge_seq):
        if v == target:
            inner = frozenset(used_vertices) - {source, target}
            paths.append((tuple(edge_seq), inner))
            return
        for e in graph.out_edges(v):
            w = graph.heads[e]
            if w in used_vertices or (w == source):
                continue
            used_vertices.add(w)
            edge_seq.append(e)
            extend(w, used_vertices, edge_seq)
            edge_seq.pop()
            used_vertices.remove(w)

    extend(source, {source}, [])
    best_cost, best_set = None, None
    for i, (p1, inner1) in enumerate(paths):
        for p2, inner2 in paths[i + 1 :]:
            if inner1 & inner2 or set(p1) & set(p2):
                continue
            union = frozenset(p1) | frozenset(p2)
            cost = graph.total_cost(union)
            if best_cost is None or cost < best_cost:
                best_cost, best_set = cost, union
    return best_cost, best_set


def dss_vertex_via_dst(instance: DssInstance, solver: Solver) -> SolutionSubgraph:
    """Pairwise 2-vertex-connectivity on the terminal set.

    Picks a two-vertex gadget R from the terminals, buys a cheapest pair
    of internally-vertex-disjoint paths in both directions between them,
    attaches an auxiliary root joined to R by free edges, and solves the
    vertex version of the rooted problem in both orientations on the
    remaining terminals. The union of all parts is returned after a
    pairwise split-flow check.
    """
    g = instance.graph
    terminals = instance.sorted_terminals()
    r1, r2 = terminals[0], terminals[1]
    rest = frozenset(terminals[2:])

    chosen: set[int] = set()
    for s, t in ((r1, r2), (r2, r1)):
        cost, edge_set = _disjoint_pair_cost(g, s, t)
        if edge_set is None:
            raise InfeasibleInstanceError(
                f"no two internally-vertex-disjoint paths from {s!r} to {t!r}"
            )
        chosen |= edge_set
    flow_cost = g.total_cost(chosen)

    sub_costs = []
    if rest:
        aux = _fresh_vertex(g.vertices)
        for forward in (True, False):
            base = g if forward else g.reversed()
            aux_edges = [(base.tails[e], base.heads[e], base.costs[e]) for e in range(base.num_edges)]
            aux_edges.append((aux, r1, 0.0))
            aux_edges.append((aux, r2, 0.0))
            aug = DirectedMultigraph(set(base.vertices) | {aux}, aux_edges)
            sol = solve_vertex_2dst(DstInstance(aug, aux, rest), solver)
            # ids 0..m-1 are the original edges; the two aux edges come after
            chosen |= {e for e in sol.edges if e < g.num_edges}
            sub_costs.append(sol.cost)

    split, smap = vertex_split(g)
    check_edges = {smap.edge_map[e] for e in chosen} | smap.internal_edges
    for s in terminals:
        for t in terminals:
            if s == t:
                continue
            value, _ = max_flow_unit(
                split, smap.out_copy(s), smap.in_copy(t), restrict_to=check_edges
            )
            if value < 2:
                raise ModelInconsistencyError(
                    f"union carries only {value} vertex-disjoint paths "
                    f"from {s!r} to {t!r}"
                )
    return SolutionSubgraph.from_edges(
        g,
        chosen,
        meta={"gadget_pair_cost": flow_cost, "sub_costs": sub_costs, "gadget": [r1, r2]},
    )
