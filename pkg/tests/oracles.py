"""Slow, independent reference implementations used to check the fast code.

Everything here is exhaustive enumeration. Keep instances tiny (m <= 12 or
so) when calling these from tests.
"""

from __future__ import annotations

from itertools import combinations

from twodst.graph import DirectedMultigraph


def enumerate_simple_paths(graph: DirectedMultigraph, source, target) -> list[tuple[int, ...]]:
    """All simple directed paths source -> target, as edge id tuples."""
    paths: list[tuple[int, ...]] = []

    def extend(v, used_vertices, edge_seq):
        if v == target:
            paths.append(tuple(edge_seq))
            return
        for e in graph.out_edges(v):
            w = graph.heads[e]
            if w in used_vertices:
                continue
            used_vertices.add(w)
            edge_seq.append(e)
            extend(w, used_vertices, edge_seq)
            edge_seq.pop()
            used_vertices.remove(w)

    extend(source, {source}, [])
    return paths


def path_packing_number(graph: DirectedMultigraph, source, target) -> int:
    """Max number of pairwise edge-disjoint source -> target paths.

    Any family of edge-disjoint walks shortcuts to the same number of
    edge-disjoint simple paths, so enumerating simple paths is enough.
    Recursive branch and bound over the path list with a seen-state cache.
    """
    if source == target:
        raise ValueError("source and sink must differ")
    paths = enumerate_simple_paths(graph, source, target)
    masks = [sum(1 << e for e in p) for p in paths]
    best = 0
    cache: set[tuple[int, int]] = set()

    def search(i: int, used: int, count: int):
        nonlocal best
        if count > best:
            best = count
        if i == len(masks) or count + (len(masks) - i) <= best:
            return
        key = (i, used)
        if key in cache:
            return
        cache.add(key)
        for j in range(i, len(masks)):
            if masks[j] & used == 0:
                search(j + 1, used | masks[j], count + 1)

    search(0, 0, 0)
    return best


def has_two_disjoint_paths(graph: DirectedMultigraph, source, target, allowed=None) -> bool:
    """True iff two edge-disjoint source -> target paths exist.

    If two disjoint simple paths P1, P2 exist then enumerating P1 over all
    simple paths will find one whose removal still leaves target reachable
    (via P2), so this is exact, not a heuristic.
    """
    if allowed is None:
        allowed = frozenset(range(graph.num_edges))
    else:
        allowed = frozenset(allowed)

    def reaches(avoid: frozenset) -> bool:
        usable = allowed - avoid
        seen = {source}
        stack = [source]
        while stack:
            u = stack.pop()
            if u == target:
                return True
            for e in graph.out_edges(u):
                if e in usable and graph.heads[e] not in seen:
                    seen.add(graph.heads[e])
                    stack.append(graph.heads[e])
        return target in seen

    for p in enumerate_simple_paths(graph, source, target):
        if all(e in allowed for e in p) and reaches(frozenset(p)):
            return True
    return False


def min_cut_size(graph: DirectedMultigraph, source, target, allowed=None) -> int:
    """Smallest number of allowed edges whose removal disconnects target."""
    if allowed is None:
        allowed = sorted(range(graph.num_edges))
    else:
        allowed = sorted(allowed)

    def reaches(removed: frozenset) -> bool:
        seen = {source}
        stack = [source]
        while stack:
            u = stack.pop()
            for e in graph.out_edges(u):
                if e in allowed and e not in removed and graph.heads[e] not in seen:
                    seen.add(graph.heads[e])
                    stack.append(graph.heads[e])
        return target in seen

    if not reaches(frozenset()):
        return 0
    for k in range(1, len(allowed) + 1):
        for combo in combinations(allowed, k):
            if not reaches(frozenset(combo)):
                return k
    return len(allowed)


def is_feasible_subset(graph: DirectedMultigraph, edge_ids, root, terminals) -> bool:
    """Does the edge subset carry two disjoint root -> t paths for every t."""
    edge_ids = frozenset(edge_ids)
    return all(has_two_disjoint_paths(graph, root, t, allowed=edge_ids) for t in terminals)


def brute_force_2dst(graph: DirectedMultigraph, root, terminals):
    """Optimal feasible edge subset by full enumeration. Exponential in m.

    Returns (cost, frozenset of edge ids) or (None, None) if infeasible.
    """
    m = graph.num_edges
    best_cost = None
    best_set = None
    for mask in range(1 << m):
        subset = frozenset(e for e in range(m) if mask >> e & 1)
        cost = graph.total_cost(subset)
        if best_cost is not None and cost >= best_cost:
            continue
        if is_feasible_subset(graph, subset, root, terminals):
            best_cost = cost
            best_set = subset
    return best_cost, best_set


def enumerate_label_sequences(vertices, root, depth) -> list[tuple]:
    """All distinct-vertex sequences starting at root, length <= depth+1.

    Includes the length-1 sequence (root,). Reference for tree sizes.
    """
    pool = sorted(set(vertices) - {root})
    out: list[tuple] = []

    def extend(seq):
        out.append(tuple(seq))
        if len(seq) == depth + 1:
            return
        for v in pool:
            if v not in seq:
                seq.append(v)
                extend(seq)
                seq.pop()

    extend([root])
    return out
