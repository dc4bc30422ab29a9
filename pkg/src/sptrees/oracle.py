"""Brute-force ground truth: exhaustive small-graph censuses.

Graphs on n labelled vertices are edge subsets of K_n stored as bitmasks
over the C(n,2) vertex pairs.  Spanning trees are counted exactly by the
matrix-tree theorem (integer Bareiss determinant of a Laplacian minor),
pole-separating 2-forests by the all-minors variant with both pole rows
and columns removed.  Series-parallel recognition reduces a multigraph
by deleting loops, collapsing parallel edges and dissolving vertices of
degree one or two; a connected multigraph admits no K4 minor exactly
when this reduction collapses it to a single vertex.

Censuses:

* connected / 2-connected / 2-tree SP graphs per (n, m), with count,
  sum of spanning-tree counts and sum of their squares;
* two-pole networks per (internal vertices, m) and kind, with the six
  weighted sums matching the network bundle flavours;
* weighted cubic SP multigraphs per excess k (compensation factor
  2^-l1 - l2 * 6^-l3 for l1 loops, l2 double and l3 triple edges).

Enumeration for n <= 7 iterates edge bitmasks directly.  For n = 8 the
two-connected and 2-tree censuses instead enumerate all 2-trees (edge
maximal SP graphs) and close downward under single-edge deletions that
keep 2-connectivity: every 2-connected SP graph on [n] extends inside
some 2-tree on [n], so the closure is exhaustive.  The n = 7 results of
both strategies are compared in the tests.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

# ---------------------------------------------------------------------------
# Pair indexing and bitmask helpers


def pair_index(i: int, j: int, n: int) -> int:
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def all_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def mask_edges(mask: int, pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    return [pairs[b] for b in range(mask.bit_length()) if mask >> b & 1]


def adjacency_from_mask(n: int, mask: int, pairs: list[tuple[int, int]]):
    adj = [0] * n
    b = 0
    while mask:
        if mask & 1:
            i, j = pairs[b]
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        mask >>= 1
        b += 1
    return adj


def is_connected_adj(adj: list[int], n: int, vertices_mask: int | None = None) -> bool:
    if vertices_mask is None:
        vertices_mask = (1 << n) - 1
    start = (vertices_mask & -vertices_mask).bit_length() - 1
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= adj[v]
        frontier = nxt & ~seen & vertices_mask
        seen |= frontier
    return seen == vertices_mask


def _connected_subset(adj: list[int], vertices_mask: int) -> bool:
    start = (vertices_mask & -vertices_mask).bit_length() - 1
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= adj[v]
        frontier = nxt & ~seen & vertices_mask
        seen |= frontier
    return seen & vertices_mask == vertices_mask


def is_biconnected(n: int, mask: int, pairs: list[tuple[int, int]]) -> bool:
    """2-connected in the convention where a single edge qualifies (n = 2).

    For n >= 3: spanning, connected, and no articulation vertex.
    """
    if n < 2:
        return False
    if n == 2:
        return mask != 0
    adj = adjacency_from_mask(n, mask, pairs)
    if any(a == 0 for a in adj):
        return False
    if not is_connected_adj(adj, n):
        return False
    allv = (1 << n) - 1
    for v in range(n):
        rest = allv ^ (1 << v)
        adj2 = [adj[u] & rest for u in range(n)]
        if not _connected_subset(adj2, rest):
            return False
    return True


# ---------------------------------------------------------------------------
# Multigraph reduction for series-parallel recognition


def is_series_parallel_multigraph(n: int, edges: list[tuple[int, int, int]]) -> bool:
    """True iff the connected multigraph has no K4 minor.

    ``edges`` are (u, v, multiplicity); u == v marks loops.  Reduction:
    drop loops, collapse parallel classes, delete degree-1 vertices,
    dissolve degree-2 vertices; no K4 minor iff a single vertex remains.
    """
    mult: dict[tuple[int, int], int] = {}
    for u, v, k in edges:
        if u == v or k <= 0:
            continue
        key = (u, v) if u < v else (v, u)
        mult[key] = 1  # parallel classes collapse immediately
    alive = set()
    for (u, v) in mult:
        alive.add(u)
        alive.add(v)
    if not alive:
        return True
    neigh: dict[int, set[int]] = {v: set() for v in alive}
    for (u, v) in mult:
        neigh[u].add(v)
        neigh[v].add(u)
    queue = [v for v in alive if len(neigh[v]) <= 2]
    while queue:
        v = queue.pop()
        if v not in neigh:
            continue
        deg = len(neigh[v])
        if deg > 2:
            continue
        if deg == 0:
            if len(neigh) > 1:
                del neigh[v]
            continue
        if deg == 1:
            (u,) = neigh[v]
            neigh[u].discard(v)
            del neigh[v]
            queue.append(u)
            continue
        u, w = neigh[v]
        neigh[u].discard(v)
        neigh[w].discard(v)
        del neigh[v]
        # dissolving may create a parallel pair; it collapses on the spot
        neigh[u].add(w)
        neigh[w].add(u)
        queue.append(u)
        queue.append(w)
    return len(neigh) <= 1


def is_series_parallel(n: int, mask: int, pairs: list[tuple[int, int]]) -> bool:
    """K4-minor-freeness of a simple graph given as an edge bitmask."""
    edges = [(i, j, 1) for (i, j) in mask_edges(mask, pairs)]
    return is_series_parallel_multigraph(n, edges)


# ---------------------------------------------------------------------------
# Exact determinants and spanning structure counts


def det_bareiss(m: list[list[int]]) -> int:
    """Fraction-free integer determinant."""
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pkk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pkk - aik * row_k[j]) // prev
        prev = pkk
    return sign * a[n - 1][n - 1]


def laplacian(n: int, edges: list[tuple[int, int, int]]) -> list[list[int]]:
    lap = [[0] * n for _ in range(n)]
    for u, v, k in edges:
        if u == v:
            continue
        lap[u][u] += k
        lap[v][v] += k
        lap[u][v] -= k
        lap[v][u] -= k
    return lap


def spanning_tree_count(n: int, edges: list[tuple[int, int, int]]) -> int:
    """Matrix-tree: determinant of the Laplacian with one row/column removed."""
    if n <= 1:
        return 1
    lap = laplacian(n, edges)
    minor = [row[1:] for row in lap[1:]]
    return det_bareiss(minor)


def pole_forest_count(n: int, edges: list[tuple[int, int, int]], s: int, t: int) -> int:
    """Spanning 2-forests with s and t in different components.

    All-minors matrix-tree: remove the rows and columns of both poles.
    """
    lap = laplacian(n, edges)
    keep = [v for v in range(n) if v not in (s, t)]
    minor = [[lap[i][j] for j in keep] for i in keep]
    return det_bareiss(minor)


def spanning_tree_count_mask(n: int, mask: int, pairs: list[tuple[int, int]]) -> int:
    return spanning_tree_count(n, [(i, j, 1) for (i, j) in mask_edges(mask, pairs)])


def spanning_count_by_deletion_contraction(n: int, edges: list[tuple[int, int]]) -> int:
    """Exponential-time recursion s(G) = s(G-e) + s(G/e); cross-check only."""
    edges = [(min(u, v), max(u, v)) for (u, v) in edges if u != v]
    if n == 1:
        return 1
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    if any(a == 0 for a in adj) or not is_connected_adj(adj, n):
        return 0
    u, v = edges[0]  # u < v, so u never needs relabelling below
    rest = edges[1:]
    deleted = spanning_count_by_deletion_contraction(n, rest)

    def relabel(w: int) -> int:
        if w == v:
            return u
        if w == n - 1:
            return v
        return w

    contracted = []
    for a, b in rest:
        a2, b2 = relabel(a), relabel(b)
        if a2 != b2:
            contracted.append((a2, b2))
    return deleted + spanning_count_by_deletion_contraction(n - 1, contracted)


# ---------------------------------------------------------------------------
# Census rows


@dataclass(frozen=True)
class CensusRow:
    class_id: str
    n: int
    m: int
    count: int
    sum_trees: int
    sum_trees_sq: int


@dataclass(frozen=True)
class NetworkCensusRow:
    n_internal: int
    m: int
    kind: str  # trivial | series | parallel
    count: int
    sum_trees: int
    sum_forests: int
    sum_trees_sq: int
    sum_trees_forests: int
    sum_forests_sq: int


def _add_row(acc: dict, key, values):
    cur = acc.get(key)
    if cur is None:
        acc[key] = list(values)
    else:
        for i, v in enumerate(values):
            cur[i] += v


# ---------------------------------------------------------------------------
# Bitmask censuses (n <= 7)


def _graph_class_chunk(args):
    """One deterministic slice of the bitmask census.

    The slice owns the masks whose lowest edge index is congruent to
    ``chunk_idx`` modulo ``num_chunks``; the union over chunks is an
    exact partition, independent of the worker count.
    """
    class_id, n, chunk_idx, num_chunks = args
    pairs = all_pairs(n)
    np_ = len(pairs)
    if class_id == "2tree":
        m_values = [2 * n - 3]
    else:
        m_values = list(range(n - 1, 2 * n - 2))
    acc: dict[tuple[int, int], list[int]] = {}
    for m in m_values:
        if m < 1 or m > np_:
            continue
        for first in range(np_ - m + 1):
            if first % num_chunks != chunk_idx:
                continue
            first_bit = 1 << first
            for combo in itertools.combinations(range(first + 1, np_), m - 1):
                mask = first_bit
                for b in combo:
                    mask |= 1 << b
                adj = adjacency_from_mask(n, mask, pairs)
                if any(a == 0 for a in adj) or not is_connected_adj(adj, n):
                    continue
                if not is_series_parallel(n, mask, pairs):
                    continue
                if class_id == "2connected-SP":
                    if not is_biconnected(n, mask, pairs):
                        continue
                elif class_id == "2tree":
                    if not (is_biconnected(n, mask, pairs)
                            and _is_two_tree(n, mask, pairs)):
                        continue
                s = spanning_tree_count_mask(n, mask, pairs)
                _add_row(acc, (n, m), (1, s, s * s))
    return acc


def _is_two_tree(n: int, mask: int, pairs: list[tuple[int, int]]) -> bool:
    """Edge-maximal SP test by the defining recursion.

    Repeatedly removes a degree-2 vertex whose neighbours are adjacent;
    a 2-tree collapses to a single edge.
    """
    if n == 2:
        return mask != 0 and bin(mask).count("1") == 1
    adj = {v: set() for v in range(n)}
    for (i, j) in mask_edges(mask, pairs):
        adj[i].add(j)
        adj[j].add(i)
    alive = set(range(n))
    while len(alive) > 2:
        removed = False
        for v in list(alive):
            if len(adj[v]) == 2:
                a, b = adj[v]
                if b in adj[a]:
                    for u in (a, b):
                        adj[u].discard(v)
                    del adj[v]
                    alive.discard(v)
                    removed = True
                    break
        if not removed:
            return False
    v1, v2 = alive
    return v2 in adj[v1] and len(adj[v1]) == 1 and len(adj[v2]) == 1


def census(class_id: str, n: int, workers: int = 1,
           num_chunks: int = 32) -> list[CensusRow]:
    """Exhaustive census of an SP graph class at a fixed vertex count.

    class_id: connected-SP | 2connected-SP | 2tree.  For n = 8 the
    two-connected and 2-tree classes switch to the 2-tree closure
    strategy; connected at n = 8 is rejected with a cost estimate.
    """
    if class_id not in ("connected-SP", "2connected-SP", "2tree"):
        raise ValueError(f"unknown census class {class_id!r}")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        if class_id == "connected-SP":
            return [CensusRow(class_id, 1, 0, 1, 1, 1)]
        return []
    if n > 8:
        raise ValueError(f"n = {n} beyond the oracle cap (estimated >> 30 min)")
    if n == 8:
        if class_id == "connected-SP":
            raise ValueError("connected census at n = 8 is out of the default "
                             "budget (tens of millions of graphs); use n <= 7")
        return _census_via_two_tree_closure(class_id, n, workers)
    args = [(class_id, n, c, num_chunks) for c in range(num_chunks)]
    partials = _run_chunks(_graph_class_chunk, args, workers)
    acc: dict[tuple[int, int], list[int]] = {}
    for p in partials:
        for key, vals in p.items():
            _add_row(acc, key, vals)
    return [CensusRow(class_id, nn, mm, *acc[(nn, mm)])
            for (nn, mm) in sorted(acc)]


def _run_chunks(fn, args, workers: int):
    if workers <= 1:
        return [fn(a) for a in args]
    with Pool(workers) as pool:
        return pool.map(fn, args)


# ---------------------------------------------------------------------------
# 2-tree enumeration and downward closure (n = 8 path, reused for all n)


def enumerate_two_trees(n: int) -> list[int]:
    """All 2-trees on exactly the vertex set [0, n); edge bitmasks.

    Grown from single edges by attaching a new vertex to an existing
    edge, with global deduplication per level.
    """
    pairs = all_pairs(n)
    pidx = {p: i for i, p in enumerate(pairs)}
    if n < 2:
        return []
    levels: list[set[tuple[int, int]]] = []  # (vertex_mask, edge_mask)
    start = {(1 << i | 1 << j, 1 << pidx[(i, j)]) for (i, j) in pairs}
    levels.append(start)
    for size in range(2, n):
        nxt: set[tuple[int, int]] = set()
        for vmask, emask in levels[-1]:
            edges = mask_edges(emask, pairs)
            for w in range(n):
                if vmask >> w & 1:
                    continue
                wbit = 1 << w
                for (a, b) in edges:
                    em2 = emask | 1 << pidx[(min(a, w), max(a, w))] \
                                | 1 << pidx[(min(b, w), max(b, w))]
                    nxt.add((vmask | wbit, em2))
        levels.append(nxt)
    full = (1 << n) - 1
    return sorted(em for vm, em in levels[-1] if vm == full)


def _closure_det_chunk(args):
    n, masks, class_id = args
    pairs = all_pairs(n)
    acc: dict[tuple[int, int], list[int]] = {}
    for mask in masks:
        m = bin(mask).count("1")
        s = spanning_tree_count_mask(n, mask, pairs)
        _add_row(acc, (n, m), (1, s, s * s))
    return acc


def two_connected_closure(n: int) -> list[list[int]]:
    """All 2-connected SP graphs on [0, n), grouped by edge count.

    Starts from the 2-trees (2n-3 edges) and deletes single edges while
    the graph stays 2-connected; every 2-connected SP graph is reachable
    because any non-maximal one extends edge by edge inside a 2-tree on
    the same vertex set.  Candidate children are deduplicated with a
    sort (numpy) before the 2-connectivity test, which keeps the test
    count linear in the number of distinct candidates.
    """
    import numpy as _np

    pairs = all_pairs(n)
    top = enumerate_two_trees(n)
    by_m: list[list[int]] = [sorted(top)]
    current = by_m[0]
    m = 2 * n - 3
    while m > n and current:
        cands = _np.empty(len(current) * m, dtype=_np.uint64)
        pos = 0
        for mask in current:
            mm = mask
            while mm:
                bit = mm & -mm
                mm ^= bit
                cands[pos] = mask ^ bit
                pos += 1
        uniq = _np.unique(cands[:pos])
        nxt = [int(c) for c in uniq if is_biconnected(n, int(c), pairs)]
        current = nxt
        m -= 1
        by_m.append(current)
    return by_m


def _census_via_two_tree_closure(class_id: str, n: int, workers: int) -> list[CensusRow]:
    pairs = all_pairs(n)
    if class_id == "2tree":
        masks = enumerate_two_trees(n)
        groups = [masks]
    else:
        groups = two_connected_closure(n)
    acc: dict[tuple[int, int], list[int]] = {}
    for group in groups:
        if not group:
            continue
        chunks = _split(group, max(1, workers * 4))
        args = [(n, chunk, class_id) for chunk in chunks]
        for p in _run_chunks(_closure_det_chunk, args, workers):
            for key, vals in p.items():
                _add_row(acc, key, vals)
    return [CensusRow(class_id, nn, mm, *acc[(nn, mm)])
            for (nn, mm) in sorted(acc)]


def _split(lst, k):
    size = (len(lst) + k - 1) // k
    return [lst[i:i + size] for i in range(0, len(lst), size)]


# ---------------------------------------------------------------------------
# Two-pole network census


def _network_chunk(args):
    n_int, chunk_idx, num_chunks = args
    n = n_int + 2
    s_pole, t_pole = 0, 1
    pairs = all_pairs(n)
    np_ = len(pairs)
    st_bit = 1 << pair_index(s_pole, t_pole, n)
    max_edges = 2 * n - 3
    acc: dict[tuple[int, int, str], list[int]] = {}
    for mask in range(chunk_idx, 1 << np_, num_chunks):
        m = bin(mask).count("1")
        if m == 0 or m > max_edges:
            continue
        if n_int == 0 and mask != st_bit:
            continue
        with_root = mask | st_bit
        if not is_biconnected(n, with_root, pairs):
            continue
        if not is_series_parallel(n, with_root, pairs):
            continue
        edges = [(i, j, 1) for (i, j) in mask_edges(mask, pairs)]
        if n_int == 0:
            kind = "trivial"
        elif mask & st_bit:
            kind = "parallel"
        else:
            kind = "series" if _has_pole_separator(n, mask, pairs, s_pole, t_pole) \
                else "parallel"
        s = spanning_tree_count(n, edges)
        f = pole_forest_count(n, edges, s_pole, t_pole)
        _add_row(acc, (n_int, m, kind), (1, s, f, s * s, s * f, f * f))
    return acc


def _has_pole_separator(n: int, mask: int, pairs, s_pole: int, t_pole: int) -> bool:
    adj = adjacency_from_mask(n, mask, pairs)
    for v in range(n):
        if v in (s_pole, t_pole):
            continue
        rest = ((1 << n) - 1) & ~(1 << v)
        adj2 = [a & rest for a in adj]
        seen = 1 << s_pole
        frontier = seen
        while frontier:
            nxt = 0
            f = frontier
            while f:
                u = (f & -f).bit_length() - 1
                f &= f - 1
                nxt |= adj2[u]
            frontier = nxt & ~seen & rest
            seen |= frontier
        if not seen >> t_pole & 1:
            return True
    return False


def network_census(n_internal: int, workers: int = 1,
                   num_chunks: int = 32) -> list[NetworkCensusRow]:
    """Exhaustive enumeration of two-pole SP networks.

    Internal vertices are labelled; poles are a fixed unlabelled pair.
    A graph qualifies when adding the pole edge leaves it 2-connected
    and series-parallel.  Root-edge networks are classified parallel;
    rootless ones are series exactly when an internal vertex separates
    the poles.
    """
    if n_internal > 6:
        raise ValueError("network census capped at 6 internal vertices")
    args = [(n_internal, c, num_chunks) for c in range(num_chunks)]
    acc: dict[tuple[int, int, str], list[int]] = {}
    for p in _run_chunks(_network_chunk, args, workers):
        for key, vals in p.items():
            _add_row(acc, key, vals)
    return [NetworkCensusRow(ni, mm, kind, *acc[(ni, mm, kind)])
            for (ni, mm, kind) in sorted(acc)]


# ---------------------------------------------------------------------------
# Weighted cubic multigraphs


@dataclass(frozen=True)
class WeightedMultigraph:
    n: int
    loops: tuple[int, ...]           # loop count per vertex (0 or 1 for cubic)
    mult: tuple[tuple[int, int, int], ...]  # (u, v, multiplicity), u < v

    @property
    def weight(self) -> Fraction:
        l1 = sum(self.loops)
        l2 = sum(1 for (_, _, k) in self.mult if k == 2)
        l3 = sum(1 for (_, _, k) in self.mult if k == 3)
        return Fraction(1, 2 ** (l1 + l2) * 6 ** l3)

    def edge_list(self) -> list[tuple[int, int, int]]:
        out = [(v, v, c) for v, c in enumerate(self.loops) if c]
        out.extend(self.mult)
        return out

    @property
    def edge_count(self) -> int:
        return sum(self.loops) + sum(k for (_, _, k) in self.mult)

    @property
    def excess(self) -> int:
        return self.edge_count - self.n

    def spanning_trees(self) -> int:
        return spanning_tree_count(self.n, list(self.mult))

    def is_connected(self) -> bool:
        adj = [0] * self.n
        for u, v, _ in self.mult:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        if self.n == 1:
            return True
        return is_connected_adj(adj, self.n)

    def is_series_parallel(self) -> bool:
        return is_series_parallel_multigraph(self.n, self.edge_list())

    def canonical(self) -> tuple:
        return (self.n, self.loops, self.mult)


def enumerate_cubic_multigraphs(k: int) -> list[WeightedMultigraph]:
    """Connected cubic multigraphs on 2k labelled vertices (excess k)."""
    n = 2 * k
    pairs = all_pairs(n)
    results: list[WeightedMultigraph] = []

    def backtrack(pi: int, deg: list[int], chosen: dict):
        if pi == len(pairs):
            if all(d == 3 for d in deg):
                loops = tuple(chosen.get((v, v), 0) for v in range(n))
                mult = tuple((u, v, c) for (u, v), c in sorted(chosen.items())
                             if u != v and c > 0)
                g = WeightedMultigraph(n, loops, mult)
                if g.is_connected():
                    results.append(g)
            return
        u, v = pairs[pi]
        room = min(3 - deg[u], 3 - deg[v])
        for c in range(room + 1):
            if c:
                chosen[(u, v)] = c
                deg[u] += c
                deg[v] += c
            backtrack(pi + 1, deg, chosen)
            if c:
                deg[u] -= c
                deg[v] -= c
                del chosen[(u, v)]

    for loop_pattern in itertools.product((0, 1), repeat=n):
        deg = [2 * c for c in loop_pattern]
        chosen = {(v, v): c for v, c in enumerate(loop_pattern) if c}
        backtrack(0, deg, dict(chosen))
    return results


def multigraph_census(k: int) -> dict:
    """Weighted census of connected cubic SP multigraphs with excess k.

    Returns the raw weighted totals and the label-normalised values
    (divided by (2k)!), which are the kernel series coefficients.
    """
    if k < 1 or k > 4:
        raise ValueError("multigraph census supports 1 <= k <= 4")
    total_w = Fraction(0)
    total_ws = Fraction(0)
    count = 0
    for g in enumerate_cubic_multigraphs(k):
        if not g.is_series_parallel():
            continue
        assert g.excess == k
        w = g.weight
        total_w += w
        total_ws += w * g.spanning_trees()
        count += 1
    fact = 1
    for i in range(2, 2 * k + 1):
        fact *= i
    return {
        "k": k,
        "graphs": count,
        "weighted_count": total_w,
        "weighted_tree_count": total_ws,
        "g_k": total_w / fact,
        "gbar_k": total_ws / fact,
    }


# ---------------------------------------------------------------------------
# Kernel extraction


def kernel_extract(n: int, edges: list[tuple[int, int]]) -> WeightedMultigraph:
    """Prune degree-1 vertices, dissolve degree-2 vertices, relabel.

    Defined for connected graphs of excess >= 2, for which the result
    has minimum degree 3 and the same excess.
    """
    excess = len(edges) - n
    if excess < 2:
        raise ValueError("kernel extraction needs excess >= 2")
    mult: dict[tuple[int, int], int] = {}
    for u, v in edges:
        key = (u, v) if u <= v else (v, u)
        mult[key] = mult.get(key, 0) + 1

    def degree(v: int) -> int:
        d = 0
        for (a, b), c in mult.items():
            if a == v and b == v:
                d += 2 * c
            elif a == v or b == v:
                d += c
        return d

    alive = set(range(n))

    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            d = degree(v)
            if d == 0 and len(alive) > 1:
                alive.discard(v)
                changed = True
            elif d == 1:
                for key in [k for k in mult if v in k]:
                    del mult[key]
                alive.discard(v)
                changed = True
        if changed:
            continue
        for v in sorted(alive):
            if degree(v) != 2:
                continue
            inc = [(key, c) for key, c in mult.items() if v in key and key != (v, v)]
            if not inc:  # a bare loop vertex: degree 2 from the loop alone
                continue
            ends: list[int] = []
            for (a, b), c in inc:
                other = b if a == v else a
                ends.extend([other] * c)
            assert len(ends) == 2
            for key, _ in inc:
                del mult[key]
            u, w = ends
            key = (u, w) if u <= w else (w, u)
            mult[key] = mult.get(key, 0) + 1
            alive.discard(v)
            changed = True
            break

    order = {v: i for i, v in enumerate(sorted(alive))}
    loops = [0] * len(alive)
    pair_mult: dict[tuple[int, int], int] = {}
    for (a, b), c in mult.items():
        if a == b:
            loops[order[a]] += c
        else:
            key = (order[a], order[b]) if order[a] < order[b] else (order[b], order[a])
            pair_mult[key] = pair_mult.get(key, 0) + c
    return WeightedMultigraph(len(alive), tuple(loops),
                              tuple((u, v, c) for (u, v), c in sorted(pair_mult.items())))


def default_workers() -> int:
    env = os.environ.get("SPTREES_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)
