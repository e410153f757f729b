"""Compiled inner loops.

All kernels take plain int64 arrays (edge endpoint arrays in processing order,
or a CSR adjacency ``indptr/adj_vertex/adj_edge``) and release the GIL, so
callers may run them from a thread pool.
"""
from __future__ import annotations

import heapq

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


# --------------------------------------------------------------------------
# increasing-trail dynamic program


@njit(**_JIT)
def trail_dp(n, tails, heads):
    """Process edges in the given order, tracking the best trail ending at each vertex.

    Direction code ``2*i`` means edge ``i`` traversed tails[i] -> heads[i];
    ``2*i + 1`` is the reverse.  Returns

    best    : best trail length ending at each vertex
    last    : direction code of the last improvement of each vertex (-1 if none)
    pred    : for each direction code, the tail vertex's ``last`` at the time
    through : for each direction code, length of the best trail using it last
    """
    m = tails.shape[0]
    best = np.zeros(n, np.int64)
    last = np.full(n, -1, np.int64)
    pred = np.empty(2 * m, np.int64)
    through = np.empty(2 * m, np.int64)
    for i in range(m):
        u = tails[i]
        v = heads[i]
        lu = best[u]
        lv = best[v]
        cu = last[u]
        cv = last[v]
        # both updates read the pre-edge values
        pred[2 * i] = cu
        pred[2 * i + 1] = cv
        through[2 * i] = lu + 1
        through[2 * i + 1] = lv + 1
        if lu + 1 > lv:
            best[v] = lu + 1
            last[v] = 2 * i
        if lv + 1 > lu:
            best[u] = lv + 1
            last[u] = 2 * i + 1
    return best, last, pred, through


@njit(**_JIT)
def trail_length(n, tails, heads):
    best = np.zeros(n, np.int64)
    top = 0
    for i in range(tails.shape[0]):
        u = tails[i]
        v = heads[i]
        lu = best[u]
        lv = best[v]
        if lu + 1 > lv:
            best[v] = lu + 1
        if lv + 1 > lu:
            best[u] = lv + 1
        if lu + 1 > top:
            top = lu + 1
        if lv + 1 > top:
            top = lv + 1
    return top


@njit(**_JIT)
def batch_trail_lengths(n, eu, ev, sequences):
    """Trail-DP length for each row of ``sequences`` (edge indices in label order)."""
    t = sequences.shape[0]
    out = np.empty(t, np.int64)
    tails = np.empty(sequences.shape[1], np.int64)
    heads = np.empty(sequences.shape[1], np.int64)
    for r in range(t):
        for j in range(sequences.shape[1]):
            e = sequences[r, j]
            tails[j] = eu[e]
            heads[j] = ev[e]
        out[r] = trail_length(n, tails, heads)
    return out


# --------------------------------------------------------------------------
# small exact path search


@njit(**_JIT)
def longest_path_small(n, indptr, adj_vertex, adj_edge, rank):
    """Exact longest increasing path by exhaustive DFS; needs n <= 63."""
    best = 0
    stv = np.empty(n + 1, np.int64)
    stlab = np.empty(n + 1, np.int64)
    stpos = np.empty(n + 1, np.int64)
    for s in range(n):
        depth = 0
        stv[0] = s
        stlab[0] = 0
        stpos[0] = indptr[s]
        mask = np.int64(1) << s
        while depth >= 0:
            v = stv[depth]
            if stpos[depth] < indptr[v + 1]:
                i = stpos[depth]
                stpos[depth] += 1
                w = adj_vertex[i]
                lab = rank[adj_edge[i]]
                if lab > stlab[depth] and (mask >> w) & 1 == 0:
                    depth += 1
                    stv[depth] = w
                    stlab[depth] = lab
                    stpos[depth] = indptr[w]
                    mask |= np.int64(1) << w
                    if depth > best:
                        best = depth
            else:
                mask &= ~(np.int64(1) << v)
                depth -= 1
    return best


@njit(**_JIT)
def count_increasing_paths(n, indptr, adj_vertex, adj_edge, rank, k):
    """Number of vertex sequences v_0..v_k forming an increasing path of length k."""
    total = 0
    visited = np.zeros(n, np.bool_)
    stv = np.empty(k + 1, np.int64)
    stlab = np.empty(k + 1, np.int64)
    stpos = np.empty(k + 1, np.int64)
    for s in range(n):
        depth = 0
        stv[0] = s
        stlab[0] = 0
        stpos[0] = indptr[s]
        visited[s] = True
        if k == 0:
            total += 1
            visited[s] = False
            continue
        while depth >= 0:
            v = stv[depth]
            if stpos[depth] < indptr[v + 1]:
                i = stpos[depth]
                stpos[depth] += 1
                w = adj_vertex[i]
                lab = rank[adj_edge[i]]
                if lab > stlab[depth] and not visited[w]:
                    if depth + 1 == k:
                        total += 1
                    else:
                        depth += 1
                        stv[depth] = w
                        stlab[depth] = lab
                        stpos[depth] = indptr[w]
                        visited[w] = True
            else:
                visited[v] = False
                depth -= 1
    return total


# --------------------------------------------------------------------------
# exhaustive enumeration of orderings


@njit(**_JIT)
def min_trail_over_orderings(n, eu, ev, first):
    """Minimum trail-DP length over all edge sequences (lexicographic DFS).

    ``first >= 0`` restricts to sequences starting with that edge.  The DP
    state of every prefix is kept on a stack, so each tree node costs O(n).
    Returns ``(minimum, minimizing sequence, sequences examined)``.
    """
    m = eu.shape[0]
    L = np.zeros((m + 1, n), np.int64)
    runmax = np.zeros(m + 1, np.int64)
    used = np.zeros(m, np.bool_)
    seq = np.empty(m, np.int64)
    nxt = np.zeros(m + 1, np.int64)
    best = m + 1
    best_seq = np.arange(m)
    count = 0
    base = 0
    if m == 0:
        return 0, best_seq, 1
    if first >= 0:
        seq[0] = first
        used[first] = True
        L[1, eu[first]] = 1
        L[1, ev[first]] = 1
        runmax[1] = 1
        base = 1
    d = base
    while True:
        if d == m:
            count += 1
            if runmax[m] < best:
                best = runmax[m]
                best_seq[:] = seq
            if d == base:
                break
            d -= 1
            used[seq[d]] = False
            continue
        c = nxt[d]
        while c < m and used[c]:
            c += 1
        if c == m:
            if d == base:
                break
            nxt[d] = 0
            d -= 1
            used[seq[d]] = False
            continue
        nxt[d] = c + 1
        seq[d] = c
        used[c] = True
        u = eu[c]
        v = ev[c]
        L[d + 1, :] = L[d, :]
        lu = L[d, u]
        lv = L[d, v]
        top = runmax[d]
        if lu + 1 > lv:
            L[d + 1, v] = lu + 1
        if lv + 1 > lu:
            L[d + 1, u] = lv + 1
        if L[d + 1, u] > top:
            top = L[d + 1, u]
        if L[d + 1, v] > top:
            top = L[d + 1, v]
        runmax[d + 1] = top
        nxt[d + 1] = 0
        d += 1
    return best, best_seq, count


@njit(**_JIT)
def min_path_over_orderings(n, eu, ev, indptr, adj_vertex, adj_edge, first):
    """Minimum exact longest-increasing-path length over all edge sequences."""
    m = eu.shape[0]
    used = np.zeros(m, np.bool_)
    seq = np.empty(m, np.int64)
    nxt = np.zeros(m + 1, np.int64)
    rank = np.empty(m, np.int64)
    best = m + 1
    best_seq = np.arange(m)
    count = 0
    base = 0
    if m == 0:
        return 0, best_seq, 1
    if first >= 0:
        seq[0] = first
        used[first] = True
        base = 1
    d = base
    while True:
        if d == m:
            count += 1
            for j in range(m):
                rank[seq[j]] = j + 1
            val = longest_path_small(n, indptr, adj_vertex, adj_edge, rank)
            if val < best:
                best = val
                best_seq[:] = seq
            if d == base:
                break
            d -= 1
            used[seq[d]] = False
            continue
        c = nxt[d]
        while c < m and used[c]:
            c += 1
        if c == m:
            if d == base:
                break
            nxt[d] = 0
            d -= 1
            used[seq[d]] = False
            continue
        nxt[d] = c + 1
        seq[d] = c
        used[c] = True
        nxt[d + 1] = 0
        d += 1
    return best, best_seq, count


# --------------------------------------------------------------------------
# girth and short-cycle pruning


@njit(**_JIT)
def girth(n, indptr, adj_vertex):
    """Exact girth by BFS from every vertex; returns 0 for a forest.

    The BFS from ``s`` only enters vertices above ``s``: a shortest cycle is
    found from its smallest vertex, and restricted searches only ever report
    lengths of real cycles.
    """
    inf = n + 1
    best = inf
    dist = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        if best == 3:
            break
        head = 0
        tail = 1
        queue[0] = s
        dist[s] = 0
        parent[s] = -1
        while head < tail:
            x = queue[head]
            head += 1
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            grow = 2 * dx + 2 < best
            for i in range(indptr[x], indptr[x + 1]):
                y = adj_vertex[i]
                if y <= s:
                    continue
                if dist[y] < 0:
                    if grow:
                        dist[y] = dx + 1
                        parent[y] = x
                        queue[tail] = y
                        tail += 1
                elif y != parent[x]:
                    c = dx + dist[y] + 1
                    if c < best:
                        best = c
        for j in range(tail):
            dist[queue[j]] = -1
    return 0 if best == inf else best


@njit(**_JIT)
def _find_short_cycle(s, k, indptr, adj_vertex, alive, dist, parent, queue, cycle):
    """Look for a cycle of length < k whose smallest vertex is ``s``.

    Writes the cycle to ``cycle`` and returns its size (0 if none).
    """
    dmax = (k - 2) // 2
    head = 0
    tail = 1
    queue[0] = s
    dist[s] = 0
    parent[s] = -1
    fx = -1
    fy = -1
    while head < tail and fx < 0:
        x = queue[head]
        head += 1
        dx = dist[x]
        if dx > dmax:
            break
        # vertices discovered here can only close cycles of length >= 2*dx + 2
        grow = 2 * dx + 2 <= k - 1
        for i in range(indptr[x], indptr[x + 1]):
            y = adj_vertex[i]
            if y <= s or not alive[y]:
                continue
            if dist[y] < 0:
                if grow:
                    dist[y] = dx + 1
                    parent[y] = x
                    queue[tail] = y
                    tail += 1
            elif y != parent[x] and dx + dist[y] + 1 <= k - 1:
                fx = x
                fy = y
                break
    size = 0
    if fx >= 0:
        a = fx
        b = fy
        while dist[a] > dist[b]:
            cycle[size] = a
            size += 1
            a = parent[a]
        while dist[b] > dist[a]:
            cycle[size] = b
            size += 1
            b = parent[b]
        while a != b:
            cycle[size] = a
            cycle[size + 1] = b
            size += 2
            a = parent[a]
            b = parent[b]
        cycle[size] = a
        size += 1
    for j in range(tail):
        dist[queue[j]] = -1
    return size


@njit(**_JIT)
def delete_short_cycles(n, indptr, adj_vertex, k):
    """Delete vertices until no cycle shorter than ``k`` remains.

    Vertices are scanned once in index order, each for the short cycles it
    is the smallest vertex of, and rescanned after each deletion it triggers.
    Deleting never creates cycles, so one pass suffices.  From each short cycle found, the vertex of
    highest current degree (lowest index on ties) is deleted.  Returns the
    deleted vertices in deletion order.
    """
    alive = np.ones(n, np.bool_)
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    dist = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    cycle = np.empty(max(k, 3) + 2, np.int64)
    deleted = np.empty(n, np.int64)
    nd = 0
    if k <= 3:
        return deleted[:0]
    for s in range(n):
        while alive[s]:
            size = _find_short_cycle(s, k, indptr, adj_vertex, alive, dist, parent, queue, cycle)
            if size == 0:
                break
            victim = cycle[0]
            for j in range(1, size):
                c = cycle[j]
                if deg[c] > deg[victim] or (deg[c] == deg[victim] and c < victim):
                    victim = c
            alive[victim] = False
            for i in range(indptr[victim], indptr[victim + 1]):
                w = adj_vertex[i]
                if alive[w]:
                    deg[w] -= 1
            deg[victim] = 0
            deleted[nd] = victim
            nd += 1
    return deleted[:nd]


@njit(**_JIT)
def absorb(n, indptr, adj_vertex, deleted, threshold):
    """Repeatedly delete the lowest-index survivor with >= threshold deleted neighbors.

    ``deleted`` (bool, modified in place) holds the initial set.  Returns the
    absorbed vertices in order.
    """
    cnt = np.zeros(n, np.int64)
    for v in range(n):
        if deleted[v]:
            for i in range(indptr[v], indptr[v + 1]):
                cnt[adj_vertex[i]] += 1
    queued = np.zeros(n, np.bool_)
    heap = [np.int64(0)]
    heap.pop()
    for v in range(n):
        if not deleted[v] and cnt[v] >= threshold:
            heap.append(np.int64(v))
            queued[v] = True
    heapq.heapify(heap)
    order = np.empty(n, np.int64)
    na = 0
    while len(heap) > 0:
        v = heapq.heappop(heap)
        if deleted[v]:
            continue
        deleted[v] = True
        order[na] = v
        na += 1
        for i in range(indptr[v], indptr[v + 1]):
            w = adj_vertex[i]
            cnt[w] += 1
            if not deleted[w] and not queued[w] and cnt[w] >= threshold:
                queued[w] = True
                heapq.heappush(heap, np.int64(w))
    return order[:na]


# --------------------------------------------------------------------------
# implicit D-ary tree with address-hashed labels

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_COUNT_SALT = np.uint64(0x8CB92BA72F3D8DD7)


@njit(**_JIT)
def splitmix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


_STEP = np.uint64(0xD6E8FEB86659FD93)
_INV53 = 1.0 / 9007199254740992.0


@njit(**_JIT)
def tree_search(D, k, root_hash, cap):
    """DFS for an increasing root-to-depth-k path in the implicit ``T_D^k``.

    A node entered through label ``x`` only ever needs its children with
    larger labels.  Their number is ``Bin(D, 1 - x)`` and, given the count,
    their labels are i.i.d. uniform on ``(x, 1)``; both are drawn from the
    node's hash, the labels as order statistics generated lazily smallest
    first.  Children are addressed by that rank, so the sampled tree is a
    fixed function of the trial key.  Every expansion is a node on an
    increasing root path.

    Returns ``(outcome, expansions)`` with outcome 1 (found), 0 (none) or
    -1 (cap hit).
    """
    if k == 0:
        return 1, 0
    node = np.empty(k, np.uint64)
    left = np.empty(k, np.int64)
    rank = np.empty(k, np.uint64)
    last = np.empty(k, np.float64)
    node[0] = root_hash
    last[0] = 0.0
    left[0] = D
    rank[0] = 0
    expansions = 1
    depth = 0
    one = np.uint64(1)
    while depth >= 0:
        r = left[depth]
        if r == 0:
            depth -= 1
            continue
        rank[depth] += one
        hc = splitmix64(node[depth] + rank[depth] * _STEP)
        v = np.float64(hc >> np.uint64(11)) * _INV53
        prev = last[depth]
        # smallest of r uniforms on (prev, 1)
        if r == 1:
            lab = prev + (1.0 - prev) * v
        else:
            lab = prev + (1.0 - prev) * (1.0 - np.exp(np.log1p(-v) / r))
        last[depth] = lab
        left[depth] = r - 1
        if depth + 1 == k:
            return 1, expansions
        expansions += 1
        if expansions > cap:
            return -1, expansions
        # how many of the child's D labels exceed lab: inverse cdf of Bin(D, 1 - lab)
        u = np.float64(splitmix64(hc ^ _COUNT_SALT) >> np.uint64(11)) * _INV53
        pmf = lab ** D
        cdf = pmf
        c = 0 if lab > 0.0 else D
        ratio = (1.0 - lab) / lab if lab > 0.0 else 0.0
        while cdf <= u and c < D:
            pmf *= ratio * (D - c) / (c + 1)
            c += 1
            cdf += pmf
        if c == 0:
            continue
        depth += 1
        node[depth] = hc
        last[depth] = lab
        rank[depth] = 0
        left[depth] = c
    return 0, expansions


# --------------------------------------------------------------------------
# label-oblivious long path (DFS tree depth)


@njit(**_JIT)
def dfs_deepest_path(n, indptr, adj_vertex):
    """Longest root-to-node path over the DFS forest; returns its vertices."""
    visited = np.zeros(n, np.bool_)
    parent = np.full(n, -1, np.int64)
    depth = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    ptr = np.empty(n, np.int64)
    deepest = 0
    deepest_v = 0
    for r in range(n):
        if visited[r]:
            continue
        visited[r] = True
        top = 0
        stack[0] = r
        ptr[0] = indptr[r]
        while top >= 0:
            v = stack[top]
            if ptr[top] < indptr[v + 1]:
                w = adj_vertex[ptr[top]]
                ptr[top] += 1
                if not visited[w]:
                    visited[w] = True
                    parent[w] = v
                    depth[w] = depth[v] + 1
                    if depth[w] > deepest:
                        deepest = depth[w]
                        deepest_v = w
                    top += 1
                    stack[top] = w
                    ptr[top] = indptr[w]
            else:
                top -= 1
    out = np.empty(deepest + 1, np.int64)
    v = deepest_v
    for i in range(deepest, -1, -1):
        out[i] = v
        v = parent[v]
    return out
