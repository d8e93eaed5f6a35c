"""Compiled inner loops shared by the builders, pruners, searcher and auditor.

Every kernel receives both ``points`` and ``matrix``; exactly one of them is
meaningful, selected by ``euclid``.  Comparisons use a *key* that is the
squared distance in Euclidean mode and the plain distance in matrix mode, so
the prune test ``alpha * D(a, c) <= D(p, c)`` becomes
``alpha**2 * key(a, c) <= key(p, c)`` without square roots.

All kernels release the GIL so callers may fan out over vertex ranges.
"""

import numba as nb
import numpy as np

ORDER_SORTED = 0
ORDER_INDEX = 1
ORDER_SHUFFLE = 2


@nb.njit(cache=True, inline="always")
def pair_key(points, matrix, euclid, i, j):
    if euclid:
        s = 0.0
        for t in range(points.shape[1]):
            diff = points[i, t] - points[j, t]
            s += diff * diff
        return s
    return matrix[i, j]


@nb.njit(cache=True, inline="always")
def query_key(points, matrix, euclid, qvec, qidx, i):
    if euclid:
        s = 0.0
        for t in range(points.shape[1]):
            diff = points[i, t] - qvec[t]
            s += diff * diff
        return s
    return matrix[qidx, i]


@nb.njit(cache=True, inline="always")
def key_to_distance(key, euclid):
    if euclid:
        return np.sqrt(key)
    return key


@nb.njit(cache=True, inline="always")
def alpha_factor(alpha, euclid):
    if euclid:
        return alpha * alpha
    return alpha


@nb.njit(cache=True, inline="always")
def shuffle_seed(seed, p):
    return (seed * 2654435761 + p * 40503 + 12345) % 4294967296


@nb.njit(cache=True, nogil=True)
def pairwise_distance(points, matrix, euclid, i, j):
    return key_to_distance(pair_key(points, matrix, euclid, i, j), euclid)


@nb.njit(cache=True, nogil=True)
def distance_sums(points, lo, hi):
    """Row sums of the Euclidean distance matrix for rows ``[lo, hi)``."""
    n = points.shape[0]
    sums = np.zeros(hi - lo)
    empty = np.empty((0, 0))
    for i in range(lo, hi):
        s = 0.0
        for j in range(n):
            if j != i:
                s += np.sqrt(pair_key(points, empty, True, i, j))
        sums[i - lo] = s
    return sums


@nb.njit(cache=True, nogil=True)
def min_max_key(points, matrix, euclid):
    n = points.shape[0] if euclid else matrix.shape[0]
    lo = np.inf
    hi = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            k = pair_key(points, matrix, euclid, i, j)
            if k < lo:
                lo = k
            if k > hi:
                hi = k
    return lo, hi


@nb.njit(cache=True, nogil=True)
def robust_prune_into(points, matrix, euclid, p, cand, alpha, R, mode, seed, out):
    """RobustPrune over ``cand`` (unique, excludes ``p``); writes into ``out``.

    ``R <= 0`` means unbounded.  Returns the number of neighbours written.
    """
    m = cand.shape[0]
    if m == 0:
        return 0
    base = np.sort(cand)
    keys = np.empty(m)
    for i in range(m):
        keys[i] = pair_key(points, matrix, euclid, p, base[i])
    if mode == ORDER_SORTED:
        # stable sort on keys over an index-sorted base gives ties by index
        order = np.argsort(keys, kind="mergesort")
    elif mode == ORDER_INDEX:
        order = np.arange(m)
    else:
        np.random.seed(shuffle_seed(seed, p))
        order = np.random.permutation(m)
    a = alpha_factor(alpha, euclid)
    alive = np.ones(m, dtype=np.bool_)
    cnt = 0
    for ii in range(m):
        i = order[ii]
        if not alive[i]:
            continue
        alive[i] = False
        star = base[i]
        out[cnt] = star
        cnt += 1
        if R > 0 and cnt == R:
            break
        for jj in range(ii + 1, m):
            j = order[jj]
            if alive[j]:
                if a * pair_key(points, matrix, euclid, star, base[j]) <= keys[j]:
                    alive[j] = False
    return cnt


@nb.njit(cache=True, nogil=True)
def prune_range(table, degrees, points, matrix, euclid, alpha, R, mode, seed, lo, hi):
    """RobustPrune(p, N_out(p), alpha, R) for every p in ``[lo, hi)``, in place."""
    out = np.empty(table.shape[1], dtype=np.int64)
    for p in range(lo, hi):
        cnt = robust_prune_into(
            points, matrix, euclid, p, table[p, : degrees[p]].copy(), alpha, R, mode, seed, out
        )
        table[p, :cnt] = out[:cnt]
        table[p, cnt:] = -1
        degrees[p] = cnt


@nb.njit(cache=True, nogil=True)
def slow_range(table, degrees, points, matrix, euclid, alpha, lo, hi):
    """RobustPrune(p, P minus p, alpha, unbounded) for every p in ``[lo, hi)``."""
    n = table.shape[0]
    out = np.empty(max(n - 1, 1), dtype=np.int64)
    cand = np.empty(max(n - 1, 1), dtype=np.int64)
    for p in range(lo, hi):
        m = 0
        for v in range(n):
            if v != p:
                cand[m] = v
                m += 1
        cnt = robust_prune_into(
            points, matrix, euclid, p, cand[:m], alpha, -1, ORDER_SORTED, 0, out
        )
        table[p, :cnt] = out[:cnt]
        degrees[p] = cnt


@nb.njit(cache=True, nogil=True)
def search_into(
    table, degrees, points, matrix, euclid, qvec, qidx, start, L,
    ids, keys, in_list, visited, vlist,
):
    """Greedy beam search.  Leaves the beam in ``ids[:size]`` sorted by (key, id).

    ``in_list`` and ``visited`` must be all-False on entry and are restored on
    exit.  Returns ``(size, n_visited)``; visit order is in ``vlist``.
    """
    size = 1
    ids[0] = start
    keys[0] = query_key(points, matrix, euclid, qvec, qidx, start)
    in_list[start] = True
    nv = 0
    while True:
        pos = -1
        for t in range(size):
            if not visited[ids[t]]:
                pos = t
                break
        if pos < 0:
            break
        pstar = ids[pos]
        visited[pstar] = True
        vlist[nv] = pstar
        nv += 1
        for e in range(degrees[pstar]):
            v = table[pstar, e]
            if in_list[v]:
                continue
            kv = query_key(points, matrix, euclid, qvec, qidx, v)
            t = size
            while t > 0 and (keys[t - 1] > kv or (keys[t - 1] == kv and ids[t - 1] > v)):
                keys[t] = keys[t - 1]
                ids[t] = ids[t - 1]
                t -= 1
            keys[t] = kv
            ids[t] = v
            size += 1
            in_list[v] = True
        if size > L:
            for t in range(L, size):
                in_list[ids[t]] = False
            size = L
    for t in range(size):
        in_list[ids[t]] = False
    for t in range(nv):
        visited[vlist[t]] = False
    return size, nv


@nb.njit(cache=True, nogil=True)
def search_one(table, degrees, points, matrix, euclid, qvec, qidx, start, k, L):
    n = table.shape[0]
    width = L + table.shape[1] + 1
    ids = np.empty(width, dtype=np.int64)
    keys = np.empty(width)
    in_list = np.zeros(n, dtype=np.bool_)
    visited = np.zeros(n, dtype=np.bool_)
    vlist = np.empty(n, dtype=np.int64)
    size, nv = search_into(
        table, degrees, points, matrix, euclid, qvec, qidx, start, L,
        ids, keys, in_list, visited, vlist,
    )
    kk = min(k, size)
    return ids[:kk].copy(), keys[:kk].copy(), vlist[:nv].copy()


@nb.njit(cache=True, nogil=True)
def search_batch(table, degrees, points, matrix, euclid, queries, qidxs, start, k, L, out, hops):
    """Run GreedySearch for each query row; ``out`` is padded with -1."""
    n = table.shape[0]
    width = L + table.shape[1] + 1
    ids = np.empty(width, dtype=np.int64)
    keys = np.empty(width)
    in_list = np.zeros(n, dtype=np.bool_)
    visited = np.zeros(n, dtype=np.bool_)
    vlist = np.empty(n, dtype=np.int64)
    nq = out.shape[0]
    for i in range(nq):
        if euclid:
            qvec = queries[i]
        else:
            qvec = queries[0]
        size, nv = search_into(
            table, degrees, points, matrix, euclid, qvec, qidxs[i], start, L,
            ids, keys, in_list, visited, vlist,
        )
        kk = min(k, size)
        out[i, :kk] = ids[:kk]
        out[i, kk:] = -1
        hops[i] = nv


@nb.njit(cache=True, nogil=True)
def vamana_passes(table, degrees, points, matrix, euclid, start, perm, alphas, R, L):
    """Two-pass Vamana refinement, in place; ``table`` has exactly ``R`` columns."""
    n = table.shape[0]
    width = L + R + 1
    ids = np.empty(width, dtype=np.int64)
    keys = np.empty(width)
    in_list = np.zeros(n, dtype=np.bool_)
    visited = np.zeros(n, dtype=np.bool_)
    vlist = np.empty(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    cand = np.empty(n + R, dtype=np.int64)
    out = np.empty(R, dtype=np.int64)
    overflow = np.empty(R + 1, dtype=np.int64)
    empty_q = np.empty(0)
    for a in alphas:
        for p in perm:
            if euclid:
                qvec = points[p]
            else:
                qvec = empty_q
            size, nv = search_into(
                table, degrees, points, matrix, euclid, qvec, p, start, L,
                ids, keys, in_list, visited, vlist,
            )
            m = 0
            for t in range(nv):
                v = vlist[t]
                if v != p and not mark[v]:
                    mark[v] = True
                    cand[m] = v
                    m += 1
            for t in range(degrees[p]):
                v = table[p, t]
                if v != p and not mark[v]:
                    mark[v] = True
                    cand[m] = v
                    m += 1
            for t in range(m):
                mark[cand[t]] = False
            cnt = robust_prune_into(
                points, matrix, euclid, p, cand[:m], a, R, ORDER_SORTED, 0, out
            )
            table[p, :cnt] = out[:cnt]
            table[p, cnt:] = -1
            degrees[p] = cnt
            for t in range(cnt):
                q = table[p, t]
                dq = degrees[q]
                present = False
                for e in range(dq):
                    if table[q, e] == p:
                        present = True
                        break
                if present:
                    continue
                if dq < R:
                    table[q, dq] = p
                    degrees[q] = dq + 1
                else:
                    overflow[:dq] = table[q, :dq]
                    overflow[dq] = p
                    c2 = robust_prune_into(
                        points, matrix, euclid, q, overflow[: dq + 1], a, R,
                        ORDER_SORTED, 0, out,
                    )
                    table[q, :c2] = out[:c2]
                    table[q, c2:] = -1
                    degrees[q] = c2


@nb.njit(cache=True, nogil=True)
def audit_range(table, degrees, points, matrix, euclid, lo, hi):
    """Exact reachability over source vertices ``[lo, hi)``.

    Returns ``(alpha, p, z, witness)``; ``p == -1`` when every pair from the
    range is an edge.  ``witness == -1`` when ``p`` has no out-neighbours.
    """
    n = table.shape[0]
    is_nbr = np.zeros(n, dtype=np.bool_)
    best = np.inf
    bp = -1
    bz = -1
    bw = -1
    for p in range(lo, hi):
        dp = degrees[p]
        for e in range(dp):
            is_nbr[table[p, e]] = True
        for z in range(n):
            if z == p or is_nbr[z]:
                continue
            dpz = key_to_distance(pair_key(points, matrix, euclid, p, z), euclid)
            ratio = 0.0
            wit = -1
            for e in range(dp):
                w = table[p, e]
                r = dpz / key_to_distance(pair_key(points, matrix, euclid, w, z), euclid)
                if r > ratio or (r == ratio and wit >= 0 and w < wit):
                    ratio = r
                    wit = w
            if ratio < best:
                best = ratio
                bp = p
                bz = z
                bw = wit
        for e in range(dp):
            is_nbr[table[p, e]] = False
    return best, bp, bz, bw


@nb.njit(cache=True, nogil=True)
def fnv1a64_bytes(data):
    h = np.uint64(0xCBF29CE484222325)
    prime = np.uint64(0x100000001B3)
    for b in data:
        h = (h ^ np.uint64(b)) * prime
    return h
