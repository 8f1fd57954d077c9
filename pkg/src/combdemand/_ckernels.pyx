# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

All arithmetic is int64; the dispatcher in ``kernels`` only routes inputs here
after checking that no intermediate can overflow.
"""
from cpython.array cimport array, clone

cdef array _QTEMPLATE = array('q', [])

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline array _zeros(Py_ssize_t size):
    return clone(_QTEMPLATE, size, True)


cdef inline long long _dot(const long long[::1] p, Py_ssize_t off, Py_ssize_t n,
                           long long mask) noexcept nogil:
    cdef long long s = 0
    cdef Py_ssize_t x
    for x in range(n):
        if (mask >> x) & 1:
            s += p[off + x]
    return s


cdef inline void _costs(const long long[::1] p, Py_ssize_t off, Py_ssize_t size,
                        long long[::1] out) noexcept nogil:
    cdef Py_ssize_t a
    cdef long long low
    out[0] = 0
    for a in range(1, size):
        low = a & -a
        out[a] = out[a ^ low] + p[off + __builtin_ctzll(<unsigned long long>low)]


def demand_batch(const long long[::1] values, const long long[::1] prices,
                 Py_ssize_t n, Py_ssize_t m):
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef array cost_arr = _zeros(size)
    cdef long long[::1] cost = cost_arr
    cdef array surplus_arr = _zeros(m)
    cdef long long[::1] surplus = surplus_arr
    cdef array offsets_arr = _zeros(m + 1)
    cdef long long[::1] offsets = offsets_arr
    cdef list masks = []
    cdef Py_ssize_t i, a
    cdef long long best, s
    for i in range(m):
        _costs(prices, i * n, size, cost)
        best = values[0]
        for a in range(1, size):
            s = values[a] - cost[a]
            if s > best:
                best = s
        surplus[i] = best
        for a in range(size):
            if values[a] - cost[a] == best:
                masks.append(a)
        offsets[i + 1] = len(masks)
    return surplus_arr, offsets_arr, masks


def edge_weights(const long long[::1] prices, Py_ssize_t n,
                 const long long[::1] pair_obs, const long long[::1] pair_node,
                 const long long[::1] node_masks):
    cdef Py_ssize_t nv = node_masks.shape[0]
    cdef Py_ssize_t k = pair_obs.shape[0]
    cdef array weights_arr = _zeros(nv * nv)
    cdef long long[::1] weights = weights_arr
    cdef array witness_arr = _zeros(nv * nv)
    cdef long long[::1] witness = witness_arr
    cdef Py_ssize_t t, u, w, idx, off
    cdef long long pw, c
    for idx in range(nv * nv):
        witness[idx] = -1
    with nogil:
        for t in range(k):
            off = pair_obs[t] * n
            w = pair_node[t]
            pw = _dot(prices, off, n, node_masks[w])
            for u in range(nv):
                if u == w:
                    continue
                c = _dot(prices, off, n, node_masks[u]) - pw
                idx = u * nv + w
                if witness[idx] < 0 or c < weights[idx]:
                    weights[idx] = c
                    witness[idx] = t
    return weights_arr, witness_arr


def negative_cycle(const long long[::1] weights, Py_ssize_t nv):
    cdef array dist_arr = _zeros(nv)
    cdef long long[::1] dist = dist_arr
    cdef array pred_arr = _zeros(nv)
    cdef long long[::1] pred = pred_arr
    cdef Py_ssize_t r, u, w, row
    cdef long long du
    cdef bint changed = False
    for u in range(nv):
        pred[u] = -1
    with nogil:
        for r in range(nv + 1):
            changed = False
            for u in range(nv):
                du = dist[u]
                row = u * nv
                for w in range(nv):
                    if u != w and du + weights[row + w] < dist[w]:
                        dist[w] = du + weights[row + w]
                        pred[w] = u
                        changed = True
            if not changed:
                break
    if not changed:
        return []
    return _pred_cycle(pred, nv)


cdef list _pred_cycle(long long[::1] pred, Py_ssize_t nv):
    cdef array stamp_arr = _zeros(nv)
    cdef long long[::1] stamp = stamp_arr
    cdef Py_ssize_t start
    cdef long long x, y
    cdef list cycle
    for start in range(nv):
        stamp[start] = -1
    for start in range(nv):
        x = start
        while x >= 0 and stamp[x] < 0:
            stamp[x] = start
            x = pred[x]
        if x >= 0 and stamp[x] == start:
            cycle = [x]
            y = pred[x]
            while y != x:
                cycle.append(y)
                y = pred[y]
            cycle.reverse()
            return cycle
    return []


def shortest_to(const long long[::1] weights, Py_ssize_t nv, Py_ssize_t target):
    cdef array dist_arr = _zeros(nv)
    cdef long long[::1] dist = dist_arr
    cdef array succ_arr = _zeros(nv)
    cdef long long[::1] succ = succ_arr
    cdef array reached_arr = _zeros(nv)
    cdef long long[::1] reached = reached_arr
    cdef Py_ssize_t r, u, w
    cdef long long dw, c
    cdef bint changed = True
    for u in range(nv):
        succ[u] = -1
    reached[target] = 1
    with nogil:
        for r in range(nv + 1):
            changed = False
            for w in range(nv):
                if not reached[w]:
                    continue
                dw = dist[w]
                for u in range(nv):
                    if u == w:
                        continue
                    c = weights[u * nv + w] + dw
                    if not reached[u] or c < dist[u]:
                        dist[u] = c
                        reached[u] = 1
                        succ[u] = w
                        changed = True
            if not changed:
                break
    if changed:
        return None
    return dist_arr, succ_arr


def lod_scan(const long long[::1] prices, Py_ssize_t n,
             const long long[::1] offsets, const long long[::1] masks, Py_ssize_t m):
    cdef array d_arr = _zeros(n)
    cdef long long[::1] d = d_arr
    cdef Py_ssize_t i, j, x, ta, tb
    cdef long long val, xa, best = 0
    cdef long long bi = -1, bj = -1, ba = 0, bb = 0
    cdef bint found = False
    with nogil:
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                for x in range(n):
                    d[x] = prices[i * n + x] - prices[j * n + x]
                for ta in range(offsets[i], offsets[i + 1]):
                    xa = _dot(d, 0, n, masks[ta])
                    for tb in range(offsets[j], offsets[j + 1]):
                        val = xa - _dot(d, 0, n, masks[tb])
                        if not found or val > best:
                            found = True
                            best = val
                            bi = i
                            bj = j
                            ba = masks[ta]
                            bb = masks[tb]
    if not found:
        return None
    return best, bi, bj, ba, bb


def envelope_min(const long long[::1] prices, Py_ssize_t n,
                 const long long[::1] piece_obs, const long long[::1] intercepts):
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef Py_ssize_t k = piece_obs.shape[0]
    cdef array cost_arr = _zeros(size)
    cdef long long[::1] cost = cost_arr
    cdef array values_arr = _zeros(size)
    cdef long long[::1] values = values_arr
    cdef array seen_arr = _zeros(size)
    cdef long long[::1] seen = seen_arr
    cdef array active_arr = _zeros(k)
    cdef long long[::1] active = active_arr
    cdef Py_ssize_t t, a
    cdef long long val
    with nogil:
        for t in range(k):
            _costs(prices, piece_obs[t] * n, size, cost)
            for a in range(size):
                val = cost[a] + intercepts[t]
                if not seen[a] or val < values[a]:
                    values[a] = val
                    seen[a] = 1
        for t in range(k):
            _costs(prices, piece_obs[t] * n, size, cost)
            for a in range(size):
                if cost[a] + intercepts[t] == values[a]:
                    active[t] = 1
                    break
    return values_arr, active_arr
