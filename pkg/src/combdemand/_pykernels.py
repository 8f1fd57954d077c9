"""Pure-Python kernels over scaled integers.

Every routine here has a twin in ``_ckernels.pyx`` with the same signature and
the same results. Inputs are flat sequences of Python ints (rationals already
multiplied by a common denominator), so this module is exact for any
magnitude; the compiled twin is restricted to values that fit in int64.
"""


def bundle_costs(prices, off, n):
    """Return ``<p, A>`` for every bitmask ``A`` over ``n`` items."""
    costs = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        costs[mask] = costs[mask ^ low] + prices[off + low.bit_length() - 1]
    return costs


def _dot(prices, off, n, mask):
    s = 0
    x = 0
    while mask:
        if mask & 1:
            s += prices[off + x]
        mask >>= 1
        x += 1
    return s


def demand_batch(values, prices, n, m):
    size = 1 << n
    surplus = []
    offsets = [0]
    masks = []
    for i in range(m):
        costs = bundle_costs(prices, i * n, n)
        s = [values[a] - costs[a] for a in range(size)]
        best = max(s)
        surplus.append(best)
        masks.extend(a for a in range(size) if s[a] == best)
        offsets.append(len(masks))
    return surplus, offsets, masks


def edge_weights(prices, n, pair_obs, pair_node, node_masks):
    nv = len(node_masks)
    weights = [0] * (nv * nv)
    witness = [-1] * (nv * nv)
    for t in range(len(pair_obs)):
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
    return weights, witness


def negative_cycle(weights, nv):
    """Bellman-Ford from a virtual source joined to every node by 0-edges.

    Returns the nodes of a negative cycle in edge order, or ``[]``.
    """
    dist = [0] * nv
    pred = [-1] * nv
    for _ in range(nv + 1):
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
            return []
    return _pred_cycle(pred, nv)


def _pred_cycle(pred, nv):
    stamp = [-1] * nv
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


def shortest_to(weights, nv, target):
    """Shortest path cost from every node to ``target``.

    Returns ``(dist, succ)`` or ``None`` when a negative cycle is reachable.
    """
    dist = [0] * nv
    reached = [False] * nv
    succ = [-1] * nv
    reached[target] = True
    for _ in range(nv + 1):
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
                    reached[u] = True
                    succ[u] = w
                    changed = True
        if not changed:
            return dist, succ
    return None


def lod_scan(prices, n, offsets, masks, m):
    """Largest ``<p_i - p_j, A - B>`` over ordered observation pairs.

    Ties keep the lexicographically lowest ``(i, j, A, B)``. Returns
    ``(value, i, j, A, B)`` or ``None`` when there are fewer than two
    observations.
    """
    best = None
    for i in range(m):
        oi = i * n
        for j in range(m):
            if i == j:
                continue
            oj = j * n
            d = [prices[oi + x] - prices[oj + x] for x in range(n)]
            da = [_dot(d, 0, n, masks[t]) for t in range(offsets[i], offsets[i + 1])]
            db = [_dot(d, 0, n, masks[t]) for t in range(offsets[j], offsets[j + 1])]
            for ka, xa in enumerate(da):
                for kb, xb in enumerate(db):
                    val = xa - xb
                    if best is None or val > best[0]:
                        best = (val, i, j, masks[offsets[i] + ka], masks[offsets[j] + kb])
    return best


def envelope_min(prices, n, piece_obs, intercepts):
    """Lower envelope ``min_k <p_k, A> + c_k`` at every bitmask ``A``.

    Returns ``(values, active)`` where ``active[k]`` is 1 when piece ``k``
    attains the minimum at some bundle.
    """
    size = 1 << n
    values = [0] * size
    seen = [False] * size
    for k in range(len(piece_obs)):
        costs = bundle_costs(prices, piece_obs[k] * n, n)
        c = intercepts[k]
        for a in range(size):
            val = costs[a] + c
            if not seen[a] or val < values[a]:
                values[a] = val
                seen[a] = True
    active = [0] * len(piece_obs)
    for k in range(len(piece_obs)):
        costs = bundle_costs(prices, piece_obs[k] * n, n)
        c = intercepts[k]
        if any(costs[a] + c == values[a] for a in range(size)):
            active[k] = 1
    return values, active
