"""Compiled inner loops (numba). Callers validate inputs; nothing here raises."""
import numpy as np
import numba
from numba.cpython.unsafe.numbers import trailing_zeros


@numba.njit(cache=True)
def _fenwick_add(tree_w, tree_s, pos, w, s):
    size = tree_w.shape[0] - 1
    i = pos + 1
    while i <= size:
        tree_w[i] += w
        tree_s[i] += s
        i += i & (-i)


@numba.njit(cache=True)
def _fenwick_lower_bound(tree_w, tree_s, target, top):
    """Smallest 0-based rank whose prefix weight reaches ``target``.

    Returns (rank, prefix weight through rank, prefix sum through rank).
    """
    size = tree_w.shape[0] - 1
    pos = 0
    acc = 0
    step = top
    while step > 0:
        nxt = pos + step
        if nxt <= size and acc + tree_w[nxt] < target:
            pos = nxt
            acc += tree_w[nxt]
        step >>= 1
    pw = 0
    ps = 0.0
    j = pos + 1
    while j > 0:
        pw += tree_w[j]
        ps += tree_s[j]
        j -= j & (-j)
    return pos, pw, ps


@numba.njit(cache=True)
def segment_dp(vals, wts, k, tol):
    """Best partition of a weighted point sequence into at most ``k`` runs.

    Segment cost is the weighted L1 deviation from the segment's lower
    weighted median. Runs in O(N^2 (k + log N)).

    Returns (total cost, array of inclusive segment end positions). Among
    equal-cost partitions (within ``tol``) the one with lexicographically
    smallest ends is kept.
    """
    N = vals.shape[0]
    order = np.argsort(vals, kind="mergesort")
    uvals = np.empty(N, dtype=np.float64)
    rank = np.empty(N, dtype=np.int64)
    R = 0
    for t in range(N):
        idx = order[t]
        if R == 0 or vals[idx] != uvals[R - 1]:
            uvals[R] = vals[idx]
            R += 1
        rank[idx] = R - 1
    top = 1
    while top * 2 <= R:
        top *= 2

    INF = np.inf
    E = np.full((k + 1, N + 1), INF)
    choice = np.full((k + 1, N + 1), -1, dtype=np.int64)
    for j in range(k + 1):
        E[j, N] = 0.0
    tree_w = np.zeros(R + 1, dtype=np.int64)
    tree_s = np.zeros(R + 1, dtype=np.float64)

    for a in range(N - 1, -1, -1):
        tree_w[:] = 0
        tree_s[:] = 0.0
        W = 0
        S = 0.0
        for b in range(a, N):
            w = wts[b]
            v = vals[b]
            _fenwick_add(tree_w, tree_s, rank[b], w, w * v)
            W += w
            S += w * v
            target = (W - 1) // 2 + 1
            r, pw, ps = _fenwick_lower_bound(tree_w, tree_s, target, top)
            med = uvals[r]
            cost = med * pw - ps + (S - ps) - med * (W - pw)
            if cost < 0.0:
                cost = 0.0
            for j in range(1, k + 1):
                rest = E[j - 1, b + 1]
                if rest == INF:
                    continue
                cand = cost + rest
                if cand < E[j, a] - tol:
                    E[j, a] = cand
                    choice[j, a] = b

    ends = np.empty(k, dtype=np.int64)
    cnt = 0
    a = 0
    j = k
    while a < N:
        b = choice[j, a]
        ends[cnt] = b
        cnt += 1
        a = b + 1
        j -= 1
    return E[k, 0], ends[:cnt]


@numba.njit(cache=True)
def lower_weighted_median(vals, wts):
    order = np.argsort(vals, kind="mergesort")
    W = 0
    for t in range(wts.shape[0]):
        W += wts[t]
    target = (W - 1) // 2 + 1
    acc = 0
    for t in range(order.shape[0]):
        acc += wts[order[t]]
        if acc >= target:
            return vals[order[t]]
    return vals[order[order.shape[0] - 1]]


# ---------------------------------------------------------------------------
# L0 samplers


@numba.njit(cache=True)
def mix64(x, seed):
    """splitmix64 finaliser applied to ``x * golden + seed`` (wrapping uint64)."""
    z = np.uint64(x) * np.uint64(0x9E3779B97F4A7C15) + seed
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _depth(h, cap):
    """Trailing zero bits of ``h``, capped at ``cap``."""
    if h == np.uint64(0):
        return cap
    d = np.int64(trailing_zeros(h))
    return d if d < cap else cap


@numba.njit(cache=True)
def l0_update(cnt, idx, sq, seeds, group_start, item_lo, item_hi, items, deltas):
    """Fold sorted, aggregated updates into the samplers of each interval group.

    Group ``g`` owns samplers ``group_start[g]:group_start[g+1]`` and the
    updates ``item_lo[g]:item_hi[g]``. ``cnt``/``idx``/``sq`` have shape
    (samplers, reps, depths); an item lands only in the bucket of its hash
    depth (trailing zero bits, capped). Nested subsampling level ``l`` is the
    sum of buckets ``l..``, so level 0 sees everything. ``sq`` wraps mod 2**64.
    """
    S, Rr, L = cnt.shape
    cap = L - 1
    T = items.shape[0]
    usq = np.empty(T, dtype=np.uint64)
    for t in range(T):
        ux = np.uint64(items[t])
        usq[t] = ux * ux * np.uint64(deltas[t])
    for g in range(group_start.shape[0] - 1):
        lo = item_lo[g]
        hi = item_hi[g]
        if lo >= hi:
            continue
        for s in range(group_start[g], group_start[g + 1]):
            for r in range(Rr):
                seed = seeds[s, r]
                for t in range(lo, hi):
                    x = items[t]
                    d = deltas[t]
                    dep = _depth(mix64(x, seed), cap)
                    cnt[s, r, dep] += d
                    idx[s, r, dep] += d * x
                    sq[s, r, dep] += usq[t]


@numba.njit(cache=True)
def l0_recover(cnt, idx, sq, lo, hi):
    """Per sampler: status (0 failed, 1 recovered, 2 provably empty), item, count.

    For each repetition the deepest non-empty level is tested for
    1-sparsity; shallower levels hold a superset of its items, so they cannot
    pass when it fails. The first repetition that passes wins.
    """
    S, Rr, L = cnt.shape
    status = np.zeros(S, dtype=np.int64)
    item = np.zeros(S, dtype=np.int64)
    count = np.zeros(S, dtype=np.int64)
    for s in range(S):
        total = 0
        for lv in range(L):
            total += cnt[s, 0, lv]
        if total == 0:
            status[s] = 2
            continue
        for r in range(Rr):
            lv = L - 1
            while lv >= 0 and cnt[s, r, lv] == 0:
                lv -= 1
            if lv < 0:
                continue
            c = cnt[s, r, lv]
            if c <= 0 or idx[s, r, lv] % c != 0:
                continue
            x = idx[s, r, lv] // c
            if x < lo[s] or x > hi[s]:
                continue
            ux = np.uint64(x)
            if sq[s, r, lv] != ux * ux * np.uint64(c):
                continue
            status[s] = 1
            item[s] = x
            count[s] = c
            break
    return status, item, count
