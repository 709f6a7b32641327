"""Pure-Python kernels; same contract as the compiled ``_ckernels`` module.

All sets are bitmasks over compact indices (bit ``b`` is the ``b``-th
candidate node).  Callers do the translation between node ids and bits.
"""


def min_hitting_set(masks, limit):
    """Lexicographically first minimum set of bits meeting every mask.

    Returns the chosen bits as a mask, or -1 when no hitting set of size
    ``<= limit`` exists (including when some mask is empty).
    """
    masks = list(masks)
    if not masks:
        return 0
    if any(m == 0 for m in masks):
        return -1
    for k in range(min(limit, len(masks)) + 1):
        found = _hit(masks, 0, k, 0)
        if found >= 0:
            return found
    return -1


def _hit(masks, start, k, chosen):
    uncovered = [m for m in masks if not m & chosen]
    if not uncovered:
        return chosen
    if k == 0:
        return -1
    # Later picks are increasing, so a mask whose top bit is below the next
    # pick can never be hit.
    bound = min(m.bit_length() - 1 for m in uncovered)
    union = 0
    for m in uncovered:
        union |= m
    for b in range(start, bound + 1):
        # A minimum cover never contains a redundant element.
        if not union >> b & 1:
            continue
        found = _hit(uncovered, b + 1, k - 1, chosen | (1 << b))
        if found >= 0:
            return found
    return -1


def longest_prefix_within(masks, limit):
    """Largest ``q`` such that ``masks[:q]`` has a hitting set of size <= limit."""
    masks = list(masks)
    lo, hi = 0, len(masks)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if min_hitting_set(masks[:mid], limit) >= 0:
            lo = mid
        else:
            hi = mid - 1
    return lo


def max_disjoint(masks, cap):
    """Size of the largest family of pairwise disjoint masks, capped at ``cap``."""
    masks = list(masks)
    best = 0

    def rec(idx, used, count):
        nonlocal best
        if count > best:
            best = count
        if best >= cap:
            return
        for j in range(idx, len(masks)):
            if count + (len(masks) - j) <= best:
                return
            if not masks[j] & used:
                rec(j + 1, used | masks[j], count + 1)
                if best >= cap:
                    return

    rec(0, 0, 0)
    return min(best, cap)


def z_table(m, dest_paths, r):
    """Members of every subset that have ``r`` disjoint paths from outside it.

    ``dest_paths[i]`` lists ``(source_mask, interior_mask)`` for paths ending
    at compact node ``i``.  A path counts for subset ``S`` when its source is
    outside ``S`` and its interior lies inside ``S``; any packing of general
    paths can be cut back to such suffixes without losing disjointness.
    Returns a list ``t`` with ``t[S]`` the mask of qualifying members of ``S``.
    """
    size = 1 << m
    if r <= 0:
        return list(range(size))
    table = [0] * size
    for s_mask in range(1, size):
        z = 0
        rest = s_mask
        outside = ~s_mask
        while rest:
            low = rest & -rest
            rest ^= low
            i = low.bit_length() - 1
            cands = [src | inner for src, inner in dest_paths[i] if not src & s_mask and not inner & outside]
            if len(cands) >= r and max_disjoint(cands, r) >= r:
                z |= low
        table[s_mask] = z
    return table


def first_violation(table, m, s):
    """First ``(V1, V2)`` in ascending mask order violating all three conditions.

    A pair violates when neither set equals its qualifying subset and the
    qualifying subsets hold fewer than ``s`` nodes together.  Returns None
    when no pair violates.
    """
    size = 1 << m
    full = size - 1
    inf = 1 << 30
    best = [inf] * size
    for t in range(1, size):
        if table[t] != t:
            best[t] = table[t].bit_count()
    # Subset-minimum transform: best[mask] = min over deficient submasks.
    for b in range(m):
        bit = 1 << b
        for mask in range(size):
            if mask & bit and best[mask ^ bit] < best[mask]:
                best[mask] = best[mask ^ bit]
    for v1 in range(1, size):
        z1 = table[v1]
        if z1 == v1:
            continue
        c1 = z1.bit_count()
        if c1 + best[full ^ v1] >= s:
            continue
        for v2 in range(1, size):
            if v2 & v1 or table[v2] == v2:
                continue
            if c1 + table[v2].bit_count() < s:
                return v1, v2
    return None
