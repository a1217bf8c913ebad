"""Exact independence and chromatic numbers for small graphs.

Graphs are adjacency bitmasks: ``nbrs[v]`` has bit w set when v ~ w.
"""

from __future__ import annotations


def _greedy_color_order(cand: int, nbrs: list[int]) -> tuple[list[int], list[int]]:
    # Tomita-style sequential colouring; colour number bounds the clique size.
    order, bounds = [], []
    uncolored = cand
    color = 0
    while uncolored:
        color += 1
        avail = uncolored
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v) & ~nbrs[v]
            uncolored &= ~(1 << v)
            order.append(v)
            bounds.append(color)
    return order, bounds


def max_clique_size(nbrs: list[int], candidates: int | None = None) -> int:
    if candidates is None:
        candidates = (1 << len(nbrs)) - 1
    best = 0

    def expand(cand: int, size: int):
        nonlocal best
        if not cand:
            best = max(best, size)
            return
        order, bounds = _greedy_color_order(cand, nbrs)
        for v, b in zip(reversed(order), reversed(bounds)):
            if size + b <= best:
                return
            expand(cand & nbrs[v], size + 1)
            cand &= ~(1 << v)

    expand(candidates, 0)
    return best


def independence_number(nbrs: list[int]) -> int:
    """Largest edgeless vertex set; vertices with loops are never included."""
    n = len(nbrs)
    full = (1 << n) - 1
    loops = sum(1 << v for v in range(n) if nbrs[v] >> v & 1)
    comp = [(full & ~nbrs[v] & ~(1 << v)) for v in range(n)]
    return max_clique_size(comp, full & ~loops)


def _k_colorable(nbrs: list[int], k: int) -> bool:
    n = len(nbrs)
    colors = [-1] * n

    def pick() -> int:
        # DSATUR: most distinct neighbour colours, then highest degree
        best, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                seen = {colors[w] for w in _bits(nbrs[v]) if colors[w] >= 0}
                cand = (len(seen), bin(nbrs[v]).count("1"))
                if key is None or cand > key:
                    best, key = v, cand
        return best

    def solve(done: int) -> bool:
        if done == n:
            return True
        v = pick()
        used = {colors[w] for w in _bits(nbrs[v]) if colors[w] >= 0}
        top = max(colors) + 1
        for c in range(min(k, top + 1)):
            if c not in used:
                colors[v] = c
                if solve(done + 1):
                    return True
                colors[v] = -1
        return False

    return solve(0)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def chromatic_number(nbrs: list[int]) -> int:
    n = len(nbrs)
    if any(nbrs[v] >> v & 1 for v in range(n)):
        raise ValueError("a graph with loops has no proper colouring")
    if n == 0:
        return 0
    k = max(1, max_clique_size(nbrs))
    while not _k_colorable(nbrs, k):
        k += 1
    return k
