"""Pure Python/numpy reference implementations of the hot kernels."""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "pure"


def regrow_wood(res_kind, res_amt, wood_code: int, rate: float, cap: int) -> int:
    """Grow every live wood cell below `cap` by ceil(amount * rate), in place.

    Returns the total amount grown.
    """
    mask = (res_kind == wood_code) & (res_amt > 0) & (res_amt < cap)
    if not mask.any():
        return 0
    delta = np.ceil(res_amt[mask] * rate).astype(res_amt.dtype)
    res_amt[mask] += delta
    return int(delta.sum())


def water_fill(amount: int, requests: list) -> tuple:
    """Integer fair-share allocation of one tile among simultaneous requests.

    Repeatedly grants every still-active requester ``min(its remaining
    request, floor(remaining / active))``.  When the remainder is too small
    to give every active requester at least one unit, it is wasted.

    Returns ``(grants, wasted)``; the tile loses ``sum(grants) + wasted``.
    """
    grants = [0] * len(requests)
    remaining = list(requests)
    wasted = 0
    while amount > 0:
        active = [i for i, r in enumerate(remaining) if r > 0]
        if not active:
            break
        share = amount // len(active)
        if share == 0:
            wasted = amount
            amount = 0
            break
        for i in active:
            grant = min(remaining[i], share)
            grants[i] += grant
            remaining[i] -= grant
            amount -= grant
    return grants, wasted


def diagonal_run_count(grid, min_len: int) -> int:
    """Count maximal diagonal runs of truthy cells with length >= min_len.

    Both diagonal directions (down-right and down-left) are scanned; a
    maximal run counts once.
    """
    h, w = grid.shape
    count = 0
    for dx in (1, -1):
        if dx == 1:
            starts = [(x, 0) for x in range(w)] + [(0, y) for y in range(1, h)]
        else:
            starts = [(x, 0) for x in range(w)] + [(w - 1, y) for y in range(1, h)]
        for x0, y0 in starts:
            run = 0
            x, y = x0, y0
            while 0 <= x < w and y < h:
                if grid[y, x]:
                    run += 1
                else:
                    if run >= min_len:
                        count += 1
                    run = 0
                x += dx
                y += 1
            if run >= min_len:
                count += 1
    return count
