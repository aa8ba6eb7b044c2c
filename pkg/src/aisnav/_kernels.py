"""Compiled geometry kernels for the inner simulation loop."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _segment_distance(walls, x, y):
    best = np.inf
    for k in range(walls.shape[0]):
        px, py = walls[k, 0], walls[k, 1]
        ex, ey = walls[k, 2] - px, walls[k, 3] - py
        ll = ex * ex + ey * ey
        u = 0.0
        if ll > 0.0:
            u = ((x - px) * ex + (y - py) * ey) / ll
            u = min(1.0, max(0.0, u))
        dx = px + u * ex - x
        dy = py + u * ey - y
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
    return math.sqrt(best)


@njit(cache=True)
def _ray_segments(walls, x, y, bearings, max_range):
    out = np.full(bearings.shape[0], max_range)
    for i in range(bearings.shape[0]):
        dx = math.cos(bearings[i])
        dy = math.sin(bearings[i])
        for k in range(walls.shape[0]):
            px, py = walls[k, 0] - x, walls[k, 1] - y
            ex, ey = walls[k, 2] - walls[k, 0], walls[k, 3] - walls[k, 1]
            denom = dx * ey - dy * ex
            if abs(denom) <= 1e-15:
                continue
            s = (px * ey - py * ex) / denom
            u = (px * dy - py * dx) / denom
            if s >= 0.0 and 0.0 <= u <= 1.0 and s < out[i]:
                out[i] = s
    return out


@njit(cache=True)
def _ray_discs(discs, x, y, bearings, max_range):
    out = np.full(bearings.shape[0], max_range)
    for i in range(bearings.shape[0]):
        dx = math.cos(bearings[i])
        dy = math.sin(bearings[i])
        for k in range(discs.shape[0]):
            cx, cy, r = discs[k, 0] - x, discs[k, 1] - y, discs[k, 2]
            b = dx * cx + dy * cy
            disc = b * b - (cx * cx + cy * cy - r * r)
            if disc < 0.0:
                continue
            root = math.sqrt(disc)
            if b - root >= 0.0:
                s = b - root
            elif b + root >= 0.0:
                s = 0.0
            else:
                continue
            if s < out[i]:
                out[i] = s
    return out
