"""Numpy implementations of the hot kernels; exact over int64."""

from __future__ import annotations

import numpy as np


def sweep_norms(ga, gb, pa, pb, d, tau_c):
    # (xa + xb w)(ya + yb w): w^2 = -d, or w^2 = w - tau_c when tau_c >= 0
    xa = ga @ pa
    xb = gb @ pb
    cross = ga @ pb + gb @ pa
    if tau_c < 0:
        ra = xa - d * xb
        rb = cross
        return ra * ra + d * rb * rb
    ra = xa - tau_c * xb
    rb = cross + xb
    return ra * ra + ra * rb + tau_c * rb * rb


def points_in_hulls(samples, normals, offsets, starts):
    ns = samples.shape[0]
    covered = np.zeros(ns, dtype=bool)
    for r in range(len(starts) - 1):
        lo, hi = starts[r], starts[r + 1]
        todo = ~covered
        if not todo.any():
            break
        sub = samples[todo]
        inside = (sub @ normals[lo:hi].T >= offsets[lo:hi]).all(axis=1)
        covered[todo] = inside
    return covered
