"""Compiled inner loops. All kernels take 1-D int64 arrays of letter ranks."""

import numpy as np
from numba import njit


@njit(cache=True)
def duval_ends(w):
    """End offsets (exclusive) of the Lyndon factors of ``w``, left to right."""
    n = w.shape[0]
    ends = np.empty(n, dtype=np.int64)
    count = 0
    i = 0
    while i < n:
        j = i + 1
        k = i
        while j < n and w[k] <= w[j]:
            if w[k] < w[j]:
                k = i
            else:
                k += 1
            j += 1
        period = j - k
        while i <= k:
            i += period
            ends[count] = i
            count += 1
    return ends[:count]


@njit(cache=True)
def is_lyndon(w):
    n = w.shape[0]
    if n == 0:
        return False
    k = 0
    j = 1
    while j < n and w[k] <= w[j]:
        if w[k] < w[j]:
            k = 0
        else:
            k += 1
        j += 1
    return j == n and k == 0


@njit(cache=True)
def least_rotation(w):
    """Smallest index ``r`` such that ``w[r:] + w[:r]`` is the minimal rotation."""
    n = w.shape[0]
    i = 0
    best = 0
    while i < n:
        best = i
        j = i + 1
        k = i
        while j < 2 * n and w[k % n] <= w[j % n]:
            if w[k % n] < w[j % n]:
                k = i
            else:
                k += 1
            j += 1
        while i <= k:
            i += j - k
    return best


@njit(cache=True)
def smallest_period(w):
    """Length of the shortest period of ``w`` (KMP border)."""
    n = w.shape[0]
    fail = np.zeros(n, dtype=np.int64)
    k = 0
    for i in range(1, n):
        while k > 0 and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    return n - fail[n - 1]


@njit(cache=True)
def smallest_suffix_start(w):
    """Start of the lexicographically smallest nonempty suffix (last Lyndon factor)."""
    ends = duval_ends(w)
    if ends.shape[0] == 1:
        return 0
    return ends[ends.shape[0] - 2]
