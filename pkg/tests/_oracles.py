"""Independent oracles used by the tests.

The DTW oracle enumerates every monotone warping path explicitly and takes
the cheapest one; it shares no code with the dynamic-programming
implementation it checks.
"""

import itertools

import numpy as np


def all_warping_paths(n, m):
    """Every monotone path of (i, j) index pairs from (0,0) to (n-1,m-1)
    moving by (+1,0), (0,+1) or (+1,+1)."""
    paths = []

    def rec(i, j, acc):
        if i == n - 1 and j == m - 1:
            paths.append(list(acc))
            return
        if i + 1 < n:
            acc.append((i + 1, j))
            rec(i + 1, j, acc)
            acc.pop()
        if j + 1 < m:
            acc.append((i, j + 1))
            rec(i, j + 1, acc)
            acc.pop()
        if i + 1 < n and j + 1 < m:
            acc.append((i + 1, j + 1))
            rec(i + 1, j + 1, acc)
            acc.pop()

    rec(0, 0, [(0, 0)])
    return paths


def dtw_oracle(x, y):
    """Minimum |x_i - y_j| path cost by brute-force path enumeration."""
    best = None
    for path in all_warping_paths(len(x), len(y)):
        cost = sum(abs(x[i] - y[j]) for i, j in path)
        if best is None or cost < best:
            best = cost
    return best


def all_curves(length, values=(0, 1, 2)):
    """Every curve of the given length over the value set, as a 2-D array."""
    return np.array(list(itertools.product(values, repeat=length)),
                    dtype=np.float64)


def oracle_all_pairs(xs, ys):
    """Oracle DTW distance for every (row of xs, row of ys) pair.

    Returns an (len(xs), len(ys)) array.  Vectorized over pairs (chunked
    matmul against the path incidence matrix) but still a pure
    path-enumeration oracle: the minimum over explicitly enumerated paths.
    """
    n = xs.shape[1]
    m = ys.shape[1]
    paths = all_warping_paths(n, m)
    incidence = np.zeros((len(paths), n * m))
    for k, path in enumerate(paths):
        for i, j in path:
            incidence[k, i * m + j] += 1.0
    a = len(xs)
    b = len(ys)
    out = np.empty(a * b)
    row_chunk = max(1, 1_000_000 // max(1, b))
    for s in range(0, a, row_chunk):
        costs = np.abs(xs[s:s + row_chunk, None, :, None] -
                       ys[None, :, None, :]).reshape(-1, n * m)
        best = np.full(costs.shape[0], np.inf)
        for ps in range(0, len(paths), 512):
            np.minimum(best, (costs @ incidence[ps:ps + 512].T).min(axis=1),
                       out=best)
        out[s * b:s * b + costs.shape[0]] = best
    return out.reshape(a, b)
