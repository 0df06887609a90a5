"""Independent reference implementations used by the tests."""

import math
from fractions import Fraction

import numpy as np


def naive_forward(model, X):
    # row-by-row loops, no shared code with the vectorized pass
    out = []
    for x in X:
        h1 = [max(0.0, sum(w * v for w, v in zip(row, x)) + b) for row, b in zip(model.weights_1, model.bias_1)]
        h2 = [max(0.0, sum(w * v for w, v in zip(row, h1)) + b) for row, b in zip(model.weights_2, model.bias_2)]
        out.append(sum(w * v for w, v in zip(np.ravel(model.weights_out), h2)) + model.bias_out)
    return np.array(out)


def naive_pl_loss(scores, perm):
    s = [float(scores[i]) for i in perm]
    return sum(math.log(sum(math.exp(v) for v in s[i:])) - s[i] for i in range(len(s)))


def _extended_pl_loss(t):
    m = t.max()
    suffix = np.log(np.cumsum(np.exp(t[::-1] - m))[::-1]) + m
    return np.sum(suffix - t)


def fd_pl_gradient(scores, perm, h=1e-5):
    """Central differences of the listwise loss, evaluated in extended precision.

    A loss of size ~n log n differenced at h = 1e-5 loses about 1e-13 / h
    to float64 cancellation; 80-bit arithmetic keeps that well below the
    truncation error.
    """
    base = np.asarray(scores).astype(np.longdouble)
    perm = np.asarray(perm)
    hl = np.longdouble(h)
    out = np.empty(base.size)
    for i in range(base.size):
        up, down = base.copy(), base.copy()
        up[i] += hl
        down[i] -= hl
        out[i] = float((_extended_pl_loss(up[perm]) - _extended_pl_loss(down[perm])) / (2 * hl))
    return out


def pairwise_rank_rho(u, v):
    # rank_i = number of strictly smaller entries, by explicit pair counting
    n = len(u)
    ru = [sum(1 for b in u if b < a) for a in u]
    rv = [sum(1 for b in v if b < a) for a in v]
    d2 = sum((a - b) ** 2 for a, b in zip(ru, rv))
    return float(1 - Fraction(6 * d2, n * (n * n - 1)))
