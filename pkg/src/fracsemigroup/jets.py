"""Arithmetic on derivative jets.

A jet of order ``K`` is an array ``J`` of shape ``(K+1,) + shape`` with
``J[j] = f^{(j)}`` at every evaluation point.  Products use Leibniz, powers
and exponentials use the usual first-order ODE recurrences, quotients go
through :func:`fracsemigroup.special.quotient_derivative`.
"""
import math

import numpy as np

from .special import quotient_derivative, reciprocal_derivative


def constant(value, order, shape=()):
    out = np.zeros((order + 1,) + tuple(shape))
    out[0] = value
    return out


def mul(a, b):
    K = min(len(a), len(b)) - 1
    out = np.zeros((K + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(K + 1):
        for i in range(k + 1):
            out[k] += math.comb(k, i) * a[i] * b[k - i]
    return out


def div(u, v):
    return np.array(quotient_derivative(list(u), list(v)))


def recip(v):
    return np.array(reciprocal_derivative(list(v)))


def power(q, a):
    """Jet of ``q**a`` for ``q > 0`` from ``q h' = a q' h``."""
    K = len(q) - 1
    h = np.zeros_like(q, dtype=float)
    h[0] = q[0] ** a
    for k in range(K):
        acc = a * sum(math.comb(k, i) * q[i + 1] * h[k - i] for i in range(k + 1))
        acc = acc - sum(math.comb(k, i) * q[i] * h[k + 1 - i] for i in range(1, k + 1))
        h[k + 1] = acc / q[0]
    return h


def exp(g):
    """Jet of ``exp(g)`` from ``h' = g' h``."""
    K = len(g) - 1
    h = np.zeros_like(g, dtype=float)
    h[0] = np.exp(g[0])
    for k in range(K):
        h[k + 1] = sum(math.comb(k, i) * g[i + 1] * h[k - i] for i in range(k + 1))
    return h


def monomial(r, p, order):
    """Jet of ``r**p`` (real ``p``, ``r > 0``)."""
    r = np.asarray(r, dtype=float)
    out = np.empty((order + 1,) + r.shape)
    c = 1.0
    for j in range(order + 1):
        out[j] = c * r ** (p - j)
        c *= p - j
    return out


def scale_argument(jet, s):
    """Jet of ``f(s r)`` given the jet of ``f`` evaluated at ``s r``."""
    factors = s ** np.arange(len(jet), dtype=float)
    return jet * factors.reshape((-1,) + (1,) * (jet.ndim - 1))
