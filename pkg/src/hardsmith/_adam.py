"""Fused Adam ascent kernels.

Weight gradients of a dense layer are outer products ``outer(x, delta)``.
Materialising them at n = 1024 would cost another gigabyte, so the kernels
form each gradient entry on the fly while updating the moments in place.
"""

import numba
import numpy as np


@numba.njit(fastmath=True, error_model="numpy", cache=True)
def adam_row(w, m, v, g_scale, delta, b1, b2, step, ic2, eps):
    """Ascent step on vector ``w`` with gradient ``g_scale * delta``."""
    a1 = 1 - b1
    a2 = 1 - b2
    for j in range(delta.shape[0]):
        g = g_scale * delta[j]
        mm = b1 * m[j] + a1 * g
        vv = b2 * v[j] + a2 * g * g
        m[j] = mm
        v[j] = vv
        w[j] += step * mm / (np.sqrt(vv * ic2) + eps)


@numba.njit(fastmath=True, error_model="numpy", cache=True)
def adam_outer(w, m, v, x, delta, b1, b2, step, ic2, eps):
    """Ascent step on ``w`` (shape ``len(x) x len(delta)``) with gradient outer(x, delta)."""
    for i in range(w.shape[0]):
        adam_row(w[i], m[i], v[i], x[i], delta, b1, b2, step, ic2, eps)


@numba.njit(fastmath=True, error_model="numpy", cache=True)
def adam_outer_back(w, m, v, x, delta, back, b1, b2, step, ic2, eps):
    """As :func:`adam_outer`, also writing ``back = w_old @ delta``.

    Backpropagation through a layer needs its weights before the update;
    reading them in the same sweep saves a full pass over ``w``.
    """
    a1 = 1 - b1
    a2 = 1 - b2
    for i in range(w.shape[0]):
        xi = x[i]
        wi = w[i]
        mi = m[i]
        vi = v[i]
        acc = 0.0
        for j in range(delta.shape[0]):
            wij = wi[j]
            acc += wij * delta[j]
            g = xi * delta[j]
            mm = b1 * mi[j] + a1 * g
            vv = b2 * vi[j] + a2 * g * g
            mi[j] = mm
            vi[j] = vv
            wi[j] = wij + step * mm / (np.sqrt(vv * ic2) + eps)
        back[i] = acc


def adam_dense(w, m, v, grad, b1, b2, step, ic2, eps):
    """Plain numpy Adam ascent on arrays of any shape (reference path)."""
    m *= b1
    m += (1 - b1) * grad
    v *= b2
    v += (1 - b2) * grad * grad
    w += step * m / (np.sqrt(v * ic2) + eps)
