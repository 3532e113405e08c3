"""Pure-Python Sturm-sequence kernels (fallback for the compiled ``_sturm``).

Both implementations share one contract.  The pencil is ``T - x M`` with
``T`` symmetric tridiagonal (diagonal ``d``, squared off-diagonal ``e2``)
and ``M`` a nonnegative diagonal.  ``sturm_count`` returns the number of
negative pivots of its LDL^T factorization, which by Sylvester's law equals
the number of finite generalized eigenvalues strictly below ``x`` when
``T - x M`` is nonsingular.
"""
import math

import numpy as np


def sturm_count(d, e2, m, x, pivmin):
    d = d.tolist() if hasattr(d, "tolist") else list(d)
    e2 = e2.tolist() if hasattr(e2, "tolist") else list(e2)
    m = m.tolist() if hasattr(m, "tolist") else list(m)
    return _count(d, e2, m, x, pivmin)


def _count(d, e2, m, x, pivmin):
    neg = 0
    q = d[0] - x * m[0]
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        neg += 1
    for i in range(1, len(d)):
        q = d[i] - x * m[i] - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            neg += 1
    return neg


def _midpoint(lo, hi):
    if lo > 0.0 and hi > 2.0 * lo:
        return math.sqrt(lo * hi)
    if hi < 0.0 and lo < 2.0 * hi:
        return -math.sqrt(lo * hi)
    return 0.5 * (lo + hi)


def bisect_lowest(d, e2, m, count, lo, hi, rtol, atol, maxiter, pivmin):
    """Lowest ``count`` eigenvalues of the pencil by bisection.

    ``[lo, hi]`` must bracket all of them.  Returns ``(values, lower, upper,
    converged)``; unconverged entries hold the bracket midpoint.
    """
    dl = d.tolist()
    el = e2.tolist()
    ml = m.tolist()
    lower = [lo] * count
    upper = [hi] * count
    done = [False] * count
    for k in range(count):
        a = lower[k]
        b = upper[k]
        it = 0
        ok = True
        while b - a > max(rtol * max(abs(a), abs(b)), atol):
            if it >= maxiter:
                ok = False
                break
            x = _midpoint(a, b)
            if not (a < x < b):
                # bracket at floating-point resolution
                break
            c = _count(dl, el, ml, x, pivmin)
            # c eigenvalues lie below x
            for j in range(k, count):
                if j < c:
                    if x < upper[j]:
                        upper[j] = x
                elif x > lower[j]:
                    lower[j] = x
            a = lower[k]
            b = upper[k]
            it += 1
        done[k] = ok
    lower_a = np.array(lower)
    upper_a = np.array(upper)
    return 0.5 * (lower_a + upper_a), lower_a, upper_a, np.array(done)
