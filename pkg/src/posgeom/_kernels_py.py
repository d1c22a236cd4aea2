"""Pure-Python kernels; reference implementation for ``_kernels.pyx``.

Term maps are dicts from exponent tuples to nonzero coefficients. Matrices
are lists of lists of Python ints. Both implementations must return
identical results.
"""


def add_terms(a, b, sign=1):
    """Return the term map of ``a + sign*b``."""
    out = dict(a)
    if sign == 1:
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
    else:
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = -c
            else:
                v = v - c
                if v:
                    out[e] = v
                else:
                    del out[e]
    return out


def mul_terms(a, b):
    """Return the term map of the product ``a*b``."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            v = get(e)
            out[e] = ca * cb if v is None else v + ca * cb
    return {e: c for e, c in out.items() if c}


def bareiss_echelon(rows, ncols):
    """Fraction-free row echelon form, in place.

    Returns ``(pivot_columns, swaps)``. After the call, row ``k`` has its
    leading nonzero entry in ``pivot_columns[k]`` and all rows past
    ``len(pivot_columns)`` are zero.
    """
    nrows = len(rows)
    pivots = []
    swaps = 0
    prev = 1
    k = 0
    for col in range(ncols):
        if k == nrows:
            break
        p = k
        while p < nrows and rows[p][col] == 0:
            p += 1
        if p == nrows:
            continue
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            swaps += 1
        rk = rows[k]
        piv = rk[col]
        for i in range(k + 1, nrows):
            ri = rows[i]
            f = ri[col]
            if f == 0:
                if piv != prev:
                    for j in range(col + 1, ncols):
                        ri[j] = (ri[j] * piv) // prev
                continue
            for j in range(col + 1, ncols):
                ri[j] = (ri[j] * piv - f * rk[j]) // prev
            ri[col] = 0
        prev = piv
        pivots.append(col)
        k += 1
    return pivots, swaps
