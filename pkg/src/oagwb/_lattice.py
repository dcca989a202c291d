"""Row-echelon arithmetic for integer lattices over Z or the local ring Z_(p).

Rows are lists of Python ints.  Over Z_(p) every unit may be cleared, so a
pivot p^v * u only needs p^v to divide the entries below it; elimination
multiplies the target row by the unit u instead of dividing.
"""

from __future__ import annotations


def _val(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def echelon(rows, ncols, p=None):
    """Echelon basis of the span of ``rows``, as (pivot column, row) pairs."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    for col in range(ncols):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        rest = [r for r in rows if r[col] == 0]
        if p is None:
            while len(live) > 1:
                live.sort(key=lambda r: abs(r[col]))
                piv = live[0]
                nxt = [piv]
                for r in live[1:]:
                    q = r[col] // piv[col]
                    r = [a - q * b for a, b in zip(r, piv)]
                    if r[col] != 0:
                        nxt.append(r)
                    elif any(r):
                        rest.append(r)
                live = nxt
            piv = live[0]
            if piv[col] < 0:
                piv = [-a for a in piv]
        else:
            live.sort(key=lambda r: _val(r[col], p))
            piv = live[0]
            v = _val(piv[col], p)
            unit = piv[col] // p ** v
            for r in live[1:]:
                q = r[col] // p ** v
                r = [unit * a - q * b for a, b in zip(r, piv)]
                if any(r):
                    rest.append(r)
        out.append((col, piv))
        rows = rest
    return out


def contains(basis, x, p=None):
    """Whether integer vector x lies in the lattice with echelon ``basis``."""
    x = list(x)
    for col, piv in basis:
        for c in range(col):
            if x[c] != 0:
                return False
        a = piv[col]
        if x[col] == 0:
            continue
        if p is None:
            if x[col] % a:
                return False
            q = x[col] // a
            x = [u - q * w for u, w in zip(x, piv)]
        else:
            v = _val(a, p)
            if _val(x[col], p) < v:
                return False
            unit = a // p ** v
            q = x[col] // p ** v
            x = [unit * u - q * w for u, w in zip(x, piv)]
    return not any(x)


def rows_of(basis):
    return [r for _, r in basis]


def join(a, b, ncols, p=None):
    return rows_of(echelon(a + b, ncols, p))


def meet(a, b, ncols, p=None):
    """Intersection of two lattices by the Zassenhaus construction."""
    stacked = [r + r for r in a] + [r + [0] * ncols for r in b]
    out = []
    for col, row in echelon(stacked, 2 * ncols, p):
        if col >= ncols:
            out.append(row[ncols:])
    return out


def scale(a, c):
    return [[c * x for x in r] for r in a]
