"""Independent membership oracle working from the group definitions.

Every subexpression is evaluated as an explicit lattice inside the first W
coordinates, built from a basis of G read straight off the defining
constraints.  Nothing here uses the normal-form engine, so agreement between
the two is a genuine cross-check.

Truncation is sound once the window leaves room for decompositions: sums of
subgroups may need a few spare coordinates of each constrained cell, and the
sharp intersection over infinitely many tails stabilises past the support of
the queried element.  ``support_slack`` controls both margins.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import _lattice as lat
from .errors import OracleBoundExceeded
from .subgroups import Conv, Join, Meet, Scale, Sharp, Shift


def _levels(expr):
    if isinstance(expr, Conv):
        return [expr.level] if expr.level is not None else []
    if isinstance(expr, Sharp):
        return [expr.base.level] if expr.base.level is not None else []
    if isinstance(expr, (Shift, Scale)):
        return _levels(expr.inner)
    return _levels(expr.left) + _levels(expr.right)


class _Window:
    def __init__(self, g, width, stab_level):
        self.g = g
        self.n = width
        self.stab = stab_level
        self.p = g.spec.p if g.is_local else None
        self._tails = {}

    def _basis_from(self, start):
        """Basis of {x in G : x_j = 0 for j < start} inside the window.

        Free coordinates give unit vectors; the coordinates c_0 < ... < c_t
        of a constrained cell give e_{c_i} - e_{c_(i+1)} and m * e_{c_t}.
        The rows have distinct leading columns, so they are already echelon.
        """
        g, n = self.g, self.n
        rows = []
        last = {}
        for j in range(start, n):
            r = [0] * n
            r[j] = 1
            c = g.cell_of(j)
            if c is not None:
                if c in last:
                    rows[last[c]][j] = -1
                last[c] = len(rows)
            rows.append(r)
        for c, i in last.items():
            j = rows[i].index(1)
            rows[i] = [0] * n
            rows[i][j] = g.cell_moduli[c]
        return rows

    def full(self):
        return self.tail(0)

    def tail(self, level):
        if level is None:
            return []
        if level not in self._tails:
            self._tails[level] = self._basis_from(level)
        return self._tails[level]

    def multiple(self, c):
        return lat.scale(self.full(), c)

    def sharp(self, level, p, s):
        g = self.g
        if g.rank is not None and level is not None and level >= g.rank:
            level = None
        if level == 0 or s == 0:
            return self.full()
        if level is None:
            level = g.rank if g.rank is not None else self.stab
        out = self.full()
        ps = self.multiple(p ** s)
        for j in range(level):
            out = lat.meet(out, lat.join(self.tail(j), ps, self.n, self.p), self.n, self.p)
        return out

    def evaluate(self, expr):
        n, p = self.n, self.p
        if isinstance(expr, Conv):
            level = expr.level
            if self.g.rank is not None and level is not None and level >= self.g.rank:
                level = None
            return self.tail(level)
        if isinstance(expr, Sharp):
            return self.sharp(expr.base.level, expr.p, expr.s)
        if isinstance(expr, Shift):
            return lat.join(self.evaluate(expr.inner), self.multiple(expr.p ** expr.k), n, p)
        if isinstance(expr, Meet):
            return lat.meet(self.evaluate(expr.left), self.evaluate(expr.right), n, p)
        if isinstance(expr, Join):
            return lat.join(self.evaluate(expr.left), self.evaluate(expr.right), n, p)
        if isinstance(expr, Scale):
            return lat.scale(self.evaluate(expr.inner), expr.p ** expr.r)
        raise TypeError(f"not a subgroup expression: {expr!r}")


def oracle_window(g, expr, x, support_slack):
    """(width, stabilisation level) used for a query."""
    if g.rank is not None:
        return g.rank, g.rank
    levels = _levels(expr)
    reach = max([x.max_support() + 1] + levels)
    stab = x.max_support() + 1 + support_slack
    width = max(reach, stab) + support_slack
    for c in range(len(g.cell_moduli)):
        width = max(width, g.cell_coordinates(c, width, support_slack + 1)[-1] + 1)
    return width, stab


def member_oracle(S, x, support_slack=2, coeff_slack=64):
    """Decide x in S by explicit lattice arithmetic on a truncated window.

    ``coeff_slack`` caps the window dimension; larger queries raise
    OracleBoundExceeded rather than running unboundedly.
    """
    g = x.group
    width, stab = oracle_window(g, S, x, support_slack)
    if width > coeff_slack:
        raise OracleBoundExceeded(f"window of {width} coordinates exceeds cap {coeff_slack}")
    w = _Window(g, width, stab)
    basis = lat.echelon(w.evaluate(S), width, w.p)
    vec = [0] * width
    den = 1
    for j, c in x.coords:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    for j, c in x.coords:
        vec[j] = int(c * den)
    return lat.contains(basis, vec, w.p)
