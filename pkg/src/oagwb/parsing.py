"""Text grammars for group specs, elements and subgroup expressions.

Element grammar (ASCII)::

    expr     = [sign] term {("+" | "-") term}
    term     = [rational "*"] basis
    basis    = "e" nat | "t^" nat | "t" | nat        (a bare nat is a constant term)
    rational = int ["/" posint]

Subgroup grammar::

    S = "tail(" m ")" | "zero" | "full" | "sharp(" C "," p "," s ")"
      | "shift(" S "," p "," k ")" | "meet(" S "," S ")" | "join(" S "," S ")"
      | "scale(" p "," r "," S ")"
    C = "tail(" m ")" | "zero" | "full"

Group grammar::

    "freelex(k)" | "locallex(p=P)" | "polymod(p=P,n=N)" | "polypart((p1,n1),...)"

A polypart pair may carry an explicit cell index as a third entry ``(p,n,i)``;
otherwise the i-th pair constrains cell U_i.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError, UnknownConvex
from .groups import Family, GroupSpec, is_prime, make_group


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self):
        return self.peek() == ""

    def fail(self, what):
        got = self.text[self.pos:self.pos + 8] or "end of input"
        raise ParseError(f"expected {what} at position {self.pos}, got {got!r}", self.pos)

    def accept(self, literal):
        self.skip()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal):
        if not self.accept(literal):
            self.fail(repr(literal))

    def nat(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("a natural number")
        return int(self.text[start:self.pos])

    def word(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start:self.pos]

    def finish(self):
        if not self.at_end():
            self.fail("end of input")


# -- elements ---------------------------------------------------------------

def _parse_basis(sc):
    """Returns (index, multiplier) for a basis token."""
    if sc.accept("e"):
        return sc.nat(), 1
    if sc.accept("t"):
        if sc.accept("^"):
            return sc.nat(), 1
        return 1, 1
    if sc.peek().isdigit():
        return 0, sc.nat()
    sc.fail("a basis symbol (eN, t, t^N or a constant)")


def _parse_term(sc):
    if sc.peek().isdigit():
        start = sc.pos
        num = sc.nat()
        if sc.accept("/"):
            den = sc.nat()
            if den == 0:
                raise ParseError(f"zero denominator at position {sc.pos}", sc.pos)
            coeff = Fraction(num, den)
        else:
            coeff = num
        if sc.accept("*"):
            j, mult = _parse_basis(sc)
            return j, coeff * mult
        if isinstance(coeff, Fraction) and coeff.denominator != 1:
            raise ParseError(f"fraction needs a basis symbol at position {start}", start)
        return 0, coeff
    return _parse_basis(sc)


def parse_element(text, g):
    """Parse an element of group ``g``; the empty string is zero."""
    sc = _Scanner(text)
    coords = []
    if sc.at_end():
        return g.zero()
    sign = -1 if sc.accept("-") else 1
    if sign == 1:
        sc.accept("+")
    while True:
        j, c = _parse_term(sc)
        coords.append((j, sign * c))
        if sc.accept("+"):
            sign = 1
        elif sc.accept("-"):
            sign = -1
        else:
            break
    sc.finish()
    return g.element(coords)


def _format_coeff(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(x):
    if x.is_zero():
        return "0"
    poly = x.group.family in (Family.POLY_MOD, Family.POLY_PART)
    parts = []
    for j, c in x.coords:
        mag = abs(c)
        if poly and j == 0:
            body = _format_coeff(mag)
        else:
            sym = ("t" if j == 1 else f"t^{j}") if poly else f"e{j}"
            body = sym if mag == 1 else f"{_format_coeff(mag)}*{sym}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


# -- group specs ------------------------------------------------------------

def parse_group_spec(text):
    sc = _Scanner(text)
    name = sc.word().lower()
    sc.expect("(")
    if name == "freelex":
        spec = GroupSpec.free_lex(sc.nat())
    elif name == "locallex":
        sc.expect("p")
        sc.expect("=")
        spec = GroupSpec.local_lex(sc.nat())
    elif name == "polymod":
        sc.expect("p")
        sc.expect("=")
        p = sc.nat()
        sc.expect(",")
        sc.expect("n")
        sc.expect("=")
        spec = GroupSpec.poly_mod(p, sc.nat())
    elif name == "polypart":
        items = []
        while True:
            sc.expect("(")
            item = [sc.nat()]
            while sc.accept(","):
                item.append(sc.nat())
            if len(item) not in (2, 3):
                sc.fail("a (p,n) or (p,n,cell) tuple")
            sc.expect(")")
            items.append(tuple(item))
            if not sc.accept(","):
                break
        spec = GroupSpec.poly_part(items)
    else:
        raise ParseError(f"unknown group family {name!r} at position 0", 0)
    sc.expect(")")
    sc.finish()
    return spec


def parse_group(text):
    return make_group(parse_group_spec(text))


# -- subgroup expressions ---------------------------------------------------

def _prime(sc):
    start = sc.pos
    p = sc.nat()
    if not is_prime(p):
        raise ParseError(f"{p} is not prime (position {start})", start)
    return p


def _convex(sc, g):
    from .subgroups import Conv
    start = sc.pos
    w = sc.word()
    if w == "zero":
        return Conv(None)
    if w == "full":
        return Conv(0)
    if w == "tail":
        sc.expect("(")
        m = sc.nat()
        sc.expect(")")
        if g is not None and g.rank is not None and m > g.rank:
            raise UnknownConvex(f"tail({m}) exceeds the rank {g.rank} of {g}")
        return Conv(m)
    sc.pos = start
    sc.fail("tail(m), zero or full")


def _subgroup(sc, g):
    from .subgroups import Join, Meet, Scale, Sharp, Shift
    start = sc.pos
    w = sc.word()
    if w in ("zero", "full", "tail"):
        sc.pos = start
        return _convex(sc, g)
    if not w:
        sc.fail("a subgroup expression")
    sc.expect("(")
    if w == "sharp":
        d = _convex(sc, g)
        sc.expect(",")
        p = _prime(sc)
        sc.expect(",")
        s = sc.nat()
        out = Sharp(d, p, s)
    elif w == "shift":
        inner = _subgroup(sc, g)
        sc.expect(",")
        p = _prime(sc)
        sc.expect(",")
        out = Shift(inner, p, sc.nat())
    elif w in ("meet", "join"):
        a = _subgroup(sc, g)
        sc.expect(",")
        b = _subgroup(sc, g)
        out = Meet(a, b) if w == "meet" else Join(a, b)
    elif w == "scale":
        p = _prime(sc)
        sc.expect(",")
        r = sc.nat()
        sc.expect(",")
        out = Scale(p, r, _subgroup(sc, g))
    else:
        sc.pos = start
        sc.fail("a subgroup constructor")
    sc.expect(")")
    return out


def parse_subgroup_expr(text, g=None):
    """Parse a subgroup expression; ``g`` enables rank checks for FreeLex."""
    sc = _Scanner(text)
    out = _subgroup(sc, g)
    sc.finish()
    return out


def format_subgroup(expr):
    from .subgroups import Conv, Join, Meet, Scale, Sharp, Shift
    if isinstance(expr, Conv):
        if expr.level is None:
            return "zero"
        return "full" if expr.level == 0 else f"tail({expr.level})"
    if isinstance(expr, Sharp):
        return f"sharp({format_subgroup(expr.base)},{expr.p},{expr.s})"
    if isinstance(expr, Shift):
        return f"shift({format_subgroup(expr.inner)},{expr.p},{expr.k})"
    if isinstance(expr, Meet):
        return f"meet({format_subgroup(expr.left)},{format_subgroup(expr.right)})"
    if isinstance(expr, Join):
        return f"join({format_subgroup(expr.left)},{format_subgroup(expr.right)})"
    if isinstance(expr, Scale):
        return f"scale({expr.p},{expr.r},{format_subgroup(expr.inner)})"
    raise TypeError(f"not a subgroup expression: {expr!r}")
