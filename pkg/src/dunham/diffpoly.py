"""Exact algebra of differential polynomials in an abstract function Q(x).

An expression is a finite sum of monomials

    coeff * Q^(h/2) * (Q')^e1 * (Q'')^e2 * ...

with an arbitrary-precision rational coefficient, a half-integer power of Q
(stored as the integer ``h`` counting halves, so all exponent arithmetic is
exact), and positive integer exponents on the derivatives Q', Q'', ...
Everything is immutable and kept in a canonical form: monomials with equal
(h, derivative-exponent) keys are merged, zero coefficients dropped, and the
list sorted by (total derivative weight sum(k*e_k), h, derivative exponents).

Numeric evaluation takes the values of Q and its derivatives at a point plus
an externally chosen branch value of sqrt(Q); this module never picks a
branch itself.

Plain-text rendering is a bijection with the canonical form and round-trips
through :func:`parse_plain`.  Grammar of one monomial (factors joined by
``*``):

    coefficient   int or int/int, sign leading the monomial
    derivative    Q', Q'', Q''' and Q(k) for k >= 4, optional ^int exponent
    power of Q    Q, Q^int for integer powers; Q^(p/2) for half powers
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BranchConsistencyError, ExprParseError, InputShapeError

__all__ = [
    "Monomial",
    "DiffExpr",
    "ZERO",
    "ONE",
    "q_power",
    "q_deriv",
    "constant",
    "add",
    "negate",
    "scale",
    "mul",
    "differentiate",
    "equals",
    "eval_numeric",
    "eval_numeric_array",
    "max_deriv_order",
    "has_half_powers",
    "to_plain",
    "to_latex",
    "parse_plain",
    "expr_to_json",
    "expr_from_json",
]


@dataclass(frozen=True)
class Monomial:
    """One product term: coeff * Q^(q_half/2) * prod_k (Q^(k))^e_k.

    ``derivs`` maps derivative order k >= 1 to exponent e_k >= 1, stored as a
    sorted tuple of (k, e_k) pairs so monomials are hashable.
    """

    coeff: Fraction
    q_half: int
    derivs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.coeff == 0:
            raise ValueError("monomial coefficient must be nonzero")
        if any(k < 1 or e < 1 for k, e in self.derivs):
            raise ValueError("derivative orders and exponents must be >= 1")
        if list(self.derivs) != sorted(self.derivs):
            raise ValueError("derivative exponent pairs must be sorted by order")

    @property
    def weight(self) -> int:
        """Total derivative weight sum(k * e_k); the canonical primary key."""
        return sum(k * e for k, e in self.derivs)

    def key(self) -> tuple:
        return (self.weight, self.q_half, self.derivs)


def _mono(coeff: Fraction, q_half: int, derivs: Mapping[int, int]) -> Monomial:
    pairs = tuple(sorted((k, e) for k, e in derivs.items() if e != 0))
    return Monomial(coeff, q_half, pairs)


@dataclass(frozen=True)
class DiffExpr:
    """Canonical sum of :class:`Monomial`; the empty sum is zero."""

    monomials: tuple[Monomial, ...]

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, negate(other))

    def __neg__(self):
        return negate(self)

    def __mul__(self, other):
        if isinstance(other, DiffExpr):
            return mul(self, other)
        if isinstance(other, (int, Fraction)):
            return scale(self, Fraction(other))
        return NotImplemented

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.monomials)

    def __str__(self):
        return to_plain(self)


def _collect(monomials: Iterable[Monomial]) -> DiffExpr:
    """Merge like monomials, drop zeros, sort by the canonical key."""
    merged: dict[tuple, Fraction] = {}
    for m in monomials:
        k = (m.q_half, m.derivs)
        merged[k] = merged.get(k, Fraction(0)) + m.coeff
    out = [
        Monomial(c, q_half, derivs)
        for (q_half, derivs), c in merged.items()
        if c != 0
    ]
    out.sort(key=Monomial.key)
    return DiffExpr(tuple(out))


ZERO = DiffExpr(())
ONE = DiffExpr((Monomial(Fraction(1), 0, ()),))


def q_power(half_exponent: int) -> DiffExpr:
    """Q raised to half_exponent/2, e.g. q_power(1) is sqrt(Q), q_power(-2) is 1/Q."""
    if half_exponent == 0:
        return ONE
    return DiffExpr((Monomial(Fraction(1), int(half_exponent), ()),))


def q_deriv(order: int, exponent: int = 1) -> DiffExpr:
    """The k-th derivative of Q as an expression: (Q^(k))^exponent."""
    if order < 1:
        raise ValueError("derivative order must be >= 1; use q_power for Q itself")
    return DiffExpr((_mono(Fraction(1), 0, {order: exponent}),))


def constant(value) -> DiffExpr:
    c = Fraction(value)
    if c == 0:
        return ZERO
    return DiffExpr((Monomial(c, 0, ()),))


def add(a: DiffExpr, b: DiffExpr) -> DiffExpr:
    return _collect(a.monomials + b.monomials)


def negate(a: DiffExpr) -> DiffExpr:
    return DiffExpr(tuple(Monomial(-m.coeff, m.q_half, m.derivs) for m in a.monomials))


def scale(a: DiffExpr, factor) -> DiffExpr:
    f = Fraction(factor)
    if f == 0:
        return ZERO
    return DiffExpr(tuple(Monomial(m.coeff * f, m.q_half, m.derivs) for m in a.monomials))


def mul(a: DiffExpr, b: DiffExpr) -> DiffExpr:
    out = []
    for ma in a.monomials:
        da = dict(ma.derivs)
        for mb in b.monomials:
            d = dict(da)
            for k, e in mb.derivs:
                d[k] = d.get(k, 0) + e
            out.append(_mono(ma.coeff * mb.coeff, ma.q_half + mb.q_half, d))
    return _collect(out)


def differentiate(a: DiffExpr) -> DiffExpr:
    """d/dx by the product rule; d/dx Q^(h/2) = (h/2) Q^((h-2)/2) Q' and
    d/dx (Q^(k))^e = e (Q^(k))^(e-1) Q^(k+1)."""
    out = []
    for m in a.monomials:
        if m.q_half != 0:
            d = dict(m.derivs)
            d[1] = d.get(1, 0) + 1
            out.append(_mono(m.coeff * Fraction(m.q_half, 2), m.q_half - 2, d))
        for k, e in m.derivs:
            d = dict(m.derivs)
            d[k] = e - 1
            d[k + 1] = d.get(k + 1, 0) + 1
            out.append(_mono(m.coeff * e, m.q_half, d))
    return _collect(out)


def equals(a: DiffExpr, b: DiffExpr) -> bool:
    """Exact structural equality of canonical forms (never numeric)."""
    return a.monomials == b.monomials


def max_deriv_order(a: DiffExpr) -> int:
    """Highest derivative order appearing in the expression (0 if none)."""
    return max((k for m in a.monomials for k, _ in m.derivs), default=0)


def has_half_powers(a: DiffExpr) -> bool:
    return any(m.q_half % 2 != 0 for m in a.monomials)


def _check_branch(q0, sqrt_q, rtol):
    err = abs(sqrt_q * sqrt_q - q0)
    if err > rtol * (1.0 + abs(q0)):
        raise BranchConsistencyError(
            f"sqrt_q**2 = {sqrt_q*sqrt_q} differs from Q = {q0} "
            f"beyond relative tolerance {rtol}"
        )


def eval_numeric(
    a: DiffExpr,
    q_derivs: Sequence[complex],
    sqrt_q: complex | None = None,
    *,
    branch_rtol: float = 1e-6,
) -> complex:
    """Evaluate at a point given [Q, Q', Q'', ...] and a branch value of sqrt(Q).

    The caller supplies sqrt_q because branch selection is a contour-level
    concern; integer powers of Q never touch it.  Raises InputShapeError when
    q_derivs is shorter than the highest derivative order present, and
    BranchConsistencyError when sqrt_q**2 disagrees with q_derivs[0] beyond
    branch_rtol (relative).
    """
    need = max_deriv_order(a)
    if len(q_derivs) < need + 1:
        raise InputShapeError(
            f"expression uses derivatives up to order {need}, "
            f"got only {len(q_derivs)} value(s)"
        )
    q0 = complex(q_derivs[0])
    if sqrt_q is not None:
        _check_branch(q0, complex(sqrt_q), branch_rtol)
    total = 0.0 + 0.0j
    for m in a.monomials:
        term = complex(m.coeff)
        if m.q_half % 2 == 0:
            if m.q_half != 0:
                term *= q0 ** (m.q_half // 2)
        else:
            if sqrt_q is None:
                raise BranchConsistencyError(
                    "expression has half-integer powers of Q but no sqrt_q was given"
                )
            term *= complex(sqrt_q) ** m.q_half
        for k, e in m.derivs:
            term *= complex(q_derivs[k]) ** e
        total += term
    return total


def eval_numeric_array(
    a: DiffExpr,
    q_derivs: Sequence[np.ndarray],
    sqrt_q: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized twin of :func:`eval_numeric` over arrays of points.

    Consistency of sqrt_q with Q is the caller's responsibility here (the
    contour tracer constructs sqrt_q from Q directly); the scalar form is the
    checked reference and the two are asserted to agree in the test suite.
    """
    need = max_deriv_order(a)
    if len(q_derivs) < need + 1:
        raise InputShapeError(
            f"expression uses derivatives up to order {need}, "
            f"got only {len(q_derivs)} array(s)"
        )
    q0 = q_derivs[0]
    total = np.zeros_like(q0, dtype=complex)
    for m in a.monomials:
        term = np.full_like(total, complex(m.coeff))
        if m.q_half % 2 == 0:
            if m.q_half != 0:
                term = term * q0 ** (m.q_half // 2)
        else:
            if sqrt_q is None:
                raise BranchConsistencyError(
                    "expression has half-integer powers of Q but no sqrt_q was given"
                )
            term = term * sqrt_q**m.q_half
        for k, e in m.derivs:
            term = term * q_derivs[k] ** e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# rendering and parsing

_PRIMES = {1: "Q'", 2: "Q''", 3: "Q'''"}


def _deriv_symbol(k: int) -> str:
    return _PRIMES.get(k, f"Q({k})")


def _coeff_plain(c: Fraction) -> str:
    return str(c)  # Fraction renders as "p/q" or "p"


def _monomial_plain(m: Monomial) -> str:
    factors = []
    for k, e in m.derivs:
        sym = _deriv_symbol(k)
        factors.append(sym if e == 1 else f"{sym}^{e}")
    h = m.q_half
    if h != 0:
        if h % 2 == 0:
            p = h // 2
            factors.append("Q" if p == 1 else f"Q^{p}")
        else:
            factors.append(f"Q^({h}/2)")
    c = m.coeff
    if not factors:
        return _coeff_plain(c)
    if c == 1:
        return " * ".join(factors)
    if c == -1:
        return "-" + " * ".join(factors)
    return " * ".join([_coeff_plain(c)] + factors)


def to_plain(a: DiffExpr) -> str:
    """Deterministic plain-text form; bijective with the canonical form."""
    if not a.monomials:
        return "0"
    parts = [_monomial_plain(a.monomials[0])]
    for m in a.monomials[1:]:
        s = _monomial_plain(m)
        if s.startswith("-"):
            parts.append(" - " + s[1:])
        else:
            parts.append(" + " + s)
    return "".join(parts)


def _latex_deriv(k: int, e: int) -> str:
    if k <= 3:
        base = "Q" + "'" * k
    else:
        base = f"Q^{{({k})}}"
    if e == 1:
        return base
    return f"[{base}]^{{{e}}}"


def _monomial_latex(m: Monomial) -> str:
    """Fraction layout: negative powers of Q and the coefficient denominator
    go below the bar, like the displayed equations this mirrors."""
    num_factors = []
    den_factors = []
    for k, e in m.derivs:
        num_factors.append(_latex_deriv(k, e))
    h = m.q_half
    if h > 0:
        num_factors.append(_q_latex_power(h))
    elif h < 0:
        den_factors.append(_q_latex_power(-h))
    c = m.coeff
    num = abs(c.numerator)
    den = c.denominator
    if num != 1 or not num_factors:
        num_factors.insert(0, str(num))
    if den != 1:
        den_factors.insert(0, str(den))
    sign = "-" if c < 0 else ""
    top = " ".join(num_factors) if num_factors else "1"
    if den_factors:
        return f"{sign}\\frac{{{top}}}{{{' '.join(den_factors)}}}"
    return sign + top


def _q_latex_power(h: int) -> str:
    if h == 2:
        return "Q"
    if h % 2 == 0:
        return f"Q^{{{h // 2}}}"
    return f"Q^{{{h}/2}}"


def to_latex(a: DiffExpr) -> str:
    if not a.monomials:
        return "0"
    parts = [_monomial_latex(a.monomials[0])]
    for m in a.monomials[1:]:
        s = _monomial_latex(m)
        if s.startswith("-"):
            parts.append(" - " + s[1:])
        else:
            parts.append(" + " + s)
    return "".join(parts)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<qderiv>Q'{1,3}|Q\(\d+\))
  | (?P<qhalf>Q\^\(-?\d+/2\))
  | (?P<qpow>Q(\^-?\d+)?)
  | (?P<number>\d+(/\d+)?)
  | (?P<caret>\^)
  | (?P<op>[+\-*])
  | (?P<bad>\S+)
    """,
    re.VERBOSE,
)


def parse_plain(text: str) -> DiffExpr:
    """Parse the plain rendering back into an expression.

    Accepts exactly the grammar produced by :func:`to_plain` (plus redundant
    whitespace and explicit "1 *" coefficients).  Raises ExprParseError with
    the failing position otherwise.
    """
    tokens = []
    for mt in _TOKEN_RE.finditer(text):
        kind = mt.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ExprParseError(
                f"unexpected token {mt.group()!r} at position {mt.start()}",
                position=mt.start(),
                token=mt.group(),
            )
        tokens.append((kind, mt.group(), mt.start()))
    if not tokens:
        raise ExprParseError("empty expression", position=0)
    if len(tokens) == 1 and tokens[0][1] == "0":
        return ZERO

    monomials: list[Monomial] = []
    i = 0
    n = len(tokens)

    def fail(pos, msg):
        raise ExprParseError(f"{msg} at position {pos}", position=pos)

    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n:
            fail(len(text), "dangling sign")
        coeff = Fraction(sign)
        q_half = 0
        derivs: dict[int, int] = {}
        expect_factor = True
        while i < n:
            kind, val, pos = tokens[i]
            if kind == "op" and val in "+-":
                break
            if kind == "op" and val == "*":
                if expect_factor:
                    fail(pos, "unexpected '*'")
                expect_factor = True
                i += 1
                continue
            if not expect_factor:
                fail(pos, f"missing '*' before {val!r}")
            if kind == "number":
                coeff *= Fraction(val)
                i += 1
            elif kind == "qhalf":
                q_half += int(val[3:-3])  # strip "Q^(" and "/2)"
                i += 1
            elif kind == "qpow":
                p = 1 if val == "Q" else int(val[2:])
                q_half += 2 * p
                i += 1
            elif kind == "qderiv":
                if val.startswith("Q'"):
                    k = len(val) - 1
                else:
                    k = int(val[2:-1])
                    if k < 1:
                        fail(pos, "derivative order must be >= 1")
                e = 1
                if i + 2 < n and tokens[i + 1][0] == "caret" and tokens[i + 2][0] == "number":
                    e = int(tokens[i + 2][1])
                    i += 2
                elif i + 1 < n and tokens[i + 1][0] == "caret":
                    fail(tokens[i + 1][2], "expected integer exponent after '^'")
                derivs[k] = derivs.get(k, 0) + e
                i += 1
            elif kind == "caret":
                fail(pos, "unexpected '^'")
            else:
                fail(pos, f"unexpected token {val!r}")
            expect_factor = False
        if expect_factor:
            fail(len(text), "monomial ended after '*'")
        if coeff != 0:
            monomials.append(_mono(coeff, q_half, derivs))
    return _collect(monomials)


# ---------------------------------------------------------------------------
# JSON layout (documented in the README): an expression is
#   {"monomials": [{"coeff": "p/q", "q_half": h, "derivs": [[k, e], ...]}, ...]}


def expr_to_json(a: DiffExpr) -> dict:
    return {
        "monomials": [
            {
                "coeff": str(m.coeff),
                "q_half": m.q_half,
                "derivs": [[k, e] for k, e in m.derivs],
            }
            for m in a.monomials
        ]
    }


def expr_from_json(doc: dict) -> DiffExpr:
    monos = []
    for entry in doc["monomials"]:
        monos.append(
            _mono(
                Fraction(entry["coeff"]),
                int(entry["q_half"]),
                {int(k): int(e) for k, e in entry["derivs"]},
            )
        )
    return _collect(monos)
