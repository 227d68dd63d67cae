"""Generation and verification of the all-order WKB term sequence.

The n-th term T_n (the x-derivative of the n-th exponent correction) obeys

    T_0 = -sqrt(Q)
    T_n = -(1/(2 T_0)) * [T_{n-1}' + sum_{m=1}^{n-1} T_m T_{n-m}],  n >= 1

where division by T_0 is exact multiplication by -Q^(-1/2), so everything
stays inside the differential-polynomial ring.  Even and odd terms are
rescaled as

    F_j = 2 T_{2j+1}        (odd family, integer powers of Q)
    G_j = -T_{2j} / T_0     (even family, integer powers of Q)

and every F_n is an exact derivative: F_n = Phi_n' with

    Phi_n = sum_{l=1}^{n} (1/l) * sum over ordered compositions
            (c_1, ..., c_l) of n of the product G_{c_1} ... G_{c_l}.

:func:`certify_total_derivative` builds Phi_n, differentiates it, and checks
exact symbolic equality with F_n, which is the closed-contour-vanishing
certificate the quantization solver relies on when it drops odd orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import diffpoly as dp
from .diffpoly import DiffExpr
from .errors import DunhamError

__all__ = [
    "WkbSeries",
    "OddTermCertificate",
    "gen_terms",
    "gen_terms_alt",
    "recursion_residual",
    "g_term",
    "f_term",
    "check_f_recursion",
    "compositions",
    "build_phi",
    "certify_total_derivative",
    "series_to_json",
    "series_from_json",
    "certificate_to_json",
]

# -1/(2 T_0) = (1/2) Q^(-1/2): the exact inverse factor used by the recursion
_HALF_INV_SQRT = dp.scale(dp.q_power(-1), Fraction(1, 2))
# 1/T_0 = -Q^(-1/2)
_INV_T0 = dp.scale(dp.q_power(-1), -1)


@dataclass(frozen=True)
class WkbSeries:
    """Terms T_0 .. T_max_order in canonical form."""

    max_order: int
    terms: tuple[DiffExpr, ...]

    def term(self, n: int) -> DiffExpr:
        if not 0 <= n <= self.max_order:
            raise ValueError(f"order {n} outside generated range 0..{self.max_order}")
        return self.terms[n]


@dataclass(frozen=True)
class OddTermCertificate:
    """Antiderivative certificate for the odd term pair (F_n, Phi_n).

    verified is True iff differentiate(phi_n) equals f_n exactly; since
    T_{2n+1} = F_n / 2, the same certificate covers T_{2n+1} with
    antiderivative Phi_n / 2.
    """

    n: int
    f_n: DiffExpr
    phi_n: DiffExpr
    verified: bool


def gen_terms(N: int) -> WkbSeries:
    """Generate T_0 .. T_N by the primary recursion."""
    if N < 0:
        raise ValueError("series order must be >= 0")
    terms = [dp.negate(dp.q_power(1))]  # T_0 = -sqrt(Q)
    for n in range(1, N + 1):
        bracket = dp.differentiate(terms[n - 1])
        for m in range(1, n):
            bracket = dp.add(bracket, dp.mul(terms[m], terms[n - m]))
        terms.append(dp.mul(_HALF_INV_SQRT, bracket))
    return WkbSeries(N, tuple(terms))


def gen_terms_alt(N: int) -> WkbSeries:
    """Cross-check generator using the rewritten recursion

        T_n = -(1/2) [ d/dx (T_{n-1}/T_0) + (1/T_0) sum_{m=2}^{n-2} T_m T_{n-m} ]

    for n >= 3 (the interior sum is empty for n = 3), with T_1 and T_2 from
    their defining forms.  Must generate terms identical to gen_terms; the
    pair of routes guards against index-limit mistakes.
    """
    if N < 0:
        raise ValueError("series order must be >= 0")
    t0 = dp.negate(dp.q_power(1))
    terms = [t0]
    if N >= 1:
        # T_1 = -T_0'/(2 T_0)
        terms.append(dp.mul(_HALF_INV_SQRT, dp.differentiate(t0)))
    if N >= 2:
        # T_2 = -(T_1' + T_1^2)/(2 T_0)
        t1 = terms[1]
        terms.append(dp.mul(_HALF_INV_SQRT, dp.add(dp.differentiate(t1), dp.mul(t1, t1))))
    for n in range(3, N + 1):
        ratio = dp.mul(terms[n - 1], _INV_T0)
        interior = dp.ZERO
        for m in range(2, n - 1):
            interior = dp.add(interior, dp.mul(terms[m], terms[n - m]))
        total = dp.add(dp.differentiate(ratio), dp.mul(_INV_T0, interior))
        terms.append(dp.scale(total, Fraction(-1, 2)))
    return WkbSeries(N, tuple(terms))


def recursion_residual(series: WkbSeries, n: int) -> DiffExpr:
    """2 T_0 T_n + sum_{j=1}^{n-1} T_j T_{n-j} + T_{n-1}'; exactly zero for a
    correctly generated series (n >= 1)."""
    if not 1 <= n <= series.max_order:
        raise ValueError(f"n must be in 1..{series.max_order}")
    t = series.terms
    res = dp.scale(dp.mul(t[0], t[n]), 2)
    for j in range(1, n):
        res = dp.add(res, dp.mul(t[j], t[n - j]))
    return dp.add(res, dp.differentiate(t[n - 1]))


def _require_integer_powers(e: DiffExpr, what: str) -> DiffExpr:
    if dp.has_half_powers(e):
        raise DunhamError(f"{what} unexpectedly contains half powers of Q")
    return e


def g_term(series: WkbSeries, j: int) -> DiffExpr:
    """G_j = -T_{2j}/T_0 = T_{2j} * Q^(-1/2); integer powers of Q only."""
    if j < 1:
        raise ValueError("G is defined for j >= 1 only")
    if 2 * j > series.max_order:
        raise ValueError(f"G_{j} needs T_{2*j}; series holds orders 0..{series.max_order}")
    return _require_integer_powers(dp.mul(series.terms[2 * j], dp.q_power(-1)), f"G_{j}")


def f_term(series: WkbSeries, j: int) -> DiffExpr:
    """F_j = 2 T_{2j+1}; integer powers of Q only."""
    if j < 1:
        raise ValueError("F is defined for j >= 1 only")
    if 2 * j + 1 > series.max_order:
        raise ValueError(f"F_{j} needs T_{2*j+1}; series holds orders 0..{series.max_order}")
    return _require_integer_powers(dp.scale(series.terms[2 * j + 1], 2), f"F_{j}")


def check_f_recursion(series: WkbSeries, n: int) -> bool:
    """True iff F_n = G_n' + sum_{m=1}^{n-1} G_m F_{n-m} exactly."""
    rhs = dp.differentiate(g_term(series, n))
    for m in range(1, n):
        rhs = dp.add(rhs, dp.mul(g_term(series, m), f_term(series, n - m)))
    return dp.equals(f_term(series, n), rhs)


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of n into positive parts (2^(n-1) of them)."""
    if n < 1:
        return
    stack = [((), n)]
    while stack:
        prefix, rest = stack.pop()
        if rest == 0:
            yield prefix
            continue
        for first in range(rest, 0, -1):
            stack.append((prefix + (first,), rest - first))


def build_phi(series: WkbSeries, n: int) -> DiffExpr:
    """The antiderivative Phi_n of F_n, as a weighted sum of composition
    products: sum_l (1/l) sum_{c_1+...+c_l = n} G_{c_1} ... G_{c_l}."""
    if n < 1:
        raise ValueError("Phi is defined for n >= 1 only")
    if 2 * n > series.max_order:
        raise ValueError(f"Phi_{n} needs T_{2*n}; series holds orders 0..{series.max_order}")
    g = {j: g_term(series, j) for j in range(1, n + 1)}
    phi = dp.ZERO
    for comp in compositions(n):
        prod = g[comp[0]]
        for c in comp[1:]:
            prod = dp.mul(prod, g[c])
        phi = dp.add(phi, dp.scale(prod, Fraction(1, len(comp))))
    return phi


def certify_total_derivative(series: WkbSeries, n: int) -> OddTermCertificate:
    """Certificate that F_n (and hence T_{2n+1} = F_n/2) is an exact
    derivative, by constructing Phi_n and checking d/dx Phi_n = F_n."""
    if 2 * n + 1 > series.max_order:
        raise ValueError(
            f"certificate for n={n} needs T_{2*n+1}; series holds orders 0..{series.max_order}"
        )
    f_n = f_term(series, n)
    phi_n = build_phi(series, n)
    verified = dp.equals(dp.differentiate(phi_n), f_n)
    return OddTermCertificate(n=n, f_n=f_n, phi_n=phi_n, verified=verified)


# ---------------------------------------------------------------------------
# JSON layout (documented in the README)


def series_to_json(series: WkbSeries) -> dict:
    return {
        "max_order": series.max_order,
        "terms": [
            {"order": n, "expr": dp.expr_to_json(t)}
            for n, t in enumerate(series.terms)
        ],
    }


def series_from_json(doc: dict) -> WkbSeries:
    n_max = int(doc["max_order"])
    terms = [dp.ZERO] * (n_max + 1)
    for entry in doc["terms"]:
        terms[int(entry["order"])] = dp.expr_from_json(entry["expr"])
    return WkbSeries(n_max, tuple(terms))


def certificate_to_json(cert: OddTermCertificate) -> dict:
    return {
        "n": cert.n,
        "f": dp.expr_to_json(cert.f_n),
        "phi": dp.expr_to_json(cert.phi_n),
        "verified": cert.verified,
    }
