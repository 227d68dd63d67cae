"""Numeric action integrals B_n(E) = (1/2i) closed-contour integral of T_n.

The contour is an ellipse enclosing the two real turning points of
Q(x) = V(x) - E and excluding every other root of V - E, so every term T_n
is analytic on it and the trapezoidal rule converges geometrically.  The
square root of Q is continued around the contour by nearest-branch selection
starting from the principal value at the rightmost node; enclosing exactly
two simple zeros makes sqrt(Q) single-valued there, which the closure check
enforces.  Integrands never touch the real axis between the turning points,
where the higher-order terms diverge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import diffpoly as dp
from .config import DEFAULT_CONFIG, NumericsConfig
from .errors import (
    BranchTrackingError,
    ContourConstructionError,
    DegenerateTurningPointError,
    NodeCountError,
    QuadratureError,
    TurningPointError,
)
from .potential import Potential
from .wkb_series import WkbSeries

__all__ = [
    "TurningPair",
    "ContourSpec",
    "BranchTrace",
    "turning_points",
    "build_contour",
    "ellipse_nodes",
    "trace_branch",
    "action_integral",
    "action_integrals",
]


@dataclass(frozen=True)
class TurningPair:
    """The two real simple roots of V - E, plus the full complex root list."""

    x1: float
    x2: float
    all_roots: tuple[complex, ...]


@dataclass(frozen=True)
class ContourSpec:
    """Ellipse z(t) = center + semi_major*cos(t) + i*semi_minor*sin(t)."""

    center: complex
    semi_major: float
    semi_minor: float
    nodes: int

    def __post_init__(self):
        if self.nodes < 64 or self.nodes % 2:
            raise ValueError("node count must be even and >= 64")
        if self.semi_major <= 0 or self.semi_minor <= 0:
            raise ValueError("ellipse axes must be positive")


@dataclass(frozen=True)
class BranchTrace:
    """sqrt(Q) values continued around the contour nodes."""

    node_points: np.ndarray
    sqrt_values: np.ndarray


def turning_points(V: Potential, E: float, cfg: NumericsConfig = DEFAULT_CONFIG) -> TurningPair:
    """All roots of V(x) - E by the companion-matrix eigenvalue method with
    one Newton polish step per root; requires exactly two simple real roots."""
    coeffs = [float(c) for c in V.coefficients]
    coeffs[0] -= E
    roots = np.roots(coeffs[::-1])
    # one Newton step per root against the exact-coefficient derivatives
    p = V(roots) - E
    p1 = V.derivs(roots, 1)[1]
    safe = np.abs(p1) > 0
    roots = roots - np.where(safe, p, 0.0) / np.where(safe, p1, 1.0)

    scale = 1.0 + float(np.max(np.abs(roots)))
    dcoeffs = np.abs([float(c) for c in V.deriv_coefficients(1)])
    dscale = 1.0 + float(np.sum(dcoeffs * scale ** np.arange(len(dcoeffs))))

    real_mask = np.abs(roots.imag) < cfg.real_root_imag_tol * scale
    real_roots = np.sort(roots.real[real_mask])
    for r in real_roots:
        if abs(complex(V(r)) - E) > 1e-6 * dscale:
            continue  # polishing artifact, not an actual root
        if abs(complex(V.derivs(r, 1)[1])) < cfg.degeneracy_tol * dscale:
            raise DegenerateTurningPointError(
                f"turning point near x = {r:.6g} is degenerate (V' vanishes)"
            )
    if len(real_roots) >= 2 and np.min(np.diff(real_roots)) < cfg.degeneracy_tol * scale:
        raise DegenerateTurningPointError(
            "two real turning points coalesce at this energy"
        )
    if len(real_roots) != 2:
        raise TurningPointError(
            f"V - E has {len(real_roots)} real root(s); exactly two turning "
            f"points are supported (E = {E})"
        )
    return TurningPair(float(real_roots[0]), float(real_roots[1]), tuple(map(complex, roots)))


def build_contour(
    tp: TurningPair,
    margin: float = 0.5,
    cfg: NumericsConfig = DEFAULT_CONFIG,
) -> ContourSpec:
    """Ellipse centered between the turning points, wide enough to enclose
    them with the given margin and narrow enough to exclude all other roots
    of V - E with relative clearance cfg.root_clearance."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    center = 0.5 * (tp.x1 + tp.x2)
    a = (1.0 + margin) * 0.5 * (tp.x2 - tp.x1)
    others = [
        r
        for r in tp.all_roots
        if min(abs(r - tp.x1), abs(r - tp.x2)) > 1e-7 * (1.0 + abs(r))
    ]

    def min_radius(b: float) -> float:
        if not others:
            return np.inf
        return min(np.hypot((r.real - center) / a, r.imag / b) for r in others)

    b = a / 2.0
    needed = 1.0 + cfg.root_clearance
    while min_radius(b) < needed:
        b /= 2.0
        if b < cfg.min_minor_ratio * a:
            raise ContourConstructionError(
                "cannot separate the turning points from the other roots of "
                "V - E with any ellipse (a root lies too close to the segment "
                "between the turning points)"
            )
    return ContourSpec(complex(center), float(a), float(b), cfg.initial_nodes)


def ellipse_nodes(c: ContourSpec, nodes: int | None = None):
    """Node points and d z/d t on the counterclockwise parametrized ellipse."""
    m = c.nodes if nodes is None else nodes
    t = 2.0 * np.pi * np.arange(m) / m
    z = c.center + c.semi_major * np.cos(t) + 1j * c.semi_minor * np.sin(t)
    dz = -c.semi_major * np.sin(t) + 1j * c.semi_minor * np.cos(t)
    return z, dz


def _continue_sqrt(q: np.ndarray, closure_tol: float) -> np.ndarray:
    """Nearest-branch continuation of sqrt along a closed node sequence.

    Starts from the principal square root at node 0.  The nearest choice
    between +/- principal values flips exactly when the real part of the
    ratio p_i * conj(p_{i-1}) goes negative, so the sign chain is a
    cumulative product.  Raises NodeCountError when a phase step reaches
    pi/2 and BranchTrackingError when the continuation fails to close.
    """
    p = np.sqrt(q.astype(complex))
    if np.any(p == 0):
        raise BranchTrackingError("contour passes through a zero of Q")
    overlap = np.real(p[1:] * np.conj(p[:-1]))
    if np.any(overlap == 0):
        raise NodeCountError("phase step of pi/2 between adjacent nodes")
    signs = np.concatenate(([1.0], np.cumprod(np.sign(overlap))))
    s = signs * p
    # phase steps, including the wrap back to node 0
    step_ok = np.real(s[1:] * np.conj(s[:-1])) > 0
    if not np.all(step_ok):
        raise NodeCountError("phase step >= pi/2; node count insufficient")
    s_close = p[0] if abs(p[0] - s[-1]) <= abs(-p[0] - s[-1]) else -p[0]
    defect = abs(s_close - s[0]) / abs(s[0])
    if defect > closure_tol:
        raise BranchTrackingError(
            f"sqrt(Q) is not single-valued on this contour "
            f"(closure defect {defect:.3g}); it must enclose exactly two simple zeros"
        )
    return s


def trace_branch(
    V: Potential,
    E: float,
    c: ContourSpec,
    cfg: NumericsConfig = DEFAULT_CONFIG,
) -> BranchTrace:
    """Single-valued sqrt(Q) on the contour nodes (principal value at node 0)."""
    z, _ = ellipse_nodes(c)
    q = V(z) - E
    s = _continue_sqrt(q, cfg.closure_tol)
    return BranchTrace(node_points=z, sqrt_values=s)


def _integrate_orders(
    series: WkbSeries,
    orders: list[int],
    V: Potential,
    E: float,
    c: ContourSpec,
    nodes: int,
    cfg: NumericsConfig,
) -> dict[int, complex]:
    z, dz = ellipse_nodes(c, nodes)
    kmax = max(dp.max_deriv_order(series.terms[n]) for n in orders)
    q_derivs = V.derivs(z, kmax)
    q_derivs[0] = q_derivs[0] - E
    sqrt_q = _continue_sqrt(q_derivs[0], cfg.closure_tol)
    w = 2.0 * np.pi / nodes
    out = {}
    for n in orders:
        f = dp.eval_numeric_array(series.terms[n], q_derivs, sqrt_q)
        out[n] = w * np.sum(f * dz) / 2j
    return out


def action_integrals(
    series: WkbSeries,
    orders,
    V: Potential,
    E: float,
    c: ContourSpec,
    cfg: NumericsConfig = DEFAULT_CONFIG,
) -> dict[int, float]:
    """B_n(E) for each requested order n, sharing one node-doubling loop.

    The trapezoidal node count doubles until every requested order moves by
    less than quad_rel_tol relatively (quad_abs_tol absolutely near zero),
    then the real parts are returned after the reality check.
    """
    orders = sorted(set(orders))
    if not orders:
        return {}
    if orders[0] < 0 or orders[-1] > series.max_order:
        raise ValueError(f"orders must lie in 0..{series.max_order}")
    nodes = c.nodes
    prev: dict[int, complex] | None = None
    while nodes <= cfg.max_nodes:
        try:
            vals = _integrate_orders(series, orders, V, E, c, nodes, cfg)
        except NodeCountError:
            nodes *= 2
            continue
        if prev is not None:
            converged = all(
                abs(vals[n] - prev[n])
                <= max(cfg.quad_rel_tol * abs(vals[n]), cfg.quad_abs_tol)
                for n in orders
            )
            if converged:
                return {n: _take_real(vals[n], n, cfg) for n in orders}
        prev = vals
        nodes *= 2
    raise QuadratureError(
        f"contour quadrature did not converge within {cfg.max_nodes} nodes"
    )


def _take_real(value: complex, n: int, cfg: NumericsConfig) -> float:
    if abs(value.imag) >= cfg.reality_tol * (1.0 + abs(value.real)):
        raise QuadratureError(
            f"B_{n} has non-negligible imaginary part {value.imag:.3g} "
            "(branch or contour inconsistency)"
        )
    return float(value.real)


def action_integral(
    series: WkbSeries,
    n: int,
    V: Potential,
    E: float,
    c: ContourSpec,
    trace: BranchTrace | None = None,
    cfg: NumericsConfig = DEFAULT_CONFIG,
) -> float:
    """B_n(E) = (1/2i) closed-contour integral of T_n(z) dz, as a checked real.

    A trace argument, when given, pins the starting branch; the tracer always
    starts from the principal root at node 0, so re-tracing at doubled node
    counts continues the same branch.
    """
    if trace is not None:
        z, _ = ellipse_nodes(c)
        if trace.node_points.shape != z.shape or not np.allclose(trace.node_points, z):
            raise ValueError("trace does not match the contour nodes")
    return action_integrals(series, [n], V, E, c, cfg)[n]
