"""Eigenvalues from the all-order quantization condition.

The total phase

    Phi(E) = B_0(E) - pi/2 + sum_{n=1}^{N} B_{2n}(E)

is matched to K*pi for quantum number K = 0, 1, 2, ...  The -pi/2 is the
order-1 action, which equals -pi/2 for any contour enclosing two simple
zeros; it can be recomputed numerically as a branch-tracking self-test.
Odd orders >= 3 are omitted because their terms are exact derivatives
(certified symbolically per order by wkb_series before being dropped); a
config flag forces their numeric inclusion for demonstration runs.

Reporting convention: results quote Phi(E) = K*pi with the -pi/2 on the
left-hand side, equivalent to the textbook B_0 + corrections = (K + 1/2)*pi.

The truncated series is asymptotic in character for anharmonic potentials:
the result carries the index of the smallest even-order increment, and a
warning when the requested order goes past it (adding terms there degrades
accuracy; nothing is resummed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from . import wkb_series as ws
from .config import DEFAULT_CONFIG, NumericsConfig
from .contour import action_integrals, build_contour, turning_points
from .errors import DunhamError, NoSolutionError, SpectrumError
from .potential import Potential

__all__ = [
    "QuantizationRequest",
    "QuantizationResult",
    "total_phase",
    "truncation_diagnostics",
    "quantize",
    "spectrum",
    "result_to_json",
    "results_to_csv",
    "CSV_HEADER_VERSION",
]

CSV_HEADER_VERSION = "dunham-spectrum-v1"


@dataclass(frozen=True)
class QuantizationRequest:
    """One eigenvalue problem: which potential, which level, which order.

    order = N includes terms T_0, T_1, T_2, ..., T_{2N} of the expansion.
    """

    V: Potential
    K: int
    order: int
    use_analytic_maslov: bool = True

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("quantum number K must be >= 0")
        if self.order < 0:
            raise ValueError("order must be >= 0")


@dataclass(frozen=True)
class QuantizationResult:
    K: int
    order: int
    E: float
    residual: float
    actions: tuple[float, ...]  # B_0, B_2, ..., B_2N at the solution
    optimal_truncation_index: int
    warnings: tuple[str, ...] = field(default_factory=tuple)


@lru_cache(maxsize=8)
def _series(max_order: int) -> ws.WkbSeries:
    return ws.gen_terms(max_order)


@lru_cache(maxsize=64)
def _odd_orders_certified(n_max: int) -> bool:
    """Certify the total-derivative property for every odd order being
    dropped; cached so a spectrum pays the symbolic cost once."""
    series = _series(max(2 * n_max + 1, 3))
    return all(ws.certify_total_derivative(series, n).verified for n in range(1, n_max + 1))


def _phase_orders(req: QuantizationRequest, cfg: NumericsConfig) -> list[int]:
    orders = [0] + [2 * n for n in range(1, req.order + 1)]
    if not req.use_analytic_maslov:
        orders.append(1)
    if cfg.include_odd_numeric:
        orders.extend(m for m in range(3, 2 * req.order + 1, 2))
    return sorted(orders)


def _eval_phase(
    req: QuantizationRequest, E: float, cfg: NumericsConfig
) -> tuple[float, dict[int, float]]:
    series = _series(max(2 * req.order, 1))
    tp = turning_points(req.V, E, cfg)
    c = build_contour(tp, cfg.margin, cfg)
    acts = action_integrals(series, _phase_orders(req, cfg), req.V, E, c, cfg)
    phase = acts[0]
    phase += acts[1] if not req.use_analytic_maslov else -0.5 * math.pi
    for n in range(1, req.order + 1):
        phase += acts[2 * n]
    if cfg.include_odd_numeric:
        for m in range(3, 2 * req.order + 1, 2):
            phase += acts[m]
    return phase, acts


def total_phase(
    req: QuantizationRequest, E: float, cfg: NumericsConfig = DEFAULT_CONFIG
) -> float:
    """Phi(E); the quantization condition is Phi(E) = K*pi."""
    if req.order >= 1 and not cfg.include_odd_numeric:
        if not _odd_orders_certified(req.order):  # pragma: no cover - theorem
            raise DunhamError("total-derivative certification failed; cannot drop odd orders")
    return _eval_phase(req, E, cfg)[0]


def _seed_energy(req: QuantizationRequest, target: float, cfg: NumericsConfig) -> tuple[float, float]:
    """Reference offset and seed energy above the potential minimum.

    Uses the homogeneous growth of the leading action, B_0 ~ (E - Vmin)^p
    with p = (d+2)/(2d) for degree d, anchored at one actual evaluation.
    """
    _, vmin = req.V.real_minimum()
    if cfg.bracket_seed is not None:
        return vmin, cfg.bracket_seed
    d = req.V.degree
    p = (d + 2.0) / (2.0 * d)
    delta = 1.0
    for _ in range(cfg.bracket_expansion_cap):
        try:
            phase_ref, _ = _eval_phase(req, vmin + delta, cfg)
        except DunhamError:
            delta *= 2.0
            continue
        b0_ref = phase_ref + 0.5 * math.pi
        if b0_ref > 0:
            seed = vmin + delta * ((target + 0.5 * math.pi) / b0_ref) ** (1.0 / p)
            return vmin, seed
        delta *= 2.0
    raise NoSolutionError("could not find a reference energy with two turning points")


def truncation_diagnostics(
    actions: tuple[float, ...], floor: float = DEFAULT_CONFIG.truncation_floor
) -> tuple[int, tuple[str, ...]]:
    """Optimal truncation index for the even-order increments B_2..B_2N.

    The index is the n with the smallest |B_2n| increment; stopping there is
    the standard rule for an asymptotic tail.  A final increment below
    `floor` means the series has effectively converged (the harmonic
    oscillator case, where every correction vanishes): the index is then N
    and no warning is attached.  Otherwise, a requested order beyond the
    optimal index draws a warning; nothing is resummed.
    """
    order = len(actions) - 1
    if order == 0:
        return 0, ()
    if abs(actions[-1]) < floor:
        return order, ()
    increments = [abs(a) for a in actions[1:]]
    trunc = 1 + increments.index(min(increments))
    if trunc < order:
        return trunc, (
            f"requested order {order} exceeds the optimal truncation index "
            f"{trunc}; increments grow past it (asymptotic regime)",
        )
    return trunc, ()


def quantize(req: QuantizationRequest, cfg: NumericsConfig = DEFAULT_CONFIG) -> QuantizationResult:
    """Solve Phi(E) = K*pi by bracket expansion from a leading-order seed,
    bisection to width bisection_rtol*(1+|E|), and one secant polish."""
    if req.order >= 1 and not cfg.include_odd_numeric:
        if not _odd_orders_certified(req.order):  # pragma: no cover - theorem
            raise DunhamError("total-derivative certification failed; cannot drop odd orders")
    target = req.K * math.pi

    def phase_at(E: float) -> float:
        return _eval_phase(req, E, cfg)[0]

    vmin, seed = _seed_energy(req, target, cfg)
    f_seed = phase_at(seed) - target
    lo = hi = seed
    flo = fhi = f_seed
    if f_seed < 0.0:
        # phase too small at the seed: walk the upper end outward
        for _ in range(cfg.bracket_expansion_cap):
            lo, flo = hi, fhi
            hi = vmin + 2.0 * (hi - vmin)
            fhi = phase_at(hi) - target
            if fhi >= 0.0:
                break
        else:
            raise NoSolutionError(
                f"failed to bracket level K={req.K} from above within "
                f"{cfg.bracket_expansion_cap} expansions"
            )
    elif f_seed > 0.0:
        for _ in range(cfg.bracket_expansion_cap):
            hi, fhi = lo, flo
            lo = vmin + 0.5 * (lo - vmin)
            flo = phase_at(lo) - target
            if flo <= 0.0:
                break
        else:
            raise NoSolutionError(
                f"failed to bracket level K={req.K} from below within "
                f"{cfg.bracket_expansion_cap} halvings"
            )

    while hi - lo > cfg.bisection_rtol * (1.0 + abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = phase_at(mid) - target
        if fmid < 0.0:
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid

    e_star = hi if fhi == flo else hi - fhi * (hi - lo) / (fhi - flo)
    phase, acts = _eval_phase(req, e_star, cfg)
    residual = phase - target
    if abs(residual) > cfg.residual_tol:
        raise NoSolutionError(
            f"residual {residual:.3g} exceeds tolerance {cfg.residual_tol} at E={e_star}"
        )
    actions = tuple(acts[2 * n] for n in range(0, req.order + 1))
    if actions[0] <= 0:
        raise NoSolutionError(f"leading action must be positive, got {actions[0]}")

    trunc, warnings = truncation_diagnostics(actions, cfg.truncation_floor)
    return QuantizationResult(
        K=req.K,
        order=req.order,
        E=float(e_star),
        residual=float(residual),
        actions=actions,
        optimal_truncation_index=trunc,
        warnings=tuple(warnings),
    )


def spectrum(
    V: Potential,
    levels: int,
    order: int,
    cfg: NumericsConfig = DEFAULT_CONFIG,
    use_analytic_maslov: bool = True,
) -> list[QuantizationResult]:
    """Quantize K = 0 .. levels-1 independently.

    Per-level failures do not abort the remaining levels; if any occurred,
    a SpectrumError carrying the partial results is raised at the end.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    results: list[QuantizationResult] = []
    failures: dict[int, Exception] = {}
    for K in range(levels):
        req = QuantizationRequest(V=V, K=K, order=order, use_analytic_maslov=use_analytic_maslov)
        try:
            results.append(quantize(req, cfg))
        except DunhamError as exc:
            failures[K] = exc
    if failures:
        raise SpectrumError(
            f"{len(failures)} of {levels} level(s) failed: "
            + "; ".join(f"K={k}: {e}" for k, e in failures.items()),
            results=results,
            failures=failures,
        )
    energies = [r.E for r in results]
    if any(b <= a for a, b in zip(energies, energies[1:])):
        raise SpectrumError(
            f"spectrum is not strictly increasing in K: {energies}", results=results
        )
    return results


def result_to_json(res: QuantizationResult) -> dict:
    return {
        "K": res.K,
        "order": res.order,
        "E": res.E,
        "residual": res.residual,
        "actions": list(res.actions),
        "optimal_truncation_index": res.optimal_truncation_index,
        "warnings": list(res.warnings),
    }


def results_to_csv(results: list[QuantizationResult]) -> str:
    """One row per K: K, E, residual, B_0..B_2N, optimal_truncation_index.

    Header format version: CSV_HEADER_VERSION.
    """
    if not results:
        return ""
    order = results[0].order
    cols = ["K", "E", "residual"] + [f"B_{2*n}" for n in range(order + 1)]
    cols.append("optimal_truncation_index")
    lines = [",".join(cols)]
    for r in results:
        row = [str(r.K), repr(r.E), repr(r.residual)]
        row += [repr(a) for a in r.actions]
        row.append(str(r.optimal_truncation_index))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
