"""Single configuration record for every numeric tolerance and cap.

All defaults sit near the double-precision floor with headroom; they are the
documented contract values, not tuning knobs that tests adjust to pass.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["NumericsConfig", "DEFAULT_CONFIG"]


@dataclass(frozen=True)
class NumericsConfig:
    # Contour geometry
    margin: float = 0.5           # semi_major = (1 + margin) * (x2 - x1) / 2
    root_clearance: float = 0.2   # other roots must sit at elliptical radius >= 1 + this
    min_minor_ratio: float = 1e-3  # give up shrinking semi_minor below this * semi_major

    # Quadrature
    initial_nodes: int = 64       # starting trapezoidal node count (even)
    max_nodes: int = 2**20        # doubling cap before QuadratureError
    quad_rel_tol: float = 1e-10   # doubling stops when successive results agree to this
    quad_abs_tol: float = 1e-12   # absolute floor for near-zero integrals
    reality_tol: float = 1e-8     # |Im B| must stay below this * (1 + |Re B|)
    closure_tol: float = 1e-8     # sqrt(Q) closure defect bound around the contour

    # Turning points
    real_root_imag_tol: float = 1e-9   # |Im root| below this * scale counts as real
    degeneracy_tol: float = 1e-7       # |Q'(root)| below this * scale means a double root

    # Quantization solver
    bisection_rtol: float = 1e-12      # bracket width target: this * (1 + |E|)
    residual_tol: float = 1e-10        # |total_phase(E*) - K*pi| contract
    bracket_expansion_cap: int = 200   # doublings/halvings before NoSolutionError
    bracket_seed: float | None = None  # energy seed override (None: leading-order scaling)
    truncation_floor: float = 1e-12    # |B_2N| below this means the series has converged
    include_odd_numeric: bool = False  # force numeric inclusion of odd orders >= 3


DEFAULT_CONFIG = NumericsConfig()
