"""Bohr-Sommerfeld levels and exponentially small predissociation widths.

The real parts of the resonances are the well levels A(e_k) = (k + 1/2) pi h.
To leading order the imaginary part of the k-th resonance is

    Im E_k = - (h^2 pi / 4) * A'(e_k)^-1 * exp(-2 S(e_k) / h)
             * (v1(0) - e_k)^(-1/2) * (v1'(0) - v2'(0))^(-1)
             * (r0(0) + r1(0) sqrt(v1(0) - e_k))^2,

negative: resonances sit below the real axis.  The same displacement is
re-derived here by solving the quantization condition

    cos(A(E)/h) = h F(E, h),
    F = -(pi / 4i) sin(A(E)/h) e^(-2 A1 - 2 A2) (v1(0)-E)^(-1/2)
        (v1'(0)-v2'(0))^(-1) (r0(0) + r1(0) sqrt(v1(0)-E))^2 + O(h^(1/2)),

with the unknown O(h^(1/2)) correction set to zero and cos(A(E)/h)
linearized around the level: with delta = (A(Re E) - (k+1/2) pi h)/h
+ A' (E - Re E)/h one has cos(A(E)/h) = -(-1)^k sin(delta), which keeps
full relative accuracy when both sides are exponentially small.  The
refinement Newton therefore iterates on the complex offset from e_k
rather than on E itself (a bare double at E ~ 1 cannot resolve residuals
far below machine epsilon times A'/h).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .actions import action, action_derivative, agmon_distance, phase_integrals
from .errors import DegenerateEnergy, NewtonDivergence
from .potentials import DEFAULT_X_RANGE, EnergyWindow, PotentialSystem, crossing_data
from .turning_points import ENERGY_MARGIN

__all__ = [
    "ResonanceEstimate",
    "TransitionElements",
    "QuantizationResidual",
    "RefinedResonance",
    "bohr_sommerfeld_levels",
    "width_from_parts",
    "width_leading",
    "resonance_estimates",
    "transition_elements",
    "quantization_residual",
    "solve_quantization",
]

LEVEL_TOL = 1e-13


def _well_energy_range(sys: PotentialSystem, x_range) -> tuple[float, float]:
    """Energies at which the well exists strictly inside the scan interval.

    The upper limit is the lowest of the interval-edge values of v1 and,
    when the crossing value sits above the well bottom, v1(0) (the barrier
    top); a guard of twice the degenerate-energy margin is applied.
    """
    xs = np.linspace(x_range[0], x_range[1], 2000)
    v1g = np.real(sys.v1(xs))
    vmin = float(np.min(v1g))
    v10 = float(np.real(sys.v1(0.0)))
    hi_candidates = [float(v1g[0]), float(v1g[-1])]
    if v10 > vmin + 1e-3:
        hi_candidates.append(v10)
    lo = vmin + 2 * ENERGY_MARGIN
    hi = min(hi_candidates) - 2 * ENERGY_MARGIN
    return lo, hi


def _solve_level(sys, target, lo, hi, a_lo, a_hi, x_range) -> float:
    """Invert the (strictly increasing) action: A(e) = target on [lo, hi].

    Bracketed Newton using A' as the exact derivative, with bisection
    fallback whenever a step leaves the bracket.
    """
    blo, bhi = lo, hi
    e = lo + (hi - lo) * (target - a_lo) / (a_hi - a_lo)
    e = min(max(e, blo), bhi)
    for _ in range(80):
        res = action(sys, e, x_range) - target
        if abs(res) <= LEVEL_TOL * max(1.0, abs(target)):
            return e
        if res > 0:
            bhi = min(bhi, e)
        else:
            blo = max(blo, e)
        slope = action_derivative(sys, e, x_range)
        cand = e - res / slope
        if not (blo <= cand <= bhi):
            cand = 0.5 * (blo + bhi)
        if cand == e:
            return e
        e = cand
    raise NewtonDivergence(
        f"level solve stalled at e={e!r} (target action {target!r})"
    )


def bohr_sommerfeld_levels(sys: PotentialSystem, h: float, window: EnergyWindow,
                           x_range: tuple = DEFAULT_X_RANGE) -> list[tuple[int, float]]:
    """All (k, e_k) with A(e_k) = (k + 1/2) pi h and e_k in the window.

    The window is first clamped to energies at which the well exists (and
    stays below the barrier top when there is one); a window entirely
    outside that range yields an empty list.
    """
    range_lo, range_hi = _well_energy_range(sys, x_range)
    lo = max(window.lo, range_lo)
    hi = min(window.hi, range_hi)
    if hi <= lo:
        return []
    a_lo = action(sys, lo, x_range)
    a_hi = action(sys, hi, x_range)
    k_min = math.ceil(a_lo / (math.pi * h) - 0.5 - 1e-12)
    k_max = math.floor(a_hi / (math.pi * h) - 0.5 + 1e-12)
    out = []
    for k in range(max(k_min, 0), k_max + 1):
        target = (k + 0.5) * math.pi * h
        e_k = _solve_level(sys, target, lo, hi, a_lo, a_hi, x_range)
        out.append((k, e_k))
    return out


def width_from_parts(h: float, a_prime: float, s_agmon: float, v1_minus_e: float,
                     slope_gap: float, r0_at_0: float, r1_at_0: float):
    """Leading-order width from its raw ingredients.

    Returns ``(width, parts)`` where ``parts`` holds the six factors whose
    product (with overall sign -1) is the width.  Kept separate from
    :func:`width_leading` so the pure formula can be exercised with
    synthetic factors.
    """
    parts = {
        "h2pi4": h * h * math.pi / 4.0,
        "Aprime_inv": 1.0 / a_prime,
        "exp_factor": math.exp(-2.0 * s_agmon / h),
        "v1_minus_e_pow": v1_minus_e ** -0.5,
        "dV_inv": 1.0 / slope_gap,
        "coupling_sq": (r0_at_0 + r1_at_0 * math.sqrt(v1_minus_e)) ** 2,
    }
    width = -(parts["h2pi4"] * parts["Aprime_inv"] * parts["exp_factor"]
              * parts["v1_minus_e_pow"] * parts["dV_inv"] * parts["coupling_sq"])
    return width, parts


def _crossing_factors(sys: PotentialSystem, E: float):
    cd = crossing_data(sys)
    v1me = cd.v1_at_0 - E
    if v1me <= ENERGY_MARGIN:
        raise DegenerateEnergy(
            f"v1(0) - E = {v1me!r} too small; energy too close to the crossing"
        )
    if cd.slope_gap <= 0:
        raise DegenerateEnergy(
            f"slope gap v1'(0) - v2'(0) = {cd.slope_gap!r} not positive"
        )
    return cd, v1me


def width_leading(sys: PotentialSystem, h: float, e_k: float,
                  x_range: tuple = DEFAULT_X_RANGE):
    """Leading-order width (Im E_k) at the level e_k; returns (width, parts)."""
    cd, v1me = _crossing_factors(sys, e_k)
    a_prime = action_derivative(sys, e_k, x_range)
    s_agmon = agmon_distance(sys, e_k, x_range)
    return width_from_parts(h, a_prime, s_agmon, v1me, cd.slope_gap,
                            cd.r0_at_0, cd.r1_at_0)


@dataclass(frozen=True)
class ResonanceEstimate:
    """Level position plus leading-order width and its factor breakdown."""

    k: int
    e_k: float
    width: float
    s_at_ek: float
    prefactor_parts: dict
    h: float


def resonance_estimates(sys: PotentialSystem, h: float, window: EnergyWindow,
                        x_range: tuple = DEFAULT_X_RANGE):
    """Estimates for every level in the window.

    Returns ``(estimates, skipped)``; levels whose width computation fails
    are reported in ``skipped`` as (k, e_k, reason) instead of aborting the
    whole window.
    """
    estimates = []
    skipped = []
    for k, e_k in bohr_sommerfeld_levels(sys, h, window, x_range):
        try:
            width, parts = width_leading(sys, h, e_k, x_range)
            estimates.append(ResonanceEstimate(
                k=k, e_k=e_k, width=width,
                s_at_ek=agmon_distance(sys, e_k, x_range),
                prefactor_parts=parts, h=h,
            ))
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            skipped.append((k, e_k, f"{type(exc).__name__}: {exc}"))
    return estimates, skipped


@dataclass(frozen=True)
class TransitionElements:
    """Leading-order interaction-matrix entries at one (E, h).

    ``t12``/``t34`` propagate across the barrier within each channel;
    ``t23``/``t32`` exchange amplitude between the channels at the
    crossing and carry the h^(1/2) smallness.
    """

    t12: complex
    t34: complex
    t23: complex
    t32: complex
    energy: float
    h: float


def transition_elements(sys: PotentialSystem, E: float, h: float,
                        x_range: tuple = DEFAULT_X_RANGE) -> TransitionElements:
    cd, v1me = _crossing_factors(sys, E)
    ph = phase_integrals(sys, E, h, x_range)
    coupling = cd.r0_at_0 + cd.r1_at_0 * math.sqrt(v1me)
    pref = (math.sqrt(math.pi * h) * v1me ** -0.25
            * cd.slope_gap ** -0.5 * coupling)
    return TransitionElements(
        t12=complex(math.exp(ph.a1 + ph.b1)),
        t34=complex(math.exp(ph.a2 + ph.b2)),
        t23=complex(-pref * math.exp(-ph.a1 - ph.a2)),
        t32=complex(pref * math.exp(ph.b1 + ph.b2)),
        energy=E,
        h=h,
    )


@dataclass(frozen=True)
class QuantizationResidual:
    """Value and E-derivative of cos(A(E)/h) - h F(E, h), linearized at Re E."""

    value: complex
    dvalue_dE: complex
    energy: complex
    h: float


def _f_leading(sys, e0, h, x_range):
    """Energy-independent pieces of F at the real anchor e0.

    Returns (s, efac, X) with s = (-1)^k the sine sign at the nearest
    level, efac = exp(-2 A1 - 2 A2), and X the crossing prefactor; the full
    leading term is F = (i pi / 4) * s * cos(delta) * efac * X.
    """
    cd, v1me = _crossing_factors(sys, e0)
    ph = phase_integrals(sys, e0, h, x_range)
    coupling = cd.r0_at_0 + cd.r1_at_0 * math.sqrt(v1me)
    x_factor = v1me ** -0.5 / cd.slope_gap * coupling ** 2
    efac = math.exp(-2.0 * ph.a1 - 2.0 * ph.a2)
    return efac * x_factor


def _anchored_residual(s, delta, hf_scale, a_prime, h):
    """Residual of the quantization condition in the shifted phase delta.

    cos(A/h) = cos((k+1/2) pi + delta) = -s sin(delta), and the sine factor
    inside F is s cos(delta); hf_scale = h * (pi/4) * efac * X.
    """
    sin_d = cmath.sin(delta)
    cos_d = cmath.cos(delta)
    f_term = 1j * hf_scale * s * cos_d
    value = -s * sin_d - f_term
    dvalue = -s * cos_d * a_prime / h
    return value, dvalue, f_term


def quantization_residual(sys: PotentialSystem, E: complex, h: float,
                          x_range: tuple = DEFAULT_X_RANGE) -> QuantizationResidual:
    """Evaluate cos(A(E)/h) - h F(E, h) with A Taylor-expanded at Re E.

    A and A' are computed at the real part only; the complex offset enters
    through delta = (A(Re E) - (k+1/2) pi h)/h + A' (i Im E)/h where k is
    the nearest level index.  The derivative neglects the E-variation of F,
    which is exponentially smaller than the cosine slope.
    """
    E = complex(E)
    e0 = E.real
    a0 = action(sys, e0, x_range)
    a_prime = action_derivative(sys, e0, x_range)
    k = int(round(a0 / (math.pi * h) - 0.5))
    s = 1.0 if k % 2 == 0 else -1.0
    delta = (a0 - (k + 0.5) * math.pi * h) / h + 1j * a_prime * E.imag / h
    hf_scale = h * (math.pi / 4.0) * _f_leading(sys, e0, h, x_range)
    value, dvalue, _ = _anchored_residual(s, delta, hf_scale, a_prime, h)
    return QuantizationResidual(value=value, dvalue_dE=dvalue, energy=E, h=h)


@dataclass(frozen=True)
class RefinedResonance:
    """Result of solving the quantization condition for one level.

    ``energy`` = e_k + offset; the offset is kept separately because its
    magnitude (~ h^2 exp(-2S/h)) is far below one ulp of ``energy``, and
    the converged residual is only meaningful relative to the offset.
    """

    k: int
    level: float
    offset: complex
    residual: complex
    residual_tol: float
    iterations: int

    @property
    def energy(self) -> complex:
        return self.level + self.offset

    @property
    def width(self) -> float:
        return self.offset.imag


def solve_quantization(sys: PotentialSystem, h: float, k: int,
                       x_range: tuple = DEFAULT_X_RANGE) -> RefinedResonance:
    """Newton-refine level k of the quantization condition into the complex
    plane.

    The iteration runs in the shifted phase delta = A'(e_k) (E - e_k) / h,
    seeded at the level (delta = 0) with all slowly varying quantities
    frozen there; the residual of the level solve itself is dropped from
    the phase, as it sits far below the neglected O(h^(1/2)) term of the
    quantization condition and would otherwise contaminate the real part,
    which at this order must not move.  Converges when |value| <= 1e-12
    |hF|; more than 10 steps raise NewtonDivergence.  With vanishing
    coupling F = 0 and the solution is the level itself, exactly.
    """
    lo, hi = _well_energy_range(sys, x_range)
    a_lo = action(sys, lo, x_range)
    a_hi = action(sys, hi, x_range)
    target = (k + 0.5) * math.pi * h
    if not a_lo <= target <= a_hi:
        raise NewtonDivergence(
            f"level k={k} has no Bohr-Sommerfeld solution in ({lo!r}, {hi!r})"
        )
    e_k = _solve_level(sys, target, lo, hi, a_lo, a_hi, x_range)

    a_prime = action_derivative(sys, e_k, x_range)
    s = 1.0 if k % 2 == 0 else -1.0
    hf_scale = h * (math.pi / 4.0) * _f_leading(sys, e_k, h, x_range)

    delta = 0.0 + 0.0j
    value, dvalue, f_term = _anchored_residual(s, delta, hf_scale, a_prime, h)
    tol = 1e-12 * abs(f_term)
    iterations = 0
    while abs(value) > tol:
        if iterations >= 10:
            raise NewtonDivergence(
                f"quantization refinement stalled at |value|={abs(value)!r} "
                f"(tol {tol!r}) for level k={k}"
            )
        delta = delta - value / (dvalue * h / a_prime)
        value, dvalue, f_term = _anchored_residual(s, delta, hf_scale, a_prime, h)
        iterations += 1
    offset = delta * h / a_prime
    return RefinedResonance(k=k, level=e_k, offset=offset, residual=value,
                            residual_tol=tol, iterations=iterations)
