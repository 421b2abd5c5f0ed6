"""Action, Agmon distance, and barrier phase integrals.

All integrands here behave like sqrt(distance to an endpoint) — or its
reciprocal — at simple turning points.  Substituting t = endpoint +- s^2
removes the square-root singularity exactly (the mapped integrand is
analytic in s for analytic potentials), after which fixed-order
Gauss-Legendre converges spectrally.  Every integral is evaluated at N and
2N nodes; if the two disagree the interval is bisected once and re-done.

Notation, for energy E in the window and scaled Planck parameter h:

    A(E)   = integral over the well [a, b] of sqrt(E - v1)      (action)
    A'(E)  = d A / d E = 1/2 * integral over [a, b] of 1/sqrt(E - v1)
    S(E)   = integral b..0 of sqrt(v1 - E) + integral 0..c of sqrt(v2 - E)
             (Agmon distance from the well to the exit point)
    a1     = integral b..0 of sqrt(v1 - E) / h
    b1     = integral 0..c of sqrt(v1 - E) / h
    a2     = integral 0..c of sqrt(v2 - E) / h
    b2     = integral b..0 of sqrt(v2 - E) / h

so that h * (a1 + a2) = S(E) identically (same quadrature path).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BarrierViolation
from .potentials import DEFAULT_X_RANGE, PotentialSystem
from .turning_points import barrier_points, find_well_endpoints

__all__ = [
    "ActionData",
    "PhaseIntegrals",
    "integrate_endpoint_singular",
    "action",
    "action_derivative",
    "agmon_distance",
    "phase_integrals",
    "action_data",
]

GL_NODES = 80
REFINE_ABS_TOL = 5e-12


@lru_cache(maxsize=32)
def _gl_rule(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def _gl_plain(f, lo, hi, n):
    nodes, weights = _gl_rule(n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    ts = mid + half * nodes
    return half * float(np.sum(weights * f(ts)))


def _gl_mapped(f, lo, hi, n, singular_end):
    """Gauss-Legendre after t = end -+ s^2; integrand f gets mapped t values
    and the extra jacobian 2s is applied here."""
    length = hi - lo
    smax = np.sqrt(length)
    nodes, weights = _gl_rule(n)
    ss = 0.5 * smax * (nodes + 1.0)
    ws = 0.5 * smax * weights
    if singular_end == "lo":
        ts = lo + ss * ss
    else:
        ts = hi - ss * ss
    return float(np.sum(ws * f(ts) * 2.0 * ss))


def _integrate_once(f, lo, hi, sing_lo, sing_hi, n):
    if sing_lo and sing_hi:
        mid = 0.5 * (lo + hi)
        return (_gl_mapped(f, lo, mid, n, "lo") + _gl_mapped(f, mid, hi, n, "hi"))
    if sing_lo:
        return _gl_mapped(f, lo, hi, n, "lo")
    if sing_hi:
        return _gl_mapped(f, lo, hi, n, "hi")
    return _gl_plain(f, lo, hi, n)


def integrate_endpoint_singular(f, lo, hi, sing_lo=False, sing_hi=False,
                                n=GL_NODES) -> float:
    """Integrate f over [lo, hi]; endpoints flagged singular get the s^2 map.

    The N-node and 2N-node results are compared; on disagreement beyond
    ~1e-11 the interval is bisected once (a single adaptive pass) and each
    half re-done at the doubled order.
    """
    if hi <= lo:
        if hi == lo:
            return 0.0
        raise ValueError(f"empty integration interval [{lo!r}, {hi!r}]")
    coarse = _integrate_once(f, lo, hi, sing_lo, sing_hi, n)
    fine = _integrate_once(f, lo, hi, sing_lo, sing_hi, 2 * n)
    if abs(fine - coarse) <= REFINE_ABS_TOL * max(1.0, abs(fine)):
        return fine
    mid = 0.5 * (lo + hi)
    left = _integrate_once(f, lo, mid, sing_lo, False, 2 * n)
    right = _integrate_once(f, mid, hi, False, sing_hi, 2 * n)
    return left + right


def _sqrt_clip(vals):
    # roundoff can push (E - v) a hair negative right at a turning point
    return np.sqrt(np.maximum(vals, 0.0))


def action(sys: PotentialSystem, E: float,
           x_range: tuple = DEFAULT_X_RANGE) -> float:
    """Well action A(E) = integral a..b of sqrt(E - v1(t)) dt."""
    a, b = find_well_endpoints(sys, E, x_range)
    v1 = sys.v1
    f = lambda ts: _sqrt_clip(E - np.real(v1(ts)))
    return integrate_endpoint_singular(f, a, b, sing_lo=True, sing_hi=True)


def action_derivative(sys: PotentialSystem, E: float,
                      x_range: tuple = DEFAULT_X_RANGE) -> float:
    """dA/dE = 1/2 * integral a..b of dt / sqrt(E - v1(t)).

    The boundary terms of differentiating under the integral vanish because
    the integrand of A is zero at the turning points.
    """
    a, b = find_well_endpoints(sys, E, x_range)
    v1 = sys.v1
    f = lambda ts: 0.5 / np.sqrt(np.maximum(E - np.real(v1(ts)), 1e-300))
    return integrate_endpoint_singular(f, a, b, sing_lo=True, sing_hi=True)


def _check_positive(g, lo, hi, label):
    inset = 1e-6 * (hi - lo)
    ts = np.linspace(lo + inset, hi - inset, 200)
    vals = g(ts)
    if np.min(vals) < -1e-12:
        raise BarrierViolation(
            f"{label} must stay positive on ({lo!r}, {hi!r}); "
            f"min sampled value {float(np.min(vals))!r}"
        )


def _barrier_quads(sys: PotentialSystem, E: float, x_range: tuple):
    """The two Agmon pieces: integral b..0 of sqrt(v1-E), 0..c of sqrt(v2-E)."""
    b, c = barrier_points(sys, E, x_range)
    v1, v2 = sys.v1, sys.v2
    g1 = lambda ts: np.real(v1(ts)) - E
    g2 = lambda ts: np.real(v2(ts)) - E
    _check_positive(g1, b, 0.0, "v1 - E")
    _check_positive(g2, 0.0, c, "v2 - E")
    i_a1 = integrate_endpoint_singular(lambda ts: _sqrt_clip(g1(ts)), b, 0.0, sing_lo=True)
    i_a2 = integrate_endpoint_singular(lambda ts: _sqrt_clip(g2(ts)), 0.0, c, sing_hi=True)
    return b, c, i_a1, i_a2


def agmon_distance(sys: PotentialSystem, E: float,
                   x_range: tuple = DEFAULT_X_RANGE) -> float:
    """Tunneling distance S(E) from the well edge b through the crossing to c."""
    _, _, i_a1, i_a2 = _barrier_quads(sys, E, x_range)
    return i_a1 + i_a2


@dataclass(frozen=True)
class PhaseIntegrals:
    """Barrier phase integrals divided by h (see module docstring)."""

    a1: float
    a2: float
    b1: float
    b2: float


def phase_integrals(sys: PotentialSystem, E: float, h: float,
                    x_range: tuple = DEFAULT_X_RANGE) -> PhaseIntegrals:
    """The four barrier integrals scaled by 1/h.

    Requires v2 > E on (b, 0) and v1 > E on (0, c) as well (the crossing
    geometry guarantees both); violations raise BarrierViolation.
    """
    b, c, i_a1, i_a2 = _barrier_quads(sys, E, x_range)
    v1, v2 = sys.v1, sys.v2
    g1 = lambda ts: np.real(v1(ts)) - E
    g2 = lambda ts: np.real(v2(ts)) - E
    _check_positive(g2, b, 0.0, "v2 - E")
    _check_positive(g1, 0.0, c, "v1 - E")
    # v1 - E is bounded away from 0 on [0, c] and v2 - E on [b, 0]: regular
    i_b1 = integrate_endpoint_singular(lambda ts: _sqrt_clip(g1(ts)), 0.0, c)
    i_b2 = integrate_endpoint_singular(lambda ts: _sqrt_clip(g2(ts)), b, 0.0)
    return PhaseIntegrals(a1=i_a1 / h, a2=i_a2 / h, b1=i_b1 / h, b2=i_b2 / h)


@dataclass(frozen=True)
class ActionData:
    """Action bundle at one (E, h): see module docstring for definitions.

    ``S1``/``S2`` are the full-barrier distances of each channel from b to
    c, i.e. S1 = h*(A1 + B1) and S2 = h*(A2 + B2) by construction.
    """

    A: float
    A_prime: float
    S: float
    S1: float
    S2: float
    A1: float
    A2: float
    B1: float
    B2: float
    energy: float
    h: float


def action_data(sys: PotentialSystem, E: float, h: float,
                x_range: tuple = DEFAULT_X_RANGE) -> ActionData:
    """Evaluate all action quantities at one energy with one quadrature pass."""
    ph = phase_integrals(sys, E, h, x_range)
    return ActionData(
        A=action(sys, E, x_range),
        A_prime=action_derivative(sys, E, x_range),
        S=h * ph.a1 + h * ph.a2,
        S1=h * ph.a1 + h * ph.b1,
        S2=h * ph.a2 + h * ph.b2,
        A1=ph.a1,
        A2=ph.a2,
        B1=ph.b1,
        B2=ph.b2,
        energy=E,
        h=h,
    )
