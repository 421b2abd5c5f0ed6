"""Real turning points at a given energy, and their complex continuation.

At a real energy E inside the window, channel 1 has a classically allowed
well [a, b] and both channels have barrier endpoints adjacent to the
crossing: b < 0 < c with v1 > E on (b, 0) and v2 > E on (0, c).  For
complex E the real roots continue analytically; ``continue_complex``
follows them by a damped Newton iteration seeded at the real root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketFailure,
    DegenerateEnergy,
    NewtonDivergence,
    NoExit,
    NoWell,
)
from .potentials import DEFAULT_X_RANGE, PotentialSystem

__all__ = [
    "TurningPoints",
    "find_well_endpoints",
    "find_exit_point",
    "barrier_points",
    "continue_complex",
    "turning_points",
]

GRID_POINTS = 2000
ROOT_XTOL = 1e-12
RESIDUAL_TOL = 1e-11
#: energies closer than this to the well bottom or the crossing value are
#: rejected; the asymptotics degenerate there
ENERGY_MARGIN = 1e-6


@dataclass(frozen=True)
class TurningPoints:
    """Well endpoints a, b and exit point c at a (possibly complex) energy."""

    a: complex
    b: complex
    c: complex
    energy: complex


def _refine_root(f, df, lo, hi, flo):
    """Bisection to ROOT_XTOL followed by one guarded Newton polish."""
    for _ in range(200):
        if hi - lo <= ROOT_XTOL:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    fr = f(root)
    d = df(root)
    if d != 0.0:
        candidate = root - fr / d
        if lo - ROOT_XTOL <= candidate <= hi + ROOT_XTOL and abs(f(candidate)) <= abs(fr):
            root = candidate
    return root


def _scan_brackets(vals, xs):
    out = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            out.append((xs[max(i - 1, 0)], xs[i + 1]))
        elif vals[i] * vals[i + 1] < 0:
            out.append((xs[i], xs[i + 1]))
    return out


def find_well_endpoints(sys: PotentialSystem, E: float,
                        x_range: tuple = DEFAULT_X_RANGE,
                        n_grid: int = GRID_POINTS) -> tuple[float, float]:
    """Locate the two real solutions a < b of v1(x) = E bounding the well.

    Scans a uniform grid for sign changes, bisects each bracket, and
    polishes with one Newton step.  Raises NoWell below the sampled
    minimum of v1, DegenerateEnergy within 1e-6 of the well bottom or of
    v1(0), and BracketFailure when the sign-change count is not 2.
    """
    xs = np.linspace(x_range[0], x_range[1], n_grid)
    vals = np.real(sys.v1(xs)) - E
    vmin = float(np.min(np.real(sys.v1(xs))))
    if E < vmin:
        raise NoWell(f"E={E!r} lies below min v1 ~ {vmin!r}")
    v10 = float(np.real(sys.v1(0.0)))
    if abs(E - vmin) <= ENERGY_MARGIN or abs(E - v10) <= ENERGY_MARGIN:
        raise DegenerateEnergy(
            f"E={E!r} within {ENERGY_MARGIN} of the well bottom or the crossing value"
        )
    brackets = _scan_brackets(vals, xs)
    if len(brackets) != 2:
        raise BracketFailure(
            f"expected 2 sign changes of v1 - E on {x_range}, found {len(brackets)}"
        )
    f = lambda t: float(np.real(sys.v1(t))) - E
    df = lambda t: float(np.real(sys.dv1(t)))
    a, b = (_refine_root(f, df, lo, hi, f(lo)) for lo, hi in brackets)
    for root in (a, b):
        if abs(f(root)) > RESIDUAL_TOL:
            raise BracketFailure(f"root at {root!r} has residual {f(root)!r}")
    return a, b


def find_exit_point(sys: PotentialSystem, E: float,
                    x_range: tuple = DEFAULT_X_RANGE,
                    n_grid: int = GRID_POINTS) -> float:
    """Locate the solution c > 0 of v2(x) = E with v2 decreasing through it."""
    xs = np.linspace(0.0, x_range[1], n_grid)[1:]
    vals = np.real(sys.v2(xs)) - E
    brackets = _scan_brackets(vals, xs)
    if len(brackets) == 0:
        raise NoExit(f"v2 - E has no sign change on (0, {x_range[1]}] at E={E!r}")
    if len(brackets) > 1:
        raise BracketFailure(
            f"expected 1 sign change of v2 - E on (0, {x_range[1]}], found {len(brackets)}"
        )
    f = lambda t: float(np.real(sys.v2(t))) - E
    df = lambda t: float(np.real(sys.dv2(t)))
    c = _refine_root(f, df, brackets[0][0], brackets[0][1], f(brackets[0][0]))
    if abs(f(c)) > RESIDUAL_TOL:
        raise BracketFailure(f"exit point at {c!r} has residual {f(c)!r}")
    if df(c) >= 0:
        raise NoExit(f"v2 is not decreasing through its level crossing at {c!r}")
    return c


def barrier_points(sys: PotentialSystem, E: float,
                   x_range: tuple = DEFAULT_X_RANGE,
                   n_grid: int = GRID_POINTS) -> tuple[float, float]:
    """Barrier endpoints b < 0 < c adjacent to the crossing.

    b is the largest negative root of v1 = E (v1 rises through it), c the
    exit point of channel 2.  Unlike :func:`find_well_endpoints`, this does
    not require the well itself to lie in the scanned interval, so it also
    serves barrier-only model potentials.
    """
    xs = np.linspace(x_range[0], 0.0, n_grid)[:-1]
    vals = np.real(sys.v1(xs)) - E
    brackets = _scan_brackets(vals, xs)
    if not brackets:
        raise NoWell(f"v1 - E has no sign change on ({x_range[0]}, 0) at E={E!r}")
    f = lambda t: float(np.real(sys.v1(t))) - E
    df = lambda t: float(np.real(sys.dv1(t)))
    lo, hi = brackets[-1]
    b = _refine_root(f, df, lo, hi, f(lo))
    if df(b) <= 0:
        raise BracketFailure(f"v1 does not rise through E at b={b!r}")
    c = find_exit_point(sys, E, x_range, n_grid)
    return b, c


def continue_complex(sys: PotentialSystem, which: int, E: complex, seed: float) -> complex:
    """Continue a real turning point to complex energy by damped Newton.

    Solves v(z) = E for the root of channel ``which`` near ``seed`` (the
    real root at Re E).  Steps are halved while they increase the residual;
    at most 50 iterations.  The result must stay within
    ``10 |Im E| / |v'(seed)|`` of the seed, otherwise the iteration is
    deemed to have wandered to a different root and NewtonDivergence is
    raised.
    """
    v = sys.potential(which)
    dv = sys.potential_derivative(which)
    z = complex(seed)
    res = v(z) - E
    for _ in range(50):
        if abs(res) <= RESIDUAL_TOL:
            break
        d = dv(z)
        if d == 0:
            raise NewtonDivergence(f"zero derivative at {z!r}")
        step = -res / d
        for _ in range(60):
            cand = z + step
            cand_res = v(cand) - E
            if abs(cand_res) < abs(res):
                break
            step *= 0.5
        else:
            raise NewtonDivergence(f"damping stalled at {z!r}, residual {abs(res)!r}")
        z, res = cand, cand_res
    else:
        raise NewtonDivergence(f"no convergence after 50 iterations, residual {abs(res)!r}")
    dseed = abs(complex(dv(seed)))
    if dseed > 0:
        allowed = 10.0 * abs(E.imag) / dseed + 1e-8
        if abs(z - complex(seed)) > allowed:
            raise NewtonDivergence(
                f"root {z!r} left the basin of seed {seed!r} (allowed {allowed!r})"
            )
    return complex(z)


def turning_points(sys: PotentialSystem, E: complex,
                   x_range: tuple = DEFAULT_X_RANGE) -> TurningPoints:
    """All three turning points at ``E``; complex energies are continued
    from the real roots at Re E."""
    e_re = float(np.real(E))
    a, b = find_well_endpoints(sys, e_re, x_range)
    c = find_exit_point(sys, e_re, x_range)
    if complex(E).imag == 0.0:
        return TurningPoints(a=a, b=b, c=c, energy=complex(E))
    return TurningPoints(
        a=continue_complex(sys, 1, E, a),
        b=continue_complex(sys, 1, E, b),
        c=continue_complex(sys, 2, E, c),
        energy=complex(E),
    )
