"""Direct resonance computation for the coupled two-channel operator.

The operator

    P = [[-h^2 d2/dx2 + v1,  h (r0 + h r1 d/dx)],
         [h (r0 - h d/dx r1), -h^2 d2/dx2 + v2]]

is discretized on an interval with Dirichlet ends, after exterior complex
scaling of the right half-line: x is replaced by F(x) = x + i theta f(x)
where f vanishes identically left of ``x_start_scaling``, ramps up through
a cubic smoothstep of the configured width, and is exactly x - x_start
beyond the ramp.  Resonances appear as complex eigenvalues of the scaled
matrix that are insensitive to the scaling angle; the rotated continuum
sweeps past them as theta changes, which is what the stability filter
exploits when pairing eigenvalues with semiclassical estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import (
    ContourEvaluationError,
    EigensolveFailure,
    InvalidAngle,
)
from .potentials import EnergyWindow, PotentialSystem
from .spectrum import ResonanceEstimate, resonance_estimates
from .turning_points import find_exit_point

__all__ = [
    "DiscretizationConfig",
    "HamiltonianMatrix",
    "ResonanceRecord",
    "build_hamiltonian",
    "compute_resonances",
    "theta_stability",
    "match_resonances",
    "compare_with_direct",
]

SCHEMES = ("chebyshev_collocation", "finite_difference_4")

#: Eigenvalues may creep slightly above the real axis through roundoff;
#: anything below this is still treated as a resonance candidate.
IM_ROUNDOFF_GUARD = 1e-9

#: A drifted eigenvalue farther than this many local spacings from its
#: parent is considered lost rather than drifted.
LOST_TRACK_FACTOR = 10.0


@dataclass(frozen=True)
class DiscretizationConfig:
    """Grid, scheme and complex-scaling parameters for the matrix solver."""

    x_min: float = -8.0
    x_max: float = 12.0
    n: int = 400
    scheme: str = "chebyshev_collocation"
    theta: float = 0.15
    x_start_scaling: float | None = None
    smoothing_width: float = 3.0
    bc: str = "dirichlet"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.bc != "dirichlet":
            raise ValueError(f"unsupported boundary condition {self.bc!r}")
        if not self.x_min < 0.0 < self.x_max:
            raise ValueError("interval must contain the crossing point x = 0")
        if self.n < 64:
            raise ValueError("need at least 64 interior grid points")
        if not 0.0 <= self.theta < math.pi / 4:
            raise InvalidAngle(
                f"scaling angle {self.theta!r} outside [0, pi/4)"
            )
        if self.smoothing_width <= 0.0:
            raise ValueError("smoothing_width must be positive")
        if self.x_start_scaling is not None:
            x_inf = self.x_start_scaling
            if not (0.0 < x_inf and x_inf + self.smoothing_width <= self.x_max):
                raise ValueError(
                    "scaling region [x_start_scaling, x_start_scaling + width] "
                    "must lie inside (0, x_max]"
                )


def _contour_parts(x: np.ndarray, x_inf: float, width: float):
    """(f, f', f'') of the ramp profile at the nodes, all piecewise analytic.

    The slope is the cubic smoothstep: f' = 3u^2 - 2u^3 with
    u = (x - x_inf)/width on the ramp, so f' climbs monotonically from 0
    to 1 and f'' vanishes at both ramp edges (the profile is C^2 on all of
    the axis).  Integrating, f = (x - x_inf)(u^2 - u^3/2) on the ramp and
    f = x - x_inf - width/2 exactly beyond it.
    """
    f = np.zeros_like(x)
    fp = np.zeros_like(x)
    fpp = np.zeros_like(x)
    on_ramp = (x > x_inf) & (x < x_inf + width)
    u = (x[on_ramp] - x_inf) / width
    f[on_ramp] = (x[on_ramp] - x_inf) * (u * u - 0.5 * u ** 3)
    fp[on_ramp] = 3.0 * u * u - 2.0 * u ** 3
    fpp[on_ramp] = 6.0 * (u - u * u) / width
    beyond = x >= x_inf + width
    f[beyond] = x[beyond] - x_inf - width / 2.0
    fp[beyond] = 1.0
    return f, fp, fpp


def _cheb_matrix(n_total: int):
    """Spectral differentiation matrix on the n_total+1 Chebyshev points."""
    if n_total == 0:
        return np.zeros((1, 1)), np.ones(1)
    j = np.arange(n_total + 1)
    x = np.cos(np.pi * j / n_total)
    c = np.ones(n_total + 1)
    c[0] = 2.0
    c[-1] = 2.0
    c *= (-1.0) ** j
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n_total + 1))
    d -= np.diag(d.sum(axis=1))
    return d, x


def _derivative_matrices(cfg: DiscretizationConfig):
    """Interior-node first/second derivative matrices and the (ascending)
    nodes, with Dirichlet conditions imposed by dropping the endpoint rows
    and columns."""
    if cfg.scheme == "chebyshev_collocation":
        d_full, xi = _cheb_matrix(cfg.n + 1)
        d2_full = d_full @ d_full
        order = np.argsort(xi)
        d_full = d_full[np.ix_(order, order)]
        d2_full = d2_full[np.ix_(order, order)]
        xi = xi[order]
        scale = 2.0 / (cfg.x_max - cfg.x_min)
        nodes = cfg.x_min + (xi[1:-1] + 1.0) / scale
        d1 = d_full[1:-1, 1:-1] * scale
        d2 = d2_full[1:-1, 1:-1] * scale * scale
        return d1, d2, nodes
    # fourth-order central differences on a uniform interior grid; rows near
    # the Dirichlet ends are plain truncations of the infinite stencil, which
    # keeps D1 exactly skew-symmetric and D2 exactly symmetric
    dx = (cfg.x_max - cfg.x_min) / (cfg.n + 1)
    nodes = cfg.x_min + dx * np.arange(1, cfg.n + 1)
    d1 = np.zeros((cfg.n, cfg.n))
    d2 = np.zeros((cfg.n, cfg.n))
    for offset, w1, w2 in ((1, 2.0 / 3.0, 4.0 / 3.0), (2, -1.0 / 12.0, -1.0 / 12.0)):
        upper = np.eye(cfg.n, k=offset)
        lower = np.eye(cfg.n, k=-offset)
        d1 += w1 * (upper - lower)
        d2 += w2 * (upper + lower)
    d2 += -2.5 * np.eye(cfg.n)
    return d1 / dx, d2 / (dx * dx), nodes


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Discretized, contour-deformed two-channel operator."""

    matrix: np.ndarray
    x_nodes: np.ndarray
    z_nodes: np.ndarray
    contour_scale: np.ndarray
    x_start_scaling: float
    config: DiscretizationConfig
    h: float


def _resolve_x_inf(sys: PotentialSystem, cfg: DiscretizationConfig,
                   window: EnergyWindow | None) -> float:
    if cfg.x_start_scaling is not None:
        return cfg.x_start_scaling
    if cfg.theta == 0.0:
        return cfg.x_max  # no scaling region needed on an unrotated contour
    if window is None:
        raise ValueError(
            "x_start_scaling not set and no energy window given to derive it"
        )
    c = float(np.real(find_exit_point(sys, window.e_ref)))
    x_inf = c + 1.0
    if x_inf + cfg.smoothing_width > cfg.x_max:
        raise ValueError(
            f"derived scaling start {x_inf!r} leaves no room for the ramp "
            f"before x_max = {cfg.x_max!r}; enlarge the interval"
        )
    return x_inf


def build_hamiltonian(sys: PotentialSystem, cfg: DiscretizationConfig, h: float,
                      window: EnergyWindow | None = None) -> HamiltonianMatrix:
    """Assemble the 2n x 2n complex-scaled matrix.

    When ``cfg.x_start_scaling`` is unset it defaults to one unit beyond the
    exit point at the window's reference energy.  All coefficient functions
    are evaluated on the deformed contour z = x + i theta f(x); derivative
    matrices pick up 1/F' (first order) and 1/F'^2 together with the
    curvature term -F''/F'^3 (second order).
    """
    x_inf = _resolve_x_inf(sys, cfg, window)
    d1, d2, nodes = _derivative_matrices(cfg)
    f, fp, fpp = _contour_parts(nodes, x_inf, cfg.smoothing_width)
    fprime = 1.0 + 1j * cfg.theta * fp
    fsecond = 1j * cfg.theta * fpp
    z = nodes + 1j * cfg.theta * f

    d1c = (1.0 / fprime)[:, None] * d1
    d2c = (1.0 / fprime ** 2)[:, None] * d2 - (fsecond / fprime ** 3)[:, None] * d1

    blocks = {}
    for name, expr in (("v1", sys.v1), ("v2", sys.v2),
                       ("r0", sys.r0), ("r1", sys.r1)):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(expr(z), dtype=complex)
        if vals.ndim == 0:
            vals = np.full(z.shape, complex(vals))
        if not np.all(np.isfinite(vals)):
            raise ContourEvaluationError(
                f"{name} is not finite on the deformed contour "
                f"(theta={cfg.theta!r}, x_start_scaling={x_inf!r})"
            )
        blocks[name] = vals

    r0d = np.diag(blocks["r0"])
    r1d = np.diag(blocks["r1"])
    h11 = -h * h * d2c + np.diag(blocks["v1"])
    h22 = -h * h * d2c + np.diag(blocks["v2"])
    h12 = h * (r0d + h * r1d @ d1c)
    h21 = h * (r0d - h * d1c @ r1d)
    matrix = np.block([[h11, h12], [h21, h22]])
    return HamiltonianMatrix(matrix=matrix, x_nodes=nodes, z_nodes=z,
                             contour_scale=fprime, x_start_scaling=x_inf,
                             config=cfg, h=h)


def _all_eigenvalues(sys, cfg, h, window) -> np.ndarray:
    ham = build_hamiltonian(sys, cfg, h, window)
    try:
        vals = scipy.linalg.eigvals(ham.matrix)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigensolveFailure(f"dense eigensolve failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise EigensolveFailure("eigensolve returned non-finite eigenvalues")
    return vals


def _filter_window(vals: np.ndarray, window: EnergyWindow, h: float) -> np.ndarray:
    keep = ((vals.real >= window.lo) & (vals.real <= window.hi)
            & (vals.imag > -window.im_depth_coeff * h)
            & (vals.imag <= IM_ROUNDOFF_GUARD))
    out = vals[keep]
    return out[np.argsort(out.real)]


def compute_resonances(sys: PotentialSystem, cfg: DiscretizationConfig, h: float,
                       window: EnergyWindow) -> np.ndarray:
    """Eigenvalues of the scaled matrix inside the window's resonance box.

    The box is Re in [lo, hi], -C0 h < Im <= (roundoff guard); results come
    back sorted by real part.  No stability screening happens here — the
    list may contain rotated-continuum points alongside true resonances.
    """
    return _filter_window(_all_eigenvalues(sys, cfg, h, window), window, h)


def _drifts(sys, cfg, h, window, anchors, base_vals=None):
    """Drift of each anchor's nearest eigenvalue under theta -> 1.2 theta.

    Returns an array of drifts, inf marking anchors whose eigenvalue could
    not be followed (nearest partner farther than LOST_TRACK_FACTOR local
    spacings).
    """
    if cfg.theta <= 0.0:
        raise InvalidAngle("stability testing requires a positive scaling angle")
    vals0 = _all_eigenvalues(sys, cfg, h, window) if base_vals is None else base_vals
    cfg_up = replace(cfg, theta=1.2 * cfg.theta,
                     x_start_scaling=_resolve_x_inf(sys, cfg, window))
    vals1 = _all_eigenvalues(sys, cfg_up, h, window)
    drifts = np.empty(len(anchors))
    for i, e in enumerate(anchors):
        dist0 = np.abs(vals0 - e)
        i0 = int(np.argmin(dist0))
        lam0 = vals0[i0]
        others = np.abs(np.delete(vals0, i0) - lam0)
        spacing = float(np.min(others)) if others.size else math.inf
        drift = float(np.min(np.abs(vals1 - lam0)))
        drifts[i] = math.inf if drift > LOST_TRACK_FACTOR * spacing else drift
    return drifts


def theta_stability(sys: PotentialSystem, cfg: DiscretizationConfig, h: float,
                    E: complex, window: EnergyWindow | None = None) -> float:
    """How far the eigenvalue nearest E moves when theta grows by 20 %.

    Small values (<< local spacing) certify E as a genuine resonance of the
    unscaled problem; inf means the eigenvalue could not be tracked.
    """
    return float(_drifts(sys, cfg, h, window, [complex(E)])[0])


@dataclass
class ResonanceRecord:
    """One semiclassical estimate paired (or not) with a direct eigenvalue."""

    estimate: ResonanceEstimate
    computed: complex | None = None
    abs_dev_re: float = math.nan
    rel_dev_im: float = math.nan
    theta_stability: float = math.nan
    accepted: bool = False


def match_resonances(estimates: list[ResonanceEstimate],
                     eigenvalues: np.ndarray,
                     radius: float | None = None) -> list[ResonanceRecord]:
    """Greedily pair estimates with eigenvalues by real-part distance.

    Pairs are taken globally closest-first; each eigenvalue is used at most
    once, and pairs farther apart than ``radius`` (default 5 h^(3/2), the
    next-correction scale of the level positions) are left unmatched.
    """
    records = [ResonanceRecord(estimate=est) for est in estimates]
    if not estimates or len(eigenvalues) == 0:
        return records
    if radius is None:
        radius = 5.0 * estimates[0].h ** 1.5
    pairs = sorted(
        (abs(float(np.real(eigenvalues[j])) - est.e_k), i, j)
        for i, est in enumerate(estimates)
        for j in range(len(eigenvalues))
    )
    used_est: set[int] = set()
    used_eig: set[int] = set()
    for dist, i, j in pairs:
        if dist > radius:
            break
        if i in used_est or j in used_eig:
            continue
        used_est.add(i)
        used_eig.add(j)
        lam = complex(eigenvalues[j])
        rec = records[i]
        rec.computed = lam
        rec.abs_dev_re = dist
        width = rec.estimate.width
        rec.rel_dev_im = abs(lam.imag - width) / abs(width) if width != 0 else math.inf
    return records


def compare_with_direct(sys: PotentialSystem, window: EnergyWindow,
                        cfg: DiscretizationConfig, h: float,
                        stab_tol: float = 1e-6) -> list[ResonanceRecord]:
    """Full pipeline: estimates, direct eigenvalues, stability, matching.

    Eigenvalues in the window are screened for theta-stability first, so
    rotated-continuum points (which can sit closer in real part than the
    true resonance) never enter the pairing.  A record is accepted when it
    matched a stable eigenvalue whose magnitude of imaginary part clears
    the eigensolver noise floor, taken as 100 x the largest matched drift.
    """
    estimates, _skipped = resonance_estimates(sys, h, window)
    records = [ResonanceRecord(estimate=est) for est in estimates]
    if not estimates:
        return records

    vals0 = _all_eigenvalues(sys, cfg, h, window)
    candidates = _filter_window(vals0, window, h)
    if len(candidates) == 0:
        return records
    drifts = _drifts(sys, cfg, h, window, candidates, base_vals=vals0)
    stable = np.isfinite(drifts) & (drifts <= stab_tol)
    stable_vals = candidates[stable]
    stable_drifts = drifts[stable]

    records = match_resonances(estimates, stable_vals)
    matched_drifts = []
    for rec in records:
        if rec.computed is None:
            continue
        j = int(np.argmin(np.abs(stable_vals - rec.computed)))
        rec.theta_stability = float(stable_drifts[j])
        matched_drifts.append(rec.theta_stability)
    noise_floor = 100.0 * max(matched_drifts) if matched_drifts else 0.0
    for rec in records:
        rec.accepted = (
            rec.computed is not None
            and rec.theta_stability <= stab_tol
            and abs(rec.computed.imag) >= noise_floor
            and math.isfinite(rec.rel_dev_im)
        )
    return records
