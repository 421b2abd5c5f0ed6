"""Config-driven run driver: parse, dispatch, persist results.

This is a thin orchestration layer over the library modules: it reads a
line-oriented config (sections ``[potential]``, ``[window]``,
``[numerics]``, ``[scan]``, ``[output]``; ``key = value`` pairs, ``;`` to
put several on one line, ``#`` comments), dispatches one of the commands

    validate, levels, widths, refine, direct, compare, scan

and writes CSV/JSON results.  Exit codes: 0 success, 1 input error,
2 numerical failure.  There is deliberately no console entry point; the
module runs as ``python -m predissoc.runner config.cfg [command]`` and
every command is equally reachable as a library call.

The scan command tracks one level across h by pinning: h_k is chosen so
the k-th level sits exactly at the reference energy E*, which is what
makes the exponent of the width law cleanly identifiable from a straight
line in log(|width|/h^2) vs 1/h.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys as _sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actions import action, agmon_distance
from .errors import ConfigError, InsufficientData, PredissocError
from .potentials import (
    DEFAULT_X_RANGE,
    EnergyWindow,
    PotentialSystem,
    validate_assumptions,
)
from .solver import DiscretizationConfig, compare_with_direct, compute_resonances
from .spectrum import bohr_sommerfeld_levels, resonance_estimates

__all__ = [
    "RunConfig",
    "ScanRow",
    "ScanResult",
    "parse_config",
    "pin_level_h",
    "fit_width_slope",
    "run_scan",
    "run_command",
    "main",
]

COMMANDS = ("validate", "levels", "widths", "refine", "direct", "compare", "scan")

_SECTIONS = ("potential", "window", "numerics", "scan", "output")

_SCHEME_ALIASES = {
    "chebyshev": "chebyshev_collocation",
    "chebyshev_collocation": "chebyshev_collocation",
    "fd4": "finite_difference_4",
    "finite_difference_4": "finite_difference_4",
}


@dataclass
class RunConfig:
    """Validated run configuration with defaults filled in."""

    v1: str = ""
    v2: str = ""
    r0: str = "0"
    r1: str = "0"
    e_ref: float = math.nan
    half_width: float = math.nan
    c0_im: float = 5.0
    h: float | None = None
    scheme: str = "chebyshev_collocation"
    n: int = 400
    theta: float = 0.15
    domain: tuple[float, float] = (-8.0, 12.0)
    x_start_scaling: float | None = None
    smoothing_width: float = 3.0
    stab_tol: float = 1e-6
    e_star: float | None = None
    k_min: int | None = None
    k_max: int | None = None
    h_grid: list[float] | None = None
    out_dir: str = "."
    command: str | None = None

    def system(self) -> PotentialSystem:
        return PotentialSystem.from_strings(self.v1, self.v2, self.r0, self.r1)

    def window(self) -> EnergyWindow:
        return EnergyWindow(self.e_ref, self.half_width, self.c0_im)

    def discretization(self, n: int | None = None) -> DiscretizationConfig:
        return DiscretizationConfig(
            x_min=self.domain[0], x_max=self.domain[1],
            n=self.n if n is None else n, scheme=self.scheme,
            theta=self.theta, x_start_scaling=self.x_start_scaling,
            smoothing_width=self.smoothing_width,
        )


def _split_outside_quotes(line: str, sep: str) -> list[str]:
    parts = []
    buf = []
    in_quote = False
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
            buf.append(ch)
        elif ch == sep and not in_quote:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _strip_comment(line: str) -> str:
    return _split_outside_quotes(line, "#")[0]


def _as_float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"malformed number {token!r}", lineno) from None


def _as_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"malformed integer {token!r}", lineno) from None


def _as_expr(token: str, lineno: int, key: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == '"' and token[-1] == '"':
        return token[1:-1]
    raise ConfigError(f'{key} must be a quoted expression string', lineno)


def _as_list(token: str, lineno: int) -> list[float]:
    token = token.strip()
    if not (token.startswith("[") and token.endswith("]")):
        raise ConfigError(f"expected a [..] list, got {token!r}", lineno)
    inner = token[1:-1].strip()
    if not inner:
        return []
    return [_as_float(part.strip(), lineno) for part in inner.split(",")]


def _as_word(token: str, lineno: int) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == '"' and token[-1] == '"':
        return token[1:-1]
    return token


def parse_config(text: str) -> RunConfig:
    """Parse the line-oriented config format into a RunConfig.

    Unknown sections and keys, missing mandatory keys and malformed values
    all raise :class:`ConfigError` carrying the offending line number.
    """
    cfg = RunConfig()
    seen: set[tuple[str | None, str]] = set()
    lines: dict[str, int] = {}
    section: str | None = None

    def assign(key, raw, lineno):
        tok = raw.strip()
        place = (section, key)
        if place in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        seen.add(place)
        lines[key] = lineno
        if section == "potential":
            if key not in ("v1", "v2", "r0", "r1"):
                raise ConfigError(f"unknown key {key!r} in [potential]", lineno)
            setattr(cfg, key, _as_expr(tok, lineno, key))
        elif section == "window":
            if key == "e_ref":
                cfg.e_ref = _as_float(tok, lineno)
            elif key == "half_width":
                cfg.half_width = _as_float(tok, lineno)
            elif key == "c0_im":
                cfg.c0_im = _as_float(tok, lineno)
            else:
                raise ConfigError(f"unknown key {key!r} in [window]", lineno)
        elif section == "numerics":
            if key == "scheme":
                word = _as_word(tok, lineno)
                if word not in _SCHEME_ALIASES:
                    raise ConfigError(f"unknown scheme {word!r}", lineno)
                cfg.scheme = _SCHEME_ALIASES[word]
            elif key == "n":
                cfg.n = _as_int(tok, lineno)
            elif key == "theta":
                cfg.theta = _as_float(tok, lineno)
            elif key == "domain":
                dom = _as_list(tok, lineno)
                if len(dom) != 2 or not dom[0] < dom[1]:
                    raise ConfigError("domain must be [x_min, x_max] with x_min < x_max", lineno)
                cfg.domain = (dom[0], dom[1])
            elif key == "h":
                cfg.h = _as_float(tok, lineno)
            elif key == "x_start_scaling":
                cfg.x_start_scaling = _as_float(tok, lineno)
            elif key == "smoothing_width":
                cfg.smoothing_width = _as_float(tok, lineno)
            elif key == "stab_tol":
                cfg.stab_tol = _as_float(tok, lineno)
            else:
                raise ConfigError(f"unknown key {key!r} in [numerics]", lineno)
        elif section == "scan":
            if key == "e_star":
                cfg.e_star = _as_float(tok, lineno)
            elif key == "k_min":
                cfg.k_min = _as_int(tok, lineno)
            elif key == "k_max":
                cfg.k_max = _as_int(tok, lineno)
            elif key == "h_grid":
                cfg.h_grid = _as_list(tok, lineno)
            else:
                raise ConfigError(f"unknown key {key!r} in [scan]", lineno)
        elif section == "output":
            if key == "out_dir":
                cfg.out_dir = _as_word(tok, lineno)
            else:
                raise ConfigError(f"unknown key {key!r} in [output]", lineno)
        else:  # top level
            if key == "command":
                word = _as_word(tok, lineno)
                if word not in COMMANDS:
                    raise ConfigError(f"unknown command {word!r}", lineno)
                cfg.command = word
            else:
                raise ConfigError(f"unknown top-level key {key!r}", lineno)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            section = name
            continue
        for item in _split_outside_quotes(line, ";"):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ConfigError(f"expected key = value, got {item!r}", lineno)
            key, _, raw_val = item.partition("=")
            assign(key.strip(), raw_val, lineno)

    for key in ("v1", "v2"):
        if not getattr(cfg, key):
            raise ConfigError(f'missing mandatory key "{key}"')
    if math.isnan(cfg.e_ref):
        raise ConfigError('missing mandatory key "e_ref"')
    if math.isnan(cfg.half_width):
        raise ConfigError('missing mandatory key "half_width"')

    if cfg.command == "scan":
        _check_scan_inputs(cfg, lines)
    return cfg


def _check_scan_inputs(cfg: RunConfig, lines=None) -> None:
    lines = lines or {}
    if cfg.e_star is None:
        raise ConfigError("scan requires e_star")
    if cfg.h_grid is not None:
        if len(cfg.h_grid) < 3:
            raise ConfigError("scan requires ≥3 h values", lines.get("h_grid"))
    elif cfg.k_min is not None and cfg.k_max is not None:
        if cfg.k_max - cfg.k_min + 1 < 3:
            raise ConfigError("scan requires ≥3 h values", lines.get("k_max"))
    else:
        raise ConfigError("scan requires either h_grid or k_min/k_max")


def pin_level_h(sys: PotentialSystem, e_star: float, k_range,
                x_range: tuple = DEFAULT_X_RANGE) -> list[float]:
    """h values at which level k sits exactly at e_star, for each k in
    k_range; descending in h (ascending in k).

    Inverts the quantization condition in h: h_k = A(E*) / ((k+1/2) pi).
    """
    a_star = action(sys, e_star, x_range)
    return [a_star / ((k + 0.5) * math.pi) for k in sorted(k_range)]


@dataclass
class ScanRow:
    """One tracked level at one h."""

    h: float
    k: int
    e_k: float
    width_formula: float
    width_direct: float
    re_direct: float
    theta_stability: float
    accepted: bool


@dataclass
class ScanResult:
    """h-scan of one pinned level plus the width-law regression."""

    rows: list[ScanRow]
    s_target: float
    e_star: float
    slope: float = math.nan
    intercept: float = math.nan
    r_squared: float = math.nan

    @property
    def n_accepted(self) -> int:
        return sum(1 for r in self.rows if r.accepted)


def fit_width_slope(scan: ScanResult) -> tuple[float, float, float]:
    """Least-squares slope of log(|width_direct| / h^2) against 1/h.

    Only accepted rows with a negative direct width participate.  The
    returned slope estimates -2 S(E*); fewer than three usable rows raise
    InsufficientData.
    """
    rows = [r for r in scan.rows if r.accepted and r.width_direct < 0]
    if len(rows) < 3:
        raise InsufficientData(
            f"width-law fit needs at least 3 accepted rows, have {len(rows)}"
        )
    x = np.array([1.0 / r.h for r in rows])
    y = np.array([math.log(abs(r.width_direct) / r.h ** 2) for r in rows])
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        r_squared = 1.0 if ss_res < 1e-24 else 0.0
    return float(slope), float(intercept), r_squared


def run_scan(sys: PotentialSystem, e_star: float, h_values, *,
             half_width: float, disc: DiscretizationConfig,
             c0_im: float = 5.0, stab_tol: float = 1e-6,
             ks=None, x_range: tuple = DEFAULT_X_RANGE,
             fit: bool = True) -> ScanResult:
    """Track the level nearest e_star across the given h values.

    For each h the full comparison pipeline runs inside the window centered
    at e_star; the row records the formula width, the matched direct
    eigenvalue and its stability.  With ``fit=True`` the width-law slope is
    fitted when enough rows were accepted (and left NaN otherwise).
    """
    window = EnergyWindow(e_star, half_width, c0_im)
    rows = []
    for idx, h in enumerate(h_values):
        records = compare_with_direct(sys, window, disc, h, stab_tol=stab_tol)
        if not records:
            continue
        if ks is not None:
            wanted = [r for r in records if r.estimate.k == ks[idx]]
            rec = wanted[0] if wanted else None
        else:
            rec = min(records, key=lambda r: abs(r.estimate.e_k - e_star))
        if rec is None:
            continue
        lam = rec.computed
        rows.append(ScanRow(
            h=h, k=rec.estimate.k, e_k=rec.estimate.e_k,
            width_formula=rec.estimate.width,
            width_direct=lam.imag if lam is not None else math.nan,
            re_direct=lam.real if lam is not None else math.nan,
            theta_stability=rec.theta_stability,
            accepted=rec.accepted,
        ))
    rows.sort(key=lambda r: -r.h)
    scan = ScanResult(rows=rows, s_target=agmon_distance(sys, e_star, x_range),
                      e_star=e_star)
    if fit:
        try:
            scan.slope, scan.intercept, scan.r_squared = fit_width_slope(scan)
        except InsufficientData:
            pass
    return scan


# ---------------------------------------------------------------------------
# command handlers


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_json_safe(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_h(cfg: RunConfig, command: str) -> float:
    if cfg.h is None:
        raise ConfigError(f"{command} requires h under [numerics]")
    return cfg.h


def _cmd_validate(cfg: RunConfig, out: Path) -> int:
    report = validate_assumptions(cfg.system(), cfg.window())
    _write_json(out / "validate.json", report.as_dict())
    print(f"validate: {'passed' if report.passed else 'FAILED'} "
          f"({sum(report.clauses.values())}/{len(report.clauses)} clauses)")
    return 0 if report.passed else 2


def _cmd_levels(cfg: RunConfig, out: Path) -> int:
    h = _require_h(cfg, "levels")
    levels = bohr_sommerfeld_levels(cfg.system(), h, cfg.window())
    _write_csv(out / "levels.csv", ["k", "h", "e_k"],
               [(k, h, e_k) for k, e_k in levels])
    print(f"levels: {len(levels)} level(s) in window at h={h:g}")
    return 0


def _widths_rows(cfg: RunConfig, h: float):
    estimates, skipped = resonance_estimates(cfg.system(), h, cfg.window())
    for k, e_k, reason in skipped:
        print(f"widths: skipped k={k} at e_k={e_k:.6g}: {reason}", file=_sys.stderr)
    return estimates


def _cmd_widths(cfg: RunConfig, out: Path) -> int:
    h = _require_h(cfg, "widths")
    estimates = _widths_rows(cfg, h)
    _write_csv(out / "widths.csv", ["k", "h", "e_k", "S", "width_formula"],
               [(e.k, e.h, e.e_k, e.s_at_ek, e.width) for e in estimates])
    print(f"widths: {len(estimates)} row(s) at h={h:g}")
    return 0


def _cmd_direct(cfg: RunConfig, out: Path) -> int:
    h = _require_h(cfg, "direct")
    vals = compute_resonances(cfg.system(), cfg.discretization(), h, cfg.window())
    _write_csv(out / "direct.csv", ["re", "im"],
               [(v.real, v.imag) for v in vals])
    print(f"direct: {len(vals)} eigenvalue(s) in the resonance box at h={h:g}")
    return 0


def _cmd_refine(cfg: RunConfig, out: Path) -> int:
    h = _require_h(cfg, "refine")
    sys_ = cfg.system()
    window = cfg.window()
    vals_n = compute_resonances(sys_, cfg.discretization(), h, window)
    vals_2n = compute_resonances(sys_, cfg.discretization(n=2 * cfg.n), h, window)
    rows = []
    for v in vals_n:
        if len(vals_2n):
            partner = vals_2n[int(np.argmin(np.abs(vals_2n - v)))]
            delta = abs(partner - v)
        else:
            partner, delta = complex(math.nan, math.nan), math.inf
        rows.append((v.real, v.imag, partner.real, partner.imag, delta))
    _write_csv(out / "refine.csv",
               ["re_n", "im_n", "re_2n", "im_2n", "delta"], rows)
    worst = max((r[4] for r in rows), default=0.0)
    print(f"refine: n={cfg.n} vs n={2 * cfg.n}, worst drift {worst:.3g}")
    return 0


_COMPARE_HEADER = ["k", "h", "e_k", "S", "width_formula", "re_direct",
                   "width_direct", "abs_dev_re", "rel_dev_im",
                   "theta_stability", "accepted"]


def _cmd_compare(cfg: RunConfig, out: Path) -> int:
    h = _require_h(cfg, "compare")
    records = compare_with_direct(cfg.system(), cfg.window(),
                                  cfg.discretization(), h,
                                  stab_tol=cfg.stab_tol)
    rows = []
    for rec in records:
        est = rec.estimate
        lam = rec.computed
        rows.append((est.k, est.h, est.e_k, est.s_at_ek, est.width,
                     lam.real if lam is not None else math.nan,
                     lam.imag if lam is not None else math.nan,
                     rec.abs_dev_re, rec.rel_dev_im, rec.theta_stability,
                     rec.accepted))
    _write_csv(out / "compare.csv", _COMPARE_HEADER, rows)
    n_acc = sum(1 for r in records if r.accepted)
    print(f"compare: {n_acc}/{len(records)} level(s) accepted at h={h:g}")
    return 0


def _cmd_scan(cfg: RunConfig, out: Path) -> int:
    _check_scan_inputs(cfg)
    sys_ = cfg.system()
    if cfg.h_grid is not None:
        h_values, ks = list(cfg.h_grid), None
    else:
        k_list = list(range(cfg.k_min, cfg.k_max + 1))
        h_values = pin_level_h(sys_, cfg.e_star, k_list)
        ks = k_list
    scan = run_scan(sys_, cfg.e_star, h_values, half_width=cfg.half_width,
                    disc=cfg.discretization(), c0_im=cfg.c0_im,
                    stab_tol=cfg.stab_tol, ks=ks, fit=False)
    _write_csv(out / "scan.csv",
               ["h", "k", "e_k", "width_formula", "width_direct",
                "re_direct", "theta_stability", "accepted"],
               [(r.h, r.k, r.e_k, r.width_formula, r.width_direct,
                 r.re_direct, r.theta_stability, r.accepted)
                for r in scan.rows])
    try:
        scan.slope, scan.intercept, scan.r_squared = fit_width_slope(scan)
    except InsufficientData:
        _write_json(out / "scan_fit.json", {
            "slope": None, "intercept": None, "r_squared": None,
            "s_target": scan.s_target, "e_star": scan.e_star,
            "n_accepted": scan.n_accepted,
        })
        raise
    _write_json(out / "scan_fit.json", {
        "slope": scan.slope, "intercept": scan.intercept,
        "r_squared": scan.r_squared, "s_target": scan.s_target,
        "e_star": scan.e_star, "n_accepted": scan.n_accepted,
    })
    print(f"scan: slope {scan.slope:.6g} vs -2 S(E*) = {-2 * scan.s_target:.6g} "
          f"({scan.n_accepted} accepted row(s))")
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "levels": _cmd_levels,
    "widths": _cmd_widths,
    "direct": _cmd_direct,
    "refine": _cmd_refine,
    "compare": _cmd_compare,
    "scan": _cmd_scan,
}


def _emit_error(exc: Exception) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=_sys.stderr)


def run_command(cfg: RunConfig, command: str | None = None) -> int:
    """Execute one command against a parsed config; returns the exit code.

    Errors never propagate: bad input maps to exit 1, numerical failures
    to exit 2, each with a one-line JSON record on standard error.
    """
    try:
        cmd = command or cfg.command
        if cmd is None:
            raise ConfigError("no command given (config key or argument)")
        if cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}")
        return _HANDLERS[cmd](cfg, Path(cfg.out_dir))
    except ConfigError as exc:
        _emit_error(exc)
        return 1
    except PredissocError as exc:
        _emit_error(exc)
        return 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m predissoc.runner",
        description="Semiclassical vs direct predissociation widths, "
                    "driven by a config file.",
    )
    parser.add_argument("config", help="path to the run configuration file")
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="override the command set in the config")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        _emit_error(ConfigError(f"cannot read config: {exc}"))
        return 1
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        _emit_error(exc)
        return 1
    return run_command(cfg, args.command)


if __name__ == "__main__":
    _sys.exit(main())
