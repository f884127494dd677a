"""Exponential-decay fits: log-linear for gaps, three-parameter
asymptote-plus-decay for the string order parameter."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares


@dataclass(frozen=True)
class FitResult:
    """Parameters of O(n) = asymptote + amplitude * exp(-n / xi).

    Gap fits have no asymptote (None).  xi is None only on the degenerate
    constant-input branch of the SOP fit, where amplitude is 0 and the decay
    length is undefined.  rms_residual is quoted in the fitted space:
    log-space for fit_gap, value-space for fit_sop.
    """

    amplitude: float
    asymptote: float | None
    xi: float | None
    rms_residual: float
    points_used: int


def fit_gap(points):
    """Linear least squares on (n, ln delta): slope = -1/xi, intercept = ln a0."""
    points = sorted((float(n), float(d)) for n, d in points)
    if len(points) < 3:
        raise ValueError(f"gap fit needs at least 3 points, got {len(points)}")
    ns = np.array([p[0] for p in points])
    deltas = np.array([p[1] for p in points])
    if np.any(deltas <= 0):
        raise ValueError("gap fit requires strictly positive gaps")
    logs = np.log(deltas)
    design = np.vstack([ns, np.ones_like(ns)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, logs, rcond=None)
    if slope >= 0:
        raise ValueError("gap sequence does not decay with size")
    resid = logs - design @ np.array([slope, intercept])
    return FitResult(
        amplitude=float(math.exp(intercept)),
        asymptote=None,
        xi=float(-1.0 / slope),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        points_used=len(points),
    )


def _decay_seed(ns, residuals):
    """Log-linear seed (amplitude, xi) for residuals of one sign."""
    sign = 1.0 if residuals[0] >= 0 else -1.0
    mags = np.maximum(np.abs(residuals), 1e-300)
    design = np.vstack([ns, np.ones_like(ns)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, np.log(mags), rcond=None)
    xi = -1.0 / slope if slope < 0 else 1.0
    return sign * math.exp(intercept), xi


def fit_sop(points, theta=None, asymptote=None, allow_mixed_parity=False):
    """Nonlinear least squares for O(n) = O_inf + A exp(-n / xi).

    Mixed-parity sizes are rejected unless allow_mixed_parity is set, in
    which case magnitudes |O - O_inf| are fitted (the decay factor alternates
    in sign with parity).  Passing a fixed asymptote reduces the problem to a
    log-linear fit of O - asymptote.
    """
    points = sorted((float(n), float(v)) for n, v in points)
    if len(points) < 4:
        raise ValueError(f"SOP fit needs at least 4 points, got {len(points)}")
    ns = np.array([p[0] for p in points])
    values = np.array([p[1] for p in points])
    parities = {int(n) % 2 for n in ns}
    if len(parities) > 1 and not allow_mixed_parity:
        raise ValueError(
            "mixed even/odd sizes alternate the decay sign; pass "
            "allow_mixed_parity to fit magnitudes instead"
        )

    if asymptote is not None:
        resid = values - asymptote
        if np.max(np.abs(resid)) < 1e-14:
            return FitResult(
                amplitude=0.0,
                asymptote=float(asymptote),
                xi=None,
                rms_residual=0.0,
                points_used=len(points),
            )
        if allow_mixed_parity and len(parities) > 1:
            resid = np.abs(resid)
        if np.any(resid > 0) and np.any(resid < 0):
            raise ValueError("residuals change sign; asymptote is inconsistent")
        amp, xi = _decay_seed(ns, resid)
        model = amp * np.exp(-ns / xi)
        rms = float(np.sqrt(np.mean((model - resid) ** 2)))
        return FitResult(
            amplitude=float(amp),
            asymptote=float(asymptote),
            xi=float(xi),
            rms_residual=rms,
            points_used=len(points),
        )

    if np.max(values) - np.min(values) < 1e-14:
        return FitResult(
            amplitude=0.0,
            asymptote=float(np.mean(values)),
            xi=None,
            rms_residual=float(np.std(values)),
            points_used=len(points),
        )

    o_inf0 = values[-1]
    lead = values[:-1] - o_inf0
    lead[np.abs(lead) < 1e-300] = 1e-300
    amp0, xi0 = _decay_seed(ns[:-1], lead)
    magnitudes = len(parities) > 1 and allow_mixed_parity

    def residual_fun(p):
        o_inf, amp, xi = p
        if magnitudes:
            return np.abs(values - o_inf) - amp * np.exp(-ns / xi)
        return (o_inf + amp * np.exp(-ns / xi)) - values

    x0 = np.array([o_inf0, abs(amp0) if magnitudes else amp0, max(xi0, 1e-3)])
    sol = least_squares(residual_fun, x0=x0, xtol=1e-10, ftol=1e-12, gtol=1e-12)
    o_inf, amp, xi = sol.x
    if xi <= 0:
        raise ValueError("SOP fit converged to a nonpositive decay length")
    return FitResult(
        amplitude=float(amp),
        asymptote=float(o_inf),
        xi=float(xi),
        rms_residual=float(np.sqrt(np.mean(sol.fun**2))),
        points_used=len(points),
    )
