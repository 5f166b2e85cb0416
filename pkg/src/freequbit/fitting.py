"""Least-squares fits for scan data: exponential decay and phase sinusoid."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ValidationError
from .series import ScanSeries

MAX_ITER = 200
STEP_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class FitResult:
    """Decay fit ``y = amplitude exp(-rate tau) + offset`` or sinusoid fit.

    For sinusoids ``rate`` is 0 and ``y = offset + amplitude sin(x + phase)``.
    ``covariance`` is ordered ``(amplitude, rate, offset)`` for decays and
    ``(offset, a_sin, a_cos)`` for sinusoids.
    """

    rate: float
    amplitude: float
    offset: float
    phase: float = 0.0
    covariance: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    residual_norm: float = 0.0
    iterations: int = 0
    kind: str = "exp_decay"

    @property
    def rate_stderr(self):
        return math.sqrt(max(self.covariance[1, 1], 0.0))

    def __eq__(self, other):
        if not isinstance(other, FitResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self):
        return {
            "kind": self.kind,
            "rate": self.rate,
            "amplitude": self.amplitude,
            "offset": self.offset,
            "phase": self.phase,
            "covariance": np.asarray(self.covariance, dtype=float).tolist(),
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            float(d["rate"]),
            float(d["amplitude"]),
            float(d["offset"]),
            float(d.get("phase", 0.0)),
            np.array(d["covariance"], dtype=float),
            float(d["residual_norm"]),
            int(d.get("iterations", 0)),
            d.get("kind", "exp_decay"),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _linear_ab(x, y, w, rate):
    """Best ``(A, C)`` for fixed rate, and the weighted cost."""
    e = np.exp(-rate * x)
    m = np.column_stack([e, np.ones_like(x)]) * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(m, y * np.sqrt(w), rcond=None)
    r = y - coef[0] * e - coef[1]
    return coef, float(np.sum(w * r * r))


def _initial_guess(x, y, w):
    """Log-linear estimates of the rate under a few offset hypotheses."""
    span = x[-1] - x[0]
    best = None
    tail = y[-1]
    step = y[-1] - y[-2]
    for c0 in (0.0, tail, tail + step, tail + 3.0 * step):
        z = y - c0
        keep = np.abs(z) > 1e-300
        sign = np.sign(z[keep])
        if keep.sum() < 2 or not np.all(sign == sign[0]):
            continue
        slope = np.polyfit(x[keep], np.log(np.abs(z[keep])), 1)[0]
        rate = -slope if slope < 0 else 1.0 / span
        coef, cost = _linear_ab(x, y, w, rate)
        if best is None or cost < best[2]:
            best = (coef[0], rate, cost, coef[1])
    if best is None:
        rate = 1.0 / span
        coef, cost = _linear_ab(x, y, w, rate)
        best = (coef[0], rate, cost, coef[1])
    return np.array([best[0], best[1], best[3]])


def fit_exp_decay(series: ScanSeries, fit_offset=True):
    """Fit ``A exp(-rate tau) + C`` by damped Gauss-Newton (Levenberg-Marquardt).

    Points are weighted by ``1 / stderr^2`` when every stderr is positive;
    the covariance is then absolute. Otherwise it is scaled by the reduced
    chi-square.

    Raises
    ------
    ValidationError
        Fewer than 4 points or constant data.
    ConvergenceError
        No convergence within 200 iterations.
    """
    x = np.asarray(series.tau, dtype=float)
    y = np.asarray(series.value, dtype=float)
    if x.size < 4:
        raise ValidationError("need at least 4 points for an exponential fit")
    if np.ptp(y) <= 1e-14 * max(1.0, float(np.max(np.abs(y)))):
        raise ValidationError("degenerate (constant) data cannot define a decay rate")
    weighted = bool(np.all(series.stderr > 0))
    w = 1.0 / series.stderr**2 if weighted else np.ones_like(y)

    params = _initial_guess(x, y, w)
    if not fit_offset:
        params[2] = 0.0
    free = [0, 1, 2] if fit_offset else [0, 1]

    def residual(pr):
        return y - (pr[0] * np.exp(-pr[1] * x) + pr[2])

    def jacobian(pr):
        e = np.exp(-pr[1] * x)
        return np.column_stack([e, -pr[0] * x * e, np.ones_like(x)])[:, free]

    r = residual(params)
    cost = float(np.sum(w * r * r))
    lam = 1e-3
    for it in range(1, MAX_ITER + 1):
        jac = jacobian(params)
        jtw = jac.T * w
        hess = jtw @ jac
        grad = jtw @ r
        damp = lam * np.diag(np.diag(hess))
        try:
            delta = np.linalg.solve(hess + damp, grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = params.copy()
        trial[free] += delta
        small = np.linalg.norm(delta) <= STEP_RTOL * max(np.linalg.norm(params[free]), 1e-300)
        if trial[1] > 0:
            rt = residual(trial)
            ct = float(np.sum(w * rt * rt))
            if ct <= cost:
                params, r, cost = trial, rt, ct
                lam = max(lam / 10.0, 1e-12)
            else:
                lam *= 10.0
        else:
            lam *= 10.0
        if small:
            break
    else:
        raise ConvergenceError(f"exponential fit did not converge in {MAX_ITER} iterations")

    if params[1] <= 0:
        raise ConvergenceError("fit produced a non-positive rate")
    jac = jacobian(params)
    hess = (jac.T * w) @ jac
    dof = max(x.size - len(free), 1)
    cov_free = np.linalg.pinv(hess)
    if not weighted:
        cov_free = cov_free * (cost / dof)
    cov = np.zeros((3, 3))
    cov[np.ix_(free, free)] = cov_free
    return FitResult(
        rate=float(params[1]),
        amplitude=float(params[0]),
        offset=float(params[2]),
        covariance=cov,
        residual_norm=float(np.linalg.norm(r)),
        iterations=it,
    )


def fit_sinusoid(x, y, stderr=None):
    """Linear least-squares fit of ``y = C + A sin(x + phase)`` with ``A >= 0``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValidationError("need at least 3 points for a sinusoid fit")
    weighted = stderr is not None and bool(np.all(np.asarray(stderr) > 0))
    w = 1.0 / np.asarray(stderr, dtype=float) ** 2 if weighted else np.ones_like(y)
    m = np.column_stack([np.ones_like(x), np.sin(x), np.cos(x)])
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(m * sw[:, None], y * sw, rcond=None)
    c, a, b = coef
    r = y - m @ coef
    cov = np.linalg.pinv((m.T * w) @ m)
    if not weighted:
        cov = cov * float(np.sum(r * r)) / max(x.size - 3, 1)
    return FitResult(
        rate=0.0,
        amplitude=float(math.hypot(a, b)),
        offset=float(c),
        phase=float(math.atan2(b, a)),
        covariance=cov,
        residual_norm=float(np.linalg.norm(r)),
        kind="sinusoid",
    )
