"""Ordered scan data ``(tau, value, stderr)`` with CSV round-trip."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

OBSERVABLES = ("delta_p", "average_gain")


@dataclass(frozen=True, eq=False)
class ScanSeries:
    """Observable sampled on a delay grid.

    Parameters
    ----------
    tau : array_like
        Delays, strictly increasing.
    value : array_like
        Observable per delay.
    stderr : array_like, optional
        Standard errors (zeros for noiseless scans).
    observable_kind : {"delta_p", "average_gain"}
    """

    tau: np.ndarray
    value: np.ndarray
    stderr: np.ndarray = None
    observable_kind: str = "delta_p"

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float).ravel()
        val = np.array(self.value, dtype=float).ravel()
        err = np.zeros_like(val) if self.stderr is None else np.array(self.stderr, dtype=float).ravel()
        if not (tau.shape == val.shape == err.shape):
            raise ValidationError("tau, value and stderr must have equal length")
        if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(val)) and np.all(np.isfinite(err))):
            raise ValidationError("scan contains non-finite entries")
        if np.any(err < 0):
            raise ValidationError("standard errors must be >= 0")
        if tau.size > 1 and np.any(np.diff(tau) <= 0):
            raise ValidationError("tau grid must be strictly increasing")
        if self.observable_kind not in OBSERVABLES:
            raise ValidationError(f"observable_kind must be one of {OBSERVABLES}")
        for name, arr in (("tau", tau), ("value", val), ("stderr", err)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.tau.size

    def __eq__(self, other):
        if not isinstance(other, ScanSeries):
            return NotImplemented
        return (
            self.observable_kind == other.observable_kind
            and np.array_equal(self.tau, other.tau)
            and np.array_equal(self.value, other.value)
            and np.array_equal(self.stderr, other.stderr)
        )

    def normalized(self):
        """Values and errors divided by the first point."""
        v0 = self.value[0]
        if v0 == 0:
            raise ValidationError("cannot normalise a scan whose first value is 0")
        return ScanSeries(self.tau, self.value / v0, self.stderr / abs(v0), self.observable_kind)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "value", "stderr"])
        for row in zip(self.tau, self.value, self.stderr):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, observable_kind="delta_p"):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["tau", "value", "stderr"]:
            raise ValidationError("expected header tau,value,stderr")
        data = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, 3)
        return cls(data[:, 0], data[:, 1], data[:, 2], observable_kind)


def require_increasing(tau, name="tau grid"):
    tau = np.asarray(tau, dtype=float).ravel()
    if tau.size == 0:
        raise ValidationError(f"{name} is empty")
    if not np.all(np.isfinite(tau)):
        raise ValidationError(f"{name} contains non-finite values")
    if tau[0] < 0:
        raise ValidationError(f"{name} must start at a non-negative delay")
    if np.any(np.diff(tau) <= 0):
        raise ValidationError(f"{name} must be strictly increasing")
    return tau

