"""Physical-pendulum variant: exact period, series model with the GUP term, fit."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, PhysicalConstants
from .fits import FitResult, _failed
from .lm import levenberg_marquardt
from .physics import GupModel

SERIES_LIMIT = 0.5  # rad; above this the quartic series is replaced by the exact period


class SeriesValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PendulumSpec:
    mass: float
    length: float
    gravity: float = 9.81

    def __post_init__(self):
        for name in ("mass", "length", "gravity"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")

    @property
    def small_angle_period(self) -> float:
        return 2 * math.pi * math.sqrt(self.length / self.gravity)

    T0 = small_angle_period


def agm(a: float, b: float, rtol: float = 1e-15) -> float:
    while abs(a - b) > rtol * abs(a):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus k (not m = k^2)."""
    if not 0 <= k < 1:
        raise ValueError(f"modulus must be in [0, 1), got {k!r}")
    return math.pi / (2 * agm(1.0, math.sqrt(1 - k * k)))


def exact_period(spec: PendulumSpec, theta0: float) -> float:
    if not 0 <= theta0 < math.pi:
        raise ValueError(f"theta0 must be in [0, pi) (libration), got {theta0!r}")
    return spec.T0 * (2 / math.pi) * ellipk(math.sin(theta0 / 2))


def gup_coefficient(spec: PendulumSpec, T0: float | None = None,
                    constants: PhysicalConstants = CODATA) -> float:
    """(2 pi m L / (Mp c T0))^2, the factor multiplying beta0 at order theta0^2."""
    T0 = spec.T0 if T0 is None else T0
    return (2 * math.pi * spec.mass * spec.length / (constants.planck_momentum * T0)) ** 2


def gup_period_deviation(spec: PendulumSpec, gup: GupModel, theta0,
                         constants: PhysicalConstants = CODATA):
    """dT/T0 = [1/16 - beta0 K] theta0^2 + 11/3072 theta0^4.

    Works on scalars or arrays.  Angles beyond ``SERIES_LIMIT`` still get the
    series value but raise a :class:`SeriesValidityWarning`.
    """
    th = np.asarray(theta0, dtype=float)
    if np.any(th > SERIES_LIMIT):
        warnings.warn(f"theta0 above {SERIES_LIMIT} rad: quartic series is outside its "
                      "validity range", SeriesValidityWarning, stacklevel=2)
    k = gup_coefficient(spec, constants=constants)
    dev = (1 / 16 - gup.beta0 * k) * th**2 + (11 / 3072) * th**4
    return float(dev) if dev.ndim == 0 else dev


@dataclass(frozen=True, eq=False)
class PeriodDataset:
    theta0: np.ndarray
    period: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        th, T, s = (np.asarray(v, dtype=float) for v in (self.theta0, self.period, self.sigma))
        if not (th.shape == T.shape == s.shape) or th.ndim != 1:
            raise ValueError("theta0, period, sigma must be equally long 1-d sequences")
        if np.any((th <= 0) | (th >= math.pi)):
            raise ValueError("theta0 must lie in (0, pi)")
        if np.any(s <= 0):
            raise ValueError("sigma_period must be > 0")
        object.__setattr__(self, "theta0", th)
        object.__setattr__(self, "period", T)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.theta0.size


def read_period_csv(path) -> PeriodDataset:
    """Columns theta0_rad, period_s, sigma_s after a header row."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["theta0_rad", "period_s", "sigma_s"]:
            raise ValueError(f"{path}: header must be theta0_rad,period_s,sigma_s")
        for rownum, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                if len(row) != 3:
                    raise ValueError
                rows.append([float(c) for c in row])
            except ValueError:
                raise ValueError(f"{path}: malformed row {rownum}: {','.join(row)!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    arr = np.array(rows)
    return PeriodDataset(arr[:, 0], arr[:, 1], arr[:, 2])


def write_period_csv(data: PeriodDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta0_rad", "period_s", "sigma_s"])
        for row in zip(data.theta0.tolist(), data.period.tolist(), data.sigma.tolist()):
            w.writerow([repr(v) for v in row])


def model_period(spec: PendulumSpec, T0: float, beta0: float, theta0,
                 constants: PhysicalConstants = CODATA) -> np.ndarray:
    """Period including the GUP term; exact elliptic form above SERIES_LIMIT."""
    th = np.asarray(theta0, dtype=float)
    gup_term = beta0 * gup_coefficient(spec, T0, constants) * th**2
    series = 1 + th**2 / 16 + (11 / 3072) * th**4
    exact = np.array([2 / math.pi * ellipk(math.sin(t / 2)) for t in th.ravel()]).reshape(th.shape)
    ratio = np.where(th <= SERIES_LIMIT, series, exact)
    return T0 * (ratio - gup_term)


def synthetic_dataset(spec: PendulumSpec, beta0: float = 0.0, n: int = 20,
                      theta_min_deg: float = 1.0, theta_max_deg: float = 10.0,
                      sigma_rel: float = 1e-6, seed: int | None = 0,
                      constants: PhysicalConstants = CODATA) -> PeriodDataset:
    """Period-versus-arc data from the exact period with an injected GUP term.

    Gaussian noise of ``sigma_rel * T0`` is added unless ``seed`` is None.
    """
    th = np.radians(np.linspace(theta_min_deg, theta_max_deg, n))
    T0 = spec.T0
    exact = np.array([exact_period(spec, t) for t in th])
    period = exact - T0 * beta0 * gup_coefficient(spec, constants=constants) * th**2
    sigma = np.full(n, sigma_rel * T0)
    if seed is not None:
        period = period + sigma * np.random.default_rng(seed).standard_normal(n)
    return PeriodDataset(th, period, sigma)


def fit_pendulum_beta0(spec: PendulumSpec, data: PeriodDataset,
                       constants: PhysicalConstants = CODATA) -> FitResult:
    """Weighted least squares for (T0, beta0) with the quartic term fixed.

    Uncertainties use the supplied sigmas as absolute.  ``beta0_upper`` is
    max(beta0, 0) + 2 sigma.
    """
    names = ("beta0_best", "beta0_upper", "T0_fitted")
    th = data.theta0
    if len(data) < 5:
        return _failed(names, f"need >= 5 points, got {len(data)}")
    if th.max() < 2 * th.min():
        return _failed(names, "angle range spans less than a factor 2: beta0 and T0 degenerate")
    T_ref = spec.T0
    k_ref = gup_coefficient(spec, constants=constants)

    def resid(p):
        T0 = p[0] * T_ref
        return (model_period(spec, T0, p[1] / k_ref, th, constants) - data.period) / data.sigma

    res = levenberg_marquardt(resid, [1.0, 0.0], x_scale=[1.0, 1e-3], absolute_sigma=True)
    s = res.stderr
    beta0 = res.x[1] / k_ref
    s_beta0 = s[1] / k_ref
    params = {"beta0_best": beta0, "beta0_upper": max(beta0, 0.0) + 2 * s_beta0,
              "T0_fitted": res.x[0] * T_ref}
    sig = {"beta0_best": s_beta0, "beta0_upper": math.nan, "T0_fitted": s[0] * T_ref}
    rms = float(np.sqrt(np.mean((res.residuals * data.sigma) ** 2)))
    return FitResult(params, sig, rms, res.converged, res.message,
                     {"chi2": res.cost, "n_points": len(data), "gup_coefficient": k_ref})
