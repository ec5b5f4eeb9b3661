"""Edge-weight distributions with bounded support.

Every distribution exposes its CDF, a right inverse of the CDF used for
inverse-transform sampling, the density at zero and the supremum of its
support (``rho_star``), which is the threshold the local search cost
converges to.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DistributionError, InvalidParameter


class EdgeWeightDistribution:
    name: str = "abstract"

    def cdf(self, x):
        raise NotImplementedError

    def inverse_cdf(self, u):
        raise NotImplementedError

    @property
    def density_at_zero(self) -> float:
        raise NotImplementedError

    @property
    def rho_star(self) -> float:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        """String form accepted by :func:`parse_distribution`."""
        raise NotImplementedError

    def mean(self) -> float:
        # E[X] = int_0^rho (1 - F(x)) dx, midpoint rule is plenty for reporting
        xs = np.linspace(0.0, self.rho_star, 20001)
        tail = 1.0 - np.asarray(self.cdf(xs), dtype=float)
        return float(np.sum((tail[1:] + tail[:-1]) * 0.5 * np.diff(xs)))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeWeightDistribution) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)


class Uniform(EdgeWeightDistribution):
    """Uniform on [0, upper]."""

    name = "uniform"

    def __init__(self, upper: float = 1.0):
        if not (math.isfinite(upper) and upper > 0):
            raise InvalidParameter(f"uniform upper bound must be positive, got {upper}")
        self.upper = float(upper)

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float) / self.upper, 0.0, 1.0)

    def inverse_cdf(self, u):
        return np.asarray(u, dtype=float) * self.upper

    @property
    def density_at_zero(self) -> float:
        return 1.0 / self.upper

    @property
    def rho_star(self) -> float:
        return self.upper

    @property
    def spec(self) -> str:
        return "uniform" if self.upper == 1.0 else f"uniform:{self.upper!r}"


class TruncatedExponential(EdgeWeightDistribution):
    """Exponential(rate) conditioned on [0, upper]."""

    name = "truncexp"

    def __init__(self, rate: float = 1.0, upper: float = 1.0):
        if not (rate > 0 and math.isfinite(rate)):
            raise InvalidParameter(f"rate must be positive, got {rate}")
        if not (upper > 0 and math.isfinite(upper)):
            raise InvalidParameter(f"upper bound must be positive, got {upper}")
        self.rate = float(rate)
        self.upper = float(upper)
        self._mass = -math.expm1(-self.rate * self.upper)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.upper)
        return -np.expm1(-self.rate * x) / self._mass

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return -np.log1p(-u * self._mass) / self.rate

    @property
    def density_at_zero(self) -> float:
        return self.rate / self._mass

    @property
    def rho_star(self) -> float:
        return self.upper

    @property
    def spec(self) -> str:
        return f"truncexp:{self.rate!r}:{self.upper!r}"


class PiecewiseLinear(EdgeWeightDistribution):
    """Density linear between knots ``(x_k, f_k)``, normalised to unit mass.

    The first knot must sit at 0 with a positive density value; the last
    knot is the right end of the support.
    """

    name = "pwlinear"

    def __init__(self, knots):
        knots = [(float(x), float(f)) for x, f in knots]
        if len(knots) < 2:
            raise InvalidParameter("need at least two knots")
        xs = np.array([k[0] for k in knots])
        fs = np.array([k[1] for k in knots])
        if xs[0] != 0.0:
            raise InvalidParameter("first knot must be at x = 0")
        if np.any(np.diff(xs) <= 0):
            raise InvalidParameter("knot positions must be strictly increasing")
        if np.any(fs < 0) or not np.all(np.isfinite(fs)):
            raise InvalidParameter("density values must be finite and non-negative")
        if fs[0] <= 0:
            raise InvalidParameter("density at zero must be positive")
        area = float(np.sum((fs[1:] + fs[:-1]) * 0.5 * np.diff(xs)))
        fs = fs / area
        self._raw = knots
        self.xs = xs
        self.fs = fs
        self._slopes = np.diff(fs) / np.diff(xs)
        self._cum = np.concatenate([[0.0], np.cumsum((fs[1:] + fs[:-1]) * 0.5 * np.diff(xs))])
        self._cum[-1] = 1.0

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.xs[-1])
        k = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        t = x - self.xs[k]
        return np.minimum(self._cum[k] + self.fs[k] * t + 0.5 * self._slopes[k] * t * t, 1.0)

    def inverse_cdf(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        k = np.clip(np.searchsorted(self._cum, u, side="right") - 1, 0, len(self.xs) - 2)
        r = u - self._cum[k]
        f = self.fs[k]
        a = self._slopes[k]
        disc = np.maximum(f * f + 2.0 * a * r, 0.0)
        denom = f + np.sqrt(disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            # rationalised root of a/2 t^2 + f t - r = 0, stable when a -> 0
            t = np.where(denom > 0, 2.0 * r / denom, 0.0)
        return np.minimum(self.xs[k] + t, self.xs[k + 1])

    @property
    def density_at_zero(self) -> float:
        return float(self.fs[0])

    @property
    def rho_star(self) -> float:
        # support ends where the density last becomes positive
        last = len(self.fs) - 1
        while last > 0 and self.fs[last] == 0 and self.fs[last - 1] == 0:
            last -= 1
        return float(self.xs[last])

    @property
    def spec(self) -> str:
        return "pwlinear:" + ",".join(f"{x!r}/{f!r}" for x, f in self._raw)


UNIFORM = Uniform()


def parse_distribution(text: str) -> EdgeWeightDistribution:
    """Parse ``uniform``, ``uniform:B``, ``truncexp:RATE:UPPER`` or
    ``pwlinear:X0/F0,X1/F1,...``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "uniform":
            return Uniform(float(rest)) if rest else Uniform()
        if head == "truncexp":
            parts = rest.split(":") if rest else []
            rate = float(parts[0]) if parts else 1.0
            upper = float(parts[1]) if len(parts) > 1 else 1.0
            return TruncatedExponential(rate, upper)
        if head == "pwlinear":
            knots = [tuple(map(float, item.split("/"))) for item in rest.split(",")]
            return PiecewiseLinear(knots)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise DistributionError(f"cannot parse distribution {text!r}: {exc}") from exc
    raise DistributionError(f"unknown distribution {text!r}")
