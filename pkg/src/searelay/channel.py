"""Link-budget and effective-rate models for underwater optical wireless hops.

The received signal-to-noise ratio over a hop of length ``d`` meters is

    SNR(d) = A * exp(-K * d**beta) * (eps + d)**(-alpha)

with gain ``A = P_t * D**2 * cos(phi) / (4 * tan(theta)**2 * P_n)`` collecting
the transmitter power, aperture, pointing misalignment, beamwidth, and noise
power.  ``K`` [1/m] is the attenuation coefficient of the water (wavelength
dependent), ``alpha`` the geometric-spreading exponent, ``beta`` an optional
softening of the attenuation exponent, and ``eps`` [m] keeps the geometric
term finite at d = 0.

Two effective-rate models sit on top:

* Shannon:  R(d) = W * ln(1 + SNR(d))   [natural log]
* FEC-limited symbol rate:  R(d) = eta * M * A' * exp(-K*d) * (eps+d)**(-alpha) / zeta

Both are strictly decreasing, convex, and vanish as d grows; this is the regularity
all placement solvers in this package rely on.  ``validate_rate_assumption``
checks those properties numerically for any rate model, including custom ones
wrapped in :class:`RateFunction`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "ChannelParams",
    "ShannonRateParams",
    "FecRateParams",
    "RateFunction",
    "ValidationReport",
    "snr_gain",
    "snr",
    "shannon_rate",
    "fec_rate",
    "shannon_rate_function",
    "fec_rate_function",
    "validate_rate_assumption",
    "preset",
    "preset_names",
    "load_channel_config",
    "CONFIG_KEYS",
]


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelParams:
    """Physical constants of one optical transmitter/receiver pair."""

    transmit_power_W: float = 0.5
    noise_power_W: float = 2e-6
    aperture_diameter_m: float = 0.2
    misalignment_deg: float = 10.0   # phi, angle between beam axis and receiver plane normal
    half_beamwidth_deg: float = 10.0  # theta
    attenuation_per_m: float = 2e-2   # K, wavelength dependent
    epsilon_m: float = 1.0
    attenuation_exponent: float = 1.0  # beta in exp(-K d**beta), 0 < beta <= 1
    geometric_exponent: float = 2.0    # alpha, 2 = spherical spreading

    def __post_init__(self) -> None:
        for name in ("transmit_power_W", "noise_power_W", "aperture_diameter_m",
                     "epsilon_m", "attenuation_per_m", "geometric_exponent"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        # cos(phi) must stay positive and tan(theta) finite
        if not 0.0 <= self.misalignment_deg < 90.0:
            raise ValueError("misalignment_deg must lie in [0, 90)")
        if not 0.0 < self.half_beamwidth_deg < 90.0:
            raise ValueError("half_beamwidth_deg must lie in (0, 90)")
        if not 0.0 < self.attenuation_exponent <= 1.0:
            raise ValueError("attenuation_exponent must lie in (0, 1]")


@dataclass(frozen=True)
class ShannonRateParams:
    """Channel plus the bandwidth entering the Shannon-style rate."""

    channel: ChannelParams
    bandwidth_Hz: float = 5e8

    def __post_init__(self) -> None:
        if self.bandwidth_Hz <= 0:
            raise ValueError("bandwidth_Hz must be > 0")


@dataclass(frozen=True)
class FecRateParams:
    """Rate-adaptation model: highest symbol rate keeping SNR at threshold zeta."""

    modulation_bits_per_symbol: int   # M
    code_rate: float                  # eta in (0, 1)
    snr_threshold: float              # zeta > 0
    scaled_gain: float                # A' > 0, gain referred to unit symbol time
    attenuation_per_m: float = 2e-2
    epsilon_m: float = 1.0
    geometric_exponent: float = 2.0

    def __post_init__(self) -> None:
        if not (isinstance(self.modulation_bits_per_symbol, int)
                and self.modulation_bits_per_symbol >= 1):
            raise ValueError("modulation_bits_per_symbol must be an integer >= 1")
        if not 0.0 < self.code_rate < 1.0:
            raise ValueError("code_rate must lie in (0, 1)")
        if self.snr_threshold <= 0:
            raise ValueError("snr_threshold must be > 0")
        if self.scaled_gain <= 0:
            raise ValueError("scaled_gain must be > 0")
        if self.attenuation_per_m < 0:
            raise ValueError("attenuation_per_m must be >= 0")
        if self.epsilon_m <= 0 or self.geometric_exponent <= 0:
            raise ValueError("epsilon_m and geometric_exponent must be > 0")


# ---------------------------------------------------------------------------
# raw models
# ---------------------------------------------------------------------------

def _checked_distance(d):
    """Accept a scalar or array distance, reject negatives."""
    if isinstance(d, np.ndarray):
        if d.size and float(d.min()) < 0.0:
            raise ValueError("distance must be >= 0")
        return d.astype(float, copy=False), False
    dd = float(d)
    if dd < 0.0:
        raise ValueError("distance must be >= 0")
    return dd, True


def snr_gain(params: ChannelParams) -> float:
    """Aggregate link gain A (the SNR at d = 0 when eps = 1)."""
    phi = math.radians(params.misalignment_deg)
    theta = math.radians(params.half_beamwidth_deg)
    num = params.transmit_power_W * params.aperture_diameter_m ** 2 * math.cos(phi)
    den = 4.0 * math.tan(theta) ** 2 * params.noise_power_W
    return num / den


def snr(params: ChannelParams, d):
    """Signal-to-noise ratio at hop length d [m]. Scalar in, scalar out."""
    dd, scalar = _checked_distance(d)
    a = snr_gain(params)
    k = params.attenuation_per_m
    beta = params.attenuation_exponent
    alpha = params.geometric_exponent
    eps = params.epsilon_m
    if scalar:
        return a * math.exp(-k * dd ** beta) * (eps + dd) ** -alpha
    return a * np.exp(-k * dd ** beta) * (eps + dd) ** -alpha


def shannon_rate(params: ShannonRateParams, d):
    """Effective rate W * ln(1 + SNR(d)) [bit/s], natural logarithm."""
    dd, scalar = _checked_distance(d)
    s = snr(params.channel, dd)
    if scalar:
        return params.bandwidth_Hz * math.log1p(s)
    return params.bandwidth_Hz * np.log1p(s)


def fec_rate(params: FecRateParams, d):
    """Highest bit rate sustaining the decoding threshold at hop length d."""
    dd, scalar = _checked_distance(d)
    scale = (params.code_rate * params.modulation_bits_per_symbol
             * params.scaled_gain / params.snr_threshold)
    k = params.attenuation_per_m
    alpha = params.geometric_exponent
    eps = params.epsilon_m
    if scalar:
        return scale * math.exp(-k * dd) * (eps + dd) ** -alpha
    return scale * np.exp(-k * dd) * (eps + dd) ** -alpha


# ---------------------------------------------------------------------------
# rate-function wrapper used by the solvers
# ---------------------------------------------------------------------------

class RateFunction:
    """An evaluable hop-rate model R(d) with a numeric derivative.

    ``scalar`` is the raw float -> float callable (no validation, hot path);
    calling the object validates d >= 0 and also accepts arrays.
    """

    def __init__(self, fn, array_fn=None, label: str = "custom"):
        self.scalar = fn
        self._array = array_fn if array_fn is not None else fn
        self.label = label
        self.r0 = float(fn(0.0))
        if not math.isfinite(self.r0) or self.r0 <= 0:
            raise ValueError(f"rate model must be finite and positive at d=0, got {self.r0!r}")

    def __call__(self, d):
        dd, scalar = _checked_distance(np.asarray(d, dtype=float) if isinstance(d, (list, tuple)) else d)
        if scalar:
            return self.scalar(dd)
        return self._array(dd)

    def derivative(self, d: float) -> float:
        """Numeric dR/dd with step h = max(1e-6, 1e-6*d).

        Central difference away from the boundary; a second-order one-sided
        difference below d = h, where a central stencil would leave the domain.
        """
        dd = float(d)
        if dd < 0.0:
            raise ValueError("distance must be >= 0")
        h = max(1e-6, 1e-6 * dd)
        f = self.scalar
        if dd >= h:
            return (f(dd + h) - f(dd - h)) / (2.0 * h)
        return (-3.0 * f(dd) + 4.0 * f(dd + h) - f(dd + 2.0 * h)) / (2.0 * h)

    def scaled(self, factor: float) -> "RateFunction":
        """New RateFunction equal to factor * R(d)."""
        if factor <= 0:
            raise ValueError("scale factor must be > 0")
        fn = self.scalar
        arr = self._array
        return RateFunction(lambda d: factor * fn(d),
                            lambda d: factor * arr(d),
                            label=f"{self.label}*{factor:g}")

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"RateFunction({self.label}, r0={self.r0:.6g})"


def shannon_rate_function(params: ShannonRateParams) -> RateFunction:
    """Wrap a Shannon-rate channel as a RateFunction (fast scalar path)."""
    ch = params.channel
    a = snr_gain(ch)
    k = ch.attenuation_per_m
    eps = ch.epsilon_m
    alpha = ch.geometric_exponent
    beta = ch.attenuation_exponent
    w = params.bandwidth_Hz
    if beta == 1.0 and alpha == 2.0:
        def fn(d):
            t = eps + d
            return w * math.log1p(a * math.exp(-k * d) / (t * t))
    else:
        def fn(d):
            return w * math.log1p(a * math.exp(-k * d ** beta) * (eps + d) ** -alpha)

    def afn(d):
        d = np.asarray(d, dtype=float)
        return w * np.log1p(a * np.exp(-k * d ** beta) * (eps + d) ** -alpha)

    return RateFunction(fn, afn, label=f"shannon(K={k:g})")


def fec_rate_function(params: FecRateParams) -> RateFunction:
    """Wrap a FEC-limited rate model as a RateFunction."""
    scale = (params.code_rate * params.modulation_bits_per_symbol
             * params.scaled_gain / params.snr_threshold)
    k = params.attenuation_per_m
    eps = params.epsilon_m
    alpha = params.geometric_exponent
    if alpha == 2.0:
        def fn(d):
            t = eps + d
            return scale * math.exp(-k * d) / (t * t)
    else:
        def fn(d):
            return scale * math.exp(-k * d) * (eps + d) ** -alpha

    def afn(d):
        d = np.asarray(d, dtype=float)
        return scale * np.exp(-k * d) * (eps + d) ** -alpha

    return RateFunction(fn, afn, label=f"fec(K={k:g})")


# ---------------------------------------------------------------------------
# regularity validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    """Numeric check that a rate model is decreasing, convex, and vanishing."""

    max_forward_diff: float   # must be < 0 (strict decrease)
    min_second_diff: float    # must be >= -convexity_tol
    tail_value: float         # R(d_max), flagged if above tail_threshold
    r0: float
    convexity_tol: float
    tail_threshold: float
    monotone_ok: bool
    convex_ok: bool
    tail_ok: bool

    @property
    def passed(self) -> bool:
        return self.monotone_ok and self.convex_ok and self.tail_ok


def validate_rate_assumption(rate: RateFunction, d_max: float = 2000.0,
                             n_grid: int = 10_000, convexity_tol: float | None = None,
                             tail_ratio: float = 1e-3) -> ValidationReport:
    """Probe R on a uniform grid over [0, d_max] for the solver's regularity needs.

    The report is advisory: callers decide whether a failed flag is fatal.
    """
    if d_max <= 0:
        raise ValueError("d_max must be > 0")
    if n_grid < 3:
        raise ValueError("n_grid must be >= 3")
    grid = np.linspace(0.0, d_max, n_grid)
    r = rate(grid)
    fwd = np.diff(r)
    sec = np.diff(r, n=2)
    tol = 1e-6 * rate.r0 if convexity_tol is None else convexity_tol
    tail_thr = tail_ratio * rate.r0
    max_fwd = float(fwd.max())
    min_sec = float(sec.min())
    tail = float(r[-1])
    return ValidationReport(
        max_forward_diff=max_fwd,
        min_second_diff=min_sec,
        tail_value=tail,
        r0=rate.r0,
        convexity_tol=tol,
        tail_threshold=tail_thr,
        monotone_ok=max_fwd < 0.0,
        convex_ok=min_sec >= -tol,
        tail_ok=tail <= tail_thr,
    )


# ---------------------------------------------------------------------------
# presets and config files
# ---------------------------------------------------------------------------

# attenuation coefficient K [1/m] by nominal wavelength band
_PRESET_K = {"red": 3e-1, "green": 7e-2, "blue": 2e-2}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESET_K)


def preset(name: str, **channel_overrides) -> ShannonRateParams:
    """Built-in water presets: 'red', 'green', 'blue' (clearest)."""
    try:
        k = _PRESET_K[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(_PRESET_K)}") from None
    ch = replace(ChannelParams(attenuation_per_m=k), **channel_overrides)
    return ShannonRateParams(channel=ch)


# exact key set of the flat JSON channel-config format
CONFIG_KEYS = (
    "transmit_power_W",
    "noise_power_W",
    "aperture_diameter_m",
    "misalignment_deg",
    "half_beamwidth_deg",
    "attenuation_per_m",
    "epsilon_m",
    "bandwidth_Hz",
    "attenuation_exponent",
    "geometric_exponent",
)

_OPTIONAL_CONFIG_KEYS = ("attenuation_exponent", "geometric_exponent")


def load_channel_config(path) -> ShannonRateParams:
    """Read a flat JSON file of channel constants (exact keys, see CONFIG_KEYS)."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path}: expected a flat JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError(f"config file {path}: unknown keys {unknown}")
    missing = sorted(set(CONFIG_KEYS) - set(_OPTIONAL_CONFIG_KEYS) - set(raw))
    if missing:
        raise ValueError(f"config file {path}: missing keys {missing}")
    values = {k: float(v) for k, v in raw.items()}
    bandwidth = values.pop("bandwidth_Hz")
    return ShannonRateParams(channel=ChannelParams(**values), bandwidth_Hz=bandwidth)
