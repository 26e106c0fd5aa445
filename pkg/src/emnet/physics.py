"""Link-budget primitives: radar detection, Friis links, jamming and BER.

All inputs are linear SI quantities (watts, meters, hertz, kelvin, m^2,
linear gains). Decibels appear only inside BER model evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

BOLTZMANN = 1.380649e-23  # J/K
DETECTION_THRESHOLD = 4.75  # Pfa = 1e-6
BER_CEILING = 0.5
BER_CUTOFF = 0.1  # beyond this the link cannot be established

FOUR_PI = 4.0 * math.pi


class ModelValidationError(ValueError):
    """A BER model failed range or monotonicity checks."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return value


def _require_nonnegative(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value < 0.0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class RadarParams:
    transmit_power: float
    antenna_gain: float
    wavelength: float
    horizontal_lobe_width: float  # degrees
    pulse_repetition_frequency: float
    scan_rate: float  # degrees / second
    receiver_bandwidth: float
    noise_figure: float
    system_losses: float = 1.0
    reference_temperature: float = 290.0

    def __post_init__(self) -> None:
        for name in (
            "transmit_power",
            "antenna_gain",
            "wavelength",
            "horizontal_lobe_width",
            "pulse_repetition_frequency",
            "scan_rate",
            "receiver_bandwidth",
            "reference_temperature",
        ):
            _require_positive(name, getattr(self, name))
        if _require_finite("noise_figure", self.noise_figure) < 1.0:
            raise ValueError("noise_figure must be >= 1")
        if _require_finite("system_losses", self.system_losses) < 1.0:
            raise ValueError("system_losses must be >= 1")

    @property
    def noise_power(self) -> float:
        """Thermal noise power referred to the receiver input, k*T0*B*Fn."""
        return (
            BOLTZMANN
            * self.reference_temperature
            * self.receiver_bandwidth
            * self.noise_figure
        )

    @property
    def pulses(self) -> float:
        return pulses_per_scan(
            self.horizontal_lobe_width, self.pulse_repetition_frequency, self.scan_rate
        )


@dataclass(frozen=True)
class JammerParams:
    transmit_power: float
    tx_gain: float
    wavelength: float

    def __post_init__(self) -> None:
        # zero power is allowed: it is how a jammer is switched off
        _require_nonnegative("transmit_power", self.transmit_power)
        _require_positive("tx_gain", self.tx_gain)
        _require_positive("wavelength", self.wavelength)


# -- BER models -------------------------------------------------------------

_VALIDATION_SAMPLES = 2001


@dataclass(frozen=True)
class BerModel:
    """Monotone map from SINR to bit error rate.

    ``kind`` selects the shape, evaluated in x = 10*log10(SINR):

    * ``logistic_db``: ``ceiling / (1 + exp(slope * (x - midpoint_db)))``
    * ``polynomial_db``: ``sum(c[k] * x**k)`` (ascending powers) with x
      clamped to ``domain_db``
    * ``table``: linear interpolation over ``(sinr_db, ber)`` samples with
      flat extrapolation

    The result is always clamped to [0, 0.5]. Construction validates the
    model by sampling; a model that leaves [0, 0.5] or increases with SINR
    raises :class:`ModelValidationError`.
    """

    kind: str = "logistic_db"
    coefficients: tuple[float, ...] = ()
    domain_db: tuple[float, float] = (-10.0, 30.0)
    points: tuple[tuple[float, float], ...] = ()
    slope: float = 1.0
    midpoint_db: float = 5.0
    ceiling: float = BER_CEILING

    def __post_init__(self) -> None:
        if self.kind not in ("logistic_db", "polynomial_db", "table"):
            raise ModelValidationError(f"unknown BER model kind {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "domain_db", tuple(float(v) for v in self.domain_db))
        object.__setattr__(
            self, "points", tuple((float(x), float(y)) for x, y in self.points)
        )
        if self.kind == "logistic_db":
            if not (self.slope > 0 and math.isfinite(self.slope)):
                raise ModelValidationError("logistic slope must be positive")
            if not 0.0 < self.ceiling <= BER_CEILING:
                raise ModelValidationError("logistic ceiling must lie in (0, 0.5]")
        elif self.kind == "polynomial_db":
            if not self.coefficients:
                raise ModelValidationError("polynomial model needs coefficients")
            lo, hi = self.domain_db
            if not lo < hi:
                raise ModelValidationError("domain_db must be an increasing pair")
        else:
            if len(self.points) < 2:
                raise ModelValidationError("table model needs at least two points")
            xs = [p[0] for p in self.points]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ModelValidationError("table sinr_db values must be strictly increasing")
        self._validate()

    def _raw(self, x_db: float) -> float:
        if self.kind == "logistic_db":
            z = self.slope * (x_db - self.midpoint_db)
            if z > 700.0:
                return 0.0
            return self.ceiling / (1.0 + math.exp(z))
        if self.kind == "polynomial_db":
            lo, hi = self.domain_db
            x = min(max(x_db, lo), hi)
            acc = 0.0
            for c in reversed(self.coefficients):
                acc = acc * x + c
            return acc
        pts = self.points
        if x_db <= pts[0][0]:
            return pts[0][1]
        if x_db >= pts[-1][0]:
            return pts[-1][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x_db <= x1:
                return y0 + (y1 - y0) * (x_db - x0) / (x1 - x0)
        return pts[-1][1]  # pragma: no cover

    def _sample_range(self) -> tuple[float, float]:
        if self.kind == "polynomial_db":
            return self.domain_db
        if self.kind == "table":
            return self.points[0][0], self.points[-1][0]
        span = 40.0 / self.slope
        return self.midpoint_db - span, self.midpoint_db + span

    def _validate(self) -> None:
        lo, hi = self._sample_range()
        prev = math.inf
        for k in range(_VALIDATION_SAMPLES):
            x = lo + (hi - lo) * k / (_VALIDATION_SAMPLES - 1)
            y = self._raw(x)
            if not (math.isfinite(y) and -1e-12 <= y <= BER_CEILING + 1e-12):
                raise ModelValidationError(
                    f"BER model output {y!r} at {x:.3f} dB leaves [0, 0.5]"
                )
            if y > prev + 1e-12:
                raise ModelValidationError(
                    f"BER model increases with SINR near {x:.3f} dB"
                )
            prev = y

    def __call__(self, sinr: float) -> float:
        return ber(self, sinr)


DEFAULT_BER_MODEL = BerModel()


# -- operations -------------------------------------------------------------


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    x = _require_finite("x", x)
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def pulses_per_scan(lobe_width_deg: float, prf: float, scan_rate_deg_s: float) -> float:
    """Echoes per scan, n = lobe width * PRF / scan rate (degree units)."""
    lobe_width_deg = _require_positive("lobe_width_deg", lobe_width_deg)
    prf = _require_positive("prf", prf)
    scan_rate_deg_s = _require_positive("scan_rate_deg_s", scan_rate_deg_s)
    return lobe_width_deg * prf / scan_rate_deg_s


def radar_echo_power(radar: RadarParams, rcs: float, range_m: float) -> float:
    """Received echo power in watts for a target of ``rcs`` at ``range_m``."""
    rcs = _require_positive("rcs", rcs)
    range_m = _require_positive("range", range_m)
    return (
        radar.transmit_power
        * radar.antenna_gain**2
        * radar.wavelength**2
        * rcs
        / (FOUR_PI**3 * range_m**4 * radar.system_losses)
    )


def radar_snr(
    radar: RadarParams, rcs: float, range_m: float, jamming_power: float = 0.0
) -> float:
    """Single-pulse SNR from the radar equation.

    ``jamming_power`` (watts at the receiver) adds to the thermal noise term,
    giving the signal-to-interference-plus-noise ratio.
    """
    jamming_power = _require_nonnegative("jamming_power", jamming_power)
    return radar_echo_power(radar, rcs, range_m) / (radar.noise_power + jamming_power)


def detection_probability(s_n: float, n: float) -> float:
    s_n = _require_nonnegative("s_n", s_n)
    n = _require_positive("n", n)
    return 1.0 - normal_cdf((DETECTION_THRESHOLD - math.sqrt(n) * s_n) / math.sqrt(1.0 + 2.0 * s_n))


def friis_received_power(
    p_t: float, g_t: float, g_r: float, wavelength: float, d: float, loss: float = 1.0
) -> float:
    p_t = _require_nonnegative("p_t", p_t)
    g_t = _require_positive("g_t", g_t)
    g_r = _require_positive("g_r", g_r)
    wavelength = _require_positive("wavelength", wavelength)
    d = _require_positive("d", d)
    loss = _require_positive("loss", loss)
    return p_t * g_t * g_r * wavelength**2 / ((FOUR_PI * d) ** 2 * loss)


def jammer_received_power(jammer: JammerParams, victim_rx_gain: float, d_j: float) -> float:
    return friis_received_power(
        jammer.transmit_power, jammer.tx_gain, victim_rx_gain, jammer.wavelength, d_j
    )


def sinr(p_r: float, noise_power: float, p_jr: float = 0.0) -> float:
    p_r = _require_nonnegative("p_r", p_r)
    noise_power = _require_positive("noise_power", noise_power)
    if p_jr == math.inf:
        return 0.0
    p_jr = _require_nonnegative("p_jr", p_jr)
    return p_r / (noise_power + p_jr)


def ber(model: BerModel, sinr_value: float) -> float:
    sinr_value = float(sinr_value)
    if math.isnan(sinr_value) or sinr_value < 0.0:
        raise ValueError(f"sinr must be >= 0, got {sinr_value!r}")
    if sinr_value == 0.0:
        x_db = -math.inf
    elif math.isinf(sinr_value):
        x_db = math.inf
    else:
        x_db = 10.0 * math.log10(sinr_value)
    if math.isinf(x_db):
        lo, hi = model._sample_range()
        x_db = lo - 1e3 if x_db < 0 else hi + 1e3
    return min(max(model._raw(x_db), 0.0), BER_CEILING)


def comm_capability(ber_value: float) -> float:
    """Normalized link quality: cos(5*pi*BER), zero once BER reaches 0.1."""
    ber_value = _require_finite("ber", ber_value)
    if not 0.0 <= ber_value <= BER_CEILING:
        raise ValueError(f"ber must lie in [0, 0.5], got {ber_value!r}")
    if ber_value >= BER_CUTOFF:
        return 0.0
    return max(math.cos(5.0 * math.pi * ber_value), 0.0)


@dataclass(frozen=True)
class CommParams:
    transmit_power: float
    tx_gain: float
    rx_gain: float
    wavelength: float
    noise_power: float
    system_losses: float = 1.0
    ber_model: BerModel = field(default=DEFAULT_BER_MODEL)

    def __post_init__(self) -> None:
        _require_nonnegative("transmit_power", self.transmit_power)
        for name in ("tx_gain", "rx_gain", "wavelength", "noise_power"):
            _require_positive(name, getattr(self, name))
        if _require_finite("system_losses", self.system_losses) < 1.0:
            raise ValueError("system_losses must be >= 1")


def link_capability(
    tx: CommParams, rx: CommParams, d: float, jamming_power: float = 0.0
) -> float:
    """Capability of a one-way link from ``tx`` to ``rx`` at distance ``d``.

    Friis power with the transmitter's losses, SINR against the receiver's
    noise floor plus ``jamming_power``, the receiver's BER model, then
    :func:`comm_capability`.
    """
    p_r = friis_received_power(
        tx.transmit_power, tx.tx_gain, rx.rx_gain, tx.wavelength, d, tx.system_losses
    )
    return comm_capability(ber(rx.ber_model, sinr(p_r, rx.noise_power, jamming_power)))


def ber_curve(model: BerModel, sinr_db: Sequence[float]) -> list[float]:
    return [ber(model, 10.0 ** (x / 10.0)) for x in sinr_db]
