"""Synthetic multi-pulse clicks with range and azimuth encoded in the waveform.

Each click is a short train of exponentially decaying sinusoid bursts:

- pulse amplitudes scale by exp(-range/rho) and decay along the train at a
  rate proportional to range;
- a single-pole low-pass with cutoff inversely proportional to range shapes
  the whole click;
- the inter-pulse interval is base_ipi * (1 + 0.5 * azimuth / pi).
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.signal import lfilter

from ..errors import ConfigError
from .records import ClickDataset, ClickRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the synthetic click generator."""
    n: int = 2000
    pulse_count_base: int = 4
    sample_rate_hz: float = 48_000.0
    range_bounds_m: tuple[float, float] = (500.0, 5000.0)
    azimuth_bounds_rad: tuple[float, float] = (-math.pi, math.pi)
    noise_std: float = 0.005
    rng_seed: int = 0
    hydrophone_count: int = 5
    carrier_hz: float = 9_000.0
    burst_tau_s: float = 4e-4
    base_ipi_s: float = 1e-3
    range_scale_m: float = 10_000.0  # rho
    pulse_decay_scale_m: float = 5_000.0
    cutoff_scale_hz_m: float = 1.2e7
    onset_fraction: float = 0.25

    def __post_init__(self) -> None:
        object.__setattr__(self, "range_bounds_m", tuple(float(v) for v in self.range_bounds_m))
        object.__setattr__(self, "azimuth_bounds_rad", tuple(float(v) for v in self.azimuth_bounds_rad))
        self.validate()

    def validate(self) -> None:
        """Check the generator invariants."""
        r_min, r_max = self.range_bounds_m
        a_min, a_max = self.azimuth_bounds_rad
        if self.n < 1:
            raise ConfigError("synthetic.n", f"must be >= 1, got {self.n}")
        if self.pulse_count_base < 1:
            raise ConfigError("synthetic.pulse_count_base", f"must be >= 1, got {self.pulse_count_base}")
        if self.sample_rate_hz <= 0:
            raise ConfigError("synthetic.sample_rate_hz", "must be positive")
        if r_min < 0 or not r_min < r_max:
            raise ConfigError("synthetic.range_bounds_m", f"need 0 <= min < max, got {self.range_bounds_m}")
        if not a_min < a_max or a_min < -math.pi or a_max > math.pi:
            raise ConfigError("synthetic.azimuth_bounds_rad", f"need -pi <= min < max <= pi, got {self.azimuth_bounds_rad}")
        if self.noise_std < 0:
            raise ConfigError("synthetic.noise_std", f"must be >= 0, got {self.noise_std}")
        if self.hydrophone_count < 1:
            raise ConfigError("synthetic.hydrophone_count", "must be >= 1")
        for name in ("carrier_hz", "burst_tau_s", "base_ipi_s", "range_scale_m", "pulse_decay_scale_m", "cutoff_scale_hz_m"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"synthetic.{name}", "must be positive")
        if not 0 <= self.onset_fraction < 1:
            raise ConfigError("synthetic.onset_fraction", "must lie in [0, 1)")


def pulse_envelope(cfg: SyntheticConfig, range_m: float) -> np.ndarray:
    """Peak amplitude of every pulse in the train."""
    index = np.arange(cfg.pulse_count_base)
    decay_rate = range_m / cfg.pulse_decay_scale_m
    return math.exp(-range_m / cfg.range_scale_m) * np.exp(-decay_rate * index)


def inter_pulse_interval(cfg: SyntheticConfig, azimuth_rad: float) -> float:
    """Inter-pulse interval in seconds."""
    return cfg.base_ipi_s * (1.0 + 0.5 * azimuth_rad / math.pi)


def cutoff_hz(cfg: SyntheticConfig, range_m: float) -> float:
    """Low-pass cutoff, clamped below Nyquist."""
    return min(cfg.cutoff_scale_hz_m / max(range_m, 1.0), 0.45 * cfg.sample_rate_hz)


def decaying_burst(t: np.ndarray, carrier_hz: float, tau_s: float) -> np.ndarray:
    """Exponentially decaying sinusoid starting at t=0, silent before."""
    active = t >= 0
    burst = np.zeros_like(t)
    burst[active] = np.sin(2 * np.pi * carrier_hz * t[active]) * np.exp(-t[active] / tau_s)
    return burst


def one_pole_lowpass(signal: np.ndarray, cutoff: float, sample_rate: float) -> np.ndarray:
    """Single-pole recursive low-pass filter."""
    alpha = 1.0 - math.exp(-2 * math.pi * cutoff / sample_rate)
    return lfilter([alpha], [1.0, alpha - 1.0], signal)


def render_click(cfg: SyntheticConfig, range_m: float, azimuth_rad: float) -> np.ndarray:
    """Noise-free waveform for one (range, azimuth) pair."""
    t = np.arange(cfg.n) / cfg.sample_rate_hz
    onset = cfg.onset_fraction * cfg.n / cfg.sample_rate_hz
    ipi = inter_pulse_interval(cfg, azimuth_rad)

    click = np.zeros(cfg.n)
    for index, amplitude in enumerate(pulse_envelope(cfg, range_m)):
        click += amplitude * decaying_burst(t - onset - index * ipi, cfg.carrier_hz, cfg.burst_tau_s)

    return one_pole_lowpass(click, cutoff_hz(cfg, range_m), cfg.sample_rate_hz)


def generate_synthetic(cfg: SyntheticConfig, count: int) -> ClickDataset:
    """Generate `count` labelled clicks; a pure function of (cfg, count)."""
    if count < 0:
        raise ConfigError("count", f"must be >= 0, got {count}")

    rng = np.random.default_rng(cfg.rng_seed)
    ranges = rng.uniform(*cfg.range_bounds_m, size=count)
    azimuths = rng.uniform(*cfg.azimuth_bounds_rad, size=count)
    # uniform draws may round up to the bound; keep azimuths inside [-pi, pi)
    azimuths = np.minimum(azimuths, np.nextafter(math.pi, 0.0))
    noise = rng.normal(0.0, cfg.noise_std, size=(count, cfg.n)) if cfg.noise_std > 0 else np.zeros((count, cfg.n))

    clicks = []
    for i in range(count):
        samples = render_click(cfg, float(ranges[i]), float(azimuths[i])) + noise[i]
        clicks.append(ClickRecord(
            samples=samples,
            range_m=float(ranges[i]),
            azimuth_rad=float(azimuths[i]),
            hydrophone_id=i % cfg.hydrophone_count,
            click_id=i,
        ))

    logger.info("Generated %d synthetic clicks (n=%d, seed=%d)", count, cfg.n, cfg.rng_seed)
    return ClickDataset(tuple(clicks), n=cfg.n)
