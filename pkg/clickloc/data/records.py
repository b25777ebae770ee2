"""Click records and datasets."""

from collections import Counter
from dataclasses import dataclass, field
import math

import numpy as np

from ..errors import ConfigError, ShapeError


def wrap_azimuth(azimuth_rad: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = (azimuth_rad + math.pi) % (2 * math.pi) - math.pi
    # float modulo can land exactly on +pi
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True, eq=False)
class ClickRecord:
    """One detected click with its ground truth."""
    samples: np.ndarray
    range_m: float
    azimuth_rad: float
    hydrophone_id: int = 0
    click_id: int = 0

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ShapeError(f"click {self.click_id}: samples must be a vector, got shape {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

        if not math.isfinite(self.range_m) or self.range_m < 0:
            raise ConfigError("range_m", f"click {self.click_id}: must be finite and >= 0, got {self.range_m}")
        if not -math.pi <= self.azimuth_rad < math.pi:
            raise ConfigError("azimuth_rad", f"click {self.click_id}: must lie in [-pi, pi), got {self.azimuth_rad}")

    @property
    def n(self) -> int:
        """Number of samples."""
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class ClickDataset:
    """Ordered, immutable collection of clicks sharing one length n."""
    clicks: tuple[ClickRecord, ...] = ()
    n: int = 0
    _counts: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        clicks = tuple(self.clicks)
        object.__setattr__(self, "clicks", clicks)

        if clicks and self.n == 0:
            object.__setattr__(self, "n", clicks[0].n)
        for index, click in enumerate(clicks):
            if click.n != self.n:
                raise ShapeError(f"record {index}: expected {self.n} samples, got {click.n}")

        object.__setattr__(self, "_counts", dict(sorted(Counter(c.hydrophone_id for c in clicks).items())))

    def __len__(self) -> int:
        return len(self.clicks)

    def __iter__(self):
        return iter(self.clicks)

    def __getitem__(self, index: int) -> ClickRecord:
        return self.clicks[index]

    @property
    def hydrophone_count(self) -> int:
        """Number of distinct hydrophones (H)."""
        return len(self._counts)

    @property
    def per_hydrophone_counts(self) -> dict[int, int]:
        """Clicks per hydrophone (N^j), keyed by hydrophone id."""
        return dict(self._counts)

    def samples_matrix(self) -> np.ndarray:
        """All waveforms stacked as an (N, n) array."""
        if not self.clicks:
            return np.zeros((0, self.n))
        return np.stack([c.samples for c in self.clicks])

    def ranges(self) -> np.ndarray:
        """Ground-truth ranges in meters."""
        return np.array([c.range_m for c in self.clicks], dtype=np.float64)

    def azimuths(self) -> np.ndarray:
        """Ground-truth azimuths in radians."""
        return np.array([c.azimuth_rad for c in self.clicks], dtype=np.float64)

    def hydrophone_ids(self) -> np.ndarray:
        """Hydrophone label of every click."""
        return np.array([c.hydrophone_id for c in self.clicks], dtype=np.int64)

    def click_ids(self) -> np.ndarray:
        """Click ids in dataset order."""
        return np.array([c.click_id for c in self.clicks], dtype=np.int64)

    def targets(self, target: str) -> np.ndarray:
        """Ground truth for 'range' or 'azimuth'."""
        if target == "range":
            return self.ranges()
        if target == "azimuth":
            return self.azimuths()
        raise ConfigError("target", f"unknown target {target!r}")

    def subset(self, indices) -> "ClickDataset":
        """Dataset restricted to the given indices, in that order."""
        return ClickDataset(tuple(self.clicks[i] for i in indices), n=self.n)

    def replace_samples(self, index: int, samples: np.ndarray) -> "ClickDataset":
        """Copy of the dataset with one waveform swapped out."""
        click = self.clicks[index]
        swapped = ClickRecord(samples, click.range_m, click.azimuth_rad, click.hydrophone_id, click.click_id)
        clicks = self.clicks[:index] + (swapped,) + self.clicks[index + 1:]
        return ClickDataset(clicks, n=self.n)
