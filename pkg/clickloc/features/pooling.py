"""l_mu-norm pooling of sparse codes over a temporal pyramid.

A pyramid is a list of layers (a, b, omega): subdivision ratio, overlapping
ratio and weight. Layer i splits an n-sample click into
D_i = floor((1 - a_i) / b_i + 1) regions of floor(a_i * n) samples shifted by
floor(b_i * n) samples. That formula is authoritative: a layer (1/2, 1/4)
gives 3 regions, not the 4 "half-windows" one might expect from its ratios.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence
import math

import numpy as np

from ..errors import ConfigError, ShapeError

# Slack for floor() on ratios such as (1 - 1/3) / (1/3) that land a hair below an integer
FLOOR_EPS = 1e-9


def _floor(x: float) -> int:
    return math.floor(x + FLOOR_EPS)


def _ratio(value) -> float:
    """Parse a number or a fraction string like '1/3'."""
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError("pooling.pyramid", f"invalid ratio {value!r}") from e
    return float(value)


class PyramidLayer(NamedTuple):
    """One temporal layer of the pyramid."""
    a: float
    b: float
    omega: float

    @property
    def roi_count(self) -> int:
        """D_i = floor((1 - a) / b + 1)."""
        return _floor((1.0 - self.a) / self.b + 1.0)


class Roi(NamedTuple):
    """A temporal region of interest."""
    layer: int
    start: int
    length: int
    weight: float


@dataclass(frozen=True)
class PyramidSpec:
    """Temporal pyramid Lambda = [a, b, Omega]."""
    layers: tuple[PyramidLayer, ...]

    def __post_init__(self) -> None:
        layers = tuple(PyramidLayer(_ratio(a), _ratio(b), _ratio(w)) for a, b, w in self.layers)
        object.__setattr__(self, "layers", layers)
        self.validate()

    def validate(self) -> None:
        """Check ratio ranges and region counts."""
        if not self.layers:
            raise ConfigError("pooling.pyramid", "needs at least one layer")
        for i, layer in enumerate(self.layers):
            if not 0 < layer.a <= 1:
                raise ConfigError("pooling.pyramid", f"layer {i}: subdivision ratio a must lie in (0, 1], got {layer.a}")
            if not 0 < layer.b <= 1:
                raise ConfigError("pooling.pyramid", f"layer {i}: overlapping ratio b must lie in (0, 1], got {layer.b}")
            if layer.omega <= 0:
                raise ConfigError("pooling.pyramid", f"layer {i}: weight must be positive, got {layer.omega}")
            if layer.roi_count < 1:
                raise ConfigError("pooling.pyramid", f"layer {i}: yields no region")

    @property
    def P(self) -> int:
        """Layer count."""
        return len(self.layers)

    @property
    def roi_counts(self) -> list[int]:
        """D_i for each layer."""
        return [layer.roi_count for layer in self.layers]

    @property
    def D(self) -> int:
        """Total region count."""
        return sum(self.roi_counts)

    def feature_dims(self, k: int) -> int:
        """Global feature size d = D * k."""
        return self.D * k

    def rows(self) -> list[list[float]]:
        """Layers as [a, b, omega] rows."""
        return [list(layer) for layer in self.layers]

    @classmethod
    def parse(cls, text: str) -> "PyramidSpec":
        """Parse 'a,b,omega;a,b,omega' (fractions allowed)."""
        rows = [row for row in text.replace("\n", ";").split(";") if row.strip()]
        layers = []
        for row in rows:
            parts = row.split(",")
            if len(parts) != 3:
                raise ConfigError("pooling.pyramid", f"row {row!r} must have 3 entries a,b,omega")
            layers.append(tuple(parts))
        return cls(tuple(layers))


LAMBDA_1 = PyramidSpec(((1, 1, 1),))
LAMBDA_2 = PyramidSpec(((1, 1, 1), ("1/3", "1/3", 1)))


@dataclass(frozen=True, eq=False)
class GlobalFeature:
    """Pooled d-vector of one click."""
    values: np.ndarray
    click_id: int = 0

    @property
    def d(self) -> int:
        return self.values.shape[0]


def pool_lmu(v: np.ndarray, mu: float, axis: int | None = None):
    """(sum |v_m|^mu)^(1/mu), computed with the max factored out.

    mu = 1 is sum-pooling and mu = inf is max-pooling; with an axis the
    statistic is taken along it.
    """
    if mu == 0:
        raise ConfigError("pooling.mu", "must be nonzero")
    magnitudes = np.abs(np.asarray(v, dtype=np.float64))

    if mu == 1:
        return np.sum(magnitudes, axis=axis)
    if math.isinf(mu):
        return np.max(magnitudes, axis=axis, initial=0.0) if mu > 0 else np.min(magnitudes, axis=axis)
    if mu == 2 and axis is None:
        return float(np.linalg.norm(magnitudes.ravel()))

    if mu < 0:
        # any zero response drives a negative-order mean to zero
        with np.errstate(divide="ignore"):
            return np.power(np.sum(np.power(magnitudes, mu), axis=axis), 1.0 / mu)

    peak = np.max(magnitudes, axis=axis, keepdims=True, initial=0.0)
    safe = np.where(peak > 0, peak, 1.0)
    pooled = np.squeeze(peak, axis=axis) * np.power(np.sum(np.power(magnitudes / safe, mu), axis=axis), 1.0 / mu)
    return float(pooled) if axis is None else pooled


def compute_rois(n: int, spec: PyramidSpec) -> list[Roi]:
    """Regions of every layer, in (layer, region) order."""
    if n < 1:
        raise ConfigError("n", f"click length must be >= 1, got {n}")

    rois = []
    for i, layer in enumerate(spec.layers):
        length = _floor(layer.a * n)
        if length < 1:
            raise ConfigError("pooling.pyramid", f"layer {i}: region length floor({layer.a} * {n}) is zero")
        shift = _floor(layer.b * n)
        for j in range(layer.roi_count):
            start = min(j * shift, n - length)
            rois.append(Roi(layer=i, start=start, length=length, weight=layer.omega))
    return rois


def pool_click(
    codes: np.ndarray,
    patch_offsets: Sequence[int],
    n: int,
    spec: PyramidSpec,
    mu: float,
    click_id: int = 0,
) -> GlobalFeature:
    """Pool a (k, L) code matrix into a D*k global feature.

    Patches belong to a region by their start offset. Blocks are weighted by
    the layer weight and concatenated in (layer, region, atom) order; a region
    holding no patch contributes zeros.
    """
    codes = np.asarray(codes, dtype=np.float64)
    offsets = np.asarray(patch_offsets)
    if codes.ndim != 2 or codes.shape[1] != offsets.shape[0]:
        raise ShapeError(f"codes {codes.shape} do not align with {offsets.shape[0]} patch offsets")

    k = codes.shape[0]
    blocks = []
    for roi in compute_rois(n, spec):
        members = (offsets >= roi.start) & (offsets <= roi.start + roi.length - 1)
        if not members.any():
            blocks.append(np.zeros(k))
            continue
        blocks.append(roi.weight * pool_lmu(codes[:, members], mu, axis=1))

    return GlobalFeature(values=np.concatenate(blocks), click_id=click_id)


@dataclass(frozen=True)
class PoolingConfig:
    """Pooling exponent mu and the temporal pyramid."""
    mu: float = 3.0
    pyramid: PyramidSpec = LAMBDA_1

    def validate(self) -> None:
        if self.mu == 0 or math.isnan(self.mu):
            raise ConfigError("pooling.mu", f"must be nonzero, got {self.mu}")
