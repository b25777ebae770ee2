"""Configuration management for clickloc."""

from dataclasses import dataclass, field, fields, replace, asdict
from pathlib import Path
from typing import Any, Literal
import math
import sys

# tomllib is Python 3.11+, use tomli as fallback
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .coding.base import EncoderConfig
from .coding.learning import LearnerConfig
from .data.synthetic import SyntheticConfig
from .errors import ConfigError
from .eval.experiment import EvalConfig
from .features.patching import PatchConfig
from .features.pooling import LAMBDA_1, PoolingConfig, PyramidSpec
from .regress.model import TrainConfig


@dataclass(frozen=True)
class DataConfig:
    """Click input settings."""
    format: Literal["auto", "csv", "binary", "wav_directory"] = "auto"
    azimuth_unit: Literal["rad", "deg"] = "rad"
    n: int = 0  # WAV clip length; 0 keeps the synthetic n
    count: int = 200  # clicks written by `gen`

    def validate(self) -> None:
        if self.format not in ("auto", "csv", "binary", "wav_directory"):
            raise ConfigError("data.format", f"unknown format {self.format!r}")
        if self.azimuth_unit not in ("rad", "deg"):
            raise ConfigError("data.azimuth_unit", f"must be 'rad' or 'deg', got {self.azimuth_unit!r}")
        if self.n < 0:
            raise ConfigError("data.n", f"must be >= 0, got {self.n}")
        if self.count < 1:
            raise ConfigError("data.count", f"must be >= 1, got {self.count}")


@dataclass(frozen=True)
class PathsConfig:
    """Artifact locations, relative to the working directory."""
    clicks: str = "out/clicks.csv"
    dictionary: str = "out/dictionary.ccd"
    features: str = "out/features.ccf"
    output_dir: str = "out"

    def validate(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name):
                raise ConfigError(f"paths.{f.name}", "must not be empty")


# Section name -> dataclass, in file order
SECTIONS: dict[str, type] = {
    "data": DataConfig,
    "synthetic": SyntheticConfig,
    "patch": PatchConfig,
    "encoder": EncoderConfig,
    "learner": LearnerConfig,
    "pooling": PoolingConfig,
    "regress": TrainConfig,
    "eval": EvalConfig,
    "paths": PathsConfig,
}

# Keys the pipeline derives itself and a file may not set
DERIVED_KEYS = {"synthetic": {"rng_seed"}}


def _coerce(section: str, name: str, value: Any, default: Any) -> Any:
    """Check a TOML value against the type of the field default."""
    key = f"{section}.{name}"
    if section == "pooling" and name == "pyramid":
        if isinstance(value, str):
            return PyramidSpec.parse(value)
        if not isinstance(value, list) or any(not isinstance(row, list) or len(row) != 3 for row in value):
            raise ConfigError(key, "must be a list of [a, b, omega] rows")
        return PyramidSpec(tuple(tuple(row) for row in value))
    if section == "patch" and name == "pca_dims":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"must be an integer, got {value!r}")
        return value or None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(key, f"must be true or false, got {value!r}")
    elif isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"must be an integer, got {value!r}")
    elif isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"must be a number, got {value!r}")
        return float(value)
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(key, f"must be a string, got {value!r}")
    elif isinstance(default, tuple):
        if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ConfigError(key, f"must be a list of numbers, got {value!r}")
        return tuple(float(v) for v in value)
    return value


def _build_section(name: str, data: Any) -> Any:
    cls = SECTIONS[name]
    if not isinstance(data, dict):
        raise ConfigError(name, "must be a table")
    defaults = cls()
    allowed = {f.name for f in fields(cls)} - DERIVED_KEYS.get(name, set())
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", f"unknown key, expected one of {sorted(allowed)}")
    values = {key: _coerce(name, key, value, getattr(defaults, key)) for key, value in data.items()}
    return cls(**values)


@dataclass
class PipelineConfig:
    """Main configuration container."""
    seed: int = 0
    threads: int = 1
    data: DataConfig = field(default_factory=DataConfig)
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    patch: PatchConfig = field(default_factory=PatchConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    pooling: PoolingConfig = field(default_factory=PoolingConfig)
    regress: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        """Build from parsed TOML; unknown sections and keys are errors."""
        for key in data:
            if key not in SECTIONS and key not in ("seed", "threads"):
                raise ConfigError(key, f"unknown section, expected one of {['seed', 'threads', *SECTIONS]}")
        for key in ("seed", "threads"):
            if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
                raise ConfigError(key, f"must be an integer, got {data[key]!r}")
        sections = {name: _build_section(name, data[name]) for name in SECTIONS if name in data}
        return cls(seed=data.get("seed", 0), threads=data.get("threads", 1), **sections)

    @classmethod
    def load(cls, config_path: Path | str | None = None) -> "PipelineConfig":
        """Load configuration from file; no path gives the defaults."""
        if config_path is None:
            return cls()
        with open(config_path, "rb") as f:
            try:
                data = tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ConfigError("config", f"{config_path}: {e}") from e
        return cls.from_dict(data)

    def validate(self, n: int | None = None) -> None:
        """Check every section and the cross-section constraints.

        `n` is the click length of the data at hand; p <= n is only checked
        once it is known.
        """
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if self.threads < 0:
            raise ConfigError("threads", f"must be >= 0, got {self.threads}")
        for name in SECTIONS:
            getattr(self, name).validate()

        if n is not None:
            self.patch.validate(n)
        if self.learner.sample_size < self.learner.k:
            raise ConfigError("learner.sample_size", f"must be >= k={self.learner.k}")
        if not self.encoder.lam > 0:
            raise ConfigError("encoder.lam", f"dictionary learning needs lam > 0, got {self.encoder.lam}")
        if self.encoder.method == "omp" and self.encoder.omp_sparsity > min(self.patch.output_dims, self.learner.k):
            raise ConfigError(
                "encoder.omp_sparsity",
                f"must be <= min(p'={self.patch.output_dims}, k={self.learner.k}), got {self.encoder.omp_sparsity}",
            )

    @property
    def n_jobs(self) -> int:
        """joblib worker count; threads = 0 means all cores."""
        return -1 if self.threads == 0 else self.threads

    def with_mu(self, mu: float) -> "PipelineConfig":
        return replace(self, pooling=replace(self.pooling, mu=mu))

    def with_k(self, k: int) -> "PipelineConfig":
        return replace(self, learner=replace(self.learner, k=k))

    def to_dict(self) -> dict:
        """Plain nested dict in file layout."""
        out: dict[str, Any] = {"seed": self.seed, "threads": self.threads}
        for name in SECTIONS:
            section = asdict(getattr(self, name))
            for key in DERIVED_KEYS.get(name, ()):
                section.pop(key, None)
            out[name] = section
        out["pooling"]["pyramid"] = self.pooling.pyramid.rows()
        if out["patch"]["pca_dims"] is None:
            out["patch"]["pca_dims"] = 0
        return out

    def save(self, config_path: Path | str) -> None:
        """Save configuration to file."""
        config_path = Path(config_path)
        config_path.parent.mkdir(parents=True, exist_ok=True)
        data = self.to_dict()
        lines = [f"seed = {data.pop('seed')}", f"threads = {data.pop('threads')}"]
        for name, section in data.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.extend(f"{key} = {_toml_value(value)}" for key, value in section.items())
        config_path.write_text("\n".join(lines) + "\n")


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return str(value)


# Application constants
APP_NAME = "clickloc"

# Paths
ASSETS_DIR = Path(__file__).parent / "assets"
CONFIGS_DIR = ASSETS_DIR / "configs"
