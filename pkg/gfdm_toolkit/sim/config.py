"""
Scenario configuration for Monte-Carlo runs.

Config files are flat YAML mappings, e.g.::

    scenario: zf_awgn
    K: 8
    M: 5
    filter: cmcm
    phases: cmcm1_k8m5
    snr_db: [0, 5, 10, 15, 20]
    blocks: 10000
"""

import logging
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
import yaml

from gfdm_toolkit.channel.generator import ChannelKind
from gfdm_toolkit.channel.models import block_rng
from gfdm_toolkit.core.errors import ConfigError, GfdmError
from gfdm_toolkit.core.types import GfdmParams
from gfdm_toolkit.filters import FilterKind, FilterSpec
from gfdm_toolkit.filters.base_filter import PHASE_KINDS, ROLLOFF_KINDS
from gfdm_toolkit.filters.constant_magnitude import phase_set, random_phases
from .qam import get_available_constellations

# Set up logging
logger = logging.getLogger(__name__)


class Scenario(Enum):
    """Receiver and channel combination of a run."""
    ZF_DFERF = "zf_dferf"
    MMSE_RF = "mmse_rf"
    AMMSE_RF = "ammse_rf"
    ZF_AWGN = "zf_awgn"
    MMSE_AWGN = "mmse_awgn"
    ZF_MP = "zf_mp"

    @classmethod
    def parse(cls, value: Any) -> "Scenario":
        """Accept an enum member, its value, or its name in any case."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for scenario in cls:
            if key in (scenario.value, scenario.name.lower()):
                return scenario
        raise ConfigError(f"Unknown scenario: {value}")

    @property
    def receiver(self) -> str:
        """'zf', 'mmse' or 'ammse'."""
        return self.value.split("_")[0]

    @property
    def channel_kind(self) -> ChannelKind:
        """Channel ensemble the scenario runs over."""
        return _SCENARIO_CHANNELS[self]


_SCENARIO_CHANNELS = {
    Scenario.ZF_DFERF: ChannelKind.DEEP_FADE_EXCLUDED,
    Scenario.MMSE_RF: ChannelKind.RAYLEIGH,
    Scenario.AMMSE_RF: ChannelKind.RAYLEIGH,
    Scenario.ZF_AWGN: ChannelKind.AWGN,
    Scenario.MMSE_AWGN: ChannelKind.AWGN,
    Scenario.ZF_MP: ChannelKind.STATIC,
}

# Scenarios whose per-symbol MSE is uniform over (k, m)
UNIFORM_SCENARIOS = (Scenario.ZF_AWGN, Scenario.MMSE_AWGN, Scenario.ZF_DFERF)

DEFAULT_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@dataclass
class ScenarioConfig:
    """
    One Monte-Carlo run.

    cp_len None means D/4. phases is the name of a stored phase set or
    'random' (drawn from phase_seed) for the phase-parameterized filters.
    """
    scenario: Scenario
    K: int
    M: int
    filter: str = "cmcm"
    rolloff: Optional[float] = None
    phases: Optional[str] = None
    phase_seed: int = 0
    constellation: str = "16qam"
    snr_db: Tuple[float, ...] = DEFAULT_SNR_DB
    blocks: int = 10000
    cp_len: Optional[int] = None
    seed: int = 0
    pdp: str = "exp"
    threshold_db: float = -30.0
    e_s: float = 1.0
    workers: int = 1
    chunk_size: int = 250
    output: Optional[str] = None

    def __post_init__(self):
        """Validate and normalize fields."""
        try:
            self.scenario = Scenario.parse(self.scenario)
            self.params = GfdmParams(self.K, self.M)
            self.filter = FilterKind.parse(self.filter).value
        except GfdmError as exc:
            raise ConfigError(str(exc)) from exc
        self.K, self.M = self.params.K, self.params.M

        if isinstance(self.snr_db, str):
            self.snr_db = parse_snr_grid(self.snr_db)
        self.snr_db = tuple(float(s) for s in np.atleast_1d(self.snr_db))
        if not self.snr_db:
            raise ConfigError("SNR grid is empty")

        if self.cp_len is None:
            self.cp_len = self.params.D // 4
        for name in ("blocks", "workers", "chunk_size"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
            setattr(self, name, int(getattr(self, name)))
        if not 0 <= int(self.cp_len) <= self.params.D:
            raise ConfigError(f"cp_len must lie in 0..{self.params.D}, got {self.cp_len}")
        self.cp_len = int(self.cp_len)

        if self.constellation.lower().replace("-", "") not in get_available_constellations():
            raise ConfigError(f"Unknown constellation: {self.constellation}")
        if not self.e_s > 0:
            raise ConfigError(f"e_s must be positive, got {self.e_s}")
        if self.scenario == Scenario.ZF_DFERF and not np.isfinite(self.threshold_db):
            raise ConfigError("ZF_DFERF needs a finite deep-fade threshold")
        if self.filter == FilterKind.STATIC_OPTIMAL.value and self.scenario != Scenario.ZF_MP:
            raise ConfigError("static_optimal filter is only defined for the static channel scenario")

    def filter_spec(self) -> FilterSpec:
        """
        Build the filter specification.

        Returns:
            FilterSpec with phases resolved
        """
        return build_filter_spec(self.filter, self.params, self.rolloff, self.phases, self.phase_seed)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["scenario"] = self.scenario.value
        out["snr_db"] = list(self.snr_db)
        return out


_FIELD_NAMES = {f.name for f in fields(ScenarioConfig)}


def build_filter_spec(kind: Any,
                      params: GfdmParams,
                      rolloff: Optional[float] = None,
                      phases: Optional[str] = None,
                      phase_seed: int = 0) -> FilterSpec:
    """
    Resolve a filter name and its options into a FilterSpec.

    Args:
        kind: Filter kind or its name
        params: Block dimensions (for random phases)
        rolloff: Roll-off, used by the raised-cosine kinds only
        phases: Stored phase set name, or 'random' / None for random phases
        phase_seed: Seed of the random phases

    Returns:
        Validated spec
    """
    try:
        kind = FilterKind.parse(kind)
        resolved = None
        if kind in PHASE_KINDS:
            if phases is None or str(phases).lower() == "random":
                resolved = random_phases(params, block_rng(phase_seed))
            else:
                resolved = phase_set(str(phases))
        return FilterSpec(kind, rolloff=rolloff if kind in ROLLOFF_KINDS else None, phases=resolved)
    except GfdmError as exc:
        raise ConfigError(str(exc)) from exc


def parse_snr_grid(text: str) -> Tuple[float, ...]:
    """
    Parse 'start:step:stop' (inclusive) or a comma-separated list.
    """
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ConfigError(f"SNR step must be positive: {text}")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(start + step * np.arange(count))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"Cannot parse SNR grid '{text}'") from exc


def config_from_dict(values: Dict[str, Any]) -> ScenarioConfig:
    """
    Build a config from a flat mapping.

    Args:
        values: Field values; 'scenario', 'K' and 'M' are required

    Returns:
        Validated config
    """
    unknown = sorted(set(values) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"Unknown config keys: {unknown}")
    missing = [key for key in ("scenario", "K", "M") if key not in values]
    if missing:
        raise ConfigError(f"Missing config keys: {missing}")
    try:
        return ScenarioConfig(**values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ScenarioConfig:
    """
    Read a scenario config file.

    Args:
        path: YAML file holding a flat key-value mapping

    Returns:
        Validated config
    """
    try:
        with open(path) as handle:
            values = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"Invalid YAML in {path}: {exc}") from exc

    if not isinstance(values, dict):
        raise ConfigError(f"Config {path} must be a key-value mapping")
    logger.info(f"Loaded scenario config from {path}")
    return config_from_dict(values)


def parse_overrides(text: str) -> Dict[str, Any]:
    """
    Parse 'key=value,...' overrides, casting to int, then float, else string.

    SNR grids use ';' between points (or start:step:stop) since ',' separates keys.
    """
    if not text:
        return {}

    overrides = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"Override '{item}' is not key=value")
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "snr_db":
            overrides[key] = parse_snr_grid(value.replace(";", ","))
            continue
        try:
            overrides[key] = int(value)
        except ValueError:
            try:
                overrides[key] = float(value)
            except ValueError:
                overrides[key] = value
    return overrides


def apply_overrides(cfg: ScenarioConfig, overrides: Dict[str, Any]) -> ScenarioConfig:
    """
    Return a copy of cfg with some fields replaced and revalidated.
    """
    unknown = sorted(set(overrides) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"Unknown override keys: {unknown}")
    if not overrides:
        return cfg
    values = cfg.to_dict()
    values.update(overrides)
    if "K" in overrides or "M" in overrides:
        # a derived prefix length follows the new block size
        if "cp_len" not in overrides:
            values["cp_len"] = None
    return config_from_dict(values)
