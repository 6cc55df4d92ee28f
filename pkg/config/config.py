"""
Configuration - Loads environment variables from .env file.
Holds runtime limits, output paths and the validated experiment/verify models.
"""

import hashlib
import json
import os
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from utils.errors import ConfigError

# Project root directory
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Force-load .env from the project root
env_path = os.path.join(BASE_DIR, ".env")
load_dotenv(env_path)


def _env_int(name, default):
    raw = os.getenv(name, "")
    if raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


class Config:
    # Worker cap for independent experiment trials
    THREADS = max(1, _env_int("SD_SPECTRA_THREADS", os.cpu_count() or 1))

    # Solver limits
    MAX_N = _env_int("SD_SPECTRA_MAX_N", 2048)
    MAX_QL_ITERATIONS = _env_int("SD_SPECTRA_MAX_QL_ITER", 60)

    # Paths
    OUTPUT_DIR = os.getenv("SD_SPECTRA_OUTPUT_DIR", os.path.join(BASE_DIR, "data", "output"))

    LOG_LEVEL = os.getenv("SD_SPECTRA_LOG_LEVEL", "WARNING").upper()

    # Only consulted when a stochastic command is given no seed
    DEFAULT_SEED = _env_int("SD_SPECTRA_SEED", None)


config = Config()


# --- Structured configuration (JSON file + CLI overrides) ---

class Tolerances(BaseModel):
    eigen_residual: float = 1e-8
    orthogonality: float = 1e-8
    jacobi_agreement: float = 1e-8
    reversal_norm: float = 1e-8
    reversal_vector: float = 1e-6
    root_residual: float = 1e-10
    root_pairing: float = 1e-10
    companion: float = 1e-8
    reconstruction: float = 1e-6
    conjugacy: float = 1e-8
    null_residual: float = 1e-6
    vandermonde: float = 1e-8
    state_equation: float = 1e-12
    error_identity: float = 1e-8

    @field_validator("*")
    @classmethod
    def _positive(cls, value):
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value


class VerifyConfig(BaseModel):
    seed: int = 20240601
    gram_n_max: int = Field(default=64, ge=3)
    gram_r_max: int = Field(default=6, ge=1)
    spectral_sizes: List[int] = [50, 200, 1000]
    spectral_orders: List[int] = [1, 2, 3]
    jacobi_n: int = Field(default=48, ge=4, le=64)
    reversal_n: int = Field(default=128, ge=4)
    decay_n: int = Field(default=512, ge=16)
    decay_orders: List[int] = [1, 2, 3]
    decay_band: List[float] = [0.02, 0.2]
    slope_tol: float = Field(default=0.1, gt=0)
    dynamical_n: int = Field(default=256, ge=8)
    dynamical_r: int = Field(default=2, ge=1)
    dynamical_count: int = Field(default=5, ge=1)
    root_orders: List[int] = [1, 2, 3, 4, 5, 6]
    root_grid_size: int = Field(default=50, ge=2)
    recurrence_n: int = Field(default=64, ge=8)
    recurrence_orders: List[int] = [1, 2, 3]
    recurrence_min_lambda: float = Field(default=1e-6, gt=0)
    vandermonde_sizes: List[int] = [4, 6, 10]
    vandermonde_draws: int = Field(default=100, ge=1)
    quantizer_length: int = Field(default=256, ge=1)
    quantizer_trials: int = Field(default=100, ge=1)
    quantizer_orders: List[int] = [1, 2, 3]
    codec_n: int = Field(default=256, ge=8)
    codec_d: int = Field(default=2, ge=1)
    inject_gram_perturbation: bool = False
    tolerances: Tolerances = Tolerances()

    @field_validator("spectral_sizes", "spectral_orders", "decay_orders", "root_orders", "recurrence_orders",
                     "quantizer_orders", "vandermonde_sizes")
    @classmethod
    def _non_empty_positive(cls, values):
        if not values or any(v < 1 for v in values):
            raise ValueError("lists must be non-empty and contain positive integers")
        return values

    @field_validator("decay_band")
    @classmethod
    def _band(cls, values):
        if len(values) != 2 or not 0 < values[0] < values[1] <= 1:
            raise ValueError("decay_band must be [lo, hi] with 0 < lo < hi <= 1")
        return values


class RateDistortionConfig(BaseModel):
    seed: int
    n_values: List[int] = [64, 128, 256, 512, 1024]
    r_values: List[int] = [1, 2]
    d: int = Field(default=2, ge=1)
    m_ratio: float = Field(default=0.25, gt=0, le=1)
    m: Optional[int] = Field(default=None, ge=1)
    trials: int = Field(default=50, ge=1)
    frame: Literal["singular", "harmonic"] = "harmonic"
    row_normalized: bool = False
    alphabet: Literal["auto", "one_bit", "multilevel"] = "auto"
    step: float = Field(default=1.0, gt=0)
    decoder: Literal["pseudoinverse", "projection"] = "pseudoinverse"

    @model_validator(mode="after")
    def _check_sizes(self):
        for n in self.n_values:
            if n < 2 or self.d > n:
                raise ValueError(f"every n must satisfy 2 <= n and d <= n (n={n}, d={self.d})")
        if any(r < 1 for r in self.r_values):
            raise ValueError("orders must be positive")
        return self

    def m_for(self, n):
        return self.m if self.m is not None else max(self.d, int(round(self.m_ratio * n)))


class SigmaMinConfig(BaseModel):
    seed: int
    r: int = Field(default=2, ge=1)
    m: int = Field(default=512, ge=4)
    ell: int = Field(default=32, ge=1)
    d: int = Field(default=4, ge=1)
    trials: int = Field(default=50, ge=1)
    n: Optional[int] = Field(default=None, ge=2)
    eta: float = Field(default=0.5, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_ell(self):
        if self.d > self.ell:
            raise ValueError("d must not exceed ell")
        return self


class FlatnessSweepConfig(BaseModel):
    n_values: List[int] = [64, 128, 256, 512]
    r_values: List[int] = [1, 2, 3]


class SigmaDecayConfig(BaseModel):
    n: int = Field(default=512, ge=8)
    r_values: List[int] = [1, 2, 3]
    lo: float = Field(default=0.02, gt=0, lt=1)
    hi: float = Field(default=0.2, gt=0, le=1)

    @model_validator(mode="after")
    def _check_band(self):
        if self.lo >= self.hi:
            raise ValueError("lo must be smaller than hi")
        return self


class GramConfig(BaseModel):
    """Parameters of a `gram` export; hashed into its CSV."""
    n: int
    r: int


class ExperimentConfig(BaseModel):
    verify: VerifyConfig = VerifyConfig()
    rate_distortion: Optional[RateDistortionConfig] = None
    sigma_min: Optional[SigmaMinConfig] = None
    flatness_sweep: FlatnessSweepConfig = FlatnessSweepConfig()
    sigma_decay: SigmaDecayConfig = SigmaDecayConfig()


def load_experiment_config(path=None, overrides=None):
    """
    Load the JSON config file (if any) and apply dotted overrides such as
    {"rate_distortion.trials": 10}. Raises ConfigError on any validation problem.
    """
    raw = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, key = dotted.partition(".")
        target = raw.setdefault(section, {})
        if "." in key:
            sub, _, leaf = key.partition(".")
            target = target.setdefault(sub, {})
            key = leaf
        target[key] = value

    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(model):
    """SHA-256 over the canonical JSON dump of a pydantic model."""
    payload = json.dumps(model.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
