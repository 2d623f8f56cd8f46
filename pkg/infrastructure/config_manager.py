"""
Configuration Management
Environment-based solver configuration with validation and defaults
"""

import os
from dataclasses import dataclass, asdict
from typing import Optional, Dict, Any


@dataclass
class IterationConfig:
    """Fixed-point iteration configuration"""
    tol: float = 1e-10
    budget: int = 10000
    trace_cap: int = 1000
    thin_stride: int = 10


@dataclass
class SpectralConfig:
    """Power iteration configuration"""
    tol: float = 1e-10
    budget: int = 100000
    marginal_tol: float = 1e-8
    # rho = 1 is tested within this band when comparing fixed points
    relation_tol: float = 1e-6


@dataclass
class CertificationConfig:
    """Newton polishing and fixed-point matching"""
    polish_tol: float = 1e-12
    polish_max_iter: int = 50
    dedup_factor: float = 100.0
    match_radius: float = 1e-6


@dataclass
class EnumerationConfig:
    """Small-n fixed-point enumeration"""
    grid: int = 64
    max_dim: int = 3
    newton_iter: int = 60


@dataclass
class BasinConfig:
    """Basin-of-attraction probing"""
    workers: int = 4
    grid: int = 32


@dataclass
class LoggingConfig:
    """Logging configuration"""
    log_level: str = "WARNING"
    log_dir: str = "logs"
    enable_console_output: bool = True
    enable_file_output: bool = False


class ConfigManager:
    """
    Centralized configuration management
    - Loads from environment variables
    - Provides defaults
    - Validates configuration
    """

    def __init__(self, environ: Optional[Dict[str, str]] = None):
        env = os.environ if environ is None else environ

        self.iteration = IterationConfig(
            tol=float(env.get("SOLVER_TOL", 1e-10)),
            budget=int(env.get("SOLVER_BUDGET", 10000)),
            trace_cap=int(env.get("TRACE_CAP", 1000)),
            thin_stride=int(env.get("TRACE_STRIDE", 10)),
        )

        self.spectral = SpectralConfig(
            tol=float(env.get("SPECTRAL_TOL", 1e-10)),
            budget=int(env.get("SPECTRAL_BUDGET", 100000)),
            marginal_tol=float(env.get("SPECTRAL_MARGINAL_TOL", 1e-8)),
            relation_tol=float(env.get("SPECTRAL_RELATION_TOL", 1e-6)),
        )

        self.certification = CertificationConfig(
            polish_tol=float(env.get("POLISH_TOL", 1e-12)),
            match_radius=float(env.get("MATCH_RADIUS", 1e-6)),
        )

        self.enumeration = EnumerationConfig(
            grid=int(env.get("ENUM_GRID", 64)),
        )

        self.basin = BasinConfig(
            workers=int(env.get("BASIN_WORKERS", 4)),
            grid=int(env.get("BASIN_GRID", 32)),
        )

        self.logging = LoggingConfig(
            log_level=env.get("LOG_LEVEL", "WARNING"),
            log_dir=env.get("LOG_DIR", "logs"),
            enable_console_output=(
                env.get("LOG_CONSOLE", "true").lower() == "true"
            ),
            enable_file_output=(
                env.get("LOG_FILE_OUTPUT", "false").lower() == "true"
            ),
        )

        self._validate()

    def _validate(self):
        """Validate configuration values"""
        if self.iteration.tol <= 0:
            raise ValueError("Iteration tolerance must be positive")

        if self.iteration.budget < 1:
            raise ValueError("Iteration budget must be at least 1")

        if self.iteration.trace_cap < 2 or self.iteration.thin_stride < 1:
            raise ValueError("Trace cap must be >= 2 and stride >= 1")

        if self.spectral.tol <= 0 or self.spectral.budget < 1:
            raise ValueError("Spectral tolerance and budget must be positive")

        if self.spectral.relation_tol <= 0:
            raise ValueError("Spectral relation tolerance must be positive")

        if self.enumeration.grid < 16:
            raise ValueError("Enumeration grid must be at least 16 per axis")

        if self.basin.workers < 1:
            raise ValueError("Basin workers must be at least 1")

    def to_dict(self) -> Dict[str, Any]:
        """Export configuration as dictionary"""
        return {
            "iteration": asdict(self.iteration),
            "spectral": asdict(self.spectral),
            "certification": asdict(self.certification),
            "enumeration": asdict(self.enumeration),
            "basin": asdict(self.basin),
            "logging": asdict(self.logging),
        }


# Global config instance
_config_instance: Optional[ConfigManager] = None


def init_config(environ: Optional[Dict[str, str]] = None) -> ConfigManager:
    """Initialize global configuration"""
    global _config_instance
    _config_instance = ConfigManager(environ)
    return _config_instance


def get_config() -> ConfigManager:
    """Get global configuration instance"""
    global _config_instance
    if _config_instance is None:
        _config_instance = ConfigManager()
    return _config_instance
