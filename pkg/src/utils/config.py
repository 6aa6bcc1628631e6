"""
Runtime configuration for poisson-deform
Values come from the environment (optionally a .env file)
"""
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from utils.errors import ConfigError

# Load environment variables
load_dotenv()

DEFAULT_EXPONENT_CAP = 2 ** 16
DEFAULT_MAX_PHI_POWER = 8
DEFAULT_WORKERS = 4


def _parse_int(name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(name, raw) from None


def _optional_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    return _parse_int(name, raw)


def _int_or_default(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return _parse_int(name, raw)


@dataclass(frozen=True)
class Settings:
    """Resource caps and logging options"""

    max_degree: Optional[int] = None
    exponent_cap: int = DEFAULT_EXPONENT_CAP
    max_phi_power: int = DEFAULT_MAX_PHI_POWER
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    workers: int = DEFAULT_WORKERS

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            max_degree=_optional_int("POISSON_DEFORM_MAX_DEGREE"),
            exponent_cap=_int_or_default("POISSON_DEFORM_EXPONENT_CAP", DEFAULT_EXPONENT_CAP),
            max_phi_power=_int_or_default("POISSON_DEFORM_MAX_PHI_POWER", DEFAULT_MAX_PHI_POWER),
            log_level=os.getenv("POISSON_DEFORM_LOG_LEVEL", "WARNING").upper(),
            log_file=os.getenv("POISSON_DEFORM_LOG_FILE") or None,
            workers=_int_or_default("POISSON_DEFORM_WORKERS", DEFAULT_WORKERS),
        )


settings = Settings.from_env()


def reload_settings() -> Settings:
    """Re-read the environment; modules read `config.settings` at call time"""
    global settings
    settings = Settings.from_env()
    return settings
