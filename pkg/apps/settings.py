import logging
import os
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.mpld.errors import ConfigError

# Load environment variables
load_dotenv()

ENGINES = ("sequential", "parallel", "oracle")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    log_level: str = "WARNING"
    k: int = Field(default=3, ge=2)
    spacing_nm: int = Field(default=120, gt=0)
    alpha: Fraction = Fraction(1, 10)
    engine: str = "sequential"
    workers: int = Field(default=1, ge=1)
    items_per_group: int = Field(default=32, ge=1)
    stitch_cap: int = Field(default=2, ge=1)
    node_budget: Optional[int] = Field(default=None, ge=1)

    @field_validator("alpha", mode="before")
    @classmethod
    def _to_fraction(cls, value):
        return to_fraction(value)

    @field_validator("alpha")
    @classmethod
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("alpha must be non-negative")
        return value

    @field_validator("engine")
    @classmethod
    def _known_engine(cls, value):
        if value not in ENGINES:
            raise ValueError(f"engine must be one of {', '.join(ENGINES)}")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value):
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value}")
        return value


def to_fraction(value) -> Fraction:
    """Exact rational from int/str/Decimal/float (floats go through their shortest repr)"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e


_ENV_FIELDS = {
    "MPLD_LOG": "log_level",
    "MPLD_K": "k",
    "MPLD_SPACING": "spacing_nm",
    "MPLD_ALPHA": "alpha",
    "MPLD_ENGINE": "engine",
    "MPLD_WORKERS": "workers",
    "MPLD_ITEMS_PER_GROUP": "items_per_group",
    "MPLD_STITCH_CAP": "stitch_cap",
    "MPLD_NODE_BUDGET": "node_budget",
}


def load_settings(environ=None) -> Settings:
    environ = os.environ if environ is None else environ
    values = {}
    for var, field in _ENV_FIELDS.items():
        raw = environ.get(var)
        if raw is not None and raw.strip() != "":
            values[field] = raw.strip()
    try:
        return Settings(**values)
    except ValidationError as e:
        err = e.errors()[0]
        field = err["loc"][0] if err["loc"] else "?"
        var = next((v for v, f in _ENV_FIELDS.items() if f == field), field)
        raise ConfigError(f"invalid value for {var}: {err['msg']}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def configure_logging(level: Optional[str] = None) -> None:
    if level is None:
        level = os.getenv("MPLD_LOG", "WARNING")
    level = level.upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger("app").setLevel(level)
