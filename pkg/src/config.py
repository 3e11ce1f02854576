import logging

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    app_name: str = "gstlogic"
    app_version: str = "0.1.0"
    debug: bool = False

    # Logging - reports go to stdout, logs to stderr
    log_level: str = "WARNING"
    log_json: bool = False

    # Sampled oracles
    sample_density: int = 2

    # Stratified / lazy structures
    stratified_depth: int = 8
    truncate_depth: int = 6
    truncate_width: int = 8
    hint_samples: int = 16
    hint_depth: int = 6

    # Certificates
    chain_steps: int = 32
    rank_bound: int = 256

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        name = value.upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ValueError(f"unknown log level: {value}")
        return name

    @property
    def log_level_number(self) -> int:
        """Numeric level for structlog's filtering logger (debug forces DEBUG)."""
        if self.debug:
            return logging.DEBUG
        return int(logging.getLevelName(self.log_level))

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_prefix": "GSTLOGIC_",
        "extra": "ignore",
    }


settings = Settings()
