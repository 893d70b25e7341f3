"""
Process-wide settings for the relabeling tool.

Environment variables (or a local .env file) configure logging and the
brute-force oracle budgets.

"""
import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class Settings:
    log_level: str = "WARNING"
    oracle_max_n: int = 14
    oracle_max_labels: int = 6
    oracle_max_values: int = 12


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("ignoring non-integer %s=%r", name, raw)
        return default


def load_settings() -> Settings:
    return Settings(
        log_level=os.getenv("MONORELABEL_LOG_LEVEL", "WARNING").upper(),
        oracle_max_n=_env_int("MONORELABEL_ORACLE_MAX_N", 14),
        oracle_max_labels=_env_int("MONORELABEL_ORACLE_MAX_LABELS", 6),
        oracle_max_values=_env_int("MONORELABEL_ORACLE_MAX_VALUES", 12),
    )


def configure_logging(level: str) -> None:
    # stdout carries the result document, so logs go to stderr
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=LOG_FORMAT, force=True)


settings = load_settings()
