# acc/config.py
import os
from dataclasses import dataclass

from dotenv import load_dotenv


@dataclass
class Settings:
    log_level: str
    workers: int  # sweep thread pool
    out_dir: str
    debug: bool

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.debug else self.log_level


def load_settings() -> Settings:
    load_dotenv()

    log_level = os.getenv("ACC_LOG_LEVEL", "INFO").upper()
    out_dir = os.getenv("ACC_OUT_DIR", "out")
    debug = os.getenv("ACC_DEBUG", "False").lower() == "true"

    def _to_int(value: str | None, default: int) -> int:
        if not value:
            return default
        try:
            return int(value)
        except ValueError:
            return default

    workers = max(1, _to_int(os.getenv("ACC_WORKERS"), 1))

    return Settings(
        log_level=log_level,
        workers=workers,
        out_dir=out_dir,
        debug=debug,
    )
