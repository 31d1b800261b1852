import os
from dataclasses import dataclass


def _bool(name: str, default: bool) -> bool:
    v = os.getenv(name)
    if v is None:
        return default
    return v.strip().lower() in ("1", "true", "yes", "y", "on")


def _int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


# Load .env only when it exists and is readable; never fail on it
def _load_dotenv_if_readable(path: str) -> None:
    try:
        if os.path.isfile(path) and os.access(path, os.R_OK):
            from dotenv import load_dotenv
            load_dotenv(path, override=False)
    except Exception:
        pass


_load_dotenv_if_readable(os.path.join(os.getcwd(), ".env"))
_load_dotenv_if_readable(os.path.join(os.path.dirname(os.path.dirname(__file__)), ".env"))


@dataclass
class Settings:
    # Parallel map width for per-site and per-class work
    THREADS: int = max(1, _int("TVBKIT_THREADS", 1))

    # Logging
    LOG_DIR: str = os.getenv("TVBKIT_LOG_DIR", "logs")
    LOG_LEVEL: str = os.getenv("TVBKIT_LOG_LEVEL", "INFO").upper()

    # Search limits
    DEGREE_CAP: int = _int("TVBKIT_DEGREE_CAP", 4)
    ENUM_LIMIT: int = _int("TVBKIT_ENUM_LIMIT", 200000)

    # Run uncertified Nef/Bpf computations without --force
    FORCE: bool = _bool("TVBKIT_FORCE", False)

    # Version tag carried by every --json report
    SCHEMA: str = "tvbkit.report/1"


settings = Settings()
