import logging
import os
from datetime import datetime


def _resolve_level(level: int | str) -> int:
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    return value if isinstance(value, int) else logging.INFO


def setup_file_logging(
    log_dir: str = "logs",
    level: int | str = logging.INFO,
    prefix: str = "tvbkit",
) -> str:
    """Send all log records to `<log_dir>/<prefix>-YYYY-MM-DD.log`.

    Stdout is reserved for command reports, so no console handler is
    installed. Returns the path of the active log file.
    """
    os.makedirs(log_dir, exist_ok=True)
    today = datetime.now().strftime("%Y-%m-%d")
    logfile = os.path.join(log_dir, f"{prefix}-{today}.log")

    # Drop handlers left by a previous call (tests call main() repeatedly)
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
        h.close()

    logging.basicConfig(
        level=_resolve_level(level),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        handlers=[logging.FileHandler(logfile, encoding="utf-8")],
    )

    logging.getLogger("sympy").setLevel(logging.WARNING)
    return logfile
