"""Sentry/GlitchTip error reporting for python-elasticts.

Reporting is opt-in: nothing is sent unless a DSN is configured through
``ELASTICTS_SENTRY_DSN`` (or ``SENTRY_DSN``). Home-directory paths and
sensitive keys are scrubbed before send, and events without an
``elasticts`` frame are dropped.
"""

import logging
import os
from pathlib import Path
import re
from typing import Any

logger = logging.getLogger(__name__)

# Events without a frame from one of these modules are dropped.
_OUR_MODULES: tuple[str, ...] = ("elasticts.", "elasticts/")

_SCRUB_KEY_KEYWORDS: tuple[str, ...] = ("password", "token", "secret", "credential", "dsn")
_HOME_PATTERN = re.compile(r"(/home/|/Users/|[A-Za-z]:\\Users\\)[^/\\\s]+")


def init_error_reporting(
    dsn: str | None = None,
    environment: str = "production",
    enabled: bool = True,
) -> bool:
    """Initialize Sentry error reporting if a DSN is available.

    Args:
        dsn: Sentry DSN. If omitted, falls back to the ``ELASTICTS_SENTRY_DSN``
             or ``SENTRY_DSN`` environment variables.
        environment: Environment tag (production/development/testing).
        enabled: Master switch. If False, no SDK initialization occurs.

    Returns:
        True if the SDK was initialized.
    """
    if not enabled:
        return False

    dsn = dsn or os.environ.get("ELASTICTS_SENTRY_DSN") or os.environ.get("SENTRY_DSN")
    if not dsn:
        return False

    try:
        import sentry_sdk  # noqa: PLC0415

        from elasticts import __version__  # noqa: PLC0415

        sentry_sdk.init(
            dsn=dsn,
            release=f"python-elasticts@{__version__}",
            environment=environment,
            traces_sample_rate=0.0,
            send_default_pii=False,
            before_send=_scrub_event,  # type: ignore[arg-type, unused-ignore]
        )
        logger.debug("Error reporting initialized (dsn=%s...)", dsn[:30])
    except ImportError:
        logger.debug("sentry-sdk not installed; error reporting disabled")
        return False
    except Exception as exc:  # noqa: BLE001
        logger.warning("Failed to initialize error reporting: %s", exc)
        return False
    return True


def _scrub_event(event: dict, hint: dict) -> dict | None:  # type: ignore[type-arg]
    """Scrub paths and sensitive extras, and drop events not raised from elasticts."""
    if "extra" in event:
        event["extra"] = _scrub_value(event["extra"])

    is_ours = False
    for entry in event.get("exception", {}).get("values", []):
        for frame in (entry.get("stacktrace") or {}).get("frames", []):
            module = frame.get("module", "") or frame.get("filename", "") or ""
            if any(m in module for m in _OUR_MODULES):
                is_ours = True
            for key in ("abs_path", "filename"):
                if key in frame:
                    frame[key] = scrub_path(str(frame[key]))
    if not is_ours:
        return None
    return event


def scrub_path(value: str) -> str:
    """Replace the user name in home-directory paths with ``~``."""
    return _HOME_PATTERN.sub("~", value)


def _scrub_value(value: Any) -> Any:
    """Recursively redact sensitive keys and home paths."""
    if isinstance(value, dict):
        cleaned: dict[str, Any] = {}
        for k, v in value.items():
            if any(s in str(k).lower() for s in _SCRUB_KEY_KEYWORDS):
                cleaned[k] = "[REDACTED]"
            else:
                cleaned[k] = _scrub_value(v)
        return cleaned
    if isinstance(value, list | tuple):
        return [_scrub_value(v) for v in value]
    if isinstance(value, str | Path):
        return scrub_path(str(value))
    return value


def report_run_failure(exc: BaseException, config: dict[str, Any] | None = None) -> bool:
    """Send an experiment failure with a scrubbed config echo.

    Returns:
        True if the event was handed to Sentry, False if reporting is off.
    """
    try:
        import sentry_sdk  # noqa: PLC0415
    except ImportError:
        logger.debug("sentry-sdk not installed; failure not reported")
        return False

    if not sentry_sdk.is_initialized():
        logger.debug("Error reporting not initialized; failure not reported")
        return False

    with sentry_sdk.new_scope() as scope:
        scope.set_extra("config", _scrub_value(config or {}))
        sentry_sdk.capture_exception(exc)
    logger.info("Reported %s to error tracking", type(exc).__name__)
    return True
