"""
Structured computation log for poisson-deform
Each event is a single JSON record written to stderr (and optionally a file)
"""
import json
import logging
import sys
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from utils import config


class ComputationAction(Enum):
    """Types of logged computation events"""
    CONTEXT_BUILT = "context_built"
    GROEBNER_COMPUTED = "groebner_computed"
    DEFORMATION_BUILT = "deformation_built"
    DEFORMATION_VERIFIED = "deformation_verified"
    NORMALIZED = "normalized"
    BOUND_GROWN = "bound_grown"
    GAUGE_APPLIED = "gauge_applied"
    CASIMIR_CHECKED = "casimir_checked"
    SURFACE_CHECKED = "surface_checked"
    PRECONDITION_FAILED = "precondition_failed"
    COMMAND_COMPLETED = "command_completed"
    COMMAND_FAILED = "command_failed"


class LogLevel(Enum):
    """Event severity levels"""
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


class ComputationLogger:
    """JSON event logger shared by the services and the CLI"""

    def __init__(self, name: str = "poisson_deform", log_file: Optional[str] = None, level: str = "WARNING"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level, logging.WARNING))

        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)

        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

        # stdout is reserved for result documents
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(formatter)
        self.logger.addHandler(stream_handler)

        if log_file:
            path = Path(log_file)
            path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(path, encoding='utf-8')
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

        self.logger.propagate = False

    def log_event(
        self,
        action: ComputationAction,
        level: LogLevel = LogLevel.INFO,
        details: Optional[Dict[str, Any]] = None,
    ):
        record = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "action": action.value,
            "level": level.value,
            "details": details or {},
        }
        message = json.dumps(record, ensure_ascii=False, default=str)

        if level == LogLevel.ERROR:
            self.logger.error(message)
        elif level == LogLevel.WARNING:
            self.logger.warning(message)
        elif level == LogLevel.DEBUG:
            self.logger.debug(message)
        else:
            self.logger.info(message)


computation_logger = ComputationLogger(
    log_file=config.settings.log_file,
    level=config.settings.log_level,
)


def log_computation(action: ComputationAction, **details: Any):
    computation_logger.log_event(action, LogLevel.INFO, details)


def log_precondition_failure(operation: str, reason: str, **details: Any):
    computation_logger.log_event(
        ComputationAction.PRECONDITION_FAILED,
        LogLevel.WARNING,
        {"operation": operation, "reason": reason, **details},
    )


def log_command(command: str, success: bool, elapsed_seconds: float, **details: Any):
    computation_logger.log_event(
        ComputationAction.COMMAND_COMPLETED if success else ComputationAction.COMMAND_FAILED,
        LogLevel.INFO if success else LogLevel.ERROR,
        {"command": command, "elapsed_seconds": round(elapsed_seconds, 6), **details},
    )
