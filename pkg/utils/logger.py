# utils/logger.py

import logging
import os

from pythonjsonlogger import jsonlogger

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
JSON_FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'


def _make_formatter(fmt: str) -> logging.Formatter:
    if fmt == 'json':
        return jsonlogger.JsonFormatter(JSON_FORMAT)
    return logging.Formatter(TEXT_FORMAT)


def setup_logging(config) -> None:
    """Setup application logging from the [logging] section"""
    log_level = os.environ.get('SUMMABILITY_LOG_LEVEL') or config.get('logging', 'level', 'INFO')
    log_file = config.get('logging', 'file', '')
    fmt = config.get('logging', 'format', 'text')

    handlers = [logging.StreamHandler()]
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    formatter = _make_formatter(fmt)
    for handler in handlers:
        handler.setFormatter(formatter)

    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        handlers=handlers,
        force=True
    )
