"""
Data Access Layer initialization
"""
import logging
import os
import tempfile
from contextlib import contextmanager

from src.config import Config

logger = logging.getLogger(__name__)


class CatalogValidationError(ValueError):
    """A catalog line failed to parse or validate."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f'line {line}: {message}' if line is not None else message)


def catalog_path(path=None):
    return os.path.abspath(path or Config.CATALOG_PATH)


def read_catalog_lines(path=None):
    """Yield ``(line number, text)`` for every non-blank line of the catalog."""
    path = catalog_path(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f'catalog not found: {path}')
    with open(path, encoding='utf-8') as handle:
        for number, text in enumerate(handle, start=1):
            if text.strip():
                yield number, text.rstrip('\n')


@contextmanager
def open_catalog(path=None):
    """
    Context manager for writing a catalog.

    Lines go to a temporary file next to the target, which replaces the
    catalog only when the block finishes without an exception.
    """
    path = catalog_path(path)
    directory = os.path.dirname(path)
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(prefix='.catalog-', suffix='.jsonl', dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
            yield handle
        os.replace(temp_path, path)
    except Exception:
        os.unlink(temp_path)
        raise


def init_catalog(path=None):
    """Create an empty catalog if none exists."""
    path = catalog_path(path)
    if os.path.exists(path):
        return path
    with open_catalog(path):
        pass
    logger.info('Created empty catalog at %s', path)
    return path
