import os

from dotenv import load_dotenv

# Pick up local overrides (grid order, tolerances, worker count) from a .env
# file at the project root so experiments do not need exported variables.
BASE_DIR = os.path.abspath(os.path.dirname(__file__))
ENV_PATH = os.path.join(BASE_DIR, '..', '.env')
load_dotenv(ENV_PATH)


class Config:
    """
    Toolkit configuration.

    Centralizes numeric tolerances, search bounds and I/O defaults. Every
    value can be overridden through an environment variable with the
    ``LINKSIG_`` prefix; services read these attributes at call time.
    """

    BASE_DIR = BASE_DIR  # Package directory
    CATALOG_PATH = os.environ.get(
        'LINKSIG_CATALOG_PATH',
        os.path.join(BASE_DIR, '..', 'data', 'catalog.jsonl')
    )

    # Torus sampling
    GRID_ORDER = int(os.environ.get('LINKSIG_GRID_ORDER', 24))  # q points per axis

    # Numeric signature path
    NUMERIC_TOLERANCE = float(os.environ.get('LINKSIG_NUMERIC_TOLERANCE', 1e-9))  # relative to max row sum
    HERMITIAN_TOLERANCE = float(os.environ.get('LINKSIG_HERMITIAN_TOLERANCE', 1e-7))

    # Brute-force bounds
    METABOLISER_MAX_ORDER = int(os.environ.get('LINKSIG_METABOLISER_MAX_ORDER', 10_000))
    NORM_FACTOR_DEGREE_CAP = int(os.environ.get('LINKSIG_NORM_FACTOR_DEGREE_CAP', 12))
    ISOTROPY_MAX_SIZE = int(os.environ.get('LINKSIG_ISOTROPY_MAX_SIZE', 12))
    ISOTROPY_COEFF_BOUND = int(os.environ.get('LINKSIG_ISOTROPY_COEFF_BOUND', 1))

    # Batch execution
    WORKERS = int(os.environ.get('LINKSIG_WORKERS', 1))

    # Output
    SCHEMA_VERSION = 1  # stamped on every JSON line written
    LOG_LEVEL = os.environ.get('LINKSIG_LOG_LEVEL', 'WARNING')
