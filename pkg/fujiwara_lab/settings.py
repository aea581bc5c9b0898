"""
Django settings for fujiwara_lab project.

The project has no database, no URL routes and no web entry points: it is a
batch toolkit driven through ``manage.py`` commands of the ``spectra`` app.
"""

from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Only used by Django internals that insist on a key; nothing here is signed.
SECRET_KEY = 'fujiwara-lab-batch-only-not-a-secret'

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'spectra',
]

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
    ),
    'DEFAULT_PARSER_CLASSES': (
        'rest_framework.parsers.JSONParser',
    ),
    'UNAUTHENTICATED_USER': None,
}

# Numerical defaults for the spectra app, read through spectra.conf.spectra_settings.
SPECTRA = {
    'EIGEN_TOL': 1e-12,
    'EIGEN_SOLVER': 'lapack',
    'JACOBI_MAX_SWEEPS': 100,
    'MULTIPLICITY_GAP': 1e-8,
    'T_GRID_START': 1e-1,
    'T_GRID_STOP': 1e-6,
    'T_GRID_PER_DECADE': 10,
    'SLOPE_DROP': 2,
    'SEED': 20240607,
    'RANDOM_LENGTH_RANGE': (0.1, 10.0),
    'OPT_BUDGET': 200,
    'OPT_CAP': 1e8,
    'OPT_CONDITIONING_FLOOR': 1e-10,
    'OPT_STARTS': 8,
    'OPT_SIMPLEX_ITERATIONS': 20,
    'OPT_GRADIENT_TOL': 1e-8,
    'CONVERGENCE_GRID': (1e-2, 1e-3, 1e-4),
    'CSV_FLOAT_FORMAT': '.17g',
}


# Database
# Persistent storage is out of scope; Django falls back to its dummy backend.

DATABASES = {}


# Logging goes to stderr so that report output on stdout stays byte-identical.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'spectra': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True
