from pathlib import Path

from decouple import Csv, config

BASE_DIR = Path(__file__).resolve().parent

FIXTURES_DIR = BASE_DIR / 'fixtures'

# Truncation
ORDER = config('WORDSERIES_ORDER', default=4, cast=int)

RESONANCE_TOL = config('WORDSERIES_RESONANCE_TOL', default=1e-10, cast=float)

# Integrators
RK_STEPS = config('WORDSERIES_RK_STEPS', default=10_000, cast=int)

QUADRATURE_NODES = config('WORDSERIES_QUADRATURE_NODES', default=64, cast=int)

SOLVE_TOL = config('WORDSERIES_SOLVE_TOL', default=1e-10, cast=float)

MAX_HALVINGS = config('WORDSERIES_MAX_HALVINGS', default=8, cast=int)

# Verification
NOISE_FLOOR = config('WORDSERIES_NOISE_FLOOR', default=1e-12, cast=float)

SEED = config('WORDSERIES_SEED', default=0, cast=int)

SAMPLES = config('WORDSERIES_SAMPLES', default=20, cast=int)

EPS_SWEEP = config('WORDSERIES_EPS_SWEEP', default='0.04,0.02,0.01', cast=Csv(float))

LOG_LEVEL = config('WORDSERIES_LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'console': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'console',
            'stream': 'ext://sys.stderr',
        },
    },
    'loggers': {
        'wordseries': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
