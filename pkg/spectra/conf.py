"""
Settings for the spectra app are all namespaced in the SPECTRA setting.
For example your project's `settings.py` file might look like this:

SPECTRA = {
    'EIGEN_TOL': 1e-12,
    'OPT_CAP': 1e8,
}

Missing keys fall back to the defaults below. Access goes through
`spectra_settings`, e.g. `spectra_settings.EIGEN_TOL`.
"""
from django.conf import settings
from django.core.signals import setting_changed

DEFAULTS = {
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

POSITIVE_KEYS = (
    'EIGEN_TOL', 'JACOBI_MAX_SWEEPS', 'MULTIPLICITY_GAP', 'T_GRID_START', 'T_GRID_STOP',
    'T_GRID_PER_DECADE', 'OPT_CAP', 'OPT_CONDITIONING_FLOOR', 'OPT_STARTS',
    'OPT_SIMPLEX_ITERATIONS', 'OPT_GRADIENT_TOL',
)
SOLVERS = ('lapack', 'jacobi')


class SpectraSettings:
    def __init__(self, user_settings=None, defaults=None):
        self._user_settings = user_settings
        self.defaults = defaults or DEFAULTS
        self._cached_attrs = set()

    @property
    def user_settings(self):
        if self._user_settings is None:
            self._user_settings = getattr(settings, 'SPECTRA', {})
        return self._user_settings

    def __getattr__(self, attr):
        if attr not in self.defaults:
            raise AttributeError(f"Invalid spectra setting: '{attr}'")
        val = self.user_settings.get(attr, self.defaults[attr])
        self.validate(attr, val)
        self._cached_attrs.add(attr)
        setattr(self, attr, val)
        return val

    @staticmethod
    def validate(attr, val):
        if attr in POSITIVE_KEYS and not val > 0:
            raise ValueError(f"SPECTRA['{attr}'] must be positive, got {val!r}")
        if attr == 'EIGEN_SOLVER' and val not in SOLVERS:
            raise ValueError(f"SPECTRA['EIGEN_SOLVER'] must be one of {SOLVERS}, got {val!r}")
        if attr == 'SEED' and not isinstance(val, int):
            raise ValueError(f"SPECTRA['SEED'] must be an explicit integer, got {val!r}")
        if attr == 'RANDOM_LENGTH_RANGE':
            low, high = val
            if not 0 < low <= high:
                raise ValueError(f"SPECTRA['RANDOM_LENGTH_RANGE'] must satisfy 0 < low <= high, got {val!r}")

    def reload(self):
        for attr in self._cached_attrs:
            delattr(self, attr)
        self._cached_attrs.clear()
        self._user_settings = None


spectra_settings = SpectraSettings(None, DEFAULTS)


def reload_spectra_settings(*args, **kwargs):
    if kwargs['setting'] == 'SPECTRA':
        spectra_settings.reload()


setting_changed.connect(reload_spectra_settings)
