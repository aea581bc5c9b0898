"""
The collapsing length family on cycle graphs and its divergence asymptotics.

On C_n every edge has length t except (n-1, n), which has length 1. As t -> 0
the first nonzero eigenvalue grows like 1/t while the higher ones grow like
1/t**2, so the scale-invariant lambda1 * (sum m0)**2 is unbounded on cycles.
The reflection i -> n-1-i (swapping n-1 and n) preserves these lengths and
block-diagonalizes the Laplacian, which is what the explicit blocks below
describe for even n.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import stats

from .conf import spectra_settings
from .exceptions import EigenSolverError, GraphError, LengthError, SpectraError, SymmetryError
from .models import LengthFunction, cycle_graph, fujiwara_weights
from .spectral import assemble_laplacian, symmetric_eigen, symmetrize

logger = logging.getLogger(__name__)


def cycle_lt(n, t):
    if not t > 0:
        raise LengthError(f"t must be positive, got {t!r}")
    g = cycle_graph(n)
    return LengthFunction.for_graph(g, [1.0 if edge == (n - 1, n) else t for edge in g.edges])


def involution(n):
    if n < 3:
        raise GraphError(f"cycle graph needs n >= 3, got {n}")
    iota = {i: n - 1 - i for i in range(1, n - 1)}
    iota[n - 1] = n
    iota[n] = n - 1
    return iota


def involution_matrix(iota):
    """Matrix of iota* in m0-weighted coordinates, (P x)(u) = x(iota(u))."""
    n = len(iota)
    matrix = np.zeros((n, n))
    for u, image in iota.items():
        matrix[u - 1, image - 1] = 1.0
    return matrix


@dataclass(frozen=True, eq=False)
class SymmetrySplit:
    involution: dict
    plus_block: np.ndarray
    minus_block: np.ndarray
    basis_plus: np.ndarray
    basis_minus: np.ndarray

    @property
    def dims(self):
        return self.plus_block.shape[0], self.minus_block.shape[0]

    def eigenvalues(self):
        plus = symmetric_eigen(self.plus_block).eigenvalues if self.dims[0] else np.empty(0)
        minus = symmetric_eigen(self.minus_block).eigenvalues if self.dims[1] else np.empty(0)
        return np.sort(np.concatenate([plus, minus]))


def check_involution(g, l, iota):
    if sorted(iota) != list(g.vertices) or sorted(iota.values()) != list(g.vertices):
        raise SymmetryError("involution must be a permutation of the vertex set")
    for u in g.vertices:
        if iota[iota[u]] != u:
            raise SymmetryError(f"iota(iota({u})) = {iota[iota[u]]}, not an involution")
    for (u, v), length in zip(g.edges, l.values):
        if not g.has_edge(iota[u], iota[v]):
            raise SymmetryError(f"edge ({u},{v}) maps to non-edge ({iota[u]},{iota[v]})")
        image = l[(iota[u], iota[v])]
        if not math.isclose(image, length, rel_tol=1e-14):
            raise SymmetryError(f"edge ({u},{v}) of length {length!r} maps to length {image!r}")


def symmetry_split(g, l, iota):
    l.check_graph(g)
    check_involution(g, l, iota)
    laplacian = assemble_laplacian(g, l)
    plus, minus = [], []
    for i in g.vertices:
        j = iota[i]
        if j < i:
            continue
        column = np.zeros(g.n)
        if j == i:
            column[i - 1] = 1.0
            plus.append(column)
            continue
        column[i - 1] = column[j - 1] = 1.0 / math.sqrt(2.0)
        plus.append(column)
        column = column.copy()
        column[j - 1] = -column[j - 1]
        minus.append(column)
    basis_plus = np.array(plus).T.reshape(g.n, len(plus))
    basis_minus = np.array(minus).T.reshape(g.n, len(minus))
    logger.debug(f"Symmetry split of order {g.n} into blocks {len(plus)} + {len(minus)}")
    return SymmetrySplit(
        involution=dict(iota),
        plus_block=symmetrize(basis_plus.T @ laplacian @ basis_plus),
        minus_block=symmetrize(basis_minus.T @ laplacian @ basis_minus),
        basis_plus=basis_plus,
        basis_minus=basis_minus,
    )


def _require_even(n):
    if n < 4 or n % 2:
        raise SymmetryError(f"explicit block forms exist for even n >= 4 only, got n={n}")


def _explicit_block(n, t, sign):
    size = n // 2
    block = np.zeros((size, size))
    for k in range(size - 1):
        block[k, k] = 1.0 / t**2
    for k in range(size - 2):
        block[k, k + 1] = block[k + 1, k] = -1.0 / (2.0 * t**2)
    block[size - 2, size - 2] = 1.0 / t**2 - sign / (2.0 * t**2)
    block[0, size - 1] = block[size - 1, 0] = -sign / (t * math.sqrt(2.0 * t) * math.sqrt(1.0 + t))
    block[size - 1, size - 1] = 1.0 / t - sign / (1.0 + t)
    return block


def explicit_pm_blocks(n, t):
    _require_even(n)
    if not t > 0:
        raise LengthError(f"t must be positive, got {t!r}")
    return _explicit_block(n, t, +1), _explicit_block(n, t, -1)


@dataclass(frozen=True, eq=False)
class ProofVectors:
    v1: np.ndarray
    v0: np.ndarray
    w: np.ndarray


def proof_vectors(n, t):
    _require_even(n)
    if not t > 0:
        raise LengthError(f"t must be positive, got {t!r}")
    size = n // 2
    root = math.sqrt(2.0 * t)
    v1 = np.array([(n - 1 - 2 * k) * root / (n - 1) for k in range(1, size)] + [-1.0])
    v0 = np.array([root] * (size - 1) + [math.sqrt(1.0 + t)])
    w = np.array([2.0 * math.sqrt(1.0 + t)] * (size - 1) + [-(n - 2) * root])
    return ProofVectors(v1=v1, v0=v0, w=w)


@dataclass(frozen=True)
class ProofRayleighTerms:
    minus_v1: float
    minus_v1_closed_form: float
    plus_w: float
    plus_w_closed_form: float


def proof_rayleigh_terms(n, t):
    """<L- v1, v1> and <L+ w, w> from the explicit blocks next to their closed forms."""
    plus, minus = explicit_pm_blocks(n, t)
    vectors = proof_vectors(n, t)
    return ProofRayleighTerms(
        minus_v1=float(vectors.v1 @ minus @ vectors.v1),
        minus_v1_closed_form=2.0 / (n - 1) * (n - 2 - (n - 3) / math.sqrt(1.0 + t)) / t + 1.0 / (1.0 + t),
        plus_w=float(vectors.w @ plus @ vectors.w),
        plus_w_closed_form=(2.0 * (1.0 + t) / t**2 + 4.0 * (n - 2) / t
                            + 2.0 * (n - 2) ** 2 - 2.0 * (n - 2) ** 2 * t / (1.0 + t)),
    )


@dataclass(frozen=True, eq=False)
class CoefficientMatrices:
    a: np.ndarray
    b: np.ndarray

    @property
    def b_null_vector(self):
        # (-1/2, 1, ..., 1): the first coordinate pairs with the cross term +2 x u_1.
        return np.array([-0.5] + [1.0] * (self.b.shape[0] - 1))

    def a_min_eigenvalue(self):
        return float(scipy.linalg.eigvalsh(self.a)[0])

    def b_min_eigenvalue(self):
        return float(scipy.linalg.eigvalsh(self.b)[0])

    def b_restricted_min_eigenvalue(self):
        """Smallest eigenvalue of B on {(x, u_1, ..., u_k) : sum u_i = 0}."""
        constraint = np.array([[0.0] + [1.0] * (self.b.shape[0] - 1)])
        basis = scipy.linalg.null_space(constraint)
        return float(scipy.linalg.eigvalsh(basis.T @ self.b @ basis)[0])


def coefficient_matrices(n):
    _require_even(n)
    size = n // 2 - 1
    a = np.zeros((size, size))
    for k in range(size - 1):
        a[k, k] += 0.5
        a[k + 1, k + 1] += 0.5
        a[k, k + 1] = a[k + 1, k] = -0.5
    a[0, 0] += 0.5
    a[size - 1, size - 1] += 1.0

    b = np.zeros((size + 1, size + 1))
    b[0, 0] = 2.0
    b[0, 1] = b[1, 0] = 1.0
    for k in range(1, size):
        b[k, k] = 1.0
        b[k, k + 1] = b[k + 1, k] = -0.5
    b[size, size] = 0.5
    return CoefficientMatrices(a=a, b=b)


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    max_residual: float
    points: int


def fit_loglog_slope(points):
    points = list(points)
    if len(points) < 3:
        raise SpectraError(f"a log-log fit needs at least 3 points, got {len(points)}")
    x, y = np.array(points, dtype=float).T
    if np.any(x <= 0) or np.any(y <= 0):
        raise SpectraError("log-log fit needs strictly positive coordinates")
    log_x, log_y = np.log(x), np.log(y)
    fit = stats.linregress(log_x, log_y)
    residual = np.max(np.abs(log_y - (fit.slope * log_x + fit.intercept)))
    return LogLogFit(slope=float(fit.slope), intercept=float(fit.intercept),
                     max_residual=float(residual), points=len(points))


def default_t_grid(start=None, stop=None, per_decade=None):
    start = spectra_settings.T_GRID_START if start is None else start
    stop = spectra_settings.T_GRID_STOP if stop is None else stop
    per_decade = spectra_settings.T_GRID_PER_DECADE if per_decade is None else per_decade
    if not 0 < stop < start:
        raise SpectraError(f"t grid needs 0 < stop < start, got start={start!r}, stop={stop!r}")
    count = int(round(math.log10(start / stop) * per_decade)) + 1
    return tuple(float(t) for t in np.geomspace(start, stop, max(count, 2)))


@dataclass(frozen=True)
class SweepRecord:
    t: float
    lambda1: float
    lambda2: float
    lambda_max: float
    lambda1_t: float
    total_m0: float
    lambda1_normalized: float


@dataclass(frozen=True)
class SweepReport:
    n: int
    t_grid: tuple
    records: tuple
    dropped: int
    slope_lambda1: LogLogFit
    slope_lambda2: LogLogFit
    limit_estimate: float
    limit_target: float
    skipped: tuple = field(default=())

    LAMBDA1_SLOPE = (-1.05, -0.95)
    LAMBDA2_SLOPE = (-2.1, -1.9)
    LIMIT_RTOL = 0.05

    @property
    def limit_error(self):
        return abs(self.limit_estimate - self.limit_target) / self.limit_target

    def normalized_increasing(self, t_max=1e-2):
        # Far from t = 0 the (sum m0)**2 factor can still dominate the 1/t growth.
        values = [r.lambda1_normalized for r in self.records if r.t <= t_max]
        return all(b > a for a, b in zip(values, values[1:]))

    def checks(self):
        low1, high1 = self.LAMBDA1_SLOPE
        low2, high2 = self.LAMBDA2_SLOPE
        last = self.records[-1]
        return {
            'lambda1_slope': low1 <= self.slope_lambda1.slope <= high1,
            'lambda2_slope': low2 <= self.slope_lambda2.slope <= high2,
            'lambda1_t_limit': self.limit_error <= self.LIMIT_RTOL,
            'normalized_bound': last.lambda1_normalized >= 0.9 * 8.0 / ((self.n - 1) * last.t),
        }

    @property
    def passed(self):
        return all(self.checks().values())


def sweep_asymptotics(n, t_grid=None, drop=None):
    if n < 3:
        raise GraphError(f"cycle graph needs n >= 3, got {n}")
    t_grid = tuple(float(t) for t in (default_t_grid() if t_grid is None else t_grid))
    drop = spectra_settings.SLOPE_DROP if drop is None else drop
    if any(not t > 0 for t in t_grid):
        raise LengthError("t grid values must be positive")
    if any(b >= a for a, b in zip(t_grid, t_grid[1:])):
        raise SpectraError("t grid must be strictly decreasing")
    if t_grid[0] > 0.1:
        logger.warning(f"t grid starts at {t_grid[0]} > 0.1, outside the asymptotic regime")

    g = cycle_graph(n)
    records, skipped = [], []
    logger.info(f"Sweeping C_{n} over {len(t_grid)} values of t")
    for t in t_grid:
        lengths = cycle_lt(n, t)
        try:
            spectrum = symmetric_eigen(assemble_laplacian(g, lengths))
        except EigenSolverError as e:
            logger.warning(f"Skipping t={t!r}: {str(e)}")
            skipped.append(t)
            continue
        values = spectrum.eigenvalues
        total = fujiwara_weights(g, lengths).total_m0
        records.append(SweepRecord(
            t=t,
            lambda1=float(values[1]),
            lambda2=float(values[2]),
            lambda_max=float(values[-1]),
            lambda1_t=float(values[1] * t),
            total_m0=total,
            lambda1_normalized=float(values[1] * total**2),
        ))
        logger.debug(f"t={t:.3e}: lambda1={values[1]:.6e}, lambda2={values[2]:.6e}")

    fitted = records[drop:]
    if len(fitted) < 3:
        raise SpectraError(f"only {len(fitted)} usable grid points after dropping {drop}; need 3")
    return SweepReport(
        n=n,
        t_grid=t_grid,
        records=tuple(records),
        dropped=drop,
        slope_lambda1=fit_loglog_slope([(r.t, r.lambda1) for r in fitted]),
        slope_lambda2=fit_loglog_slope([(r.t, r.lambda2) for r in fitted]),
        limit_estimate=records[-1].lambda1_t,
        limit_target=2.0 / (n - 1),
        skipped=tuple(skipped),
    )
