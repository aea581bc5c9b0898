import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .conf import spectra_settings
from .exceptions import EigenSolverError, GraphError, SpectraError
from .models import fujiwara_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    norm: float

    @property
    def order(self):
        return len(self.eigenvalues)


@dataclass(frozen=True, eq=False)
class FirstEigenpair:
    value: float
    phi: np.ndarray
    multiple: bool
    spectrum: SpectralResult


def symmetrize(m):
    upper = np.triu(m)
    return upper + np.triu(upper, 1).T


def as_sym_matrix(m, tol=None):
    tol = spectra_settings.EIGEN_TOL if tol is None else tol
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectraError(f"expected a square matrix, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if np.max(np.abs(m - m.T), initial=0.0) > tol * max(scale, 1.0):
        raise SpectraError("matrix is not symmetric")
    return symmetrize(m)


def jacobi_eigen(m, tol, max_sweeps):
    """Cyclic Jacobi rotations; stops once the off-diagonal Frobenius norm is below tol*||m||."""
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps (off={off:.3e})")
            break
        if sweep == max_sweeps:
            raise EigenSolverError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return np.diag(a).copy(), v


def symmetric_eigen(m, tol=None, solver=None):
    tol = spectra_settings.EIGEN_TOL if tol is None else tol
    solver = solver or spectra_settings.EIGEN_SOLVER
    m = as_sym_matrix(m, tol)
    if solver == 'jacobi':
        values, vectors = jacobi_eigen(m, tol, spectra_settings.JACOBI_MAX_SWEEPS)
    else:
        try:
            values, vectors = scipy.linalg.eigh(m)
        except np.linalg.LinAlgError as e:
            logger.error(f"LAPACK eigensolver failed: {str(e)}")
            raise EigenSolverError(f"eigensolver did not converge: {e}") from e
    order = np.argsort(values, kind='stable')
    values, vectors = values[order], vectors[:, order]
    norm = float(np.linalg.norm(m))
    residual = float(np.max(np.linalg.norm(m @ vectors - vectors * values, axis=0), initial=0.0))
    if residual > tol * norm:
        raise EigenSolverError(f"eigen residual {residual:.3e} exceeds {tol:.1e} * ||M|| = {tol * norm:.3e}")
    return SpectralResult(eigenvalues=values, eigenvectors=vectors, residual=residual, norm=norm)


def laplacian_l0(g, l):
    weights = fujiwara_weights(g, l)
    return _l0_matrix(g, weights.m1_array)


def _l0_matrix(g, m1):
    l0 = np.zeros((g.n, g.n))
    idx = np.array(g.edges, dtype=int).reshape(-1, 2) - 1
    np.add.at(l0, (idx[:, 0], idx[:, 0]), m1)
    np.add.at(l0, (idx[:, 1], idx[:, 1]), m1)
    l0[idx[:, 0], idx[:, 1]] = -m1
    l0[idx[:, 1], idx[:, 0]] = -m1
    return l0


def assemble_laplacian(g, l):
    g.require_connected()
    weights = fujiwara_weights(g, l)
    scale = 1.0 / np.sqrt(weights.m0_array)
    matrix = scale[:, None] * _l0_matrix(g, weights.m1_array) * scale[None, :]
    return symmetrize(matrix)


def zero_mode_residual(g, l):
    """||L x0|| / ||L|| for x0 = sqrt(m0); vanishes up to round-off on every valid input."""
    matrix = assemble_laplacian(g, l)
    x0 = np.sqrt(fujiwara_weights(g, l).m0_array)
    return float(np.linalg.norm(matrix @ x0) / np.linalg.norm(matrix))


def _vertex_function(g, phi):
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (g.n,):
        raise SpectraError(f"dimension mismatch: expected {g.n} vertex values, got shape {phi.shape}")
    return phi


def apply_laplacian(g, l, phi):
    phi = _vertex_function(g, phi)
    weights = fujiwara_weights(g, l)
    idx = np.array(g.edges, dtype=int).reshape(-1, 2) - 1
    flow = weights.m1_array * (phi[idx[:, 0]] - phi[idx[:, 1]])
    out = np.zeros(g.n)
    np.add.at(out, idx[:, 0], flow)
    np.add.at(out, idx[:, 1], -flow)
    return out / weights.m0_array


def m0_inner(g, l, phi, psi):
    phi, psi = _vertex_function(g, phi), _vertex_function(g, psi)
    return float(np.sum(fujiwara_weights(g, l).m0_array * phi * psi))


def rayleigh_quotient(g, l, phi):
    phi = _vertex_function(g, phi)
    if not np.any(phi):
        raise SpectraError("Rayleigh quotient of the zero function is undefined")
    weights = fujiwara_weights(g, l)
    idx = np.array(g.edges, dtype=int).reshape(-1, 2) - 1
    numerator = np.sum(weights.m1_array * (phi[idx[:, 0]] - phi[idx[:, 1]]) ** 2)
    denominator = np.sum(weights.m0_array * phi ** 2)
    mean = np.sum(weights.m0_array * phi)
    if abs(mean) > 1e-10 * np.sqrt(denominator * weights.total_m0):
        logger.info(f"Test function is not m0-orthogonal to constants (sum m0*phi = {mean:.3e}); "
                    "its quotient does not bound lambda1")
    return float(numerator / denominator)


def laplacian_spectrum(g, l, tol=None):
    matrix = assemble_laplacian(g, l)
    result = symmetric_eigen(matrix, tol)
    if result.eigenvalues[0] < -(tol or spectra_settings.EIGEN_TOL) * result.norm:
        logger.warning(f"Smallest Laplacian eigenvalue {result.eigenvalues[0]:.3e} is negative beyond tolerance")
    return result


def first_eigenpair(g, l, tol=None):
    if g.n < 2:
        raise GraphError("lambda1 needs at least two vertices")
    spectrum = laplacian_spectrum(g, l, tol)
    values = spectrum.eigenvalues
    value = float(values[1])
    if value <= 0:
        raise EigenSolverError(f"lambda1 = {value:.3e} is not positive")
    multiple = g.n > 2 and (values[2] - value) < spectra_settings.MULTIPLICITY_GAP * value
    x = spectrum.eigenvectors[:, 1]
    pivot = np.argmax(np.abs(x))
    if x[pivot] < 0:
        x = -x
    phi = x / np.sqrt(fujiwara_weights(g, l).m0_array)
    if multiple:
        logger.debug(f"lambda1 = {value:.6g} is multiple (next eigenvalue {values[2]:.6g})")
    return FirstEigenpair(value=value, phi=phi, multiple=bool(multiple), spectrum=spectrum)


def lambda1(g, l, tol=None):
    return first_eigenpair(g, l, tol).value


def lambda1_normalized(g, l, tol=None):
    total = fujiwara_weights(g, l).total_m0
    return lambda1(g, l, tol) * total ** 2
