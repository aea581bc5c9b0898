import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .conf import spectra_settings
from .exceptions import GraphError, SpectraError
from .models import LengthFunction, find_cycle, normalize_lengths, random_lengths
from .spectral import first_eigenpair

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-12
MAX_STEP = 8.0
CYCLE_SEED_SHORT = 0.1
CYCLE_SEED_OFF_CYCLE = 1e-3


@dataclass(frozen=True, eq=False)
class GradientResult:
    value: float
    gradient: np.ndarray = None
    multiple: bool = False


def lambda1_gradient(g, l):
    """d lambda1 / d l_e for every edge, or the multiplicity flag when lambda1 is not simple."""
    pair = first_eigenpair(g, l)
    if pair.multiple:
        return GradientResult(value=pair.value, multiple=True)
    phi = pair.phi
    idx = np.array(g.edges, dtype=int).reshape(-1, 2) - 1
    u, v = phi[idx[:, 0]], phi[idx[:, 1]]
    lengths = l.array
    gradient = -((u - v) ** 2) / lengths**2 - pair.value * (u**2 + v**2)
    # lambda1(c * l) = lambda1(l) / c**2
    identity = float(lengths @ gradient)
    if abs(identity + 2.0 * pair.value) > 1e-6 * pair.value:
        logger.warning(f"Gradient fails the scale identity: sum l*grad = {identity:.6e}, lambda1 = {pair.value:.6e}")
    return GradientResult(value=pair.value, gradient=gradient)


@dataclass(frozen=True)
class OptimizerConfig:
    budget: int
    cap: float
    seed: int
    starts: int
    conditioning_floor: float
    gradient_tol: float
    simplex_iterations: int

    def __post_init__(self):
        if self.budget < 0:
            raise SpectraError(f"budget must be non-negative, got {self.budget}")
        if self.starts < 1:
            raise SpectraError(f"need at least one start, got {self.starts}")
        for name in ('cap', 'conditioning_floor', 'gradient_tol', 'simplex_iterations'):
            if not getattr(self, name) > 0:
                raise SpectraError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not isinstance(self.seed, (int, np.integer)):
            raise SpectraError(f"seed must be an explicit integer, got {self.seed!r}")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'budget': spectra_settings.OPT_BUDGET,
            'cap': spectra_settings.OPT_CAP,
            'seed': spectra_settings.SEED,
            'starts': spectra_settings.OPT_STARTS,
            'conditioning_floor': spectra_settings.OPT_CONDITIONING_FLOOR,
            'gradient_tol': spectra_settings.OPT_GRADIENT_TOL,
            'simplex_iterations': spectra_settings.OPT_SIMPLEX_ITERATIONS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class OptimizationStep:
    iteration: int
    lengths: LengthFunction
    objective: float
    step_size: float
    gradient_norm: float = None
    simplex_diameter: float = None
    multiple: bool = False


@dataclass(frozen=True)
class RunSummary:
    start: int
    verdict: str
    best_objective: float
    iterations: int


@dataclass(frozen=True)
class OptimizationReport:
    CONVERGED = 'converged'
    DIVERGENCE_SUSPECTED = 'divergence_suspected'
    BUDGET_EXHAUSTED = 'budget_exhausted'

    iterations: tuple
    verdict: str
    best: LengthFunction
    best_objective: float
    start: int
    config: OptimizerConfig
    runs: tuple = field(default=())


@dataclass(frozen=True, eq=False)
class _Evaluation:
    s: np.ndarray
    lengths: LengthFunction
    value: float
    gradient: np.ndarray
    multiple: bool


def _evaluate(g, s):
    s = s - s.mean()
    lengths = LengthFunction.for_graph(g, np.exp(s))
    result = lambda1_gradient(g, lengths)
    total = 2.0 * lengths.total()
    gradient = None
    if not result.multiple:
        # chain rule for F = lambda1 * T**2 with T = 2 * sum(l), then l -> exp(s)
        gradient = lengths.array * (total**2 * result.gradient + 4.0 * total * result.value)
    return _Evaluation(s=s, lengths=lengths, value=result.value * total**2,
                       gradient=gradient, multiple=result.multiple)


def _negative_objective(s, g):
    try:
        return -_evaluate(g, s).value
    except SpectraError:
        return np.inf


def _simplex_step(g, current, config):
    result = optimize.minimize(
        _negative_objective, current.s, args=(g,), method='Nelder-Mead',
        options={'maxiter': config.simplex_iterations, 'xatol': 1e-12, 'fatol': 0.0},
    )
    vertices = result.final_simplex[0]
    diameter = float(np.max(np.linalg.norm(vertices - vertices[0], axis=1)))
    try:
        candidate = _evaluate(g, np.asarray(result.x, dtype=float))
    except SpectraError as e:
        logger.warning(f"Simplex step landed on an invalid length function: {str(e)}")
        return None, diameter
    return candidate, diameter


def _gradient_step(g, current, eta):
    gradient_norm = float(np.linalg.norm(current.gradient))
    direction = current.gradient / gradient_norm
    while eta >= MIN_STEP:
        try:
            candidate = _evaluate(g, current.s + eta * direction)
            if candidate.value >= current.value + ARMIJO * eta * gradient_norm:
                return candidate, eta
        except SpectraError as e:
            logger.debug(f"Rejected step of size {eta:.3e}: {str(e)}")
        eta /= 2.0
    return None, eta


def _record(iteration, evaluation, step_size, gradient_norm=None, simplex_diameter=None):
    return OptimizationStep(
        iteration=iteration,
        lengths=normalize_lengths(evaluation.lengths),
        objective=evaluation.value,
        step_size=step_size,
        gradient_norm=gradient_norm,
        simplex_diameter=simplex_diameter,
        multiple=evaluation.multiple,
    )


def _run(g, s0, config, start):
    current = _evaluate(g, np.asarray(s0, dtype=float))
    steps = [_record(0, current, 0.0)]
    best = current
    verdict = OptimizationReport.BUDGET_EXHAUSTED
    eta = 1.0
    for iteration in range(1, config.budget + 1):
        if current.value > config.cap:
            verdict = OptimizationReport.DIVERGENCE_SUSPECTED
            break
        if current.multiple:
            candidate, diameter = _simplex_step(g, current, config)
            if candidate is None or candidate.value <= current.value:
                verdict = OptimizationReport.CONVERGED
                break
            step = _record(iteration, candidate, float(np.linalg.norm(candidate.s - current.s)),
                           simplex_diameter=diameter)
        else:
            gradient_norm = float(np.linalg.norm(current.gradient))
            if gradient_norm <= config.gradient_tol * current.value:
                verdict = OptimizationReport.CONVERGED
                break
            candidate, used = _gradient_step(g, current, eta)
            if candidate is None:
                verdict = OptimizationReport.CONVERGED
                break
            eta = min(2.0 * used, MAX_STEP)
            step = _record(iteration, candidate, used, gradient_norm=gradient_norm)

        previous, current = current, candidate
        steps.append(step)
        best = current
        logger.debug(f"Start {start}, iteration {iteration}: F = {current.value:.6e}")
        values = current.lengths.array
        if current.value > config.cap:
            verdict = OptimizationReport.DIVERGENCE_SUSPECTED
            break
        if values.min() / values.max() < config.conditioning_floor and current.value > previous.value:
            verdict = OptimizationReport.DIVERGENCE_SUSPECTED
            break
    return tuple(steps), verdict, best


def cycle_seed(g):
    """Log-lengths of the collapsing seed: one long girth-cycle edge, short edges elsewhere."""
    cycle = find_cycle(g)
    if cycle is None:
        return None
    cycle_edges = {tuple(sorted(pair)) for pair in zip(cycle, cycle[1:] + cycle[:1])}
    long_edge = tuple(sorted(cycle[-2:]))
    values = []
    for edge in g.edges:
        if edge == long_edge:
            values.append(1.0)
        elif edge in cycle_edges:
            values.append(CYCLE_SEED_SHORT)
        else:
            values.append(CYCLE_SEED_OFF_CYCLE)
    return np.log(values)


def _initial_points(g, config):
    rng = np.random.default_rng(config.seed)
    low, high = spectra_settings.RANDOM_LENGTH_RANGE
    seed = cycle_seed(g)
    for start in range(config.starts):
        if start == 0 and seed is not None:
            yield seed
        else:
            yield np.log(random_lengths(g, rng, low, high).array)


def _rank(run):
    _, verdict, best = run
    return (verdict == OptimizationReport.DIVERGENCE_SUSPECTED, best.value)


def maximize_lambda1(g, config=None):
    config = config or OptimizerConfig.from_settings()
    g.require_connected()
    if g.n < 2:
        raise GraphError("maximizing lambda1 needs at least two vertices")
    logger.info(f"Maximizing lambda1 on n={g.n}, m={g.m} from {config.starts} starts, budget {config.budget}")

    runs = []
    for start, s0 in enumerate(_initial_points(g, config)):
        run = _run(g, s0, config, start)
        logger.info(f"Start {start}: {run[1]} at F = {run[2].value:.6e} after {len(run[0]) - 1} iterations")
        runs.append(run)

    index = max(range(len(runs)), key=lambda i: _rank(runs[i]))
    steps, verdict, best = runs[index]
    return OptimizationReport(
        iterations=steps,
        verdict=verdict,
        best=normalize_lengths(best.lengths),
        best_objective=best.value,
        start=index,
        config=config,
        runs=tuple(
            RunSummary(start=i, verdict=v, best_objective=b.value, iterations=len(s) - 1)
            for i, (s, v, b) in enumerate(runs)
        ),
    )
