import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .conf import spectra_settings
from .cycles import fit_loglog_slope
from .exceptions import EigenSolverError, GraphError, LengthError, SpectraError, SurgeryError
from .models import (
    Graph, LengthFunction, build_graph, canonical_edge, distance_to_cycle, find_cycle,
    fujiwara_weights, normalize_lengths, random_lengths, relabel,
)
from .spectral import (
    assemble_laplacian, first_eigenpair, laplacian_spectrum, rayleigh_quotient, symmetric_eigen,
)

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


def attach_pendant(g, l, at, t):
    g.check_vertex(at)
    l.check_graph(g)
    if not t > 0:
        raise LengthError(f"pendant length must be positive, got {t!r}")
    lengths = l.as_dict()
    lengths[(at, g.n + 1)] = float(t)
    return build_graph(g.n + 1, lengths.keys()), LengthFunction.from_mapping(lengths)


def lift_vector(v, alpha, t):
    """Extend a vertex vector of L by sqrt(t/alpha) * v_n on the pendant slot."""
    v = np.asarray(v, dtype=float)
    return np.append(v, math.sqrt(t / alpha) * v[-1])


def divergence_probe(n, alpha, t):
    """Unit-order vector (0, ..., 0, -sqrt(t/alpha), 1) carrying the t**-2 eigenvalue."""
    u = np.zeros(n + 1)
    u[n - 1] = -math.sqrt(t / alpha)
    u[n] = 1.0
    return u


@dataclass(frozen=True)
class StructureEntry:
    name: str
    value: float
    expansion: float
    residual: float
    half_step_residual: float
    expected_order: int

    @property
    def observed_order(self):
        if self.residual == 0.0 or self.half_step_residual == 0.0:
            return None
        return math.log2(self.residual / self.half_step_residual)

    @property
    def holds(self):
        scale = max(1.0, abs(self.expansion))
        if self.expected_order == 0:
            return self.residual <= 1e-14 * scale
        # a residual at rounding level has no measurable order
        if self.residual <= 1e-12 * scale:
            return True
        order = self.observed_order
        return order is None or order >= self.expected_order - 0.25


@dataclass(frozen=True)
class StructureReport:
    at: int
    t: float
    alpha: float
    entries: tuple

    def entry(self, name):
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    @property
    def passed(self):
        return all(entry.holds for entry in self.entries)


def _structure_residuals(g, l, t):
    n = g.n
    base = assemble_laplacian(g, l)
    extended = assemble_laplacian(*attach_pendant(g, l, n, t))
    alpha = fujiwara_weights(g, l).m0[n - 1]
    prefactor = -1.0 / (math.sqrt(alpha) * t**1.5)
    diagonal = (extended[n - 1, n - 1] - base[n - 1, n - 1]) * alpha * t
    coupling = extended[n - 1, n] / prefactor
    return {
        'corner': (extended[n, n], 1.0 / t**2, abs(extended[n, n] - 1.0 / t**2) * t**2),
        'diagonal': (extended[n - 1, n - 1], base[n - 1, n - 1] + (1.0 - t / alpha) / (alpha * t),
                     abs(diagonal - (1.0 - t / alpha))),
        'coupling': (extended[n - 1, n], prefactor * (1.0 - t / (2.0 * alpha)),
                     abs(coupling - (1.0 - t / (2.0 * alpha)))),
        'row': (float(np.max(np.abs(extended[: n - 1, n - 1]), initial=0.0)),
                float(np.max(np.abs(base[: n - 1, n - 1]), initial=0.0)),
                float(np.max(np.abs(extended[: n - 1, n - 1] - base[: n - 1, n - 1]), initial=0.0))),
        'untouched': (0.0, 0.0, float(np.max(np.abs(extended[: n - 1, : n - 1] - base[: n - 1, : n - 1]),
                                             initial=0.0))),
        'zero_column': (0.0, 0.0, float(np.max(np.abs(extended[: n - 1, n]), initial=0.0))),
    }, alpha


EXPECTED_ORDERS = {'corner': 0, 'diagonal': 2, 'coupling': 2, 'row': 1, 'untouched': 0, 'zero_column': 0}


def verify_perturbed_structure(g, l, at, t):
    """Compare the pendant-extended Laplacian with its small-t expansion.

    The vertex `at` is first swapped with vertex n so the pendant hangs off the
    last base index. Bracketed expansions are compared after dividing out their
    leading prefactor; those residuals are rerun at t/2 to read off the order.
    """
    if g.n < 2:
        raise GraphError("pendant surgery needs a base graph with at least one edge")
    g.check_vertex(at)
    g.require_connected()
    permutation = {v: v for v in g.vertices}
    permutation[at], permutation[g.n] = g.n, at
    g, l = relabel(g, l, permutation)
    residuals, alpha = _structure_residuals(g, l, t)
    halved, _ = _structure_residuals(g, l, t / 2.0)
    entries = tuple(
        StructureEntry(
            name=name,
            value=float(value),
            expansion=float(expansion),
            residual=float(residual),
            half_step_residual=float(halved[name][2]),
            expected_order=EXPECTED_ORDERS[name],
        )
        for name, (value, expansion, residual) in residuals.items()
    )
    return StructureReport(at=at, t=t, alpha=alpha, entries=entries)


@dataclass(frozen=True, eq=False)
class SBlock:
    alpha: float
    t: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    numerical_eigenvalues: np.ndarray

    def max_relative_error(self):
        return float(np.max(np.abs(self.numerical_eigenvalues - self.eigenvalues)) / np.max(self.eigenvalues))


def s_block(alpha, t):
    if not (alpha > 0 and t > 0):
        raise SpectraError(f"alpha and t must be positive, got alpha={alpha!r}, t={t!r}")
    off = -t**-1.5 / math.sqrt(alpha)
    matrix = np.array([[1.0 / (alpha * t), off], [off, t**-2]])
    ratio = math.sqrt(t / alpha)
    vectors = np.array([[1.0, -ratio], [ratio, 1.0]]) / math.sqrt(1.0 + ratio**2)
    return SBlock(
        alpha=alpha,
        t=t,
        matrix=matrix,
        eigenvalues=np.array([0.0, (alpha + t) / (alpha * t**2)]),
        eigenvectors=vectors,
        numerical_eigenvalues=symmetric_eigen(matrix).eigenvalues,
    )


@dataclass(frozen=True)
class ConvergencePoint:
    t: float
    lambda1: float
    deviations: tuple
    max_deviation: float
    largest: float
    noise_floor: float


@dataclass(frozen=True)
class ConvergenceReport:
    at: int
    base_eigenvalues: tuple
    points: tuple
    failures: tuple = field(default=())

    @property
    def constant(self):
        """Smallest C with max deviation <= C * sqrt(t) over the grid."""
        return max((p.max_deviation / math.sqrt(p.t) for p in self.points), default=0.0)

    @property
    def decreasing(self):
        return all(
            b.max_deviation <= a.max_deviation + b.noise_floor
            for a, b in zip(self.points, self.points[1:])
        )

    @property
    def largest_fit(self):
        if len(self.points) < 3:
            return None
        return fit_loglog_slope([(p.t, p.largest) for p in self.points])

    @property
    def converged(self):
        return bool(self.points) and self.decreasing


def eigen_convergence_check(g, l, at, t_grid):
    if g.n < 2:
        raise GraphError("pendant surgery needs a base graph with at least one edge")
    g.require_connected()
    g.check_vertex(at)
    t_grid = tuple(float(t) for t in t_grid)
    if any(b >= a for a, b in zip(t_grid, t_grid[1:])):
        raise SpectraError("t grid must be strictly decreasing")
    base_lengths = normalize_lengths(l)
    base = laplacian_spectrum(g, base_lengths).eigenvalues
    points, failures = [], []
    for t in t_grid:
        try:
            spectrum = laplacian_spectrum(*attach_pendant(g, base_lengths, at, t))
        except EigenSolverError as e:
            logger.warning(f"Eigensolve failed at t={t!r}: {str(e)}")
            failures.append(t)
            continue
        values = spectrum.eigenvalues
        deviations = np.abs(values[: g.n] - base)
        points.append(ConvergencePoint(
            t=t,
            lambda1=float(values[1]),
            deviations=tuple(deviations.tolist()),
            max_deviation=float(deviations.max()),
            largest=float(values[-1]),
            noise_floor=float(64 * EPS * spectrum.norm),
        ))
        logger.debug(f"Pendant t={t:.3e} at vertex {at}: max deviation {deviations.max():.3e}")
    return ConvergenceReport(at=at, base_eigenvalues=tuple(base.tolist()),
                             points=tuple(points), failures=tuple(failures))


def relative_grid(l, scales):
    """Pendant lengths scaled by the shortest normalized edge, to sit in the small-t regime."""
    shortest = min(normalize_lengths(l).values)
    return tuple(shortest * s for s in scales)


@dataclass(frozen=True)
class Contraction:
    graph: object
    lengths: LengthFunction
    pendant: int
    neighbor: int
    relabel: dict


def contract_pendant(g, l, pendant):
    g.check_vertex(pendant)
    l.check_graph(g)
    if g.degree(pendant) != 1:
        raise SurgeryError(f"vertex {pendant} has degree {g.degree(pendant)}, only degree-one vertices contract")
    (neighbor,) = g.neighbors(pendant)
    mapping = {v: (v if v < pendant else v - 1) for v in g.vertices if v != pendant}
    lengths = {
        canonical_edge(mapping[u], mapping[v]): value
        for (u, v), value in zip(g.edges, l.values)
        if pendant not in (u, v)
    }
    graph = build_graph(g.n - 1, lengths.keys())
    return Contraction(
        graph=graph,
        lengths=LengthFunction.from_mapping(lengths),
        pendant=pendant,
        neighbor=mapping[neighbor],
        relabel=mapping,
    )


@dataclass(frozen=True)
class Cut:
    graph: object
    vertex: int
    clone: int
    kept_edge: tuple
    edge_map: dict

    def lengths(self, l):
        return LengthFunction.from_mapping({self.edge_map[e]: value for e, value in zip(l.edges, l.values)})


def cut_at_vertex(g, at, keep_edge):
    g.check_vertex(at)
    keep_edge = canonical_edge(*keep_edge)
    if g.degree(at) < 2:
        raise SurgeryError(f"vertex {at} has degree {g.degree(at)}; cutting needs degree >= 2")
    if at not in keep_edge or not g.has_edge(*keep_edge):
        raise SurgeryError(f"edge {keep_edge} is not incident to vertex {at}")
    clone = g.n + 1
    edge_map = {}
    for edge in g.edges:
        if at in edge and edge != keep_edge:
            other = edge[0] if edge[1] == at else edge[1]
            edge_map[edge] = canonical_edge(other, clone)
        else:
            edge_map[edge] = edge
    graph = Graph(g.n + 1, tuple(sorted(edge_map.values())))
    if not graph.is_connected:
        raise SurgeryError(f"invalid cut: cutting vertex {at} keeping {keep_edge} disconnects the graph")
    return Cut(graph=graph, vertex=at, clone=clone, kept_edge=keep_edge, edge_map=edge_map)


def extend_to_cut(phi, cut):
    phi = np.asarray(phi, dtype=float)
    return np.append(phi, phi[cut.vertex - 1])


@dataclass(frozen=True)
class CutCheck:
    before: float
    after: float
    extension_quotient: float

    @property
    def holds(self):
        return self.after <= self.before + 1e-10 * self.before


def cut_monotonicity_check(g, l, at, keep_edge):
    cut = cut_at_vertex(g, at, keep_edge)
    cut_lengths = cut.lengths(l)
    pair = first_eigenpair(g, l)
    after = first_eigenpair(cut.graph, cut_lengths).value
    quotient = rayleigh_quotient(cut.graph, cut_lengths, extend_to_cut(pair.phi, cut))
    if after > pair.value * (1 + 1e-10):
        logger.error(f"Cut at {at} keeping {cut.kept_edge} raised lambda1 from {pair.value!r} to {after!r}")
    return CutCheck(before=pair.value, after=after, extension_quotient=quotient)


@dataclass(frozen=True)
class SurgeryStep:
    kind: str
    vertex: int
    kept_edge: tuple = None
    evidence: object = None

    CUT = 'cut'
    CONTRACT = 'contract'


@dataclass(frozen=True)
class InequalityEvidence:
    step: int
    kind: str
    before: float
    after: float
    holds: bool


@dataclass(frozen=True)
class ReductionTrace:
    initial: object
    cycle: tuple
    steps: tuple
    final: object
    inequality_chain: tuple

    @property
    def passed(self):
        return self.final.is_cycle and all(e.holds for e in self.inequality_chain)

    def replay(self):
        g = self.initial
        lengths = LengthFunction.uniform(g)
        for step in self.steps:
            if step.kind == SurgeryStep.CUT:
                cut = cut_at_vertex(g, step.vertex, step.kept_edge)
                g, lengths = cut.graph, cut.lengths(lengths)
            else:
                contraction = contract_pendant(g, lengths, step.vertex)
                g, lengths = contraction.graph, contraction.lengths
        return g


def _cut_candidates(g, u, distance):
    toward = sorted(w for w in g.neighbors(u) if distance[w] == distance[u] - 1)
    rest = sorted(w for w in g.neighbors(u) if w not in toward)
    return [canonical_edge(u, w) for w in toward + rest]


def _contract_with_evidence(g, lengths, pendant, index, grid_scales):
    contraction = contract_pendant(g, lengths, pendant)
    report = eigen_convergence_check(
        contraction.graph, contraction.lengths, contraction.neighbor,
        relative_grid(contraction.lengths, grid_scales),
    )
    base = report.base_eigenvalues[1]
    closest = report.points[-1].lambda1 if report.points else math.nan
    holds = report.converged and abs(closest - base) <= 1e-2 * (1.0 + base)
    evidence = InequalityEvidence(step=index, kind=SurgeryStep.CONTRACT, before=base, after=closest, holds=holds)
    return contraction, report, evidence


def reduce_to_cycle(g, seed=None, grid_scales=None):
    g.require_connected()
    cycle = find_cycle(g)
    if cycle is None:
        raise GraphError("graph is a tree; there is no cycle to reduce to")
    seed = spectra_settings.SEED if seed is None else seed
    grid_scales = spectra_settings.CONVERGENCE_GRID if grid_scales is None else grid_scales
    rng = np.random.default_rng(seed)
    lengths = random_lengths(g, rng, *spectra_settings.RANDOM_LENGTH_RANGE)
    logger.info(f"Reducing graph (n={g.n}, m={g.m}) to its girth cycle {cycle}")

    current, current_cycle = g, list(cycle)
    steps, chain = [], []
    while current.n > len(current_cycle):
        distance = distance_to_cycle(current, current_cycle)
        u = max(distance, key=lambda v: (distance[v], -v))
        if current.degree(u) >= 2:
            for keep in _cut_candidates(current, u, distance):
                try:
                    cut = cut_at_vertex(current, u, keep)
                    break
                except SurgeryError as e:
                    logger.info(f"Cut candidate rejected: {str(e)}")
            else:
                raise SurgeryError(f"no incident edge of vertex {u} yields a connected cut")
            check = cut_monotonicity_check(current, lengths, u, cut.kept_edge)
            steps.append(SurgeryStep(kind=SurgeryStep.CUT, vertex=u, kept_edge=cut.kept_edge, evidence=check))
            chain.append(InequalityEvidence(step=len(steps) - 1, kind=SurgeryStep.CUT,
                                            before=check.before, after=check.after, holds=check.holds))
            current, lengths = cut.graph, cut.lengths(lengths)
        contraction, report, evidence = _contract_with_evidence(current, lengths, u, len(steps), grid_scales)
        steps.append(SurgeryStep(kind=SurgeryStep.CONTRACT, vertex=u, evidence=report))
        chain.append(evidence)
        current, lengths = contraction.graph, contraction.lengths
        current_cycle = [contraction.relabel[v] for v in current_cycle]
        logger.debug(f"Step {len(steps)}: graph now has n={current.n}, m={current.m}")

    if not current.is_cycle:
        raise SurgeryError(f"reduction stopped at a non-cycle graph with n={current.n}, m={current.m}")
    return ReductionTrace(
        initial=g,
        cycle=tuple(cycle),
        steps=tuple(steps),
        final=current,
        inequality_chain=tuple(chain),
    )
