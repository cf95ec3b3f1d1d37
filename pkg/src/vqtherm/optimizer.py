"""Derivative-free minimization for the hybrid loop.

Two methods, both written from scratch:

* ``linear_approx`` -- the default: a trust-region method in the COBYLA
  family.  It keeps a simplex of d+1 interpolation points, fits the linear
  model through them, and walks against the model gradient with an expanding
  line probe.  The resolution radius rho only ever shrinks; a step of length
  rho that fails marks the current resolution as exhausted and halves rho.
  Simplex geometry is repaired lazily, one vertex per iteration, along the
  weakest singular direction of the edge matrix.
* ``simplex`` -- a standard Nelder-Mead fallback with the usual
  reflection/expansion/contraction/shrink moves.

An *iteration* is one outer cycle (geometry repair, or model step with its
line probe, or one Nelder-Mead move); an iteration costs between one and
dimension+2 objective evaluations, so total evaluations stay below
``max_iterations * (dimension + small constant)``.  The trace records every
evaluation together with the iteration it belongs to; cost-vs-iteration is
what convergence plots show.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ObjectiveEvaluationError

_METHODS = ("linear_approx", "simplex")


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "linear_approx"
    max_iterations: int = 400     # outer iterations per run
    initial_step: float = 0.5     # starting trust-region radius (radians)
    final_step: float = 1e-4      # stop once the radius shrinks below this
    restarts: int = 1             # total starts used by multistart
    seed: int = 0

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ConfigError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if not (0 < self.final_step < self.initial_step):
            raise ConfigError("need 0 < final_step < initial_step")
        if self.restarts < 0:
            raise ConfigError("restarts must be non-negative")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int     # outer iteration this evaluation belongs to
    evaluation: int    # 1-based evaluation counter
    cost: float
    params_hash: str
    step_size: float   # resolution radius at evaluation time


@dataclass
class OptimizationTrace:
    records: list[TraceRecord] = field(default_factory=list)
    best_cost: float = np.inf
    best_params: np.ndarray | None = None
    evaluations: int = 0
    iterations: int = 0
    converged: bool = False  # True when the radius criterion fired
    method: str = "linear_approx"

    def best_cost_by_iteration(self, iteration: int) -> float:
        """Best cost seen in iterations up to and including `iteration`."""
        costs = [r.cost for r in self.records if r.iteration <= iteration]
        return min(costs) if costs else np.inf

    def cost_series(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])


class _BudgetExhausted(Exception):
    pass


def _params_hash(x: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(x, dtype=np.float64).tobytes()).hexdigest()[:16]


class _Recorder:
    """Wraps the objective: budget enforcement, tracing, best tracking."""

    def __init__(self, objective, cfg: OptimizerConfig, trace: OptimizationTrace,
                 dimension: int):
        self.objective = objective
        self.cfg = cfg
        self.trace = trace
        self.step_size = cfg.initial_step
        self.max_evaluations = cfg.max_iterations * (dimension + 4)

    def __call__(self, x: np.ndarray) -> float:
        if self.trace.evaluations >= self.max_evaluations:
            raise _BudgetExhausted
        y = float(self.objective(np.asarray(x, dtype=np.float64)))
        self.trace.evaluations += 1
        self.trace.records.append(TraceRecord(
            iteration=self.trace.iterations, evaluation=self.trace.evaluations,
            cost=y, params_hash=_params_hash(x), step_size=self.step_size))
        if not np.isfinite(y):
            raise ObjectiveEvaluationError(
                f"objective returned {y} at parameters {np.array2string(x, precision=6)}",
                params=np.array(x, dtype=np.float64), trace=self.trace)
        if y < self.trace.best_cost:
            self.trace.best_cost = y
            self.trace.best_params = np.array(x, dtype=np.float64)
        return y


def _minimize_linear_approx(f: _Recorder, x0: np.ndarray, cfg: OptimizerConfig,
                            trace: OptimizationTrace) -> None:
    n = x0.size
    rho = cfg.initial_step        # resolution radius; only ever shrinks
    lam = rho                     # working step length, in [rho, 64*rho]
    verts = np.vstack([x0, x0 + rho * np.eye(n)])
    fvals = np.array([f(v) for v in verts])

    def insert(cand: np.ndarray, fc: float) -> None:
        """Replace the non-best vertex whose simplex coordinate the new point
        loads most; keeps the interpolation set well poised."""
        edges = verts[1:] - verts[0]
        try:
            alpha = np.linalg.solve(edges.T, cand - verts[0])
            j = int(np.argmax(np.abs(alpha)))
        except np.linalg.LinAlgError:
            j = int(np.argmax(np.linalg.norm(edges, axis=1)))
        verts[j + 1] = cand
        fvals[j + 1] = fc

    fresh = True  # simplex was (re)built at the current scale around the best
    while trace.iterations < cfg.max_iterations:
        trace.iterations += 1
        b = int(np.argmin(fvals))
        if b != 0:
            verts[[0, b]] = verts[[b, 0]]
            fvals[[0, b]] = fvals[[b, 0]]
            fresh = False
        edges = verts[1:] - verts[0]
        dist = np.linalg.norm(edges, axis=1)

        # -- linear model through the current point cloud; a scattered or
        #    degenerate cloud is tolerated while steps keep succeeding
        g = None
        if np.all(dist > 0):
            try:
                g = np.linalg.solve(edges, fvals[1:] - fvals[0])
            except np.linalg.LinAlgError:
                g = None
        if g is not None and (not np.all(np.isfinite(g)) or np.linalg.norm(g) == 0.0):
            g = None

        if g is None:
            # unusable model: rebuild the simplex at the current resolution
            verts[1:] = verts[0] + rho * np.eye(n)
            fvals[1:] = [f(v) for v in verts[1:]]
            fresh = True
            continue

        # -- trust step with an expanding line probe along -g
        d = -g / np.linalg.norm(g)
        base = verts[0].copy()
        f_base = fvals[0]
        step = lam
        cand = base + step * d
        fc = f(cand)
        if fc < f_base:
            # ride the direction while it keeps paying, doubling each time;
            # overshoot probes are discarded so they cannot spoil geometry
            while 2.0 * step <= 64.0 * rho:
                nxt = base + 2.0 * step * d
                fn = f(nxt)
                if fn < fc:
                    step *= 2.0
                    cand, fc = nxt, fn
                else:
                    break
            insert(cand, fc)
            fresh = False
            lam = max(step, rho)
            continue

        insert(cand, fc)
        fresh = False if lam > rho else fresh
        if lam > rho:
            lam = max(0.5 * lam, rho)
            continue

        # a resolution-length step failed; before declaring this scale
        # exhausted, make sure the verdict came from a fresh local simplex
        if not fresh:
            verts[1:] = verts[0] + rho * np.eye(n)
            fvals[1:] = [f(v) for v in verts[1:]]
            fresh = True
            continue
        rho *= 0.5
        lam = rho
        f.step_size = rho
        fresh = False
        if rho < cfg.final_step:
            trace.converged = True
            return


def _minimize_simplex(f: _Recorder, x0: np.ndarray, cfg: OptimizerConfig,
                      trace: OptimizationTrace) -> None:
    """Nelder-Mead with standard coefficients (1, 2, 0.5, 0.5)."""
    n = x0.size
    verts = np.vstack([x0, x0 + cfg.initial_step * np.eye(n)])
    fvals = np.array([f(v) for v in verts])
    while trace.iterations < cfg.max_iterations:
        trace.iterations += 1
        order = np.argsort(fvals, kind="stable")
        verts, fvals = verts[order], fvals[order]
        spread = np.max(np.linalg.norm(verts[1:] - verts[0], axis=1))
        f.step_size = min(f.step_size, spread)
        if spread < cfg.final_step:
            trace.converged = True
            return
        centroid = verts[:-1].mean(axis=0)
        xr = centroid + (centroid - verts[-1])
        fr = f(xr)
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - verts[-1])
            fe = f(xe)
            verts[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (verts[-1] - centroid)
            fc = f(xc)
            if fc < fvals[-1]:
                verts[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                    fvals[i] = f(verts[i])


def minimize(objective, initial, cfg: OptimizerConfig) -> OptimizationTrace:
    """Minimize a deterministic-or-noisy objective from one starting point.

    Stops when the trust-region radius drops below cfg.final_step or the
    iteration budget (cfg.max_iterations outer iterations) is exhausted; as a
    backstop, evaluations never exceed max_iterations * (dimension + 4).  The
    trace holds one record per evaluation, tagged with its iteration;
    best_cost never exceeds the cost at the initial point.  A non-finite
    objective value aborts with ObjectiveEvaluationError carrying the
    offending parameters and the partial trace.
    """
    x0 = np.asarray(initial, dtype=np.float64).ravel()
    if x0.size == 0 or not np.all(np.isfinite(x0)):
        raise ConfigError("initial point must be a non-empty finite vector")
    trace = OptimizationTrace(method=cfg.method)
    rec = _Recorder(objective, cfg, trace, x0.size)
    try:
        if cfg.method == "linear_approx":
            _minimize_linear_approx(rec, x0, cfg, trace)
        else:
            _minimize_simplex(rec, x0, cfg, trace)
    except _BudgetExhausted:
        pass
    return trace


def multistart(objective, cfg: OptimizerConfig, sampler) -> OptimizationTrace:
    """Best-of-N restarts; sampler(k) yields the k-th initial vector.

    cfg.restarts counts the total number of starts (so restarts=1 reproduces
    a single minimize run).  A restart aborted by ObjectiveEvaluationError is
    recorded and skipped; the error propagates only if every restart fails.
    """
    n_starts = max(cfg.restarts, 1)
    best: OptimizationTrace | None = None
    last_error: ObjectiveEvaluationError | None = None
    for k in range(n_starts):
        x0 = np.asarray(sampler(k), dtype=np.float64)
        try:
            tr = minimize(objective, x0, cfg)
        except ObjectiveEvaluationError as exc:
            last_error = exc
            continue
        if best is None or tr.best_cost < best.best_cost:
            best = tr
    if best is None:
        assert last_error is not None
        raise last_error
    return best


def default_sampler(seed: int, n_theta: int, n_phi: int):
    """Restart sampler: circuit angles uniform in [-pi, pi], logits in [-2, 2]."""
    rng = np.random.default_rng(seed)
    draws: list[np.ndarray] = []

    def sampler(k: int) -> np.ndarray:
        while len(draws) <= k:
            theta = rng.uniform(-2.0, 2.0, size=n_theta)
            phi = rng.uniform(-np.pi, np.pi, size=n_phi)
            draws.append(np.concatenate([theta, phi]))
        return draws[k]

    return sampler
