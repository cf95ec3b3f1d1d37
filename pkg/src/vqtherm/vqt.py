"""The hybrid loop: free-energy cost, optimization driver, temperature sweeps.

The cost is the relative free energy beta <H> - S(theta).  Up to the additive
constant ln Z it equals the quantum relative entropy between the prepared
state and the Gibbs state, so it is bounded below by -ln Z and reaches the
bound exactly at the thermal state.  The entropy term is always evaluated
classically from the latent logits; the estimator only supplies <H>.

The Gibbs oracle is computed for reporting fidelity and never enters the
objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import ansatz, estimator, model, qcore
from .errors import ConfigError, DomainError, ObjectiveEvaluationError
from .optimizer import OptimizationTrace, OptimizerConfig, default_sampler, multistart

MODES = ("exact", "shots", "noisy")


@dataclass(frozen=True)
class VqtParams:
    """The full variational parameter set (latent logits + circuit angles)."""

    latent: ansatz.LatentParams
    circuit: ansatz.CircuitParams

    def to_vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.latent.theta, dtype=np.float64),
                               np.asarray(self.circuit.phi, dtype=np.float64)])

    @classmethod
    def from_vector(cls, vec: np.ndarray, layers: int) -> "VqtParams":
        vec = np.asarray(vec, dtype=np.float64)
        expected = ansatz.N_QUBITS + ansatz.ANGLES_PER_LAYER * layers
        if vec.size != expected:
            raise ConfigError(f"parameter vector has size {vec.size}, expected {expected}")
        return cls(latent=ansatz.LatentParams(theta=tuple(vec[:2])),
                   circuit=ansatz.CircuitParams(phi=tuple(vec[2:]), layers=layers))


@dataclass(frozen=True)
class VqtProblem:
    """One thermalization task: target model/temperature plus knob settings."""

    model: model.DimerModel
    temperature: float
    mode: str = "exact"
    layers: int = 2
    shots: estimator.ShotConfig = field(default_factory=estimator.ShotConfig)
    noise: estimator.NoiseModel = field(default_factory=estimator.NoiseModel)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if not (self.temperature > 0) or not np.isfinite(self.temperature):
            raise DomainError(f"temperature must be positive, got {self.temperature}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature

    @property
    def n_parameters(self) -> int:
        return ansatz.N_QUBITS + ansatz.ANGLES_PER_LAYER * self.layers


@dataclass
class VqtResult:
    """Converged parameters, cost, reconstructed state and oracle fidelity."""

    params: VqtParams
    cost: float
    state: np.ndarray
    fidelity_vs_gibbs: float
    trace: OptimizationTrace
    temperature: float
    mode: str

    def to_json_dict(self) -> dict:
        return {
            "temperature_K": self.temperature,
            "mode": self.mode,
            "cost": self.cost,
            "fidelity_vs_gibbs": self.fidelity_vs_gibbs,
            "params": {
                "theta": list(self.params.latent.theta),
                "phi": list(self.params.circuit.phi),
                "layers": self.params.circuit.layers,
            },
            "state": {
                "re": self.state.real.tolist(),
                "im": self.state.imag.tolist(),
            },
            "trace": {
                "evaluations": self.trace.evaluations,
                "best_cost": self.trace.best_cost,
                "converged": self.trace.converged,
                "method": self.trace.method,
            },
        }


@dataclass(frozen=True)
class VqtFailure:
    """Recorded per-point failure inside a sweep."""

    temperature: float
    message: str
    trace: OptimizationTrace | None = None


def free_energy_cost(p: VqtParams, prob: VqtProblem, evaluation: int = 0) -> float:
    """beta <H>_{theta,phi} - S(theta) under the configured estimator mode."""
    if prob.mode == "exact":
        est = estimator.exact_expectation(p.latent, p.circuit, prob.model)
    elif prob.mode == "shots":
        est = estimator.shot_expectation(p.latent, p.circuit, prob.model,
                                         prob.shots, None, evaluation=evaluation)
    else:
        est = estimator.shot_expectation(p.latent, p.circuit, prob.model,
                                         prob.shots, prob.noise, evaluation=evaluation)
    return prob.beta * est.value - ansatz.latent_entropy(p.latent)


def reconstruct_state(p: VqtParams) -> np.ndarray:
    """The ideal mixed state sum_b p(b) U|b><b|U^dagger for given parameters."""
    return ansatz.transformed_state(p.latent, p.circuit)


def _make_objective(prob: VqtProblem):
    counter = {"n": 0}

    def objective(vec: np.ndarray) -> float:
        p = VqtParams.from_vector(vec, prob.layers)
        val = free_energy_cost(p, prob, evaluation=counter["n"])
        counter["n"] += 1
        return val

    return objective


def run_vqt(prob: VqtProblem, initial: VqtParams | None = None) -> VqtResult:
    """Minimize the free energy and reconstruct the resulting mixed state.

    Restarts (prob.optimizer.restarts total starts) are drawn from the
    standard sampler seeded by prob.optimizer.seed; an explicit `initial`
    replaces the first draw.  The returned fidelity is against the exact
    Gibbs state, computed after the fact -- the optimizer never sees it.
    """
    objective = _make_objective(prob)
    base_sampler = default_sampler(prob.optimizer.seed, ansatz.N_QUBITS,
                                   ansatz.ANGLES_PER_LAYER * prob.layers)
    if initial is None:
        sampler = base_sampler
    else:
        first = initial.to_vector()

        def sampler(k: int) -> np.ndarray:
            return first if k == 0 else base_sampler(k)

    trace = multistart(objective, prob.optimizer, sampler)
    best = VqtParams.from_vector(trace.best_params, prob.layers)
    state = reconstruct_state(best)
    gibbs = model.gibbs_state(prob.model, prob.temperature)
    fid = qcore.fidelity(state, gibbs)
    return VqtResult(params=best, cost=trace.best_cost, state=state,
                     fidelity_vs_gibbs=fid, trace=trace,
                     temperature=prob.temperature, mode=prob.mode)


def temperature_sweep(m: model.DimerModel, temps, *, mode: str = "exact",
                      layers: int = 2,
                      shots: estimator.ShotConfig | None = None,
                      noise: estimator.NoiseModel | None = None,
                      optimizer_cfg: OptimizerConfig | None = None,
                      warm_start: bool = False) -> list[VqtResult | VqtFailure]:
    """Independent run_vqt per temperature; optional warm-start chaining.

    Results come back in input order.  A failing point is recorded as a
    VqtFailure and the sweep continues.  Each point gets a distinct seed
    derived from the base optimizer seed so shot streams never collide.
    """
    temps = [float(t) for t in temps]
    for t in temps:
        if not (t > 0):
            raise DomainError(f"sweep temperatures must be positive, got {t}")
    shots = shots or estimator.ShotConfig()
    noise = noise or estimator.NoiseModel()
    optimizer_cfg = optimizer_cfg or OptimizerConfig()
    out: list[VqtResult | VqtFailure] = []
    previous: VqtParams | None = None
    for i, t in enumerate(temps):
        prob = VqtProblem(
            model=m, temperature=t, mode=mode, layers=layers,
            shots=replace(shots, seed=shots.seed + 7919 * i),
            noise=noise,
            optimizer=replace(optimizer_cfg, seed=optimizer_cfg.seed + 104729 * i))
        try:
            res = run_vqt(prob, initial=previous if warm_start else None)
        except ObjectiveEvaluationError as exc:
            out.append(VqtFailure(temperature=t, message=str(exc), trace=exc.trace))
            continue
        out.append(res)
        if warm_start:
            previous = res.params
    return out
