"""Classical minimization of circuit and correlator parameters.

The variational loop has a few requirements that rule out calling a scipy
routine and walking away: unstable denominators must turn into penalty
energies rather than exceptions so derivative-free methods can retreat,
repeated instability has to abandon a start instead of wasting its budget,
and every scalar evaluation must land in a trace that can be replayed and
audited.  `minimize` wraps one local search with that machinery and
`multi_start` runs a deterministic batch of them from seeded random
initial points.

Parameter vectors are always the circuit angles followed by the correlator
coefficients (single-Z block, then pair block); plain uncorrelated VQE is
the same objective with zero correlator coordinates, which keeps the two
protocols bit-comparable when sampled.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize as _sciopt

from .circuits import AnsatzSpec
from .jastrow import (DenominatorUnstable, ExactNuEnergy, JastrowParams,
                      TransformTemplate)
from .pauli import PauliSum

__all__ = [
    "PENALTY_ENERGY",
    "MAX_CONSECUTIVE_PENALTIES",
    "DEFAULT_BUDGET",
    "FD_STEP",
    "ENERGY_TOL",
    "TRUST_RADIUS_END",
    "METHODS",
    "OptimizationProblem",
    "EnergyObjective",
    "TraceRow",
    "RunTrace",
    "MultiStartResult",
    "finite_difference_gradient",
    "minimize",
    "multi_start",
]

logger = logging.getLogger(__name__)

PENALTY_ENERGY = 1.0e3
MAX_CONSECUTIVE_PENALTIES = 20
DEFAULT_BUDGET = 10_000
FD_STEP = 1.0e-6
ENERGY_TOL = 1.0e-9
TRUST_RADIUS_END = 1.0e-4
OVERLAP_FLOOR = 0.25
METHODS = ("quasi_newton", "linear_trust_region", "simplex")

_TRACE_COLUMNS = ("iteration", "params_hash", "energy", "denominator",
                  "denominator_stderr", "hf_overlap", "accepted")


def _params_hash(x: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(x, dtype=float).tobytes()
                          ).hexdigest()[:12]


@dataclass
class OptimizationProblem:
    """A scalar objective plus the structure the optimizer needs to know.

    objective(x) returns (energy, diagnostics) and may raise
    DenominatorUnstable; diagnostics should carry "denominator",
    "denominator_stderr" and "hf_overlap" (missing keys become NaN in the
    trace).  batch_objective, when present, maps an (B, n) batch to B
    energies with NaN marking unstable rows; it is what makes the
    finite-difference gradient affordable and is only expected from exact
    evaluators.
    """

    objective: Callable[[np.ndarray], tuple[float, dict]]
    n_circuit_params: int
    n_jastrow_params: int = 0
    bounds: list[tuple[float, float]] | None = None
    batch_objective: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def n_params(self) -> int:
        return self.n_circuit_params + self.n_jastrow_params


class EnergyObjective:
    """Energy of an ansatz state, optionally pushed through the correlator.

    With `correlated=True` the parameter vector is theta ++ (alpha, pair)
    and the energy is the correlated ratio; with `correlated=False` it is
    theta alone and the correlator is pinned to zero, which reduces the
    ratio to a plain expectation value while reusing the identical
    evaluation path.  Exact by default; pass a `sampling.SamplingEstimator`
    to measure with shots instead.
    """

    def __init__(self, ansatz: AnsatzSpec, hamiltonian: PauliSum,
                 correlated: bool = True, estimator=None):
        if hamiltonian.n_qubits != ansatz.n_qubits:
            raise ValueError("ansatz and hamiltonian qubit counts differ")
        self.ansatz = ansatz
        self.hamiltonian = hamiltonian
        self.correlated = bool(correlated)
        self.estimator = estimator
        n = ansatz.n_qubits
        self.n_circuit_params = ansatz.n_parameters
        self.n_jastrow_params = (n + n * (n - 1) // 2) if correlated else 0
        self._exact = None if estimator is not None else ExactNuEnergy(
            ansatz, hamiltonian)
        self._template = None
        if estimator is not None:
            # reused across evaluations; one symbolic pass, then refills
            self._template = TransformTemplate(hamiltonian)
        self._zero = JastrowParams.zero(n)
        self._overlap_warned = False

    def split(self, x: np.ndarray) -> tuple[np.ndarray, JastrowParams]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_circuit_params + self.n_jastrow_params,):
            raise ValueError("parameter vector has wrong length")
        theta = x[:self.n_circuit_params]
        if not self.correlated:
            return theta, self._zero
        params = JastrowParams.from_vector(self.ansatz.n_qubits,
                                           x[self.n_circuit_params:])
        return theta, params

    def __call__(self, x: np.ndarray) -> tuple[float, dict]:
        theta, params = self.split(x)
        if self._exact is not None:
            res = self._exact.evaluate(theta, params)
        else:
            res = self.estimator.nu_energy(self.ansatz, theta, params,
                                           self.hamiltonian,
                                           template=self._template)
        if res.hf_overlap < OVERLAP_FLOOR and not self._overlap_warned:
            logger.warning(
                "reference weight %.3f under %.2f: the correlator is "
                "shifting amplitude off the mean-field reference "
                "(monitored only, not enforced)", res.hf_overlap,
                OVERLAP_FLOOR)
            self._overlap_warned = True
        return res.energy, {
            "denominator": res.denominator,
            "denominator_stderr": res.denominator_stderr,
            "hf_overlap": res.hf_overlap,
            "energy_stderr": res.energy_stderr,
        }

    def batch(self, xs: np.ndarray) -> np.ndarray:
        if self._exact is None:
            raise ValueError("batched evaluation is exact-only")
        xs = np.asarray(xs, dtype=float)
        thetas = xs[:, :self.n_circuit_params]
        n = self.ansatz.n_qubits
        width = n + n * (n - 1) // 2
        if self.correlated:
            jmat = xs[:, self.n_circuit_params:]
        else:
            jmat = np.zeros((xs.shape[0], width))
        energies, _ = self._exact.evaluate_many(thetas, jmat)
        return energies

    def problem(self, bounds: list[tuple[float, float]] | None = None
                ) -> OptimizationProblem:
        return OptimizationProblem(
            objective=self, n_circuit_params=self.n_circuit_params,
            n_jastrow_params=self.n_jastrow_params, bounds=bounds,
            batch_objective=self.batch if self._exact is not None else None)


@dataclass
class TraceRow:
    iteration: int
    params_hash: str
    energy: float
    denominator: float
    denominator_stderr: float
    hf_overlap: float
    accepted: bool


@dataclass
class RunTrace:
    """Everything one local search did, in evaluation order."""

    rows: list[TraceRow] = field(default_factory=list)
    final_parameters: np.ndarray | None = None
    final_energy: float = np.nan
    termination_reason: str = ""
    n_evaluations: int = 0
    seed: int | None = None
    method: str = ""
    failed: bool = False

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_TRACE_COLUMNS)
            for r in self.rows:
                writer.writerow([r.iteration, r.params_hash,
                                 f"{r.energy:.17g}",
                                 f"{r.denominator:.17g}",
                                 f"{r.denominator_stderr:.17g}",
                                 f"{r.hf_overlap:.17g}",
                                 int(r.accepted)])

    def summary(self) -> dict:
        return {
            "method": self.method,
            "final_energy": self.final_energy,
            "final_params_hash": (None if self.final_parameters is None
                                  else _params_hash(self.final_parameters)),
            "termination_reason": self.termination_reason,
            "n_evaluations": self.n_evaluations,
            "n_accepted": sum(r.accepted for r in self.rows),
            "seed": self.seed,
            "failed": self.failed,
        }

    def write_summary(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


class _Abandoned(Exception):
    pass


class _OutOfBudget(Exception):
    pass


class _Converged(Exception):
    pass


class _Recorder:
    """Objective wrapper: penalties, budget, trace, and best-point memory."""

    def __init__(self, problem: OptimizationProblem, budget: int,
                 zero_jastrow_after: int | None):
        self.problem = problem
        self.budget = budget
        self.zero_after = zero_jastrow_after
        self.rows: list[TraceRow] = []
        self.n_evaluations = 0
        self.consecutive_penalties = 0
        self.best_energy = np.inf
        self.best_x: np.ndarray | None = None

    def effective(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if (self.zero_after is not None
                and self.n_evaluations >= self.zero_after
                and self.problem.n_jastrow_params):
            x = x.copy()
            x[self.problem.n_circuit_params:] = 0.0
        return x

    def _spend(self, amount: int) -> None:
        if self.n_evaluations + amount > self.budget:
            raise _OutOfBudget
        self.n_evaluations += amount

    def __call__(self, x: np.ndarray) -> float:
        self._spend(1)
        x = self.effective(x)
        penalized = False
        try:
            energy, diag = self.problem.objective(x)
        except DenominatorUnstable as exc:
            penalized = True
            energy = PENALTY_ENERGY
            diag = {"denominator": exc.denominator,
                    "denominator_stderr": np.nan, "hf_overlap": np.nan}
        if penalized:
            self.consecutive_penalties += 1
        else:
            self.consecutive_penalties = 0
        accepted = (not penalized) and energy < self.best_energy
        if accepted:
            self.best_energy = energy
            self.best_x = x.copy()
        self.rows.append(TraceRow(
            iteration=len(self.rows),
            params_hash=_params_hash(x),
            energy=float(energy),
            denominator=float(diag.get("denominator", np.nan)),
            denominator_stderr=float(diag.get("denominator_stderr", np.nan)),
            hf_overlap=float(diag.get("hf_overlap", np.nan)),
            accepted=accepted))
        if self.consecutive_penalties >= MAX_CONSECUTIVE_PENALTIES:
            raise _Abandoned
        return float(energy)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Central differences; stencil points do not produce trace rows."""
        x = self.effective(x)
        n = x.size
        self._spend(2 * n)
        pts = np.repeat(x[None, :], 2 * n, axis=0)
        idx = np.arange(n)
        pts[2 * idx, idx] += FD_STEP
        pts[2 * idx + 1, idx] -= FD_STEP
        if self.problem.batch_objective is not None:
            energies = np.asarray(self.problem.batch_objective(pts),
                                  dtype=float)
            energies = np.where(np.isnan(energies), PENALTY_ENERGY, energies)
        else:
            energies = np.empty(2 * n)
            for i, p in enumerate(pts):
                try:
                    energies[i], _ = self.problem.objective(p)
                except DenominatorUnstable:
                    energies[i] = PENALTY_ENERGY
        return (energies[0::2] - energies[1::2]) / (2.0 * FD_STEP)


def finite_difference_gradient(fun: Callable[[np.ndarray], float],
                               x: np.ndarray,
                               step: float = FD_STEP) -> np.ndarray:
    """Plain central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty(x.size)
    for i in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (fun(up) - fun(dn)) / (2.0 * step)
    return g


def minimize(problem: OptimizationProblem, x0: np.ndarray,
             method: str = "quasi_newton", budget: int = DEFAULT_BUDGET,
             seed: int | None = None,
             zero_jastrow_after: int | None = None) -> RunTrace:
    """One local search with penalties, budget, and trace capture.

    Methods: "quasi_newton" (BFGS on finite-difference gradients, needs a
    batch-capable exact objective), "linear_trust_region" (COBYLA, the
    shot-noise workhorse), "simplex" (Nelder-Mead).  The search stops on
    its method's convergence rule, on the evaluation budget, or abandons
    the start after 20 consecutive penalty evaluations.  The reported
    final energy is always the last accepted (improving, non-penalized)
    evaluation.  `zero_jastrow_after=k` pins the correlator coordinates to
    zero from the k-th evaluation on (a two-phase protocol: correlate
    first, then pure circuit); the default never zeroes.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n_params,):
        raise ValueError("x0 has wrong length")
    if budget < 1:
        raise ValueError("budget must be positive")
    rec = _Recorder(problem, budget, zero_jastrow_after)
    reason = "converged"
    failed = False

    try:
        if method == "quasi_newton":
            if problem.bounds is not None:
                raise ValueError("quasi_newton ignores bounds; use "
                                 "linear_trust_region or simplex")
            if problem.batch_objective is None:
                raise ValueError("quasi_newton needs an exact objective "
                                 "with batched evaluation")

            progress = {"prev_best": np.inf, "stall": 0}

            def _callback(xk):
                best = rec.best_energy
                if progress["prev_best"] - best < ENERGY_TOL:
                    progress["stall"] += 1
                else:
                    progress["stall"] = 0
                progress["prev_best"] = best
                if progress["stall"] >= 2:
                    raise _Converged

            _sciopt.minimize(rec, x0, jac=rec.gradient, method="BFGS",
                             callback=_callback,
                             options={"gtol": 1e-8, "maxiter": budget})
        elif method == "linear_trust_region":
            _sciopt.minimize(rec, x0, method="COBYLA",
                             bounds=problem.bounds, tol=TRUST_RADIUS_END,
                             options={"rhobeg": 0.5, "maxiter": budget})
        else:
            _sciopt.minimize(rec, x0, method="Nelder-Mead",
                             bounds=problem.bounds,
                             options={"fatol": ENERGY_TOL, "xatol": 1e-6,
                                      "maxfev": budget, "maxiter": budget,
                                      "adaptive": True})
    except _Converged:
        reason = "converged"
    except _OutOfBudget:
        reason = "budget_exhausted"
    except _Abandoned:
        reason = "abandoned_unstable"
        failed = True

    n_accepted = sum(r.accepted for r in rec.rows)
    if not failed and n_accepted <= 1:
        reason = "no_improvement"
    if rec.best_x is None:
        failed = True

    return RunTrace(rows=rec.rows,
                    final_parameters=rec.best_x,
                    final_energy=(np.nan if rec.best_x is None
                                  else rec.best_energy),
                    termination_reason=reason,
                    n_evaluations=rec.n_evaluations,
                    seed=seed,
                    method=method,
                    failed=failed)


@dataclass
class MultiStartResult:
    traces: list[RunTrace]
    best_index: int | None

    @property
    def best(self) -> RunTrace:
        if self.best_index is None:
            raise RuntimeError("every start failed")
        return self.traces[self.best_index]

    @property
    def best_energy(self) -> float:
        return self.best.final_energy

    @property
    def best_parameters(self) -> np.ndarray:
        return self.best.final_parameters

    @property
    def final_energies(self) -> np.ndarray:
        """Final energy per start, NaN where a start failed."""
        return np.array([np.nan if t.failed else t.final_energy
                         for t in self.traces])


def initial_point(problem: OptimizationProblem,
                  rng: np.random.Generator) -> np.ndarray:
    """Angles uniform on [0, 2pi); correlator coefficients on (-0.1, 0.1)."""
    theta = rng.uniform(0.0, 2.0 * np.pi, problem.n_circuit_params)
    jas = rng.uniform(-0.1, 0.1, problem.n_jastrow_params)
    return np.concatenate([theta, jas])


def multi_start(problem: OptimizationProblem, n_starts: int, seed: int,
                method: str = "quasi_newton", budget: int = DEFAULT_BUDGET,
                zero_jastrow_after: int | None = None) -> MultiStartResult:
    """Restart `minimize` from seeded random points; keep the best finish.

    Start i draws its initial point from the i-th spawn of
    SeedSequence(seed), so any prefix of the start list is reproducible
    independent of n_starts: growing n_starts only appends new starts and
    can never worsen the best result.  Failed (abandoned) starts are
    excluded from the best-of selection.
    """
    if n_starts < 1:
        raise ValueError("need at least one start")
    children = np.random.SeedSequence(seed).spawn(n_starts)
    traces = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        x0 = initial_point(problem, rng)
        trace = minimize(problem, x0, method=method, budget=budget,
                         seed=seed, zero_jastrow_after=zero_jastrow_after)
        traces.append(trace)
    best_index = None
    best = np.inf
    for i, t in enumerate(traces):
        if not t.failed and t.final_energy < best:
            best = t.final_energy
            best_index = i
    return MultiStartResult(traces=traces, best_index=best_index)
