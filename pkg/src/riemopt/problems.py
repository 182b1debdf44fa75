"""Benchmark problems, experiment configs, and run/sweep machinery.

Experiments are described by a single JSON document (strict schema:
unknown keys are rejected so metric-parameter typos cannot pass
silently).  A run writes one JSON log and one CSV iteration trace;
a sweep additionally writes a summary CSV.  All randomness flows from
the config seed, so outputs are reproducible on one platform up to the
wall-clock column.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .flag import FlagQuotient
from .linalg import BlockPartition, ProductVector, qr_positive, sym, vec_inner, vec_norm
from .manifold import AmbientProblem
from .psd_fixed_rank import PsdFixedRank
from .solvers import (
    IterationRecord,
    SolveResult,
    SolverConfig,
    steepest_descent,
    trust_region,
)
from .spd import SymmetricPositiveDefinite, logdet_problem
from .stiefel import Stiefel, rayleigh_problem

PROBLEM_KINDS = (
    "rayleigh_stiefel",
    "flag_quadratic",
    "weighted_pca_psd",
    "spd_logdet",
)

TRACE_COLUMNS = ("iter", "cost", "gradnorm", "radius_or_step", "inner_iters", "rho", "ms")


# -- problem builders ---------------------------------------------------------

def random_spd_matrix(rng, n: int) -> np.ndarray:
    """Q^T D Q with log-uniform spectrum in [1, 10]."""
    q, _ = qr_positive(rng.standard_normal((n, n)))
    d = np.exp(rng.uniform(0.0, np.log(10.0), size=n))
    return (q * d) @ q.T


def flag_quadratic_problem(a: np.ndarray, lam: np.ndarray) -> AmbientProblem:
    """Squared-coupling cost Tr((Y L Y^T A)^2) on a flag quotient.

    ``lam`` is the diagonal of the block-constant weight matrix L; the
    cost is invariant under block-diagonal rotations that preserve L.
    """
    a = np.asarray(a, dtype=float)
    lam = np.asarray(lam, dtype=float)

    def cost(y):
        s = (y * lam) @ y.T
        m = s @ a
        return float(np.trace(m @ m))

    def egrad(y):
        s = (y * lam) @ y.T
        return 4.0 * a @ s @ a @ y * lam

    def ehess(y, xi):
        s = (y * lam) @ y.T
        ds = (xi * lam) @ y.T + (y * lam) @ xi.T
        return 4.0 * (a @ ds @ a @ y * lam + a @ s @ a @ xi * lam)

    return AmbientProblem(cost=cost, egrad=egrad, ehess=ehess, name="flag_quadratic")


def _frame_factor(point):
    """Accept a PsdPoint or a raw (Y, P) pair (for ambient finite differences).

    The factor is symmetrized: the cost extension below depends on P only
    through sym(P), which is the extension whose gradient has the
    symmetric index-raised P-component.  On-manifold factors are already
    symmetric, so this only matters for off-manifold perturbations.
    """
    if hasattr(point, "y"):
        return point.y, point.p
    y, p = point
    p = np.asarray(p, dtype=float)
    return np.asarray(y, dtype=float), 0.5 * (p + p.T)


def weighted_pca_problem(a: np.ndarray, w: np.ndarray) -> AmbientProblem:
    """Weighted low-rank PSD approximation of a symmetric matrix.

    Cost Tr(W_d (A^2 - A S - S A + Y P^2 Y^T)) with S = Y P Y^T and
    W_d = diag(w); the ambient extension treats (Y, P) as free variables.
    Invariant under the joint rotation of the pair.
    """
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float).ravel()
    if np.any(w <= 0):
        raise ConfigError("weights must be positive")
    wd = w[:, None]  # left-multiplication by diag(w)
    const = float(np.trace((wd * a) @ a))

    def cost(point):
        y, p = _frame_factor(point)
        s = y @ p @ y.T
        cross = float(np.trace((wd * a) @ s))
        quad = float(np.trace((wd * y) @ p @ p @ y.T))
        return const - 2.0 * cross + quad

    def egrad(point):
        y, p = _frame_factor(point)
        awd = sym(a * w[None, :])  # sym(A W_d)
        gy = -4.0 * awd @ y @ p + 2.0 * wd * y @ p @ p
        gp = -2.0 * sym(y.T @ (wd * (a @ y - y @ p)))
        return ProductVector((gy, gp))

    def ehess(point, xi):
        y, p = _frame_factor(point)
        xi_y, xi_p = xi
        xi_p = 0.5 * (xi_p + xi_p.T)  # the extension sees sym(P) only
        awd = sym(a * w[None, :])
        hy = (
            -4.0 * awd @ (xi_y @ p + y @ xi_p)
            + 2.0 * wd * xi_y @ p @ p
            + 2.0 * wd * y @ (xi_p @ p + p @ xi_p)
        )
        hp = -2.0 * sym(xi_y.T @ (wd * (a @ y - y @ p))) - 2.0 * sym(
            y.T @ (wd * (a @ xi_y - xi_y @ p - y @ xi_p))
        )
        return ProductVector((hy, hp))

    return AmbientProblem(cost=cost, egrad=egrad, ehess=ehess, name="weighted_pca_psd")


# -- experiment specification -------------------------------------------------

_TOP_KEYS = {
    "problem",
    "n",
    "d",
    "p",
    "d_hat",
    "alpha0",
    "alpha1",
    "beta",
    "beta_schedule",
    "weights",
    "seed",
    "solver",
    "solver_config",
    "sweep",
}

_SOLVER_KEYS = {f.name for f in SolverConfig.__dataclass_fields__.values()}
_SWEEP_PARAMS = {"alpha0", "alpha1", "beta"}


@dataclass(frozen=True)
class ProblemSpec:
    problem: str
    n: int
    d: Optional[int] = None
    p: Optional[int] = None
    d_hat: Tuple[int, ...] = ()
    alpha0: float = 1.0
    alpha1: float = 1.0
    beta: Optional[float] = None
    beta_schedule: Tuple[Tuple[int, float], ...] = ()
    weights: str = "random"
    seed: int = 0
    solver: str = "trust_region"
    solver_config: SolverConfig = field(default_factory=SolverConfig)

    def to_config(self) -> Dict[str, Any]:
        cfg: Dict[str, Any] = {
            "problem": self.problem,
            "n": self.n,
            "alpha0": self.alpha0,
            "alpha1": self.alpha1,
            "seed": self.seed,
            "solver": self.solver,
            "solver_config": asdict(self.solver_config),
        }
        if self.d is not None:
            cfg["d"] = self.d
        if self.p is not None:
            cfg["p"] = self.p
        if self.d_hat:
            cfg["d_hat"] = list(self.d_hat)
        if self.beta is not None:
            cfg["beta"] = self.beta
        if self.beta_schedule:
            cfg["beta_schedule"] = [list(pair) for pair in self.beta_schedule]
        if self.problem == "weighted_pca_psd":
            cfg["weights"] = self.weights
        return cfg


def parse_spec(config: Dict[str, Any]) -> ProblemSpec:
    """Validate a config mapping; unknown keys and bad dimensions raise."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(config) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kind = config.get("problem")
    if kind not in PROBLEM_KINDS:
        raise ConfigError(f"problem must be one of {PROBLEM_KINDS}, got {kind!r}")
    try:
        n = int(config["n"])
    except KeyError:
        raise ConfigError("config needs dimension 'n'") from None
    if n <= 0:
        raise ConfigError("n must be positive")

    solver = config.get("solver", "trust_region")
    if solver not in ("trust_region", "steepest_descent"):
        raise ConfigError(f"unknown solver {solver!r}")
    raw_solver_cfg = config.get("solver_config", {})
    unknown = set(raw_solver_cfg) - _SOLVER_KEYS
    if unknown:
        raise ConfigError(f"unknown solver_config keys: {sorted(unknown)}")
    solver_config = SolverConfig(**raw_solver_cfg)

    alpha0 = float(config.get("alpha0", 1.0))
    alpha1 = float(config.get("alpha1", 1.0))
    if alpha0 <= 0 or alpha1 <= 0:
        raise ConfigError("metric parameters must be positive")

    d = config.get("d")
    p = config.get("p")
    d_hat = tuple(int(v) for v in config.get("d_hat", ()))
    beta = config.get("beta")
    schedule = tuple(
        (int(it), float(val)) for it, val in config.get("beta_schedule", ())
    )
    weights = config.get("weights", "random")
    if weights not in ("random", "uniform"):
        raise ConfigError("weights must be 'random' or 'uniform'")

    if kind == "rayleigh_stiefel":
        if d is None:
            raise ConfigError("rayleigh_stiefel needs 'd'")
        if not 0 < int(d) <= n:
            raise ConfigError("need 0 < d <= n")
    elif kind == "flag_quadratic":
        if not d_hat:
            raise ConfigError("flag_quadratic needs a nonempty 'd_hat'")
        if any(v <= 0 for v in d_hat):
            raise ConfigError("d_hat entries must be positive")
        total = sum(d_hat)
        if d is None:
            d = total
        if int(d) != total:
            raise ConfigError("flag_quadratic needs sum(d_hat) == d")
        if not 0 < total <= n:
            raise ConfigError("need 0 < sum(d_hat) <= n")
    elif kind == "weighted_pca_psd":
        if p is None:
            raise ConfigError("weighted_pca_psd needs 'p'")
        if not 0 < int(p) <= n:
            raise ConfigError("need 0 < p <= n")
    if kind != "weighted_pca_psd" and (beta is not None or schedule):
        raise ConfigError("beta only applies to weighted_pca_psd")
    if kind == "weighted_pca_psd":
        if beta is None and not schedule:
            beta = 1.0
        if beta is not None and beta <= 0:
            raise ConfigError("beta must be positive")
        if schedule:
            iters = [it for it, _ in schedule]
            if iters != sorted(iters) or iters[0] != 0:
                raise ConfigError("beta_schedule must start at 0 and be sorted")
            if any(val <= 0 for _, val in schedule):
                raise ConfigError("beta values must be positive")

    return ProblemSpec(
        problem=kind,
        n=n,
        d=int(d) if d is not None else None,
        p=int(p) if p is not None else None,
        d_hat=d_hat,
        alpha0=alpha0,
        alpha1=alpha1,
        beta=float(beta) if beta is not None else None,
        beta_schedule=schedule,
        weights=weights,
        seed=int(config.get("seed", 0)),
        solver=solver,
        solver_config=solver_config,
    )


def build_instance(spec: ProblemSpec, beta: Optional[float] = None):
    """Materialize (manifold, problem, x0) from a spec.

    ``beta`` overrides the static metric parameter (used when stepping
    through a schedule: the manifold is rebuilt, points carry over).
    """
    rng = np.random.default_rng(spec.seed)
    if spec.problem == "rayleigh_stiefel":
        a = random_spd_matrix(rng, spec.n)
        manifold = Stiefel(spec.n, spec.d, spec.alpha0, spec.alpha1)
        problem = rayleigh_problem(a)
        x0 = manifold.rand_point(rng)
    elif spec.problem == "flag_quadratic":
        a = random_spd_matrix(rng, spec.n)
        part = BlockPartition(spec.d_hat, sum(spec.d_hat))
        manifold = FlagQuotient(spec.n, part, spec.alpha0, spec.alpha1)
        lam = np.concatenate(
            [np.full(s, float(part.q - i)) for i, s in enumerate(part.sizes)]
        )
        problem = flag_quadratic_problem(a, lam)
        x0 = manifold.rand_point(rng)
    elif spec.problem == "weighted_pca_psd":
        a = sym(rng.standard_normal((spec.n, spec.n)))
        if spec.weights == "uniform":
            w = np.ones(spec.n)
        else:
            w = rng.uniform(0.5, 1.5, size=spec.n)
        beta_eff = beta if beta is not None else (spec.beta or 1.0)
        manifold = PsdFixedRank(spec.n, spec.p, spec.alpha0, spec.alpha1, beta_eff)
        problem = weighted_pca_problem(a, w)
        x0 = manifold.rand_point(rng)
    elif spec.problem == "spd_logdet":
        c = random_spd_matrix(rng, spec.n)
        manifold = SymmetricPositiveDefinite(spec.n)
        problem = logdet_problem(c)
        x0 = manifold.rand_point(rng)
    else:  # pragma: no cover - guarded by parse_spec
        raise ConfigError(f"unknown problem {spec.problem!r}")
    return manifold, problem, x0


# -- ambient validation ---------------------------------------------------------

def _ambient_shift(spec: ProblemSpec, x, omega, h: float):
    """Off-manifold perturbation x + h * omega in ambient coordinates."""
    if spec.problem == "weighted_pca_psd":
        return (x.y + h * omega[0], x.p + h * omega[1])
    if spec.problem == "spd_logdet":
        return x.p + h * omega
    return x + h * omega


def validate_problem(spec: ProblemSpec) -> List[Dict[str, Any]]:
    """Ambient finite-difference checks of the configured problem data.

    Verifies the gradient against cost differences (rel 1e-6), the
    Hessian-vector product against gradient differences (rel 1e-5), and,
    for quotient costs, invariance under the group action (rel 1e-9).
    """
    manifold, problem, x0 = build_instance(spec)
    rng = np.random.default_rng(spec.seed + 104729)
    omega = manifold.rand_ambient(rng, x0)
    omega = omega / manifold.ambient_norm(omega)
    h = 1e-6

    fd_cost = (
        problem.cost(_ambient_shift(spec, x0, omega, h))
        - problem.cost(_ambient_shift(spec, x0, omega, -h))
    ) / (2 * h)
    pairing = vec_inner(problem.egrad(x0), omega)
    rows = [
        {
            "check": "gradient_fd",
            "residual": abs(fd_cost - pairing) / max(1.0, abs(fd_cost)),
            "tolerance": 1e-6,
        }
    ]

    fd_grad = (
        problem.egrad(_ambient_shift(spec, x0, omega, h))
        - problem.egrad(_ambient_shift(spec, x0, omega, -h))
    ) * (0.5 / h)
    hess = problem.ehess(x0, omega)
    scale = max(1.0, vec_norm(hess))
    rows.append(
        {
            "check": "hessian_fd",
            "residual": vec_norm(fd_grad - hess) / scale,
            "tolerance": 1e-5,
        }
    )

    if spec.problem == "flag_quadratic":
        u = manifold.rand_group_element(rng)
        drift = abs(problem.cost(x0 @ u) - problem.cost(x0))
        rows.append(
            {
                "check": "group_invariance",
                "residual": drift / max(1.0, abs(problem.cost(x0))),
                "tolerance": 1e-9,
            }
        )
    elif spec.problem == "weighted_pca_psd":
        q, _ = np.linalg.qr(rng.standard_normal((spec.p, spec.p)))
        moved = (x0.y @ q, q.T @ x0.p @ q)
        drift = abs(problem.cost(moved) - problem.cost(x0))
        rows.append(
            {
                "check": "group_invariance",
                "residual": drift / max(1.0, abs(problem.cost(x0))),
                "tolerance": 1e-9,
            }
        )
    for row in rows:
        row["passed"] = bool(row["residual"] <= row["tolerance"])
    return rows


# -- run logs -----------------------------------------------------------------

@dataclass
class RunLog:
    spec: Dict[str, Any]
    records: List[IterationRecord]
    final_cost: float
    final_grad_norm: float
    converged: bool
    total_ms: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec,
            "records": [asdict(r) for r in self.records],
            "final_cost": self.final_cost,
            "final_grad_norm": self.final_grad_norm,
            "converged": self.converged,
            "total_ms": self.total_ms,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunLog":
        return cls(
            spec=data["spec"],
            records=[IterationRecord(**r) for r in data["records"]],
            final_cost=data["final_cost"],
            final_grad_norm=data["final_grad_norm"],
            converged=data["converged"],
            total_ms=data["total_ms"],
        )


def write_trace_csv(path, records: Sequence[IterationRecord]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.iteration,
                    repr(r.cost),
                    repr(r.grad_norm),
                    repr(r.radius_or_step),
                    r.inner_iterations,
                    repr(r.rho),
                    repr(r.ms),
                ]
            )


def _beta_segments(spec: ProblemSpec) -> List[Tuple[int, Optional[int], float]]:
    """(start, end_or_None, beta) segments; a static beta is one open segment."""
    if not spec.beta_schedule:
        return [(0, None, spec.beta if spec.beta is not None else 1.0)]
    out: List[Tuple[int, Optional[int], float]] = []
    sched = list(spec.beta_schedule)
    for i, (start, val) in enumerate(sched):
        end = sched[i + 1][0] if i + 1 < len(sched) else None
        out.append((start, end, val))
    return out


def solve_spec(spec: ProblemSpec) -> Tuple[SolveResult, List[IterationRecord]]:
    """Run the configured solver, stepping the metric through a beta schedule."""
    solver = trust_region if spec.solver == "trust_region" else steepest_descent
    cap = spec.solver_config.max_outer_iterations

    if spec.problem != "weighted_pca_psd" or not spec.beta_schedule:
        manifold, problem, x0 = build_instance(spec)
        result = solver(manifold, problem, x0, spec.solver_config)
        return result, result.records

    records: List[IterationRecord] = []
    x = None
    result = None
    done = 0
    for start, end, beta in _beta_segments(spec):
        if done >= cap:
            break
        budget = cap - done if end is None else min(end - start, cap - done)
        manifold, problem, x0 = build_instance(spec, beta=beta)
        if x is None:
            x = x0
        cfg = replace(spec.solver_config, max_outer_iterations=budget)
        result = solver(manifold, problem, x, cfg)
        x = result.point
        for r in result.records:
            records.append(replace(r, iteration=done + r.iteration))
        done += len(result.records)
        if result.converged and end is None:
            break
    assert result is not None
    result.records = records
    return result, records


def run_experiment(
    config: Dict[str, Any],
    out_dir: Optional[str] = None,
    name: str = "run",
) -> RunLog:
    """Solve one configured experiment and persist its logs.

    Writes ``<name>.json`` (the RunLog) and ``<name>.csv`` (the iteration
    trace) under ``out_dir`` when given.  Validation errors surface
    before any file is created.
    """
    spec = parse_spec(config)
    tic = time.perf_counter()
    result, records = solve_spec(spec)
    total_ms = (time.perf_counter() - tic) * 1e3
    log = RunLog(
        spec=spec.to_config(),
        records=records,
        final_cost=result.final_cost,
        final_grad_norm=result.final_grad_norm,
        converged=result.converged,
        total_ms=total_ms,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{name}.json"), "w") as fh:
            json.dump(log.to_dict(), fh, indent=2)
        write_trace_csv(os.path.join(out_dir, f"{name}.csv"), records)
    return log


def sweep(config: Dict[str, Any], out_dir: Optional[str] = None):
    """Run a grid of experiments over one metric parameter.

    The config carries ``sweep: {"param": ..., "values": [...]}``; each
    grid point becomes one run log.  Failures are recorded in the summary
    and the sweep continues.  Returns (logs, summary_rows).
    """
    if "sweep" not in config:
        raise ConfigError("sweep config needs a 'sweep' section")
    sweep_cfg = config["sweep"]
    unknown = set(sweep_cfg) - {"param", "values"}
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    param = sweep_cfg.get("param")
    if param not in _SWEEP_PARAMS:
        raise ConfigError(f"sweep param must be one of {sorted(_SWEEP_PARAMS)}")
    values = list(sweep_cfg.get("values", ()))

    base = {k: v for k, v in config.items() if k != "sweep"}
    logs: List[Optional[RunLog]] = []
    rows: List[Dict[str, Any]] = []
    for i, value in enumerate(values):
        point_cfg = dict(base)
        point_cfg[param] = value
        name = f"run_{i:03d}_{param}={value:g}"
        try:
            log = run_experiment(point_cfg, out_dir=out_dir, name=name)
            logs.append(log)
            rows.append(
                {
                    "param": value,
                    "total_iterations": len(log.records),
                    "final_gradnorm": log.final_grad_norm,
                    "error": "",
                }
            )
        except Exception as exc:  # record and continue
            logs.append(None)
            rows.append(
                {
                    "param": value,
                    "total_iterations": "",
                    "final_gradnorm": "",
                    "error": f"{type(exc).__name__}: {exc}",
                }
            )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(
            os.path.join(out_dir, "sweep_summary.csv"), "w", newline=""
        ) as fh:
            writer = csv.writer(fh)
            writer.writerow(["param", "total_iterations", "final_gradnorm", "error"])
            for row in rows:
                writer.writerow(
                    [
                        repr(float(row["param"])),
                        row["total_iterations"],
                        repr(row["final_gradnorm"])
                        if row["final_gradnorm"] != ""
                        else "",
                        row["error"],
                    ]
                )
    return logs, rows
