"""Steepest descent on Kraus factors for POVM optimization.

Each iteration updates A_k <- A_k (I + alpha (X_k - Lambda)), where X_k is the
gradient term of the weighted-trace objective, Lambda the Lagrange multiplier
of the completeness constraint, and alpha is picked by exhaustive line search
over a fixed candidate grid. Renormalization after every step keeps the
ensemble complete to machine precision.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEnsembleError,
    DegenerateOutcomeError,
    InitFailureError,
    PovmOptError,
    SingularCfimError,
)
from .fisher import COND_LIMIT, INFO_FLOOR, PROB_FLOOR, objective
from .measurement import (
    KrausEnsemble,
    Povm,
    povm_from_kraus,
    prune,
    random_kraus_init,
    renormalize,
)
from .model import StateModel

# Geometric grid of trial step sizes; 0 (no move) is always an implicit candidate.
DEFAULT_ALPHAS = (1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0, 3.0, 10.0, 30.0)
STALL_LIMIT = 5
INIT_ATTEMPTS = 10


@dataclass
class OptConfig:
    """Knobs of a single optimization run."""

    K: int
    max_iters: int = 1000
    eps_stop: float = 1e-10
    alpha_candidates: tuple = DEFAULT_ALPHAS
    restarts: int = 1
    seed: int = 0
    prune_tau: float = 1e-6
    weight: np.ndarray | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.alpha_candidates or min(self.alpha_candidates) <= 0:
            raise ValueError("alpha_candidates must be non-empty and positive")
        if self.eps_stop <= 0:
            raise ValueError("eps_stop must be positive")

    def to_json(self) -> str:
        d = {
            "K": self.K,
            "max_iters": self.max_iters,
            "eps_stop": self.eps_stop,
            "alpha_candidates": list(self.alpha_candidates),
            "restarts": self.restarts,
            "seed": self.seed,
            "prune_tau": self.prune_tau,
            "weight": None if self.weight is None else np.asarray(self.weight).tolist(),
        }
        return json.dumps(d)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else dict(text)
        if obj.get("weight") is not None:
            obj["weight"] = np.asarray(obj["weight"], dtype=float)
        if "alpha_candidates" in obj:
            obj["alpha_candidates"] = tuple(obj["alpha_candidates"])
        return cls(**obj)


@dataclass
class GradientWorkspace:
    """Per-iteration scalars of the gradient: probabilities and contracted traces."""

    p_k: np.ndarray      # (K,) outcome probabilities
    d_ik: np.ndarray     # (n, K) derivative traces
    big_d: np.ndarray    # (n, K) J^-1 W J^-1 contracted traces
    rho_sup: np.ndarray  # (n, d, d) contracted derivative operators
    l_ki: np.ndarray     # (n, K) big_d / p
    active: np.ndarray   # (K,) mask of outcomes kept in the gradient


@dataclass
class OptRun:
    """Trajectory and result of one optimization run."""

    final_povm: Povm
    objective_trace: list
    final_objective: float
    iterations_used: int
    stop_reason: str
    accepted_alphas: list = field(default_factory=list)
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "final_objective": self.final_objective,
                "iterations_used": self.iterations_used,
                "stop_reason": self.stop_reason,
                "objective_trace": [float(x) for x in self.objective_trace],
                "accepted_alphas": [float(a) for a in self.accepted_alphas],
                "seed": self.seed,
            }
        )


def max_useful_k(d: int, n: int) -> int:
    """Caratheodory-type cap on useful outcome counts: d(d+1)/2 + n(n+1)."""
    return d * (d + 1) // 2 + n * (n + 1)


def _workspace(model: StateModel, pi: np.ndarray, w: np.ndarray) -> GradientWorkspace:
    p = np.einsum("kab,ba->k", pi, model.rho).real
    d = np.einsum("iab,kba->ik", model.drho, pi).real
    active = p >= PROB_FLOOR
    dead_info = (~active) & (np.abs(d).max(axis=0) >= INFO_FLOOR)
    if dead_info.any():
        k = int(np.flatnonzero(dead_info)[0])
        raise DegenerateOutcomeError(f"outcome {k} lost probability ({p[k]:.3e}) while informative")
    pa, da = p[active], d[:, active]
    j = (da / pa) @ da.T
    eigs = np.linalg.eigvalsh(j)
    if eigs.min() <= 0 or eigs.max() / max(eigs.min(), np.finfo(float).tiny) > COND_LIMIT:
        raise SingularCfimError(f"CFIM singular during gradient: eigenvalues {eigs}", eigenvalues=eigs)
    jinv = np.linalg.inv(j)
    g = jinv @ w @ jinv
    big_d = np.zeros_like(d)
    big_d[:, active] = g @ da
    rho_sup = np.einsum("ji,jab->iab", g, model.drho)
    l = np.zeros_like(d)
    l[:, active] = big_d[:, active] / pa
    return GradientWorkspace(p, d, big_d, rho_sup, l, active)


def gradient_terms(model: StateModel, ke: KrausEnsemble, w: np.ndarray | None = None) -> np.ndarray:
    """Gradient matrices X_k = sum_i (2 rho^i l_k^i - rho (l_k^i)^2).

    rho^i and l_k^i carry the J^-1 W J^-1 contraction, which reduces to the
    plain double J^-1 contraction at W = I. Frozen (zero-probability,
    zero-information) outcomes get X_k = 0.
    """
    if w is None:
        w = np.eye(model.n_params)
    pi = povm_from_kraus(ke).elements
    ws = _workspace(model, pi, w)
    quad = np.einsum("ik,ik->k", ws.d_ik, ws.big_d)
    safe_p = np.where(ws.active, ws.p_k, 1.0)
    xs = 2.0 * np.einsum("iab,ik->kab", model.drho, ws.big_d) / safe_p[:, None, None]
    xs -= model.rho[None, :, :] * (quad / safe_p**2)[:, None, None]
    xs[~ws.active] = 0.0
    return 0.5 * (xs + xs.conj().transpose(0, 2, 1))


def lagrange_multiplier(ke: KrausEnsemble, xs: np.ndarray) -> np.ndarray:
    """Lambda = (1/2) sum_k (X_k^dag Pi_k + Pi_k X_k) with Pi_k = A_k^dag A_k."""
    pi = povm_from_kraus(ke).elements
    xdag = xs.conj().transpose(0, 2, 1)
    lam = 0.5 * (np.einsum("kab,kbc->ac", xdag, pi) + np.einsum("kab,kbc->ac", pi, xs))
    return 0.5 * (lam + lam.conj().T)


def step(ke: KrausEnsemble, xs: np.ndarray, lam: np.ndarray, alpha: float) -> KrausEnsemble:
    """Trial update A_k (I + alpha (X_k - Lambda)), renormalized."""
    if alpha == 0.0:
        return ke
    d = ke.dim
    return renormalize(KrausEnsemble(ke.factors @ (np.eye(d) + alpha * (xs - lam))))


def line_search(model, ke, xs, lam, candidates, w=None, f_current=None):
    """Evaluate the objective for each candidate step and return the argmin.

    The no-move candidate alpha = 0 is always included, so the returned
    objective never exceeds the current one. Ties break toward larger alpha.
    """
    if f_current is None:
        f_current = objective(model, povm_from_kraus(ke), w)
    best = (0.0, f_current, ke)
    for a in candidates:
        try:
            trial = step(ke, xs, lam, a)
            f = objective(model, povm_from_kraus(trial), w)
        except (DegenerateEnsembleError, SingularCfimError, DegenerateOutcomeError):
            continue
        if f < best[1] or (f == best[1] and a > best[0]):
            best = (a, f, trial)
    return best


def run(model: StateModel, config: OptConfig) -> OptRun:
    """Full iteration: gradient -> multiplier -> line search -> step, with stopping rules."""
    n = model.n_params
    if config.K < n + 1:
        warnings.warn(
            f"K = {config.K} < n + 1 = {n + 1}: the CFIM cannot reach full rank", stacklevel=2
        )
    w = np.eye(n) if config.weight is None else np.asarray(config.weight, dtype=float)
    ke = None
    for attempt in range(INIT_ATTEMPTS):
        try:
            cand = random_kraus_init(model.dim, config.K, config.seed + 1000003 * attempt)
            f = objective(model, povm_from_kraus(cand), w)
            ke = cand
            break
        except (DegenerateEnsembleError, SingularCfimError) as err:
            last = err
    if ke is None:
        raise InitFailureError(f"initialization failed {INIT_ATTEMPTS} times: {last}")

    trace = [f]
    alphas = []
    stop_reason = "max_iters"
    stall = 0
    iters = 0
    for iters in range(1, config.max_iters + 1):
        xs = gradient_terms(model, ke, w)
        lam = lagrange_multiplier(ke, xs)
        alpha, f_new, ke_new = line_search(
            model, ke, xs, lam, config.alpha_candidates, w, f_current=f
        )
        improvement = f - f_new
        ke, f = ke_new, f_new
        trace.append(f)
        alphas.append(alpha)
        if alpha == 0.0:
            stall += 1
            if stall >= STALL_LIMIT:
                stop_reason = "converged"
                break
            continue
        stall = 0
        if improvement < config.eps_stop:
            stop_reason = "converged"
            break

    final = prune(povm_from_kraus(ke), config.prune_tau)
    return OptRun(
        final_povm=final,
        objective_trace=trace,
        final_objective=f,
        iterations_used=iters,
        stop_reason=stop_reason,
        accepted_alphas=alphas,
        seed=config.seed,
    )


def multi_restart(model: StateModel, config: OptConfig) -> OptRun:
    """Best of `restarts` independent runs with seeds seed, seed + 1, ..."""
    if config.restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    failures = []
    for r in range(config.restarts):
        cfg = OptConfig(
            K=config.K,
            max_iters=config.max_iters,
            eps_stop=config.eps_stop,
            alpha_candidates=config.alpha_candidates,
            restarts=1,
            seed=config.seed + r,
            prune_tau=config.prune_tau,
            weight=config.weight,
        )
        try:
            result = run(model, cfg)
        except PovmOptError as err:
            failures.append(f"seed {cfg.seed}: {err}")
            continue
        if best is None or result.final_objective < best.final_objective:
            best = result
    if best is None:
        raise InitFailureError(f"all {config.restarts} restarts failed: {failures}")
    return best


def find_min_outcomes(model: StateModel, config: OptConfig, rel_tol: float = 1e-5):
    """Smallest K whose best objective matches the overall best within rel_tol.

    Runs multi_restart for decreasing K starting from min(config.K, the
    Caratheodory cap); stops at the first K that degrades the objective (or
    fails outright), which for these convex families certifies K*.
    """
    k_start = min(config.K, max_useful_k(model.dim, model.n_params))
    best_overall = None
    k_star, best_povm = None, None
    for k in range(k_start, model.n_params, -1):
        cfg = OptConfig(
            K=k,
            max_iters=config.max_iters,
            eps_stop=config.eps_stop,
            alpha_candidates=config.alpha_candidates,
            restarts=config.restarts,
            seed=config.seed,
            prune_tau=config.prune_tau,
            weight=config.weight,
        )
        try:
            result = multi_restart(model, cfg)
        except PovmOptError:
            break
        if best_overall is None or result.final_objective < best_overall:
            best_overall = result.final_objective
        if result.final_objective <= best_overall * (1.0 + rel_tol):
            k_star, best_povm = k, result.final_povm
        else:
            break
    if k_star is None:
        raise InitFailureError("no outcome count produced a finite objective")
    return k_star, best_povm
