"""Lower-bound suite: SLD, D-invariant Holevo, qubit closed-form optimum,
the qubit optimality certificate, and the Nagaoka-Hayashi bound via SDP."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NoCertificateError, NotApplicableError, SingularCfimError
from .fisher import cfim, sld, sld_qfi
from .measurement import Povm
from .model import StateModel

NH_GAP_TOL = 1e-7


@dataclass
class BoundReport:
    """Scalar lower bounds for one model; absent bounds are None."""

    sld_value: float | None = None
    holevo_value: float | None = None
    nh_value: float | None = None
    nh_gap: float | None = None
    diagnostics: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "sld": self.sld_value,
                "holevo": self.holevo_value,
                "nh": self.nh_value,
                "nh_gap": self.nh_gap,
                "diagnostics": self.diagnostics,
            }
        )


def _qfi_inverse(model: StateModel) -> np.ndarray:
    js = sld_qfi(model)
    eigs = np.linalg.eigvalsh(js)
    if eigs.min() <= 1e-14:
        i = int(np.argmin(eigs))
        vec = np.linalg.eigh(js)[1][:, i]
        raise SingularCfimError(f"SLD QFI singular along direction {vec}", eigenvalues=eigs)
    return np.linalg.inv(js)


def sld_bound(model: StateModel, w: np.ndarray | None = None) -> float:
    """SLD Cramer-Rao value Tr(W J_S^-1)."""
    if w is None:
        w = np.eye(model.n_params)
    return float(np.trace(w @ _qfi_inverse(model)).real)


def _mat_sqrt(a: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def _trabs(a: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T))).sum())


def holevo_dinv(model: StateModel, w: np.ndarray | None = None) -> float:
    """Holevo bound in the D-invariant closed form.

    Evaluates Tr(W Re Z) + TrAbs(sqrt(W) Im Z sqrt(W)) at X_i = sum_j (J_S^-1)_{ij} L_j,
    where Z_{jk} = Tr rho X_k X_j. For W = I this is
    Tr J_S^-1 + TrAbs(J_S^-1 Im Z_S J_S^-1) with (Z_S)_{jk} = Tr rho L_k L_j.
    Exact on the D-invariant families handled here (qubit Bloch models and
    their tensor powers).
    """
    n = model.n_params
    if w is None:
        w = np.eye(n)
    try:
        ls = sld(model)
        jinv = _qfi_inverse(model)
    except SingularCfimError as err:
        raise NotApplicableError(f"D-invariant Holevo undefined: {err}") from err
    zs = np.einsum("ab,kbc,jca->jk", model.rho, ls, ls)  # Z_S[j,k] = Tr rho L_k L_j
    z = jinv @ zs @ jinv
    sw = _mat_sqrt(w)
    return float(np.trace(w @ z.real).real + _trabs(1j * (sw @ z.imag @ sw)))


def qubit_optimal_value(model: StateModel, w: np.ndarray | None = None) -> float:
    """Attainable single-qubit optimum (Tr R)^2, R = sqrt(J_S^-1/2 W J_S^-1/2)."""
    if model.dim != 2:
        raise NotApplicableError(f"closed form requires a single qubit, dim = {model.dim}")
    if w is None:
        w = np.eye(model.n_params)
    jinv = _qfi_inverse(model)
    ji_half = _mat_sqrt(jinv)
    r = _mat_sqrt(ji_half @ w @ ji_half)
    return float(np.trace(r).real ** 2)


def optimal_cfim_target(model: StateModel, w: np.ndarray | None = None) -> np.ndarray:
    """The CFIM a qubit-optimal POVM must produce: sqrt(J_S) R sqrt(J_S) / Tr R."""
    if model.dim != 2:
        raise NotApplicableError(f"optimality certificate requires a single qubit, dim = {model.dim}")
    if w is None:
        w = np.eye(model.n_params)
    js = sld_qfi(model)
    jinv = _qfi_inverse(model)
    ji_half = _mat_sqrt(jinv)
    r = _mat_sqrt(ji_half @ w @ ji_half)
    return _mat_sqrt(js) @ r @ _mat_sqrt(js) / np.trace(r).real


def check_optimality(model: StateModel, p: Povm, w: np.ndarray | None = None) -> float:
    """Frobenius residual of the qubit necessary-and-sufficient condition."""
    return float(np.linalg.norm(cfim(model, p) - optimal_cfim_target(model, w)))


def nh_bound(model: StateModel, w: np.ndarray | None = None, gap_tol: float = NH_GAP_TOL):
    """Nagaoka-Hayashi bound via the dense SDP of the block-matrix formulation.

    Minimizes Tr[(W x rho) L] over block-symmetric Hermitian L and Hermitian
    X_j satisfying the locally-unbiased trace constraints, subject to the
    (n+1)d x (n+1)d PSD block constraint. Returns (value, duality gap).
    """
    import cvxpy as cp

    d, n = model.dim, model.n_params
    if (n + 1) * d > 128:
        raise NotApplicableError(f"SDP size (n+1)d = {(n + 1) * d} exceeds 128")
    if w is None:
        w = np.eye(n)
    lblk = {(j, k): cp.Variable((d, d), hermitian=True) for j in range(n) for k in range(j, n)}
    xs = [cp.Variable((d, d), hermitian=True) for _ in range(n)]
    rows = [
        cp.hstack([lblk[(min(j, k), max(j, k))] for k in range(n)] + [xs[j]])
        for j in range(n)
    ]
    rows.append(cp.hstack(list(xs) + [np.eye(d)]))
    big = cp.vstack(rows)
    constraints = [big >> 0]
    for j in range(n):
        constraints.append(cp.trace(model.rho @ xs[j]) == 0)
        for k in range(n):
            constraints.append(cp.trace(model.drho[k] @ xs[j]) == (1.0 if j == k else 0.0))
    cost = cp.real(
        sum(w[j, k] * cp.trace(model.rho @ lblk[(min(j, k), max(j, k))]) for j in range(n) for k in range(n))
    )
    problem = cp.Problem(cp.Minimize(cost), constraints)
    problem.solve(solver="SCS", eps_abs=1e-11, eps_rel=1e-11, max_iters=200_000)
    info = (problem.solver_stats.extra_stats or {}).get("info", {})
    gap = abs(info.get("gap", np.inf))
    value = float(problem.value) if problem.value is not None else np.nan
    if not np.isfinite(value) or gap > gap_tol:
        raise NoCertificateError(
            f"SDP stopped with gap {gap:.3e} > {gap_tol:g} (status {problem.status})",
            value=value,
            gap=gap,
        )
    return value, float(gap)


def bound_report(model: StateModel, w=None, which=("sld", "holevo", "nh")) -> BoundReport:
    """Compute the requested bounds, recording not-applicable ones as absent."""
    report = BoundReport()
    notes = []
    if "sld" in which:
        try:
            report.sld_value = sld_bound(model, w)
        except SingularCfimError as err:
            notes.append(f"sld: {err}")
    if "holevo" in which:
        try:
            report.holevo_value = holevo_dinv(model, w)
        except NotApplicableError as err:
            notes.append(f"holevo: {err}")
    if "nh" in which:
        try:
            report.nh_value, report.nh_gap = nh_bound(model, w)
        except (NotApplicableError, NoCertificateError) as err:
            notes.append(f"nh: {err}")
            if isinstance(err, NoCertificateError):
                report.nh_value, report.nh_gap = err.value, err.gap
    report.diagnostics = "; ".join(notes)
    return report
