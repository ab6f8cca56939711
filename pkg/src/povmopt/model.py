"""Parametric quantum statistical models as explicit matrices at a fixed point.

A model bundles the density matrix rho, its partial derivatives with respect
to the estimated parameters, and the parameter values themselves. Supported
families are single-qubit Bloch models (any subset of the three Bloch
coordinates active) and their i.i.d. tensor powers.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError, ResourceError

SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

DEFAULT_DIM_CAP = 128


def dim_cap() -> int:
    """Dimension guard, overridable through the QEST_DIM_CAP env var."""
    return int(os.environ.get("QEST_DIM_CAP", DEFAULT_DIM_CAP))


@dataclass(frozen=True)
class StateModel:
    """Density matrix and derivatives of an n-parameter model at a fixed point.

    Attributes:
        dim: Hilbert-space dimension d.
        n_params: number n of estimated parameters.
        rho: d x d Hermitian density matrix.
        drho: (n, d, d) array of Hermitian, traceless derivatives.
        theta: values of the n estimated parameters at this point.
        label: free-form tag.
    """

    dim: int
    n_params: int
    rho: np.ndarray
    drho: np.ndarray
    theta: np.ndarray
    label: str = ""


@dataclass
class ValidationReport:
    """Per-invariant deviations of a StateModel; never raises."""

    hermiticity: float
    trace_deviation: float
    min_eigenvalue: float
    drho_hermiticity: float
    drho_trace: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def qubit_bloch_model(theta, active=(1, 2, 3), label="bloch") -> StateModel:
    """Single-qubit Bloch model rho = (I + sum_i theta_i sigma_i) / 2.

    `theta` is the full 3-component Bloch vector (shorter inputs are
    zero-padded). Components listed in `active` are estimated and contribute
    sigma_i / 2 to the derivative list, in index order; the rest are known
    constants baked into rho only.
    """
    th = np.zeros(3)
    th[: len(theta)] = np.asarray(theta, dtype=float)
    if np.linalg.norm(th) > 1.0 + 1e-12:
        raise InvalidStateError(f"Bloch vector norm {np.linalg.norm(th):.6g} exceeds 1")
    active = sorted(set(active))
    if not active:
        raise InvalidStateError("at least one active parameter is required")
    if any(i not in (1, 2, 3) for i in active):
        raise InvalidStateError(f"active indices must be within {{1,2,3}}, got {active}")
    rho = 0.5 * (np.eye(2, dtype=complex) + sum(th[i - 1] * SIGMA[i - 1] for i in range(1, 4)))
    drho = np.stack([0.5 * SIGMA[i - 1] for i in active])
    return StateModel(
        dim=2,
        n_params=len(active),
        rho=rho,
        drho=drho,
        theta=np.array([th[i - 1] for i in active]),
        label=label,
    )


def dephasing_model(epsilon: float) -> StateModel:
    """Dephasing family rho(eps) = diag(eps, 1 - eps); theta_1, theta_2 estimated at 0."""
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidStateError(f"epsilon must lie in [0, 1], got {epsilon}")
    return qubit_bloch_model((0.0, 0.0, 2.0 * epsilon - 1.0), active=(1, 2), label=f"dephasing(eps={epsilon:g})")


def tensor_power(base: StateModel, M: int) -> StateModel:
    """M i.i.d. copies: rho^(x M) with Leibniz-sum derivatives."""
    if M < 1:
        raise InvalidStateError(f"copy count must be >= 1, got {M}")
    if base.dim**M > dim_cap():
        raise ResourceError(f"dim {base.dim}**{M} exceeds cap {dim_cap()} (set QEST_DIM_CAP to raise)")
    if M == 1:
        return base
    rho = base.rho
    for _ in range(M - 1):
        rho = np.kron(rho, base.rho)
    drho = []
    for dr in base.drho:
        total = np.zeros((base.dim**M, base.dim**M), dtype=complex)
        for pos in range(M):
            term = dr if pos == 0 else base.rho
            for q in range(1, M):
                term = np.kron(term, dr if q == pos else base.rho)
            total += term
        drho.append(total)
    return StateModel(
        dim=base.dim**M,
        n_params=base.n_params,
        rho=rho,
        drho=np.stack(drho),
        theta=base.theta.copy(),
        label=f"{base.label}^{M}",
    )


def validate(model: StateModel) -> ValidationReport:
    """Report all invariant violations (Hermiticity, trace, PSD, traceless drho)."""
    herm = float(np.abs(model.rho - model.rho.conj().T).max())
    trdev = float(abs(np.trace(model.rho).real - 1.0) + abs(np.trace(model.rho).imag))
    mineig = float(np.linalg.eigvalsh(0.5 * (model.rho + model.rho.conj().T)).min())
    dherm = float(max(np.abs(dr - dr.conj().T).max() for dr in model.drho))
    dtr = float(max(abs(np.trace(dr)) for dr in model.drho))
    report = ValidationReport(herm, trdev, mineig, dherm, dtr)
    if herm > 1e-12:
        report.violations.append(f"rho not Hermitian (deviation {herm:.3e})")
    if trdev > 1e-12:
        report.violations.append(f"Tr rho != 1 (deviation {trdev:.3e})")
    if mineig < -1e-10:
        report.violations.append(f"rho has negative eigenvalue {mineig:.3e}")
    if dherm > 1e-12:
        report.violations.append(f"drho not Hermitian (deviation {dherm:.3e})")
    if dtr > 1e-12:
        report.violations.append(f"drho not traceless (deviation {dtr:.3e})")
    return report


def model_from_json(spec) -> StateModel:
    """Build a model from {"family", "theta", "active", "copies"} (dict or JSON text)."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    family = spec.get("family", "bloch")
    copies = int(spec.get("copies", 1))
    if family == "bloch":
        base = qubit_bloch_model(spec.get("theta", [0.0, 0.0, 0.0]), tuple(spec.get("active", (1, 2, 3))))
    elif family == "dephasing":
        theta = spec.get("theta", [0.5])
        base = dephasing_model(float(theta[0]) if isinstance(theta, (list, tuple)) else float(theta))
    else:
        raise InvalidStateError(f"unknown model family {family!r}")
    return tensor_power(base, copies)
