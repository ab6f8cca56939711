"""Classical Fisher information, the weighted-trace objective, and SLD quantities."""

from __future__ import annotations

import numpy as np

from .errors import NoSldError, SingularCfimError, SingularProbabilityError
from .measurement import Povm
from .model import StateModel

PROB_FLOOR = 1e-14
INFO_FLOOR = 1e-12
COND_LIMIT = 1e12


def outcome_traces(model: StateModel, p: Povm):
    """Outcome probabilities p_k = Tr rho Pi_k and derivative traces d_{i,k} = Tr drho_i Pi_k."""
    probs = np.einsum("kab,ba->k", p.elements, model.rho).real
    dtr = np.einsum("iab,kba->ik", model.drho, p.elements).real
    return probs, dtr


def cfim(model: StateModel, p: Povm) -> np.ndarray:
    """Classical Fisher information matrix J_{ij} = sum_k d_{i,k} d_{j,k} / p_k.

    Outcomes with vanishing probability contribute zero when they also carry
    no information (the 0/0 limit); a vanishing-probability outcome with a
    nonzero derivative trace is an error.
    """
    if model.dim != p.dim:
        raise ValueError(f"model dim {model.dim} != POVM dim {p.dim}")
    probs, dtr = outcome_traces(model, p)
    small = probs < PROB_FLOOR
    if small.any():
        informative = small & (np.abs(dtr).max(axis=0) >= INFO_FLOOR)
        if informative.any():
            k = int(np.flatnonzero(informative)[0])
            raise SingularProbabilityError(
                f"outcome {k} has probability {probs[k]:.3e} but derivative trace "
                f"{np.abs(dtr[:, k]).max():.3e}"
            )
        probs = probs[~small]
        dtr = dtr[:, ~small]
    j = (dtr / probs) @ dtr.T
    return 0.5 * (j + j.T)


def _checked_inverse(j: np.ndarray, what: str) -> np.ndarray:
    eigs = np.linalg.eigvalsh(j)
    if eigs.min() <= 0 or eigs.max() / eigs.min() > COND_LIMIT:
        raise SingularCfimError(f"{what} is singular or ill-conditioned: eigenvalues {eigs}", eigenvalues=eigs)
    return np.linalg.inv(j)


def objective(model: StateModel, p: Povm, w: np.ndarray | None = None) -> float:
    """Weighted trace of the inverse CFIM, Tr(W J(Pi)^-1), via a linear solve."""
    j = cfim(model, p)
    if w is None:
        w = np.eye(model.n_params)
    eigs = np.linalg.eigvalsh(j)
    if eigs.min() <= 0 or eigs.max() / max(eigs.min(), np.finfo(float).tiny) > COND_LIMIT:
        raise SingularCfimError(f"CFIM is singular or ill-conditioned: eigenvalues {eigs}", eigenvalues=eigs)
    return float(np.trace(np.linalg.solve(j, w)).real)


def sld(model: StateModel) -> np.ndarray:
    """SLD operators L_i solving drho_i = (rho L_i + L_i rho) / 2.

    Solved in the eigenbasis of rho: (L_i)_{ab} = 2 (drho_i)_{ab} / (lam_a + lam_b)
    on the support. Off-support components with a vanishing denominator are set
    to zero when the numerator vanishes too, and raise otherwise.
    """
    lam, v = np.linalg.eigh(model.rho)
    denom = lam[:, None] + lam[None, :]
    ls = np.empty_like(model.drho)
    for i, dr in enumerate(model.drho):
        num = v.conj().T @ dr @ v
        dead = denom < 1e-12
        if dead.any() and np.abs(num[dead]).max() >= 1e-12:
            raise NoSldError(
                f"derivative {i} leaves the state support "
                f"(numerator {np.abs(num[dead]).max():.3e} on a null direction)"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            coeff = np.where(dead, 0.0, 2.0 * num / np.where(dead, 1.0, denom))
        li = v @ coeff @ v.conj().T
        ls[i] = 0.5 * (li + li.conj().T)
    return ls


def sld_qfi(model: StateModel) -> np.ndarray:
    """SLD quantum Fisher information [J_S]_{ij} = Tr[rho (L_i L_j + L_j L_i)] / 2."""
    ls = sld(model)
    prod = np.einsum("ab,ibc,jca->ij", model.rho, ls, ls)
    j = (prod + prod.T).real / 2.0
    return 0.5 * (j + j.T)


def locally_unbiased_estimator(model: StateModel, p: Povm) -> np.ndarray:
    """Per-outcome estimates theta_hat_i(k) = theta_i + sum_j (J^-1)_{ij} d_{j,k} / p_k.

    The returned (K, n) table is locally unbiased: the probability-weighted
    mean equals theta and the derivative matrix is the identity.
    """
    j = cfim(model, p)
    jinv = _checked_inverse(j, "CFIM")
    probs, dtr = outcome_traces(model, p)
    if (probs < PROB_FLOOR).any():
        raise SingularProbabilityError("estimator undefined on zero-probability outcomes")
    return model.theta[None, :] + (jinv @ (dtr / probs)).T
