"""POVMs, Kraus factorizations, and the ensemble maintenance used by the optimizer."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEnsembleError, EmptyPovmError, NotPsdError


@dataclass(frozen=True)
class Povm:
    """K measurement elements, stored as a (K, d, d) complex array."""

    elements: np.ndarray

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]


@dataclass(frozen=True)
class KrausEnsemble:
    """Kraus factors A_k with A_k^dag A_k = Pi_k, stored as (K, d, d)."""

    factors: np.ndarray

    @property
    def n_outcomes(self) -> int:
        return self.factors.shape[0]

    @property
    def dim(self) -> int:
        return self.factors.shape[1]


def povm_from_kraus(ke: KrausEnsemble) -> Povm:
    """Pi_k = A_k^dag A_k, symmetrized to exact Hermitian."""
    pi = np.einsum("kba,kbc->kac", ke.factors.conj(), ke.factors)
    pi = 0.5 * (pi + pi.conj().transpose(0, 2, 1))
    return Povm(pi)


def kraus_from_povm(p: Povm) -> KrausEnsemble:
    """Canonical Hermitian square-root factors A_k = Pi_k^(1/2)."""
    factors = np.empty_like(p.elements)
    for k, pi in enumerate(p.elements):
        w, v = np.linalg.eigh(pi)
        if w.min() < -1e-8:
            raise NotPsdError(f"element {k} has eigenvalue {w.min():.3e} < -1e-8")
        w = np.clip(w, 0.0, None)
        factors[k] = (v * np.sqrt(w)) @ v.conj().T
    return KrausEnsemble(factors)


def random_kraus_init(d: int, K: int, seed: int) -> KrausEnsemble:
    """Ginibre factors (i.i.d. standard complex Gaussian entries), renormalized."""
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((K, d, d)) + 1j * rng.standard_normal((K, d, d))) / np.sqrt(2.0)
    return renormalize(KrausEnsemble(a))


def _inv_sqrt(g: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    if w.min() <= floor:
        raise DegenerateEnsembleError(f"ensemble sum has eigenvalue {w.min():.3e} <= {floor:g}")
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def renormalize(ke: KrausEnsemble) -> KrausEnsemble:
    """Restore completeness: A_k -> A_k G^(-1/2) with G = sum_k A_k^dag A_k."""
    g = np.einsum("kba,kbc->ac", ke.factors.conj(), ke.factors)
    return KrausEnsemble(ke.factors @ _inv_sqrt(g))


def prune(p: Povm, tau: float) -> Povm:
    """Drop elements with Tr Pi_k < tau and renormalize the remainder.

    Completeness is restored by conjugating with G^(-1/2), G being the sum of
    the surviving elements.
    """
    traces = np.einsum("kaa->k", p.elements).real
    keep = p.elements[traces >= tau]
    if keep.shape[0] == 0:
        raise EmptyPovmError(f"all {p.n_outcomes} elements fall below tau = {tau:g}")
    if keep.shape[0] == p.n_outcomes:
        return p
    g = keep.sum(axis=0)
    gm = _inv_sqrt(g)
    out = np.einsum("ab,kbc,cd->kad", gm, keep, gm)
    out = 0.5 * (out + out.conj().transpose(0, 2, 1))
    return Povm(out)


def povm_to_json(p: Povm) -> str:
    """Lossless JSON serialization: elements as nested [re, im] pairs."""
    elements = [
        [[[float(z.real), float(z.imag)] for z in row] for row in el]
        for el in p.elements
    ]
    return json.dumps({"dim": p.dim, "K": p.n_outcomes, "elements": elements})


def povm_from_json(text: str) -> Povm:
    obj = json.loads(text) if isinstance(text, str) else text
    elements = np.array(
        [[[complex(re, im) for re, im in row] for row in el] for el in obj["elements"]]
    )
    if elements.shape != (obj["K"], obj["dim"], obj["dim"]):
        raise ValueError(f"element array shape {elements.shape} disagrees with header")
    return Povm(elements)
