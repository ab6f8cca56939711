"""Closed-form optimal POVM families and an optimizer-output classifier.

The families: the trine (qubit, two parameters at the origin), the rotated
regular tetrahedron (qubit, three parameters at the origin), the two-copy
four-outcome measurement with a singlet element, the randomized-PVM
construction, and the algebraic three-outcome solution for an arbitrary
qubit Bloch point.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .bounds import _mat_sqrt, _qfi_inverse
from .errors import (
    InconsistentSolutionError,
    InfeasibleFreeParameterError,
    NotApplicableError,
)
from .fisher import sld, sld_qfi
from .measurement import Povm
from .model import SIGMA, StateModel

TWO_THIRDS_PI = 2.0 * np.pi / 3.0

SINGLET = np.zeros((4, 4), dtype=complex)
SINGLET[1, 1] = SINGLET[2, 2] = 0.5
SINGLET[1, 2] = SINGLET[2, 1] = -0.5


@dataclass(frozen=True)
class ThreeOutcomeSolution:
    """Algebraic three-outcome optimum: weights, angles, and auxiliaries."""

    p: np.ndarray
    phi: np.ndarray
    q: np.ndarray
    r: float
    varphi: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p.tolist(),
                "phi": self.phi.tolist(),
                "q": self.q.tolist(),
                "r": self.r,
                "varphi": self.varphi,
            }
        )


@dataclass(frozen=True)
class Classification:
    """Structure tag fitted to a POVM, with the fit residual."""

    tag: str
    params: dict
    residual: float


def _bloch_element(weight, nx, ny, nz=0.0):
    return weight * (np.eye(2, dtype=complex) + nx * SIGMA[0] + ny * SIGMA[1] + nz * SIGMA[2])


def trine_povm(phi1: float = 0.0) -> Povm:
    """Pi_k = (1/3)[[1, e^{i phi_k}], [e^{-i phi_k}, 1]] at equilateral angles."""
    phis = phi1 + np.array([0.0, TWO_THIRDS_PI, -TWO_THIRDS_PI])
    return Povm(np.stack([_bloch_element(1.0 / 3.0, np.cos(p), np.sin(p)) for p in phis]))


TETRA_VERTICES = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
) / np.sqrt(3.0)


def euler_rotation(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Rotation matrix R(alpha, beta, gamma) used for the tetrahedron family."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    return np.array(
        [
            [cb * cg, sa * sb * cg - ca * sg, ca * sb * cg + sa * sg],
            [cb * sg, sa * sb * sg + ca * cg, ca * sb * sg - sa * cg],
            [-sb, sa * cb, ca * cb],
        ]
    )


def tetrahedron_povm(alpha: float = 0.0, beta: float = 0.0, gamma: float = 0.0) -> Povm:
    """Pi_k = (1/4)(I + (R V_k) . sigma) over the rotated unit tetrahedron."""
    r = euler_rotation(alpha, beta, gamma)
    vecs = TETRA_VERTICES @ r.T
    return Povm(np.stack([_bloch_element(0.25, *v) for v in vecs]))


def two_copy_povm(varphi1: float = 0.0, phi1: float | None = None) -> Povm:
    """Four-outcome two-copy optimum: three rank-one elements plus the singlet.

    |psi_k> = (1/sqrt3, e^{-i varphi_k}/sqrt6, e^{-i varphi_k}/sqrt6,
    e^{-i phi_k}/sqrt3), with {varphi_k} and {phi_k} equilateral triangles
    advancing in opposite senses so that {phi_k - varphi_k} is itself
    equilateral (that is what makes the rank-one elements plus the singlet
    complete). Completeness holds for any phi1, but the measurement is
    optimal only at phi1 = 2 varphi1, which is the default.
    """
    if phi1 is None:
        phi1 = 2.0 * varphi1
    offsets = np.array([0.0, TWO_THIRDS_PI, -TWO_THIRDS_PI])
    elements = []
    for vp, ph in zip(varphi1 + offsets, phi1 - offsets):
        psi = np.array(
            [
                1.0 / np.sqrt(3.0),
                np.exp(-1j * vp) / np.sqrt(6.0),
                np.exp(-1j * vp) / np.sqrt(6.0),
                np.exp(-1j * ph) / np.sqrt(3.0),
            ]
        )
        elements.append(np.outer(psi, psi.conj()))
    elements.append(SINGLET.copy())
    return Povm(np.stack(elements))


def randomized_pvm_povm(model: StateModel, w: np.ndarray | None = None) -> Povm:
    """Randomized-PVM optimum for a single qubit: mix the PVMs of the operators L^i.

    L^i = sum_k (U^-1 sqrt(J_S^-1))_{ik} L_k with R = U diag(lambda) U^-1, mixed
    with weights p_i = lambda_i / sum(lambda). Eigenbases of degenerate R are
    accepted as-is (the construction is not unique there).
    """
    if model.dim != 2:
        raise NotApplicableError(f"randomized PVM construction requires a qubit, dim = {model.dim}")
    n = model.n_params
    if w is None:
        w = np.eye(n)
    ls = sld(model)
    jinv = _qfi_inverse(model)
    ji_half = _mat_sqrt(jinv)
    r = _mat_sqrt(ji_half @ w @ ji_half)
    lam, u = np.linalg.eigh(r)
    weights = lam / lam.sum()
    coeff = np.linalg.inv(u) @ ji_half
    elements = []
    for i in range(n):
        li = np.einsum("k,kab->ab", coeff[i], ls)
        _, vecs = np.linalg.eigh(li)
        for col in range(vecs.shape[1]):
            v = vecs[:, col]
            elements.append(weights[i] * np.outer(v, v.conj()))
    return Povm(np.stack(elements))


def feasible_q1_interval(r: float):
    """Feasible interval of the free parameter q_1, from the discriminant boundary."""
    if not 0.0 <= r < 1.0:
        raise InfeasibleFreeParameterError(f"Bloch radius must satisfy 0 <= r < 1, got {r}")
    s = np.sqrt(1.0 - r * r)
    beta = -r / (1.0 + s)
    big_s = (9.0 - beta**2) / (1.0 - beta**2)
    # Discriminant zero <=> big_s q^2 - (big_s - 3) q + 1 = 0.
    disc = (big_s - 3.0) ** 2 - 4.0 * big_s
    if disc < 0:
        raise InfeasibleFreeParameterError(f"no feasible q1 at r = {r}", interval=None)
    root = np.sqrt(disc)
    lo = ((big_s - 3.0) - root) / (2.0 * big_s)
    hi = ((big_s - 3.0) + root) / (2.0 * big_s)
    return float(lo), float(hi)


def three_outcome_povm(r: float, varphi: float = 0.0, q1: float | None = None):
    """Closed-form three-outcome optimum at Bloch point (r cos varphi, r sin varphi).

    Solves the quadratic for q_2, q_3 given the free parameter q_1 (default:
    the interval midpoint), recovers the angles, assigns the sin signs so that
    the weighted sines cancel (returning the positive-majority choice), and
    shifts all angles by varphi. Returns (ThreeOutcomeSolution, Povm).
    """
    lo, hi = feasible_q1_interval(r)
    if q1 is None:
        q1 = 0.5 * (lo + hi)
    if not (lo - 1e-12 <= q1 <= hi + 1e-12):
        raise InfeasibleFreeParameterError(
            f"q1 = {q1} outside feasible interval [{lo:.12g}, {hi:.12g}]", interval=(lo, hi)
        )
    s = np.sqrt(1.0 - r * r)
    beta = -r / (1.0 + s)
    big_s = (9.0 - beta**2) / (1.0 - beta**2)
    qsum = 1.0 - q1
    qprod = qsum / (big_s - 1.0 / q1)
    disc = max(qsum * qsum - 4.0 * qprod, 0.0)
    root = np.sqrt(disc)
    q = np.array([q1, 0.5 * (qsum + root), 0.5 * (qsum - root)])
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise InconsistentSolutionError(f"auxiliary weights out of (0, 1): {q}")
    p = 0.5 * (1.0 - q)
    cos = (s / q - (2.0 + s)) / (2.0 * r) if r > 0 else np.zeros(3)
    if np.abs(cos).max() > 1.0 + 1e-12:
        raise InconsistentSolutionError(f"|cos phi| = {np.abs(cos).max():.12g} > 1")
    cos = np.clip(cos, -1.0, 1.0)
    sin = np.sqrt(1.0 - cos**2)
    signs = np.ones(3)
    signs[np.argmax(p * sin)] = -1.0  # largest contribution opposes the other two
    sin = sin * signs
    phi = np.arctan2(sin, cos) + varphi
    solution = ThreeOutcomeSolution(p=p, phi=phi, q=q, r=r, varphi=varphi)
    povm = Povm(np.stack([_bloch_element(pk, np.cos(ph), np.sin(ph)) for pk, ph in zip(p, phi)]))
    return solution, povm


# ---------------------------------------------------------------------------
# Classification of optimizer outputs onto the known families.
# ---------------------------------------------------------------------------

RESIDUAL_TAG_LIMIT = 1e-3


def _bloch_coefficients(p: Povm):
    a = np.einsum("kaa->k", p.elements).real / 2.0
    b = np.stack([np.einsum("kab,ba->k", p.elements, sig).real / 2.0 for sig in SIGMA], axis=1)
    return a, b


def _equilateral_fit(angles):
    """Base angle and residual of a 3-angle set against an equilateral triangle."""
    z = np.exp(3j * np.asarray(angles))
    mean = z.mean()
    base = np.angle(mean) / 3.0
    residual = float(np.abs(z - mean).max() + abs(abs(mean) - 1.0))
    return base, residual


def _fit_qubit_three(p: Povm, povm_builder):
    a, b = _bloch_coefficients(p)
    phi = np.arctan2(b[:, 1], b[:, 0])
    rebuilt = np.stack(
        [_bloch_element(ak, np.cos(ph), np.sin(ph)) for ak, ph in zip(a, phi)]
    )
    residual = float(np.abs(rebuilt - p.elements).max())
    return a, phi, residual


def _fit_tetrahedron(p: Povm):
    _, b = _bloch_coefficients(p)
    norms = np.linalg.norm(b, axis=1)
    units = b / norms[:, None]
    best = None
    for perm in itertools.permutations(range(4)):
        m = units[list(perm)].T @ TETRA_VERTICES
        u, _, vt = np.linalg.svd(m)
        rot = u @ vt
        if np.linalg.det(rot) < 0:
            u[:, -1] *= -1.0
            rot = u @ vt
        err = np.linalg.norm(units[list(perm)] - TETRA_VERTICES @ rot.T)
        if best is None or err < best[0]:
            best = (err, rot)
    rot = best[1]
    beta = np.arctan2(-rot[2, 0], np.hypot(rot[2, 1], rot[2, 2]))
    alpha = np.arctan2(rot[2, 1], rot[2, 2])
    gamma = np.arctan2(rot[1, 0], rot[0, 0])
    rebuilt = tetrahedron_povm(alpha, beta, gamma)
    residual = min(
        float(np.abs(rebuilt.elements[list(perm)] - p.elements).max())
        for perm in itertools.permutations(range(4))
    )
    return (alpha, beta, gamma), residual


def _fit_two_copy(p: Povm):
    dist = [float(np.linalg.norm(el - SINGLET)) for el in p.elements]
    singlet_idx = int(np.argmin(dist))
    rest = [p.elements[k] for k in range(4) if k != singlet_idx]
    varphis = [float(np.angle(el[0, 1] * np.sqrt(18.0))) for el in rest]
    phis = [float(np.angle(el[0, 3] * 3.0)) for el in rest]
    vp_base, vp_res = _equilateral_fit(varphis)
    ph_base, ph_res = _equilateral_fit(phis)
    rebuilt = [
        np.outer(psi, psi.conj())
        for psi in (
            np.array(
                [
                    1.0 / np.sqrt(3.0),
                    np.exp(-1j * vp) / np.sqrt(6.0),
                    np.exp(-1j * vp) / np.sqrt(6.0),
                    np.exp(-1j * ph) / np.sqrt(3.0),
                ]
            )
            for vp, ph in zip(varphis, phis)
        )
    ]
    elem_res = max(float(np.abs(r - e).max()) for r, e in zip(rebuilt, rest))
    residual = max(elem_res, dist[singlet_idx], vp_res, ph_res)
    return {
        "singlet_index": singlet_idx,
        "singlet_distance": dist[singlet_idx],
        "varphi": varphis,
        "phi": phis,
        "varphi_base": vp_base,
        "phi_base": ph_base,
    }, residual


def classify_povm(p: Povm, model: StateModel) -> Classification:
    """Map a POVM onto the known optimal families; `unknown` is a valid answer."""
    if model.dim == 2 and p.n_outcomes == 3:
        a, phi, residual = _fit_qubit_three(p, _bloch_element)
        base, eq_res = _equilateral_fit(phi)
        if max(residual, eq_res) < RESIDUAL_TAG_LIMIT and np.abs(a - 1.0 / 3.0).max() < RESIDUAL_TAG_LIMIT:
            return Classification("trine", {"phi1": float(base)}, max(residual, eq_res))
        if residual < RESIDUAL_TAG_LIMIT:
            return Classification(
                "three_outcome",
                {"p": a.tolist(), "phi": phi.tolist()},
                residual,
            )
        return Classification("unknown", {}, residual)
    if model.dim == 2 and p.n_outcomes == 4:
        (alpha, beta, gamma), residual = _fit_tetrahedron(p)
        if residual < RESIDUAL_TAG_LIMIT:
            return Classification(
                "tetrahedron", {"alpha": alpha, "beta": beta, "gamma": gamma}, residual
            )
        return Classification("unknown", {}, residual)
    if model.dim == 4 and p.n_outcomes == 4:
        params, residual = _fit_two_copy(p)
        if residual < RESIDUAL_TAG_LIMIT:
            return Classification("two_copy", params, residual)
        return Classification("unknown", params, residual)
    return Classification("unknown", {}, float("inf"))
