"""Sensing-, communication-, and Pareto-optimal unit-norm beamformers.

The Pareto problem (maximize the sensing quadratic form subject to a floor
on the communication quadratic form, on the unit sphere) has a rank-one
constraint matrix, so it is solved exactly by bisection on the dual
variable: the optimum lies on the one-parameter family of principal
eigenvectors of D_r + lambda * D_c. A geometric grid over lambda backs the
bisection up if the constraint value is detected to be non-monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, avg_power
from .kld import kld_comm, kld_radar_woodbury
from .records import TradeoffRecord
from .scenario import CommChannel, ScenarioParams, TargetResponse

_EIG_DEGENERACY_RTOL = 1e-9


@dataclass
class Beamformer:
    """A unit-norm transmit weight vector."""

    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex)
        if abs(np.linalg.norm(self.w) - 1.0) > 1e-9:
            raise ValueError("beamformer must have unit norm")


@dataclass
class QuadraticPair:
    """The two Hermitian forms the Pareto trade-off is taken over.

    d_r is the sensing Gram matrix A^H A; d_c is the rank-one communication
    matrix h h^H.
    """

    d_r: np.ndarray
    d_c: np.ndarray

    def __post_init__(self):
        for name in ("d_r", "d_c"):
            m = getattr(self, name)
            if np.linalg.norm(m - m.conj().T) > 1e-10 * max(np.linalg.norm(m), 1.0):
                raise ValueError(f"{name} must be Hermitian")

    @classmethod
    def from_scenario(cls, target: TargetResponse, channel: CommChannel) -> "QuadraticPair":
        return cls(d_r=target.gram, d_c=np.outer(channel.h, channel.h.conj()))


def _canonical_phase(w: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry is real positive."""
    idx = int(np.argmax(np.abs(w)))
    phase = np.angle(w[idx])
    return w * np.exp(-1j * phase)


def _principal_eigvec(matrix: np.ndarray, d_c: np.ndarray | None = None):
    """Unit principal eigenvector; degenerate top eigenspaces are resolved
    toward the direction maximizing the d_c quadratic form."""
    vals, vecs = np.linalg.eigh(matrix)
    top = vals[-1]
    if d_c is not None:
        degenerate = vals >= top - _EIG_DEGENERACY_RTOL * max(abs(top), 1.0)
        if degenerate.sum() > 1:
            basis = vecs[:, degenerate]
            inner = basis.conj().T @ d_c @ basis
            _, mix = np.linalg.eigh(inner)
            vec = basis @ mix[:, -1]
            return _canonical_phase(vec / np.linalg.norm(vec)), top
    vec = vecs[:, -1]
    return _canonical_phase(vec / np.linalg.norm(vec)), top


def _quadform(matrix: np.ndarray, w: np.ndarray) -> float:
    return float((w.conj() @ matrix @ w).real)


def sensing_beamformer(target: TargetResponse) -> Beamformer:
    """Principal eigenvector of A^H A, the detection-optimal direction."""
    gram = target.gram
    if np.linalg.norm(target.a_matrix) == 0.0:
        raise ValueError("target response matrix is zero")
    vec, _ = _principal_eigvec(gram)
    return Beamformer(w=vec)


def comm_beamformer(channel: CommChannel) -> Beamformer:
    """Matched filter h/||h||, the demodulation-optimal direction."""
    norm = np.linalg.norm(channel.h)
    if norm == 0.0:
        raise ValueError("communication channel is zero")
    return Beamformer(w=_canonical_phase(channel.h / norm))


def correlation_coefficient(u: Beamformer, v: Beamformer) -> float:
    """|u^H v|: alignment of the two optimal directions, in [0, 1]."""
    return float(abs(u.w.conj() @ v.w))


@dataclass
class ParetoPoint:
    """Pareto solve output: the beamformer and both achieved quadratic forms."""

    beamformer: Beamformer
    sensing_objective: float
    comm_objective: float


def _grid_fallback(d_r: np.ndarray, d_c: np.ndarray, target_val: float,
                   lam_scale: float) -> np.ndarray:
    """Scan a geometric dual grid and keep the best feasible candidate."""
    lams = np.concatenate(([0.0], np.geomspace(1e-8 * lam_scale, 1e8 * lam_scale, 2000)))
    best_w, best_obj = None, -np.inf
    for lam in lams:
        w, _ = _principal_eigvec(d_r + lam * d_c, d_c)
        if _quadform(d_c, w) >= target_val - 1e-12 * max(target_val, 1.0):
            obj = _quadform(d_r, w)
            if obj > best_obj:
                best_w, best_obj = w, obj
    return best_w


def pareto_beamformer(pair: QuadraticPair, eta2: float) -> ParetoPoint:
    """Maximize the sensing form subject to a fractional floor on the comm form.

    Solves max w^H D_r w s.t. w^H D_c w >= eta2 * lambda_max(D_c), ||w|| = 1
    by KKT dual-eigenvector bisection. eta2 = 0 returns the unconstrained
    sensing optimum, eta2 = 1 the matched filter (the only direction meeting
    a rank-one constraint at its maximum).
    """
    if not 0.0 <= eta2 <= 1.0:
        raise ValueError("constraint fraction must lie in [0, 1]")
    d_r, d_c = pair.d_r, pair.d_c

    vals_c, vecs_c = np.linalg.eigh(d_c)
    lam_max_c = float(vals_c[-1])
    target_val = eta2 * lam_max_c
    w_matched = _canonical_phase(vecs_c[:, -1])

    def finish(w):
        return ParetoPoint(beamformer=Beamformer(w=w),
                           sensing_objective=_quadform(d_r, w),
                           comm_objective=_quadform(d_c, w))

    if eta2 >= 1.0 - 1e-12:
        return finish(w_matched)

    w_r, lam_max_r = _principal_eigvec(d_r, d_c)
    if _quadform(d_c, w_r) >= target_val:
        return finish(w_r)

    lam_scale = max(abs(lam_max_r), 1e-300) / max(lam_max_c, 1e-300)

    # Bracket the dual variable: g(lam) = w(lam)^H D_c w(lam) is
    # non-decreasing (it is the derivative of the convex top eigenvalue),
    # and approaches lambda_max(D_c) > target as lam grows.
    def g_of(lam):
        w, _ = _principal_eigvec(d_r + lam * d_c, d_c)
        return _quadform(d_c, w), w

    lam_lo, g_lo = 0.0, _quadform(d_c, w_r)
    lam_hi = lam_scale
    g_hi, w_hi = g_of(lam_hi)
    doublings = 0
    while g_hi < target_val and doublings < 200:
        lam_lo, g_lo = lam_hi, g_hi
        lam_hi *= 2.0
        g_hi, w_hi = g_of(lam_hi)
        doublings += 1
    if g_hi < target_val:
        return finish(w_matched)

    monotone = True
    for _ in range(200):
        if abs(g_hi - target_val) <= 1e-8 * target_val:
            break
        lam_mid = 0.5 * (lam_lo + lam_hi)
        if lam_mid <= lam_lo or lam_mid >= lam_hi:
            break
        g_mid, w_mid = g_of(lam_mid)
        if g_mid < g_lo - 1e-9 * max(g_lo, 1.0) or g_mid > g_hi + 1e-9 * max(g_hi, 1.0):
            monotone = False
            break
        if g_mid >= target_val:
            lam_hi, g_hi, w_hi = lam_mid, g_mid, w_mid
        else:
            lam_lo, g_lo = lam_mid, g_mid

    if not monotone:
        w = _grid_fallback(d_r, d_c, target_val, lam_scale)
        if w is None:
            w = w_matched
        return finish(w)
    return finish(w_hi)


def pareto_sweep(channel: CommChannel, target: TargetResponse,
                 points: Constellation, params: ScenarioParams,
                 eta2_grid) -> list[TradeoffRecord]:
    """Solve the Pareto problem on a grid and evaluate both KLD metrics.

    Records keep the grid order. The symbol prior is uniform, so the echo
    energy uses the constellation's average power.
    """
    eta2_grid = np.asarray(eta2_grid, dtype=float)
    if eta2_grid.size and np.any(np.diff(eta2_grid) < 0):
        raise ValueError("eta2 grid must be ascending")
    if np.any((eta2_grid < 0) | (eta2_grid > 1)):
        raise ValueError("eta2 grid values must lie in [0, 1]")

    pair = QuadraticPair.from_scenario(target, channel)
    es = avg_power(points)
    corr = correlation_coefficient(comm_beamformer(channel), sensing_beamformer(target))

    records = []
    for eta2 in eta2_grid:
        point = pareto_beamformer(pair, float(eta2))
        w = point.beamformer.w
        records.append(TradeoffRecord(
            eta2=float(eta2),
            kld_c_bits=kld_comm(points, channel, w, params),
            kld_r_nats=kld_radar_woodbury(target, w, es, params),
            sensing_objective=point.sensing_objective,
            comm_objective=point.comm_objective,
            correlation_r=corr,
        ))
    return records
