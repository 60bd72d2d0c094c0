"""Kullback-Leibler divergence metrics for the joint sensing/communication link.

Demodulation-side KLD is reported in bits (base-2), detection-side KLD in
nats (natural log), matching the conventions the two communities use. The
weighted combination accepts a units flag to put both on a common base
before mixing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import CommChannel, ScenarioParams, TargetResponse

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class KldValue:
    """A (demodulation, detection) KLD pair, in bits and nats respectively."""

    comm_bits: float
    radar_nats: float

    def __post_init__(self):
        if self.comm_bits < 0 or self.radar_nats < 0:
            raise ValueError("KLD components must be nonnegative")

_UNIT_NORM_TOL = 1e-9


def _check_unit_norm(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if abs(np.linalg.norm(w) - 1.0) > _UNIT_NORM_TOL:
        raise ValueError("beamforming vector must have unit norm")
    return w


def _min_pair_sq_distance(points: np.ndarray) -> float:
    """Minimum squared distance over unordered symbol pairs."""
    if points.size < 2:
        raise ValueError("degenerate constellation: need at least 2 symbols")
    diff = points[:, None] - points[None, :]
    d2 = np.abs(diff) ** 2
    np.fill_diagonal(d2, np.inf)
    return float(d2.min())


def kld_comm(points, channel: CommChannel, w: np.ndarray, params: ScenarioParams,
             los_only: bool = False) -> float:
    """Demodulation KLD in bits for a constellation through a beamformed channel.

    The received mean for symbol c_m is sqrt(rho0 d_c^-2 P_t) * (h^H w) * c_m
    viewed as a real 2-vector; the KLD of the closest symbol pair is
    min ||mu_m - mu_n||^2 / (2 sigma_c^2 ln 2). The transmit power enters
    exactly once. With ``los_only`` the LoS steering vector replaces the
    composite channel.
    """
    w = _check_unit_norm(w)
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    h = channel.los if los_only else channel.h
    gain = h.conj() @ w
    mu = np.sqrt(params.comm_rx_power) * gain * pts
    return float(_min_pair_sq_distance(mu) / (2.0 * params.noise_comm_w * LN2))


def kld_comm_scalar(points, params: ScenarioParams) -> float:
    """Single-antenna demodulation KLD in bits.

    min over pairs of (rho0 d_c^-2 P_t / (2 sigma_c^2 ln 2)) |c_m - c_n|^2.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    factor = params.comm_rx_power / (2.0 * params.noise_comm_w * LN2)
    return float(factor * _min_pair_sq_distance(pts))


def kld_radar_full(target: TargetResponse, w: np.ndarray, es: float,
                   params: ScenarioParams) -> float:
    """Detection KLD in nats, full matrix form.

    Builds the echo covariance Sigma_s = rho0 d_t^-4 P_t * es * A w w^H A^H
    against noise Sigma_n = sigma_r^2 I and evaluates
    ln det(I + X) + Tr((I + X)^-1 - I) with X = Sigma_n^-1/2 Sigma_s Sigma_n^-1/2.
    """
    w = _check_unit_norm(w)
    if es < 0:
        raise ValueError("symbol energy must be nonnegative")
    m = params.num_antennas
    aw = target.a_matrix @ w
    sigma_s = params.radar_rx_power * es * np.outer(aw, aw.conj())
    x = sigma_s / params.noise_radar_w
    eye = np.eye(m)
    sign, logdet = np.linalg.slogdet(eye + x)
    trace_term = np.trace(np.linalg.inv(eye + x)).real - m
    return float(sign.real * logdet + trace_term)


def kld_radar_woodbury(target: TargetResponse, w: np.ndarray, es: float,
                       params: ScenarioParams) -> float:
    """Detection KLD in nats via the rank-one (matrix-inversion-lemma) reduction.

    Equals ln(1 + v) + 1/(1 + v) - 1 with v = beta * w^H A^H A w and
    beta = es * rho0 d_t^-4 P_t / sigma_r^2; the constant is kept so that
    es = 0 gives exactly 0.
    """
    w = _check_unit_norm(w)
    if es < 0:
        raise ValueError("symbol energy must be nonnegative")
    beta = es * params.radar_rx_power / params.noise_radar_w
    v = beta * float((w.conj() @ target.gram @ w).real)
    return float(np.log1p(v) + 1.0 / (1.0 + v) - 1.0)


def kld_radar_scalar(es: float, params: ScenarioParams) -> float:
    """Detection KLD in nats under the single-antenna reduction.

    lambda0 = sigma_r^2, lambda1 = rho0 d_t^-4 P_t * es + sigma_r^2;
    returns ln(lambda1/lambda0) + lambda0/lambda1 - 1.
    """
    if es < 0:
        raise ValueError("symbol energy must be nonnegative")
    lam0 = params.noise_radar_w
    lam1 = params.radar_rx_power * es + lam0
    return float(np.log(lam1 / lam0) + lam0 / lam1 - 1.0)


def kld_unified(kc: float, kr: float, eta: float, units: str | None = None) -> float:
    """Weighted combination (1 - eta) * kc + eta * kr.

    By default kc (bits) and kr (nats) are combined as-is. ``units`` puts
    both on one base first: "bits" rescales kr into bits, "nats" rescales
    kc into nats.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("weighting factor must lie in [0, 1]")
    if units == "bits":
        kr = kr / LN2
    elif units == "nats":
        kc = kc * LN2
    elif units is not None:
        raise ValueError("units must be 'bits', 'nats', or None")
    return (1.0 - eta) * kc + eta * kr


def kld_new(points, eta1: float) -> float:
    """Constellation-design surrogate: distance term vs. average-power term.

    (1 - eta1) * min_{n != m} |c_m - c_n|^2 + (eta1 / Q) * sum_m |c_m|^2.
    """
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("weighting factor must lie in [0, 1]")
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    dist = _min_pair_sq_distance(pts)
    power = float(np.mean(np.abs(pts) ** 2))
    return (1.0 - eta1) * dist + eta1 * power
