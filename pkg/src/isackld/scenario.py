"""Physical link scenario: parameters, steering vectors, channels, target response.

All angles are degrees at the interface (converted to radians internally),
powers are dBm/dB, distances are meters. Channel and target generation are
pure functions of (params, rng): the same seed reproduces the same draw.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, fields, asdict

import numpy as np


def db_to_linear(x_db: float) -> float:
    """Convert a dB ratio to a linear ratio: 10^(x/10)."""
    return 10.0 ** (x_db / 10.0)


def dbm_to_watts(x_dbm: float) -> float:
    """Convert a dBm power level to watts."""
    return 10.0 ** (x_dbm / 10.0) / 1000.0


def steering(theta_deg: float, m: int, delta: float = 0.5) -> np.ndarray:
    """Uniform-linear-array steering vector toward angle ``theta_deg``.

    Element k (0-based) is exp(j*2*pi*k*delta*sin(theta)); the squared norm
    is exactly ``m`` since every entry has unit modulus.
    """
    if m < 1:
        raise ValueError("array size must be >= 1")
    k = np.arange(m)
    return np.exp(2j * np.pi * k * delta * np.sin(np.deg2rad(theta_deg)))


def derive_rng(master_seed: int, component: str, index: int = 0) -> np.random.Generator:
    """Derive an independent random stream from (master seed, component, index).

    Component names are hashed with crc32 so sub-streams are stable across
    runs and platforms and never shared between tasks.
    """
    tag = zlib.crc32(component.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence((master_seed, tag, index)))


@dataclass
class ScenarioParams:
    """All physical parameters of the sensing + communication link.

    Defaults reproduce the reference numerical setup: 30 dBm transmit power,
    -30 dB pathloss at 1 m, -80 dBm user noise, -100 dBm receiver noise,
    800 m user distance, 1000 m target distance, 4 NLoS paths, 10 scatterers,
    target at broadside.
    """

    tx_power_dbm: float = 30.0
    pathloss_ref_db: float = -30.0
    noise_comm_dbm: float = -80.0
    noise_radar_dbm: float = -100.0
    dist_comm_m: float = 800.0
    dist_target_m: float = 1000.0
    angle_comm_deg: float = 10.0
    angle_target_deg: float = 0.0
    num_antennas: int = 16
    antenna_spacing: float = 0.5
    num_nlos: int = 4
    num_scatterers: int = 10
    nlos_gain_var: float = 0.1
    scatterer_spread_deg: float = 5.0
    mod_order: int = 16
    seed: int = 0

    def __post_init__(self):
        for name in ("tx_power_dbm", "pathloss_ref_db", "noise_comm_dbm", "noise_radar_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.dist_comm_m <= 0 or self.dist_target_m <= 0:
            raise ValueError("distances must be positive")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.mod_order < 2:
            raise ValueError("mod_order must be >= 2")
        if self.antenna_spacing <= 0:
            raise ValueError("antenna_spacing must be positive")
        if self.num_nlos < 0:
            raise ValueError("num_nlos must be >= 0")
        if self.num_scatterers < 1:
            raise ValueError("num_scatterers must be >= 1")

    # -- linear-unit views -------------------------------------------------

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def pathloss_ref(self) -> float:
        return db_to_linear(self.pathloss_ref_db)

    @property
    def noise_comm_w(self) -> float:
        return dbm_to_watts(self.noise_comm_dbm)

    @property
    def noise_radar_w(self) -> float:
        return dbm_to_watts(self.noise_radar_dbm)

    @property
    def comm_rx_power(self) -> float:
        """One-way received power factor rho0 * d_c^-2 * P_t."""
        return self.pathloss_ref * self.dist_comm_m ** -2 * self.tx_power_w

    @property
    def radar_rx_power(self) -> float:
        """Two-way received power factor rho0 * d_t^-4 * P_t."""
        return self.pathloss_ref * self.dist_target_m ** -4 * self.tx_power_w

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown ScenarioParams fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioParams":
        return cls.from_dict(json.loads(text))


@dataclass
class CommChannel:
    """Composite downlink channel: LoS steering plus NLoS scattered paths."""

    h: np.ndarray
    los: np.ndarray
    nlos_gains: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    nlos_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class TargetResponse:
    """Extended-target response matrix built from per-scatterer steering products."""

    a_matrix: np.ndarray
    scatterer_angles: np.ndarray

    @property
    def gram(self) -> np.ndarray:
        """A^H A, the Hermitian PSD quadratic form the sensing metrics use."""
        return self.a_matrix.conj().T @ self.a_matrix


def gen_comm_channel(params: ScenarioParams, rng: np.random.Generator) -> CommChannel:
    """Draw a communication channel: LoS steering plus circular-Gaussian NLoS paths.

    NLoS gains are i.i.d. CN(0, nlos_gain_var) and NLoS departure angles are
    uniform over (-90, 90) degrees. With num_nlos = 0 the channel is exactly
    the LoS steering vector.
    """
    m, delta = params.num_antennas, params.antenna_spacing
    los = steering(params.angle_comm_deg, m, delta)
    p = params.num_nlos
    scale = np.sqrt(params.nlos_gain_var / 2.0)
    gains = scale * (rng.standard_normal(p) + 1j * rng.standard_normal(p))
    angles = rng.uniform(-90.0, 90.0, size=p)
    h = los.copy()
    for g, th in zip(gains, angles):
        h += g * steering(th, m, delta)
    return CommChannel(h=h, los=los, nlos_gains=gains, nlos_angles=angles)


def gen_target_response(params: ScenarioParams, rng: np.random.Generator) -> TargetResponse:
    """Draw an extended-target response A = sum_j conj(a(theta_j)) a(theta_j)^H.

    Scatterer angles are uniform within +/- scatterer_spread_deg of the
    nominal target angle.
    """
    m, delta = params.num_antennas, params.antenna_spacing
    lo = params.angle_target_deg - params.scatterer_spread_deg
    hi = params.angle_target_deg + params.scatterer_spread_deg
    angles = rng.uniform(lo, hi, size=params.num_scatterers)
    a_matrix = np.zeros((m, m), dtype=complex)
    for th in angles:
        a = steering(th, m, delta)
        a_matrix += np.outer(a.conj(), a.conj())
    return TargetResponse(a_matrix=a_matrix, scatterer_angles=angles)
