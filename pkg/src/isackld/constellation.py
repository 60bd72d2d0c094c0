"""Constellations: standard layouts, bit labeling, and the shaping optimizer.

The optimizer maximizes the distance/power surrogate objective directly over
the symbol coordinates. Free parameters are unconstrained complex points
mapped through the amplitude retraction c = tanh(|z|) * z/|z|, which keeps
every symbol inside the unit disk; the nonsmooth minimum over symbol pairs
is smoothed with a temperature-annealed soft-min during the ascent, while
the exact objective picks the winning restart.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .kld import kld_new


@dataclass
class Constellation:
    """Q labeled complex symbols within the unit disk."""

    points: np.ndarray
    labels: np.ndarray
    order: int = 0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.order == 0:
            self.order = self.points.size
        if self.points.size != self.order or self.labels.size != self.order:
            raise ValueError("points/labels length must equal the order")
        if np.any(np.abs(self.points) > 1.0 + 1e-9):
            raise ValueError("symbol amplitudes must not exceed 1")
        if sorted(self.labels.tolist()) != list(range(self.order)):
            raise ValueError("labels must be a permutation of 0..Q-1")

    @property
    def bits_per_symbol(self) -> int:
        if self.order & (self.order - 1):
            raise ValueError("bit mapping requires a power-of-two order")
        return self.order.bit_length() - 1

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "labels": [int(l) for l in self.labels],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Constellation":
        pts = np.array([complex(re, im) for re, im in data["points"]])
        return cls(points=pts, labels=np.asarray(data["labels"]), order=int(data["order"]))

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_json_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Constellation":
        with open(path) as f:
            return cls.from_json_dict(json.load(f))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["m", "re", "im", "label"])
            for m, (p, l) in enumerate(zip(self.points, self.labels)):
                writer.writerow([m, repr(float(p.real)), repr(float(p.imag)), int(l)])


@dataclass
class OptimizerOptions:
    """Hyperparameters for the retracted gradient-ascent shaping optimizer."""

    restarts: int = 8
    max_iters: int = 3000
    step_size: float = 0.05
    softmin_temp_initial: float = 0.2
    softmin_temp_final: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.softmin_temp_initial <= 0 or self.softmin_temp_final <= 0:
            raise ValueError("soft-min temperatures must be positive")
        if self.softmin_temp_final > self.softmin_temp_initial:
            raise ValueError("final temperature must not exceed the initial one")


def min_pair_distance(points) -> float:
    """Minimum squared distance over unordered symbol pairs."""
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    if pts.size < 2:
        raise ValueError("need at least 2 symbols")
    d2 = np.abs(pts[:, None] - pts[None, :]) ** 2
    np.fill_diagonal(d2, np.inf)
    return float(d2.min())


def avg_power(points) -> float:
    """Mean squared amplitude of the symbol set."""
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    return float(np.mean(np.abs(pts) ** 2))


def _gray(n: int) -> int:
    return n ^ (n >> 1)


def make_psk(q: int) -> Constellation:
    """Unit-circle phase-shift keying with Gray labels (when Q is a power of two)."""
    if q < 2:
        raise ValueError("PSK order must be >= 2")
    points = np.exp(2j * np.pi * np.arange(q) / q)
    if q & (q - 1) == 0:
        labels = np.array([_gray(m) for m in range(q)])
    else:
        labels = np.arange(q)
    return Constellation(points=points, labels=labels, order=q)


def make_qam(q: int) -> Constellation:
    """Square QAM scaled so the corner symbols sit on the unit circle.

    Labels are Gray-coded independently per axis.
    """
    n = math.isqrt(q)
    if n * n != q or q < 4 or q & (q - 1):
        raise ValueError("QAM order must be a perfect-square power of two")
    levels = 2.0 * np.arange(n) - (n - 1)
    scale = 1.0 / (np.sqrt(2.0) * (n - 1))
    half_bits = (n - 1).bit_length()
    points, labels = [], []
    for i in range(n):
        for k in range(n):
            points.append((levels[i] + 1j * levels[k]) * scale)
            labels.append((_gray(i) << half_bits) | _gray(k))
    return Constellation(points=np.array(points), labels=np.array(labels), order=q)


def default_apsk_rings(q: int) -> tuple:
    """A reasonable concentric-ring layout for a given order."""
    if q == 16:
        return ((4, 0.41), (12, 1.0))
    if q == 32:
        return ((4, 0.25), (12, 0.6), (16, 1.0))
    inner = max(1, q // 4)
    return ((inner, 0.5), (q - inner, 1.0))


def make_apsk(q: int, rings=None) -> Constellation:
    """Concentric PSK rings; each ring is (size, radius[, phase_offset_deg]).

    Ring sizes must sum to ``q`` and radii must not exceed 1.
    """
    if rings is None:
        rings = default_apsk_rings(q)
    sizes = [r[0] for r in rings]
    if sum(sizes) != q:
        raise ValueError("ring sizes must sum to the constellation order")
    points = []
    for ring in rings:
        size, radius = ring[0], ring[1]
        phase = np.deg2rad(ring[2]) if len(ring) > 2 else 0.0
        if size < 1:
            raise ValueError("ring sizes must be >= 1")
        if not 0 <= radius <= 1.0:
            raise ValueError("ring radii must lie in [0, 1]")
        points.extend(radius * np.exp(1j * (2 * np.pi * np.arange(size) / size + phase)))
    points = np.array(points)
    if q & (q - 1) == 0:
        labels = assign_labels(points)
    else:
        labels = np.arange(q)
    return Constellation(points=points, labels=labels, order=q)


def assign_labels(points) -> np.ndarray:
    """Greedy near-Gray bit labeling driven by geometric nearest neighbors.

    Points are processed in input order; each one takes the unused label with
    the smallest total Hamming distance to the labels of its already-labeled
    nearest neighbors (ties go to the smallest label value), so the result is
    deterministic given the point order.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=complex)
    q = pts.size
    if q < 2 or q & (q - 1):
        raise ValueError("bit labeling requires a power-of-two order")
    bits = q.bit_length() - 1
    k = min(bits, q - 1)
    d2 = np.abs(pts[:, None] - pts[None, :]) ** 2
    np.fill_diagonal(d2, np.inf)
    neighbors = [set(np.argsort(d2[i], kind="stable")[:k].tolist()) for i in range(q)]
    for i in range(q):
        for j in list(neighbors[i]):
            neighbors[j].add(i)

    labels = np.full(q, -1)
    used = set()
    for i in range(q):
        best_label, best_score = -1, None
        for cand in range(q):
            if cand in used:
                continue
            score = sum(bin(cand ^ labels[j]).count("1")
                        for j in neighbors[i] if labels[j] >= 0)
            if best_score is None or score < best_score:
                best_label, best_score = cand, score
        labels[i] = best_label
        used.add(best_label)
    return labels


# -- shaping optimizer -----------------------------------------------------


def _retract(z: np.ndarray):
    """Map unconstrained complex points into the open unit disk.

    Returns the retracted points plus the radial quantities needed for the
    chain rule: u = tanh(r)/r and du/dr, with the r -> 0 limit handled.
    """
    r = np.abs(z)
    small = r < 1e-6
    r_safe = np.where(small, 1.0, r)
    t = np.tanh(r_safe)
    u = np.where(small, 1.0 - r * r / 3.0, t / r_safe)
    sech2 = 1.0 - t * t
    du_over_r = np.where(small, -2.0 / 3.0, (sech2 / r_safe - t / r_safe**2) / r_safe)
    return u * z, u, du_over_r


def _objective_grad(c: np.ndarray, eta1: float, temp: float):
    """Soft objective and its gradient with respect to the retracted points.

    The gradient is represented as a complex array whose real/imaginary parts
    are the partials with respect to the real/imaginary symbol coordinates.
    """
    q = c.size
    diff = c[:, None] - c[None, :]
    d2 = np.abs(diff) ** 2
    np.fill_diagonal(d2, np.inf)
    d2_min = d2.min()
    s = np.exp(-(d2 - d2_min) / temp)
    softmin = d2_min - temp * np.log(s.sum())
    w = s / s.sum()
    grad_dist = 2.0 * ((w + w.T) * diff).sum(axis=1)
    grad = (1.0 - eta1) * grad_dist + eta1 * (2.0 / q) * c
    value = (1.0 - eta1) * softmin + eta1 * np.mean(np.abs(c) ** 2)
    return value, grad


def _adam_ascent(z0: np.ndarray, eta1: float, opts: OptimizerOptions) -> np.ndarray:
    """Run one retracted gradient-ascent trajectory and return final points."""
    z = z0.astype(complex).copy()
    m1 = np.zeros_like(z)
    m2 = np.zeros(z.shape)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    n = opts.max_iters
    decay = (opts.softmin_temp_final / opts.softmin_temp_initial) ** (1.0 / max(n - 1, 1))
    temp = opts.softmin_temp_initial
    for it in range(n):
        c, u, du_over_r = _retract(z)
        _, g_c = _objective_grad(c, eta1, temp)
        radial = (np.conj(z) * g_c).real
        g_z = u * g_c + du_over_r * radial * z
        m1 = beta1 * m1 + (1 - beta1) * g_z
        m2 = beta2 * m2 + (1 - beta2) * (g_z.real**2 + g_z.imag**2)
        m1_hat = m1 / (1 - beta1 ** (it + 1))
        m2_hat = m2 / (1 - beta2 ** (it + 1))
        z = z + opts.step_size * m1_hat / (np.sqrt(m2_hat) + eps)
        temp *= decay
    return _retract(z)[0]


def _canonicalize(points: np.ndarray) -> np.ndarray:
    """Rotate so the highest-power symbol has zero phase (stable golden output)."""
    idx = int(np.argmax(np.abs(points)))
    phase = np.angle(points[idx])
    return points * np.exp(-1j * phase)


def _reference_layouts(q: int):
    """Known-good boundary layouts the retracted ascent cannot reach exactly.

    The tanh retraction covers only the open disk, so layouts whose optimum
    sits exactly on the unit circle (PSK, corner-scaled QAM) are entered
    into the final selection as candidates in their own right.
    """
    layouts = [make_psk(q).points]
    n = math.isqrt(q)
    if n * n == q and q >= 4 and q & (q - 1) == 0:
        layouts.append(make_qam(q).points)
    return layouts


def optimize_constellation(q: int, eta1: float,
                           opts: OptimizerOptions | None = None) -> Constellation:
    """Maximize the distance/power surrogate over Q points in the unit disk.

    Runs independent restarts (each with its own derived random stream),
    scores the final points of each restart plus the reference layouts with
    the exact objective, and returns the best, canonicalized and bit-labeled.
    """
    if q < 2:
        raise ValueError("constellation order must be >= 2")
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("weighting factor must lie in [0, 1]")
    opts = opts if opts is not None else OptimizerOptions()

    best_points, best_score = None, -np.inf
    for restart in range(opts.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=opts.seed,
                                                           spawn_key=(restart,)))
        z0 = 0.7 * (rng.standard_normal(q) + 1j * rng.standard_normal(q))
        pts = _adam_ascent(z0, eta1, opts)
        score = kld_new(pts, eta1)
        if score > best_score:
            best_points, best_score = pts, score

    for layout in _reference_layouts(q):
        score = kld_new(layout, eta1)
        if score > best_score:
            best_points, best_score = layout, score

    pts = _canonicalize(best_points)
    if q & (q - 1) == 0:
        labels = assign_labels(pts)
    else:
        labels = np.arange(q)
    return Constellation(points=pts, labels=labels, order=q)
