"""Experiment commands: constellation sweeps, Pareto curves, full trade-offs.

Every command derives all randomness from the scenario's master seed (one
sub-stream per component and grid index), writes its tables into the
configured output directory, and echoes the fully resolved config next to
them, so each output directory is self-describing and reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .beamforming import (QuadraticPair, comm_beamformer, correlation_coefficient,
                          pareto_beamformer, pareto_sweep, sensing_beamformer)
from .config import ExperimentConfig
from .constellation import (Constellation, OptimizerOptions, avg_power, make_apsk,
                            make_psk, make_qam, min_pair_distance,
                            optimize_constellation)
from .kld import (kld_comm, kld_new, kld_radar_full, kld_radar_scalar,
                  kld_radar_woodbury)
from .records import TradeoffRecord, write_records
from .scenario import (ScenarioParams, derive_rng, gen_comm_channel,
                       gen_target_response, steering)
from .simulate import np_detection_probability, np_threshold, simulate_ber, \
    simulate_detection_cfar


def _ensure_outdir(config: ExperimentConfig) -> str:
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)
    return outdir


def _fmt_weight(value: float) -> str:
    return format(float(value), "g")


def _make_baseline(name: str, q: int, rings=None) -> Constellation:
    if name == "psk":
        return make_psk(q)
    if name == "qam":
        return make_qam(q)
    if name == "apsk":
        return make_apsk(q, rings)
    raise ValueError(f"unknown baseline {name!r}")


def _resolve_constellations(config: ExperimentConfig):
    """Yield (source_label, eta1, constellation) entries in grid order."""
    src = config.constellation_source
    q = config.scenario.mod_order
    if src.type == "optimized":
        etas = [src.eta1] if src.eta1 is not None else list(config.eta1_grid)
        if not etas:
            raise ValueError("empty grid")
        opts = _opts_with_seed(config)
        return [("optimized", float(e), optimize_constellation(q, float(e), opts))
                for e in etas]
    if src.type == "file":
        return [("file", None, Constellation.load(src.path))]
    rings = [tuple(r) for r in src.rings] if src.rings else None
    return [(src.type, None, _make_baseline(src.type, q, rings))]


def _opts_with_seed(config: ExperimentConfig) -> OptimizerOptions:
    opt = config.optimizer
    return OptimizerOptions(restarts=opt.restarts, max_iters=opt.max_iters,
                            step_size=opt.step_size,
                            softmin_temp_initial=opt.softmin_temp_initial,
                            softmin_temp_final=opt.softmin_temp_final,
                            seed=config.scenario.seed)


def _draw_scene(config: ExperimentConfig):
    params = config.scenario
    channel = gen_comm_channel(params, derive_rng(params.seed, "channel"))
    target = gen_target_response(params, derive_rng(params.seed, "target"))
    return channel, target


def cmd_constellation(config: ExperimentConfig) -> list[str]:
    """Optimize one constellation per eta1 grid point and summarize them."""
    if not config.eta1_grid:
        raise ValueError("empty grid")
    outdir = _ensure_outdir(config)
    q = config.scenario.mod_order
    opts = _opts_with_seed(config)

    paths = []
    rows = []
    for eta1 in config.eta1_grid:
        const = optimize_constellation(q, float(eta1), opts)
        name = f"constellation_q{q}_eta1_{_fmt_weight(eta1)}.json"
        const.save(os.path.join(outdir, name))
        paths.append(os.path.join(outdir, name))
        rows.append((float(eta1), min_pair_distance(const), avg_power(const),
                     kld_new(const, float(eta1))))

    summary = os.path.join(outdir, "constellation_summary.csv")
    with open(summary, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["eta1", "min_distance", "avg_power", "kld_new"])
        for row in rows:
            writer.writerow([repr(v) for v in row])
    paths.append(summary)

    config.echo(os.path.join(outdir, "config_resolved.json"))
    paths.append(os.path.join(outdir, "config_resolved.json"))
    return paths


def cmd_pareto(config: ExperimentConfig) -> list[str]:
    """Sweep the beamforming trade-off and tabulate both KLD metrics."""
    if not config.eta2_grid:
        raise ValueError("empty grid")
    outdir = _ensure_outdir(config)
    params = config.scenario
    channel, target = _draw_scene(config)

    records = []
    for source, eta1, const in _resolve_constellations(config):
        for rec in pareto_sweep(channel, target, const, params, config.eta2_grid):
            rec.source = source
            rec.eta1 = eta1
            rec.seed = params.seed
            records.append(rec)

    out = os.path.join(outdir, f"pareto.{config.format}")
    write_records(records, out, config.format)
    config.echo(os.path.join(outdir, "config_resolved.json"))
    return [out, os.path.join(outdir, "config_resolved.json")]


def cmd_tradeoff(config: ExperimentConfig) -> list[str]:
    """Full pipeline: constellation -> Pareto beamformer -> BER + detection."""
    if not config.eta2_grid:
        raise ValueError("empty grid")
    outdir = _ensure_outdir(config)
    params = config.scenario
    channel, target = _draw_scene(config)
    pair = QuadraticPair.from_scenario(target, channel)
    corr = correlation_coefficient(comm_beamformer(channel), sensing_beamformer(target))

    entries = _resolve_constellations(config)
    src_rings = [tuple(r) for r in config.constellation_source.rings] \
        if config.constellation_source.rings else None
    for name in config.baselines:
        entries.append((name, None, _make_baseline(name, params.mod_order, src_rings)))

    records = []
    run_index = 0
    for source, eta1, const in entries:
        es = avg_power(const)
        for eta2 in config.eta2_grid:
            point = pareto_beamformer(pair, float(eta2))
            w = point.beamformer.w
            ber_res = simulate_ber(const, channel, w, params, config.mc.n_symbols,
                                   derive_rng(params.seed, "ber", run_index))
            det_res = simulate_detection_cfar(target, w, const, config.detector, params,
                                              config.mc.n_trials,
                                              derive_rng(params.seed, "cfar", run_index))
            records.append(TradeoffRecord(
                source=source, eta1=eta1, eta2=float(eta2),
                kld_c_bits=kld_comm(const, channel, w, params),
                kld_r_nats=kld_radar_woodbury(target, w, es, params),
                sensing_objective=point.sensing_objective,
                comm_objective=point.comm_objective,
                correlation_r=corr,
                ber=ber_res.ber, ser=ber_res.ser,
                pd=det_res.pd, pfa_empirical=det_res.pfa_empirical,
                n_trials=config.mc.n_trials, seed=params.seed))
            run_index += 1

    out = os.path.join(outdir, f"tradeoff.{config.format}")
    write_records(records, out, config.format)
    config.echo(os.path.join(outdir, "config_resolved.json"))
    return [out, os.path.join(outdir, "config_resolved.json")]


# -- validation command ------------------------------------------------------


def _check(name: str, err: float, tol: float):
    ok = err <= tol
    return ok, f"{'PASS' if ok else 'FAIL'} {name}: measured={err:.3e} tol={tol:.1e}"


def cmd_validate(config: ExperimentConfig):
    """Run the cross-cutting invariant suite; returns (all_ok, report lines)."""
    params = config.scenario
    rng = derive_rng(params.seed, "validate")
    results = []

    # Matrix and reduced detection KLDs must agree.
    worst = 0.0
    for _ in range(200):
        m = int(rng.choice([2, 4, 8, 16]))
        j = int(rng.choice([1, 5, 10]))
        p = ScenarioParams(num_antennas=m, num_scatterers=j,
                           angle_target_deg=float(rng.uniform(-60, 60)),
                           scatterer_spread_deg=float(rng.uniform(0, 10)))
        tgt = gen_target_response(p, rng)
        w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        w /= np.linalg.norm(w)
        es = float(rng.uniform(0.0, 2.0))
        full = kld_radar_full(tgt, w, es, p)
        wood = kld_radar_woodbury(tgt, w, es, p)
        worst = max(worst, abs(full - wood) / (1.0 + full))
    results.append(_check("woodbury_equivalence", worst, 1e-10))

    # Scalar detection KLD closed form at an SNR of 10.
    p1 = ScenarioParams()
    es10 = 10.0 * p1.noise_radar_w / p1.radar_rx_power
    expected = np.log(11.0) + 1.0 / 11.0 - 1.0
    results.append(_check("radar_scalar_closed_form",
                          abs(kld_radar_scalar(es10, p1) - expected), 1e-12))

    # Scalar form equals the reduced form for a single antenna and scatterer.
    p2 = ScenarioParams(num_antennas=1, num_scatterers=1, scatterer_spread_deg=0.0,
                        angle_target_deg=0.0)
    tgt2 = gen_target_response(p2, rng)
    err = abs(kld_radar_scalar(0.7, p2) - kld_radar_woodbury(tgt2, np.ones(1), 0.7, p2))
    results.append(_check("radar_scalar_consistency", err, 1e-12))

    # Surrogate endpoints: pure distance at 0, pure power at 1.
    pts = 0.9 * np.exp(2j * np.pi * rng.random(8))
    err = max(abs(kld_new(pts, 0.0) - min_pair_distance(pts)),
              abs(kld_new(pts, 1.0) - avg_power(pts)))
    results.append(_check("surrogate_endpoints", err, 1e-14))

    # Steering vectors have unit-modulus entries.
    err = max(abs(np.linalg.norm(steering(th, 16)) ** 2 - 16.0)
              for th in (-70.0, 0.0, 33.3, 90.0))
    results.append(_check("steering_norm", err, 1e-9))

    # Pareto endpoints and dominance over random feasible vectors.
    p3 = ScenarioParams(num_antennas=8)
    ch3 = gen_comm_channel(p3, rng)
    tgt3 = gen_target_response(p3, rng)
    pair = QuadraticPair.from_scenario(tgt3, ch3)
    w_sense = sensing_beamformer(tgt3).w
    w_comm = comm_beamformer(ch3).w
    end0 = pareto_beamformer(pair, 0.0).beamformer.w
    end1 = pareto_beamformer(pair, 1.0).beamformer.w
    err = max(abs(abs(end0.conj() @ w_sense) - 1.0), abs(abs(end1.conj() @ w_comm) - 1.0))
    results.append(_check("pareto_endpoints", err, 1e-6))

    mid = pareto_beamformer(pair, 0.5)
    lam_c = float(np.linalg.eigvalsh(pair.d_c)[-1])
    samples = rng.standard_normal((10000, 8)) + 1j * rng.standard_normal((10000, 8))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    feas = samples[np.einsum("ij,jk,ik->i", samples.conj(), pair.d_c, samples).real
                   >= 0.5 * lam_c]
    best = float(np.einsum("ij,jk,ik->i", feas.conj(), pair.d_r, feas).real.max()) \
        if feas.size else -np.inf
    gap = max(0.0, (best - mid.sensing_objective) / max(abs(best), 1e-300))
    results.append(_check("pareto_dominance", gap, 1e-9))

    # Energy-detector identity at a single sample: pd = pfa^(lam0/lam1).
    tau = np_threshold(1e-5, 1, 2.0)
    pd = np_detection_probability(tau, 1, 5.0)
    results.append(_check("energy_detector_identity", abs(pd - 1e-5 ** (2.0 / 5.0)), 1e-10))

    # Optimized constellations stay inside the unit disk.
    small = OptimizerOptions(restarts=2, max_iters=300, seed=params.seed)
    const = optimize_constellation(8, 0.5, small)
    results.append(_check("retraction_amplitude",
                          max(0.0, float(np.abs(const.points).max()) - 1.0), 1e-9))

    # A constellation loaded from file must satisfy its invariants.
    if config.constellation_source.type == "file":
        try:
            loaded = Constellation.load(config.constellation_source.path)
            err = max(0.0, float(np.abs(loaded.points).max()) - 1.0)
        except ValueError:
            err = np.inf
        results.append(_check("constellation_file_invariants", err, 1e-9))

    ok = all(flag for flag, _ in results)
    return ok, [line for _, line in results]
