//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use common::*;
use fiberpair_core::physics::{generation_rates_with, hsps_efficiency_from_kappa};
use fiberpair_core::{
    calibrate_raman_gain, fit_quadratic, fit_sqrt, forward_counts, invert_counts, kappa, multiphoton_probability,
    sfwm_spectral_density, simulate_pulses, ChannelSpec, CountRecord, DetectorPair, Environment, FiberKind, FiberSpec,
    Observation, PhaseMatching, PumpSpec, RateTriple, SeriesPoint, Side, SimConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn channel(side: Side, detune: f64, efficiency: f64, dark_prob: f64) -> ChannelSpec {
    ChannelSpec { detune, bandwidth: 50e9, window: 50e-12, efficiency, dark_prob, side }
}

fn pair(efficiency: f64, dark_prob: f64) -> DetectorPair {
    DetectorPair::new(
        channel(Side::Signal, 0.3e12, efficiency, dark_prob),
        channel(Side::Idler, 0.3e12, efficiency, dark_prob),
    )
    .unwrap()
}

fn pump(peak_power: f64) -> PumpSpec {
    PumpSpec { peak_power, wavelength: 1552.75, repetition_rate: 1e6, pulse_duration: 50e-12 }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn temperature_cross_prediction() -> Outcome {
    let det = pair(0.2, 1e-4);
    let room = Environment { temperature: 300.0 };
    let bare = FiberKind::Hnmsf.spec(0.0);
    let g =
        calibrate_raman_gain(Observation::Efficiency { efficiency: 0.6037, pair_rate: 0.1 }, &bare, &det.idler, room)
            .map_err(|e| e.to_string())?;
    let fiber = bare.with_raman_gain(g);
    let p = pump(PumpSpec::peak_power_for_phase(&fiber, 0.2));
    let eff = |t: f64| {
        let k = kappa(&fiber, &p, &det.signal, &det.idler, Environment { temperature: t }).unwrap();
        hsps_efficiency_from_kappa(k).unwrap()
    };
    let (warm, cold) = (eff(300.0), eff(173.0));
    check(
        (warm - 0.6037).abs() < 1e-9 && (cold - 0.7285).abs() <= 0.005,
        format!("g_R = {g:.6} /W/km, efficiency 300 K = {warm:.6}, 173 K = {cold:.6} (target 0.7285 ± 0.005)"),
    )
}

fn multiphoton_figure() -> Outcome {
    let p = multiphoton_probability(0.1).map_err(|e| e.to_string())?;
    check((p - 0.00452).abs() <= 1e-4, format!("P(2) at R = 0.1: {:.5}% (target 0.452 ± 0.01 %)", 100.0 * p))
}

fn normalization_anchor() -> Outcome {
    let det = pair(0.2, 1e-4);
    let fiber = FiberKind::Hnmsf.spec(0.43);
    let p = pump(PumpSpec::peak_power_for_phase(&fiber, 0.2));
    let env = Environment { temperature: 300.0 };
    let r = generation_rates_with(&fiber, &p, &det.signal, &det.idler, env, PhaseMatching::Neglected)
        .map_err(|e| e.to_string())?
        .pair_rate;
    check((r - 0.1).abs() <= 1e-12, format!("Δν·τ = {}, R = {r:.15}", det.idler.mode_count()))
}

fn inversion_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 10_000;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let rates = RateTriple::new(rng.random_range(0.0..0.3), rng.random_range(0.0..0.3), rng.random_range(0.0..0.3));
        let det = DetectorPair::new(
            channel(Side::Signal, 0.3e12, rng.random_range(0.05..1.0), rng.random_range(0.0..1e-3)),
            channel(Side::Idler, 0.3e12, rng.random_range(0.05..1.0), rng.random_range(0.0..1e-3)),
        )
        .unwrap();
        let back = forward_counts(&rates, &det).and_then(|c| invert_counts(&c, &det)).map_err(|e| e.to_string())?;
        let scale = rates.pair_rate.max(rates.stokes_rate).max(rates.antistokes_rate);
        for (x, y) in [
            (back.pair_rate, rates.pair_rate),
            (back.stokes_rate, rates.stokes_rate),
            (back.antistokes_rate, rates.antistokes_rate),
        ] {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    check(worst <= 1e-10, format!("{trials} tuples, worst error {worst:.2e} relative to the largest rate"))
}

/// Exact per-pulse probabilities of Poisson photon numbers seen by threshold detectors.
fn threshold_expectation(r: &RateTriple, det: &DetectorPair) -> CountRecord {
    let (es, ei) = (det.signal.efficiency, det.idler.efficiency);
    let a = (1.0 - det.signal.dark_prob) * (-es * r.stokes_rate).exp();
    let b = (1.0 - det.idler.dark_prob) * (-ei * r.antistokes_rate).exp();
    let silent_s = a * (-es * r.pair_rate).exp();
    let silent_i = b * (-ei * r.pair_rate).exp();
    let silent_both = a * b * (-r.pair_rate * (es + ei - es * ei)).exp();
    let (ps, pi) = (1.0 - silent_s, 1.0 - silent_i);
    CountRecord { n_s: ps, n_i: pi, n_co: 1.0 - silent_s - silent_i + silent_both, n_ac: ps * pi }
}

fn monte_carlo_vs_model() -> Outcome {
    let rates = RateTriple::new(0.05, 0.02, 0.01);
    let det = pair(0.2, 1e-4);
    let model = forward_counts(&rates, &det).unwrap();
    let exact = threshold_expectation(&rates, &det);
    let cfg = SimConfig::new(10_000_000, 5);
    let run = simulate_pulses(&rates, &det, &cfg).map_err(|e| e.to_string())?;
    if simulate_pulses(&rates, &det, &SimConfig::new(100_000, 5))
        != simulate_pulses(&rates, &det, &SimConfig::new(100_000, 5))
    {
        return Err("simulation is not deterministic per seed".into());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (((name, est), (_, want)), ((_, se), (_, ex))) in
        run.counts.fields().into_iter().zip(model.fields()).zip(run.std_err.fields().into_iter().zip(exact.fields()))
    {
        let bias = if name == "n_co" { (ex - want).abs() } else { 0.0 };
        let z = (est - want) / se;
        ok &= (est - want).abs() <= 4.0 * se + bias;
        parts.push(if name == "n_co" {
            format!("{name} {z:+.2}σ (model bias {:.3e} = {:.2}σ allowed)", ex - want, (ex - want) / se)
        } else {
            format!("{name} {z:+.2}σ")
        });
    }
    check(ok, format!("10^7 pulses, seed 5: {}", parts.join(", ")))
}

fn kappa_dual_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let fiber = FiberSpec {
            gamma: rng.random_range(1.0..100.0),
            raman_gain: rng.random_range(0.01..10.0),
            dispersion: rng.random_range(-5.0..10.0),
            length: rng.random_range(0.01..2.0),
            zero_dispersion_wavelength: 1550.0,
            label: "random".into(),
        };
        let p = pump(rng.random_range(1e-3..1.0));
        let detune = rng.random_range(0.1e12..2e12);
        let mut s = channel(Side::Signal, detune, 0.2, 1e-4);
        s.bandwidth = rng.random_range(10e9..200e9);
        s.window = rng.random_range(10e-12..200e-12);
        let i = ChannelSpec { side: Side::Idler, ..s.clone() };
        let env = Environment { temperature: rng.random_range(100.0..400.0) };
        let closed = kappa(&fiber, &p, &s, &i, env).map_err(|e| e.to_string())?;
        let r = generation_rates_with(&fiber, &p, &s, &i, env, PhaseMatching::Neglected).map_err(|e| e.to_string())?;
        worst = worst.max((closed - r.pair_rate / r.antistokes_rate).abs() / closed);
    }
    check(worst <= 1e-12, format!("10^4 random parameter sets, worst relative difference {worst:.2e}"))
}

fn scaling_laws() -> Outcome {
    let det = pair(0.2, 1e-4);
    let env = Environment { temperature: 300.0 };
    let mut worst = 0.0f64;
    let mut exact = true;
    for kind in FiberKind::ALL {
        let fiber = kind.spec(0.5);
        let p = pump(PumpSpec::peak_power_for_phase(&fiber, 0.05));
        let rates = |p: &PumpSpec| {
            generation_rates_with(&fiber, p, &det.signal, &det.idler, env, PhaseMatching::Neglected).unwrap()
        };
        let (a, b) = (rates(&p), rates(&p.with_peak_power(2.0 * p.peak_power)));
        worst = worst.max((b.pair_rate / a.pair_rate - 4.0).abs() / 4.0);
        exact &= b.stokes_rate == 2.0 * a.stokes_rate && b.antistokes_rate == 2.0 * a.antistokes_rate;
    }
    check(worst <= 1e-9 && exact, format!("R ratio error {worst:.2e}, noise rates doubled exactly: {exact}"))
}

fn fit_recovery() -> Outcome {
    let mut worst = 0.0f64;
    for (s1, s2) in [(5.315, 6.485), (3.82, 4.13)] {
        let pts: Vec<_> = (1..=8).map(|k| 0.02 * k as f64).map(|x| SeriesPoint::new(x, s1 * x + s2 * x * x)).collect();
        let f = fit_quadratic(&pts).map_err(|e| e.to_string())?;
        worst = worst.max((f.s1 - s1).abs()).max((f.s2 - s2).abs());
    }
    let a = 4.81723;
    let pts: Vec<_> = (1..=10).map(|k| 0.01 * k as f64).map(|r: f64| SeriesPoint::new(r, a * r.sqrt())).collect();
    let fa = fit_sqrt(&pts).map_err(|e| e.to_string())?.a;
    worst = worst.max((fa - a).abs());
    check(worst <= 1e-9, format!("worst coefficient error {worst:.2e}"))
}

fn flat_generation_band() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in FiberKind::ALL {
        let fiber = kind.spec(0.0);
        let xi = sfwm_spectral_density(&fiber, &pump(PumpSpec::peak_power_for_phase(&fiber, 0.2)), 0.3e12)
            .map_err(|e| e.to_string())?;
        ok &= xi >= 0.9 * 0.04;
        parts.push(format!("{} {:.4}", kind.name(), xi / 0.04));
    }
    check(ok, format!("ξ_c(0.3 THz)/(γP₀L)²: {}", parts.join(", ")))
}

fn end_to_end_pipeline() -> Outcome {
    let ws = Workspace::new();
    let calib = ws.write("calib.toml", &config_text("dsf", None, "peak_power_w = 0.01", 300.0, 0.1, 1e-5));
    let out = run_ok(&["calibrate", "--config", arg(&calib), "--efficiency", "0.55", "--pair-rate", "0.1"]);
    let g = column(&out, "raman_gain_per_w_km")[0].ok_or("calibrate produced no gain")?;

    let mut text = config_text("dsf", Some(g), "peak_power_w = 0.01", 300.0, 0.1, 1e-5);
    text.push_str("\n[sim]\nn_pulses = 1000000\nseed = 1\n");
    let cfg = ws.write("run.toml", &text);
    let (counts, rates, fit) = (ws.path("counts.csv"), ws.path("rates.csv"), ws.path("fit.csv"));
    // γP₀L = 0.04..0.2 in five steps on a 3 /W/km, 1 km fiber
    run_ok(&[
        "simulate",
        "--config",
        arg(&cfg),
        "--start",
        &(0.04 / 3.0).to_string(),
        "--stop",
        &(0.2 / 3.0).to_string(),
        "--steps",
        "5",
        "--out",
        arg(&counts),
    ]);
    run_ok(&["estimate", "--config", arg(&cfg), arg(&counts), "--out", arg(&rates)]);
    run_ok(&[
        "fit",
        arg(&rates),
        "--model",
        "quadratic",
        "--x-col",
        "label",
        "--y-col",
        "pair_rate",
        "--out",
        arg(&fit),
    ]);
    let text = std::fs::read_to_string(&fit).map_err(|e| e.to_string())?;
    let (s1, se, s2) =
        (column(&text, "s1")[0].unwrap(), column(&text, "s1_std_err")[0].unwrap(), column(&text, "s2")[0].unwrap());
    let z = s1 / se;
    check(z.abs() <= 3.0 && s2 > 0.0, format!("R(P₀) = s1·P₀ + s2·P₀²: s1 = {s1:.4e} ({z:+.2}σ), s2 = {s2:.4} /W²"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("temperature cross-prediction", temperature_cross_prediction),
        ("multi-photon probability", multiphoton_figure),
        ("rate normalization", normalization_anchor),
        ("inversion round trip", inversion_round_trip),
        ("Monte Carlo vs count model", monte_carlo_vs_model),
        ("κ closed form vs rate ratio", kappa_dual_formula),
        ("pump scaling laws", scaling_laws),
        ("fit recovery", fit_recovery),
        ("flat generation band", flat_generation_band),
        ("simulate → estimate → fit pipeline", end_to_end_pipeline),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
