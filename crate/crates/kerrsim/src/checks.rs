// SPDX-License-Identifier: Apache-2.0

//! The acceptance suite. Every criterion yields an [`Outcome`]; a numerical
//! error inside a check is reported as a failure with its message, never a panic.

use std::f64::consts::{PI, TAU};

use kerrsim_core::channels::apply_signal_loss;
use kerrsim_core::exotic::two_peak_amplitudes;
use kerrsim_core::gaussian::{apply_loss, apply_symplectic, beamsplitter_symplectic, displace, williamson};
use kerrsim_core::heterodyne::{
    mean_rotation_center, postselection_probability, project_heterodyne, project_heterodyne_averaged,
};
use kerrsim_core::photon_stats::{displacement_vector, g2_click, g2_exact};
use kerrsim_core::pipeline::prepare_branches;
use kerrsim_core::{
    evaluate, wrap_two_pi, BranchState, Complex64, FockWindow, GaussianState, HeterodyneSettings, NamedSet,
    ParamName, Parameters, PipelineOptions, SignalDensity, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Criteria 1 and 2 locate the `g2` minimum at a mean photon number this
/// model does not reproduce; they are expected to fail.
pub const KNOWN_DEVIATIONS: [u32; 2] = [1, 2];

pub mod tol {
    pub const OPTIMISTIC_G2: (f64, f64) = (0.92, 0.02);
    pub const OPTIMISTIC_N: (f64, f64) = (0.395, 0.05);
    pub const ACHIEVABLE_G2: (f64, f64) = (0.93, 0.02);
    pub const ACHIEVABLE_N: (f64, f64) = (0.41, 0.05);
    pub const CURRENT_G2_FLOOR: f64 = 0.98;
    pub const SUCCESS: (f64, f64) = (0.152, 0.05);
    /// Percentage points.
    pub const EPSILON_DIP: (f64, f64) = (16.7, 8.0);
    pub const EPSILON_TARGET_SUCCESS: f64 = 0.10;
    pub const SENSITIVE_SHIFT: f64 = 0.01;
    pub const TWO_PEAK_SEPARATION: (f64, f64) = (16.0, 2.0);
    pub const TWO_PEAK_ARG: (f64, f64) = (2.59, 0.01);
    pub const TWO_PEAK_ROTATION: (f64, f64) = (5.717, 0.01);
    pub const COHERENT_CLICK: f64 = 1e-8;
    pub const EXACT_G2: f64 = 1e-6;
    pub const LOSS: f64 = 1e-10;
    pub const WILLIAMSON: f64 = 1e-10;
    /// Uncertainty relation slack, matching the state constructor.
    pub const PHYSICAL: f64 = 1e-8;
    pub const POVM: f64 = 1e-3;
    pub const ORACLE_REL: f64 = 0.05;
    pub const SHARP_LIMIT_REL: f64 = 1e-6;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

type Check = (u32, &'static str, fn() -> kerrsim_core::Result<(bool, String)>);

const REFERENCE_CHECKS: [Check; 7] = [
    (1, "optimistic set minimum", optimistic),
    (2, "optimally-achievable set minimum", achievable),
    (3, "current set stays Poissonian", current),
    (4, "optimistic post-selection success", success),
    (5, "binning trade-off", epsilon_tradeoff),
    (6, "sensitivity ordering", sensitivity),
    (7, "two-peak state", two_peak),
];

const PROPERTY_CHECKS: [Check; 7] = [
    (8, "coherent click g2", coherent_click),
    (9, "exact g2 limits", exact_g2),
    (10, "loss channels", loss_channels),
    (11, "Williamson and symplectic physicality", symplectic),
    (12, "heterodyne POVM completeness", povm_completeness),
    (13, "Fock oracle vs Gaussian route", oracle_agreement),
    (14, "sharp limit of the averaged projection", sharp_limit),
];

fn run(checks: &[Check]) -> Vec<Outcome> {
    checks
        .par_iter()
        .map(|&(id, title, f)| {
            let (passed, detail) = match std::panic::catch_unwind(f) {
                Ok(Ok(r)) => r,
                Ok(Err(e)) => (false, format!("error: {e}")),
                Err(_) => (false, "panicked".into()),
            };
            Outcome {
                id,
                title,
                passed,
                detail,
            }
        })
        .collect()
}

/// Criteria 8 to 14; seconds to run.
pub fn property_checks() -> Vec<Outcome> {
    run(&PROPERTY_CHECKS)
}

/// All fourteen criteria, in order.
pub fn all_checks() -> Vec<Outcome> {
    let mut out = run(&REFERENCE_CHECKS);
    out.extend(property_checks());
    out
}

fn within(x: f64, (target, tol): (f64, f64)) -> bool {
    (x - target).abs() <= tol
}

fn gaussian(set: NamedSet) -> kerrsim_core::Result<kerrsim_core::PointResult> {
    evaluate(&set.parameters(), Variant::Gaussian, &PipelineOptions::default())
}

fn set_minimum(set: NamedSet, g2_tol: (f64, f64), n_tol: (f64, f64)) -> kerrsim_core::Result<(bool, String)> {
    let r = gaussian(set)?;
    let g_ok = within(r.g2, g2_tol);
    let n_ok = within(r.n_displacement, n_tol);
    Ok((
        g_ok && n_ok,
        format!(
            "g2_min {:.5} (want {}±{}, {}), n_opt {:.4} (want {}±{}, {})",
            r.g2,
            g2_tol.0,
            g2_tol.1,
            if g_ok { "ok" } else { "off" },
            r.n_displacement,
            n_tol.0,
            n_tol.1,
            if n_ok { "ok" } else { "off" },
        ),
    ))
}

fn optimistic() -> kerrsim_core::Result<(bool, String)> {
    set_minimum(NamedSet::Optimistic, tol::OPTIMISTIC_G2, tol::OPTIMISTIC_N)
}

fn achievable() -> kerrsim_core::Result<(bool, String)> {
    set_minimum(NamedSet::Achievable, tol::ACHIEVABLE_G2, tol::ACHIEVABLE_N)
}

fn current() -> kerrsim_core::Result<(bool, String)> {
    let r = gaussian(NamedSet::Current)?;
    Ok((r.g2 > tol::CURRENT_G2_FLOOR, format!("g2_min {:.5} (want > {})", r.g2, tol::CURRENT_G2_FLOOR)))
}

fn success() -> kerrsim_core::Result<(bool, String)> {
    let r = gaussian(NamedSet::Optimistic)?;
    Ok((
        within(r.success_prob, tol::SUCCESS),
        format!("success {:.5} (want {}±{})", r.success_prob, tol::SUCCESS.0, tol::SUCCESS.1),
    ))
}

fn epsilon_tradeoff() -> kerrsim_core::Result<(bool, String)> {
    let base = NamedSet::Achievable.parameters();
    let opts = PipelineOptions::default();
    let eval = |eps: f64| evaluate(&base.with(ParamName::Epsilon, eps), Variant::Gaussian, &opts);

    let grid: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let points = grid.par_iter().map(|&e| eval(e)).collect::<kerrsim_core::Result<Vec<_>>>()?;
    let g2_monotone = points.windows(2).all(|w| w[1].g2 >= w[0].g2 - 1e-9);
    let success_monotone = points.windows(2).all(|w| w[1].success_prob > w[0].success_prob);

    // acceptance alone depends on epsilon, so bisect it without projecting
    let branches = prepare_branches(&base, &opts)?;
    let delta = mean_rotation_center(&base);
    let (mut lo, mut hi) = (1e-3, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if postselection_probability(&branches, delta, mid)? < tol::EPSILON_TARGET_SUCCESS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps10 = 0.5 * (lo + hi);
    let at10 = eval(eps10)?;
    let ideal = eval(1e-3)?;
    let dip = 100.0 * ((1.0 - ideal.g2) - (1.0 - at10.g2)) / (1.0 - ideal.g2);
    let relative = 100.0 * (at10.g2 - ideal.g2) / ideal.g2;
    let dip_ok = within(dip, tol::EPSILON_DIP);
    Ok((
        g2_monotone && success_monotone && dip_ok,
        format!(
            "monotone g2 {g2_monotone}, success {success_monotone}; eps {eps10:.4} gives success {:.4}; \
             squeezing depth lost {dip:.1}% (want {}±{}), g2 change {relative:.2}%",
            at10.success_prob,
            tol::EPSILON_DIP.0,
            tol::EPSILON_DIP.1,
        ),
    ))
}

fn sensitivity() -> kerrsim_core::Result<(bool, String)> {
    let base = NamedSet::Optimistic.parameters();
    let cases: [(ParamName, [f64; 3], bool); 4] = [
        (ParamName::Nu, [0.3, 0.5, 0.7], true),
        (ParamName::DeltaPhi, [0.005, 0.01, 0.02], true),
        (ParamName::PDark, [1e-5, 1e-4, 1e-3], true),
        (ParamName::Eta, [0.3, 0.5, 0.7], false),
    ];
    let shifts = cases
        .par_iter()
        .map(|&(name, values, _)| {
            let g2 = values
                .iter()
                .map(|&v| evaluate(&base.with(name, v), Variant::Gaussian, &PipelineOptions::default()).map(|r| r.g2))
                .collect::<kerrsim_core::Result<Vec<_>>>()?;
            let max = g2.iter().cloned().fold(f64::MIN, f64::max);
            let min = g2.iter().cloned().fold(f64::MAX, f64::min);
            Ok(max - min)
        })
        .collect::<kerrsim_core::Result<Vec<f64>>>()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for ((name, _, sensitive), shift) in cases.iter().zip(&shifts) {
        let good = if *sensitive {
            *shift > tol::SENSITIVE_SHIFT
        } else {
            *shift < tol::SENSITIVE_SHIFT
        };
        ok &= good;
        let rel = if *sensitive { ">" } else { "<" };
        parts.push(format!("{} {shift:.4} ({rel} {})", name.as_str(), tol::SENSITIVE_SHIFT));
    }
    Ok((ok, parts.join(", ")))
}

fn two_peak() -> kerrsim_core::Result<(bool, String)> {
    let a = 30f64.sqrt();
    let delta = Complex64::new(-3.41, 2.09);
    let s = two_peak_amplitudes(a, a, 0.4, delta)?;
    let arg = delta.arg();
    let rotation = wrap_two_pi(0.4 * a * a);
    let sep_ok = s.separation.is_some_and(|d| within(d as f64, tol::TWO_PEAK_SEPARATION));
    let ok = sep_ok && within(arg, tol::TWO_PEAK_ARG) && within(rotation, tol::TWO_PEAK_ROTATION);
    Ok((
        ok,
        format!(
            "peaks {:?}, separation {:?} (want 16±2), arg delta {arg:.4}, mean rotation {rotation:.4}",
            &s.peaks[..s.peaks.len().min(2)],
            s.separation
        ),
    ))
}

fn coherent_click() -> kerrsim_core::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 0..=58 {
        let amp = 0.1 + 0.05 * i as f64;
        for phase in [0.0, 1.0, 2.5] {
            let g = GaussianState::coherent(amp * f64::cos(phase), amp * f64::sin(phase));
            worst = worst.max((g2_click(&g, 0.0)? - 1.0).abs());
        }
    }
    Ok((worst < tol::COHERENT_CLICK, format!("max |g2 - 1| {worst:.2e} over |alpha| in [0.1, 3]")))
}

fn exact_g2() -> kerrsim_core::Result<(bool, String)> {
    let single = g2_exact(&SignalDensity::fock(1, 4)?)?;
    let mut worst = 0.0f64;
    for nbar in [0.2, 1.0, 3.0] {
        let g = g2_exact(&SignalDensity::thermal(nbar, 400)?)?;
        worst = worst.max((g - 2.0).abs());
    }
    Ok((
        single == 0.0 && worst < tol::EXACT_G2,
        format!("|1> gives {single}, thermal max |g2 - 2| {worst:.2e}"),
    ))
}

fn random_pure(rng: &mut ChaCha8Rng, cutoff: usize) -> kerrsim_core::Result<SignalDensity> {
    let amps: Vec<Complex64> = (0..=cutoff)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.iter().map(|c| c / norm).collect();
    SignalDensity::from_pure(0, &amps)
}

fn max_diff(a: &SignalDensity, b: &SignalDensity) -> f64 {
    let n = a.cutoff().max(b.cutoff());
    let mut worst = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    worst
}

fn loss_channels() -> kerrsim_core::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65_7272);
    let (mut semigroup, mut trace) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let cutoff = rng.random_range(1..12);
        let rho = random_pure(&mut rng, cutoff)?;
        let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let twice = apply_signal_loss(&apply_signal_loss(&rho, a)?, b)?;
        let once = apply_signal_loss(&rho, a * b)?;
        semigroup = semigroup.max(max_diff(&twice, &once));
        trace = trace.max((once.trace() - rho.trace()).abs());
    }
    // probe side: the branch amplitudes and decoherence compose the same way
    let mut probe = 0.0f64;
    for _ in 0..10 {
        let (a, b) = (rng.random_range(0.05..1.0), rng.random_range(0.05..1.0));
        let state = BranchState::coherent_product(2.0, 2.0, FockWindow::full(40), 1e-10)?.cross_kerr(0.3);
        let twice = state.clone().probe_loss(a)?.probe_loss(b)?;
        let once = state.probe_loss(a * b)?;
        for m in 0..=40 {
            probe = probe.max((twice.probe_amplitude(m) - once.probe_amplitude(m)).norm());
            for n in 0..=40 {
                probe = probe.max((twice.decoherence(m, n) - once.decoherence(m, n)).norm());
            }
        }
    }
    let ok = semigroup < tol::LOSS && trace < tol::LOSS && probe < tol::LOSS;
    Ok((
        ok,
        format!("signal semigroup {semigroup:.1e}, trace {trace:.1e}, probe semigroup {probe:.1e}"),
    ))
}

fn symplectic() -> kerrsim_core::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7769_6c6c);
    let (mut round_trip, mut min_nu) = (0.0f64, f64::MAX);
    for _ in 0..50 {
        let mut one = || {
            GaussianState::squeezed_thermal(
                rng.random_range(0.0..1.5),
                if rng.random_bool(0.5) { 1.0 } else { rng.random_range(1.0..3.0) },
                rng.random_range(0.0..PI),
            )
        };
        let (g, h) = (one(), one());
        let w = williamson(&g)?;
        round_trip = round_trip.max((w.reconstruct() - g.covariance()).amax());

        let d = displacement_vector(rng.random_range(0.0..2.0), rng.random_range(0.0..TAU));
        let moved = displace(&g, &d)?;
        let lossy = apply_loss(&moved, rng.random_range(0.0..1.0))?;
        let mixed = apply_symplectic(&lossy.tensor(&h)?, &beamsplitter_symplectic(rng.random_range(0.0..1.0))?)?;
        for s in [&moved, &lossy, &mixed, &mixed.mode(0)?, &mixed.mode(1)?] {
            min_nu = min_nu.min(s.min_symplectic_eigenvalue());
        }
    }
    let ok = round_trip < tol::WILLIAMSON && min_nu >= 1.0 - tol::PHYSICAL;
    Ok((ok, format!("round trip {round_trip:.1e}, smallest symplectic eigenvalue {min_nu:.12}")))
}

fn povm_completeness() -> kerrsim_core::Result<(bool, String)> {
    let state = BranchState::coherent_product(2.0, 2.0, FockWindow::full(40), 1e-10)?
        .cross_kerr(0.4)
        .probe_loss(0.7)?;
    let step = 0.1;
    let half = 80;
    let mut total = 0.0;
    for i in -half..=half {
        for j in -half..=half {
            let delta = Complex64::new(i as f64 * step, j as f64 * step);
            total += project_heterodyne(&state, delta).map(|r| r.trace_raw()).unwrap_or(0.0);
        }
    }
    total *= step * step;
    let err = (total - state.norm_sqr()).abs();
    Ok((err < tol::POVM, format!("grid-integrated trace {total:.6} on [-8, 8]^2, step {step}")))
}

fn oracle_agreement() -> kerrsim_core::Result<(bool, String)> {
    let p = Parameters {
        alpha: 6.0,
        beta: 6.0,
        phi0: 0.098 / 36.0,
        ..NamedSet::Optimistic.parameters()
    };
    let opts = PipelineOptions::default();
    let g = evaluate(&p, Variant::Gaussian, &opts)?;
    let f = evaluate(&p, Variant::FockOracle, &opts)?;
    let rel = (f.g2 - g.g2).abs() / g.g2;
    Ok((
        rel < tol::ORACLE_REL,
        format!("Gaussian {:.5}, Fock {:.5}, relative gap {:.2}%", g.g2, f.g2, 100.0 * rel),
    ))
}

fn sharp_limit() -> kerrsim_core::Result<(bool, String)> {
    let state = BranchState::coherent_product(2.5, 2.5, FockWindow::full(50), 1e-10)?
        .cross_kerr(0.3)
        .probe_loss(0.8)?;
    let delta = Complex64::new(1.2, -1.5);
    let settings = HeterodyneSettings::new(delta, 1e-4, 0.0, 0.0)?;
    let sharp = project_heterodyne(&state, delta)?;
    let smeared = project_heterodyne_averaged(&state, &settings)?;
    let scale = sharp.block().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let rel = max_diff(&sharp, &smeared) / scale;
    Ok((rel < tol::SHARP_LIMIT_REL, format!("Delta = 1e-4: max relative deviation {rel:.2e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_suite_passes() {
        for o in property_checks() {
            assert!(o.passed, "{}", o.line());
        }
    }

    #[test]
    fn outcome_lines() {
        let o = Outcome {
            id: 3,
            title: "t",
            passed: false,
            detail: "d".into(),
        };
        assert_eq!(o.line(), "[FAIL]  3 t: d");
    }
}
