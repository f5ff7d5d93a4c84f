use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::golden::golden_section;
use super::MID_QUBIT_X_OPT;
use crate::error::{check_positive, Error, Result};
use crate::estimation::{cramer_rao_variance, fisher_information, ProbabilityModel};
use crate::gnd::{gnd_spin_probabilities, gnd_theta_opt, GndParams};
use crate::mid::{mid_spin_probabilities, MidParams};
use crate::state::ProbeAngles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolModel {
    /// Estimate `mu`.
    MidQubit,
    /// Estimate `gamma`.
    GndQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationSetup {
    pub model: ProtocolModel,
    pub true_param: f64,
    pub initial_guess: f64,
    pub shots_per_round: u64,
    pub rounds: usize,
    pub seed: u64,
    pub omega: f64,
    /// `x = gamma omega t` aimed at by GND rounds (the GND qubit QSNR grows without bound in `x`).
    pub gnd_target_x: f64,
}

impl IterationSetup {
    pub fn new(
        model: ProtocolModel,
        true_param: f64,
        initial_guess: f64,
        shots_per_round: u64,
        rounds: usize,
        seed: u64,
    ) -> Self {
        Self {
            model,
            true_param,
            initial_guess,
            shots_per_round,
            rounds,
            seed,
            omega: 1.0,
            gnd_target_x: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub guess: f64,
    pub t: f64,
    pub probe_theta: f64,
    pub probe_phi: f64,
    pub measure_theta: f64,
    pub measure_phi: f64,
    pub shots: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Per-shot FI of the measurement at the estimate.
    pub fisher: f64,
    /// `1 / (M F)` at the estimate; `None` when unbounded.
    pub variance: Option<f64>,
    pub flagged: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub model: ProtocolModel,
    pub true_param: f64,
    pub initial_guess: f64,
    pub omega: f64,
    pub rng_seed: u64,
    pub rounds: Vec<RoundRecord>,
    pub final_estimate: f64,
}

impl IterationTrace {
    pub fn initial_relative_error(&self) -> f64 {
        ((self.initial_guess - self.true_param) / self.true_param).abs()
    }

    pub fn final_relative_error(&self) -> f64 {
        ((self.final_estimate - self.true_param) / self.true_param).abs()
    }
}

struct Design {
    t: f64,
    probe: ProbeAngles,
    meas: ProbeAngles,
}

impl Design {
    /// MID: `t` on the grid `omega t = k pi / 2` closest to `x* / (mu omega^2)`, where the
    /// equatorial measurement saturates the QFI. GND: `t = x / (gamma omega)`, probe at
    /// `theta_m(x)` and a `sigma_3` measurement, which saturates the QFI at any `t`.
    fn for_guess(setup: &IterationSetup, guess: f64) -> Result<Self> {
        let w = setup.omega;
        match setup.model {
            ProtocolModel::MidQubit => {
                let t_opt = MID_QUBIT_X_OPT / (guess * w * w);
                let k = (w * t_opt / FRAC_PI_2).round().max(1.0);
                Ok(Design {
                    t: k * FRAC_PI_2 / w,
                    probe: ProbeAngles::new(FRAC_PI_2, 0.0)?,
                    meas: ProbeAngles::new(FRAC_PI_2, 0.0)?,
                })
            }
            ProtocolModel::GndQubit => Ok(Design {
                t: setup.gnd_target_x / (guess * w),
                probe: ProbeAngles::new(gnd_theta_opt(setup.gnd_target_x)?, 0.0)?,
                meas: ProbeAngles::new(0.0, 0.0)?,
            }),
        }
    }

    fn model_at(&self, setup: &IterationSetup, lambda: f64) -> Result<ProbabilityModel> {
        match setup.model {
            ProtocolModel::MidQubit => {
                mid_spin_probabilities(&self.probe, &self.meas, &MidParams::new(setup.omega, lambda, self.t)?)
            }
            ProtocolModel::GndQubit => {
                gnd_spin_probabilities(&self.probe, &self.meas, &GndParams::new(setup.omega, lambda, self.t)?)
            }
        }
    }

    fn success_probability(&self, setup: &IterationSetup, lambda: f64) -> Result<f64> {
        Ok(self.model_at(setup, lambda)?.outcomes()[0].p.clamp(0.0, 1.0))
    }
}

fn log_likelihood(p: f64, successes: u64, shots: u64) -> f64 {
    let tiny = f64::MIN_POSITIVE;
    let k = successes as f64;
    let m = shots as f64;
    let mut ll = 0.0;
    if successes > 0 {
        ll += k * p.max(tiny).ln();
    }
    if successes < shots {
        ll += (m - k) * (1.0 - p).max(tiny).ln();
    }
    ll
}

/// Simulates the adaptive loop: design the experiment for the current guess,
/// draw `M` Born-rule outcomes at the true parameter, and replace the guess by
/// the maximum-likelihood estimate on `[guess/10, 10 guess]`.
pub fn iterate_estimation(setup: &IterationSetup) -> Result<IterationTrace> {
    check_positive("true_param", setup.true_param)?;
    check_positive("initial_guess", setup.initial_guess)?;
    check_positive("omega", setup.omega)?;
    if setup.model == ProtocolModel::GndQubit {
        check_positive("gnd_target_x", setup.gnd_target_x)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let m = setup.shots_per_round;
    let mut guess = setup.initial_guess;
    let mut rounds = Vec::with_capacity(setup.rounds);

    for round in 0..setup.rounds {
        let design = Design::for_guess(setup, guess)?;
        let fisher_at_guess = fisher_information(&design.model_at(setup, guess)?);
        let mut record = RoundRecord {
            round,
            guess,
            t: design.t,
            probe_theta: design.probe.theta,
            probe_phi: design.probe.phi,
            measure_theta: design.meas.theta,
            measure_phi: design.meas.phi,
            shots: m,
            successes: 0,
            estimate: guess,
            fisher: fisher_at_guess,
            variance: cramer_rao_variance(fisher_at_guess, m).variance(),
            flagged: false,
            note: None,
        };
        if m == 0 || !(fisher_at_guess > 0.0) {
            record.flagged = true;
            record.note = Some(
                if m == 0 {
                    "no shots in this round"
                } else {
                    "zero Fisher information"
                }
                .into(),
            );
            rounds.push(record);
            continue;
        }

        let p_true = design.success_probability(setup, setup.true_param)?;
        let successes = Binomial::new(m, p_true)
            .map_err(|e| Error::Optimization(format!("cannot sample outcomes: {e}")))?
            .sample(&mut rng);

        let (lo, hi) = ((guess / 10.0).ln(), (guess * 10.0).ln());
        let fit = golden_section(
            |u| {
                Ok(log_likelihood(
                    design.success_probability(setup, u.exp())?,
                    successes,
                    m,
                ))
            },
            lo,
            hi,
            1e-10,
        )?;
        let estimate = fit.x().exp();
        let fisher = fisher_information(&design.model_at(setup, estimate)?);
        record.successes = successes;
        record.estimate = estimate;
        record.fisher = fisher;
        record.variance = cramer_rao_variance(fisher, m).variance();
        if fit.x() - lo < 1e-6 || hi - fit.x() < 1e-6 {
            record.note = Some("estimate at the edge of the likelihood search interval".into());
        }
        guess = estimate;
        rounds.push(record);
    }

    Ok(IterationTrace {
        model: setup.model,
        true_param: setup.true_param,
        initial_guess: setup.initial_guess,
        omega: setup.omega,
        rng_seed: setup.seed,
        rounds,
        final_estimate: guess,
    })
}
