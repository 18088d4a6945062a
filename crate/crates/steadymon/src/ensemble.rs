// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ensembles of independent conditioned trajectories and their
//! record-averaged statistics.
//!
//! Averaging the stochastic master equation over measurement records
//! removes the innovation term: E[ρ_c(t)] obeys the unconditional
//! measured master equation ρ̇ = (𝓛 + Γ_m𝓓[c])ρ.  When the steady state
//! is measurement-invariant (𝓓[c]ρ_ss = 0), the ensemble prepared in
//! ρ_ss therefore stays at ρ_ss for every Γ_m — even though individual
//! trajectories localize and purify.  This module makes both halves of
//! that statement quantitative: the mean state and its distance to a
//! reference (the "uncollapse" metric), and trajectory-resolved
//! localization diagnostics (mean purity, bimodal histograms,
//! threshold-crossing fractions).
//!
//! Reproducibility contract: per-trajectory seeds derive from
//! `(base_seed, index)` via [`crate::noise::derive_trajectory_seed`], the
//! parallel map collects results in index order, and all reductions are
//! deterministic pairwise sums — so the statistics are bit-identical
//! regardless of thread count or scheduling.  See Breuer & Petruccione,
//! *The Theory of Open Quantum Systems* (Oxford, 2002), §6, and Wiseman
//! & Milburn, *Quantum Measurement and Control* (Cambridge, 2010), ch. 4.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::monitor::{measured_liouvillian, MonitoringSpec};
use crate::noise::derive_trajectory_seed;
use crate::operator::{check_dims, C64, DensityMatrix, Operator};
use crate::superop::vectorize;
use crate::trajectory::{simulate_trajectory_impl, TrajectoryConfig};

/// Positivity tolerance for the ensemble mean state: a finite-N average
/// of valid states is positive up to summation rounding, so this is far
/// looser than it needs to be.
pub const ENSEMBLE_PSD_TOL: f64 = 1e-4;

/// Number of bins in the localization histogram.
pub const LOCALIZATION_BINS: usize = 40;

/// Parameters for an ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    n_trajectories: usize,
    base_seed: u64,
    trajectory: TrajectoryConfig,
    observables: Vec<(String, Operator)>,
    localization_observable: Option<String>,
}

impl EnsembleConfig {
    /// Validates n ≥ 1, unique observable names, and Hermitian
    /// observables (defect ≤ 1e-12 relative).
    pub fn new(
        n_trajectories: usize,
        base_seed: u64,
        trajectory: TrajectoryConfig,
        observables: Vec<(String, Operator)>,
    ) -> Result<Self> {
        if n_trajectories == 0 {
            return Err(Error::RangeError {
                field: "n_trajectories",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        let mut errors = Vec::new();
        for (i, (name, op)) in observables.iter().enumerate() {
            if observables[..i].iter().any(|(other, _)| other == name) {
                errors.push(format!("duplicate observable name '{name}'"));
            }
            let tol = 1e-12 * op.frobenius_norm().max(1.0);
            let defect = op.hermiticity_defect();
            if defect > tol {
                errors.push(format!(
                    "observable '{name}' is not Hermitian (defect {defect:.3e} > {tol:.3e})"
                ));
            }
        }
        if !errors.is_empty() {
            return Err(Error::ConfigValidation { errors });
        }
        Ok(Self {
            n_trajectories,
            base_seed,
            trajectory,
            observables,
            localization_observable: None,
        })
    }

    /// Replaces the ensemble size (CLI `--n-trajectories` override).
    pub fn with_n_trajectories(mut self, n_trajectories: usize) -> Result<Self> {
        if n_trajectories == 0 {
            return Err(Error::RangeError {
                field: "n_trajectories",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        self.n_trajectories = n_trajectories;
        Ok(self)
    }

    /// Replaces the base seed (CLI `--seed` override).
    pub fn with_base_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    /// Designates one declared observable for localization diagnostics
    /// (histogram and [`bimodality_report`]).
    pub fn with_localization_observable(mut self, name: &str) -> Result<Self> {
        if !self.observables.iter().any(|(n, _)| n == name) {
            return Err(Error::UnknownObservable { name: name.to_owned() });
        }
        self.localization_observable = Some(name.to_owned());
        Ok(self)
    }

    /// Number of trajectories.
    pub fn n_trajectories(&self) -> usize {
        self.n_trajectories
    }

    /// Base seed; trajectory k uses `derive_trajectory_seed(base, k)`.
    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    /// The shared per-trajectory integration config (its seed field is
    /// replaced per member).
    pub fn trajectory(&self) -> &TrajectoryConfig {
        &self.trajectory
    }

    /// Named Hermitian observables tracked per sampled time.
    pub fn observables(&self) -> &[(String, Operator)] {
        &self.observables
    }

    /// The designated localization observable, if any.
    pub fn localization_observable(&self) -> Option<&str> {
        self.localization_observable.as_deref()
    }
}

/// Mean and standard error of one observable on the sampled grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    /// Observable name from the config.
    pub name: String,
    /// E[⟨A⟩_c](t) per sampled time.
    pub mean: Vec<f64>,
    /// Sample standard error (Bessel-corrected; 0 for n = 1).
    pub std_error: Vec<f64>,
}

/// Binned distribution of the localization observable at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// The sampled time the histogram was taken at.
    pub time: f64,
    /// Bin edges, length = bins + 1, spanning ±spectral bound.
    pub edges: Vec<f64>,
    /// Trajectory counts per bin.
    pub counts: Vec<usize>,
}

/// Conditioned expectations of the designated localization observable,
/// per sampled time (outer) and surviving trajectory (inner, in
/// trajectory-index order).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationValues {
    /// Name of the designated observable.
    pub name: String,
    /// values[time_index][trajectory].
    pub values: Vec<Vec<f64>>,
}

/// Record-averaged statistics of an ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    /// Sampled time grid, shared by all trajectories.
    pub times: Vec<f64>,
    /// E[ρ_c(t)] per sampled time.
    pub mean_state: Vec<DensityMatrix>,
    /// Per-observable mean and standard error series.
    pub observable_means: Vec<ObservableSeries>,
    /// Mean conditioned purity E[Tr ρ_c²](t).
    pub purity_mean: Vec<f64>,
    /// Distribution of the localization observable at the final time
    /// (present iff one was designated).
    pub localization_histogram: Option<Histogram>,
    /// Raw localization values behind the histogram and
    /// [`bimodality_report`].
    pub localization: Option<LocalizationValues>,
    /// Configured ensemble size.
    pub n_trajectories: usize,
    /// Trajectories that aborted (≤ 1% tolerated; excluded from all
    /// statistics).
    pub n_aborted: usize,
}

/// One trajectory reduced to flat per-time numbers (layout documented in
/// `run_ensemble`): keeping only f64 blocks caps memory and makes the
/// deterministic pairwise reduction trivial.
struct TrajBlock {
    times: Vec<f64>,
    flat: Vec<f64>,
    localization: Option<Vec<f64>>,
}

/// Deterministic pairwise (cascade) summation over equal-length slices.
///
/// The reduction tree depends only on the number of inputs, never on
/// scheduling, and keeps rounding growth at O(log n).
fn pairwise_sum(parts: &[&[f64]]) -> Vec<f64> {
    match parts.len() {
        0 => Vec::new(),
        1 => parts[0].to_vec(),
        n => {
            let (a, b) = parts.split_at(n / 2);
            let mut left = pairwise_sum(a);
            let right = pairwise_sum(b);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l += *r;
            }
            left
        }
    }
}

/// Tr[Aρ] as the plain (unconjugated) dot of w_A = vec(Aᵀ) with vec(ρ),
/// summed in index order so every caller reduces identically.
fn dot_re(w: &DVector<C64>, v: &DVector<C64>) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (a, b) in w.iter().zip(v.iter()) {
        acc += a * b;
    }
    acc.re
}

/// Runs `config.n_trajectories` independent trajectories and reduces
/// them to [`EnsembleStats`].
///
/// Trajectory k is integrated with seed `derive_trajectory_seed(base_seed,
/// k)`; members run in parallel (rayon) but are collected in index order
/// and reduced by pairwise summation, so the output is bit-identical for
/// any thread count.  Individual failures are tolerated up to 1% of the
/// ensemble (failed members are excluded and counted in `n_aborted`);
/// beyond that the run fails with `TrajectoryFailures` carrying the first
/// underlying error.
pub fn run_ensemble(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    spec: &MonitoringSpec,
    config: &EnsembleConfig,
) -> Result<EnsembleStats> {
    check_dims("run_ensemble", spec.c(), rho0.operator())?;
    measured_liouvillian(model, spec)?; // surface dimension errors up front

    let dim = model.dim();
    let sdim = dim * dim;
    let n_obs = config.observables.len();
    // Flat block layout per sampled time:
    //   [0, 2·d²)                  state re/im pairs (column-major vec(ρ))
    //   [2·d², 2·d² + n_obs)       observable values
    //   [.., 2·d² + 2·n_obs)       squared observable values (for SE)
    //   [last]                     purity
    let width = 2 * sdim + 2 * n_obs + 1;

    let obs_w: Vec<DVector<C64>> = config
        .observables
        .iter()
        .map(|(_, a)| {
            let mut w = DVector::zeros(sdim);
            for i in 0..dim {
                for j in 0..dim {
                    w[i * dim + j] = a.get(i, j);
                }
            }
            w
        })
        .collect();
    let loc_index = config
        .localization_observable
        .as_ref()
        .map(|name| config.observables.iter().position(|(n, _)| n == name).expect("validated"));

    let results: Vec<Result<TrajBlock>> = (0..config.n_trajectories)
        .into_par_iter()
        .map(|k| {
            let seed = derive_trajectory_seed(config.base_seed, k as u64);
            let traj_cfg = config.trajectory.clone().with_seed(seed);
            let path = simulate_trajectory_impl(rho0, model, spec, &traj_cfg, false)?;
            let n_t = path.times.len();
            let mut flat = vec![0.0f64; n_t * width];
            let mut localization = loc_index.map(|_| vec![0.0f64; n_t]);
            for (ti, state) in path.states.iter().enumerate() {
                let v = vectorize(state.operator());
                let base = ti * width;
                for (k2, z) in v.iter().enumerate() {
                    flat[base + 2 * k2] = z.re;
                    flat[base + 2 * k2 + 1] = z.im;
                }
                for (oi, w) in obs_w.iter().enumerate() {
                    let val = dot_re(w, &v);
                    flat[base + 2 * sdim + oi] = val;
                    flat[base + 2 * sdim + n_obs + oi] = val * val;
                    if loc_index == Some(oi) {
                        if let Some(loc) = localization.as_mut() {
                            loc[ti] = val;
                        }
                    }
                }
                flat[base + 2 * sdim + 2 * n_obs] = state.purity();
            }
            Ok(TrajBlock { times: path.times, flat, localization })
        })
        .collect();

    let total = config.n_trajectories;
    let failed = results.iter().filter(|r| r.is_err()).count();
    if failed > 0 {
        let threshold = total as f64 * 0.01;
        if failed as f64 > threshold {
            let first = results
                .into_iter()
                .find_map(|r| r.err())
                .expect("at least one failure present");
            return Err(Error::TrajectoryFailures { failed, total, first: Box::new(first) });
        }
    }
    let blocks: Vec<TrajBlock> = results.into_iter().filter_map(|r| r.ok()).collect();
    let n_eff = blocks.len();
    let times = blocks[0].times.clone();
    let n_t = times.len();
    for b in &blocks {
        debug_assert_eq!(b.times, times);
        debug_assert_eq!(b.flat.len(), n_t * width);
    }

    let flat_refs: Vec<&[f64]> = blocks.iter().map(|b| b.flat.as_slice()).collect();
    let sums = pairwise_sum(&flat_refs);
    let n_f = n_eff as f64;

    let mut mean_state = Vec::with_capacity(n_t);
    let mut purity_mean = Vec::with_capacity(n_t);
    let mut obs_mean = vec![Vec::with_capacity(n_t); n_obs];
    let mut obs_se = vec![Vec::with_capacity(n_t); n_obs];
    for ti in 0..n_t {
        let base = ti * width;
        let entries: Vec<C64> = (0..sdim)
            .map(|k| C64::new(sums[base + 2 * k] / n_f, sums[base + 2 * k + 1] / n_f))
            .collect();
        let op = Operator::from_matrix(DMatrix::from_column_slice(dim, dim, &entries))?;
        let state = DensityMatrix::with_tolerances(
            op,
            DensityMatrix::HERMITICITY_TOL,
            DensityMatrix::TRACE_TOL,
            ENSEMBLE_PSD_TOL,
        )?;
        mean_state.push(state);
        for oi in 0..n_obs {
            let mean = sums[base + 2 * sdim + oi] / n_f;
            let sum_sq = sums[base + 2 * sdim + n_obs + oi];
            let se = if n_eff > 1 {
                let var = ((sum_sq - n_f * mean * mean) / (n_f - 1.0)).max(0.0);
                (var / n_f).sqrt()
            } else {
                0.0
            };
            obs_mean[oi].push(mean);
            obs_se[oi].push(se);
        }
        purity_mean.push(sums[base + 2 * sdim + 2 * n_obs] / n_f);
    }

    let observable_means = config
        .observables
        .iter()
        .zip(obs_mean.into_iter().zip(obs_se))
        .map(|((name, _), (mean, std_error))| ObservableSeries {
            name: name.clone(),
            mean,
            std_error,
        })
        .collect();

    let (localization_histogram, localization) = match loc_index {
        None => (None, None),
        Some(oi) => {
            let name = config.observables[oi].0.clone();
            let mut values = vec![Vec::with_capacity(n_eff); n_t];
            for b in &blocks {
                let loc = b.localization.as_ref().expect("designated observable present");
                for (ti, val) in loc.iter().enumerate() {
                    values[ti].push(*val);
                }
            }
            let bound = {
                let b = config.observables[oi].1.spectral_bound();
                if b > 0.0 {
                    b
                } else {
                    1.0
                }
            };
            let bins = LOCALIZATION_BINS;
            let edges: Vec<f64> =
                (0..=bins).map(|k| bound * (2.0 * k as f64 / bins as f64 - 1.0)).collect();
            let mut counts = vec![0usize; bins];
            if let Some(final_vals) = values.last() {
                for &x in final_vals {
                    let idx = (((x + bound) / (2.0 * bound)) * bins as f64).floor();
                    let idx = (idx.max(0.0) as usize).min(bins - 1);
                    counts[idx] += 1;
                }
            }
            let hist =
                Histogram { time: *times.last().expect("nonempty grid"), edges, counts };
            (Some(hist), Some(LocalizationValues { name, values }))
        }
    };

    Ok(EnsembleStats {
        times,
        mean_state,
        observable_means,
        purity_mean,
        localization_histogram,
        localization,
        n_trajectories: total,
        n_aborted: failed,
    })
}

/// The dissipative-uncollapse metric d(t) = ‖E[ρ_c(t)] − ρ_ref‖_F.
///
/// For a measurement-invariant fixture prepared in ρ_ss this stays at the
/// Monte-Carlo noise floor (≈ √2·mixing-std/√n on a qubit) for all t; a
/// departure signals a genuinely measurement-shifted ensemble.
pub fn dissipative_uncollapse_metric(
    stats: &EnsembleStats,
    rho_ref: &DensityMatrix,
) -> Result<Vec<f64>> {
    if stats.mean_state.is_empty() {
        return Err(Error::GridMismatch {
            context: "dissipative_uncollapse_metric",
            detail: "ensemble statistics contain no sampled times".to_owned(),
        });
    }
    let dim = stats.mean_state[0].dim();
    if rho_ref.dim() != dim {
        return Err(Error::GridMismatch {
            context: "dissipative_uncollapse_metric",
            detail: format!(
                "reference state dimension {} does not match ensemble dimension {}",
                rho_ref.dim(),
                dim
            ),
        });
    }
    Ok(stats
        .mean_state
        .iter()
        .map(|m| m.operator().frobenius_distance(rho_ref.operator()))
        .collect())
}

/// Fraction of trajectories with |⟨obs⟩_c| > threshold at each sampled
/// time, for the designated localization observable.
pub fn bimodality_report(stats: &EnsembleStats, threshold: f64) -> Result<Vec<f64>> {
    let loc = stats.localization.as_ref().ok_or_else(|| Error::UnknownObservable {
        name: "(no localization observable designated)".to_owned(),
    })?;
    Ok(loc
        .values
        .iter()
        .map(|vals| {
            if vals.is_empty() {
                0.0
            } else {
                vals.iter().filter(|v| v.abs() > threshold).count() as f64 / vals.len() as f64
            }
        })
        .collect())
}
