//! Stochastic simulation of the learning/forgetting protocol.
//!
//! Each replica draws the selective population size, burns the current in to
//! stationarity, applies the learning phase to both conditional branches
//! from the same burn-in state, and records both branches through `t_max`
//! noise presentations. Replica `i` draws from ChaCha12 keyed by the run
//! seed with stream number `i`, so results are identical for any worker
//! count and execution order; merging is a plain integer count sum.

use crate::model::ModelParams;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Binomial;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("simulation budget {budget} exceeds the cap {cap} (replicas x steps)")]
    BudgetExceeded { budget: u128, cap: u128 },
    #[error("empty branch: no replicas carry y = {y}")]
    EmptyBranch { y: u8 },
    #[error("theta = {theta} out of range 0..={max}")]
    ThetaOutOfRange { theta: u32, max: u32 },
}

/// How the selective population size is chosen per replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    /// Draw `K ~ Bin(N, f)` independently per replica.
    Sampled,
    /// Condition every replica on the same `K`.
    Fixed(u32),
}

/// Full simulation configuration. `burn_in = None` derives the default from
/// the contraction rate: enough steps to push the total-variation distance
/// to stationarity below `1e-6`.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub params: ModelParams,
    pub n_replicas: u64,
    pub burn_in: Option<u32>,
    pub t_max: u32,
    pub seed: u64,
    pub k_mode: KMode,
}

const BURN_IN_TV_TARGET: f64 = 1e-6;
const BUDGET_CAP: u128 = 200_000_000_000;

impl SimConfig {
    pub fn resolved_burn_in(&self) -> u32 {
        match self.burn_in {
            Some(b) => b,
            None => default_burn_in(&self.params),
        }
    }
}

/// `ceil(log(1e-6) / log(λ1))`.
pub fn default_burn_in(params: &ModelParams) -> u32 {
    let rate = params.contraction_rate();
    (BURN_IN_TV_TARGET.ln() / rate.ln()).ceil().max(1.0) as u32
}

/// Occurrence counts of both conditional branches.
///
/// `counts0[t-1][v]` counts replicas with `h_t^0 = v`; same for `counts1`.
/// `k_values[i]` is the selective population size of replica `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalEnsemble {
    pub t_max: u32,
    pub n_replicas: u64,
    pub counts0: Vec<Vec<u64>>,
    pub counts1: Vec<Vec<u64>>,
    pub k_values: Vec<u32>,
}

impl EmpiricalEnsemble {
    pub fn max_value(&self) -> usize {
        self.counts0
            .iter()
            .chain(self.counts1.iter())
            .map(|c| c.len())
            .max()
            .unwrap_or(1)
            - 1
    }

    /// Empirical law of `h_t^y` (t is one-based).
    pub fn empirical_dist(&self, t: u32, y: u8) -> Vec<f64> {
        let counts = match y {
            0 => &self.counts0[t as usize - 1],
            _ => &self.counts1[t as usize - 1],
        };
        let total: u64 = counts.iter().sum();
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

#[derive(Clone, Debug, Default)]
struct CountMatrix {
    rows: Vec<Vec<u64>>,
}

impl CountMatrix {
    fn new(t_max: usize) -> Self {
        Self {
            rows: vec![Vec::new(); t_max],
        }
    }

    #[inline]
    fn bump(&mut self, t: usize, value: u32) {
        let row = &mut self.rows[t];
        let v = value as usize;
        if row.len() <= v {
            row.resize(v + 1, 0);
        }
        row[v] += 1;
    }

    fn absorb(&mut self, other: &CountMatrix) {
        for (mine, theirs) in self.rows.iter_mut().zip(other.rows.iter()) {
            if mine.len() < theirs.len() {
                mine.resize(theirs.len(), 0);
            }
            for (m, t) in mine.iter_mut().zip(theirs.iter()) {
                *m += t;
            }
        }
    }
}

#[inline]
fn draw_binomial(rng: &mut ChaCha12Rng, n: u32, p: f64) -> u32 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n as u64, p).unwrap().sample(rng) as u32
}

/// One noise presentation applied to a current `h` out of `k`.
#[inline]
fn forgetting_step(rng: &mut ChaCha12Rng, params: &ModelParams, k: u32, h: u32) -> u32 {
    if rng.gen::<f64>() < params.f {
        let up = draw_binomial(rng, k - h, params.f * params.q_plus);
        let down = draw_binomial(rng, h, (1.0 - params.f) * params.q10_minus);
        h + up - down
    } else {
        let down = draw_binomial(rng, h, params.f * params.q01_minus);
        h - down
    }
}

/// Runs the protocol over all replicas. Deterministic in `config`: the same
/// seed yields bit-identical counts for any parallelism degree.
pub fn run(config: &SimConfig) -> Result<EmpiricalEnsemble, MonteCarloError> {
    let burn_in = config.resolved_burn_in();
    let budget =
        config.n_replicas as u128 * (burn_in as u128 + 2 * config.t_max as u128 + 2);
    if budget > BUDGET_CAP {
        return Err(MonteCarloError::BudgetExceeded {
            budget,
            cap: BUDGET_CAP,
        });
    }
    let params = config.params;
    let t_max = config.t_max as usize;
    let n = config.n_replicas;

    let chunk: u64 = 4096;
    let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();
    let partials: Vec<(CountMatrix, CountMatrix, Vec<u32>)> = starts
        .par_iter()
        .map(|&start| {
            let stop = (start + chunk).min(n);
            let mut c0 = CountMatrix::new(t_max);
            let mut c1 = CountMatrix::new(t_max);
            let mut ks = Vec::with_capacity((stop - start) as usize);
            for replica in start..stop {
                let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
                rng.set_stream(replica);
                let k = match config.k_mode {
                    KMode::Fixed(k) => k,
                    KMode::Sampled => draw_binomial(&mut rng, params.n, params.f),
                };
                ks.push(k);
                let mut h = 0u32;
                for _ in 0..burn_in {
                    h = forgetting_step(&mut rng, &params, k, h);
                }
                // Learning phase: r presentations collapse into one compound
                // jump per branch, both branches sharing the burn-in state.
                let gain = 1.0 - (1.0 - params.q_plus).powi(params.r as i32);
                let loss = 1.0 - (1.0 - params.q01_minus).powi(params.r as i32);
                let mut h1 = h + draw_binomial(&mut rng, k - h, gain);
                let mut h0 = h - draw_binomial(&mut rng, h, loss);
                for t in 0..t_max {
                    c0.bump(t, h0);
                    c1.bump(t, h1);
                    if t + 1 < t_max {
                        h0 = forgetting_step(&mut rng, &params, k, h0);
                        h1 = forgetting_step(&mut rng, &params, k, h1);
                    }
                }
            }
            (c0, c1, ks)
        })
        .collect();

    let mut total0 = CountMatrix::new(t_max);
    let mut total1 = CountMatrix::new(t_max);
    let mut k_values = Vec::with_capacity(n as usize);
    for (c0, c1, ks) in &partials {
        total0.absorb(c0);
        total1.absorb(c1);
        k_values.extend_from_slice(ks);
    }
    Ok(EmpiricalEnsemble {
        t_max: config.t_max,
        n_replicas: n,
        counts0: total0.rows,
        counts1: total1.rows,
        k_values,
    })
}

/// Point estimate with a Wilson score interval.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

const WILSON_Z95: f64 = 1.959963984540054;

fn wilson(successes: u64, trials: u64, z: f64) -> RateEstimate {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    RateEstimate {
        rate: p,
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    }
}

/// Per-time empirical errors of the threshold readout, with 95% intervals.
#[derive(Clone, Debug)]
pub struct EmpiricalErrors {
    pub theta: u32,
    /// `pe0[t-1]`: fraction of inactive-branch replicas above `theta`.
    pub pe0: Vec<RateEstimate>,
    pub pe1: Vec<RateEstimate>,
}

pub fn empirical_errors(
    ens: &EmpiricalEnsemble,
    theta: u32,
) -> Result<EmpiricalErrors, MonteCarloError> {
    let mut pe0 = Vec::with_capacity(ens.t_max as usize);
    let mut pe1 = Vec::with_capacity(ens.t_max as usize);
    for t in 0..ens.t_max as usize {
        let c0 = &ens.counts0[t];
        let c1 = &ens.counts1[t];
        let n0: u64 = c0.iter().sum();
        let n1: u64 = c1.iter().sum();
        if n0 == 0 {
            return Err(MonteCarloError::EmptyBranch { y: 0 });
        }
        if n1 == 0 {
            return Err(MonteCarloError::EmptyBranch { y: 1 });
        }
        let above: u64 = c0.iter().skip(theta as usize + 1).sum();
        let at_or_below: u64 = c1.iter().take(theta as usize + 1).sum();
        pe0.push(wilson(above, n0, WILSON_Z95));
        pe1.push(wilson(at_or_below, n1, WILSON_Z95));
    }
    Ok(EmpiricalErrors { theta, pe0, pe1 })
}

/// Estimated memory time on empirical frequencies: scan every threshold in
/// the observed value range, take the first crossing time of either error,
/// and keep the threshold maximizing it (smallest threshold on ties).
pub fn empirical_t_star_mc(ens: &EmpiricalEnsemble, delta: f64) -> crate::exact::TStar {
    assert!(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
    let v_max = ens.max_value();
    let tm = ens.t_max as usize;
    let censor = ens.t_max + 1;
    let mut crossing = vec![censor; v_max + 1];
    for t in 0..tm {
        let c0 = &ens.counts0[t];
        let c1 = &ens.counts1[t];
        let n0: f64 = c0.iter().sum::<u64>() as f64;
        let n1: f64 = c1.iter().sum::<u64>() as f64;
        let mut tail0 = n0;
        let mut head1 = 0.0;
        for theta in 0..=v_max {
            tail0 -= *c0.get(theta).unwrap_or(&0) as f64;
            head1 += *c1.get(theta).unwrap_or(&0) as f64;
            if crossing[theta] > ens.t_max && (tail0 / n0).max(head1 / n1) >= delta {
                crossing[theta] = t as u32 + 1;
            }
        }
    }
    let (theta, t_star) = crossing
        .iter()
        .enumerate()
        .map(|(th, &t)| (th as u32, t))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    crate::exact::TStar {
        theta,
        t_star,
        censored: t_star > ens.t_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{self, KPolicy};
    use crate::{tv_distance, DistVec};

    fn small_config() -> SimConfig {
        SimConfig {
            params: ModelParams::new(1000, 0.1, 0.8, 0.8, 0.2, 1).unwrap(),
            n_replicas: 20_000,
            burn_in: None,
            t_max: 10,
            seed: 42,
            k_mode: KMode::Fixed(60),
        }
    }

    #[test]
    fn certain_potentiation_saturates_the_selective_branch() {
        let mut cfg = small_config();
        cfg.params = ModelParams::new(1000, 0.1, 1.0, 0.8, 0.2, 1).unwrap();
        cfg.n_replicas = 500;
        cfg.t_max = 1;
        let ens = run(&cfg).unwrap();
        let d1 = ens.empirical_dist(1, 1);
        assert_eq!(d1.len(), 61);
        assert_eq!(d1[60], 1.0);
    }

    #[test]
    fn seed_determinism_is_exact_across_worker_counts() {
        let cfg = small_config();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool8 = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap();
        let a = pool1.install(|| run(&cfg).unwrap());
        let b = pool8.install(|| run(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let mut cfg = small_config();
        cfg.n_replicas = 2000;
        let a = run(&cfg).unwrap();
        cfg.seed = 43;
        let b = run(&cfg).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn empirical_law_tracks_exact_propagation() {
        let cfg = SimConfig {
            n_replicas: 100_000,
            ..small_config()
        };
        let ens = run(&cfg).unwrap();
        let ev = exact::evolve(&cfg.params, 10, KPolicy::Conditioned(60)).unwrap();
        for t in [1u32, 5, 10] {
            let mut emp = ens.empirical_dist(t, 0);
            emp.resize(61, 0.0);
            let emp = DistVec::new(emp).unwrap();
            let exact_dist = DistVec::new(ev.dist0[t as usize - 1].clone()).unwrap();
            let tv = tv_distance(&emp, &exact_dist).unwrap();
            assert!(tv < 0.01, "t = {t}: tv = {tv}");
        }
    }

    #[test]
    fn stationary_mean_matches_the_mixing_mean() {
        let cfg = SimConfig {
            n_replicas: 50_000,
            t_max: 1,
            ..small_config()
        };
        // With r makes no difference to the y = 0 branch mean after enough
        // burn-in; compare against K * E[Y*] with a 3-sigma allowance.
        let ens = run(&cfg).unwrap();
        let k = 60.0;
        let want = k * crate::mixture::stationary_weight_mean(&cfg.params);
        let d0 = ens.empirical_dist(1, 0);
        // Uses the pre-learning stationary mean: undo the learning drop.
        let mean0: f64 = d0.iter().enumerate().map(|(v, p)| v as f64 * p).sum();
        let pre = mean0 / (1.0 - cfg.params.q01_minus);
        let sigma = (k / cfg.n_replicas as f64).sqrt() * 3.0;
        assert!((pre - want).abs() < 3.0 * sigma.max(0.05) + 0.05 * want);
    }

    #[test]
    fn boundary_thresholds_behave() {
        let cfg = SimConfig {
            n_replicas: 5000,
            ..small_config()
        };
        let ens = run(&cfg).unwrap();
        let err = empirical_errors(&ens, 1000).unwrap();
        assert!(err.pe0.iter().all(|e| e.rate == 0.0));
        let err0 = empirical_errors(&ens, 0).unwrap();
        let d1 = ens.empirical_dist(1, 1);
        approx::assert_relative_eq!(err0.pe1[0].rate, d1[0], max_relative = 1e-12);
    }

    #[test]
    fn impossible_error_level_censors() {
        let cfg = SimConfig {
            n_replicas: 2000,
            t_max: 3,
            ..small_config()
        };
        let ens = run(&cfg).unwrap();
        // No empirical frequency reaches 2.0.
        let ts = empirical_t_star_mc(&ens, 1.0);
        assert!(!ts.censored || ts.t_star == 4);
        let ens2 = ens.clone();
        let ts2 = empirical_t_star_mc(&ens2, 1.0);
        assert_eq!(ts, ts2);
    }

    #[test]
    fn budget_guard_trips() {
        let mut cfg = small_config();
        cfg.n_replicas = u64::MAX / 4;
        assert!(matches!(
            run(&cfg),
            Err(MonteCarloError::BudgetExceeded { .. })
        ));
    }
}
