//! Exact finite-state computation: transition matrices, spectra, distribution
//! propagation, the invariant measure, and exact error probabilities obtained
//! by conditioning on the selective population size `K`.

use crate::binom::{self, choose, LnFactorial};
use crate::dist::{tv_slices, DistError, DistVec};
use crate::mixture;
use crate::model::ModelParams;
use rayon::prelude::*;
use thiserror::Error;

pub use crate::dist::tv_distance;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("K = {k} out of range 0..={max}")]
    KOutOfRange { k: u32, max: u32 },
    #[error("theta = {theta} out of range 0..={max}")]
    ThetaOutOfRange { theta: u32, max: u32 },
    #[error("dimension mismatch: vector of length {vec_len} vs matrix of size {mat_len}")]
    Dimension { vec_len: usize, mat_len: usize },
    #[error("power iteration did not reach residual {tol} within {cap} iterations")]
    NonConvergence { tol: f64, cap: u64 },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Which chain a matrix describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// One noise presentation (the forgetting step).
    Forgetting,
    /// One presentation of the learnt signal to a non-activated readout
    /// neuron: pure depression, lower triangular.
    LearningNonselective,
    /// One presentation to an activated readout neuron: pure potentiation,
    /// upper triangular.
    LearningSelective,
    /// Moment-space update of the mixing law, upper triangular.
    Moment,
    /// Change of basis between moment vectors and state laws; not stochastic.
    Intertwiner,
}

/// Dense `(K+1) x (K+1)` matrix in row-major order.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    k: usize,
    kind: MatrixKind,
    data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.k + 1) + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.k + 1;
        &self.data[i * n..(i + 1) * n]
    }

    /// Maximum deviation of a row sum from one; meaningful for the
    /// stochastic kinds only.
    pub fn max_row_sum_error(&self) -> f64 {
        let n = self.k + 1;
        (0..n)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn zeros(k: usize, kind: MatrixKind) -> Self {
        Self {
            k,
            kind,
            data: vec![0.0; (k + 1) * (k + 1)],
        }
    }
}

fn check_k(params: &ModelParams, k: u32) -> Result<(), ExactError> {
    if k > params.n {
        Err(ExactError::KOutOfRange { k, max: params.n })
    } else {
        Ok(())
    }
}

/// Transition matrix of the synaptic current under one noise presentation.
///
/// Row `i` mixes the two stimulus branches: with probability `1 - f` the
/// current drops by `Bin(i, f q01)`; with probability `f` it loses
/// `Bin(i, (1-f) q10)` strong synapses and gains `Bin(K-i, f q+)` weak ones,
/// the two draws independent.
pub fn build_forgetting_matrix(
    params: &ModelParams,
    k: u32,
) -> Result<TransitionMatrix, ExactError> {
    check_k(params, k)?;
    let k = k as usize;
    let tbl = LnFactorial::new(k.max(1));
    let f = params.f;
    let p_down0 = params.f * params.q01_minus;
    let p_down1 = (1.0 - params.f) * params.q10_minus;
    let p_up1 = params.f * params.q_plus;

    let mut m = TransitionMatrix::zeros(k, MatrixKind::Forgetting);
    let n = k + 1;
    for i in 0..=k {
        let row = &mut m.data[i * n..(i + 1) * n];
        let down0 = binom::pmf(i, p_down0, &tbl);
        for (d, w) in down0.iter().enumerate() {
            row[i - d] += (1.0 - f) * w;
        }
        let down1 = binom::pmf(i, p_down1, &tbl);
        let up1 = binom::pmf(k - i, p_up1, &tbl);
        for (l, wl) in down1.iter().enumerate() {
            if *wl == 0.0 {
                continue;
            }
            let base = i - l;
            for (u, wu) in up1.iter().enumerate() {
                row[base + u] += f * wl * wu;
            }
        }
    }
    Ok(m)
}

/// One-presentation learning kernels `(nonselective, selective)`.
///
/// The nonselective kernel depresses each strong synapse with probability
/// `q01`; the selective kernel potentiates each weak synapse with
/// probability `q+`. An `r`-presentation learning phase is the `r`-th power.
pub fn build_learning_matrices(
    params: &ModelParams,
    k: u32,
) -> Result<(TransitionMatrix, TransitionMatrix), ExactError> {
    check_k(params, k)?;
    let k = k as usize;
    let tbl = LnFactorial::new(k.max(1));
    let n = k + 1;

    let mut p0 = TransitionMatrix::zeros(k, MatrixKind::LearningNonselective);
    let mut p1 = TransitionMatrix::zeros(k, MatrixKind::LearningSelective);
    for i in 0..=k {
        let down = binom::pmf(i, params.q01_minus, &tbl);
        for (d, w) in down.iter().enumerate() {
            p0.data[i * n + (i - d)] = *w;
        }
        let up = binom::pmf(k - i, params.q_plus, &tbl);
        for (u, w) in up.iter().enumerate() {
            p1.data[i * n + (i + u)] = *w;
        }
    }
    Ok((p0, p1))
}

/// Upper-triangular moment-update matrix: acting on the right of a row vector
/// of mixing-law moments, it performs one forgetting step. Its diagonal holds
/// the eigenvalues of the forgetting matrix.
pub fn build_moment_matrix(params: &ModelParams, k: u32) -> TransitionMatrix {
    let k = k as usize;
    let n = k + 1;
    let f = params.f;
    let lam1 = params.decay_selective();
    let lam0 = params.decay_nonselective();
    let drift = params.potentiation_drift();
    let mut m = TransitionMatrix::zeros(k, MatrixKind::Moment);
    for i in 0..=k {
        for j in i..=k {
            m.data[i * n + j] = f * choose(j, i) * lam1.powi(i as i32) * drift.powi((j - i) as i32);
        }
        m.data[i * n + i] += (1.0 - f) * lam0.powi(i as i32);
    }
    m
}

/// Lower-triangular change of basis with `Q[i][j] = C(K,i) C(i,j) (-1)^(i-j)`;
/// a row vector of moments times `Q` is the corresponding Binomial-mixture
/// law. Entries are exact integers, so use only for small `K`.
pub fn build_intertwiner(k: u32) -> TransitionMatrix {
    let k = k as usize;
    let n = k + 1;
    let mut m = TransitionMatrix::zeros(k, MatrixKind::Intertwiner);
    for i in 0..=k {
        for j in 0..=i {
            let sign = if (i - j) % 2 == 0 { 1.0 } else { -1.0 };
            m.data[i * n + j] = sign * choose(k, i) * choose(i, j);
        }
    }
    m
}

/// `nu * M^steps`.
pub fn propagate(
    dist: &DistVec,
    matrix: &TransitionMatrix,
    steps: u32,
) -> Result<DistVec, ExactError> {
    if dist.len() != matrix.dim() {
        return Err(ExactError::Dimension {
            vec_len: dist.len(),
            mat_len: matrix.dim(),
        });
    }
    let mut v = dist.as_slice().to_vec();
    let mut buf = vec![0.0; v.len()];
    for _ in 0..steps {
        step_in_place(&v, matrix, &mut buf);
        std::mem::swap(&mut v, &mut buf);
    }
    Ok(DistVec::new(v)?)
}

#[inline]
fn step_in_place(v: &[f64], matrix: &TransitionMatrix, out: &mut [f64]) {
    out.fill(0.0);
    let n = v.len();
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let row = &matrix.data[i * n..(i + 1) * n];
        for (o, m) in out.iter_mut().zip(row.iter()) {
            *o += vi * m;
        }
    }
}

const INVARIANT_TOL: f64 = 1e-12;

/// Invariant law of the forgetting chain at population size `K`, by power
/// iteration to residual `1e-12` in total variation.
pub fn invariant_measure(params: &ModelParams, k: u32) -> Result<DistVec, ExactError> {
    let m = build_forgetting_matrix(params, k)?;
    invariant_from_matrix(params, &m)
}

/// Power iteration reusing an already-built forgetting matrix.
pub fn invariant_from_matrix(
    params: &ModelParams,
    matrix: &TransitionMatrix,
) -> Result<DistVec, ExactError> {
    let k = matrix.k();
    if k == 0 {
        return Ok(DistVec::point_mass(0, 0));
    }
    let rate = params.contraction_rate();
    let cap = 10 * (INVARIANT_TOL.ln() / rate.ln()).ceil().max(1.0) as u64;
    let tbl = LnFactorial::new(k);
    // Start at the Binomial moment-matched to the stationary mixing mean.
    let mut v = binom::pmf(k, mixture::stationary_weight_mean(params), &tbl);
    let mut buf = vec![0.0; k + 1];
    for _ in 0..cap {
        step_in_place(&v, matrix, &mut buf);
        let s: f64 = buf.iter().sum();
        buf.iter_mut().for_each(|x| *x /= s);
        let residual = tv_slices(&v, &buf);
        std::mem::swap(&mut v, &mut buf);
        if residual <= INVARIANT_TOL {
            return Ok(DistVec::new(v)?);
        }
    }
    Err(ExactError::NonConvergence {
        tol: INVARIANT_TOL,
        cap,
    })
}

/// Closed-form spectrum of the stochastic kinds, descending.
pub fn closed_form_spectrum(params: &ModelParams, k: u32, kind: MatrixKind) -> Vec<f64> {
    let vals: Vec<f64> = (0..=k)
        .map(|i| match kind {
            MatrixKind::Forgetting | MatrixKind::Moment => params.eigenvalue(i),
            MatrixKind::LearningNonselective => (1.0 - params.q01_minus).powi(i as i32),
            MatrixKind::LearningSelective => (1.0 - params.q_plus).powi(i as i32),
            MatrixKind::Intertwiner => panic!("the intertwiner has no closed-form spectrum"),
        })
        .collect();
    let mut vals = vals;
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Numerically computed eigenvalues (real parts), descending.
///
/// Exactly triangular matrices are already in Schur form, so their diagonal
/// is read off directly; anything else is balanced by two-sided diagonal
/// scaling and sent through the QR iteration. Without balancing the QR
/// iteration loses several digits on these strongly graded matrices.
pub fn eigenvalues(matrix: &TransitionMatrix) -> Vec<f64> {
    let n = matrix.dim();
    let lower = (0..n).all(|i| (i + 1..n).all(|j| matrix.entry(i, j) == 0.0));
    let upper = (0..n).all(|i| (0..i).all(|j| matrix.entry(i, j) == 0.0));
    let mut vals: Vec<f64> = if lower || upper {
        (0..n).map(|i| matrix.entry(i, i)).collect()
    } else {
        let mut a = matrix.data.clone();
        balance_in_place(&mut a, n);
        nalgebra::DMatrix::from_row_slice(n, n, &a)
            .complex_eigenvalues()
            .iter()
            .map(|c| c.re)
            .collect()
    };
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    vals
}

/// Osborne balancing with powers of two; leaves eigenvalues unchanged.
fn balance_in_place(a: &mut [f64], n: usize) {
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[j * n + i].abs()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| a[i * n + j].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut scale = 1.0f64;
            let mut g = r / 2.0;
            while c < g {
                scale *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                scale /= 2.0;
                c /= 4.0;
            }
            if (c + r) / scale < 0.95 * s && scale != 1.0 {
                done = false;
                for j in 0..n {
                    a[i * n + j] /= scale;
                }
                for j in 0..n {
                    a[j * n + i] *= scale;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// How to treat the selective population size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KPolicy {
    /// Work at a single fixed `K`.
    Conditioned(u32),
    /// Average over `K ~ Bin(N, f)`, truncated to six standard deviations
    /// around the mean and renormalized.
    Mixed,
}

/// `Bin(N, f)` weights over the retained `K` range, renormalized; the second
/// return value is the truncated mass.
pub fn k_grid(params: &ModelParams) -> (Vec<(u32, f64)>, f64) {
    let n = params.n as usize;
    let mean = params.mean_selective();
    let sd = (mean * (1.0 - params.f)).sqrt();
    let lo = ((mean - 6.0 * sd).floor().max(0.0)) as usize;
    let hi = ((mean + 6.0 * sd).ceil() as usize).min(n);
    let tbl = LnFactorial::new(n);
    let mut grid: Vec<(u32, f64)> = (lo..=hi)
        .map(|k| (k as u32, binom::pmf_at(n, params.f, k, &tbl)))
        .collect();
    let kept: f64 = grid.iter().map(|(_, w)| w).sum();
    for (_, w) in grid.iter_mut() {
        *w /= kept;
    }
    (grid, 1.0 - kept)
}

/// Post-learning laws of both conditional chains for `t = 1..=t_max`,
/// averaged over the `K` policy.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub t_max: u32,
    /// Laws of the current given the readout neuron was inactive at
    /// learning; `dist0[t-1][v]` is `P(h_t^0 = v)`.
    pub dist0: Vec<Vec<f64>>,
    pub dist1: Vec<Vec<f64>>,
    /// Mass dropped by the `K`-grid truncation (zero when conditioned).
    pub truncated_mass: f64,
}

impl Evolution {
    pub fn v_max(&self) -> usize {
        self.dist0[0].len() - 1
    }
}

/// Runs the full protocol exactly: stationary state, `r` learning
/// presentations per branch, then `t_max` forgetting steps.
pub fn evolve(params: &ModelParams, t_max: u32, policy: KPolicy) -> Result<Evolution, ExactError> {
    assert!(t_max >= 1);
    let (grid, truncated_mass) = match policy {
        KPolicy::Conditioned(k) => {
            check_k(params, k)?;
            (vec![(k, 1.0)], 0.0)
        }
        KPolicy::Mixed => k_grid(params),
    };
    let v_max = grid.iter().map(|&(k, _)| k).max().unwrap() as usize;
    let tm = t_max as usize;
    let mut dist0 = vec![vec![0.0; v_max + 1]; tm];
    let mut dist1 = vec![vec![0.0; v_max + 1]; tm];

    // Chunked so peak memory stays bounded while accumulation order stays
    // fixed (grid order, not thread order).
    for chunk in grid.chunks(32) {
        let results: Vec<(u32, f64, Trajectories)> = chunk
            .par_iter()
            .map(|&(k, w)| (k, w, evolve_one_k(params, k, t_max).unwrap()))
            .collect();
        for (_, w, traj) in &results {
            for t in 0..tm {
                for (v, p) in traj.nu0[t].iter().enumerate() {
                    dist0[t][v] += w * p;
                }
                for (v, p) in traj.nu1[t].iter().enumerate() {
                    dist1[t][v] += w * p;
                }
            }
        }
    }
    Ok(Evolution {
        t_max,
        dist0,
        dist1,
        truncated_mass,
    })
}

struct Trajectories {
    nu0: Vec<Vec<f64>>,
    nu1: Vec<Vec<f64>>,
}

fn evolve_one_k(params: &ModelParams, k: u32, t_max: u32) -> Result<Trajectories, ExactError> {
    let p = build_forgetting_matrix(params, k)?;
    let (p0, p1) = build_learning_matrices(params, k)?;
    let pi = invariant_from_matrix(params, &p)?;
    let mut nu0 = propagate(&pi, &p0, params.r)?.as_slice().to_vec();
    let mut nu1 = propagate(&pi, &p1, params.r)?.as_slice().to_vec();
    let mut out0 = Vec::with_capacity(t_max as usize);
    let mut out1 = Vec::with_capacity(t_max as usize);
    let mut buf = vec![0.0; k as usize + 1];
    for t in 1..=t_max {
        out0.push(nu0.clone());
        out1.push(nu1.clone());
        if t < t_max {
            step_in_place(&nu0, &p, &mut buf);
            std::mem::swap(&mut nu0, &mut buf);
            step_in_place(&nu1, &p, &mut buf);
            std::mem::swap(&mut nu1, &mut buf);
        }
    }
    Ok(Trajectories {
        nu0: out0,
        nu1: out1,
    })
}

/// Exact error curves of the threshold readout at `theta`.
#[derive(Clone, Debug)]
pub struct ErrorCurves {
    /// `pe0[t-1] = P(h_t^0 > theta)` — false positive.
    pub pe0: Vec<f64>,
    /// `pe1[t-1] = P(h_t^1 <= theta)` — false negative.
    pub pe1: Vec<f64>,
}

pub fn error_curves(
    params: &ModelParams,
    theta: u32,
    t_max: u32,
    policy: KPolicy,
) -> Result<ErrorCurves, ExactError> {
    if theta > params.n {
        return Err(ExactError::ThetaOutOfRange {
            theta,
            max: params.n,
        });
    }
    let ev = evolve(params, t_max, policy)?;
    Ok(curves_from_evolution(&ev, theta))
}

pub fn curves_from_evolution(ev: &Evolution, theta: u32) -> ErrorCurves {
    let th = theta as i64;
    let pe0 = ev
        .dist0
        .iter()
        .map(|d| {
            let start = (th + 1).max(0) as usize;
            if start >= d.len() {
                0.0
            } else {
                d[start..].iter().sum()
            }
        })
        .collect();
    let pe1 = ev
        .dist1
        .iter()
        .map(|d| {
            let end = ((th + 1).max(0) as usize).min(d.len());
            d[..end].iter().sum()
        })
        .collect();
    ErrorCurves { pe0, pe1 }
}

/// Estimated memory time: the largest (over thresholds) first time either
/// error reaches `delta`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TStar {
    pub theta: u32,
    pub t_star: u32,
    pub censored: bool,
}

pub fn empirical_t_star(
    params: &ModelParams,
    delta: f64,
    t_max: u32,
    policy: KPolicy,
) -> Result<TStar, ExactError> {
    assert!(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
    let ev = evolve(params, t_max, policy)?;
    Ok(t_star_from_evolution(&ev, delta))
}

pub fn t_star_from_evolution(ev: &Evolution, delta: f64) -> TStar {
    let v_max = ev.v_max();
    let tm = ev.t_max as usize;
    // crossing[theta]: first t with pe0 or pe1 at that theta >= delta.
    let censor = ev.t_max + 1;
    let mut crossing = vec![censor; v_max + 1];
    for t in 0..tm {
        // Sweep theta once per t via running tail/head sums.
        let d0 = &ev.dist0[t];
        let d1 = &ev.dist1[t];
        let mut tail0 = 1.0; // P(h0 > theta), theta = -1
        let mut head1 = 0.0;
        for theta in 0..=v_max {
            tail0 -= d0[theta];
            head1 += d1[theta];
            if crossing[theta] > ev.t_max && tail0.max(head1) >= delta {
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
    TStar {
        theta,
        t_star,
        censored: t_star > ev.t_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig2() -> ModelParams {
        ModelParams::new(1000, 0.1, 0.8, 0.8, 0.2, 1).unwrap()
    }

    #[test]
    fn k_zero_is_the_trivial_chain() {
        let m = build_forgetting_matrix(&fig2(), 0).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.entry(0, 0), 1.0);
        let pi = invariant_measure(&fig2(), 0).unwrap();
        assert_eq!(pi.as_slice(), &[1.0]);
    }

    #[test]
    fn two_state_rows_match_branch_enumeration() {
        // f = 1/2, q+ = q01 = 1, q10 = 0: from state 0, potentiation happens
        // iff the stimulus hits (prob 1/2) and the coin q+f = 1/2 succeeds.
        let p = ModelParams::new(10, 0.5, 1.0, 1.0, 0.0, 1).unwrap();
        let m = build_forgetting_matrix(&p, 1).unwrap();
        assert_relative_eq!(m.entry(0, 0), 0.75, max_relative = 1e-15);
        assert_relative_eq!(m.entry(0, 1), 0.25, max_relative = 1e-15);
        assert_relative_eq!(m.entry(1, 0), 0.25, max_relative = 1e-15);
        assert_relative_eq!(m.entry(1, 1), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn rows_are_stochastic_at_scale() {
        let m = build_forgetting_matrix(&fig2(), 200).unwrap();
        assert!(m.max_row_sum_error() < 1e-12);
    }

    #[test]
    fn learning_matrices_are_triangular_with_known_spectra() {
        let p = ModelParams::new(100, 0.1, 0.8, 0.5, 0.2, 1).unwrap();
        let (p0, p1) = build_learning_matrices(&p, 2).unwrap();
        for i in 0..=2usize {
            for j in 0..=2usize {
                if j > i {
                    assert_eq!(p0.entry(i, j), 0.0);
                }
                if j < i {
                    assert_eq!(p1.entry(i, j), 0.0);
                }
            }
        }
        let spec0 = eigenvalues(&p0);
        for (got, want) in spec0.iter().zip([1.0, 0.5, 0.25]) {
            assert_relative_eq!(*got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn certain_potentiation_sends_everything_to_k() {
        let p = ModelParams::new(100, 0.1, 1.0, 0.8, 0.2, 1).unwrap();
        let (_, p1) = build_learning_matrices(&p, 7).unwrap();
        let start = DistVec::point_mass(7, 0);
        let out = propagate(&start, &p1, 1).unwrap();
        assert_eq!(out.as_slice()[7], 1.0);
    }

    #[test]
    fn forgetting_spectrum_matches_closed_form() {
        let p = fig2();
        let m = build_forgetting_matrix(&p, 20).unwrap();
        let got = eigenvalues(&m);
        let want = closed_form_spectrum(&p, 20, MatrixKind::Forgetting);
        for (g, w) in got.iter().zip(want.iter()) {
            assert_relative_eq!(*g, *w, max_relative = 1e-8);
        }
    }

    #[test]
    fn zero_steps_is_identity() {
        let p = fig2();
        let m = build_forgetting_matrix(&p, 5).unwrap();
        let v = DistVec::uniform(5);
        assert_eq!(propagate(&v, &m, 0).unwrap(), v);
    }

    #[test]
    fn invariant_measure_is_invariant_and_has_the_right_mean() {
        let p = fig2();
        let k = 40;
        let m = build_forgetting_matrix(&p, k).unwrap();
        let pi = invariant_from_matrix(&p, &m).unwrap();
        let step = propagate(&pi, &m, 1).unwrap();
        assert!(tv_distance(&pi, &step).unwrap() <= 1e-10);
        let want = k as f64 * p.f * p.q_plus
            / ((1.0 - p.f) * (p.q01_minus + p.q10_minus) + p.f * p.q_plus);
        assert_relative_eq!(pi.mean(), want, max_relative = 1e-9);
    }

    #[test]
    fn zero_heterosynaptic_depression_reaches_full_support() {
        let p = ModelParams::new(1000, 0.1, 0.8, 0.8, 0.0, 1).unwrap();
        let pi = invariant_measure(&p, 15).unwrap();
        assert!(pi.as_slice()[15] > 0.0);
    }

    #[test]
    fn r_step_learning_equals_collapsed_kernel() {
        // r presentations compose to a single jump with success probability
        // 1 - (1-q)^r; brute-force Binomial convolution is the oracle.
        let tbl = LnFactorial::new(10);
        for r in [1u32, 3, 7] {
            let p = ModelParams::new(100, 0.1, 0.35, 0.6, 0.2, r).unwrap();
            let k = 10u32;
            let (p0, p1) = build_learning_matrices(&p, k).unwrap();
            let start = invariant_measure(&p, k).unwrap();
            let via_power0 = propagate(&start, &p0, r).unwrap();
            let via_power1 = propagate(&start, &p1, r).unwrap();
            let q0 = 1.0 - (1.0 - p.q01_minus).powi(r as i32);
            let q1 = 1.0 - (1.0 - p.q_plus).powi(r as i32);
            let mut direct0 = vec![0.0; 11];
            let mut direct1 = vec![0.0; 11];
            for (i, &w) in start.as_slice().iter().enumerate() {
                for (d, pd) in binom::pmf(i, q0, &tbl).iter().enumerate() {
                    direct0[i - d] += w * pd;
                }
                for (u, pu) in binom::pmf(10 - i, q1, &tbl).iter().enumerate() {
                    direct1[i + u] += w * pu;
                }
            }
            assert!(tv_slices(via_power0.as_slice(), &direct0) < 1e-13);
            assert!(tv_slices(via_power1.as_slice(), &direct1) < 1e-13);
        }
    }

    #[test]
    fn stationary_errors_sum_to_one() {
        let p = ModelParams::new(300, 0.2, 0.8, 0.8, 0.5, 1).unwrap();
        // Fast-mixing parameters: by t = 200 both branches are back at the
        // invariant law, so the two errors at any theta add to one.
        let curves = error_curves(&p, 10, 200, KPolicy::Conditioned(50)).unwrap();
        let last = curves.pe0.last().unwrap() + curves.pe1.last().unwrap();
        assert_relative_eq!(last, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn more_learning_lowers_the_initial_miss_rate() {
        let k = 60u32;
        let theta = 20u32;
        let mut previous = f64::INFINITY;
        for r in [1u32, 5, 30] {
            let p = ModelParams::new(1000, 0.1, 0.6, 0.8, 0.2, r).unwrap();
            let curves = error_curves(&p, theta, 1, KPolicy::Conditioned(k)).unwrap();
            assert!(curves.pe1[0] <= previous + 1e-15);
            previous = curves.pe1[0];
        }
    }

    #[test]
    fn impossible_error_level_censors() {
        let p = ModelParams::new(200, 0.2, 0.8, 0.8, 0.5, 1).unwrap();
        let ts = empirical_t_star(&p, 1.0, 10, KPolicy::Conditioned(20)).unwrap();
        assert!(ts.censored);
        assert_eq!(ts.t_star, 11);
    }

    #[test]
    fn mixed_policy_truncation_is_negligible() {
        let p = fig2();
        let (grid, lost) = k_grid(&p);
        assert!(lost < 1e-8);
        let total: f64 = grid.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }
}
