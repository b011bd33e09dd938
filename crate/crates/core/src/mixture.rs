//! Binomial-mixture machinery.
//!
//! The synaptic-current law stays a Binomial mixture `BinMix(K, g)` along the
//! whole protocol; only the mixing law `g` on `[0, 1]` moves. One noise
//! presentation acts on `g` through two affine branches: with probability `f`
//! the location map `u -> Λ1 u + f q+`, with probability `1 - f` the map
//! `u -> Λ0 u`. This module tracks `g` two ways — as a weighted-atom cloud
//! and as a moment vector — and provides the stationary mixing law, learning
//! maps, support recursions, and the L1 contraction check.

use crate::binom::{self, LnFactorial};
use crate::dist::DistVec;
use crate::model::ModelParams;
use thiserror::Error;

/// Atom weights below this are pruned (with renormalization).
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Atoms closer than this merge into their weight-averaged location.
pub const MERGE_TOLERANCE: f64 = 1e-9;
/// Hard cap on the atom count. Tolerance merging alone does not stop the
/// per-step doubling at useful depths, so past the cap the cheapest adjacent
/// pairs (in transport cost) are merged and the incurred shift is recorded.
pub const DEFAULT_ATOM_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum MixtureError {
    #[error("atom {index} has invalid weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("atom {index} location {location} outside [0,1]")]
    BadLocation { index: usize, location: f64 },
    #[error("weights sum to {sum}, expected 1")]
    Mass { sum: f64 },
    #[error("moment vector violates {0}")]
    MomentInvariant(String),
    #[error("moments-to-law conversion cancelled catastrophically (entry {index} = {value})")]
    NumericalCancellation { index: usize, value: f64 },
    #[error("eigenvalue at order {order} is one; the fixed-point system is singular")]
    SingularFixedPoint { order: usize },
    #[error("degenerate support ordering (Λ0 <= Λ1)")]
    DegenerateSupport,
}

/// One weighted Dirac of a mixing law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub location: f64,
}

/// A finite weighted-atom representation of a mixing distribution on `[0,1]`.
///
/// Atoms are kept sorted by location. `pruned_mass` and `merge_shift`
/// accumulate the total weight dropped by pruning and an upper bound on the
/// Wasserstein-1 cost of all merges, so downstream total-variation error
/// bounds on `BinMix(K, g)` stay explicit (roughly `K * merge_shift`).
#[derive(Clone, Debug)]
pub struct AtomicMixture {
    atoms: Vec<Atom>,
    pruned_mass: f64,
    merge_shift: f64,
}

impl AtomicMixture {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self, MixtureError> {
        for (index, a) in atoms.iter().enumerate() {
            if !(a.weight > 0.0) {
                return Err(MixtureError::BadWeight {
                    index,
                    weight: a.weight,
                });
            }
            if !(0.0..=1.0).contains(&a.location) {
                return Err(MixtureError::BadLocation {
                    index,
                    location: a.location,
                });
            }
        }
        let sum: f64 = atoms.iter().map(|a| a.weight).sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(MixtureError::Mass { sum });
        }
        atoms.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
        Ok(Self {
            atoms,
            pruned_mass: 0.0,
            merge_shift: 0.0,
        })
    }

    pub fn point_mass(location: f64) -> Self {
        Self {
            atoms: vec![Atom {
                weight: 1.0,
                location,
            }],
            pruned_mass: 0.0,
            merge_shift: 0.0,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total weight removed by pruning so far.
    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    /// Accumulated W1 upper bound of all merges so far.
    pub fn merge_shift(&self) -> f64 {
        self.merge_shift
    }

    pub fn min_location(&self) -> f64 {
        self.atoms.first().map_or(0.0, |a| a.location)
    }

    pub fn max_location(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.location)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.location).sum()
    }

    /// `E[Y^k]`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.location.powi(k as i32))
            .sum()
    }

    /// Cumulative distribution function at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let cut = self
            .atoms
            .partition_point(|a| a.location <= x);
        self.atoms[..cut].iter().map(|a| a.weight).sum()
    }

    /// CDF evaluated on an ascending grid in one sweep.
    pub fn cdf_on_grid(&self, grid: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        let mut idx = 0;
        for &x in grid {
            while idx < self.atoms.len() && self.atoms[idx].location <= x {
                acc += self.atoms[idx].weight;
                idx += 1;
            }
            out.push(acc);
        }
        out
    }

    /// First raw moments `E[Y^0..=E[Y^k]]` as a [`MomentVec`].
    pub fn moments(&self, k: u32) -> MomentVec {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut powers: Vec<(f64, f64)> =
            self.atoms.iter().map(|a| (a.weight, 1.0)).collect();
        for order in 0..=k {
            if order > 0 {
                for (atom, p) in self.atoms.iter().zip(powers.iter_mut()) {
                    p.1 *= atom.location;
                }
            }
            m.push(powers.iter().map(|(w, p)| w * p).sum());
        }
        MomentVec(m)
    }
}

/// Merges sorted neighbours within `MERGE_TOLERANCE`, prunes weights below
/// `PRUNE_THRESHOLD`, renormalizes, then enforces the atom cap by merging
/// the cheapest adjacent pairs. Returns (atoms, pruned, shift).
fn compact(atoms: Vec<Atom>, cap: usize) -> (Vec<Atom>, f64, f64) {
    debug_assert!(atoms.windows(2).all(|w| w[0].location <= w[1].location));
    let mut shift = 0.0;
    let mut merged = merge_within(&atoms, MERGE_TOLERANCE, &mut shift);

    let mut pruned = 0.0;
    merged.retain(|a| {
        if a.weight < PRUNE_THRESHOLD {
            pruned += a.weight;
            false
        } else {
            true
        }
    });
    if pruned > 0.0 {
        let kept = 1.0 - pruned;
        for a in merged.iter_mut() {
            a.weight /= kept;
        }
    }

    while merged.len() > cap {
        let excess = merged.len() - cap;
        let mut costs: Vec<f64> = merged
            .windows(2)
            .map(|w| w[0].weight.min(w[1].weight) * (w[1].location - w[0].location))
            .collect();
        let idx = excess.min(costs.len() - 1);
        let (_, threshold, _) =
            costs.select_nth_unstable_by(idx, |a, b| a.partial_cmp(b).unwrap());
        let threshold = *threshold;
        let mut gap_merged = Vec::with_capacity(cap + cap / 8);
        let mut cluster = merged[0];
        for a in merged.iter().skip(1) {
            let cost = cluster.weight.min(a.weight) * (a.location - cluster.location);
            if cost <= threshold && gap_merged.len() + 1 < merged.len() {
                let w = cluster.weight + a.weight;
                let loc = (cluster.weight * cluster.location + a.weight * a.location) / w;
                shift += cluster.weight * (loc - cluster.location).abs()
                    + a.weight * (a.location - loc).abs();
                cluster = Atom {
                    weight: w,
                    location: loc,
                };
            } else {
                gap_merged.push(cluster);
                cluster = *a;
            }
        }
        gap_merged.push(cluster);
        if gap_merged.len() == merged.len() {
            break;
        }
        merged = gap_merged;
    }
    (merged, pruned, shift)
}

fn merge_within(sorted: &[Atom], tol: f64, shift: &mut f64) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(sorted.len());
    // Clusters are anchored at their first atom so no location ever moves by
    // more than the tolerance, even across merge chains.
    let mut anchor = f64::NEG_INFINITY;
    for &a in sorted {
        match out.last_mut() {
            Some(last) if a.location - anchor <= tol => {
                let w = last.weight + a.weight;
                let loc = (last.weight * last.location + a.weight * a.location) / w;
                *shift += last.weight * (loc - last.location).abs()
                    + a.weight * (a.location - loc).abs();
                *last = Atom {
                    weight: w,
                    location: loc,
                };
            }
            _ => {
                anchor = a.location;
                out.push(a);
            }
        }
    }
    out
}

/// One forgetting step of the mixing law: each atom `(w, u)` splits into
/// `(w f, Λ1 u + f q+)` and `(w (1-f), Λ0 u)`, followed by merge and prune.
pub fn apply_forgetting_map(g: &AtomicMixture, params: &ModelParams) -> AtomicMixture {
    apply_forgetting_map_capped(g, params, DEFAULT_ATOM_CAP)
}

pub fn apply_forgetting_map_capped(
    g: &AtomicMixture,
    params: &ModelParams,
    cap: usize,
) -> AtomicMixture {
    let images = branch_images(g, params);
    let (atoms, pruned, shift) = compact(images, cap);
    AtomicMixture {
        atoms,
        pruned_mass: g.pruned_mass + pruned,
        merge_shift: g.merge_shift + shift,
    }
}

/// The two-branch image with no merging or pruning; exact, doubles the atom
/// count. Used where the contraction inequality is checked to full precision.
pub fn apply_forgetting_map_raw(g: &AtomicMixture, params: &ModelParams) -> AtomicMixture {
    AtomicMixture {
        atoms: branch_images(g, params),
        pruned_mass: g.pruned_mass,
        merge_shift: g.merge_shift,
    }
}

/// Both affine branches preserve order, so the combined image is the merge
/// of two already-sorted streams.
fn branch_images(g: &AtomicMixture, params: &ModelParams) -> Vec<Atom> {
    let f = params.f;
    let lam1 = params.decay_selective();
    let lam0 = params.decay_nonselective();
    let drift = params.potentiation_drift();
    let n = g.atoms.len();
    let mut out = Vec::with_capacity(2 * n);
    let mut hit = 0usize;
    let mut miss = 0usize;
    while hit < n || miss < n {
        let hit_loc = if hit < n {
            lam1 * g.atoms[hit].location + drift
        } else {
            f64::INFINITY
        };
        let miss_loc = if miss < n {
            lam0 * g.atoms[miss].location
        } else {
            f64::INFINITY
        };
        if miss_loc <= hit_loc {
            out.push(Atom {
                weight: g.atoms[miss].weight * (1.0 - f),
                location: miss_loc,
            });
            miss += 1;
        } else {
            out.push(Atom {
                weight: g.atoms[hit].weight * f,
                location: hit_loc,
            });
            hit += 1;
        }
    }
    out
}

/// Learning-phase maps applied to the pre-learning mixing law (typically the
/// stationary one): the selective branch pulls every location toward one,
/// `u -> 1 - (1-q+)^r (1-u)`; the nonselective branch scales toward zero,
/// `u -> (1-q01)^r u`. Weights are untouched.
pub fn apply_learning_maps(
    g: &AtomicMixture,
    params: &ModelParams,
) -> (AtomicMixture, AtomicMixture) {
    let keep_weak = (1.0 - params.q_plus).powi(params.r as i32);
    let keep_strong = (1.0 - params.q01_minus).powi(params.r as i32);
    let selective = AtomicMixture {
        atoms: g
            .atoms
            .iter()
            .map(|a| Atom {
                weight: a.weight,
                location: 1.0 - keep_weak * (1.0 - a.location),
            })
            .collect(),
        pruned_mass: g.pruned_mass,
        merge_shift: g.merge_shift,
    };
    let nonselective = AtomicMixture {
        atoms: g
            .atoms
            .iter()
            .map(|a| Atom {
                weight: a.weight,
                location: keep_strong * a.location,
            })
            .collect(),
        pruned_mass: g.pruned_mass,
        merge_shift: g.merge_shift,
    };
    (selective, nonselective)
}

/// Raw moments `E[Y^0..=Y^K]` of a mixing law; `E[Y^0] = 1` and the sequence
/// is nonincreasing in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVec(Vec<f64>);

impl MomentVec {
    pub fn new(moments: Vec<f64>) -> Result<Self, MixtureError> {
        let v = Self(moments);
        v.check()?;
        Ok(v)
    }

    pub fn from_unchecked(moments: Vec<f64>) -> Self {
        Self(moments)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Largest moment order carried.
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.0[1]
    }

    pub fn variance(&self) -> f64 {
        self.0[2] - self.0[1] * self.0[1]
    }

    fn check(&self) -> Result<(), MixtureError> {
        if self.0.is_empty() || (self.0[0] - 1.0).abs() > 1e-12 {
            return Err(MixtureError::MomentInvariant("U^0 = 1".into()));
        }
        for w in self.0.windows(2) {
            if w[1] > w[0] + 1e-12 || w[1] < -1e-12 {
                return Err(MixtureError::MomentInvariant(
                    "1 >= U^1 >= ... >= U^K >= 0".into(),
                ));
            }
        }
        for k in 0..self.0.len().saturating_sub(2) {
            if self.0[k] * self.0[k + 2] - self.0[k + 1] * self.0[k + 1] < -1e-12 {
                return Err(MixtureError::MomentInvariant(format!(
                    "Hankel 2x2 minor at order {k}"
                )));
            }
        }
        Ok(())
    }
}

/// An affine branch `u -> slope * u + offset` of a two-branch location map.
#[derive(Clone, Copy, Debug)]
pub struct AffineBranch {
    pub slope: f64,
    pub offset: f64,
}

/// Moment transport through a two-branch affine map: if `Y'` equals
/// `a1 Y + b1` with probability `eta` and `a0 Y + b0` otherwise, then
/// `E[Y'^k] = eta E[(a1 Y + b1)^k] + (1-eta) E[(a0 Y + b0)^k]`, expanded
/// binomially in the input moments.
pub fn affine_pair_moment_step(
    u: &[f64],
    eta: f64,
    hit: AffineBranch,
    miss: AffineBranch,
) -> Vec<f64> {
    let kmax = u.len() - 1;
    let mut out = vec![0.0; kmax + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = eta * affine_power_moment(u, k, hit) + (1.0 - eta) * affine_power_moment(u, k, miss);
    }
    out
}

/// `E[(slope Y + offset)^k]` from the raw moments of `Y`.
fn affine_power_moment(u: &[f64], k: usize, branch: AffineBranch) -> f64 {
    if branch.offset == 0.0 {
        return branch.slope.powi(k as i32) * u[k];
    }
    let mut acc = 0.0;
    let mut coeff = 1.0; // C(k, j) slope^j offset^(k-j), built incrementally
    let mut slope_pow = 1.0;
    // j = 0 term: offset^k
    acc += branch.offset.powi(k as i32) * u[0] * coeff * slope_pow;
    for j in 1..=k {
        coeff = coeff * (k - j + 1) as f64 / j as f64;
        slope_pow *= branch.slope;
        acc += coeff * slope_pow * branch.offset.powi((k - j) as i32) * u[j];
    }
    acc
}

fn forgetting_branches(params: &ModelParams) -> (f64, AffineBranch, AffineBranch) {
    (
        params.f,
        AffineBranch {
            slope: params.decay_selective(),
            offset: params.potentiation_drift(),
        },
        AffineBranch {
            slope: params.decay_nonselective(),
            offset: 0.0,
        },
    )
}

/// The same two-branch map seen from the complement `W = 1 - Y`; useful
/// because moments of whichever of `Y`, `1 - Y` is small stay well scaled.
pub fn complement_forgetting_branches(params: &ModelParams) -> (f64, AffineBranch, AffineBranch) {
    (
        params.f,
        AffineBranch {
            slope: params.decay_selective(),
            offset: (1.0 - params.f) * params.q10_minus,
        },
        AffineBranch {
            slope: params.decay_nonselective(),
            offset: params.f * params.q01_minus,
        },
    )
}

/// One forgetting step in moment space; the monotonicity invariant is
/// re-checked afterwards, failure signalling numerical cancellation.
pub fn moment_step(u: &MomentVec, params: &ModelParams) -> Result<MomentVec, MixtureError> {
    let (eta, hit, miss) = forgetting_branches(params);
    MomentVec::new(affine_pair_moment_step(u.as_slice(), eta, hit, miss))
}

/// Stationary moments of a general two-branch affine map, solved from the
/// triangular stationarity system.
pub fn affine_pair_fixed_point(
    eta: f64,
    hit: AffineBranch,
    miss: AffineBranch,
    k: u32,
) -> Result<Vec<f64>, MixtureError> {
    let kmax = k as usize;
    let mut u = vec![0.0; kmax + 1];
    u[0] = 1.0;
    for order in 1..=kmax {
        let diag = eta * hit.slope.powi(order as i32) + (1.0 - eta) * miss.slope.powi(order as i32);
        if (1.0 - diag).abs() < 1e-15 {
            return Err(MixtureError::SingularFixedPoint { order });
        }
        let mut rhs = 0.0;
        for (branch, prob) in [(hit, eta), (miss, 1.0 - eta)] {
            if branch.offset == 0.0 {
                continue;
            }
            let mut coeff = 1.0;
            let mut slope_pow = 1.0;
            rhs += prob * branch.offset.powi(order as i32) * u[0];
            for j in 1..order {
                coeff = coeff * (order - j + 1) as f64 / j as f64;
                slope_pow *= branch.slope;
                rhs += prob * coeff * slope_pow * branch.offset.powi((order - j) as i32) * u[j];
            }
        }
        u[order] = rhs / (1.0 - diag);
    }
    Ok(u)
}

/// Moments `E[Y*^0..=Y*^K]` of the stationary mixing law, from the
/// triangular recursion. The first moment has the closed form
/// `f q+ / ((1-f)(q01 + q10) + f q+)`.
pub fn fixed_point_moments(params: &ModelParams, k: u32) -> Result<MomentVec, MixtureError> {
    let (eta, hit, miss) = forgetting_branches(params);
    MomentVec::new(affine_pair_fixed_point(eta, hit, miss, k)?)
}

/// Moments of `1 - Y*`.
pub fn complement_fixed_point_moments(
    params: &ModelParams,
    k: u32,
) -> Result<Vec<f64>, MixtureError> {
    let (eta, hit, miss) = complement_forgetting_branches(params);
    affine_pair_fixed_point(eta, hit, miss, k)
}

/// `E[Y*]` in closed form.
pub fn stationary_weight_mean(params: &ModelParams) -> f64 {
    params.f * params.q_plus
        / ((1.0 - params.f) * (params.q01_minus + params.q10_minus) + params.f * params.q_plus)
}

/// Right endpoint of the stationary mixing-law support:
/// `f q+ / (f q+ + (1-f) q10)`; equal to one when `q10 = 0`.
pub fn support_upper_limit(params: &ModelParams) -> f64 {
    let drift = params.potentiation_drift();
    drift / (drift + (1.0 - params.f) * params.q10_minus)
}

/// `BinMix(K, g)` from atoms: `P(X = j) = sum_a w_a Bin(K, u_a)(j)`.
pub fn binmix_from_atoms(g: &AtomicMixture, k: u32) -> DistVec {
    let kk = k as usize;
    let tbl = LnFactorial::new(kk.max(1));
    let mut probs = vec![0.0; kk + 1];
    let mut row = vec![0.0; kk + 1];
    for a in &g.atoms {
        binom_pmf_into(kk, a.location, &tbl, &mut row);
        for (p, r) in probs.iter_mut().zip(row.iter()) {
            *p += a.weight * r;
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    DistVec::from_unchecked(probs)
}

/// Writes the pmf of `Bin(k, u)` into `row` using the ratio recurrence from
/// the mode, which stays finite even where the log form would underflow.
fn binom_pmf_into(k: usize, u: f64, tbl: &LnFactorial, row: &mut [f64]) {
    row.fill(0.0);
    if u <= 0.0 {
        row[0] = 1.0;
        return;
    }
    if u >= 1.0 {
        row[k] = 1.0;
        return;
    }
    let mode = ((k as f64 + 1.0) * u).floor().min(k as f64) as usize;
    let ln_mode = tbl.ln_choose(k, mode)
        + mode as f64 * u.ln()
        + (k - mode) as f64 * (-u).ln_1p();
    row[mode] = ln_mode.exp();
    let ratio = u / (1.0 - u);
    for j in mode..k {
        row[j + 1] = row[j] * ratio * (k - j) as f64 / (j + 1) as f64;
    }
    for j in (0..mode).rev() {
        row[j] = row[j + 1] / ratio * (j + 1) as f64 / (k - j) as f64;
    }
}

/// `BinMix(K, g)` from moments via the alternating change of basis
/// `nu_j = sum_i U^i C(K,i) C(i,j) (-1)^(i-j)`.
///
/// The basis entries grow like `C(K, K/2)^2`, so this is an oracle for small
/// `K` only; catastrophic cancellation is detected and reported.
pub fn binmix_from_moments(u: &MomentVec, k: u32) -> Result<DistVec, MixtureError> {
    let kk = k as usize;
    assert!(
        u.order() >= kk,
        "need moments up to order K = {kk}, got {}",
        u.order()
    );
    let m = u.as_slice();
    let mut probs = vec![0.0; kk + 1];
    for (j, slot) in probs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in j..=kk {
            let sign = if (i - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m[i] * binom::choose(kk, i) * binom::choose(i, j);
        }
        *slot = acc;
    }
    for (index, &value) in probs.iter().enumerate() {
        if !(-1e-8..=1.0 + 1e-8).contains(&value) {
            return Err(MixtureError::NumericalCancellation { index, value });
        }
    }
    for p in probs.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(DistVec::from_unchecked(probs))
}

/// Atomic approximation of the stationary mixing law, by iterating the
/// forgetting map from a point mass at zero until the contraction has pushed
/// the W1 distance below `target_w1 / 2` (the other half of the budget is
/// left for merge shift). Returns the mixture and the achieved W1 bound.
pub fn stationary_mixture(params: &ModelParams, target_w1: f64) -> (AtomicMixture, f64) {
    stationary_mixture_capped(params, target_w1, DEFAULT_ATOM_CAP)
}

pub fn stationary_mixture_capped(
    params: &ModelParams,
    target_w1: f64,
    cap: usize,
) -> (AtomicMixture, f64) {
    let rate = params.contraction_rate();
    let start_dist = stationary_weight_mean(params).max(1e-6);
    let steps = ((target_w1 / 2.0 / start_dist).ln() / rate.ln()).ceil().max(1.0) as u64;
    let steps = steps.min(100_000);
    let mut g = AtomicMixture::point_mass(0.0);
    for _ in 0..steps {
        g = apply_forgetting_map_capped(&g, params, cap);
    }
    let bound = start_dist * rate.powi(steps as i32) + g.merge_shift + g.pruned_mass;
    (g, bound)
}

/// Exact L1 distance between the CDFs of two atomic mixtures, computed on
/// the union of their jump points.
pub fn l1_cdf_distance(a: &AtomicMixture, b: &AtomicMixture) -> f64 {
    let mut ia = 0;
    let mut ib = 0;
    let mut fa = 0.0f64;
    let mut fb = 0.0f64;
    let mut last_x = 0.0f64;
    let mut dist = 0.0;
    while ia < a.atoms.len() || ib < b.atoms.len() {
        let xa = a.atoms.get(ia).map_or(f64::INFINITY, |t| t.location);
        let xb = b.atoms.get(ib).map_or(f64::INFINITY, |t| t.location);
        let x = xa.min(xb);
        dist += (fa - fb).abs() * (x - last_x).max(0.0);
        if xa <= xb {
            fa += a.atoms[ia].weight;
            ia += 1;
        }
        if xb <= xa {
            fb += b.atoms[ib].weight;
            ib += 1;
        }
        last_x = x;
    }
    dist
}

/// Both sides of the contraction inequality: the L1 distance after one exact
/// forgetting step, and the contraction rate times the distance before it.
/// The contract is `lhs <= rhs + 1e-12`.
pub fn contraction_check(
    g1: &AtomicMixture,
    g2: &AtomicMixture,
    params: &ModelParams,
) -> (f64, f64) {
    let r1 = apply_forgetting_map_raw(g1, params);
    let r2 = apply_forgetting_map_raw(g2, params);
    let lhs = l1_cdf_distance(&r1, &r2);
    let rhs = params.contraction_rate() * l1_cdf_distance(g1, g2);
    (lhs, rhs)
}

/// Smallest interval containing the support of a mixing law.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SupportInterval {
    pub lower: f64,
    pub upper: f64,
}

/// Support endpoints of the selective-branch mixing law over time, and the
/// switch time of the lower-endpoint recursion.
#[derive(Clone, Debug)]
pub struct SupportDynamics {
    /// `intervals[t-1]` frames the support of the selective mixing law at
    /// time `t`.
    pub intervals: Vec<SupportInterval>,
    /// First time the lower endpoint falls below `f q+ / (Λ0 - Λ1)` and its
    /// recursion switches from the selective to the nonselective factor.
    pub t_c: u32,
    /// Closed-form (real-valued) solution of the switch-time equation, for
    /// cross-checking the iteration.
    pub t_c_closed_form: f64,
}

/// Iterates the support recursion of the selective branch:
/// `m_1 = 1 - (1-q+)^r`, then `m_{t+1} = min(Λ0 m_t, Λ1 m_t + f q+)` (and the
/// mirrored max-recursion for the upper endpoint).
pub fn support_dynamics(
    params: &ModelParams,
    t_max: u32,
) -> Result<SupportDynamics, MixtureError> {
    let lam0 = params.decay_nonselective();
    let lam1 = params.decay_selective();
    if lam0 <= lam1 {
        return Err(MixtureError::DegenerateSupport);
    }
    let drift = params.potentiation_drift();
    let m_inf = support_upper_limit(params);
    let switch_level = drift / (lam0 - lam1);
    let m1 = params.post_learning_support_floor();
    let upper1 = 1.0 - (1.0 - params.q_plus).powi(params.r as i32) * (1.0 - m_inf);

    let t_c_closed_form = if m1 <= switch_level {
        1.0
    } else {
        1.0 + ((switch_level - m_inf) / (m1 - m_inf)).ln() / lam1.ln()
    };

    let mut intervals = Vec::with_capacity(t_max as usize);
    let mut m = m1;
    let mut upper = upper1;
    for _ in 1..=t_max {
        intervals.push(SupportInterval { lower: m, upper });
        m = (lam0 * m).min(lam1 * m + drift);
        upper = (lam0 * upper).max(lam1 * upper + drift);
    }

    // t_c may lie past t_max; keep iterating just the lower endpoint.
    let mut t_c = 1u32;
    let mut m = m1;
    while m > switch_level && t_c < 10_000_000 {
        m = (lam0 * m).min(lam1 * m + drift);
        t_c += 1;
    }
    Ok(SupportDynamics {
        intervals,
        t_c,
        t_c_closed_form,
    })
}
