//! Model parameters, derived constants, validation, and the large-`N`
//! asymptotic-regime classification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parameters of the learning/forgetting protocol.
///
/// `n` is the number of presynaptic neurons (network size minus one), `f` the
/// coding level, `q_plus` the potentiation probability, `q01_minus` /
/// `q10_minus` the homo- and heterosynaptic depression probabilities, and `r`
/// the number of presentations of the signal to learn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "N")]
    pub n: u32,
    pub f: f64,
    pub q_plus: f64,
    pub q01_minus: f64,
    pub q10_minus: f64,
    pub r: u32,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("both declared limits are zero; at least one of a_N, b_N must not vanish")]
    BothLimitsZero,
    #[error("both limits are infinite; their relative growth order must be declared")]
    MissingGrowthOrder,
}

impl ModelParams {
    /// Validates the hard constraints and returns the parameter set.
    pub fn new(
        n: u32,
        f: f64,
        q_plus: f64,
        q01_minus: f64,
        q10_minus: f64,
        r: u32,
    ) -> Result<Self, ModelError> {
        let params = Self {
            n,
            f,
            q_plus,
            q01_minus,
            q10_minus,
            r,
        };
        let report = params.validate();
        if report.is_valid() {
            Ok(params)
        } else {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            Err(ModelError::Invalid(failed.join(", ")))
        }
    }

    /// Per-step contraction factor of the mixing location when the incoming
    /// stimulus does not activate the readout neuron: `1 - f q01`.
    #[inline]
    pub fn decay_nonselective(&self) -> f64 {
        1.0 - self.f * self.q01_minus
    }

    /// Per-step contraction factor when the incoming stimulus activates the
    /// readout neuron: `1 - (1 - f) q10 - f q+`.
    #[inline]
    pub fn decay_selective(&self) -> f64 {
        1.0 - (1.0 - self.f) * self.q10_minus - self.f * self.q_plus
    }

    /// Additive drift of the selective branch, `f q+`.
    #[inline]
    pub fn potentiation_drift(&self) -> f64 {
        self.f * self.q_plus
    }

    /// `i`-th eigenvalue of the forgetting transition matrix:
    /// `(1 - f) Λ0^i + f Λ1^i`.
    pub fn eigenvalue(&self, i: u32) -> f64 {
        (1.0 - self.f) * self.decay_nonselective().powi(i as i32)
            + self.f * self.decay_selective().powi(i as i32)
    }

    /// The second eigenvalue, which is also the strict L1 contraction
    /// constant of the mixing-law update.
    #[inline]
    pub fn contraction_rate(&self) -> f64 {
        self.eigenvalue(1)
    }

    /// Expected number of selective presynaptic neurons, `N f`.
    #[inline]
    pub fn mean_selective(&self) -> f64 {
        self.n as f64 * self.f
    }

    /// Left support endpoint of the selective mixing law right after
    /// learning: `1 - (1 - q+)^r`.
    #[inline]
    pub fn post_learning_support_floor(&self) -> f64 {
        1.0 - (1.0 - self.q_plus).powi(self.r as i32)
    }

    /// Full diagnostic report; never fails.
    pub fn validate(&self) -> ValidationReport {
        validate(
            self.n,
            self.f,
            self.q_plus,
            self.q01_minus,
            self.q10_minus,
            self.r,
        )
    }
}

/// One pass/fail entry of a [`ValidationReport`].
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Outcome of parameter validation: hard constraint results, derived
/// constants, and soft warnings for the sparse-coding proxies.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub decay_nonselective: f64,
    pub decay_selective: f64,
    pub contraction_rate: f64,
    /// `Λ0 <= Λ1` breaks the support ordering used by the lifetime formulas;
    /// exact propagation and Monte Carlo remain valid.
    pub degenerate_ordering: bool,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Diagnostic-only validation; constructors of other modules reject failed
/// reports.
pub fn validate(
    n: u32,
    f: f64,
    q_plus: f64,
    q01_minus: f64,
    q10_minus: f64,
    r: u32,
) -> ValidationReport {
    let in_unit_half_open = |x: f64| x > 0.0 && x <= 1.0;
    let checks = vec![
        Check {
            name: "f in (0,1]".into(),
            passed: in_unit_half_open(f),
        },
        Check {
            name: "q_plus in (0,1]".into(),
            passed: in_unit_half_open(q_plus),
        },
        Check {
            name: "q01_minus in (0,1]".into(),
            passed: in_unit_half_open(q01_minus),
        },
        Check {
            name: "q10_minus in [0,1]".into(),
            passed: (0.0..=1.0).contains(&q10_minus),
        },
        Check {
            name: "N >= 1".into(),
            passed: n >= 1,
        },
        Check {
            name: "r >= 1".into(),
            passed: r >= 1,
        },
    ];

    let lam0 = 1.0 - f * q01_minus;
    let lam1 = 1.0 - (1.0 - f) * q10_minus - f * q_plus;
    let rate = (1.0 - f) * lam0 + f * lam1;

    let mut warnings = Vec::new();
    if f > 0.5 {
        warnings.push(format!("coding level f = {f} is not small (sparse-coding proxy)"));
    }
    if (n as f64) * f < 10.0 {
        warnings.push(format!(
            "mean selective population N*f = {} is small (large-Nf proxy)",
            n as f64 * f
        ));
    }

    ValidationReport {
        checks,
        decay_nonselective: lam0,
        decay_selective: lam1,
        contraction_rate: rate,
        degenerate_ordering: lam0 <= lam1,
        warnings,
    }
}

/// A declared limit of the rescaled depression ratios `a_N = q01/f` or
/// `b_N = q10/f` along a parameter sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitDecl {
    Zero,
    /// Converges to the given positive constant.
    Finite(f64),
    Infinite,
}

/// Relative growth when both ratios diverge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthOrder {
    /// `b_N = o(a_N)`
    HeteroNegligible,
    SameOrder,
    /// `a_N = o(b_N)`
    HomoNegligible,
}

/// The seven rows of the large-`N` equivalence table, keyed by the declared
/// limits of `a_N` (homosynaptic ratio) and `b_N` (heterosynaptic ratio).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Row {
    /// `b_N -> inf`, `b_N = o(a_N)`, any r.
    BothInfiniteHeteroNegligible,
    /// `a_N, b_N -> inf` of the same order, any r.
    BothInfiniteSameOrder,
    /// `a_N = o(b_N)`, `b_N -> inf`, any r.
    HeteroDominates,
    /// `a_N -> inf`, `b_N -> b` finite, any r.
    HomoInfiniteHeteroFinite,
    /// `a_N -> 0`, `b_N -> b > 0`, r above threshold.
    HomoVanishingHeteroFinite,
    /// `a_N = a > 0`, `b_N -> 0`, r above threshold.
    HomoFiniteHeteroVanishing,
    /// `a_N = a > 0`, `b_N = b >= 0` finite, r above threshold.
    BothFinite,
}

/// Asymptotic regime at one member of a parameter sequence: the ratio values
/// at the given `N` plus the classified table row.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticRegime {
    /// `q01 / f` at this `N`.
    pub a_n: f64,
    /// `q10 / f` at this `N`.
    pub b_n: f64,
    pub case: Table1Row,
}

impl AsymptoticRegime {
    /// Attaches declared limits to a concrete parameter set.
    pub fn classify(
        params: &ModelParams,
        a_limit: LimitDecl,
        b_limit: LimitDecl,
        order: Option<GrowthOrder>,
    ) -> Result<Self, ModelError> {
        let case = classify_regime(a_limit, b_limit, order)?;
        Ok(Self {
            a_n: params.q01_minus / params.f,
            b_n: params.q10_minus / params.f,
            case,
        })
    }
}

/// Maps declared limits onto the unique matching table row.
///
/// The limits alone do not separate the three rows with both ratios
/// diverging; that case additionally needs the declared growth order.
pub fn classify_regime(
    a_limit: LimitDecl,
    b_limit: LimitDecl,
    order: Option<GrowthOrder>,
) -> Result<Table1Row, ModelError> {
    use LimitDecl::*;
    match (a_limit, b_limit) {
        (Zero, Zero) => Err(ModelError::BothLimitsZero),
        (Infinite, Infinite) => match order {
            Some(GrowthOrder::HeteroNegligible) => Ok(Table1Row::BothInfiniteHeteroNegligible),
            Some(GrowthOrder::SameOrder) => Ok(Table1Row::BothInfiniteSameOrder),
            Some(GrowthOrder::HomoNegligible) => Ok(Table1Row::HeteroDominates),
            None => Err(ModelError::MissingGrowthOrder),
        },
        (Zero | Finite(_), Infinite) => Ok(Table1Row::HeteroDominates),
        (Infinite, Zero | Finite(_)) => Ok(Table1Row::HomoInfiniteHeteroFinite),
        (Zero, Finite(_)) => Ok(Table1Row::HomoVanishingHeteroFinite),
        (Finite(_), Zero) => Ok(Table1Row::HomoFiniteHeteroVanishing),
        (Finite(_), Finite(_)) => Ok(Table1Row::BothFinite),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derived_constants_match_hand_values() {
        let p = ModelParams::new(1000, 0.1, 0.8, 0.8, 0.2, 1).unwrap();
        assert_relative_eq!(p.decay_nonselective(), 0.92, max_relative = 1e-15);
        assert_relative_eq!(p.decay_selective(), 0.74, max_relative = 1e-15);
        assert_relative_eq!(p.contraction_rate(), 0.902, max_relative = 1e-15);
        assert!(p.validate().is_valid());
    }

    #[test]
    fn zero_coding_level_is_rejected() {
        assert!(ModelParams::new(1000, 0.0, 0.8, 0.8, 0.2, 1).is_err());
        let report = validate(1000, 0.0, 0.8, 0.8, 0.2, 1);
        assert!(!report.is_valid());
        assert!(report.checks.iter().any(|c| c.name.contains('f') && !c.passed));
    }

    #[test]
    fn zero_heterosynaptic_depression_is_allowed() {
        let p = ModelParams::new(1000, 0.1, 0.8, 0.8, 0.0, 1);
        assert!(p.is_ok());
    }

    #[test]
    fn degenerate_ordering_is_flagged_not_rejected() {
        // f q+ + (1-f) q10 < f q01 makes the nonselective branch decay faster.
        let report = validate(100, 0.5, 0.1, 1.0, 0.0, 1);
        assert!(report.is_valid());
        assert!(report.degenerate_ordering);
    }

    #[test]
    fn contraction_rate_is_strictly_below_one() {
        let grid = [
            (0.1, 0.8, 0.8, 0.2),
            (0.05, 0.5, 0.5, 0.05),
            (0.9, 1.0, 1.0, 1.0),
            (0.001, 0.01, 1.0, 0.0),
        ];
        for &(f, qp, q01, q10) in &grid {
            let p = ModelParams::new(100, f, qp, q01, q10, 1).unwrap();
            assert!(p.contraction_rate() < 1.0);
            assert!(p.decay_nonselective() >= 0.0 && p.decay_nonselective() < 1.0);
            assert!(p.decay_selective() < 1.0);
        }
    }

    #[test]
    fn regime_classification_partitions_the_domain() {
        use LimitDecl::*;
        assert!(matches!(
            classify_regime(Zero, Zero, None),
            Err(ModelError::BothLimitsZero)
        ));
        assert_eq!(
            classify_regime(Finite(1.0), Finite(0.5), None).unwrap(),
            Table1Row::BothFinite
        );
        assert_eq!(
            classify_regime(Infinite, Finite(0.5), None).unwrap(),
            Table1Row::HomoInfiniteHeteroFinite
        );
        assert_eq!(
            classify_regime(Infinite, Zero, None).unwrap(),
            Table1Row::HomoInfiniteHeteroFinite
        );
        assert_eq!(
            classify_regime(Zero, Finite(2.0), None).unwrap(),
            Table1Row::HomoVanishingHeteroFinite
        );
        assert_eq!(
            classify_regime(Finite(2.0), Zero, None).unwrap(),
            Table1Row::HomoFiniteHeteroVanishing
        );
        assert_eq!(
            classify_regime(Zero, Infinite, None).unwrap(),
            Table1Row::HeteroDominates
        );
        assert_eq!(
            classify_regime(Finite(1.0), Infinite, None).unwrap(),
            Table1Row::HeteroDominates
        );
        assert!(matches!(
            classify_regime(Infinite, Infinite, None),
            Err(ModelError::MissingGrowthOrder)
        ));
        assert_eq!(
            classify_regime(Infinite, Infinite, Some(GrowthOrder::SameOrder)).unwrap(),
            Table1Row::BothInfiniteSameOrder
        );
    }
}
