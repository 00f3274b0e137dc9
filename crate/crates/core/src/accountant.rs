//! Truncated-CDP accounting for the subsampled Gaussian mechanism.
//!
//! The pipeline is: Gaussian mechanism with sensitivity Δ and noise σ gives
//! (Δ²/(2σ²), ∞)-tCDP; uniform subsampling of B out of N samples amplifies it
//! to (13q²ρ, ln(1/q)/(4ρ)); T adaptive steps compose additively in ρ; and
//! the result converts to (ε, δ)-DP with ε = ρ + 2√(ρ ln(1/δ)) provided the
//! Rényi order 1 + √(ln(1/δ)/ρ) stays below the truncation ω.
//!
//! Logarithms are natural except the explicit log₂ in the amplification
//! precondition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (ρ, ω)-truncated concentrated DP. ω = ∞ is encoded as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcdpBudget {
    pub rho: f64,
    #[serde(with = "omega_serde")]
    pub omega: f64,
}

mod omega_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("invalid omega {s:?}"))),
        }
    }
}

impl TcdpBudget {
    pub fn new(rho: f64, omega: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::invalid(format!("rho must be finite and >= 0, got {rho}")));
        }
        if !(omega > 1.0) {
            return Err(Error::invalid(format!("omega must exceed 1, got {omega}")));
        }
        Ok(TcdpBudget { rho, omega })
    }

    /// (0, ∞), the identity for composition.
    pub const fn identity() -> Self {
        TcdpBudget { rho: 0.0, omega: f64::INFINITY }
    }
}

/// (ε, δ)-differential privacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxDpBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl ApproxDpBudget {
    /// A requested budget: ε > 0, δ ∈ (0, 1/2].
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive and finite, got {epsilon}")));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::invalid(format!("delta must lie in (0, 1/2], got {delta}")));
        }
        Ok(ApproxDpBudget { epsilon, delta })
    }

    /// Nothing spent.
    pub const fn zero() -> Self {
        ApproxDpBudget { epsilon: 0.0, delta: 0.0 }
    }

    /// Basic composition.
    pub fn plus(&self, other: &ApproxDpBudget) -> ApproxDpBudget {
        ApproxDpBudget { epsilon: self.epsilon + other.epsilon, delta: self.delta + other.delta }
    }

    /// (ε/2^k, δ/2^k)
    pub fn halved(&self, k: u32) -> ApproxDpBudget {
        let f = 0.5f64.powi(k as i32);
        ApproxDpBudget { epsilon: self.epsilon * f, delta: self.delta * f }
    }

    /// Componentwise ≤ with a relative slack for floating-point sums.
    pub fn within(&self, limit: &ApproxDpBudget) -> bool {
        let slack = 1.0 + 1e-12;
        self.epsilon <= limit.epsilon * slack && self.delta <= limit.delta * slack
    }
}

impl std::fmt::Display for ApproxDpBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.6}, {:.3e})-DP", self.epsilon, self.delta)
    }
}

/// Noise calibration constants plus the sensitivity convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccountantConstants {
    /// ε ≤ c1·B²T/N² must hold; c1 ∈ (0, 1].
    pub c1: f64,
    /// σ = c2·ΔB√(T ln(1/δ))/(εN); c2 ≥ 1.
    pub c2: f64,
    /// Δ = sensitivity_scale · G. 1 follows the G convention for the summed
    /// gradient; 2 is the conservative bound under single-entry replacement.
    pub sensitivity_scale: f64,
}

/// The smallest power of two for which the self-certifying pipeline passes on
/// every schedule of the acceptance grid (see `certify_c2` in the tests).
pub const DEFAULT_C2: f64 = 8.0;

impl Default for AccountantConstants {
    fn default() -> Self {
        AccountantConstants { c1: 1.0, c2: DEFAULT_C2, sensitivity_scale: 1.0 }
    }
}

impl AccountantConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1 <= 1.0) {
            return Err(Error::invalid(format!("c1 must lie in (0, 1], got {}", self.c1)));
        }
        if !(self.c2 >= 1.0 && self.c2.is_finite()) {
            return Err(Error::invalid(format!("c2 must be finite and >= 1, got {}", self.c2)));
        }
        if !(self.sensitivity_scale >= 1.0 && self.sensitivity_scale.is_finite()) {
            return Err(Error::invalid(format!("sensitivity scale must be >= 1, got {}", self.sensitivity_scale)));
        }
        Ok(())
    }
}

/// Gaussian mechanism with ℓ2 sensitivity `g` and noise std `sigma`.
pub fn gaussian_tcdp(g: f64, sigma: f64) -> Result<TcdpBudget> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::invalid(format!("sensitivity must be finite and >= 0, got {g}")));
    }
    if !(sigma >= 0.0) || sigma.is_nan() {
        return Err(Error::invalid(format!("sigma must be >= 0, got {sigma}")));
    }
    if g == 0.0 {
        return Ok(TcdpBudget::identity());
    }
    if sigma == 0.0 {
        return Err(Error::NoPrivacy { sensitivity: g });
    }
    Ok(TcdpBudget { rho: g * g / (2.0 * sigma * sigma), omega: f64::INFINITY })
}

/// Privacy amplification by uniform subsampling at rate q = B/N.
pub fn amplify_subsample(b: TcdpBudget, q: f64) -> Result<TcdpBudget> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("sampling rate must lie in (0, 1), got {q}")));
    }
    let rho = b.rho;
    if !(rho > 0.0 && rho <= 0.1) {
        return Err(Error::precondition(format!("rho in (0, 0.1] (rho = {rho})")));
    }
    let log_inv_q = (1.0 / q).ln();
    let needed = 3.0 * rho * (2.0 + (1.0 / rho).log2());
    if log_inv_q < needed {
        return Err(Error::precondition(format!(
            "ln(1/q) >= 3 rho (2 + log2(1/rho)) ({log_inv_q:.6} < {needed:.6})"
        )));
    }
    let order = log_inv_q / (2.0 * rho);
    if order < 3.0 {
        return Err(Error::precondition(format!("ln(1/q)/(2 rho) >= 3 ({order:.6} < 3)")));
    }
    if b.omega < order {
        return Err(Error::precondition(format!("omega >= ln(1/q)/(2 rho) ({} < {order:.6})", b.omega)));
    }
    Ok(TcdpBudget { rho: 13.0 * q * q * rho, omega: log_inv_q / (4.0 * rho) })
}

/// Adaptive composition of two tCDP mechanisms.
pub fn compose(a: TcdpBudget, b: TcdpBudget) -> TcdpBudget {
    TcdpBudget { rho: a.rho + b.rho, omega: a.omega.min(b.omega) }
}

/// `n`-fold self-composition.
pub fn compose_n(b: TcdpBudget, n: u64) -> TcdpBudget {
    if n == 0 {
        return TcdpBudget::identity();
    }
    TcdpBudget { rho: b.rho * n as f64, omega: b.omega }
}

/// Smallest truncation ω for which [`tcdp_to_approx_dp`] applies.
pub fn required_omega(rho: f64, delta: f64) -> f64 {
    1.0 + ((1.0 / delta).ln() / rho).sqrt()
}

/// ε = ρ + 2√(ρ ln(1/δ)), valid when ω ≥ 1 + √(ln(1/δ)/ρ).
pub fn tcdp_to_approx_dp(b: TcdpBudget, delta: f64) -> Result<ApproxDpBudget> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::invalid(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    if b.rho == 0.0 {
        return Ok(ApproxDpBudget { epsilon: 0.0, delta });
    }
    let required = required_omega(b.rho, delta);
    if b.omega < required {
        return Err(Error::Truncation { required, omega: b.omega });
    }
    let log_inv_delta = (1.0 / delta).ln();
    Ok(ApproxDpBudget { epsilon: b.rho + 2.0 * (b.rho * log_inv_delta).sqrt(), delta })
}

/// Every intermediate quantity of the accounting pipeline, for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub sensitivity: f64,
    pub sigma: f64,
    pub batch: u64,
    pub steps: u64,
    pub n: u64,
    pub q: f64,
    pub per_step: TcdpBudget,
    pub amplified: TcdpBudget,
    pub composed: TcdpBudget,
    pub spent: ApproxDpBudget,
}

/// Accounts T steps of the subsampled Gaussian mechanism.
pub fn run_pipeline(sensitivity: f64, sigma: f64, batch: u64, steps: u64, n: u64, delta: f64) -> Result<Pipeline> {
    if batch == 0 || batch > n {
        return Err(Error::invalid(format!("batch size {batch} must lie in [1, {n}]")));
    }
    let q = batch as f64 / n as f64;
    let per_step = gaussian_tcdp(sensitivity, sigma)?;
    let amplified = amplify_subsample(per_step, q)?;
    let composed = compose_n(amplified, steps);
    let spent = tcdp_to_approx_dp(composed, delta)?;
    Ok(Pipeline { sensitivity, sigma, batch, steps, n, q, per_step, amplified, composed, spent })
}

/// Noise scale with its certifying pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sigma: f64,
    pub pipeline: Pipeline,
}

/// Checks the calibration preconditions ε ≤ c1·B²T/N², B ≤ N/10, δ ≤ 1/2.
pub fn check_calibration_preconditions(
    batch: u64,
    steps: u64,
    n: u64,
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
) -> Result<()> {
    consts.validate()?;
    if batch == 0 || steps == 0 || n == 0 {
        return Err(Error::invalid("B, T and N must be at least 1"));
    }
    let (b, t, nf) = (batch as f64, steps as f64, n as f64);
    let cap = consts.c1 * b * b * t / (nf * nf);
    if budget.epsilon > cap {
        return Err(Error::precondition(format!("epsilon <= c1 B^2 T / N^2 ({} > {cap:.6})", budget.epsilon)));
    }
    if b > nf / 10.0 {
        return Err(Error::precondition(format!("B <= N/10 ({batch} > {})", nf / 10.0)));
    }
    if budget.delta > 0.5 {
        return Err(Error::precondition(format!("delta <= 1/2 ({})", budget.delta)));
    }
    Ok(())
}

/// σ = c2·ΔB√(T ln(1/δ))/(εN) with Δ = sensitivity_scale·G, certified by
/// running the full pipeline and comparing its ε with the budget.
pub fn calibrate(
    g: f64,
    batch: u64,
    steps: u64,
    n: u64,
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
) -> Result<Calibration> {
    ApproxDpBudget::new(budget.epsilon, budget.delta)?;
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::invalid(format!("Lipschitz constant must be positive and finite, got {g}")));
    }
    check_calibration_preconditions(batch, steps, n, budget, consts)?;
    let sensitivity = consts.sensitivity_scale * g;
    let sigma = sigma_formula(sensitivity, batch, steps, n, budget, consts.c2);
    let pipeline = run_pipeline(sensitivity, sigma, batch, steps, n, budget.delta)?;
    if pipeline.spent.epsilon > budget.epsilon {
        return Err(Error::Calibration { achieved: pipeline.spent.epsilon, target: budget.epsilon });
    }
    Ok(Calibration { sigma, pipeline })
}

/// c2·ΔB√(T ln(1/δ))/(εN) without any precondition checks.
pub fn sigma_formula(sensitivity: f64, batch: u64, steps: u64, n: u64, budget: &ApproxDpBudget, c2: f64) -> f64 {
    c2 * sensitivity * batch as f64 * (steps as f64 * (1.0 / budget.delta).ln()).sqrt() / (budget.epsilon * n as f64)
}

/// The calibrated σ alone.
pub fn calibrate_sigma(
    g: f64,
    batch: u64,
    steps: u64,
    n: u64,
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
) -> Result<f64> {
    calibrate(g, batch, steps, n, budget, consts).map(|c| c.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gaussian_examples() {
        let b = gaussian_tcdp(1.0, 1.0).unwrap();
        assert_eq!(b.rho, 0.5);
        assert!(b.omega.is_infinite());
        assert_eq!(gaussian_tcdp(0.0, 1.0).unwrap().rho, 0.0);
        assert_eq!(gaussian_tcdp(2.0, 2.0).unwrap().rho, 0.5);
        assert!(matches!(gaussian_tcdp(1.0, 0.0), Err(Error::NoPrivacy { .. })));
    }

    #[test]
    fn amplification_example() {
        let out = amplify_subsample(TcdpBudget::new(0.1, f64::INFINITY).unwrap(), 0.01).unwrap();
        assert_abs_diff_eq!(out.rho, 1.3e-4, epsilon = 1e-12);
        assert_abs_diff_eq!(out.omega, 100f64.ln() / 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(out.omega, 11.512925, epsilon = 1e-6);
    }

    #[test]
    fn amplification_preconditions_are_named() {
        let e = amplify_subsample(TcdpBudget::new(0.2, f64::INFINITY).unwrap(), 0.01).unwrap_err();
        assert!(matches!(&e, Error::Precondition { inequality } if inequality.starts_with("rho in (0, 0.1]")));
        let e = amplify_subsample(TcdpBudget::new(0.1, f64::INFINITY).unwrap(), 0.5).unwrap_err();
        assert!(matches!(&e, Error::Precondition { inequality } if inequality.starts_with("ln(1/q) >= 3 rho")));
        // Order bound: ln(1/q)/(2ρ) = ln(10)/0.2 ≈ 11.5 > 10 = ω'.
        let e = amplify_subsample(TcdpBudget::new(0.1, 10.0).unwrap(), 0.1).unwrap_err();
        assert!(matches!(&e, Error::Precondition { inequality } if inequality.starts_with("omega >= ln(1/q)/(2 rho)")));
    }

    #[test]
    fn composition_examples() {
        let c = compose(TcdpBudget::new(0.1, 10.0).unwrap(), TcdpBudget::new(0.2, 5.0).unwrap());
        assert_abs_diff_eq!(c.rho, 0.3, epsilon = 1e-15);
        assert_eq!(c.omega, 5.0);
        let a = TcdpBudget::new(0.25, 7.0).unwrap();
        assert_eq!(compose(a, TcdpBudget::identity()), a);
        let mut acc = TcdpBudget::identity();
        for _ in 0..100 {
            acc = compose(acc, TcdpBudget::new(1e-3, 20.0).unwrap());
        }
        assert_abs_diff_eq!(acc.rho, 0.1, epsilon = 1e-12);
        assert_eq!(acc.omega, 20.0);
        assert_abs_diff_eq!(compose_n(TcdpBudget::new(1e-3, 20.0).unwrap(), 100).rho, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn conversion_examples() {
        let e = tcdp_to_approx_dp(TcdpBudget::new(0.01, 40.0).unwrap(), 1e-5).unwrap();
        assert_abs_diff_eq!(e.epsilon, 0.01 + 2.0 * (0.01 * 1e5f64.ln()).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.epsilon, 0.688614, epsilon = 1e-6);
        assert_abs_diff_eq!(required_omega(0.01, 1e-5), 34.930702, epsilon = 1e-6);
        assert!(matches!(
            tcdp_to_approx_dp(TcdpBudget::new(0.01, 34.9).unwrap(), 1e-5),
            Err(Error::Truncation { .. })
        ));
        let tiny = tcdp_to_approx_dp(TcdpBudget::new(1e-14, f64::INFINITY).unwrap(), 1e-5).unwrap();
        assert!(tiny.epsilon < 1e-6);
        let e = tcdp_to_approx_dp(TcdpBudget::new(0.5, 2.0).unwrap(), 0.01).unwrap_err();
        match e {
            Error::Truncation { required, .. } => assert_abs_diff_eq!(required, 4.034854, epsilon = 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sigma_formula_example() {
        let budget = ApproxDpBudget::new(1.0, 0.01).unwrap();
        assert_abs_diff_eq!(sigma_formula(1.0, 10, 100, 1000, &budget, 1.0), 0.214597, epsilon = 1e-6);
        // ε = 1 exceeds c1·B²T/N² = 0.01 here, so calibration itself refuses.
        let e = calibrate_sigma(1.0, 10, 100, 1000, &budget, &AccountantConstants::default()).unwrap_err();
        assert!(matches!(e, Error::Precondition { .. }));
        let small = ApproxDpBudget::new(0.01, 0.01).unwrap();
        let sigma = calibrate_sigma(1.0, 10, 100, 1000, &small, &AccountantConstants::default()).unwrap();
        assert_abs_diff_eq!(sigma, sigma_formula(1.0, 10, 100, 1000, &small, DEFAULT_C2), epsilon = 1e-15);
    }

    #[test]
    fn epsilon_cap_guard() {
        let budget = ApproxDpBudget::new(0.5, 1e-5).unwrap();
        // c1 B²T/N² = 100·10/10⁶ = 10⁻³ < 0.5.
        let e = calibrate_sigma(1.0, 10, 10, 1000, &budget, &AccountantConstants::default()).unwrap_err();
        assert!(matches!(&e, Error::Precondition { inequality } if inequality.starts_with("epsilon <= c1")));
        let e = calibrate_sigma(1.0, 200, 10_000, 1000, &budget, &AccountantConstants::default()).unwrap_err();
        assert!(matches!(&e, Error::Precondition { inequality } if inequality.starts_with("B <= N/10")));
    }

    #[test]
    fn undersized_c2_fails_certification() {
        let budget = ApproxDpBudget::new(0.5, 1e-5).unwrap();
        let c4 = AccountantConstants { c2: 4.0, ..Default::default() };
        assert!(matches!(calibrate(1.0, 21, 20_736, 4096, &budget, &c4), Err(Error::Calibration { .. })));
        calibrate(1.0, 21, 20_736, 4096, &budget, &AccountantConstants::default()).unwrap();
    }

    #[test]
    fn doubling_c2_quarters_rho() {
        let budget = ApproxDpBudget::new(0.5, 1e-5).unwrap();
        let c8 = calibrate(1.0, 21, 20_736, 4096, &budget, &AccountantConstants::default()).unwrap();
        let c16 = calibrate(1.0, 21, 20_736, 4096, &budget, &AccountantConstants { c2: 16.0, ..Default::default() })
            .unwrap();
        assert_abs_diff_eq!(c8.pipeline.composed.rho / c16.pipeline.composed.rho, 4.0, epsilon = 1e-9);
        assert!(c16.pipeline.spent.epsilon < c8.pipeline.spent.epsilon);
    }

    #[test]
    fn replacement_sensitivity_doubles_sigma() {
        let budget = ApproxDpBudget::new(0.5, 1e-5).unwrap();
        let a = calibrate(1.0, 21, 20_736, 4096, &budget, &AccountantConstants::default()).unwrap();
        let b =
            calibrate(1.0, 21, 20_736, 4096, &budget, &AccountantConstants { sensitivity_scale: 2.0, ..Default::default() })
                .unwrap();
        assert_abs_diff_eq!(b.sigma / a.sigma, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.pipeline.spent.epsilon, b.pipeline.spent.epsilon, epsilon = 1e-12);
    }

    #[test]
    fn omega_serializes_infinity() {
        let s = serde_json::to_string(&TcdpBudget::identity()).unwrap();
        assert_eq!(s, r#"{"rho":0.0,"omega":"inf"}"#);
        let back: TcdpBudget = serde_json::from_str(&s).unwrap();
        assert_eq!(back, TcdpBudget::identity());
    }

    fn budget_strategy() -> impl Strategy<Value = TcdpBudget> {
        (0.0f64..1.0, prop_oneof![Just(f64::INFINITY), 1.5f64..100.0]).prop_map(|(r, w)| TcdpBudget::new(r, w).unwrap())
    }

    proptest! {
        #[test]
        fn compose_is_associative_and_commutative(a in budget_strategy(), b in budget_strategy(), c in budget_strategy()) {
            let l = compose(compose(a, b), c);
            let r = compose(a, compose(b, c));
            prop_assert!((l.rho - r.rho).abs() <= 1e-12);
            prop_assert_eq!(l.omega, r.omega);
            prop_assert_eq!(compose(a, b), compose(b, a));
            prop_assert_eq!(compose(a, TcdpBudget::identity()), a);
        }

        #[test]
        fn amplified_rho_monotone(rho in 1e-4f64..0.1, q1 in 1e-4f64..0.05, q2 in 1e-4f64..0.05, f in 0.1f64..1.0) {
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let b = TcdpBudget::new(rho, f64::INFINITY).unwrap();
            if let (Ok(x), Ok(y)) = (amplify_subsample(b, lo), amplify_subsample(b, hi)) {
                prop_assert!(x.rho <= y.rho);
            }
            let smaller = TcdpBudget::new(rho * f, f64::INFINITY).unwrap();
            if let (Ok(x), Ok(y)) = (amplify_subsample(smaller, lo), amplify_subsample(b, lo)) {
                prop_assert!(x.rho <= y.rho);
            }
        }

        #[test]
        fn sigma_monotone(b in 1u64..50, t in 100u64..10_000, n in 1000u64..100_000, eps in 0.01f64..1.0, delta in 1e-8f64..0.5) {
            let consts = AccountantConstants::default();
            let sigma = |b: u64, t: u64, n: u64, eps: f64, delta: f64| {
                sigma_formula(1.0, b, t, n, &ApproxDpBudget { epsilon: eps, delta }, consts.c2)
            };
            let base = sigma(b, t, n, eps, delta);
            prop_assert!(sigma(b + 1, t, n, eps, delta) >= base);
            prop_assert!(sigma(b, t + 1, n, eps, delta) >= base);
            prop_assert!(sigma(b, t, n, eps, delta / 2.0) >= base);
            prop_assert!(sigma(b, t, n, eps * 1.5, delta) <= base);
            prop_assert!(sigma(b, t, n + 1, eps, delta) <= base);
            let budget = ApproxDpBudget::new(eps, delta).unwrap();
            if let Ok(c) = calibrate(1.0, b, t, n, &budget, &consts) {
                prop_assert!((c.sigma - base).abs() <= 1e-12 * base);
            }
        }
    }
}
