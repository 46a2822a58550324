//! Floating-point analytic criteria: Koenigs linearization, the Brjuno
//! condition via continued fractions, and the diophantine torsion-approach
//! profile of a normal bundle class.
//!
//! These computations are numeric by nature; verdicts about asymptotic
//! conditions are always advisory at a finite horizon and labeled as such.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::coefficients::Coeff;
use crate::error::{Error, Result};
use crate::series::PSeries;
use crate::Approx;

/// A continued-fraction expansion with its convergents.
#[derive(Clone, Debug)]
pub struct CFExpansion {
    /// The expanded number when known (in `(0,1)`; `None` for synthetic
    /// quotient lists).
    pub alpha: Option<f64>,
    /// Partial quotients `a_1, a_2, ...`.
    pub quotients: Vec<BigUint>,
    /// Convergent numerators `p_0, p_1, ...` (`p_0 = 0`).
    pub pnum: Vec<BigUint>,
    /// Convergent denominators `q_0, q_1, ...` (`q_0 = 1`).
    pub qden: Vec<BigUint>,
}

impl CFExpansion {
    /// Expand a synthetic list of partial quotients (all must be >= 1).
    pub fn from_quotients(quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.iter().any(|a| a.is_zero()) {
            return Err(Error::Validation("partial quotients must be >= 1".into()));
        }
        let mut cf = CFExpansion {
            alpha: None,
            quotients,
            pnum: Vec::new(),
            qden: Vec::new(),
        };
        cf.rebuild_convergents();
        Ok(cf)
    }

    /// Expand a real `alpha` in `(0, 1)`. The number of reliable quotients is
    /// limited by the 53-bit mantissa; expansion stops when the residual
    /// underflows.
    pub fn from_real(alpha: f64, max_terms: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Validation(format!(
                "alpha = {alpha} must lie in [0, 1)"
            )));
        }
        let mut quotients = Vec::new();
        let mut x = alpha;
        for _ in 0..max_terms {
            if x < 1e-12 {
                break;
            }
            let inv = 1.0 / x;
            let a = inv.floor();
            if a >= 1e15 {
                break;
            }
            quotients.push(BigUint::from(a as u64));
            x = inv - a;
        }
        let mut cf = Self::from_quotients(quotients)?;
        cf.alpha = Some(alpha);
        Ok(cf)
    }

    /// Exact expansion of a rational in `[0, 1)`; always terminates.
    pub fn from_rational(num: &BigUint, den: &BigUint) -> Result<Self> {
        if den.is_zero() || num >= den {
            return Err(Error::Validation(
                "rational alpha must satisfy 0 <= num < den".into(),
            ));
        }
        let mut quotients = Vec::new();
        let (mut a, mut b) = (num.clone(), den.clone());
        // alpha = a/b; quotients of 1/alpha alternately.
        while !a.is_zero() {
            let q = &b / &a;
            quotients.push(q.clone());
            let r = &b % &a;
            b = a;
            a = r;
        }
        let mut cf = Self::from_quotients(quotients)?;
        cf.alpha = BigRational::new(num.clone().into(), den.clone().into()).to_f64();
        Ok(cf)
    }

    /// The golden-mean expansion `[0; 1, 1, 1, ...]` with `n` quotients.
    pub fn golden(n: usize) -> Self {
        Self::from_quotients(vec![BigUint::one(); n]).expect("ones are valid quotients")
    }

    fn rebuild_convergents(&mut self) {
        let mut pnum = vec![BigUint::zero()];
        let mut qden = vec![BigUint::one()];
        let (mut pprev, mut qprev) = (BigUint::one(), BigUint::zero());
        for a in &self.quotients {
            let p = a * pnum.last().unwrap() + &pprev;
            let q = a * qden.last().unwrap() + &qprev;
            pprev = pnum.last().unwrap().clone();
            qprev = qden.last().unwrap().clone();
            pnum.push(p);
            qden.push(q);
        }
        self.pnum = pnum;
        self.qden = qden;
    }

    /// Serialize as `{"quotients": ["a1", "a2", ...]}` (decimal strings, so
    /// arbitrarily large quotients survive the round trip).
    pub fn to_json(&self) -> Value {
        json!({
            "quotients": self.quotients.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("quotients")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Validation("expected {\"quotients\": [...]}".into()))?;
        let mut quotients = Vec::with_capacity(arr.len());
        for q in arr {
            let s = q
                .as_str()
                .map(str::to_owned)
                .or_else(|| q.as_u64().map(|n| n.to_string()))
                .ok_or_else(|| Error::Validation("quotients must be decimal strings".into()))?;
            let a: BigUint = s
                .parse()
                .map_err(|_| Error::Validation(format!("bad quotient {s:?}")))?;
            quotients.push(a);
        }
        Self::from_quotients(quotients)
    }

    /// Re-verify `q_{n+1} = a_{n+1} q_n + q_{n-1}` and strict growth.
    pub fn check_invariants(&self) -> Result<()> {
        for i in 1..self.qden.len() {
            let prev = if i >= 2 {
                self.qden[i - 2].clone()
            } else {
                BigUint::zero()
            };
            if self.qden[i] != &self.quotients[i - 1] * &self.qden[i - 1] + prev {
                return Err(Error::Inconsistency(format!(
                    "convergent recursion fails at index {i}"
                )));
            }
            if i >= 2 && self.qden[i] <= self.qden[i - 1] {
                return Err(Error::Inconsistency(format!(
                    "denominators not strictly increasing at index {i}"
                )));
            }
        }
        Ok(())
    }
}

/// `ln` of a possibly huge natural number via its bit length.
pub fn ln_biguint(q: &BigUint) -> f64 {
    let bits = q.bits();
    if bits <= 53 {
        return q.to_f64().unwrap_or(1.0).max(1.0).ln();
    }
    let shift = bits - 53;
    let top = (q >> shift).to_f64().unwrap_or(1.0);
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Advisory report of a partial-sum computation at a finite horizon.
#[derive(Clone, Debug)]
pub struct BrjunoReport {
    pub partial_sums: Vec<f64>,
    pub verdict: String,
    pub horizon: usize,
}

impl BrjunoReport {
    pub fn to_json(&self) -> Value {
        json!({
            "partial_sums": self.partial_sums,
            "verdict": self.verdict,
            "horizon": self.horizon,
        })
    }
}

/// Partial sums of `sum_j ln(q_{j+1}) / q_j` over the convergent
/// denominators. Finitely many terms cannot decide the condition; the
/// verdict states only how the terms behave up to the horizon.
pub fn brjuno_profile(cf: &CFExpansion, terms: usize) -> Result<BrjunoReport> {
    cf.check_invariants()?;
    let avail = cf.qden.len().saturating_sub(1);
    if terms > avail {
        return Err(Error::Validation(format!(
            "requested {terms} terms, only {avail} quotients available"
        )));
    }
    let mut sums = Vec::with_capacity(terms);
    let mut acc = 0.0;
    let mut increments = Vec::with_capacity(terms);
    for j in 0..terms {
        let qj = cf.qden[j].to_f64().unwrap_or(f64::INFINITY);
        let inc = ln_biguint(&cf.qden[j + 1]) / qj;
        acc += inc;
        sums.push(acc);
        increments.push(inc);
    }
    let verdict = if terms == 0 {
        "advisory-empty".to_string()
    } else if cf.alpha.is_some() && terms == cf.quotients.len() && cf.quotients.len() < 64 {
        // A terminating expansion (rational alpha) has a finite sum.
        "advisory-finite".to_string()
    } else {
        let tail = increments.iter().rev().take(5).collect::<Vec<_>>();
        let decreasing = tail.windows(2).all(|w| w[0] <= w[1]);
        if decreasing && *tail[0] < 1e-3 {
            "advisory-summable-at-horizon".to_string()
        } else {
            "advisory-growing-at-horizon".to_string()
        }
    };
    Ok(BrjunoReport {
        partial_sums: sums,
        verdict,
        horizon: terms,
    })
}

/// Result of a Koenigs linearization evaluation.
#[derive(Clone, Debug)]
pub struct KoenigsResult {
    /// `h(z) ~ lim a^{-n} f^n(z)` (computed on the inverse map when the
    /// multiplier is expanding).
    pub value: Complex64,
    /// Residual of the functional equation `|h(f(z)) - a h(z)|`.
    pub residual: f64,
    pub iterations: usize,
    /// Multiplier actually iterated (inverted when `|f'(0)| > 1`).
    pub multiplier: Complex64,
}

impl KoenigsResult {
    pub fn to_json(&self) -> Value {
        json!({
            "value": {"re": self.value.re, "im": self.value.im},
            "residual": self.residual,
            "iterations": self.iterations,
        })
    }
}

fn eval_series(f: &PSeries<Approx>, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in f.coeffs().iter().rev() {
        acc = acc * z + c.approx();
    }
    acc
}

/// Evaluate the Koenigs linearizer `h(z) = lim a^{-n} f^n(z)` of a
/// hyperbolic germ at a seed point.
///
/// For `|a| > 1` the series is inverted first and the limit taken on the
/// contracting inverse. Errors: [`Error::NonHyperbolic`] when `|a| = 1`
/// within tolerance; [`Error::NoConvergence`] when the successive
/// differences stagnate above tolerance.
pub fn koenigs(f: &PSeries<Approx>, seed: Complex64, iters: usize) -> Result<KoenigsResult> {
    if !f.coeff(0).is_zero() {
        return Err(Error::Validation("map must fix the origin".into()));
    }
    let a = f.coeff(1).approx();
    if (a.norm() - 1.0).abs() < 1e-9 {
        return Err(Error::NonHyperbolic);
    }
    if a.norm() < 1e-12 {
        return Err(Error::Validation("superattracting germ: zero multiplier".into()));
    }
    let (map, mult) = if a.norm() > 1.0 {
        (f.reversion()?, 1.0 / a)
    } else {
        (f.clone(), a)
    };
    let mut z = seed;
    let mut scale = Complex64::new(1.0, 0.0);
    let mut h = z;
    let mut last_diff = f64::INFINITY;
    let mut n = 0;
    for i in 1..=iters {
        z = eval_series(&map, z);
        scale /= mult;
        let next = scale * z;
        let diff = (next - h).norm();
        if !next.is_finite() {
            return Err(Error::NoConvergence(format!(
                "iteration escaped after {i} steps; seed outside the basin"
            )));
        }
        h = next;
        n = i;
        if diff < 1e-15 * (1.0 + h.norm()) {
            break;
        }
        if i > 10 && diff > last_diff.max(1e-13) {
            return Err(Error::NoConvergence(format!(
                "differences stagnate at {diff:.3e} after {i} iterations"
            )));
        }
        last_diff = diff;
    }
    // Functional-equation residual |h(f(z)) - a h(z)| at the seed, where h
    // is approximated with the same iteration depth.
    let hn = |w: Complex64| {
        let mut v = w;
        let mut s = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            v = eval_series(&map, v);
            s /= mult;
        }
        s * v
    };
    let fz = eval_series(&map, seed);
    let residual = (hn(fz) - mult * hn(seed)).norm();
    Ok(KoenigsResult {
        value: h,
        residual,
        iterations: n,
        multiplier: mult,
    })
}

/// Diophantine profile of a bundle class `z0` on `C/(Z + tau Z)`.
#[derive(Clone, Debug)]
pub struct DioProfile {
    pub distances: Vec<f64>,
    pub verdict: String,
    pub horizon: usize,
}

impl DioProfile {
    pub fn to_json(&self) -> Value {
        json!({
            "distances": self.distances,
            "verdict": self.verdict,
            "horizon": self.horizon,
        })
    }
}

/// Flat distance from `k z0` to the lattice `Z + tau Z`, minimized over the
/// ball of lattice points of combinatorial radius `ceil(|k z0|) + 1`.
pub fn lattice_distance(tau: Complex64, w: Complex64) -> f64 {
    let r = w.norm().ceil() as i64 + 1;
    let mut best = f64::INFINITY;
    for mm in -r..=r {
        for nn in -r..=r {
            let gamma = Complex64::new(mm as f64, 0.0) + Complex64::new(nn as f64, 0.0) * tau;
            best = best.min((w - gamma).norm());
        }
    }
    best
}

/// Distances `d_k = d(k z0, Gamma_tau)` for `k = 1..K` with the advisory
/// verdict of the bound `d_k >= eps / k^alpha`.
pub fn diophantine_profile(
    tau: Complex64,
    z0: Complex64,
    big_k: usize,
    alpha: f64,
    eps: f64,
) -> Result<DioProfile> {
    if tau.im <= 0.0 {
        return Err(Error::Validation("tau must have positive imaginary part".into()));
    }
    if big_k == 0 {
        return Err(Error::Validation("horizon K must be >= 1".into()));
    }
    let mut distances = Vec::with_capacity(big_k);
    let mut violation = None;
    for k in 1..=big_k {
        let d = lattice_distance(tau, z0 * k as f64);
        if violation.is_none() && d < eps / (k as f64).powf(alpha) {
            violation = Some(k);
        }
        distances.push(d);
    }
    let verdict = match violation {
        None => format!("advisory-satisfied-at-horizon-{big_k}"),
        Some(k) => format!("violated-at-k-{k}"),
    };
    Ok(DioProfile {
        distances,
        verdict,
        horizon: big_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn golden_convergents_are_fibonacci() {
        let cf = CFExpansion::golden(12);
        cf.check_invariants().unwrap();
        let fib = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233];
        for (i, f) in fib.iter().enumerate() {
            assert_eq!(cf.qden[i], big(*f));
        }
    }

    #[test]
    fn rational_expansion_terminates_and_approximates() {
        // 7/16 = [0; 2, 3, 2]
        let cf = CFExpansion::from_rational(&big(7), &big(16)).unwrap();
        assert_eq!(cf.quotients, vec![big(2), big(3), big(2)]);
        let last = cf.qden.len() - 1;
        assert_eq!(
            cf.pnum[last].to_f64().unwrap() / cf.qden[last].to_f64().unwrap(),
            7.0 / 16.0
        );
        let report = brjuno_profile(&cf, 3).unwrap();
        assert_eq!(report.verdict, "advisory-finite");
    }

    #[test]
    fn convergents_approximate_alpha() {
        let alpha = (5.0f64.sqrt() - 1.0) / 2.0;
        let cf = CFExpansion::from_real(alpha, 20).unwrap();
        cf.check_invariants().unwrap();
        for n in 1..cf.qden.len() - 1 {
            let (p, q) = (cf.pnum[n].to_f64().unwrap(), cf.qden[n].to_f64().unwrap());
            let qnext = cf.qden[n + 1].to_f64().unwrap();
            assert!((alpha - p / q).abs() < 1.0 / (q * qnext));
        }
    }

    #[test]
    fn golden_brjuno_terms_shrink() {
        let cf = CFExpansion::golden(60);
        let report = brjuno_profile(&cf, 50).unwrap();
        // increments go to zero geometrically: partial sums nearly flat.
        let tail_gap = report.partial_sums[49] - report.partial_sums[44];
        assert!(tail_gap < 1e-6);
        assert!(report.verdict.starts_with("advisory-summable"));
    }

    #[test]
    fn forced_superexponential_growth_diverges() {
        // a_{j+1} = 2^{q_j} makes ln(q_{j+1})/q_j ~ ln(2) at every step.
        let mut quotients = vec![big(1)];
        let mut cf = CFExpansion::from_quotients(quotients.clone()).unwrap();
        for _ in 0..3 {
            let last_q = cf.qden.last().unwrap().to_u64().unwrap();
            quotients.push(BigUint::one() << last_q);
            cf = CFExpansion::from_quotients(quotients.clone()).unwrap();
        }
        let report = brjuno_profile(&cf, 4).unwrap();
        let inc_late = report.partial_sums[3] - report.partial_sums[2];
        assert!(inc_late > 0.5, "late increment {inc_late}");
        assert!(report.verdict.starts_with("advisory-growing"));
    }

    #[test]
    fn liouville_quotient_blows_past_threshold() {
        let huge = BigUint::one() << 1500;
        let cf = CFExpansion::from_quotients(vec![big(1), huge, big(1), big(1)]).unwrap();
        let report = brjuno_profile(&cf, 4).unwrap();
        assert!(report.partial_sums[1] > 1e3);
    }

    #[test]
    fn koenigs_linear_map_is_identity() {
        let a = Approx::new(0.4, 0.3);
        let f = PSeries::monomial(&a, 1, 6);
        let seed = Complex64::new(0.1, 0.05);
        let r = koenigs(&f, seed, 40).unwrap();
        assert!((r.value - seed).norm() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn koenigs_quadratic_example() {
        // f = z/2 + z^2 at z = 0.1: contract |h(f(z)) - h(z)/2| < 1e-10.
        let f = PSeries::new(vec![
            <Approx as Coeff>::zero(),
            Approx::new(0.5, 0.0),
            <Approx as Coeff>::one(),
        ]);
        let r = koenigs(&f, Complex64::new(0.1, 0.0), 60).unwrap();
        assert!(r.residual < 1e-10, "residual {}", r.residual);
    }

    #[test]
    fn koenigs_expanding_multiplier_inverts() {
        let f = PSeries::new(vec![
            <Approx as Coeff>::zero(),
            Approx::new(2.0, 0.0),
            <Approx as Coeff>::one(),
        ])
        .truncate_to(24);
        let r = koenigs(&f, Complex64::new(0.05, 0.0), 60).unwrap();
        assert!((r.multiplier - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(r.residual < 1e-9, "residual {}", r.residual);
    }

    #[test]
    fn koenigs_rejects_unitary() {
        let theta = 0.3f64;
        let a = Approx::new(theta.cos(), theta.sin());
        let mut f = PSeries::monomial(&a, 1, 4);
        f = f.add(&PSeries::monomial(&<Approx as Coeff>::one(), 2, 4));
        assert!(matches!(
            koenigs(&f, Complex64::new(0.1, 0.0), 30),
            Err(Error::NonHyperbolic)
        ));
    }

    #[test]
    fn diophantine_examples() {
        let tau = Complex64::new(0.0, 1.0);
        let zero = diophantine_profile(tau, Complex64::new(0.0, 0.0), 5, 2.0, 1e-3).unwrap();
        assert!(zero.distances.iter().all(|d| *d < 1e-12));
        let torsion = diophantine_profile(tau, Complex64::new(0.5, 0.0), 4, 2.0, 1e-3).unwrap();
        assert!(torsion.distances[1] < 1e-12); // d_2 = 0
        let z0 = Complex64::new(2.0f64.sqrt() - 1.0, 0.0);
        let p = diophantine_profile(tau, z0, 200, 2.0, 1e-6).unwrap();
        assert!(p.distances.iter().all(|d| *d > 0.0));
        assert!(p.verdict.starts_with("advisory-satisfied"));
    }

    #[test]
    fn diophantine_invariances() {
        let tau = Complex64::new(0.3, 1.2);
        let z0 = Complex64::new(0.37, 0.21);
        let base = diophantine_profile(tau, z0, 40, 2.0, 1e-9).unwrap();
        let shifted = diophantine_profile(tau, z0 + Complex64::new(2.0, 0.0) + tau, 40, 2.0, 1e-9)
            .unwrap();
        let rebased = diophantine_profile(tau + Complex64::new(1.0, 0.0), z0, 40, 2.0, 1e-9)
            .unwrap();
        for k in 0..40 {
            assert!((base.distances[k] - shifted.distances[k]).abs() < 1e-9);
            assert!((base.distances[k] - rebased.distances[k]).abs() < 1e-9);
        }
    }
}
