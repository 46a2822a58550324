//! Invariants of pairs of foliations through their holonomy pairs: tangency
//! order, the affine structure `(theta, c, u)`, compatibility, and the full
//! classification `(m, k, p, lambda, Lambda)` modulo the `Z_{k'}` action.
//!
//! The classification takes the holonomy pair of the tangent foliation (the
//! F0-type representation, torsion along the loop `1`) and the holonomy pair
//! of the transverse one (F-infinity-type). After normalizing the first to
//! its exact model `(a1 y, atau phi_{k,lambda})`, the residual gauge is the
//! centralizer of that model together with germs tangent to the identity to
//! order `k+1`. Both kinds of gauge perturb the dual form of the logarithm of
//! the second pair only at exponents `>= k-p-1 >= 0`, so the principal part —
//! which is exactly the polar data `Lambda` — can be read off directly; the
//! non-model principal coefficients are verified to vanish. The remaining
//! ambiguity is the `Z_{k'}` action `lambda_i -> mu^{-i} lambda_i`, removed
//! by a fixed canonical order.

use serde_json::{json, Value};

use crate::coefficients::{mul_order, powi, Coeff};
use crate::error::{Error, Result};
use crate::flows::{dual_form, formal_log};
use crate::germs::Germ;
use crate::normalform::{normalize_pair, HolRep, PairNF, TORSION_BOUND};

/// Tolerance for the floating comparisons of the affine solver.
const AFFINE_TOL: f64 = 1e-9;

/// The affine structure of a tangency-(k+1) pair along the two generators.
#[derive(Clone, Debug)]
pub struct AffineStructure<K: Coeff> {
    /// `e^{theta gamma} = a_gamma^{-k}`; zero in the unitary case.
    pub theta: K,
    /// `u(gamma) = c (e^{theta gamma} - 1)` (or `c gamma` when `theta = 0`).
    pub c: K,
    pub u1: K,
    pub utau: K,
}

/// Classification case of a bifoliated pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairCase {
    /// `Lambda = 0`, `p = -1`: the transverse foliation is a fibration.
    FibrationTransverse,
    /// `p = 0`: only `lambda_0 != 0`, logarithmic transverse model.
    Logarithmic,
    /// `0 < p < k`.
    Intermediate,
}

impl PairCase {
    pub fn tag(&self) -> &'static str {
        match self {
            PairCase::FibrationTransverse => "FIBRATION_TRANSVERSE",
            PairCase::Logarithmic => "LOGARITHMIC",
            PairCase::Intermediate => "INTERMEDIATE",
        }
    }
}

/// Complete invariants of a bifoliated pair.
#[derive(Clone, Debug)]
pub struct PairInvariants<K: Coeff> {
    pub m: u32,
    pub k: usize,
    /// Tangency parameter: `-1 <= p < k`, `p = m * deg P` when `Lambda != 0`.
    pub p: i64,
    pub lambda: K,
    /// Canonical representative of `Lambda` under the `Z_{k'}` action.
    pub lambda_seq: Vec<K>,
    pub case: PairCase,
}

impl<K: Coeff> PairInvariants<K> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "k": self.k,
            "p": self.p,
            "lambda": self.lambda.to_json(),
            "Lambda": self.lambda_seq.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "case": self.case.tag(),
        })
    }
}

/// Tangency order of two foliations from their holonomies: the least contact
/// order over the two loops. Equals `k+1` for two finite pencil members and
/// `p+1` against the fiber at infinity.
pub fn tangency<K: Coeff>(rep_f: &HolRep<K>, rep_g: &HolRep<K>) -> Result<usize> {
    let c1 = rep_f.phi1.contact_order(&rep_g.phi1);
    let ctau = rep_f.phitau.contact_order(&rep_g.phitau);
    match (c1, ctau) {
        (Some(a), Some(b)) => Ok(a.min(b)),
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Err(Error::TruncationTooLow(
            "holonomies agree to full truncation: tangency undetected".into(),
        )),
    }
}

fn approx_close(a: num_complex::Complex64, b: num_complex::Complex64) -> bool {
    (a - b).norm() <= AFFINE_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Solve the affine structure of a pair with tangency `k+1`.
///
/// For each generator, `phi_gamma = rho_G(gamma) o rho_F(gamma)^{-1}` is
/// tangent to the identity; `u(gamma)` is its `y^{k+1}` coefficient. The
/// dilation factor solves `e^{theta gamma} = a_gamma^{-k}` with the branch
/// fixed across the two generators; unitary multipliers force `theta = 0`.
pub fn affine_structure<K: Coeff>(
    rep_f: &HolRep<K>,
    rep_g: &HolRep<K>,
    k: usize,
) -> Result<AffineStructure<K>> {
    let tau = rep_f
        .tau
        .clone()
        .or_else(|| rep_g.tau.clone())
        .ok_or_else(|| Error::Validation("affine structure requires tau".into()))?;
    let mut u = Vec::new();
    for (f, g) in [(&rep_f.phi1, &rep_g.phi1), (&rep_f.phitau, &rep_g.phitau)] {
        let phi = g.compose(&f.inverse());
        if !phi.linear_coeff().is_one() {
            return Err(Error::InconsistentAffine(
                "holonomies have different linear parts".into(),
            ));
        }
        if phi.trunc() < k + 1 {
            return Err(Error::TruncationTooLow(
                "truncation below the tangency order".into(),
            ));
        }
        u.push(phi.coeff(k + 1));
    }
    let (u1, utau) = (u[0].clone(), u[1].clone());
    let a1 = powi(&rep_f.phi1.linear_coeff(), -(k as i64))?.approx();
    let atau = powi(&rep_f.phitau.linear_coeff(), -(k as i64))?.approx();
    let tau_x = tau.approx();
    if (a1.norm() - 1.0).abs() <= AFFINE_TOL && (atau.norm() - 1.0).abs() <= AFFINE_TOL {
        // Unitary: translation structure, theta = 0, u(gamma) = c * gamma.
        let c = u1.clone();
        if !utau.close_to(&c.mul(&tau)) && !approx_close(utau.approx(), c.approx() * tau_x) {
            return Err(Error::InconsistentAffine(format!(
                "translation structure mismatch: u(tau) = {utau}, expected c*tau"
            )));
        }
        return Ok(AffineStructure {
            theta: K::zero(),
            c,
            u1,
            utau,
        });
    }
    // Dilation: Re(theta) from |a1^{-k}|, Im(theta) from |atau^{-k}|, then
    // both congruences e^{theta gamma} = a_gamma^{-k} verified.
    let re = a1.norm().ln();
    let im = (re * tau_x.re - atau.norm().ln()) / tau_x.im;
    let theta_x = num_complex::Complex64::new(re, im);
    if !approx_close(theta_x.exp(), a1) || !approx_close((theta_x * tau_x).exp(), atau) {
        return Err(Error::InconsistentAffine(
            "no common branch solves e^{theta gamma} = a_gamma^{-k}".into(),
        ));
    }
    let c_x = u1.approx() / (theta_x.exp() - 1.0);
    if !approx_close(utau.approx(), c_x * ((theta_x * tau_x).exp() - 1.0)) {
        return Err(Error::InconsistentAffine(
            "u(tau) incompatible with the dilation structure".into(),
        ));
    }
    let theta = K::from_approx(theta_x).ok_or_else(|| {
        Error::BackendMismatch("dilation factor theta is not representable exactly".into())
    })?;
    let c = K::from_approx(c_x).ok_or_else(|| {
        Error::BackendMismatch("affine constant c is not representable exactly".into())
    })?;
    Ok(AffineStructure { theta, c, u1, utau })
}

/// Does the pair satisfy the compatibility relation at its tangency order?
///
/// For `k > 0` this is solvability of the affine structure; for `k = 0` the
/// ratio of linear parts is always the exponential of a period pair.
pub fn compatibility_check<K: Coeff>(rep_f: &HolRep<K>, rep_g: &HolRep<K>, k: usize) -> bool {
    if k == 0 {
        return !rep_f.phi1.linear_coeff().is_zero() && !rep_g.phi1.linear_coeff().is_zero();
    }
    affine_structure(rep_f, rep_g, k).is_ok()
}

/// Canonical representative of `Lambda` under `lambda_i -> mu^{-i} lambda_i`,
/// `mu^{k'} = 1`: the orbit element minimal in the documented coefficient
/// order.
pub fn canonicalize_lambda<K: Coeff>(seq: &[K], kprime: usize) -> Result<Vec<K>> {
    if kprime <= 1 || seq.iter().all(|c| c.is_zero()) {
        return Ok(seq.to_vec());
    }
    let zeta = K::root_of_unity(kprime as u32)?;
    let mut best: Option<Vec<K>> = None;
    let mut mu = K::one();
    for _ in 0..kprime {
        let candidate: Vec<K> = seq
            .iter()
            .enumerate()
            .map(|(i, c)| Ok(powi(&mu, -(i as i64))?.mul(c)))
            .collect::<Result<Vec<_>>>()?;
        best = Some(match best {
            None => candidate,
            Some(b) => {
                let cand_smaller = b
                    .iter()
                    .zip(candidate.iter())
                    .find_map(|(x, y)| {
                        if x.close_to(y) {
                            None
                        } else {
                            Some(y.canon_cmp(x) == std::cmp::Ordering::Less)
                        }
                    })
                    .unwrap_or(false);
                if cand_smaller {
                    candidate
                } else {
                    b
                }
            }
        });
        mu = mu.mul(&zeta);
    }
    Ok(best.expect("kprime >= 1"))
}

/// Resolve `c` from `r1 = e^c`, `rtau = e^{c tau}` with the branch fixed by
/// the pair of moduli.
fn log_pair(r1: num_complex::Complex64, rtau: num_complex::Complex64, tau: num_complex::Complex64)
    -> Result<num_complex::Complex64>
{
    let re = r1.norm().ln();
    let im = (re * tau.re - rtau.norm().ln()) / tau.im;
    let c = num_complex::Complex64::new(re, im);
    if !approx_close(c.exp(), r1) || !approx_close((c * tau).exp(), rtau) {
        return Err(Error::Inconsistency(
            "linear parts are not a consistent exponential period pair".into(),
        ));
    }
    Ok(c)
}

/// Classify a bifoliated pair from its two holonomy representations.
///
/// `rep_f` must be F0-type: its pair normal form is resonant with times
/// `(0, 1)`. `rep_g` is the transverse representation, analyzed in the frame
/// where `rep_f` is exactly its model.
pub fn classify_pair<K: Coeff>(
    rep_f: &HolRep<K>,
    rep_g: &HolRep<K>,
    assume_exact: bool,
) -> Result<PairInvariants<K>> {
    let tau = rep_f
        .tau
        .clone()
        .or_else(|| rep_g.tau.clone())
        .ok_or_else(|| Error::Validation("classification requires tau".into()))?;
    if !rep_g.commutes() {
        return Err(Error::Nonabelian);
    }
    let nf = normalize_pair(rep_f, assume_exact)?;
    let (k, lambda, t1, ttau, a1, atau, h) = match nf {
        PairNF::ResonantPair {
            k,
            lambda,
            t1,
            ttau,
            a1,
            atau,
            h,
            ..
        } => (k, lambda, t1, ttau, a1, atau, h),
        _ => {
            return Err(Error::NotF0Type(
                "tangent holonomy pair is not resonant".into(),
            ))
        }
    };
    if !t1.is_zero() {
        return Err(Error::NotF0Type(format!(
            "holonomy along the loop 1 has nonzero flow time {t1}"
        )));
    }
    if !ttau.is_one() {
        return Err(Error::Validation(format!(
            "tangent pair has non-unit time scale {ttau}; rescaling is not implemented"
        )));
    }
    let o1 = mul_order(&a1, TORSION_BOUND)
        .ok_or_else(|| Error::NotF0Type("a1 is not torsion".into()))?;
    let otau = mul_order(&atau, TORSION_BOUND)
        .ok_or_else(|| Error::NotF0Type("atau is not torsion".into()))?;
    let m = num_integer::lcm(o1, otau);
    if k % m as usize != 0 {
        return Err(Error::Inconsistency(format!(
            "resonance order {k} is not a multiple of the torsion order {m}"
        )));
    }
    let kprime = k / m as usize;
    // Move rep_g to the frame where rep_f is exactly its model.
    let g1 = rep_g.phi1.conjugate_by(&h);
    let gtau = rep_g.phitau.conjugate_by(&h);
    let r1 = g1.linear_coeff().div(&a1)?;
    let rtau = gtau.linear_coeff().div(&atau)?;
    let r1_t = mul_order(&r1, TORSION_BOUND);
    let rtau_t = mul_order(&rtau, TORSION_BOUND);
    if r1_t.is_none() || rtau_t.is_none() {
        // Logarithmic case: linear holonomy ratios (e^c, e^{c tau}),
        // lambda_0 = 1/c. Transcendental: floating backend only.
        let c = log_pair(r1.approx(), rtau.approx(), tau.approx())?;
        let lambda0 = K::from_approx(1.0 / c).ok_or_else(|| {
            Error::BackendMismatch(
                "logarithmic invariant lambda_0 is transcendental; use the floating backend"
                    .into(),
            )
        })?;
        let mut seq = vec![K::zero(); kprime];
        seq[0] = lambda0;
        let seq = canonicalize_lambda(&seq, kprime)?;
        return Ok(PairInvariants {
            m,
            k,
            p: 0,
            lambda,
            lambda_seq: seq,
            case: PairCase::Logarithmic,
        });
    }
    if !r1.is_one() || !rtau.is_one() {
        return Err(Error::Inconsistency(
            "transverse holonomy has torsion linear parts differing from the tangent pair".into(),
        ));
    }
    let w1 = g1.iterate(o1 as i64);
    let wtau = gtau.iterate(otau as i64);
    let id1 = w1.contact_order(&Germ::identity(w1.trunc())).is_none();
    let idtau = wtau.contact_order(&Germ::identity(wtau.trunc())).is_none();
    if id1 && idtau {
        // Finite transverse holonomy: transverse fibration, Lambda = 0.
        return Ok(PairInvariants {
            m,
            k,
            p: -1,
            lambda,
            lambda_seq: vec![K::zero(); kprime],
            case: PairCase::FibrationTransverse,
        });
    }
    // Intermediate case: the transverse pair is (a1 exp(u), atau exp(tau u))
    // with u a gauge conjugate of v_Lambda; Lambda is the principal part of
    // dual_form(u).
    let (u, tscale) = if !id1 {
        (formal_log(&w1)?, K::from_int(o1 as i64))
    } else {
        (formal_log(&wtau)?, K::from_int(otau as i64).mul(&tau))
    };
    let u = u.scale(&tscale.inv()?);
    let omega = dual_form(&u)?;
    let val = omega
        .series()
        .valuation()
        .ok_or_else(|| Error::Inconsistency("zero dual form of a nonzero field".into()))?;
    let p = -val - 1;
    if p <= 0 || p >= k as i64 {
        return Err(Error::Inconsistency(format!(
            "transverse tangency parameter p = {p} outside 0 < p < k = {k}"
        )));
    }
    if p % m as i64 != 0 {
        return Err(Error::Inconsistency(format!(
            "p = {p} is not a multiple of the torsion order {m}"
        )));
    }
    // Cross-generator consistency: both logs must give the same field.
    if !id1 && !idtau {
        let other = formal_log(&wtau)?.scale(&K::from_int(otau as i64).mul(&tau).inv()?);
        let n = u.trunc().min(other.trunc());
        if !u
            .series()
            .truncate_to(n)
            .sub(&other.series().truncate_to(n))
            .is_zero()
        {
            return Err(Error::Inconsistency(
                "the two transverse generators do not flow the same field".into(),
            ));
        }
    }
    // Gauge perturbs omega only at exponents >= k-p-1 >= 0: the principal
    // part is invariant. Non-model principal coefficients must vanish.
    let mut seq = vec![K::zero(); kprime];
    for e in val..=(-1) {
        let c = omega.coeff(e);
        if (-e - 1) % m as i64 == 0 {
            let i = ((-e - 1) / m as i64) as usize;
            seq[i] = c;
        } else if !c.close_to(&K::zero()) {
            return Err(Error::Inconsistency(format!(
                "non-model polar coefficient at exponent {e}"
            )));
        }
    }
    let guard = (k as i64 - p - 2).min(omega.trunc());
    for e in 0..=guard {
        if !omega.coeff(e).close_to(&K::zero()) {
            return Err(Error::Inconsistency(format!(
                "unexpected gauge-invariant holomorphic coefficient at exponent {e}"
            )));
        }
    }
    let seq = canonicalize_lambda(&seq, kprime)?;
    Ok(PairInvariants {
        m,
        k,
        p,
        lambda,
        lambda_seq: seq,
        case: PairCase::Intermediate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Coeff, Cyclo};
    use crate::neighborhood::{build_model, holonomy, ModelSpec, PencilTime};
    use crate::series::PSeries;
    use crate::Approx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    fn q(p: i64, d: i64) -> Cyclo {
        Cyclo::from_ratio(p, d)
    }

    fn tau_i() -> Cyclo {
        Cyclo::root_of_unity(4).unwrap()
    }

    fn model_reps(
        spec: &ModelSpec<Cyclo>,
        n: usize,
        t: PencilTime<Cyclo>,
    ) -> (HolRep<Cyclo>, HolRep<Cyclo>) {
        let pres = build_model(spec, &tau_i(), n).unwrap();
        let f = holonomy(&pres, spec, &PencilTime::Finite(z(0))).unwrap();
        let g = holonomy(&pres, spec, &t).unwrap();
        (f, g)
    }

    #[test]
    fn tangency_of_pencil_members() {
        let spec = ModelSpec::new(z(1), z(1), 1, 2, q(1, 3), vec![z(0), z(1)]).unwrap();
        let (f, g) = model_reps(&spec, 10, PencilTime::Finite(z(1)));
        assert_eq!(tangency(&f, &g).unwrap(), 3); // k + 1
        let (f, ginf) = model_reps(&spec, 10, PencilTime::Infinity);
        assert_eq!(tangency(&f, &ginf).unwrap(), 2); // p + 1 = m*deg P + 1
        assert!(matches!(
            tangency(&f, &f),
            Err(Error::TruncationTooLow(_))
        ));
    }

    #[test]
    fn tangency_detects_p_plus_one() {
        // deg P = 1, m = 1, k = 3: infinity fiber has contact p+1 = 2 < k+1.
        let spec = ModelSpec::new(z(1), z(1), 1, 3, z(0), vec![z(0), z(2)]).unwrap();
        let (f, ginf) = model_reps(&spec, 12, PencilTime::Infinity);
        assert_eq!(tangency(&f, &ginf).unwrap(), 2);
    }

    #[test]
    fn affine_translation_structure() {
        // Unitary linear parts: theta = 0, u(1) = c, u(tau) = c*tau.
        let n = 7;
        let k = 2;
        let c = q(2, 1);
        let f = HolRep::new(Germ::identity(n), Germ::identity(n)).with_tau(tau_i());
        let build = |u: Cyclo| {
            Germ::new(PSeries::identity(n).add(&PSeries::monomial(&u, k + 1, n))).unwrap()
        };
        let g = HolRep::new(build(c.clone()), build(c.mul(&tau_i())));
        let aff = affine_structure(&f, &g, k).unwrap();
        assert!(aff.theta.is_zero());
        assert_eq!(aff.c, c);
        // Breaking u(tau) breaks consistency.
        let bad = HolRep::new(build(c.clone()), build(c.mul(&tau_i()).add(&z(1))));
        assert!(matches!(
            affine_structure(&f, &bad, k),
            Err(Error::InconsistentAffine(_))
        ));
        assert!(compatibility_check(&f, &g, k));
        assert!(!compatibility_check(&f, &bad, k));
    }

    #[test]
    fn affine_dilation_structure_float() {
        // Build from theta != 0 and solve back (floating backend).
        type C = Approx;
        let n = 6;
        let k = 1;
        let tau = C::new(0.3, 1.1);
        let theta = C::new(0.4, -0.2);
        let c = C::new(0.7, 0.35);
        let one = <C as Coeff>::one();
        // a_gamma^{-k} = e^{theta gamma}: k = 1 so a_gamma = e^{-theta gamma}.
        let a1 = theta.neg().exp().unwrap();
        let atau = theta.mul(&tau).neg().exp().unwrap();
        let e1 = theta.exp().unwrap().sub(&one);
        let etau = theta.mul(&tau).exp().unwrap().sub(&one);
        let u1 = c.mul(&e1);
        let utau = c.mul(&etau);
        let lin = |a: &C| Germ::linear(a, n).unwrap();
        let bump = |a: &C, u: &C| {
            Germ::new(
                PSeries::identity(n)
                    .add(&PSeries::monomial(u, k + 1, n))
                    .compose(&PSeries::monomial(a, 1, n))
                    .unwrap(),
            )
            .unwrap()
        };
        let f = HolRep::new(lin(&a1), lin(&atau)).with_tau(tau.clone());
        let g = HolRep::new(bump(&a1, &u1), bump(&atau, &utau));
        let aff = affine_structure(&f, &g, k).unwrap();
        assert!((aff.theta.approx() - theta.approx()).norm() < 1e-10);
        assert!((aff.c.approx() - c.approx()).norm() < 1e-10);
    }

    #[test]
    fn classify_fibration_case() {
        let spec = ModelSpec::new(z(-1), z(-1), 2, 2, q(1, 2), vec![]).unwrap();
        let (f, g) = model_reps(&spec, 10, PencilTime::Infinity);
        let inv = classify_pair(&f, &g, true).unwrap();
        assert_eq!(inv.case, PairCase::FibrationTransverse);
        assert_eq!((inv.m, inv.k, inv.p), (2, 2, -1));
        assert_eq!(inv.lambda, q(1, 2));
        assert!(inv.lambda_seq.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn classify_intermediate_round_trip() {
        let spec = ModelSpec::new(z(1), z(1), 1, 2, q(1, 3), vec![z(0), q(2, 1)]).unwrap();
        let (f, g) = model_reps(&spec, 12, PencilTime::Infinity);
        let inv = classify_pair(&f, &g, true).unwrap();
        assert_eq!(inv.case, PairCase::Intermediate);
        assert_eq!((inv.m, inv.k, inv.p), (1, 2, 1));
        assert_eq!(inv.lambda, q(1, 3));
        assert_eq!(
            inv.lambda_seq,
            canonicalize_lambda(&[z(0), q(2, 1)], 2).unwrap()
        );
    }

    #[test]
    fn classify_intermediate_with_torsion() {
        let spec = ModelSpec::new(z(-1), z(1), 2, 4, q(1, 2), vec![z(0), z(3)]).unwrap();
        let (f, g) = model_reps(&spec, 14, PencilTime::Infinity);
        let inv = classify_pair(&f, &g, true).unwrap();
        assert_eq!(inv.case, PairCase::Intermediate);
        assert_eq!((inv.m, inv.k, inv.p), (2, 4, 2));
        assert_eq!(
            inv.lambda_seq,
            canonicalize_lambda(&[z(0), z(3)], 2).unwrap()
        );
    }

    #[test]
    fn classify_logarithmic_float() {
        type C = Approx;
        let one = <C as Coeff>::one();
        let tau = C::new(0.0, 1.0);
        let lambda0 = C::new(0.5, 0.0);
        let spec = ModelSpec::new(
            one.clone(),
            one.clone(),
            1,
            2,
            C::new(0.25, 0.0),
            vec![lambda0.clone()],
        )
        .unwrap();
        let pres = build_model(&spec, &tau, 10).unwrap();
        let f = holonomy(&pres, &spec, &PencilTime::Finite(<C as Coeff>::zero())).unwrap();
        let g = holonomy(&pres, &spec, &PencilTime::Infinity).unwrap();
        let inv = classify_pair(&f, &g, true).unwrap();
        assert_eq!(inv.case, PairCase::Logarithmic);
        assert_eq!(inv.p, 0);
        assert!((inv.lambda_seq[0].approx() - lambda0.approx()).norm() < 1e-8);
    }

    #[test]
    fn classification_survives_admissible_conjugation() {
        let spec = ModelSpec::new(z(1), z(1), 1, 2, q(1, 3), vec![z(0), q(2, 1)]).unwrap();
        let n = 12;
        let (f, g) = model_reps(&spec, n, PencilTime::Infinity);
        let base = classify_pair(&f, &g, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let mut c = vec![z(0), z(1)];
            for _ in 2..=n {
                c.push(z(rng.gen_range(-2..=2)));
            }
            let phi = Germ::new(PSeries::new(c)).unwrap();
            // psi = phi mod y^{k+2}: perturb phi beyond order k+1.
            let psi = Germ::new(
                PSeries::identity(n)
                    .add(&PSeries::monomial(&z(rng.gen_range(-2..=2)), spec.k + 2, n)),
            )
            .unwrap()
            .compose(&phi);
            let fc = HolRep::new(f.phi1.conjugate_by(&phi), f.phitau.conjugate_by(&phi))
                .with_tau(tau_i());
            let gc = HolRep::new(g.phi1.conjugate_by(&psi), g.phitau.conjugate_by(&psi))
                .with_tau(tau_i());
            let inv = classify_pair(&fc, &gc, true).unwrap();
            assert_eq!(inv.case, base.case);
            assert_eq!((inv.m, inv.k, inv.p), (base.m, base.k, base.p));
            assert_eq!(inv.lambda, base.lambda);
            assert_eq!(inv.lambda_seq, base.lambda_seq);
        }
    }

    #[test]
    fn not_f0_type_is_rejected() {
        let spec = ModelSpec::new(z(1), z(1), 1, 2, q(1, 3), vec![z(0), z(1)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        // Holonomy of a finite member t != 0 is not F0-type: the loop-1 germ
        // has nonzero flow time.
        let f_bad = holonomy(&pres, &spec, &PencilTime::Finite(z(1))).unwrap();
        let g = holonomy(&pres, &spec, &PencilTime::Infinity).unwrap();
        assert!(matches!(
            classify_pair(&f_bad, &g, true),
            Err(Error::NotF0Type(_))
        ));
    }

    #[test]
    fn canonicalization_properties() {
        // k' = 2: orbit of (0, x) is {(0, x), (0, -x)}.
        let a = canonicalize_lambda(&[z(0), z(5)], 2).unwrap();
        let b = canonicalize_lambda(&[z(0), z(-5)], 2).unwrap();
        assert_eq!(a, b);
        // Idempotence and orbit-constancy on a k' = 4 example.
        let zeta = Cyclo::root_of_unity(4).unwrap();
        let seq = vec![q(1, 2), z(3), zeta.clone(), z(-2)];
        let canon = canonicalize_lambda(&seq, 4).unwrap();
        assert_eq!(canonicalize_lambda(&canon, 4).unwrap(), canon);
        let mut mu = zeta.clone();
        for _ in 0..3 {
            let moved: Vec<Cyclo> = seq
                .iter()
                .enumerate()
                .map(|(i, c)| powi(&mu, -(i as i64)).unwrap().mul(c))
                .collect();
            assert_eq!(canonicalize_lambda(&moved, 4).unwrap(), canon);
            mu = mu.mul(&zeta);
        }
    }
}

