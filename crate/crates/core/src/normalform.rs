//! Normal-form reduction of single germs and commuting pairs.
//!
//! A germ with multiplier `a` is either linearizable order by order (when `a`
//! is not a root of unity at desk scale) or resonant: some iterate `f^m` is
//! tangent to the identity and lies in a flow. The complete invariants of the
//! resonant case are `(a, k, lambda)` with `k+1` the valuation of
//! `log(f^m)` and `lambda = m * residue(dual_form(log(f^m)))`, which is
//! conjugation- and rescaling-invariant.
//!
//! The normalizer is built by an ascending homological loop. Non-resonant
//! orders are killed with `psi = y + d y^n` (first-order slope `a^n - a`);
//! resonant orders `n = 1 mod m` are killed with the flow of the equivariant
//! field `y^{n-k} d/dy`, whose effect on the germ starts exactly at order `n`
//! and is linear in the flow time there (the slope is measured with a probe
//! conjugation rather than derived in closed form). The order `2k+1` is the
//! lambda slot: it is guaranteed to match by invariance and is verified.
//!
//! On the exact backend every resonance question (`a^j = 1`) is decided
//! exactly; the floating backend decides within tolerance.

use serde_json::{json, Value};

use crate::coefficients::{mul_order, powi, Coeff};
use crate::error::{Error, Result};
use crate::flows::{dual_form, flow, formal_log, VField};
use crate::germs::Germ;
use crate::series::PSeries;

/// Torsion detection bound for multipliers.
pub const TORSION_BOUND: u32 = 64;

/// Invariants of a resonant germ: `f` is formally conjugate to
/// `a * flow(v_{k, lambda * time}, time)`; `lambda = lambda0 / time` is the
/// rescaling-invariant residue.
#[derive(Clone, Debug)]
pub struct ResonantData<K: Coeff> {
    /// Multiplier `f'(0)`, a root of unity of order `m`.
    pub a: K,
    /// Multiplicative order of `a`.
    pub m: u32,
    /// Resonance order: `k + 1 = valuation(log f^m)`; `m` divides `k`.
    pub k: usize,
    /// The invariant residue `m * residue(dual_form(log f^m))`.
    pub lambda: K,
    /// Leading flow time: `log(f^m) = m * time * y^{k+1} + ...`.
    pub time: K,
}

/// Normal form of a single germ with its normalizing conjugation.
#[derive(Clone, Debug)]
pub enum DiffeoNF<K: Coeff> {
    /// `h o f o h^{-1} = a y`.
    Linear { a: K, h: Germ<K> },
    /// `h o f o h^{-1} = a * flow(v_{k, lambda*time}, time)`.
    Resonant {
        a: K,
        m: u32,
        k: usize,
        lambda: K,
        time: K,
        h: Germ<K>,
    },
}

/// Holonomy representation of the lattice `Z + tau Z`: images of the loops
/// `1` and `tau`.
#[derive(Clone, Debug)]
pub struct HolRep<K: Coeff> {
    pub phi1: Germ<K>,
    pub phitau: Germ<K>,
    /// Lattice parameter, when the caller tracks it.
    pub tau: Option<K>,
}

/// Normal form of a commuting pair.
#[derive(Clone, Debug)]
pub enum PairNF<K: Coeff> {
    /// Common linearizer: `h` maps the pair to `(a1 y, atau y)`, at least one
    /// multiplier not a root of unity.
    LinearPair { a1: K, atau: K, h: Germ<K> },
    /// Common normalizer into the model group of `v_{k, lambda0}`:
    /// generators become `a_gamma * flow(v_{k, lambda0}, t_gamma)` with
    /// `lambda0 = lambda * tscale` fixed by the resonant generator.
    ResonantPair {
        k: usize,
        /// Rescaling-invariant residue shared by the pair.
        lambda: K,
        /// Model residue actually used by the normal form (`lambda * tscale`).
        lambda0: K,
        t1: K,
        ttau: K,
        a1: K,
        atau: K,
        h: Germ<K>,
    },
    /// Both generators of finite order: the group is finite.
    Finite { a1: K, atau: K },
}

impl<K: Coeff> HolRep<K> {
    pub fn new(phi1: Germ<K>, phitau: Germ<K>) -> Self {
        HolRep {
            phi1,
            phitau,
            tau: None,
        }
    }

    pub fn with_tau(mut self, tau: K) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn trunc(&self) -> usize {
        self.phi1.trunc().min(self.phitau.trunc())
    }

    /// Do the generators commute at the shared truncation?
    pub fn commutes(&self) -> bool {
        let a = self.phi1.compose(&self.phitau);
        let b = self.phitau.compose(&self.phi1);
        let n = a.trunc().min(b.trunc());
        a.truncate_to(n).contact_order(&b.truncate_to(n)).is_none()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "phi1": self.phi1.to_json(),
            "phitau": self.phitau.to_json(),
        });
        if let Some(t) = &self.tau {
            v["tau"] = t.to_json();
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let phi1 = Germ::from_json(
            v.get("phi1")
                .ok_or_else(|| Error::Validation("missing 'phi1'".into()))?,
        )?;
        let phitau = Germ::from_json(
            v.get("phitau")
                .ok_or_else(|| Error::Validation("missing 'phitau'".into()))?,
        )?;
        let tau = match v.get("tau") {
            Some(t) => Some(K::from_json(t)?),
            None => None,
        };
        Ok(HolRep { phi1, phitau, tau })
    }
}

fn is_identity_at_trunc<K: Coeff>(f: &Germ<K>) -> bool {
    f.contact_order(&Germ::identity(f.trunc())).is_none()
}

/// Cheap invariant extraction for a resonant germ (no normalizer built).
///
/// Errors: [`Error::Validation`] if the multiplier is not torsion (use the
/// linear path); [`Error::Periodic`]/[`Error::TruncationTooLow`] when `f^m`
/// is the identity at truncation (`assume_exact` selects which).
pub fn resonant_invariants<K: Coeff>(f: &Germ<K>, assume_exact: bool) -> Result<ResonantData<K>> {
    let a = f.linear_coeff();
    let m = mul_order(&a, TORSION_BOUND).ok_or_else(|| {
        Error::Validation(format!(
            "multiplier is not a root of unity of order <= {TORSION_BOUND}"
        ))
    })?;
    let fm = f.iterate(m as i64);
    if is_identity_at_trunc(&fm) {
        return Err(if assume_exact {
            Error::Periodic
        } else {
            Error::TruncationTooLow(format!(
                "f^{m} is the identity modulo y^{}: periodic or resonance order beyond truncation",
                f.trunc() + 1
            ))
        });
    }
    let v = formal_log(&fm)?;
    let val = v
        .valuation()
        .ok_or_else(|| Error::Inconsistency("zero logarithm of a non-identity germ".into()))?;
    let k = val - 1;
    if k == 0 || k % (m as usize) != 0 {
        return Err(Error::Inconsistency(format!(
            "resonance order k = {k} is not a positive multiple of the torsion order {m}"
        )));
    }
    let mk = K::from_int(m as i64);
    let time = v.coeff(k + 1).div(&mk)?;
    let lambda = dual_form(&v)?.residue().mul(&mk);
    Ok(ResonantData {
        a,
        m,
        k,
        lambda,
        time,
    })
}

/// Reduce a germ to its Theorem-level normal form, returning the invariants
/// and a normalizer `h` with `h o f o h^{-1}` equal to the model.
pub fn normalize_germ<K: Coeff>(f: &Germ<K>, assume_exact: bool) -> Result<DiffeoNF<K>> {
    let n = f.trunc();
    let a = f.linear_coeff();
    match mul_order(&a, TORSION_BOUND) {
        None => {
            // Non-resonant: every order n >= 2 is killable, slope a^n - a != 0.
            let mut cur = f.clone();
            let mut h = Germ::identity(n);
            for e in 2..=n {
                let c = cur.coeff(e);
                if c.is_zero() {
                    continue;
                }
                let slope = powi(&a, e as i64)?.sub(&a);
                let d = c.neg().div(&slope)?;
                let psi = Germ::new(
                    PSeries::identity(n).add(&PSeries::monomial(&d, e, n)),
                )?;
                cur = cur.conjugate_by(&psi);
                h = psi.compose(&h);
            }
            Ok(DiffeoNF::Linear { a, h })
        }
        Some(m) => {
            let data = resonant_invariants(f, assume_exact)?;
            let lambda0 = data.lambda.mul(&data.time);
            let model = model_germ(&data.a, data.k, &lambda0, &data.time, n)?;
            let h = match_to_model(f, &model, m, data.k)?;
            Ok(DiffeoNF::Resonant {
                a: data.a,
                m: data.m,
                k: data.k,
                lambda: data.lambda,
                time: data.time,
                h,
            })
        }
    }
}

/// The model germ `a * flow(v_{k, lambda0}, t)`.
pub fn model_germ<K: Coeff>(a: &K, k: usize, lambda0: &K, t: &K, trunc: usize) -> Result<Germ<K>> {
    let v = VField::model(k, lambda0, trunc);
    let g = flow(&v, t)?;
    Ok(Germ::linear(a, trunc)?.compose(&g))
}

/// Ascending homological loop conjugating `f` onto `model` (same invariants).
fn match_to_model<K: Coeff>(
    f: &Germ<K>,
    model: &Germ<K>,
    m: u32,
    k: usize,
) -> Result<Germ<K>> {
    let n = f.trunc().min(model.trunc());
    let a = f.linear_coeff();
    let mut cur = f.truncate_to(n);
    let model = model.truncate_to(n);
    let mut h = Germ::identity(n);
    for e in 2..=n {
        let delta = model.coeff(e).sub(&cur.coeff(e));
        if delta.is_zero() {
            continue;
        }
        let resonant = e % (m as usize) == 1 % (m as usize);
        let psi = if !resonant {
            let slope = powi(&a, e as i64)?.sub(&a);
            let d = delta.div(&slope)?;
            Germ::new(PSeries::identity(n).add(&PSeries::monomial(&d, e, n)))?
        } else {
            // Resonant slots below k+2 (forced zero by the valuation of the
            // logarithm), the time slot k+1 and the residue slot 2k+1 are all
            // pinned by the invariants; a mismatch there is a contradiction.
            if e <= k + 1 || e == 2 * k + 1 {
                return Err(Error::Inconsistency(format!(
                    "invariant-pinned resonant slot {e} mismatches the model"
                )));
            }
            // Equivariant generator u = y^{e-k} d/dy: the conjugated germ
            // changes only at orders >= e, linearly in the flow time at e.
            let u = VField::new(PSeries::monomial(&K::one(), e - k, n))?;
            let probe = cur.conjugate_by(&flow(&u, &K::one())?);
            let slope = probe.coeff(e).sub(&cur.coeff(e));
            if slope.is_zero() {
                return Err(Error::Inconsistency(format!(
                    "vanishing resonant slope at order {e}"
                )));
            }
            let d = delta.div(&slope)?;
            flow(&u, &d)?
        };
        cur = cur.conjugate_by(&psi);
        h = psi.compose(&h).truncate_to(n);
        if !cur.coeff(e).close_to(&model.coeff(e)) {
            return Err(Error::Inconsistency(format!(
                "homological step failed to match order {e}"
            )));
        }
    }
    if cur.contact_order(&model).is_some() {
        return Err(Error::Inconsistency(
            "normalizer validation failed: conjugate differs from model".into(),
        ));
    }
    Ok(h)
}

/// Read `(a, t)` off a germ of the model group of `v_{k, lambda0}` and verify
/// membership: `f = a * flow(v_{k, lambda0}, t)` at truncation.
pub fn extract_time<K: Coeff>(f: &Germ<K>, k: usize, lambda0: &K) -> Result<(K, K)> {
    let a = f.linear_coeff();
    let g = Germ::linear(&a.inv()?, f.trunc())?.compose(f);
    let t = g.coeff(k + 1);
    let model = model_germ(&a, k, lambda0, &t, f.trunc())?;
    let n = f.trunc().min(model.trunc());
    if f.truncate_to(n).contact_order(&model.truncate_to(n)).is_some() {
        return Err(Error::NotInModel);
    }
    Ok((a, t))
}

/// Match the partner of a normalized resonant generator to the model group.
///
/// Commutation with the lead only pins the partner through order `n - k`: a
/// deviation at order `e` perturbs the commutator at order `e + k`, which is
/// invisible beyond truncation. Those top orders are residual gauge freedom of
/// the lead's normalizer, and are absorbed here with generators `y + d y^e`
/// (`e > n - k`), which move the lead's model only beyond truncation.
/// Deviations at orders `<= n - k` are genuine and rejected.
fn align_partner<K: Coeff>(
    partner: &Germ<K>,
    k: usize,
    lambda0: &K,
) -> Result<(K, K, Germ<K>)> {
    let n = partner.trunc();
    let a = partner.linear_coeff();
    let t = Germ::linear(&a.inv()?, n)?.compose(partner).coeff(k + 1);
    let model = model_germ(&a, k, lambda0, &t, n)?;
    let mut cur = partner.clone();
    let mut chain = Germ::identity(n);
    for e in 2..=n {
        let delta = model.coeff(e).sub(&cur.coeff(e));
        if delta.is_zero() {
            continue;
        }
        if e + k <= n {
            return Err(Error::NotInModel);
        }
        let slope = powi(&a, e as i64)?.sub(&a);
        if slope.is_zero() {
            return Err(Error::Inconsistency(format!(
                "partner deviates at unreachable resonant order {e}"
            )));
        }
        let d = delta.div(&slope)?;
        let psi = Germ::new(PSeries::identity(n).add(&PSeries::monomial(&d, e, n)))?;
        cur = cur.conjugate_by(&psi);
        chain = psi.compose(&chain).truncate_to(n);
    }
    if cur.contact_order(&model).is_some() {
        return Err(Error::NotInModel);
    }
    Ok((a, t, chain))
}

/// Reduce a commuting pair to its pair normal form.
pub fn normalize_pair<K: Coeff>(rep: &HolRep<K>, assume_exact: bool) -> Result<PairNF<K>> {
    let n = rep.trunc();
    let phi1 = rep.phi1.truncate_to(n);
    let phitau = rep.phitau.truncate_to(n);
    if !rep.commutes() {
        return Err(Error::Nonabelian);
    }
    let a1 = phi1.linear_coeff();
    let atau = phitau.linear_coeff();
    let m1 = mul_order(&a1, TORSION_BOUND);
    let mtau = mul_order(&atau, TORSION_BOUND);
    let periodic = |g: &Germ<K>, m: Option<u32>| -> bool {
        m.map(|m| is_identity_at_trunc(&g.iterate(m as i64)))
            .unwrap_or(false)
    };
    let tau_resonant = mtau.is_some() && !periodic(&phitau, mtau);
    let one_resonant = m1.is_some() && !periodic(&phi1, m1);
    if tau_resonant || one_resonant {
        // Normalize the resonant generator; its centralizer lies in the model
        // group, so the partner is brought along and only needs a time read.
        let (lead, partner, lead_is_tau) = if tau_resonant {
            (&phitau, &phi1, true)
        } else {
            (&phi1, &phitau, false)
        };
        let nf = normalize_germ(lead, assume_exact)?;
        let (k, lambda, time, h) = match nf {
            DiffeoNF::Resonant {
                k, lambda, time, h, ..
            } => (k, lambda, time, h),
            DiffeoNF::Linear { .. } => {
                return Err(Error::Inconsistency(
                    "resonant generator normalized to a linear model".into(),
                ))
            }
        };
        let lambda0 = lambda.mul(&time);
        let partner_n = partner.conjugate_by(&h);
        let (pa, pt, chain) = align_partner(&partner_n, k, &lambda0)?;
        let h = chain.compose(&h).truncate_to(n);
        let (t1, ttau, a1, atau) = if lead_is_tau {
            (pt, time.clone(), pa, lead.linear_coeff())
        } else {
            (time.clone(), pt, lead.linear_coeff(), pa)
        };
        return Ok(PairNF::ResonantPair {
            k,
            lambda,
            lambda0,
            t1,
            ttau,
            a1,
            atau,
            h,
        });
    }
    if m1.is_some() && mtau.is_some() {
        // Both generators periodic and commuting: finite group.
        return Ok(PairNF::Finite { a1, atau });
    }
    // At least one multiplier non-torsion: common linearizer exists.
    let (lead, partner, lead_is_tau) = if mtau.is_none() {
        (&phitau, &phi1, true)
    } else {
        (&phi1, &phitau, false)
    };
    let nf = normalize_germ(lead, assume_exact)?;
    let h = match nf {
        DiffeoNF::Linear { h, .. } => h,
        DiffeoNF::Resonant { .. } => {
            return Err(Error::Inconsistency(
                "non-torsion multiplier produced a resonant normal form".into(),
            ))
        }
    };
    let partner_n = partner.conjugate_by(&h);
    let pa = partner_n.linear_coeff();
    let lin = Germ::linear(&pa, partner_n.trunc())?;
    let nn = partner_n.trunc().min(lin.trunc());
    if partner_n
        .truncate_to(nn)
        .contact_order(&lin.truncate_to(nn))
        .is_some()
    {
        return Err(Error::Inconsistency(
            "partner of a linearizable generator is not linear in the common chart".into(),
        ));
    }
    let (a1o, atauo) = if lead_is_tau {
        (pa, lead.linear_coeff())
    } else {
        (lead.linear_coeff(), pa)
    };
    Ok(PairNF::LinearPair {
        a1: a1o,
        atau: atauo,
        h,
    })
}

/// Ueda-type data of an F0-type holonomy pair: `(Some(k), false)` in the
/// resonant case, `(None, true)` when the holonomy group is finite (the
/// foliation defines a fibration), `(None, false)` for an infinite
/// linearizable pair.
pub fn ueda_data<K: Coeff>(rep: &HolRep<K>, assume_exact: bool) -> Result<(Option<usize>, bool)> {
    Ok(match normalize_pair(rep, assume_exact)? {
        PairNF::Finite { .. } => (None, true),
        PairNF::ResonantPair { k, .. } => (Some(k), false),
        PairNF::LinearPair { .. } => (None, false),
    })
}

impl<K: Coeff> DiffeoNF<K> {
    pub fn to_json(&self) -> Value {
        match self {
            DiffeoNF::Linear { a, h } => json!({
                "case": "LINEAR",
                "a": a.to_json(),
                "h": h.to_json(),
            }),
            DiffeoNF::Resonant {
                a,
                m,
                k,
                lambda,
                time,
                h,
            } => json!({
                "case": "RESONANT",
                "a": a.to_json(),
                "m": m,
                "k": k,
                "lambda": lambda.to_json(),
                "time": time.to_json(),
                "h": h.to_json(),
            }),
        }
    }
}

impl<K: Coeff> PairNF<K> {
    pub fn to_json(&self) -> Value {
        match self {
            PairNF::LinearPair { a1, atau, h } => json!({
                "case": "LINEAR_PAIR",
                "a1": a1.to_json(),
                "atau": atau.to_json(),
                "h": h.to_json(),
            }),
            PairNF::ResonantPair {
                k,
                lambda,
                lambda0,
                t1,
                ttau,
                a1,
                atau,
                h,
            } => json!({
                "case": "RESONANT_PAIR",
                "k": k,
                "lambda": lambda.to_json(),
                "lambda0": lambda0.to_json(),
                "times": [t1.to_json(), ttau.to_json()],
                "torsion": [a1.to_json(), atau.to_json()],
                "h": h.to_json(),
            }),
            PairNF::Finite { a1, atau } => json!({
                "case": "FINITE",
                "a1": a1.to_json(),
                "atau": atau.to_json(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Cyclo;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type G = Germ<Cyclo>;

    fn z(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    fn q(p: i64, d: i64) -> Cyclo {
        Cyclo::from_ratio(p, d)
    }

    fn zeta(n: u32) -> Cyclo {
        Cyclo::root_of_unity(n).unwrap()
    }

    fn random_tangent(rng: &mut ChaCha8Rng, n: usize) -> G {
        let mut c = vec![z(0), z(1)];
        for _ in 2..=n {
            c.push(z(rng.gen_range(-2..=2)));
        }
        Germ::new(PSeries::new(c)).unwrap()
    }

    #[test]
    fn linear_germ_normalizes_trivially() {
        let f = G::linear(&q(3, 2), 8).unwrap();
        match normalize_germ(&f, true).unwrap() {
            DiffeoNF::Linear { a, h } => {
                assert_eq!(a, q(3, 2));
                assert!(h.is_identity());
            }
            _ => panic!("expected LINEAR"),
        }
    }

    #[test]
    fn nonresonant_linearization() {
        // multiplier 2 is torsion-free; all higher terms die.
        let mut c = vec![z(0), z(2), z(1), z(-1), z(0), z(3)];
        c.resize(9, z(0));
        let f = Germ::new(PSeries::new(c)).unwrap();
        match normalize_germ(&f, true).unwrap() {
            DiffeoNF::Linear { a, h } => {
                assert_eq!(a, z(2));
                let conj = f.conjugate_by(&h);
                assert!(conj.contact_order(&G::linear(&z(2), conj.trunc()).unwrap()).is_none());
            }
            _ => panic!("expected LINEAR"),
        }
    }

    #[test]
    fn resonant_example_minus_exp() {
        // f = -exp(v_{2,0}): invariants (-1, k=2, lambda=0), time 1.
        let f = model_germ(&z(-1), 2, &z(0), &z(1), 11).unwrap();
        let d = resonant_invariants(&f, true).unwrap();
        assert_eq!(d.a, z(-1));
        assert_eq!(d.m, 2);
        assert_eq!(d.k, 2);
        assert!(d.lambda.is_zero());
        assert_eq!(d.time, z(1));
    }

    #[test]
    fn periodic_and_truncation_semantics() {
        let f = G::linear(&zeta(4), 8).unwrap();
        assert!(matches!(
            resonant_invariants(&f, true),
            Err(Error::Periodic)
        ));
        assert!(matches!(
            resonant_invariants(&f, false),
            Err(Error::TruncationTooLow(_))
        ));
    }

    #[test]
    fn normalize_recovers_conjugated_model() {
        // a = zeta_3, k = 3, lambda0 = 5/7, t = 1: conjugate by random tangent
        // germs and recover (a, k, lambda) exactly, with a working normalizer.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 11;
        let a = zeta(3);
        let lambda0 = q(5, 7);
        let f0 = model_germ(&a, 3, &lambda0, &z(1), n).unwrap();
        for _ in 0..5 {
            let h = random_tangent(&mut rng, n);
            let f = f0.conjugate_by(&h);
            let nf = normalize_germ(&f, true).unwrap();
            match nf {
                DiffeoNF::Resonant {
                    a: aa,
                    m,
                    k,
                    lambda,
                    time,
                    h: hh,
                } => {
                    assert_eq!(aa, a);
                    assert_eq!(m, 3);
                    assert_eq!(k, 3);
                    assert_eq!(lambda, lambda0); // time = 1 so lambda = lambda0
                    assert_eq!(time, z(1));
                    let model = model_germ(&a, 3, &lambda0, &z(1), n).unwrap();
                    assert!(f.conjugate_by(&hh).contact_order(&model).is_none());
                }
                _ => panic!("expected RESONANT"),
            }
        }
    }

    #[test]
    fn lambda_is_rescaling_invariant() {
        // f at time t has lambda0 = lambda * t; the reported lambda is fixed.
        let n = 13;
        let lambda = q(2, 3);
        for t in [z(1), z(2), q(-1, 2)] {
            let lambda0 = lambda.mul(&t);
            let f = model_germ(&z(1), 2, &lambda0, &t, n).unwrap();
            let d = resonant_invariants(&f, true).unwrap();
            assert_eq!(d.k, 2);
            assert_eq!(d.time, t);
            assert_eq!(d.lambda, lambda);
        }
    }

    #[test]
    fn extract_time_examples() {
        let id = G::identity(9);
        let (a, t) = extract_time(&id, 2, &z(0)).unwrap();
        assert!(a.is_one() && t.is_zero());
        let f = model_germ(&z(-1), 2, &z(0), &z(1), 9).unwrap();
        let (a, t) = extract_time(&f, 2, &z(0)).unwrap();
        assert_eq!(a, z(-1));
        assert_eq!(t, z(1));
        let g = model_germ(&z(1), 1, &z(1), &q(3, 2), 9).unwrap();
        let (a, t) = extract_time(&g, 1, &z(1)).unwrap();
        assert!(a.is_one());
        assert_eq!(t, q(3, 2));
    }

    #[test]
    fn extract_time_is_additive() {
        let lam = q(1, 3);
        let f = model_germ(&z(1), 2, &lam, &q(1, 2), 11).unwrap();
        let g = model_germ(&z(1), 2, &lam, &q(2, 5), 11).unwrap();
        let (_, t) = extract_time(&f.compose(&g), 2, &lam).unwrap();
        assert_eq!(t, q(1, 2).add(&q(2, 5)));
    }

    #[test]
    fn extract_time_rejects_outsiders() {
        let mut c = vec![z(0), z(1), z(1)];
        c.resize(9, z(0));
        let f = Germ::new(PSeries::new(c)).unwrap();
        assert!(matches!(
            extract_time(&f, 2, &z(0)),
            Err(Error::NotInModel)
        ));
    }

    #[test]
    fn pair_model_normalizes_to_times_zero_one() {
        // (a1 y, atau phi_{k,lambda}): the defining resonant pair.
        let n = 13;
        let a1 = zeta(4);
        let atau = zeta(4).mul(&zeta(4)); // -1
        let lam = q(1, 2);
        let rep = HolRep::new(
            G::linear(&a1, n).unwrap(),
            model_germ(&atau, 4, &lam, &z(1), n).unwrap(),
        );
        assert!(rep.commutes());
        match normalize_pair(&rep, true).unwrap() {
            PairNF::ResonantPair {
                k,
                lambda,
                t1,
                ttau,
                a1: b1,
                atau: btau,
                ..
            } => {
                assert_eq!(k, 4);
                assert_eq!(lambda, lam);
                assert!(t1.is_zero());
                assert!(ttau.is_one());
                assert_eq!(b1, a1);
                assert_eq!(btau, atau);
            }
            _ => panic!("expected RESONANT_PAIR"),
        }
    }

    #[test]
    fn pair_invariants_survive_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 11;
        let a1 = z(-1);
        let lam = q(3, 4);
        let rep = HolRep::new(
            G::linear(&a1, n).unwrap(),
            model_germ(&z(1), 2, &lam, &z(1), n).unwrap(),
        );
        for _ in 0..3 {
            let h = random_tangent(&mut rng, n);
            let conj = HolRep::new(
                rep.phi1.conjugate_by(&h),
                rep.phitau.conjugate_by(&h),
            );
            match normalize_pair(&conj, true).unwrap() {
                PairNF::ResonantPair {
                    k, lambda, t1, ttau, ..
                } => {
                    assert_eq!(k, 2);
                    assert_eq!(lambda, lam);
                    assert!(t1.is_zero());
                    assert!(ttau.is_one());
                }
                _ => panic!("expected RESONANT_PAIR"),
            }
        }
    }

    #[test]
    fn finite_and_linear_pairs() {
        let n = 8;
        let fin = HolRep::new(
            G::linear(&zeta(4), n).unwrap(),
            G::linear(&z(-1), n).unwrap(),
        );
        assert!(matches!(
            normalize_pair(&fin, true).unwrap(),
            PairNF::Finite { .. }
        ));
        assert_eq!(ueda_data(&fin, true).unwrap(), (None, true));

        let lin = HolRep::new(
            G::linear(&z(2), n).unwrap(),
            G::linear(&q(1, 3), n).unwrap(),
        );
        match normalize_pair(&lin, true).unwrap() {
            PairNF::LinearPair { a1, atau, .. } => {
                assert_eq!(a1, z(2));
                assert_eq!(atau, q(1, 3));
            }
            _ => panic!("expected LINEAR_PAIR"),
        }
        assert_eq!(ueda_data(&lin, true).unwrap(), (None, false));
    }

    #[test]
    fn ueda_type_of_resonant_pair() {
        let n = 9;
        let rep = HolRep::new(
            G::linear(&z(-1), n).unwrap(),
            model_germ(&z(-1), 2, &z(0), &z(1), n).unwrap(),
        );
        assert_eq!(ueda_data(&rep, true).unwrap(), (Some(2), false));
    }

    #[test]
    fn noncommuting_pair_is_rejected() {
        let n = 8;
        let mut c = vec![z(0), z(1), z(1)];
        c.resize(n + 1, z(0));
        let g = Germ::new(PSeries::new(c)).unwrap();
        let rep = HolRep::new(G::linear(&z(2), n).unwrap(), g);
        assert!(matches!(
            normalize_pair(&rep, true),
            Err(Error::Nonabelian)
        ));
    }
}

