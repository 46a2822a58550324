//! Neighborhood presentations over the universal cover, the model builder,
//! the pencil of closed 1-forms, holonomy extraction and related plumbing.
//!
//! A neighborhood of the elliptic curve `C = C/(Z + tau Z)` with torsion
//! normal bundle is presented by two commuting generators acting on
//! `C_x x (C_y, 0)`:
//!
//! ```text
//! Phi(x, y) = (x + shift + drift(y), vert(y))
//! ```
//!
//! The model attached to a [`ModelSpec`] `(a1, atau, m, k, lambda, Lambda)`
//! has `Phi_1 = (1, 0, a1 y)` and `Phi_tau = (tau, g, atau * phi_{k,lambda})`
//! where `phi_{k,lambda} = flow(v_{k,lambda}, 1)` and the drift `g` integrates
//! the defect of invariance of the polar form `omega_Lambda`. The two closed
//! forms `omega_0 = dy/y^{k+1} + lambda dy/y` and `omega_inf = dx -
//! omega_Lambda` span a pencil whose members are invariant under both
//! generators; holonomy of a member over the loops `1` and `tau` is computed
//! by restriction to the transversal `{x = 0}` and flowing the dual field.

use serde_json::{json, Value};

use crate::coefficients::{mul_order, powi, Coeff};
use crate::error::{Error, Result};
use crate::flows::{dual_field, flow, pullback, MForm, VField};
use crate::germs::Germ;
use crate::normalform::{extract_time, HolRep, TORSION_BOUND};
use crate::series::{LSeries, PSeries};

/// One generator of a presentation: `(x, y) -> (x + shift + drift(y), vert(y))`.
#[derive(Clone, Debug)]
pub struct Generator<K: Coeff> {
    pub shift: K,
    pub drift: PSeries<K>,
    pub vert: Germ<K>,
}

impl<K: Coeff> Generator<K> {
    pub fn new(shift: K, drift: PSeries<K>, vert: Germ<K>) -> Result<Self> {
        if !drift.coeff(0).is_zero() {
            return Err(Error::Validation(
                "drift must vanish on the curve (drift(0) = 0)".into(),
            ));
        }
        Ok(Generator { shift, drift, vert })
    }

    /// `self` after `rhs` as maps of `(x, y)`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let drift = rhs.drift.add(
            &self
                .drift
                .compose(rhs.vert.series())
                .expect("drift composition cannot fail"),
        );
        Generator {
            shift: self.shift.add(&rhs.shift),
            drift,
            vert: self.vert.compose(&rhs.vert),
        }
    }

    pub fn truncate_to(&self, trunc: usize) -> Self {
        Generator {
            shift: self.shift.clone(),
            drift: self.drift.truncate_to(trunc),
            vert: self.vert.truncate_to(trunc),
        }
    }

    fn close_to(&self, other: &Self) -> bool {
        let n = self
            .drift
            .trunc()
            .min(other.drift.trunc())
            .min(self.vert.trunc())
            .min(other.vert.trunc());
        self.shift.close_to(&other.shift)
            && self
                .drift
                .truncate_to(n)
                .sub(&other.drift.truncate_to(n))
                .is_zero()
            && self
                .vert
                .truncate_to(n)
                .contact_order(&other.vert.truncate_to(n))
                .is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shift": self.shift.to_json(),
            "drift": self.drift.to_json(),
            "vert": self.vert.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .ok_or_else(|| Error::Validation(format!("missing '{key}'")))
        };
        Generator::new(
            K::from_json(get("shift")?)?,
            PSeries::from_json(get("drift")?)?,
            Germ::from_json(get("vert")?)?,
        )
    }
}

/// A neighborhood presented by two commuting generators over the cover.
#[derive(Clone, Debug)]
pub struct Presentation<K: Coeff> {
    pub tau: K,
    pub gen1: Generator<K>,
    pub gen_tau: Generator<K>,
    pub trunc: usize,
}

impl<K: Coeff> Presentation<K> {
    /// Validates Im(tau) > 0 (via the numeric embedding) and commutation.
    pub fn new(tau: K, gen1: Generator<K>, gen_tau: Generator<K>, trunc: usize) -> Result<Self> {
        if tau.approx().im <= 0.0 {
            return Err(Error::Validation(
                "lattice parameter tau must have positive imaginary part".into(),
            ));
        }
        let pres = Presentation {
            tau,
            gen1: gen1.truncate_to(trunc),
            gen_tau: gen_tau.truncate_to(trunc),
            trunc,
        };
        if !pres.commutes() {
            return Err(Error::CommutationFailure);
        }
        Ok(pres)
    }

    pub fn commutes(&self) -> bool {
        let a = self.gen1.compose(&self.gen_tau);
        let b = self.gen_tau.compose(&self.gen1);
        a.close_to(&b)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tau": self.tau.to_json(),
            "gen1": self.gen1.to_json(),
            "gen_tau": self.gen_tau.to_json(),
            "trunc": self.trunc,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .ok_or_else(|| Error::Validation(format!("missing '{key}'")))
        };
        let trunc = get("trunc")?
            .as_u64()
            .ok_or_else(|| Error::Validation("'trunc' must be a non-negative integer".into()))?
            as usize;
        Presentation::new(
            K::from_json(get("tau")?)?,
            Generator::from_json(get("gen1")?)?,
            Generator::from_json(get("gen_tau")?)?,
            trunc,
        )
    }
}

/// Invariant data of a model neighborhood: torsion `(a1, atau)` generating a
/// group of order `m`, resonance order `k = m k'`, residue `lambda`, and the
/// polar coefficient vector `Lambda = (lambda_0 .. lambda_{k'-1})`.
#[derive(Clone, Debug)]
pub struct ModelSpec<K: Coeff> {
    pub a1: K,
    pub atau: K,
    pub m: u32,
    pub k: usize,
    pub lambda: K,
    pub lambda_seq: Vec<K>,
}

impl<K: Coeff> ModelSpec<K> {
    pub fn new(a1: K, atau: K, m: u32, k: usize, lambda: K, lambda_seq: Vec<K>) -> Result<Self> {
        let o1 = mul_order(&a1, TORSION_BOUND)
            .ok_or_else(|| Error::Validation("a1 is not a root of unity".into()))?;
        let otau = mul_order(&atau, TORSION_BOUND)
            .ok_or_else(|| Error::Validation("atau is not a root of unity".into()))?;
        let group_order = num_integer::lcm(o1, otau);
        if group_order != m {
            return Err(Error::Validation(format!(
                "<a1, atau> has order {group_order}, spec claims m = {m}"
            )));
        }
        if k == 0 || k % (m as usize) != 0 {
            return Err(Error::Validation(format!(
                "k = {k} must be a positive multiple of m = {m}"
            )));
        }
        let kprime = k / m as usize;
        if lambda_seq.len() > kprime {
            return Err(Error::Validation(format!(
                "Lambda has {} entries, at most k' = {kprime} allowed",
                lambda_seq.len()
            )));
        }
        let mut lambda_seq = lambda_seq;
        lambda_seq.resize(kprime, K::zero());
        Ok(ModelSpec {
            a1,
            atau,
            m,
            k,
            lambda,
            lambda_seq,
        })
    }

    pub fn kprime(&self) -> usize {
        self.k / self.m as usize
    }

    /// Degree of `P(z) = sum lambda_i z^i`, or `None` when `Lambda = 0`.
    pub fn deg_p(&self) -> Option<usize> {
        self.lambda_seq
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
    }

    /// Tangency parameter `p = m * deg P`, with `p = -1` for `Lambda = 0`.
    pub fn p(&self) -> i64 {
        match self.deg_p() {
            None => -1,
            Some(d) => (self.m as i64) * (d as i64),
        }
    }

    /// The polar closed form `omega_Lambda = P(1/y^m) dy/y`.
    pub fn omega_lambda(&self, trunc: i64) -> MForm<K> {
        let mut w = LSeries::zero(trunc);
        for (i, c) in self.lambda_seq.iter().enumerate() {
            if !c.is_zero() {
                let e = -((i as i64) * (self.m as i64)) - 1;
                w = w.add(&LSeries::monomial(c, e, trunc));
            }
        }
        MForm::new(w)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a1": self.a1.to_json(),
            "atau": self.atau.to_json(),
            "m": self.m,
            "k": self.k,
            "lambda": self.lambda.to_json(),
            "Lambda": self.lambda_seq.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .ok_or_else(|| Error::Validation(format!("missing '{key}'")))
        };
        let m = get("m")?
            .as_u64()
            .ok_or_else(|| Error::Validation("'m' must be a positive integer".into()))?
            as u32;
        let k = get("k")?
            .as_u64()
            .ok_or_else(|| Error::Validation("'k' must be a positive integer".into()))?
            as usize;
        let seq = get("Lambda")?
            .as_array()
            .ok_or_else(|| Error::Validation("'Lambda' must be an array".into()))?
            .iter()
            .map(K::from_json)
            .collect::<Result<Vec<_>>>()?;
        ModelSpec::new(
            K::from_json(get("a1")?)?,
            K::from_json(get("atau")?)?,
            m,
            k,
            K::from_json(get("lambda")?)?,
            seq,
        )
    }
}

/// A closed 1-form on the cover: constant `dx` coefficient plus a `y`-only
/// `dy` part.
#[derive(Clone, Debug)]
pub struct CoverForm<K: Coeff> {
    pub dx: K,
    pub dy: MForm<K>,
}

/// A pencil parameter: a finite time or the fiber at infinity.
#[derive(Clone, Debug)]
pub enum PencilTime<K: Coeff> {
    Finite(K),
    Infinity,
}

/// Build the model presentation of a spec at truncation `N >= 2k+2`.
///
/// `Phi_1 = (1, 0, a1 y)`; `Phi_tau = (tau, g, atau * flow(v_{k,lambda}, 1))`
/// where `g` is the primitive of `pullback(omega_Lambda, vert_tau) -
/// omega_Lambda`, verified pole- and residue-free before integration.
pub fn build_model<K: Coeff>(spec: &ModelSpec<K>, tau: &K, n: usize) -> Result<Presentation<K>> {
    if n < 2 * spec.k + 2 {
        return Err(Error::Validation(format!(
            "truncation {n} below the required 2k+2 = {}",
            2 * spec.k + 2
        )));
    }
    let p = spec.p();
    // Headroom: the polar pullback loses p+1 determined orders, and the
    // commutation check composes once more.
    let work = n + 2 * (p.max(0) as usize + 1) + 2;
    let vert1 = Germ::linear(&spec.a1, work)?;
    let phi = flow(&VField::model(spec.k, &spec.lambda, work), &K::one())?;
    let vert_tau = Germ::linear(&spec.atau, work)?.compose(&phi);
    let drift = if p < 0 {
        PSeries::zero(work)
    } else {
        let w = spec.omega_lambda(work as i64);
        let integrand = pullback(&w, &vert_tau)?.sub(&w);
        let val = integrand.series().valuation();
        if let Some(v) = val {
            if v < 0 {
                return Err(Error::IntegrandNotHolomorphic(format!(
                    "drift integrand has a pole of order {}",
                    -v
                )));
            }
        }
        if !integrand.residue().is_zero() {
            return Err(Error::IntegrandNotHolomorphic(
                "drift integrand has nonzero residue".into(),
            ));
        }
        integrand.series().primitive()?.to_pseries()?
    };
    let gen1 = Generator::new(K::one(), PSeries::zero(work), vert1)?;
    let gen_tau = Generator::new(tau.clone(), drift, vert_tau)?;
    Presentation::new(tau.clone(), gen1, gen_tau, n).map_err(|e| match e {
        Error::CommutationFailure => Error::CommutationFailure,
        other => other,
    })
}

/// The pencil member `omega_t = omega_0 + t * omega_inf` (or `omega_inf`).
pub fn pencil_form<K: Coeff>(spec: &ModelSpec<K>, t: &PencilTime<K>, trunc: i64) -> CoverForm<K> {
    let omega0 = MForm::model(spec.k as i64, &spec.lambda, trunc);
    let polar = spec.omega_lambda(trunc);
    match t {
        PencilTime::Finite(t) => CoverForm {
            dx: t.clone(),
            dy: omega0.add(&polar.scale(&t.neg())),
        },
        PencilTime::Infinity => CoverForm {
            dx: K::one(),
            dy: polar.scale(&K::one().neg()),
        },
    }
}

fn forms_agree<K: Coeff>(a: &MForm<K>, b: &MForm<K>) -> bool {
    let lo = match (a.series().valuation(), b.series().valuation()) {
        (None, None) => return true,
        (Some(v), None) | (None, Some(v)) => v,
        (Some(u), Some(v)) => u.min(v),
    };
    let hi = a.trunc().min(b.trunc());
    (lo..=hi).all(|e| a.coeff(e).close_to(&b.coeff(e)))
}

/// Is `w` invariant under both generators at truncation?
///
/// `Phi*(A dx + B dy) = A dx + (A * drift' + pullback(B, vert)) dy`.
pub fn pencil_invariance_check<K: Coeff>(pres: &Presentation<K>, w: &CoverForm<K>) -> Result<bool> {
    for gen in [&pres.gen1, &pres.gen_tau] {
        let drifted = LSeries::from_pseries(&gen.drift.derivative()).scale(&w.dx);
        let pulled = pullback(&w.dy, &gen.vert)?;
        let image = MForm::new(drifted).add(&pulled);
        if !forms_agree(&image, &w.dy) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Holonomy of the pencil member `t` over the loops `1` and `tau`, evaluated
/// on the transversal `{x = 0}`.
///
/// Finite `t`: `phi_gamma = a_gamma * flow(dual(omega_t |_{x=0}),
/// sigma_0(gamma) + t * sigma_inf(gamma))` with `sigma_0(1) = 0`,
/// `sigma_0(tau) = 1`, `sigma_inf(gamma) = gamma`. At infinity with
/// `Lambda != 0`: `(a1 exp(v_Lambda), atau exp(tau v_Lambda))`; with
/// `Lambda = 0` the fiber is the transverse fibration with linear holonomy.
pub fn holonomy<K: Coeff>(
    pres: &Presentation<K>,
    spec: &ModelSpec<K>,
    t: &PencilTime<K>,
) -> Result<HolRep<K>> {
    let n = pres.trunc;
    let tau = pres.tau.clone();
    let lin1 = Germ::linear(&spec.a1, n)?;
    let lintau = Germ::linear(&spec.atau, n)?;
    let rep = match t {
        PencilTime::Finite(t) => {
            let form = pencil_form(spec, &PencilTime::Finite(t.clone()), n as i64 + 1);
            let v = dual_field(&form.dy)?;
            let t1 = t.clone();
            let ttau = K::one().add(&t.mul(&tau));
            HolRep::new(
                lin1.compose(&flow(&v, &t1)?.truncate_to(n)),
                lintau.compose(&flow(&v, &ttau)?.truncate_to(n)),
            )
        }
        PencilTime::Infinity => {
            if spec.p() < 0 {
                HolRep::new(lin1, lintau)
            } else {
                let v = dual_field(&spec.omega_lambda(n as i64 + 1))?;
                HolRep::new(
                    lin1.compose(&flow(&v, &K::one())?.truncate_to(n)),
                    lintau.compose(&flow(&v, &tau)?.truncate_to(n)),
                )
            }
        }
    };
    Ok(rep.with_tau(tau))
}

/// Flow time of a model-group element (the period `sigma_omega(gamma)`).
pub fn period_of<K: Coeff>(element: &Germ<K>, k: usize, lambda0: &K) -> Result<K> {
    let (_, t) = extract_time(element, k, lambda0)?;
    Ok(t)
}

/// The fibration model `F_n(a1, atau)`: `Phi_1 = (1, 0, a1 y)`,
/// `Phi_tau = (tau, y^n, atau y)`. Commutation requires `a1^n = 1`.
pub fn fibration_model<K: Coeff>(
    n: usize,
    a1: &K,
    atau: &K,
    tau: &K,
    trunc: usize,
) -> Result<Presentation<K>> {
    if n == 0 {
        return Err(Error::Validation("fibration index n must be positive".into()));
    }
    if !powi(a1, n as i64)?.is_one() {
        return Err(Error::Validation(format!(
            "F_n commutation requires a1^{n} = 1"
        )));
    }
    let gen1 = Generator::new(K::one(), PSeries::zero(trunc), Germ::linear(a1, trunc)?)?;
    let gen_tau = Generator::new(
        tau.clone(),
        PSeries::monomial(&K::one(), n, trunc),
        Germ::linear(atau, trunc)?,
    )?;
    Presentation::new(tau.clone(), gen1, gen_tau, trunc)
}

/// The involution on model data, with `xi = zeta_{2k}` (so `xi^k = -1`):
/// `(a1, atau, lambda, Lambda) -> (a1^{-1}, atau^{-1}, -lambda, Lambda')`
/// with `Lambda'_i = -xi^{-i m} lambda_i`.
pub fn involution<K: Coeff>(spec: &ModelSpec<K>) -> Result<ModelSpec<K>> {
    let xi = K::root_of_unity(2 * spec.k as u32)?;
    let xi_m = powi(&xi, spec.m as i64)?;
    let seq = spec
        .lambda_seq
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(powi(&xi_m, -(i as i64))?.mul(c).neg()))
        .collect::<Result<Vec<_>>>()?;
    ModelSpec::new(
        spec.a1.inv()?,
        spec.atau.inv()?,
        spec.m,
        spec.k,
        spec.lambda.neg(),
        seq,
    )
}

/// The slope series `-A/B` of a pencil member restricted to `{x = 0}`.
pub fn pencil_slope<K: Coeff>(spec: &ModelSpec<K>, t: &PencilTime<K>, trunc: i64) -> Result<LSeries<K>> {
    let form = pencil_form(spec, t, trunc);
    if form.dx.is_zero() {
        return Ok(LSeries::zero(trunc));
    }
    LSeries::monomial(&form.dx.neg(), 0, trunc).div(form.dy.series())
}

/// Recombine three slope series with cross-ratio parameter `c`: the Moebius
/// combination mapping `c = 0, 1, infinity` to `s1, s2, s3`.
pub fn cross_ratio_slope<K: Coeff>(
    s1: &LSeries<K>,
    s2: &LSeries<K>,
    s3: &LSeries<K>,
    c: &K,
) -> Result<LSeries<K>> {
    let d23 = s2.sub(s3);
    let d21 = s2.sub(s1);
    let num = s1.mul(&d23).sub(&s3.mul(&d21).scale(c));
    let den = d23.sub(&d21.scale(c));
    if den.is_zero() {
        return Err(Error::DegenerateCrossRatio);
    }
    num.div(&den)
}

/// The cross-ratio `((t - t1)(t2 - t3)) / ((t - t3)(t2 - t1))`, the Moebius
/// coordinate sending `t1, t2, t3` to `0, 1, infinity`.
pub fn cross_ratio<K: Coeff>(t: &K, t1: &K, t2: &K, t3: &K) -> Result<K> {
    let num = t.sub(t1).mul(&t2.sub(t3));
    let den = t.sub(t3).mul(&t2.sub(t1));
    if den.is_zero() {
        return Err(Error::DegenerateCrossRatio);
    }
    num.div(&den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Cyclo;

    type S = ModelSpec<Cyclo>;

    fn z(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    fn q(p: i64, d: i64) -> Cyclo {
        Cyclo::from_ratio(p, d)
    }

    fn tau_i() -> Cyclo {
        Cyclo::root_of_unity(4).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(S::new(z(1), z(1), 1, 2, z(0), vec![]).is_ok());
        // claimed m inconsistent with the group order
        assert!(S::new(z(-1), z(1), 1, 2, z(0), vec![]).is_err());
        // m does not divide k
        assert!(S::new(z(-1), z(1), 2, 3, z(0), vec![]).is_err());
        // Lambda too long
        assert!(S::new(z(1), z(1), 1, 2, z(0), vec![z(1), z(1), z(1)]).is_err());
        let s = S::new(z(1), z(1), 1, 4, z(0), vec![z(0), z(2)]).unwrap();
        assert_eq!(s.kprime(), 4);
        assert_eq!(s.p(), 1);
        let s0 = S::new(z(1), z(1), 1, 2, z(0), vec![]).unwrap();
        assert_eq!(s0.p(), -1);
    }

    #[test]
    fn suspension_model_has_zero_drift() {
        let spec = S::new(z(1), z(1), 1, 1, z(0), vec![]).unwrap();
        let pres = build_model(&spec, &tau_i(), 8).unwrap();
        assert!(pres.gen_tau.drift.is_zero());
        let phi = flow(&VField::model(1, &z(0), 8), &z(1)).unwrap();
        assert!(pres.gen_tau.vert.contact_order(&phi).is_none());
        assert!(pres.gen1.vert.is_identity());
    }

    #[test]
    fn model_drift_is_holomorphic_and_commutes() {
        // m=1, k=2, Lambda=(0,1): P(z)=z, p=2.
        let spec = S::new(z(1), z(1), 1, 2, z(0), vec![z(0), z(1)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        let g = &pres.gen_tau.drift;
        assert!(g.coeff(0).is_zero());
        assert!(!g.is_zero());
        assert!(pres.commutes());
    }

    #[test]
    fn model_with_torsion_commutes() {
        // m=2, k=4, a1=-1, atau=-1, Lambda=(1, 3): p = 2.
        let spec = S::new(z(-1), z(-1), 2, 4, q(1, 2), vec![z(1), z(3)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 12).unwrap();
        assert!(pres.commutes());
    }

    #[test]
    fn pencil_form_examples() {
        let spec = S::new(z(1), z(1), 1, 1, z(5), vec![z(7)]).unwrap();
        let w0 = pencil_form(&spec, &PencilTime::Finite(z(0)), 6);
        assert!(w0.dx.is_zero());
        assert_eq!(w0.dy.coeff(-2), z(1));
        assert_eq!(w0.dy.residue(), z(5));
        let w1 = pencil_form(&spec, &PencilTime::Finite(z(1)), 6);
        assert!(w1.dx.is_one());
        assert_eq!(w1.dy.coeff(-2), z(1));
        assert_eq!(w1.dy.residue(), z(5).sub(&z(7)));
        let spec0 = S::new(z(1), z(1), 1, 1, z(0), vec![]).unwrap();
        let winf = pencil_form(&spec0, &PencilTime::Infinity, 6);
        assert!(winf.dx.is_one());
        assert!(winf.dy.is_zero());
    }

    #[test]
    fn invariance_of_pencil_members() {
        let spec = S::new(z(1), z(1), 1, 2, q(1, 3), vec![z(0), z(2)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        let w0 = pencil_form(&spec, &PencilTime::Finite(z(0)), 11);
        assert!(pencil_invariance_check(&pres, &w0).unwrap());
        let winf = pencil_form(&spec, &PencilTime::Infinity, 11);
        assert!(pencil_invariance_check(&pres, &winf).unwrap());
        // dx alone is not invariant once the drift is nonzero
        let dx = CoverForm {
            dx: z(1),
            dy: MForm::new(LSeries::zero(11)),
        };
        assert!(!pencil_invariance_check(&pres, &dx).unwrap());
        // but it is on the suspension model
        let spec0 = S::new(z(1), z(1), 1, 1, z(0), vec![]).unwrap();
        let pres0 = build_model(&spec0, &tau_i(), 8).unwrap();
        assert!(pencil_invariance_check(&pres0, &dx).unwrap());
    }

    #[test]
    fn holonomy_at_zero_is_the_defining_pair() {
        let spec = S::new(z(-1), z(-1), 2, 2, q(2, 5), vec![z(1)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        let rep = holonomy(&pres, &spec, &PencilTime::Finite(z(0))).unwrap();
        assert!(rep
            .phi1
            .contact_order(&Germ::linear(&z(-1), 10).unwrap())
            .is_none());
        let phi = flow(&VField::model(2, &q(2, 5), 10), &z(1)).unwrap();
        let model_tau = Germ::linear(&z(-1), 10).unwrap().compose(&phi);
        assert!(rep.phitau.contact_order(&model_tau).is_none());
        assert!(rep.commutes());
    }

    #[test]
    fn holonomy_at_infinity() {
        let spec = S::new(z(1), z(1), 1, 2, z(0), vec![z(0), q(1, 2)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        let rep = holonomy(&pres, &spec, &PencilTime::Infinity).unwrap();
        let v = dual_field(&spec.omega_lambda(11)).unwrap();
        assert!(rep.phi1.contact_order(&flow(&v, &z(1)).unwrap().truncate_to(10)).is_none());
        assert!(rep
            .phitau
            .contact_order(&flow(&v, &tau_i()).unwrap().truncate_to(10))
            .is_none());
        // Lambda = 0: the fiber at infinity is the fibration, linear holonomy.
        let spec0 = S::new(z(1), z(-1), 2, 2, z(0), vec![]).unwrap();
        let pres0 = build_model(&spec0, &tau_i(), 8).unwrap();
        let rep0 = holonomy(&pres0, &spec0, &PencilTime::Infinity).unwrap();
        assert!(rep0.phi1.is_identity());
        assert!(rep0
            .phitau
            .contact_order(&Germ::linear(&z(-1), 8).unwrap())
            .is_none());
    }

    #[test]
    fn holonomy_finite_time_jets() {
        // phi_1 = a1[y + t y^{k+1}] + O(y^{k+2});
        // phi_tau = atau[y + (1 + t tau) y^{k+1}] + O(y^{k+2}).
        let spec = S::new(z(1), z(1), 1, 2, q(1, 3), vec![z(2)]).unwrap();
        let pres = build_model(&spec, &tau_i(), 10).unwrap();
        for t in [z(1), z(2), z(-3)] {
            let rep = holonomy(&pres, &spec, &PencilTime::Finite(t.clone())).unwrap();
            assert_eq!(rep.phi1.coeff(3), t);
            assert_eq!(rep.phitau.coeff(3), z(1).add(&t.mul(&tau_i())));
            assert!(rep.commutes());
        }
    }

    #[test]
    fn period_round_trip() {
        let lam = q(1, 2);
        let g = crate::normalform::model_germ(&z(1), 2, &lam, &q(7, 3), 9).unwrap();
        assert_eq!(period_of(&g, 2, &lam).unwrap(), q(7, 3));
    }

    #[test]
    fn fibration_model_examples() {
        let pres = fibration_model(1, &z(1), &z(-1), &tau_i(), 8).unwrap();
        assert_eq!(pres.gen_tau.drift.coeff(1), z(1));
        assert!(pres.commutes());
        assert!(fibration_model(1, &z(-1), &z(1), &tau_i(), 8).is_err());
        // a1 = -1 is fine when n is even
        assert!(fibration_model(2, &z(-1), &z(1), &tau_i(), 8).is_ok());
    }

    #[test]
    fn involution_formula() {
        // m=1, k=2, xi = zeta_4 = i: Lambda' = (-lambda_0, i lambda_1).
        let spec = S::new(z(1), z(1), 1, 2, q(1, 5), vec![z(3), z(7)]).unwrap();
        let inv = involution(&spec).unwrap();
        assert_eq!(inv.lambda, q(-1, 5));
        let i = Cyclo::root_of_unity(4).unwrap();
        assert_eq!(inv.lambda_seq[0], z(-3));
        assert_eq!(inv.lambda_seq[1], i.mul(&z(7)));
        // double involution: a's and lambda restored, Lambda acted by xi^2.
        let inv2 = involution(&inv).unwrap();
        assert_eq!(inv2.a1, spec.a1);
        assert_eq!(inv2.atau, spec.atau);
        assert_eq!(inv2.lambda, spec.lambda);
        assert_eq!(inv2.lambda_seq[0], spec.lambda_seq[0]);
        let xi2 = i.mul(&i); // zeta_4^2 = -1 = zeta_{2k}^2 for k=2
        assert_eq!(
            inv2.lambda_seq[1],
            powi(&xi2, -1).unwrap().mul(&spec.lambda_seq[1])
        );
    }

    #[test]
    fn cross_ratio_slope_endpoints() {
        let s1 = LSeries::new(2, vec![z(1), z(3)]);
        let s2 = LSeries::new(2, vec![z(2), z(-1)]);
        let s3 = LSeries::new(2, vec![z(5), z(4)]);
        let r0 = cross_ratio_slope(&s1, &s2, &s3, &z(0)).unwrap();
        assert!(r0.sub(&s1.truncate_to(r0.trunc())).is_zero());
        let r1 = cross_ratio_slope(&s1, &s2, &s3, &z(1)).unwrap();
        assert!(r1.sub(&s2.truncate_to(r1.trunc())).is_zero());
    }

    #[test]
    fn pencil_slopes_recombine() {
        let spec = S::new(z(1), z(1), 1, 2, q(1, 4), vec![z(1), z(2)]).unwrap();
        let n = 12;
        let (t1, t2, t3, t) = (z(0), z(1), z(-1), z(3));
        let s1 = pencil_slope(&spec, &PencilTime::Finite(t1.clone()), n).unwrap();
        let s2 = pencil_slope(&spec, &PencilTime::Finite(t2.clone()), n).unwrap();
        let s3 = pencil_slope(&spec, &PencilTime::Finite(t3.clone()), n).unwrap();
        let st = pencil_slope(&spec, &PencilTime::Finite(t.clone()), n).unwrap();
        let c = cross_ratio(&t, &t1, &t2, &t3).unwrap();
        let rec = cross_ratio_slope(&s1, &s2, &s3, &c).unwrap();
        let hi = rec.trunc().min(st.trunc());
        for e in 0..=hi {
            assert!(rec.coeff(e).close_to(&st.coeff(e)), "exponent {e}");
        }
    }

    #[test]
    fn json_round_trips() {
        let spec = S::new(z(-1), z(-1), 2, 4, q(1, 2), vec![z(1), z(3)]).unwrap();
        let back = S::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.a1, spec.a1);
        assert_eq!(back.lambda_seq, spec.lambda_seq);
        let pres = build_model(&spec, &tau_i(), 12).unwrap();
        let v = pres.to_json();
        let back = Presentation::<Cyclo>::from_json(&v).unwrap();
        assert_eq!(back.trunc, 12);
        assert!(back.commutes());
        assert!(back
            .gen_tau
            .vert
            .contact_order(&pres.gen_tau.vert)
            .is_none());
    }
}
