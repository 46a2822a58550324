//! Formal vector fields vanishing at 0, their flows, formal logarithms, and
//! dual meromorphic 1-forms.
//!
//! The flow `exp(t v)` is the Lie series `sum t^n/n! v^n(y)`: for fields of
//! valuation >= 2 the sum is finite at any truncation; for fields with a linear
//! part it converges numerically and is summed on the floating backend only
//! (the exact backend refuses, since `e^{t alpha}` is transcendental over the
//! cyclotomic field).
//!
//! `formal_log` inverts the flow: the coefficients of `v` are recovered from
//! the invariance equation `F(f(y)) = f'(y) F(y)` by an incremental triangular
//! solve (each new coefficient costs one series multiplication), the top few
//! orders that the invariance equation cannot see are fixed by flow-defect
//! corrections, and the result is validated by re-exponentiation.

use std::fmt;

use serde_json::Value;

use crate::coefficients::Coeff;
use crate::error::{Error, Result};
use crate::germs::Germ;
use crate::series::{LSeries, PSeries};

/// Formal vector field `F(y) d/dy` with `F(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VField<K: Coeff> {
    f: PSeries<K>,
}

/// Meromorphic 1-form `B(y) dy` on a transversal.
#[derive(Clone, Debug, PartialEq)]
pub struct MForm<K: Coeff> {
    b: LSeries<K>,
}

impl<K: Coeff> VField<K> {
    pub fn new(f: PSeries<K>) -> Result<Self> {
        if !f.coeff(0).is_zero() {
            return Err(Error::Validation(
                "vector field must vanish at 0".into(),
            ));
        }
        Ok(VField { f })
    }

    pub fn zero(trunc: usize) -> Self {
        VField {
            f: PSeries::zero(trunc),
        }
    }

    /// The model field `v_{k,lambda} = y^{k+1}/(1 + lambda y^k) d/dy`.
    pub fn model(k: usize, lambda: &K, trunc: usize) -> Self {
        let n = trunc.max(k + 1);
        let num = PSeries::monomial(&K::one(), k + 1, n + k + 1);
        let denom = PSeries::monomial(&K::one(), 0, n)
            .add(&PSeries::monomial(lambda, k, n))
            .recip()
            .expect("unit denominator");
        VField {
            f: num.mul(&denom).truncate_to(n),
        }
    }

    pub fn series(&self) -> &PSeries<K> {
        &self.f
    }

    pub fn trunc(&self) -> usize {
        self.f.trunc()
    }

    pub fn coeff(&self, e: usize) -> K {
        self.f.coeff(e)
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn valuation(&self) -> Option<usize> {
        self.f.valuation()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        VField {
            f: self.f.add(&rhs.f),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        VField {
            f: self.f.scale(c),
        }
    }

    pub fn neg(&self) -> Self {
        VField { f: self.f.neg() }
    }

    pub fn truncate_to(&self, trunc: usize) -> Self {
        VField {
            f: self.f.truncate_to(trunc),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.f.to_json();
        v["kind"] = Value::String("vector_field".into());
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(kind) = v.get("kind") {
            if kind != "vector_field" {
                return Err(Error::Validation(format!(
                    "expected kind 'vector_field', found {kind}"
                )));
            }
        }
        VField::new(PSeries::from_json(v)?)
    }
}

impl<K: Coeff> fmt::Display for VField<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] d/dy", self.f)
    }
}

impl<K: Coeff> MForm<K> {
    pub fn new(b: LSeries<K>) -> Self {
        MForm { b }
    }

    /// The model form `omega_{k,lambda} = dy/y^{k+1} + lambda dy/y`.
    pub fn model(k: i64, lambda: &K, trunc: i64) -> Self {
        let b = LSeries::monomial(&K::one(), -k - 1, trunc)
            .add(&LSeries::monomial(lambda, -1, trunc));
        MForm { b }
    }

    pub fn series(&self) -> &LSeries<K> {
        &self.b
    }

    pub fn coeff(&self, e: i64) -> K {
        self.b.coeff(e)
    }

    pub fn residue(&self) -> K {
        self.b.residue()
    }

    pub fn trunc(&self) -> i64 {
        self.b.trunc()
    }

    pub fn is_zero(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        MForm {
            b: self.b.add(&rhs.b),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        MForm {
            b: self.b.sub(&rhs.b),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        MForm {
            b: self.b.scale(c),
        }
    }

    pub fn truncate_to(&self, trunc: i64) -> Self {
        MForm {
            b: self.b.truncate_to(trunc),
        }
    }

    /// Contraction `self(v) = B * F` as a Laurent series.
    pub fn contract(&self, v: &VField<K>) -> LSeries<K> {
        self.b.mul(&LSeries::from_pseries(v.series()))
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.b.to_json();
        v["kind"] = Value::String("one_form".into());
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(kind) = v.get("kind") {
            if kind != "one_form" {
                return Err(Error::Validation(format!(
                    "expected kind 'one_form', found {kind}"
                )));
            }
        }
        Ok(MForm::new(LSeries::from_json(v)?))
    }
}

impl<K: Coeff> fmt::Display for MForm<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] dy", self.b)
    }
}

/// Time-`t` flow of `v`: the germ `exp(t v)`.
///
/// The exact backend refuses fields with a nonzero linear part
/// ([`Error::NoExactExponential`]); the floating backend sums the Lie series
/// numerically until the terms vanish.
pub fn flow<K: Coeff>(v: &VField<K>, t: &K) -> Result<Germ<K>> {
    let n = v.trunc();
    let alpha = v.coeff(1);
    // Capability check: e^{t alpha} must exist in the backend.
    let _ = t.mul(&alpha).exp()?;
    let mut acc = PSeries::identity(n);
    let mut term = PSeries::identity(n);
    let fin = v.valuation().map(|w| w >= 2).unwrap_or(true);
    let mut steps = 0usize;
    loop {
        steps += 1;
        // term <- (t/steps) * F * term'
        term = v
            .series()
            .mul(&term.derivative())
            .truncate_to(n)
            .scale(&t.div(&K::from_int(steps as i64))?);
        if term.trunc() < n {
            // the sharp product rule can only lose orders when F has low
            // valuation and term is short; pad with zeros we know are exact
            // for valuation >= 2 fields
            let mut c = term.coeffs().to_vec();
            c.resize(n + 1, K::zero());
            term = PSeries::new(c);
        }
        if term.is_zero() {
            break;
        }
        if !fin {
            let mag = term
                .coeffs()
                .iter()
                .map(|c| c.approx().norm())
                .fold(0.0_f64, f64::max);
            if !(mag > 1e-25) {
                break;
            }
            if steps > 2000 {
                return Err(Error::NoConvergence(
                    "Lie series did not converge in 2000 terms".into(),
                ));
            }
        }
        acc = acc.add(&term);
    }
    Germ::new(acc)
}

/// The unique `v` with `exp(v) = f` at truncation.
pub fn formal_log<K: Coeff>(f: &Germ<K>) -> Result<VField<K>> {
    if !f.linear_coeff().is_one() {
        return Err(Error::NotTangent);
    }
    let n = f.trunc();
    let id = Germ::identity(n);
    let nu = match f.contact_order(&id) {
        Some(nu) => nu,
        None => return Err(Error::IdentityGerm),
    };
    let c_nu = f.coeff(nu);
    let fd = f.series().derivative();
    // Seed F_nu = c_nu and solve the invariance equation F(f) = f' F for the
    // next coefficients: adding delta y^m to F changes the defect by
    // delta (f^m - f' y^m), whose first coefficient sits at order m + nu - 1
    // with value (m - nu) c_nu.
    let mut vf = PSeries::monomial(&c_nu, nu, n);
    let mut fpow = f.series().clone(); // f^1
    for _ in 2..=nu {
        fpow = fpow.mul(f.series()).truncate_to(n);
    }
    let shift = |m: usize, fd: &PSeries<K>| -> PSeries<K> {
        // f' * y^m as a series of truncation n
        let mut c = vec![K::zero(); m];
        c.extend_from_slice(fd.coeffs());
        let mut s = PSeries::new(c);
        s = s.truncate_to(n);
        s
    };
    let mut defect = fpow.sub(&shift(nu, &fd)).scale(&c_nu).truncate_to(n);
    let solved_up_to = if n + 1 >= nu { n + 1 - nu } else { 0 };
    for m in (nu + 1)..=solved_up_to {
        fpow = fpow.mul(f.series()).truncate_to(n);
        let order = m + nu - 1;
        let resid = defect.coeff(order);
        if !resid.is_zero() {
            let denom = c_nu.mul(&K::from_int(m as i64 - nu as i64));
            let delta = resid.neg().div(&denom)?;
            vf = vf.add(&PSeries::monomial(&delta, m, n));
            defect = defect
                .add(&fpow.sub(&shift(m, &fd)).scale(&delta))
                .truncate_to(n);
        }
    }
    // Top orders invisible to the invariance equation: fix by flow defect.
    let mut v = VField::new(vf)?;
    for m in (solved_up_to.max(nu) + 1)..=n {
        let g = flow(&v, &K::one())?;
        let delta = f.coeff(m).sub(&g.coeff(m));
        if !delta.is_zero() {
            v = VField::new(v.series().add(&PSeries::monomial(&delta, m, n)))?;
        }
    }
    // Re-exponentiation check.
    let g = flow(&v, &K::one())?;
    for e in 1..=n {
        let diff = f.coeff(e).sub(&g.coeff(e));
        if !diff.is_zero() {
            let scale = f.coeff(e).approx().norm().max(1.0);
            if diff.approx().norm() > 1e-6 * scale {
                return Err(Error::Inconsistency(format!(
                    "formal_log validation failed at order {e}"
                )));
            }
        }
    }
    Ok(v)
}

/// The dual form `omega` with `omega(v) = 1`: `B = 1/F`.
pub fn dual_form<K: Coeff>(v: &VField<K>) -> Result<MForm<K>> {
    if v.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let l = LSeries::from_pseries(v.series());
    Ok(MForm::new(l.recip()?))
}

/// The dual field `v` with `omega(v) = 1`: `F = 1/B`.
pub fn dual_field<K: Coeff>(w: &MForm<K>) -> Result<VField<K>> {
    if w.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let inv = w.series().recip()?;
    if inv.valuation().map(|v| v < 1).unwrap_or(false) {
        return Err(Error::Validation(
            "dual field does not vanish at 0".into(),
        ));
    }
    VField::new(inv.to_pseries()?)
}

/// Pullback `f^* w = (B o f) f' dy`.
pub fn pullback<K: Coeff>(w: &MForm<K>, f: &Germ<K>) -> Result<MForm<K>> {
    let sub = w.series().substitute(f.series())?;
    Ok(MForm::new(
        sub.mul(&LSeries::from_pseries(&f.series().derivative())),
    ))
}

/// Pushforward `h_* v = (h' F) o h^{-1}`, satisfying
/// `h o exp(v) o h^{-1} = exp(h_* v)`.
pub fn pushforward<K: Coeff>(v: &VField<K>, h: &Germ<K>) -> Result<VField<K>> {
    let hp = h.series().derivative();
    let prod = hp.mul(v.series());
    let hinv = h.inverse();
    VField::new(prod.compose(hinv.series())?.truncate_to(v.trunc()))
}
