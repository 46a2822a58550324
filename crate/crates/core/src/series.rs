//! Truncated power- and Laurent-series arithmetic.
//!
//! [`PSeries`] keeps exponents `0..=N` (everything in `O(y^{N+1})` is dropped);
//! [`LSeries`] additionally allows a negative valuation (poles) and exposes the
//! residue slot (the coefficient of `y^{-1}`). Both are immutable values.
//!
//! Truncation is propagated honestly: each operation carries exactly the orders
//! that are determined by its operands and never fabricates coefficients past
//! them. The sharp rules are
//! - `add`: min of truncations;
//! - `mul` of series with valuations `v_a, v_b`: `min(N_a + v_b, N_b + v_a)`;
//! - reciprocal of `b`: `N_b - 2 v_b`;
//! - `compose(outer, inner)` with `val(inner) = w`: `min(w (N_o + 1) - 1,
//!   N_i + w * val(outer'))`;
//! - `derivative`: `N - 1`; `primitive`: `N + 1`.
//!
//! No logarithmic terms are representable: a primitive with nonzero residue is
//! refused rather than silently mangled.

use std::fmt;

use serde_json::{json, Value};

use crate::coefficients::Coeff;
use crate::error::{Error, Result};

/// Truncated power series: coefficients of `y^0 .. y^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PSeries<K: Coeff> {
    coeffs: Vec<K>,
}

impl<K: Coeff> PSeries<K> {
    /// Series from coefficients `c_0..c_N` (length fixes the truncation).
    pub fn new(coeffs: Vec<K>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        PSeries { coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        PSeries {
            coeffs: vec![K::zero(); trunc + 1],
        }
    }

    /// The identity series `y`.
    pub fn identity(trunc: usize) -> Self {
        Self::monomial(&K::one(), 1, trunc)
    }

    /// `c * y^e`.
    pub fn monomial(c: &K, e: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc.max(e));
        s.coeffs[e] = c.clone();
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `y^e` (zero past the stored range).
    pub fn coeff(&self, e: usize) -> K {
        self.coeffs.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Least exponent with nonzero coefficient, or `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Drop coefficients above the new truncation (or keep all if larger).
    pub fn truncate_to(&self, trunc: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(trunc + 1);
        PSeries { coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.trunc().min(rhs.trunc());
        let coeffs = (0..=n)
            .map(|e| self.coeff(e).add(&rhs.coeff(e)))
            .collect();
        PSeries { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.trunc().min(rhs.trunc());
        let coeffs = (0..=n)
            .map(|e| self.coeff(e).sub(&rhs.coeff(e)))
            .collect();
        PSeries { coeffs }
    }

    pub fn scale(&self, c: &K) -> Self {
        PSeries {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        PSeries {
            coeffs: self.coeffs.iter().map(|x| x.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let va = self.valuation().unwrap_or(self.trunc() + 1);
        let vb = rhs.valuation().unwrap_or(rhs.trunc() + 1);
        let n = (self.trunc() + vb).min(rhs.trunc() + va);
        let n = n.min(self.trunc() + rhs.trunc());
        let mut coeffs = vec![K::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i > n {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j > n {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        PSeries { coeffs }
    }

    /// Reciprocal; requires a unit (nonzero constant term). Truncation `N`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.trunc();
        let c0i = c0.inv()?;
        let mut out = vec![K::zero(); n + 1];
        out[0] = c0i.clone();
        // (sum b_j y^j)(sum a_i y^i) = 1, solved order by order.
        for e in 1..=n {
            let mut acc = K::zero();
            for j in 0..e {
                let a = self.coeff(e - j);
                if !a.is_zero() && !out[j].is_zero() {
                    acc = acc.add(&out[j].mul(&a));
                }
            }
            out[e] = acc.neg().mul(&c0i);
        }
        Ok(PSeries { coeffs: out })
    }

    pub fn derivative(&self) -> Self {
        let n = self.trunc();
        if n == 0 {
            return PSeries::zero(0);
        }
        let coeffs = (1..=n)
            .map(|e| self.coeffs[e].mul(&K::from_int(e as i64)))
            .collect();
        PSeries { coeffs }
    }

    /// `outer(inner)`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if inner.is_zero() {
            let n = inner.trunc();
            let mut s = PSeries::zero(n);
            s.coeffs[0] = self.coeff(0);
            return Ok(s);
        }
        let w = inner.valuation().unwrap();
        let vdp = self
            .derivative()
            .valuation()
            .unwrap_or(self.trunc().saturating_sub(1) + 1);
        let n = (w * (self.trunc() + 1) - 1).min(inner.trunc() + w * vdp);
        // Horner: result = c_N; result = result*inner + c_e.
        let mut acc = PSeries::monomial(&self.coeff(self.trunc()), 0, n);
        for e in (0..self.trunc()).rev() {
            acc = acc.mul(inner).truncate_to(n);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeff(e));
        }
        if acc.trunc() < n {
            acc.coeffs.resize(n + 1, K::zero());
        }
        Ok(acc.truncate_to(n))
    }

    /// Compositional inverse `g` with `f(g) = g(f) = y` up to truncation.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let a = self.coeff(1);
        if a.is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        let n = self.trunc();
        let ainv = a.inv()?;
        let mut g = PSeries::monomial(&ainv, 1, 1);
        // Newton iteration with doubling precision:
        // g <- g - (f(g) - y) / f'(g), correct modulo y^{m+1} with m doubling.
        let fprime = self.derivative();
        let mut m = 1usize;
        while m < n {
            m = (2 * m).min(n);
            let fm = self.truncate_to(m);
            let mut gm = PSeries::zero(m);
            for (e, c) in g.coeffs().iter().enumerate() {
                if e <= m {
                    gm.coeffs[e] = c.clone();
                }
            }
            let err = fm.compose(&gm)?.sub(&PSeries::identity(m));
            if err.is_zero() {
                g = gm;
                continue;
            }
            let slope = fprime.truncate_to(m.saturating_sub(1)).compose(&gm)?;
            let corr = err.mul(&slope.recip()?);
            g = gm.sub(&corr.truncate_to(m));
        }
        let mut coeffs = g.coeffs().to_vec();
        coeffs.resize(n + 1, K::zero());
        Ok(PSeries::new(coeffs))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "valuation": 0,
            "trunc": self.trunc(),
            "coeffs": self.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let l = LSeries::<K>::from_json(v)?;
        l.to_pseries()
    }
}

impl<K: Coeff> fmt::Display for PSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*y^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(y^{})", self.trunc() + 1)
    }
}

/// Truncated Laurent series: coefficients of `y^v .. y^N` with `v` possibly
/// negative. The zero series has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LSeries<K: Coeff> {
    val: i64,
    trunc: i64,
    coeffs: Vec<K>,
}

impl<K: Coeff> LSeries<K> {
    /// Series from coefficients `c_val .. c_val+len-1`; truncation is
    /// `val + len - 1`. Leading/trailing zeros are normalized away.
    pub fn new(val: i64, coeffs: Vec<K>) -> Self {
        let trunc = val + coeffs.len() as i64 - 1;
        let mut s = LSeries { val, trunc, coeffs };
        s.normalize();
        s
    }

    pub fn zero(trunc: i64) -> Self {
        LSeries {
            val: 0,
            trunc,
            coeffs: vec![],
        }
    }

    pub fn monomial(c: &K, e: i64, trunc: i64) -> Self {
        assert!(e <= trunc);
        let mut s = LSeries {
            val: e,
            trunc,
            coeffs: vec![c.clone()],
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        while let Some(first) = self.coeffs.first() {
            if first.is_zero() {
                self.coeffs.remove(0);
                self.val += 1;
            } else {
                break;
            }
        }
        let keep = (self.trunc - self.val + 1).max(0) as usize;
        self.coeffs.truncate(keep);
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            self.val = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation; `None` for the zero series.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeff(&self, e: i64) -> K {
        if e < self.val {
            return K::zero();
        }
        self.coeffs
            .get((e - self.val) as usize)
            .cloned()
            .unwrap_or_else(K::zero)
    }

    /// Coefficient of `y^{-1}`.
    pub fn residue(&self) -> K {
        self.coeff(-1)
    }

    pub fn truncate_to(&self, trunc: i64) -> Self {
        let mut s = self.clone();
        s.trunc = s.trunc.min(trunc);
        s.normalize();
        s
    }

    pub fn from_pseries(p: &PSeries<K>) -> Self {
        LSeries::new(0, p.coeffs().to_vec())
    }

    /// Back to a power series; requires valuation >= 0 and truncation >= 0.
    pub fn to_pseries(&self) -> Result<PSeries<K>> {
        if self.valuation().map(|v| v < 0).unwrap_or(false) {
            return Err(Error::Validation(
                "Laurent series with a pole is not a power series".into(),
            ));
        }
        if self.trunc < 0 {
            return Err(Error::Validation("negative truncation".into()));
        }
        let mut coeffs = vec![K::zero(); self.trunc as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[self.val as usize + i] = c.clone();
        }
        Ok(PSeries::new(coeffs))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let trunc = self.trunc.min(rhs.trunc);
        if self.is_zero() {
            return rhs.truncate_to(trunc);
        }
        if rhs.is_zero() {
            return self.truncate_to(trunc);
        }
        let val = self.val.min(rhs.val);
        let coeffs = (val..=trunc.max(val))
            .map(|e| self.coeff(e).add(&rhs.coeff(e)))
            .collect();
        let mut s = LSeries { val, trunc, coeffs };
        s.normalize();
        s
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        LSeries {
            val: self.val,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut s = LSeries {
            val: self.val,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        };
        s.normalize();
        s
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            // Truncation of a product with a zero operand: keep it conservative.
            return LSeries::zero(self.trunc.min(rhs.trunc));
        }
        let trunc = (self.trunc + rhs.val).min(rhs.trunc + self.val);
        let val = self.val + rhs.val;
        let mut coeffs = vec![K::zero(); (trunc - val + 1).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let e = val + (i + j) as i64;
                if e > trunc {
                    break;
                }
                if !b.is_zero() {
                    let idx = (i + j) as usize;
                    coeffs[idx] = coeffs[idx].add(&a.mul(b));
                }
            }
        }
        let mut s = LSeries { val, trunc, coeffs };
        s.normalize();
        s
    }

    /// Reciprocal; truncation `N - 2v`.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.val;
        let trunc = self.trunc - 2 * v;
        let order = (self.trunc - v).max(0) as usize;
        // self = y^v * u with u a unit power series of truncation order `order`.
        let u = PSeries::new({
            let mut c = self.coeffs.clone();
            c.resize(order + 1, K::zero());
            c
        });
        let ui = u.recip()?;
        let mut s = LSeries {
            val: -v,
            trunc,
            coeffs: ui.coeffs().to_vec(),
        };
        s.normalize();
        Ok(s)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn derivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.val + i as i64;
            coeffs.push(c.mul(&K::from_int(e)));
        }
        let mut s = LSeries {
            val: self.val - 1,
            trunc: self.trunc - 1,
            coeffs,
        };
        s.normalize();
        s
    }

    /// Term-by-term antiderivative with zero constant of integration.
    /// [`Error::NonzeroResidue`] if the `y^{-1}` coefficient is nonzero.
    pub fn primitive(&self) -> Result<Self> {
        if !self.residue().is_zero() {
            return Err(Error::NonzeroResidue);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.val + i as i64;
            if e == -1 {
                coeffs.push(K::zero());
            } else {
                coeffs.push(c.div(&K::from_int(e + 1))?);
            }
        }
        let mut s = LSeries {
            val: self.val + 1,
            trunc: self.trunc + 1,
            coeffs,
        };
        s.normalize();
        Ok(s)
    }

    /// Pullback substitution `self(inner)` for a germ `inner` (zero constant
    /// term, invertible linear term). Negative powers use the reciprocal.
    pub fn substitute(&self, inner: &PSeries<K>) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if inner.coeff(1).is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        if self.is_zero() {
            return Ok(LSeries::zero(self.trunc.min(inner.trunc() as i64)));
        }
        let v = self.val;
        // self = y^v * u; self(f) = f^v * u(f).
        let order = (self.trunc - v).max(0) as usize;
        let u = PSeries::new({
            let mut c = self.coeffs.clone();
            c.resize(order + 1, K::zero());
            c
        });
        let uf = LSeries::from_pseries(&u.compose(inner)?);
        let f = LSeries::from_pseries(inner);
        let mut pow = LSeries::monomial(&K::one(), 0, uf.trunc() + v.abs() + 1);
        let base = if v >= 0 { f.clone() } else { f.recip()? };
        for _ in 0..v.abs() {
            pow = pow.mul(&base);
        }
        // Restore headroom lost to the generic product rule: f^v is exactly
        // y^v * unit known to the full order of `inner`.
        pow.trunc = pow.trunc.max(inner.trunc() as i64 + v);
        Ok(pow.mul(&uf))
    }

    pub fn to_json(&self) -> Value {
        let val = self.valuation().unwrap_or(0);
        let coeffs: Vec<Value> = if self.is_zero() {
            vec![]
        } else {
            (val..=self.trunc).map(|e| self.coeff(e).to_json()).collect()
        };
        json!({
            "valuation": val,
            "trunc": self.trunc,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Validation("series must be an object".into()))?;
        let val = obj
            .get("valuation")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| Error::Validation("missing integer 'valuation'".into()))?;
        let trunc = obj
            .get("trunc")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| Error::Validation("missing integer 'trunc'".into()))?;
        let arr = obj
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Validation("missing array 'coeffs'".into()))?;
        if val + arr.len() as i64 - 1 > trunc {
            return Err(Error::Validation(
                "coefficient list extends past the truncation".into(),
            ));
        }
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            coeffs.push(K::from_json(c)?);
        }
        let mut s = LSeries { val, trunc, coeffs };
        s.normalize();
        Ok(s)
    }
}

impl<K: Coeff> fmt::Display for LSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*y^{}", self.val + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(y^{})", self.trunc + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Cyclo;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type S = PSeries<Cyclo>;
    type L = LSeries<Cyclo>;

    fn q(p: i64, d: i64) -> Cyclo {
        Cyclo::from_ratio(p, d)
    }

    fn z(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    fn ps(coeffs: &[i64]) -> S {
        S::new(coeffs.iter().map(|&c| z(c)).collect())
    }

    #[test]
    fn compose_examples() {
        // identity inner
        let f = ps(&[0, 1, 1]);
        assert_eq!(f.compose(&S::identity(2)).unwrap(), f);
        // monomial case: y^2 composed with 2y
        let sq = ps(&[0, 0, 1]);
        let two_y = ps(&[0, 2]);
        let r = sq.compose(&two_y).unwrap();
        assert_eq!(r.coeff(2), z(4));
        // (y + y^2) o (y + y^3) at N=4
        let outer = ps(&[0, 1, 1, 0, 0]);
        let inner = ps(&[0, 1, 0, 1, 0]);
        let r = outer.compose(&inner).unwrap().truncate_to(4);
        assert_eq!(r, ps(&[0, 1, 1, 1, 2]));
    }

    #[test]
    fn reversion_examples() {
        assert_eq!(S::identity(4).reversion().unwrap(), S::identity(4));
        let half = ps(&[0, 2]).reversion().unwrap();
        assert_eq!(half.coeff(1), q(1, 2));
        // y + y^2 at N=4 -> y - y^2 + 2y^3 - 5y^4
        let f = ps(&[0, 1, 1, 0, 0]);
        assert_eq!(f.reversion().unwrap(), ps(&[0, 1, -1, 2, -5]));
    }

    #[test]
    fn reversion_requires_unit_linear_term() {
        let f = ps(&[0, 0, 1, 0]);
        assert!(matches!(
            f.reversion(),
            Err(Error::ZeroLinearCoefficient)
        ));
    }

    fn random_germ(rng: &mut ChaCha8Rng, n: usize) -> S {
        // Small integer coefficients: keeps rational blowup in check while
        // still exercising every code path.
        let mut coeffs = vec![z(0), z(1 + rng.gen_range(0..2))];
        for _ in 2..=n {
            coeffs.push(z(rng.gen_range(-2..=2)));
        }
        S::new(coeffs)
    }

    #[test]
    fn compose_associative_and_reversion_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 32;
        for _ in 0..12 {
            let f = random_germ(&mut rng, n);
            let g = random_germ(&mut rng, n);
            let h = random_germ(&mut rng, n);
            let lhs = f.compose(&g).unwrap().compose(&h).unwrap().truncate_to(n);
            let rhs = f.compose(&g.compose(&h).unwrap()).unwrap().truncate_to(n);
            assert_eq!(lhs, rhs);
            let fi = f.reversion().unwrap();
            assert_eq!(f.compose(&fi).unwrap().truncate_to(n), S::identity(n));
            assert_eq!(fi.compose(&f).unwrap().truncate_to(n), S::identity(n));
        }
    }

    #[test]
    fn truncation_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let f48 = random_germ(&mut rng, 48);
            let g48 = random_germ(&mut rng, 48);
            let f32_ = f48.truncate_to(32);
            let g32 = g48.truncate_to(32);
            assert_eq!(
                f48.compose(&g48).unwrap().truncate_to(32),
                f32_.compose(&g32).unwrap().truncate_to(32)
            );
            assert_eq!(f48.mul(&g48).truncate_to(32), f32_.mul(&g32).truncate_to(32));
            assert_eq!(
                f48.reversion().unwrap().truncate_to(32),
                f32_.reversion().unwrap()
            );
        }
    }

    #[test]
    fn laurent_basics() {
        // (1/y) * y = 1
        let inv_y = L::monomial(&z(1), -1, 6);
        let y = L::monomial(&z(1), 1, 6);
        let one = inv_y.mul(&y);
        assert_eq!(one.coeff(0), z(1));
        assert!(one.valuation() == Some(0));
        // derivative of 1/y = -1/y^2
        let d = inv_y.derivative();
        assert_eq!(d.coeff(-2), z(-1));
        assert_eq!(d.valuation(), Some(-2));
    }

    #[test]
    fn duality_of_form_and_field() {
        // (1/y^3 + lambda/y) * (y^3 / (1 + lambda y^2)) = 1 at N=6, k=2.
        let lam = q(3, 2);
        let form = L::monomial(&z(1), -3, 6).add(&L::monomial(&lam, -1, 6));
        let mut dc = vec![z(1), z(0), lam.clone()];
        dc.resize(7, z(0)); // 1 + lambda y^2 exactly, known through y^6
        let denom = L::new(0, dc);
        let field = L::monomial(&z(1), 3, 9).div(&denom).unwrap();
        let prod = form.mul(&field);
        assert_eq!(prod.coeff(0), z(1));
        for e in 1..=prod.trunc() {
            assert!(prod.coeff(e).is_zero(), "nonzero at exponent {e}");
        }
        assert!(prod.trunc() >= 3);
    }

    #[test]
    fn primitive_examples() {
        assert!(L::zero(5).primitive().unwrap().is_zero());
        let c = L::monomial(&z(1), 0, 5);
        assert_eq!(c.primitive().unwrap(), L::monomial(&z(1), 1, 6));
        // 3y^2 - 2/y^3 -> y^3 + 1/y^2
        let a = L::monomial(&z(3), 2, 6).add(&L::monomial(&z(-2), -3, 6));
        let p = a.primitive().unwrap();
        assert_eq!(p.coeff(3), z(1));
        assert_eq!(p.coeff(-2), z(1));
        // residue obstruction
        let bad = L::monomial(&z(1), -1, 4);
        assert!(matches!(bad.primitive(), Err(Error::NonzeroResidue)));
    }

    #[test]
    fn derivative_of_primitive_is_identity() {
        let a = L::new(-2, vec![z(5), z(0), z(7), z(-1), z(2)]);
        assert!(a.residue().is_zero());
        let round = a.primitive().unwrap().derivative();
        assert_eq!(round, a);
    }

    #[test]
    fn substitute_matches_compose_on_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = random_germ(&mut rng, 16);
            let g = random_germ(&mut rng, 16);
            let a = LSeries::from_pseries(&f).substitute(&g).unwrap();
            let b = LSeries::from_pseries(&f.compose(&g).unwrap());
            let n = a.trunc().min(b.trunc());
            assert_eq!(a.truncate_to(n), b.truncate_to(n));
        }
    }

    #[test]
    fn substitute_handles_poles() {
        // (1/y) o (y/(1-y)) = (1-y)/y = 1/y - 1.
        let geom = S::new((0..=8).map(|e| if e == 0 { z(0) } else { z(1) }).collect());
        let r = L::monomial(&z(1), -1, 8).substitute(&geom).unwrap();
        assert_eq!(r.coeff(-1), z(1));
        assert_eq!(r.coeff(0), z(-1));
        for e in 1..=r.trunc() {
            assert!(r.coeff(e).is_zero());
        }
    }

    #[test]
    fn json_round_trip() {
        let a = L::new(-2, vec![q(1, 3), z(0), z(7), q(-2, 5)]);
        let back = L::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
        let p = ps(&[0, 1, -3, 5]);
        let back = S::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
        let _ = BigRational::from_integer(BigInt::from(1)); // keep imports honest
    }
}
