//! The group of formal diffeomorphisms fixing 0, at a truncation order.
//!
//! A [`Germ`] is a power series `f = a y + ...` with `a != 0`, known modulo
//! `O(y^{N+1})`. Composition, inversion, conjugation and iteration stay in the
//! type; mixed truncations truncate down, as in the series module.

use std::fmt;

use serde_json::Value;

use crate::coefficients::Coeff;
use crate::error::{Error, Result};
use crate::series::PSeries;

/// Invertible formal diffeomorphism germ at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Germ<K: Coeff> {
    series: PSeries<K>,
}

impl<K: Coeff> Germ<K> {
    /// Wrap a series; requires zero constant term and nonzero linear term.
    pub fn new(series: PSeries<K>) -> Result<Self> {
        if !series.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if series.coeff(1).is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        Ok(Germ { series })
    }

    pub fn identity(trunc: usize) -> Self {
        Germ {
            series: PSeries::identity(trunc),
        }
    }

    /// The linear germ `a y`.
    pub fn linear(a: &K, trunc: usize) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        Ok(Germ {
            series: PSeries::monomial(a, 1, trunc),
        })
    }

    pub fn series(&self) -> &PSeries<K> {
        &self.series
    }

    pub fn trunc(&self) -> usize {
        self.series.trunc()
    }

    pub fn coeff(&self, e: usize) -> K {
        self.series.coeff(e)
    }

    /// `f'(0)`, the multiplier.
    pub fn linear_coeff(&self) -> K {
        self.series.coeff(1)
    }

    pub fn truncate_to(&self, trunc: usize) -> Self {
        Germ {
            series: self.series.truncate_to(trunc.max(1)),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.series.sub(&PSeries::identity(self.trunc())).is_zero()
    }

    /// `self` after `rhs`: the germ `self(rhs(y))`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let series = self
            .series
            .compose(&rhs.series)
            .expect("germ composition cannot fail");
        Germ { series }
    }

    pub fn inverse(&self) -> Self {
        let series = self
            .series
            .reversion()
            .expect("germ reversion cannot fail");
        Germ { series }
    }

    /// `h o self o h^{-1}`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    /// n-fold composition; negative `n` uses the inverse.
    pub fn iterate(&self, n: i64) -> Self {
        let trunc = self.trunc();
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Germ::identity(trunc);
        let mut pow = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&pow).truncate_to(trunc);
            }
            e >>= 1;
            if e > 0 {
                pow = pow.compose(&pow.clone()).truncate_to(trunc);
            }
        }
        acc
    }

    /// Least exponent `n <= min(N_f, N_g)` where the coefficients differ;
    /// `None` if the germs agree through the shared truncation.
    pub fn contact_order(&self, other: &Self) -> Option<usize> {
        let n = self.trunc().min(other.trunc());
        (1..=n).find(|&e| !self.coeff(e).close_to(&other.coeff(e)))
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.series.to_json();
        v["kind"] = Value::String("germ".into());
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(kind) = v.get("kind") {
            if kind != "germ" {
                return Err(Error::Validation(format!(
                    "expected kind 'germ', found {kind}"
                )));
            }
        }
        Germ::new(PSeries::from_json(v)?)
    }
}

impl<K: Coeff> fmt::Display for Germ<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.series.fmt(f)
    }
}
