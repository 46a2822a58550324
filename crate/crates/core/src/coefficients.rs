//! Pluggable coefficient fields.
//!
//! Two backends implement the [`Coeff`] trait:
//! - [`Cyclo`]: exact elements of a cyclotomic field `Q(zeta_n)`, stored dense in the
//!   power basis and reduced modulo the n-th cyclotomic polynomial. Arithmetic between
//!   different conductors lifts both operands to the lcm conductor, so roots of unity
//!   of any order coexist; declared-conductor validation (the "conductor mismatch"
//!   error surface) lives at the CLI boundary via [`Cyclo::root_of_unity_in`].
//! - [`Cplx<F>`]: complex numbers over an IEEE float `F` (f64 or f32), with a
//!   zero-test tolerance of `2^(12 - mantissa_bits)` — `1e-12`-scale at 53 bits.
//!
//! Exact resonance questions (`a^j = 1`) are decidable on the exact backend; the
//! float backend answers them within tolerance.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Scalar field interface shared by every series computation.
///
/// Methods are explicit (`a.add(&b)`) rather than operator overloads so the trait
/// stays object-simple and reference-friendly in generic kernels.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; [`Error::DivisionByZero`] on zero.
    fn inv(&self) -> Result<Self>;
    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }
    /// Backend zero test: exact on [`Cyclo`], `|z| <= eps` on [`Cplx`].
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }
    /// Backend equality-within-tolerance (exact equality on the exact backend).
    fn close_to(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero()
    }
    fn from_int(n: i64) -> Self;
    /// The rational p/q as a field element. Panics on q = 0.
    fn from_ratio(p: i64, q: i64) -> Self;
    /// A primitive root of unity of the given order.
    fn root_of_unity(order: u32) -> Result<Self>;
    /// e^self. Exact backend: only e^0 = 1 is representable.
    fn exp(&self) -> Result<Self>;
    /// Principal logarithm. Exact backend: only ln 1 = 0 is representable.
    fn ln(&self) -> Result<Self>;
    /// Some n-th root if one is representable in the backend (principal root on
    /// floats; rational roots only on the exact backend).
    fn nth_root(&self, n: u32) -> Option<Self>;
    /// Total order used for canonical orbit representatives: lexicographic on the
    /// exact encoding, (|z|, arg z) on floats.
    fn canon_cmp(&self, rhs: &Self) -> Ordering;
    /// Numeric embedding into `Complex64` (evaluates zeta_n at e^{2 pi i / n}).
    fn approx(&self) -> Complex64;
    /// Lift of a `Complex64` into the backend, when the backend is numeric.
    fn from_approx(z: Complex64) -> Option<Self>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

/// `a^n` for signed `n` (inverts for negative exponents).
pub fn powi<K: Coeff>(a: &K, n: i64) -> Result<K> {
    let (mut base, mut e) = if n < 0 {
        (a.inv()?, (-n) as u64)
    } else {
        (a.clone(), n as u64)
    };
    let mut acc = K::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    Ok(acc)
}

/// Least `j <= bound` with `a^j = 1`, or `None` (torsion detection).
pub fn mul_order<K: Coeff>(a: &K, bound: u32) -> Option<u32> {
    let mut p = a.clone();
    for j in 1..=bound {
        if p.is_one() {
            return Some(j);
        }
        p = p.mul(a);
    }
    None
}

// ---------------------------------------------------------------------------
// Exact cyclotomic backend
// ---------------------------------------------------------------------------

fn br(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while let Some(last) = p.last() {
        if last.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Remainder of `a` modulo `b` (`b` nonzero, any leading coefficient).
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let lead = bb.last().expect("poly_rem by zero").clone();
    while r.len() >= bb.len() {
        let q = r.last().unwrap() / &lead;
        let shift = r.len() - bb.len();
        for (j, bj) in bb.iter().enumerate() {
            let t = &q * bj;
            r[shift + j] -= t;
        }
        poly_trim(&mut r);
        if r.len() >= bb.len() && r.last().map(|c| c.is_zero()).unwrap_or(true) {
            poly_trim(&mut r);
        }
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Quotient of `a` by `b` assuming exact division.
fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let lead = bb.last().expect("poly_div by zero").clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(bb.len()) + 1];
    while r.len() >= bb.len() {
        let c = r.last().unwrap() / &lead;
        let shift = r.len() - bb.len();
        q[shift] = c.clone();
        for (j, bj) in bb.iter().enumerate() {
            let t = &c * bj;
            r[shift + j] -= t;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    debug_assert!(r.is_empty(), "poly_div_exact: nonzero remainder");
    q
}

/// Extended Euclid in Q[x]: returns (g, s) with s*a = g mod b, g = gcd(a, b)
/// normalized monic.
fn poly_half_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    // Invariants: r0 = s0*a mod b-ideal sense; classic iteration tracking s only.
    let mut r0: Vec<BigRational> = a.to_vec();
    let mut r1: Vec<BigRational> = b.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0 = vec![BigRational::one()];
    let mut s1: Vec<BigRational> = vec![];
    while !r1.is_empty() {
        // quotient of r0 by r1
        let mut q = vec![BigRational::zero(); r0.len().saturating_sub(r1.len()) + 1];
        let lead = r1.last().unwrap().clone();
        let mut r = r0.clone();
        while r.len() >= r1.len() {
            let c = r.last().unwrap() / &lead;
            let shift = r.len() - r1.len();
            q[shift] = c.clone();
            for (j, bj) in r1.iter().enumerate() {
                let t = &c * bj;
                r[shift + j] -= t;
            }
            poly_trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        let qs1 = poly_mul(&q, &s1);
        let mut s2 = s0.clone();
        s2.resize(s2.len().max(qs1.len()), BigRational::zero());
        for (i, c) in qs1.iter().enumerate() {
            s2[i] -= c;
        }
        poly_trim(&mut s2);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    // normalize monic
    if let Some(lead) = r0.last().cloned() {
        for c in r0.iter_mut() {
            *c /= &lead;
        }
        for c in s0.iter_mut() {
            *c /= &lead;
        }
    }
    (r0, s0)
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Vec<BigRational>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigRational>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-th cyclotomic polynomial, coefficients low-to-high (monic, integral).
pub fn cyclotomic_poly(n: u32) -> Vec<BigRational> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by the cyclotomic polynomials of the proper divisors.
    let mut num = vec![BigRational::zero(); n as usize + 1];
    num[0] = -BigRational::one();
    num[n as usize] = BigRational::one();
    let mut result = num;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            result = poly_div_exact(&result, &phi_d);
        }
    }
    cyclotomic_cache()
        .lock()
        .unwrap()
        .insert(n, result.clone());
    result
}

/// Exact element of `Q(zeta_n)` in the dense power basis modulo the n-th
/// cyclotomic polynomial. `coeffs.len() == deg(Phi_n)`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    fn reduced(conductor: u32, mut coeffs: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(conductor);
        let deg = phi.len() - 1;
        poly_trim(&mut coeffs);
        if coeffs.len() > deg {
            coeffs = poly_rem(&coeffs, &phi);
        }
        coeffs.resize(deg, BigRational::zero());
        Cyclo { conductor, coeffs }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclo {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    /// The element as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            // The representation modulo Phi_n is unique, so a rational element is
            // always stored as a constant polynomial.
            None
        }
    }

    /// Re-express the element in `Q(zeta_m)` where `conductor | m`.
    pub fn lift(&self, m: u32) -> Self {
        if m == self.conductor {
            return self.clone();
        }
        debug_assert_eq!(m % self.conductor, 0, "lift target must be a multiple");
        let step = (m / self.conductor) as usize;
        let mut raw = vec![BigRational::zero(); self.coeffs.len() * step.max(1) + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = j * step;
                if e >= raw.len() {
                    raw.resize(e + 1, BigRational::zero());
                }
                raw[e] += c;
            }
        }
        Cyclo::reduced(m, raw)
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo, u32) {
        let m = a.conductor.lcm(&b.conductor);
        (a.lift(m), b.lift(m), m)
    }

    /// Primitive root of unity of `order` inside the field of a *declared*
    /// conductor; errors unless `order | conductor`. This is the CLI-facing
    /// strict variant of [`Coeff::root_of_unity`].
    pub fn root_of_unity_in(conductor: u32, order: u32) -> Result<Self> {
        if order == 0 || conductor == 0 || conductor % order != 0 {
            return Err(Error::ConductorMismatch { conductor, order });
        }
        Ok(<Cyclo as Coeff>::root_of_unity(order)?.lift(conductor))
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = Cyclo::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", r);
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({})*z{}^{}", c, self.conductor, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Coeff for Cyclo {
    fn zero() -> Self {
        Cyclo::from_rational(BigRational::zero())
    }

    fn one() -> Self {
        Cyclo::from_rational(BigRational::one())
    }

    fn add(&self, rhs: &Self) -> Self {
        let (mut a, b, _) = Cyclo::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }

    fn sub(&self, rhs: &Self) -> Self {
        let (mut a, b, _) = Cyclo::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x -= y;
        }
        a
    }

    fn mul(&self, rhs: &Self) -> Self {
        let (a, b, m) = Cyclo::common(self, rhs);
        Cyclo::reduced(m, poly_mul(&a.coeffs, &b.coeffs))
    }

    fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    fn inv(&self) -> Result<Self> {
        if Coeff::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        let phi = cyclotomic_poly(self.conductor);
        let (g, s) = poly_half_ext_gcd(&self.coeffs, &phi);
        debug_assert_eq!(g.len(), 1, "element not invertible mod Phi_n");
        let ginv = g[0].recip();
        let mut s: Vec<BigRational> = s.into_iter().map(|c| c * &ginv).collect();
        poly_trim(&mut s);
        Ok(Cyclo::reduced(self.conductor, s))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn from_int(n: i64) -> Self {
        Cyclo::from_rational(br(n))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Cyclo::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn root_of_unity(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Validation("root order must be positive".into()));
        }
        if order == 1 {
            return Ok(Cyclo::one());
        }
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        let mut coeffs = vec![BigRational::zero(); deg.max(2)];
        coeffs[1] = BigRational::one();
        Ok(Cyclo::reduced(order, coeffs))
    }

    fn exp(&self) -> Result<Self> {
        if Coeff::is_zero(self) {
            Ok(Cyclo::one())
        } else {
            Err(Error::NoExactExponential)
        }
    }

    fn ln(&self) -> Result<Self> {
        if self.is_one() {
            Ok(Cyclo::zero())
        } else {
            Err(Error::BackendMismatch(
                "exact backend has no logarithms".into(),
            ))
        }
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if n == 1 || Coeff::is_zero(self) || self.is_one() {
            return Some(self.clone());
        }
        // Rational roots only: exact integer n-th roots of numerator/denominator.
        let r = self.as_rational()?;
        let (num, den) = (r.numer().clone(), r.denom().clone());
        let neg = num.is_negative();
        if neg && n % 2 == 0 {
            return None;
        }
        let root_of = |v: &BigInt| -> Option<BigInt> {
            let v = v.abs();
            let root = v.nth_root(n);
            if num_traits::pow::pow(root.clone(), n as usize) == v {
                Some(root)
            } else {
                None
            }
        };
        let rn = root_of(&num)?;
        let rd = root_of(&den)?;
        let mut out = BigRational::new(rn, rd);
        if neg {
            out = -out;
        }
        Some(Cyclo::from_rational(out))
    }

    fn canon_cmp(&self, rhs: &Self) -> Ordering {
        if self == rhs {
            return Ordering::Equal;
        }
        // Order on the numeric embedding (modulus, then argument). Comparing
        // coefficient vectors would depend on the conductor an element
        // happens to be stored at, which is not an invariant of the number.
        let a = self.approx();
        let b = rhs.approx();
        match a.norm().total_cmp(&b.norm()) {
            Ordering::Equal => a.arg().total_cmp(&b.arg()),
            o => o,
        }
    }

    fn approx(&self) -> Complex64 {
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / n;
            let cf = c.numer().to_f64().unwrap_or(f64::NAN)
                / c.denom().to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(ang.cos(), ang.sin()) * cf;
        }
        acc
    }

    fn from_approx(_z: Complex64) -> Option<Self> {
        None
    }

    fn to_json(&self) -> Value {
        json!({
            "conductor": self.conductor,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Validation("coefficient must be an object".into()))?;
        let conductor = obj
            .get("conductor")
            .and_then(|c| c.as_u64())
            .ok_or_else(|| Error::Validation("missing integer 'conductor'".into()))?
            as u32;
        if conductor == 0 {
            return Err(Error::Validation("conductor must be >= 1".into()));
        }
        let coeffs = obj
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Validation("missing array 'coeffs'".into()))?;
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let s = c
                .as_str()
                .ok_or_else(|| Error::Validation("rational must be a string".into()))?;
            let r: BigRational = s
                .parse()
                .map_err(|_| Error::Validation(format!("unparsable rational '{s}'")))?;
            out.push(r);
        }
        Ok(Cyclo::reduced(conductor, out))
    }
}

// ---------------------------------------------------------------------------
// Complex floating backend
// ---------------------------------------------------------------------------

/// Floating-point scalar of the complex backend: f32 or f64.
pub trait FloatScalar: Float + FromPrimitive + fmt::Debug + Send + Sync + 'static {}
impl FloatScalar for f32 {}
impl FloatScalar for f64 {}

/// Complex number over `F` with the backend zero-test tolerance
/// `2^(12 - mantissa_bits)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cplx<F: FloatScalar> {
    pub re: F,
    pub im: F,
}

impl<F: FloatScalar> Cplx<F> {
    pub fn new(re: F, im: F) -> Self {
        Cplx { re, im }
    }

    pub fn mantissa_bits() -> u32 {
        // epsilon = 2^(1 - bits)
        let bits = F::one() - F::epsilon().log2();
        bits.round().to_u32().unwrap_or(53)
    }

    pub fn tolerance() -> F {
        // 2^(12 - bits) = epsilon * 2^11
        F::epsilon() * F::from_f64(2048.0).unwrap()
    }

    pub fn norm(&self) -> F {
        self.re.hypot(self.im)
    }
}

impl<F: FloatScalar> fmt::Display for Cplx<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}{}{:?}i",
            self.re,
            if self.im < F::zero() { "" } else { "+" },
            self.im
        )
    }
}

impl<F: FloatScalar> Coeff for Cplx<F> {
    fn zero() -> Self {
        Cplx::new(F::zero(), F::zero())
    }

    fn one() -> Self {
        Cplx::new(F::one(), F::zero())
    }

    fn add(&self, rhs: &Self) -> Self {
        Cplx::new(self.re + rhs.re, self.im + rhs.im)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Cplx::new(self.re - rhs.re, self.im - rhs.im)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Cplx::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }

    fn neg(&self) -> Self {
        Cplx::new(-self.re, -self.im)
    }

    fn inv(&self) -> Result<Self> {
        let n2 = self.re * self.re + self.im * self.im;
        if n2 == F::zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Cplx::new(self.re / n2, -self.im / n2))
    }

    fn is_zero(&self) -> bool {
        self.norm() <= Self::tolerance()
    }

    fn from_int(n: i64) -> Self {
        Cplx::new(F::from_i64(n).unwrap(), F::zero())
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Cplx::new(
            F::from_i64(p).unwrap() / F::from_i64(q).unwrap(),
            F::zero(),
        )
    }

    fn root_of_unity(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Validation("root order must be positive".into()));
        }
        let ang = F::from_f64(2.0 * std::f64::consts::PI).unwrap()
            / F::from_u32(order).unwrap();
        Ok(Cplx::new(ang.cos(), ang.sin()))
    }

    fn exp(&self) -> Result<Self> {
        let r = self.re.exp();
        Ok(Cplx::new(r * self.im.cos(), r * self.im.sin()))
    }

    fn ln(&self) -> Result<Self> {
        if Coeff::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(Cplx::new(self.norm().ln(), self.im.atan2(self.re)))
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if Coeff::is_zero(self) {
            return Some(Self::zero());
        }
        let r = self.norm().powf(F::one() / F::from_u32(n).unwrap());
        let ang = self.im.atan2(self.re) / F::from_u32(n).unwrap();
        Some(Cplx::new(r * ang.cos(), r * ang.sin()))
    }

    fn canon_cmp(&self, rhs: &Self) -> Ordering {
        let n1 = self.norm().to_f64().unwrap_or(f64::NAN);
        let n2 = rhs.norm().to_f64().unwrap_or(f64::NAN);
        match n1.total_cmp(&n2) {
            Ordering::Equal => {
                let a1 = self
                    .im
                    .atan2(self.re)
                    .to_f64()
                    .unwrap_or(f64::NAN);
                let a2 = rhs.im.atan2(rhs.re).to_f64().unwrap_or(f64::NAN);
                a1.total_cmp(&a2)
            }
            o => o,
        }
    }

    fn approx(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_approx(z: Complex64) -> Option<Self> {
        Some(Cplx::new(F::from_f64(z.re)?, F::from_f64(z.im)?))
    }

    fn to_json(&self) -> Value {
        json!({
            "re": format!("{:?}", self.re),
            "im": format!("{:?}", self.im),
            "bits": Self::mantissa_bits(),
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Validation("coefficient must be an object".into()))?;
        let field = |name: &str| -> Result<F> {
            let s = obj
                .get(name)
                .ok_or_else(|| Error::Validation(format!("missing '{name}'")))?;
            let x = match s {
                Value::String(s) => s.parse::<f64>().ok(),
                Value::Number(n) => n.as_f64(),
                _ => None,
            }
            .ok_or_else(|| Error::Validation(format!("unparsable float '{name}'")))?;
            F::from_f64(x).ok_or_else(|| Error::Validation("float out of range".into()))
        };
        Ok(Cplx::new(field("re")?, field("im")?))
    }
}
