use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{CoeffExpr, Monomial, Rational};
use crate::error::{Error, Result};

/// An exact phase-space point. The angle enters only through the rational pair
/// `(s, c)`, which must satisfy `s^2 + c^2 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPoint {
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub z: Rational,
    #[serde(with = "serde_rational")]
    pub p_r: Rational,
    #[serde(with = "serde_rational")]
    pub p_psi: Rational,
    #[serde(with = "serde_rational")]
    pub p_z: Rational,
    #[serde(with = "serde_rational")]
    pub k: Rational,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

impl RationalPoint {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: Rational,
        z: Rational,
        p_r: Rational,
        p_psi: Rational,
        p_z: Rational,
        k: Rational,
        s: Rational,
        c: Rational,
    ) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidPoint("r must be nonzero".into()));
        }
        if &s * &s + &c * &c != Rational::one() {
            return Err(Error::InvalidPoint(format!(
                "s^2 + c^2 != 1 for (s, c) = ({s}, {c})"
            )));
        }
        Ok(RationalPoint {
            r,
            z,
            p_r,
            p_psi,
            p_z,
            k,
            s,
            c,
        })
    }
}

/// A floating-point phase-space point in polar-cylindrical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FloatCoords {
    pub r: f64,
    pub psi: f64,
    pub z: f64,
    pub p_r: f64,
    pub p_psi: f64,
    pub p_z: f64,
    pub k: f64,
}

fn exact_pow(base: &Rational, e: i64, name: &'static str) -> Result<Rational> {
    if e == 0 {
        return Ok(Rational::one());
    }
    if e < 0 && base.is_zero() {
        return Err(Error::DivisionByZero(name));
    }
    Ok(num_traits::Pow::pow(base, e as i32))
}

impl CoeffExpr {
    pub fn eval_exact(&self, pt: &RationalPoint) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, q) in self.iter() {
            acc += q * monomial_exact(m, pt)?;
        }
        Ok(acc)
    }

    /// Evaluates at a floating-point angle with `s = sin(lambda*psi + psi0)`.
    pub fn eval_float(&self, at: &FloatCoords, lambda: u32, psi0: f64) -> Result<f64> {
        let theta = lambda as f64 * at.psi + psi0;
        let (s, c) = theta.sin_cos();
        self.eval_float_sc(at.r, at.z, at.k, s, c)
    }

    /// Evaluates with the trigonometric pair given directly.
    pub fn eval_float_sc(&self, r: f64, z: f64, k: f64, s: f64, c: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (m, q) in self.iter() {
            if !m.is_jet_free() {
                return Err(Error::JetsPresent);
            }
            if (m.r < 0 && r == 0.0) || (m.s < 0 && s == 0.0) {
                return Err(Error::DivisionByZero(if m.r < 0 { "r" } else { "s" }));
            }
            let q = rational_to_f64(q);
            acc += q
                * k.powi(m.k as i32)
                * r.powi(m.r)
                * z.powi(m.z as i32)
                * s.powi(m.s)
                * c.powi(m.c as i32);
        }
        Ok(acc)
    }
}

fn monomial_exact(m: &Monomial, pt: &RationalPoint) -> Result<Rational> {
    if !m.is_jet_free() {
        return Err(Error::JetsPresent);
    }
    Ok(exact_pow(&pt.k, m.k as i64, "k")?
        * exact_pow(&pt.r, m.r as i64, "r")?
        * exact_pow(&pt.z, m.z as i64, "z")?
        * exact_pow(&pt.s, m.s as i64, "s")?
        * exact_pow(&pt.c, m.c as i64, "c")?)
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) mod serde_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<Rational>().map_err(serde::de::Error::custom)
    }
}
