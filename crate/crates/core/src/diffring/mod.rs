//! The coefficient ring.
//!
//! Every coefficient that appears in front of a momentum monomial lives in
//!
//! ```text
//! Q[k][r, 1/r, z, s, 1/s, c] / (c^2 + s^2 - 1)  (x)  Q[F_0, F_1, ..., G_0, G_1, ...]
//! ```
//!
//! where `s = sin(lambda*psi + psi0)` and `c = cos(lambda*psi + psi0)`. The phase
//! `psi0` never appears here; it only matters when a coefficient is evaluated at a
//! floating-point angle. `F_d` and `G_d` are formal jets standing for the d-th
//! derivative of arbitrary functions F(psi), G(psi).
//!
//! Elements are kept in a unique normal form: `c` appears with exponent 0 or 1
//! (using `c^2 = 1 - s^2`), like monomials are merged and zero coefficients are
//! dropped. Two expressions are equal exactly when their term maps are equal.

mod derive;
mod eval;
mod serial;

pub use derive::{derivative_series, jet_f, jet_g, sine_potential, sine_potential_dot};
pub(crate) use eval::serde_rational;
pub use eval::{rational_to_f64, FloatCoords, RationalPoint};
pub(crate) use serial::join_signed;
pub use serial::TermRecord;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetKind {
    F,
    G,
}

/// The formal symbol for the `order`-th psi-derivative of F or G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub kind: JetKind,
    pub order: u32,
}

impl Jet {
    pub const fn f(order: u32) -> Self {
        Jet {
            kind: JetKind::F,
            order,
        }
    }

    pub const fn g(order: u32) -> Self {
        Jet {
            kind: JetKind::G,
            order,
        }
    }

    pub fn shifted(self) -> Self {
        Jet {
            order: self.order + 1,
            ..self
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            JetKind::F => "F",
            JetKind::G => "G",
        };
        write!(f, "{name}{}", self.order)
    }
}

/// A finite multiset of jets, stored sorted with positive multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jets(Vec<(Jet, u32)>);

impl Jets {
    pub fn new() -> Self {
        Jets(Vec::new())
    }

    pub fn single(jet: Jet) -> Self {
        Jets(vec![(jet, 1)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Jet, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn multiplicity(&self, jet: Jet) -> u32 {
        self.0
            .iter()
            .find(|(j, _)| *j == jet)
            .map_or(0, |(_, n)| *n)
    }

    pub fn insert(&mut self, jet: Jet, n: u32) {
        if n == 0 {
            return;
        }
        match self.0.binary_search_by(|(j, _)| j.cmp(&jet)) {
            Ok(pos) => self.0[pos].1 += n,
            Err(pos) => self.0.insert(pos, (jet, n)),
        }
    }

    /// Removes one copy of `jet`. Returns false if it was absent.
    pub fn remove_one(&mut self, jet: Jet) -> bool {
        match self.0.binary_search_by(|(j, _)| j.cmp(&jet)) {
            Ok(pos) => {
                if self.0[pos].1 == 1 {
                    self.0.remove(pos);
                } else {
                    self.0[pos].1 -= 1;
                }
                true
            }
            Err(_) => false,
        }
    }

    fn union(&self, other: &Jets) -> Jets {
        let mut out = self.clone();
        for (j, n) in other.iter() {
            out.insert(j, n);
        }
        out
    }
}

impl FromIterator<(Jet, u32)> for Jets {
    fn from_iter<T: IntoIterator<Item = (Jet, u32)>>(iter: T) -> Self {
        let mut jets = Jets::new();
        for (j, n) in iter {
            jets.insert(j, n);
        }
        jets
    }
}

/// Exponent key of a coefficient term. The derived order (k, r, z, s, c, jets)
/// is the canonical term order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub k: u32,
    pub r: i32,
    pub z: u32,
    pub s: i32,
    pub c: u32,
    pub jets: Jets,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn is_jet_free(&self) -> bool {
        self.jets.is_empty()
    }

    /// Exponent-wise product. The result may carry `c >= 2`.
    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            k: self.k + other.k,
            r: self.r + other.r,
            z: self.z + other.z,
            s: self.s + other.s,
            c: self.c + other.c,
            jets: if other.jets.is_empty() {
                self.jets.clone()
            } else {
                self.jets.union(&other.jets)
            },
        }
    }
}

/// A single raw term `q * k^k r^r z^z s^s c^c * jets`; `c` may exceed 1 before
/// canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTerm {
    pub q: Rational,
    pub mono: Monomial,
}

impl CoeffTerm {
    pub fn new(q: Rational, mono: Monomial) -> Self {
        CoeffTerm { q, mono }
    }
}

/// Canonical element of the coefficient ring.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct CoeffExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl CoeffExpr {
    pub fn zero() -> Self {
        CoeffExpr::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Self::term(q, Monomial::one())
    }

    pub fn term(q: Rational, mono: Monomial) -> Self {
        let mut e = CoeffExpr::zero();
        e.push(q, mono);
        e
    }

    /// Builds the canonical form of a raw term list.
    pub fn canonicalize<I: IntoIterator<Item = CoeffTerm>>(terms: I) -> Self {
        let mut e = CoeffExpr::zero();
        for t in terms {
            e.push(t.q, t.mono);
        }
        e
    }

    pub fn k() -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                k: 1,
                ..Monomial::one()
            },
        )
    }

    pub fn r_pow(e: i32) -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                r: e,
                ..Monomial::one()
            },
        )
    }

    pub fn z_pow(e: u32) -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                z: e,
                ..Monomial::one()
            },
        )
    }

    pub fn s_pow(e: i32) -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                s: e,
                ..Monomial::one()
            },
        )
    }

    pub fn c() -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                c: 1,
                ..Monomial::one()
            },
        )
    }

    pub fn jet(jet: Jet) -> Self {
        Self::term(
            Rational::one(),
            Monomial {
                jets: Jets::single(jet),
                ..Monomial::one()
            },
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_jet_free(&self) -> bool {
        self.terms.keys().all(Monomial::is_jet_free)
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Option<&Rational> {
        self.terms.get(mono)
    }

    pub fn to_terms(&self) -> Vec<CoeffTerm> {
        self.terms
            .iter()
            .map(|(m, q)| CoeffTerm::new(q.clone(), m.clone()))
            .collect()
    }

    /// If the expression is a bare rational constant, return it.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, q) = self.terms.iter().next()?;
                (*m == Monomial::one()).then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, rho: &Rational) -> Self {
        if rho.is_zero() {
            return CoeffExpr::zero();
        }
        CoeffExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, q)| (m.clone(), q * rho))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = CoeffExpr::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Maps each term to `sign * term`, used for substitutions that only flip signs.
    pub(crate) fn map_signs(&self, sign: impl Fn(&Monomial) -> bool) -> Self {
        CoeffExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, q)| (m.clone(), if sign(m) { -q } else { q.clone() }))
                .collect(),
        }
    }

    /// Adds `q * mono`, reducing `c^2 -> 1 - s^2` first.
    pub(crate) fn push(&mut self, q: Rational, mono: Monomial) {
        if q.is_zero() {
            return;
        }
        if mono.c <= 1 {
            self.merge(q, mono);
            return;
        }
        // c^(2j+e) = (1 - s^2)^j c^e
        let j = mono.c / 2;
        let e = mono.c % 2;
        for i in 0..=j {
            let b = Rational::from_integer(binomial(j as u64, i as u64));
            let term_q = if i % 2 == 1 { -(&q * b) } else { &q * b };
            let m = Monomial {
                s: mono.s + 2 * i as i32,
                c: e,
                ..mono.clone()
            };
            self.merge(term_q, m);
        }
    }

    fn merge(&mut self, q: Rational, mono: Monomial) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(q);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn mul_ref(&self, other: &CoeffExpr) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                out.push(qa * qb, ma.times(mb));
            }
        }
        out
    }
}

impl fmt::Debug for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffExpr({self})")
    }
}

impl AddAssign<&CoeffExpr> for CoeffExpr {
    fn add_assign(&mut self, rhs: &CoeffExpr) {
        for (m, q) in &rhs.terms {
            self.merge(q.clone(), m.clone());
        }
    }
}

impl Add<&CoeffExpr> for &CoeffExpr {
    type Output = CoeffExpr;
    fn add(self, rhs: &CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for CoeffExpr {
    type Output = CoeffExpr;
    fn add(mut self, rhs: CoeffExpr) -> CoeffExpr {
        self += &rhs;
        self
    }
}

impl Neg for &CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        CoeffExpr {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q)).collect(),
        }
    }
}

impl Neg for CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        -&self
    }
}

impl Sub<&CoeffExpr> for &CoeffExpr {
    type Output = CoeffExpr;
    fn sub(self, rhs: &CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.merge(-q, m.clone());
        }
        out
    }
}

impl Sub for CoeffExpr {
    type Output = CoeffExpr;
    fn sub(self, rhs: CoeffExpr) -> CoeffExpr {
        &self - &rhs
    }
}

impl Mul<&CoeffExpr> for &CoeffExpr {
    type Output = CoeffExpr;
    fn mul(self, rhs: &CoeffExpr) -> CoeffExpr {
        self.mul_ref(rhs)
    }
}

impl Mul for CoeffExpr {
    type Output = CoeffExpr;
    fn mul(self, rhs: CoeffExpr) -> CoeffExpr {
        self.mul_ref(&rhs)
    }
}

impl From<Rational> for CoeffExpr {
    fn from(q: Rational) -> Self {
        CoeffExpr::constant(q)
    }
}

impl From<i64> for CoeffExpr {
    fn from(n: i64) -> Self {
        CoeffExpr::constant(int(n))
    }
}
