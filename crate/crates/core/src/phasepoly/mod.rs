//! Polynomials in the momenta `(p_r, p_psi, p_z)` with coefficients in the
//! coefficient ring, the canonical Poisson bracket, and the first-order operators
//! built from it.

mod ops;
mod serial;

pub use ops::{apply_u, apply_xh, apply_xl, op_power, OperatorKind, OperatorSpec, Potential};
pub use serial::{MonomialRecord, PolyRecord};

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::diffring::{int, CoeffExpr, FloatCoords, Rational, RationalPoint};
use crate::error::{Error, Result};

/// Number of degrees of freedom: the plane `(r, psi)` or the space `(r, psi, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dims {
    Two,
    Three,
}

impl From<Dims> for u8 {
    fn from(d: Dims) -> u8 {
        match d {
            Dims::Two => 2,
            Dims::Three => 3,
        }
    }
}

impl TryFrom<u8> for Dims {
    type Error = String;
    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            2 => Ok(Dims::Two),
            3 => Ok(Dims::Three),
            n => Err(format!("dims must be 2 or 3, got {n}")),
        }
    }
}

/// Exponents of `p_r^pr p_psi^ppsi p_z^pz`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentumIndex {
    pub pr: u32,
    pub ppsi: u32,
    pub pz: u32,
}

impl MomentumIndex {
    pub const fn new(pr: u32, ppsi: u32, pz: u32) -> Self {
        MomentumIndex { pr, ppsi, pz }
    }

    pub fn degree(&self) -> u32 {
        self.pr + self.ppsi + self.pz
    }

    fn plus(self, o: MomentumIndex) -> MomentumIndex {
        MomentumIndex::new(self.pr + o.pr, self.ppsi + o.ppsi, self.pz + o.pz)
    }
}

/// Phase-space coordinates a polynomial can be differentiated by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    R,
    Psi,
    Z,
    Pr,
    Ppsi,
    Pz,
}

impl Var {
    /// Momentum conjugate to a position variable.
    pub fn conjugate(self) -> Var {
        match self {
            Var::R => Var::Pr,
            Var::Psi => Var::Ppsi,
            Var::Z => Var::Pz,
            Var::Pr => Var::R,
            Var::Ppsi => Var::Psi,
            Var::Pz => Var::Z,
        }
    }

    pub fn positions(dims: Dims) -> &'static [Var] {
        match dims {
            Dims::Two => &[Var::R, Var::Psi],
            Dims::Three => &[Var::R, Var::Psi, Var::Z],
        }
    }
}

/// A polynomial in the momenta. Equality compares the terms only; `dims` is the
/// ambient dimension used for serialization and default brackets.
#[derive(Clone, Debug)]
pub struct PhasePoly {
    dims: Dims,
    terms: BTreeMap<MomentumIndex, CoeffExpr>,
}

impl PartialEq for PhasePoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for PhasePoly {}

impl std::hash::Hash for PhasePoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl PhasePoly {
    pub fn zero(dims: Dims) -> Self {
        PhasePoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(coeff: CoeffExpr, dims: Dims) -> Self {
        Self::monomial(MomentumIndex::default(), coeff, dims)
    }

    pub fn monomial(idx: MomentumIndex, coeff: CoeffExpr, dims: Dims) -> Self {
        let mut p = PhasePoly::zero(dims);
        p.add_term(idx, coeff);
        p
    }

    pub fn p_r(dims: Dims) -> Self {
        Self::monomial(MomentumIndex::new(1, 0, 0), CoeffExpr::one(), dims)
    }

    pub fn p_psi(dims: Dims) -> Self {
        Self::monomial(MomentumIndex::new(0, 1, 0), CoeffExpr::one(), dims)
    }

    pub fn p_z() -> Self {
        Self::monomial(MomentumIndex::new(0, 0, 1), CoeffExpr::one(), Dims::Three)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Same polynomial tagged with another ambient dimension. Embedding into 3D
    /// is always valid; projecting to 2D is only meaningful for z-free input.
    pub fn with_dims(mut self, dims: Dims) -> Self {
        self.dims = dims;
        self
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

    /// Terms in ascending `(pr, ppsi, pz)` order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&MomentumIndex, &CoeffExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: MomentumIndex) -> CoeffExpr {
        self.terms.get(&idx).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MomentumIndex::degree).max()
    }

    pub fn degree_in_pr(&self) -> Option<u32> {
        self.terms.keys().map(|i| i.pr).max()
    }

    /// The homogeneous part of highest total momentum degree.
    pub fn top_degree_part(&self) -> PhasePoly {
        let Some(d) = self.degree() else {
            return self.clone();
        };
        PhasePoly {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.degree() == d)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    pub fn is_jet_free(&self) -> bool {
        self.terms.values().all(CoeffExpr::is_jet_free)
    }

    pub fn add_term(&mut self, idx: MomentumIndex, coeff: CoeffExpr) {
        use std::collections::btree_map::Entry;
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&CoeffExpr) -> CoeffExpr) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dims);
        for (i, c) in &self.terms {
            out.add_term(*i, f(c));
        }
        out
    }

    pub fn scale(&self, rho: &Rational) -> PhasePoly {
        self.map_coeffs(|c| c.scale(rho))
    }

    pub fn mul_coeff(&self, e: &CoeffExpr) -> PhasePoly {
        self.map_coeffs(|c| c * e)
    }

    /// Multiplies by the momentum monomial `idx`.
    pub fn shift(&self, idx: MomentumIndex) -> PhasePoly {
        PhasePoly {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.plus(idx), c.clone()))
                .collect(),
        }
    }

    pub fn partial(&self, var: Var, lambda: u32) -> PhasePoly {
        match var {
            Var::R => self.map_coeffs(CoeffExpr::d_r),
            Var::Psi => self.map_coeffs(|c| c.d_psi(lambda)),
            Var::Z => self.map_coeffs(CoeffExpr::d_z),
            Var::Pr | Var::Ppsi | Var::Pz => {
                let mut out = PhasePoly::zero(self.dims);
                for (i, c) in &self.terms {
                    let (e, lowered) = match var {
                        Var::Pr => (
                            i.pr,
                            MomentumIndex {
                                pr: i.pr.wrapping_sub(1),
                                ..*i
                            },
                        ),
                        Var::Ppsi => (
                            i.ppsi,
                            MomentumIndex {
                                ppsi: i.ppsi.wrapping_sub(1),
                                ..*i
                            },
                        ),
                        _ => (
                            i.pz,
                            MomentumIndex {
                                pz: i.pz.wrapping_sub(1),
                                ..*i
                            },
                        ),
                    };
                    if e > 0 {
                        out.add_term(lowered, c.scale(&int(e as i64)));
                    }
                }
                out
            }
        }
    }

    pub fn specialize_jets(&self, lambda: u32) -> PhasePoly {
        self.map_coeffs(|c| c.specialize_jets(lambda))
    }

    /// The shift `psi -> psi + pi/lambda`, i.e. `(s, c) -> (-s, -c)`.
    pub fn reflect(&self) -> Result<PhasePoly> {
        if !self.is_jet_free() {
            return Err(Error::JetsPresent);
        }
        Ok(self.map_coeffs(CoeffExpr::reflect))
    }

    pub fn eval_exact(&self, pt: &RationalPoint) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (i, c) in &self.terms {
            let m = num_traits::Pow::pow(&pt.p_r, i.pr)
                * num_traits::Pow::pow(&pt.p_psi, i.ppsi)
                * num_traits::Pow::pow(&pt.p_z, i.pz);
            acc += c.eval_exact(pt)? * m;
        }
        Ok(acc)
    }

    pub fn eval_float(&self, at: &FloatCoords, lambda: u32, psi0: f64) -> Result<f64> {
        let (s, c) = (lambda as f64 * at.psi + psi0).sin_cos();
        let mut acc = 0.0;
        for (i, coeff) in &self.terms {
            let m =
                at.p_r.powi(i.pr as i32) * at.p_psi.powi(i.ppsi as i32) * at.p_z.powi(i.pz as i32);
            acc += coeff.eval_float_sc(at.r, at.z, at.k, s, c)? * m;
        }
        Ok(acc)
    }

    fn mul_ref(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dims.max(other.dims));
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                out.add_term(ia.plus(*ib), ca * cb);
            }
        }
        out
    }
}

/// `{a, b} = sum over conjugate pairs of da/dq db/dp - da/dp db/dq`.
pub fn poisson(a: &PhasePoly, b: &PhasePoly, dims: Dims, lambda: u32) -> PhasePoly {
    let mut out = PhasePoly::zero(dims.max(a.dims).max(b.dims));
    for &q in Var::positions(dims) {
        let p = q.conjugate();
        let da_q = a.partial(q, lambda);
        let db_p = b.partial(p, lambda);
        if !da_q.is_zero() && !db_p.is_zero() {
            out += &(&da_q * &db_p);
        }
        let da_p = a.partial(p, lambda);
        let db_q = b.partial(q, lambda);
        if !da_p.is_zero() && !db_q.is_zero() {
            out = &out - &(&da_p * &db_q);
        }
    }
    out
}

impl AddAssign<&PhasePoly> for PhasePoly {
    fn add_assign(&mut self, rhs: &PhasePoly) {
        self.dims = self.dims.max(rhs.dims);
        for (i, c) in &rhs.terms {
            self.add_term(*i, c.clone());
        }
    }
}

impl Add<&PhasePoly> for &PhasePoly {
    type Output = PhasePoly;
    fn add(self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for PhasePoly {
    type Output = PhasePoly;
    fn add(mut self, rhs: PhasePoly) -> PhasePoly {
        self += &rhs;
        self
    }
}

impl Neg for &PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        PhasePoly {
            dims: self.dims,
            terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }
}

impl Neg for PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        -&self
    }
}

impl Sub<&PhasePoly> for &PhasePoly {
    type Output = PhasePoly;
    fn sub(self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        out.dims = out.dims.max(rhs.dims);
        for (i, c) in &rhs.terms {
            out.add_term(*i, -c);
        }
        out
    }
}

impl Sub for PhasePoly {
    type Output = PhasePoly;
    fn sub(self, rhs: PhasePoly) -> PhasePoly {
        &self - &rhs
    }
}

impl Mul<&PhasePoly> for &PhasePoly {
    type Output = PhasePoly;
    fn mul(self, rhs: &PhasePoly) -> PhasePoly {
        self.mul_ref(rhs)
    }
}

impl Mul for PhasePoly {
    type Output = PhasePoly;
    fn mul(self, rhs: PhasePoly) -> PhasePoly {
        self.mul_ref(&rhs)
    }
}
