//! Builders for the Hamiltonians and their first integrals.
//!
//! The planar Hamiltonian is `H = p_r^2/2 + (p_psi^2/2 + F)/r^2` with angular
//! part `L = p_psi^2/2 + F`. Its 3D lift `H0 = H + p_z^2/2` carries four
//! quadratic integrals `H1..H4` for every F. For `F = k/sin^2(lambda psi + psi0)`
//! the degree-`lambda` integral is `I = U^lambda cos(lambda psi + psi0)` with
//! `U = p_r + X_L/(lambda r)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::diffring::{binomial, int, rat, CoeffExpr, Rational};
use crate::error::{Error, Result};
use crate::phasepoly::{
    op_power, Dims, MomentumIndex, OperatorKind, OperatorSpec, PhasePoly, Potential,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FMode {
    Jet,
    Specialized,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub lambda: u32,
    pub mu: Rational,
    pub f_mode: FMode,
    pub dims: Dims,
}

impl ModelParams {
    /// `mu = 1/lambda`, `F = k/s^2`, planar.
    pub fn new(lambda: i64) -> Result<Self> {
        let lambda = check_lambda(lambda)?;
        Ok(ModelParams {
            lambda,
            mu: rat(1, lambda as i64),
            f_mode: FMode::Specialized,
            dims: Dims::Two,
        })
    }

    pub fn with_mode(mut self, f_mode: FMode) -> Self {
        self.f_mode = f_mode;
        self
    }

    pub fn with_dims(mut self, dims: Dims) -> Self {
        self.dims = dims;
        self
    }

    pub fn with_mu(mut self, mu: Rational) -> Self {
        self.mu = mu;
        self
    }

    pub fn potential(&self) -> Potential {
        match self.f_mode {
            FMode::Jet => Potential::Jet,
            FMode::Specialized => Potential::Specialized,
            FMode::Zero => Potential::Zero,
        }
    }

    pub fn operator(&self) -> OperatorSpec {
        OperatorSpec::new(self.mu.clone(), self.potential(), self.lambda)
    }
}

pub fn check_lambda(lambda: i64) -> Result<u32> {
    if lambda < 1 || lambda > u32::MAX as i64 {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(lambda as u32)
}

fn half() -> Rational {
    rat(1, 2)
}

fn mono(pr: u32, ppsi: u32, pz: u32, c: CoeffExpr, dims: Dims) -> PhasePoly {
    PhasePoly::monomial(MomentumIndex::new(pr, ppsi, pz), c, dims)
}

/// `p_r^2/2 + (p_psi^2/2 + F)/r^2` for an arbitrary potential.
pub fn hamiltonian(potential: &Potential, dims: Dims) -> PhasePoly {
    let inv_r2 = CoeffExpr::r_pow(-2);
    let mut h = mono(2, 0, 0, CoeffExpr::constant(half()), dims);
    h += &mono(0, 2, 0, inv_r2.scale(&half()), dims);
    h += &PhasePoly::constant(&potential.f() * &inv_r2, dims);
    h
}

/// `p_psi^2/2 + F`.
pub fn angular(potential: &Potential, dims: Dims) -> PhasePoly {
    let mut l = mono(0, 2, 0, CoeffExpr::constant(half()), dims);
    l += &PhasePoly::constant(potential.f(), dims);
    l
}

pub fn build_h(params: &ModelParams) -> PhasePoly {
    hamiltonian(&params.potential(), params.dims)
}

pub fn build_l(params: &ModelParams) -> PhasePoly {
    angular(&params.potential(), params.dims)
}

/// The geodesic part `(p_r^2 + p_psi^2/r^2)/2`.
pub fn build_hg() -> PhasePoly {
    hamiltonian(&Potential::Zero, Dims::Two)
}

pub fn build_h0(params: &ModelParams) -> PhasePoly {
    &hamiltonian(&params.potential(), Dims::Three) + &build_h1()
}

pub fn build_h1() -> PhasePoly {
    mono(0, 0, 2, CoeffExpr::constant(half()), Dims::Three)
}

pub fn build_h2(params: &ModelParams) -> PhasePoly {
    angular(&params.potential(), Dims::Three)
}

/// `[(r p_z - z p_r)^2 + (1 + z^2/r^2) p_psi^2]/2 + (1 + z^2/r^2) F`.
pub fn build_h3(params: &ModelParams) -> PhasePoly {
    let d = Dims::Three;
    let r = CoeffExpr::r_pow(1);
    let z = CoeffExpr::z_pow(1);
    let lever = &mono(0, 0, 1, r, d) - &mono(1, 0, 0, z, d);
    let w = &CoeffExpr::one() + &(&CoeffExpr::z_pow(2) * &CoeffExpr::r_pow(-2));
    let mut h3 = (&lever * &lever).scale(&half());
    h3 += &mono(0, 2, 0, w.scale(&half()), d);
    h3 += &PhasePoly::constant(&w * &params.potential().f(), d);
    h3
}

/// `(z p_r^2 + (z/r^2) p_psi^2 - r p_r p_z)/2 + (z/r^2) F`.
pub fn build_h4(params: &ModelParams) -> PhasePoly {
    let d = Dims::Three;
    let z = CoeffExpr::z_pow(1);
    let z_r2 = &z * &CoeffExpr::r_pow(-2);
    let mut h4 = mono(2, 0, 0, z.scale(&half()), d);
    h4 += &mono(0, 2, 0, z_r2.scale(&half()), d);
    h4 += &mono(1, 0, 1, CoeffExpr::r_pow(1).scale(&rat(-1, 2)), d);
    h4 += &PhasePoly::constant(&z_r2 * &params.potential().f(), d);
    h4
}

/// `U^n g` for any seed `g` and operator parameters.
pub fn ladder(g: &PhasePoly, spec: &OperatorSpec, n: u32) -> PhasePoly {
    op_power(g, spec, n, OperatorKind::U)
}

/// `I = U^lambda c` with `mu = 1/lambda` and `F = k/s^2`.
pub fn build_i(params: &ModelParams) -> PhasePoly {
    let seed = PhasePoly::constant(CoeffExpr::c(), params.dims);
    ladder(&seed, &OperatorSpec::ladder(params.lambda), params.lambda)
}

/// `X_L^nu I`.
pub fn build_xl_power(params: &ModelParams, nu: u32) -> PhasePoly {
    let spec = OperatorSpec::ladder(params.lambda);
    op_power(&build_i(params), &spec, nu, OperatorKind::XL)
}

/// `(p_r + p_psi/(lambda r) d/dpsi)^lambda c`, the integral of the geodesic flow.
pub fn build_geodesic(lambda: u32) -> PhasePoly {
    assert!(lambda >= 1, "frequency must be positive");
    let seed = PhasePoly::constant(CoeffExpr::c(), Dims::Two);
    ladder(&seed, &OperatorSpec::geodesic(lambda), lambda)
}

/// The older double-sum expression for odd frequency `lambda = 2n + 1`, with
/// `F = k/sin^2(lambda psi)`.
pub fn build_formulaccia(n: u32) -> PhasePoly {
    let lambda = 2 * n + 1;
    let minus_two_f = crate::diffring::sine_potential().scale(&int(-2));
    // (1/lambda d/dpsi)^j c cycles through c, -s, -c, s
    let mut cycle = vec![CoeffExpr::c()];
    for j in 0..lambda as usize {
        let next = cycle[j].d_psi(lambda).scale(&rat(1, lambda as i64));
        cycle.push(next);
    }

    let mut out = PhasePoly::zero(Dims::Two);
    for sigma in 0..=n {
        let l = 2 * sigma + 1;
        let weight = minus_two_f.pow(n - sigma);
        for i in 0..=l {
            let b = binomial(lambda as u64, i as u64)
                * binomial(((lambda - i) / 2) as u64, ((l - i) / 2) as u64);
            if b.is_zero() {
                continue;
            }
            let coeff =
                &(&weight * &cycle[(l - i) as usize]) * &CoeffExpr::r_pow(i as i32 - lambda as i32);
            let coeff = coeff.scale(&Rational::from_integer(b));
            out.add_term(MomentumIndex::new(i, l - i, 0), coeff);
        }
    }
    out
}

/// The named functions of one model, all evaluated with `F = k/s^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralSet {
    #[serde(flatten)]
    pub named: BTreeMap<String, PhasePoly>,
}

impl IntegralSet {
    pub fn build(lambda: u32) -> Self {
        let params = ModelParams {
            lambda,
            mu: rat(1, lambda as i64),
            f_mode: FMode::Specialized,
            dims: Dims::Two,
        };
        let mut named = BTreeMap::new();
        named.insert("H0".into(), build_h0(&params));
        named.insert("H1".into(), build_h1());
        named.insert("H2".into(), build_h2(&params));
        named.insert("H3".into(), build_h3(&params));
        named.insert("H4".into(), build_h4(&params));
        named.insert("I".into(), build_i(&params));
        named.insert("L".into(), build_l(&params));
        named.insert("H".into(), build_h(&params));
        named.insert("Hg".into(), build_hg());
        IntegralSet { named }
    }

    pub fn get(&self, name: &str) -> Option<&PhasePoly> {
        self.named.get(name)
    }
}
