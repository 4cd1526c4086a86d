use super::{poisson, Dims, MomentumIndex, PhasePoly, Var};
use crate::diffring::{jet_f, rat, sine_potential, CoeffExpr, Rational};

/// Which angular potential `F(psi)` the operators see.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Potential {
    /// Arbitrary F, represented by the jets `F_0, F_1, ...`.
    Jet,
    /// `F = k / s^2`.
    Specialized,
    /// Any other jet-free expression.
    Custom(CoeffExpr),
    /// `F = 0`, the geodesic case.
    Zero,
}

impl Potential {
    pub fn f(&self) -> CoeffExpr {
        match self {
            Potential::Jet => jet_f(0),
            Potential::Specialized => sine_potential(),
            Potential::Custom(f) => f.clone(),
            Potential::Zero => CoeffExpr::zero(),
        }
    }

    pub fn f_dot(&self, lambda: u32) -> CoeffExpr {
        match self {
            Potential::Jet => jet_f(1),
            other => other.f().d_psi(lambda),
        }
    }
}

/// Parameters of the operators `X_L` and `U = p_r + (mu/r) X_L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    pub mu: Rational,
    pub potential: Potential,
    pub lambda: u32,
}

impl OperatorSpec {
    pub fn new(mu: Rational, potential: Potential, lambda: u32) -> Self {
        assert!(lambda >= 1, "frequency must be positive");
        OperatorSpec {
            mu,
            potential,
            lambda,
        }
    }

    /// `mu = 1/lambda` with `F = k/s^2`.
    pub fn ladder(lambda: u32) -> Self {
        Self::new(rat(1, lambda as i64), Potential::Specialized, lambda)
    }

    /// `mu = 1/lambda` with `F = 0`.
    pub fn geodesic(lambda: u32) -> Self {
        Self::new(rat(1, lambda as i64), Potential::Zero, lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    U,
    XL,
}

/// `X_L f = p_psi df/dpsi - F' df/dp_psi`, the Hamiltonian vector field of
/// `L = p_psi^2/2 + F`.
pub fn apply_xl(f: &PhasePoly, spec: &OperatorSpec) -> PhasePoly {
    let lambda = spec.lambda;
    let mut out = f
        .partial(Var::Psi, lambda)
        .shift(MomentumIndex::new(0, 1, 0));
    let f_dot = spec.potential.f_dot(lambda);
    if !f_dot.is_zero() {
        out = &out - &f.partial(Var::Ppsi, lambda).mul_coeff(&f_dot);
    }
    out
}

/// `U f = p_r f + (mu/r) X_L f`.
pub fn apply_u(f: &PhasePoly, spec: &OperatorSpec) -> PhasePoly {
    let factor = CoeffExpr::r_pow(-1).scale(&spec.mu);
    let mut out = f.shift(MomentumIndex::new(1, 0, 0));
    out += &apply_xl(f, spec).mul_coeff(&factor);
    out
}

/// The Hamiltonian vector field of `h`, `X_h f = {f, h}`.
pub fn apply_xh(f: &PhasePoly, h: &PhasePoly, dims: Dims, lambda: u32) -> PhasePoly {
    poisson(f, h, dims, lambda)
}

pub fn op_power(f: &PhasePoly, spec: &OperatorSpec, n: u32, which: OperatorKind) -> PhasePoly {
    let mut acc = f.clone();
    for _ in 0..n {
        acc = match which {
            OperatorKind::U => apply_u(&acc, spec),
            OperatorKind::XL => apply_xl(&acc, spec),
        };
    }
    acc
}
