//! Exact checks: conservation, proportionality, Jacobian rank at rational
//! points, the independence minor, and the perturbation suite showing that the
//! ladder construction fails once any of its conditions is broken.

pub mod linalg;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diffring::{int, rat, sine_potential, CoeffExpr, Rational, RationalPoint};
use crate::diffring::{Jet, Jets, Monomial};
use crate::error::{Error, Result};
use crate::integrals::{
    build_formulaccia, build_h, build_h0, build_h1, build_h2, build_h3, build_h4, build_i, build_l,
    hamiltonian, ladder, ModelParams,
};
use crate::phasepoly::{
    apply_u, apply_xh, op_power, poisson, Dims, MomentumIndex, OperatorKind, OperatorSpec,
    PhasePoly, Potential, Var,
};

/// Exact decision: `{h, q}` is the zero polynomial.
pub fn is_conserved(h: &PhasePoly, q: &PhasePoly, dims: Dims, lambda: u32) -> bool {
    poisson(h, q, dims, lambda).is_zero()
}

/// The rational `rho` with `a = rho * b`, if one exists.
pub fn proportionality(a: &PhasePoly, b: &PhasePoly) -> Option<Rational> {
    let (idx, b_coeff) = b.iter().next()?;
    let (mono, b_q) = b_coeff.iter().next()?;
    let a_q = a.coefficient(*idx).coefficient(mono)?.clone();
    let rho = a_q / b_q;
    (*a == b.scale(&rho)).then_some(rho)
}

pub fn jacobian(fs: &[PhasePoly], vars: &[Var], lambda: u32) -> Vec<Vec<PhasePoly>> {
    fs.iter()
        .map(|f| vars.iter().map(|&v| f.partial(v, lambda)).collect())
        .collect()
}

/// `(p_r, p_psi, r, psi)` for the planar functions, `(p_r, p_psi, p_z, r, psi, z)` in space.
pub fn phase_vars(dims: Dims) -> &'static [Var] {
    match dims {
        Dims::Two => &[Var::Pr, Var::Ppsi, Var::R, Var::Psi],
        Dims::Three => &[Var::Pr, Var::Ppsi, Var::Pz, Var::R, Var::Psi, Var::Z],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub functions: Vec<String>,
    pub point: RationalPoint,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

pub fn evaluate_matrix(m: &[Vec<PhasePoly>], pt: &RationalPoint) -> Result<Vec<Vec<Rational>>> {
    m.iter()
        .map(|row| row.iter().map(|e| e.eval_exact(pt)).collect())
        .collect()
}

pub fn rank_at(
    names: &[&str],
    fs: &[PhasePoly],
    vars: &[Var],
    pt: &RationalPoint,
    lambda: u32,
) -> Result<RankReport> {
    let jac = jacobian(fs, vars, lambda);
    rank_of_jacobian(names, &jac, pt)
}

fn rank_of_jacobian(
    names: &[&str],
    jac: &[Vec<PhasePoly>],
    pt: &RationalPoint,
) -> Result<RankReport> {
    let values = evaluate_matrix(jac, pt)?;
    Ok(RankReport {
        functions: names.iter().map(|s| s.to_string()).collect(),
        point: pt.clone(),
        rows: jac.len(),
        cols: jac.first().map_or(0, Vec::len),
        rank: linalg::rank(&values),
    })
}

/// Rational trigonometric pairs used for exact points.
pub const PYTHAGOREAN_PAIRS: [(i64, i64, i64); 3] = [(3, 4, 5), (5, 12, 13), (8, 15, 17)];

fn nonzero_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    loop {
        let n = rng.gen_range(-max_num..=max_num);
        if n != 0 {
            return rat(n, rng.gen_range(1..=max_den));
        }
    }
}

/// Deterministic admissible exact points: `r > 0`, all momenta, `z` and `k`
/// nonzero, `(s, c)` drawn from [`PYTHAGOREAN_PAIRS`].
pub fn sample_points(seed: u64, count: usize) -> Vec<RationalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (a, b, h) = PYTHAGOREAN_PAIRS[rng.gen_range(0..PYTHAGOREAN_PAIRS.len())];
            let r = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
            let k = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
            RationalPoint::new(
                r,
                nonzero_rational(&mut rng, 5, 4),
                nonzero_rational(&mut rng, 5, 4),
                nonzero_rational(&mut rng, 5, 4),
                nonzero_rational(&mut rng, 5, 4),
                k,
                rat(a, h),
                rat(b, h),
            )
            .expect("sampled points are admissible")
        })
        .collect()
}

/// One family of functions, its expected generic rank and its rank at each point.
#[derive(Clone, Debug, Serialize)]
pub struct RankCheck {
    pub label: String,
    pub expected: usize,
    pub reports: Vec<RankReport>,
}

impl RankCheck {
    pub fn passed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.rank == self.expected)
    }
}

fn run_rank_check(
    label: &str,
    names: &[&str],
    fs: &[PhasePoly],
    dims: Dims,
    expected: usize,
    points: &[RationalPoint],
    lambda: u32,
) -> Result<RankCheck> {
    let jac = jacobian(fs, phase_vars(dims), lambda);
    let reports = points
        .iter()
        .map(|pt| rank_of_jacobian(names, &jac, pt))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankCheck {
        label: label.into(),
        expected,
        reports,
    })
}

/// The rank families for frequency `lambda`: the quadratic set `H0..H4`
/// (rank 4), the set `H0..H3, I` (rank 5), the planar set `H, L, I` (rank 3) and,
/// for odd `lambda`, the older set `H0, H1, H2, H4` with the double-sum integral.
pub fn rank_suite(lambda: u32, points: &[RationalPoint]) -> Result<Vec<RankCheck>> {
    let p = ModelParams::new(lambda as i64)?;
    let i3 = build_i(&p).with_dims(Dims::Three);
    let quad = [
        build_h0(&p),
        build_h1(),
        build_h2(&p),
        build_h3(&p),
        build_h4(&p),
    ];
    let mut checks = vec![
        run_rank_check(
            "H0..H4",
            &["H0", "H1", "H2", "H3", "H4"],
            &quad,
            Dims::Three,
            4,
            points,
            lambda,
        )?,
        run_rank_check(
            "H0,H1,H2,H3,I",
            &["H0", "H1", "H2", "H3", "I"],
            &[
                quad[0].clone(),
                quad[1].clone(),
                quad[2].clone(),
                quad[3].clone(),
                i3,
            ],
            Dims::Three,
            5,
            points,
            lambda,
        )?,
        run_rank_check(
            "H,L,I",
            &["H", "L", "I"],
            &[build_h(&p), build_l(&p), build_i(&p)],
            Dims::Two,
            3,
            points,
            lambda,
        )?,
    ];
    if lambda % 2 == 1 {
        let old = build_formulaccia((lambda - 1) / 2).with_dims(Dims::Three);
        checks.push(run_rank_check(
            "H0,H1,H2,H4,double-sum",
            &["H0", "H1", "H2", "H4", "D"],
            &[
                quad[0].clone(),
                quad[1].clone(),
                quad[2].clone(),
                quad[4].clone(),
                old,
            ],
            Dims::Three,
            5,
            points,
            lambda,
        )?);
    }
    Ok(checks)
}

/// `p_psi (p_r dI/dr + (2L/r^3) dI/dp_r)`: the minor of the Jacobian of
/// `(H, L, I)` in `(p_r, p_psi, r)`.
pub fn independence_minor(i: &PhasePoly, l: &PhasePoly, lambda: u32) -> PhasePoly {
    let radial = i.partial(Var::R, lambda).shift(MomentumIndex::new(1, 0, 0));
    let two_l_r3 = l.mul_coeff(&CoeffExpr::r_pow(-3).scale(&int(2)));
    let push = &two_l_r3 * &i.partial(Var::Pr, lambda);
    (&radial + &push).shift(MomentumIndex::new(0, 1, 0))
}

pub fn ladder_minor(lambda: u32) -> Result<PhasePoly> {
    let p = ModelParams::new(lambda as i64)?;
    Ok(independence_minor(&build_i(&p), &build_l(&p), lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrokenCondition {
    /// All conditions hold; the residual must vanish.
    None,
    /// `lambda mu = 1` fails.
    Frequency,
    /// `mu G'' + lambda G = 0` fails.
    GEquation,
    /// `2 lambda F G - mu F' G' = 0` fails.
    FEquation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbationCase {
    pub broken: BrokenCondition,
    pub lambda: u32,
    #[serde(with = "crate::diffring::serde_rational")]
    pub mu: Rational,
    pub f: CoeffExpr,
    pub g: CoeffExpr,
    pub residual_is_zero: bool,
    pub residual: PhasePoly,
}

impl PerturbationCase {
    /// Nonzero residual exactly when a condition is claimed broken.
    pub fn consistent(&self) -> bool {
        self.residual_is_zero == (self.broken == BrokenCondition::None)
    }
}

/// `{H_F, U^lambda G}` with `U = p_r + (mu/r) X_L`.
pub fn ladder_residual(lambda: u32, mu: &Rational, f: &CoeffExpr, g: &CoeffExpr) -> PhasePoly {
    let potential = Potential::Custom(f.clone());
    let spec = OperatorSpec::new(mu.clone(), potential.clone(), lambda);
    let h = hamiltonian(&potential, Dims::Two);
    let q = ladder(&PhasePoly::constant(g.clone(), Dims::Two), &spec, lambda);
    poisson(&h, &q, Dims::Two, lambda)
}

/// The control case plus one case per broken condition.
pub fn only_if_suite(lambda: u32) -> Result<Vec<PerturbationCase>> {
    if lambda < 2 {
        return Err(Error::InvalidLambda(lambda as i64));
    }
    let mu = rat(1, lambda as i64);
    let f = sine_potential();
    let c = CoeffExpr::c();
    let sc = &CoeffExpr::s_pow(1) * &c;
    let f_bad = &CoeffExpr::k() * &CoeffExpr::s_pow(-1);
    let cases = [
        (BrokenCondition::None, mu.clone(), f.clone(), c.clone()),
        (
            BrokenCondition::Frequency,
            Rational::one(),
            f.clone(),
            c.clone(),
        ),
        (BrokenCondition::GEquation, mu.clone(), f.clone(), sc),
        (BrokenCondition::FEquation, mu, f_bad, c),
    ];
    Ok(cases
        .into_iter()
        .map(|(broken, mu, f, g)| {
            let residual = ladder_residual(lambda, &mu, &f, &g);
            PerturbationCase {
                broken,
                lambda,
                mu,
                f,
                g,
                residual_is_zero: residual.is_zero(),
                residual,
            }
        })
        .collect())
}

/// Parity of `I` under `h` shifts `psi -> psi + pi/lambda`: returns `(h, sign)`
/// with `sign = Some(+-1)` when `shift^h(I) = sign * I`.
pub fn shift_parities(lambda: u32, h_max: u32) -> Result<Vec<(u32, Option<i32>)>> {
    let p = ModelParams::new(lambda as i64)?;
    let i = build_i(&p);
    let mut shifted = i.clone();
    let mut out = Vec::with_capacity(h_max as usize);
    for h in 1..=h_max {
        shifted = shifted.reflect()?;
        let sign = if shifted == i {
            Some(1)
        } else if shifted == -&i {
            Some(-1)
        } else {
            None
        };
        out.push((h, sign));
    }
    Ok(out)
}

/// `H` and `L` are invariant under the shift.
pub fn hamiltonian_is_shift_invariant(lambda: u32) -> Result<bool> {
    let p = ModelParams::new(lambda as i64)?;
    let (h, l) = (build_h(&p), build_l(&p));
    Ok(h.reflect()? == h && l.reflect()? == l)
}

/// `A B^n f - n B^(n-1) [A, B] f - B^n A f` with `A = X_h` and `B = U`. Zero
/// whenever `[A, B]` commutes with `B`.
pub fn commutator_power_residual(
    f: &PhasePoly,
    h: &PhasePoly,
    spec: &OperatorSpec,
    n: u32,
) -> PhasePoly {
    assert!(n >= 1);
    let dims = f.dims().max(h.dims());
    let a = |g: &PhasePoly| apply_xh(g, h, dims, spec.lambda);
    let b_pow = |g: &PhasePoly, m: u32| op_power(g, spec, m, OperatorKind::U);
    let comm = &a(&apply_u(f, spec)) - &apply_u(&a(f), spec);
    let lhs = a(&b_pow(f, n));
    let rhs = &b_pow(&comm, n - 1).scale(&int(n as i64)) + &b_pow(&a(f), n);
    &lhs - &rhs
}

/// The second-order operator `X_L^2` written out:
/// `p^2 f_psipsi - F' f_psi + F'^2 f_pp - p (F'' f_p + 2 F' f_psip)` with `p = p_psi`.
pub fn xl_squared_expanded(f: &PhasePoly, spec: &OperatorSpec) -> PhasePoly {
    let lam = spec.lambda;
    let f1 = spec.potential.f_dot(lam);
    let f2 = f1.d_psi(lam);
    let d_psi = f.partial(Var::Psi, lam);
    let d_p = f.partial(Var::Ppsi, lam);
    let p2 = MomentumIndex::new(0, 2, 0);
    let p1 = MomentumIndex::new(0, 1, 0);
    let mut out = d_psi.partial(Var::Psi, lam).shift(p2);
    out = &out - &d_psi.mul_coeff(&f1);
    out += &d_p.partial(Var::Ppsi, lam).mul_coeff(&(&f1 * &f1));
    let inner = &d_p.mul_coeff(&f2) + &d_psi.partial(Var::Ppsi, lam).mul_coeff(&f1.scale(&int(2)));
    &out - &inner.shift(p1)
}

/// A random polynomial of total momentum degree at most `max_degree` with up
/// to `max_terms` momentum monomials, each carrying a one- or two-term
/// coefficient. Planar polynomials have no `p_z`.
pub fn random_poly(
    rng: &mut impl Rng,
    max_degree: u32,
    max_terms: usize,
    with_jets: bool,
    dims: Dims,
) -> PhasePoly {
    let mut out = PhasePoly::zero(dims);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let pz = if dims == Dims::Three {
            rng.gen_range(0..=max_degree)
        } else {
            0
        };
        let pr = rng.gen_range(0..=max_degree - pz);
        let ppsi = rng.gen_range(0..=max_degree - pz - pr);
        let mut coeff = CoeffExpr::zero();
        for _ in 0..rng.gen_range(1..=2) {
            coeff = &coeff + &random_term(rng, with_jets);
        }
        out.add_term(MomentumIndex::new(pr, ppsi, pz), coeff);
    }
    out
}

fn random_term(rng: &mut impl Rng, with_jets: bool) -> CoeffExpr {
    let mut jets = Jets::new();
    if with_jets {
        for _ in 0..rng.gen_range(0..=2) {
            let order = rng.gen_range(0..=2);
            jets.insert(
                if rng.gen_bool(0.5) {
                    Jet::f(order)
                } else {
                    Jet::g(order)
                },
                1,
            );
        }
    }
    let mono = Monomial {
        k: rng.gen_range(0..=1),
        r: rng.gen_range(-2..=1),
        z: 0,
        s: rng.gen_range(-2..=2),
        c: rng.gen_range(0..=1),
        jets,
    };
    let mut q = rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
    if rng.gen_bool(0.5) {
        q = -q;
    }
    CoeffExpr::term(q, mono)
}

/// A seeded generator for [`random_poly`].
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests;
