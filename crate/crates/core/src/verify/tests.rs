use super::*;
use crate::diffring::Monomial;
use crate::integrals::{build_hg, FMode};
use rand::Rng;

fn params(lambda: u32) -> ModelParams {
    ModelParams::new(lambda as i64).unwrap()
}

#[test]
fn conservation_decisions() {
    let p = params(2);
    let h = build_h(&p);
    assert!(is_conserved(&h, &build_i(&p), Dims::Two, 2));
    assert!(!is_conserved(&h, &PhasePoly::p_r(Dims::Two), Dims::Two, 2));
    let jp = params(1).with_mode(FMode::Jet);
    assert!(is_conserved(&build_h0(&jp), &build_h4(&jp), Dims::Three, 1));
}

#[test]
fn radial_momentum_bracket_has_the_angular_term() {
    // {H, p_r} = dH/dr = -r^-3 (p_psi^2 + 2F) = -2L/r^3
    let p = params(3);
    let got = poisson(&build_h(&p), &PhasePoly::p_r(Dims::Two), Dims::Two, 3);
    let expected = build_l(&p).mul_coeff(&CoeffExpr::r_pow(-3).scale(&int(-2)));
    assert_eq!(got, expected);
}

#[test]
fn proportionality_examples() {
    let i1 = build_i(&params(1));
    let i2 = build_i(&params(2));
    assert_eq!(proportionality(&build_formulaccia(0), &i1), Some(int(1)));
    assert_eq!(proportionality(&i2.scale(&int(2)), &i2), Some(int(2)));
    assert_eq!(proportionality(&i2, &i1), None);
    assert_eq!(proportionality(&i2, &PhasePoly::zero(Dims::Two)), None);
    assert_eq!(proportionality(&PhasePoly::zero(Dims::Two), &i2), None);
    let mut tweaked = i2.clone();
    tweaked.add_term(MomentumIndex::default(), CoeffExpr::one());
    assert_eq!(proportionality(&tweaked, &i2), None);
}

#[test]
fn proportionality_inverts() {
    let a = build_i(&params(3)).scale(&rat(-7, 3));
    let b = build_i(&params(3));
    let rho = proportionality(&a, &b).unwrap();
    assert_eq!(proportionality(&b, &a), Some(Rational::one() / rho));
}

#[test]
fn jacobian_entries() {
    let p = params(2);
    let l = build_l(&p);
    let row = &jacobian(std::slice::from_ref(&l), &[Var::Ppsi, Var::Psi], 2)[0];
    assert_eq!(row[0], PhasePoly::p_psi(Dims::Two));
    assert_eq!(
        row[1],
        PhasePoly::constant(sine_potential().d_psi(2), Dims::Two)
    );

    let h = build_h(&p);
    assert_eq!(
        jacobian(&[h], &[Var::Pr], 2)[0][0],
        PhasePoly::p_r(Dims::Two)
    );

    let i1 = build_i(&params(1));
    let d_r = &jacobian(&[i1], &[Var::R], 1)[0][0];
    let expected = PhasePoly::monomial(
        MomentumIndex::new(0, 1, 0),
        &CoeffExpr::s_pow(1) * &CoeffExpr::r_pow(-2),
        Dims::Two,
    );
    assert_eq!(*d_r, expected);
}

#[test]
fn ranks_at_sampled_points() {
    let points = sample_points(7, 4);
    for lambda in 1..=3 {
        for check in rank_suite(lambda, &points).unwrap() {
            assert!(
                check.passed(),
                "lambda {lambda}: {} ranks {:?}",
                check.label,
                check.reports.iter().map(|r| r.rank).collect::<Vec<_>>()
            );
        }
    }
}

#[test]
fn rank_report_shape() {
    let pt = &sample_points(1, 1)[0];
    let p = params(2);
    let rep = rank_at(
        &["H", "L"],
        &[build_h(&p), build_l(&p)],
        phase_vars(Dims::Two),
        pt,
        2,
    )
    .unwrap();
    assert_eq!((rep.rows, rep.cols, rep.rank), (2, 4, 2));
    assert!(rep.rank <= rep.rows.min(rep.cols));
}

#[test]
fn rank_propagates_evaluation_errors() {
    let mut pt = sample_points(3, 1).remove(0);
    pt.s = int(0);
    pt.c = int(1);
    let err = rank_at(
        &["H"],
        &[build_h(&params(2))],
        phase_vars(Dims::Two),
        &pt,
        2,
    )
    .unwrap_err();
    assert_eq!(err, Error::DivisionByZero("s"));
}

#[test]
fn sample_points_are_deterministic() {
    assert_eq!(sample_points(42, 5), sample_points(42, 5));
    assert_ne!(sample_points(42, 5), sample_points(43, 5));
    for pt in sample_points(9, 20) {
        assert_eq!(&pt.s * &pt.s + &pt.c * &pt.c, Rational::one());
    }
}

#[test]
fn minor_matches_cofactor_expansion() {
    // Independent route: the 3x3 determinant of the (p_r, p_psi, r) columns.
    for lambda in 1..=3 {
        let p = params(lambda);
        let fs = [build_h(&p), build_l(&p), build_i(&p)];
        let j = jacobian(&fs, &[Var::Pr, Var::Ppsi, Var::R], lambda);
        let m = |a: usize, b: usize| &j[a][b];
        let det = &(&(m(0, 0) * &(&(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1))))
            - &(m(0, 1) * &(&(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0)))))
            + &(m(0, 2) * &(&(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0))));
        assert_eq!(ladder_minor(lambda).unwrap(), det);
    }
}

#[test]
fn minor_leading_term() {
    // coefficient of p_r^lambda p_psi^2 is -G'/r^2 = lambda s / r^2
    for lambda in 1..=4 {
        let minor = ladder_minor(lambda).unwrap();
        assert!(!minor.is_zero());
        let expected = CoeffExpr::term(
            int(lambda as i64),
            Monomial {
                s: 1,
                r: -2,
                ..Monomial::one()
            },
        );
        assert_eq!(
            minor.coefficient(MomentumIndex::new(lambda, 2, 0)),
            expected
        );
        assert!(minor
            .coefficient(MomentumIndex::new(lambda + 1, 1, 0))
            .is_zero());
    }
}

#[test]
fn minor_of_radially_constant_function_vanishes() {
    let l = build_l(&params(2));
    let f = PhasePoly::constant(CoeffExpr::c(), Dims::Two);
    assert!(independence_minor(&f, &l, 2).is_zero());
}

#[test]
fn perturbations() {
    for lambda in 2..=3 {
        let cases = only_if_suite(lambda).unwrap();
        assert_eq!(cases.len(), 4);
        for case in &cases {
            assert!(case.consistent(), "lambda {lambda}: {:?}", case.broken);
        }
        assert!(cases[0].residual_is_zero);
    }
    assert!(only_if_suite(1).is_err());
}

#[test]
fn shifts() {
    for lambda in 1..=3 {
        let parities = shift_parities(lambda, 2 * lambda).unwrap();
        for (h, sign) in parities {
            assert_eq!(sign, Some(if h % 2 == 0 { 1 } else { -1 }));
        }
        assert!(hamiltonian_is_shift_invariant(lambda).unwrap());
    }
}

#[test]
fn geodesic_bracket() {
    let g = crate::integrals::build_geodesic(3);
    assert!(is_conserved(&build_hg(), &g, Dims::Two, 3));
}

#[test]
fn report_json() {
    let cases = only_if_suite(2).unwrap();
    let v = serde_json::to_value(&cases[1]).unwrap();
    assert_eq!(v["broken"], "frequency");
    assert_eq!(v["mu"], "1");
    assert_eq!(v["residual_is_zero"], false);
    let pt = &sample_points(1, 1)[0];
    let p = params(1);
    let rep = rank_at(&["H"], &[build_h(&p)], phase_vars(Dims::Two), pt, 1).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["functions"][0], "H");
    assert!(v["point"]["s"].is_string());
}

#[test]
fn commutator_power_identity() {
    let h = hamiltonian(&Potential::Jet, Dims::Two);
    let mut rng = seeded_rng(10);
    let mut nontrivial = 0;
    for _ in 0..20 {
        let f = random_poly(&mut rng, 2, 3, true, Dims::Two);
        let mu = rat(rng.gen_range(-4..=4), rng.gen_range(1..=4));
        for lambda in [2, 3] {
            let spec = OperatorSpec::new(mu.clone(), Potential::Jet, lambda);
            assert!(
                commutator_power_residual(&f, &h, &spec, lambda).is_zero(),
                "f = {f}, mu = {mu}"
            );
            nontrivial += usize::from(!commutator_power_residual(&f, &h, &spec, 1).is_zero());
        }
    }
    // n = 1 is a tautology, so the residual there must vanish too
    assert_eq!(nontrivial, 0);
}

#[test]
fn commutator_identity_needs_a_commuting_bracket() {
    // With A the flow of p_psi^2/r, [A, U] does not commute with U.
    let h = PhasePoly::monomial(MomentumIndex::new(0, 2, 0), CoeffExpr::r_pow(-1), Dims::Two);
    let spec = OperatorSpec::new(rat(1, 2), Potential::Jet, 2);
    let mut rng = seeded_rng(13);
    let broken = (0..10)
        .map(|_| random_poly(&mut rng, 2, 3, true, Dims::Two))
        .filter(|f| !commutator_power_residual(f, &h, &spec, 2).is_zero())
        .count();
    assert!(broken > 0);
}

#[test]
fn xl_squared_expansion() {
    let mut rng = seeded_rng(11);
    for _ in 0..20 {
        let f = random_poly(&mut rng, 2, 3, true, Dims::Two);
        let spec = OperatorSpec::new(rat(1, 2), Potential::Jet, rng.gen_range(1..=4));
        let twice = op_power(&f, &spec, 2, OperatorKind::XL);
        assert_eq!(twice, xl_squared_expanded(&f, &spec), "f = {f}");
    }
}

#[test]
fn random_polys_respect_degree() {
    let mut rng = seeded_rng(12);
    for _ in 0..50 {
        let f = random_poly(&mut rng, 2, 4, false, Dims::Three);
        assert!(f.degree().unwrap_or(0) <= 2);
        assert!(f.is_jet_free());
    }
}
