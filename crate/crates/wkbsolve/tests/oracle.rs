//! Tests for the reference oracles: the Airy closed form, the brute-force
//! Taylor integrator, and the sup-error measurement joining them to the
//! asymptotic solver.
//!
//! Frozen decimal constants were generated independently with mpmath at
//! 60-digit working precision.

mod common;

use common::*;
use rug::Float;
use wkbsolve::expr::Expr;
use wkbsolve::oracle::{
    airy_analytic, airy_initial_data, airy_pair, gamma_spouge, integrate_ivp, sup_error,
    OracleMethod, OracleSolution,
};
use wkbsolve::scalar::Scalar;
use wkbsolve::wkb::{IVProblem, PhaseTable, WKBSolution};
use wkbsolve::{Error, Precision};

/// (t, Ai, Bi, Ai', Bi') reference table.
const AIRY_TABLE: &[(&str, &str, &str, &str, &str)] = &[
    (
        "0",
        "0.3550280538878172392600631860041831763979791741991772406",
        "0.6149266274460007351509223690936135535947281886485965050",
        "-0.2588194037928067984051835601892039634790911383549345822",
        "0.4482883573538263579148237103988283908662267992122620611",
    ),
    (
        "-1",
        "0.5355608832923521187995165656388747074669308976836170028",
        "0.1039973894969446118886899909785991446370181113925239724",
        "-0.01016056711664520939504546984535756184189039546667066411",
        "0.5923756264227923508167792291816009732767958833673629058",
    ),
    (
        "-2.5",
        "-0.1123250676929660891874631001401957860150955656417713049",
        "-0.4324224718407052930284195036923072291236576121023132101",
        "0.6788527342647943633721400308225204240732031686087425616",
        "-0.2204201548746295876833984275336894859415891427040407305",
    ),
    (
        "-13",
        "0.1715104393705370446315817461080986020027307437740874875",
        "0.2426132290926271993334156622778173579596717733008580752",
        "-0.8715196778799533667224616334909309171997986829153308315",
        "0.6230972488192877335370886575704740377208308507536155588",
    ),
    (
        "-27",
        "0.01672340939880968049730298852292087985438478084388698438",
        "0.2469384691240761020540917837615761819905844403379443032",
        "-1.282985269701006420643222159570753627088080387213154947",
        "0.08918443240350289916771159787371740648768551107397260438",
    ),
    (
        "-40",
        "-0.04593392343795724963226071787657242219698079047042425176",
        "0.2195886242840424235780506258213226994199901524810025298",
        "-1.389090875260718380975816950141478798528844348743451470",
        "-0.2891399402820919350561230295008428398347711386503821755",
    ),
];

const INV_PI: &str = "0.3183098861837906715377675267450287240689192914809128975";

fn ugrid(prec: Precision, lo: i64, hi: i64, points: usize) -> Vec<Float> {
    uniform_grid(prec, &prec.real_from_i64(lo), &prec.real_from_i64(hi), points)
}

fn linear_problem(prec: Precision, eps: &Float) -> IVProblem {
    let lo = prec.real_from_i64(1);
    let hi = prec.real_from_i64(2);
    let (phi0, phi1) = airy_initial_data(&lo, eps, prec).unwrap();
    IVProblem::new(
        Expr::parse("x").unwrap(),
        &lo,
        &hi,
        eps,
        phi0,
        phi1,
        257,
        prec,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Airy function values
// ---------------------------------------------------------------------------

#[test]
fn airy_pair_matches_reference_table() {
    let prec = p50();
    let tol = prec.pow10(-45);
    for (t_text, ai_text, bi_text, aip_text, bip_text) in AIRY_TABLE {
        let t = real(prec, t_text);
        let (ai, bi, aip, bip) = airy_pair(&t, prec).unwrap();
        assert_close_real(&format!("Ai({t_text})"), &ai, &real(prec, ai_text), &tol);
        assert_close_real(&format!("Bi({t_text})"), &bi, &real(prec, bi_text), &tol);
        assert_close_real(&format!("Ai'({t_text})"), &aip, &real(prec, aip_text), &tol);
        assert_close_real(&format!("Bi'({t_text})"), &bip, &real(prec, bip_text), &tol);
    }
}

#[test]
fn airy_wronskian_is_reciprocal_pi() {
    let prec = p50();
    let want = real(prec, INV_PI);
    let tol = prec.pow10(-44);
    for t_text in ["0", "-1", "-2.5", "-13", "-27", "-40"] {
        let t = real(prec, t_text);
        let (ai, bi, aip, bip) = airy_pair(&t, prec).unwrap();
        let w = Float::with_val(prec.bits(), &ai * &bip) - Float::with_val(prec.bits(), &aip * &bi);
        assert_close_real(&format!("W({t_text})"), &w, &want, &tol);
    }
}

#[test]
fn airy_pair_rejects_out_of_range_arguments() {
    let prec = p34();
    for t_text in ["0.5", "1e-20", "-40.0001", "-100"] {
        let t = real(prec, t_text);
        assert!(
            matches!(airy_pair(&t, prec), Err(Error::AiryOutOfRange { .. })),
            "t = {t_text} must be rejected"
        );
    }
}

#[test]
fn gamma_matches_reference_values() {
    let prec = p50();
    let tol = prec.pow10(-45);
    let cases = [
        (
            "0.5",
            "1.772453850905516027298167483341145182797549456122387128",
        ),
        (
            "0.33333333333333333333333333333333333333333333333333333333333",
            "2.678938534707747633655692940974677644128689377957301101",
        ),
        (
            "0.66666666666666666666666666666666666666666666666666666666667",
            "1.354117939426400416945288028154513785519327266056793698",
        ),
    ];
    for (z_text, want) in cases {
        let z = real(prec, z_text);
        let got = gamma_spouge(&z, prec.bits());
        assert_close_real(&format!("gamma({z_text})"), &got, &real(prec, want), &tol);
    }
}

// ---------------------------------------------------------------------------
// Analytic oracle for a(x) = x
// ---------------------------------------------------------------------------

#[test]
fn airy_initial_data_matches_frozen_values() {
    let prec = p50();
    let eps = real(prec, "0.1");
    let (phi0, phi1) = airy_initial_data(&prec.real_from_i64(1), &eps, prec).unwrap();
    let tol = prec.pow10(-44);
    let want0 = scalar(
        prec,
        "0.351913571284755999313057344737838698102556016708",
        "0.153882708278890142004636488092272234805102559758",
    );
    let want1 = scalar(
        prec,
        "0.145395252057974631997222274633720254412975662564",
        "-0.356259480754448365091742945237140476129950829130",
    );
    assert_close_scalar("phi0", &phi0, &want0, &tol);
    assert_close_scalar("phi1", &phi1, &want1, &tol);
}

#[test]
fn airy_analytic_matches_frozen_samples() {
    let prec = p50();
    let eps = real(prec, "0.1");
    let problem = linear_problem(prec, &eps);
    let xs = vec![real(prec, "1.5"), real(prec, "2")];
    let sol = airy_analytic(&problem, &xs).unwrap();
    assert_eq!(sol.method(), OracleMethod::AiryAnalytic);

    let tol = prec.pow10(-44);
    let phi_15 = scalar(
        prec,
        "0.154415462369714317351708133236120849463461051006",
        "0.311022495644107418528467750626027902727853924580",
    );
    let phi_20 = scalar(
        prec,
        "0.229202795870044635968209861850622773359926312318",
        "0.227855696346994832704247963479658439009709192215",
    );
    let dphi_20 = scalar(
        prec,
        "0.319437578573615824574801612900994529284418645955",
        "-0.327049629320998676495118046377612071528575947924",
    );
    assert_close_scalar("phi(1.5)", &sol.phi()[0], &phi_15, &tol);
    assert_close_scalar("phi(2)", &sol.phi()[1], &phi_20, &tol);
    assert_close_scalar("eps phi'(2)", &sol.eps_dphi()[1], &dphi_20, &tol);
}

#[test]
fn airy_analytic_reproduces_its_own_data() {
    let prec = p50();
    let eps = real(prec, "0.05");
    let problem = linear_problem(prec, &eps);
    let xs = vec![problem.lo().clone()];
    let sol = airy_analytic(&problem, &xs).unwrap();
    let tol = prec.pow10(-44);
    assert_close_scalar("phi at lo", &sol.phi()[0], problem.phi0(), &tol);
    assert_close_scalar("eps phi' at lo", &sol.eps_dphi()[0], problem.phi1(), &tol);
}

#[test]
fn airy_analytic_requires_the_literal_variable_coefficient() {
    let prec = p34();
    let eps = real(prec, "0.1");
    // 2*x is admissible for the solver but has no Airy closed form here.
    let problem = IVProblem::new(
        Expr::parse("2*x").unwrap(),
        &prec.real_from_i64(1),
        &prec.real_from_i64(2),
        &eps,
        Scalar::one(prec),
        scalar(prec, "0", "-1"),
        257,
        prec,
    )
    .unwrap();
    let xs = vec![real(prec, "1.5")];
    assert!(matches!(
        airy_analytic(&problem, &xs),
        Err(Error::Unsupported { .. })
    ));
}

// ---------------------------------------------------------------------------
// Brute-force integrator
// ---------------------------------------------------------------------------

#[test]
fn integrator_reproduces_plane_wave() {
    let prec = p34();
    let eps = real(prec, "0.1");
    let problem = IVProblem::new(
        Expr::parse("1").unwrap(),
        &prec.real_from_i64(0),
        &prec.real_from_i64(1),
        &eps,
        Scalar::one(prec),
        scalar(prec, "0", "-1"),
        257,
        prec,
    )
    .unwrap();
    let xs = ugrid(prec, 0, 1, 9);
    let tol = real(prec, "1e-25");
    let sol = integrate_ivp(&problem, &tol, &xs).unwrap();
    assert_eq!(sol.method(), OracleMethod::BruteForceOde);
    assert!(sol.tol() <= &tol, "achieved tolerance must meet the request");

    let check = real(prec, "2e-25");
    for (x, (phi, dphi)) in xs.iter().zip(sol.phi().iter().zip(sol.eps_dphi())) {
        let arg = -Float::with_val(prec.bits(), x / &eps);
        let want = Scalar::new(arg.clone().cos(), arg.sin());
        assert_close_scalar(&format!("phi at {x}"), phi, &want, &check);
        assert_close_scalar(&format!("eps phi' at {x}"), dphi, &want.mul_neg_i(), &check);
    }
}

#[test]
fn oracles_agree_on_the_linear_problem() {
    let prec = p50();
    let eps = real(prec, "0.05");
    let problem = linear_problem(prec, &eps);
    let xs = ugrid(prec, 1, 2, 9);
    let tol = real(prec, "1e-25");
    let analytic = airy_analytic(&problem, &xs).unwrap();
    let brute = integrate_ivp(&problem, &tol, &xs).unwrap();
    let bound = real(prec, "1e-25");
    for i in 0..xs.len() {
        let d_phi = (&analytic.phi()[i] - &brute.phi()[i]).abs();
        let d_dphi = (&analytic.eps_dphi()[i] - &brute.eps_dphi()[i]).abs();
        assert!(
            d_phi <= bound && d_dphi <= bound,
            "oracle disagreement at grid point {i}: |dphi| = {:e}, |ddphi| = {:e}",
            d_phi.to_f64(),
            d_dphi.to_f64()
        );
    }
}

#[test]
fn integrator_preserves_the_wronskian() {
    let prec = p34();
    let eps = real(prec, "0.1");
    let lo = prec.real_from_i64(0);
    let hi = prec.real_from_i64(3);
    let a = || Expr::parse("2+sin(x)").unwrap();
    let mk = |phi0: Scalar, phi1: Scalar| {
        IVProblem::new(a(), &lo, &hi, &eps, phi0, phi1, 257, prec).unwrap()
    };
    let pu = mk(Scalar::one(prec), Scalar::zero(prec));
    let pv = mk(Scalar::zero(prec), Scalar::one(prec));
    let xs = ugrid(prec, 0, 3, 7);
    let tol = real(prec, "1e-20");
    let su = integrate_ivp(&pu, &tol, &xs).unwrap();
    let sv = integrate_ivp(&pv, &tol, &xs).unwrap();

    // W = phi_u (eps phi_v') - (eps phi_u') phi_v is a first integral of the
    // scaled equation; the data make W(0) = 1.
    let one = Scalar::one(prec);
    let bound = real(prec, "1e-17");
    for i in 0..xs.len() {
        let mut w = &su.phi()[i] * &sv.eps_dphi()[i];
        w -= &(&su.eps_dphi()[i] * &sv.phi()[i]);
        assert_close_scalar(&format!("W at grid point {i}"), &w, &one, &bound);
    }
}

#[test]
fn integrator_guards_scope_and_tolerance() {
    let prec = p34();
    let lo = prec.real_from_i64(1);
    let hi = prec.real_from_i64(2);
    let mk = |eps_text: &str| {
        IVProblem::new(
            Expr::parse("x").unwrap(),
            &lo,
            &hi,
            &real(prec, eps_text),
            Scalar::one(prec),
            scalar(prec, "0", "-1"),
            257,
            prec,
        )
        .unwrap()
    };
    let xs = ugrid(prec, 1, 2, 3);
    let tol = real(prec, "1e-20");

    // Epsilon below the cost guard.
    assert!(matches!(
        integrate_ivp(&mk("5e-5"), &tol, &xs),
        Err(Error::Unsupported { .. })
    ));

    // Tolerance below the 10^(8-P) floor.
    let problem = mk("0.1");
    assert!(matches!(
        integrate_ivp(&problem, &real(prec, "1e-30"), &xs),
        Err(Error::Unsupported { .. })
    ));

    // Grid defects.
    assert!(matches!(
        integrate_ivp(&problem, &tol, &[]),
        Err(Error::GridMismatch { .. })
    ));
    let outside = vec![real(prec, "0.5")];
    assert!(matches!(
        integrate_ivp(&problem, &tol, &outside),
        Err(Error::GridMismatch { .. })
    ));
    let descending = vec![real(prec, "1.5"), real(prec, "1.25")];
    assert!(matches!(
        integrate_ivp(&problem, &tol, &descending),
        Err(Error::GridMismatch { .. })
    ));
}

// ---------------------------------------------------------------------------
// Sup-error measurement
// ---------------------------------------------------------------------------

#[test]
fn sup_error_basics() {
    let prec = p34();
    let eps = real(prec, "0.1");
    let problem = linear_problem(prec, &eps);
    let xs = ugrid(prec, 1, 2, 5);
    let oracle = airy_analytic(&problem, &xs).unwrap();

    // Identical samples: zero error.
    let zero = sup_error(oracle.phi(), &oracle).unwrap();
    assert!(zero.is_zero(), "self-comparison must be exactly zero");

    // A constant complex offset c shifts the sup-error to exactly |c|.
    let c = scalar(prec, "3e-4", "-4e-4");
    let shifted: Vec<Scalar> = oracle.phi().iter().map(|p| p + &c).collect();
    let got = sup_error(&shifted, &oracle).unwrap();
    assert_close_real("offset error", &got, &real(prec, "5e-4"), &prec.pow10(-30));

    // Mismatched grids are refused.
    assert!(matches!(
        sup_error(&shifted[..4], &oracle),
        Err(Error::GridMismatch { .. })
    ));
}

#[test]
fn sup_error_decreases_with_truncation_order() {
    let prec = p34();
    let eps = real(prec, "0.1");
    let problem = linear_problem(prec, &eps);
    let table = PhaseTable::build(
        problem.a(),
        problem.lo(),
        problem.hi(),
        3,
        32,
        prec,
    )
    .unwrap();
    let xs = ugrid(prec, 1, 2, 17);
    let oracle = airy_analytic(&problem, &xs).unwrap();

    let approx = |n: usize| -> Vec<Scalar> {
        let sol = WKBSolution::new(&table, &problem, n).unwrap();
        xs.iter().map(|x| sol.evaluate(x).unwrap()).collect()
    };
    let e1 = sup_error(&approx(1), &oracle).unwrap();
    let e3 = sup_error(&approx(3), &oracle).unwrap();
    assert!(
        e3 < e1,
        "N=3 error {:e} must beat N=1 error {:e}",
        e3.to_f64(),
        e1.to_f64()
    );
}

#[test]
fn sup_error_stable_under_grid_refinement() {
    let prec = p50();
    let eps = real(prec, "0.1");
    let problem = linear_problem(prec, &eps);
    let table = PhaseTable::build(
        problem.a(),
        problem.lo(),
        problem.hi(),
        5,
        64,
        prec,
    )
    .unwrap();

    let measure = |points: usize| -> Float {
        let g = wkbsolve::cheb::ChebGrid::new(problem.lo(), problem.hi(), points - 1, prec)
            .unwrap();
        let mut xs = g.nodes().to_vec();
        xs.reverse();
        let oracle = airy_analytic(&problem, &xs).unwrap();
        let sol = WKBSolution::new(&table, &problem, 5).unwrap();
        let approx: Vec<Scalar> = xs.iter().map(|x| sol.evaluate(x).unwrap()).collect();
        sup_error(&approx, &oracle).unwrap()
    };

    // 33- and 65-point Chebyshev grids nest, so the finer measurement can
    // only grow — and for a smooth error profile by no more than ~10%.
    let coarse = measure(33);
    let fine = measure(65);
    let lower = Float::with_val(prec.bits(), &coarse * 999999u32) / 1000000u32;
    let upper = Float::with_val(prec.bits(), &coarse * 11u32) / 10u32;
    assert!(
        fine >= lower && fine <= upper,
        "sup-error moved too much under refinement: {:e} -> {:e}",
        coarse.to_f64(),
        fine.to_f64()
    );
}

#[test]
fn oracle_solution_validates_lengths() {
    let prec = p34();
    let xs = ugrid(prec, 0, 1, 3);
    let phi = vec![Scalar::one(prec); 3];
    let dphi = vec![Scalar::one(prec); 2];
    assert!(matches!(
        OracleSolution::from_parts(xs, phi, dphi, prec.pow10(-20), OracleMethod::BruteForceOde),
        Err(Error::LengthMismatch { .. })
    ));
}
