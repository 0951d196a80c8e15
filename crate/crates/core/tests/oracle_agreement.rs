use num_complex::Complex64;

use patmsts::closed_form::{antibunching_r, cross_correlation_g, mean_photons, normalization, sv_witness};
use patmsts::fock_oracle::{build_patmsts, oracle_expectation, oracle_husimi, oracle_wigner, Ladder, OracleConfig};
use patmsts::phase_space::{wigner, PhasePoint};
use patmsts::state_params::{p_function_tmsts, q_function_tmsts, DerivedParams, StateParams};

use Ladder::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

fn state(m: u32, n: u32, r: f64, nbar: f64) -> patmsts::fock_oracle::OracleState {
    build_patmsts(&StateParams::new(m, n, r, nbar).unwrap(), &OracleConfig::default()).unwrap()
}

#[test]
fn p_function_moments_match_oracle() {
    // exp[−u†Ku] with u = (α, β*), K = [[Ã₃, −Ã₂], [−Ã₂, Ã₃]]: normal-ordered
    // moments are Gaussian moments of K⁻¹.
    let (r, nbar) = (0.3, 0.5);
    let dp = DerivedParams::new(r, nbar);
    assert!(!dp.p_singular && dp.at3 > dp.at2.abs());
    let det = dp.at3 * dp.at3 - dp.at2 * dp.at2;
    // ∫P d²α d²β/π² = Ã₁ / det K.
    assert!((dp.at1 / det - 1.0).abs() < 1e-12, "P not normalized");
    let na = dp.at3 / det;
    let pair = dp.at2 / det;

    let st = state(0, 0, r, nbar);
    let e = |w: &[Ladder]| oracle_expectation(&st.rho, w).re;
    assert!(rel(e(&[Adag, A]), na) < 1e-10);
    assert!(rel(e(&[A, B]), pair) < 1e-10);
    assert!(rel(e(&[Adag, Adag, A, A]), 2.0 * na * na) < 1e-10);
    assert!(rel(e(&[Adag, Bdag, A, B]), na * na + pair * pair) < 1e-10);

    // The point value is the Gaussian itself.
    let (al, be) = (Complex64::new(0.2, 0.1), Complex64::new(0.0, -0.1));
    let expo = dp.at2 * 2.0 * (al * be).re - dp.at3 * (al.norm_sqr() + be.norm_sqr());
    assert!(rel(p_function_tmsts(&dp, al, be), dp.at1 * expo.exp()) < 1e-14);
}

#[test]
fn q_function_matches_oracle_and_integrates_to_one() {
    let (r, nbar) = (0.4, 0.3);
    let dp = DerivedParams::new(r, nbar);
    let st = state(0, 0, r, nbar);
    let cfg = OracleConfig::default();
    for pt in [
        PhasePoint::origin(),
        PhasePoint::new(Complex64::new(0.3, -0.2), Complex64::new(0.1, 0.4)),
        PhasePoint::new(Complex64::new(-0.7, 0.5), Complex64::new(0.6, 0.2)),
    ] {
        let o = oracle_husimi(&st.rho, &pt, &cfg).unwrap();
        let q = q_function_tmsts(&dp, pt.alpha, pt.beta);
        assert!(q >= 0.0);
        assert!(rel(q, o) < 1e-9, "{q} vs {o}");
    }

    let h = 0.25;
    let xs: Vec<f64> = (0..=40).map(|i| -5.0 + h * i as f64).collect();
    let mut total = 0.0;
    for &x1 in &xs {
        for &y1 in &xs {
            for &x2 in &xs {
                for &y2 in &xs {
                    total += q_function_tmsts(&dp, Complex64::new(x1, y1), Complex64::new(x2, y2));
                }
            }
        }
    }
    assert!((total * h.powi(4) - 1.0).abs() < 1e-3);
}

#[test]
fn observables_beyond_the_standard_grid() {
    for &(m, n, r, nbar) in &[
        (3u32, 1u32, 0.5, 0.1),
        (0, 3, 0.8, 0.5),
        (3, 3, 0.4, 0.05),
        (1, 2, 1.2, 0.0),
    ] {
        let st = state(m, n, r, nbar);
        let dp = DerivedParams::new(r, nbar);
        let e = |w: &[Ladder]| oracle_expectation(&st.rho, w).re;
        let (na, nb) = mean_photons(m, n, &dp).unwrap();
        assert!(rel(normalization(m, n, &dp).unwrap(), st.norm) < 1e-8);
        assert!(rel(na, e(&[Adag, A])) < 1e-8);
        assert!(rel(nb, e(&[Bdag, B])) < 1e-8);

        let g = e(&[Adag, Bdag, A, B]) / (e(&[Adag, A]) * e(&[Bdag, B])) - 1.0;
        assert!(rel(cross_correlation_g(m, n, &dp).unwrap(), g) < 1e-8);
        let rab = (e(&[Adag, Adag, A, A]) + e(&[Bdag, Bdag, B, B])) / (2.0 * e(&[Adag, A, Bdag, B])) - 1.0;
        assert!(rel(antibunching_r(m, n, &dp).unwrap(), rab) < 1e-8);
        let sv = (e(&[Adag, A]) - 0.5) * (e(&[Bdag, B]) - 0.5) - e(&[Adag, Bdag]) * e(&[A, B]);
        assert!(rel(sv_witness(m, n, &dp).unwrap(), sv) < 1e-8);
    }
}

#[test]
fn wigner_origin_doubly_added_thermal() {
    let st = state(1, 1, 0.3, 1.0);
    let o = oracle_wigner(&st.rho, &PhasePoint::origin(), &OracleConfig::default()).unwrap();
    let w = wigner(1, 1, &DerivedParams::new(0.3, 1.0), &PhasePoint::origin()).unwrap();
    assert!(rel(w, o) < 1e-6);
}

#[test]
fn pnd_completeness_at_low_squeezing() {
    // The order cap keeps closed-form entries at ma, nb <= 6, so only weakly
    // squeezed, nearly pure states have a tail below 1e-8 there.
    use patmsts::closed_form::pnd_patmsts;
    use patmsts::fock_oracle::oracle_pnd;
    for &(m, n) in &[(0u32, 0u32), (0, 1), (1, 1)] {
        for &nbar in &[0.0, 1e-3] {
            let r = 0.1;
            let dp = DerivedParams::new(r, nbar);
            let st = state(m, n, r, nbar);
            let (mut closed, mut oracle) = (0.0, 0.0);
            for ma in 0..=6 {
                for nb in 0..=6 {
                    closed += pnd_patmsts(ma, nb, m, n, &dp).unwrap();
                    oracle += oracle_pnd(&st.rho, ma as usize, nb as usize);
                }
            }
            assert!(1.0 - closed < 1e-8, "({m},{n}) nbar={nbar}: tail {}", 1.0 - closed);
            assert!((closed - oracle).abs() < 1e-12);
        }
    }
}

#[test]
fn wigner_assembly_is_real() {
    use patmsts::phase_space::WignerKernel;
    let pts = patmsts::cli::verify::sample_points(11, 100);
    for &(m, n, r, nbar) in &[(0u32, 1u32, 0.3, 0.2), (2, 1, 1.0, 1.0), (3, 3, 0.05, 0.0)] {
        let k = WignerKernel::new(m, n, &DerivedParams::new(r, nbar)).unwrap();
        for pt in &pts {
            let f = k.factor_source(pt).unwrap();
            assert!(f.im.abs() < 1e-12 * f.re.abs().max(1.0), "{f}");
        }
    }
}
