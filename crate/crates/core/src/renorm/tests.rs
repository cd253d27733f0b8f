use super::*;
use crate::profile::profile;
use crate::testutil::fixed_ball;

fn cfg(d: u32) -> RenormConfig {
    RenormConfig::from_profile(&profile(d).unwrap())
}

#[test]
fn fixed_point_is_reproduced() {
    for d in [2, 3, 4] {
        let c = cfg(d);
        let center = fixed_ball(d).center();
        let img = apply_r(&center, &c).unwrap();
        let diff: f64 = img.coeffs.iter().zip(&center).map(|(a, b)| (a - b).abs()).sum();
        assert!(diff <= 1e-11, "d={d}: {diff:e}");
        assert!(img.tail_l1 <= 1e-10, "d={d}: tail {:e}", img.tail_l1);
    }
}

#[test]
fn image_constant_term_is_one() {
    // R(G)(0) = alpha G(rho^-d) = alpha g(1) = 1 for any G
    let c = cfg(2);
    let mut seed = vec![0.0; c.truncation + 1];
    seed[0] = 1.0;
    seed[1] = -1.5;
    let img = apply_r(&seed, &c).unwrap();
    assert!((img.coeffs[0] - 1.0).abs() < 1e-14, "{}", img.coeffs[0]);
}

#[test]
fn quadratic_fixed_point_constants() {
    let r = newton_fixpoint(&cfg(2)).unwrap();
    assert!((r.alpha + 2.5).abs() < 0.01, "{}", r.alpha);
    assert!((r.alpha + 2.502_907_875_095_892_8).abs() < 1e-12, "{}", r.alpha);
    assert!(r.tail_l1 <= 1e-12, "{:e}", r.tail_l1);
    assert!(r.residual_l1 <= 1e-11);
    let ball = fixed_ball(2);
    let gg1 = ball.eval(ball.eval(Interval::ONE).unwrap()).unwrap();
    assert!((gg1.midpoint() - 0.76).abs() < 0.005, "{gg1}");
}

#[test]
fn every_degree_converges() {
    // alpha for d = 3, 4 from long-precision literature values
    let known = [(2, -2.502_907_875_095_89), (3, -1.927_690_96), (4, -1.690_302_97)];
    for (d, alpha) in known {
        let r = newton_fixpoint(&cfg(d)).unwrap();
        assert!(r.residual_l1 <= 1e-11, "d={d}: {:e}", r.residual_l1);
        assert!((r.alpha - alpha).abs() < 1e-7, "d={d}: {}", r.alpha);
        let ball = fixed_ball(d);
        assert!(ball.provenance().assumed_rigorous, "d={d}");
        let k = alpha_of(ball).unwrap();
        assert!(k.alpha.hi() < -1.0);
        let gg1 = ball.eval(ball.eval(Interval::ONE).unwrap()).unwrap();
        assert!(gg1.lo() > 0.0 && gg1.hi() < 1.0, "d={d}: {gg1}");
    }
}

#[test]
fn perturbed_center_has_large_residual() {
    let c = cfg(2);
    let mut center = fixed_ball(2).center();
    center[1] += 1e-3;
    let img = apply_r(&center, &c).unwrap();
    let diff: f64 = img.coeffs.iter().zip(&center).skip(1).map(|(a, b)| (a - b).abs()).sum();
    assert!(diff >= 1e-4, "{diff:e}");
}

#[test]
fn newton_is_deterministic() {
    let a = newton_fixpoint(&cfg(3)).unwrap();
    let b = newton_fixpoint(&cfg(3)).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.coeffs), bits(&b.coeffs));
    assert_eq!(a.history, b.history);
}

#[test]
fn convergence_is_quadratic() {
    let r = newton_fixpoint(&cfg(2)).unwrap();
    let h = &r.history;
    let mut checked = 0;
    for w in h.windows(2) {
        // only steps well above the rounding floor say anything
        if w[0] < 1e-2 && w[0] > 1e-7 {
            assert!(w[1] <= 10.0 * w[0] * w[0], "{h:?}");
            checked += 1;
        }
    }
    assert!(checked >= 1, "{h:?}");
}

#[test]
fn inner_argument_keeps_its_sign() {
    for d in [2, 3, 4] {
        let c = cfg(d);
        let img = apply_r(&fixed_ball(d).center(), &c).unwrap();
        assert!(img.inner_u_scale > 0.0, "d={d}");
    }
    // the plain even-degree scale would flip the sign for odd degree
    let alpha = -1.93;
    assert!((1.0 / alpha as f64).powi(3) < 0.0);
    assert!(inner_scale(alpha, 3).powi(3) > 0.0);
}

#[test]
fn bad_configuration_is_rejected() {
    let mut c = cfg(2);
    c.truncation = 4;
    assert!(matches!(newton_fixpoint(&c), Err(Error::Config(_))));
    let c = cfg(2);
    assert!(matches!(apply_r(&[1.0, -1.5], &c), Err(Error::Config(_))));
}

#[test]
fn exhausted_iterations_report_best_iterate() {
    let mut c = cfg(2);
    c.max_iters = 1;
    match newton_fixpoint(&c) {
        Err(Error::NoConvergence { best_residual, best, .. }) => {
            assert!(best_residual.is_finite());
            assert_eq!(best.len(), c.truncation + 1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn divergent_seed_is_caught() {
    let mut c = cfg(2);
    c.seed = vec![1.0, 40.0];
    assert!(newton_fixpoint(&c).is_err());
}
