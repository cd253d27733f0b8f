use super::*;
use crate::testutil::{center_derivs, fixed_ball, fixed_cert};

#[test]
fn quadratic_certificate_is_shallow() {
    let ball = fixed_ball(2);
    let cert = MonotonicityCertificate::build(ball, 8).unwrap();
    assert!(cert.gprime_negative && cert.gsecond_negative);
    assert!(cert.max_depth_used <= 8);
    assert_eq!(cert.degree_d, 2);
    cert.check(ball).unwrap();
}

#[test]
fn quartic_needs_a_fine_final_segment() {
    let ball = fixed_ball(4);
    match MonotonicityCertificate::build(ball, 6) {
        Err(Error::Inconclusive {
            subinterval,
            enclosure,
            depth,
        }) => {
            assert_eq!(depth, 6);
            assert!(enclosure.contains(0.0), "{enclosure}");
            assert!(subinterval.hi() > 0.99, "not the final segment: {subinterval}");
        }
        other => panic!("expected Inconclusive, got {other:?}"),
    }
    let cert = fixed_cert(4);
    assert!(cert.gsecond_negative);
    assert!(cert.max_depth_used > 6 && cert.max_depth_used <= 30);
    // the refinement is concentrated at the right end
    let finest = cert.cover.iter().max_by_key(|l| l.depth).unwrap();
    assert!(finest.subinterval.lo() > 0.98, "{:?}", finest);
}

#[test]
fn every_degree_certifies_at_profile_depth() {
    for d in [2, 3, 4] {
        let cert = fixed_cert(d);
        assert!(cert.gprime_negative && cert.gsecond_negative, "d={d}");
        assert!(cert.min_abs_gprime > 0.0);
    }
}

#[test]
fn derivative_at_the_critical_point_is_not_signed() {
    let ball = fixed_ball(2);
    let k = Interval::new(-0.1, 0.1).unwrap();
    assert!(ball.eval_deriv(k).unwrap().contains(0.0));
    let k = Interval::new(0.0, 0.1).unwrap();
    assert!(matches!(
        verify_sign_on(Derivative::First, ball, k, 10),
        Err(Error::Inconclusive { .. })
    ));
    // g' > 0 on the negative side
    let neg = Interval::new(-0.5, -0.3).unwrap();
    assert!(matches!(
        verify_sign_on(Derivative::First, ball, neg, 10),
        Err(Error::PositiveSignWitness { .. })
    ));
}

#[test]
fn j_endpoints() {
    for (d, gg1) in [(2, 0.758_923_49), (3, 0.761_090_55), (4, 0.776_071_80)] {
        let j = compute_j(fixed_ball(d)).unwrap();
        assert_eq!(j.hi(), 1.0);
        assert!((j.lo() - gg1).abs() < 1e-7, "d={d}: {j}");
        let w = widened(j).unwrap();
        assert!(w.lo() < j.lo() && w.hi() > 1.0);
    }
}

#[test]
fn orbit_matches_scaling_relations() {
    for d in [2, 3, 4] {
        let ball = fixed_ball(d);
        let consts = alpha_of(ball).unwrap();
        let pts = orbit_enclosures(ball, 17).unwrap();
        assert_eq!(pts[0], Interval::ZERO);
        assert_eq!(pts[1], Interval::ONE);
        assert!(pts[2].overlaps(consts.alpha_inv));
        // g^4(0) = g(g(1/alpha)) = alpha^-2
        assert!(pts[4].overlaps(consts.alpha_inv.pow_int(2).unwrap()), "d={d}");
        // enclosure growth along the orbit stays modest
        for (k, p) in pts.iter().enumerate() {
            let bound = if k <= 8 { 5e-7 } else { 1e-5 };
            assert!(p.width() < bound, "d={d} k={k}: {p}");
        }
    }
    assert!(orbit_enclosures(fixed_ball(2), 1).is_err());
}

#[test]
fn graph_of_g_on_a_single_strip() {
    let ball = fixed_ball(2);
    let consts = alpha_of(ball).unwrap();
    let rects = emit_cover_rectangles(ball, fixed_cert(2), Panel::G, 1).unwrap();
    assert_eq!(rects.len(), 1);
    let r = &rects[0];
    assert_eq!(r.x, Interval::new(-1.0, 1.0).unwrap());
    assert!(r.y.contains(1.0));
    assert!(r.y.contains(consts.alpha_inv.lo()) && r.y.contains(consts.alpha_inv.hi()));
    assert_eq!(r.tag, "g");
}

#[test]
fn coarse_quartic_second_derivative_straddles_zero() {
    let ball = fixed_ball(4);
    let rects = emit_cover_rectangles(ball, fixed_cert(4), Panel::GSecond, 4).unwrap();
    assert!(rects.last().unwrap().y.contains(0.0));
    assert!(rects[0].y.hi() < 0.0);
    // the certificate cover itself is negative throughout and refined at the end
    let fine = certificate_rectangles(fixed_cert(4));
    assert!(fine.iter().all(|r| r.y.hi() < 0.0 && r.tag == "gsecond_cover"));
    let j = fixed_cert(4).j;
    assert!(fine.last().unwrap().x.width() < j.width() / 64.0);
}

#[test]
fn refining_the_grid_only_shrinks_rectangles() {
    let ball = fixed_ball(3);
    let cert = fixed_cert(3);
    for panel in Panel::ALL {
        let coarse = emit_cover_rectangles(ball, cert, panel, 8).unwrap();
        let fine = emit_cover_rectangles(ball, cert, panel, 16).unwrap();
        assert_eq!(fine.len(), 16);
        for f in &fine {
            let hull = coarse
                .iter()
                .filter(|c| c.x.intersect(f.x).is_some_and(|i| i.width() > 0.0))
                .map(|c| c.y)
                .reduce(|a, b| a.hull(b))
                .unwrap();
            assert!(f.y.is_subset(hull), "{} {}: {} vs {}", panel.tag(), f.x, f.y, hull);
        }
    }
}

#[test]
fn psi_panels_hit_the_orbit() {
    let ball = fixed_ball(2);
    let cert = fixed_cert(2);
    let consts = alpha_of(ball).unwrap();
    let psi1 = emit_cover_rectangles(ball, cert, Panel::Psi1, 1).unwrap();
    // Psi1(I) = [g(g(1)), 1]
    assert!(psi1[0].y.contains(1.0));
    assert!(psi1[0].y.overlaps(ball.eval(consts.alpha_inv).unwrap()));
    let psi0 = emit_cover_rectangles(ball, cert, Panel::Psi0, 1).unwrap();
    assert!(psi0[0].y.overlaps(consts.alpha_inv));
    let d1 = emit_cover_rectangles(ball, cert, Panel::Psi1Prime, 4).unwrap();
    for r in &d1 {
        assert!(r.y.lo() > 0.0 && r.y.hi() < 1.0, "{}", r.y);
    }
    assert!(emit_cover_rectangles(ball, cert, Panel::G, 0).is_err());
}

#[test]
fn csv_rounds_outward() {
    let ball = fixed_ball(2);
    let rects = emit_cover_rectangles(ball, fixed_cert(2), Panel::GPrime, 5).unwrap();
    let csv = rectangles_csv(&rects, 2);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x_lo,x_hi,y_lo,y_hi,tag,degree"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for (row, r) in rows.iter().zip(&rects) {
        let f: Vec<&str> = row.split(',').collect();
        let num = |i: usize| f[i].parse::<f64>().unwrap();
        assert!(num(0) <= r.x.lo() && num(1) >= r.x.hi());
        assert!(num(2) <= r.y.lo() && num(3) >= r.y.hi());
        assert_eq!((f[4], f[5]), ("gprime", "2"));
    }
}

#[test]
fn certificate_round_trip_and_tampering() {
    let ball = fixed_ball(2);
    let cert = fixed_cert(2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    cert.save(&path).unwrap();
    let back = MonotonicityCertificate::load(&path).unwrap();
    assert_eq!(&back, cert);
    back.check(ball).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"J\""));

    let mut bad = cert.clone();
    bad.cover[0].enclosure = Interval::new(-1.0, -0.5).unwrap();
    assert!(matches!(bad.check(ball), Err(Error::CertificateMismatch(_))));

    let mut bad = cert.clone();
    bad.cover.pop();
    assert!(bad.check(ball).is_err());

    let mut bad = cert.clone();
    bad.min_abs_gprime *= 2.0;
    assert!(bad.check(ball).is_err());

    // a certificate for another ball
    assert!(matches!(cert.check(fixed_ball(3)), Err(Error::CertificateMismatch(_))));
}

#[test]
fn leaf_enclosures_contain_sampled_derivatives() {
    for d in [2, 3, 4] {
        let ball = fixed_ball(d);
        let cert = fixed_cert(d);
        for leaf in cert.cover.iter().chain(&cert.gprime_cover).step_by(3) {
            for frac in [0.0, 0.3, 0.5, 1.0] {
                let x = leaf.subinterval.lo() + frac * leaf.subinterval.width();
                let [_, g1, g2] = center_derivs(ball, x);
                let is_second = cert.cover.contains(leaf);
                let v = if is_second { g2 } else { g1 };
                let e = leaf.enclosure.inflate(1e-12).unwrap();
                assert!(e.contains(v), "d={d} x={x}: {v} not in {}", leaf.enclosure);
            }
        }
    }
}

#[test]
fn sign_cover_is_contiguous_and_sorted() {
    let ball = fixed_ball(4);
    let cert = fixed_cert(4);
    for w in cert.cover.windows(2) {
        assert_eq!(w[0].subinterval.hi(), w[1].subinterval.lo());
    }
    assert_eq!(cert.cover[0].subinterval.lo(), cert.domain.lo());
    let again = verify_sign_on(Derivative::Second, ball, cert.domain, 30).unwrap();
    assert_eq!(again.leaves, cert.cover);
}
