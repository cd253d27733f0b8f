//! Locating the edge of a certified region `{x : ok(x)}` on a segment.
//!
//! `good_end` is assumed to satisfy `ok` already. The search starts from a
//! floating-point estimate `est` of the edge, gallops outward on both sides
//! until it holds one point where `ok` was verified and one where it failed
//! (or a segment end), then bisects down to `tol`. Only verified points are
//! ever returned, so the estimate affects speed, not correctness.

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Edge {
    /// Verified point closest to the edge.
    pub good: f64,
    /// Point past the edge (failed `ok`, or the far segment end).
    pub bad: f64,
    /// Number of `ok` evaluations.
    pub evals: u32,
}

pub(crate) enum Outcome {
    Found(Edge),
    /// The bracket could not shrink to `tol` (float spacing or eval cap).
    Stalled(Edge),
}

pub(crate) fn find_edge(
    good_end: f64,
    bad_end: f64,
    est: f64,
    tol: f64,
    max_evals: u32,
    ok: impl Fn(f64) -> Result<bool>,
) -> Result<Outcome> {
    let toward_good = if good_end < bad_end { -1.0 } else { 1.0 };
    let beyond = |x: f64, end: f64, dir: f64| (x - end) * dir >= 0.0;
    let mut evals = 0;

    let est = if est.is_finite() { est } else { good_end };
    let mut delta = 0.5 * tol;
    let mut good = loop {
        let cand = est + toward_good * delta;
        if beyond(cand, good_end, toward_good) {
            break good_end;
        }
        evals += 1;
        if ok(cand)? {
            break cand;
        }
        delta *= 4.0;
    };
    let mut delta = 0.5 * tol;
    let mut bad = loop {
        let cand = est - toward_good * delta;
        if beyond(cand, bad_end, -toward_good) {
            break bad_end;
        }
        if (cand - good) * toward_good >= 0.0 {
            // still on the verified side of `good`
            delta *= 4.0;
            continue;
        }
        evals += 1;
        if ok(cand)? {
            good = cand;
            delta *= 4.0;
            continue;
        }
        break cand;
    };

    while (good - bad).abs() > tol {
        let m = 0.5 * (good + bad);
        if m == good || m == bad || evals >= max_evals {
            return Ok(Outcome::Stalled(Edge { good, bad, evals }));
        }
        evals += 1;
        if ok(m)? {
            good = m;
        } else {
            bad = m;
        }
    }
    Ok(Outcome::Found(Edge { good, bad, evals }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(o: Outcome) -> Edge {
        match o {
            Outcome::Found(e) => e,
            Outcome::Stalled(e) => panic!("stalled at {e:?}"),
        }
    }

    #[test]
    fn exact_estimate_needs_two_evaluations() {
        let e = edge(find_edge(0.0, 1.0, 0.3, 1e-12, 100, |x| Ok(x <= 0.3)).unwrap());
        assert!(e.good <= 0.3 && 0.3 - e.good <= 1e-12);
        assert!(e.bad > 0.3);
        assert_eq!(e.evals, 2);
    }

    #[test]
    fn poor_estimates_still_converge() {
        for est in [0.0, 0.01, 0.29, 0.31, 0.99, 1.0, f64::NAN] {
            let e = edge(find_edge(0.0, 1.0, est, 1e-12, 200, |x| Ok(x <= 0.3)).unwrap());
            assert!(e.good <= 0.3 && 0.3 - e.good <= 1e-12, "est {est}: {e:?}");
            assert!(e.evals <= 2 * 45, "est {est}: {e:?}");
        }
    }

    #[test]
    fn decreasing_direction() {
        // good region on the right
        let e = edge(find_edge(2.0, 0.0, 1.5, 1e-12, 200, |x| Ok(x >= 0.7)).unwrap());
        assert!(e.good >= 0.7 && e.good - 0.7 <= 1e-12, "{e:?}");
    }

    #[test]
    fn whole_segment_good() {
        let e = edge(find_edge(0.0, 1.0, 0.5, 1e-12, 200, |_| Ok(true)).unwrap());
        assert!(1.0 - e.good <= 1e-12);
    }

    #[test]
    fn tolerance_below_spacing_stalls() {
        let o = find_edge(0.0, 1.0, 0.3, 1e-30, 500, |x| Ok(x <= 0.3)).unwrap();
        assert!(matches!(o, Outcome::Stalled(_)));
    }
}
