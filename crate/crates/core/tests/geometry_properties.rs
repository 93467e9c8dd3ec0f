use nonlocal_gc::geometry::{radial_distance, smooth_approx, BodyRep, ConvexBody, SmoothingParams};
use nonlocal_gc::Point;
use proptest::prelude::*;

fn body(kind: u8, a: f64, b: f64, phase: f64) -> ConvexBody {
    match kind % 6 {
        0 => ConvexBody::ball(a).unwrap(),
        1 => ConvexBody::ellipse(a, b).unwrap(),
        2 => ConvexBody::square(a).unwrap(),
        3 => ConvexBody::regular_polygon(3 + (kind as usize / 6) % 5, a, phase).unwrap(),
        4 => ConvexBody::ellipse(a, b).unwrap().to_support_samples(720).unwrap(),
        _ => ConvexBody::interval(a, b).unwrap(),
    }
}

fn bodies() -> impl Strategy<Value = ConvexBody> {
    (0u8..60, 0.3f64..2.5, 0.3f64..2.5, 0.0f64..1.0).prop_map(|(k, a, b, p)| body(k, a, b, p))
}

fn point(b: &ConvexBody, x: f64, y: f64) -> Point {
    Point::new(x, if b.dim() == 2 { y } else { 0.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn gauge_is_subadditive(b in bodies(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, y0 in -3.0f64..3.0, y1 in -3.0f64..3.0) {
        let (x, y) = (point(&b, x0, x1), point(&b, y0, y1));
        let sum = b.gauge(&x) + b.gauge(&y);
        prop_assert!(b.gauge(&(x + y)) <= sum + 1e-12 * sum.max(1.0));
    }

    #[test]
    fn gauge_is_positively_homogeneous(b in bodies(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, k in 1usize..=100) {
        let x = point(&b, x0, x1);
        let t = k as f64 / 10.0;
        let g = b.gauge(&x);
        prop_assert!((b.gauge(&(x * t)) - t * g).abs() <= 1e-12 * t * g.max(f64::MIN_POSITIVE) + 1e-300);
    }

    #[test]
    fn generalized_cauchy_schwarz(b in bodies(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, y0 in -3.0f64..3.0, y1 in -3.0f64..3.0) {
        let (x, y) = (point(&b, x0, x1), point(&b, y0, y1));
        let bound = b.gauge(&x) * b.support(&y);
        prop_assert!(x.dot(&y) <= bound * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn cauchy_schwarz_equality_at_the_support_point(b in bodies(), y0 in -3.0f64..3.0, y1 in -3.0f64..3.0) {
        let y = point(&b, y0, y1);
        prop_assume!(y.norm() > 1e-3);
        if let Ok(j) = b.support_jet(&y) {
            // Dγ°(y) is a maximiser of ⟨x, y⟩ over K.
            let x = j.grad;
            let rel = (x.dot(&y) - b.gauge(&x) * b.support(&y)).abs() / b.support(&y);
            let sampled = matches!(b.rep(), BodyRep::SupportSamples(_));
            let tol = if sampled { 1e-2 } else { 1e-10 };
            prop_assert!(rel <= tol, "rel {rel}");
        }
    }

    #[test]
    fn polar_gauge_of_the_gradient_is_one(b in bodies(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        let x = point(&b, x0, x1);
        prop_assume!(x.norm() > 1e-3);
        if let Ok(j) = b.gauge_jet(&x) {
            let dev = (b.support(&j.grad) - 1.0).abs();
            // Support-sample bodies are first order in the direction grid.
            let sampled = matches!(b.rep(), BodyRep::SupportSamples(_));
            let tol = if sampled { 10.0 * std::f64::consts::TAU / 720.0 } else { 1e-8 };
            prop_assert!(dev <= tol, "dev {dev}");
        }
    }

    #[test]
    fn euler_identities(b in bodies(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        let x = point(&b, x0, x1);
        prop_assume!(x.norm() > 1e-3);
        if let Ok(j) = b.gauge_jet(&x) {
            prop_assert!((j.grad.dot(&x) - j.value).abs() <= 1e-10 * j.value);
            if j.hess_defined {
                let hx = j.hess * x;
                prop_assert!(hx.norm() <= 1e-8 * j.hess.norm().max(1e-300) * x.norm() + 1e-14);
            }
        }
    }
}

#[test]
fn bipolar_of_sampled_bodies_is_close() {
    let m = 720;
    let res = std::f64::consts::TAU / m as f64;
    for k in [
        ConvexBody::ellipse(1.4, 0.6).unwrap(),
        ConvexBody::square(1.0).unwrap(),
        ConvexBody::regular_polygon(5, 1.2, 0.3).unwrap(),
        ConvexBody::ball(0.7).unwrap(),
    ] {
        let s = k.to_support_samples(m).unwrap();
        let back = s.polar().unwrap().polar().unwrap();
        let diam = 2.0 * k.validate().outer_radius;
        let d = radial_distance(&back, &k, 2048);
        assert!(d <= 2.0 * res * diam, "{k:?}: {d}");
        let exact = k.polar().unwrap().polar().unwrap();
        assert!(radial_distance(&exact, &k, 2048) <= 1e-12);
    }
}

#[test]
fn smoothing_distances_shrink_geometrically() {
    let p = SmoothingParams::default();
    for k in [ConvexBody::square(1.0).unwrap(), ConvexBody::regular_polygon(3, 1.0, 0.0).unwrap()] {
        let polar = k.polar().unwrap();
        let mut prev = f64::INFINITY;
        for level in 1..=5 {
            let (_, rep) = smooth_approx(&polar, level, &p).unwrap();
            let c = (2.0 + p.delta0) * rep.lipschitz * p.delta0 + p.eps0;
            assert!(rep.hausdorff < prev, "level {level}");
            assert!(rep.hausdorff <= rep.hausdorff_bound);
            assert!(rep.hausdorff_bound <= c * 0.5f64.powi(level as i32) * (1.0 + 1e-12));
            prev = rep.hausdorff;
        }
    }
}
