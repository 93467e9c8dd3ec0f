use nonlocal_gc::domain::{DomainSpec, ExteriorData};
use nonlocal_gc::geometry::{smooth_approx, ConvexBody, SmoothingParams};
use nonlocal_gc::obstacle::{Barrier, Obstacle, Side, CLOSEST_TOL_REL};
use nonlocal_gc::Point;
use proptest::prelude::*;

fn disk() -> DomainSpec {
    DomainSpec::Disk { center: [0.0, 0.0], r: 1.0 }
}

fn quadratic() -> ExteriorData {
    ExteriorData::Quadratic { c: 0.0, a: 0.2, r1: 1.5, r2: 2.0 }
}

fn cases() -> Vec<(DomainSpec, ConvexBody, ExteriorData)> {
    vec![
        (disk(), ConvexBody::ellipse(1.2, 0.8).unwrap(), quadratic()),
        (disk(), ConvexBody::square(1.0).unwrap(), ExteriorData::Zero),
        (
            DomainSpec::Rectangle { lo: [-1.0, -0.5], hi: [1.0, 0.5] },
            ConvexBody::ball(1.0).unwrap(),
            ExteriorData::Linear { c: 0.0, g: [0.3, 0.2], z1: 1.0, z2: 2.0 },
        ),
        (
            DomainSpec::Interval { lo: -1.0, hi: 1.0 },
            ConvexBody::interval(0.8, 1.2).unwrap(),
            ExteriorData::Quadratic { c: 0.0, a: 0.2, r1: 1.5, r2: 2.0 },
        ),
    ]
}

fn obstacles(i: usize) -> (DomainSpec, ConvexBody, ExteriorData, Obstacle, Obstacle) {
    let (u, k, phi) = cases().swap_remove(i);
    let rho = Obstacle::new(&u, &k, &phi, Side::Rho, 720).unwrap();
    let rho_bar = Obstacle::new(&u, &k, &phi, Side::RhoBar, 720).unwrap();
    (u, k, phi, rho, rho_bar)
}

fn pt(u: &DomainSpec, x: f64, y: f64) -> Point {
    Point::new(x, if u.dim() == 2 { y } else { 0.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn obstacles_are_gauge_lipschitz(i in 0usize..4, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let (u, k, _, rho, rho_bar) = obstacles(i);
        let (x, y) = (pt(&u, a, b), pt(&u, c, d));
        let tol = 1e-9;
        let diff = rho.eval(&y) - rho.eval(&x);
        prop_assert!(diff <= k.gauge(&(y - x)) + tol, "upper {diff}");
        prop_assert!(-k.gauge(&(x - y)) - tol <= diff, "lower {diff}");
        // −ρ̄ obeys the same bounds.
        let diff = rho_bar.eval(&x) - rho_bar.eval(&y);
        prop_assert!(diff <= k.gauge(&(y - x)) + tol && -k.gauge(&(x - y)) - tol <= diff);
    }

    #[test]
    fn lower_obstacle_stays_below(i in 0usize..4, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (u, _, _, rho, rho_bar) = obstacles(i);
        let x = pt(&u, a, b);
        prop_assert!(-rho_bar.eval(&x) <= rho.eval(&x) + 1e-12);
    }

    #[test]
    fn hamilton_jacobi_residual_off_the_ridge(i in 0usize..2, r in 0.05f64..0.95, t in 0.0f64..std::f64::consts::TAU) {
        let (_, k, _, rho, _) = obstacles(i);
        let x = Point::new(r * t.cos(), r * t.sin());
        prop_assume!(rho.closest_points(&x, CLOSEST_TOL_REL).unique().is_some());
        if let Ok(ih) = rho.interior_hessian(&x) {
            prop_assume!(ih.det_q > 1e-3);
            prop_assert!((k.support(&ih.jet.mu) - 1.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn closed_form_hessian_matches_second_differences(r in 0.05f64..0.9, t in 0.0f64..std::f64::consts::TAU) {
        let (_, _, _, rho, _) = obstacles(0);
        let x = Point::new(r * t.cos(), r * t.sin());
        let Ok(ih) = rho.interior_hessian(&x) else { return Ok(()) };
        prop_assume!(ih.det_q >= 0.1 && rho.closest_points(&x, CLOSEST_TOL_REL).unique().is_some());
        let e = 1e-4;
        let f = |p: Point| rho.eval(&p);
        let (dx, dy) = (Point::new(e, 0.0), Point::new(0.0, e));
        // Differences across the ridge see the kink, not the Hessian.
        let t0 = rho.closest_points(&x, CLOSEST_TOL_REL).unique().unwrap();
        for p in [x + dx, x - dx, x + dy, x - dy, x + dx + dy, x + dx - dy, x - dx + dy, x - dx - dy] {
            let t = rho.closest_points(&p, CLOSEST_TOL_REL).unique();
            prop_assume!(t.is_some_and(|t| (t - t0).abs() < 0.1));
        }
        let xy = (f(x + dx + dy) - f(x + dx - dy) - f(x - dx + dy) + f(x - dx - dy)) / (4.0 * e * e);
        let fd = nonlocal_gc::Mat2::new(
            (f(x + dx) - 2.0 * f(x) + f(x - dx)) / (e * e),
            xy,
            xy,
            (f(x + dy) - 2.0 * f(x) + f(x - dy)) / (e * e),
        );
        let rel = (fd - ih.d2rho).norm() / ih.d2rho.norm().max(1.0);
        prop_assert!(rel <= 1e-3, "rel {rel}");
    }
}

#[test]
fn obstacles_agree_with_the_data_on_the_boundary() {
    for i in 0..4 {
        let (u, _, phi, rho, rho_bar) = obstacles(i);
        for t in u.boundary_params(97) {
            let y = u.boundary_point(t).y;
            assert!((rho.eval(&y) - phi.value(&y)).abs() <= 1e-9, "case {i} t {t}");
            assert!((-rho_bar.eval(&y) - phi.value(&y)).abs() <= 1e-9, "case {i} t {t}");
        }
    }
}

/// Smoothed bodies for the square: `K_k ⊂ K_{k+1} ⊂ K` and the Hausdorff
/// distance of the polars controls the gauges.
fn square_levels() -> (ConvexBody, Vec<(ConvexBody, f64)>) {
    let k = ConvexBody::square(1.0).unwrap();
    let polar = k.polar().unwrap();
    let levels = (1..=5)
        .map(|level| {
            let (p, rep) = smooth_approx(&polar, level, &SmoothingParams::default()).unwrap();
            (p.polar().unwrap(), rep.hausdorff)
        })
        .collect();
    (k, levels)
}

#[test]
fn smoothed_obstacles_are_nested_and_converge() {
    let (k, levels) = square_levels();
    let u = disk();
    let phi = quadratic();
    let base = Obstacle::new(&u, &k, &phi, Side::Rho, 720).unwrap();
    let obs: Vec<(Obstacle, f64)> = levels
        .iter()
        .map(|(b, hd)| (Obstacle::new(&u, b, &phi, Side::Rho, 720).unwrap(), *hd))
        .collect();
    let diam = u.diameter();
    for i in -10..=10 {
        for j in -10..=10 {
            let x = Point::new(i as f64 / 10.5, j as f64 / 10.5);
            if !u.contains(&x) {
                continue;
            }
            let r = base.eval(&x);
            let mut prev = f64::INFINITY;
            for (ob, hd) in &obs {
                let v = ob.eval(&x);
                assert!(r <= v + 1e-12 && v <= prev + 1e-12, "{x:?}");
                // γ_k − γ ≤ d_H(K°_k, K°)|z| along the minimising segment.
                assert!(v - r <= hd * diam + 1e-12, "{x:?}");
                prev = v;
            }
        }
    }
}

#[test]
fn zero_data_barrier_hessian_is_uniformly_bounded() {
    let (k, levels) = square_levels();
    let u = disk();
    let r0 = 0.25;
    let outer = k.validate().outer_radius;
    let c1 = levels[0].0.validate().inner_radius;
    let bound = (1.0 / c1) * (1.0 + outer / c1).powi(2) / r0;
    let mut worst = 0.0f64;
    for (kk, _) in &levels {
        for t0 in [0.0, 0.7, 1.9, 3.3, 5.0] {
            let b = Barrier::new(&u, kk, &ExteriorData::Zero, t0, r0, 10.0, 720).unwrap();
            worst = worst.max(b.max_boundary_hessian_eig(256).unwrap());
        }
    }
    assert!(worst <= bound, "{worst} > {bound}");
}
