use std::sync::OnceLock;

use nonlocal_gc::domain::{DomainSpec, ExteriorData};
use nonlocal_gc::geometry::ConvexBody;
use nonlocal_gc::grid::{ExteriorRule, Grid, GridField};
use nonlocal_gc::obstacle::Barrier;
use nonlocal_gc::operator::{sphere_measure, KernelSpec, Modulation, Stencil};
use nonlocal_gc::Point;
use proptest::prelude::*;

fn kernels() -> Vec<KernelSpec> {
    vec![
        KernelSpec::pucci_plus(0.6, 0.5, 2.0),
        KernelSpec::pucci_minus(0.3, 0.5, 2.0),
        KernelSpec::custom(0.75, 0.5, 2.0, Modulation::Angular { mid: 1.2, amp: 0.6, k: 2 }),
        KernelSpec::frac_laplacian(0.5),
    ]
}

fn grid_1d() -> Grid {
    Grid::covering(&DomainSpec::Interval { lo: -1.0, hi: 1.0 }, 1.0 / 32.0).unwrap()
}

fn grid_2d() -> Grid {
    Grid::covering(&DomainSpec::Rectangle { lo: [-1.0, -1.0], hi: [1.0, 1.0] }, 1.0 / 8.0).unwrap()
}

/// Stencils per kernel, 1D then 2D.
fn stencils() -> &'static Vec<(Stencil, Stencil)> {
    static S: OnceLock<Vec<(Stencil, Stencil)>> = OnceLock::new();
    S.get_or_init(|| {
        kernels()
            .iter()
            .map(|k| (Stencil::new(k, &grid_1d()).unwrap(), Stencil::new(k, &grid_2d()).unwrap()))
            .collect()
    })
}

fn stencil(kind: usize, two: bool) -> &'static Stencil {
    let (a, b) = &stencils()[kind];
    if two {
        b
    } else {
        a
    }
}

fn field(two: bool, values: &[f64], exterior: ExteriorRule) -> GridField {
    let g = if two { grid_2d() } else { grid_1d() };
    let n = g.len();
    let v = (0..n).map(|i| values[i % values.len()]).collect();
    GridField::new(g, v, exterior).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn raising_one_other_value_never_lowers_the_operator(
        kind in 0usize..3,
        two in any::<bool>(),
        values in prop::collection::vec(-1.0f64..1.0, 17..40),
        node in 0usize..10_000,
        other in 0usize..10_000,
        bump in 1e-3f64..1.0,
    ) {
        let st = stencil(kind, two);
        let u = field(two, &values, ExteriorRule::Constant { c: 0.2 });
        let n = u.values.len();
        let (node, other) = (node % n, other % n);
        prop_assume!(node != other);
        let before = st.apply(&u, node).value;
        let mut v = u.clone();
        v.values[other] += bump;
        prop_assert!(st.apply(&v, node).value >= before - 1e-12 * before.abs().max(1.0));
        let mut w = u.clone();
        w.exterior = ExteriorRule::Constant { c: 0.2 + bump };
        prop_assert!(st.apply(&w, node).value >= before - 1e-12 * before.abs().max(1.0));
    }

    #[test]
    fn maximal_operator_is_subadditive_and_homogeneous(
        two in any::<bool>(),
        a in prop::collection::vec(-1.0f64..1.0, 17..40),
        b in prop::collection::vec(-1.0f64..1.0, 17..40),
        node in 0usize..10_000,
        t in 0.01f64..20.0,
    ) {
        let st = stencil(0, two);
        let u = field(two, &a, ExteriorRule::Zero);
        let v = field(two, &b, ExteriorRule::Zero);
        let node = node % u.values.len();
        let sum = u.combine(1.0, &v, 1.0).unwrap();
        let (iu, iv, is) = (st.apply(&u, node), st.apply(&v, node), st.apply(&sum, node));
        prop_assert!(is.err_lo <= iu.err_hi + iv.err_hi + 1e-12 * (iu.value.abs() + iv.value.abs()));
        let scaled = u.combine(t, &u, 0.0).unwrap();
        let it = st.apply(&scaled, node);
        prop_assert!((it.value - t * iu.value).abs() <= 1e-12 * t * iu.value.abs().max(1.0) + t * iu.half_width());
    }

    #[test]
    fn operator_commutes_with_lattice_shifts(
        kind in 0usize..4,
        two in any::<bool>(),
        shift in -3isize..=3,
        node in 0usize..10_000,
        c in 0.2f64..2.0,
    ) {
        let st = stencil(kind, two);
        let g = if two { grid_2d() } else { grid_1d() };
        let bump = |x: &Point, z: f64| {
            let r2 = ((x.x - z).powi(2) + x.y.powi(2)) / 0.25;
            if r2 < 1.0 { c * (1.0 - r2).powi(3) } else { 0.0 }
        };
        let dz = shift as f64 * g.h;
        let u = GridField::from_fn(g.clone(), ExteriorRule::Zero, |x| bump(x, 0.0));
        let v = GridField::from_fn(g.clone(), ExteriorRule::Zero, |x| bump(x, dz));
        let (i, j) = g.ij(node % g.len());
        let (i, j) = (i as isize, j as isize);
        prop_assume!(i + shift >= 0 && ((i + shift) as usize) < g.n[0]);
        let at = g.index(i as usize, j as usize);
        let moved = g.index((i + shift) as usize, j as usize);
        let (a, b) = (st.apply(&u, at), st.apply(&v, moved));
        prop_assert!((a.value - b.value).abs() <= 1e-10 * a.value.abs().max(1.0), "{} vs {}", a.value, b.value);
    }
}

#[test]
fn zero_is_mapped_to_zero_for_every_kind() {
    for kind in 0..kernels().len() {
        for two in [false, true] {
            let st = stencil(kind, two);
            let u = field(two, &[0.0], ExteriorRule::Zero);
            for node in (0..u.values.len()).step_by(7) {
                let v = st.apply(&u, node);
                assert_eq!((v.value, v.err_lo, v.err_hi), (0.0, 0.0, 0.0));
            }
        }
    }
}

/// The truncated zero-data barrier satisfies `M⁺ρ_B ≤ Ĉτ^{2−2s}/(2s₀)` in
/// the `τ`-window, where `Ĉ = (Λ + λ)·σ·C` and `C` caps its second
/// differences.
#[test]
fn barrier_operator_bound() {
    let u_dom = DomainSpec::Disk { center: [0.0, 0.0], r: 1.0 };
    let k = ConvexBody::ellipse(1.2, 0.8).unwrap();
    let (tau, r0) = (0.25, 0.25);
    let kernel = KernelSpec::pucci_plus(0.6, 0.5, 2.0);
    let box_dom = DomainSpec::Rectangle { lo: [-2.0, -2.0], hi: [2.0, 2.0] };
    let g = Grid::covering(&box_dom, 1.0 / 16.0).unwrap();
    let st = Stencil::new(&kernel, &g).unwrap();
    for t0 in [0.0, 2.1, 4.4] {
        let raw = Barrier::new(&u_dom, &k, &ExteriorData::Zero, t0, r0, f64::INFINITY, 720).unwrap();
        // Beyond the box the untruncated barrier exceeds its minimum over the
        // box boundary, so that minimum is a valid constant exterior.
        let cap = box_dom
            .boundary_params(1024)
            .into_iter()
            .map(|t| raw.eval(&box_dom.boundary_point(t).y))
            .fold(f64::INFINITY, f64::min);
        let barrier = Barrier::new(&u_dom, &k, &ExteriorData::Zero, t0, r0, cap, 720).unwrap();
        let f = GridField::from_fn(g.clone(), ExteriorRule::Constant { c: cap }, |x| barrier.eval(x));
        let window: Vec<usize> = (0..g.len())
            .filter(|&i| u_dom.signed_distance(&g.node(i)) > tau)
            .collect();
        assert!(!window.is_empty());
        let sample = |p: Point| f.sample(&p).0;
        let mut c_small = 0.0f64;
        for &i in &window {
            let x = g.node(i);
            for d in 0..64 {
                let a = std::f64::consts::PI * d as f64 / 64.0;
                for j in 1..=16 {
                    let r = tau * j as f64 / 16.0;
                    let h = Point::new(a.cos(), a.sin()) * r;
                    let delta = sample(x + h) + sample(x - h) - 2.0 * sample(x);
                    c_small = c_small.max(delta / (r * r));
                }
            }
        }
        let c = c_small.max(4.0 * f.sup_norm() / (tau * tau));
        let c_hat = (kernel.big_lambda + kernel.lambda) * sphere_measure(2) * c;
        let c_v = c_hat * tau.powf(2.0 - 2.0 * kernel.s) / (2.0 * kernel.s0);
        for v in st.apply_all(&f, &window) {
            assert!(v.err_hi <= c_v, "{} > {c_v}", v.err_hi);
        }
    }
}
