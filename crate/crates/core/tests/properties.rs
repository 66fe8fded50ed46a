use proptest::prelude::*;

use diracfem::exact::SineProduct;
use diracfem::femcore::quadrature::QuadratureRule;
use diracfem::femcore::{assemble_stiffness, FeSpace};
use diracfem::meshkit::{check_separation, gen_disk, gen_square, Rectangle, SubdomainSpec};
use diracfem::norms::{compensated_sum, error_norms, NormTag};
use diracfem::singular_rhs::{assemble_ball_rhs, assemble_dirac_rhs};
use diracfem::{Mesh, Point2};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Unit-square mesh with interior vertices moved by up to `amp · h`.
fn jittered_square(n: usize, amp: f64, seed: u64) -> Mesh {
    let mesh = gen_square(n, Rectangle::UNIT).unwrap();
    let h = 1.0 / n as f64;
    mesh.map_vertices(|p| {
        let interior = p.x > 1e-12 && p.x < 1.0 - 1e-12 && p.y > 1e-12 && p.y < 1.0 - 1e-12;
        if !interior {
            return p;
        }
        let s = (p.x * 91.7 + p.y * 53.3 + seed as f64 * 0.618).sin();
        let c = (p.x * 47.1 - p.y * 77.9 + seed as f64 * 0.414).cos();
        Point2::new(p.x + amp * h * s, p.y + amp * h * c)
    })
    .unwrap()
}

fn barycentric_strategy() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| {
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        [1.0 - a - b, a, b]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_partition_of_unity(k in 1usize..=4, lambda in barycentric_strategy()) {
        let mesh = gen_square(1, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, k).unwrap();
        let total: f64 = space.basis_values(lambda).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let ones = vec![1.0; space.num_dofs()];
        let (v, g) = space.eval_in(&ones, 0, lambda);
        prop_assert!((v - 1.0).abs() <= 1e-12);
        prop_assert!(g.norm() <= 1e-10);
    }

    #[test]
    fn quadrature_integrates_monomials(degree in 0usize..=12, a in 0u32..=12, b in 0u32..=12) {
        prop_assume!((a + b) as usize <= degree);
        let rule = QuadratureRule::triangle(degree);
        let approx: f64 = rule.iter().map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32)).sum();
        let exact = 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
        prop_assert!((approx - exact).abs() <= 1e-13 * exact.max(1e-3), "{approx} vs {exact}");
    }

    #[test]
    fn stiffness_symmetric_with_constant_kernel(k in 1usize..=3, n in 2usize..=5, seed in 0u64..1000) {
        let mesh = jittered_square(n, 0.2, seed);
        let space = FeSpace::new(&mesh, k).unwrap();
        let a = assemble_stiffness(&space);
        let scale = a.diagonal().iter().cloned().fold(0.0, f64::max);
        prop_assert!(a.asymmetry() <= 1e-13 * scale);
        for s in a.row_sums() {
            prop_assert!(s.abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn locate_returns_containing_element(x in 0.0..1.0f64, y in 0.0..1.0f64, seed in 0u64..100) {
        let mesh = jittered_square(6, 0.2, seed);
        let p = Point2::new(x, y);
        let t = mesh.locate(p).unwrap();
        prop_assert!(mesh.barycentric(t, p).iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn point_loads_have_unit_mass(k in 1usize..=4, x in 0.1..0.9f64, y in 0.1..0.9f64) {
        let mesh = gen_square(8, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, k).unwrap();
        let x0 = Point2::new(x, y);
        let dirac = assemble_dirac_rhs(&space, x0).unwrap();
        prop_assert!((compensated_sum(dirac.iter().copied()) - 1.0).abs() <= 1e-12);
        let ball = assemble_ball_rhs(&space, x0, 0.05).unwrap();
        prop_assert!((compensated_sum(ball.iter().copied()) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn point_loads_translate_with_the_mesh(k in 1usize..=3, dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        let mesh = gen_square(6, Rectangle::UNIT).unwrap();
        let shift = Point2::new(dx, dy);
        let moved = mesh.map_vertices(|p| p + shift).unwrap();
        let x0 = Point2::new(0.41, 0.57);
        let s0 = FeSpace::new(&mesh, k).unwrap();
        let s1 = FeSpace::new(&moved, k).unwrap();
        let a = assemble_dirac_rhs(&s0, x0).unwrap();
        let b = assemble_dirac_rhs(&s1, x0 + shift).unwrap();
        let fa = assemble_ball_rhs(&s0, x0, 0.1).unwrap();
        let fb = assemble_ball_rhs(&s1, x0 + shift, 0.1).unwrap();
        for i in 0..a.len() {
            prop_assert!((a[i] - b[i]).abs() <= 1e-9);
            prop_assert!((fa[i] - fb[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn separation_is_monotone_in_the_outer_region(r0 in 0.2..0.6f64, gap in 0.0..0.3f64, extra in 0.0..0.2f64) {
        let mesh = gen_disk(10, 1.0, Point2::ORIGIN).unwrap();
        let omega0 = SubdomainSpec::annulus(Point2::ORIGIN, r0, 1.0);
        let tight = SubdomainSpec::annulus(Point2::ORIGIN, (r0 - gap).max(0.01), 1.0);
        let loose = SubdomainSpec::annulus(Point2::ORIGIN, (r0 - gap - extra).max(0.005), 1.0);
        let a = check_separation(&mesh, &omega0, &tight);
        let b = check_separation(&mesh, &omega0, &loose);
        prop_assert!(b.offending.len() <= a.offending.len());
        prop_assert!(!a.ok || b.ok);
        if gap >= mesh.h_max() {
            prop_assert!(a.ok);
        }
    }

    #[test]
    fn norms_grow_with_the_region(k in 1usize..=2, r_small in 0.05..0.3f64, grow in 0.0..0.2f64) {
        let mesh = gen_square(8, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, k).unwrap();
        let exact = SineProduct;
        let u = space.interpolate(|p| (3.0 * p.x).sin() * p.y).unwrap();
        let x0 = Point2::new(0.5, 0.5);
        let tags = [NormTag::L2, NormTag::H1Semi, NormTag::H1];
        let big = SubdomainSpec::exclusion_ball(x0, r_small);
        let small = SubdomainSpec::exclusion_ball(x0, r_small + grow);
        let eb = error_norms(&space, &u, &exact, &big, &tags).unwrap();
        let es = error_norms(&space, &u, &exact, &small, &tags).unwrap();
        for tag in tags {
            prop_assert!(es.get(tag).unwrap() <= eb.get(tag).unwrap() * (1.0 + 1e-12));
        }
        let (l2, h1s, h1) = (eb.get(NormTag::L2).unwrap(), eb.get(NormTag::H1Semi).unwrap(), eb.get(NormTag::H1).unwrap());
        prop_assert!((h1 * h1 - l2 * l2 - h1s * h1s).abs() <= 1e-10 * h1 * h1);
    }

    #[test]
    fn norm_tags_round_trip(p in 1.0..=2.0f64) {
        for tag in [NormTag::L2, NormTag::H1Semi, NormTag::H1, NormTag::W1p(p), NormTag::L2Global] {
            let parsed: NormTag = tag.to_string().parse().unwrap();
            prop_assert_eq!(parsed, tag);
        }
    }
}
