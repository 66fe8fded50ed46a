//! Error norms restricted to subdomains, per-element error fields and the
//! inverse-inequality ratio.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactSolution;
use crate::femcore::quadrature::gauss_legendre_unit;
use crate::femcore::{DofVector, FeSpace, QuadratureRule};
use crate::meshkit::{element_inside, gen_square, Point2, Rectangle, SubdomainSpec, BARY_TOL};

/// Norm requested from [`error_norms`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormTag {
    L2,
    H1Semi,
    H1,
    /// `W^{1,p}` seminorm, `1 <= p <= 2`.
    W1p(f64),
    /// `L²` over the whole mesh, singular element included.
    L2Global,
}

impl fmt::Display for NormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormTag::L2 => f.write_str("l2"),
            NormTag::H1Semi => f.write_str("h1semi"),
            NormTag::H1 => f.write_str("h1"),
            NormTag::W1p(p) => write!(f, "w1p:{p}"),
            NormTag::L2Global => f.write_str("l2global"),
        }
    }
}

impl FromStr for NormTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<NormTag> {
        let tag = match s.trim().to_ascii_lowercase().as_str() {
            "l2" => NormTag::L2,
            "h1semi" => NormTag::H1Semi,
            "h1" => NormTag::H1,
            "l2global" => NormTag::L2Global,
            other => {
                let p = other
                    .strip_prefix("w1p:")
                    .ok_or_else(|| Error::Parse(format!("unknown norm `{s}`")))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
                if !(1.0..=2.0).contains(&p) {
                    return Err(Error::Parse(format!("W1p exponent {p} outside [1, 2]")));
                }
                NormTag::W1p(p)
            }
        };
        Ok(tag)
    }
}

impl TryFrom<String> for NormTag {
    type Error = Error;
    fn try_from(s: String) -> Result<NormTag> {
        s.parse()
    }
}

impl From<NormTag> for String {
    fn from(t: NormTag) -> String {
        t.to_string()
    }
}

/// Parses a comma-separated list such as `l2,h1,w1p:1.5`.
pub fn parse_norm_list(s: &str) -> Result<Vec<NormTag>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub subdomain: SubdomainSpec,
    pub included_elements: Vec<usize>,
    pub values: Vec<(NormTag, f64)>,
    /// Squared local `L²` error of each included element.
    pub per_element: Option<Vec<f64>>,
}

impl ErrorReport {
    pub fn get(&self, tag: NormTag) -> Option<f64> {
        self.values.iter().find(|(t, _)| *t == tag).map(|(_, v)| *v)
    }
}

/// Reference-element tables of basis values and barycentric derivatives.
struct Tables {
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<[f64; 3]>>,
}

impl Tables {
    fn new(space: &FeSpace, rule: &QuadratureRule) -> Tables {
        let n = space.dofs_per_element();
        let mut values = Vec::with_capacity(rule.len());
        let mut derivs = Vec::with_capacity(rule.len());
        for lam in rule.points() {
            let mut v = vec![0.0; n];
            let mut d = vec![[0.0; 3]; n];
            space.basis().values(*lam, &mut v);
            space.basis().lambda_derivatives(*lam, &mut d);
            values.push(v);
            derivs.push(d);
        }
        Tables { values, derivs }
    }
}

/// Integrals of `|e|²`, `|∇e|²` and `|∇e|^p` (one per exponent) over one element.
fn element_integrals(
    space: &FeSpace,
    u: &[f64],
    exact: &dyn ExactSolution,
    t: usize,
    rule: &QuadratureRule,
    tables: &Tables,
    exponents: &[f64],
) -> (f64, f64, Vec<f64>) {
    let geo = space.geometry(t);
    let dofs = space.element_dofs(t);
    let (mut e2, mut g2) = (0.0, 0.0);
    let mut gp = vec![0.0; exponents.len()];
    for (q, (lam, w)) in rule.iter().enumerate() {
        let mut value = 0.0;
        let mut dl = [0.0; 3];
        for (i, &g) in dofs.iter().enumerate() {
            let c = u[g];
            value += c * tables.values[q][i];
            for (acc, d) in dl.iter_mut().zip(&tables.derivs[q][i]) {
                *acc += c * d;
            }
        }
        let x = geo.point(lam);
        let err = exact.value(x) - value;
        let grad_err = (exact.gradient(x) - geo.gradient(&dl)).norm();
        let wa = w * geo.area;
        e2 += wa * err * err;
        g2 += wa * grad_err * grad_err;
        for (acc, p) in gp.iter_mut().zip(exponents) {
            *acc += wa * grad_err.powf(*p);
        }
    }
    (e2, g2, gp)
}

fn closure_contains(space: &FeSpace, t: usize, p: Point2) -> bool {
    space.mesh().barycentric(t, p).iter().all(|&l| l >= -BARY_TOL)
}

/// Errors of `u_h` against `exact` over the elements of `subdomain`, with the
/// degree `2k + 4` rule.
pub fn error_norms(
    space: &FeSpace,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    subdomain: &SubdomainSpec,
    tags: &[NormTag],
) -> Result<ErrorReport> {
    let rule = QuadratureRule::for_error(space.order());
    error_norms_with_rule(space, u_h, exact, subdomain, tags, &rule)
}

/// [`error_norms`] with an explicit quadrature rule.
pub fn error_norms_with_rule(
    space: &FeSpace,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    subdomain: &SubdomainSpec,
    tags: &[NormTag],
    rule: &QuadratureRule,
) -> Result<ErrorReport> {
    subdomain.validate()?;
    if u_h.len() != space.num_dofs() {
        return Err(Error::InvalidArgument(format!(
            "coefficient vector has length {}, space has {} dofs",
            u_h.len(),
            space.num_dofs()
        )));
    }
    let mesh = space.mesh();
    let included: Vec<usize> = (0..mesh.num_triangles())
        .filter(|&t| element_inside(mesh, t, subdomain))
        .collect();
    if let Some(s) = exact.singular_point() {
        if let Some(&t) = included.iter().find(|&&t| closure_contains(space, t, s)) {
            return Err(Error::SingularElement { element: t });
        }
    }
    let exponents: Vec<f64> = tags
        .iter()
        .filter_map(|t| match t {
            NormTag::W1p(p) => Some(*p),
            _ => None,
        })
        .collect();
    if let Some(p) = exponents.iter().find(|p| !(1.0..=2.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("W1p exponent {p} outside [1, 2]")));
    }
    let tables = Tables::new(space, rule);
    let locals: Vec<(f64, f64, Vec<f64>)> = included
        .par_iter()
        .map(|&t| element_integrals(space, u_h, exact, t, rule, &tables, &exponents))
        .collect();
    let e2 = compensated_sum(locals.iter().map(|l| l.0));
    let g2 = compensated_sum(locals.iter().map(|l| l.1));
    let mut values = Vec::with_capacity(tags.len());
    let mut w_index = 0;
    for &tag in tags {
        let v = match tag {
            NormTag::L2 => e2.sqrt(),
            NormTag::H1Semi => g2.sqrt(),
            NormTag::H1 => (e2 + g2).sqrt(),
            NormTag::W1p(p) => {
                let s = compensated_sum(locals.iter().map(|l| l.2[w_index]));
                w_index += 1;
                s.powf(1.0 / p)
            }
            NormTag::L2Global => global_l2_error(space, u_h, exact)?,
        };
        values.push((tag, v));
    }
    Ok(ErrorReport {
        subdomain: *subdomain,
        included_elements: included,
        per_element: Some(locals.iter().map(|l| l.0).collect()),
        values,
    })
}

/// `‖u - u_h‖_{0,Ω}` over the whole mesh.
///
/// Elements whose closure holds the singular point are split into triangles
/// with apex at that point, each integrated by a Gauss rule collapsed at the
/// apex so the logarithmic singularity is resolved.
pub fn global_l2_error(space: &FeSpace, u_h: &[f64], exact: &dyn ExactSolution) -> Result<f64> {
    let rule = QuadratureRule::for_error(space.order());
    let tables = Tables::new(space, &rule);
    let mesh = space.mesh();
    let singular = exact.singular_point();
    let (nodes, weights) = gauss_legendre_unit(24);
    let locals: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| match singular {
            Some(s) if closure_contains(space, t, s) => {
                let corners = mesh.corners(t);
                let dofs = space.element_dofs(t);
                let mut total = 0.0;
                for j in 0..3 {
                    let (b, c) = (corners[j], corners[(j + 1) % 3]);
                    let two_area = (b - s).cross(c - s);
                    if two_area <= 1e-14 * mesh.area(t) {
                        continue;
                    }
                    for (sig, wi) in nodes.iter().zip(&weights) {
                        // s = σ³ grades the radial points toward the apex
                        let si = sig * sig * sig;
                        let wi = 3.0 * sig * sig * wi;
                        for (ti, wt) in nodes.iter().zip(&weights) {
                            let x = s + si * ((b - s) + *ti * (c - b));
                            let values = space.basis_values(mesh.barycentric(t, x));
                            let uh: f64 = dofs.iter().zip(&values).map(|(&g, v)| u_h[g] * v).sum();
                            let err = exact.value(x) - uh;
                            total += two_area * si * wi * wt * err * err;
                        }
                    }
                }
                total
            }
            _ => {
                let exps: [f64; 0] = [];
                element_integrals(space, u_h, exact, t, &rule, &tables, &exps).0
            }
        })
        .collect();
    Ok(compensated_sum(locals).sqrt())
}

/// Local error of one element for heat-map output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldEntry {
    pub element: usize,
    pub barycenter: Point2,
    /// Squared local `L²` error; `None` on elements holding the singular point.
    pub err2: Option<f64>,
}

/// Squared local `L²` errors of every element.
pub fn error_field(space: &FeSpace, u_h: &[f64], exact: &dyn ExactSolution) -> Vec<FieldEntry> {
    let rule = QuadratureRule::for_error(space.order());
    let tables = Tables::new(space, &rule);
    let mesh = space.mesh();
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let singular = exact
                .singular_point()
                .is_some_and(|s| closure_contains(space, t, s));
            FieldEntry {
                element: t,
                barycenter: mesh.barycenter(t),
                err2: (!singular)
                    .then(|| element_integrals(space, u_h, exact, t, &rule, &tables, &[]).0),
            }
        })
        .collect()
}

/// CSV `elem,xc,yc,err2`; flagged elements carry `nan`.
pub fn field_csv(field: &[FieldEntry]) -> String {
    let mut out = String::from("elem,xc,yc,err2\n");
    for e in field {
        let err = e.err2.map_or_else(|| "nan".to_string(), |v| format!("{v:e}"));
        let _ = writeln!(out, "{},{:e},{:e},{}", e.element, e.barycenter.x, e.barycenter.y, err);
    }
    out
}

/// `|u_h|_{1,Ω} · h_min / ‖u_h‖_{0,Ω}`.
pub fn inverse_ratio(space: &FeSpace, u_h: &[f64]) -> Result<f64> {
    let rule = QuadratureRule::triangle(2 * space.order());
    let tables = Tables::new(space, &rule);
    let zero = crate::exact::FnSolution::new(|_| 0.0, |_| Point2::ORIGIN);
    let locals: Vec<(f64, f64, Vec<f64>)> = (0..space.mesh().num_triangles())
        .into_par_iter()
        .map(|t| element_integrals(space, u_h, &zero, t, &rule, &tables, &[]))
        .collect();
    let l2 = compensated_sum(locals.iter().map(|l| l.0)).sqrt();
    let h1 = compensated_sum(locals.iter().map(|l| l.1)).sqrt();
    if l2 == 0.0 {
        return Err(Error::InvalidArgument("inverse ratio of the zero function".into()));
    }
    Ok(h1 * space.mesh().h_min() / l2)
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseSweep {
    pub order: usize,
    pub resolutions: Vec<usize>,
    pub ratios: Vec<f64>,
    /// `max(ratios) / min(ratios)`.
    pub spread: f64,
}

/// Inverse ratios of random coefficient vectors on `gen_square(n)`.
pub fn inverse_ratio_sweep(order: usize, resolutions: &[usize], seed: u64) -> Result<InverseSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (order as u64) << 32);
    let mut ratios = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let mesh = gen_square(n, Rectangle::UNIT)?;
        let space = FeSpace::new(&mesh, order)?;
        let u: Vec<f64> = (0..space.num_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ratios.push(inverse_ratio(&space, &u)?);
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(InverseSweep {
        order,
        resolutions: resolutions.to_vec(),
        spread: max / min,
        ratios,
    })
}

/// Interpolation error `‖u - I_h u‖` used by the approximation-order checks.
pub fn interpolation_error(
    space: &FeSpace,
    exact: &dyn ExactSolution,
    tags: &[NormTag],
) -> Result<ErrorReport> {
    let interp: DofVector = space.interpolate(|p| exact.value(p))?;
    let b = space.mesh().vertices().iter().fold(
        Rectangle {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        },
        |r, p| Rectangle {
            x_min: r.x_min.min(p.x),
            x_max: r.x_max.max(p.x),
            y_min: r.y_min.min(p.y),
            y_max: r.y_max.max(p.y),
        },
    );
    error_norms(space, &interp, exact, &SubdomainSpec::Rectangle { bounds: b }, tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{DiskSolution, FnSolution, SineProduct};
    use crate::femcore::{assemble_stiffness, solve_with_boundary, DEFAULT_REL_TOL};
    use crate::meshkit::{gen_disk, Mesh};
    use crate::singular_rhs::assemble_dirac_rhs;

    const ALL: [NormTag; 4] = [NormTag::L2, NormTag::H1Semi, NormTag::H1, NormTag::W1p(1.5)];

    fn whole_square() -> SubdomainSpec {
        SubdomainSpec::Rectangle { bounds: Rectangle::UNIT }
    }

    #[test]
    fn tags_round_trip() {
        let tags = parse_norm_list("l2,h1,h1semi,w1p:1.5,l2global").unwrap();
        assert_eq!(
            tags,
            vec![NormTag::L2, NormTag::H1, NormTag::H1Semi, NormTag::W1p(1.5), NormTag::L2Global]
        );
        for t in tags {
            assert_eq!(t.to_string().parse::<NormTag>().unwrap(), t);
        }
        assert!("w1p:2.5".parse::<NormTag>().is_err());
        assert!("h2".parse::<NormTag>().is_err());
        let json = serde_json::to_string(&NormTag::W1p(1.25)).unwrap();
        assert_eq!(json, "\"w1p:1.25\"");
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn polynomial_interpolant_has_zero_error() {
        let mesh = gen_square(3, Rectangle::UNIT).unwrap();
        for k in 1..=4 {
            let space = FeSpace::new(&mesh, k).unwrap();
            let kk = k as i32;
            // degree-k polynomial, mixed term only when k ≥ 2
            let mix = if k >= 2 { 1.0 } else { 0.0 };
            let exact = FnSolution::new(
                move |p: Point2| p.x.powi(kk) - 2.0 * p.y.powi(kk) + mix * p.x * p.y + 0.3,
                move |p: Point2| {
                    Point2::new(
                        kk as f64 * p.x.powi(kk - 1) + mix * p.y,
                        -2.0 * kk as f64 * p.y.powi(kk - 1) + mix * p.x,
                    )
                },
            );
            let u = space.interpolate(|p| exact.value(p)).unwrap();
            let r = error_norms(&space, &u, &exact, &whole_square(), &ALL).unwrap();
            for (_, v) in &r.values {
                assert!(*v <= 1e-10, "k={k}: {:?}", r.values);
            }
            for e in error_field(&space, &u, &exact) {
                assert!(e.err2.unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn h1_pythagoras_and_w12() {
        let mesh = gen_square(4, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, 2).unwrap();
        let u = DofVector::zeros(space.num_dofs());
        let tags = [NormTag::L2, NormTag::H1Semi, NormTag::H1, NormTag::W1p(2.0)];
        let r = error_norms(&space, &u, &SineProduct, &whole_square(), &tags).unwrap();
        let (l2, semi, h1, w) = (r.values[0].1, r.values[1].1, r.values[2].1, r.values[3].1);
        assert!((h1 * h1 - l2 * l2 - semi * semi).abs() <= 1e-10 * h1 * h1);
        assert!((w - semi).abs() <= 1e-12 * semi);
        // ‖sin πx sin πy‖ = 1/2, |·|_1 = π/√2
        assert!((l2 - 0.5).abs() < 1e-5);
        assert!((semi - std::f64::consts::PI / 2f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn field_sums_to_l2() {
        let mesh = gen_square(5, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, 1).unwrap();
        let u = space.interpolate(|p| SineProduct.value(p)).unwrap();
        let field = error_field(&space, &u, &SineProduct);
        let r = error_norms(&space, &u, &SineProduct, &whole_square(), &[NormTag::L2]).unwrap();
        let sum = compensated_sum(field.iter().map(|e| e.err2.unwrap()));
        assert!((sum - r.values[0].1.powi(2)).abs() <= 1e-12);
        let csv = field_csv(&field);
        assert!(csv.starts_with("elem,xc,yc,err2\n0,"));
        assert_eq!(csv.lines().count(), 1 + mesh.num_triangles());
    }

    fn disk_solve(rings: usize, k: usize) -> (Mesh, Vec<f64>) {
        let mesh = gen_disk(rings, 1.0, Point2::ORIGIN).unwrap();
        let space = FeSpace::new(&mesh, k).unwrap();
        let a = assemble_stiffness(&space);
        let b = assemble_dirac_rhs(&space, Point2::ORIGIN).unwrap();
        let (u, _) = solve_with_boundary(&space, &a, &b, |_| 0.0, DEFAULT_REL_TOL).unwrap();
        (mesh.clone(), u.into_inner())
    }

    #[test]
    fn exclusion_and_singular_guard() {
        let (mesh, u) = disk_solve(10, 1);
        let space = FeSpace::new(&mesh, 1).unwrap();
        let omega0 = SubdomainSpec::annulus(Point2::ORIGIN, 0.2, 1.0);
        let r = error_norms(&space, &u, &DiskSolution, &omega0, &[NormTag::H1]).unwrap();
        for &t in &r.included_elements {
            for p in mesh.corners(t) {
                assert!(p.norm() >= 0.2 - 1e-12);
            }
        }
        let everything = SubdomainSpec::exclusion_ball(Point2::ORIGIN, 0.0);
        assert!(matches!(
            error_norms(&space, &u, &DiskSolution, &everything, &[NormTag::L2]),
            Err(Error::SingularElement { .. })
        ));
        let field = error_field(&space, &u, &DiskSolution);
        assert_eq!(field.iter().filter(|e| e.err2.is_none()).count(), 6);
    }

    #[test]
    fn norms_grow_with_subdomain() {
        let (mesh, u) = disk_solve(8, 2);
        let space = FeSpace::new(&mesh, 2).unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for r_in in [0.6, 0.5, 0.4, 0.3, 0.2] {
            let region = SubdomainSpec::annulus(Point2::ORIGIN, r_in, 1.0);
            let rep = error_norms(&space, &u, &DiskSolution, &region, &ALL).unwrap();
            let now: Vec<f64> = rep.values.iter().map(|v| v.1).collect();
            if let Some(p) = prev {
                for (a, b) in p.iter().zip(&now) {
                    assert!(b >= a);
                }
            }
            prev = Some(now);
        }
    }

    #[test]
    fn quadrature_stability_on_annulus() {
        let smooth = [NormTag::L2, NormTag::H1Semi, NormTag::H1];
        for (k, rings) in [(1, 20), (2, 15), (3, 10)] {
            let (mesh, u) = disk_solve(rings, k);
            let space = FeSpace::new(&mesh, k).unwrap();
            let region = SubdomainSpec::annulus(Point2::ORIGIN, 0.2, 1.0);
            let base = QuadratureRule::for_error(k);
            let doubled = QuadratureRule::triangle(2 * base.degree());
            let a = error_norms_with_rule(&space, &u, &DiskSolution, &region, &smooth, &base).unwrap();
            let b = error_norms_with_rule(&space, &u, &DiskSolution, &region, &smooth, &doubled).unwrap();
            for ((_, x), (_, y)) in a.values.iter().zip(&b.values) {
                assert!(((x - y) / y).abs() < 1e-4, "k={k}: {x} vs {y}");
            }
            // |∇e|^p is not smooth where ∇e vanishes; looser bound
            let w = [NormTag::W1p(1.5)];
            let a = error_norms_with_rule(&space, &u, &DiskSolution, &region, &w, &base).unwrap();
            let b = error_norms_with_rule(&space, &u, &DiskSolution, &region, &w, &doubled).unwrap();
            assert!(((a.values[0].1 - b.values[0].1) / b.values[0].1).abs() < 1e-3);
        }
    }

    #[test]
    fn inverse_ratio_examples() {
        let mesh = gen_square(4, Rectangle::UNIT).unwrap();
        let space = FeSpace::new(&mesh, 2).unwrap();
        let ones = vec![1.0; space.num_dofs()];
        assert_eq!(inverse_ratio(&space, &ones).unwrap(), 0.0);
        assert!(inverse_ratio(&space, &vec![0.0; space.num_dofs()]).is_err());

        let tri = Mesh::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let space = FeSpace::new(&tri, 1).unwrap();
        // |φ|_1 = 1, ‖φ‖_0 = 1/√12, h_min = √2
        let r = inverse_ratio(&space, &[1.0, 0.0, 0.0]).unwrap();
        assert!((r - 24f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn inverse_ratio_band_p1() {
        let s = inverse_ratio_sweep(1, &[8, 16, 32, 64], 7).unwrap();
        assert!(s.spread <= 4.0, "{:?}", s.ratios);
    }

    #[test]
    fn global_l2_finite_with_singularity() {
        let (mesh, u) = disk_solve(10, 1);
        let space = FeSpace::new(&mesh, 1).unwrap();
        let g = global_l2_error(&space, &u, &DiskSolution).unwrap();
        let omega0 = SubdomainSpec::annulus(Point2::ORIGIN, 0.2, 1.0);
        let local = error_norms(&space, &u, &DiskSolution, &omega0, &[NormTag::L2]).unwrap();
        assert!(g.is_finite() && g > local.values[0].1);
    }

    #[test]
    fn global_l2_singular_split_is_accurate() {
        // ∫ over the unit-disk fan of (log r)²/(16π²)·4 with u_h = 0: compare the
        // split rule on a hexagon against the polar value on the same polygon
        let mesh = gen_disk(1, 1.0, Point2::ORIGIN).unwrap();
        let space = FeSpace::new(&mesh, 1).unwrap();
        let u = vec![0.0; space.num_dofs()];
        let g = global_l2_error(&space, &u, &DiskSolution).unwrap();
        // polar reference over the hexagon: r ranges to R(θ) = cos(π/6)/cos(θ - θ_c)
        let (nodes, weights) = gauss_legendre_unit(60);
        let mut reference = 0.0;
        for sector in 0..6 {
            let mid = std::f64::consts::PI / 3.0 * (sector as f64 + 0.5);
            for (ta, wa) in nodes.iter().zip(&weights) {
                let theta = std::f64::consts::PI / 3.0 * (sector as f64 + ta);
                let rmax = (std::f64::consts::PI / 6.0).cos() / (theta - mid).cos();
                // ∫_0^R (ln r)² r dr = R²/2 ((ln R)² - ln R + 1/2)
                let lr = rmax.ln();
                let radial = rmax * rmax / 2.0 * (lr * lr - lr + 0.5);
                reference += wa * std::f64::consts::PI / 3.0 * radial / (4.0 * std::f64::consts::PI.powi(2));
            }
        }
        assert!((g * g - reference).abs() < 1e-6 * reference, "{} vs {}", g * g, reference);
    }
}
