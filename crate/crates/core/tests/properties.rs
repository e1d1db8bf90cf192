use proptest::prelude::*;

use shiftfem::experiment::{discretize, Discretization};
use shiftfem::geometry::{
    ray_boundary_intersection, BoundaryGeometry, Point, RayIntersectionQuery,
};
use shiftfem::mesh::{gen_quarter_annulus_mesh, gen_quarter_ellipse_mesh, signed_area, TriMesh};
use shiftfem::problems::{annulus_test2, ellipse_test1, ProblemSpec};
use shiftfem::quadrature::integrate;
use shiftfem::spaces::{eval_uh, ElementGeometry, LagrangeBasis, NodeStatus};

const SAMPLES_PER_EDGE: usize = 5;

fn cases() -> Vec<(&'static str, Discretization, usize)> {
    let ellipse = ellipse_test1(0.5).unwrap();
    let annulus = annulus_test2(0.5).unwrap();
    let mut out = Vec::new();
    for k in [2, 3] {
        let make = |mesh: TriMesh, pb: &ProblemSpec| discretize(mesh, pb, k).unwrap();
        out.push((
            "ellipse",
            make(gen_quarter_ellipse_mesh(6, 0.5).unwrap(), &ellipse),
            k,
        ));
        out.push((
            "annulus",
            make(gen_quarter_annulus_mesh(8, 4, 0.5).unwrap(), &annulus),
            k,
        ));
    }
    out
}

/// Deterministic pseudo-random values in [-1, 1] from a proptest seed vector.
fn spread(seed: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| seed[i % seed.len()] * (1.0 + 0.37 * i as f64).sin())
        .collect()
}

fn sample_edge(a: &Point, b: &Point) -> impl Iterator<Item = Point> {
    let (a, b) = (*a, *b);
    (1..=SAMPLES_PER_EDGE).map(move |s| {
        let t = s as f64 / (SAMPLES_PER_EDGE + 1) as f64;
        Point::from(a.coords * (1.0 - t) + b.coords * t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trial_functions_are_continuous_across_interior_edges(seed in prop::collection::vec(-1.0..1.0f64, 17)) {
        for (name, d, k) in cases() {
            let nodal = spread(&seed, d.dofmap.n_nodes());
            for ((va, vb), owners) in d.mesh.edge_map() {
                if owners.len() != 2 {
                    continue;
                }
                let (a, b) = (d.mesh.vertices[va], d.mesh.vertices[vb]);
                for p in sample_edge(&a, &b) {
                    let (u0, _) = eval_uh(&d.mesh, &d.dofmap, &d.local_bases, &nodal, owners[0].0, &p);
                    let (u1, _) = eval_uh(&d.mesh, &d.dofmap, &d.local_bases, &nodal, owners[1].0, &p);
                    prop_assert!((u0 - u1).abs() <= 1e-9, "{} k={}: jump {:e} on edge ({}, {})", name, k, (u0 - u1).abs(), va, vb);
                }
            }
        }
    }

    #[test]
    fn test_functions_vanish_on_mesh_boundary(seed in prop::collection::vec(-1.0..1.0f64, 13)) {
        for (name, d, k) in cases() {
            let basis = LagrangeBasis::new(k).unwrap();
            let raw = spread(&seed, d.dofmap.n_nodes());
            let nodal: Vec<f64> = raw
                .iter()
                .zip(&d.dofmap.node_status)
                .map(|(v, s)| if matches!(s, NodeStatus::Unknown) { *v } else { 0.0 })
                .collect();
            for (t, edge) in d.mesh.boundary_elements() {
                let tri = d.mesh.triangle_points(t);
                let geo = ElementGeometry::new(tri);
                let local = d.dofmap.local_values(t, &nodal);
                for p in sample_edge(&tri[edge], &tri[(edge + 1) % 3]) {
                    let v: f64 = basis.values(&geo.barycentric(&p)).iter().zip(&local).map(|(b, c)| b * c).sum();
                    prop_assert!(v.abs() <= 1e-12, "{} k={}: |v| = {:e} on chord of element {}", name, k, v.abs(), t);
                }
            }
        }
    }

    #[test]
    fn ray_intersections_lie_on_curve_and_ray(
        ox in 0.0..0.05f64,
        oy in 0.0..0.05f64,
        phi in 0.01..1.56f64,
        s in 0.7..0.99f64,
    ) {
        let e = 0.5;
        let geom = BoundaryGeometry::ellipse(e).unwrap();
        let origin = Point::new(ox * e, oy);
        let through = Point::new(s * e * phi.cos(), s * phi.sin());
        let p = ray_boundary_intersection(&geom, &RayIntersectionQuery::new(origin, through), 1e-14).unwrap();
        prop_assert!(geom.implicit(&p).abs() <= 1e-12);
        let (u, w) = (through - origin, p - origin);
        let cross = u.x * w.y - u.y * w.x;
        prop_assert!(cross.abs() <= 1e-12 * u.norm() * w.norm());
    }

    #[test]
    fn quadrature_is_affine_invariant(
        m in prop::array::uniform4(-2.0..2.0f64),
        shift in prop::array::uniform2(-1.0..1.0f64),
        deg in 1usize..=10,
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.1);
        let map = |p: &Point| Point::new(m[0] * p.x + m[1] * p.y + shift[0], m[2] * p.x + m[3] * p.y + shift[1]);
        let tri = [Point::new(0.1, 0.2), Point::new(0.9, 0.3), Point::new(0.4, 0.8)];
        let image = [map(&tri[0]), map(&tri[1]), map(&tri[2])];
        prop_assert!((signed_area(&image[0], &image[1], &image[2]).abs()
            - det.abs() * signed_area(&tri[0], &tri[1], &tri[2]).abs()).abs() < 1e-12);
        let f = |p: &Point| (1.0 + p.x - 0.5 * p.y).powi(deg as i32) + p.x * p.y;
        let pulled = integrate(|p| f(&map(p)), &tri, deg).unwrap() * det.abs();
        let direct = integrate(f, &image, deg).unwrap();
        prop_assert!((pulled - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{} vs {}", pulled, direct);
    }
}
