//! Error norms, convergence orders and stability diagnostics.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_point, Point, PointClass, BOUNDARY_TOL};
use crate::mesh::{mesh_stats, ElementClass, TriMesh};
use crate::problems::ProblemSpec;
use crate::quadrature::rule_for_degree;
use crate::spaces::{DofMap, ElementGeometry, LagrangeBasis, LocalBasis};
use crate::sparse::SparseMatrix;

/// Largest system handled by the dense inf-sup computation.
pub const DENSE_LIMIT: usize = 5000;

/// Errors at or below this are rounding noise; orders from them are undefined.
pub const ORDER_NOISE_FLOOR: f64 = 1e-12;

pub const CSV_HEADER: &str =
    "param,h,grad_err,grad_order,l2_err,l2_order,max_err,max_order,alpha_h,kt_dev";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Refinement parameter (J, or I for the annulus).
    pub param: usize,
    pub h: f64,
    pub grad_err: f64,
    pub l2_err: f64,
    pub max_nodal_err: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ErrorOptions {
    /// Quadrature degree; defaults to `2k + 4`.
    pub degree: Option<usize>,
    /// Drop quadrature points outside the true domain.
    pub skip_outside: bool,
}

/// Energy, L2 and max-nodal errors of the trial function with full nodal
/// vector `nodal`, integrated over the straight-sided mesh.
pub fn error_norms(
    mesh: &TriMesh,
    dofmap: &DofMap,
    local_bases: &[LocalBasis],
    nodal: &[f64],
    problem: &ProblemSpec,
    options: &ErrorOptions,
) -> Result<ErrorReport> {
    let exact = problem.exact()?;
    if nodal.len() != dofmap.n_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "{} nodal values for {} nodes",
            nodal.len(),
            dofmap.n_nodes()
        )));
    }
    let basis = LagrangeBasis::new(dofmap.k)?;
    let rule = rule_for_degree(options.degree.unwrap_or(2 * dofmap.k + 4))?;
    let tables: Vec<(Vec<f64>, [f64; 3])> =
        rule.points.iter().map(|l| (basis.values(l), *l)).collect();

    let (mut grad_sq, mut l2_sq) = (0.0, 0.0);
    for (t, local) in local_bases.iter().enumerate() {
        let geo = ElementGeometry::new(mesh.triangle_points(t));
        let coeffs = local.standard_coefficients(&dofmap.local_values(t, nodal));
        for ((values, l), w) in tables.iter().zip(&rule.weights) {
            let p = geo.point(l);
            if options.skip_outside
                && classify_point(&problem.geom, &p, BOUNDARY_TOL) == PointClass::Outside
            {
                continue;
            }
            let uh: f64 = values.iter().zip(coeffs.iter()).map(|(v, c)| v * c).sum();
            let guh = basis
                .gradients(l, &geo)
                .iter()
                .zip(coeffs.iter())
                .fold(Vector2::zeros(), |acc, (g, c)| acc + g * *c);
            let w = w * geo.area;
            grad_sq += w * ((exact.grad)(&p) - guh).norm_squared();
            l2_sq += w * ((exact.u)(&p) - uh).powi(2);
        }
    }
    let max_nodal_err = dofmap
        .unknown_nodes
        .iter()
        .map(|&g| ((exact.u)(&dofmap.node_coords[g]) - nodal[g]).abs())
        .fold(0.0, f64::max);
    Ok(ErrorReport {
        param: 0,
        h: mesh_stats(mesh).h,
        grad_err: grad_sq.sqrt(),
        l2_err: l2_sq.sqrt(),
        max_nodal_err,
    })
}

/// Nodal vector of the trial-space interpolant: `u` at every global node,
/// including the shifted boundary nodes.
pub fn interpolate_ih<U: Fn(&Point) -> f64>(u: U, dofmap: &DofMap) -> Vec<f64> {
    dofmap.node_coords.iter().map(u).collect()
}

/// `log2(coarse / fine)`, undefined when either error is rounding noise.
pub fn order(coarse: f64, fine: f64) -> f64 {
    if coarse > ORDER_NOISE_FLOOR
        && fine > ORDER_NOISE_FLOOR
        && coarse.is_finite()
        && fine.is_finite()
    {
        (coarse / fine).log2()
    } else {
        f64::NAN
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
    /// `orders[i]` compares row `i - 1` with row `i`; the first entry is NaN.
    pub grad_orders: Vec<f64>,
    pub l2_orders: Vec<f64>,
    pub max_orders: Vec<f64>,
    /// Inf-sup estimate per row, NaN where not computed.
    pub alpha_h: Vec<f64>,
    /// Largest `|K̃ - I|` entry per row.
    pub kt_dev: Vec<f64>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{CSV_HEADER}").expect("writing to a String");
        for (i, r) in self.rows.iter().enumerate() {
            writeln!(
                s,
                "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.param,
                r.h,
                r.grad_err,
                self.grad_orders[i],
                r.l2_err,
                self.l2_orders[i],
                r.max_nodal_err,
                self.max_orders[i],
                self.alpha_h[i],
                self.kt_dev[i]
            )
            .expect("writing to a String");
        }
        s
    }
}

pub fn convergence_orders(reports: &[ErrorReport]) -> Result<ConvergenceTable> {
    if reports.len() < 2 {
        return Err(Error::NonDyadicSequence(format!(
            "{} entries, need at least 2",
            reports.len()
        )));
    }
    if let Some(w) = reports.windows(2).find(|w| w[1].param != 2 * w[0].param) {
        return Err(Error::NonDyadicSequence(format!(
            "{} is not followed by {}",
            w[0].param,
            2 * w[0].param
        )));
    }
    let orders = |f: fn(&ErrorReport) -> f64| {
        std::iter::once(f64::NAN)
            .chain(reports.windows(2).map(|w| order(f(&w[0]), f(&w[1]))))
            .collect()
    };
    Ok(ConvergenceTable {
        rows: reports.to_vec(),
        grad_orders: orders(|r| r.grad_err),
        l2_orders: orders(|r| r.l2_err),
        max_orders: orders(|r| r.max_nodal_err),
        alpha_h: vec![f64::NAN; reports.len()],
        kt_dev: vec![f64::NAN; reports.len()],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KtReport {
    pub max_dev: f64,
    /// `(h_T, |K̃ - I|_max)` for each boundary element.
    pub dev_vs_h: Vec<(f64, f64)>,
}

pub fn kt_perturbation_report(mesh: &TriMesh, local_bases: &[LocalBasis]) -> KtReport {
    let dev_vs_h: Vec<(f64, f64)> = mesh
        .element_class
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, ElementClass::Boundary { .. }))
        .map(|(t, _)| (mesh.h_per_element[t], local_bases[t].kt_deviation))
        .collect();
    KtReport {
        max_dev: dev_vs_h.iter().map(|p| p.1).fold(0.0, f64::max),
        dev_vs_h,
    }
}

/// Discrete inf-sup constant: the smallest singular value of
/// `L_test⁻¹ A L_trial⁻ᵀ` with `G = L Lᵀ` the gradient Gram matrices.
pub fn inf_sup_estimate(
    a: &SparseMatrix,
    g_test: &SparseMatrix,
    g_trial: &SparseMatrix,
) -> Result<f64> {
    let n = a.nrows;
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense {
            n,
            limit: DENSE_LIMIT,
        });
    }
    for m in [a, g_test, g_trial] {
        if m.nrows != n || m.ncols != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n}, got {}x{}",
                m.nrows, m.ncols
            )));
        }
    }
    let factor = |g: &SparseMatrix| -> Result<DMatrix<f64>> {
        Ok(g.to_dense().cholesky().ok_or(Error::NotSpd)?.unpack())
    };
    let l_test = factor(g_test)?;
    let l_trial = factor(g_trial)?;
    let x = l_test
        .solve_lower_triangular(&a.to_dense())
        .ok_or(Error::NotSpd)?;
    let m = l_trial
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::NotSpd)?;
    Ok(m.singular_values().min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, assemble_gram, AssemblyRules, BasisChoice};
    use crate::geometry::BoundaryGeometry;
    use crate::mesh::{classify_elements, gen_quarter_ellipse_mesh, gen_unit_square_mesh};
    use crate::problems::{ellipse_test1, polygon_patch};
    use crate::spaces::{build_dof_map, build_local_bases, NodeStatus};
    use approx::assert_abs_diff_eq;

    fn report(param: usize, err: f64) -> ErrorReport {
        ErrorReport {
            param,
            h: 1.0 / param as f64,
            grad_err: err,
            l2_err: err,
            max_nodal_err: err,
        }
    }

    #[test]
    fn published_orders() {
        assert_abs_diff_eq!(order(0.539250e-2, 0.143615e-2), 1.909, epsilon = 1e-3);
        assert_abs_diff_eq!(order(0.183918e-4, 0.230310e-5), 2.997, epsilon = 1e-3);
        assert_eq!(order(0.3, 0.3), 0.0);
        assert!(order(1e-15, 1e-16).is_nan());
    }

    #[test]
    fn orders_table_and_csv() {
        let t =
            convergence_orders(&[report(4, 1e-2), report(8, 2.5e-3), report(16, 2.5e-3)]).unwrap();
        assert!(t.grad_orders[0].is_nan());
        assert_abs_diff_eq!(t.grad_orders[1], 2.0, epsilon = 1e-14);
        assert_eq!(t.l2_orders[2], 0.0);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("4,2.500000e-1,1.000000e-2,NaN,1.000000e-2,NaN,1.000000e-2,NaN,NaN,NaN")
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn non_dyadic_sequences() {
        assert!(matches!(
            convergence_orders(&[report(4, 1.0), report(12, 1.0)]),
            Err(Error::NonDyadicSequence(_))
        ));
        assert!(matches!(
            convergence_orders(&[report(4, 1.0)]),
            Err(Error::NonDyadicSequence(_))
        ));
    }

    #[test]
    fn interpolant_of_polynomial_is_exact_on_polygon() {
        for k in [2, 3] {
            let pb = polygon_patch(k).unwrap();
            let mesh = classify_elements(gen_unit_square_mesh(3).unwrap(), &pb.geom).unwrap();
            let d = pb.d.clone();
            let dm = build_dof_map(&mesh, &pb.geom, k, |p| d(p)).unwrap();
            let bases = build_local_bases(&mesh, &pb.geom, k).unwrap();
            let u = pb.exact().unwrap().u.clone();
            let nodal = interpolate_ih(|p| u(p), &dm);
            let r = error_norms(&mesh, &dm, &bases, &nodal, &pb, &ErrorOptions::default()).unwrap();
            assert!(
                r.grad_err <= 1e-10 && r.l2_err <= 1e-10 && r.max_nodal_err <= 1e-10,
                "{r:?}"
            );
        }
    }

    #[test]
    fn interpolant_of_test1_vanishes_on_dirichlet_nodes() {
        let pb = ellipse_test1(0.5).unwrap();
        let mesh = classify_elements(gen_quarter_ellipse_mesh(8, 0.5).unwrap(), &pb.geom).unwrap();
        let dm = build_dof_map(&mesh, &pb.geom, 2, |_| 0.0).unwrap();
        let u = pb.exact().unwrap().u.clone();
        let nodal = interpolate_ih(|p| u(p), &dm);
        for (v, s) in nodal.iter().zip(&dm.node_status) {
            if matches!(s, NodeStatus::Dirichlet(_)) {
                assert!(v.abs() <= 1e-15);
            }
        }
        assert!(interpolate_ih(|_| 0.0, &dm).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn missing_exact_solution() {
        let geom = BoundaryGeometry::unit_square();
        let pb = crate::problems::ProblemSpec::new(geom.clone(), std::sync::Arc::new(|_| 1.0));
        let mesh = classify_elements(gen_unit_square_mesh(2).unwrap(), &geom).unwrap();
        let dm = build_dof_map(&mesh, &geom, 2, |_| 0.0).unwrap();
        let bases = build_local_bases(&mesh, &geom, 2).unwrap();
        let nodal = vec![0.0; dm.n_nodes()];
        assert!(matches!(
            error_norms(&mesh, &dm, &bases, &nodal, &pb, &ErrorOptions::default()),
            Err(Error::MissingExact)
        ));
    }

    #[test]
    fn polygon_kt_and_inf_sup_are_trivial() {
        let pb = polygon_patch(2).unwrap();
        let mesh = classify_elements(gen_unit_square_mesh(3).unwrap(), &pb.geom).unwrap();
        let d = pb.d.clone();
        let dm = build_dof_map(&mesh, &pb.geom, 2, |p| d(p)).unwrap();
        let bases = build_local_bases(&mesh, &pb.geom, 2).unwrap();
        assert_eq!(kt_perturbation_report(&mesh, &bases).max_dev, 0.0);
        let rules = AssemblyRules::for_degree(2);
        let sys = assemble(&mesh, &dm, &bases, &pb, &rules).unwrap();
        let gt = assemble_gram(&mesh, &dm, &bases, BasisChoice::TestSpace, &rules).unwrap();
        let gw = assemble_gram(&mesh, &dm, &bases, BasisChoice::TrialSpace, &rules).unwrap();
        assert_abs_diff_eq!(
            inf_sup_estimate(&sys.a, &gt, &gw).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn dense_guard() {
        let big = SparseMatrix::identity(DENSE_LIMIT + 1);
        assert!(matches!(
            inf_sup_estimate(&big, &big, &big),
            Err(Error::TooLargeForDense { .. })
        ));
        let id = SparseMatrix::identity(3);
        let neg =
            SparseMatrix::from_triplets(3, 3, &[(0, 0, -1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        assert!(matches!(
            inf_sup_estimate(&id, &neg, &id),
            Err(Error::NotSpd)
        ));
    }
}
