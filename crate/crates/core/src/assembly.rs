//! Petrov-Galerkin system assembly.
//!
//! Rows are test functions (standard Lagrange basis vanishing on the mesh
//! boundary), columns are trial functions (the modified basis on boundary
//! elements). Dirichlet columns are eliminated into the right-hand side.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsolve::cholesky_check;
use crate::mesh::TriMesh;
use crate::problems::ProblemSpec;
use crate::quadrature::{rule_for_degree, TriangleRule};
use crate::spaces::{DofMap, ElementGeometry, LagrangeBasis, LocalBasis, NodeStatus};
use crate::sparse::SparseMatrix;

/// Quadrature degrees used by assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyRules {
    pub stiffness_degree: usize,
    pub load_degree: usize,
}

impl AssemblyRules {
    /// Exact stiffness integration and a degree `2k + 2` load rule.
    pub fn for_degree(k: usize) -> Self {
        Self {
            stiffness_degree: 2 * (k - 1),
            load_degree: 2 * k + 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub rhs: Vec<f64>,
    pub dofmap: DofMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisChoice {
    TestSpace,
    TrialSpace,
}

/// `S_il = ∫_T ∇φ_l · ∇φ_i` for the standard basis.
fn standard_stiffness(
    basis: &LagrangeBasis,
    geo: &ElementGeometry,
    rule: &TriangleRule,
) -> DMatrix<f64> {
    let n = basis.len();
    let mut s = DMatrix::zeros(n, n);
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        let grads = basis.gradients(l, geo);
        let w = w * geo.area;
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += w * grads[i].dot(&grads[j]);
            }
        }
    }
    s
}

fn check_element(dofmap: &DofMap, local_bases: &[LocalBasis], t: usize, n: usize) -> Result<()> {
    let found = dofmap.element_to_global[t].len();
    if found != n {
        return Err(Error::InconsistentDof {
            element: t,
            expected: n,
            found,
        });
    }
    let lb = local_bases
        .get(t)
        .ok_or_else(|| Error::DimensionMismatch(format!("no local basis for element {t}")))?;
    if lb.coeffs.nrows() != n || lb.coeffs.ncols() != n {
        return Err(Error::InconsistentDof {
            element: t,
            expected: n,
            found: lb.coeffs.nrows(),
        });
    }
    Ok(())
}

fn check_inputs(mesh: &TriMesh, dofmap: &DofMap, local_bases: &[LocalBasis]) -> Result<()> {
    if dofmap.element_to_global.len() != mesh.n_elements() || local_bases.len() != mesh.n_elements()
    {
        return Err(Error::DimensionMismatch(format!(
            "{} elements, {} dof rows, {} local bases",
            mesh.n_elements(),
            dofmap.element_to_global.len(),
            local_bases.len()
        )));
    }
    Ok(())
}

pub fn assemble(
    mesh: &TriMesh,
    dofmap: &DofMap,
    local_bases: &[LocalBasis],
    problem: &ProblemSpec,
    rules: &AssemblyRules,
) -> Result<AssembledSystem> {
    check_inputs(mesh, dofmap, local_bases)?;
    let basis = LagrangeBasis::new(dofmap.k)?;
    let n = basis.len();
    let stiff_rule = rule_for_degree(rules.stiffness_degree)?;
    let load_rule = rule_for_degree(rules.load_degree)?;

    let mut triplets = Vec::with_capacity(mesh.n_elements() * n * n);
    let mut rhs = vec![0.0; dofmap.n_unknowns];
    for t in 0..mesh.n_elements() {
        check_element(dofmap, local_bases, t, n)?;
        let geo = ElementGeometry::new(mesh.triangle_points(t));
        let block = standard_stiffness(&basis, &geo, &stiff_rule) * &local_bases[t].coeffs;

        let mut load = DVector::<f64>::zeros(n);
        for (l, w) in load_rule.points.iter().zip(&load_rule.weights) {
            let fw = w * geo.area * problem.source(&geo.point(l));
            for (i, phi) in basis.values(l).iter().enumerate() {
                load[i] += fw * phi;
            }
        }

        let globals = &dofmap.element_to_global[t];
        for (i, &gi) in globals.iter().enumerate() {
            let Some(row) = dofmap.unknown_index[gi] else {
                continue;
            };
            rhs[row] += load[i];
            for (j, &gj) in globals.iter().enumerate() {
                match (dofmap.node_status[gj], dofmap.unknown_index[gj]) {
                    (NodeStatus::Dirichlet(d), _) => rhs[row] -= block[(i, j)] * d,
                    (NodeStatus::Unknown, Some(col)) => triplets.push((row, col, block[(i, j)])),
                    (NodeStatus::Unknown, None) => unreachable!("unknown node without index"),
                }
            }
        }
    }
    let a = SparseMatrix::from_triplets(dofmap.n_unknowns, dofmap.n_unknowns, &triplets)?;
    Ok(AssembledSystem {
        a,
        rhs,
        dofmap: dofmap.clone(),
    })
}

/// Gradient Gram matrix of the chosen space over the unknowns; fails with
/// `NotSpd` if it cannot be Cholesky-factored.
pub fn assemble_gram(
    mesh: &TriMesh,
    dofmap: &DofMap,
    local_bases: &[LocalBasis],
    basis_choice: BasisChoice,
    rules: &AssemblyRules,
) -> Result<SparseMatrix> {
    check_inputs(mesh, dofmap, local_bases)?;
    let basis = LagrangeBasis::new(dofmap.k)?;
    let n = basis.len();
    let rule = rule_for_degree(rules.stiffness_degree)?;
    let mut triplets = Vec::with_capacity(mesh.n_elements() * n * n);
    for t in 0..mesh.n_elements() {
        check_element(dofmap, local_bases, t, n)?;
        let geo = ElementGeometry::new(mesh.triangle_points(t));
        let s = standard_stiffness(&basis, &geo, &rule);
        let block = match basis_choice {
            BasisChoice::TestSpace => s,
            BasisChoice::TrialSpace => {
                let c = &local_bases[t].coeffs;
                c.transpose() * s * c
            }
        };
        let globals = &dofmap.element_to_global[t];
        for (i, &gi) in globals.iter().enumerate() {
            let Some(row) = dofmap.unknown_index[gi] else {
                continue;
            };
            for (j, &gj) in globals.iter().enumerate() {
                if let Some(col) = dofmap.unknown_index[gj] {
                    triplets.push((row, col, block[(i, j)]));
                }
            }
        }
    }
    let g = SparseMatrix::from_triplets(dofmap.n_unknowns, dofmap.n_unknowns, &triplets)?;
    cholesky_check(&g)?;
    Ok(g)
}
