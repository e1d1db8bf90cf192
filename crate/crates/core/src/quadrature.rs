//! Symmetric Gauss rules on triangles.
//!
//! All stiffness integrands of the method are polynomials, so a rule of
//! sufficient degree integrates them exactly on the straight elements.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::signed_area;

include!("quadrature_tables.rs");

pub const MAX_REQUESTED_DEGREE: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleRule {
    /// Highest total degree integrated exactly.
    pub degree: usize,
    /// Barycentric coordinates `(l0, l1, l2)`.
    pub points: Vec<[f64; 3]>,
    /// Weights relative to the triangle area; they sum to one.
    pub weights: Vec<f64>,
}

impl TriangleRule {
    fn from_table(degree: usize, table: &[([f64; 3], f64)]) -> Self {
        Self {
            degree,
            points: table.iter().map(|(p, _)| *p).collect(),
            weights: table.iter().map(|(_, w)| *w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and area-scaled weights on triangle `tri`.
    pub fn mapped(&self, tri: &[Point; 3]) -> impl Iterator<Item = (Point, f64)> + '_ {
        let [a, b, c] = *tri;
        let area = signed_area(&a, &b, &c).abs();
        self.points.iter().zip(&self.weights).map(move |(l, w)| {
            let p = Point::from(a.coords * l[0] + b.coords * l[1] + c.coords * l[2]);
            (p, w * area)
        })
    }
}

pub fn rule_for_degree(d: usize) -> Result<TriangleRule> {
    let third = 1.0 / 3.0;
    let rule = match d {
        0 | 1 => TriangleRule {
            degree: 1,
            points: vec![[third, third, third]],
            weights: vec![1.0],
        },
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            TriangleRule {
                degree: 2,
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![third; 3],
            }
        }
        3 | 4 => TriangleRule::from_table(4, &DUNAVANT_4),
        5 => TriangleRule::from_table(5, &DUNAVANT_5),
        6 => TriangleRule::from_table(6, &DUNAVANT_6),
        7 => TriangleRule::from_table(7, &CONICAL_7),
        8 | 9 => TriangleRule::from_table(9, &CONICAL_9),
        10 => TriangleRule::from_table(11, &CONICAL_11),
        _ => return Err(Error::UnsupportedDegree(d)),
    };
    Ok(rule)
}

pub fn integrate<F: Fn(&Point) -> f64>(f: F, tri: &[Point; 3], d: usize) -> Result<f64> {
    let rule = rule_for_degree(d)?;
    Ok(rule.mapped(tri).map(|(p, w)| w * f(&p)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> [Point; 3] {
        [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ]
    }

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact integral of `x^a y^b` over the reference triangle.
    fn monomial_oracle(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn low_order_rules_are_classical() {
        let r1 = rule_for_degree(1).unwrap();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1.weights, vec![1.0]);
        let r2 = rule_for_degree(2).unwrap();
        assert_eq!(r2.len(), 3);
        assert!(r2.points.contains(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]));
        assert!(r2.weights.iter().all(|&w| w == 1.0 / 3.0));
    }

    #[test]
    fn weights_sum_to_one_and_points_are_interior() {
        for d in 0..=MAX_REQUESTED_DEGREE {
            let r = rule_for_degree(d).unwrap();
            assert!(r.degree >= d);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() <= 1e-14, "degree {d}: sum {s}");
            for p in &r.points {
                assert!(p.iter().all(|&l| l > 0.0 && l < 1.0));
                assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn monomials_are_exact_on_reference_triangle() {
        for d in 0..=MAX_REQUESTED_DEGREE {
            let r = rule_for_degree(d).unwrap();
            for a in 0..=r.degree as u32 {
                for b in 0..=(r.degree as u32 - a) {
                    let got = r
                        .mapped(&reference())
                        .map(|(p, w)| w * p.x.powi(a as i32) * p.y.powi(b as i32))
                        .sum::<f64>();
                    let exact = monomial_oracle(a, b);
                    assert!(
                        ((got - exact) / exact).abs() <= 1e-13,
                        "rule {d}: x^{a} y^{b}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let t = reference();
        for d in 0..=MAX_REQUESTED_DEGREE {
            assert_relative_eq!(
                integrate(|_| 1.0, &t, d).unwrap(),
                0.5,
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            integrate(|p| p.x, &t, 1).unwrap(),
            1.0 / 6.0,
            max_relative = 1e-14
        );
        let x2y2 = integrate(|p| p.x * p.x * p.y * p.y, &t, 4).unwrap();
        assert_relative_eq!(x2y2, 1.0 / 180.0, max_relative = 1e-14);
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(
            rule_for_degree(11),
            Err(Error::UnsupportedDegree(11))
        ));
    }
}
