//! Lattice subdivisions of the torus `R^n / (d_1 Z x ... x d_n Z)`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{affine_dimension, vertices_of_halfspaces, Inequality, LatticePolytope, Point, PolytopeError, Result};
use crate::arith::{rat, Rational};

/// Cells of a subdivision, with the torus periods when it is toroidal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub cells: Vec<LatticePolytope>,
    pub torus: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorusDefect {
    /// Cell `a` and the translate of cell `b` by `shift` share an open set.
    Overlap { a: usize, b: usize, shift: Vec<i64> },
    /// The cells do not fill a fundamental domain.
    Gap { covered: Rational, expected: Rational },
    /// Cell `a` meets the translate of cell `b` in a set that is not a face
    /// of both.
    NonFaceIntersection { a: usize, b: usize, shift: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusReport {
    pub valid: bool,
    pub cell_count: usize,
    pub vertex_counts: Vec<usize>,
    pub covered_volume: Rational,
    pub torus_volume: Rational,
    pub defects: Vec<TorusDefect>,
}

/// Smallest face of `cell` containing the point set `pts` (all in `cell`),
/// as a sorted vertex list.
fn minimal_face(cell: &LatticePolytope, pts: &[Point]) -> Vec<Point> {
    let tight: Vec<&Inequality> = cell
        .facets()
        .iter()
        .filter(|f| pts.iter().all(|p| f.slack(p).is_zero()))
        .collect();
    let mut out: Vec<Point> = cell
        .as_rational()
        .vertices()
        .iter()
        .filter(|v| tight.iter().all(|f| f.slack(v).is_zero()))
        .cloned()
        .collect();
    out.sort();
    out
}

fn shifts(d: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &di in d {
        out = out
            .into_iter()
            .flat_map(|s| {
                [-1i64, 0, 1].into_iter().map(move |e| {
                    let mut t = s.clone();
                    t.push(e * di);
                    t
                })
            })
            .collect();
    }
    out
}

/// Checks that translates of `cells` under `d Z^n` tile `R^n` face to face.
///
/// Cells are representatives inside `[0, d_1] x ... x [0, d_n]`, so only
/// translates by `{-1, 0, 1}^n . d` can meet a representative.
pub fn torus_subdivision_check(d: &[i64], cells: &[LatticePolytope]) -> Result<TorusReport> {
    let n = d.len();
    if n == 0 || d.iter().any(|&x| x <= 0) {
        return Err(PolytopeError::InvalidTorus);
    }
    for c in cells {
        if c.dim() != n {
            return Err(PolytopeError::DimensionMismatch { expected: n, got: c.dim() });
        }
    }
    let mut defects = Vec::new();
    for a in 0..cells.len() {
        for b in a..cells.len() {
            for t in shifts(d) {
                if a == b && t.iter().all(|&x| x == 0) {
                    continue;
                }
                let moved = cells[b].translate(&t)?;
                let ineqs: Vec<Inequality> = cells[a].facets().iter().chain(moved.facets()).cloned().collect();
                let mut meet = vertices_of_halfspaces(&ineqs, n);
                if meet.is_empty() {
                    continue;
                }
                meet.sort();
                if affine_dimension(&meet) == n {
                    defects.push(TorusDefect::Overlap { a, b, shift: t });
                } else if minimal_face(&cells[a], &meet) != meet || minimal_face(&moved, &meet) != meet {
                    defects.push(TorusDefect::NonFaceIntersection { a, b, shift: t });
                }
            }
        }
    }
    let covered_volume = cells.iter().fold(Rational::zero(), |acc, c| acc + c.volume());
    let torus_volume = d.iter().fold(rat(1), |acc, &x| acc * rat(x as i128));
    let overlapping = defects.iter().any(|x| matches!(x, TorusDefect::Overlap { .. }));
    if covered_volume != torus_volume && !overlapping {
        defects.push(TorusDefect::Gap { covered: covered_volume, expected: torus_volume });
    }
    Ok(TorusReport {
        valid: defects.is_empty(),
        cell_count: cells.len(),
        vertex_counts: cells.iter().map(|c| c.vertices().len()).collect(),
        covered_volume,
        torus_volume,
        defects,
    })
}
