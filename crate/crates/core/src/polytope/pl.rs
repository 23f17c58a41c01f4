//! Piecewise-affine functions on a polytope and the polyhedron
//! `{(m, h) : m in P, h <= phi(m)}` they bound.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{affine_dimension, dot, Inequality, LatticePolytope, PolytopeError, RationalPolytope, Result};
use crate::arith::{rat, Rational};

/// `m -> <slope, m> + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    pub slope: Vec<i64>,
    pub constant: Rational,
}

impl AffinePiece {
    pub fn eval(&self, m: &[Rational]) -> Rational {
        let s: Vec<Rational> = self.slope.iter().map(|&x| rat(x as i128)).collect();
        dot(&s, m) + self.constant
    }
}

/// Pointwise minimum of affine pieces with integral slopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    pieces: Vec<AffinePiece>,
}

impl PLFunction {
    /// Exact duplicates are dropped.
    pub fn new(mut pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(PolytopeError::InvalidPLFunction);
        }
        let n = pieces[0].slope.len();
        if pieces.iter().any(|p| p.slope.len() != n) {
            return Err(PolytopeError::InvalidPLFunction);
        }
        let mut seen = Vec::new();
        pieces.retain(|p| {
            if seen.contains(p) {
                false
            } else {
                seen.push(p.clone());
                true
            }
        });
        Ok(PLFunction { pieces })
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].slope.len()
    }

    pub fn eval(&self, m: &[Rational]) -> Rational {
        self.pieces.iter().map(|p| p.eval(m)).min().expect("nonempty")
    }
}

/// A maximal domain of linearity of `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationCell {
    pub piece: usize,
    pub polytope: RationalPolytope,
    /// Present when every vertex is integral.
    pub lattice: Option<LatticePolytope>,
}

#[derive(Debug, Clone)]
pub struct Degeneration {
    /// Facets of the unbounded polyhedron in coordinates `(m, h)`.
    pub inequalities: Vec<Inequality>,
    pub cells: Vec<DegenerationCell>,
    /// Cells sharing a codimension-one face carry different affine pieces.
    pub strictly_convex: bool,
    pub cell_volume_sum: Rational,
    pub volume: Rational,
}

/// `{(m, h) : m in P, h <= phi(m)}` and the subdivision of `P` into the
/// domains of linearity of `phi`.
pub fn degeneration_polytope(p: &LatticePolytope, phi: &PLFunction) -> Result<Degeneration> {
    let d = p.dim();
    if phi.dim() != d {
        return Err(PolytopeError::InvalidPLFunction);
    }
    let mut cells = Vec::new();
    for (j, pj) in phi.pieces().iter().enumerate() {
        let mut ineqs: Vec<Inequality> = p.facets().to_vec();
        for (i, pi) in phi.pieces().iter().enumerate() {
            if i == j {
                continue;
            }
            // phi_j <= phi_i  <=>  <s_i - s_j, m> >= c_j - c_i
            let normal = pi
                .slope
                .iter()
                .zip(&pj.slope)
                .map(|(a, b)| rat((a - b) as i128))
                .collect();
            ineqs.push(Inequality { normal, rhs: pj.constant - pi.constant });
        }
        let verts = super::vertices_of_halfspaces(&ineqs, d);
        if affine_dimension(&verts) != d || verts.len() <= d {
            continue;
        }
        let polytope = RationalPolytope::from_points(d, verts)?;
        let lattice = polytope.to_lattice();
        cells.push(DegenerationCell { piece: j, polytope, lattice });
    }

    let mut inequalities: Vec<Inequality> = p
        .facets()
        .iter()
        .map(|f| {
            let mut normal = f.normal.clone();
            normal.push(Rational::zero());
            Inequality { normal, rhs: f.rhs }
        })
        .collect();
    for c in &cells {
        let piece = &phi.pieces()[c.piece];
        let mut normal: Vec<Rational> = piece.slope.iter().map(|&x| rat(x as i128)).collect();
        normal.push(-Rational::one());
        inequalities.push(Inequality { normal, rhs: -piece.constant });
    }

    let mut strictly_convex = true;
    for a in 0..cells.len() {
        for b in (a + 1)..cells.len() {
            let shared: Vec<_> = cells[a]
                .polytope
                .vertices()
                .iter()
                .filter(|v| cells[b].polytope.vertices().contains(v))
                .cloned()
                .collect();
            if !shared.is_empty() && affine_dimension(&shared) == d - 1 && shared.len() >= d {
                let (pa, pb) = (&phi.pieces()[cells[a].piece], &phi.pieces()[cells[b].piece]);
                if pa == pb {
                    strictly_convex = false;
                }
            }
        }
    }

    let cell_volume_sum = cells.iter().fold(Rational::zero(), |acc, c| acc + c.polytope.volume());
    Ok(Degeneration {
        inequalities,
        cells,
        strictly_convex,
        cell_volume_sum,
        volume: p.volume(),
    })
}
