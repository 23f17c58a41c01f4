//! Exact rational polytopes in dimension at most 4.
//!
//! Facets are found by brute force over affinely independent `dim`-subsets
//! of the vertex set and kept when they support the whole set; vertices of
//! a halfspace system are found dually from `dim`-subsets of inequalities.
//! This is quadratic-to-quartic in the input but exact, which is what the
//! desk-scale fixtures need.

mod classify;
mod pl;
mod torus;

pub use classify::{canonical_form_2d, classify_reflexive_2d, REFLEXIVE_SEARCH_RADIUS};
pub use pl::{degeneration_polytope, AffinePiece, Degeneration, DegenerationCell, PLFunction};
pub use torus::{torus_subdivision_check, Subdivision, TorusDefect, TorusReport};

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, primitive_integer, rat, Overflow, RatMatrix, Rational};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("dimension {0} outside 1..=4")]
    UnsupportedDimension(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("points span an affine space of dimension {got} < {expected}")]
    NotFullDimensional { expected: usize, got: usize },
    #[error("origin is not in the interior")]
    OriginNotInterior,
    #[error("piecewise-linear function has no pieces or wrong slope length")]
    InvalidPLFunction,
    #[error("level must be at least 1")]
    InvalidLevel,
    #[error("torus periods must be positive")]
    InvalidTorus,
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

pub type Result<T> = core::result::Result<T, PolytopeError>;

pub type Point = Vec<Rational>;

/// `<normal, x> >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub normal: Vec<Rational>,
    pub rhs: Rational,
}

impl Inequality {
    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) - self.rhs
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        !self.slack(x).is_negative()
    }

    /// The normal as a primitive integer vector (facets are stored that way).
    pub fn integer_normal(&self) -> Vec<i128> {
        self.normal.iter().map(|x| x.to_integer()).collect()
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub(crate) fn to_points(vs: &[Vec<i64>]) -> Vec<Point> {
    vs.iter()
        .map(|v| v.iter().map(|&x| rat(x as i128)).collect())
        .collect()
}

/// Dimension of the affine hull.
pub fn affine_dimension(points: &[Point]) -> usize {
    let Some(p0) = points.first() else { return 0 };
    let diffs: RatMatrix = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        return 0;
    }
    arith::rank(&diffs)
}

fn dedup_points(points: &mut Vec<Point>) {
    points.sort();
    points.dedup();
}

/// Calls `f` on every increasing `k`-subset of `0..n`.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for m in (pos + 1)..k {
                    idx[m] = idx[m - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return;
        }
    }
}

/// Supporting hyperplanes of a full-dimensional point set, each with a
/// primitive integer normal pointing inwards.
pub fn facets_of(points: &[Point], dim: usize) -> Result<Vec<Inequality>> {
    let mut out: Vec<Inequality> = Vec::new();
    let mut err = None;
    for_each_subset(points.len(), dim, |idx| {
        if err.is_some() {
            return;
        }
        let p0 = &points[idx[0]];
        let rows: RatMatrix = idx[1..]
            .iter()
            .map(|&i| points[i].iter().zip(p0).map(|(a, b)| a - b).collect())
            .collect();
        let ns = if rows.is_empty() {
            // dim == 1: the hyperplane is the point itself.
            vec![vec![Rational::one()]]
        } else {
            arith::nullspace(&rows, dim)
        };
        if ns.len() != 1 {
            return;
        }
        let normal = match primitive_integer(&ns[0]) {
            Ok(n) => n,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let mut normal: Vec<Rational> = normal.into_iter().map(rat).collect();
        let mut rhs = dot(&normal, p0);
        let mut above = false;
        let mut below = false;
        for p in points {
            let s = dot(&normal, p) - rhs;
            above |= s.is_positive();
            below |= s.is_negative();
        }
        if above && below {
            return;
        }
        if below {
            for x in normal.iter_mut() {
                *x = -*x;
            }
            rhs = -rhs;
        }
        let ineq = Inequality { normal, rhs };
        if !out.contains(&ineq) {
            out.push(ineq);
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    out.sort_by(|a, b| (&a.normal, a.rhs).cmp(&(&b.normal, b.rhs)));
    Ok(out)
}

/// Extreme points of the region cut out by `ineqs` (assumed bounded).
pub fn vertices_of_halfspaces(ineqs: &[Inequality], dim: usize) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for_each_subset(ineqs.len(), dim, |idx| {
        let a: RatMatrix = idx.iter().map(|&i| ineqs[i].normal.clone()).collect();
        let b: Vec<Rational> = idx.iter().map(|&i| ineqs[i].rhs).collect();
        if let Some(x) = arith::solve(&a, &b) {
            if ineqs.iter().all(|h| h.holds(&x)) {
                out.push(x);
            }
        }
    });
    dedup_points(&mut out);
    out
}

fn extreme_points(points: &[Point], facets: &[Inequality], dim: usize) -> Vec<Point> {
    let mut out: Vec<Point> = points
        .iter()
        .filter(|p| {
            let tight: RatMatrix = facets
                .iter()
                .filter(|f| f.slack(p).is_zero())
                .map(|f| f.normal.clone())
                .collect();
            !tight.is_empty() && arith::rank(&tight) == dim
        })
        .cloned()
        .collect();
    dedup_points(&mut out);
    out
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(PolytopeError::UnsupportedDimension(dim));
    }
    Ok(())
}

/// Full-dimensional polytope with rational vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Inequality>,
}

impl RationalPolytope {
    /// Convex hull of `points`; non-extreme points are discarded and the
    /// vertices sorted lexicographically.
    pub fn from_points(dim: usize, points: Vec<Point>) -> Result<Self> {
        check_dim(dim)?;
        for p in &points {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch { expected: dim, got: p.len() });
            }
        }
        let mut points = points;
        dedup_points(&mut points);
        let got = affine_dimension(&points);
        if got != dim {
            return Err(PolytopeError::NotFullDimensional { expected: dim, got });
        }
        let facets = facets_of(&points, dim)?;
        let vertices = extreme_points(&points, &facets, dim);
        Ok(RationalPolytope { dim, vertices, facets })
    }

    /// Bounded region `{x : <a_i, x> >= b_i}`, when it is full-dimensional.
    pub fn from_inequalities(dim: usize, ineqs: &[Inequality]) -> Result<Self> {
        check_dim(dim)?;
        let vs = vertices_of_halfspaces(ineqs, dim);
        Self::from_points(dim, vs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Inequality] {
        &self.facets
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| f.holds(x))
    }

    pub fn contains_in_interior(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| f.slack(x).is_positive())
    }

    pub fn origin_is_interior(&self) -> bool {
        self.contains_in_interior(&vec![Rational::zero(); self.dim])
    }

    /// `{y : <x, y> >= -1 for all x in P}`.
    pub fn polar_dual(&self) -> Result<RationalPolytope> {
        if !self.origin_is_interior() {
            return Err(PolytopeError::OriginNotInterior);
        }
        // <n, x> >= c with c < 0 gives the dual vertex n / (-c).
        let points = self
            .facets
            .iter()
            .map(|f| f.normal.iter().map(|a| a / -f.rhs).collect())
            .collect();
        RationalPolytope::from_points(self.dim, points)
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(Rational::is_integer))
    }

    pub fn to_lattice(&self) -> Option<LatticePolytope> {
        if !self.is_lattice() {
            return None;
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| i64::try_from(x.to_integer()).ok()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(LatticePolytope { inner: self.clone(), vertices })
    }

    /// Vertex indices lying on facet `i`.
    fn facet_vertices(&self, i: usize) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.facets[i].slack(&self.vertices[v]).is_zero())
            .collect()
    }

    /// Pulling triangulation: simplices as vertex index lists.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let facet_sets: Vec<Vec<usize>> = (0..self.facets.len()).map(|i| self.facet_vertices(i)).collect();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_face(&all, self.dim, &facet_sets)
    }

    fn face_dim(&self, face: &[usize]) -> usize {
        let pts: Vec<Point> = face.iter().map(|&i| self.vertices[i].clone()).collect();
        affine_dimension(&pts)
    }

    fn triangulate_face(&self, face: &[usize], k: usize, facet_sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![face[0]]];
        }
        let apex = face[0];
        let mut subfaces: Vec<Vec<usize>> = Vec::new();
        for fs in facet_sets {
            let sub: Vec<usize> = face.iter().copied().filter(|v| fs.contains(v)).collect();
            if sub.len() < k || sub.contains(&apex) || subfaces.contains(&sub) {
                continue;
            }
            if self.face_dim(&sub) == k - 1 {
                subfaces.push(sub);
            }
        }
        let mut out = Vec::new();
        for sub in subfaces {
            for mut s in self.triangulate_face(&sub, k - 1, facet_sets) {
                s.push(apex);
                out.push(s);
            }
        }
        out
    }

    /// Euclidean volume, exact.
    pub fn volume(&self) -> Rational {
        let mut fact = Rational::one();
        for i in 2..=self.dim {
            fact *= rat(i as i128);
        }
        let mut total = Rational::zero();
        for s in self.triangulate() {
            let base = &self.vertices[s[0]];
            let m: RatMatrix = s[1..]
                .iter()
                .map(|&i| self.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            total += rat_det(&m).abs();
        }
        total / fact
    }

    pub fn support_function(&self, n: &[Rational]) -> Rational {
        self.vertices
            .iter()
            .map(|v| dot(n, v))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

pub(crate) fn rat_det(m: &RatMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let d = f * a[c][k];
                a[r][k] -= d;
            }
        }
    }
    det
}

/// Full-dimensional polytope with integer vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePolytope {
    inner: RationalPolytope,
    vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn from_points(dim: usize, points: &[Vec<i64>]) -> Result<Self> {
        let inner = RationalPolytope::from_points(dim, to_points(points))?;
        Ok(inner.to_lattice().expect("hull of lattice points is a lattice polytope"))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Inequality] {
        &self.inner.facets
    }

    pub fn as_rational(&self) -> &RationalPolytope {
        &self.inner
    }

    pub fn polar_dual(&self) -> Result<RationalPolytope> {
        self.inner.polar_dual()
    }

    /// Origin interior and every facet at lattice distance one from it.
    pub fn is_reflexive(&self) -> bool {
        self.inner.origin_is_interior() && self.inner.facets.iter().all(|f| f.rhs == -Rational::one())
    }

    fn scan(&self, k: i64, interior: bool) -> Result<Vec<Vec<i64>>> {
        if k < 1 {
            return Err(PolytopeError::InvalidLevel);
        }
        let d = self.dim();
        let lo: Vec<i64> = (0..d).map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap_or(0) * k).collect();
        let hi: Vec<i64> = (0..d).map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap_or(0) * k).collect();
        let kr = rat(k as i128);
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let x: Point = cur.iter().map(|&c| rat(c as i128)).collect();
            let ok = self.inner.facets.iter().all(|f| {
                let s = dot(&f.normal, &x) - f.rhs * kr;
                if interior {
                    s.is_positive()
                } else {
                    !s.is_negative()
                }
            });
            if ok {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == d {
                    return Ok(out);
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Integer points of `kP`, by bounding-box scan.
    pub fn lattice_points(&self, k: i64) -> Result<Vec<Vec<i64>>> {
        self.scan(k, false)
    }

    /// Integer points in the interior of `kP`.
    pub fn interior_lattice_points(&self, k: i64) -> Result<Vec<Vec<i64>>> {
        self.scan(k, true)
    }

    /// `max_v <n, v>`.
    pub fn support_function(&self, n: &[i64]) -> i64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(n).map(|(a, b)| a * b).sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    pub fn volume(&self) -> Rational {
        self.inner.volume()
    }

    /// Cartesian product `P x Q`.
    pub fn product(&self, other: &LatticePolytope) -> Result<LatticePolytope> {
        let mut pts = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                let mut v = a.clone();
                v.extend_from_slice(b);
                pts.push(v);
            }
        }
        LatticePolytope::from_points(self.dim() + other.dim(), &pts)
    }

    /// Translate by an integer vector.
    pub fn translate(&self, t: &[i64]) -> Result<LatticePolytope> {
        let pts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
            .collect();
        LatticePolytope::from_points(self.dim(), &pts)
    }
}
