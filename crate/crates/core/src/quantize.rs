//! Bohr–Sommerfeld counts: fibers of a toric moment map at level `k`,
//! intersections of a linear section of a torus fibration with the zero
//! section, and the closedness of a sampled section.

use alloc::vec;
use alloc::vec::Vec;

// Whenever std is in the build graph its inherent float methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::arith::{determinant, rat, Overflow, Rational};
use crate::polytope::{LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantizeError {
    #[error("level must be at least 1")]
    InvalidLevel,
    #[error("section matrix is singular, so the intersection is not finite")]
    Singular,
    #[error("matrix must be square and nonempty")]
    NotSquare,
    #[error("samples do not form a uniform periodic grid: {0}")]
    NonUniformGrid(&'static str),
    #[error("grid spacing {0} exceeds 1e-2")]
    GridTooCoarse(f64),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

pub type Result<T> = core::result::Result<T, QuantizeError>;

/// Largest grid spacing accepted by [`curvature_20`].
pub const MAX_SPACING: f64 = 1e-2;

/// A moment polytope together with a prequantum level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizationInstance {
    polytope: LatticePolytope,
    k: i64,
}

impl QuantizationInstance {
    pub fn new(polytope: LatticePolytope, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(QuantizeError::InvalidLevel);
        }
        Ok(QuantizationInstance { polytope, k })
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn level(&self) -> i64 {
        self.k
    }
}

/// Points of `(1/k) Z^n` in the polytope (`closed`) and in its interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsPoints {
    pub closed: Vec<Vec<Rational>>,
    pub interior: Vec<Vec<Rational>>,
}

/// Scans `(1/k) Z^n` over the bounding box and tests membership with the
/// facet inequalities of the polytope itself.
pub fn bs_points(q: &QuantizationInstance) -> BsPoints {
    let p = q.polytope.as_rational();
    let d = q.polytope.dim();
    let k = q.k;
    let lo: Vec<i64> = (0..d).map(|i| q.polytope.vertices().iter().map(|v| v[i]).min().unwrap_or(0) * k).collect();
    let hi: Vec<i64> = (0..d).map(|i| q.polytope.vertices().iter().map(|v| v[i]).max().unwrap_or(0) * k).collect();
    let mut closed = Vec::new();
    let mut interior = Vec::new();
    let mut cur = lo.clone();
    loop {
        let b: Vec<Rational> = cur.iter().map(|&c| Rational::new(c as i128, k as i128)).collect();
        if p.contains(&b) {
            if p.contains_in_interior(&b) {
                interior.push(b.clone());
            }
            closed.push(b);
        }
        let mut i = 0;
        loop {
            if i == d {
                return BsPoints { closed, interior };
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

/// The matching `b -> k b` between closed Bohr–Sommerfeld points and the
/// monomial basis `k P ∩ Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub level: i64,
    pub bs_count: usize,
    pub monomial_count: usize,
    pub pairs: Vec<(Vec<Rational>, Vec<i64>)>,
    pub bijective: bool,
}

pub fn correspondence_check(q: &QuantizationInstance) -> Result<Correspondence> {
    let bs = bs_points(q);
    let mut monomials = q.polytope.lattice_points(q.k)?;
    monomials.sort();
    let kr = rat(q.k as i128);
    let mut pairs = Vec::with_capacity(bs.closed.len());
    let mut images = Vec::with_capacity(bs.closed.len());
    for b in &bs.closed {
        let m: Vec<i64> = b.iter().map(|x| (x * kr).to_integer() as i64).collect();
        images.push(m.clone());
        pairs.push((b.clone(), m));
    }
    images.sort();
    let injective = images.windows(2).all(|w| w[0] != w[1]);
    Ok(Correspondence {
        level: q.k,
        bs_count: bs.closed.len(),
        monomial_count: monomials.len(),
        bijective: injective && images == monomials,
        pairs,
    })
}

/// For each disc area `a`, whether `k a` is within `tol` of an integer.
pub fn disk_criterion(areas: &[f64], k: i64, tol: f64) -> Vec<bool> {
    areas
        .iter()
        .map(|&a| {
            let x = a * k as f64;
            (x - x.round()).abs() <= tol
        })
        .collect()
}

/// Intersection of the graph of `x -> S x` with the zero section of the
/// torus `R^n / Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionCount {
    pub determinant: i128,
    /// Solutions `x in [0, 1)^n` of `S x ≡ 0`, each with denominators
    /// dividing `|det S|`.
    pub points: Vec<Vec<Rational>>,
    pub count: usize,
    pub matches_determinant: bool,
}

fn check_square(s: &[Vec<i64>]) -> Result<usize> {
    let n = s.len();
    if n == 0 || s.iter().any(|r| r.len() != n) {
        return Err(QuantizeError::NotSquare);
    }
    Ok(n)
}

/// Every solution has the form `y / D` with `D = |det S|` and
/// `y in [0, D)^n`, since `D S^{-1}` is integral; enumerate those.
pub fn section_bs_count(s: &[Vec<i64>]) -> Result<SectionCount> {
    let n = check_square(s)?;
    let wide: Vec<Vec<i128>> = s.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let det = determinant(&wide)?;
    if det == 0 {
        return Err(QuantizeError::Singular);
    }
    let d = det.abs();
    let mut points = Vec::new();
    let mut y = vec![0i128; n];
    loop {
        let zero = wide.iter().all(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum::<i128>() % d == 0);
        if zero {
            points.push(y.iter().map(|&v| Rational::new(v, d)).collect());
        }
        let mut i = 0;
        loop {
            if i == n {
                let count = points.len();
                return Ok(SectionCount { determinant: det, points, count, matches_determinant: count as i128 == d });
            }
            y[i] += 1;
            if y[i] < d {
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

/// A section `x -> s(x)` of the cotangent torus bundle, values taken mod
/// `Z^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusSection {
    Linear(Vec<Vec<i64>>),
    Sampled(SampledSection),
}

/// Samples of `s` on the grid `h Z^n / Z^n` with `h = 1/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSection {
    n: usize,
    m: usize,
    /// Row-major over grid indices, first coordinate slowest.
    values: Vec<Vec<f64>>,
}

impl SampledSection {
    /// Samples `f` at every grid point.
    pub fn from_fn(n: usize, m: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        if n == 0 || m < 3 {
            return Err(QuantizeError::NonUniformGrid("need n >= 1 and at least 3 points per axis"));
        }
        let h = 1.0 / m as f64;
        let total = m.pow(n as u32);
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; n];
        for flat in 0..total {
            let mut r = flat;
            for i in (0..n).rev() {
                x[i] = (r % m) as f64 * h;
                r /= m;
            }
            let v = f(&x);
            if v.len() != n {
                return Err(QuantizeError::NonUniformGrid("value has wrong length"));
            }
            values.push(v);
        }
        Ok(SampledSection { n, m, values })
    }

    /// Builds a section from `(x, s(x))` rows declared to lie on the grid
    /// of spacing `h`; every grid point must appear exactly once.
    pub fn from_rows(n: usize, h: f64, rows: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        if n == 0 || !(h > 0.0) {
            return Err(QuantizeError::NonUniformGrid("need n >= 1 and h > 0"));
        }
        let mf = 1.0 / h;
        let m = mf.round() as usize;
        if (mf - m as f64).abs() > 1e-6 || m < 3 {
            return Err(QuantizeError::NonUniformGrid("1/h is not an integer >= 3"));
        }
        let total = m.pow(n as u32);
        if rows.len() != total {
            return Err(QuantizeError::NonUniformGrid("row count is not (1/h)^n"));
        }
        let mut values: Vec<Option<Vec<f64>>> = vec![None; total];
        for (x, s) in rows {
            if x.len() != n || s.len() != n {
                return Err(QuantizeError::NonUniformGrid("row has wrong length"));
            }
            let mut flat = 0usize;
            for &xi in x {
                let t = xi * m as f64;
                let idx = t.round();
                if (t - idx).abs() > 1e-6 || idx < 0.0 || idx >= m as f64 {
                    return Err(QuantizeError::NonUniformGrid("point is off the grid"));
                }
                flat = flat * m + idx as usize;
            }
            if values[flat].is_some() {
                return Err(QuantizeError::NonUniformGrid("duplicate grid point"));
            }
            values[flat] = Some(s.clone());
        }
        Ok(SampledSection { n, m, values: values.into_iter().map(|v| v.expect("all filled")).collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    fn neighbour(&self, flat: usize, axis: usize, step: isize) -> usize {
        let stride = self.m.pow((self.n - 1 - axis) as u32);
        let idx = (flat / stride) % self.m;
        let moved = (idx as isize + step).rem_euclid(self.m as isize) as usize;
        flat - idx * stride + moved * stride
    }

    /// Central difference of component `j` along axis `i`; the difference
    /// of values is reduced mod 1 because `s` takes values in a torus.
    fn derivative(&self, flat: usize, i: usize, j: usize) -> f64 {
        let fwd = self.values[self.neighbour(flat, i, 1)][j];
        let bwd = self.values[self.neighbour(flat, i, -1)][j];
        let mut diff = fwd - bwd;
        diff -= diff.round();
        diff * self.m as f64 / 2.0
    }
}

/// The `(2,0)`-part of the curvature, `A_ij = d_i s_j - d_j s_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub max_abs: f64,
    pub closed: bool,
    pub tol: f64,
    /// Grid spacing, `None` for a linear section (computed exactly).
    pub spacing: Option<f64>,
}

pub fn curvature_20(s: &TorusSection, tol: f64) -> Result<CurvatureReport> {
    match s {
        TorusSection::Linear(m) => {
            let n = check_square(m)?;
            let mut max_abs = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    max_abs = max_abs.max((m[j][i] - m[i][j]).abs() as f64);
                }
            }
            Ok(CurvatureReport { max_abs, closed: max_abs < tol, tol, spacing: None })
        }
        TorusSection::Sampled(g) => {
            let h = g.spacing();
            if h > MAX_SPACING {
                return Err(QuantizeError::GridTooCoarse(h));
            }
            let mut max_abs = 0.0f64;
            for flat in 0..g.values.len() {
                for i in 0..g.n {
                    for j in (i + 1)..g.n {
                        let a = g.derivative(flat, i, j) - g.derivative(flat, j, i);
                        max_abs = max_abs.max(a.abs());
                    }
                }
            }
            Ok(CurvatureReport { max_abs, closed: max_abs < tol, tol, spacing: Some(h) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(dim: usize, pts: &[&[i64]]) -> LatticePolytope {
        let v: Vec<Vec<i64>> = pts.iter().map(|p| p.to_vec()).collect();
        LatticePolytope::from_points(dim, &v).unwrap()
    }

    #[test]
    fn segment_counts() {
        let q = QuantizationInstance::new(lp(1, &[&[0], &[1]]), 3).unwrap();
        let bs = bs_points(&q);
        assert_eq!((bs.closed.len(), bs.interior.len()), (4, 2));
        let c = correspondence_check(&QuantizationInstance::new(lp(1, &[&[0], &[1]]), 5).unwrap()).unwrap();
        assert_eq!((c.bs_count, c.monomial_count), (6, 6));
        assert!(c.bijective);
        assert_eq!(QuantizationInstance::new(lp(1, &[&[0], &[1]]), 0).unwrap_err(), QuantizeError::InvalidLevel);
    }

    /// Oracle: Ehrhart polynomial `9/2 k^2 + 9/2 k + 1` of the anticanonical
    /// triangle of P^2, i.e. the number of monomials of degree `3k` in three
    /// variables.
    #[test]
    fn p2_counts() {
        let p2 = lp(2, &[&[-1, -1], &[2, -1], &[-1, 2]]);
        for k in 1..=3i64 {
            let c = correspondence_check(&QuantizationInstance::new(p2.clone(), k).unwrap()).unwrap();
            let d = 3 * k + 2;
            let expect = (d * (d - 1) / 2) as usize;
            assert_eq!(c.bs_count, expect);
            assert_eq!(c.monomial_count, expect);
            assert!(c.bijective);
        }
    }

    #[test]
    fn disk_examples() {
        assert_eq!(disk_criterion(&[0.5, 0.25], 4, 1e-9), vec![true, true]);
        assert_eq!(disk_criterion(&[0.5], 3, 1e-9), vec![false]);
        assert_eq!(disk_criterion(&[1.0 / 3.0, 2.0 / 3.0], 3, 1e-9), vec![true, true]);
    }

    #[test]
    fn section_examples() {
        assert_eq!(section_bs_count(&[vec![2]]).unwrap().count, 2);
        assert_eq!(section_bs_count(&[vec![1, 0], vec![0, 1]]).unwrap().count, 1);
        let c = section_bs_count(&[vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(c.count, 2);
        assert!(c.matches_determinant);
        assert_eq!(section_bs_count(&[vec![1, 2], vec![2, 4]]).unwrap_err(), QuantizeError::Singular);
    }

    #[test]
    fn curvature_examples() {
        let grad = SampledSection::from_fn(2, 200, |x| vec![2.0 * x[0] + x[1], x[0]]).unwrap();
        let r = curvature_20(&TorusSection::Sampled(grad), 1e-6).unwrap();
        assert!(r.closed, "{}", r.max_abs);
        let shear = SampledSection::from_fn(2, 200, |x| vec![x[1], 0.0]).unwrap();
        let r = curvature_20(&TorusSection::Sampled(shear), 1e-6).unwrap();
        assert!((r.max_abs - 1.0).abs() < 1e-9);
        assert!(!r.closed);
        let sym = TorusSection::Linear(vec![vec![2, 1], vec![1, 3]]);
        assert!(curvature_20(&sym, 1e-6).unwrap().closed);
        let skew = TorusSection::Linear(vec![vec![2, 1], vec![0, 3]]);
        assert!(!curvature_20(&skew, 1e-6).unwrap().closed);
        let coarse = SampledSection::from_fn(2, 50, |x| vec![x[0], x[1]]).unwrap();
        assert_eq!(curvature_20(&TorusSection::Sampled(coarse), 1e-6).unwrap_err(), QuantizeError::GridTooCoarse(0.02));
    }

    #[test]
    fn rows_must_form_a_grid() {
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..4).map(|i| (vec![i as f64 * 0.25], vec![0.0])).collect();
        let s = SampledSection::from_rows(1, 0.25, &rows).unwrap();
        assert_eq!(s.spacing(), 0.25);
        let mut bad = rows.clone();
        bad[3].0[0] = 0.3;
        assert!(matches!(SampledSection::from_rows(1, 0.25, &bad), Err(QuantizeError::NonUniformGrid(_))));
        bad[3].0[0] = 0.5;
        assert!(matches!(SampledSection::from_rows(1, 0.25, &bad), Err(QuantizeError::NonUniformGrid(_))));
    }
}
