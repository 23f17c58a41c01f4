//! Exact integer and rational matrix routines shared by the lattice,
//! polytope and quantization modules.
//!
//! Integer work is done in `i128` with checked multiplication and addition;
//! overflow is reported as [`Overflow`] rather than wrapping.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rational = Ratio<i128>;

/// Dense row-major matrix of rationals.
pub type RatMatrix = Vec<Vec<Rational>>;

/// Integer arithmetic left the `i128` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow in exact arithmetic")]
pub struct Overflow;

#[inline]
pub(crate) fn cmul(a: i128, b: i128) -> Result<i128, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

#[inline]
pub(crate) fn cadd(a: i128, b: i128) -> Result<i128, Overflow> {
    a.checked_add(b).ok_or(Overflow)
}

#[inline]
pub(crate) fn csub(a: i128, b: i128) -> Result<i128, Overflow> {
    a.checked_sub(b).ok_or(Overflow)
}

pub fn rat(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Widens an `i64` matrix.
pub fn widen(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    m.iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect()
}

/// Narrows back to `i64`, failing if any entry does not fit.
pub fn narrow(m: &[Vec<i128>]) -> Result<Vec<Vec<i64>>, Overflow> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|&x| i64::try_from(x).map_err(|_| Overflow))
                .collect()
        })
        .collect()
}

pub fn narrow_vec(v: &[i128]) -> Result<Vec<i64>, Overflow> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Overflow))
        .collect()
}

pub fn gcd_slice(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| g.gcd(&x))
}

pub fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Result<Vec<Vec<i128>>, Overflow> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0i128; cols]; a.len()];
    for (i, row) in a.iter().enumerate() {
        debug_assert_eq!(row.len(), inner);
        for j in 0..cols {
            let mut acc = 0i128;
            for k in 0..inner {
                acc = cadd(acc, cmul(row[k], b[k][j])?)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<i128>> {
    let mut m = vec![vec![0i128; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Result of reducing a matrix by unimodular column operations.
///
/// `reduced = input * transform` and `transform * inverse = I`. The first
/// `rank` columns of `reduced` are nonzero and in echelon form, the
/// remaining ones are zero.
#[derive(Debug, Clone)]
pub struct ColumnEchelon {
    pub reduced: Vec<Vec<i128>>,
    pub transform: Vec<Vec<i128>>,
    pub inverse: Vec<Vec<i128>>,
    pub rank: usize,
}

impl ColumnEchelon {
    /// Columns of `transform` spanning the integer kernel of the input.
    /// The returned basis is saturated because `transform` is unimodular.
    pub fn kernel(&self) -> Vec<Vec<i128>> {
        let n = self.transform.len();
        (self.rank..n)
            .map(|j| (0..n).map(|i| self.transform[i][j]).collect())
            .collect()
    }
}

/// Column-style Hermite reduction over the integers.
pub fn column_echelon(a: &[Vec<i128>], ncols: usize) -> Result<ColumnEchelon, Overflow> {
    let mut work: Vec<Vec<i128>> = a.to_vec();
    let mut transform = identity(ncols);
    let mut inverse = identity(ncols);
    let mut pivot = 0usize;

    // col_j -= q * col_p on work/transform; row_p += q * row_j on inverse.
    let axpy = |work: &mut Vec<Vec<i128>>,
                transform: &mut Vec<Vec<i128>>,
                inverse: &mut Vec<Vec<i128>>,
                j: usize,
                p: usize,
                q: i128|
     -> Result<(), Overflow> {
        for row in work.iter_mut().chain(transform.iter_mut()) {
            row[j] = csub(row[j], cmul(q, row[p])?)?;
        }
        for c in 0..inverse[p].len() {
            let v = cmul(q, inverse[j][c])?;
            inverse[p][c] = cadd(inverse[p][c], v)?;
        }
        Ok(())
    };
    let swap = |work: &mut Vec<Vec<i128>>,
                transform: &mut Vec<Vec<i128>>,
                inverse: &mut Vec<Vec<i128>>,
                i: usize,
                j: usize| {
        for row in work.iter_mut().chain(transform.iter_mut()) {
            row.swap(i, j);
        }
        inverse.swap(i, j);
    };

    for r in 0..work.len() {
        if pivot >= ncols {
            break;
        }
        for j in (pivot + 1)..ncols {
            while work[r][j] != 0 {
                if work[r][pivot] == 0 {
                    swap(&mut work, &mut transform, &mut inverse, pivot, j);
                    continue;
                }
                let q = Integer::div_floor(&work[r][j], &work[r][pivot]);
                axpy(&mut work, &mut transform, &mut inverse, j, pivot, q)?;
                if work[r][j] != 0 {
                    swap(&mut work, &mut transform, &mut inverse, pivot, j);
                }
            }
        }
        if work[r][pivot] != 0 {
            if work[r][pivot] < 0 {
                for row in work.iter_mut().chain(transform.iter_mut()) {
                    row[pivot] = -row[pivot];
                }
                for v in inverse[pivot].iter_mut() {
                    *v = -*v;
                }
            }
            pivot += 1;
        }
    }
    Ok(ColumnEchelon {
        reduced: work,
        transform,
        inverse,
        rank: pivot,
    })
}

/// Unimodular matrix whose first row is the given primitive vector.
pub fn complete_to_unimodular(c: &[i128]) -> Result<Option<Vec<Vec<i128>>>, Overflow> {
    let ech = column_echelon(&[c.to_vec()], c.len())?;
    if ech.rank != 1 || ech.reduced[0][0] != 1 {
        return Ok(None);
    }
    // c * V = e1, so c is the first row of V^{-1}.
    Ok(Some(ech.inverse))
}

/// Diagonal of the Smith normal form (nonzero invariant factors only).
pub fn invariant_factors(a: &[Vec<i128>]) -> Result<Vec<i128>, Overflow> {
    let mut m: Vec<Vec<i128>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0usize;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in (t + 1)..rows {
                let q = Integer::div_floor(&m[i][t], &p);
                if q != 0 {
                    for j in t..cols {
                        m[i][j] = csub(m[i][j], cmul(q, m[t][j])?)?;
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in (t + 1)..cols {
                let q = Integer::div_floor(&m[t][j], &p);
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] = csub(row[j], cmul(q, row[t])?)?;
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remainder in row/column t to the pivot.
                let mut best = (t, t);
                for i in (t + 1)..rows {
                    if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in (t + 1)..cols {
                    if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                m.swap(t, best.0);
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // Divisibility: fold any offending row into row t.
            let p = m[t][t];
            let offending = ((t + 1)..rows)
                .find(|&i| ((t + 1)..cols).any(|j| m[i][j] % p != 0));
            match offending {
                Some(i) => {
                    for j in t..cols {
                        m[t][j] = cadd(m[t][j], m[i][j])?;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    Ok(out)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &[Vec<i128>]) -> Result<i128, Overflow> {
    let n = a.len();
    if n == 0 {
        return Ok(1);
    }
    let mut m = a.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = ((k + 1)..n).find(|&i| m[i][k] != 0) else {
                return Ok(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = csub(cmul(m[i][j], m[k][k])?, cmul(m[i][k], m[k][j])?)?;
                m[i][j] = num / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

pub fn to_rational(a: &[Vec<i128>]) -> RatMatrix {
    a.iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let d = f * m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right null space `{x : m x = 0}`.
pub fn nullspace(m: &RatMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -w[r][f];
            }
            v
        })
        .collect()
}

/// Unique solution of a square system, or `None` when singular.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n]).collect())
}

/// Solves `x * basis = target` for a row combination `x`, if one exists.
pub fn solve_row_combination(basis: &RatMatrix, target: &[Rational]) -> Option<Vec<Rational>> {
    let k = basis.len();
    let n = target.len();
    // Columns of the augmented system are the basis rows.
    let mut aug: RatMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<Rational> = (0..k).map(|i| basis[i][j]).collect();
            row.push(target[j]);
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][k];
    }
    Some(x)
}

/// Clears denominators and divides by the content, giving a primitive
/// integer vector on the same ray.
pub fn primitive_integer(v: &[Rational]) -> Result<Vec<i128>, Overflow> {
    let l = v.iter().fold(1i128, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i128> = v
        .iter()
        .map(|x| cmul(*x.numer(), l / x.denom()))
        .collect::<Result<_, _>>()?;
    let g = gcd_slice(&ints);
    if g == 0 {
        return Ok(ints);
    }
    Ok(ints.into_iter().map(|x| x / g).collect())
}

pub fn is_integral(x: &Rational) -> bool {
    x.is_integer()
}

pub fn abs_rat(x: Rational) -> Rational {
    x.abs()
}
