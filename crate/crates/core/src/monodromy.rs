//! SL2(Z) and unipotent monodromy bookkeeping.
//!
//! Covers transvection invariants, the S/T word decomposition with its
//! abelianization to Z/12, identity factorizations of elliptic fibrations
//! and their splitting, the Kulikov type of a unipotent operator, and the
//! nilpotency of cup product with a class on the 4-torus.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::check::Check;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonodromyError {
    #[error("determinant is {0}, not 1")]
    NotSpecialLinear(i64),
    #[error("trace is {0}, not 2: matrix is not unipotent")]
    NotUnipotent(i64),
    #[error("matrix is the identity")]
    Trivial,
    #[error("factorization product is not the identity")]
    ProductNotIdentity,
    #[error("cut {cut} out of range 1..{len}")]
    CutOutOfRange { cut: usize, len: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("(M - I)^3 != 0: not a surface degeneration monodromy")]
    NotNilpotentOfOrderThree,
    #[error("class is not antisymmetric")]
    NotAntisymmetric,
    #[error("integer overflow")]
    Overflow,
}

pub type Result<T> = core::result::Result<T, MonodromyError>;

fn ck(x: Option<i64>) -> Result<i64> {
    x.ok_or(MonodromyError::Overflow)
}

/// An integer 2x2 matrix of determinant one, `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SL2Matrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl SL2Matrix {
    pub const IDENTITY: SL2Matrix = SL2Matrix { a: 1, b: 0, c: 0, d: 1 };
    /// `T = [[1, 1], [0, 1]]`.
    pub const T: SL2Matrix = SL2Matrix { a: 1, b: 1, c: 0, d: 1 };
    /// `S = [[0, -1], [1, 0]]`.
    pub const S: SL2Matrix = SL2Matrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = ck(a.checked_mul(d))?
            .checked_sub(ck(b.checked_mul(c))?)
            .ok_or(MonodromyError::Overflow)?;
        if det != 1 {
            return Err(MonodromyError::NotSpecialLinear(det));
        }
        Ok(SL2Matrix { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn t_power(k: i64) -> Self {
        SL2Matrix { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn negate(&self) -> Self {
        SL2Matrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn inverse(&self) -> Self {
        SL2Matrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn mul(&self, o: &SL2Matrix) -> Result<SL2Matrix> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            ck(x.checked_mul(y))?
                .checked_add(ck(z.checked_mul(w))?)
                .ok_or(MonodromyError::Overflow)
        };
        Ok(SL2Matrix {
            a: dot(self.a, o.a, self.b, o.c)?,
            b: dot(self.a, o.b, self.b, o.d)?,
            c: dot(self.c, o.a, self.d, o.c)?,
            d: dot(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn pow(&self, e: i64) -> Result<SL2Matrix> {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut out = SL2Matrix::IDENTITY;
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    /// `self * other * self^{-1}`.
    pub fn conjugate(&self, other: &SL2Matrix) -> Result<SL2Matrix> {
        self.mul(other)?.mul(&self.inverse())
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Product of a sequence, left to right.
pub fn product(factors: &[SL2Matrix]) -> Result<SL2Matrix> {
    factors
        .iter()
        .try_fold(SL2Matrix::IDENTITY, |acc, m| acc.mul(m))
}

/// `M = I + n u det(u, .)` with `u` primitive; `n` does not depend on the sign of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransvectionData {
    pub direction: [i64; 2],
    pub amplitude: i64,
}

impl TransvectionData {
    pub fn reconstruct(&self) -> Result<SL2Matrix> {
        let [u1, u2] = self.direction;
        let n = self.amplitude;
        // u det(u, x) = u (u1 x2 - u2 x1): row functional (-u2, u1).
        SL2Matrix::new(1 - n * u1 * u2, n * u1 * u1, -n * u2 * u2, 1 + n * u1 * u2)
    }

    /// Conjugate to the standard transvection `T`.
    pub fn is_standard(&self) -> bool {
        self.amplitude == 1
    }
}

pub fn transvection_invariant(m: &SL2Matrix) -> Result<TransvectionData> {
    if m.trace() != 2 {
        return Err(MonodromyError::NotUnipotent(m.trace()));
    }
    if *m == SL2Matrix::IDENTITY {
        return Err(MonodromyError::Trivial);
    }
    let (n11, n12, n21, n22) = (m.a - 1, m.b, m.c, m.d - 1);
    // Column space of N = M - I is spanned by u.
    let (x, y) = if n11 != 0 || n21 != 0 { (n11, n21) } else { (n12, n22) };
    let g = x.gcd(&y);
    let (mut u1, mut u2) = (x / g, y / g);
    if u1 < 0 || (u1 == 0 && u2 < 0) {
        u1 = -u1;
        u2 = -u2;
    }
    // N[0][1] = n u1^2 and N[1][0] = -n u2^2.
    let amplitude = if u1 != 0 { n12 / (u1 * u1) } else { -n21 / (u2 * u2) };
    let data = TransvectionData { direction: [u1, u2], amplitude };
    debug_assert_eq!(data.reconstruct(), Ok(*m));
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    S,
    T,
}

/// A word `g1^e1 g2^e2 ...` in `S` and `T`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<(Generator, i64)>);

impl Word {
    fn push(&mut self, g: Generator, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.0 == g {
                last.1 += e;
                if g == Generator::S {
                    last.1 = last.1.rem_euclid(4);
                }
                if last.1 == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        let e = if g == Generator::S { e.rem_euclid(4) } else { e };
        if e != 0 {
            self.0.push((g, e));
        }
    }

    pub fn evaluate(&self) -> Result<SL2Matrix> {
        self.0.iter().try_fold(SL2Matrix::IDENTITY, |acc, &(g, e)| {
            let f = match g {
                Generator::T => SL2Matrix::t_power(e),
                Generator::S => SL2Matrix::S.pow(e.rem_euclid(4))?,
            };
            acc.mul(&f)
        })
    }

    /// Image in `Z/12` under `T -> 1`, `S -> 9`.
    pub fn degree(&self) -> u8 {
        let total = self.0.iter().fold(0i64, |acc, &(g, e)| {
            let w = match g {
                Generator::T => e.rem_euclid(12),
                Generator::S => (9 * e).rem_euclid(12),
            };
            (acc + w) % 12
        });
        total as u8
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (i, (g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = match g {
                Generator::S => "S",
                Generator::T => "T",
            };
            write!(f, "{}^{}", name, e)?;
        }
        Ok(())
    }
}

/// Euclidean decomposition of `m` into powers of `S` and `T`.
pub fn word_decompose(m: &SL2Matrix) -> Word {
    let mut word = Word::default();
    let mut r = *m;
    while r.c != 0 {
        // r <- S^{-1} T^{-k} r, recorded as m = word * T^k * S * r.
        let k = r.a.div_euclid(r.c);
        r = SL2Matrix { a: r.a - k * r.c, b: r.b - k * r.d, c: r.c, d: r.d };
        word.push(Generator::T, k);
        r = SL2Matrix { a: r.c, b: r.d, c: -r.a, d: -r.b };
        word.push(Generator::S, 1);
    }
    if r.a == 1 {
        word.push(Generator::T, r.b);
    } else {
        // -T^{-b} = S^2 T^{-b}
        word.push(Generator::S, 2);
        word.push(Generator::T, -r.b);
    }
    word
}

pub fn abelianized_degree(m: &SL2Matrix) -> u8 {
    word_decompose(m).degree()
}

#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub product: SL2Matrix,
    pub length: usize,
    pub is_identity: bool,
    pub all_standard: bool,
    /// Sum of factor degrees in Z/12.
    pub degree_sum: u8,
    /// `Some(length % 12 == 0)` when the product is `I` and all factors are
    /// standard transvections; certified by the degree homomorphism.
    pub divisible_by_12: Option<bool>,
    pub checks: Vec<Check>,
}

pub fn factorization_check(factors: &[SL2Matrix]) -> Result<FactorizationReport> {
    let prod = product(factors)?;
    let is_identity = prod == SL2Matrix::IDENTITY;
    let all_standard = factors
        .iter()
        .all(|m| transvection_invariant(m).is_ok_and(|t| t.is_standard()));
    let degree_sum = factors
        .iter()
        .fold(0u8, |acc, m| (acc + abelianized_degree(m)) % 12);
    let mut checks = vec![
        Check::exact("product = I", is_identity, format!("{}", prod)),
        Check::exact("every factor conjugate to T", all_standard, format!("{} factors", factors.len())),
    ];
    let divisible_by_12 = (is_identity && all_standard).then(|| {
        // Each standard factor has degree 1 and deg(I) = 0, so length = 0 mod 12.
        let certified = degree_sum == 0 && factors.len().is_multiple_of(12);
        checks.push(Check::exact(
            "length = 0 mod 12",
            certified,
            format!("length {}, degree sum {}", factors.len(), degree_sum),
        ));
        certified
    });
    Ok(FactorizationReport {
        product: prod,
        length: factors.len(),
        is_identity,
        all_standard,
        degree_sum,
        divisible_by_12,
        checks,
    })
}

/// The two pieces of an identity factorization cut at positions `0` and `cut`.
#[derive(Debug, Clone)]
pub struct SplitReport {
    pub first: Vec<SL2Matrix>,
    pub second: Vec<SL2Matrix>,
    pub first_product: SL2Matrix,
    pub second_product: SL2Matrix,
    /// Both halves have identity monodromy.
    pub trivial_halves: bool,
    pub checks: Vec<Check>,
}

/// Cuts the cyclic word at positions `0` and `cut`, giving
/// `factors[..cut]` and `factors[cut..]`.
pub fn split_fibration(factors: &[SL2Matrix], cut: usize) -> Result<SplitReport> {
    if cut == 0 || cut >= factors.len() {
        return Err(MonodromyError::CutOutOfRange { cut, len: factors.len() });
    }
    if product(factors)? != SL2Matrix::IDENTITY {
        return Err(MonodromyError::ProductNotIdentity);
    }
    let (first, second) = factors.split_at(cut);
    let p1 = product(first)?;
    let p2 = product(second)?;
    let trivial = p1 == SL2Matrix::IDENTITY && p2 == SL2Matrix::IDENTITY;
    let checks = vec![
        Check::exact(
            "half lengths sum to total",
            first.len() + second.len() == factors.len(),
            format!("{} + {}", first.len(), second.len()),
        ),
        Check::exact("half products inverse", p1.mul(&p2)? == SL2Matrix::IDENTITY, ""),
        Check::exact("first half product", p1 == SL2Matrix::IDENTITY, format!("{}", p1)),
        Check::exact("second half product", p2 == SL2Matrix::IDENTITY, format!("{}", p2)),
    ];
    Ok(SplitReport {
        first: first.to_vec(),
        second: second.to_vec(),
        first_product: p1,
        second_product: p2,
        trivial_halves: trivial,
        checks,
    })
}

/// Square integer matrix `M` with `M - I` nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnipotentOperator {
    matrix: Vec<Vec<i64>>,
}

impl UnipotentOperator {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(MonodromyError::NotSquare);
        }
        Ok(UnipotentOperator { matrix })
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    fn log_part(&self) -> Vec<Vec<i128>> {
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| x as i128 - if i == j { 1 } else { 0 })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KulikovType {
    I,
    II,
    III,
}

impl KulikovType {
    /// Nilpotency index of `N = log M`.
    pub fn nilpotency_index(self) -> u8 {
        match self {
            KulikovType::I => 1,
            KulikovType::II => 2,
            KulikovType::III => 3,
        }
    }
}

impl fmt::Display for KulikovType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KulikovType::I => "Type I",
            KulikovType::II => "Type II",
            KulikovType::III => "Type III",
        };
        f.write_str(s)
    }
}

fn is_zero(m: &[Vec<i128>]) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

/// Type by the nilpotency of `M - I`, which equals that of `log M` for
/// unipotent `M`.
pub fn classify_kulikov(m: &UnipotentOperator) -> Result<KulikovType> {
    let n = m.log_part();
    let n2 = crate::arith::mat_mul(&n, &n).map_err(|_| MonodromyError::Overflow)?;
    let n3 = crate::arith::mat_mul(&n2, &n).map_err(|_| MonodromyError::Overflow)?;
    if !is_zero(&n3) {
        return Err(MonodromyError::NotNilpotentOfOrderThree);
    }
    Ok(if is_zero(&n) {
        KulikovType::I
    } else if is_zero(&n2) {
        KulikovType::II
    } else {
        KulikovType::III
    })
}

/// Degree-2 class `sum a_ij e_i ^ e_j` on the 4-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CohomologyClassT4 {
    a: [[i64; 4]; 4],
}

impl CohomologyClassT4 {
    pub fn new(a: [[i64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if a[i][j] != -a[j][i] {
                    return Err(MonodromyError::NotAntisymmetric);
                }
            }
        }
        Ok(CohomologyClassT4 { a })
    }

    /// From `(a12, a13, a14, a23, a24, a34)`.
    pub fn from_coefficients(c: [i64; 6]) -> Self {
        let mut a = [[0i64; 4]; 4];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (&(i, j), &v) in pairs.iter().zip(c.iter()) {
            a[i][j] = v;
            a[j][i] = -v;
        }
        CohomologyClassT4 { a }
    }

    pub fn coefficient(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// `a12 a34 - a13 a24 + a14 a23`; `L ^ L = 2 Pf(L) e1234`.
    pub fn pfaffian(&self) -> i64 {
        let a = &self.a;
        a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]
    }

    /// Matrix of `x -> L ^ x` on the exterior algebra of `Z^4`, in the
    /// basis of subsets `e_S` indexed by bitmask `S`.
    pub fn wedge_operator(&self) -> Vec<Vec<i64>> {
        let mut op = vec![vec![0i64; 16]; 16];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let coeff = self.a[i][j];
                if coeff == 0 {
                    continue;
                }
                let s = (1usize << i) | (1usize << j);
                for t in 0..16usize {
                    if let Some((mask, sign)) = wedge_basis(s, t) {
                        op[mask][t] += sign * coeff;
                    }
                }
            }
        }
        op
    }
}

/// `e_S ^ e_T = sign e_{S u T}`, or `None` when `S` and `T` meet.
pub fn wedge_basis(s: usize, t: usize) -> Option<(usize, i64)> {
    if s & t != 0 {
        return None;
    }
    // Count pairs (i in S, j in T) with i > j.
    let mut inversions = 0u32;
    for i in 0..4 {
        if s & (1 << i) != 0 {
            inversions += (t & ((1 << i) - 1)).count_ones();
        }
    }
    Some((s | t, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

/// Nilpotency order of cup product with `L`: 1, 2 or 3.
pub fn cup_nilpotency(l: &CohomologyClassT4) -> u8 {
    if l.is_zero() {
        1
    } else if l.pfaffian() == 0 {
        2
    } else {
        3
    }
}

/// `exp(N) = I + N + N^2/2` for the wedge operator `N` of `L`; integral
/// because `N^2` is divisible by 2 and `N^3 = 0`.
pub fn cup_monodromy(l: &CohomologyClassT4) -> Result<UnipotentOperator> {
    let n: Vec<Vec<i128>> = crate::arith::widen(&l.wedge_operator());
    let n2 = crate::arith::mat_mul(&n, &n).map_err(|_| MonodromyError::Overflow)?;
    let mut m = vec![vec![0i64; 16]; 16];
    for i in 0..16 {
        for j in 0..16 {
            debug_assert!(n2[i][j] % 2 == 0);
            let v = n[i][j] + n2[i][j] / 2 + if i == j { 1 } else { 0 };
            m[i][j] = i64::try_from(v).map_err(|_| MonodromyError::Overflow)?;
        }
    }
    UnipotentOperator::new(m)
}
