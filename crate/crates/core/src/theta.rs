//! Theta functions, Dedekind eta, and the gluing of the two
//! Landau–Ginzburg models `z + q_1/z`, `z + q_2/z` into a double cover of
//! the elliptic curve `C^x / q^Z`.
//!
//! Conventions: `q_i = e^{2 pi i tau_i}`, `tau = tau_1 + tau_2`,
//! `q = q_1 q_2`, `z = e^{2 pi i zeta}`. Both infinite products are
//! evaluated through the closed form
//! `F(x) = prod_{i>=1} (1 + q^{2i-1}/x)(1 + q^{2i-1} x)` with
//! `x = q_2 z^2` for the odd product `W'_1` and `x = z^2 / q_1` for the
//! even product `W'_2`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Whenever std is in the build graph its inherent float methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::check::Check;
use crate::lattice::{abelian_splitting, LatticeError};

pub type Complex = Complex64;

const I: Complex = Complex::new(0.0, 1.0);

/// Projective values with both coordinates below this are indeterminate.
pub const MAGNITUDE_FLOOR: f64 = 1e-13;

/// Default series and product truncation order.
pub const DEFAULT_TRUNCATION: usize = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThetaError {
    #[error("Im(tau) = {0} is not positive")]
    NotUpperHalf(f64),
    #[error("|q| = {0} is not below 1")]
    NonConvergent(f64),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("both projective coordinates are below {MAGNITUDE_FLOOR:e}")]
    Indeterminate,
    #[error("truncation order must be at least 1 and tolerance positive")]
    InvalidTruncation,
    #[error("annulus radii must satisfy 0 < r_in < r_out")]
    InvalidAnnulus,
    #[error("k and l must be positive")]
    InvalidPolarization,
    #[error("no contour free of zeros found for the argument principle")]
    ContourHitsZero,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = core::result::Result<T, ThetaError>;

fn cexp(z: Complex) -> Complex {
    z.exp()
}

/// `e^{2 pi i w}`.
fn e2pi(w: Complex) -> Complex {
    cexp(I * 2.0 * PI * w)
}

/// `|a - b| / max(1, |b|)`.
pub fn relative_residual(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// A point of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfParam(Complex);

impl UpperHalfParam {
    pub fn new(tau: Complex) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(ThetaError::NotUpperHalf(tau.im));
        }
        Ok(UpperHalfParam(tau))
    }

    pub fn tau(&self) -> Complex {
        self.0
    }

    /// `e^{2 pi i tau}`.
    pub fn nome(&self) -> Complex {
        e2pi(self.0)
    }

    /// `k tau` for positive `k`.
    pub fn scale(&self, k: f64) -> Result<Self> {
        Self::new(self.0 * k)
    }
}

/// Characteristic `(a, b)` of `theta_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    pub a: f64,
    pub b: f64,
}

impl Characteristic {
    pub const ZERO: Characteristic = Characteristic { a: 0.0, b: 0.0 };
    pub const HALF_ZERO: Characteristic = Characteristic { a: 0.5, b: 0.0 };
    pub const ZERO_HALF: Characteristic = Characteristic { a: 0.0, b: 0.5 };
    pub const HALF_HALF: Characteristic = Characteristic { a: 0.5, b: 0.5 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub n: usize,
    pub tol: f64,
}

impl TruncationPolicy {
    pub fn new(n: usize, tol: f64) -> Result<Self> {
        if n == 0 || !(tol > 0.0) {
            return Err(ThetaError::InvalidTruncation);
        }
        Ok(TruncationPolicy { n, tol })
    }

    pub fn doubled(&self) -> Self {
        TruncationPolicy { n: 2 * self.n, tol: self.tol }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { n: DEFAULT_TRUNCATION, tol: 1e-9 }
    }
}

/// A truncated series or product together with a bound on what was cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: Complex,
    pub tail_bound: f64,
}

/// `theta_{a,b}(zeta, tau) = sum_n e^{pi i (n+a)^2 tau} e^{2 pi i (n+a)(zeta+b)}`
/// over `|n| <= N`.
pub fn theta(ch: Characteristic, zeta: Complex, tau: UpperHalfParam, t: TruncationPolicy) -> Evaluated {
    let tau = tau.tau();
    let n = t.n as i64;
    let term = |m: f64| cexp(I * PI * m * m * tau + I * 2.0 * PI * m * (zeta + ch.b));
    let mut value = Complex::new(0.0, 0.0);
    for k in -n..=n {
        value += term(k as f64 + ch.a);
    }
    // |term(m)| = exp(-pi m^2 Im tau - 2 pi m Im(zeta)); consecutive
    // ratios beyond N are bounded by the first one, so the tails are
    // dominated by geometric series.
    let mag = |m: f64| (-PI * m * m * tau.im - 2.0 * PI * m * zeta.im).exp();
    let mut tail_bound = 0.0;
    for dir in [1.0, -1.0] {
        let m0 = dir * (n as f64 + 1.0) + ch.a;
        let m1 = m0 + dir;
        let (t0, t1) = (mag(m0), mag(m1));
        let r = t1 / t0;
        tail_bound += if t0 == 0.0 {
            0.0
        } else if r < 1.0 { t0 / (1.0 - r) } else { f64::INFINITY };
    }
    Evaluated { value, tail_bound }
}

/// `eta(tau) = e^{pi i tau / 12} prod_{m=1}^N (1 - e^{2 pi i tau m})`.
pub fn eta(tau: UpperHalfParam, t: TruncationPolicy) -> Evaluated {
    let q = tau.nome();
    let mut value = cexp(I * PI * tau.tau() / 12.0);
    let mut qm = Complex::new(1.0, 0.0);
    for _ in 0..t.n {
        qm *= q;
        value *= Complex::new(1.0, 0.0) - qm;
    }
    let aq = q.norm();
    let s = aq.powi(t.n as i32 + 1) / (1.0 - aq);
    Evaluated { value, tail_bound: value.norm() * (s.exp() - 1.0) }
}

/// Disc counts of the two basic classes of the toric fibration of P^1.
pub const DISC_COUNTS: [i64; 2] = [1, 1];

/// `W(z) = z + q / z`.
pub fn superpotential(z: Complex, q: Complex) -> Result<Complex> {
    if z == Complex::new(0.0, 0.0) {
        return Err(ThetaError::ZeroArgument);
    }
    Ok(Complex::from(DISC_COUNTS[0] as f64) * z + Complex::from(DISC_COUNTS[1] as f64) * q / z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalData {
    pub points: [Complex; 2],
    pub values: [Complex; 2],
    /// Dimension of `C[z, 1/z] / (z^2 - q)`.
    pub jacobian_dim: usize,
}

/// Critical points `z = +-sqrt(q)` of `z + q/z` and their values.
pub fn critical_data(q: Complex) -> Result<CriticalData> {
    if q == Complex::new(0.0, 0.0) {
        return Err(ThetaError::ZeroArgument);
    }
    let s = q.sqrt();
    Ok(CriticalData {
        points: [s, -s],
        values: [s * 2.0, -s * 2.0],
        jacobian_dim: 2,
    })
}

/// Kähler data of the two components of a Tyurin degeneration of an
/// elliptic curve; the real parts of `tau_i` carry the B-field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TyurinGluingData {
    tau1: UpperHalfParam,
    tau2: UpperHalfParam,
}

impl TyurinGluingData {
    pub fn new(tau1: Complex, tau2: Complex) -> Result<Self> {
        Ok(TyurinGluingData { tau1: UpperHalfParam::new(tau1)?, tau2: UpperHalfParam::new(tau2)? })
    }

    /// `tau_1 = 0.3 + 0.8i`, `tau_2 = -0.1 + 0.7i`.
    pub fn standard() -> Self {
        Self::new(Complex::new(0.3, 0.8), Complex::new(-0.1, 0.7)).expect("upper half plane")
    }

    pub fn tau1(&self) -> UpperHalfParam {
        self.tau1
    }

    pub fn tau2(&self) -> UpperHalfParam {
        self.tau2
    }

    pub fn tau(&self) -> UpperHalfParam {
        UpperHalfParam(self.tau1.0 + self.tau2.0)
    }

    pub fn q1(&self) -> Complex {
        self.tau1.nome()
    }

    pub fn q2(&self) -> Complex {
        self.tau2.nome()
    }

    pub fn q(&self) -> Complex {
        self.tau().nome()
    }
}

/// `{r_in < |z| < r_out}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub r_in: f64,
    pub r_out: f64,
}

impl Annulus {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(ThetaError::InvalidAnnulus);
        }
        Ok(Annulus { r_in, r_out })
    }

    /// The annulus whose tropical coordinate `x = -log(r) / 2 pi` ranges
    /// over `(lo, hi)`.
    pub fn from_x_interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new((-2.0 * PI * hi).exp(), (-2.0 * PI * lo).exp())
    }

    pub fn x_interval(&self) -> (f64, f64) {
        (-self.r_out.ln() / (2.0 * PI), -self.r_in.ln() / (2.0 * PI))
    }

    /// `log(r_out / r_in) / 2 pi`; annuli are biholomorphic iff their
    /// moduli agree.
    pub fn modulus(&self) -> f64 {
        (self.r_out / self.r_in).ln() / (2.0 * PI)
    }

    pub fn equivalent(&self, other: &Annulus, tol: f64) -> bool {
        (self.modulus() - other.modulus()).abs() < tol
    }

    pub fn contains(&self, z: Complex) -> bool {
        let r = z.norm();
        self.r_in < r && r < self.r_out
    }
}

/// Chart `Y_j` of the infinite chain of Landau–Ginzburg models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub index: i64,
    pub annulus: Annulus,
    pub x_interval: (f64, f64),
    /// `q_1` on odd charts, `q_2` on even ones.
    pub parameter: Complex,
}

/// Odd chart `2i+1` covers `x in (-i Im tau, -i Im tau + Im tau_1)`,
/// even chart `2i` covers `x in ((1-i) Im tau - Im tau_2, (1-i) Im tau)`.
pub fn annulus_chart(j: i64, g: &TyurinGluingData) -> Chart {
    let t = g.tau().tau().im;
    let i = j.div_euclid(2) as f64;
    let (lo, hi, parameter) = if j.rem_euclid(2) == 1 {
        (-i * t, -i * t + g.tau1().tau().im, g.q1())
    } else {
        ((1.0 - i) * t - g.tau2().tau().im, (1.0 - i) * t, g.q2())
    };
    Chart {
        index: j,
        annulus: Annulus::from_x_interval(lo, hi).expect("chart widths are positive"),
        x_interval: (lo, hi),
        parameter,
    }
}

/// Local coordinate `z_j` on chart `j`, normalised so that `Y_j` is the
/// standard annulus of `W_j`: `A(|q_1|, 1)` for odd `j`, `A(1, |q_2|^{-1})`
/// for even `j`. Consecutive charts of equal parity satisfy
/// `z_{j+2} = q z_j`.
pub fn chart_coordinate(j: i64, z: Complex, g: &TyurinGluingData) -> Complex {
    let q = g.q();
    let e = if j.rem_euclid(2) == 1 { (j - 1) / 2 } else { j / 2 - 1 };
    z * q.powi(e as i32)
}

/// Left and right sides of
/// `(z_j + q_k/z_j)(z_{-j} + q_k/z_{-j}) = q_k q^j (1 + q_k/z_j^2)(1 + z_{-j}^2/q_k)`.
pub fn pairing_identity(j: i64, k: u8, z: Complex, g: &TyurinGluingData) -> (Complex, Complex) {
    let qk = if k == 1 { g.q1() } else { g.q2() };
    let zj = chart_coordinate(j, z, g);
    let zm = chart_coordinate(-j, z, g);
    let one = Complex::new(1.0, 0.0);
    let lhs = (zj + qk / zj) * (zm + qk / zm);
    let rhs = qk * g.q().powi(j as i32) * (one + qk / (zj * zj)) * (one + zm * zm / qk);
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `W'_1`, product over odd charts.
    Odd,
    /// `W'_2`, product over even charts.
    Even,
}

/// The variable `x` with `W'(z) = F(x)`.
pub fn product_variable(z: Complex, parity: Parity, g: &TyurinGluingData) -> Complex {
    match parity {
        Parity::Odd => g.q2() * z * z,
        Parity::Even => z * z / g.q1(),
    }
}

fn check_nonzero(z: Complex) -> Result<()> {
    if z.norm() == 0.0 || !z.norm().is_finite() {
        return Err(ThetaError::ZeroArgument);
    }
    Ok(())
}

/// `prod_{i=1}^N (1 + q^{2i-1}/x)(1 + q^{2i-1} x)` at the appropriate `x`.
pub fn glued_product(z: Complex, parity: Parity, g: &TyurinGluingData, t: TruncationPolicy) -> Result<Evaluated> {
    check_nonzero(z)?;
    let q = g.q();
    if q.norm() >= 1.0 {
        return Err(ThetaError::NonConvergent(q.norm()));
    }
    let x = product_variable(z, parity, g);
    let one = Complex::new(1.0, 0.0);
    let q2 = q * q;
    let mut p = q;
    let mut value = one;
    for _ in 0..t.n {
        value *= (one + p / x) * (one + p * x);
        p *= q2;
    }
    // |log prod_{i>N}| <= sum_{i>N} |q|^{2i-1} (|x| + 1/|x|) when each
    // factor stays in the unit disc around 1.
    let aq = q.norm();
    let s = aq.powi(2 * t.n as i32 + 1) / (1.0 - aq * aq) * (x.norm() + 1.0 / x.norm());
    let tail_bound = if s < 0.5 { value.norm() * ((2.0 * s).exp() - 1.0) } else { f64::INFINITY };
    Ok(Evaluated { value, tail_bound })
}

/// `prod_{k=1}^N (1 - q^{2k})^{-1}`.
pub fn triple_product_prefactor(q: Complex, t: TruncationPolicy) -> Complex {
    let one = Complex::new(1.0, 0.0);
    let q2 = q * q;
    let mut p = one;
    let mut value = one;
    for _ in 0..t.n {
        p *= q2;
        value /= one - p;
    }
    value
}

/// Right side of the Jacobi triple product:
/// `prod_k (1 - q^{2k})^{-1} sum_{|l| <= N} q^{l^2} x^l`.
pub fn triple_product_sum(x: Complex, q: Complex, t: TruncationPolicy) -> Complex {
    let n = t.n as i32;
    let mut sum = Complex::new(0.0, 0.0);
    for l in -n..=n {
        sum += q.powi(l * l) * x.powi(l);
    }
    triple_product_prefactor(q, t) * sum
}

/// `e^{pi i tau / 6} / eta(2 tau)`.
pub fn eta_prefactor(tau: UpperHalfParam, t: TruncationPolicy) -> Complex {
    let two_tau = UpperHalfParam(tau.tau() * 2.0);
    cexp(I * PI * tau.tau() / 6.0) / eta(two_tau, t).value
}

/// `zeta` with `z = e^{2 pi i zeta}` on the principal branch.
pub fn zeta_of(z: Complex) -> Complex {
    z.ln() / (I * 2.0 * PI)
}

/// Theta-function forms of both products:
/// `W'_2 = pref . theta_{0,0}(2 zeta - tau_1, 2 tau)` and
/// `W'_1 = pref . theta_{0,0}(2 zeta + tau_2, 2 tau)`.
pub fn theta_form(z: Complex, parity: Parity, g: &TyurinGluingData, t: TruncationPolicy) -> Complex {
    let zeta = zeta_of(z);
    let tau = g.tau();
    let w = match parity {
        Parity::Odd => zeta * 2.0 + g.tau2().tau(),
        Parity::Even => zeta * 2.0 - g.tau1().tau(),
    };
    let two_tau = UpperHalfParam(tau.tau() * 2.0);
    eta_prefactor(tau, t) * theta(Characteristic::ZERO, w, two_tau, t).value
}

/// `pref . theta_{1/2,0}(2 zeta - tau_1, 2 tau)`, the other closed form
/// one might write for `W'_1`. It differs from `W'_1` by the nowhere
/// vanishing factor `e^{pi i tau / 2 + pi i (2 zeta - tau_1)}`.
pub fn half_characteristic_form(z: Complex, g: &TyurinGluingData, t: TruncationPolicy) -> Complex {
    let zeta = zeta_of(z);
    let tau = g.tau();
    let two_tau = UpperHalfParam(tau.tau() * 2.0);
    let w = zeta * 2.0 - g.tau1().tau();
    eta_prefactor(tau, t) * theta(Characteristic::HALF_ZERO, w, two_tau, t).value
}

/// A point of P^1 in homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    pub a: Complex,
    pub b: Complex,
}

impl ProjectivePoint {
    pub fn new(a: Complex, b: Complex) -> Result<Self> {
        if a.norm() < MAGNITUDE_FLOOR && b.norm() < MAGNITUDE_FLOOR {
            return Err(ThetaError::Indeterminate);
        }
        Ok(ProjectivePoint { a, b })
    }

    /// Chordal distance `|ad - bc| / (|(a, b)| |(c, d)|)`.
    pub fn chordal(&self, other: &ProjectivePoint) -> f64 {
        let n1 = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        let n2 = (other.a.norm_sqr() + other.b.norm_sqr()).sqrt();
        (self.a * other.b - self.b * other.a).norm() / (n1 * n2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorPair {
    /// `[W'_1(z) : W'_2(z)]`.
    pub raw: ProjectivePoint,
    /// `[z W'_1(z) : W'_2(z)]`, which descends to `C^x / q^Z`.
    pub corrected: ProjectivePoint,
}

pub fn mirror_pair(z: Complex, g: &TyurinGluingData, t: TruncationPolicy) -> Result<MirrorPair> {
    let w1 = glued_product(z, Parity::Odd, g, t)?.value;
    let w2 = glued_product(z, Parity::Even, g, t)?.value;
    Ok(MirrorPair {
        raw: ProjectivePoint::new(w1, w2)?,
        corrected: ProjectivePoint::new(z * w1, w2)?,
    })
}

/// Outcome of an argument-principle count on `{r |q| < |z| < r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreimageCount {
    pub count: i64,
    pub radius: f64,
    pub winding_outer: f64,
    pub winding_inner: f64,
}

const CONTOUR_SAMPLES: usize = 2048;

/// Total change of argument of `f` around `|z| = r`, in turns, or `None`
/// when the contour passes too close to a zero or is undersampled.
fn winding(f: &dyn Fn(Complex) -> Result<Complex>, r: f64) -> Result<Option<f64>> {
    let mut vals = Vec::with_capacity(CONTOUR_SAMPLES);
    for k in 0..CONTOUR_SAMPLES {
        let th = 2.0 * PI * k as f64 / CONTOUR_SAMPLES as f64;
        vals.push(f(Complex::from_polar(r, th))?);
    }
    let max = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if !(min > 1e-8 * max) {
        return Ok(None);
    }
    let mut total = 0.0;
    for k in 0..CONTOUR_SAMPLES {
        let step = (vals[(k + 1) % CONTOUR_SAMPLES] / vals[k]).arg();
        if step.abs() > PI / 4.0 {
            return Ok(None);
        }
        total += step;
    }
    Ok(Some(total / (2.0 * PI)))
}

/// Number of `z` in a fundamental annulus of `z -> qz` with
/// `[z W'_1(z) : W'_2(z)] = target`, counted as zeros of
/// `c_2 z W'_1(z) - c_1 W'_2(z)` by the argument principle.
pub fn preimage_count(target: &ProjectivePoint, g: &TyurinGluingData, t: TruncationPolicy) -> Result<PreimageCount> {
    let f = |z: Complex| -> Result<Complex> {
        let w1 = glued_product(z, Parity::Odd, g, t)?.value;
        let w2 = glued_product(z, Parity::Even, g, t)?.value;
        Ok(target.b * z * w1 - target.a * w2)
    };
    let aq = g.q().norm();
    for shift in [0.0, 0.137, 0.291, 0.413, 0.577, 0.719, 0.853] {
        let r = aq.powf(-shift);
        let Some(outer) = winding(&f, r)? else { continue };
        let Some(inner) = winding(&f, r * aq)? else { continue };
        let diff = outer - inner;
        if (diff - diff.round()).abs() < 1e-6 {
            return Ok(PreimageCount { count: diff.round() as i64, radius: r, winding_outer: outer, winding_inner: inner });
        }
    }
    Err(ThetaError::ContourHitsZero)
}

/// `z_i = e^{-2 pi x_i} e^{i theta_i}`.
pub fn semiflat_coord(x: &[f64], theta: &[f64]) -> Vec<Complex> {
    x.iter()
        .zip(theta)
        .map(|(&xi, &ti)| Complex::from_polar((-2.0 * PI * xi).exp(), ti))
        .collect()
}

/// `x_i = -log|z_i| / 2 pi`.
pub fn tropicalize(z: &[Complex]) -> Result<Vec<f64>> {
    z.iter()
        .map(|&zi| {
            check_nonzero(zi)?;
            Ok(-zi.norm().ln() / (2.0 * PI))
        })
        .collect()
}

/// `Y = E_{k tau} x E_{l tau} -> E_{k tau} -> P^1`: projection to the
/// first factor followed by the elliptic double cover at modulus `k tau`,
/// split as `tau_1' = shift`, `tau_2' = k tau - shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelianFibration {
    pub k: u32,
    pub l: u32,
    pub tau: UpperHalfParam,
    pub gluing: TyurinGluingData,
}

impl AbelianFibration {
    /// `shift = None` uses `k tau / 2`.
    pub fn new(k: u32, l: u32, tau: UpperHalfParam, shift: Option<Complex>) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(ThetaError::InvalidPolarization);
        }
        let kt = tau.tau() * k as f64;
        let s = shift.unwrap_or(kt / 2.0);
        Ok(AbelianFibration { k, l, tau, gluing: TyurinGluingData::new(s, kt - s)? })
    }

    pub fn evaluate(&self, zeta1: Complex, _zeta2: Complex, t: TruncationPolicy) -> Result<ProjectivePoint> {
        Ok(mirror_pair(e2pi(zeta1), &self.gluing, t)?.corrected)
    }
}

const TOL_SERIES: f64 = 1e-9;
const TOL_SHIFT: f64 = 1e-10;
const TOL_PREFACTOR: f64 = 1e-12;
const TOL_CONVERGENCE: f64 = 1e-12;

/// Every identity of the elliptic gluing, each as the maximum residual
/// over the sample points `zs` (which should lie in `|q_1| < |z| < 1`).
pub fn elliptic_suite(g: &TyurinGluingData, t: TruncationPolicy, zs: &[Complex]) -> Result<Vec<Check>> {
    let q = g.q();
    let tau = g.tau();
    let two_tau = UpperHalfParam(tau.tau() * 2.0);
    let mut out = Vec::new();

    let mut jtp = 0.0f64;
    let mut w2_form = 0.0f64;
    let mut w1_form = 0.0f64;
    let mut shift = 0.0f64;
    let mut half_factor = 0.0f64;
    let mut auto_corr = 0.0f64;
    let mut auto_comp = 0.0f64;
    let mut raw_mismatch = 0.0f64;
    let mut deck = 0.0f64;
    let mut exchange = 0.0f64;
    let mut conv = 0.0f64;
    let t2 = t.doubled();
    let e_half = cexp(I * PI * tau.tau());
    for &z in zs {
        let w1 = glued_product(z, Parity::Odd, g, t)?.value;
        let w2 = glued_product(z, Parity::Even, g, t)?.value;
        for (w, p) in [(w1, Parity::Odd), (w2, Parity::Even)] {
            let x = product_variable(z, p, g);
            jtp = jtp.max(relative_residual(w, triple_product_sum(x, q, t)));
        }
        w2_form = w2_form.max(relative_residual(w2, theta_form(z, Parity::Even, g, t)));
        w1_form = w1_form.max(relative_residual(w1, theta_form(z, Parity::Odd, g, t)));

        let w = zeta_of(z) * 2.0 - g.tau1().tau();
        let lhs = theta(Characteristic::ZERO, w + tau.tau(), two_tau, t).value;
        let rhs = cexp(-I * PI * tau.tau() / 2.0 - I * PI * w) * theta(Characteristic::HALF_ZERO, w, two_tau, t).value;
        shift = shift.max(relative_residual(lhs, rhs));
        let factor = cexp(I * PI * tau.tau() / 2.0 + I * PI * w);
        half_factor = half_factor.max(relative_residual(half_characteristic_form(z, g, t), factor * w1));

        let here = mirror_pair(z, g, t)?;
        let there = mirror_pair(q * z, g, t)?;
        auto_corr = auto_corr.max(here.corrected.chordal(&there.corrected));
        let a = Complex::new(1.0, 0.0) / (g.q2() * z * z);
        auto_comp = auto_comp
            .max(relative_residual(there.corrected.a, a * here.corrected.a))
            .max(relative_residual(there.corrected.b, a * here.corrected.b));
        let ratio_here = here.raw.a / here.raw.b;
        let ratio_there = there.raw.a / there.raw.b;
        raw_mismatch = raw_mismatch.max(relative_residual(ratio_there / ratio_here, Complex::new(1.0, 0.0) / q));
        let flipped = mirror_pair(g.q1() / z, g, t)?;
        deck = deck.max(here.corrected.chordal(&flipped.corrected));

        let moved = glued_product(e_half * z, Parity::Even, g, t)?.value;
        exchange = exchange.max(relative_residual(moved, w1));

        let w1d = glued_product(z, Parity::Odd, g, t2)?.value;
        let w2d = glued_product(z, Parity::Even, g, t2)?.value;
        conv = conv.max(relative_residual(w1d, w1)).max(relative_residual(w2d, w2));
    }

    let eta_pref = relative_residual(eta_prefactor(tau, t), triple_product_prefactor(q, t));

    out.push(Check::numeric("theta.jacobi_triple_product", jtp, TOL_SERIES));
    out.push(Check::numeric("theta.eta_prefactor", eta_pref, TOL_PREFACTOR));
    out.push(Check::numeric("theta.w2_theta_form", w2_form, TOL_SERIES));
    out.push(Check::numeric("theta.w1_theta_form", w1_form, TOL_SERIES));
    out.push(Check::numeric("theta.characteristic_shift", shift, TOL_SHIFT));
    out.push(Check::numeric("theta.w1_half_characteristic_factor", half_factor, TOL_SERIES));
    out.push(Check::numeric("theta.corrected_automorphy_chordal", auto_corr, TOL_SERIES));
    out.push(Check::numeric("theta.corrected_automorphy_factor", auto_comp, TOL_SERIES));
    out.push(Check::numeric("theta.raw_automorphy_mismatch_is_1_over_q", raw_mismatch, TOL_SERIES));
    out.push(Check::numeric("theta.deck_invariance", deck, TOL_SERIES));
    out.push(Check::numeric("theta.odd_even_exchange", exchange, TOL_SERIES));
    out.push(Check::numeric("theta.truncation_convergence", conv, TOL_CONVERGENCE));

    let base = zs.first().copied().unwrap_or(Complex::new(0.55, 0.21));
    let target = mirror_pair(base, g, t)?.corrected;
    let count = preimage_count(&target, g, t)?;
    out.push(Check::exact("theta.preimage_count", count.count == 2, format!("{}", count.count)));
    Ok(out)
}

/// Maximum relative residual of the chart pairing identity over charts
/// `-max_chart..=max_chart`, both pairings, and the sample points `zs`.
pub fn pairing_check(g: &TyurinGluingData, zs: &[Complex], max_chart: i64) -> Check {
    let mut pairing = 0.0f64;
    for j in -max_chart..=max_chart {
        for k in [1u8, 2] {
            for &z in zs {
                let (l, r) = pairing_identity(j, k, z, g);
                pairing = pairing.max((l - r).norm() / r.norm().max(l.norm()).max(1e-300));
            }
        }
    }
    Check::numeric("theta.pairing_identity", pairing, TOL_SHIFT)
}

/// Checks of the abelian-surface fibration `E_{k tau} x E_{l tau} -> P^1`
/// and of the lattice splitting behind its polarization.
pub fn abelian_suite(
    k: u32,
    l: u32,
    tau: UpperHalfParam,
    shift: Option<Complex>,
    t: TruncationPolicy,
    zetas: &[Complex],
) -> Result<Vec<Check>> {
    let fib = AbelianFibration::new(k, l, tau, shift)?;
    let tag = format!("abelian.k{}_l{}", k, l);
    let zeta2 = Complex::new(0.37, 0.11);
    let mut indep = 0.0f64;
    let mut period = 0.0f64;
    for &z1 in zetas {
        let a = fib.evaluate(z1, Complex::new(0.0, 0.0), t)?;
        let b = fib.evaluate(z1, zeta2, t)?;
        indep = indep.max(a.chordal(&b));
        let c = fib.evaluate(z1 + 1.0, Complex::new(0.0, 0.0), t)?;
        period = period.max(a.chordal(&c));
    }
    let base = zetas.first().copied().unwrap_or(Complex::new(0.13, 0.05));
    let target = fib.evaluate(base, Complex::new(0.0, 0.0), t)?;
    let count = preimage_count(&target, &fib.gluing, t)?;
    let split = abelian_splitting(k as i64, l as i64)?;
    let split_ok = split.checks.iter().all(|c| c.passed);
    Ok(alloc::vec![
        Check::numeric(format!("{tag}.zeta2_independence"), indep, TOL_SHIFT),
        Check::numeric(format!("{tag}.zeta1_periodicity"), period, TOL_SHIFT),
        Check::exact(format!("{tag}.preimage_count"), count.count == 2, format!("{}", count.count)),
        Check::exact(format!("{tag}.lattice_splitting"), split_ok, format!("index {}", split.index)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn odd_theta_vanishes_at_origin() {
        for tau in [c(0.0, 1.0), c(0.3, 0.7), c(-1.2, 2.5)] {
            let v = theta(Characteristic::HALF_HALF, c(0.0, 0.0), UpperHalfParam::new(tau).unwrap(), TruncationPolicy::default());
            assert!(v.value.norm() < 1e-14);
        }
    }

    /// Oracle: direct series summation written out independently.
    #[test]
    fn theta_at_i() {
        let mut s = 0.0;
        for n in -50i32..=50 {
            s += (-PI * (n * n) as f64).exp();
        }
        let v = theta(Characteristic::ZERO, c(0.0, 0.0), UpperHalfParam::new(c(0.0, 1.0)).unwrap(), TruncationPolicy::new(50, 1e-9).unwrap());
        assert!((v.value.re - s).abs() < 1e-15);
        assert!((v.value.re - 1.0864348).abs() < 1e-7);
        assert!(v.tail_bound < 1e-300);
    }

    #[test]
    fn eta_at_i() {
        let mut p = (-PI / 12.0).exp();
        for m in 1..=60 {
            p *= 1.0 - (-2.0 * PI * m as f64).exp();
        }
        let v = eta(UpperHalfParam::new(c(0.0, 1.0)).unwrap(), TruncationPolicy::new(60, 1e-9).unwrap());
        assert!((v.value.re - p).abs() < 1e-15);
        assert!((v.value.re - 0.7682254).abs() < 1e-7);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert_eq!(UpperHalfParam::new(c(1.0, 0.0)).unwrap_err(), ThetaError::NotUpperHalf(0.0));
        assert!(TyurinGluingData::new(c(0.0, 1.0), c(0.0, -1.0)).is_err());
    }

    #[test]
    fn superpotential_basics() {
        assert_eq!(superpotential(c(1.0, 0.0), c(0.04, 0.0)).unwrap(), c(1.04, 0.0));
        let cd = critical_data(c(0.04, 0.0)).unwrap();
        assert!((cd.points[0] - c(0.2, 0.0)).norm() < 1e-15);
        assert!((cd.values[1] - c(-0.4, 0.0)).norm() < 1e-15);
        assert_eq!(cd.jacobian_dim, 2);
        assert_eq!(superpotential(c(0.0, 0.0), c(1.0, 0.0)).unwrap_err(), ThetaError::ZeroArgument);
        assert_eq!(critical_data(c(0.0, 0.0)).unwrap_err(), ThetaError::ZeroArgument);
    }

    #[test]
    fn charts() {
        let g = TyurinGluingData::standard();
        let y1 = annulus_chart(1, &g);
        assert!((y1.annulus.r_in - g.q1().norm()).abs() < 1e-15);
        assert!((y1.annulus.r_out - 1.0).abs() < 1e-15);
        let y2 = annulus_chart(2, &g);
        assert!((y2.annulus.r_in - 1.0).abs() < 1e-15);
        assert!((y2.annulus.r_out - 1.0 / g.q2().norm()).abs() < 1e-12);
        assert!((y1.annulus.modulus() - 0.8).abs() < 1e-14);
        // Charts -3..=3 tile an interval with pairwise overlaps of measure zero.
        let mut iv: Vec<(f64, f64)> = (-3..=3).map(|j| annulus_chart(j, &g).x_interval).collect();
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in iv.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-12);
        }
        // Chart coordinates put each chart on its standard annulus.
        for j in -3..=3 {
            let ch = annulus_chart(j, &g);
            let mid = Complex::from_polar((ch.annulus.r_in * ch.annulus.r_out).sqrt(), 0.4);
            let zj = chart_coordinate(j, mid, &g).norm();
            let (lo, hi) = if j.rem_euclid(2) == 1 { (g.q1().norm(), 1.0) } else { (1.0, 1.0 / g.q2().norm()) };
            assert!(lo < zj && zj < hi, "chart {j}");
        }
    }

    #[test]
    fn annulus_moduli() {
        let q = TyurinGluingData::standard().q().norm();
        let a = Annulus::new(q, 1.0).unwrap();
        let b = Annulus::new(q.sqrt(), 1.0 / q.sqrt()).unwrap();
        assert!(a.equivalent(&b, 1e-12));
        assert!(!Annulus::new(1.0, 2.0).unwrap().equivalent(&Annulus::new(1.0, 4.0).unwrap(), 1e-12));
        assert_eq!(Annulus::new(2.0, 1.0).unwrap_err(), ThetaError::InvalidAnnulus);
    }

    #[test]
    fn semiflat_example() {
        let z = semiflat_coord(&[1.0], &[0.0]);
        assert!((z[0].re - (-2.0 * PI).exp()).abs() < 1e-18);
        assert_eq!(tropicalize(&[c(0.0, 0.0)]).unwrap_err(), ThetaError::ZeroArgument);
    }

    #[test]
    fn indeterminate_point() {
        assert_eq!(ProjectivePoint::new(c(0.0, 0.0), c(1e-14, 0.0)).unwrap_err(), ThetaError::Indeterminate);
        let p = ProjectivePoint::new(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let q = ProjectivePoint::new(c(0.0, 3.0), c(0.0, 6.0)).unwrap();
        assert!(p.chordal(&q) < 1e-16);
    }

    #[test]
    fn elliptic_suite_passes_on_a_few_points() {
        let g = TyurinGluingData::standard();
        let zs = [c(0.5, 0.2), c(-0.1, 0.3), c(0.05, -0.7)];
        let checks = elliptic_suite(&g, TruncationPolicy::default(), &zs).unwrap();
        for ch in &checks {
            assert!(ch.passed, "{:?}", ch);
        }
    }
}
