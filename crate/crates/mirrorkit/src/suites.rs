//! The cross-module verification suites. Check names start with the
//! acceptance criterion they belong to (`c1.` to `c8.`); checks that
//! exercise fixtures without belonging to a criterion carry the suite name.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mirrorkit_core::arith::Rational;
use mirrorkit_core::lattice::{congruence, dn_mirror, standard_k3_embedding, Congruence, IntegerLattice, Signature};
use mirrorkit_core::monodromy::{
    classify_kulikov, cup_monodromy, cup_nilpotency, factorization_check, product, split_fibration, word_decompose,
    CohomologyClassT4, KulikovType, SL2Matrix,
};
use mirrorkit_core::polytope::{classify_reflexive_2d, degeneration_polytope, torus_subdivision_check, LatticePolytope, REFLEXIVE_SEARCH_RADIUS};
use mirrorkit_core::quantize::{
    correspondence_check, curvature_20, section_bs_count, QuantizationInstance, SampledSection, TorusSection,
};
use mirrorkit_core::theta::{
    abelian_suite, elliptic_suite, pairing_check, Complex, TruncationPolicy, TyurinGluingData, UpperHalfParam,
};

use crate::formats::{self, Source};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum SuiteName {
    All,
    Lattice,
    Polytope,
    Theta,
    Monodromy,
    Quantize,
}

impl SuiteName {
    pub const MODULES: [SuiteName; 5] =
        [SuiteName::Lattice, SuiteName::Polytope, SuiteName::Theta, SuiteName::Monodromy, SuiteName::Quantize];

    pub fn label(self) -> &'static str {
        match self {
            SuiteName::All => "all",
            SuiteName::Lattice => "lattice",
            SuiteName::Polytope => "polytope",
            SuiteName::Theta => "theta",
            SuiteName::Monodromy => "monodromy",
            SuiteName::Quantize => "quantize",
        }
    }

    /// Stream of the shared generator reserved for this suite, so a suite
    /// draws the same samples whether it runs alone or inside `all`.
    fn stream(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone)]
pub struct SuiteContext {
    pub fixtures: PathBuf,
    pub seed: u64,
    pub truncation: usize,
}

pub const FIXTURES_ENV: &str = "MIRRORKIT_FIXTURES";

/// `MIRRORKIT_FIXTURES` when set, otherwise the fixtures shipped with the crate.
pub fn default_fixtures() -> PathBuf {
    std::env::var_os(FIXTURES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

impl SuiteContext {
    pub fn new(seed: u64, truncation: usize) -> Self {
        SuiteContext { fixtures: default_fixtures(), seed, truncation }
    }

    pub fn rng(&self, suite: SuiteName) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(suite.stream());
        rng
    }

    /// Reads a fixture into the report digest; a missing or unreadable
    /// fixture becomes a failing check.
    fn fixture(&self, report: &mut Report, prefix: &str, name: &str) -> Option<Source> {
        match Source::read(&self.fixtures.join(name)) {
            Ok(src) => {
                report.input(name, src.text.as_bytes());
                Some(src)
            }
            Err(e) => {
                report.exact(format!("{prefix}.fixture.{name}"), false, e.to_string());
                None
            }
        }
    }

    fn parsed<T>(
        &self,
        report: &mut Report,
        prefix: &str,
        name: &str,
        parse: impl FnOnce(&Source) -> formats::Result<T>,
    ) -> Option<T> {
        let src = self.fixture(report, prefix, name)?;
        match parse(&src) {
            Ok(v) => Some(v),
            Err(e) => {
                report.exact(format!("{prefix}.fixture.{name}"), false, e.to_string());
                None
            }
        }
    }
}

/// Runs one suite, or all of them, into `report`; per-suite wall-clock
/// times are returned rather than written into the report.
pub fn run(name: SuiteName, ctx: &SuiteContext, report: &mut Report) -> Vec<(SuiteName, f64)> {
    let selected: Vec<SuiteName> = if name == SuiteName::All { SuiteName::MODULES.to_vec() } else { vec![name] };
    let mut times = Vec::new();
    for s in selected {
        let start = Instant::now();
        match s {
            SuiteName::Lattice => lattice(ctx, report),
            SuiteName::Polytope => polytope(ctx, report),
            SuiteName::Theta => theta(ctx, report),
            SuiteName::Monodromy => monodromy(ctx, report),
            SuiteName::Quantize => quantize(ctx, report),
            SuiteName::All => unreachable!("expanded above"),
        }
        times.push((s, start.elapsed().as_secs_f64()));
    }
    times
}

pub const TAU1: Complex = Complex::new(0.3, 0.8);
pub const TAU2: Complex = Complex::new(-0.1, 0.7);
pub const ABELIAN_TAU: Complex = Complex::new(0.2, 1.5);
pub const THETA_SAMPLES: usize = 100;
pub const PAIRING_CHARTS: i64 = 5;

/// `n` points with `|z|` uniform in `log` scale on `(|q_1|, 1)` and
/// uniform argument.
pub fn annulus_samples(rng: &mut impl Rng, g: &TyurinGluingData, n: usize) -> Vec<Complex> {
    let r1 = g.q1().norm();
    (0..n)
        .map(|_| {
            let s: f64 = rng.random_range(f64::EPSILON..1.0);
            let arg: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(r1.powf(1.0 - s), arg)
        })
        .collect()
}

fn theta_error(report: &mut Report, name: &str, e: impl std::fmt::Display) {
    report.exact(name, false, e.to_string());
}

pub fn theta(ctx: &SuiteContext, report: &mut Report) {
    report.truncation(ctx.truncation);
    let mut rng = ctx.rng(SuiteName::Theta);
    let t = match TruncationPolicy::new(ctx.truncation, 1e-9) {
        Ok(t) => t,
        Err(e) => return theta_error(report, "c1.theta.truncation", e),
    };
    let g = TyurinGluingData::new(TAU1, TAU2).expect("fixed parameters lie in the upper half plane");
    let zs = annulus_samples(&mut rng, &g, THETA_SAMPLES);
    match elliptic_suite(&g, t, &zs) {
        Ok(checks) => report.checks("c1", &checks),
        Err(e) => theta_error(report, "c1.theta.evaluation", e),
    }
    report.check("c2", &pairing_check(&g, &zs, PAIRING_CHARTS));

    let tau = UpperHalfParam::new(ABELIAN_TAU).expect("fixed parameter lies in the upper half plane");
    let zetas: Vec<Complex> = (0..10)
        .map(|_| Complex::new(rng.random_range(-0.5..0.5), rng.random_range(0.0..0.2)))
        .collect();
    for k in 1..=2 {
        for l in 1..=2 {
            match abelian_suite(k, l, tau, None, t, &zetas) {
                Ok(checks) => report.checks("c3", &checks),
                Err(e) => theta_error(report, &format!("c3.abelian.k{k}_l{l}"), e),
            }
        }
    }
}

fn u() -> IntegerLattice {
    IntegerLattice::hyperbolic_plane()
}

pub fn lattice(ctx: &SuiteContext, report: &mut Report) {
    let p = "c4";
    if let Some(m) = ctx.parsed(report, p, "u_e8e8.gram", formats::parse_gram) {
        match standard_k3_embedding(&m).and_then(|e| dn_mirror(&e, None)) {
            Ok(d) => {
                report.checks("c4.dn.u_e8e8", &d.checks);
                report.exact("c4.dn.u_e8e8.rank_n", d.n.rank() == 2, format!("{}", d.n.rank()));
                report.exact("c4.dn.u_e8e8.even", d.n.is_even(), "");
                report.exact("c4.dn.u_e8e8.sig_n", d.signature_n == Signature::new(1, 1), format!("{}", d.signature_n));
                let det = d.n.determinant();
                report.exact("c4.dn.u_e8e8.det_n", det == Ok(-1), format!("{det:?}"));
                let cong = congruence(&d.n, &u());
                report.exact(
                    "c4.dn.u_e8e8.congruent_to_u",
                    matches!(cong, Ok(Congruence::Equivalent(_))),
                    format!("{cong:?}"),
                );
                common_dn_checks(report, "c4.dn.u_e8e8", d.m.rank(), d.n.rank(), d.signature_m, d.signature_n);
            }
            Err(e) => report.exact("c4.dn.u_e8e8", false, e.to_string()),
        }
    }
    if let Some(m) = ctx.parsed(report, p, "two.gram", formats::parse_gram) {
        match standard_k3_embedding(&m).and_then(|e| dn_mirror(&e, None)) {
            Ok(d) => {
                report.checks("c4.dn.two", &d.checks);
                report.exact("c4.dn.two.rank_n", d.n.rank() == 19, format!("{}", d.n.rank()));
                report.exact("c4.dn.two.sig_n", d.signature_n == Signature::new(1, 18), format!("{}", d.signature_n));
                let det = d.n.determinant();
                report.exact("c4.dn.two.det_n", det == Ok(2), format!("{det:?}"));
                common_dn_checks(report, "c4.dn.two", d.m.rank(), d.n.rank(), d.signature_m, d.signature_n);
            }
            Err(e) => report.exact("c4.dn.two", false, e.to_string()),
        }
    }
}

fn common_dn_checks(report: &mut Report, prefix: &str, rank_m: usize, rank_n: usize, sig_m: Signature, sig_n: Signature) {
    report.exact(format!("{prefix}.rank_sum_22"), rank_m + 2 + rank_n == 22, format!("{}", rank_m + 2 + rank_n));
    let total = sig_m + Signature::new(1, 1) + sig_n;
    report.exact(format!("{prefix}.signature_sum_3_19"), total == Signature::new(3, 19), format!("{total}"));
}

/// `P` and `P**` have the same vertices.
fn polar_involution(p: &LatticePolytope) -> Result<bool, String> {
    let dual = p.polar_dual().map_err(|e| e.to_string())?;
    let back = dual.polar_dual().map_err(|e| e.to_string())?;
    let mut a: Vec<Vec<Rational>> = back.vertices().to_vec();
    let mut b: Vec<Vec<Rational>> = p.as_rational().vertices().to_vec();
    a.sort();
    b.sort();
    Ok(a == b && dual.is_lattice())
}

pub fn polytope(ctx: &SuiteContext, report: &mut Report) {
    match classify_reflexive_2d(REFLEXIVE_SEARCH_RADIUS) {
        Ok(classes) => {
            report.exact("c5.reflexive.class_count", classes.len() == 16, format!("{}", classes.len()));
            match classify_reflexive_2d(REFLEXIVE_SEARCH_RADIUS + 1) {
                Ok(larger) => report.exact(
                    "c5.reflexive.larger_box_adds_none",
                    larger == classes,
                    format!("{} classes with radius {}", larger.len(), REFLEXIVE_SEARCH_RADIUS + 1),
                ),
                Err(e) => report.exact("c5.reflexive.larger_box_adds_none", false, e.to_string()),
            }
            let ok = classes.iter().filter(|c| c.is_reflexive() && polar_involution(c) == Ok(true)).count();
            report.exact("c5.reflexive.polar_involution", ok == classes.len(), format!("{ok}/{}", classes.len()));
        }
        Err(e) => report.exact("c5.reflexive.class_count", false, e.to_string()),
    }
    if let Some(quintic) = ctx.parsed(report, "c5", "quintic.poly", formats::parse_polytope) {
        report.exact("c5.quintic.reflexive", quintic.is_reflexive(), format!("dim {}", quintic.dim()));
        let inv = polar_involution(&quintic);
        report.exact("c5.quintic.polar_involution", inv == Ok(true), format!("{inv:?}"));
    }

    if let Some(p2) = ctx.parsed(report, "polytope", "p2.poly", formats::parse_polytope) {
        report.exact("polytope.p2.reflexive", p2.is_reflexive(), "");
        match p2.polar_dual() {
            Ok(d) => report.exact("polytope.p2.dual_vertices", d.vertices().len() == 3, format!("{}", d.vertices().len())),
            Err(e) => report.exact("polytope.p2.dual_vertices", false, e.to_string()),
        }
        let ehrhart: Vec<usize> = (1..=3).map(|k| p2.lattice_points(k).map_or(0, |v| v.len())).collect();
        report.exact("polytope.p2.lattice_points", ehrhart == [10, 28, 55], format!("{ehrhart:?}"));
    }
    for (name, expect_valid) in [("square.sub", true), ("diagonal.sub", true), ("overlap.sub", false)] {
        let Some((torus, cells)) = ctx.parsed(report, "polytope", name, formats::parse_subdivision) else {
            continue;
        };
        let key = format!("polytope.torus.{}", name.trim_end_matches(".sub"));
        let d = torus.unwrap_or_else(|| vec![1; cells[0].dim()]);
        match torus_subdivision_check(&d, &cells) {
            Ok(r) => report.exact(key, r.valid == expect_valid, format!("valid {}, {} cells", r.valid, r.cell_count)),
            Err(e) => report.exact(key, false, e.to_string()),
        }
    }
    let square = ctx.parsed(report, "polytope", "square2.poly", formats::parse_polytope);
    let pyramid = ctx.parsed(report, "polytope", "pyramid.pl", formats::parse_pl);
    if let (Some(p), Some(phi)) = (square, pyramid) {
        match degeneration_polytope(&p, &phi) {
            Ok(deg) => {
                let lattice_cells = deg.cells.iter().filter(|c| c.lattice.is_some()).count();
                report.exact(
                    "polytope.degeneration.pyramid",
                    deg.cells.len() == 4 && lattice_cells == 4 && deg.cell_volume_sum == deg.volume && deg.strictly_convex,
                    format!("{} cells, volume {}", deg.cells.len(), deg.cell_volume_sum),
                );
            }
            Err(e) => report.exact("polytope.degeneration.pyramid", false, e.to_string()),
        }
    }
}

/// `B = S T S^{-1}`.
fn b_matrix() -> SL2Matrix {
    SL2Matrix::S
        .mul(&SL2Matrix::T)
        .and_then(|m| m.mul(&SL2Matrix::S.inverse()))
        .expect("small entries")
}

/// Hurwitz move at position `i`: `(x, y) -> (y, y^{-1} x y)`. Keeps the
/// product and the conjugacy class of every factor.
fn hurwitz(f: &mut [SL2Matrix], i: usize) {
    let (x, y) = (f[i], f[i + 1]);
    if let Ok(moved) = y.inverse().conjugate(&x) {
        f[i] = y;
        f[i + 1] = moved;
    }
}

pub fn monodromy(ctx: &SuiteContext, report: &mut Report) {
    let mut rng = ctx.rng(SuiteName::Monodromy);
    let a = SL2Matrix::T;
    let b = b_matrix();
    let ab6 = a.mul(&b).and_then(|m| m.pow(6));
    report.exact("c7.ab_sixth_power", ab6 == Ok(SL2Matrix::IDENTITY), format!("{ab6:?}"));
    let twelve: Vec<SL2Matrix> = (0..6).flat_map(|_| [a, b]).collect();

    let mut identity_factorizations = vec![twelve.clone()];
    if let Some(f) = ctx.parsed(report, "c7", "fact24.txt", formats::parse_factorization) {
        match factorization_check(&f) {
            Ok(r) => report.checks("c7.fact24", &r.checks),
            Err(e) => report.exact("c7.fact24", false, e.to_string()),
        }
        match split_fibration(&f, 12) {
            Ok(s) => {
                report.checks("c7.fact24.split12", &s.checks);
                report.exact("c7.fact24.split12.identity_halves", s.trivial_halves, "");
            }
            Err(e) => report.exact("c7.fact24.split12", false, e.to_string()),
        }
        identity_factorizations.push(f);
    }

    // Random identity factorizations: Hurwitz moves and a global conjugation
    // applied to the known ones.
    let base = identity_factorizations.clone();
    for f in &base {
        for _ in 0..10 {
            let mut g = f.clone();
            for _ in 0..30 {
                let i = rng.random_range(0..g.len() - 1);
                hurwitz(&mut g, i);
            }
            let c = random_sl2(&mut rng, 20);
            if let Ok(h) = g.iter().map(|m| c.conjugate(m)).collect::<Result<Vec<_>, _>>() {
                g = h;
            }
            identity_factorizations.push(g);
        }
    }
    let mut certified = 0;
    let mut detail = String::new();
    for f in &identity_factorizations {
        match factorization_check(f) {
            Ok(r) if r.divisible_by_12 == Some(true) && product(f) == Ok(SL2Matrix::IDENTITY) => certified += 1,
            Ok(r) => detail = format!("length {} degree sum {}", r.length, r.degree_sum),
            Err(e) => detail = e.to_string(),
        }
    }
    report.exact(
        "c7.twelve_divides_length",
        certified == identity_factorizations.len(),
        if detail.is_empty() { format!("{certified} factorizations") } else { detail },
    );

    let mut roundtrip = 0;
    let mut bad = None;
    for _ in 0..1000 {
        let m = random_sl2(&mut rng, 1_000_000);
        if word_decompose(&m).evaluate() == Ok(m) {
            roundtrip += 1;
        } else {
            bad.get_or_insert(m);
        }
    }
    report.exact(
        "c7.word_roundtrip",
        roundtrip == 1000,
        bad.map_or_else(|| "1000/1000".to_string(), |m| format!("fails on {m}")),
    );

    let pairs = [
        ("fiber", [0, 1, 0, 0, 0, 0], KulikovType::II),
        ("ample", [0, 1, 0, 0, 1, 0], KulikovType::III),
        ("zero", [0, 0, 0, 0, 0, 0], KulikovType::I),
    ];
    for (name, coeffs, expected) in pairs {
        let l = CohomologyClassT4::from_coefficients(coeffs);
        let nil = cup_nilpotency(&l);
        let kul = cup_monodromy(&l).and_then(|m| classify_kulikov(&m));
        let ok = kul == Ok(expected) && nil == expected.nilpotency_index();
        let detail = match &kul {
            Ok(k) => format!("{k}, nilpotency {nil}"),
            Err(e) => e.to_string(),
        };
        report.exact(format!("c7.kulikov.{name}"), ok, detail);
    }
}

/// Uniform-ish element of `SL2(Z)` with entries bounded by about `bound`:
/// random coprime `(a, c)`, completed by the extended Euclidean algorithm.
pub fn random_sl2(rng: &mut impl Rng, bound: i64) -> SL2Matrix {
    use num_integer::Integer;
    loop {
        let a: i64 = rng.random_range(-bound..=bound);
        let c: i64 = rng.random_range(-bound..=bound);
        let e = a.extended_gcd(&c);
        if e.gcd != 1 {
            continue;
        }
        // a x + c y = 1, so [[a, -y], [c, x]] has determinant 1.
        let k: i64 = rng.random_range(-3..=3);
        if let Ok(m) = SL2Matrix::new(a, -e.y + k * a, c, e.x + k * c) {
            return m;
        }
    }
}

pub const CURVATURE_GRID: usize = 200;
pub const CURVATURE_TOL: f64 = 1e-6;

/// `K = sin(2 pi x) sin(4 pi y) / (8 pi^2)`; its gradient is a smooth
/// closed section whose discrete curvature is pure truncation error.
pub fn smooth_gradient(m: usize) -> Result<SampledSection, String> {
    use std::f64::consts::PI;
    SampledSection::from_fn(2, m, |x| {
        let (a, b) = (2.0 * PI * x[0], 4.0 * PI * x[1]);
        vec![a.cos() * b.sin() / (4.0 * PI), a.sin() * b.cos() / (2.0 * PI)]
    })
    .map_err(|e| e.to_string())
}

pub fn quantize(ctx: &SuiteContext, report: &mut Report) {
    let mut rng = ctx.rng(SuiteName::Quantize);
    if let Some(p2) = ctx.parsed(report, "c6", "p2.poly", formats::parse_polytope) {
        for (k, expect) in [(1, 10), (2, 28), (3, 55)] {
            let key = format!("c6.p2.k{k}");
            match QuantizationInstance::new(p2.clone(), k).and_then(|q| correspondence_check(&q)) {
                Ok(c) => {
                    report.exact(format!("{key}.bs_count"), c.bs_count == expect, format!("{}", c.bs_count));
                    report.exact(
                        format!("{key}.bijection"),
                        c.bijective && c.monomial_count == expect,
                        format!("{} pairs", c.pairs.len()),
                    );
                }
                Err(e) => report.exact(key, false, e.to_string()),
            }
        }
    }

    let two = section_bs_count(&[vec![2]]);
    report.exact(
        "c8.section.two_points",
        two.as_ref().is_ok_and(|c| c.count == 2),
        two.map_or_else(|e| e.to_string(), |c| format!("{} points", c.count)),
    );
    let mut tested = 0;
    let mut agree = 0;
    while tested < 50 {
        let n = rng.random_range(1..=3usize);
        let s: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect()).collect();
        let Ok(c) = section_bs_count(&s) else { continue };
        if c.determinant.abs() > 12 {
            continue;
        }
        tested += 1;
        if c.matches_determinant && c.count as i128 == c.determinant.abs() {
            agree += 1;
        }
    }
    report.exact("c8.section.count_equals_det", agree == tested, format!("{agree}/{tested}"));

    // Gradients of quadratic potentials x -> x^T S x / 2 + c x with S
    // symmetric integral are sections of the torus bundle.
    let mut worst = 0.0f64;
    let mut failure = None;
    for _ in 0..5 {
        let (s11, s12, s22): (i64, i64, i64) = (rng.random_range(-3..=3), rng.random_range(-3..=3), rng.random_range(-3..=3));
        let (c1, c2): (f64, f64) = (rng.random(), rng.random());
        let sec = SampledSection::from_fn(2, CURVATURE_GRID, |x| {
            vec![s11 as f64 * x[0] + s12 as f64 * x[1] + c1, s12 as f64 * x[0] + s22 as f64 * x[1] + c2]
        });
        match sec.and_then(|s| curvature_20(&TorusSection::Sampled(s), CURVATURE_TOL)) {
            Ok(r) => worst = worst.max(r.max_abs),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    match failure {
        Some(e) => report.exact("c8.curvature.gradient_closed", false, e),
        None => report.check("c8", &mirrorkit_core::Check::numeric("curvature.gradient_closed", worst, CURVATURE_TOL)),
    }

    let order = smooth_gradient(CURVATURE_GRID / 2).and_then(|coarse| {
        let fine = smooth_gradient(CURVATURE_GRID)?;
        let a = curvature_20(&TorusSection::Sampled(coarse), 1.0).map_err(|e| e.to_string())?.max_abs;
        let b = curvature_20(&TorusSection::Sampled(fine), 1.0).map_err(|e| e.to_string())?.max_abs;
        Ok((a, b))
    });
    match order {
        Ok((a, b)) => {
            let ratio = if b > 0.0 { a / b } else { f64::INFINITY };
            report.exact(
                "c8.curvature.second_order",
                (3.0..=5.0).contains(&ratio),
                format!("halving h divides the residual by {ratio:.2}"),
            );
        }
        Err(e) => report.exact("c8.curvature.second_order", false, e),
    }
}
