//! One function per subcommand, each filling a [`Report`].

use std::path::Path;

use rand::Rng;

use mirrorkit_core::arith::{rat, Rational};
use mirrorkit_core::lattice::{congruence, dn_mirror, standard_k3_embedding, Congruence, IntegerLattice};
use mirrorkit_core::monodromy::{
    classify_kulikov, cup_monodromy, cup_nilpotency, factorization_check, split_fibration, CohomologyClassT4,
    UnipotentOperator,
};
use mirrorkit_core::polytope::{
    classify_reflexive_2d, degeneration_polytope, torus_subdivision_check, LatticePolytope, TorusDefect,
};
use mirrorkit_core::quantize::{correspondence_check, curvature_20, section_bs_count, QuantizationInstance, TorusSection};
use mirrorkit_core::theta::{
    abelian_suite, annulus_chart, elliptic_suite, mirror_pair, pairing_check, preimage_count, Complex,
    TruncationPolicy, TyurinGluingData, UpperHalfParam,
};
use mirrorkit_core::Check;

use crate::cli::{Command, GlobalOpts, GluingArgs, GlueCmd, LatticeCmd, MonodromyCmd, PolytopeCmd, QuantizeCmd, ThetaCmd};
use crate::formats::{self, FormatError, Source};
use crate::report::{sci, Report};
use crate::suites::{self, annulus_samples, SuiteContext, SuiteName, PAIRING_CHARTS};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    /// Bad arguments or unreadable input: exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] FormatError),
    /// The input was valid but the computation could not be carried out:
    /// exit code 1.
    #[error("{0}")]
    Compute(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) | CommandError::Input(_) => 2,
            CommandError::Compute(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CommandError>;

fn compute<E: std::fmt::Display>(e: E) -> CommandError {
    CommandError::Compute(e.to_string())
}

fn load(report: &mut Report, path: &Path) -> Result<Source> {
    let src = Source::read(path)?;
    report.input(&path.display().to_string(), src.text.as_bytes());
    Ok(src)
}

fn truncation(g: &GlobalOpts) -> Result<TruncationPolicy> {
    TruncationPolicy::new(g.trunc, 1e-9).map_err(|e| CommandError::Usage(e.to_string()))
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_complex(z: Complex) -> String {
    format!("{}{}{}i", sci(z.re), if z.im < 0.0 { "-" } else { "+" }, sci(z.im.abs()))
}

fn fmt_matrix(m: &[Vec<i64>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| fmt_vec(r)).collect();
    format!("[{}]", rows.join(", "))
}

/// Per-suite timings go to standard error so reports stay byte-identical.
pub fn execute(cmd: &Command, g: &GlobalOpts, report: &mut Report) -> Result<()> {
    report.cap_tolerance(g.tol);
    match cmd {
        Command::Lattice(c) => lattice(c, report),
        Command::Polytope(c) => polytope(c, g, report),
        Command::Theta(ThetaCmd::Verify(a)) => theta_verify(a, g, report),
        Command::Glue(GlueCmd::Elliptic(a)) => glue_elliptic(a, g, report),
        Command::Glue(GlueCmd::Abelian { k, l, tau, shift, samples }) => {
            glue_abelian(*k, *l, *tau, *shift, *samples, g, report)
        }
        Command::Monodromy(c) => monodromy(c, report),
        Command::Quantize(c) => quantize(c, g, report),
        Command::Suite { name } => {
            if g.trunc < 1 {
                return Err(CommandError::Usage("--trunc must be positive".into()));
            }
            let ctx = SuiteContext::new(g.seed, g.trunc);
            for (s, secs) in suites::run(*name, &ctx, report) {
                eprintln!("suite {}: {:.3} s", s.label(), secs);
            }
            Ok(())
        }
    }
}

fn lattice(cmd: &LatticeCmd, report: &mut Report) -> Result<()> {
    match cmd {
        LatticeCmd::Mirror { m, f } => {
            let src = load(report, m)?;
            let emb = if formats::is_embedding(&src) {
                formats::parse_embedding(&src)?
            } else {
                standard_k3_embedding(&formats::parse_gram(&src)?).map_err(compute)?
            };
            let f = f.as_deref().map(formats::parse_vector).transpose().map_err(CommandError::Usage)?;
            let d = dn_mirror(&emb, f.as_deref()).map_err(compute)?;
            report.result("rank_m", d.m.rank());
            report.result("signature_m", d.signature_m);
            report.result("f", fmt_vec(&d.f));
            report.result("f_source", if d.f_searched { "search" } else { "given" });
            report.result("rank_n", d.n.rank());
            report.result("signature_n", d.signature_n);
            report.result("det_n", d.n.determinant().map_err(compute)?);
            report.result("n_even", d.n.is_even());
            if d.n.rank() <= 4 {
                report.result("gram_n", fmt_matrix(d.n.gram()));
            }
            let u = IntegerLattice::hyperbolic_plane();
            let identified = match congruence(&d.n, &u).map_err(compute)? {
                Congruence::Equivalent(_) => "U",
                Congruence::NotEquivalent(_) => "not U",
                Congruence::Inconclusive => "undetermined",
            };
            report.result("n_congruent_to", identified);
            report.checks("dn", &d.checks);
            Ok(())
        }
        LatticeCmd::Sig { gram } => {
            let src = load(report, gram)?;
            let l = formats::parse_gram(&src)?;
            let det = l.determinant().map_err(compute)?;
            report.result("rank", l.rank());
            report.result("det", det);
            report.result("even", l.is_even());
            report.result("unimodular", det.abs() == 1);
            report.exact("gram.nondegenerate", det != 0, format!("det {det}"));
            if det != 0 {
                report.result("signature", l.signature().map_err(compute)?);
            }
            Ok(())
        }
    }
}

fn polytope_input(report: &mut Report, path: &Path) -> Result<LatticePolytope> {
    let src = load(report, path)?;
    Ok(formats::parse_polytope(&src)?)
}

fn vertex_list<T: std::fmt::Display>(vs: &[Vec<T>]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| fmt_vec(v)).collect();
    parts.join(" ")
}

fn polytope(cmd: &PolytopeCmd, g: &GlobalOpts, report: &mut Report) -> Result<()> {
    match cmd {
        PolytopeCmd::Dual(i) => {
            let p = polytope_input(report, &i.input)?;
            let dual = p.polar_dual().map_err(compute)?;
            let back = dual.polar_dual().map_err(compute)?;
            report.result("vertices", vertex_list(p.vertices()));
            report.result("dual_vertices", vertex_list(dual.vertices()));
            report.result("dual_is_lattice", dual.is_lattice());
            let mut a: Vec<Vec<Rational>> = back.vertices().to_vec();
            let mut b: Vec<Vec<Rational>> = p.as_rational().vertices().to_vec();
            a.sort();
            b.sort();
            report.exact("polytope.polar_involution", a == b, "");
            Ok(())
        }
        PolytopeCmd::Reflexive(i) => {
            let p = polytope_input(report, &i.input)?;
            let interior = p.as_rational().origin_is_interior();
            report.result("origin_interior", interior);
            report.exact("polytope.reflexive", p.is_reflexive(), format!("{} facets", p.facets().len()));
            Ok(())
        }
        PolytopeCmd::Points { input, k } => {
            let p = polytope_input(report, &input.input)?;
            let closed = p.lattice_points(*k).map_err(compute)?;
            let interior = p.interior_lattice_points(*k).map_err(compute)?;
            report.result("k", k);
            report.result("closed_count", closed.len());
            report.result("interior_count", interior.len());
            if closed.len() <= 200 {
                report.result("points", vertex_list(&closed));
            }
            report.exact("polytope.interior_subset", interior.iter().all(|x| closed.contains(x)), "");
            Ok(())
        }
        PolytopeCmd::Legendre(i) => {
            let p = polytope_input(report, &i.input)?;
            // Facet <a, x> >= b is the hyperplane where psi(-a) = -b.
            let mut table = Vec::new();
            let mut matches = true;
            for f in p.facets() {
                let n: Vec<i64> = f.integer_normal().iter().map(|&x| -(x as i64)).collect();
                let psi = p.support_function(&n);
                matches &= rat(psi as i128) == -f.rhs;
                table.push(format!("{}->{}", fmt_vec(&n), psi));
            }
            report.result("support_on_facet_normals", table.join(" "));
            report.exact("legendre.facets_are_support_values", matches, format!("{} facets", p.facets().len()));
            let mut rng = SuiteContext::new(g.seed, g.trunc).rng(SuiteName::Polytope);
            let mut sublinear = true;
            for _ in 0..100 {
                let a: Vec<i64> = (0..p.dim()).map(|_| rng.random_range(-20..=20)).collect();
                let b: Vec<i64> = (0..p.dim()).map(|_| rng.random_range(-20..=20)).collect();
                let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                let twice: Vec<i64> = a.iter().map(|x| 2 * x).collect();
                sublinear &= p.support_function(&twice) == 2 * p.support_function(&a);
                sublinear &= p.support_function(&sum) <= p.support_function(&a) + p.support_function(&b);
            }
            report.exact("legendre.support_sublinear", sublinear, "100 seeded pairs");
            Ok(())
        }
        PolytopeCmd::Degenerate { input, pl } => {
            let p = polytope_input(report, &input.input)?;
            let src = load(report, pl)?;
            let phi = formats::parse_pl(&src)?;
            let deg = degeneration_polytope(&p, &phi).map_err(compute)?;
            report.result("cells", deg.cells.len());
            for (i, c) in deg.cells.iter().enumerate() {
                report.result(format!("cell{i}.piece"), c.piece);
                report.result(format!("cell{i}.vertices"), vertex_list(c.polytope.vertices()));
            }
            report.result("facets_of_polyhedron", deg.inequalities.len());
            report.exact(
                "degeneration.cells_cover",
                deg.cell_volume_sum == deg.volume,
                format!("{} of {}", deg.cell_volume_sum, deg.volume),
            );
            let lattice = deg.cells.iter().all(|c| c.lattice.is_some());
            report.exact("degeneration.lattice_cells", lattice, "");
            report.exact("degeneration.strictly_convex", deg.strictly_convex, "");
            Ok(())
        }
        PolytopeCmd::Classify2d { radius } => {
            if *radius < 1 {
                return Err(CommandError::Usage("--radius must be positive".into()));
            }
            let classes = classify_reflexive_2d(*radius).map_err(compute)?;
            report.result("radius", radius);
            report.result("classes", classes.len());
            for (i, c) in classes.iter().enumerate() {
                report.result(format!("class{i:02}"), vertex_list(c.vertices()));
            }
            let reflexive = classes.iter().filter(|c| c.is_reflexive()).count();
            report.exact("classify.all_reflexive", reflexive == classes.len(), format!("{reflexive}/{}", classes.len()));
            Ok(())
        }
        PolytopeCmd::Torus(i) => {
            let src = load(report, &i.input)?;
            let (torus, cells) = formats::parse_subdivision(&src)?;
            let d = torus.unwrap_or_else(|| vec![1; cells[0].dim()]);
            let r = torus_subdivision_check(&d, &cells).map_err(compute)?;
            report.result("periods", fmt_vec(&d));
            report.result("cells", r.cell_count);
            report.result("vertex_counts", fmt_vec(&r.vertex_counts));
            report.result("covered_volume", r.covered_volume);
            let defects: Vec<String> = r
                .defects
                .iter()
                .map(|x| match x {
                    TorusDefect::Overlap { a, b, shift } => format!("overlap {a}/{b} shift {}", fmt_vec(shift)),
                    TorusDefect::Gap { covered, expected } => format!("gap covered {covered} of {expected}"),
                    TorusDefect::NonFaceIntersection { a, b, shift } => {
                        format!("non-face intersection {a}/{b} shift {}", fmt_vec(shift))
                    }
                })
                .collect();
            report.exact("torus.face_to_face", r.valid, defects.join("; "));
            Ok(())
        }
    }
}

fn gluing(a: &GluingArgs) -> Result<TyurinGluingData> {
    TyurinGluingData::new(a.tau1, a.tau2).map_err(|e| CommandError::Usage(e.to_string()))
}

fn theta_verify(a: &GluingArgs, g: &GlobalOpts, report: &mut Report) -> Result<()> {
    let gl = gluing(a)?;
    let t = truncation(g)?;
    report.truncation(g.trunc);
    let mut rng = SuiteContext::new(g.seed, g.trunc).rng(SuiteName::Theta);
    let zs = annulus_samples(&mut rng, &gl, a.samples.max(1));
    report.result("samples", zs.len());
    let checks = elliptic_suite(&gl, t, &zs).map_err(compute)?;
    report.checks("", &checks);
    report.check("", &pairing_check(&gl, &zs, PAIRING_CHARTS));
    Ok(())
}

fn glue_elliptic(a: &GluingArgs, g: &GlobalOpts, report: &mut Report) -> Result<()> {
    let gl = gluing(a)?;
    let t = truncation(g)?;
    report.truncation(g.trunc);
    report.result("q1", fmt_complex(gl.q1()));
    report.result("q2", fmt_complex(gl.q2()));
    report.result("q", fmt_complex(gl.q()));
    for j in -2..=2 {
        let c = annulus_chart(j, &gl);
        report.result(format!("chart{j}.annulus"), format!("{} < |z| < {}", sci(c.annulus.r_in), sci(c.annulus.r_out)));
    }
    let mut rng = SuiteContext::new(g.seed, g.trunc).rng(SuiteName::Theta);
    let zs = annulus_samples(&mut rng, &gl, a.samples.max(1));
    let tol = g.tol.unwrap_or(1e-9);
    let mut auto = 0.0f64;
    let mut deck = 0.0f64;
    for (i, &z) in zs.iter().enumerate() {
        let here = mirror_pair(z, &gl, t).map_err(compute)?;
        let there = mirror_pair(gl.q() * z, &gl, t).map_err(compute)?;
        let flipped = mirror_pair(gl.q1() / z, &gl, t).map_err(compute)?;
        auto = auto.max(here.corrected.chordal(&there.corrected));
        deck = deck.max(here.corrected.chordal(&flipped.corrected));
        if i < 8 {
            report.result(
                format!("sample{i}"),
                format!("z = {} -> [{} : {}]", fmt_complex(z), fmt_complex(here.corrected.a), fmt_complex(here.corrected.b)),
            );
        }
    }
    report.check("", &Check::numeric("glue.automorphy_chordal", auto, tol));
    report.check("", &Check::numeric("glue.deck_invariance", deck, tol));
    let target = mirror_pair(zs[0], &gl, t).map_err(compute)?.corrected;
    let count = preimage_count(&target, &gl, t).map_err(compute)?;
    report.result("preimage_radius", sci(count.radius));
    report.exact("glue.preimage_count", count.count == 2, format!("{}", count.count));
    Ok(())
}

fn glue_abelian(
    k: u32,
    l: u32,
    tau: Complex,
    shift: Option<Complex>,
    samples: usize,
    g: &GlobalOpts,
    report: &mut Report,
) -> Result<()> {
    let tau = UpperHalfParam::new(tau).map_err(|e| CommandError::Usage(e.to_string()))?;
    let t = truncation(g)?;
    report.truncation(g.trunc);
    let mut rng = SuiteContext::new(g.seed, g.trunc).rng(SuiteName::Theta);
    let zetas: Vec<Complex> = (0..samples.max(1))
        .map(|_| Complex::new(rng.random_range(-0.5..0.5), rng.random_range(0.0..0.2)))
        .collect();
    report.result("k", k);
    report.result("l", l);
    report.result("polarization", format!("({}, {})", k.min(l), k.max(l)));
    let checks = abelian_suite(k, l, tau, shift, t, &zetas).map_err(|e| match e {
        mirrorkit_core::theta::ThetaError::InvalidPolarization => CommandError::Usage(e.to_string()),
        e => compute(e),
    })?;
    report.checks("", &checks);
    Ok(())
}

fn monodromy(cmd: &MonodromyCmd, report: &mut Report) -> Result<()> {
    match cmd {
        MonodromyCmd::Check { fact } => {
            let src = load(report, fact)?;
            let f = formats::parse_factorization(&src)?;
            let r = factorization_check(&f).map_err(compute)?;
            report.result("length", r.length);
            report.result("product", r.product);
            report.result("degree_sum_mod_12", r.degree_sum);
            report.checks("factorization", &r.checks);
            Ok(())
        }
        MonodromyCmd::Split { fact, cut } => {
            let src = load(report, fact)?;
            let f = formats::parse_factorization(&src)?;
            let s = split_fibration(&f, *cut).map_err(compute)?;
            report.result("first_length", s.first.len());
            report.result("second_length", s.second.len());
            report.result("first_product", s.first_product);
            report.result("second_product", s.second_product);
            report.checks("split", &s.checks);
            Ok(())
        }
        MonodromyCmd::Kulikov { gram } => {
            let src = load(report, gram)?;
            let m = UnipotentOperator::new(formats::parse_square(&src)?).map_err(compute)?;
            let ty = classify_kulikov(&m).map_err(compute)?;
            report.result("type", ty);
            report.result("nilpotency_index", ty.nilpotency_index());
            report.exact("kulikov.log_nilpotent", true, format!("{ty}"));
            Ok(())
        }
        MonodromyCmd::Cup { class } => {
            let c: [i64; 6] = class
                .as_slice()
                .try_into()
                .map_err(|_| CommandError::Usage("--class takes six integers".into()))?;
            let l = CohomologyClassT4::from_coefficients(c);
            let nil = cup_nilpotency(&l);
            let ty = classify_kulikov(&cup_monodromy(&l).map_err(compute)?).map_err(compute)?;
            report.result("pfaffian", l.pfaffian());
            report.result("cup_nilpotency", nil);
            report.result("type", ty);
            report.exact(
                "cup.nilpotency_matches_type",
                nil == ty.nilpotency_index(),
                format!("nilpotency {nil}, {ty}"),
            );
            Ok(())
        }
    }
}

fn quantize(cmd: &QuantizeCmd, g: &GlobalOpts, report: &mut Report) -> Result<()> {
    match cmd {
        QuantizeCmd::Count { poly, k } => {
            let p = polytope_input(report, poly)?;
            let q = QuantizationInstance::new(p, *k).map_err(|e| CommandError::Usage(e.to_string()))?;
            let c = correspondence_check(&q).map_err(compute)?;
            report.result("k", k);
            report.result("bs_count", c.bs_count);
            report.result("monomial_count", c.monomial_count);
            report.exact("quantize.bijection", c.bijective, format!("{} pairs", c.pairs.len()));
            Ok(())
        }
        QuantizeCmd::Section { matrix } => {
            let src = load(report, matrix)?;
            let s = formats::parse_square(&src)?;
            let c = section_bs_count(&s).map_err(compute)?;
            report.result("det", c.determinant);
            report.result("count", c.count);
            if c.count <= 200 {
                report.result("points", vertex_list(&c.points));
            }
            report.exact("section.count_equals_det", c.matches_determinant, format!("{} vs {}", c.count, c.determinant.abs()));
            Ok(())
        }
        QuantizeCmd::Curvature { samples } => {
            let src = load(report, samples)?;
            let s = formats::parse_samples(&src)?;
            let tol = g.tol.unwrap_or(suites::CURVATURE_TOL);
            let r = curvature_20(&TorusSection::Sampled(s), tol).map_err(compute)?;
            if let Some(h) = r.spacing {
                report.result("spacing", sci(h));
            }
            report.check("", &Check::numeric("curvature.closed", r.max_abs, tol));
            Ok(())
        }
    }
}
