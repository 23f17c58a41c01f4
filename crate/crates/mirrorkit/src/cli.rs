//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use mirrorkit_core::theta::{Complex, DEFAULT_TRUNCATION};

use crate::formats::parse_complex;
use crate::report::Format;
use crate::suites::SuiteName;

#[derive(Debug, Parser)]
#[command(name = "mirrorkit", version, about = "Verification workbench for lattice, toric, theta-function and monodromy constructions in mirror symmetry")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed of the sample generator.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of terms kept in every q-series and product.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNCATION)]
    pub trunc: usize,
    /// Tolerance for commands with a single numeric threshold; elsewhere it
    /// can only tighten the built-in tolerances.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral lattices and the Dolgachev-Nikulin mirror.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Lattice polytopes, reflexive polygons and toric degenerations.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Theta-function identities of the elliptic gluing.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Gluing of Landau-Ginzburg models into elliptic and abelian fibrations.
    #[command(subcommand)]
    Glue(GlueCmd),
    /// SL2(Z) factorizations and degenerations of K3 surfaces.
    #[command(subcommand)]
    Monodromy(MonodromyCmd),
    /// Bohr-Sommerfeld counts and curvature of torus sections.
    #[command(subcommand)]
    Quantize(QuantizeCmd),
    /// Runs a verification suite.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Mirror lattice N of a hyperbolic lattice M inside the K3 lattice.
    Mirror {
        /// Gram matrix of M (embedded blockwise) or an explicit embedding.
        #[arg(long)]
        m: PathBuf,
        /// Isotropic vector f in K3 lattice coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
    },
    /// Rank, signature, determinant and parity of a Gram matrix.
    Sig {
        #[arg(long)]
        gram: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolytopeCmd {
    /// Polar dual and the involution P** = P.
    Dual(PolyIn),
    /// Whether P is reflexive.
    Reflexive(PolyIn),
    /// Lattice points of kP.
    Points {
        #[command(flatten)]
        input: PolyIn,
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Support function of P on its facet normals.
    Legendre(PolyIn),
    /// Subdivision of P induced by a piecewise-linear function.
    Degenerate {
        #[command(flatten)]
        input: PolyIn,
        #[arg(long)]
        pl: PathBuf,
    },
    /// Reflexive polygons up to GL2(Z).
    Classify2d {
        #[arg(long, default_value_t = mirrorkit_core::polytope::REFLEXIVE_SEARCH_RADIUS)]
        radius: i64,
    },
    /// Whether cells tile a torus face to face.
    Torus(PolyIn),
}

#[derive(Debug, Args)]
pub struct PolyIn {
    #[arg(long = "in")]
    pub input: PathBuf,
}

fn complex_arg(s: &str) -> Result<Complex, String> {
    parse_complex(s)
}

#[derive(Debug, Args)]
pub struct GluingArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg, default_value = "0.3,0.8")]
    pub tau1: Complex,
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg, default_value = "-0.1,0.7")]
    pub tau2: Complex,
    /// Number of seeded sample points.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum ThetaCmd {
    /// Every identity of the elliptic gluing at (tau1, tau2).
    Verify(GluingArgs),
}

#[derive(Debug, Subcommand)]
pub enum GlueCmd {
    /// Charts, glued superpotentials and the double cover to P^1.
    Elliptic(GluingArgs),
    /// The abelian surface E_{k tau} x E_{l tau} fibred over P^1.
    Abelian {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg, default_value = "0.2,1.5")]
        tau: Complex,
        /// Splitting k tau = tau1' + tau2' with tau1' = shift; defaults to k tau / 2.
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        shift: Option<Complex>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum MonodromyCmd {
    /// Product, transvection types and the length modulo 12.
    Check {
        #[arg(long)]
        fact: PathBuf,
    },
    /// Cuts an identity factorization into two pieces.
    Split {
        #[arg(long)]
        fact: PathBuf,
        #[arg(long)]
        cut: usize,
    },
    /// Kulikov type of a unipotent monodromy matrix.
    Kulikov {
        #[arg(long)]
        gram: PathBuf,
    },
    /// Cup product with a class on the 4-torus.
    Cup {
        /// Coefficients a12 a13 a14 a23 a24 a34.
        #[arg(long, num_args = 6, allow_negative_numbers = true, required = true)]
        class: Vec<i64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum QuantizeCmd {
    /// Bohr-Sommerfeld points of level k against monomials of kP.
    Count {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Intersections of the section x -> Sx with the zero section.
    Section {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// (2,0)-curvature of a sampled section.
    Curvature {
        #[arg(long)]
        samples: PathBuf,
    },
}
