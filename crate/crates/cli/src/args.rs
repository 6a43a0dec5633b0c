use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kmlab_core::numlat::XiBasis;

#[derive(Parser, Debug)]
#[command(name = "kmlab", version, about = "Exact verification of the Kudla–Millson / Ikeda / Weil-representation identities")]
pub struct Cli {
    /// Add wall-clock time to the summary line (reports are otherwise byte-identical across runs).
    #[arg(long, global = true)]
    pub timings: bool,

    /// Monomial-operation budget; overrides KMLAB_TERM_BUDGET.
    #[arg(long, global = true, value_name = "N")]
    pub term_budget: Option<u128>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact checks of the finite identities.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Kudla–Millson form computations.
    Km {
        #[command(subcommand)]
        cmd: KmCmd,
    },
    /// Hermitian lattice enumeration.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Fourier coefficient assembly of the generating series.
    Series {
        #[command(subcommand)]
        cmd: SeriesCmd,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Sign {
    Canonical,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Basis {
    /// `ξ = Σ s_i x_i` with the trace-dual basis.
    Dual,
    /// `ξ = Σ r_i x_i` with the power basis.
    Integral,
}

impl From<Basis> for XiBasis {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Dual => XiBasis::Dual,
            Basis::Integral => XiBasis::Integral,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Laguerre polynomials g_k: closed form against the three-term recursion.
    Laguerre {
        #[arg(long, default_value_t = 12)]
        max_k: u16,
    },
    /// Angular vanishing: the isotropic line integral of F_{a,b} is 0 for a != b, with its μ-gap.
    Fab {
        #[arg(long, default_value_t = 6)]
        max: u16,
    },
    /// Radial vanishing: ∫ f_k(z/√2) e^{-π|z|²} dz = 0 for k >= 1, via the alternating binomial sum.
    Fk {
        #[arg(long, default_value_t = 10)]
        max_k: u16,
    },
    /// The Ikeda map kills φ_KM, with a Case 1 (a != b) / Case 2 (a = b) certificate per (σ, σ') term.
    Ikeda {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum, default_value_t = Sign::Canonical)]
        sign: Sign,
    },
    /// Sorting sign of ξ_{σ,σ'} against ω ∧ ω̄, compared with (-1)^{pq(p-1)/2} over all of (S_p^q)².
    Signs {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Partial Fourier transform: F² = parity on monomials, and φ̂(v0, 0) = Ik(φ)(v0) on random inputs.
    Fourier {
        #[arg(long, default_value_t = 6)]
        max_degree: u16,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        seed: u64,
    },
    /// Trace duality: Tr_{E/E0}(Q(ξ, η) b) = Σ_ij (b)_{ji} (x_i, y_j) on random exact samples.
    Trace {
        #[arg(long, value_name = "F.json")]
        field: PathBuf,
        /// Imaginary quadratic ring: a negative discriminant, or `gaussian` / `eisenstein`.
        #[arg(long, value_name = "E0", allow_hyphen_values = true)]
        ring: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Basis::Dual)]
        basis: Basis,
    },
    /// Double-coset fiber product decomposition on seeded random free finite actions.
    Fiber {
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum KmCmd {
    /// Expand φ⁺ = D⁺ D̄⁺ φ0 and compare with the 2^{-4q} (α, α')-expansion.
    Expand {
        #[arg(long)]
        p: u16,
        #[arg(long)]
        q: u16,
    },
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Representation numbers #{x ∈ L : (x, x) = n} for n <= bound (theta series coefficients).
    Theta {
        #[arg(long, value_name = "L.json")]
        lattice: PathBuf,
        #[arg(long)]
        bound: String,
    },
    /// Σ_β #I_β(L0) = #I_b(L) for L = L0 ⊗ O_F, grouping by Gram matrices with ᵗrβr = b.
    Grouping {
        #[arg(long, value_name = "F.json")]
        field: PathBuf,
        #[arg(long, value_name = "L.json")]
        lattice: PathBuf,
        /// Coordinates of b in the power basis, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        bound: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SeriesCmd {
    /// c0 + Σ_b i^n v^{-m/2} I_b(τ): the generating series from a volume table, prefactors cancelled exactly.
    Assemble {
        #[arg(long, value_name = "V.json")]
        volumes: PathBuf,
        /// One point of the upper half-plane per real embedding, e.g. "0.2+0.45i,0.1+1i".
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c0: String,
        /// Totally real field for b; without it b is read through the identity embedding.
        #[arg(long, value_name = "F.json")]
        field: Option<PathBuf>,
        /// `csv` prints the q-expansion table (b, |a_b|, arg a_b).
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

impl Command {
    pub fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Verify { cmd } => (
                "verify",
                match cmd {
                    VerifyCmd::Laguerre { .. } => "laguerre",
                    VerifyCmd::Fab { .. } => "fab",
                    VerifyCmd::Fk { .. } => "fk",
                    VerifyCmd::Ikeda { .. } => "ikeda",
                    VerifyCmd::Signs { .. } => "signs",
                    VerifyCmd::Fourier { .. } => "fourier",
                    VerifyCmd::Trace { .. } => "trace",
                    VerifyCmd::Fiber { .. } => "fiber",
                },
            ),
            Command::Km { .. } => ("km", "expand"),
            Command::Lattice { cmd: LatticeCmd::Theta { .. } } => ("lattice", "theta"),
            Command::Lattice { cmd: LatticeCmd::Grouping { .. } } => ("lattice", "grouping"),
            Command::Series { .. } => ("series", "assemble"),
        };
        format!("{} {}", group, sub)
    }

    pub fn is_csv(&self) -> bool {
        matches!(self, Command::Series { cmd: SeriesCmd::Assemble { format: Format::Csv, .. } })
    }
}
