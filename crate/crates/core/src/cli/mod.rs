//! Command-line front end.

mod report;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{tensor_membership, AlgebraTriple, MatrixAlgebra};
use crate::error::{shape_err, Error, Result};
use crate::factorize::{
    reconstruction_error, schur_s1_factorize, to_weak_factorization, verify_factorization_seeded,
};
use crate::io::{self, SymbolInput};
use crate::linalg::{schatten_norm, CMatrix, Schatten};
use crate::multiplier::{apply_schur, apply_tau, is_modular};
use crate::norms::{
    amplified_norm, amplified_norm_schur, gamma2, norm_bilinear, norm_tau, s1_norm_schur_with,
    AscentOptions, NormEstimate, NormKind, Target,
};
use crate::symbols::{embed_schur, slice, sup_norm, Symbol3};

pub use report::{Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bimult",
    version,
    about = "Bilinear operator and Schur multiplier laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every randomized step.
    #[arg(long, env = "BIMULT_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Restarts for heuristic maximization.
    #[arg(long, env = "BIMULT_RESTARTS", default_value_t = 20, global = true)]
    pub restarts: usize,
    /// Numerical tolerance.
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a multiplier to a pair (y, x).
    Apply {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the norm of the bilinear map into S2, B or S1.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "s1")]
        target: Target,
        /// Include witness tuples in the report.
        #[arg(long)]
        witnesses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Factorization norm of a matrix.
    Gamma2 {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Factor a Schur symbol and verify the resulting family.
    Factorize {
        #[arg(long)]
        input: PathBuf,
        /// Algebra triple used for the membership checks.
        #[arg(long, default_value = "diagonal,diagonal,diagonal")]
        algebras: String,
        /// Keep only the first m terms of the family.
        #[arg(long)]
        truncate: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare tensor membership with modularity of the multiplier.
    VerifyModular {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        algebras: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify a factor family against a symbol.
    VerifyFactorization {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value = "full,full,full")]
        algebras: String,
        #[command(flatten)]
        common: Common,
    },
    /// Level-n amplification lower bound.
    Amplify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "s1")]
        target: Target,
        #[arg(long)]
        witnesses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the bundled verification suites.
    Selftest {
        /// Corrupt one suite on purpose.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Apply { common, .. }
            | Command::Norm { common, .. }
            | Command::Gamma2 { common, .. }
            | Command::Factorize { common, .. }
            | Command::VerifyModular { common, .. }
            | Command::VerifyFactorization { common, .. }
            | Command::Amplify { common, .. }
            | Command::Selftest { common, .. } => common,
        }
    }
}

impl Common {
    fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-2).contains(&self.tol) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {:e} outside [1e-12, 1e-2]",
                self.tol
            )));
        }
        if !(1..=10_000).contains(&self.restarts) {
            return Err(Error::InvalidArgument(format!(
                "restarts {} outside [1, 10000]",
                self.restarts
            )));
        }
        Ok(())
    }

    fn ascent(&self) -> AscentOptions {
        AscentOptions::new(self.restarts, self.seed)
    }

    fn gamma2_tol(&self) -> f64 {
        self.tol.max(1e-10)
    }
}

/// Outcome of a command: the report and whether its verification passed.
pub struct Outcome {
    pub report: Report,
    pub verified: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            verified: true,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::ModularityMethodMismatch { .. } => EXIT_VERIFY,
        _ => EXIT_CONTRACT,
    }
}

fn complex_list(v: &[crate::Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn matrices(ms: &[CMatrix]) -> Value {
    Value::Array(ms.iter().map(io::matrix_to_json).collect())
}

fn estimate_json(e: &NormEstimate, witnesses: bool) -> Value {
    let mut v = json!({
        "value": e.value,
        "kind": e.kind.to_string(),
        "restarts_used": e.restarts_used,
        "iterations": e.iterations,
    });
    if witnesses {
        v["witness_x"] = matrices(&e.witness_x);
        v["witness_y"] = matrices(&e.witness_y);
    }
    v
}

fn load_symbol(path: &PathBuf) -> Result<SymbolInput> {
    io::parse_symbol(&io::read_text(path)?)
}

fn load_matrix(path: &PathBuf) -> Result<CMatrix> {
    io::parse_matrix(&io::read_text(path)?)
}

fn as_general(s: &SymbolInput) -> Symbol3 {
    match s {
        SymbolInput::Schur(s) => embed_schur(s),
        SymbolInput::General(p) => p.clone(),
    }
}

/// `m1,m2,m3` where each entry is a preset or `gen:<path>`.
pub fn parse_algebras(spec: &str, dims: [usize; 3]) -> Result<AlgebraTriple> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "expected three algebras, got '{spec}'"
        )));
    }
    let mut legs = Vec::with_capacity(3);
    for (part, &d) in parts.iter().zip(&dims) {
        let alg = match part.strip_prefix("gen:") {
            Some(path) => {
                let a = io::parse_generators(&io::read_text(path)?)?;
                if a.dim() != d {
                    return Err(shape_err(format!(
                        "generator file {path} has dim {} but the leg has {d}",
                        a.dim()
                    )));
                }
                a
            }
            None => MatrixAlgebra::from_preset(part, d)?,
        };
        legs.push(alg);
    }
    let m3 = legs.pop().expect("three legs");
    let m2 = legs.pop().expect("three legs");
    let m1 = legs.pop().expect("three legs");
    Ok(AlgebraTriple::new(m1, m2, m3))
}

fn cmd_apply(input: &PathBuf, x: &PathBuf, y: &PathBuf) -> Result<Outcome> {
    let sym = load_symbol(input)?;
    let x = load_matrix(x)?;
    let y = load_matrix(y)?;
    let out = match &sym {
        SymbolInput::Schur(s) => apply_schur(s, &y, &x)?,
        SymbolInput::General(p) => apply_tau(p, &y, &x)?,
    };
    let mut r = Report::new();
    r.put("result", io::matrix_to_json(&out))
        .put("norm_s1", schatten_norm(&out, Schatten::One)?)
        .put("norm_s2", schatten_norm(&out, Schatten::Two)?)
        .put("norm_sinf", schatten_norm(&out, Schatten::Inf)?);
    Ok(Outcome::ok(r))
}

fn cmd_norm(input: &PathBuf, target: Target, witnesses: bool, c: &Common) -> Result<Outcome> {
    let sym = load_symbol(input)?;
    let mut r = Report::new();
    r.put("target", target.to_string());
    match &sym {
        SymbolInput::Schur(s) => match target {
            Target::S1 => {
                let b = s1_norm_schur_with(s, c.gamma2_tol(), &c.ascent())?;
                r.put(
                    "upper",
                    json!({"value": b.upper, "kind": NormKind::UpperBound.to_string()}),
                )
                .put("lower", estimate_json(&b.lower, witnesses))
                .put("slice_gamma2", b.slice_values.clone());
            }
            _ => {
                let e = norm_bilinear(s, target, c.restarts, c.seed)?;
                r.put(
                    "exact",
                    json!({"value": sup_norm(s), "kind": NormKind::Exact.to_string()}),
                )
                .put("lower", estimate_json(&e, witnesses));
            }
        },
        SymbolInput::General(p) => {
            let e = norm_tau(p, target, c.restarts, c.seed)?;
            r.put("lower", estimate_json(&e, witnesses));
        }
    }
    Ok(Outcome::ok(r))
}

fn cmd_gamma2(input: &PathBuf, c: &Common) -> Result<Outcome> {
    let m = load_matrix(input)?;
    let g = gamma2(&m, c.gamma2_tol())?;
    let mut r = Report::new();
    r.put("value", g.value)
        .put("lower_bound", g.lower_bound)
        .put("primal_residual", g.primal_residual)
        .put(
            "a_vecs",
            Value::Array(g.a_vecs.iter().map(|v| complex_list(v)).collect()),
        )
        .put(
            "b_vecs",
            Value::Array(g.b_vecs.iter().map(|v| complex_list(v)).collect()),
        )
        .put("x_cert", io::matrix_to_json(&g.x_cert))
        .put("y_cert", io::matrix_to_json(&g.y_cert));
    Ok(Outcome::ok(r))
}

fn cmd_factorize(
    input: &PathBuf,
    algebras: &str,
    truncate: Option<usize>,
    c: &Common,
) -> Result<Outcome> {
    let SymbolInput::Schur(s) = load_symbol(input)? else {
        return Err(shape_err("factorize needs a schur symbol"));
    };
    let t = parse_algebras(algebras, s.dims())?;
    let (a, b) = schur_s1_factorize(&s, c.gamma2_tol())?;
    let mut family = to_weak_factorization(&a, &b)?;
    if let Some(m) = truncate {
        family = family.truncated(m);
    }
    let gmax = (0..s.dims()[1])
        .map(|t2| gamma2(&slice(&s, t2)?, c.gamma2_tol()).map(|g| g.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let phi = embed_schur(&s);
    let measured = norm_bilinear(&s, Target::S1, c.restarts, c.seed)?;
    let rep = verify_factorization_seeded(&phi, &family, &t, &measured, c.seed)?;

    let mut r = Report::new();
    r.put("a", io::to_value(&a))
        .put("b", io::to_value(&b))
        .put("family", io::family_to_json(&family))
        .put(
            "field_reconstruction_error",
            reconstruction_error(&s, &a, &b)?,
        )
        .put("sup_a", a.sup_norm())
        .put("sup_b", b.sup_norm())
        .put("max_slice_gamma2", gmax)
        .put("verification", io::to_value(&rep))
        .put("all_pass", rep.all_pass());
    Ok(Outcome::ok(r))
}

fn cmd_verify_modular(input: &PathBuf, algebras: &str) -> Result<Outcome> {
    let phi = as_general(&load_symbol(input)?);
    let t = parse_algebras(algebras, phi.dims())?;
    let (member, resid) = tensor_membership(&phi, &t)?;
    let rep = is_modular(&phi, &t)?;
    let agree = member == rep.modular;
    let mut r = Report::new();
    r.put("member", member)
        .put("membership_residual", resid)
        .put("modularity", io::to_value(&rep))
        .put("agree", agree);
    Ok(Outcome {
        report: r,
        verified: agree,
    })
}

fn cmd_verify_factorization(
    input: &PathBuf,
    family: &PathBuf,
    algebras: &str,
    c: &Common,
) -> Result<Outcome> {
    let sym = load_symbol(input)?;
    let f = io::parse_family(&io::read_text(family)?)?;
    let phi = as_general(&sym);
    let t = parse_algebras(algebras, phi.dims())?;
    let measured = match &sym {
        SymbolInput::Schur(s) => norm_bilinear(s, Target::S1, c.restarts, c.seed)?,
        SymbolInput::General(p) => norm_tau(p, Target::S1, c.restarts, c.seed)?,
    };
    let rep = verify_factorization_seeded(&phi, &f, &t, &measured, c.seed)?;
    let pass = rep.all_pass();
    let mut r = Report::new();
    r.put("verification", io::to_value(&rep))
        .put("all_pass", pass);
    Ok(Outcome {
        report: r,
        verified: pass,
    })
}

fn cmd_amplify(
    input: &PathBuf,
    n: usize,
    target: Target,
    witnesses: bool,
    c: &Common,
) -> Result<Outcome> {
    let sym = load_symbol(input)?;
    let e = match &sym {
        SymbolInput::Schur(s) => amplified_norm_schur(s, n, target, c.restarts, c.seed)?,
        SymbolInput::General(p) => amplified_norm(p, n, target, c.restarts, c.seed)?,
    };
    let mut r = Report::new();
    r.put("n", n)
        .put("target", target.to_string())
        .put("estimate", estimate_json(&e, witnesses));
    Ok(Outcome::ok(r))
}

fn cmd_selftest(inject_fault: bool, c: &Common) -> Result<Outcome> {
    let suites = selftest::run_all(c.seed, inject_fault)?;
    let pass = suites.iter().all(|s| s.pass);
    let mut r = Report::new();
    for s in &suites {
        r.put(s.name, io::to_value(s));
    }
    r.put("all_pass", pass);
    Ok(Outcome {
        report: r,
        verified: pass,
    })
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    let c = cmd.common();
    c.validate()?;
    match cmd {
        Command::Apply { input, x, y, .. } => cmd_apply(input, x, y),
        Command::Norm {
            input,
            target,
            witnesses,
            ..
        } => cmd_norm(input, *target, *witnesses, c),
        Command::Gamma2 { input, .. } => cmd_gamma2(input, c),
        Command::Factorize {
            input,
            algebras,
            truncate,
            ..
        } => cmd_factorize(input, algebras, *truncate, c),
        Command::VerifyModular {
            input, algebras, ..
        } => cmd_verify_modular(input, algebras),
        Command::VerifyFactorization {
            input,
            family,
            algebras,
            ..
        } => cmd_verify_factorization(input, family, algebras, c),
        Command::Amplify {
            input,
            n,
            target,
            witnesses,
            ..
        } => cmd_amplify(input, *n, *target, *witnesses, c),
        Command::Selftest { inject_fault, .. } => cmd_selftest(*inject_fault, c),
    }
}

/// Parses arguments, runs the command, writes the report and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let common = cli.command.common().clone();
    match execute(&cli.command) {
        Ok(outcome) => {
            let text = outcome.report.render(common.format);
            let written = match &common.output {
                Some(path) => {
                    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error[io]: {msg}");
                return EXIT_CONTRACT;
            }
            if outcome.verified {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
