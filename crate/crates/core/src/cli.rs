//! Command-line front end. Every command prints sorted-key JSON; errors are
//! reported as `{"error": name, "detail": message}` on stderr.
//!
//! Exit codes: 0 success, 1 a failed check or a mathematical error, 2
//! malformed input or usage.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::cayley::{cayley, gen_remark, inverse_cayley, operator_distance, LambdaParam};
use crate::embed::right_eigen_spheres_detailed;
use crate::error::{QError, Result};
use crate::hspace::HilbertBasis;
use crate::io;
use crate::qop::{classify, Operator};
use crate::quat::Quaternion;
use crate::spectral::defect_number;
use crate::verify::{run_verify, VerifyConfig, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "qcayley", version, about = "Quaternionic Cayley transforms, S-spectra and defect numbers")]
pub struct Cli {
    /// Predicate tolerance.
    #[arg(long, global = true, env = "QCAYLEY_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    /// Cayley parameter as `w,x,y,z` [default: 0,1,1,1].
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Accept any non-real lambda instead of requiring positive imaginary parts.
    #[arg(long)]
    pub relax_lambda: bool,
}

impl LambdaArgs {
    fn resolve(&self) -> Result<LambdaParam> {
        self.resolve_or(None)
    }

    /// An explicit `--lambda` wins; otherwise `stored` (already validated when
    /// it was written) and finally the default.
    fn resolve_or(&self, stored: Option<Quaternion>) -> Result<LambdaParam> {
        let q = match (&self.lambda, stored) {
            (Some(text), _) => parse_quaternion(text)?,
            (None, Some(q)) => return LambdaParam::new_relaxed(q),
            (None, None) => Quaternion::new(0.0, 1.0, 1.0, 1.0),
        };
        if self.relax_lambda {
            LambdaParam::new_relaxed(q)
        } else {
            LambdaParam::new(q)
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a block-diagonal symmetric orthogonal matrix.
    Gen {
        /// Rotation-reflection block angles.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        thetas: Vec<f64>,
        /// Scalar blocks, each 1 or -1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        signs: Vec<i8>,
        /// Block order: entry k is the block placed at position k.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cayley transform of a class-Y operator.
    Cayley {
        input: PathBuf,
        #[command(flatten)]
        lambda: LambdaArgs,
        /// Basis file inducing the left multiplication (default: standard).
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inverse Cayley transform of an isometry or of a Cayley pair document.
    InvCayley {
        input: PathBuf,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S-spectrum of a dense operator.
    Sspectrum {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Defect number and regularity certificate at a point.
    Defect {
        input: PathBuf,
        /// The point as `w,x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every proposition suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Largest dimension sampled by the generic suites.
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        /// Operator file (single operator, array of operators or Cayley pair)
        /// added to the sampled corpus.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether two bases induce the same left multiplication, and
    /// optionally compare the Cayley transforms they produce.
    BasisCheck {
        /// Basis file or `standard`.
        first: String,
        /// Basis file or `standard`.
        second: String,
        /// Operator whose transforms are compared.
        #[arg(long)]
        operator: Option<PathBuf>,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `w,x,y,z`.
pub fn parse_quaternion(s: &str) -> Result<Quaternion> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(QError::InvalidArgument(format!("quaternion literal {s:?} needs four components w,x,y,z")));
    }
    let mut c = [0.0; 4];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| QError::InvalidArgument(format!("bad component {p:?} in {s:?}")))?;
    }
    Ok(Quaternion::new(c[0], c[1], c[2], c[3]))
}

fn exit_code(e: &QError) -> i32 {
    match e {
        QError::Malformed(_)
        | QError::Io(_)
        | QError::InvalidOperator(_)
        | QError::InvalidBasis(_)
        | QError::InvalidArgument(_)
        | QError::InvalidLambda(_)
        | QError::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

fn report_error(e: &QError) -> i32 {
    eprintln!("{}", json!({ "error": e.name(), "detail": e.to_string() }));
    exit_code(e)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = io::to_sorted_json(value)?;
    match out {
        Some(p) => io::write_text(p, &(text + "\n")),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(QError::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| QError::Malformed(e.to_string()))
}

fn load_basis_or_standard(path: Option<&Path>, n: usize) -> Result<HilbertBasis> {
    match path {
        Some(p) => io::load_basis(p),
        None => Ok(HilbertBasis::standard(n)),
    }
}

fn load_corpus(path: &Path) -> Result<Vec<Operator>> {
    let text = io::read_text(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| QError::Malformed(e.to_string()))?;
    match value {
        Value::Array(items) => items.iter().map(|v| io::parse_operator(&v.to_string())).collect(),
        _ => Ok(vec![io::parse_operator_or_pair(&text)?]),
    }
}

/// Parses arguments and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let tol = cli.tol;
    if tol.is_nan() || tol <= 0.0 {
        return Err(QError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    match &cli.command {
        Command::Gen { thetas, signs, perm, out } => {
            if thetas.is_empty() && signs.is_empty() {
                return Err(QError::InvalidArgument("gen needs --thetas or --signs".into()));
            }
            let m = gen_remark(thetas, signs, perm.as_deref())?;
            let n = m.rows();
            let op = Operator::Dense(m);
            let flags = classify(&op, &HilbertBasis::standard(n), tol)?;
            match out {
                Some(p) => {
                    io::write_text(p, &(io::to_sorted_json(&op)? + "\n"))?;
                    emit(&json!({ "n": n, "flags": flags, "out": p.display().to_string() }), None)?;
                }
                None => emit(&json!({ "n": n, "flags": flags, "operator": op }), None)?,
            }
            Ok(0)
        }
        Command::Cayley { input, lambda, basis, out } => {
            let op = io::load_operator(input)?;
            let lam = lambda.resolve()?;
            let b = load_basis_or_standard(basis.as_deref(), op.dim())?;
            let pair = cayley(&op, &lam, &b)?;
            let doc = io::CayleyPairDoc::new(&pair)?;
            emit(&to_value(&doc)?, out.as_deref())?;
            Ok(0)
        }
        Command::InvCayley { input, lambda, basis, out } => {
            let text = io::read_text(input)?;
            let u = io::parse_operator_or_pair(&text)?;
            let doc: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
            let source = doc.get("source").map(|s| io::parse_operator(&s.to_string())).transpose()?;
            let stored_lambda = doc
                .get("lambda")
                .map(|v| serde_json::from_value::<[f64; 4]>(v.clone()).map(Quaternion::from_array))
                .transpose()
                .map_err(|e| QError::Malformed(format!("pair lambda: {e}")))?;
            let lam = lambda.resolve_or(stored_lambda)?;
            let b = match (basis, doc.get("basis")) {
                (None, Some(v)) if v.is_object() || v.is_array() => io::parse_basis(&v.to_string())?,
                _ => load_basis_or_standard(basis.as_deref(), u.dim())?,
            };
            let inv = inverse_cayley(&u, &lam, &b)?;
            let flags = classify(&inv.operator, &b, tol)?;
            // Distance back to U through the forward transform, when A_U is in class Y.
            let forward = if flags.in_y {
                let back = cayley(&inv.operator, &lam, &b)?;
                Some(operator_distance(&back.transform, &u)?)
            } else {
                None
            };
            let round_trip = match &source {
                Some(a) => Some(operator_distance(&inv.operator, a)?),
                None => None,
            };
            let doc = json!({
                "operator": inv.operator,
                "symmetric_guaranteed": inv.symmetric_guaranteed,
                "flags": flags,
                "lambda": lam,
                "basis": io::basis_id(&b),
                "residuals": {
                    "forward_round_trip": forward,
                    "round_trip": round_trip,
                },
            });
            emit(&doc, out.as_deref())?;
            Ok(0)
        }
        Command::Sspectrum { input, out } => {
            let op = io::load_operator(input)?;
            let a = op
                .as_dense()
                .ok_or_else(|| QError::InvalidOperator("the S-spectrum needs a dense operator".into()))?;
            let detail = right_eigen_spheres_detailed(a, tol);
            let doc = json!({
                "spheres": detail.spheres,
                "tol": tol,
                "max_pair_mismatch": detail.max_pair_mismatch,
                "all_pairs_within_tol": detail.all_pairs_within_tol,
            });
            emit(&doc, out.as_deref())?;
            Ok(0)
        }
        Command::Defect { input, q, basis, out } => {
            let op = io::load_operator(input)?;
            let q = parse_quaternion(q)?;
            let b = load_basis_or_standard(basis.as_deref(), op.dim())?;
            let r = defect_number(&op, q, &b)?;
            emit(&to_value(&r)?, out.as_deref())?;
            Ok(0)
        }
        Command::Verify { seed, trials, max_dim, input, lambda, out } => {
            if *max_dim == 0 {
                return Err(QError::InvalidArgument("max-dim must be at least 1".into()));
            }
            let corpus = match input {
                Some(p) => load_corpus(p)?,
                None => Vec::new(),
            };
            let cfg = VerifyConfig { seed: *seed, trials: *trials, tol, lambda: lambda.resolve()?, max_dim: *max_dim, corpus };
            let report = run_verify(&cfg)?;
            emit(&to_value(&report)?, out.as_deref())?;
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Command::BasisCheck { first, second, operator, lambda, out } => {
            let op = operator.as_deref().map(io::load_operator).transpose()?;
            let files: Vec<Option<HilbertBasis>> = [first, second]
                .iter()
                .map(|s| if s.as_str() == "standard" { Ok(None) } else { io::load_basis(Path::new(s)).map(Some) })
                .collect::<Result<_>>()?;
            let n = files
                .iter()
                .flatten()
                .map(HilbertBasis::dim)
                .next()
                .or(op.as_ref().map(Operator::dim))
                .ok_or_else(|| QError::InvalidArgument("cannot size two standard bases without --operator".into()))?;
            let mut bases = files.into_iter().map(|b| b.unwrap_or_else(|| HilbertBasis::standard(n)));
            let (b1, b2) = (bases.next().unwrap(), bases.next().unwrap());
            let cross_imag = crate::cayley::basis_cross_imag(&b1, &b2)?;
            let mut doc = json!({ "compatible": cross_imag <= tol, "cross_imag": cross_imag, "tol": tol });
            if let Some(op) = op {
                let r = crate::cayley::cayley_invariance(&op, &lambda.resolve()?, &b1, &b2, tol)?;
                doc["deviation"] = json!(r.deviation);
                doc["lambda"] = json!(lambda.resolve()?);
            }
            emit(&doc, out.as_deref())?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_literals() {
        assert_eq!(parse_quaternion("0,1,1,1").unwrap(), Quaternion::new(0.0, 1.0, 1.0, 1.0));
        assert_eq!(parse_quaternion(" -1.5, 0, 2e-3 ,4").unwrap(), Quaternion::new(-1.5, 0.0, 2e-3, 4.0));
        assert!(parse_quaternion("1,2,3").is_err());
        assert!(parse_quaternion("1,2,x,4").is_err());
        assert!(parse_quaternion("1,2,nan,4").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["qcayley", "gen"]), 2);
        assert_eq!(run(["qcayley", "frobnicate"]), 2);
        assert_eq!(run(["qcayley", "--tol=-1", "gen", "--signs", "1"]), 2);
    }
}
