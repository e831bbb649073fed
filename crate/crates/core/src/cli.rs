//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 resource limit exceeded.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::exact::{brute_force_diagonal, extremal_eigs_with_limit, MAX_DIAGONAL_QUBITS};
use crate::greedy::{max_energy_bound, min_energy_bound, Direction, EnergyBound};
use crate::instances::{
    complete_zz, heisenberg_afm, random_klocal, random_signed_regular_zz, CoefDist, LatticeSpec,
};
use crate::pauli::Hamiltonian;
use crate::qc_map::hamiltonian_to_poly;
use crate::sampler::{default_samples, sample_norm_bound};
use crate::verify::{verify, Status, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hambound", version, about = "Product-state bounds on extremal eigenvalues of k-local qubit Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a named Hamiltonian family
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, value_enum, default_value_t = GenFormat::Text, global = true)]
        format: GenFormat,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Polynomial statistics of the Hamiltonian
    Map(Common),
    /// Greedy product-state energy bound
    Greedy {
        #[command(flatten)]
        common: Common,
        /// Upper bound on the ground energy (default)
        #[arg(long, conflicts_with = "max")]
        min: bool,
        /// Lower bound on the top eigenvalue
        #[arg(long)]
        max: bool,
        /// Print one line per elimination round to stderr
        #[arg(long)]
        trace: bool,
    },
    /// Random product states as an operator-norm witness
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
        /// Defaults to 3^k * 1000
        #[arg(long)]
        n_samples: Option<u64>,
    },
    /// Extremal eigenvalues by Lanczos
    Exact {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = crate::exact::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = crate::exact::MAX_STATE_QUBITS)]
        max_n: usize,
    },
    /// Run every consistency check the instance size allows
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n_samples: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Hamiltonian file (text or JSON); `-` or absent reads stdin
    input: Option<PathBuf>,
    /// Inline generator instead of a file, e.g. `complete-zz:4`,
    /// `heisenberg:grid:4x4:periodic`, `signed-regular:20:4:7`, `random:6:20:3:1`
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Antiferromagnetic Heisenberg model on a lattice
    Heisenberg {
        #[arg(long, group = "lattice")]
        cycle: Option<usize>,
        /// ROWSxCOLS
        #[arg(long, group = "lattice")]
        grid: Option<String>,
        /// ROWSxCOLS
        #[arg(long, group = "lattice")]
        triangular: Option<String>,
        #[arg(long)]
        periodic: bool,
    },
    /// Random +-1 ZZ couplings on a random regular graph
    SignedRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Sum of Z_i Z_j over all pairs
    CompleteZz {
        #[arg(long)]
        n: usize,
    },
    /// Distinct random Pauli strings of weight 1..=k
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Coef::Sign)]
        coef: Coef,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Coef {
    Sign,
    Uniform,
}

impl From<Coef> for CoefDist {
    fn from(c: Coef) -> Self {
        match c {
            Coef::Sign => CoefDist::Sign,
            Coef::Uniform => CoefDist::Uniform,
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::RepeatedQubit { .. }
            | Error::QubitOutOfRange { .. }
            | Error::InvalidInstance(_)
            | Error::InvalidSpin(_) => EXIT_USAGE,
            Error::TooLarge { .. } | Error::NoConvergence { .. } | Error::RetriesExhausted(_) => {
                EXIT_RESOURCE
            }
            _ => EXIT_VERIFY,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

/// `%g`-style rendering with six significant digits.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), Failure> {
    let (a, b) = s.split_once('x').ok_or_else(|| usage(format!("expected ROWSxCOLS, got `{s}`")))?;
    let p = |v: &str| v.parse::<usize>().map_err(|_| usage(format!("bad dimension `{v}`")));
    Ok((p(a)?, p(b)?))
}

fn parse_instance(spec: &str) -> Result<Hamiltonian, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<u64, Failure> {
        parts
            .get(i)
            .ok_or_else(|| usage(format!("instance `{spec}` is missing field {i}")))?
            .parse::<u64>()
            .map_err(|_| usage(format!("instance `{spec}`: field {i} is not a number")))
    };
    let h = match parts[0] {
        "complete-zz" => complete_zz(num(1)? as usize)?,
        "signed-regular" => random_signed_regular_zz(num(1)? as usize, num(2)? as usize, num(3)?)?,
        "random" => {
            let dist = match parts.get(5).copied() {
                None | Some("sign") => CoefDist::Sign,
                Some("uniform") => CoefDist::Uniform,
                Some(other) => return Err(usage(format!("unknown coefficient law `{other}`"))),
            };
            random_klocal(num(1)? as usize, num(2)? as usize, num(3)? as usize, num(4)?, dist)?
        }
        "heisenberg" => {
            let periodic = parts.get(3) == Some(&"periodic");
            let lattice = match parts.get(1).copied() {
                Some("cycle") => LatticeSpec::cycle(num(2)? as usize),
                Some("grid") | Some("triangular") => {
                    let (r, c) = parse_dims(parts.get(2).copied().unwrap_or(""))?;
                    if parts[1] == "grid" {
                        LatticeSpec::grid(r, c, periodic)
                    } else {
                        LatticeSpec::triangular(r, c, periodic)
                    }
                }
                _ => return Err(usage(format!("unknown lattice in `{spec}`"))),
            };
            heisenberg_afm(&lattice)?
        }
        other => return Err(usage(format!("unknown instance family `{other}`"))),
    };
    Ok(h)
}

fn load(common: &Common, stdin: &mut dyn Read) -> Result<Hamiltonian, Failure> {
    let from_stdin = matches!(&common.input, None) || common.input.as_deref() == Some("-".as_ref());
    if let Some(spec) = &common.instance {
        if common.input.is_some() {
            return Err(usage("give either an input file or --instance, not both"));
        }
        return parse_instance(spec);
    }
    let mut text = String::new();
    if from_stdin {
        stdin.read_to_string(&mut text).map_err(|e| usage(format!("reading stdin: {e}")))?;
    } else {
        let path = common.input.as_ref().expect("checked above");
        text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
    }
    let h = if text.trim_start().starts_with('{') {
        Hamiltonian::from_json(&text)?
    } else {
        text.parse()?
    };
    Ok(h)
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure { code: EXIT_RESOURCE, msg: format!("writing {}: {e}", path.display()) }),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure { code: EXIT_RESOURCE, msg: format!("writing stdout: {e}") }),
    }
}

fn render(common: &Common, value: &Value, text: impl FnOnce() -> String) -> String {
    match common.format {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
            s.push('\n');
            s
        }
        OutFormat::Text => text(),
    }
}

fn cmd_gen(family: &Family) -> Result<Hamiltonian, Failure> {
    let h = match family {
        Family::Heisenberg { cycle, grid, triangular, periodic } => {
            let spec = match (cycle, grid, triangular) {
                (Some(n), None, None) => LatticeSpec::cycle(*n),
                (None, Some(g), None) => {
                    let (r, c) = parse_dims(g)?;
                    LatticeSpec::grid(r, c, *periodic)
                }
                (None, None, Some(t)) => {
                    let (r, c) = parse_dims(t)?;
                    LatticeSpec::triangular(r, c, *periodic)
                }
                _ => return Err(usage("choose exactly one of --cycle, --grid, --triangular")),
            };
            heisenberg_afm(&spec)?
        }
        Family::SignedRegular { n, r, seed } => random_signed_regular_zz(*n, *r, *seed)?,
        Family::CompleteZz { n } => complete_zz(*n)?,
        Family::Random { n, m, k, seed, coef } => random_klocal(*n, *m, *k, *seed, (*coef).into())?,
    };
    Ok(h)
}

fn map_value(h: &Hamiltonian) -> (Value, Option<String>) {
    let s = h.stats();
    let f = hamiltonian_to_poly(&h.traceless_part());
    let influences = f.influences();
    let i_max = influences.iter().copied().fold(0.0, f64::max);
    let warning = (s.m == 0).then(|| "Hamiltonian has no non-identity terms".to_string());
    let v = json!({
        "n": s.n,
        "m": s.m,
        "k": s.k,
        "l_q": s.l_q,
        "l_c": f.var_degree(),
        "d": f.degree(),
        "l1": s.l1,
        "l2sq": s.l2sq,
        "offset": h.offset(),
        "variance": f.variance(),
        "W": f.total_weight(),
        "influences": influences,
        "i_max": i_max,
        "warning": warning,
    });
    (v, warning)
}

fn bound_text(b: &EnergyBound) -> String {
    let mut s = format!(
        "direction        {:?}\nenergy           {}\ncertified floor  {}\n",
        b.direction,
        fmt6(b.energy),
        fmt6(b.certified_floor)
    );
    if let Some(p) = b.two_local_floor {
        s.push_str(&format!("k<=2 floor       {}\n", fmt6(p)));
    }
    s.push_str(&format!(
        "k {}  l_q {}  l_c {}  |H|_1 {}  rounds {}\nwitness          {:?}\n",
        b.k,
        b.l_q,
        b.l_c,
        fmt6(b.l1),
        b.certificate.rounds.len(),
        b.certificate.witness.values()
    ));
    s
}

fn execute(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Gen { family, format, out } => {
            let h = cmd_gen(&family)?;
            let body = match format {
                GenFormat::Text => h.to_text(),
                GenFormat::Json => h.to_json() + "\n",
            };
            emit(&out, stdout, &body)?;
            Ok(EXIT_OK)
        }
        Command::Map(common) => {
            let h = load(&common, stdin)?;
            let (v, warning) = map_value(&h);
            if let Some(w) = warning {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let body = render(&common, &v, || {
                let keys = ["n", "m", "k", "l_q", "l_c", "d", "l1", "l2sq", "offset", "variance", "W", "i_max"];
                keys.iter()
                    .map(|k| match &v[*k] {
                        Value::Number(x) if x.is_f64() => format!("{k:<9}{}\n", fmt6(x.as_f64().unwrap())),
                        other => format!("{k:<9}{other}\n"),
                    })
                    .collect()
            });
            emit(&common.out, stdout, &body)?;
            Ok(EXIT_OK)
        }
        Command::Greedy { common, min: _, max, trace } => {
            let h = load(&common, stdin)?;
            let b = if max { max_energy_bound(&h)? } else { min_energy_bound(&h)? };
            if trace {
                for r in &b.certificate.rounds {
                    let _ = writeln!(
                        stderr,
                        "round {:>4}  S={:?}  M={}  y={:?}  const {} -> {}  W {} -> {}",
                        r.round,
                        r.monomial,
                        fmt6(r.gain_target),
                        r.values,
                        fmt6(r.constant_before),
                        fmt6(r.constant_after),
                        fmt6(r.weight_before),
                        fmt6(r.weight_after)
                    );
                }
            }
            let target = hamiltonian_to_poly(&h.traceless_part());
            let target = if b.direction == Direction::Min { target.negated() } else { target };
            let audit = b.certificate.audit(&target);
            let body = render(&common, &b.to_json_value(), || bound_text(&b));
            emit(&common.out, stdout, &body)?;
            match audit {
                Ok(()) if b.within_floors() => Ok(EXIT_OK),
                Ok(()) => Err(Failure { code: EXIT_VERIFY, msg: "energy misses its floor".into() }),
                Err(e) => Err(Failure { code: EXIT_VERIFY, msg: format!("certificate audit failed: {e}") }),
            }
        }
        Command::Sample { common, seed, n_samples } => {
            let h = load(&common, stdin)?;
            let n = n_samples.unwrap_or_else(|| default_samples(h.stats().k));
            if n == 0 {
                return Err(usage("--n-samples must be at least 1"));
            }
            let r = sample_norm_bound(&h, n, seed);
            let body = render(&common, &r.to_json_value()?, || {
                format!(
                    "samples          {}\nseed             {}\nbest |f_H|       {}\nsqrt(Var f_H)    {}\nfraction above   {}\nI_max            {}\nwitness          {:?}\n",
                    r.n_samples,
                    r.seed,
                    fmt6(r.best_abs),
                    fmt6(r.threshold),
                    fmt6(r.fraction_above),
                    fmt6(r.i_max),
                    r.best_assignment.values()
                )
            });
            emit(&common.out, stdout, &body)?;
            Ok(EXIT_OK)
        }
        Command::Exact { common, tol, max_n } => {
            let h = load(&common, stdin)?;
            if !(tol > 0.0) {
                return Err(usage("--tol must be positive"));
            }
            let spec = extremal_eigs_with_limit(&h, tol, max_n)?;
            let mut v = serde_json::to_value(spec).expect("plain data serializes");
            v["norm"] = json!(spec.norm());
            if h.is_diagonal() && h.n() <= MAX_DIAGONAL_QUBITS {
                v["diagonal"] = serde_json::to_value(brute_force_diagonal(&h)?).expect("plain data");
            }
            let body = render(&common, &v, || {
                format!(
                    "lambda_min  {}\nlambda_max  {}\nnorm        {}\nmatvecs     {}\n",
                    fmt6(spec.lambda_min),
                    fmt6(spec.lambda_max),
                    fmt6(spec.norm()),
                    spec.iterations
                )
            });
            emit(&common.out, stdout, &body)?;
            Ok(EXIT_OK)
        }
        Command::Verify { common, seed, n_samples } => {
            let h = load(&common, stdin)?;
            let mut opts = VerifyOptions::new(seed);
            opts.samples = n_samples;
            let report = verify(&h, &opts);
            let v = serde_json::to_value(&report).expect("plain data serializes");
            let body = render(&common, &v, || {
                let mut s: String = report
                    .checks
                    .iter()
                    .map(|c| {
                        let tag = match c.status {
                            Status::Pass => "PASS",
                            Status::Fail => "FAIL",
                            Status::Skip => "SKIP",
                        };
                        format!("{tag}  {:<20} {}\n", c.name, c.detail)
                    })
                    .collect();
                for n in &report.notes {
                    s.push_str(&format!("note: {n}\n"));
                }
                s
            });
            emit(&common.out, stdout, &body)?;
            match report.first_failure() {
                None => Ok(EXIT_OK),
                Some(c) => Err(Failure { code: EXIT_VERIFY, msg: format!("check `{}` failed: {}", c.name, c.detail) }),
            }
        }
    }
}

/// Runs the CLI on explicit streams and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.msg);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(1.0 / 3.0), "0.333333");
        assert_eq!(fmt6(-2.0), "-2");
        assert_eq!(fmt6(123456.7), "123457");
        assert_eq!(fmt6(1234567.0), "1.23457e6");
        assert_eq!(fmt6(999999.7), "1e6");
        assert_eq!(fmt6(12345.67), "12345.7");
        assert_eq!(fmt6(0.0001234), "0.0001234");
        assert_eq!(fmt6(1e-7), "1e-7");
        assert_eq!(fmt6(0.0), "0");
    }

    #[test]
    fn inline_instances() {
        assert_eq!(parse_instance("complete-zz:4").ok().unwrap().num_terms(), 6);
        assert_eq!(parse_instance("heisenberg:grid:4x4:periodic").ok().unwrap().num_terms(), 96);
        assert_eq!(parse_instance("heisenberg:cycle:4").ok().unwrap().num_terms(), 12);
        assert_eq!(parse_instance("signed-regular:20:4:7").ok().unwrap().num_terms(), 40);
        assert_eq!(parse_instance("random:6:20:3:1:uniform").ok().unwrap().num_terms(), 20);
        for bad in ["nope:1", "complete-zz", "heisenberg:hex:3", "random:2:99:2:0"] {
            assert_eq!(parse_instance(bad).err().unwrap().code, EXIT_USAGE, "{bad}");
        }
    }
}
