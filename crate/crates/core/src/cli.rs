//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification exceeded its threshold, 2 error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::{json, Value};

use crate::decomposition::{
    fidelity, mps_factor_with_report, mps_reconstruct, verify_isometry, IsometryDirection, TruncationPolicy,
};
use crate::entropy::{renyi, renyi_from_invariant, von_neumann, Spectrum};
use crate::error::{Error, Result};
use crate::invariant::{enumerate_invariants, evaluate_fast, verify_invariance, PermTuple};
use crate::state::{load_state, partial_trace, random_density, random_pure_state, save_state, QuantumState, StateKind};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Threshold for `invariants verify`.
pub const VERIFY_THRESHOLD: f64 = 1e-8;
/// Allowed gap between spectrum and invariant entropies.
pub const ENTROPY_CHECK_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "luinv", version, about = "Tensor-network tools for local-unitary invariants")]
pub struct Cli {
    /// Print a JSON result instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Factor a pure state into a matrix product state.
    Factor(FactorArgs),
    /// Enumerate, evaluate or verify invariants.
    #[command(subcommand)]
    Invariants(InvariantsCommand),
    /// Rényi and von Neumann entropies of a reduced state.
    Entropy(EntropyArgs),
    /// Write a seeded random state file.
    Random(RandomArgs),
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    pub state: PathBuf,
    /// Keep at most N singular values per bond.
    #[arg(long, value_name = "N", conflicts_with = "truncate_tol")]
    pub truncate_chi: Option<usize>,
    /// Drop singular values below T times the largest one.
    #[arg(long, value_name = "T")]
    pub truncate_tol: Option<f64>,
    /// Write the chain as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum InvariantsCommand {
    /// List canonical classes.
    List {
        #[arg(short = 'n', long = "subsystems")]
        n: usize,
        #[arg(short = 'k', long = "degree")]
        k: usize,
    },
    /// Evaluate invariants on a state.
    Eval(SelectArgs),
    /// Check invariance under random local unitaries.
    Verify {
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    pub state: PathBuf,
    /// Invariant label such as "3; (123) | (12)"; repeatable.
    #[arg(long = "label", required_unless_present = "k", conflicts_with = "k")]
    pub labels: Vec<String>,
    /// Use every canonical class of this degree.
    #[arg(short = 'k', long = "degree")]
    pub k: Option<usize>,
    /// Expected number of subsystems.
    #[arg(short = 'n', long = "subsystems")]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    pub state: PathBuf,
    /// Subsystems kept, 0-based, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub keep: Vec<usize>,
    /// Rényi orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub alpha: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    /// Subsystem dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generate a mixed state instead of a pure one.
    #[arg(long)]
    pub density: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Ordered name/value pairs, serialized as a JSON object.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Section(pub Vec<(String, Value)>);

impl Section {
    pub fn push(&mut self, name: impl Into<String>, value: Value) {
        self.0.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl Serialize for Section {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CommandResult {
    pub command: Vec<String>,
    pub values: Section,
    pub diagnostics: Section,
    pub exit_code: i32,
}

impl CommandResult {
    fn new(command: Vec<String>) -> Self {
        Self {
            command,
            values: Section::default(),
            diagnostics: Section::default(),
            exit_code: EXIT_OK,
        }
    }

    fn fail_if(&mut self, failed: bool) {
        if failed {
            self.exit_code = EXIT_FAILED;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result is always serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .values
            .0
            .iter()
            .chain(&self.diagnostics.0)
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(0);
        for (k, v) in &self.values.0 {
            out.push_str(&format!("{k:<width$}  {}\n", human(v)));
        }
        if !self.diagnostics.0.is_empty() {
            out.push_str("--\n");
            for (k, v) in &self.diagnostics.0 {
                out.push_str(&format!("{k:<width$}  {}\n", human(v)));
            }
        }
        out.push_str(if self.exit_code == EXIT_OK {
            "status  ok\n"
        } else {
            "status  FAILED\n"
        });
        out
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mant, e) = s.split_once('e').expect("exponent");
        let mant = trim_zeros(mant);
        return format!("{mant}e{e}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format_sig(x, 12),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(human).collect::<Vec<_>>().join(", ")),
        Value::Object(map) if map.len() == 2 && map.contains_key("re") && map.contains_key("im") => {
            let re = map["re"].as_f64().unwrap_or(f64::NAN);
            let im = map["im"].as_f64().unwrap_or(f64::NAN);
            if im == 0.0 {
                format_sig(re, 12)
            } else {
                let sign = if im < 0.0 { '-' } else { '+' };
                format!("{}{sign}{}i", format_sig(re, 12), format_sig(im.abs(), 12))
            }
        }
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", human(v)))
            .collect::<Vec<_>>()
            .join("  "),
        other => other.to_string(),
    }
}

fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Runs a parsed command; `argv` is echoed into the result.
pub fn execute(cli: &Cli, argv: Vec<String>) -> Result<CommandResult> {
    let mut result = CommandResult::new(argv);
    match &cli.command {
        Command::Factor(args) => factor(args, &mut result)?,
        Command::Invariants(InvariantsCommand::List { n, k }) => list(*n, *k, &mut result)?,
        Command::Invariants(InvariantsCommand::Eval(select)) => eval(select, &mut result)?,
        Command::Invariants(InvariantsCommand::Verify { select, trials, seed }) => {
            verify(select, *trials, *seed, &mut result)?
        }
        Command::Entropy(args) => entropy(args, &mut result)?,
        Command::Random(args) => random(args, &mut result)?,
    }
    Ok(result)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli, argv.into_iter().skip(1).collect()) {
        Ok(result) => {
            if cli.json {
                println!("{}", result.to_json());
            } else {
                print!("{}", result.to_table());
            }
            result.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn factor(args: &FactorArgs, result: &mut CommandResult) -> Result<()> {
    let state = load_state(&args.state)?;
    let QuantumState::Pure { psi, .. } = state else {
        return Err(Error::InvalidArgument("factor needs a pure state".into()));
    };
    let policy = match (args.truncate_chi, args.truncate_tol) {
        (Some(chi), _) => TruncationPolicy::max_chi(chi),
        (None, Some(tol)) => TruncationPolicy::cutoff(tol),
        (None, None) => TruncationPolicy::none(),
    };
    let (chain, report) = mps_factor_with_report(&psi, &policy)?;
    let rebuilt = mps_reconstruct(&chain)?;
    let fid = fidelity(&psi, &rebuilt)?;
    result.values.push("bond_dims", json!(chain.bond_dims()));
    result.values.push("bond_sigmas", json!(chain.bond_sigmas()));
    result.values.push("fidelity", json!(fid));
    let mut iso: f64 = 0.0;
    for site in &chain.sites()[..chain.len() - 1] {
        iso = iso.max(verify_isometry(site, IsometryDirection::Left)?);
    }
    result.diagnostics.push("max_isometry_error", json!(iso));
    if !policy.is_none() {
        result.diagnostics.push("per_bond_loss", json!(report.per_bond_loss));
        result.diagnostics.push("loss_bound", json!(report.loss_bound));
    }
    if let Some(out) = &args.out {
        std::fs::write(out, chain.to_json()?)?;
        result.values.push("written", json!(out.display().to_string()));
    }
    Ok(())
}

fn list(n: usize, k: usize, result: &mut CommandResult) -> Result<()> {
    let classes = enumerate_invariants(n, k)?;
    result.values.push("classes", json!(classes.len()));
    for class in classes {
        let connected = if class.components.len() == 1 {
            "connected"
        } else {
            "disconnected"
        };
        result.values.push(
            class.representative.to_string(),
            json!({
                "orbit_size": class.orbit_size,
                "components": class.components.len(),
                "topology": connected,
                "real": class.real,
            }),
        );
    }
    Ok(())
}

fn selected(select: &SelectArgs, state: &QuantumState) -> Result<Vec<PermTuple>> {
    let n = state.dims().len();
    if let Some(expected) = select.n {
        if expected != n {
            return Err(Error::InvalidArgument(format!(
                "state has {n} subsystems, -n gave {expected}"
            )));
        }
    }
    match select.k {
        Some(k) => Ok(enumerate_invariants(n, k)?
            .into_iter()
            .map(|c| c.representative)
            .collect()),
        None => select.labels.iter().map(|l| l.parse()).collect(),
    }
}

fn eval(select: &SelectArgs, result: &mut CommandResult) -> Result<()> {
    let state = load_state(&select.state)?;
    let rho = state.to_density();
    for t in selected(select, &state)? {
        let value = evaluate_fast(&t, &rho, state.dims())?;
        result.values.push(t.to_string(), complex(value));
    }
    Ok(())
}

fn verify(select: &SelectArgs, trials: usize, seed: u64, result: &mut CommandResult) -> Result<()> {
    let state = load_state(&select.state)?;
    let rho = state.to_density();
    let mut worst: f64 = 0.0;
    for t in selected(select, &state)? {
        let dev = verify_invariance(&t, &rho, state.dims(), trials, seed)?;
        worst = worst.max(dev);
        result.values.push(t.to_string(), json!(dev));
    }
    result.diagnostics.push("max_deviation", json!(worst));
    result.diagnostics.push("threshold", json!(VERIFY_THRESHOLD));
    result.fail_if(worst > VERIFY_THRESHOLD);
    Ok(())
}

fn entropy(args: &EntropyArgs, result: &mut CommandResult) -> Result<()> {
    let state = load_state(&args.state)?;
    let dims = state.dims().to_vec();
    let rho = state.to_density();
    let reduced = partial_trace(&rho, &dims, &args.keep)?;
    let spectrum = Spectrum::from_density(&reduced)?;
    let mask: Vec<bool> = (0..dims.len()).map(|i| args.keep.contains(&i)).collect();
    let mut worst: f64 = 0.0;
    for &alpha in &args.alpha {
        let s = renyi(&spectrum, alpha)?;
        result.values.push(format!("S_{}", format_sig(alpha, 12)), json!(s));
        if alpha >= 2.0 && alpha.fract() == 0.0 && alpha <= crate::invariant::MAX_DEGREE as f64 {
            let order = alpha as usize;
            let label = PermTuple::cyclic_on(order, &mask)?;
            let value = evaluate_fast(&label, &rho, &dims)?;
            let dev = (renyi_from_invariant(value.re, order)? - s).abs();
            worst = worst.max(dev);
            result.diagnostics.push(format!("deviation[{label}]"), json!(dev));
        }
    }
    result.values.push("S_vn", json!(von_neumann(&spectrum)));
    if worst > 0.0 || args.alpha.iter().any(|a| *a >= 2.0) {
        result.diagnostics.push("max_deviation", json!(worst));
    }
    result.fail_if(worst > ENTROPY_CHECK_TOL);
    Ok(())
}

fn random(args: &RandomArgs, result: &mut CommandResult) -> Result<()> {
    let state = if args.density {
        QuantumState::density(args.dims.clone(), random_density(&args.dims, args.seed)?)?
    } else {
        QuantumState::pure(random_pure_state(&args.dims, args.seed)?)?
    };
    save_state(&state, &args.out)?;
    let kind = match state.kind() {
        StateKind::Pure => "pure",
        StateKind::Density => "density",
    };
    result.values.push("kind", json!(kind));
    result.values.push("dims", json!(args.dims));
    result.values.push("written", json!(args.out.display().to_string()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(std::f64::consts::LN_2, 12), "0.69314718056");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(1234.5, 12), "1234.5");
        assert_eq!(format_sig(2.5e-13, 12), "2.5e-13");
        assert_eq!(format_sig(-1e15, 12), "-1e15");
        assert_eq!(format_sig(0.0, 12), "0");
    }

    #[test]
    fn section_keeps_order() {
        let mut s = Section::default();
        s.push("b", json!(1));
        s.push("a", json!(2));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"b":1,"a":2}"#);
        assert_eq!(s.get("a"), Some(&json!(2)));
    }

    #[test]
    fn human_complex() {
        assert_eq!(human(&complex(C64::new(0.5, 0.0))), "0.5");
        assert_eq!(human(&complex(C64::new(0.5, -0.25))), "0.5-0.25i");
    }

    #[test]
    fn parses_commands() {
        let cli = Cli::try_parse_from(["luinv", "invariants", "list", "-n", "1", "-k", "2"]).unwrap();
        let r = execute(&cli, vec![]).unwrap();
        assert_eq!(r.values.get("classes"), Some(&json!(2)));
        assert!(r.values.get("2; (12)").is_some());
        assert!(Cli::try_parse_from(["luinv", "factor", "x", "--truncate-chi", "2", "--truncate-tol", "0.1"]).is_err());
        assert!(Cli::try_parse_from(["luinv", "invariants", "eval", "x"]).is_err());
    }
}
