//! Command-line front end for `zslab`.
//!
//! [`run`] parses arguments and returns the exit code together with the text
//! for stdout and stderr, so the whole surface is testable in-process.
//! Exit codes: 0 for a definite answer, 2 when a budget ran out and the
//! answer is partial, 1 for usage and domain errors.

mod tables;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use zslab::bounds::{best_bounds, BoundOptions, BoundResult};
use zslab::polymethod::{
    dim_exact, hoeffding_dim_bound, petrov_cardinality_bound, petrov_max_search, petrov_verify,
    BoundForm, MonomialSpaceParams, PetrovInstance,
};
use zslab::real::{compare_log_upper, Real};
use zslab::search::certify_witness;
use zslab::{
    check_property_d, exact_g, exact_s, parse_group, AbelianGroup, ExactResult, GroupElement,
    PropertyDStatus, SearchBudget, SearchStatus,
};

pub use tables::TableName;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "zslab",
    version,
    about = "Zero-sum constants of small abelian groups and the bounds around them",
    after_help = "Group specs: <int>(^<int>)?(x<int>(^<int>)?)*, e.g. 3^2, 2x4x4, 9"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Search node budget.
    #[arg(long, global = true, env = "ZSLAB_BUDGET_NODES", default_value_t = 10_000_000)]
    pub budget_nodes: u64,
    /// Search time budget in seconds.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub budget_seconds: f64,
    /// Worker threads for searches.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "tsv")]
    pub json: bool,
    /// Emit tab-separated values.
    #[arg(long, global = true)]
    pub tsv: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Human,
    Json,
    Tsv,
}

impl GlobalOpts {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.budget_nodes,
            max_seconds: self.budget_seconds,
            parallel_width: self.threads.max(1),
        }
    }

    pub fn output(&self) -> Output {
        if self.json {
            Output::Json
        } else if self.tsv {
            Output::Tsv
        } else {
            Output::Human
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact s(A) by exhaustive search.
    S(GroupArg),
    /// Exact g(A), the square-free analogue.
    G(GroupArg),
    /// Decide Property D for (Z_k)^n.
    Propd(GroupArg),
    /// Dimension of the monomial space L(n, D, k).
    Dim(DimArgs),
    /// Sets avoiding a linear equation on non-constant tuples.
    Petrov(PetrovArgs),
    /// Every applicable bound on s(A), with derivations.
    Bound(BoundArgs),
    /// Reproducible tables.
    Table(TableArgs),
}

#[derive(Args, Debug)]
pub struct GroupArg {
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Debug)]
pub struct DimArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'D')]
    pub d: u64,
    /// Total-degree cap.
    #[arg(short = 'k', required_unless_present = "m", conflicts_with = "m")]
    pub k: Option<u64>,
    /// Use the cap ⌊n(D-1)/m⌋ and compare against the closed-form bound.
    #[arg(short = 'm')]
    pub m: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PetrovArgs {
    #[arg(long = "p")]
    pub p: u64,
    #[arg(long = "n")]
    pub n: usize,
    /// Comma-separated coefficients, e.g. 1,1,1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub coeffs: Vec<i64>,
    /// JSON file holding an array of coordinate vectors.
    #[arg(long, conflicts_with = "search")]
    pub verify: Option<PathBuf>,
    /// Search for a largest admissible set.
    #[arg(long)]
    pub search: bool,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub group: String,
    /// Let bounds that assume Property D set the headline upper bound.
    #[arg(long)]
    pub assume_propd: bool,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub name: TableName,
    /// Largest n for dim-vs-bound.
    #[arg(long, default_value_t = 2000)]
    pub max_n: usize,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, complete: bool) -> Self {
        Outcome {
            code: if complete { EXIT_OK } else { EXIT_INCOMPLETE },
            stdout,
            stderr: String::new(),
        }
    }

    fn error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text, true),
                _ => Outcome {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => Outcome::error(e),
    }
}

type CmdResult = Result<Outcome, String>;

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::S(a) => cmd_exact(g, &a.group, "s"),
        Command::G(a) => cmd_exact(g, &a.group, "g"),
        Command::Propd(a) => cmd_propd(g, &a.group),
        Command::Dim(a) => cmd_dim(g, a),
        Command::Petrov(a) => cmd_petrov(g, a),
        Command::Bound(a) => cmd_bound(g, a),
        Command::Table(a) => tables::run_table(g, a.name, a.max_n),
    }
}

fn group(spec: &str) -> Result<AbelianGroup, String> {
    parse_group(spec).map_err(|e| e.to_string())
}

pub(crate) fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

fn complete(status: SearchStatus) -> bool {
    matches!(status, SearchStatus::Exact | SearchStatus::Vacuous)
}

fn cmd_exact(g: &GlobalOpts, spec: &str, quantity: &str) -> CmdResult {
    let grp = group(spec)?;
    let budget = g.budget();
    let r = if quantity == "s" {
        exact_s(&grp, &budget)
    } else {
        exact_g(&grp, &budget)
    }
    .map_err(|e| e.to_string())?;
    let k = grp.exponent() as usize;
    let certificate = match (&r.witness, quantity, r.status) {
        (Some(w), "s", SearchStatus::Exact) => {
            Some(certify_witness(w, k, g.seed, 20).map_err(|e| e.to_string())?)
        }
        _ => None,
    };
    let text = match g.output() {
        Output::Json => {
            let mut v = r.to_json(&grp, quantity);
            v["certificate"] = serde_json::to_value(&certificate).expect("certificate serializes");
            pretty(&v)
        }
        Output::Tsv => format!(
            "group\tquantity\tvalue\tstatus\tnodes\n{}\t{}\t{}\t{}\t{}\n",
            grp,
            quantity,
            r.value.map(|v| v.to_string()).unwrap_or_default(),
            r.status.as_str(),
            r.nodes_explored
        ),
        Output::Human => human_exact(&grp, quantity, &r, certificate.as_ref()),
    };
    Ok(Outcome::ok(text, complete(r.status)))
}

fn human_exact(
    grp: &AbelianGroup,
    quantity: &str,
    r: &ExactResult,
    cert: Option<&zslab::search::Certificate>,
) -> String {
    let mut s = String::new();
    let value = r.value.map(|v| v.to_string()).unwrap_or_else(|| "?".into());
    match r.status {
        SearchStatus::LowerBoundOnly => {
            let _ = writeln!(s, "{quantity}({grp}) >= {value} [LOWER_BOUND_ONLY]");
        }
        st => {
            let _ = writeln!(s, "{quantity}({grp}) = {value} [{}]", st.as_str());
        }
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(s, "witness: {w}");
    }
    if let Some(c) = cert {
        let _ = writeln!(
            s,
            "witness certified: {} ({} extensions checked)",
            c.holds(),
            c.extensions_checked
        );
    }
    let _ = writeln!(s, "nodes: {}", r.nodes_explored);
    s
}

fn cmd_propd(g: &GlobalOpts, spec: &str) -> CmdResult {
    let grp = group(spec)?;
    let r = check_property_d(&grp, &g.budget()).map_err(|e| e.to_string())?;
    let holds = match r.holds {
        PropertyDStatus::Holds => "HOLDS",
        PropertyDStatus::Fails => "FAILS",
        PropertyDStatus::Unknown => "UNKNOWN",
    };
    let text = match g.output() {
        Output::Json => pretty(&r.to_json()),
        Output::Tsv => format!(
            "group\tholds\ts\torbits\traw\tnodes\n{}\t{}\t{}\t{}\t{}\t{}\n",
            grp,
            holds,
            r.s_value.map(|v| v.to_string()).unwrap_or_default(),
            r.extremal_orbits_checked,
            r.extremal_raw_count,
            r.nodes_explored
        ),
        Output::Human => {
            let mut s = format!("Property D for {grp}: {holds}\n");
            if let Some(v) = r.s_value {
                let _ = writeln!(s, "s = {v}");
            }
            let _ = writeln!(
                s,
                "extremal orbits checked: {} ({} sequences)",
                r.extremal_orbits_checked, r.extremal_raw_count
            );
            if let Some(c) = &r.counterexample {
                let _ = writeln!(s, "counterexample: {c}");
            }
            s
        }
    };
    Ok(Outcome::ok(text, r.holds != PropertyDStatus::Unknown))
}

fn cmd_dim(g: &GlobalOpts, a: &DimArgs) -> CmdResult {
    let k = match (a.k, a.m) {
        (Some(k), _) => k,
        (None, Some(m)) if m >= 1 && a.d >= 1 => a.n as u64 * (a.d - 1) / m,
        _ => return Err("need -k, or -m >= 1".into()),
    };
    let params = MonomialSpaceParams::new(a.n, a.d, k).map_err(|e| e.to_string())?;
    let dim = dim_exact(params);
    let check = match a.m {
        Some(m) => {
            let bound = hoeffding_dim_bound(a.n, a.d, m).map_err(|e| e.to_string())?;
            let verdict = compare_log_upper(&Real::from_biguint(&dim).ln(), &bound.ln());
            Some((m, bound, verdict))
        }
        None => None,
    };
    let text = match g.output() {
        Output::Json => {
            let mut v = json!({"n": a.n, "D": a.d, "k": k, "dim": big_json(&dim)});
            if let Some((m, bound, verdict)) = &check {
                v["m"] = json!(m);
                v["bound"] = real_json(bound);
                v["verdict"] = json!(verdict);
            }
            pretty(&v)
        }
        Output::Tsv => {
            let mut s = String::from("n\tD\tk\tdim");
            if check.is_some() {
                s.push_str("\tm\tbound\tverdict");
            }
            let _ = write!(s, "\n{}\t{}\t{}\t{}", a.n, a.d, k, dim);
            if let Some((m, bound, verdict)) = &check {
                let _ = write!(s, "\t{m}\t{}\t{}", bound.to_sig_string(30), verdict_str(*verdict));
            }
            s.push('\n');
            s
        }
        Output::Human => match &check {
            None => format!("{dim}\n"),
            Some((_, bound, verdict)) => format!(
                "{dim}\nbound: {}\nverdict: {}\n",
                bound.to_sig_string(30),
                verdict_str(*verdict)
            ),
        },
    };
    Ok(Outcome::ok(text, true))
}

pub(crate) fn verdict_str(v: zslab::Verdict) -> &'static str {
    match v {
        zslab::Verdict::Ok => "OK",
        zslab::Verdict::NearTie => "NEAR_TIE",
        zslab::Verdict::Violated => "VIOLATED",
    }
}

pub(crate) fn big_json(v: &num_bigint::BigUint) -> Value {
    Value::Number(v.to_string().parse().expect("integer literal"))
}

pub(crate) fn real_json(v: &Real) -> Value {
    Value::Number(v.to_sig_string(40).parse().expect("decimal literal"))
}

fn read_set(path: &PathBuf, grp: &AbelianGroup) -> Result<Vec<GroupElement>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let coords: Vec<Vec<i64>> =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    coords
        .iter()
        .map(|c| grp.element(c).map_err(|e| e.to_string()))
        .collect()
}

fn coords_json(elems: &[GroupElement]) -> Value {
    json!(elems.iter().map(|e| e.coords().to_vec()).collect::<Vec<_>>())
}

fn cmd_petrov(g: &GlobalOpts, a: &PetrovArgs) -> CmdResult {
    let inst = PetrovInstance::new(a.p, a.n, &a.coeffs).map_err(|e| e.to_string())?;
    let mut v = json!({"p": a.p, "n": a.n, "coeffs": inst.coeffs()});
    let mut human = format!(
        "p = {}, n = {}, coefficients {:?}\n",
        a.p,
        a.n,
        inst.coeffs()
    );
    let mut done = true;
    if let Some(path) = &a.verify {
        let set = read_set(path, inst.group())?;
        let r = petrov_verify(&inst, &set).map_err(|e| e.to_string())?;
        v["verify"] = json!({
            "passes": r.passes,
            "size": set.len(),
            "zero_sum_tuples": r.zero_sum_tuples.to_string().parse::<Value>().expect("integer"),
            "witness": r.witness.as_ref().map(|w| coords_json(w)),
        });
        let _ = writeln!(human, "set of size {} passes: {}", set.len(), r.passes);
        if let Some(w) = &r.witness {
            let _ = writeln!(human, "violating tuple: {}", coords_json(w));
        }
    }
    if a.search {
        let r = petrov_max_search(&inst, &g.budget()).map_err(|e| e.to_string())?;
        done = r.status == SearchStatus::Exact;
        let w = r.witness.as_ref().map(|w| w.elements()).unwrap_or_default();
        v["search"] = json!({
            "value": r.value,
            "status": r.status.as_str(),
            "witness": coords_json(&w),
            "nodes": r.nodes_explored,
        });
        let rel = if done { "=" } else { ">=" };
        let _ = writeln!(
            human,
            "max |F| {rel} {} [{}]\nwitness: {}",
            r.value.unwrap_or(0),
            r.status.as_str(),
            coords_json(&w)
        );
    }
    match (
        petrov_cardinality_bound(&inst, BoundForm::ExactDim),
        petrov_cardinality_bound(&inst, BoundForm::ClosedForm),
    ) {
        (Ok(exact), Ok(closed)) => {
            v["bounds"] = json!({"exact_dim": exact.to_json(), "closed_form": closed.to_json()});
            let _ = writeln!(
                human,
                "bound m*dim: {}\nbound closed form: {}",
                exact.value_int,
                closed.value_real.to_sig_string(30)
            );
        }
        (Err(e), _) | (_, Err(e)) => {
            v["bounds"] = Value::Null;
            let _ = writeln!(human, "no cardinality bound: {e}");
        }
    }
    let text = match g.output() {
        Output::Json => pretty(&v),
        Output::Tsv => {
            let search = v.get("search");
            let field = |key: &str| {
                search
                    .and_then(|s| s.get(key))
                    .map(|x| x.to_string().trim_matches('"').to_string())
                    .unwrap_or_default()
            };
            format!(
                "p\tn\tcoeffs\tmax\tstatus\tbound_dim\tbound_closed\n{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                a.p,
                a.n,
                inst.coeffs().iter().map(u64::to_string).collect::<Vec<_>>().join(","),
                field("value"),
                field("status"),
                v["bounds"]["exact_dim"]["value_int"],
                v["bounds"]["closed_form"]["value_real"],
            )
        }
        Output::Human => human,
    };
    Ok(Outcome::ok(text, done))
}

fn describe(b: &BoundResult) -> String {
    let mut s = format!("{} {}", b.kind.as_str(), b.value_int);
    if !b.conditional_on.is_empty() {
        let conds: Vec<String> = b.conditional_on.iter().map(|c| c.to_string()).collect();
        let _ = write!(s, " assuming {}", conds.join(", "));
    }
    let _ = write!(s, " via {}", b.chain().join(" -> "));
    s
}

fn cmd_bound(g: &GlobalOpts, a: &BoundArgs) -> CmdResult {
    let grp = group(&a.group)?;
    let opts = BoundOptions {
        assume_propd: a.assume_propd,
        ..Default::default()
    };
    let b = best_bounds(&grp, &opts).map_err(|e| e.to_string())?;
    let text = match g.output() {
        Output::Json => pretty(&b.to_json()),
        Output::Tsv => format!(
            "group\tlower\tupper\tupper_conditional\texact\n{}\t{}\t{}\t{}\t{}\n",
            grp,
            b.lower.value_int,
            b.upper.value_int,
            b.upper_conditional.value_int,
            b.exact.as_ref().map(|v| v.to_string()).unwrap_or_default()
        ),
        Output::Human => {
            let mut s = format!("s({grp}) in [{}, {}]\n", b.lower.value_int, b.upper.value_int);
            let _ = writeln!(s, "lower: {}", describe(&b.lower));
            let _ = writeln!(s, "upper: {}", describe(&b.upper));
            if b.upper_conditional.value_int < b.upper.value_int {
                let _ = writeln!(s, "conditional upper: {}", describe(&b.upper_conditional));
            }
            s
        }
    };
    Ok(Outcome::ok(text, true))
}
