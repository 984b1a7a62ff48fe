//! Command-line front end. JSON output is the machine interface; the plain
//! text views are for reading only.
//!
//! Exit codes: 0 when everything requested succeeded or passed, 1 when a
//! verification check failed, 2 on usage errors and internal errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache;
use crate::error::{Error, Result};
use crate::graphs::{enumerate_stable_graphs, LocusKind};
use crate::integrate::{evaluate, pairing_matrix};
use crate::pixton::{hain_divisor, pixton_class, RamificationData};
use crate::product::multiply;
use crate::rational::format_q;
use crate::strata::{generators, TautClass, TautClassJson};
use crate::verify::{
    check_exp_identities, check_gplus1, check_multiplicativity, check_genus_one_counterexample, CheckReport, Verdict,
};

#[derive(Debug, Parser)]
#[command(name = "tautring", version, about = "Exact computations in the tautological ring of stable curves")]
pub struct Cli {
    /// Print JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Neither read nor write the on-disk cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stable graphs with at most `codim` edges.
    Graphs {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 0)]
        codim: u32,
    },
    /// Decorated strata spanning degree `deg`.
    Generators {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        deg: u32,
    },
    /// Degree-`deg` part of Pixton's class.
    Pixton {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        deg: u32,
    },
    /// Hain's divisor class.
    Hain {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Product of two classes given as JSON (inline or `@file`).
    Multiply {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Degree of a top-degree class given as JSON (inline or `@file`).
    Evaluate {
        #[arg(long)]
        x: String,
    },
    /// Pairing matrix between degree `deg` and the complementary degree.
    Pair {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        deg: u32,
    },
    /// Named verification bundles.
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Persistent cache of intersection numbers and graph enumerations.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// The five verdicts of the genus-one counterexample on M_{1,3}.
    #[command(alias = "paper-section7")]
    GenusOneCounterexample,
    /// D_a D_b against D_a D_{a+b}, optionally modulo strata off a locus.
    Multiplicativity {
        #[command(flatten)]
        data: DataArgs,
        /// Twist of the second vector.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k2: i64,
        /// Second vector, shifted convention.
        #[arg(long = "B", value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "b")]
        big_b: Option<Vec<i64>>,
        /// Second vector, unshifted convention.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Option<Vec<i64>>,
        #[arg(long, value_enum, default_value_t = Locus::All)]
        locus: Locus,
    },
    /// exp formulas for P on the treelike and compact-type loci.
    ExpIdentities {
        #[command(flatten)]
        data: DataArgs,
    },
    /// P^{g+1} vanishes modulo the pairing.
    Gplus1 {
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    Status,
    Clear,
    Path,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Locus {
    All,
    Treelike,
    CompactType,
}

impl From<Locus> for LocusKind {
    fn from(l: Locus) -> Self {
        match l {
            Locus::All => LocusKind::All,
            Locus::Treelike => LocusKind::Treelike,
            Locus::CompactType => LocusKind::CompactType,
        }
    }
}

#[derive(Debug, Args)]
pub struct Space {
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub k: i64,
    /// Shifted vector A = a + k, comma separated.
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "a", required_unless_present = "a")]
    pub big_a: Option<Vec<i64>>,
    /// Unshifted vector a, comma separated, summing to k(2g-2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<i64>>,
}

fn build_data(g: u32, n: u32, k: i64, big: Option<Vec<i64>>, small: Option<Vec<i64>>) -> Result<RamificationData> {
    match (big, small) {
        (Some(v), None) => RamificationData::from_A(g, n, k, v),
        (None, Some(v)) => RamificationData::from_a(g, n, k, v),
        (Some(_), Some(_)) => Err(Error::Ramification("give only one of the shifted and unshifted vectors".into())),
        (None, None) => Err(Error::Ramification("a vector is required".into())),
    }
}

impl DataArgs {
    fn data(&self) -> Result<RamificationData> {
        build_data(self.g, self.n, self.k, self.big_a.clone(), self.a.clone())
    }
}

fn read_class(arg: &str) -> Result<TautClass> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    let json: TautClassJson = serde_json::from_str(&text)?;
    TautClass::from_json(&json)
}

/// What a subcommand produced.
enum Output {
    Plain { json: Value, text: String },
    Checks(Vec<CheckReport>),
}

fn class_output(x: &TautClass) -> Output {
    let text = format!("class on M_{},{} of degree {}\n{x}", x.g(), x.n(), x.degree());
    Output::Plain { json: serde_json::to_value(x.to_json()).expect("serializable"), text }
}

#[derive(Serialize)]
struct GraphRow {
    graph: String,
    edges: usize,
    h1: u32,
    automorphisms: u64,
}

fn execute(cmd: &Command, cache_dir: Option<&PathBuf>) -> Result<Output> {
    Ok(match cmd {
        Command::Graphs { space, codim } => {
            let graphs = enumerate_stable_graphs(space.g, space.n, *codim)?;
            let rows: Vec<GraphRow> = graphs
                .iter()
                .map(|gr| GraphRow {
                    graph: gr.encode(),
                    edges: gr.num_edges(),
                    h1: gr.h1(),
                    automorphisms: gr.automorphism_count(),
                })
                .collect();
            let mut text = format!("{} graphs\n{:>5} {:>3} {:>5}  graph\n", rows.len(), "edges", "h1", "|Aut|");
            for r in &rows {
                text.push_str(&format!("{:>5} {:>3} {:>5}  {}\n", r.edges, r.h1, r.automorphisms, r.graph));
            }
            Output::Plain { json: json!({"g": space.g, "n": space.n, "codim": codim, "graphs": rows}), text }
        }
        Command::Generators { space, deg } => {
            let gens = generators(space.g, space.n, *deg)?;
            let mut text = format!("{} generators\n", gens.len());
            for s in gens.iter() {
                text.push_str(&format!("{s}\n"));
            }
            let list: Vec<_> = gens.iter().map(|s| s.to_json()).collect();
            Output::Plain { json: json!({"g": space.g, "n": space.n, "degree": deg, "generators": list}), text }
        }
        Command::Pixton { data, deg } => class_output(&pixton_class(&data.data()?, *deg)?),
        Command::Hain { data } => class_output(&hain_divisor(&data.data()?)?),
        Command::Multiply { x, y } => class_output(&multiply(&read_class(x)?, &read_class(y)?)?),
        Command::Evaluate { x } => {
            let v = format_q(&evaluate(&read_class(x)?)?);
            Output::Plain { json: json!({"value": v}), text: v }
        }
        Command::Pair { space, deg } => {
            let m = pairing_matrix(space.g, space.n, *deg)?;
            let entries: Vec<Vec<String>> = m.entries.iter().map(|r| r.iter().map(format_q).collect()).collect();
            let mut text = format!("{} x {} pairing matrix of rank {}\n", m.rows.len(), m.columns.len(), m.rank);
            for row in &entries {
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            let json = json!({
                "g": m.g, "n": m.n, "degree": m.degree, "rank": m.rank,
                "rows": m.rows.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
                "columns": m.columns.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
                "entries": entries,
            });
            Output::Plain { json, text }
        }
        Command::Check { check } => Output::Checks(match check {
            CheckCommand::GenusOneCounterexample => check_genus_one_counterexample()?,
            CheckCommand::Multiplicativity { data, k2, big_b, b, locus } => {
                let first = data.data()?;
                let second = build_data(data.g, data.n, *k2, big_b.clone(), b.clone())?;
                vec![check_multiplicativity(&first, &second, (*locus).into())?]
            }
            CheckCommand::ExpIdentities { data } => vec![check_exp_identities(&data.data()?)?],
            CheckCommand::Gplus1 { data } => vec![check_gplus1(&data.data()?)?],
        }),
        Command::Cache { action } => {
            let dir = cache_dir.cloned().unwrap_or_else(cache::cache_dir);
            match action {
                CacheAction::Path => {
                    let p = dir.display().to_string();
                    Output::Plain { json: json!({"path": p}), text: p }
                }
                CacheAction::Status => {
                    let st = cache::status(&dir);
                    let mut text = format!(
                        "path: {}\nintersection numbers: {}\ngraph types: {} ({} graphs)",
                        st.path, st.wk_entries, st.graph_types, st.graphs
                    );
                    for d in &st.discarded {
                        text.push_str(&format!("\nignored: {d}"));
                    }
                    Output::Plain { json: serde_json::to_value(&st)?, text }
                }
                CacheAction::Clear => {
                    cache::clear(&dir)?;
                    Output::Plain { json: json!({"cleared": dir.display().to_string()}), text: "cache cleared".into() }
                }
            }
        }
    })
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::PassModPairingKernel => "pass-mod-pairing-kernel",
    }
}

/// Runs the command line `argv` (program name first), writing to the given
/// streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };

    let managing_cache = matches!(cli.command, Command::Cache { .. });
    let dir = (!cli.no_cache).then(cache::cache_dir);
    if let (Some(dir), false) = (&dir, managing_cache) {
        for d in cache::load(dir).discarded {
            let _ = writeln!(err, "warning: ignoring cache file {d}");
        }
    }

    let result = execute(&cli.command, dir.as_ref());

    if let (Some(dir), false, Ok(_)) = (&dir, managing_cache, &result) {
        if let Err(e) = cache::save(dir) {
            let _ = writeln!(err, "warning: cache not written to {} ({e}); results kept in memory only", dir.display());
        }
    }

    match result {
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Ok(Output::Plain { json, text }) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json).expect("serializable"))
            } else {
                writeln!(out, "{}", text.trim_end())
            };
            0
        }
        Ok(Output::Checks(reports)) => {
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("serializable"));
            } else {
                for r in &reports {
                    let _ = writeln!(out, "{:<24} {:<24} {} ms", r.name, verdict_word(r.verdict), r.runtime_ms);
                }
            }
            if reports.iter().all(|r| r.verdict.passed()) {
                0
            } else {
                1
            }
        }
    }
}

/// Runs against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
