//! On-disk persistence for the intersection-number and graph-enumeration
//! memo tables.
//!
//! Two text files live in the cache directory. Each starts with a header
//! line naming the format version and the convention fingerprint; a file
//! whose header or any line fails to parse is ignored as a whole.
//!
//! ```text
//! wk.txt      tautring-wk v1 <fingerprint>
//!             g;d1,...,dn;p/q
//! graphs.txt  tautring-graphs v1 <fingerprint>
//!             g;n;edges;<graph encoding>
//! ```
//!
//! Both end with `end <number of entries>`, so a truncated file is detected.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{graph_cache_clear, graph_cache_install, graph_cache_snapshot, StableGraph};
use crate::integrate::{wk_cache_clear, wk_cache_entries, wk_cache_install};
use crate::rational::{format_q, parse_q, Q};

pub const ENV_VAR: &str = "TAUTRING_CACHE_DIR";
pub const FORMAT_VERSION: &str = "v1";
/// Changes whenever a stored value would change meaning.
pub const FINGERPRINT: &str = "psi-dvv-sorted;graph-encoding-1";

const WK_FILE: &str = "wk.txt";
const GRAPH_FILE: &str = "graphs.txt";

/// `$TAUTRING_CACHE_DIR`, else `$HOME/.cache/tautring`, else `./.tautring-cache`.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(ENV_VAR).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        Some(home) => PathBuf::from(home).join(".cache").join("tautring"),
        None => PathBuf::from(".tautring-cache"),
    }
}

fn header(kind: &str) -> String {
    format!("tautring-{kind} {FORMAT_VERSION} {FINGERPRINT}")
}

type WkEntry = (u32, Vec<u32>, Q);
type GraphLevels = BTreeMap<(u32, u32), Vec<Vec<StableGraph>>>;

/// Checks header and trailer; returns the entry lines.
fn body<'a>(text: &'a str, kind: &str) -> Result<Vec<&'a str>> {
    let mut lines: Vec<&str> = text.lines().collect();
    if lines.first() != Some(&header(kind).as_str()) {
        return Err(Error::Parse("missing or foreign header".into()));
    }
    let count = lines.pop().and_then(|l| l.strip_prefix("end ")).and_then(|c| c.parse::<usize>().ok());
    if lines.is_empty() || count != Some(lines.len() - 1) {
        return Err(Error::Parse("missing or inconsistent trailer".into()));
    }
    lines.remove(0);
    Ok(lines)
}

fn parse_wk(text: &str) -> Result<Vec<WkEntry>> {
    let lines = body(text, "wk")?;
    let bad = |line: &str| Error::Parse(format!("bad line {line:?}"));
    let mut out = Vec::new();
    for line in lines {
        let mut parts = line.split(';');
        let (Some(g), Some(d), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad(line));
        };
        let g: u32 = g.parse().map_err(|_| bad(line))?;
        let d: Vec<u32> = if d.is_empty() {
            vec![]
        } else {
            d.split(',').map(|x| x.parse().map_err(|_| bad(line))).collect::<Result<_>>()?
        };
        out.push((g, d, parse_q(v).map_err(|_| bad(line))?));
    }
    Ok(out)
}

fn format_wk(entries: &[WkEntry]) -> String {
    let mut s = header("wk");
    s.push('\n');
    for (g, d, v) in entries {
        let d: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("{g};{};{}\n", d.join(","), format_q(v)));
    }
    s.push_str(&format!("end {}\n", entries.len()));
    s
}

fn parse_graphs(text: &str) -> Result<GraphLevels> {
    let lines = body(text, "graphs")?;
    let bad = |line: &str| Error::Parse(format!("bad line {line:?}"));
    let mut out: GraphLevels = BTreeMap::new();
    for line in lines {
        let parts: Vec<&str> = line.splitn(4, ';').collect();
        if parts.len() != 4 {
            return Err(bad(line));
        }
        let g: u32 = parts[0].parse().map_err(|_| bad(line))?;
        let n: u32 = parts[1].parse().map_err(|_| bad(line))?;
        let e: usize = parts[2].parse().map_err(|_| bad(line))?;
        let graph = StableGraph::decode(parts[3])?;
        if graph.genus() != g || graph.num_markings() != n || graph.num_edges() != e || !graph.is_canonical() {
            return Err(bad(line));
        }
        let levels = out.entry((g, n)).or_default();
        while levels.len() <= e {
            levels.push(Vec::new());
        }
        levels[e].push(graph);
    }
    for levels in out.values() {
        // level 0 always holds the smooth graph, so an empty level means a gap
        if levels.iter().any(|l| l.is_empty()) {
            return Err(Error::Parse("missing enumeration level".into()));
        }
    }
    Ok(out)
}

fn format_graphs(snapshot: &[((u32, u32), Vec<Vec<StableGraph>>)]) -> String {
    let mut s = header("graphs");
    s.push('\n');
    let mut count = 0;
    for ((g, n), levels) in snapshot {
        for (e, level) in levels.iter().enumerate() {
            for graph in level {
                s.push_str(&format!("{g};{n};{e};{}\n", graph.encode()));
                count += 1;
            }
        }
    }
    s.push_str(&format!("end {count}\n"));
    s
}

/// Result of loading the persisted tables into memory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub wk_entries: usize,
    pub graph_types: usize,
    /// Files that existed but were ignored, with the reason.
    pub discarded: Vec<String>,
}

fn read_optional(path: &Path) -> Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Reads both files from `dir` and installs their contents.
pub fn load(dir: &Path) -> LoadReport {
    let mut report = LoadReport::default();
    let wk_path = dir.join(WK_FILE);
    match read_optional(&wk_path).and_then(|t| t.map(|t| parse_wk(&t)).transpose()) {
        Ok(Some(entries)) => {
            report.wk_entries = entries.len();
            wk_cache_install(entries);
        }
        Ok(None) => {}
        Err(e) => report.discarded.push(format!("{}: {e}", wk_path.display())),
    }
    let graph_path = dir.join(GRAPH_FILE);
    match read_optional(&graph_path).and_then(|t| t.map(|t| parse_graphs(&t)).transpose()) {
        Ok(Some(levels)) => {
            report.graph_types = levels.len();
            for ((g, n), l) in levels {
                graph_cache_install(g, n, l);
            }
        }
        Ok(None) => {}
        Err(e) => report.discarded.push(format!("{}: {e}", graph_path.display())),
    }
    report
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the current in-memory tables to `dir`, creating it if needed.
pub fn save(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join(WK_FILE), &format_wk(&wk_cache_entries()))?;
    write_atomic(&dir.join(GRAPH_FILE), &format_graphs(&graph_cache_snapshot()))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheStatus {
    pub path: String,
    pub wk_entries: usize,
    pub graph_types: usize,
    pub graphs: usize,
    pub discarded: Vec<String>,
}

/// Counts what is persisted in `dir`, without touching the in-memory tables.
pub fn status(dir: &Path) -> CacheStatus {
    let mut st = CacheStatus {
        path: dir.display().to_string(),
        wk_entries: 0,
        graph_types: 0,
        graphs: 0,
        discarded: vec![],
    };
    match read_optional(&dir.join(WK_FILE)).and_then(|t| t.map(|t| parse_wk(&t)).transpose()) {
        Ok(Some(e)) => st.wk_entries = e.len(),
        Ok(None) => {}
        Err(e) => st.discarded.push(format!("{WK_FILE}: {e}")),
    }
    match read_optional(&dir.join(GRAPH_FILE)).and_then(|t| t.map(|t| parse_graphs(&t)).transpose()) {
        Ok(Some(levels)) => {
            st.graph_types = levels.len();
            st.graphs = levels.values().flatten().map(|l| l.len()).sum();
        }
        Ok(None) => {}
        Err(e) => st.discarded.push(format!("{GRAPH_FILE}: {e}")),
    }
    st
}

/// Removes the persisted files and empties the in-memory tables.
pub fn clear(dir: &Path) -> Result<()> {
    wk_cache_clear();
    graph_cache_clear();
    for name in [WK_FILE, GRAPH_FILE] {
        match fs::remove_file(dir.join(name)) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}
