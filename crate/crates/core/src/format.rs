//! Plain-text instance and configuration files.
//!
//! Ising instances:
//!
//! ```text
//! # comment
//! ising <n> <m> <gamma>
//! chimera <k>              optional, requires n = 8k^2
//! inactive <node>          zero or more, before any weight touching the node
//! h <node> <numerator>
//! J <a> <b> <numerator>    exactly m lines
//! ```
//!
//! MaxCut instances use `maxcut <n> <m> <gamma>`, an optional `field <node>`
//! line and `e <a> <b> <numerator>` edge lines. Weights are integers over
//! `gamma`. Spin files hold whitespace-separated `+1`/`-1` values, or a solve
//! report in JSON whose `spins` field is used.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ising::{IsingBuilder, IsingInstance, SpinConfig, Topology};
use crate::report::SolveReport;
use crate::transforms::{maxcut_to_ising, MaxCutInstance, WeightedEdge};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceFile {
    Ising(IsingInstance),
    MaxCut(MaxCutInstance),
}

impl InstanceFile {
    /// The Ising form; a MaxCut file is converted with its field node removed.
    pub fn into_ising(self) -> Result<IsingInstance> {
        match self {
            InstanceFile::Ising(inst) => Ok(inst),
            InstanceFile::MaxCut(mc) => maxcut_to_ising(&mc),
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    parse_instance(&read_to_string(path)?, path)
}

pub fn read_ising(path: &Path) -> Result<IsingInstance> {
    read_instance(path)?.into_ising()
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

struct Fields<'a> {
    path: &'a Path,
    line: usize,
    toks: &'a [&'a str],
}

impl Fields<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.line, msg)
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.toks.len() == n {
            Ok(())
        } else {
            Err(self.err(format!(
                "`{}` takes {} values, found {}",
                self.toks[0],
                n - 1,
                self.toks.len() - 1
            )))
        }
    }

    fn num<T: std::str::FromStr>(&self, i: usize, what: &str) -> Result<T> {
        self.toks[i]
            .parse()
            .map_err(|_| self.err(format!("invalid {what} `{}`", self.toks[i])))
    }
}

pub fn parse_instance(text: &str, path: &Path) -> Result<InstanceFile> {
    let mut lines = content_lines(text);
    let Some((line, toks)) = lines.next() else {
        return Err(Error::parse(path, 1, "empty instance file"));
    };
    let head = Fields {
        path,
        line,
        toks: &toks,
    };
    match toks[0] {
        "ising" => parse_ising(head, lines).map(InstanceFile::Ising),
        "maxcut" => parse_maxcut(head, lines).map(InstanceFile::MaxCut),
        other => Err(head.err(format!(
            "expected an `ising` or `maxcut` header, found `{other}`"
        ))),
    }
}

fn parse_ising<'a>(
    head: Fields<'_>,
    lines: impl Iterator<Item = (usize, Vec<&'a str>)>,
) -> Result<IsingInstance> {
    head.expect_len(4)?;
    let n: usize = head.num(1, "node count")?;
    let m: usize = head.num(2, "coupling count")?;
    let gamma: i64 = head.num(3, "gamma")?;
    if gamma < 1 {
        return Err(head.err("gamma must be positive"));
    }
    let path = head.path;
    let mut builder: Option<IsingBuilder> = None;
    let mut couplings = 0usize;
    let mut last_line = head.line;
    for (line, toks) in lines {
        last_line = line;
        let f = Fields {
            path,
            line,
            toks: &toks,
        };
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => f.err(other.to_string()),
        };
        if toks[0] == "chimera" {
            f.expect_len(2)?;
            if builder.is_some() {
                return Err(f.err("`chimera` must directly follow the header"));
            }
            let k: usize = f.num(1, "grid size")?;
            if k == 0 || 8 * k * k != n {
                return Err(f.err(format!(
                    "chimera {k} needs n = {}, header says {n}",
                    8 * k * k
                )));
            }
            builder = Some(IsingBuilder::chimera_k(k, gamma));
            continue;
        }
        let b = builder.get_or_insert_with(|| IsingBuilder::general(n, gamma));
        match toks[0] {
            "inactive" => {
                f.expect_len(2)?;
                b.deactivate(f.num(1, "node")?).map_err(wrap)?;
            }
            "h" => {
                f.expect_len(3)?;
                b.field(f.num(1, "node")?, f.num(2, "weight")?)
                    .map_err(wrap)?;
            }
            "J" => {
                f.expect_len(4)?;
                b.coupling(f.num(1, "node")?, f.num(2, "node")?, f.num(3, "weight")?)
                    .map_err(wrap)?;
                couplings += 1;
            }
            other => return Err(f.err(format!("unknown entry `{other}`"))),
        }
    }
    if couplings != m {
        return Err(Error::parse(
            path,
            last_line,
            format!("header announces {m} couplings, file has {couplings}"),
        ));
    }
    builder
        .unwrap_or_else(|| IsingBuilder::general(n, gamma))
        .build()
        .map_err(|e| Error::parse(path, last_line, e.to_string()))
}

fn parse_maxcut<'a>(
    head: Fields<'_>,
    lines: impl Iterator<Item = (usize, Vec<&'a str>)>,
) -> Result<MaxCutInstance> {
    head.expect_len(4)?;
    let n: usize = head.num(1, "node count")?;
    let m: usize = head.num(2, "edge count")?;
    let gamma: i64 = head.num(3, "gamma")?;
    if gamma < 1 {
        return Err(head.err("gamma must be positive"));
    }
    let path = head.path;
    let mut field = None;
    let mut edges = Vec::new();
    let mut last_line = head.line;
    for (line, toks) in lines {
        last_line = line;
        let f = Fields {
            path,
            line,
            toks: &toks,
        };
        match toks[0] {
            "field" => {
                f.expect_len(2)?;
                field = Some(f.num(1, "node")?);
            }
            "e" => {
                f.expect_len(4)?;
                let (a, b): (usize, usize) = (f.num(1, "node")?, f.num(2, "node")?);
                if a == b || a.max(b) >= n {
                    return Err(f.err(format!("edge {a}-{b} is not valid for {n} nodes")));
                }
                edges.push(WeightedEdge {
                    a,
                    b,
                    weight: f.num(3, "weight")?,
                });
            }
            other => return Err(f.err(format!("unknown entry `{other}`"))),
        }
    }
    if edges.len() != m {
        return Err(Error::parse(
            path,
            last_line,
            format!("header announces {m} edges, file has {}", edges.len()),
        ));
    }
    MaxCutInstance::new(n, gamma, edges, field)
        .map_err(|e| Error::parse(path, last_line, e.to_string()))
}

/// Canonical text: fixed line order, nonzero fields only.
pub fn ising_to_string(inst: &IsingInstance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "ising {} {} {}",
        inst.len(),
        inst.couplings().len(),
        inst.scale()
    )
    .unwrap();
    if let Topology::Chimera { k } = inst.topology() {
        writeln!(out, "chimera {k}").unwrap();
    }
    for i in (0..inst.len()).filter(|&i| !inst.is_active(i)) {
        writeln!(out, "inactive {i}").unwrap();
    }
    for (i, &h) in inst.fields().iter().enumerate() {
        if h != 0 {
            writeln!(out, "h {i} {h}").unwrap();
        }
    }
    for c in inst.couplings() {
        writeln!(out, "J {} {} {}", c.a, c.b, c.weight).unwrap();
    }
    out
}

pub fn maxcut_to_string(mc: &MaxCutInstance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "maxcut {} {} {}",
        mc.nodes(),
        mc.edges().len(),
        mc.scale()
    )
    .unwrap();
    if let Some(v) = mc.field_node() {
        writeln!(out, "field {v}").unwrap();
    }
    for e in mc.edges() {
        writeln!(out, "e {} {} {}", e.a, e.b, e.weight).unwrap();
    }
    out
}

pub fn write_ising(path: &Path, inst: &IsingInstance) -> Result<()> {
    write_string(path, &ising_to_string(inst))
}

pub fn spins_to_string(s: &[i8]) -> String {
    let mut out = s
        .iter()
        .map(|&x| if x > 0 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(" ");
    out.push('\n');
    out
}

/// Whitespace-separated spins, or the `spins` of a JSON solve report.
pub fn parse_spins(text: &str, path: &Path) -> Result<SpinConfig> {
    if text.trim_start().starts_with('{') {
        let report: SolveReport =
            serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        return report
            .spins
            .ok_or_else(|| Error::parse(path, 1, "report carries no spin configuration"));
    }
    let mut spins = Vec::new();
    for (line, toks) in content_lines(text) {
        for t in toks {
            match t {
                "1" | "+1" => spins.push(1),
                "-1" => spins.push(-1),
                _ => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("spin must be +1 or -1, found `{t}`"),
                    ))
                }
            }
        }
    }
    SpinConfig::new(spins)
}

pub fn read_spins(path: &Path) -> Result<SpinConfig> {
    parse_spins(&read_to_string(path)?, path)
}
