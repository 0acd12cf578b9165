use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gbraid::cell::{self, Flavor};
use gbraid::formula::{self, FormulaFlavor};
use gbraid::graph::{self, builtin, Graph};
use gbraid::homology;
use gbraid::morse::{self, Method, MorseComplex};
use gbraid::presentation;
use gbraid::tree::{self, fixtures, Mode, OrderedTree};
use gbraid::{corpus, Error, Policy};

#[derive(Parser)]
#[command(name = "gbraid", version, about = "Homology and presentations of graph braid groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Built-in name (K5, K33, K4, Theta4, K(3,4), ...), a path to a JSON or edge-list file,
    /// or `corpus` for the seeded random corpus (check only)
    #[arg(long, global = true, default_value = "K33")]
    graph: String,
    /// Number of points
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,
    #[arg(long, global = true, value_enum, default_value_t = FlavorArg::Unordered)]
    flavor: FlavorArg,
    #[arg(long, global = true, default_value = "generic")]
    mode: Mode,
    #[arg(long, global = true, default_value = "generic")]
    method: Method,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Maximum number of cells to enumerate
    #[arg(long, global = true, default_value_t = 5_000_000)]
    cap: usize,
    /// Seed for the random corpus
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Subdivision policy: auto, none, uniform, strict, or a segment count k
    #[arg(long, global = true, default_value = "auto")]
    subdivide: String,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Homology of the configuration space through the Morse complex
    Homology,
    /// First homology from the closed formulas
    Formula,
    /// Both routes for H1, compared
    Check,
    /// Biconnected and triconnected decomposition with the invariants N1, N2, N3, N3'
    Decompose,
    /// Critical cells of the Morse complex
    Cells,
    /// The maximal tree, vertex order and tree conditions
    Tree,
    /// Group presentation, raw and simplified
    Present,
    /// Second Betti number, by formula and directly (n = 2)
    Beta2,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum FlavorArg {
    Unordered,
    Ordered,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Homology => "homology",
            Command::Formula => "formula",
            Command::Check => "check",
            Command::Decompose => "decompose",
            Command::Cells => "cells",
            Command::Tree => "tree",
            Command::Present => "present",
            Command::Beta2 => "beta2",
        }
    }
}

struct Run<'a> {
    cli: &'a Cli,
    flavor: Flavor,
    policy: Policy,
    verdicts: Vec<Value>,
}

fn load_graph(source: &str) -> Result<Graph, Error> {
    match builtin(source) {
        Err(Error::UnknownGraph(_)) if Path::new(source).is_file() => {
            let text = std::fs::read_to_string(source).map_err(|e| Error::Parse(format!("{source}: {e}")))?;
            Graph::parse(&text)
        }
        other => other,
    }
}

impl Run<'_> {
    fn formula_flavor(&self) -> FormulaFlavor {
        match self.flavor {
            Flavor::Unordered => FormulaFlavor::B,
            Flavor::Ordered => FormulaFlavor::P2,
        }
    }

    fn constructed_tree(&self, g: &Graph) -> Result<OrderedTree, Error> {
        let n = self.cli.n;
        let tries: Vec<Policy> = match self.policy {
            Policy::Auto if n <= 2 => vec![Policy::Strict, Policy::Uniform],
            Policy::Auto => vec![Policy::Auto, Policy::Strict, Policy::Uniform],
            p => vec![p],
        };
        let mut last = None;
        for p in tries {
            let (h, _) = graph::subdivide(g, n, p)?;
            match tree::choose_tree_and_order(&h, n, self.cli.mode) {
                Ok(t) => return Ok(t),
                Err(e @ Error::Conditions(_)) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("a policy was tried"))
    }

    fn complex(&self, g: &Graph) -> Result<(MorseComplex, &'static str), Error> {
        let (t, origin) = match self.tree_pinned() {
            Some(t) => (t, "pinned"),
            None => (self.constructed_tree(g)?, "constructed"),
        };
        Ok((morse::from_tree(t, self.cli.n, self.flavor, self.cli.method, self.cli.cap)?, origin))
    }

    fn tree_pinned(&self) -> Option<OrderedTree> {
        if self.policy != Policy::Auto {
            return None;
        }
        let (t, _) = fixtures::by_name(&self.cli.graph)?;
        let suitable = graph::suitability(t.graph(), self.cli.n, false).is_ok();
        (suitable && (self.cli.mode == Mode::Generic || t.mode() == Mode::Planar)).then_some(t)
    }

    fn verdict(&mut self, what: &str, a: &Value, b: &Value) -> bool {
        let ok = a == b;
        let v = if ok { json!({"check": what, "verdict": "match"}) } else { json!({"check": what, "verdict": "mismatch", "details": {"left": a, "right": b}}) };
        self.verdicts.push(v);
        ok
    }

    fn homology(&self, g: &Graph) -> Result<Value, Error> {
        let (mc, origin) = self.complex(g)?;
        let groups = homology::homology(&mc);
        let mut out = json!({
            "tree": origin,
            "cells": mc.cell_counts,
            "critical": mc.counts(),
            "euler_characteristic": mc.euler_characteristic(),
            "h1": homology::h1(&mc),
            "groups": groups,
        });
        if mc.ordered() {
            let routes: serde_json::Map<String, Value> =
                homology::h1_routes(&mc).into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            out["h1_routes"] = Value::Object(routes);
        }
        if let Ok(tags) = homology::classify_1cells(&mc) {
            let count = |t: homology::OneCellTag| tags.iter().filter(|&&x| x == t).count();
            out["one_cells"] = json!({
                "pivotal": count(homology::OneCellTag::Pivotal),
                "separating": count(homology::OneCellTag::Separating),
                "free": count(homology::OneCellTag::Free),
            });
        }
        Ok(out)
    }

    fn formula(&self, g: &Graph) -> Result<Value, Error> {
        let h = formula::h1_formula(g, self.cli.n, self.formula_flavor())?;
        let mut out = json!({"h1": h.group});
        if let Some(note) = h.notice {
            out["notice"] = json!(note);
        }
        if self.cli.n >= 2 {
            out["invariants"] = json!(formula::invariant_bundle(g, self.cli.n)?);
        }
        Ok(out)
    }

    fn check_one(&mut self, g: &Graph, label: &str) -> Result<(Value, bool), Error> {
        let f = formula::h1_formula(g, self.cli.n, self.formula_flavor())?.group;
        let (mc, _) = self.complex(g)?;
        let m = homology::h1(&mc);
        let ok = self.verdict(label, &json!(f), &json!(m));
        Ok((json!({"formula": f, "morse": m, "rank": m.rank, "verdict": if ok { "match" } else { "mismatch" }}), ok))
    }

    fn check(&mut self, g: Option<&Graph>) -> Result<Value, Error> {
        match g {
            Some(g) => Ok(self.check_one(g, "h1: formula vs Morse")?.0),
            None => {
                let graphs = corpus::corpus(self.cli.seed, 50);
                let mut entries = vec![];
                let mut matched = 0;
                for (i, g) in graphs.iter().enumerate() {
                    let (mut v, ok) = self.check_one(g, &format!("corpus #{i}"))?;
                    v["graph"] = g.to_json();
                    matched += usize::from(ok);
                    entries.push(v);
                }
                Ok(json!({"seed": self.cli.seed, "entries": entries, "matched": matched, "total": graphs.len()}))
            }
        }
    }

    fn decompose(&self, g: &Graph) -> Result<Value, Error> {
        let d = formula::decompose(g)?;
        let bundle = d.bundle(g, self.cli.n.max(2));
        Ok(json!({"decomposition": d, "invariants": bundle, "planar": gbraid::planar::is_planar(g)}))
    }

    fn cells(&self, g: &Graph) -> Result<Value, Error> {
        let (mc, origin) = self.complex(g)?;
        let dims: Vec<Value> = mc
            .critical
            .iter()
            .map(|list| {
                json!(list
                    .iter()
                    .map(|c| json!({"cell": cell::cell_text(&mc.tree, c, self.flavor), "name": mc.label(c)}))
                    .collect::<Vec<_>>())
            })
            .collect();
        Ok(json!({"tree": origin, "counts": mc.counts(), "critical": dims}))
    }

    fn tree_report(&self, g: &Graph) -> Result<Value, Error> {
        let (t, origin) = match self.tree_pinned() {
            Some(t) => (t, "pinned"),
            None => (self.constructed_tree(g)?, "constructed"),
        };
        let vertices: Vec<Value> = (0..t.len())
            .map(|v| json!({"number": v, "id": t.id(v), "parent": t.parent(v), "children": t.children(v)}))
            .collect();
        let deleted: Vec<Value> = t
            .deleted()
            .iter()
            .enumerate()
            .map(|(i, &e)| json!({"label": format!("d_{}", i + 1), "tau": t.tau(e), "iota": t.iota(e)}))
            .collect();
        Ok(json!({"tree": origin, "vertices": vertices, "deleted": deleted, "conditions": t.verify_conditions()}))
    }

    fn present(&self, g: &Graph) -> Result<Value, Error> {
        let (mc, origin) = self.complex(g)?;
        let raw = presentation::raw_presentation(&mc)?;
        let p = presentation::simplify(&raw, &mc)?;
        let mut out = json!(p.report());
        out["tree"] = json!(origin);
        out["raw"] = json!({"generators": raw.generator_count(), "relators": raw.relators.len()});
        out["abelianization"] = json!(p.abelianization());
        Ok(out)
    }

    fn beta2(&mut self, g: &Graph) -> Result<Value, Error> {
        if self.cli.n != 2 {
            return Err(Error::Unsupported("the second Betti number formulas are for n = 2".into()));
        }
        let f = formula::beta2_formula(g, self.formula_flavor())?;
        let (mc, _) = self.complex(g)?;
        let d = homology::homology(&mc).get(2).map_or(0, |h| h.rank) as i64;
        self.verdict("beta2: formula vs Morse", &json!(f), &json!(d));
        Ok(json!({"formula": f, "morse": d}))
    }
}

fn policy(s: &str) -> Result<Policy, Error> {
    s.parse()
}

fn execute(cli: &Cli) -> Result<(Value, Vec<Value>), Error> {
    let flavor = match cli.flavor {
        FlavorArg::Unordered => Flavor::Unordered,
        FlavorArg::Ordered => Flavor::Ordered,
    };
    let mut run = Run { cli, flavor, policy: policy(&cli.subdivide)?, verdicts: vec![] };
    let corpus_mode = cli.graph == "corpus";
    if corpus_mode && cli.command != Command::Check {
        return Err(Error::Invalid("--graph corpus is only available for check".into()));
    }
    let g = if corpus_mode { None } else { Some(load_graph(&cli.graph)?) };
    let results = match (cli.command, g.as_ref()) {
        (Command::Check, g) => run.check(g)?,
        (_, None) => unreachable!(),
        (Command::Homology, Some(g)) => run.homology(g)?,
        (Command::Formula, Some(g)) => run.formula(g)?,
        (Command::Decompose, Some(g)) => run.decompose(g)?,
        (Command::Cells, Some(g)) => run.cells(g)?,
        (Command::Tree, Some(g)) => run.tree_report(g)?,
        (Command::Present, Some(g)) => run.present(g)?,
        (Command::Beta2, Some(g)) => run.beta2(g)?,
    };
    Ok((results, run.verdicts))
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            let width = m.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().unwrap().iter().any(|y| y.is_object() || y.is_array())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(x)));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{}\n", scalar(x)));
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(" "),
        x => x.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match execute(&cli) {
        Ok((results, verdicts)) => {
            let mismatch = verdicts.iter().any(|v| v["verdict"] == "mismatch");
            let report = json!({
                "command": cli.command.name(),
                "inputs": {
                    "graph": cli.graph,
                    "n": cli.n,
                    "flavor": if cli.flavor == FlavorArg::Ordered { "ordered" } else { "unordered" },
                    "mode": cli.mode,
                    "method": cli.method,
                    "subdivide": cli.subdivide,
                    "seed": cli.seed,
                },
                "results": results,
                "verdicts": verdicts,
                "timing_ms": start.elapsed().as_secs_f64() * 1000.0,
            });
            match cli.format {
                Format::Json => {
                    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report).unwrap());
                }
                Format::Text => {
                    let mut s = String::new();
                    text(&report, 0, &mut s);
                    let _ = write!(std::io::stdout(), "{s}");
                }
            }
            if mismatch {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
