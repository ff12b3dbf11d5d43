use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use genmod::io::{parse_flat_partition, read_graph, LoadedGraph};
use genmod::oracles::{
    check_nodal_connectivity, check_strict_gap, module_count_bound, perturbation_rate, sign_pattern_certificate,
    Shift, Verdict,
};
use genmod::partition::{spectral_bipartition, ssgb as run_ssgb};
use genmod::spectral::positive_eigenvalue_count;
use genmod::{Error, Model, NodeSet};
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_SINGLE_COMMUNITY: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

const DEFAULT_NODAL_EPS: [f64; 5] = [0.0, 1e-3, 1e-1, 1.0, 10.0];

fn load(cfg: &RunConfig) -> Result<LoadedGraph, CliError> {
    let path = cfg
        .input
        .path
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    Ok(read_graph(path, cfg.input.format)?)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn external(ids: &[u64], s: &NodeSet) -> Vec<u64> {
    s.iter().map(|i| ids[i]).collect()
}

fn parse_edge(spec: &str, loaded: &LoadedGraph) -> Result<(usize, usize), CliError> {
    let usage = || CliError::Usage(format!("--edge expects \"i,j\" with node ids from the input, got {spec:?}"));
    let (a, b) = spec.split_once(',').ok_or_else(usage)?;
    let index: HashMap<u64, usize> = loaded.ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let lookup = |t: &str| -> Result<usize, CliError> {
        let id: u64 = t.trim().parse().map_err(|_| usage())?;
        index.get(&id).copied().ok_or_else(usage)
    };
    Ok((lookup(a)?, lookup(b)?))
}

pub fn info(cfg: &RunConfig) -> Result<u8, CliError> {
    let loaded = load(cfg)?;
    let g = &loaded.graph;
    let d = g.degrees();
    let components = g.components_of(&NodeSet::full(g.n()))?.len();
    let summary = json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "loops": g.edges().filter(|e| e.0 == e.1).count(),
        "volume": g.volume(),
        "connected": g.is_connected(),
        "components": components,
        "degree": {
            "min": d.iter().copied().fold(f64::INFINITY, f64::min),
            "max": d.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "mean": g.volume() / g.n() as f64,
        },
        "node_ids": loaded.ids,
    });
    emit(cfg, &pretty(&summary))?;
    Ok(EXIT_OK)
}

pub fn bipartition(cfg: &RunConfig) -> Result<u8, CliError> {
    let loaded = load(cfg)?;
    let model = cfg.model()?;
    let m = model.build(&loaded.graph)?;
    let b = spectral_bipartition(&m, &loaded.graph, &cfg.solver())?;
    let report = json!({
        "model": model,
        "m_g": b.leading.value,
        "gap": b.leading.gap,
        "simple": b.leading.simple,
        "orientation": b.leading.orientation,
        "solver": b.leading.diagnostics,
        "positive": external(&loaded.ids, &b.positive),
        "negative": external(&loaded.ids, &b.negative),
        "positive_connected": b.positive_connected,
        "negative_connected": b.negative_connected,
        "q_positive": m.modularity(&b.positive)?.q_value,
        "q_negative": m.modularity(&b.negative)?.q_value,
        "proper": b.is_proper(),
    });
    emit(cfg, &pretty(&report))?;
    Ok(if b.is_proper() { EXIT_OK } else { EXIT_SINGLE_COMMUNITY })
}

pub fn ssgb(cfg: &RunConfig, flat: Option<&Path>) -> Result<u8, CliError> {
    let loaded = load(cfg)?;
    let d = run_ssgb(&loaded.graph, cfg.model()?, &cfg.ssgb_params())?;
    let partition = d.flat_partition(Some(&loaded.ids));
    match cfg.output.format {
        OutputFormat::Json => emit(cfg, &pretty(&d.to_json(Some(&loaded.ids))))?,
        OutputFormat::Flat => emit(cfg, &partition)?,
    }
    if let Some(path) = flat {
        write_file(path, &partition)?;
    }
    Ok(if d.leaves().len() == 1 { EXIT_SINGLE_COMMUNITY } else { EXIT_OK })
}

pub struct VerifyRequest {
    pub theorems: Vec<String>,
    pub edge: Option<String>,
    pub eps: Vec<f64>,
    pub partition: Option<PathBuf>,
}

const SELECTORS: [&str; 5] = ["gap", "nodal", "sign", "perturb", "counts"];

fn selected(theorems: &[String]) -> Result<(Vec<&'static str>, bool), CliError> {
    let mut out = Vec::new();
    let mut all = false;
    for t in theorems {
        let t = t.trim();
        if t == "all" {
            all = true;
            out = SELECTORS.to_vec();
        } else if let Some(s) = SELECTORS.iter().find(|s| **s == t) {
            if !out.contains(s) {
                out.push(*s);
            }
        } else {
            return Err(CliError::Usage(format!(
                "unknown theorem selector {t:?}; expected one of gap, nodal, sign, perturb, counts, all"
            )));
        }
    }
    Ok((out, all))
}

fn not_simple_verdict(gap: f64) -> Verdict {
    Verdict {
        theorem: "perturbation-first-order".into(),
        hypotheses_checked: true,
        hypothesis_values: BTreeMap::from([("simple".into(), json!(false)), ("gap".into(), json!(gap))]),
        conclusion_checked: false,
        pass: true,
        tolerances: BTreeMap::new(),
        warnings: vec!["leading eigenvalue is not simple; the first-order law does not apply".into()],
    }
}

pub fn verify(cfg: &RunConfig, req: &VerifyRequest) -> Result<u8, CliError> {
    let (theorems, all) = selected(&req.theorems)?;
    let loaded = load(cfg)?;
    let g = &loaded.graph;
    let model = cfg.model()?;
    let m = model.build(g)?;
    let opts = cfg.solver();
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    for t in theorems {
        match t {
            "gap" => verdicts.push(check_strict_gap(&m, g, &opts)?.verdict()),
            "nodal" => {
                let eps = if req.eps.is_empty() { &DEFAULT_NODAL_EPS[..] } else { &req.eps[..] };
                verdicts.push(check_nodal_connectivity(&m, g, eps, &opts)?.verdict());
            }
            "sign" => {
                let b = spectral_bipartition(&m, g, &opts)?;
                for shift in [Shift::Value(0.0), Shift::Auto] {
                    verdicts.push(sign_pattern_certificate(&m, &b.positive, shift, &opts)?.verdict());
                }
            }
            "perturb" => {
                let Some(edge) = &req.edge else {
                    if all {
                        notes.push("perturb skipped: no --edge given");
                        continue;
                    }
                    return Err(CliError::Usage("the perturb check needs --edge i,j".into()));
                };
                let (i, j) = parse_edge(edge, &loaded)?;
                let eps = req.eps.first().copied().unwrap_or(1e-4);
                match perturbation_rate(g, model, i, j, eps, &opts) {
                    Ok(r) => verdicts.push(r.verdict()),
                    Err(Error::NotSimple { gap }) => verdicts.push(not_simple_verdict(gap)),
                    Err(e) => return Err(e.into()),
                }
            }
            "counts" => {
                let subsets = match &req.partition {
                    Some(p) => {
                        let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                        parse_flat_partition(&text, &loaded.ids)?
                    }
                    None => run_ssgb(g, model, &cfg.ssgb_params())?.communities(),
                };
                verdicts.push(module_count_bound(&m, &subsets, None, &opts)?.verdict());
            }
            _ => unreachable!("selectors are validated"),
        }
    }
    let pass = verdicts.iter().all(|v| v.pass);
    let report = json!({
        "model": model,
        "n": g.n(),
        "verdicts": verdicts,
        "notes": notes,
        "pass": pass,
    });
    emit(cfg, &pretty(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep(cfg: &RunConfig, gammas: &[f64]) -> Result<u8, CliError> {
    if gammas.is_empty() {
        return Err(CliError::Usage("sweep needs --gamma with at least one value".into()));
    }
    let loaded = load(cfg)?;
    let base = cfg.model()?;
    let params = cfg.ssgb_params();
    let mut out = String::from("gamma,communities,modularity,positive_eigenvalues,error\n");
    for &gamma in gammas {
        // NG and RB(1) share a matrix but not a subgraph rule; keep NG so a
        // one-row sweep reproduces `ssgb`.
        let model = if base == Model::Ng && gamma == 1.0 {
            Ok(Model::Ng)
        } else {
            base.with_gamma(gamma)
        };
        let row = model.and_then(|model| {
            let d = run_ssgb(&loaded.graph, model, &params)?;
            let m = model.build(&loaded.graph)?;
            let count = positive_eigenvalue_count(&m, &params.solver)?;
            Ok((d.leaves().len(), d.total_modularity(), count))
        });
        match row {
            Ok((communities, q, count)) => writeln!(out, "{gamma},{communities},{q},{count},"),
            Err(e) => writeln!(out, "{gamma},,,,{}", csv_field(&format!("{}: {e}", e.code()))),
        }
        .expect("writing to a String");
    }
    emit(cfg, &out)?;
    Ok(EXIT_OK)
}

pub fn perturb(cfg: &RunConfig, edge: &str, eps: f64) -> Result<u8, CliError> {
    let loaded = load(cfg)?;
    let (i, j) = parse_edge(edge, &loaded)?;
    let r = perturbation_rate(&loaded.graph, cfg.model()?, i, j, eps, &cfg.solver())?;
    let mut v = serde_json::to_value(&r).expect("report serializes");
    v["edge"] = json!([loaded.ids[i], loaded.ids[j]]);
    emit(cfg, &pretty(&v))?;
    Ok(EXIT_OK)
}
