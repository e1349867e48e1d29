use std::io::Read;
use std::path::Path;

use median_lab_core::cocycle::{
    check_cocycle, euler_cocycle, parse_circle_word, CocycleError, Perturbed, RegisteredCocycle, Sampling,
};
use median_lab_core::experiments::{cayley_ball, distortion_profile, ExperimentError};
use median_lab_core::graph::{
    self, all_pairs_distances, generate_with_cap, Graph, GraphError, GraphFormat, GraphKind, DEFAULT_VERTEX_CAP,
};
use median_lab_core::groups::{order_of, GroupError, GroupModel};
use median_lab_core::median::{almost_median_frontier, check_median, cubical_dimension, hyperplanes, MedianError};
use median_lab_core::presentation::{
    check_relators, count_homs, named_presentation, parse_targets, separate, FinitePresentation, PresentationError,
};
use median_lab_core::{cap_from_env, DEFAULT_BALL_CAP, SCHEMA};
use serde_json::{json, Value};
use thiserror::Error;

use median_lab_core::registry::{parse_model, CliModel, MODEL_GRAMMAR};
use median_lab_core::with_model;
use crate::{Cli, CocycleCmd, Command, Expectation, Format, Global, GraphCmd, GroupCmd, Kind, PresentCmd};

const PRESENTATION_GRAMMAR: &str = "\
presentation: name: <id>; gens: <id> ...; rel: <rel>, ...; fam(n>=<k>): <expr> = <expr> [if n (in|notin) I else <expr>]; I = <set>
  rel:  <expr> (= <expr>)*          expr: factors separated by spaces or *
  factor: atom[^k | ^-k | ^n | ^-n]  atom: <gen> | 1 | (expr) | [x, y] | comm(x, y)
named: lamplighter, GI:I=<set>, vondyck:a,b,c, triangle:a,b,c, ext237, surface:<g>; @<path> reads a file
targets: trivial, Z<k>, D<n>, Q8, Q16, Dic<n>, S<n>, A4, Pauli, SD16, M16, products AxB, small:<k> (k <= 16)";

/// Largest ball exported as DOT.
const DOT_LIMIT: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Usage { message: String, grammar: Option<&'static str> },
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } | CliError::Io(_) => 2,
            CliError::Cap(_) => 3,
        }
    }

    pub fn grammar(&self) -> Option<&'static str> {
        match self {
            CliError::Usage { grammar, .. } => *grammar,
            _ => None,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage { message: message.into(), grammar: None }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::SizeOverflow { .. } => CliError::Cap(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

impl From<MedianError> for CliError {
    fn from(e: MedianError) -> Self {
        match e {
            MedianError::TooManyHyperplanes { .. } => CliError::Cap(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::Usage { message: e.to_string(), grammar: Some(MODEL_GRAMMAR) }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

impl From<CocycleError> for CliError {
    fn from(e: CocycleError) -> Self {
        match e {
            CocycleError::Experiment(x) => x.into(),
            other => usage(other.to_string()),
        }
    }
}

impl From<PresentationError> for CliError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::BudgetExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Usage { message: other.to_string(), grammar: Some(PRESENTATION_GRAMMAR) },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Artifact {
    stem: &'static str,
    format: Format,
    body: String,
    code: u8,
}

impl Artifact {
    fn json(stem: &'static str, v: Value) -> Self {
        let body = serde_json::to_string_pretty(&v).expect("JSON values serialise") + "\n";
        Artifact { stem, format: Format::Json, body, code: 0 }
    }

    fn text(stem: &'static str, format: Format, body: String) -> Self {
        Artifact { stem, format, body, code: 0 }
    }

    fn negative_if(mut self, negative: bool) -> Self {
        if negative {
            self.code = 1;
        }
        self
    }
}

/// `{"schema": ...}` merged into a serialised report.
fn with_schema(v: impl serde::Serialize) -> Value {
    let mut v = serde_json::to_value(v).expect("reports serialise");
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

fn emit(global: &Global, a: Artifact) -> Result<u8> {
    match &global.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = match a.format {
                Format::Json => "json",
                Format::Csv => "csv",
                Format::Dot => "dot",
            };
            let path = dir.join(format!("{}.{ext}", a.stem));
            std::fs::write(&path, &a.body)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", a.body),
    }
    Ok(a.code)
}

pub fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    let artifact = match &cli.command {
        Command::Graph(cmd) => graph_cmd(g, cmd)?,
        Command::Group(cmd) => group_cmd(g, cmd)?,
        Command::Cocycle(cmd) => cocycle_cmd(g, cmd)?,
        Command::Present(cmd) => present_cmd(g, cmd)?,
        Command::Report(args) => report(g, &args.inputs)?,
    };
    emit(g, artifact)
}

fn cap(global: &Global, default: usize) -> usize {
    global.cap.unwrap_or_else(|| cap_from_env(default))
}

fn require<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--kind {kind} needs --{flag}")))
}

// ---------------------------------------------------------------------------
// graph

fn read_graph(input: &Option<std::path::PathBuf>) -> Result<(Graph, String)> {
    let (text, name) = match input {
        Some(p) => (std::fs::read_to_string(p)?, p.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned())),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            (s, "stdin".to_string())
        }
    };
    Ok((graph::parse(&text)?, name))
}

fn graph_cmd(global: &Global, cmd: &GraphCmd) -> Result<Artifact> {
    match cmd {
        GraphCmd::Gen { kind, k, rows, cols, n, extra, lambda, lo, hi } => {
            let seed = global.seed;
            let gk = match kind {
                Kind::Hypercube => GraphKind::Hypercube { k: require(*k, "k", "hypercube")? },
                Kind::Grid => GraphKind::Grid { rows: require(*rows, "rows", "grid")?, cols: require(*cols, "cols", "grid")? },
                Kind::Path => GraphKind::Path { n: require(*n, "n", "path")? },
                Kind::Cycle => GraphKind::Cycle { n: require(*n, "n", "cycle")? },
                Kind::Tree => GraphKind::RandomTree { n: require(*n, "n", "tree")?, seed },
                Kind::Random => GraphKind::RandomConnected { n: require(*n, "n", "random")?, extra: *extra, seed },
                Kind::Quasiline => GraphKind::QuasiLine {
                    lambda: require(*lambda, "lambda", "quasiline")?,
                    lo: require(*lo, "lo", "quasiline")?,
                    hi: require(*hi, "hi", "quasiline")?,
                },
                Kind::Complete => GraphKind::Complete { n: require(*n, "n", "complete")? },
            };
            let g = generate_with_cap(&gk, cap(global, DEFAULT_VERTEX_CAP))?;
            let (format, gf) = match global.format.unwrap_or(Format::Json) {
                Format::Json => (Format::Json, GraphFormat::Json),
                Format::Csv => (Format::Csv, GraphFormat::EdgeList),
                Format::Dot => (Format::Dot, GraphFormat::Dot),
            };
            Ok(Artifact::text("graph-gen", format, graph::serialize(&g, gf)))
        }
        GraphCmd::Analyze { input, median: _, frontier, delta_max, expect } => {
            let (g, name) = read_graph(input)?;
            if g.n() > cap(global, DEFAULT_VERTEX_CAP) {
                return Err(CliError::Cap(format!("graph with {} vertices exceeds the cap", g.n())));
            }
            let dm = all_pairs_distances(&g);
            let report = check_median(&g, &dm);
            let negative = match expect {
                Some(Expectation::Median) => !report.is_median,
                Some(Expectation::NotMedian) => report.is_median,
                None => false,
            };
            let format = global.format.unwrap_or(Format::Json);
            let fr = (*frontier || format == Format::Csv).then(|| almost_median_frontier(&g, &dm, *delta_max));
            match format {
                Format::Csv => {
                    let fr = fr.expect("frontier computed for CSV");
                    let mut s = String::from("delta,feasible,Delta,witness\n");
                    for e in &fr.entries {
                        let d = e.max_diameter.map_or(String::new(), |d| d.to_string());
                        let w = e.witness.map_or(String::new(), |w| format!("{} {} {}", w[0], w[1], w[2]));
                        s.push_str(&format!("{},{},{d},{w}\n", e.delta, e.feasible));
                    }
                    Ok(Artifact::text("graph-analyze", Format::Csv, s).negative_if(negative))
                }
                Format::Dot => Err(usage("graph analyze writes JSON or CSV")),
                Format::Json => {
                    let mut v = json!({
                        "schema": SCHEMA,
                        "graph": name,
                        "n": g.n(),
                        "edges": g.edge_count(),
                        "diameter": dm.diameter(),
                        "is_median": report.is_median,
                        "triples_checked": report.triples_checked,
                        "witness": report.witness,
                    });
                    if let Some(fr) = fr {
                        v["frontier"] = json!(fr.entries);
                        v["least_feasible"] = json!(fr.least_feasible());
                    }
                    Ok(Artifact::json("graph-analyze", v).negative_if(negative))
                }
            }
        }
        GraphCmd::Hyperplanes { input } => {
            let (g, name) = read_graph(input)?;
            let dm = all_pairs_distances(&g);
            let report = check_median(&g, &dm);
            if !report.is_median {
                let v = json!({"schema": SCHEMA, "graph": name, "is_median": false, "witness": report.witness});
                return Ok(Artifact::json("graph-hyperplanes", v).negative_if(true));
            }
            let hs = hyperplanes(&g, &dm)?;
            let dim = cubical_dimension(&hs)?;
            let classes: Vec<Value> = hs
                .iter()
                .map(|h| json!({"edges": h.edges, "halfspace_sizes": [h.halfspaces[0].len(), h.halfspaces[1].len()]}))
                .collect();
            let v = json!({
                "schema": SCHEMA,
                "graph": name,
                "is_median": true,
                "count": hs.len(),
                "dimension": dim,
                "hyperplanes": classes,
            });
            Ok(Artifact::json("graph-hyperplanes", v))
        }
    }
}

// ---------------------------------------------------------------------------
// group

fn ball<M: CliModel>(m: &M, global: &Global, radius: u32) -> Result<Artifact> {
    let b = cayley_ball(m, radius, cap(global, DEFAULT_BALL_CAP))?;
    match global.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Artifact::json("group-ball", b.summary_json())),
        Format::Csv => {
            let mut s = String::from("radius,sphere,ball\n");
            let mut total = 0;
            for (r, k) in b.sphere_sizes.iter().enumerate() {
                total += k;
                s.push_str(&format!("{r},{k},{total}\n"));
            }
            Ok(Artifact::text("group-ball", Format::Csv, s))
        }
        Format::Dot => {
            if b.len() > DOT_LIMIT {
                return Err(CliError::Cap(format!("ball of {} elements is too large for DOT (limit {DOT_LIMIT})", b.len())));
            }
            Ok(Artifact::text("group-ball", Format::Dot, b.to_dot(m)))
        }
    }
}

fn distortion<M: CliModel>(m: &M, global: &Global, radius: u32, central: Option<&str>) -> Result<Artifact> {
    let text = central
        .or(m.default_central())
        .ok_or_else(|| usage(format!("model `{}` has no default central element; pass --central", m.name())))?;
    let z = m.parse_element(text)?;
    let p = distortion_profile(m, &z, radius, cap(global, DEFAULT_BALL_CAP))?;
    match global.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(Artifact::text("group-distortion", Format::Csv, p.to_csv())),
        Format::Json => Ok(Artifact::json("group-distortion", with_schema(&p))),
        Format::Dot => Err(usage("group distortion writes CSV or JSON")),
    }
}

fn order<M: CliModel>(m: &M, element: &str, bound: u64) -> Result<Artifact> {
    let e = m.parse_element(element)?;
    let o = order_of(m, &e, bound);
    Ok(Artifact::json(
        "group-order",
        json!({"schema": SCHEMA, "model": m.name(), "element": m.format(&e), "order": o}),
    ))
}

fn group_cmd(global: &Global, cmd: &GroupCmd) -> Result<Artifact> {
    match cmd {
        GroupCmd::Ball { model, radius } => with_model!(&parse_model(model)?, m => ball(m, global, *radius)),
        GroupCmd::Distortion { model, radius, central } => {
            with_model!(&parse_model(model)?, m => distortion(m, global, *radius, central.as_deref()))
        }
        GroupCmd::Order { model, element, bound } => with_model!(&parse_model(model)?, m => order(m, element, *bound)),
    }
}

// ---------------------------------------------------------------------------
// cocycle

fn sampling(c: &RegisteredCocycle, global: &Global, s: &crate::SamplingArgs) -> Sampling {
    match (s.samples, s.radius) {
        (Some(count), _) => Sampling::Random { count, seed: global.seed, max_len: s.max_len },
        (None, Some(radius)) => Sampling::Ball { radius },
        (None, None) => c.default_sampling(global.seed),
    }
}

fn perturbed_check<C: median_lab_core::cocycle::Cocycle>(
    inner: C,
    s: Sampling,
) -> std::result::Result<median_lab_core::cocycle::CocycleReport, CocycleError> {
    let g = inner.base().generators()[0].element.clone();
    check_cocycle(&Perturbed { inner, at: (g.clone(), g), delta: 1 }, s)
}

fn cocycle_cmd(global: &Global, cmd: &CocycleCmd) -> Result<Artifact> {
    match cmd {
        CocycleCmd::Check { name, sampling: args, perturb } => {
            let c = RegisteredCocycle::parse(name)?;
            let s = sampling(&c, global, args);
            let report = if *perturb {
                match c {
                    RegisteredCocycle::Trivial(x) => perturbed_check(x, s)?,
                    RegisteredCocycle::Heisenberg(x) => perturbed_check(x, s)?,
                    RegisteredCocycle::Euler(x) => perturbed_check(x, s)?,
                    RegisteredCocycle::Twist(x) => perturbed_check(x, s)?,
                }
            } else {
                c.check(s)?
            };
            let pass = report.pass;
            Ok(Artifact::json("cocycle-check", with_schema(&report)).negative_if(!pass))
        }
        CocycleCmd::Euler { g, h } => {
            let (mg, mh) = (parse_circle_word(g)?, parse_circle_word(h)?);
            let c = euler_cocycle(&mg, &mh);
            Ok(Artifact::json(
                "cocycle-euler",
                json!({"schema": SCHEMA, "g": g, "h": h, "g_map": mg.to_json(), "h_map": mh.to_json(), "c": c}),
            ))
        }
        CocycleCmd::Defect { name, sampling: args } => {
            let c = RegisteredCocycle::parse(name)?;
            let s = sampling(&c, global, args);
            let report = c.defect(s)?;
            Ok(Artifact::json("cocycle-defect", with_schema(&report)))
        }
        CocycleCmd::Translation { name, element, z, n } => {
            let c = RegisteredCocycle::parse(name)?;
            let cname = c.name();
            let report = c.translation(*z, element, *n)?;
            let mut v = with_schema(&report);
            v["cocycle"] = json!(cname);
            v["element"] = json!({"z": z, "q": element});
            v["value"] = json!(report.value().to_string());
            Ok(Artifact::json("cocycle-translation", v))
        }
    }
}

// ---------------------------------------------------------------------------
// present

fn load_presentation(arg: &str) -> Result<FinitePresentation> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let name = Path::new(path).file_stem().map_or("presentation".into(), |s| s.to_string_lossy().into_owned());
            let p = FinitePresentation::parse(&text)?;
            Ok(if p.name == "presentation" { p.with_name(name) } else { p })
        }
        None => Ok(named_presentation(arg)?),
    }
}

fn present_check<M: CliModel>(p: &FinitePresentation, m: &M, assign: Option<&str>, n_bound: i64) -> Result<Artifact> {
    let mut images = std::collections::HashMap::new();
    match assign {
        Some(text) => {
            for pair in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (g, w) = pair.split_once('=').ok_or_else(|| usage(format!("expected gen=word, got `{pair}`")))?;
                images.insert(g.trim().to_string(), m.parse_element(w.trim())?);
            }
        }
        None => {
            for g in &p.generators {
                let e = m.parse_element(g).map_err(|_| {
                    usage(format!("model `{}` has no generator `{g}`; pass --assign", m.name()))
                })?;
                images.insert(g.clone(), e);
            }
        }
    }
    let r = check_relators(p, m, &images, n_bound)?;
    let pass = r.pass;
    Ok(Artifact::json("present-check", with_schema(&r)).negative_if(!pass))
}

fn present_cmd(global: &Global, cmd: &PresentCmd) -> Result<Artifact> {
    match cmd {
        PresentCmd::Check { p, model, assign, n_bound } => {
            let p = load_presentation(p)?;
            with_model!(&parse_model(model)?, m => present_check(&p, m, assign.as_deref(), *n_bound))
        }
        PresentCmd::Homcount { p, targets, budget } => {
            let p = load_presentation(p)?;
            let hs = parse_targets(targets)?;
            let reports = hs.iter().map(|h| count_homs(&p, h, *budget)).collect::<std::result::Result<Vec<_>, _>>()?;
            match global.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut s = String::from("target,order,count,family_bound\n");
                    for (h, r) in hs.iter().zip(&reports) {
                        s.push_str(&format!("{},{},{},{}\n", r.target, h.order(), r.count, r.family_bound));
                    }
                    Ok(Artifact::text("present-homcount", Format::Csv, s))
                }
                Format::Dot => Err(usage("present homcount writes JSON or CSV")),
                Format::Json => Ok(Artifact::json(
                    "present-homcount",
                    json!({"schema": SCHEMA, "presentation": p.name, "reports": reports}),
                )),
            }
        }
        PresentCmd::Separate { a, b, targets, budget } => {
            let (pa, pb) = (load_presentation(a)?, load_presentation(b)?);
            let hs = parse_targets(targets)?;
            let v = separate(&pa, &pb, &hs, *budget)?;
            Ok(Artifact::json(
                "present-separate",
                json!({
                    "schema": SCHEMA,
                    "a": pa.name,
                    "b": pb.name,
                    "targets": hs.iter().map(|h| h.name()).collect::<Vec<_>>(),
                    "verdict": v.to_string(),
                    "result": v,
                }),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// report

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn report(global: &Global, inputs: &[std::path::PathBuf]) -> Result<Artifact> {
    let mut rows = Vec::new();
    for path in inputs {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let mut flat = Vec::new();
        flatten("", &v, &mut flat);
        let file = path.display().to_string();
        rows.extend(flat.into_iter().map(|(k, x)| (file.clone(), k, x)));
    }
    match global.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let v: Vec<Value> = rows.iter().map(|(f, k, x)| json!({"file": f, "path": k, "value": x})).collect();
            Ok(Artifact::json("report", json!({"schema": SCHEMA, "rows": v})))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["file", "path", "value"]).map_err(|e| usage(e.to_string()))?;
            for (f, k, x) in &rows {
                w.write_record([f, k, x]).map_err(|e| usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            Ok(Artifact::text("report", Format::Csv, String::from_utf8(bytes).expect("utf-8 input")))
        }
        Format::Dot => Err(usage("report writes CSV or JSON")),
    }
}
