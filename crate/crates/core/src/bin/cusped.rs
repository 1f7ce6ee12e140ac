// Command-line front end: reproducible experiment runs over cusped spaces.
//
// Subcommands:
//   build    construct a space and write graph + manifest
//   analyze  run analyses over a stored graph, write a JSON report
//   report   render SVG plots and a summary CSV from report files
//
// Exit codes: 0 ok, 2 usage/config error, 3 data/construction error,
// 4 unknown analysis.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use num_rational::Rational64;

use cusped::analysis::{
    estimate_contraction, estimate_delta, fellow_traveling_membership, git_check, kappa,
    morse_excursion, sublinearity_verdict, GeodesicPolicy, Rho,
};
use cusped::config::KeyValues;
use cusped::cusped::{build_by_name, cusped_from_graph, embedding_fit, CuspedSpace};
use cusped::graph::{from_text, to_text, Graph, PathRecord, VertexId, VertexTag};
use cusped::group::CosetId;
use cusped::report::{
    graph_stats, render_delta_plot, render_rho_plot, render_samples_csv, render_summary_csv,
    render_visual_plot, AnalysisReport, Analyses, ContractionSection, FellowSection, GitSection,
    LoadedReport, MorseSection,
};
use cusped::spaces::{cusped_plane_wedge, strip_wedge};
use cusped::visual::visual_size_profile;

const USAGE: &str = "\
cusped - cusped spaces and coarse-geometry diagnostics

USAGE:
  cusped build   [--config FILE] [--family F] [--rank N] [--subgroup GENS]
                 [--radius R] [--depth D] [--extent E] [--out DIR] [--name NAME]
  cusped analyze --graph FILE --analyses LIST --seed N [--out DIR] [--name NAME]
                 [--threads N] [analysis flags]
  cusped report  FILE... [--out DIR]

FAMILIES:
  free | abelian | zxz            group cusped spaces (need rank, subgroup,
                                  radius, depth)
  strip-wedge                     ray with flat strips (needs extent)
  cusped-plane-wedge              strips plus cusped planes (extent, depth)

ANALYSES (comma list):
  delta          --corners group|all --triangles N --policy first|all
                 --cap N --separation N
  contraction    --target SEL --r-max N --budget N --window N
  morse          --target SEL --morse-l N --morse-a N --budget N
  git            --target SEL --git-samples N --slack X (+contraction flags)
  visual-size    --horoball COSET --basepoints TOK,TOK --budget N
  fellow-travel  --alpha geo:U..V --beta geo:U..V --ft-radius N (+r-max)
  embedding      --budget N

TARGET SELECTORS:
  all | verts:1,2,3 | coset:N | vray:N | geo:TOKEN..TOKEN

`analyze --samples-csv auto` additionally writes NAME.samples.csv with the
raw sample tables next to the JSON report (or give a path instead of auto).
The environment variable CUSPED_OUT overrides the configured output
directory; explicit --out wins over the environment.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some((cmd, rest)) = args.split_first() else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    let code = match cmd.as_str() {
        "build" => cmd_build(rest),
        "analyze" => cmd_analyze(rest),
        "report" => cmd_report(rest),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err((2, format!("unknown subcommand {other:?}\n{USAGE}"))),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err((status, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(status)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn usage_err(msg: impl Into<String>) -> (u8, String) {
    (2, msg.into())
}

fn data_err(msg: impl Into<String>) -> (u8, String) {
    (3, msg.into())
}

/// Collect `--key value` flags and positionals; flags are layered onto the
/// config file after the environment so the precedence is
/// flags > environment > file > defaults.
fn parse_flags(args: &[String]) -> Result<(KeyValues, Vec<String>), (u8, String)> {
    let mut file_kv = KeyValues::default();
    let mut flag_kv = KeyValues::default();
    let mut positional = Vec::new();
    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        if let Some(key) = arg.strip_prefix("--") {
            let value = it
                .next()
                .ok_or_else(|| usage_err(format!("flag --{key} needs a value")))?;
            if key == "config" {
                let text = std::fs::read_to_string(value)
                    .map_err(|e| usage_err(format!("cannot read config {value}: {e}")))?;
                file_kv = KeyValues::parse(&text).map_err(usage_err)?;
            } else {
                flag_kv.set(key, value.clone());
            }
        } else {
            positional.push(arg.clone());
        }
    }
    let mut kv = file_kv;
    kv.apply_env();
    for (k, v) in flag_kv.0 {
        kv.set(&k, v);
    }
    Ok((kv, positional))
}

// ---------------------------------------------------------------------------
// build

fn cmd_build(args: &[String]) -> CmdResult {
    let (kv, positional) = parse_flags(args)?;
    if !positional.is_empty() {
        return Err(usage_err(format!("unexpected arguments {positional:?}")));
    }
    let family = kv
        .get("family")
        .ok_or_else(|| usage_err("build needs --family (or family= in the config)"))?
        .to_string();

    let built = match family.as_str() {
        "free" | "abelian" | "zxz" => {
            let rank: usize = kv.require_num("rank").map_err(usage_err)?;
            let subgroup = kv
                .get("subgroup")
                .ok_or_else(|| usage_err("group families need subgroup="))?
                .to_string();
            let radius: u32 = kv.require_num("radius").map_err(usage_err)?;
            let depth: u32 = kv.require_num("depth").map_err(usage_err)?;
            let cs = build_by_name(&family, rank, &subgroup, radius, depth)
                .map_err(|e| data_err(e.to_string()))?;
            let name = kv
                .get("name")
                .map(str::to_string)
                .unwrap_or_else(|| format!("{family}{rank}_rel_{}_R{radius}_D{depth}", subgroup.replace(',', "")));
            BuiltSpace::Cusped(Box::new(cs), name)
        }
        "strip-wedge" => {
            let extent: u32 = kv.require_num("extent").map_err(usage_err)?;
            if extent == 0 {
                return Err(usage_err("extent must be at least 1"));
            }
            let w = strip_wedge(extent).map_err(|e| data_err(e.to_string()))?;
            let name = kv
                .get("name")
                .map(str::to_string)
                .unwrap_or_else(|| format!("stripwedge_E{extent}"));
            BuiltSpace::Wedge(w.graph, name, extent, 0, 0)
        }
        "cusped-plane-wedge" => {
            let extent: u32 = kv.require_num("extent").map_err(usage_err)?;
            if extent == 0 {
                return Err(usage_err("extent must be at least 1"));
            }
            let depth: u32 = kv.require_num("depth").map_err(usage_err)?;
            let w = cusped_plane_wedge(extent, depth).map_err(|e| data_err(e.to_string()))?;
            let name = kv
                .get("name")
                .map(str::to_string)
                .unwrap_or_else(|| format!("cuspedplanes_E{extent}_D{depth}"));
            BuiltSpace::Wedge(w.graph, name, extent, w.planes, depth)
        }
        other => return Err(usage_err(format!("invalid family {other:?}"))),
    };

    let out_dir = kv.out_dir();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| data_err(format!("cannot create {}: {e}", out_dir.display())))?;

    let (graph, name, manifest) = match built {
        BuiltSpace::Cusped(cs, name) => {
            let manifest = cusped_manifest(&cs);
            (cs.graph, name, manifest)
        }
        BuiltSpace::Wedge(graph, name, extent, planes, depth) => {
            let manifest = serde_json::json!({
                "config": {
                    "family": family,
                    "extent": extent,
                    "depth": depth,
                },
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "planes": planes,
            });
            (graph, name, manifest)
        }
    };

    let graph_path = out_dir.join(format!("{name}.graph"));
    let manifest_path = out_dir.join(format!("{name}.manifest.json"));
    std::fs::write(&graph_path, to_text(&graph))
        .map_err(|e| data_err(format!("cannot write {}: {e}", graph_path.display())))?;
    let mut manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_text.push('\n');
    std::fs::write(&manifest_path, manifest_text)
        .map_err(|e| data_err(format!("cannot write {}: {e}", manifest_path.display())))?;
    println!("{}", graph_path.display());
    println!("{}", manifest_path.display());
    Ok(())
}

enum BuiltSpace {
    Cusped(Box<CuspedSpace>, String),
    Wedge(Graph, String, u32, usize, u32),
}

fn cusped_manifest(cs: &CuspedSpace) -> serde_json::Value {
    let horoball_vertices = cs.graph.vertex_count() - cs.cayley_count;
    serde_json::json!({
        "config": cs.config,
        "vertices": cs.graph.vertex_count(),
        "edges": cs.graph.edge_count(),
        "cayley_vertices": cs.cayley_count,
        "horoball_vertices": horoball_vertices,
        "cosets": cs.cosets,
        "disconnected_cosets": cs.cosets.iter().filter(|c| c.components > 1).count(),
    })
}

// ---------------------------------------------------------------------------
// analyze

const KNOWN_ANALYSES: [&str; 7] = [
    "delta",
    "contraction",
    "morse",
    "git",
    "visual-size",
    "fellow-travel",
    "embedding",
];

fn cmd_analyze(args: &[String]) -> CmdResult {
    let (kv, positional) = parse_flags(args)?;
    if !positional.is_empty() {
        return Err(usage_err(format!("unexpected arguments {positional:?}")));
    }
    let graph_path = kv
        .get("graph")
        .ok_or_else(|| usage_err("analyze needs --graph FILE"))?
        .to_string();
    let analyses_spec = kv
        .get("analyses")
        .ok_or_else(|| usage_err("analyze needs --analyses LIST"))?
        .to_string();
    let wanted: Vec<String> = analyses_spec
        .split(',')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if wanted.is_empty() {
        return Err(usage_err("empty analysis list"));
    }
    for w in &wanted {
        if !KNOWN_ANALYSES.contains(&w.as_str()) {
            return Err((4, format!("unknown analysis {w:?}")));
        }
    }
    // every listed analysis is sampled or derives constants from sampled
    // tables, so a seed is mandatory
    let seed: u64 = kv
        .parse_num("seed")
        .map_err(usage_err)?
        .ok_or_else(|| usage_err("analyze needs --seed N (sampled analyses)"))?;

    let text = std::fs::read_to_string(&graph_path)
        .map_err(|e| data_err(format!("cannot read {graph_path}: {e}")))?;
    let graph = from_text(&text).map_err(|e| data_err(format!("malformed graph file: {e}")))?;

    let threads: usize = kv.parse_num("threads").map_err(usage_err)?.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| data_err(format!("thread pool: {e}")))?;

    let started = Instant::now();
    let report = pool.install(|| run_analyses(&graph, &kv, &wanted, seed))?;
    eprintln!(
        "analyze: {} analyses in {:.1} ms",
        wanted.len(),
        started.elapsed().as_secs_f64() * 1e3
    );

    let out_dir = kv.out_dir();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| data_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let name = kv.get("name").map(str::to_string).unwrap_or_else(|| {
        Path::new(&graph_path)
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "analysis".into())
    });
    let path = out_dir.join(format!("{name}.report.json"));
    std::fs::write(&path, report.to_json())
        .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))?;
    println!("{}", path.display());
    if let Some(csv_spec) = kv.get("samples-csv") {
        let csv_path = if csv_spec == "auto" {
            out_dir.join(format!("{name}.samples.csv"))
        } else {
            PathBuf::from(csv_spec)
        };
        std::fs::write(&csv_path, render_samples_csv(&report))
            .map_err(|e| data_err(format!("cannot write {}: {e}", csv_path.display())))?;
        println!("{}", csv_path.display());
    }
    Ok(())
}

fn run_analyses(
    graph: &Graph,
    kv: &KeyValues,
    wanted: &[String],
    seed: u64,
) -> Result<AnalysisReport, (u8, String)> {
    let mut analyses = Analyses::default();
    let num = |key: &str, default: u64| -> Result<u64, (u8, String)> {
        Ok(kv.parse_num::<u64>(key).map_err(usage_err)?.unwrap_or(default))
    };

    for w in wanted {
        match w.as_str() {
            "delta" => {
                let pool = match kv.get_or("corners", "group") {
                    "group" => {
                        let pool: Vec<VertexId> = graph
                            .vertices()
                            .filter(|&v| matches!(graph.tag(v), VertexTag::GroupElement(_)))
                            .collect();
                        if pool.is_empty() {
                            graph.vertices().collect()
                        } else {
                            pool
                        }
                    }
                    "all" => graph.vertices().collect(),
                    other => return Err(usage_err(format!("bad corners {other:?}"))),
                };
                let triangles = num("triangles", 200)? as usize;
                if triangles == 0 {
                    return Err(usage_err("triangles must be at least 1"));
                }
                let cap = num("cap", 4)? as usize;
                let policy = match kv.get_or("policy", "first") {
                    "first" => GeodesicPolicy::First,
                    "all" => GeodesicPolicy::AllUpToCap,
                    other => return Err(usage_err(format!("bad policy {other:?}"))),
                };
                let sep = num("separation", 0)? as u32;
                let separation = if sep > 0 { Some((sep, 2 * sep)) } else { None };
                analyses.delta = Some(estimate_delta(
                    graph, &pool, triangles, policy, cap, separation, seed,
                ));
            }
            "contraction" | "git" => {
                let target_sel = kv
                    .get("target")
                    .ok_or_else(|| usage_err(format!("{w} needs --target")))?;
                let target = resolve_target(graph, target_sel).map_err(usage_err)?;
                let r_max = num("r-max", 8)? as u32;
                let budget = num("budget", 200_000)? as usize;
                let estimate = estimate_contraction(graph, &target, r_max, budget, seed)
                    .map_err(|e| data_err(e.to_string()))?;
                if w == "contraction" {
                    let window = num("window", 2)? as u32;
                    let verdict = sublinearity_verdict(&estimate, window)
                        .map_err(|e| usage_err(e.to_string()))?;
                    let kappa_10 = kappa(&Rho::Table(estimate.clone()), 1.into(), 0.into())
                        .ok()
                        .map(|k| k.to_string());
                    analyses.contraction = Some(ContractionSection {
                        target: target_sel.to_string(),
                        target_size: target.len(),
                        estimate,
                        window,
                        verdict,
                        kappa_10,
                    });
                } else {
                    let samples = num("git-samples", 300)? as usize;
                    let slack: f64 = kv
                        .parse_num("slack")
                        .map_err(usage_err)?
                        .unwrap_or(2.0);
                    let report = git_check(graph, &target, &estimate, samples, slack, seed)
                        .map_err(|e| data_err(e.to_string()))?;
                    analyses.git = Some(GitSection {
                        target: target_sel.to_string(),
                        report,
                    });
                }
            }
            "morse" => {
                let target_sel = kv
                    .get("target")
                    .ok_or_else(|| usage_err("morse needs --target"))?;
                let target = resolve_target(graph, target_sel).map_err(usage_err)?;
                let l = Rational64::from_integer(num("morse-l", 3)? as i64);
                let a = Rational64::from_integer(num("morse-a", 0)? as i64);
                let budget = num("budget", 500)? as usize;
                let entry = morse_excursion(graph, &target, l, a, budget, seed)
                    .map_err(|e| data_err(e.to_string()))?;
                analyses.morse = Some(MorseSection {
                    target: target_sel.to_string(),
                    entries: vec![entry],
                });
            }
            "visual-size" => {
                let cs = cusped_from_graph(graph).ok_or_else(|| {
                    data_err("graph carries no horoball structure (depth 0?)")
                })?;
                let coset = num("horoball", 0)? as u32;
                if coset as usize >= cs.cosets.len() {
                    return Err(usage_err(format!("no coset {coset}")));
                }
                let basepoints_spec = kv
                    .get("basepoints")
                    .ok_or_else(|| usage_err("visual-size needs --basepoints TOK,TOK"))?;
                let mut basepoints = Vec::new();
                for tok in basepoints_spec.split(',').filter(|s| !s.is_empty()) {
                    let v = graph
                        .find_token(tok)
                        .ok_or_else(|| usage_err(format!("no vertex tagged {tok:?}")))?;
                    basepoints.push(v);
                }
                let budget = num("budget", 200)? as usize;
                let profile =
                    visual_size_profile(&cs, CosetId(coset), &basepoints, budget, seed)
                        .map_err(|e| data_err(e.to_string()))?;
                analyses.visual_size = Some(profile);
            }
            "fellow-travel" => {
                let alpha_sel = kv
                    .get("alpha")
                    .ok_or_else(|| usage_err("fellow-travel needs --alpha geo:U..V"))?;
                let beta_sel = kv
                    .get("beta")
                    .ok_or_else(|| usage_err("fellow-travel needs --beta geo:U..V"))?;
                let alpha = resolve_path(graph, alpha_sel).map_err(usage_err)?;
                let beta = resolve_path(graph, beta_sel).map_err(usage_err)?;
                let radius = num("ft-radius", 1)? as u32;
                let r_max = num("r-max", 8)? as u32;
                let budget = num("budget", 200_000)? as usize;
                let rho_table =
                    estimate_contraction(graph, &alpha.vertices, r_max, budget, seed)
                        .map_err(|e| data_err(e.to_string()))?;
                let rho = Rho::Table(rho_table);
                let k = kappa(&rho, beta.l, beta.a).map_err(|e| data_err(e.to_string()))?;
                let member = fellow_traveling_membership(
                    graph,
                    &beta,
                    &alpha,
                    radius,
                    &rho,
                    alpha.start(),
                )
                .map_err(|e| data_err(e.to_string()))?;
                analyses.fellow_travel = Some(FellowSection {
                    alpha: alpha_sel.to_string(),
                    beta: beta_sel.to_string(),
                    radius,
                    kappa: k.to_string(),
                    member,
                });
            }
            "embedding" => {
                let cs = cusped_from_graph(graph).ok_or_else(|| {
                    data_err("graph carries no horoball structure (depth 0?)")
                })?;
                let budget = num("budget", 10_000)? as usize;
                analyses.embedding = Some(embedding_fit(&cs, budget, seed));
            }
            _ => unreachable!("validated above"),
        }
    }

    let mut config: BTreeMap<String, String> = kv.0.clone();
    // parallelism and output location must not affect report bytes
    config.remove("threads");
    config.remove("out");
    Ok(AnalysisReport {
        config,
        seed,
        graph: graph_stats(graph),
        analyses,
    })
}

/// Resolve a vertex-set selector.
fn resolve_target(g: &Graph, sel: &str) -> Result<Vec<VertexId>, String> {
    if sel == "all" {
        return Ok(g.vertices().collect());
    }
    if let Some(list) = sel.strip_prefix("verts:") {
        let mut out = Vec::new();
        for part in list.split(',').filter(|s| !s.is_empty()) {
            let id: u32 = part.parse().map_err(|_| format!("bad vertex id {part:?}"))?;
            if id as usize >= g.vertex_count() {
                return Err(format!("vertex {id} out of range"));
            }
            out.push(VertexId(id));
        }
        if out.is_empty() {
            return Err("empty vertex list".into());
        }
        return Ok(out);
    }
    if let Some(coset) = sel.strip_prefix("coset:") {
        let coset: u32 = coset.parse().map_err(|_| format!("bad coset id in {sel:?}"))?;
        let verts = coset_level0(g, coset);
        if verts.is_empty() {
            return Err(format!("no horoball tags for coset {coset}"));
        }
        return Ok(verts);
    }
    if let Some(coset) = sel.strip_prefix("vray:") {
        let coset: u32 = coset.parse().map_err(|_| format!("bad coset id in {sel:?}"))?;
        return vertical_ray_vertices(g, coset);
    }
    if let Some(pair) = sel.strip_prefix("geo:") {
        let (u_tok, v_tok) = pair
            .split_once("..")
            .ok_or_else(|| format!("geo selector needs TOKEN..TOKEN, got {sel:?}"))?;
        let u = g
            .find_token(u_tok)
            .ok_or_else(|| format!("no vertex tagged {u_tok:?}"))?;
        let v = g
            .find_token(v_tok)
            .ok_or_else(|| format!("no vertex tagged {v_tok:?}"))?;
        let geo = g.first_geodesic(u, v).map_err(|e| e.to_string())?;
        return Ok(geo.vertices);
    }
    Err(format!("unknown target selector {sel:?}"))
}

fn resolve_path(g: &Graph, sel: &str) -> Result<PathRecord, String> {
    if let Some(pair) = sel.strip_prefix("geo:") {
        let (u_tok, v_tok) = pair
            .split_once("..")
            .ok_or_else(|| format!("geo selector needs TOKEN..TOKEN, got {sel:?}"))?;
        let u = g
            .find_token(u_tok)
            .ok_or_else(|| format!("no vertex tagged {u_tok:?}"))?;
        let v = g
            .find_token(v_tok)
            .ok_or_else(|| format!("no vertex tagged {v_tok:?}"))?;
        return g.first_geodesic(u, v).map_err(|e| e.to_string());
    }
    Err(format!("path selector must be geo:U..V, got {sel:?}"))
}

fn coset_level0(g: &Graph, coset: u32) -> Vec<VertexId> {
    let mut bases: Vec<String> = Vec::new();
    for v in g.vertices() {
        if let VertexTag::HoroballPoint { coset: c, base, .. } = g.tag(v) {
            if *c == coset && !bases.contains(base) {
                bases.push(base.clone());
            }
        }
    }
    let mut out: Vec<VertexId> = bases
        .iter()
        .filter_map(|b| g.find_token(b))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn vertical_ray_vertices(g: &Graph, coset: u32) -> Result<Vec<VertexId>, String> {
    let level0 = coset_level0(g, coset);
    let Some(&base) = level0.first() else {
        return Err(format!("no horoball tags for coset {coset}"));
    };
    let base_token = g.tag(base).token();
    let mut lifts: Vec<(u32, VertexId)> = Vec::new();
    for v in g.vertices() {
        if let VertexTag::HoroballPoint {
            coset: c,
            base: b,
            level,
        } = g.tag(v)
        {
            if *c == coset && *b == base_token {
                lifts.push((*level, v));
            }
        }
    }
    lifts.sort();
    let mut out = vec![base];
    out.extend(lifts.into_iter().map(|(_, v)| v));
    Ok(out)
}

// ---------------------------------------------------------------------------
// report

fn cmd_report(args: &[String]) -> CmdResult {
    let (kv, positional) = parse_flags(args)?;
    if positional.is_empty() {
        return Err(usage_err("report needs at least one report file"));
    }
    let mut loaded = Vec::new();
    for path in &positional {
        let text = std::fs::read_to_string(path)
            .map_err(|e| data_err(format!("cannot read {path}: {e}")))?;
        let report = AnalysisReport::from_json(&text)
            .map_err(|e| data_err(format!("cannot parse {path}: {e}")))?;
        let name = Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| path.clone());
        loaded.push(LoadedReport {
            name: name.trim_end_matches(".report").to_string(),
            report,
        });
    }
    let out_dir: PathBuf = kv.out_dir();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| data_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let outputs = [
        ("rho.svg", render_rho_plot(&loaded)),
        ("delta.svg", render_delta_plot(&loaded)),
        ("visual.svg", render_visual_plot(&loaded)),
        ("summary.csv", render_summary_csv(&loaded)),
    ];
    for (file, content) in outputs {
        let path = out_dir.join(file);
        std::fs::write(&path, content)
            .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}
