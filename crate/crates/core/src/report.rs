//! Machine-readable analysis reports and their rendered outputs.
//!
//! Reports serialize to JSON with a stable field order so identical runs
//! are byte-identical; wall-clock timings go to stderr, never into the
//! report. The `report` subcommand renders SVG plots and a summary CSV
//! from one or more report files without third-party services.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{DeltaEstimate, GitReport, MorseExcursion, SublinearEstimate, Verdict};
use crate::cusped::EmbeddingFit;
use crate::visual::VisualProfile;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub group_vertices: usize,
    pub horoball_vertices: usize,
    pub space_vertices: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionSection {
    pub target: String,
    pub target_size: usize,
    pub estimate: SublinearEstimate,
    pub window: u32,
    pub verdict: Verdict,
    /// kappa(rho_hat, 1, 0) when the table is sublinear in range.
    pub kappa_10: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorseSection {
    pub target: String,
    pub entries: Vec<MorseExcursion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GitSection {
    pub target: String,
    pub report: GitReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FellowSection {
    pub alpha: String,
    pub beta: String,
    pub radius: u32,
    pub kappa: String,
    pub member: bool,
}

/// Every analysis the `analyze` subcommand can run; absent sections are
/// omitted from the JSON.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Analyses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse: Option<MorseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub git: Option<GitSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visual_size: Option<VisualProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fellow_travel: Option<FellowSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingFit>,
}

/// Self-contained result bundle: re-running with the embedded config and
/// seed reproduces every value exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub graph: GraphStats,
    pub analyses: Analyses,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<AnalysisReport, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// SVG rendering

struct Series<'a> {
    label: &'a str,
    points: Vec<(f64, f64)>,
}

/// Minimal line chart; deterministic output.
fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let w = 640.0;
    let h = 420.0;
    let ml = 60.0;
    let mb = 50.0;
    let mt = 40.0;
    let mr = 20.0;
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x_max, mut y_max) = (1.0f64, 1.0f64);
    for (x, y) in &all {
        x_max = x_max.max(*x);
        y_max = y_max.max(*y);
    }
    let px = |x: f64| ml + (w - ml - mr) * x / x_max;
    let py = |y: f64| h - mb - (h - mb - mt) * y / y_max;
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        title
    ));
    // axes
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr,
        h - mb
    ));
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        (w + ml - mr) / 2.0,
        h - 12.0,
        x_label
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (h - mb + mt) / 2.0,
        (h - mb + mt) / 2.0,
        y_label
    ));
    // simple ticks at max values
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
        px(x_max),
        h - mb + 16.0,
        x_max
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        ml - 6.0,
        py(y_max) + 4.0,
        y_max
    ));
    for (i, ser) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        if !pts.is_empty() {
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
            for (x, y) in &ser.points {
                s.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                    px(*x),
                    py(*y)
                ));
            }
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            ml + 8.0,
            mt + 14.0 * (i as f64 + 1.0),
            ser.label
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Named report inputs for rendering.
pub struct LoadedReport {
    pub name: String,
    pub report: AnalysisReport,
}

/// rho_hat(r) vs r, one series per report carrying a contraction section.
pub fn render_rho_plot(reports: &[LoadedReport]) -> String {
    let series: Vec<Series> = reports
        .iter()
        .filter_map(|lr| {
            let c = lr.report.analyses.contraction.as_ref()?;
            Some(Series {
                label: lr.name.as_str(),
                points: c
                    .estimate
                    .rho
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| ((i + 1) as f64, v as f64))
                    .collect(),
            })
        })
        .collect();
    line_chart("contraction estimate", "r", "rho(r)", &series)
}

/// delta vs a scale parameter (radius when present, otherwise report index).
pub fn render_delta_plot(reports: &[LoadedReport]) -> String {
    let mut points = Vec::new();
    for (i, lr) in reports.iter().enumerate() {
        let Some(d) = lr.report.analyses.delta.as_ref() else { continue };
        let scale = lr
            .report
            .config
            .get("radius")
            .or_else(|| lr.report.config.get("separation"))
            .or_else(|| lr.report.config.get("extent"))
            .and_then(|s| s.parse::<f64>().ok())
            .unwrap_or((i + 1) as f64);
        points.push((scale, d.delta as f64));
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let series = [Series {
        label: "delta",
        points,
    }];
    line_chart("barycenter defect vs scale", "scale", "delta", &series)
}

/// Visual size vs basepoint distance, one series per report.
pub fn render_visual_plot(reports: &[LoadedReport]) -> String {
    let series: Vec<Series> = reports
        .iter()
        .filter_map(|lr| {
            let v = lr.report.analyses.visual_size.as_ref()?;
            let mut points: Vec<(f64, f64)> = v
                .rows
                .iter()
                .map(|r| (r.distance_to_horoball as f64, r.size as f64))
                .collect();
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Some(Series {
                label: lr.name.as_str(),
                points,
            })
        })
        .collect();
    line_chart(
        "visual size vs basepoint distance",
        "d(p, horoball)",
        "visual size",
        &series,
    )
}

/// Summary CSV: one row per report, plus a trend row with the delta ratio
/// when at least two reports carry delta estimates.
pub fn render_summary_csv(reports: &[LoadedReport]) -> String {
    let mut s = String::from(
        "report,family,radius,depth,extent,seed,delta,rho_max,verdict,visual_max,git_violations\n",
    );
    let mut deltas: Vec<(f64, f64)> = Vec::new();
    for (i, lr) in reports.iter().enumerate() {
        let cfg = &lr.report.config;
        let get = |k: &str| cfg.get(k).cloned().unwrap_or_default();
        let a = &lr.report.analyses;
        let delta = a.delta.as_ref().map(|d| d.delta.to_string()).unwrap_or_default();
        if let Some(d) = a.delta.as_ref() {
            let scale = get("radius")
                .parse::<f64>()
                .ok()
                .or_else(|| get("separation").parse::<f64>().ok())
                .unwrap_or((i + 1) as f64);
            deltas.push((scale, d.delta as f64));
        }
        let rho_max = a
            .contraction
            .as_ref()
            .and_then(|c| c.estimate.rho.last().copied())
            .map(|v| v.to_string())
            .unwrap_or_default();
        let verdict = a
            .contraction
            .as_ref()
            .map(|c| c.verdict.to_string())
            .unwrap_or_default();
        let visual_max = a
            .visual_size
            .as_ref()
            .map(|v| v.max_size.to_string())
            .unwrap_or_default();
        let git_violations = a
            .git
            .as_ref()
            .map(|g| g.report.violations.to_string())
            .unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            lr.name,
            get("family"),
            get("radius"),
            get("depth"),
            get("extent"),
            lr.report.seed,
            delta,
            rho_max,
            verdict,
            visual_max,
            git_violations
        ));
    }
    if deltas.len() >= 2 {
        deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (s0, d0) = deltas.first().copied().unwrap();
        let (s1, d1) = deltas.last().copied().unwrap();
        let ratio = if d0 > 0.0 { d1 / d0 } else { f64::NAN };
        s.push_str(&format!("trend,delta_scale_{s0}_to_{s1},,,,,,,,ratio,{ratio}\n"));
    }
    s
}

/// Raw-sample CSV companion to a report: one section per analysis that
/// carries tabular data, tagged by a leading `kind` column.
pub fn render_samples_csv(report: &AnalysisReport) -> String {
    let mut s = String::from("kind,key,value,extra1,extra2\n");
    if let Some(c) = &report.analyses.contraction {
        for (i, (&rho, &n)) in c.estimate.rho.iter().zip(&c.estimate.samples).enumerate() {
            s.push_str(&format!("contraction,{},{rho},{n},\n", i + 1));
        }
    }
    if let Some(v) = &report.analyses.visual_size {
        for row in &v.rows {
            s.push_str(&format!(
                "visual,{},{},{},{}\n",
                row.basepoint_tag,
                row.size,
                row.distance_to_horoball,
                row.members.len()
            ));
        }
    }
    if let Some(m) = &report.analyses.morse {
        for e in &m.entries {
            s.push_str(&format!(
                "morse,({};{}),{},{},{}\n",
                e.l, e.a, e.excursion, e.paths_tested, e.pairs_tested
            ));
        }
    }
    if let Some(g) = &report.analyses.git {
        s.push_str(&format!(
            "git,violations,{},{},{}\n",
            g.report.violations, g.report.eligible, g.report.out_of_range
        ));
    }
    if let Some(e) = &report.analyses.embedding {
        for (m, n) in &e.proper_table {
            s.push_str(&format!("embedding,{m},{n},,\n"));
        }
    }
    s
}

/// Tag-token census used for report graph stats.
pub fn graph_stats(g: &crate::graph::Graph) -> GraphStats {
    let mut stats = GraphStats {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        ..Default::default()
    };
    for v in g.vertices() {
        match g.tag(v) {
            crate::graph::VertexTag::GroupElement(_) => stats.group_vertices += 1,
            crate::graph::VertexTag::HoroballPoint { .. } => stats.horoball_vertices += 1,
            crate::graph::VertexTag::SpacePoint(_) => stats.space_vertices += 1,
        }
    }
    stats
}

/// Map-of-strings config echo helper.
pub fn config_echo(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_round_trips() {
        let report = AnalysisReport {
            config: config_echo(&[("family", "free".into()), ("radius", "4".into())]),
            seed: 42,
            graph: GraphStats::default(),
            analyses: Analyses::default(),
        };
        let text = report.to_json();
        let back = AnalysisReport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let lr = LoadedReport {
            name: "x".into(),
            report: AnalysisReport {
                config: Default::default(),
                seed: 0,
                graph: GraphStats::default(),
                analyses: Analyses {
                    contraction: Some(ContractionSection {
                        target: "t".into(),
                        target_size: 3,
                        estimate: SublinearEstimate::from_values(vec![0, 1, 1, 2]),
                        window: 1,
                        verdict: Verdict::Inconclusive,
                        kappa_10: None,
                    }),
                    ..Default::default()
                },
            },
        };
        let svg = render_rho_plot(&[lr]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline"));
    }
}
