use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::experiments::{
    ablation, daily_ablation, influencers, pi_series, threshold_sweep, AblationCategory,
    AblationResult, PiRow, SweepRow,
};
use super::stats::{compute_stats, stance_shares, DailyStats, StanceShares, SHARE_ORDER};
use super::{PipelineConfig, PipelineError, Session, Stage};
use crate::corpus::{prevalent_users, Annotations, FilterReport, PrevalentUsers};
use crate::graph::{export_graph, read_graphml_file, InteractionGraph};
use crate::polarization::PolarizationError;
use crate::stance::StanceMap;
use crate::structure::{decompose_communities, louvain, CommunityProfile, ShieldRanking};

impl Session {
    /// Daily ablations followed by the whole-period one, for each isolated
    /// node mode in use.
    pub fn ablation_rows(
        &self,
        daily: &[(NaiveDate, InteractionGraph)],
        full_graph: &InteractionGraph,
        stances: &StanceMap,
        influencer_set: &BTreeSet<String>,
    ) -> Vec<AblationResult> {
        let cfg = &self.config;
        let modes = if cfg.both_isolated_modes {
            vec![true, false]
        } else {
            vec![cfg.drop_isolated]
        };
        let mut rows = Vec::new();
        for drop in modes {
            rows.extend(daily_ablation(
                daily,
                stances,
                &self.annotations,
                cfg.k,
                drop,
                cfg.pi_options(true),
            ));
            rows.push(ablation(
                full_graph,
                stances,
                &self.annotations,
                influencer_set,
                drop,
                cfg.pi_options(true),
            ));
        }
        rows
    }

    pub fn sweep_rows(
        &self,
        full_graph: &InteractionGraph,
        influencer_set: &BTreeSet<String>,
    ) -> Result<Vec<SweepRow>, PipelineError> {
        threshold_sweep(
            full_graph,
            &self.follows,
            &self.annotations,
            &self.config.sweep_thresholds,
            influencer_set,
            self.config.drop_isolated,
            self.config.pi_options(true),
        )
        .map_err(|e| PipelineError::at(Stage::Sweep, e))
    }
}

/// Every computed result of a run.
#[derive(Debug, Clone)]
pub struct ReportData {
    pub full_graph: InteractionGraph,
    pub stances: StanceMap,
    pub stats: Vec<DailyStats>,
    pub shares: StanceShares,
    pub pi: Vec<PiRow>,
    pub pi_without_isolated: Option<Vec<PiRow>>,
    pub influencers: ShieldRanking,
    pub prevalent: PrevalentUsers,
    pub ablation: Vec<AblationResult>,
    pub sweep: Vec<SweepRow>,
    pub communities: Vec<CommunityProfile>,
    pub modularity: f64,
}

impl ReportData {
    pub fn compute(s: &Session) -> Result<Self, PipelineError> {
        let cfg = &s.config;
        let full_graph = s.full_graph();
        let daily = s.daily_graphs();
        let stances = s.stances_covering(&full_graph);
        log::info!(
            "{} posts, {} users, {} interactions, {} active days",
            s.tweets.len(),
            full_graph.node_count(),
            full_graph.edge_count(),
            daily.len()
        );

        let stats = compute_stats(&s.tweets, &s.stats_options());
        let shares = stance_shares(&s.tweets, &stances);

        let pi = pi_series(&daily, &stances, cfg.pi_options(true));
        let pi_without_isolated = cfg
            .both_isolated_modes
            .then(|| pi_series(&daily, &stances, cfg.pi_options(false)));

        let ranking = influencers(&full_graph, cfg.k);
        let prevalent = prevalent_users(&s.tweets, &ranking.selected, cfg.prevalent_top_k)
            .map_err(|e| PipelineError::at(Stage::Influencers, e))?;

        let infl_set: BTreeSet<String> = ranking.selected.iter().cloned().collect();
        let ablation = s.ablation_rows(&daily, &full_graph, &stances, &infl_set);
        let sweep = s.sweep_rows(&full_graph, &infl_set)?;

        let partition = louvain(&full_graph);
        let communities =
            decompose_communities(&partition, &stances, cfg.top_n_communities, cfg.lean);

        Ok(ReportData {
            full_graph,
            stances,
            stats,
            shares,
            pi,
            pi_without_isolated,
            influencers: ranking,
            prevalent,
            ablation,
            sweep,
            communities,
            modularity: partition.modularity,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<ReportFile>,
    pub warnings: Vec<String>,
}

fn report_err(e: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> PipelineError {
    PipelineError::at(Stage::Report, e)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, PipelineError> {
    csv::Writer::from_path(path).map_err(report_err)
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn pi_cell(r: &Result<f64, PolarizationError>) -> String {
    r.as_ref().map(|v| num(*v)).unwrap_or_default()
}

pub fn write_filter_report(r: &FilterReport, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record(["kind", "key", "count"])
        .map_err(report_err)?;
    w.write_record(["input", "", &r.input.to_string()])
        .map_err(report_err)?;
    w.write_record(["kept", "", &r.kept.to_string()])
        .map_err(report_err)?;
    for (reason, n) in &r.dropped {
        w.write_record(["dropped", &format!("{reason:?}"), &n.to_string()])
            .map_err(report_err)?;
    }
    for (rule, n) in &r.rule_hits {
        w.write_record(["rule_hit", rule, &n.to_string()])
            .map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

fn scope(d: &DailyStats) -> String {
    d.date
        .map_or_else(|| "total".to_string(), |d| d.to_string())
}

pub fn write_stats(stats: &[DailyStats], daily: &Path, top: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(daily)?;
    w.write_record([
        "date",
        "n_posts",
        "n_original",
        "n_retweets",
        "n_quotes",
        "n_replies",
        "n_users",
        "n_hashtags",
        "n_urls",
    ])
    .map_err(report_err)?;
    for d in stats {
        w.write_record([
            scope(d),
            d.n_posts.to_string(),
            d.n_original.to_string(),
            d.n_retweets.to_string(),
            d.n_quotes.to_string(),
            d.n_replies.to_string(),
            d.n_users.to_string(),
            d.n_hashtags.to_string(),
            d.n_urls.to_string(),
        ])
        .map_err(report_err)?;
    }
    w.flush().map_err(report_err)?;

    let mut w = csv_writer(top)?;
    w.write_record(["date", "list", "rank", "key", "count"])
        .map_err(report_err)?;
    for d in stats {
        for (name, list) in d.top.named() {
            for (rank, (key, count)) in list.iter().enumerate() {
                w.write_record([
                    scope(d),
                    name.to_string(),
                    (rank + 1).to_string(),
                    key.clone(),
                    count.to_string(),
                ])
                .map_err(report_err)?;
            }
        }
    }
    w.flush().map_err(report_err)
}

pub fn write_stance_shares(s: &StanceShares, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "population",
        "stance",
        "count",
        "percent",
        "percent_rounded",
    ])
    .map_err(report_err)?;
    for (pop, sh) in [("tweets", &s.tweets), ("users", &s.users)] {
        for (i, st) in SHARE_ORDER.iter().enumerate() {
            w.write_record([
                pop.to_string(),
                st.to_string(),
                sh.counts[i].to_string(),
                num(sh.percent[i]),
                format!("{:.1}", sh.rounded[i]),
            ])
            .map_err(report_err)?;
        }
    }
    w.flush().map_err(report_err)
}

pub fn write_stances(stances: &StanceMap, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "user_id",
        "stance",
        "n_left",
        "n_right",
        "n_center",
        "threshold",
    ])
    .map_err(report_err)?;
    for a in stances.iter() {
        w.write_record([
            a.user_id.clone(),
            a.stance.to_string(),
            a.n_left.to_string(),
            a.n_right.to_string(),
            a.n_center.to_string(),
            num(a.threshold),
        ])
        .map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_pi_series(rows: &[PiRow], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "date",
        "n",
        "m",
        "pi",
        "method",
        "iterations",
        "residual",
        "status",
    ])
    .map_err(report_err)?;
    for r in rows {
        let rec = match &r.result {
            Ok(p) => [
                r.date.to_string(),
                p.n.to_string(),
                p.m.to_string(),
                num(p.pi),
                p.solver.method.as_str().to_string(),
                p.solver.iterations.to_string(),
                format!("{:e}", p.solver.residual),
                "ok".to_string(),
            ],
            Err(e) => [
                r.date.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.to_string(),
            ],
        };
        w.write_record(rec).map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_influencers(r: &ShieldRanking, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record(["rank", "user_id", "marginal_score"])
        .map_err(report_err)?;
    for (i, (u, s)) in r.selected.iter().zip(&r.shield_scores).enumerate() {
        w.write_record([(i + 1).to_string(), u.clone(), num(*s)])
            .map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_prevalent(p: &PrevalentUsers, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record(["list", "rank", "user_id", "count"])
        .map_err(report_err)?;
    let lists = [
        ("most_posts", &p.most_posts),
        ("most_replies", &p.most_replies),
        ("most_quotes", &p.most_quotes),
        ("most_quoted", &p.most_quoted),
    ];
    for (name, list) in lists {
        for (i, (u, c)) in list.iter().enumerate() {
            w.write_record([
                name.to_string(),
                (i + 1).to_string(),
                u.clone(),
                c.to_string(),
            ])
            .map_err(report_err)?;
        }
    }
    for (i, u) in p.top_influencers.iter().enumerate() {
        w.write_record([
            "top_influencers".to_string(),
            (i + 1).to_string(),
            u.clone(),
            String::new(),
        ])
        .map_err(report_err)?;
    }
    for u in &p.union {
        w.write_record(["union", "", u, ""]).map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_communities(c: &[CommunityProfile], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "community_id",
        "size",
        "n_left",
        "n_right",
        "n_center",
        "n_neutral",
        "lean",
    ])
    .map_err(report_err)?;
    for p in c {
        w.write_record([
            p.community_id.to_string(),
            p.size.to_string(),
            p.n_left.to_string(),
            p.n_right.to_string(),
            p.n_center.to_string(),
            p.n_neutral.to_string(),
            num(p.lean),
        ])
        .map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_ablation(rows: &[AblationResult], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["date".to_string(), "drop_isolated".into(), "pi_full".into()];
    header.extend(
        AblationCategory::ALL
            .iter()
            .map(|c| format!("pi_without_{c}")),
    );
    w.write_record(&header).map_err(report_err)?;
    for r in rows {
        let mut rec = vec![
            r.date
                .map_or_else(|| "total".to_string(), |d| d.to_string()),
            r.drop_isolated.to_string(),
            pi_cell(&r.pi_full),
        ];
        rec.extend(
            AblationCategory::ALL
                .iter()
                .map(|c| pi_cell(&r.pi_without[c])),
        );
        w.write_record(&rec).map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn write_sweep(rows: &[SweepRow], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv_writer(path)?;
    let mut header = vec![
        "threshold".to_string(),
        "n_left_users".into(),
        "n_right_users".into(),
        "pi_full".into(),
    ];
    header.extend(
        AblationCategory::ALL
            .iter()
            .map(|c| format!("pi_without_{c}")),
    );
    w.write_record(&header).map_err(report_err)?;
    for r in rows {
        let mut rec = vec![
            num(r.threshold),
            r.n_left_users.to_string(),
            r.n_right_users.to_string(),
            pi_cell(&r.pi_full),
        ];
        rec.extend(
            AblationCategory::ALL
                .iter()
                .map(|c| pi_cell(&r.pi_without[c])),
        );
        w.write_record(&rec).map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

/// Writes the graph and reads it back to make sure the file is complete.
pub fn write_graph(
    g: &InteractionGraph,
    stances: &StanceMap,
    annotations: &Annotations,
    path: &Path,
) -> Result<(), PipelineError> {
    export_graph(g, stances, annotations, path).map_err(|e| PipelineError::at(Stage::Graph, e))?;
    let back = read_graphml_file(path).map_err(|e| PipelineError::at(Stage::Graph, e))?;
    if back.graph.nodes() != g.nodes() || back.graph.edge_count() != g.edge_count() {
        return Err(PipelineError::at(
            Stage::Graph,
            format!("{} does not read back as the written graph", path.display()),
        ));
    }
    Ok(())
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line chart of `(label, value)` points; `None` values leave gaps.
fn line_chart(title: &str, points: &[(String, Option<f64>)], y_max: f64) -> String {
    let (w, h, pad) = (720.0, 240.0, 40.0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" role=\"img\" aria-label=\"{}\">\n",
        esc(title)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#444\"/><line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"#444\"/>",
        y0 = h - pad,
        x1 = w - pad
    );
    let _ = writeln!(
        svg,
        "<text x=\"4\" y=\"{}\" font-size=\"11\">{y_max:.2}</text><text x=\"4\" y=\"{}\" font-size=\"11\">0</text>",
        pad + 4.0,
        h - pad
    );
    let n = points.len();
    if n > 0 && y_max > 0.0 {
        let x = |i: usize| {
            if n == 1 {
                w / 2.0
            } else {
                pad + (w - 2.0 * pad) * i as f64 / (n - 1) as f64
            }
        };
        let y = |v: f64| h - pad - (h - 2.0 * pad) * (v / y_max).clamp(0.0, 1.0);
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, svg: &mut String| {
            if !seg.is_empty() {
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"#b22\" stroke-width=\"1.5\" points=\"{}\"/>",
                    seg.join(" ")
                );
                seg.clear();
            }
        };
        for (i, (_, v)) in points.iter().enumerate() {
            match v {
                Some(v) => seg.push(format!("{:.1},{:.1}", x(i), y(*v))),
                None => flush(&mut seg, &mut svg),
            }
        }
        flush(&mut seg, &mut svg);
        let _ = writeln!(
            svg,
            "<text x=\"{pad}\" y=\"{}\" font-size=\"11\">{}</text><text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            h - pad / 2.0,
            esc(&points[0].0),
            w - pad,
            h - pad / 2.0,
            esc(&points[n - 1].0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut t = String::from("<table>\n<tr>");
    for h in header {
        let _ = write!(t, "<th>{}</th>", esc(h));
    }
    t.push_str("</tr>\n");
    for r in rows {
        t.push_str("<tr>");
        for c in r {
            let _ = write!(t, "<td>{}</td>", esc(c));
        }
        t.push_str("</tr>\n");
    }
    t.push_str("</table>\n");
    t
}

pub fn write_summary(s: &Session, data: &ReportData, path: &Path) -> Result<(), PipelineError> {
    let mut html = String::from(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Discussion report</title>\n<style>body{font-family:sans-serif;margin:2em;max-width:60em}table{border-collapse:collapse;margin-bottom:1.5em}td,th{border:1px solid #ccc;padding:2px 8px;text-align:right}</style>\n</head>\n<body>\n",
    );
    let (a, b) = s.period();
    let total = data.stats.last().cloned().unwrap_or_default();
    let _ = writeln!(html, "<h1>Discussion report {a} to {b}</h1>");
    html.push_str(&table(
        &[
            "posts read",
            "kept",
            "posts",
            "users",
            "hashtags",
            "urls",
            "active days",
            "graph nodes",
            "graph edges",
            "modularity",
        ],
        &[vec![
            s.filter_report.input.to_string(),
            s.filter_report.kept.to_string(),
            total.n_posts.to_string(),
            total.n_users.to_string(),
            total.n_hashtags.to_string(),
            total.n_urls.to_string(),
            data.pi.len().to_string(),
            data.full_graph.node_count().to_string(),
            data.full_graph.edge_count().to_string(),
            format!("{:.4}", data.modularity),
        ]],
    ));
    for w in &s.warnings {
        let _ = writeln!(html, "<p class=\"warning\">{}</p>", esc(w));
    }

    html.push_str("<h2>Posts per day</h2>\n");
    let posts: Vec<(String, Option<f64>)> = data
        .stats
        .iter()
        .filter_map(|d| d.date.map(|dt| (dt.to_string(), Some(d.n_posts as f64))))
        .collect();
    let max_posts = posts.iter().filter_map(|p| p.1).fold(0.0, f64::max);
    html.push_str(&line_chart("posts per day", &posts, max_posts));

    html.push_str("<h2>Polarization index per day</h2>\n");
    let pi: Vec<(String, Option<f64>)> = data
        .pi
        .iter()
        .map(|r| (r.date.to_string(), r.result.as_ref().ok().map(|p| p.pi)))
        .collect();
    html.push_str(&line_chart("polarization index per day", &pi, 1.0));

    html.push_str("<h2>Stance shares (%)</h2>\n");
    let rows = [
        ("tweets", &data.shares.tweets),
        ("users", &data.shares.users),
    ]
    .iter()
    .map(|(p, sh)| {
        let mut r = vec![p.to_string()];
        r.extend(sh.rounded.iter().map(|v| format!("{v:.1}")));
        r
    })
    .collect::<Vec<_>>();
    html.push_str(&table(&["", "Left", "Right", "Center", "Neutral"], &rows));

    html.push_str("<h2>Ablation over the whole period</h2>\n");
    let rows: Vec<Vec<String>> = data
        .ablation
        .iter()
        .filter(|r| r.date.is_none())
        .map(|r| {
            let mut row = vec![r.drop_isolated.to_string(), pi_cell(&r.pi_full)];
            row.extend(
                AblationCategory::ALL
                    .iter()
                    .map(|c| pi_cell(&r.pi_without[c])),
            );
            row
        })
        .collect();
    html.push_str(&table(
        &[
            "drop isolated",
            "full",
            "without political",
            "without media/journalists",
            "without influencers",
        ],
        &rows,
    ));

    html.push_str("<h2>Threshold sweep</h2>\n");
    let rows: Vec<Vec<String>> = data
        .sweep
        .iter()
        .map(|r| {
            let mut row = vec![
                num(r.threshold),
                r.n_left_users.to_string(),
                r.n_right_users.to_string(),
                pi_cell(&r.pi_full),
            ];
            row.extend(
                AblationCategory::ALL
                    .iter()
                    .map(|c| pi_cell(&r.pi_without[c])),
            );
            row
        })
        .collect();
    html.push_str(&table(
        &[
            "threshold",
            "left users",
            "right users",
            "full",
            "without political",
            "without media/journalists",
            "without influencers",
        ],
        &rows,
    ));

    html.push_str("<h2>Largest communities</h2>\n");
    let rows: Vec<Vec<String>> = data
        .communities
        .iter()
        .map(|c| {
            vec![
                c.community_id.to_string(),
                c.size.to_string(),
                c.n_left.to_string(),
                c.n_right.to_string(),
                c.n_center.to_string(),
                c.n_neutral.to_string(),
                format!("{:+.3}", c.lean),
            ]
        })
        .collect();
    html.push_str(&table(
        &["id", "size", "left", "right", "center", "neutral", "lean"],
        &rows,
    ));

    html.push_str("<h2>Top influencers</h2>\n");
    let rows: Vec<Vec<String>> = data
        .influencers
        .selected
        .iter()
        .zip(&data.influencers.shield_scores)
        .take(20)
        .enumerate()
        .map(|(i, (u, sc))| vec![(i + 1).to_string(), u.clone(), format!("{sc:.6}")])
        .collect();
    html.push_str(&table(&["rank", "user", "marginal score"], &rows));
    html.push_str("</body>\n</html>\n");
    fs::write(path, html).map_err(report_err)
}

fn sha256_file(path: &Path) -> Result<(String, u64), PipelineError> {
    let bytes = fs::read(path).map_err(report_err)?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

pub fn write_manifest(
    cfg: &PipelineConfig,
    files: &[ReportFile],
    path: &Path,
) -> Result<(), PipelineError> {
    let mut inputs = BTreeMap::new();
    let mut named: Vec<(&str, &Path)> = vec![
        ("tweets", cfg.tweets.as_path()),
        ("annotations", cfg.annotations.as_path()),
        ("follows", cfg.follows.as_path()),
    ];
    if let Some(p) = &cfg.rules {
        named.push(("rules", p));
    }
    if let Some(p) = &cfg.stopwords {
        named.push(("stopwords", p));
    }
    for (name, p) in named {
        let (digest, bytes) = sha256_file(&cfg.resolve(p))?;
        inputs.insert(
            name,
            json!({ "path": p.display().to_string(), "sha256": digest, "bytes": bytes }),
        );
    }
    let outputs: BTreeMap<&str, &str> = files
        .iter()
        .map(|f| (f.name.as_str(), f.sha256.as_str()))
        .collect();
    // the output location is not part of the run's identity
    let mut config = serde_json::to_value(cfg).map_err(report_err)?;
    if let Some(obj) = config.as_object_mut() {
        obj.remove("out_dir");
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "config": config,
        "outputs": outputs,
    });
    let mut out = BufWriter::new(File::create(path).map_err(report_err)?);
    serde_json::to_writer_pretty(&mut out, &manifest).map_err(report_err)?;
    out.write_all(b"\n").map_err(report_err)?;
    out.flush().map_err(report_err)
}

/// Writes the whole bundle into `out`.
pub fn write_report(
    s: &Session,
    data: &ReportData,
    out: &Path,
) -> Result<RunReport, PipelineError> {
    fs::create_dir_all(out).map_err(report_err)?;
    let p = |name: &str| out.join(name);
    let graph_name = format!("graph_{}.graphml", s.window_label());
    write_stats(&data.stats, &p("stats_daily.csv"), &p("top_lists.csv"))?;
    write_pi_series(&data.pi, &p("pi_series.csv"))?;
    let mut names = vec!["stats_daily.csv", "top_lists.csv", "pi_series.csv"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    if let Some(rows) = &data.pi_without_isolated {
        write_pi_series(rows, &p("pi_series_without_isolated.csv"))?;
        names.push("pi_series_without_isolated.csv".into());
    }
    write_ablation(&data.ablation, &p("ablation.csv"))?;
    write_sweep(&data.sweep, &p("sweep.csv"))?;
    write_stances(&data.stances, &p("stance.csv"))?;
    write_stance_shares(&data.shares, &p("stance_shares.csv"))?;
    write_influencers(&data.influencers, &p("influencers.csv"))?;
    write_prevalent(&data.prevalent, &p("prevalent_users.csv"))?;
    write_communities(&data.communities, &p("communities.csv"))?;
    write_filter_report(&s.filter_report, &p("filter_report.csv"))?;
    write_graph(
        &data.full_graph,
        &data.stances,
        &s.annotations,
        &p(&graph_name),
    )?;
    write_summary(s, data, &p("summary.html"))?;
    names.extend(
        [
            "ablation.csv",
            "sweep.csv",
            "stance.csv",
            "stance_shares.csv",
            "influencers.csv",
            "prevalent_users.csv",
            "communities.csv",
            "filter_report.csv",
            &graph_name,
            "summary.html",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    names.sort();
    let files = names
        .into_iter()
        .map(|name| {
            let (sha256, _) = sha256_file(&p(&name))?;
            Ok(ReportFile { name, sha256 })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    write_manifest(&s.config, &files, &p("run_manifest.json"))?;
    Ok(RunReport {
        out_dir: out.to_path_buf(),
        files,
        warnings: s.warnings.clone(),
    })
}

/// Loads, filters, analyses and writes the report bundle to the configured
/// output directory.
pub fn run_all(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let session = Session::load(cfg)?;
    let data = ReportData::compute(&session)?;
    write_report(&session, &data, &cfg.out_path())
}
