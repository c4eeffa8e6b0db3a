use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use discourse_core::corpus::{prevalent_users, write_tweets};
use discourse_core::graph::write_edge_list;
use discourse_core::pipeline::{
    self, compute_stats, influencers, pi_series, stance_shares, PipelineConfig, ReportData, Session,
};
use discourse_core::structure::{decompose_communities, louvain};

#[derive(Parser)]
#[command(
    name = "discourse",
    version,
    about = "Monitor a political discussion in a post archive"
)]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// First day to analyse (YYYY-MM-DD).
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Last day to analyse, inclusive.
    #[arg(long)]
    to: Option<NaiveDate>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stance threshold in [0, 1].
    #[arg(long)]
    threshold: Option<f64>,
    /// Drop nodes left isolated by an ablation.
    #[arg(long)]
    drop_isolated: Option<bool>,
    /// Number of influencers.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the filter rules and write the kept posts.
    Filter(Common),
    /// Write the interaction graph of the period.
    Graph(Common),
    /// Infer user stances.
    Stance(Common),
    /// Daily and total activity statistics.
    Stats(Common),
    /// Daily polarization index.
    Polarize(Common),
    /// NetShield influencers and prevalent users.
    Influencers(Common),
    /// Louvain communities and their political profile.
    Communities(Common),
    /// Polarization after removing node groups.
    Ablate(Common),
    /// Stance threshold sweep.
    Sweep(Common),
    /// Everything, written as a report bundle.
    RunAll(Common),
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if self.from.is_some() {
            cfg.from = self.from;
        }
        if self.to.is_some() {
            cfg.to = self.to;
        }
        if let Some(out) = &self.out {
            // relative to the working directory, not the config file
            cfg.out_dir = std::path::absolute(out)?;
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(d) = self.drop_isolated {
            cfg.drop_isolated = d;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn prepare(common: &Common) -> Result<(Session, PathBuf)> {
    let cfg = common.config()?;
    let out = cfg.out_path();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok((Session::load(&cfg)?, out))
}

fn done(files: &[&Path]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match &cli.command {
        Command::Filter(c) => {
            let (s, out) = prepare(c)?;
            let kept = out.join("filtered.jsonl");
            let mut w = BufWriter::new(File::create(&kept)?);
            write_tweets(&mut w, &s.tweets)?;
            let report = out.join("filter_report.csv");
            pipeline::write_filter_report(&s.filter_report, &report)?;
            eprintln!(
                "kept {} of {} posts ({} malformed lines)",
                s.filter_report.kept, s.filter_report.input, s.load_report.malformed
            );
            done(&[&kept, &report]);
        }
        Command::Graph(c) => {
            let (s, out) = prepare(c)?;
            let g = s.full_graph();
            let stances = s.stances_covering(&g);
            let gml = out.join(format!("graph_{}.graphml", s.window_label()));
            pipeline::write_graph(&g, &stances, &s.annotations, &gml)?;
            let edges = out.join(format!("edges_{}.txt", s.window_label()));
            write_edge_list(&g, BufWriter::new(File::create(&edges)?))?;
            eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
            done(&[&gml, &edges]);
        }
        Command::Stance(c) => {
            let (s, out) = prepare(c)?;
            let stances = s.stances_covering(&s.full_graph());
            let a = out.join("stance.csv");
            let b = out.join("stance_shares.csv");
            pipeline::write_stances(&stances, &a)?;
            pipeline::write_stance_shares(&stance_shares(&s.tweets, &stances), &b)?;
            done(&[&a, &b]);
        }
        Command::Stats(c) => {
            let (s, out) = prepare(c)?;
            let stats = compute_stats(&s.tweets, &s.stats_options());
            let a = out.join("stats_daily.csv");
            let b = out.join("top_lists.csv");
            pipeline::write_stats(&stats, &a, &b)?;
            done(&[&a, &b]);
        }
        Command::Polarize(c) => {
            let (s, out) = prepare(c)?;
            let daily = s.daily_graphs();
            let stances = s.stances_covering(&s.full_graph());
            let a = out.join("pi_series.csv");
            pipeline::write_pi_series(&pi_series(&daily, &stances, s.config.pi_options(true)), &a)?;
            if s.config.both_isolated_modes {
                let b = out.join("pi_series_without_isolated.csv");
                let rows = pi_series(&daily, &stances, s.config.pi_options(false));
                pipeline::write_pi_series(&rows, &b)?;
                done(&[&a, &b]);
            } else {
                done(&[&a]);
            }
        }
        Command::Influencers(c) => {
            let (s, out) = prepare(c)?;
            let ranking = influencers(&s.full_graph(), s.config.k);
            let prevalent =
                prevalent_users(&s.tweets, &ranking.selected, s.config.prevalent_top_k)?;
            let a = out.join("influencers.csv");
            let b = out.join("prevalent_users.csv");
            pipeline::write_influencers(&ranking, &a)?;
            pipeline::write_prevalent(&prevalent, &b)?;
            done(&[&a, &b]);
        }
        Command::Communities(c) => {
            let (s, out) = prepare(c)?;
            let g = s.full_graph();
            let partition = louvain(&g);
            let stances = s.stances_covering(&g);
            let profiles = decompose_communities(
                &partition,
                &stances,
                s.config.top_n_communities,
                s.config.lean,
            );
            let a = out.join("communities.csv");
            pipeline::write_communities(&profiles, &a)?;
            eprintln!(
                "{} communities, modularity {:.4}",
                partition.community_count(),
                partition.modularity
            );
            done(&[&a]);
        }
        Command::Ablate(c) => {
            let (s, out) = prepare(c)?;
            let g = s.full_graph();
            let stances = s.stances_covering(&g);
            let infl: BTreeSet<String> = influencers(&g, s.config.k).selected.into_iter().collect();
            let rows = s.ablation_rows(&s.daily_graphs(), &g, &stances, &infl);
            let a = out.join("ablation.csv");
            pipeline::write_ablation(&rows, &a)?;
            done(&[&a]);
        }
        Command::Sweep(c) => {
            let (s, out) = prepare(c)?;
            let g = s.full_graph();
            let infl: BTreeSet<String> = influencers(&g, s.config.k).selected.into_iter().collect();
            let a = out.join("sweep.csv");
            pipeline::write_sweep(&s.sweep_rows(&g, &infl)?, &a)?;
            done(&[&a]);
        }
        Command::RunAll(c) => {
            let (s, out) = prepare(c)?;
            let data = ReportData::compute(&s)?;
            let report = pipeline::write_report(&s, &data, &out)?;
            for f in &report.files {
                println!("{}", out.join(&f.name).display());
            }
            println!("{}", out.join("run_manifest.json").display());
        }
    }
    Ok(())
}
