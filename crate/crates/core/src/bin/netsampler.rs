use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use netsampler::estimation::RewardMode;
use netsampler::grnn::load_weights_file;
use netsampler::harness::config::ExperimentConfig;
use netsampler::harness::{
    evaluate_policy, run_episode, server, transfer_sweep, write_run_outputs, write_sweep_csv, GraphSource, PolicyKind, ResampleRule,
    RunReport,
};
use netsampler::mac::MuDomain;
use netsampler::topology::GraphonSpec;
use netsampler::transfer::{median_by_m, run_lab, write_transfer_csv, CheckKind};

#[derive(Parser)]
#[command(name = "netsampler", version, about = "Sampling and transmission over multi-hop collision networks")]
struct Cli {
    /// TOML or JSON experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode.
    Run(Common),
    /// Evaluate a policy over independent episodes.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        episodes: Option<u64>,
        /// auto, fresh_graph, permute or fixed
        #[arg(long)]
        resample: Option<ResampleRule>,
    },
    /// Serve the environment protocol.
    Serve {
        #[arg(long, conflicts_with = "stdio")]
        port: Option<u16>,
        #[arg(long)]
        stdio: bool,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Evaluate fixed weights across graph sizes next to baselines.
    TransferSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<usize>>,
        #[arg(long)]
        episodes: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        baselines: Option<Vec<PolicyKind>>,
    },
    /// Empirical transferability checks on graphon samples.
    TransferLab {
        /// Edge probability of a constant graphon.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<usize>>,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// output, action or both
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Watts–Strogatz node count.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// Topology Zoo GraphML file.
    #[arg(long, conflicts_with_all = ["m", "k", "beta"])]
    graphml: Option<PathBuf>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Base seed; falls back to NETSAMPLER_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// silence, uniform, age or grnn
    #[arg(long)]
    policy: Option<PolicyKind>,
    /// Weight file for the grnn policy.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// realized or expected
    #[arg(long)]
    reward: Option<String>,
    /// full or neighbors
    #[arg(long)]
    mu_domain: Option<String>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

fn enum_flag<T: serde::de::DeserializeOwned>(name: &str, value: &str) -> netsampler::Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| netsampler::Error::Config(format!("invalid --{name} value {value:?}")))
}

impl Common {
    fn apply(&self, cfg: &mut ExperimentConfig) -> netsampler::Result<()> {
        if let Some(path) = &self.graphml {
            cfg.graph = GraphSource::Graphml { path: path.clone() };
        } else if self.m.is_some() || self.k.is_some() || self.beta.is_some() {
            let (m0, k0, b0) = match &cfg.graph {
                GraphSource::WattsStrogatz { m, k, beta } => (*m, *k, *beta),
                _ => (10, 4, 0.3),
            };
            cfg.graph = GraphSource::WattsStrogatz {
                m: self.m.unwrap_or(m0),
                k: self.k.unwrap_or(k0),
                beta: self.beta.unwrap_or(b0),
            };
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
            cfg.seeds = None;
        }
        if let Some(v) = self.policy {
            cfg.policy.kind = v;
        }
        if let Some(v) = &self.weights {
            cfg.policy.weights = Some(v.clone());
        }
        if let Some(v) = &self.reward {
            cfg.reward = enum_flag::<RewardMode>("reward", v)?;
        }
        if let Some(v) = &self.mu_domain {
            cfg.mu_domain = enum_flag::<MuDomain>("mu-domain", v)?;
        }
        if let Some(v) = &self.out_csv {
            cfg.out_csv = Some(v.clone());
        }
        if let Some(v) = &self.out_json {
            cfg.out_json = Some(v.clone());
        }
        Ok(())
    }
}

fn print_json(v: &serde_json::Value) {
    use std::io::Write;
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn run(cli: Cli) -> netsampler::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    match cli.command {
        Command::Run(common) => {
            common.apply(&mut cfg)?;
            let episode = cfg.episode()?;
            let row = run_episode(&episode)?;
            let report = RunReport::from_rows(episode.policy.kind.name(), vec![row]);
            write_run_outputs(&cfg, &report, cfg.out_csv.as_deref(), cfg.out_json.as_deref())?;
            print_json(&netsampler::harness::summary_json(&cfg, &report)?);
        }
        Command::Eval {
            common,
            episodes,
            resample,
        } => {
            common.apply(&mut cfg)?;
            if let Some(e) = episodes {
                cfg.episodes = e;
            }
            if let Some(r) = resample {
                cfg.resample = r;
            }
            let report = evaluate_policy(&cfg.episode()?, cfg.episodes, cfg.resample)?;
            write_run_outputs(&cfg, &report, cfg.out_csv.as_deref(), cfg.out_json.as_deref())?;
            print_json(&netsampler::harness::summary_json(&cfg, &report)?);
        }
        Command::Serve { port, stdio, host } => {
            if stdio {
                server::serve_stdio()?;
            } else {
                let port = port.ok_or_else(|| netsampler::Error::Config("serve needs --port or --stdio".into()))?;
                let listener = server::bind((host.as_str(), port))?;
                eprintln!("listening on {}", listener.local_addr()?);
                server::serve_tcp(listener)?;
            }
        }
        Command::TransferSweep {
            common,
            m_values,
            episodes,
            baselines,
        } => {
            common.apply(&mut cfg)?;
            if let Some(v) = m_values {
                cfg.sweep.m_values = v;
            }
            if let Some(v) = episodes {
                cfg.episodes = v;
            }
            if let Some(v) = baselines {
                cfg.sweep.baselines = v;
            }
            let weights = match &cfg.policy.weights {
                Some(p) => Some(Arc::new(load_weights_file(p)?)),
                None => None,
            };
            let rows = transfer_sweep(&cfg.sweep()?, weights)?;
            if let Some(p) = &cfg.out_csv {
                let mut buf = Vec::new();
                write_sweep_csv(&rows, &mut buf)?;
                std::fs::write(p, buf)?;
            }
            let table: Vec<_> = rows
                .iter()
                .map(|r| serde_json::json!({"m": r.m, "policy": r.policy, "asee": r.asee, "gap_vs_uniform": r.gap_vs_uniform}))
                .collect();
            let summary = serde_json::json!({"config": cfg, "rows": table});
            if let Some(p) = &cfg.out_json {
                std::fs::write(p, serde_json::to_vec_pretty(&summary)?)?;
            }
            print_json(&summary);
        }
        Command::TransferLab {
            p,
            m_values,
            seeds,
            depths,
            resolution,
            epsilon,
            check,
            out_csv,
            out_json,
        } => {
            let lab = &mut cfg.lab;
            if let Some(p) = p {
                lab.graphon = GraphonSpec::Constant { p };
            }
            if let Some(v) = m_values {
                lab.m_values = v;
            }
            if let Some(v) = seeds {
                lab.seeds = v;
            }
            if let Some(v) = depths {
                lab.depths = v;
            }
            if let Some(v) = resolution {
                lab.resolution = v;
            }
            if let Some(v) = epsilon {
                lab.epsilon = v;
            }
            match check.as_deref() {
                None | Some("both") => {}
                Some("output") => lab.action_check = false,
                Some("action") => lab.output_check = false,
                Some(other) => return Err(netsampler::Error::Config(format!("invalid --check value {other:?}"))),
            }
            if out_csv.is_some() {
                cfg.out_csv = out_csv;
            }
            if out_json.is_some() {
                cfg.out_json = out_json;
            }
            let records = run_lab(&cfg.lab)?;
            let mut buf = Vec::new();
            write_transfer_csv(&records, &mut buf)?;
            match &cfg.out_csv {
                Some(p) => std::fs::write(p, &buf)?,
                None => {
                    use std::io::Write;
                    let _ = std::io::stdout().lock().write_all(&buf);
                }
            }
            let mut groups = Vec::new();
            for kind in [CheckKind::Output, CheckKind::Action] {
                for &t in &cfg.lab.depths {
                    let sel: Vec<_> = records.iter().filter(|r| r.check == kind && r.t == t).cloned().collect();
                    if sel.is_empty() {
                        continue;
                    }
                    groups.push(serde_json::json!({
                        "check": kind.name(),
                        "t": t,
                        "runs": sel.len(),
                        "violations": sel.iter().filter(|r| r.violation).count(),
                        "median_lhs": median_by_m(&sel, |r| r.lhs),
                        "median_rhs": median_by_m(&sel, |r| r.rhs),
                    }));
                }
            }
            let summary = serde_json::json!({"lab": cfg.lab, "groups": groups});
            if let Some(p) = &cfg.out_json {
                std::fs::write(p, serde_json::to_vec_pretty(&summary)?)?;
            }
            if cfg.out_csv.is_some() {
                print_json(&summary);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
