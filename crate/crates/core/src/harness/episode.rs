use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{asee, RewardMode};
use crate::grnn::{load_weights_file, GrnnPolicy, GrnnWeights, RecurrentState};
use crate::mac::{Decision, MuDomain, Simulator};
use crate::policy::{observe, AgeBasedPolicy, AgeWeighting, Policy, SilencePolicy, UniformPolicy};
use crate::rng::{mix, node_rng, seeded, stream};
use crate::topology::{
    generate_sbm, generate_watts_strogatz, load_topology_zoo, random_permutation, GraphonSpec, Provenance,
    SampledGraph, Topology,
};

pub const DEFAULT_STEPS: u64 = 1024;

/// Where an episode's topology comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    WattsStrogatz {
        m: usize,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Sbm {
        #[serde(default = "default_blocks")]
        block_sizes: Vec<usize>,
        #[serde(default = "default_p_in")]
        p_in: f64,
        #[serde(default = "default_p_out")]
        p_out: f64,
    },
    Graphml { path: PathBuf },
    /// Connected sample of `m` nodes from a graphon.
    Graphon { graphon: GraphonSpec, m: usize },
    Fixed { m: usize, edges: Vec<[usize; 2]> },
}

fn default_k() -> usize {
    4
}
fn default_beta() -> f64 {
    0.3
}
fn default_blocks() -> Vec<usize> {
    vec![5, 5]
}
fn default_p_in() -> f64 {
    0.8
}
fn default_p_out() -> f64 {
    0.2
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::WattsStrogatz {
            m: 10,
            k: default_k(),
            beta: default_beta(),
        }
    }
}

impl GraphSource {
    pub fn build(&self, seed: u64) -> Result<Topology> {
        match self {
            GraphSource::WattsStrogatz { m, k, beta } => generate_watts_strogatz(*m, *k, *beta, seed),
            GraphSource::Sbm { block_sizes, p_in, p_out } => generate_sbm(block_sizes, *p_in, *p_out, seed),
            GraphSource::Graphml { path } => load_topology_zoo(path),
            GraphSource::Graphon { graphon, m } => Ok(SampledGraph::sample_connected(graphon, *m, seed)?.topology),
            GraphSource::Fixed { m, edges } => Topology::from_edges(
                *m,
                edges.iter().map(|e| (e[0], e[1])),
                Provenance::new("fixed").with_param("m", m),
            ),
        }
    }

    /// Random generators draw a new graph per seed; file and fixed graphs
    /// are always the same graph.
    pub fn is_synthetic(&self) -> bool {
        !matches!(self, GraphSource::Graphml { .. } | GraphSource::Fixed { .. })
    }

    /// The same family at a different node count. Block models split `m`
    /// as evenly as possible over the existing number of blocks.
    pub fn with_m(&self, m: usize) -> Result<Self> {
        Ok(match self {
            GraphSource::WattsStrogatz { k, beta, .. } => GraphSource::WattsStrogatz { m, k: *k, beta: *beta },
            GraphSource::Sbm { block_sizes, p_in, p_out } => {
                let b = block_sizes.len().max(1);
                let sizes = (0..b).map(|i| m / b + usize::from(i < m % b)).collect();
                GraphSource::Sbm {
                    block_sizes: sizes,
                    p_in: *p_in,
                    p_out: *p_out,
                }
            }
            GraphSource::Graphon { graphon, .. } => GraphSource::Graphon {
                graphon: graphon.clone(),
                m,
            },
            GraphSource::Graphml { .. } | GraphSource::Fixed { .. } => {
                return Err(Error::Config("file and fixed topologies have a fixed node count".into()))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Seeds {
    pub graph: u64,
    pub noise: u64,
    pub policy: u64,
}

impl Seeds {
    pub fn all(seed: u64) -> Self {
        Self {
            graph: seed,
            noise: seed,
            policy: seed,
        }
    }

    /// Seeds of the `episode`-th evaluation episode.
    pub fn for_episode(self, episode: u64) -> Self {
        Self {
            graph: mix(self.graph, episode),
            noise: mix(self.noise, episode),
            policy: mix(self.policy, episode),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Silence,
    #[default]
    Uniform,
    Age,
    Grnn,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Silence => "silence",
            PolicyKind::Uniform => "uniform",
            PolicyKind::Age => "age",
            PolicyKind::Grnn => "grnn",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "silence" => Ok(PolicyKind::Silence),
            "uniform" => Ok(PolicyKind::Uniform),
            "age" | "age_based" | "age-based" => Ok(PolicyKind::Age),
            "grnn" => Ok(PolicyKind::Grnn),
            other => Err(Error::Config(format!(
                "unknown policy {other:?} (expected silence, uniform, age or grnn)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Weight file for `grnn`.
    pub weights: Option<PathBuf>,
    pub include_silence: bool,
    pub age_weighting: AgeWeighting,
    pub recurrent: RecurrentState,
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self {
            kind: PolicyKind::Uniform,
            weights: None,
            include_silence: true,
            age_weighting: AgeWeighting::Inverse,
            recurrent: RecurrentState::Persistent,
        }
    }
}

impl PolicySpec {
    pub fn of(kind: PolicyKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn grnn(weights: impl Into<PathBuf>) -> Self {
        Self {
            kind: PolicyKind::Grnn,
            weights: Some(weights.into()),
            ..Self::default()
        }
    }
}

/// Builds fresh policy instances for each episode, loading GRNN weights once.
#[derive(Debug, Clone)]
pub struct PolicyFactory {
    spec: PolicySpec,
    weights: Option<Arc<GrnnWeights>>,
}

impl PolicyFactory {
    pub fn new(spec: &PolicySpec) -> Result<Self> {
        let weights = match spec.kind {
            PolicyKind::Grnn => {
                let path = spec
                    .weights
                    .as_ref()
                    .ok_or_else(|| Error::Config("policy grnn needs a weight file".into()))?;
                Some(Arc::new(load_weights_file(path)?))
            }
            _ => None,
        };
        Ok(Self {
            spec: spec.clone(),
            weights,
        })
    }

    pub fn from_weights(weights: Arc<GrnnWeights>) -> Self {
        Self {
            spec: PolicySpec::of(PolicyKind::Grnn),
            weights: Some(weights),
        }
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    pub fn name(&self) -> &'static str {
        self.spec.kind.name()
    }

    pub fn build(&self) -> Box<dyn Policy> {
        match self.spec.kind {
            PolicyKind::Silence => Box::new(SilencePolicy),
            PolicyKind::Uniform => Box::new(UniformPolicy {
                include_silence: self.spec.include_silence,
            }),
            PolicyKind::Age => Box::new(AgeBasedPolicy {
                weighting: self.spec.age_weighting,
            }),
            PolicyKind::Grnn => Box::new(
                GrnnPolicy::new(self.weights.clone().expect("loaded in new"))
                    .with_recurrent_state(self.spec.recurrent),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    pub graph: GraphSource,
    pub steps: u64,
    pub sigma: f64,
    pub seeds: Seeds,
    pub policy: PolicySpec,
    pub reward: RewardMode,
    pub mu_domain: MuDomain,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::default(),
            steps: DEFAULT_STEPS,
            sigma: 1.0,
            seeds: Seeds::default(),
            policy: PolicySpec::default(),
            reward: RewardMode::Realized,
            mu_domain: MuDomain::Full,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be >= 1".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Config("sigma must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Metrics of one episode. Ages and rates are averaged over slots;
/// `collision_rate` is the fraction of transmissions that collided and
/// `delivery_rate` the number of successful transmissions per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: u64,
    pub policy: String,
    pub m: usize,
    pub edges: usize,
    pub seeds: Seeds,
    pub steps: u64,
    pub asee: f64,
    pub mean_age: f64,
    pub max_age: u64,
    pub collision_rate: f64,
    pub delivery_rate: f64,
}

/// Runs one episode of `cfg` on a given topology.
pub fn run_episode_on(
    cfg: &EpisodeConfig,
    topology: Topology,
    factory: &PolicyFactory,
    episode: u64,
) -> Result<EpisodeRow> {
    cfg.validate()?;
    let m = topology.m();
    let edges = topology.edge_count();
    let mut policy = factory.build();
    policy.reset(&topology);
    let mut sim = Simulator::new(topology, cfg.sigma, cfg.mu_domain, cfg.reward);
    let mut noise = seeded(cfg.seeds.noise, stream::NOISE);
    let mut rngs: Vec<_> = (0..m).map(|i| node_rng(cfg.seeds.policy, i)).collect();
    let pairs = (m * m.saturating_sub(1)).max(1) as f64;

    let mut rewards = Vec::with_capacity(cfg.steps as usize);
    let (mut attempts, mut collisions, mut successes) = (0usize, 0usize, 0usize);
    let (mut age_total, mut max_age) = (0.0, 0u64);
    let mut decisions = vec![Decision::Silent; m];
    for _ in 0..cfg.steps {
        for (i, d) in decisions.iter_mut().enumerate() {
            *d = policy.decide(&observe(&sim, i), &mut rngs[i]);
        }
        let step = sim.step(&decisions, &mut noise)?;
        rewards.push(step.reward);
        attempts += step.outcome.attempted.len();
        collisions += step.outcome.collisions();
        successes += step.outcome.delivered.len();
        age_total += sim.state().age_sum() as f64 / pairs;
        max_age = max_age.max(sim.state().max_age());
    }
    let slots = cfg.steps as f64;
    Ok(EpisodeRow {
        episode,
        policy: policy.name(),
        m,
        edges,
        seeds: cfg.seeds,
        steps: cfg.steps,
        asee: asee(&rewards)?,
        mean_age: age_total / slots,
        max_age,
        collision_rate: if attempts == 0 { 0.0 } else { collisions as f64 / attempts as f64 },
        delivery_rate: successes as f64 / slots,
    })
}

/// Builds the topology from `cfg.graph` with the graph seed and runs one episode.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeRow> {
    let topology = cfg.graph.build(cfg.seeds.graph)?;
    run_episode_on(cfg, topology, &PolicyFactory::new(&cfg.policy)?, 0)
}

/// How evaluation episodes vary the topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleRule {
    /// Fresh graphs for random families, fresh relabelings otherwise.
    #[default]
    Auto,
    FreshGraph,
    Permute,
    Fixed,
}

impl FromStr for ResampleRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ResampleRule::Auto),
            "fresh_graph" | "fresh-graph" | "fresh" => Ok(ResampleRule::FreshGraph),
            "permute" => Ok(ResampleRule::Permute),
            "fixed" => Ok(ResampleRule::Fixed),
            other => Err(Error::Config(format!("unknown resample rule {other:?}"))),
        }
    }
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self { mean: f64::NAN, se: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Self { mean, se: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            se: (var / n).sqrt(),
        }
    }

    /// `[mean − k·se, mean + k·se]`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (self.mean - k * self.se, self.mean + k * self.se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub episodes: usize,
    pub asee: Stat,
    pub mean_age: Stat,
    pub max_age: Stat,
    pub collision_rate: Stat,
    pub delivery_rate: Stat,
}

impl Aggregate {
    pub fn from_rows(rows: &[EpisodeRow]) -> Self {
        let col = |f: fn(&EpisodeRow) -> f64| Stat::of(&rows.iter().map(f).collect::<Vec<_>>());
        Self {
            episodes: rows.len(),
            asee: col(|r| r.asee),
            mean_age: col(|r| r.mean_age),
            max_age: col(|r| r.max_age as f64),
            collision_rate: col(|r| r.collision_rate),
            delivery_rate: col(|r| r.delivery_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub policy: String,
    pub rows: Vec<EpisodeRow>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn from_rows(policy: impl Into<String>, rows: Vec<EpisodeRow>) -> Self {
        let aggregate = Aggregate::from_rows(&rows);
        Self {
            policy: policy.into(),
            rows,
            aggregate,
        }
    }

    /// True when the stored aggregate equals a recomputation from the rows.
    pub fn is_consistent(&self) -> bool {
        Aggregate::from_rows(&self.rows) == self.aggregate
    }
}

/// Runs `episodes` independent episodes with the resample rule, in parallel.
pub fn evaluate_policy(template: &EpisodeConfig, episodes: u64, rule: ResampleRule) -> Result<RunReport> {
    let factory = PolicyFactory::new(&template.policy)?;
    evaluate_with(template, &factory, episodes, rule)
}

/// As [`evaluate_policy`] with a prebuilt factory.
pub fn evaluate_with(
    template: &EpisodeConfig,
    factory: &PolicyFactory,
    episodes: u64,
    rule: ResampleRule,
) -> Result<RunReport> {
    if episodes == 0 {
        return Err(Error::Config("episodes must be >= 1".into()));
    }
    template.validate()?;
    let rule = match rule {
        ResampleRule::Auto if template.graph.is_synthetic() => ResampleRule::FreshGraph,
        ResampleRule::Auto => ResampleRule::Permute,
        r => r,
    };
    let base = match rule {
        ResampleRule::FreshGraph => None,
        _ => Some(template.graph.build(template.seeds.graph)?),
    };
    let indices: Vec<u64> = (0..episodes).collect();
    let rows = crate::parallel::map_ordered(&indices, |&e| {
        let seeds = template.seeds.for_episode(e);
        let cfg = EpisodeConfig {
            seeds,
            ..template.clone()
        };
        let topology = match (&base, rule) {
            (None, _) => template.graph.build(seeds.graph)?,
            (Some(t), ResampleRule::Permute) => {
                let p = random_permutation(t.m(), &mut seeded(seeds.graph, stream::PERMUTATION));
                t.permute(&p)?
            }
            (Some(t), _) => t.clone(),
        };
        run_episode_on(&cfg, topology, factory, e)
    })?;
    Ok(RunReport::from_rows(factory.name(), rows))
}
