//! Oracles shared by the integration and acceptance tests. Each is written
//! from the model's definitions without calling the code it checks.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DMatrix;
use netsampler::estimation::RewardMode;
use netsampler::grnn::{
    action_scores, load_weights_file, node_features, Activation, GraphFilter, Grnn, GrnnDims, GrnnPolicy,
    RecurrentState, ShiftNormalization, ShiftOperator,
};
use netsampler::mac::{Decision, MuDomain, Simulator};
use netsampler::policy::{observe, LocalObservation, Policy, UniformPolicy};
use netsampler::rng::{node_rng, seeded, stream, SimRng};
use netsampler::topology::{
    generate_sbm, generate_watts_strogatz, random_permutation, sample_from_graphon, GraphonSpec, Topology,
};
use rand::Rng;

/// Every labeled connected graph on three nodes: the triangle and the
/// three paths (one per center).
pub fn connected_three_node_graphs() -> Vec<Topology> {
    let mk = |edges: &[(usize, usize)]| Topology::from_edges(3, edges.iter().copied(), Default::default()).unwrap();
    vec![
        mk(&[(0, 1), (1, 2), (0, 2)]),
        mk(&[(1, 0), (0, 2)]),
        mk(&[(0, 1), (1, 2)]),
        mk(&[(0, 2), (2, 1)]),
    ]
}

/// Cache snapshot: `entries[holder][origin] = Some((value, stamp))`.
pub type Caches = Vec<Vec<Option<(f64, u64)>>>;

pub fn snapshot(sim: &Simulator) -> Caches {
    let m = sim.topology().m();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| sim.state().entry(i, j).map(|e| (e.value, e.stamp)))
                .collect()
        })
        .collect()
}

/// What the channel should do with a joint profile of `(μ, ν)` pairs,
/// from the rule as stated: a transmission to `ν` fails when some other
/// node also transmits to `ν`, or when `ν` transmits back to the sender.
pub struct BruteOutcome {
    /// 0 silent, 1 success, 2 collision.
    pub feedback: Vec<u8>,
    /// `(sender, receiver, origin, value, stamp)`.
    pub delivered: Vec<(usize, usize, usize, f64, u64)>,
    /// Ages at the next slot.
    pub ages: Vec<Vec<u64>>,
}

pub fn brute_force(pairs: &[(usize, usize)], caches: &Caches, own: &[f64], slot: u64) -> BruteOutcome {
    let m = pairs.len();
    let transmitting = |i: usize| pairs[i].1 != i;
    let mut feedback = vec![0u8; m];
    let mut delivered = Vec::new();
    for i in 0..m {
        if !transmitting(i) {
            continue;
        }
        let (mu, nu) = pairs[i];
        let crowded = (0..m).any(|j| j != i && transmitting(j) && pairs[j].1 == nu);
        let head_on = transmitting(nu) && pairs[nu].1 == i;
        if crowded || head_on {
            feedback[i] = 2;
            continue;
        }
        feedback[i] = 1;
        let (value, stamp) = if mu == i { (own[i], slot) } else { caches[i][mu].expect("profile uses cached origins") };
        delivered.push((i, nu, mu, value, stamp));
    }
    let mut after = caches.clone();
    for &(_, r, o, v, s) in &delivered {
        let fresher = match after[r][o] {
            Some((_, old)) => s > old,
            None => true,
        };
        if fresher {
            after[r][o] = Some((v, s));
        }
    }
    let next = slot + 1;
    let ages = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match (i == j, after[i][j]) {
                    (true, _) => 0,
                    (false, Some((_, s))) => next - s,
                    (false, None) => next,
                })
                .collect()
        })
        .collect();
    BruteOutcome { feedback, delivered, ages }
}

/// Every `(μ, ν)` node `i` may choose, silence first.
pub fn node_alphabet(t: &Topology, caches: &Caches, i: usize, domain: MuDomain) -> Vec<(usize, usize)> {
    let mut out = vec![(i, i)];
    for &nu in t.neighbors(i) {
        for mu in 0..t.m() {
            let ok = if mu == i {
                domain == MuDomain::Full
            } else {
                caches[i][mu].is_some() && (domain == MuDomain::Full || t.has_edge(i, mu))
            };
            if ok {
                out.push((mu, nu));
            }
        }
    }
    out
}

/// Cartesian product of per-node alphabets.
pub fn profiles(alphabets: &[Vec<(usize, usize)>]) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for a in alphabets {
        out = out
            .into_iter()
            .flat_map(|p| {
                a.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Simulator advanced `slots` slots under the uniform policy, so that
/// caches hold packets of mixed age.
pub fn primed(t: &Topology, slots: u64, seed: u64, domain: MuDomain) -> Simulator {
    let mut sim = Simulator::new(t.clone(), 1.0, domain, RewardMode::Realized);
    let mut noise = seeded(seed, stream::NOISE);
    let mut policy = UniformPolicy::default();
    let mut rngs: Vec<_> = (0..t.m()).map(|i| node_rng(seed, i)).collect();
    for _ in 0..slots {
        let d: Vec<Decision> = (0..t.m()).map(|i| policy.decide(&observe(&sim, i), &mut rngs[i])).collect();
        sim.step(&d, &mut noise).unwrap();
    }
    sim
}

type Dense = Vec<Vec<f64>>;

fn to_dense(x: &DMatrix<f64>) -> Dense {
    (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| x[(i, j)]).collect()).collect()
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut c = vec![vec![0.0; p]; n];
    for i in 0..n {
        for l in 0..k {
            for j in 0..p {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    c
}

fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn power(s: &Dense, l: usize) -> Dense {
    (0..l).fold(identity(s.len()), |acc, _| matmul(&acc, s))
}

fn activate(name: &str, x: Dense) -> Dense {
    let f = |v: f64| match name {
        "tanh" => v.tanh(),
        "relu" => v.max(0.0),
        _ => v,
    };
    x.into_iter().map(|r| r.into_iter().map(f).collect()).collect()
}

fn naive_filter(f: &GraphFilter, s: &Dense, x: &Dense) -> Dense {
    let mut acc = vec![vec![0.0; f.fout()]; x.len()];
    for (l, h) in f.taps().iter().enumerate() {
        acc = add(&acc, &matmul(&matmul(&power(s, l), x), &to_dense(h)));
    }
    acc
}

fn act_name(a: Activation) -> &'static str {
    a.name()
}

/// Recurrent graph network with explicit dense shift powers `S^l`, where
/// `S = scale · A`.
pub fn naive_grnn(net: &Grnn, adjacency: &DMatrix<f64>, scale: f64, inputs: &[DMatrix<f64>]) -> DMatrix<f64> {
    let s: Dense = to_dense(adjacency).into_iter().map(|r| r.into_iter().map(|v| v * scale).collect()).collect();
    let m = s.len();
    let mut z = vec![vec![0.0; net.dims.h]; m];
    for x in inputs {
        let pre = add(&naive_filter(&net.b, &s, &to_dense(x)), &naive_filter(&net.c, &s, &z));
        z = activate(act_name(net.rho1), pre);
    }
    let y = activate(act_name(net.rho2), naive_filter(&net.d, &s, &z));
    DMatrix::from_fn(m, net.dims.g, |i, j| y[i][j])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every joint profile from a primed state through the simulator and
/// the brute-force evaluator; returns `(profiles checked, disagreements)`.
pub fn exhaustive_check(prime_slots: u64, seed: u64, domain: MuDomain) -> (usize, usize) {
    let (mut checked, mut bad) = (0, 0);
    for t in connected_three_node_graphs() {
        let sim = primed(&t, prime_slots, seed, domain);
        let caches = snapshot(&sim);
        let own: Vec<f64> = sim.sources().values().to_vec();
        let alphabets: Vec<_> = (0..3).map(|i| node_alphabet(&t, &caches, i, domain)).collect();
        for profile in profiles(&alphabets) {
            let expect = brute_force(&profile, &caches, &own, sim.slot());
            let decisions: Vec<Decision> = profile
                .iter()
                .enumerate()
                .map(|(i, &(mu, nu))| Decision::from_pair(i, mu, nu).unwrap())
                .collect();
            let mut run = sim.clone();
            let step = run.step(&decisions, &mut seeded(seed, stream::NOISE)).unwrap();
            let feedback: Vec<u8> = step.outcome.feedback.iter().map(|f| f.code()).collect();
            let mut delivered: Vec<_> = step
                .outcome
                .delivered
                .iter()
                .map(|d| (d.sender, d.receiver, d.entry.origin, d.entry.value, d.entry.stamp))
                .collect();
            delivered.sort_by_key(|d| (d.0, d.1));
            let mut want = expect.delivered.clone();
            want.sort_by_key(|d| (d.0, d.1));
            checked += 1;
            if feedback != expect.feedback || delivered != want || run.state().ages() != expect.ages {
                bad += 1;
            }
        }
    }
    (checked, bad)
}

pub struct Fixture {
    pub topology: Topology,
    pub net: Grnn,
    pub inputs: Vec<DMatrix<f64>>,
    pub normalization: ShiftNormalization,
}

fn random_graph(rng: &mut SimRng, seed: u64) -> Topology {
    let m = rng.random_range(3..16);
    match rng.random_range(0..4) {
        0 => Topology::cycle(m),
        1 => generate_watts_strogatz(m.max(5), 2 * rng.random_range(1..3), 0.3, seed).unwrap(),
        2 => generate_sbm(&[m / 2 + 1, m / 2 + 1], 0.9, 0.3, seed).unwrap(),
        _ => sample_from_graphon(&GraphonSpec::Constant { p: 0.5 }, m, seed).unwrap().topology,
    }
}

pub fn fixture(seed: u64) -> Fixture {
    let mut rng = seeded(seed, 99);
    let topology = random_graph(&mut rng, seed);
    let dims = GrnnDims {
        f: rng.random_range(1..5),
        h: rng.random_range(1..7),
        g: rng.random_range(1..5),
        t: rng.random_range(1..4),
        l: rng.random_range(1..5),
    };
    let acts = [Activation::Tanh, Activation::Identity, Activation::Relu];
    let net = Grnn::new(
        dims,
        GraphFilter::random(dims.l, dims.f, dims.h, &mut rng),
        GraphFilter::random(dims.l, dims.h, dims.h, &mut rng),
        GraphFilter::random(dims.l, dims.h, dims.g, &mut rng),
        acts[rng.random_range(0..3)],
        acts[rng.random_range(0..3)],
    )
    .unwrap();
    let m = topology.m();
    let inputs = (0..dims.t)
        .map(|_| DMatrix::from_fn(m, dims.f, |_, _| rng.random_range(-2.0..2.0)))
        .collect();
    let normalization = if rng.random_bool(0.5) {
        ShiftNormalization::NodeCount
    } else {
        ShiftNormalization::SpectralRadius
    };
    Fixture { topology, net, inputs, normalization }
}

fn permute_rows(x: &DMatrix<f64>, p: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for (i, &pi) in p.iter().enumerate() {
        out.set_row(pi, &x.row(i));
    }
    out
}

/// Node `obs.node` seen through the relabeling `i -> p[i]`.
fn permute_obs<'a>(obs: &LocalObservation<'_>, p: &[usize], t: &'a Topology) -> LocalObservation<'a> {
    let mut ages = vec![0; obs.ages.len()];
    for (j, &a) in obs.ages.iter().enumerate() {
        ages[p[j]] = a;
    }
    let mut cached: Vec<usize> = obs.cached.iter().map(|&o| p[o]).collect();
    cached.sort_unstable();
    LocalObservation {
        node: p[obs.node],
        slot: obs.slot,
        ages,
        feedback: obs.feedback,
        cached,
        topology: t,
        domain: obs.domain,
    }
}

fn relabel(d: Decision, p: &[usize]) -> Decision {
    match d {
        Decision::Silent => Decision::Silent,
        Decision::Transmit { origin, receiver } => Decision::Transmit {
            origin: p[origin],
            receiver: p[receiver],
        },
    }
}

/// Largest deviation over `relabelings` random permutations of the forward
/// pass, the score matrix and every node's masked action probabilities.
pub fn max_equivariance_error(relabelings: u64) -> f64 {
    let weights = Arc::new(
        load_weights_file(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/random_weights.json")).unwrap(),
    );
    let t = generate_watts_strogatz(10, 4, 0.3, 5).unwrap();
    let sim = primed(&t, 12, 5, MuDomain::Full);
    let mut worst = 0.0f64;
    let mut rng = seeded(17, stream::PERMUTATION);
    for _ in 0..relabelings {
        let p = random_permutation(t.m(), &mut rng);
        let tp = t.permute(&p).unwrap();
        let s = ShiftOperator::new(&t, ShiftNormalization::NodeCount);
        let sp = ShiftOperator::new(&tp, ShiftNormalization::NodeCount);
        let mut policy = GrnnPolicy::new(weights.clone()).with_recurrent_state(RecurrentState::PerSlot);
        let mut policy_p = GrnnPolicy::new(weights.clone()).with_recurrent_state(RecurrentState::PerSlot);
        for i in 0..t.m() {
            let obs = observe(&sim, i);
            let obs_p = permute_obs(&obs, &p, &tp);
            let x = node_features(&obs);
            let xp = node_features(&obs_p);
            worst = worst.max(max_abs_diff(&permute_rows(&x, &p), &xp));
            let inputs = vec![x; weights.dims().t];
            let inputs_p = vec![xp; weights.dims().t];
            let y = weights.forward(&s, &inputs).unwrap();
            let yp = weights.forward(&sp, &inputs_p).unwrap();
            worst = worst.max(max_abs_diff(&permute_rows(&y, &p), &yp));
            let sc = action_scores(&y, &weights.theta_action).unwrap();
            let scp = action_scores(&yp, &weights.theta_action).unwrap();
            let sc_moved = permute_rows(&permute_rows(&sc, &p).transpose(), &p).transpose();
            worst = worst.max(max_abs_diff(&sc_moved, &scp));

            let dist = policy.probabilities(&obs).unwrap();
            let dist_p = policy_p.probabilities(&obs_p).unwrap();
            assert_eq!(dist.len(), dist_p.len());
            for (d, prob) in dist {
                let moved = relabel(d, &p);
                let q = dist_p.iter().find(|(e, _)| *e == moved).map(|(_, q)| *q).expect("same support");
                worst = worst.max((prob - q).abs());
            }
        }
    }
    worst
}
