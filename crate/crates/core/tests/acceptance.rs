//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use common::{exhaustive_check, fixture, max_abs_diff, max_equivariance_error, naive_grnn};
use nalgebra::DMatrix;
use netsampler::estimation::{mmse_estimate, RewardMode};
use netsampler::harness::{
    evaluate_policy, write_episode_csv, EpisodeConfig, PolicyKind, PolicySpec, ResampleRule, Seeds, Stat,
};
use netsampler::mac::{Decision, MuDomain, Simulator};
use netsampler::rng::{seeded, stream};
use netsampler::topology::Topology;
use netsampler::transfer::{
    action_distance, action_outputs, median_by_m, run_lab, write_transfer_csv, ActionCheckConfig, CheckKind, LabConfig,
    TransferRecord,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn silence_episodes(reward: RewardMode) -> Stat {
    let cfg = EpisodeConfig {
        steps: 1024,
        sigma: 1.0,
        reward,
        seeds: Seeds::all(0),
        policy: PolicySpec::of(PolicyKind::Silence),
        ..EpisodeConfig::default()
    };
    evaluate_policy(&cfg, 100, ResampleRule::Auto).unwrap().aggregate.asee
}

fn silence_closed_form() -> Verdict {
    let closed = 0.9 * 1025.0 / 2.0;
    let start = Instant::now();
    let expected = silence_episodes(RewardMode::Expected);
    let realized = silence_episodes(RewardMode::Realized);
    let elapsed = start.elapsed();
    let rel = (expected.mean - closed).abs() / closed;
    let z = (realized.mean - closed).abs() / realized.se;
    let realized_rel = (realized.mean - closed) / closed;
    verdict(
        rel <= 0.02 && z <= 3.0 && elapsed < Duration::from_secs(10),
        format!(
            "closed form {closed}; expected-reward ASEE {:.4} (rel err {:.2e}, tol 2%); realized Monte-Carlo {:.3} ± {:.3} SE, \
             |z| = {z:.2} (tol 3); realized rel err {:+.2}% (informational); {:.1?}",
            expected.mean,
            rel,
            realized.mean,
            realized.se,
            100.0 * realized_rel,
            elapsed
        ),
    )
}

fn aoi_identity() -> Verdict {
    let (samples, max_age, sigma) = (100_000usize, 20usize, 1.0);
    let start = Instant::now();
    let mut sq: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); max_age + 1];
    let t = Topology::path(2);
    let send = [Decision::Transmit { origin: 0, receiver: 1 }, Decision::Silent];
    let quiet = [Decision::Silent, Decision::Silent];
    let mut noise = seeded(0, stream::NOISE);
    for _ in 0..samples {
        let mut sim = Simulator::new(t.clone(), sigma, MuDomain::Full, RewardMode::Realized);
        sim.step(&send, &mut noise).unwrap();
        loop {
            let d = sim.state().age(1, 0) as usize;
            let err = sim.sources().value(0) - mmse_estimate(sim.state(), sim.sources(), 1, 0);
            sq[d].push(err * err);
            if d == max_age {
                break;
            }
            sim.step(&quiet, &mut noise).unwrap();
        }
    }
    let mut worst = 0.0f64;
    let mut all = true;
    for (d, v) in sq.iter().enumerate().skip(1) {
        let s = Stat::of(v);
        let z = (s.mean - sigma * sigma * d as f64).abs() / s.se;
        worst = worst.max(z);
        all &= v.len() == samples && z <= 3.0;
    }
    let elapsed = start.elapsed();
    verdict(
        all && elapsed < Duration::from_secs(30),
        format!("d = 1..{max_age}, {samples} samples each; max |mse − σ²d| / SE = {worst:.2} (tol 3); {elapsed:.1?}"),
    )
}

fn collision_oracle() -> Verdict {
    let (mut checked, mut bad) = (0, 0);
    for prime in [0, 2, 6, 30] {
        for seed in 0..4 {
            for domain in [MuDomain::Full, MuDomain::Neighbors] {
                let (c, b) = exhaustive_check(prime, seed, domain);
                checked += c;
                bad += b;
            }
        }
    }
    verdict(
        bad == 0 && checked > 0,
        format!("{} of {checked} joint profiles agree on 4 connected 3-node graphs", checked - bad),
    )
}

fn equivariance() -> Verdict {
    let worst = max_equivariance_error(100);
    verdict(
        worst <= 1e-9,
        format!("100 relabelings, forward outputs and masked probabilities; max deviation {worst:.2e} (tol 1e-9)"),
    )
}

fn naive_oracle() -> Verdict {
    use netsampler::grnn::ShiftOperator;
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let f = fixture(seed);
        let s = ShiftOperator::new(&f.topology, f.normalization);
        let fast = f.net.forward(&s, &f.inputs).unwrap();
        worst = worst.max(max_abs_diff(&fast, &naive_grnn(&f.net, &f.topology.adjacency(), s.scale(), &f.inputs)));
    }
    verdict(worst <= 1e-10, format!("50 fixtures; max deviation {worst:.2e} (tol 1e-10)"))
}

fn lab(output: bool, action: bool) -> (Vec<TransferRecord>, Duration) {
    let cfg = LabConfig {
        output_check: output,
        action_check: action,
        ..LabConfig::default()
    };
    let start = Instant::now();
    let records = run_lab(&cfg).unwrap();
    (records, start.elapsed())
}

fn non_increasing(v: &[(usize, f64)]) -> bool {
    v.windows(2).all(|w| w[1].1 <= w[0].1)
}

fn output_transfer() -> Verdict {
    let (records, elapsed) = lab(true, false);
    let mut pass = elapsed < Duration::from_secs(300) && records.len() == 2 * 4 * 20;
    let mut parts = vec![];
    for t in [1, 2] {
        let sel: Vec<_> = records.iter().filter(|r| r.t == t).cloned().collect();
        let lhs = median_by_m(&sel, |r| r.lhs);
        let violations = sel.iter().filter(|r| r.violation || r.lhs > r.rhs).count();
        let worst = sel.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
        pass &= non_increasing(&lhs) && violations == 0;
        let medians: Vec<String> = lhs.iter().map(|(m, v)| format!("{m}:{v:.3e}")).collect();
        parts.push(format!(
            "T={t} median lhs [{}], {violations} violations, max lhs/rhs {worst:.3}",
            medians.join(" ")
        ));
    }
    verdict(pass, format!("{}; {} runs; {elapsed:.1?}", parts.join("; "), records.len()))
}

fn action_transfer() -> Verdict {
    let (records, elapsed) = lab(false, true);
    let mut pass = records.len() == 2 * 4 * 20;
    let mut parts = vec![];
    for t in [1, 2] {
        let sel: Vec<_> = records.iter().filter(|r| r.t == t && r.check == CheckKind::Action).cloned().collect();
        let finite = sel.iter().all(|r| r.gamma.is_some_and(f64::is_finite));
        let gamma = median_by_m(&sel, |r| r.gamma.unwrap_or(f64::NAN));
        let hi = gamma.iter().map(|g| g.1).fold(f64::MIN, f64::max);
        let lo = gamma.iter().map(|g| g.1).fold(f64::MAX, f64::min);
        pass &= finite && lo > 0.0 && hi <= 4.0 * lo;
        let medians: Vec<String> = gamma.iter().map(|(m, v)| format!("{m}:{v:.3}")).collect();
        parts.push(format!("T={t} median ratio [{}], spread {:.2}x (tol 4x)", medians.join(" "), hi / lo));
    }

    // η₃ → 0: slide the sampled outputs onto the limit outputs
    let lab_cfg = LabConfig::default();
    let cfg = ActionCheckConfig {
        graphon: lab_cfg.graphon.clone(),
        net: netsampler::transfer::lab_network(2, lab_cfg.taps, lab_cfg.net_seed),
        first: netsampler::transfer::default_signals(2, 0),
        second: netsampler::transfer::default_signals(2, 3),
        theta: DMatrix::from_element(1, 1, lab_cfg.theta),
        m_values: vec![20],
        seeds: vec![0],
        resolution: lab_cfg.resolution,
    };
    let out = action_outputs(&cfg, 20, 0).unwrap();
    let at = |alpha: f64| {
        let y1m = out.y1.lerp(&out.y1m, alpha).unwrap();
        let y2m = out.y2.lerp(&out.y2m, alpha).unwrap();
        let eta3 = out.y1.distance(&y1m).unwrap().max(out.y2.distance(&y2m).unwrap());
        (action_distance(&out.y1, &out.y2, &y1m, &y2m, &cfg.theta).unwrap(), eta3)
    };
    let zero = at(0.0).0;
    let exact = action_distance(&out.y1, &out.y2, &out.y1, &out.y2, &cfg.theta).unwrap();
    let shrink: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125].iter().map(|&a| at(a)).collect();
    let decreasing = shrink.windows(2).all(|w| w[1].0 < w[0].0);
    let ratios: Vec<f64> = shrink.iter().map(|(d, e)| d / e).collect();
    let (rlo, rhi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &r| (a.min(r), b.max(r)));
    pass &= zero == 0.0 && exact == 0.0 && decreasing && rhi <= 4.0 * rlo;
    parts.push(format!(
        "η₃=0 distance {exact:e}; α ↓ 2⁻⁵: distance {:.3e} → {:.3e}, distance/η₃ spread {:.2}x",
        shrink[0].0,
        shrink[shrink.len() - 1].0,
        rhi / rlo
    ));
    verdict(pass, format!("{}; {elapsed:.1?}", parts.join("; ")))
}

fn baseline_ordering() -> Verdict {
    let eval = |kind, reward| {
        let cfg = EpisodeConfig {
            policy: PolicySpec::of(kind),
            reward,
            ..EpisodeConfig::default()
        };
        evaluate_policy(&cfg, 30, ResampleRule::Auto).unwrap().aggregate.asee
    };
    let ordered = |reward| {
        let s = [PolicyKind::Age, PolicyKind::Uniform, PolicyKind::Silence].map(|k| eval(k, reward));
        let separated = s.windows(2).all(|w| w[0].interval(2.0).1 < w[1].interval(2.0).0);
        let text = format!(
            "age {:.2} ± {:.2}, uniform {:.2} ± {:.2}, silence {:.2} ± {:.2}",
            s[0].mean,
            2.0 * s[0].se,
            s[1].mean,
            2.0 * s[1].se,
            s[2].mean,
            2.0 * s[2].se
        );
        (separated, text)
    };
    let (pass, expected) = ordered(RewardMode::Expected);
    let (realized_ok, realized) = ordered(RewardMode::Realized);
    verdict(
        pass,
        format!(
            "30 WS(10) episodes, ±2 SE; expected-error estimator: {expected}; realized errors (informational, {}): {realized}",
            if realized_ok { "separated" } else { "intervals overlap" }
        ),
    )
}

fn determinism() -> Verdict {
    let episodes = |kind| {
        let cfg = EpisodeConfig {
            steps: 256,
            seeds: Seeds::all(42),
            policy: match kind {
                PolicyKind::Grnn => PolicySpec::grnn(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/random_weights.json")),
                k => PolicySpec::of(k),
            },
            ..EpisodeConfig::default()
        };
        let mut buf = Vec::new();
        write_episode_csv(&evaluate_policy(&cfg, 8, ResampleRule::Auto).unwrap().rows, &mut buf).unwrap();
        buf
    };
    let lab_csv = || {
        let cfg = LabConfig {
            m_values: vec![10, 20],
            seeds: 3,
            resolution: 256,
            ..LabConfig::default()
        };
        let mut buf = Vec::new();
        write_transfer_csv(&run_lab(&cfg).unwrap(), &mut buf).unwrap();
        buf
    };
    let mut same = 0;
    let kinds = [PolicyKind::Silence, PolicyKind::Uniform, PolicyKind::Age, PolicyKind::Grnn];
    for k in kinds {
        same += usize::from(episodes(k) == episodes(k));
    }
    same += usize::from(lab_csv() == lab_csv());

    let dir = std::env::temp_dir().join(format!("netsampler-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cli = |name: &str| {
        let p = dir.join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_netsampler"))
            .args(["eval", "--policy", "age", "--steps", "128", "--episodes", "4", "--seed", "9", "--out-csv"])
            .arg(&p)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&p).unwrap()
    };
    same += usize::from(cli("a.csv") == cli("b.csv"));
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        same == kinds.len() + 2,
        format!("{same} of {} repeated outputs byte-identical (4 policies, transfer report, CLI eval)", kinds.len() + 2),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("silence ASEE closed form", silence_closed_form),
        ("age-error identity", aoi_identity),
        ("collision oracle equivalence", collision_oracle),
        ("permutation equivariance", equivariance),
        ("GRNN vs explicit-power oracle", naive_oracle),
        ("GRNN output transferability", output_transfer),
        ("action distribution transferability", action_transfer),
        ("baseline ordering", baseline_ordering),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
