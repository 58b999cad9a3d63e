//! The collision channel on a three-node path `0 – 1 – 2`: a lone
//! transmission, a common receiver, and a head-on exchange.

use netsampler::estimation::RewardMode;
use netsampler::mac::{Decision, MuDomain, Simulator};
use netsampler::rng::{seeded, stream};
use netsampler::topology::Topology;

fn tx(origin: usize, receiver: usize) -> Decision {
    Decision::Transmit { origin, receiver }
}

fn main() -> netsampler::Result<()> {
    let mut sim = Simulator::new(Topology::path(3), 1.0, MuDomain::Full, RewardMode::Realized);
    let mut noise = seeded(0, stream::NOISE);
    let slots = [
        ("0 sends its sample to 1", vec![tx(0, 1), Decision::Silent, Decision::Silent]),
        ("0 and 2 both address 1", vec![tx(0, 1), Decision::Silent, tx(2, 1)]),
        ("1 and 2 address each other", vec![Decision::Silent, tx(1, 2), tx(2, 1)]),
        ("1 relays 0's packet to 2", vec![Decision::Silent, tx(0, 2), Decision::Silent]),
    ];
    for (what, decisions) in slots {
        let step = sim.step(&decisions, &mut noise)?;
        let fb: Vec<u8> = step.outcome.feedback.iter().map(|f| f.code()).collect();
        println!("slot {}: {what}", sim.slot() - 1);
        println!("  feedback {fb:?}  (0 idle, 1 success, 2 collision)");
        for d in &step.outcome.delivered {
            println!(
                "  delivered {} -> {}: origin {} stamped {}",
                d.sender, d.receiver, d.entry.origin, d.entry.stamp
            );
        }
        println!("  ages {:?}  reward {:.4}", sim.state().ages(), step.reward);
    }
    Ok(())
}
