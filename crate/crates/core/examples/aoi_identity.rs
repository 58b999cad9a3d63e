//! Conditional squared error of a random-walk estimate at age `d` against
//! `σ² d`, estimated from independent walks.

use netsampler::estimation::SourceEnsemble;
use netsampler::rng::{seeded, stream};

fn main() {
    let (sigma, samples, max_age) = (1.5, 20_000usize, 10usize);
    let mut rng = seeded(0, stream::NOISE);
    let mut sums = vec![0.0; max_age + 1];
    for _ in 0..samples {
        let mut s = SourceEnsemble::new(1, sigma);
        let held = s.value(0);
        for d in 1..=max_age {
            s.evolve(&mut rng);
            sums[d] += (s.value(0) - held).powi(2);
        }
    }
    println!("{:>3} {:>10} {:>10}", "d", "mse", "σ²d");
    for (d, sum) in sums.iter().enumerate().skip(1) {
        println!("{d:>3} {:>10.4} {:>10.4}", sum / samples as f64, sigma * sigma * d as f64);
    }
}
