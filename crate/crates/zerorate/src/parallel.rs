//! Monte Carlo across threads. Chunks are seeded by index, so the result is
//! the same for every worker count.

use std::num::NonZeroUsize;
use std::thread;

use zerorate_core::codebook::Codebook;
use zerorate_core::decoder::{outcome_from_tally, DecodingOutcome, Simulator, Tally, TiePolicy};
use zerorate_core::{ChannelMetricPair, Error};

pub fn monte_carlo(
    pair: &ChannelMetricPair,
    code: &Codebook,
    trials: u64,
    seed: u64,
    policy: TiePolicy,
    jobs: NonZeroUsize,
) -> Result<DecodingOutcome, Error> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let sim = Simulator::new(pair, code, policy)?;
    let chunks = Simulator::chunks(trials);
    let workers = jobs.get().min(chunks.len());
    let partial: Vec<Tally> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (sim, chunks) = (&sim, &chunks);
                scope.spawn(move || {
                    let mut tally = Tally::new(code.len());
                    for &(chunk, n) in chunks.iter().skip(w).step_by(workers) {
                        tally.merge(&sim.run_chunk(seed, chunk, n));
                    }
                    tally
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    let mut total = Tally::new(code.len());
    for t in &partial {
        total.merge(t);
    }
    Ok(outcome_from_tally(&total, seed))
}
