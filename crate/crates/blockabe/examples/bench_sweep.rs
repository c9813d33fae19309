//! Benchmark sweeps comparing the partitioned scheme against the monolithic
//! single-ciphertext baseline under one channel model. Emits the same CSV as
//! `blockabe bench`.
//!
//! ```text
//! cargo run --release --example bench_sweep
//! ```

use blockabe::pipeline::{benchmark_sweep, rows_to_csv, SweepConfig, SweepDimension};

fn main() {
    // message-size sweep over the default ten-gate, hundred-leaf tree
    let config = SweepConfig {
        dimension: SweepDimension::Size,
        sizes_mib: vec![1, 2, 4, 8],
        seed: 7,
        ..SweepConfig::default()
    };
    let rows = benchmark_sweep(&config).expect("sweep runs");
    println!("{}", rows_to_csv(&rows));

    // block-count sweep at fixed leaves: more blocks, more overlap
    let config = SweepConfig {
        dimension: SweepDimension::Blocks,
        block_counts: vec![1, 2, 4, 8],
        seed: 7,
        ..SweepConfig::default()
    };
    let rows = benchmark_sweep(&config).expect("sweep runs");
    println!("{}", rows_to_csv(&rows));

    for pair in rows.chunks(2) {
        let (part, mono) = (&pair[0], &pair[1]);
        println!(
            "blocks = {:>2}: partitioned {:.3}s, monolithic {:.3}s, saving {:+.3}s",
            part.value,
            part.total_seconds,
            mono.total_seconds,
            mono.total_seconds - part.total_seconds
        );
    }
}
