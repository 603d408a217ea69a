//! Rough wall-clock probe for the scan workload (temporary).

use std::time::Instant;

use perc3::montecarlo::scaling_scan;

fn main() {
    for (n, configs) in [(64, 3u32), (128, 3u32)] {
        let t = Instant::now();
        let report = scaling_scan(0.6, &[n], configs, 20, 2026);
        let dt = t.elapsed().as_secs_f64();
        println!(
            "scaling n={n} configs={configs}: {dt:.2}s ({:.2}s/config), rows={}",
            dt / configs as f64,
            report.rows.len()
        );
    }
}
