//! Runs every reproduction demo and prints a pass/fail table.

use majority::demos::{run_demo, DemoData, DEFAULT_SEED, DEMOS};
use std::time::Instant;

fn main() {
    let data = DemoData::bundled();
    let mut all = true;
    for info in DEMOS {
        let start = Instant::now();
        let out = run_demo(info.id, &data, DEFAULT_SEED);
        let mark = if out.passed { "PASS" } else { "FAIL" };
        println!("{mark} {} {} ({:.2?})", out.id, out.key, start.elapsed());
        for line in &out.details {
            println!("    {line}");
        }
        all &= out.passed;
    }
    std::process::exit(if all { 0 } else { 1 });
}
