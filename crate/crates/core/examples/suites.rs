//! Run the seeded property suites and print their law tallies.

use procat::gallery::{run_suite, SUITES};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    for name in SUITES {
        let report = run_suite(name, n, 7).unwrap();
        print!("{}", report);
    }
}
