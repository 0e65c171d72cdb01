use dyalg::suites::{run_suite, SUITES};
use std::time::Instant;

fn main() {
    let only: Vec<String> = std::env::args().skip(1).collect();
    for s in SUITES.iter().filter(|s| only.is_empty() || only.iter().any(|o| o == *s)) {
        let t = Instant::now();
        match run_suite(s, 7) {
            Ok(r) => {
                println!("{s}: checked {} failed {} ({:.1?})", r.checked, r.failures.len(), t.elapsed());
                for f in r.failures.iter().take(5) {
                    println!("  FAIL {f}");
                }
                for f in r.findings.iter().take(5) {
                    println!("  note {f}");
                }
            }
            Err(e) => println!("{s}: error {e}"),
        }
    }
}
