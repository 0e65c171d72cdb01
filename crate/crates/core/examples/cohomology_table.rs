use dyalg::cohomology::{cohomology_table, harmonic_complement_check};
use dyalg::combinatorics::DecorationMonoid;

fn main() {
    for m in [DecorationMonoid::Trivial, DecorationMonoid::Split] {
        println!("{m:?}");
        for n in 1..=2 {
            let t = std::time::Instant::now();
            for r in cohomology_table(n, 4, &m).unwrap() {
                println!("  N={} n={} ker={} im={} H={} oracle={} total={}", r.strands, r.n, r.dim_ker, r.dim_im, r.dim_h, r.oracle, r.total_degree_oracle);
            }
            println!("  {:?}", t.elapsed());
            for k in 2..=3 {
                println!("  harmonic n={k}: {:?}", harmonic_complement_check(k, n, &m).unwrap());
            }
        }
    }
}
