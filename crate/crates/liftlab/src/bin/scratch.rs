use liftlab::enumeration::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let o1 = enumerate_sl3_oracle(1).unwrap();
    let o2 = enumerate_sl3_oracle(2).unwrap();
    println!("oracle T=1: {}  T=2: {}  ({:?})", o1.len(), o2.len(), t0.elapsed());

    let t0 = Instant::now();
    let k1 = enumerate_sl3(1).unwrap();
    let k2 = enumerate_sl3(2).unwrap();
    println!("kernel T=1: {}  T=2: {}  ({:?})", k1.len(), k2.len(), t0.elapsed());

    for t in [4i64, 6, 8, 10, 12] {
        let t0 = Instant::now();
        let n = count_sl3(&Sl3Params::inf_ball(t, Filter::None).unwrap()).unwrap();
        println!("count T={t}: {n}  ratio/T^6 = {:.3}  ({:?})", n as f64 / (t as f64).powi(6), t0.elapsed());
    }

    for d in [5i64, 10, 20, 29, 40, 80] {
        let t0 = Instant::now();
        let n = count_sl3(&Sl3Params::delta_ball(d, Filter::None).unwrap()).unwrap();
        let dd = d as f64;
        println!("delta D={d}: S={} count={n}  /(D^2 logD) = {:.3}  ({:?})", inf_bound_for_delta(d), n as f64 / (dd*dd*dd.ln()), t0.elapsed());
    }
}
