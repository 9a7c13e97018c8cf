use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use timesim::generate::{random_pair, GenParams};
use timesim::oracle::maximal_simulation;
use timesim::sim::{simulation_check, CheckOptions};

#[test]
fn engine_agrees_with_oracle() {
    let n: usize = std::env::var("CROSS_N").ok().and_then(|s| s.parse().ok()).unwrap_or(30);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = GenParams::default();
    let mut bad = 0;
    let mut holds = 0;
    for i in 0..n {
        let (a, b) = random_pair(&mut rng, &p);
        let t = std::time::Instant::now();
        let e = simulation_check(&a, &b, &CheckOptions::default()).unwrap();
        let te = t.elapsed();
        let t = std::time::Instant::now();
        let o = maximal_simulation(&a, &b).unwrap();
        let to = t.elapsed();
        holds += o.holds as usize;
        if e.holds != o.holds {
            bad += 1;
            eprintln!("#{i} engine {} oracle {}\nA1 = {a:#?}\nA2 = {b:#?}", e.holds, o.holds);
        }
        eprintln!("#{i} {} {:?} {:?} pairs {}", o.holds, te, to, o.pairs);
    }
    eprintln!("holds {holds}/{n}");
    assert_eq!(bad, 0);
}
