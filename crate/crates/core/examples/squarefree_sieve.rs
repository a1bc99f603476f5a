//! Mobius, squarefree and divisor values on a window far from the origin.

use psfree::sieve::{count_squarefree, divisor_summatory, WindowSieve};

fn main() {
    let lo = 1_000_000_000_000u64;
    let sieve = WindowSieve::new(lo + 32);
    let mu = sieve.mobius(lo, lo + 16);
    let tau = sieve.divisor(lo, lo + 16).expect("window avoids zero");
    for ((m, mu), (_, tau)) in mu.iter().zip(tau.iter()) {
        println!("{m}: mu = {mu:2}, tau = {tau}");
    }

    let x = 1_000_000;
    let q = count_squarefree(x);
    println!("squarefree n <= {x}: {q} (density {:.6})", q as f64 / x as f64);
    println!("sum of tau(n) for n <= {x}: {}", divisor_summatory(x));
}
