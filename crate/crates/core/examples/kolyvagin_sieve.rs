// Kolyvagin primes for 389.a1 at p = 5 and the first squarefree products
// of them in colexicographic order.

use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::kolyvagin::{enumerate_moduli, sieve};

pub fn run_example() -> kurihara::Result<()> {
    let ctx = CurveContext::new(parse_ainvs("[0,1,1,-2,0]")?, None)?;
    let primes = sieve(&ctx, 5, 1, 400)?;
    for l in &primes {
        println!("  l = {:>3}  a_l = {:>3}  depth {}", l.ell(), l.a_ell(), l.depth());
    }
    for nu in 1..=3 {
        let ns: Vec<u64> = enumerate_moduli(&primes, nu, 6).map(|m| m.n()).collect();
        println!("nu = {nu}: {ns:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("kolyvagin_sieve");
}
