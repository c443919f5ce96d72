// Individual Kurihara numbers of 389.a1 at p = 5, with the Mazur-Tate
// element as a second route to the same value.

use kurihara::cli::{build_symbol, RunConfig};
use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::kolyvagin::{sieve, Modulus};
use kurihara::kurihara::{functional_sign_check, DeltaEvaluator};

pub fn run_example() -> kurihara::Result<()> {
    let cfg = RunConfig::inline("[0,1,1,-2,0]");
    let ctx = CurveContext::new(parse_ainvs("[0,1,1,-2,0]")?, None)?;
    let (symbol, _) = build_symbol(&ctx, &cfg)?;
    let primes = sieve(&ctx, 5, 1, 200)?;
    let eval = DeltaEvaluator::new(&symbol, 1)?;

    let d1 = eval.delta_one();
    println!("delta_1 = {:?}", d1.value);
    for ells in [vec![41u64], vec![41, 61], vec![41, 131], vec![61, 131]] {
        let chosen = primes.iter().filter(|l| ells.contains(&l.ell())).cloned().collect();
        let m = Modulus::new(chosen)?;
        let kn = eval.delta(&m, Some(1))?;
        let mt = eval.mazur_tate(&m, 1)?;
        println!(
            "n = {:>5}: delta = {:?} mod 5, Mazur-Tate top coefficient {}, parity {:?}",
            m.n(),
            kn.value,
            mt.top(),
            functional_sign_check(symbol.root_number(), &kn)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("kurihara_numbers");
}
