// The smallest end-to-end use of the library: the eigen-symbol of 11a1,
// its normalized central value, and the Kolyvagin primes below 200.

use kurihara::cli::{build_symbol, RunConfig};
use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::kolyvagin::sieve;
use kurihara::kurihara::DeltaEvaluator;

pub fn run_example() -> kurihara::Result<()> {
    let ctx = CurveContext::new(parse_ainvs("[0,-1,1,-10,-20]")?, Some("11.a1".into()))?;
    let cfg = RunConfig::inline("[0,-1,1,-10,-20]");
    let (symbol, dim) = build_symbol(&ctx, &cfg)?;
    println!("11.a1: conductor {}, plus space of dimension {dim}", ctx.conductor());
    println!("root number {:+}", symbol.root_number());

    let eval = DeltaEvaluator::new(&symbol, 1)?;
    let d1 = eval.delta_one();
    println!("delta_1 = {:?}, valuation {}", d1.value, d1.valuation);

    let primes = sieve(&ctx, 5, 1, 200)?;
    let ells: Vec<u64> = primes.iter().map(|l| l.ell()).collect();
    println!("Kolyvagin primes for p = 5 up to 200: {ells:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("hello_library");
}
