// Scans the Kurihara numbers of 1058.e1 at p = 5 and reads off the
// Selmer structure: corank 0 and Sha[5^inf] = (Z/5)^2.

use kurihara::cli::{build_symbol, RunConfig};
use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::kolyvagin::sieve;
use kurihara::kurihara::{scan, DeltaEvaluator, ScanConfig};
use kurihara::selmer::{predict_structure, tamagawa_conjecture_check};

pub fn run_example() -> kurihara::Result<()> {
    let ainvs = "[1,-1,0,-332311,-73733731]";
    let cfg = RunConfig::inline(ainvs);
    let ctx = CurveContext::new(parse_ainvs(ainvs)?, Some("1058.e1".into()))?;
    let (symbol, _) = build_symbol(&ctx, &cfg)?;
    let primes = sieve(&ctx, 5, 1, 200)?;
    let eval = DeltaEvaluator::new(&symbol, 1)?;
    let dc = scan(&eval, "1058.e1", &primes, &ScanConfig::new(5, 1, 200, 2, 6))?;
    for rec in &dc.partials {
        println!("nu = {} ({:?}): min valuation {}", rec.nu, rec.parity, rec.min_valuation);
    }
    let pred = predict_structure(&dc)?;
    println!("status {:?}, corank {:?}", pred.status, pred.corank);
    println!("torsion {}", pred.describe_torsion());
    println!("Fitting ideals {:?}", pred.fitting);
    println!("Tamagawa check {:?}", tamagawa_conjecture_check(&dc, &ctx).status);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("selmer_structure");
}
