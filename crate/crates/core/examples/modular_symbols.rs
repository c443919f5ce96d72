// The plus quotient of weight-2 modular symbols for Gamma_0(389), the
// eigenline of 389.a1 and a few normalized symbols [a/m]^+.

use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::modsym::{extract_eigenline, genus, EigenSymbol, NormalizeOptions, SymbolSpace};

pub fn run_example() -> kurihara::Result<()> {
    let ctx = CurveContext::new(parse_ainvs("[0,1,1,-2,0]")?, Some("389.a1".into()))?;
    let space = SymbolSpace::build(389)?;
    println!(
        "level 389: {} Manin symbols, plus space of dimension {}, cuspidal part {}, genus {}",
        space.p1().len(),
        space.dimension(),
        space.cuspidal_dimension(),
        genus(389)
    );
    let line = extract_eigenline(&space, &ctx, 0)?;
    println!("eigenline verified against {:?}", line.verified_hecke());
    let es = EigenSymbol::normalize(line, &ctx, 5, &NormalizeOptions::default())?;
    println!("w = {:+}, lambda_5 = {}, pinning {:?}", es.root_number(), es.lambda_p(), es.pinning());
    for (a, m) in [(0, 1), (1, 5), (2, 5), (1, 41), (7, 61)] {
        println!("  [{a}/{m}]^+ = {}", es.value(a, m));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("modular_symbols");
}
