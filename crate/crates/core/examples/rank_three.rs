// 5077.a1 has rank 3. Its first nonvanishing Kurihara number needs three
// Kolyvagin primes, the largest of which is 631.

use kurihara::cli::{analyze, RunConfig};

pub fn run_example() -> kurihara::Result<()> {
    let mut cfg = RunConfig::inline("[0,0,1,-7,6]");
    cfg.bound = 700;
    cfg.budget = 3;
    let analysis = analyze(&cfg)?;
    let report = &analysis.report;
    print!("{}", report.summary());
    if let Some(w) = report.scan.ord_witness() {
        println!("witness {:?}", w.factors);
    }
    println!("semilocal: {:?} {:?}", report.semilocal.status, report.semilocal.reasons);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("rank_three");
}
