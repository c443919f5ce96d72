// The whole pipeline on 389.a1, as run by `kurihara analyze`.

use kurihara::cli::{analyze, CurveSource, RunConfig};

pub fn run_example() -> kurihara::Result<()> {
    let mut cfg = RunConfig::new(CurveSource::Inline("[0,1,1,-2,0]".into()));
    cfg.workers = Some(1);
    let analysis = analyze(&cfg)?;
    print!("{}", analysis.report.summary());
    analysis.status()?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("analyze_rank_two");
}
