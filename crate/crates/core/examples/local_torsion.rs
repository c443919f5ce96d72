// E(Q_p)[p] for curves with anomalous reduction at p = 5: a point of
// order 5 on the reduction either lifts to 5-torsion or it does not.

use kurihara::curve::{anomalous_split_depth, local_torsion, parse_ainvs, CurveContext};

pub fn run_example() -> kurihara::Result<()> {
    for (name, ainvs) in [
        ("11.a1", "[0,-1,1,-10,-20]"),
        ("11.a2", "[0,-1,1,-7820,-263580]"),
        ("11.a3", "[0,-1,1,0,0]"),
        ("5077.a1", "[0,0,1,-7,6]"),
        ("389.a1", "[0,1,1,-2,0]"),
    ] {
        let ctx = CurveContext::new(parse_ainvs(ainvs)?, None)?;
        let report = local_torsion(&ctx, 5)?;
        println!(
            "{name:>8}: a_5 = {:>2}, lift depth {:?}, {:?} ({})",
            ctx.ap(5),
            anomalous_split_depth(ctx.model(), 5),
            report.status,
            report.reason
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("local_torsion");
}
