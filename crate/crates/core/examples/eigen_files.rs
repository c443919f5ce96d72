// Writes the eigen-symbol of 37.a1 to a file and reads it back. Import
// re-checks the Hecke eigenvalues and the curve it belongs to.

use kurihara::cli::{build_symbol, RunConfig};
use kurihara::curve::{parse_ainvs, CurveContext};
use kurihara::modsym::{export_eigensymbol, import_eigensymbol};

pub fn run_example() -> kurihara::Result<()> {
    let cfg = RunConfig::inline("[0,0,1,-1,0]");
    let ctx = CurveContext::new(parse_ainvs("[0,0,1,-1,0]")?, None)?;
    let (symbol, _) = build_symbol(&ctx, &cfg)?;

    let path = std::env::temp_dir().join(format!("kurihara-example-{}.eigen.json", std::process::id()));
    export_eigensymbol(&symbol, &path)?;
    let back = import_eigensymbol(&path, &ctx)?;
    assert_eq!(back.value(1, 7), symbol.value(1, 7));
    println!("round trip through {} kept [1/7]^+ = {}", path.display(), back.value(1, 7));

    // The same file does not belong to 389.a1.
    let other = CurveContext::new(parse_ainvs("[0,1,1,-2,0]")?, None)?;
    match import_eigensymbol(&path, &other) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected for 389.a1: {e}"),
    }
    std::fs::remove_file(&path)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("eigen_files");
}
