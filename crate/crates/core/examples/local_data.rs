// Local data from Tate's algorithm and traces of Frobenius for 1058.e1.

use kurihara::curve::{ap_character_sum, ap_exhaustive, parse_ainvs, CurveContext};

pub fn run_example() -> kurihara::Result<()> {
    let model = parse_ainvs("[1,-1,0,-332311,-73733731]")?;
    let ctx = CurveContext::new(model.clone(), Some("1058.e1".into()))?;
    println!("conductor {} discriminant {}", ctx.conductor(), ctx.model().discriminant());
    for ld in ctx.bad_primes() {
        println!(
            "  l = {:>3}: {:?}, Kodaira {:?}, c_l = {}, v(disc) = {}, f = {}",
            ld.prime, ld.reduction, ld.kodaira, ld.tamagawa, ld.disc_valuation, ld.conductor_exponent
        );
    }
    println!("Tamagawa product {}", ctx.tamagawa_product());
    // l = 2, 3 are counted projectively; the character sum needs l >= 5.
    println!("  a_3 = {}", ctx.ap(3));
    for l in [5u64, 7, 11, 13, 29, 31] {
        let by_sum = ap_character_sum(&model, l)?;
        assert_eq!(by_sum, ap_exhaustive(&model, l));
        println!("  a_{l} = {by_sum}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("local_data");
}
