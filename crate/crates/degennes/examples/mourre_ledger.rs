//! Evaluate the full constants ledger of the limiting-absorption argument on
//! the worked hypotheses c0 = c1 = c2 = 1, I = [2,3] inside J = [1,4],
//! strip height M = 1, then assemble the explicit resolvent bound and print
//! the exact scaling exponent table at alpha = 1/4.

use degennes::mourre::parse_ratio;
use degennes::{lap_bound_from_ledger, ledger, scaling_exponents, Interval, MourreHypotheses};

fn main() -> degennes::Result<()> {
    let hyp = MourreHypotheses {
        c0: 1.0,
        c1: 1.0,
        c2: 1.0,
        interval_i: Interval::new(2.0, 3.0),
        interval_j: Interval::new(1.0, 4.0),
        strip_height: 1.0,
    };
    let led = ledger(&hyp)?;
    println!("sup_J |l+i|   = {:.10}  (sqrt 17)", led.sup_j);
    println!("sup_B |z+i|   = {:.10}  (sqrt 13)", led.sup_b);
    println!("dist(I, J^c)  = {:.10}", led.dist_i_jc);
    println!("eps1          = {:.12}", led.eps1);
    println!("eps2          = {:.12}", led.eps2);
    println!("eps0          = {:.12}", led.eps0);
    println!("c0_tilde      = {:.12}", led.tilde_c0);
    println!("int t^-1/2    = {:.12}  (exactly 2)", led.int_t_inv_sqrt);
    println!("int |ln|^1/2  = {:.12}  (sqrt 2pi)", led.int_sqrt_log);

    // the bound floors D1 >= c0 eps / 4 for eps <= eps1
    let eps = 0.5 * led.eps1;
    let d1 = led.d1(eps, (3.0, 0.5));
    println!("D1({eps:.4}, 3+0.5i) = {d1:.8} >= {:.8}", hyp.c0 * eps / 4.0);

    let lap = lap_bound_from_ledger(&led, 1.0, 1.0, 1.0)?;
    println!("K1 = {:.6}, K2 = {:.6}, K = {:.6}", lap.k1, lap.k2, lap.k);
    println!("C(eps0) = {:.6}, C_final = {:.6}", lap.c_eps0, lap.c_final);

    let t = scaling_exponents(parse_ratio("1/4")?)?;
    println!(
        "alpha = 1/4: c0 ~ h^{}, eps0 ~ h^{}, C_final ~ h^{}",
        t.c0, t.eps0, t.final_exponent
    );
    Ok(())
}
