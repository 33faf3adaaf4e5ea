use num_complex::Complex64;
use tpms_twin::weierstrass::*;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

#[test]
fn find_jump() {
    let tau = 1.563401f64;
    let spec = TwinSpec::new(tau, 3, vec![0.293406, 0.75, 1.206594]).unwrap();
    let a = c(0.293406, tau / 4.0);
    let b = c(0.293406, 0.0);
    let n = 20000;
    let us: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let vals = debug_singular_integrand(&spec, a, b, &us);
    let mut worst = (0.0f64, 0.0f64);
    for i in 1..vals.len() {
        let d0 = (vals[i][0] - vals[i - 1][0]).norm()
            + (vals[i][1] - vals[i - 1][1]).norm();
        if d0 > worst.1 {
            worst = (us[i], d0);
        }
    }
    println!("max neighbor jump {:.3e} at u = {}", worst.1, worst.0);
    // print a few samples around the jump
    let u0 = worst.0;
    let fine: Vec<f64> = (-5..=5).map(|k| u0 + k as f64 * 1e-7).filter(|&u| u > 0.0 && u <= 1.0).collect();
    let fv = debug_singular_integrand(&spec, a, b, &fine);
    for (u, v) in fine.iter().zip(fv) {
        println!("u = {u:.9}: phi1 = {:+.12} {:+.12}i", v[0].re, v[0].im);
    }
}
