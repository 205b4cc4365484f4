use stiefel_ldp::family::MeasureFamily;
use stiefel_ldp::ratefn::{self, LogMgf, SolverConfig};

fn main() {
    let cone = MeasureFamily::cone_lp(3.0).unwrap();
    let cfg = SolverConfig::default();
    let lbar = LogMgf::squared(&cone);
    let y: f64 = 0.8;
    // brute force: inf over t2 of sup over (s1, s2) on dense grids
    let mut best_inf = f64::INFINITY;
    let mut best_t2 = 0.0;
    let mut t2: f64 = 0.2;
    while t2 <= 3.0 {
        let tau1 = y * y * f64::powf(t2,(2.0 / 3.0);
        let mut sup = f64::NEG_INFINITY;
        for i in 0..=600 {
            let s1 = -30.0 + 45.0 * i as f64 / 600.0;
            for j in 0..=600 {
                let s2 = -12.0 + (1.0 / 3.0 + 12.0) * j as f64 / 600.0 - 1e-6;
                let v = lbar.eval(s1, s2);
                if v.is_finite() {
                    let obj = s1 * tau1 + s2 * t2 - v;
                    if obj > sup { sup = obj; }
                }
            }
        }
        if sup < best_inf { best_inf = sup; best_t2 = t2; }
        t2 += 0.1;
    }
    println!("oracle J_X({y}) ≈ {best_inf:.6} at t2 ≈ {best_t2:.2}");
    let p = ratefn::j_x(&cone, y, &cfg).unwrap();
    println!("solver J_X({y}) = {:.6} conv={} t2={:?}", p.value, p.converged, p.outer_arg);
    // also the LLN point and a harder point
    for yy in [0.6f64, 0.881, 0.95] {
        let p = ratefn::j_x(&cone, yy, &cfg).unwrap();
        println!("solver J_X({yy}) = {:.6} conv={} t2={:?}", p.value, p.converged, p.outer_arg);
    }
}
