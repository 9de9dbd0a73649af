use std::time::Instant;
use nsbf::charstep::{self, Criterion, SpectraSource};
use nsbf::oracle::{self, presets, ProblemKind};

fn main() {
    let t = Instant::now();
    let ex1 = presets::ex1();
    let ds = oracle::generate_dataset(&ex1, ProblemKind::Ip1, 10, None).unwrap();
    println!("ex1 IP1 data in {:?}", t.elapsed());
    for (k, (rho, mu)) in ds.rho_k.iter().zip(&ds.mu_k).enumerate() {
        println!("k={k} lambda={:14.9} lambda0={:14.9}", (rho*rho).re, (mu*mu).re);
    }

    let source = SpectraSource::TwoSpectra { mu_k: &ds.mu_k, rho_k: &ds.rho_k };
    let candidates: Vec<usize> = (0..=8).collect();
    let probes = charstep::default_p_probes(&ds.rho_k);
    let t = Instant::now();
    let sel = charstep::select_order(&source, ds.b, &candidates, Criterion::R, &probes).unwrap();
    println!("sweep in {:?}; selected N1 = {} (fell back to P: {})", t.elapsed(), sel.n1, sel.fell_back_to_p);
    for e in &sel.sweep {
        println!("N1={:2} R={:10.3e} P={:10.3e} resid={:9.2e} cond={:9.2e}", e.n1, e.r_value, e.p_value, e.residual, e.condition);
    }
    let omega_exact = 10.0 + std::f64::consts::PI + 1.0/6.0;
    println!("omega = {:.12} vs exact {:.12} err {:.3e}",
        sel.approx.omega_hh.re, omega_exact, (sel.approx.omega_hh.re - omega_exact).abs());

    // g0(b) and s0(b) against oracle values via the first-coefficient formulas
    let phi0 = oracle::integrate_solution(&ex1, nsbf::Complex64::default(), oracle::SolutionKind::PhiH, &[1.0]).unwrap();
    let s0 = oracle::integrate_solution(&ex1, nsbf::Complex64::default(), oracle::SolutionKind::S, &[1.0]).unwrap();
    println!("g0(b) fitted {:.8} vs oracle {:.8}", sel.approx.g_nb[0].re, phi0[0].value.re - 1.0);
    println!("s0(b) fitted {:.8} vs oracle {:.8}", sel.approx.s_nb[0].re, 3.0*(s0[0].value.re/1.0 - 1.0));
}
