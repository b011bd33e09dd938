use palimpsest_core::exact::{self, KPolicy};
use palimpsest_core::model::ModelParams;
use std::time::Instant;

fn main() {
    let p = ModelParams::new(20_000, 0.05, 0.5, 0.5, 0.05, 3).unwrap();
    let t0 = Instant::now();
    let ev = exact::evolve(&p, 100, KPolicy::Mixed).unwrap();
    println!("evolve t_max=100 mixed: {:.1}s, v_max={}", t0.elapsed().as_secs_f64(), ev.v_max());
    let curves = exact::curves_from_evolution(&ev, 117);
    let max12 = (0..12).map(|t| curves.pe0[t].max(curves.pe1[t])).fold(0.0f64, f64::max);
    println!("max(pe0,pe1) for t<=12: {max12:.3e}");
    let cross = curves.pe1.iter().position(|&x| x > 0.5).map(|i| i + 1);
    println!("first t with pe1>0.5: {cross:?}");
    let t1 = Instant::now();
    let ts = exact::t_star_from_evolution(&ev, 1e-4);
    println!("t_star(1e-4) = {:?}  [{:.1}s]", ts, t1.elapsed().as_secs_f64());
    for t in [1usize, 5, 12, 13, 15, 40, 60, 70, 80, 100] {
        println!("t={t:3}  pe0={:.3e}  pe1={:.3e}", curves.pe0[t-1], curves.pe1[t-1]);
    }
}
