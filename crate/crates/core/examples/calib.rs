use palimpsest_core::{mixture, model::ModelParams, tv_distance};
use std::time::Instant;

fn main() {
    let p = ModelParams::new(1000, 0.1, 0.8, 0.8, 0.2, 1).unwrap();
    let nu_m = mixture::binmix_from_moments(&mixture::fixed_point_moments(&p, 15).unwrap(), 15).unwrap();
    for (target, cap) in [(1e-8, 200_000usize), (3e-9, 400_000), (1e-9, 500_000), (1e-9, 1_000_000)] {
        let t0 = Instant::now();
        let (g, bound) = mixture::stationary_mixture_capped(&p, target, cap);
        let nu_a = mixture::binmix_from_atoms(&g, 15);
        let tv = tv_distance(&nu_a, &nu_m).unwrap();
        println!(
            "target={target:.0e} cap={cap}: atoms={} shift={:.2e} bound={:.2e} tv15={:.2e}  [{:.1}s]",
            g.atoms().len(), g.merge_shift(), bound, tv, t0.elapsed().as_secs_f64()
        );
        // also K=100 comparison vs invariant measure (power iteration)
        let t1 = Instant::now();
        let pi = palimpsest_core::exact::invariant_measure(&p, 100).unwrap();
        let nu100 = mixture::binmix_from_atoms(&g, 100);
        let tv100 = tv_distance(&nu100, &pi).unwrap();
        println!("   tv@K=100 vs power-iteration pi: {:.2e}  [{:.1}s]", tv100, t1.elapsed().as_secs_f64());
    }
}
