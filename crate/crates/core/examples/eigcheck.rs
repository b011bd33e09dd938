use palimpsest_core::exact::{build_forgetting_matrix, build_learning_matrices, closed_form_spectrum, eigenvalues, MatrixKind};
use palimpsest_core::model::ModelParams;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(20260809);
    let mut worst_f: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    for _ in 0..20 {
        let f = rng.gen_range(0.05..=0.5);
        let qp = rng.gen_range(0.1..=0.5);
        let q01 = rng.gen_range(0.1..=0.5);
        let q10 = rng.gen_range(0.0..=0.5);
        let p = ModelParams::new(1000, f, qp, q01, q10, 1).unwrap();
        for k in [1u32, 5, 10, 20] {
            let m = build_forgetting_matrix(&p, k).unwrap();
            let got = eigenvalues(&m);
            let want = closed_form_spectrum(&p, k, MatrixKind::Forgetting);
            let err = got.iter().zip(&want).map(|(g, w)| ((g - w) / w).abs()).fold(0.0f64, f64::max);
            worst_f = worst_f.max(err);
            let (p0, p1) = build_learning_matrices(&p, k).unwrap();
            let e0 = eigenvalues(&p0).iter().zip(closed_form_spectrum(&p, k, MatrixKind::LearningNonselective).iter()).map(|(g,w)| ((g-w)/w).abs()).fold(0.0f64, f64::max);
            let e1 = eigenvalues(&p1).iter().zip(closed_form_spectrum(&p, k, MatrixKind::LearningSelective).iter()).map(|(g,w)| ((g-w)/w).abs()).fold(0.0f64, f64::max);
            worst_l = worst_l.max(e0).max(e1);
        }
    }
    println!("worst forgetting: {worst_f:.3e}");
    println!("worst learning:   {worst_l:.3e}");
}
