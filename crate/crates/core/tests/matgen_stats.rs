use semiring_dnn::matgen::{gen_input, gen_weight, gen_weight_with, GenSpec, Sampling};
use semiring_dnn::matrix::{dense_mxm_baseline, CsrMatrix, DenseMatrix};
use std::time::Instant;

#[test]
fn mean_nnz_tracks_density() {
    let runs = 100;
    let total: usize = (0..runs)
        .map(|seed| gen_weight(&GenSpec::new(1024, 64.0, seed).unwrap()).unwrap().nnz())
        .sum();
    let mean = total as f64 / runs as f64;
    // Binomial(1024², 1/64): sd of the mean over 100 runs is about 12.7.
    assert!((mean - 16384.0).abs() < 100.0, "mean nnz {mean}");
}

#[test]
fn extreme_sparsity_has_about_one_entry() {
    let runs = 200;
    let total: usize = (0..runs)
        .map(|seed| gen_weight(&GenSpec::new(512, 262144.0, seed).unwrap()).unwrap().nnz())
        .sum();
    let mean = total as f64 / runs as f64;
    assert!((0.7..1.3).contains(&mean), "mean nnz {mean}");
}

#[test]
fn sampling_paths_agree_in_distribution() {
    for is in [128.0, 1024.0] {
        let mut sums = [0usize; 2];
        for seed in 0..40 {
            let spec = GenSpec::new(512, is, seed).unwrap();
            sums[0] += gen_weight_with(&spec, Sampling::PerEntry).unwrap().nnz();
            sums[1] += gen_weight_with(&spec, Sampling::GeometricSkip).unwrap().nnz();
        }
        let want = 40.0 * 512.0 * 512.0 / is;
        for s in sums {
            assert!((s as f64 - want).abs() < 0.05 * want, "IS {is}: {s} vs {want}");
        }
    }
}

#[test]
fn weight_and_input_means() {
    let w = gen_weight(&GenSpec::new(400, 1.0, 3).unwrap()).unwrap();
    assert_eq!(w.nnz(), 400 * 400);
    let mean = w.values().iter().map(|&v| v as f64).sum::<f64>() / w.nnz() as f64;
    assert!((0.95..=1.05).contains(&mean), "weight mean {mean}");
    assert!(w.values().iter().all(|&v| (-1.0..3.0).contains(&v) && v != 0.0));

    let x = gen_input(&GenSpec::new(2048, 1.0, 3).unwrap()).unwrap();
    assert_eq!(x.shape(), (2048, 64));
    let mean = x.data().iter().map(|&v| v as f64).sum::<f64>() / x.data().len() as f64;
    assert!((0.48..=0.52).contains(&mean), "input mean {mean}");
}

#[test]
fn memory_is_proportional_to_nnz() {
    let m = 512;
    for is in [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0] {
        let w = gen_weight(&GenSpec::new(m, is, 5).unwrap()).unwrap();
        assert_eq!(w.storage_bytes(), CsrMatrix::bytes_for(m, w.nnz()));
        let ratio = w.storage_bytes() as f64 / DenseMatrix::bytes_for(m, m) as f64;
        let bound = 3.0 / is + ((m + 1) * 4) as f64 / (4 * m * m) as f64;
        assert!(ratio <= bound, "IS {is}: {ratio} > {bound}");
    }
}

fn time_product(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    dense_mxm_baseline(a, b).unwrap();
    (0..5)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(dense_mxm_baseline(a, b).unwrap());
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn dense_baseline_ignores_zeros() {
    let n = 512;
    let w = gen_weight(&GenSpec::new(n, 1.0, 9).unwrap()).unwrap();
    let full = semiring_dnn::matrix::to_dense(&w.clone().into(), 0.0);
    // 99% of entries zeroed.
    let sparse = semiring_dnn::matrix::to_dense(
        &gen_weight(&GenSpec::new(n, 100.0, 9).unwrap()).unwrap().into(),
        0.0,
    );
    let y = gen_input(&GenSpec::new(n, 1.0, 9).unwrap()).unwrap();
    let t_full = time_product(&full, &y);
    let t_sparse = time_product(&sparse, &y);
    let ratio = t_sparse / t_full;
    assert!((0.8..=1.25).contains(&ratio), "dense {t_full}s vs 99% zero {t_sparse}s");
}
