use zygdist::generate;
use zygdist::verification::{verify_equal_step, verify_measure_modulus, verify_modulus_1d, RatioReport};

fn in_pool<T: Send>(threads: usize, run: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(run)
}

fn bits(r: &RatioReport) -> String {
    serde_json::to_string(r).unwrap()
}

#[test]
fn ratio_reports_repeat_bit_for_bit() {
    let run = || verify_modulus_1d(generate::hat, 6, 3000, 17).unwrap();
    let (a, b) = (in_pool(1, run), in_pool(4, run));
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.max_ratio.to_bits(), b.max_ratio.to_bits());
    assert_eq!(a.argmax, b.argmax);
}

#[test]
fn reruns_with_the_same_seed_agree() {
    let takagi = |d| generate::lacunary(d, 1.0, 2);
    let a = verify_equal_step(takagi, 6, 500, 1).unwrap();
    assert_eq!(bits(&a), bits(&verify_equal_step(takagi, 6, 500, 1).unwrap()));
    assert_eq!(a.seed, 1);
    assert_eq!(a.samples, 500);
}

#[test]
fn measure_reports_repeat_across_pools() {
    let run = || {
        verify_measure_modulus(|d| generate::cascade(2, d, &[0.25], 3), 4, 1000, 5).unwrap()
    };
    assert_eq!(bits(&in_pool(1, run)), bits(&in_pool(3, run)));
}
