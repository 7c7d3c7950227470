use zygdist::generate;
use zygdist::io::{Report, Verification};
use zygdist::verification::{
    verify_bdg, verify_dyadic_distance_bound, verify_equal_centre, verify_equal_step,
    verify_first_diff, verify_measure_modulus, verify_modulus_1d, verify_predecessor_measure,
    resolved_epsilons, verify_strichartz_consistency, RatioReport, SuiteMember,
};
use zygdist::{Exact, Function, RealInterval, Result};

use crate::Suite;

const STABILITY: f64 = 1.5;
const FUNCTION_DEPTH: u32 = 7;

fn takagi(depth: u32) -> Result<Function> {
    generate::lacunary(depth, 1.0, 2)
}

fn record_ratio(report: &mut Report, name: &str, r: RatioReport) {
    report.check(
        &format!("{} {name}", r.check),
        r.is_stable(STABILITY),
        format!(
            "max ratio {} at depths {:?}, stability {}",
            r.max_ratio, r.depths, r.stability
        ),
    );
    report.verification.push(Verification::Ratio(r));
}

fn lemmas(report: &mut Report, seed: u64, samples: usize) -> Result<()> {
    type Build = fn(u32) -> Result<Function>;
    let suite: [(&str, Build); 3] = [
        ("hat", generate::hat),
        ("square", generate::square),
        ("takagi", takagi),
    ];
    for (name, build) in suite {
        record_ratio(report, name, verify_modulus_1d(build, FUNCTION_DEPTH, samples, seed)?);
        record_ratio(report, name, verify_equal_step(build, FUNCTION_DEPTH, samples, seed)?);
        record_ratio(report, name, verify_equal_centre(build, FUNCTION_DEPTH, samples, seed)?);
        record_ratio(report, name, verify_first_diff(build, FUNCTION_DEPTH, samples, seed)?);
    }
    for k in 0..5 {
        let f = generate::random_jumps(6, 0.5, seed + k)?;
        let r = verify_dyadic_distance_bound(&f, 6)?;
        report.check(
            &format!("dyadic-distance random-jumps seed {}", seed + k),
            r.max_ratio <= 1.0,
            format!("max ratio {}", r.max_ratio),
        );
        report.verification.push(Verification::Ratio(r));
    }
    Ok(())
}

fn predecessor(report: &mut Report, seed: u64, samples: usize) -> Result<()> {
    let left = Exact::new(1, 3);
    let interval = RealInterval::new(left, left + Exact::new(1, 16))?;
    for radius in [1, 2, 4] {
        let r = verify_predecessor_measure(&interval, radius, 1..=10, samples, seed)?;
        report.check(
            &format!("common predecessor size R = {radius}"),
            r.all_within_bound(),
            format!("k = 1..10, total {} of {}", r.total, 2 * radius),
        );
        report.verification.push(Verification::Predecessor(r));
    }
    Ok(())
}

fn bdg(report: &mut Report, seed: u64) -> Result<()> {
    let ensemble = (0..100)
        .map(|k| generate::random_martingale(10, seed + k))
        .collect::<Result<Vec<_>>>()?;
    let r = verify_bdg(&ensemble, 2.0)?;
    report.check(
        "BDG p = 2",
        r.within_bounds == Some(true),
        format!("ratios in [{}, {}]", r.min_ratio, r.max_ratio),
    );
    report.verification.push(Verification::Bdg(r));
    Ok(())
}

fn consistency(report: &mut Report, seed: u64) -> Result<()> {
    let suite = vec![
        SuiteMember {
            name: "linear".into(),
            expected_in_ibmo: Some(true),
            build: Box::new(generate::linear),
        },
        SuiteMember {
            name: "hat".into(),
            expected_in_ibmo: Some(true),
            build: Box::new(generate::hat),
        },
        SuiteMember {
            name: "square".into(),
            expected_in_ibmo: Some(true),
            build: Box::new(generate::square),
        },
        SuiteMember {
            name: "random-jumps".into(),
            expected_in_ibmo: Some(false),
            build: Box::new(move |d| generate::random_jumps(d, 0.25, seed)),
        },
        SuiteMember {
            name: "takagi".into(),
            expected_in_ibmo: Some(false),
            build: Box::new(takagi),
        },
    ];
    let depths = [6, 8, 10];
    let r = verify_strichartz_consistency(&suite, &resolved_epsilons(1.0, depths[0]), &depths, 0.1)?;
    report.check(
        "strichartz / C / D agreement",
        r.mismatches == 0,
        format!("{} mismatches over {} inputs", r.mismatches, r.cases.len()),
    );
    report.verification.push(Verification::Consistency(r));
    Ok(())
}

fn measures(report: &mut Report, seed: u64, samples: usize) -> Result<()> {
    let cases: [(&str, u32, u32, Vec<f64>); 3] = [
        ("cascade d=1", 1, 6, vec![0.25]),
        ("cascade d=1 decaying", 1, 6, vec![0.5, 0.25, 0.125]),
        ("cascade d=2", 2, 4, vec![0.25]),
    ];
    for (name, dim, depth, theta) in cases {
        let r = verify_measure_modulus(
            |d| generate::cascade(dim, d, &theta, seed),
            depth,
            samples,
            seed,
        )?;
        record_ratio(report, name, r);
    }
    Ok(())
}

pub fn verify(report: &mut Report, suite: Suite, seed: u64, samples: usize) -> Result<()> {
    report.seed = Some(seed);
    let all = suite == Suite::All;
    if all || suite == Suite::Lemmas {
        lemmas(report, seed, samples)?;
    }
    if all || suite == Suite::Predecessor {
        predecessor(report, seed, samples.max(1))?;
    }
    if all || suite == Suite::Bdg {
        bdg(report, seed)?;
    }
    if all || suite == Suite::Consistency {
        consistency(report, seed)?;
    }
    if all || suite == Suite::Measures {
        measures(report, seed, samples)?;
    }
    Ok(())
}
