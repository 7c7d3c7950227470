use std::path::Path;

use zygdist::approximation::{
    continuous_decompose, dyadic_distance_report, measure_truncate, sobolev_truncate,
};
use zygdist::functionals::{
    auto_epsilon_grid, c_functional, cone_counting_field, dyadic_zygmund_seminorm,
    estimate_threshold, lp_norm, strichartz_sup, truncated_quadratic, zygmund_seminorm,
    zygmund_seminorm_with, DistanceProfile, EvalMode,
};
use zygdist::generate::{self, Kind};
use zygdist::io::{
    FunctionFile, InputDigest, InputFile, MeasureFile, Metadata, Method, ProfileTable, Report,
    Status, TidyRow,
};
use zygdist::measures::NormMode;
use zygdist::{DyadicCube, DyadicMartingale, Error, Function, Measure, Result};

use crate::{EpsGrid, KindName, ProfileArgs};

const DYADIC_SUP: &str = "sup over dyadic base intervals of the root";

fn load(report: &mut Report, path: &Path) -> Result<InputFile> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    report.input = Some(InputDigest::of(&path.display().to_string(), &bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Input(format!("{} is not UTF-8 text", path.display())))?;
    InputFile::parse(&text)
}

fn load_function(report: &mut Report, path: &Path) -> Result<Function> {
    match load(report, path)? {
        InputFile::Function(f) => f.to_function(),
        InputFile::Measure(_) => Err(Error::Input("expected a function file".into())),
    }
}

fn load_measure(report: &mut Report, path: &Path) -> Result<Measure> {
    match load(report, path)? {
        InputFile::Measure(m) => m.to_measure(),
        InputFile::Function(_) => Err(Error::Input("expected a measure file".into())),
    }
}

/// Requested depths, or `N - 4, N - 2, N` clipped to `[1, max]`.
fn depths(args: &ProfileArgs, max: u32) -> Result<Vec<u32>> {
    let mut depths = if args.depths.is_empty() {
        [4, 2, 0]
            .iter()
            .filter(|&&k| max > k)
            .map(|&k| max - k)
            .collect()
    } else {
        args.depths.clone()
    };
    depths.sort_unstable();
    depths.dedup();
    if let Some(&d) = depths.iter().find(|&&d| d < 1 || d > max) {
        return Err(Error::Input(format!("depth {d} is outside 1..={max} for this input")));
    }
    if depths.len() < 3 {
        return Err(Error::Input(
            "threshold estimation needs at least three distinct depths".into(),
        ));
    }
    Ok(depths)
}

fn epsilons(grid: &EpsGrid, scale: f64) -> Vec<f64> {
    match grid {
        EpsGrid::Auto => auto_epsilon_grid(scale),
        EpsGrid::List(v) => v.clone(),
    }
}

fn grid_name(grid: &EpsGrid) -> &'static str {
    match grid {
        EpsGrid::Auto => "auto: sqrt 2 steps from 2^-10 to 2 times the dyadic seminorm",
        EpsGrid::List(_) => "user list",
    }
}

/// Attaches the threshold estimate, marking the report inconclusive if the
/// rule finds none.
fn with_threshold(report: &mut Report, mut profile: DistanceProfile, tau: f64) -> Result<()> {
    match estimate_threshold(&profile, tau) {
        Ok(est) => {
            report.estimate(
                &format!("threshold {}", profile.functional),
                est.epsilon,
                Method::new(&est.method, "epsilon grid", &est.depths).with_tau(tau),
            );
            profile.estimate = Some(est);
        }
        Err(Error::Inconclusive) => report.status = Status::Inconclusive,
        Err(e) => return Err(e),
    }
    report.profiles.push(ProfileTable::from(&profile));
    Ok(())
}

fn single_depth_table(functional: &str, note: &str, depth: u32, rows: &[(f64, f64)]) -> ProfileTable {
    ProfileTable {
        functional: functional.to_string(),
        note: note.to_string(),
        rows: rows
            .iter()
            .map(|&(epsilon, value)| TidyRow {
                epsilon,
                depth,
                value,
            })
            .collect(),
        estimate: None,
    }
}

pub fn seminorm(report: &mut Report, path: &Path, interpolate: bool) -> Result<()> {
    match load(report, path)? {
        InputFile::Function(file) => {
            let f = file.to_function()?;
            let n = [f.depth()];
            report.estimate(
                "zygmund seminorm",
                zygmund_seminorm(&f),
                Method::new("max |Delta_2 f(x, h)|", "grid points and steps", &n),
            );
            report.estimate(
                "dyadic zygmund seminorm",
                dyadic_zygmund_seminorm(&f),
                Method::new("max |Delta_2 f(I)|", "dyadic intervals", &n),
            );
            if interpolate {
                report.estimate(
                    "zygmund seminorm",
                    zygmund_seminorm_with(&f, EvalMode::Interpolate { oversample: 1 }),
                    Method::new("max |Delta_2 f(x, h)|", "linear interpolation, 2x finer", &n),
                );
            }
        }
        InputFile::Measure(file) => {
            let mu = file.to_measure()?;
            let n = [mu.depth()];
            report.estimate(
                "measure zygmund norm",
                mu.zygmund_norm(NormMode::ContinuousGrid),
                Method::new("max |Delta_2 mu(x, h)|", "half-cell centres, whole-cell sides", &n),
            );
            report.estimate(
                "dyadic measure zygmund norm",
                mu.zygmund_norm(NormMode::Dyadic),
                Method::new("max child density jump", "dyadic cubes", &n),
            );
        }
    }
    Ok(())
}

pub fn strichartz(report: &mut Report, path: &Path, args: &ProfileArgs) -> Result<()> {
    let f = load_function(report, path)?;
    let depths = depths(args, f.depth())?;
    for &d in &depths {
        report.estimate(
            "strichartz sup",
            strichartz_sup(&f, d)?,
            Method::new("box lattice", DYADIC_SUP, &[d]),
        );
    }
    let eps = epsilons(&args.eps_grid, dyadic_zygmund_seminorm(&f));
    let profile = DistanceProfile::tabulate("C", &eps, &depths, DYADIC_SUP, |e, d| {
        c_functional(&f, e, d)
    })?;
    with_threshold(report, profile, args.tau)
}

pub fn distance_ibmo(report: &mut Report, path: &Path, args: &ProfileArgs) -> Result<()> {
    let f = load_function(report, path)?;
    let depths = depths(args, f.depth())?;
    let eps = epsilons(&args.eps_grid, dyadic_zygmund_seminorm(&f));
    let result = dyadic_distance_report(&f, &eps, &depths, args.tau)?;
    let epsilons = result.profile.epsilons.clone();
    let rows: Vec<(f64, f64)> = epsilons
        .iter()
        .copied()
        .zip(result.measured_distance.iter().copied())
        .collect();
    let worst = rows.iter().find(|(e, d)| d > e);
    report.check(
        "truncation distance <= epsilon",
        worst.is_none(),
        match worst {
            Some((e, d)) => format!("distance {d} at epsilon {e}"),
            None => format!("{} grid values", rows.len()),
        },
    );
    report.profiles.push(single_depth_table(
        "measured dyadic distance",
        "||f - b_epsilon||_*d, b_epsilon from jumps above epsilon / 2",
        f.depth(),
        &rows,
    ));
    with_threshold(report, result.profile, args.tau)
}

pub fn decompose(
    report: &mut Report,
    path: &Path,
    grid: &EpsGrid,
    alphas: Option<u32>,
) -> Result<()> {
    let f = load_function(report, path)?;
    let points = alphas.unwrap_or(1 << f.depth().min(10));
    let eps = epsilons(grid, dyadic_zygmund_seminorm(&f));
    let n = [f.depth()];
    let mut ratios = Vec::new();
    let mut exact = true;
    let mut bounded = true;
    for &e in &eps {
        let d = continuous_decompose(&f, e, points)?;
        let whole = f.extend_to(d.b.root())?;
        let sum = d.b.zip_with(&d.t, |x, y| x + y)?;
        exact &= sum.values() == whole.values();
        bounded &= d.max_translate_distance <= e;
        let method = Method::new(
            &format!("epsilon = {e}, {points} translates in [-1, 1)"),
            grid_name(grid),
            &n,
        );
        report.estimate("max translate distance", d.max_translate_distance, method.clone());
        report.estimate("zygmund seminorm of t", d.measured_t, method.clone());
        report.estimate("zygmund seminorm of b", d.measured_b, method);
        ratios.push((e, d.measured_t / e));
    }
    report.check("b + t = f", exact, "bitwise on the output grid");
    report.check(
        "translate distance <= epsilon",
        bounded,
        "||t^(alpha)||_*d for every translate",
    );
    report.profiles.push(single_depth_table(
        "||t||_* / epsilon",
        "grid Zygmund seminorm of the remainder",
        f.depth(),
        &ratios,
    ));
    Ok(())
}

pub fn sobolev(report: &mut Report, path: &Path, args: &ProfileArgs, p: f64) -> Result<()> {
    let f = load_function(report, path)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Input("p must satisfy 1 < p < infinity".into()));
    }
    let depths = depths(args, f.depth() - 1)?;
    let s = DyadicMartingale::average_growth(&f);
    let eps = epsilons(&args.eps_grid, dyadic_zygmund_seminorm(&f));
    let cone = DistanceProfile::tabulate(
        "cone counting L^p",
        &eps,
        &depths,
        &format!("p = {p}, cone lattice at cell left endpoints"),
        |e, d| lp_norm(&cone_counting_field(&f, e, d)?, p),
    )?;
    let quadratic = DistanceProfile::tabulate(
        "truncated quadratic L^p",
        &eps,
        &depths,
        &format!("p = {p}, jumps above epsilon"),
        |e, d| lp_norm(&truncated_quadratic(&s.prefix(d), e), p),
    )?;
    let star = s.star_norm();
    let mut close = true;
    let mut dominated = true;
    for &e in &eps {
        let b = sobolev_truncate(&s, e)?;
        close &= s.sub(&b)?.star_norm() <= e;
        let count = s.jump_count_above(e);
        dominated &= b
            .quadratic_characteristic_sq()
            .iter()
            .zip(&count)
            .all(|(&q, &c)| q <= star * star * c);
    }
    report.check("||S - B||_* <= epsilon", close, "every grid epsilon");
    report.check(
        "<B> <= ||S||_* D(f, epsilon)",
        dominated,
        "pointwise on the leaves, every grid epsilon",
    );
    with_threshold(report, cone, args.tau)?;
    with_threshold(report, quadratic, args.tau)
}

/// All dyadic cubes of `[0, 1)^dim` at one generation, row-major.
fn cubes(dim: u32, generation: u32) -> impl Iterator<Item = DyadicCube> {
    let side = 1i64 << generation;
    (0..side.pow(dim)).map(move |mut p| {
        let mut offset = vec![0i64; dim as usize];
        for slot in offset.iter_mut().rev() {
            *slot = p % side;
            p /= side;
        }
        DyadicCube::new(generation as i32, offset)
    })
}

pub fn measure(report: &mut Report, path: &Path, args: &ProfileArgs) -> Result<()> {
    let mu = load_measure(report, path)?;
    let depths = depths(args, mu.depth())?;
    let eps = epsilons(&args.eps_grid, mu.zygmund_norm(NormMode::Dyadic));
    let d = DistanceProfile::tabulate("D measure", &eps, &depths, DYADIC_SUP, |e, d| {
        mu.d_measure(e, d)
    })?;
    let c = DistanceProfile::tabulate("C measure", &eps, &depths, DYADIC_SUP, |e, d| {
        mu.c_measure(e, d)
    })?;
    let mut rows = Vec::new();
    let mut worst = None;
    for &e in &eps {
        let diff = mu.sub(&measure_truncate(&mu, e)?)?;
        let mut largest = 0.0f64;
        for g in 0..mu.depth() {
            for q in cubes(mu.dim(), g) {
                largest = largest.max(diff.delta2_max(&q)?);
            }
        }
        if largest > e && worst.is_none() {
            worst = Some((e, largest));
        }
        rows.push((e, diff.zygmund_norm(NormMode::Dyadic)));
    }
    report.check(
        "delta2_max(mu - nu, Q) <= epsilon",
        worst.is_none(),
        match worst {
            Some((e, v)) => format!("{v} at epsilon {e}"),
            None => "every dyadic cube, every grid epsilon".to_string(),
        },
    );
    report.profiles.push(single_depth_table(
        "measured dyadic measure distance",
        "||mu - nu_epsilon||_*d",
        mu.depth(),
        &rows,
    ));
    with_threshold(report, d, args.tau)?;
    with_threshold(report, c, args.tau)
}

pub fn kind(name: KindName, delta: f64, levels: u32, c: f64, r: u32, dim: u32, theta: Vec<f64>) -> Kind {
    match name {
        KindName::Linear => Kind::Linear,
        KindName::Hat => Kind::Hat,
        KindName::Square => Kind::Square,
        KindName::Weierstrass => Kind::Weierstrass { levels },
        KindName::RandomJumps => Kind::RandomJumps { delta },
        KindName::SingleBranch => Kind::SingleBranch { delta },
        KindName::Lacunary => Kind::Lacunary { c, r },
        KindName::Cascade => Kind::Cascade { dim, theta },
    }
}

pub fn generate(kind: &Kind, depth: u32, seed: u64) -> Result<String> {
    let metadata = Some(Metadata::generated(kind, seed));
    if kind.is_measure() {
        let mu = generate::measure(kind, depth, seed)?;
        Ok(MeasureFile::new(&mu, metadata).render())
    } else {
        let f = generate::function(kind, depth, seed)?;
        Ok(FunctionFile::new(&f, metadata).render())
    }
}
