//! Numerical checks of the inequalities behind the distance estimates.
//!
//! Sampled checks draw every configuration from its own ChaCha8 stream
//! `(seed, sample index)`, so serial and parallel runs agree bit for bit.
//! Scales are log-uniform in `h'`, `h' - h` and `|x - t|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, Filtration, RealInterval};
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::functionals::{
    auto_epsilon_grid, c_functional, d_functional, delta1_at, delta2_at, dyadic_zygmund_seminorm, strichartz_sup,
    zygmund_seminorm, DistanceProfile,
};
use crate::martingale::DyadicMartingale;
use crate::measures::{GridMeasure, NormMode};
use crate::scalar::{exact_pow2, Exact, Scalar};

/// Sampled configuration `(x, h)` against `(t, h')`, in the units of the
/// underlying grid (`x`, `t` are coordinates, `h`, `h'` sides or heights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub h: f64,
    pub h_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub check: String,
    pub max_ratio: f64,
    pub argmax: Option<Configuration>,
    pub argmax_depth: u32,
    pub samples: usize,
    pub seed: u64,
    pub depths: (u32, u32),
    pub coarse_max: f64,
    pub fine_max: f64,
    /// `fine_max / coarse_max`, 1 when both vanish.
    pub stability: f64,
    pub norm: (f64, f64),
}

impl RatioReport {
    pub fn is_stable(&self, factor: f64) -> bool {
        self.max_ratio.is_finite() && self.stability <= factor
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Integer in `[lo, hi]` with `ln` uniform on `[ln lo, ln (hi + 1))`.
fn log_uniform(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    if hi <= lo {
        return lo;
    }
    let (a, b) = ((lo as f64).ln(), ((hi + 1) as f64).ln());
    let u: f64 = rng.gen();
    ((a + u * (b - a)).exp().floor() as i64).clamp(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stencil {
    Modulus,
    EqualStep,
    EqualCentre,
    FirstDifference,
}

impl Stencil {
    fn name(self) -> &'static str {
        match self {
            Stencil::Modulus => "modulus",
            Stencil::EqualStep => "equal-step",
            Stencil::EqualCentre => "equal-centre",
            Stencil::FirstDifference => "first-difference",
        }
    }
}

/// Lattice configuration `(x, t, h, h')` in grid steps on `[0, 2^res]`.
fn sample_stencil(kind: Stencil, res: u32, rng: &mut ChaCha8Rng) -> (i64, i64, i64, i64) {
    let l = 1i64 << res;
    let (h, hp, d) = match kind {
        Stencil::Modulus => {
            let hp = log_uniform(rng, 3, l / 4);
            let gap = log_uniform(rng, 1, hp - 1);
            (hp - gap, hp, log_uniform(rng, 1, (hp - 1) / 2))
        }
        Stencil::EqualStep => {
            let h = log_uniform(rng, 3, l / 4);
            (h, h, log_uniform(rng, 1, (h - 1) / 2))
        }
        Stencil::EqualCentre => {
            let hp = log_uniform(rng, 2, l / 4);
            let gap = log_uniform(rng, 1, hp - 1);
            (hp - gap, hp, 0)
        }
        Stencil::FirstDifference => {
            let h = log_uniform(rng, 1, l / 4);
            (h, h, log_uniform(rng, h / 2 + 1, l / 2))
        }
    };
    let (lo, hi) = match kind {
        Stencil::FirstDifference => (0, l - h - d),
        _ => (hp, l - hp - d),
    };
    let a = rng.gen_range(lo..=hi);
    if rng.gen::<bool>() {
        (a, a + d, h, hp)
    } else {
        (a + d, a, h, hp)
    }
}

fn bracket(kind: Stencil, h: f64, hp: f64, d: f64) -> f64 {
    let centre = |h: f64, hp: f64| {
        if hp > h {
            (hp - h) / hp * (1.0 + (hp / (hp - h)).ln())
        } else {
            0.0
        }
    };
    let shift = |d: f64, h: f64| if d > 0.0 { d / h * (h / d + 1.0).ln() } else { 0.0 };
    match kind {
        Stencil::Modulus => centre(h, hp) + shift(d, hp),
        Stencil::EqualStep => shift(d, h),
        Stencil::EqualCentre => centre(h, hp),
        Stencil::FirstDifference => (d / h + 1.0).ln(),
    }
}

fn ratio(numerator: f64, scale: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else if scale > 0.0 {
        numerator / scale
    } else {
        f64::INFINITY
    }
}

/// `(max ratio, argmax index, argmax configuration)` over `samples` draws.
fn sampled_max(
    samples: usize,
    seed: u64,
    eval: impl Fn(&mut ChaCha8Rng) -> (f64, Configuration) + Sync,
) -> (f64, Option<Configuration>) {
    let best = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (r, c) = eval(&mut stream(seed, i));
            (r, i, c)
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        });
    match best {
        Some((r, _, c)) => (r, Some(c)),
        None => (0.0, None),
    }
}

fn stencil_max(
    f: &SampledFunction<f64>,
    kind: Stencil,
    samples: usize,
    seed: u64,
) -> Result<(f64, Option<Configuration>, f64)> {
    if f.root() != DyadicInterval::UNIT {
        return Err(Error::param("f", "sampled checks need a function on [0, 1]"));
    }
    let res = f.resolution();
    if res < 4 {
        return Err(Error::param("depth", "sampled checks need depth >= 4"));
    }
    let norm = zygmund_seminorm(f);
    let step = f.step();
    let (max, arg) = sampled_max(samples, seed, |rng| {
        let (x, t, h, hp) = sample_stencil(kind, res, rng);
        let numerator = match kind {
            Stencil::FirstDifference => (delta1_at(f, x, h).expect("inside")
                - delta1_at(f, t, h).expect("inside"))
            .abs(),
            _ => (delta2_at(f, x, h).expect("inside") - delta2_at(f, t, hp).expect("inside"))
                .abs(),
        };
        let b = bracket(kind, h as f64, hp as f64, (x - t).abs() as f64);
        let config = Configuration {
            x: vec![x as f64 * step],
            t: vec![t as f64 * step],
            h: h as f64 * step,
            h_prime: hp as f64 * step,
        };
        (ratio(numerator, norm * b), config)
    });
    Ok((max, arg, norm))
}

fn doubled<F, M>(
    check: &str,
    depth: u32,
    samples: usize,
    seed: u64,
    build: impl Fn(u32) -> Result<F>,
    run: M,
) -> Result<RatioReport>
where
    M: Fn(&F, usize, u64) -> Result<(f64, Option<Configuration>, f64)>,
{
    let coarse = run(&build(depth)?, samples, seed)?;
    let fine = run(&build(2 * depth)?, samples, seed)?;
    let stability = if coarse.0 == 0.0 {
        if fine.0 == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        fine.0 / coarse.0
    };
    let (max_ratio, argmax, argmax_depth) = if fine.0 > coarse.0 {
        (fine.0, fine.1, 2 * depth)
    } else {
        (coarse.0, coarse.1, depth)
    };
    Ok(RatioReport {
        check: check.to_string(),
        max_ratio,
        argmax,
        argmax_depth,
        samples,
        seed,
        depths: (depth, 2 * depth),
        coarse_max: coarse.0,
        fine_max: fine.0,
        stability,
        norm: (coarse.2, fine.2),
    })
}

fn stencil_report(
    kind: Stencil,
    f: impl Fn(u32) -> Result<SampledFunction<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    doubled(kind.name(), depth, samples, seed, f, |g, n, s| {
        stencil_max(g, kind, n, s)
    })
}

/// Variation of `Delta_2 f` against
/// `((h'-h)/h')(1 + log(h'/(h'-h))) + (|x-t|/h') log(h'/|x-t| + 1)`, for
/// `h' > h` and `|x - t| < h'/2`, at depths `N` and `2N`.
pub fn verify_modulus_1d(
    f: impl Fn(u32) -> Result<SampledFunction<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    stencil_report(Stencil::Modulus, f, depth, samples, seed)
}

/// `h' = h`: against `(|x-t|/h) log(h/|x-t| + 1)`.
pub fn verify_equal_step(
    f: impl Fn(u32) -> Result<SampledFunction<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    stencil_report(Stencil::EqualStep, f, depth, samples, seed)
}

/// `t = x`: against `((h'-h)/h')(1 + log(h'/(h'-h)))`.
pub fn verify_equal_centre(
    f: impl Fn(u32) -> Result<SampledFunction<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    stencil_report(Stencil::EqualCentre, f, depth, samples, seed)
}

/// `|Delta_1 f(x, h) - Delta_1 f(t, h)|` against `log(|x-t|/h + 1)` for
/// `|x - t| > h/2`.
pub fn verify_first_diff(
    f: impl Fn(u32) -> Result<SampledFunction<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    stencil_report(Stencil::FirstDifference, f, depth, samples, seed)
}

fn measure_max(
    mu: &GridMeasure<f64>,
    samples: usize,
    seed: u64,
) -> Result<(f64, Option<Configuration>, f64)> {
    let side = 1i64 << (mu.depth() + 1);
    if side < 32 {
        return Err(Error::param("depth", "sampled checks need depth >= 4"));
    }
    let dim = mu.dim() as usize;
    let norm = mu.zygmund_norm(NormMode::ContinuousGrid);
    let unit = 1.0 / side as f64;
    let (max, arg) = sampled_max(samples, seed, |rng| {
        let hp = 2 * log_uniform(rng, 2, side / 8);
        let h = hp - 2 * log_uniform(rng, 1, hp / 2 - 1);
        let r = if h >= 4 && rng.gen_ratio(3, 4) {
            log_uniform(rng, 1, (h - 1) / 2)
        } else {
            0
        };
        let axis = rng.gen_range(0..dim);
        let mut x = vec![0i64; dim];
        let mut t = vec![0i64; dim];
        for i in 0..dim {
            let reach = if i == axis { r } else { 0 };
            x[i] = rng.gen_range(hp / 2..=side - hp / 2 - reach);
            t[i] = x[i];
            if i == axis {
                if rng.gen::<bool>() {
                    t[i] += r;
                } else {
                    x[i] += r;
                }
            }
        }
        let numerator = (mu.delta2_units(&x, h) - mu.delta2_units(&t, hp)).abs();
        let (hf, gap, rf) = (h as f64, (hp - h) as f64, r as f64);
        let mut b = gap / hf * (1.0 + (hf / gap + 1.0).ln());
        if r > 0 {
            b += rf / hf * (hf / rf + 1.0).ln();
        }
        let config = Configuration {
            x: x.iter().map(|&v| v as f64 * unit).collect(),
            t: t.iter().map(|&v| v as f64 * unit).collect(),
            h: hf * unit,
            h_prime: hp as f64 * unit,
        };
        (ratio(numerator, norm * b), config)
    });
    Ok((max, arg, norm))
}

/// Measure analogue of [`verify_modulus_1d`]: `h' > h`, `|x - t| < h/2`,
/// against `((h'-h)/h)(1 + log(h/(h'-h) + 1)) + (|x-t|/h) log(h/|x-t| + 1)`.
/// Cubes `Q(x, h')` and `Q(t, h')` stay inside the unit cube; `t` differs
/// from `x` along one axis.
pub fn verify_measure_modulus(
    mu: impl Fn(u32) -> Result<GridMeasure<f64>>,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RatioReport> {
    doubled("measure-modulus", depth, samples, seed, mu, measure_max)
}

/// Exhaustive check of `|Delta_1 f(I) - Delta_1 f(J)| <= ||f||_*d dist(I, J)`
/// over distinct dyadic `I, J` of `[0, 1)` with generations up to `depth`.
pub fn verify_dyadic_distance_bound(f: &SampledFunction<f64>, depth: u32) -> Result<RatioReport> {
    if depth > 6 {
        return Err(Error::param("depth", "exhaustive check is limited to depth 6"));
    }
    if f.root() != DyadicInterval::UNIT || depth > f.depth() {
        return Err(Error::param("f", "needs a function on [0, 1] at least as deep"));
    }
    let norm = dyadic_zygmund_seminorm(f);
    let intervals: Vec<DyadicInterval> = (0..=depth as i32)
        .flat_map(|g| (0..(1i64 << g)).map(move |k| DyadicInterval::new(g, k)))
        .collect();
    let res = f.resolution();
    let slope = |i: &DyadicInterval| {
        let len = 1i64 << (res as i32 - i.generation);
        delta1_at(f, i.offset * len, len).expect("inside the root")
    };
    let mut best = (0.0, None);
    let mut pairs = 0usize;
    for a in &intervals {
        for b in &intervals {
            if a == b {
                continue;
            }
            pairs += 1;
            let numerator = (slope(a) - slope(b)).abs();
            let r = ratio(numerator, norm * a.distance(b) as f64);
            if r > best.0 {
                let conf = |i: &DyadicInterval| {
                    let iv = i.interval();
                    (iv.left().to_f64_lossy(), iv.length().to_f64_lossy())
                };
                let ((xa, ha), (xb, hb)) = (conf(a), conf(b));
                best = (
                    r,
                    Some(Configuration {
                        x: vec![xa],
                        t: vec![xb],
                        h: ha,
                        h_prime: hb,
                    }),
                );
            }
        }
    }
    Ok(RatioReport {
        check: "dyadic-distance".to_string(),
        max_ratio: best.0,
        argmax: best.1,
        argmax_depth: f.depth(),
        samples: pairs,
        seed: 0,
        depths: (depth, depth),
        coarse_max: best.0,
        fine_max: best.0,
        stability: 1.0,
        norm: (norm, norm),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredecessorRow {
    pub k: u32,
    pub hits: usize,
    pub measure: f64,
    pub standard_error: f64,
    /// `standard_error / measure`, 0 without hits.
    pub relative_error: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredecessorReport {
    pub interval: (f64, f64),
    pub radius: u32,
    /// `2^-(n+1) < |I| <= 2^-n`.
    pub n: i32,
    /// `2^(m-1) < R <= 2^m`.
    pub m: u32,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<PredecessorRow>,
    /// Sum of the row measures; `2 R` when the rows cover every outcome.
    pub total: f64,
    pub outside_rows: usize,
}

impl PredecessorReport {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }
}

const ALPHA_BITS: u32 = 40;

/// Monte Carlo measure of `{alpha in [-R, R] : |P_alpha(I, I')| = 2^(k-N)}`
/// for `I'` the right neighbour of `I`, against `2^(m+1) 2^(-k+2)` with a
/// margin of three relative standard errors.
pub fn verify_predecessor_measure(
    interval: &RealInterval,
    radius: u32,
    ks: std::ops::RangeInclusive<u32>,
    samples: usize,
    seed: u64,
) -> Result<PredecessorReport> {
    if radius < 1 {
        return Err(Error::param("radius", "R must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    let len = interval.length();
    let mut n = 0i32;
    while exact_pow2(-n) < len {
        n -= 1;
    }
    while exact_pow2(-(n + 1)) >= len {
        n += 1;
    }
    let m = radius.next_power_of_two().trailing_zeros();
    let neighbour = interval.shift(len);
    let r = Exact::from_integer(radius as i128);
    let denom = Exact::from_integer(1i128 << ALPHA_BITS);
    let ks_vec: Vec<u32> = ks.collect();
    let outcomes: Vec<i64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u: i64 = stream(seed, i).gen_range(0..(1i64 << ALPHA_BITS));
            let alpha = -r + r * Exact::from_integer(2 * u as i128) / denom;
            let p = Filtration::shifted(alpha).common_predecessor(interval, &neighbour);
            n as i64 - p.generation as i64
        })
        .collect();
    let width = 2.0 * radius as f64;
    let total_samples = samples as f64;
    let mut rows = Vec::with_capacity(ks_vec.len());
    let mut covered = 0usize;
    for &k in &ks_vec {
        let hits = outcomes.iter().filter(|&&o| o == k as i64).count();
        covered += hits;
        let p = hits as f64 / total_samples;
        let measure = width * p;
        let standard_error = width * (p * (1.0 - p) / total_samples).sqrt();
        let relative_error = if hits > 0 {
            ((1.0 - p) / (total_samples * p)).sqrt()
        } else {
            0.0
        };
        let bound = f64::powi(2.0, m as i32 + 1) * f64::powi(2.0, 2 - k as i32);
        rows.push(PredecessorRow {
            k,
            hits,
            measure,
            standard_error,
            relative_error,
            bound,
            within_bound: measure <= bound * (1.0 + 3.0 * relative_error),
        });
    }
    Ok(PredecessorReport {
        interval: (
            interval.left().to_f64_lossy(),
            interval.right().to_f64_lossy(),
        ),
        radius,
        n,
        m,
        samples,
        seed,
        total: rows.iter().map(|r| r.measure).sum(),
        rows,
        outside_rows: samples - covered,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdgReport {
    pub p: f64,
    pub members: usize,
    pub skipped: usize,
    /// `||S*||_p / ||<S>||_p` per member that was not skipped.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Only meaningful for `p = 2`: every ratio lies in `[1, 2]`.
    pub within_bounds: Option<bool>,
}

/// `||S*||_p / ||<S>||_p` over an ensemble, with `S*` measured from `S_0`.
/// At `p = 2` the bounds are checked on sums of squares, so dyadic inputs are
/// compared without rounding.
pub fn verify_bdg(ensemble: &[DyadicMartingale<f64>], p: f64) -> Result<BdgReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param("p", "need 1 < p < infinity"));
    }
    let sharp = p == 2.0;
    let mut ratios = Vec::new();
    let mut inside = true;
    let mut skipped = 0;
    for s in ensemble {
        let quad = s.quadratic_characteristic_sq();
        let max = s.maximal_function();
        let q: f64 = quad.iter().map(|v| v.powf(p / 2.0)).sum();
        if q == 0.0 {
            skipped += 1;
            continue;
        }
        let m: f64 = max.iter().map(|v| v.powf(p)).sum();
        if sharp {
            let m2: f64 = max.iter().map(|v| v * v).sum();
            let q2: f64 = quad.iter().sum();
            inside &= q2 <= m2 && m2 <= 4.0 * q2;
        }
        ratios.push((m / q).powf(1.0 / p));
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(BdgReport {
        p,
        members: ensemble.len(),
        skipped,
        ratios,
        min_ratio,
        max_ratio,
        within_bounds: sharp.then_some(inside),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCase {
    pub name: String,
    pub expected_in_ibmo: Option<bool>,
    pub strichartz_bounded: bool,
    pub c_bounded: Vec<bool>,
    pub d_bounded: Vec<bool>,
    pub strichartz: DistanceProfile,
    pub c: DistanceProfile,
    pub d: DistanceProfile,
}

impl ConsistencyCase {
    /// The three tests agree with each other and with the expectation.
    pub fn consistent(&self) -> bool {
        let c = self.c_bounded.iter().all(|&b| b);
        let d = self.d_bounded.iter().all(|&b| b);
        let agree = self.strichartz_bounded == c && c == d;
        agree && self.expected_in_ibmo.map_or(true, |e| e == d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub depths: Vec<u32>,
    pub tau: f64,
    pub cases: Vec<ConsistencyCase>,
    pub mismatches: usize,
}

pub struct SuiteMember<'a> {
    pub name: String,
    pub expected_in_ibmo: Option<bool>,
    pub build: Box<dyn Fn(u32) -> Result<SampledFunction<f64>> + Sync + 'a>,
}

/// Points of [`auto_epsilon_grid`] not below `2^-depth scale`: thresholds
/// that a profile starting at `depth` can resolve.
pub fn resolved_epsilons(scale: f64, depth: u32) -> Vec<f64> {
    let floor = scale * f64::powi(2.0, -(depth as i32));
    auto_epsilon_grid(scale)
        .into_iter()
        .filter(|&e| e >= floor)
        .collect()
}

/// Boundedness in depth of the Strichartz, box-density and counting
/// profiles, each judged by the growth test with tolerance `tau`.
pub fn verify_strichartz_consistency(
    suite: &[SuiteMember<'_>],
    epsilons: &[f64],
    depths: &[u32],
    tau: f64,
) -> Result<ConsistencyReport> {
    let mut cases = Vec::with_capacity(suite.len());
    for member in suite {
        let functions = depths
            .iter()
            .map(|&d| Ok((d, (member.build)(d)?)))
            .collect::<Result<Vec<_>>>()?;
        let at = |d: u32| &functions.iter().find(|(k, _)| *k == d).expect("built").1;
        let strichartz = DistanceProfile::tabulate(
            "strichartz",
            &[0.0],
            depths,
            "epsilon unused",
            |_, d| strichartz_sup(at(d), d),
        )?;
        let c = DistanceProfile::tabulate("C", epsilons, depths, "box lattice", |e, d| {
            c_functional(at(d), e, d)
        })?;
        let d = DistanceProfile::tabulate("D", epsilons, depths, "dyadic", |e, d| {
            d_functional(at(d), e, d)
        })?;
        let case = ConsistencyCase {
            name: member.name.clone(),
            expected_in_ibmo: member.expected_in_ibmo,
            strichartz_bounded: strichartz.is_stable(0, tau),
            c_bounded: (0..c.epsilons.len()).map(|i| c.is_stable(i, tau)).collect(),
            d_bounded: (0..d.epsilons.len()).map(|i| d.is_stable(i, tau)).collect(),
            strichartz,
            c,
            d,
        };
        cases.push(case);
    }
    let mismatches = cases.iter().filter(|c| !c.consistent()).count();
    Ok(ConsistencyReport {
        depths: depths.to_vec(),
        tau,
        cases,
        mismatches,
    })
}
