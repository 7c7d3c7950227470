//! Seminorms and distance functionals.
//!
//! Box functionals integrate over Carleson boxes `I x (0, |I|]` with the
//! lattice of [`crate::dyadic::box_lattice`]: layer `n` is sampled at height
//! `h_n = 2^-(n+1) |I|`, at `x = left + j h_n`, with weight `h_n ln 2`. Every
//! supremum "over all intervals" is taken over the dyadic intervals of the
//! root down to the requested depth.
//!
//! Cone functionals integrate `ds dt / t^2` over the truncated cone
//! `{|x - s| < t < 1}`. Layer `t in [t_n, 2 t_n)`, `t_n = 2^-(n+1)`, is sampled
//! at `t_n` and at `s = x + j t_n / 2` for `|j| <= 3`; exact integration of the
//! cone indicator over each strip gives the weights `1/4` for `|j| <= 2` and
//! `1/12` for `|j| = 3`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::RealInterval;
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::martingale::DyadicMartingale;
use crate::scalar::{Exact, Real, Scalar};

/// A point `(x, h)` of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfplanePoint {
    pub x: Exact,
    pub h: Exact,
}

impl HalfplanePoint {
    pub fn new(x: Exact, h: Exact) -> Result<Self> {
        if h <= Exact::from_integer(0) {
            return Err(Error::param("h", "height must be positive"));
        }
        Ok(Self { x, h })
    }
}

/// How point evaluations off the grid are treated by the continuous
/// seminorm estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EvalMode {
    #[default]
    Grid,
    /// Linear interpolation on a lattice `2^oversample` times finer.
    Interpolate { oversample: u32 },
}

fn scaled_step<T: Scalar>(f: &SampledFunction<T>, m: i64) -> T {
    T::from_i64(m).expect("step count representable") * f.step()
}

/// `Delta_2 f(x, h)` at absolute lattice index `j` and step count `m`.
#[inline]
pub(crate) fn delta2_at<T: Scalar>(f: &SampledFunction<T>, j: i64, m: i64) -> Option<T> {
    let right = f.at(j + m)?;
    let mid = f.at(j)?;
    let left = f.at(j - m)?;
    Some((right - mid - mid + left) / scaled_step(f, m))
}

#[inline]
pub(crate) fn delta1_at<T: Scalar>(f: &SampledFunction<T>, j: i64, m: i64) -> Option<T> {
    Some((f.at(j + m)? - f.at(j)?) / scaled_step(f, m))
}

fn grid_pair<T: Scalar>(f: &SampledFunction<T>, x: Exact, h: Exact) -> Result<(i64, i64)> {
    if h <= Exact::from_integer(0) {
        return Err(Error::param("h", "height must be positive"));
    }
    Ok((f.lattice_index(x)?, f.lattice_index(h)?))
}

fn out_of_domain(x: Exact) -> Error {
    Error::OutOfDomain {
        point: x.to_string(),
    }
}

/// `(f(x + h) - f(x)) / h`.
pub fn delta1<T: Scalar>(f: &SampledFunction<T>, x: Exact, h: Exact) -> Result<T> {
    let (j, m) = grid_pair(f, x, h)?;
    delta1_at(f, j, m).ok_or_else(|| out_of_domain(x))
}

/// `(f(x + h) - 2 f(x) + f(x - h)) / h`.
pub fn delta2<T: Scalar>(f: &SampledFunction<T>, x: Exact, h: Exact) -> Result<T> {
    let (j, m) = grid_pair(f, x, h)?;
    delta2_at(f, j, m).ok_or_else(|| out_of_domain(x))
}

pub fn delta1_interpolated(f: &SampledFunction<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f.interpolate(x + h)? - f.interpolate(x)?) / h)
}

pub fn delta2_interpolated(f: &SampledFunction<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f.interpolate(x + h)? - 2.0 * f.interpolate(x)? + f.interpolate(x - h)?) / h)
}

/// `|Delta_2 f(x, h)| > epsilon`.
pub fn in_a<T: Scalar>(f: &SampledFunction<T>, epsilon: T, x: Exact, h: Exact) -> Result<bool> {
    Ok(delta2(f, x, h)?.abs() > epsilon)
}

/// `Delta_2 f(I) = (f(b) - 2 f(m) + f(a)) / (|I| / 2)` for a dyadic `I` of the
/// function's root, at least one generation coarser than the grid.
pub fn second_difference_dyadic<T: Scalar>(
    f: &SampledFunction<T>,
    interval: crate::dyadic::DyadicInterval,
) -> Result<T> {
    let finest = f.root().generation + f.depth() as i32 - 1;
    if interval.generation > finest {
        return Err(Error::TooFine {
            generation: interval.generation as i64,
            depth: f.depth(),
        });
    }
    if !f.root().contains(&interval) {
        return Err(out_of_domain(interval.left()));
    }
    let iv = interval.interval();
    delta2(f, iv.midpoint(), iv.length() / Exact::from_integer(2))
}

/// Largest `|Delta_2 f(x, h)|` over grid points with `x +- h` inside the root.
///
/// A lower bound for the Zygmund seminorm; exact for functions that are
/// linear between grid points.
pub fn zygmund_seminorm<T: Scalar>(f: &SampledFunction<T>) -> T {
    let n = f.cells() as i64;
    let origin = f.origin();
    (1..n)
        .into_par_iter()
        .map(|i| {
            let mut best = T::zero();
            for m in 1..=i.min(n - i) {
                if let Some(v) = delta2_at(f, origin + i, m) {
                    best = best.max_of(v.abs());
                }
            }
            best
        })
        .reduce(T::zero, |a, b| a.max_of(b))
}

/// Continuous seminorm estimator with an explicit evaluation mode.
pub fn zygmund_seminorm_with(f: &SampledFunction<f64>, mode: EvalMode) -> f64 {
    match mode {
        EvalMode::Grid => zygmund_seminorm(f),
        EvalMode::Interpolate { oversample } => {
            let fine = f.depth() + oversample;
            let refined = SampledFunction::from_fn(f.root(), fine, |x| {
                f.interpolate(x.to_f64_lossy()).unwrap_or(0.0)
            })
            .expect("refined grid is valid");
            zygmund_seminorm(&refined)
        }
    }
}

/// `max |Delta_2 f(I)|` over dyadic `I` of the root down to one generation
/// above the grid; equals twice the star norm of the average growth
/// martingale.
pub fn dyadic_zygmund_seminorm<T: Scalar>(f: &SampledFunction<T>) -> T {
    let values = f.values();
    let depth = f.depth();
    let mut best = T::zero();
    for g in 0..depth {
        let stride = 1usize << (depth - g);
        let half = scaled_step(f, (stride / 2) as i64);
        for k in 0..(1usize << g) {
            let a = values[k * stride];
            let m = values[k * stride + stride / 2];
            let b = values[(k + 1) * stride];
            best = best.max_of(((b - m - m + a) / half).abs());
        }
    }
    best
}

/// `sum_n 2^-(n+1) sum_j g(Delta_2 f(x_j, h_n))` over a box whose base starts
/// at lattice index `left` and spans `len` grid steps. Multiplying by `ln 2`
/// gives `(1/|I|) int int g dh dx / h`. Stencils that leave the domain of a
/// non-compact function are skipped.
fn box_sum<T: Scalar>(
    f: &SampledFunction<T>,
    left: i64,
    len: i64,
    layers: u32,
    g: &(impl Fn(T) -> T + Sync),
) -> T {
    let mut total = T::zero();
    for n in 0..layers {
        let h = len >> (n + 1);
        let count = 1i64 << (n + 1);
        let mut layer = T::zero();
        for j in 0..count {
            if let Some(d) = delta2_at(f, left + j * h, h) {
                layer = layer + g(d);
            }
        }
        total = total + layer / T::pow2(n + 1);
    }
    total
}

fn interval_on_grid<T: Scalar>(
    f: &SampledFunction<T>,
    interval: &RealInterval,
    depth: u32,
) -> Result<(i64, i64)> {
    if depth < 1 {
        return Err(Error::param("depth", "box lattice needs depth >= 1"));
    }
    let left = f.lattice_index(interval.left())?;
    let len = f.lattice_index(interval.right())? - left;
    if len % (1i64 << depth) != 0 {
        return Err(Error::TooFine {
            generation: depth as i64,
            depth: f.depth(),
        });
    }
    Ok((left, len))
}

/// `(1/|I|) int_I int_0^|I| |Delta_2 f|^2 dh dx / h` on the box lattice.
pub fn strichartz_functional<T: Scalar>(
    f: &SampledFunction<T>,
    interval: &RealInterval,
    depth: u32,
) -> Result<T> {
    let (left, len) = interval_on_grid(f, interval, depth)?;
    Ok(T::ln2() * box_sum(f, left, len, depth, &|d: T| d * d))
}

/// Box density of `A(f, epsilon)` over one interval.
pub fn box_density<T: Scalar>(
    f: &SampledFunction<T>,
    epsilon: T,
    interval: &RealInterval,
    depth: u32,
) -> Result<T> {
    let (left, len) = interval_on_grid(f, interval, depth)?;
    Ok(T::ln2() * box_sum(f, left, len, depth, &indicator(epsilon)))
}

fn indicator<T: Scalar>(epsilon: T) -> impl Fn(T) -> T + Sync {
    move |d: T| {
        if d.abs() > epsilon {
            T::one()
        } else {
            T::zero()
        }
    }
}

/// Runs `per_box` over every dyadic interval of the root at levels
/// `0..depth`, each with the layers that reach the common floor `depth`.
fn sup_over_boxes<T: Scalar>(
    f: &SampledFunction<T>,
    depth: u32,
    g: impl Fn(T) -> T + Sync,
) -> Result<T> {
    if depth < 1 || depth > f.depth() {
        return Err(Error::TooFine {
            generation: depth as i64,
            depth: f.depth(),
        });
    }
    let origin = f.origin();
    let cells = f.cells() as i64;
    let boxes: Vec<(u32, i64)> = (0..depth)
        .flat_map(|level| (0..(1i64 << level)).map(move |k| (level, k)))
        .collect();
    let best = boxes
        .par_iter()
        .map(|&(level, k)| {
            let len = cells >> level;
            box_sum(f, origin + k * len, len, depth - level, &g)
        })
        .reduce(T::zero, |a, b| a.max_of(b));
    Ok(T::ln2() * best)
}

/// `C(f, epsilon)` at a finite depth: the largest box density of
/// `A(f, epsilon)` over dyadic base intervals.
pub fn c_functional<T: Scalar>(f: &SampledFunction<T>, epsilon: T, depth: u32) -> Result<T> {
    if epsilon <= T::zero() {
        return Err(Error::param("epsilon", "must be positive"));
    }
    sup_over_boxes(f, depth, indicator(epsilon))
}

/// Largest Strichartz box value over dyadic base intervals.
pub fn strichartz_sup<T: Scalar>(f: &SampledFunction<T>, depth: u32) -> Result<T> {
    sup_over_boxes(f, depth, |d: T| d * d)
}

/// `max_P (1/|P|) sum |Q|` over nodes `Q` of `P`'s subtree at levels below
/// `depth` whose largest child jump exceeds `threshold`.
pub fn counting_functional<T: Scalar>(
    s: &DyadicMartingale<T>,
    threshold: T,
    depth: u32,
) -> Result<T> {
    if depth < 1 || depth > s.depth() {
        return Err(Error::TooFine {
            generation: depth as i64,
            depth: s.depth(),
        });
    }
    let scale = T::one() / T::pow2(s.dim());
    let mut below: Vec<T> = Vec::new();
    let mut best = T::zero();
    for g in (0..depth).rev() {
        let current: Vec<T> = (0..s.level_len(g))
            .map(|k| {
                let own = if s.max_child_jump(g, k) > threshold {
                    T::one()
                } else {
                    T::zero()
                };
                let children = if below.is_empty() {
                    T::zero()
                } else {
                    (0..s.arity()).fold(T::zero(), |acc, c| acc + below[s.child(g, k, c)]) * scale
                };
                own + children
            })
            .collect();
        for &v in &current {
            best = best.max_of(v);
        }
        below = current;
    }
    Ok(best)
}

/// `D(f, epsilon)`: nodes `J` with `|Delta_2 f(J)| > epsilon`, i.e. child jumps
/// of the average growth martingale above `epsilon / 2`.
pub fn d_functional<T: Scalar>(f: &SampledFunction<T>, epsilon: T, depth: u32) -> Result<T> {
    d_functional_of(&DyadicMartingale::average_growth(f), epsilon, depth)
}

pub fn d_functional_of<T: Scalar>(
    s: &DyadicMartingale<T>,
    epsilon: T,
    depth: u32,
) -> Result<T> {
    if epsilon <= T::zero() {
        return Err(Error::param("epsilon", "must be positive"));
    }
    let two = T::one() + T::one();
    counting_functional(s, epsilon / two, depth)
}

const CONE_OFFSETS: i64 = 3;

fn cone_weight<T: Scalar>(j: i64) -> T {
    if j.abs() <= 2 {
        T::one() / T::pow2(2)
    } else {
        T::one() / T::from_i64(12).expect("12")
    }
}

/// `sum w g(Delta_2 f(s, t))` over the cone lattice at `x`.
fn cone_sum<T: Scalar>(
    f: &SampledFunction<T>,
    x: Exact,
    depth: u32,
    g: impl Fn(T) -> T,
) -> Result<T> {
    let res = f.resolution();
    if depth < 1 || depth + 1 > res {
        return Err(Error::TooFine {
            generation: depth as i64,
            depth: f.depth(),
        });
    }
    let j0 = f.lattice_index(x)?;
    let mut total = T::zero();
    for n in 0..depth {
        let t = 1i64 << (res - n - 1);
        let half = t / 2;
        for j in -CONE_OFFSETS..=CONE_OFFSETS {
            if let Some(d) = delta2_at(f, j0 + j * half, t) {
                total = total + cone_weight::<T>(j) * g(d);
            }
        }
    }
    Ok(total)
}

/// Square of the cone counting function `C(f, epsilon)(x)`.
pub fn cone_counting_sq<T: Scalar>(
    f: &SampledFunction<T>,
    epsilon: T,
    x: Exact,
    depth: u32,
) -> Result<T> {
    if epsilon <= T::zero() {
        return Err(Error::param("epsilon", "must be positive"));
    }
    cone_sum(f, x, depth, indicator(epsilon))
}

/// Square of the cone square function `C(f)(x)`.
pub fn cone_square_sq<T: Scalar>(f: &SampledFunction<T>, x: Exact, depth: u32) -> Result<T> {
    cone_sum(f, x, depth, |d| d * d)
}

pub fn cone_counting<T: Real>(
    f: &SampledFunction<T>,
    epsilon: T,
    x: Exact,
    depth: u32,
) -> Result<T> {
    Ok(cone_counting_sq(f, epsilon, x, depth)?.sqrt())
}

pub fn cone_square<T: Real>(f: &SampledFunction<T>, x: Exact, depth: u32) -> Result<T> {
    Ok(cone_square_sq(f, x, depth)?.sqrt())
}

/// Cone counting function at the left endpoint of every grid cell.
pub fn cone_counting_field<T: Real>(
    f: &SampledFunction<T>,
    epsilon: T,
    depth: u32,
) -> Result<Vec<T>> {
    (0..f.cells())
        .into_par_iter()
        .map(|i| cone_counting(f, epsilon, f.point(i), depth))
        .collect()
}

/// `D(f, epsilon)(x) = #{n : |Delta S_n(x)| > epsilon}^(1/2)` per leaf.
pub fn truncated_quadratic<T: Real>(s: &DyadicMartingale<T>, epsilon: T) -> Vec<T> {
    s.jump_count_above(epsilon)
        .into_iter()
        .map(|c| c.sqrt())
        .collect()
}

/// `(sum |v|^p 2^-N)^(1/p)` for a per-leaf field.
pub fn lp_norm<T: Real>(field: &[T], p: T) -> Result<T> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::param("p", "need 1 < p < infinity"));
    }
    if field.is_empty() {
        return Err(Error::param("field", "empty field"));
    }
    let n = T::from_usize(field.len()).expect("length representable");
    let sum = field.iter().fold(T::zero(), |acc, v| acc + v.abs().powf(p));
    Ok((sum / n).powf(p.recip()))
}

/// Geometric grid with ratio `sqrt 2` from `2^-10 scale` to `2 scale`; even
/// steps are exact powers of two times `scale`.
pub fn auto_epsilon_grid(scale: f64) -> Vec<f64> {
    let scale = if scale > 0.0 { scale } else { 1.0 };
    (0..=22)
        .map(|k: i32| {
            let base = scale * f64::powi(2.0, k / 2 - 10);
            if k % 2 == 1 {
                base * std::f64::consts::SQRT_2
            } else {
                base
            }
        })
        .collect()
}

/// The stabilisation rule used by [`estimate_threshold`].
pub const GROWTH_RULE: &str = "smallest grid epsilon from which every larger grid epsilon has value[last depth] <= (1 + tau) value[first depth]";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub epsilon: f64,
    pub method: String,
    pub tau: f64,
    pub depths: Vec<u32>,
}

/// Finite-depth table `epsilon -> depth -> value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub functional: String,
    pub epsilons: Vec<f64>,
    pub depths: Vec<u32>,
    /// `values[i][j]` belongs to `epsilons[i]` and `depths[j]`.
    pub values: Vec<Vec<f64>>,
    pub estimate: Option<ThresholdEstimate>,
    pub note: String,
}

impl DistanceProfile {
    pub fn tabulate(
        functional: &str,
        epsilons: &[f64],
        depths: &[u32],
        note: &str,
        eval: impl Fn(f64, u32) -> Result<f64> + Sync,
    ) -> Result<Self> {
        if epsilons.is_empty() || depths.is_empty() {
            return Err(Error::param("grid", "epsilon and depth grids must be nonempty"));
        }
        let mut epsilons = epsilons.to_vec();
        epsilons.sort_by(|a, b| a.total_cmp(b));
        let mut depths = depths.to_vec();
        depths.sort_unstable();
        let values = epsilons
            .par_iter()
            .map(|&eps| depths.iter().map(|&d| eval(eps, d)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            functional: functional.to_string(),
            epsilons,
            depths,
            values,
            estimate: None,
            note: note.to_string(),
        })
    }

    /// Whether the row for `epsilon[i]` passes the growth test.
    pub fn is_stable(&self, i: usize, tau: f64) -> bool {
        let row = &self.values[i];
        let (first, last) = (row[0], row[row.len() - 1]);
        if first == 0.0 {
            last == 0.0
        } else {
            last <= (1.0 + tau) * first
        }
    }

    pub fn all_stable(&self, tau: f64) -> bool {
        (0..self.epsilons.len()).all(|i| self.is_stable(i, tau))
    }
}

/// Smallest grid `epsilon` from which the profile stops growing in depth.
pub fn estimate_threshold(profile: &DistanceProfile, tau: f64) -> Result<ThresholdEstimate> {
    if profile.depths.len() < 3 {
        return Err(Error::param("depths", "threshold estimation needs at least 3 depths"));
    }
    if !(tau >= 0.0) {
        return Err(Error::param("tau", "must be nonnegative"));
    }
    let mut found = None;
    for i in (0..profile.epsilons.len()).rev() {
        if profile.is_stable(i, tau) {
            found = Some(profile.epsilons[i]);
        } else {
            break;
        }
    }
    found
        .map(|epsilon| ThresholdEstimate {
            epsilon,
            method: GROWTH_RULE.to_string(),
            tau,
            depths: profile.depths.clone(),
        })
        .ok_or(Error::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicInterval;

    fn q(n: i128, d: i128) -> Exact {
        Exact::new(n, d)
    }

    fn hat(depth: u32) -> SampledFunction<f64> {
        SampledFunction::from_f64_fn(DyadicInterval::UNIT, depth, |x| x.min(1.0 - x)).unwrap()
    }

    fn square(depth: u32) -> SampledFunction<f64> {
        SampledFunction::from_f64_fn(DyadicInterval::UNIT, depth, |x| x * x).unwrap()
    }

    fn linear(depth: u32) -> SampledFunction<f64> {
        SampledFunction::from_f64_fn(DyadicInterval::UNIT, depth, |x| x).unwrap()
    }

    #[test]
    fn divided_differences() {
        assert_eq!(delta1(&linear(4), q(1, 4), q(1, 8)).unwrap(), 1.0);
        assert_eq!(delta1(&hat(4), q(0, 1), q(1, 2)).unwrap(), 1.0);
        assert_eq!(delta2(&linear(4), q(1, 2), q(1, 4)).unwrap(), 0.0);
        assert_eq!(delta2(&square(4), q(3, 8), q(1, 8)).unwrap(), 0.25);
        assert_eq!(delta2(&hat(4), q(1, 2), q(1, 4)).unwrap(), -2.0);
        assert!(delta2(&linear(4), q(1, 8), q(1, 4)).is_err());
        assert!(in_a(&hat(4), 1.0, q(1, 2), q(1, 4)).unwrap());
        assert!(!in_a(&hat(4), 3.0, q(1, 2), q(1, 4)).unwrap());
    }

    #[test]
    fn seminorms() {
        assert_eq!(zygmund_seminorm(&hat(5)), 2.0);
        assert_eq!(zygmund_seminorm(&linear(5)), 0.0);
        assert_eq!(zygmund_seminorm(&square(5)), 1.0);
        assert_eq!(dyadic_zygmund_seminorm(&hat(5)), 2.0);
        assert_eq!(dyadic_zygmund_seminorm(&linear(5)), 0.0);
        let second = second_difference_dyadic(&hat(4), DyadicInterval::UNIT).unwrap();
        assert_eq!(second, -2.0);
        assert_eq!(
            second_difference_dyadic(&square(4), DyadicInterval::UNIT).unwrap(),
            1.0
        );
        assert!(second_difference_dyadic(&square(4), DyadicInterval::new(4, 0)).is_err());
    }

    #[test]
    fn interpolated_estimator_agrees_on_linear_pieces() {
        let f = hat(4);
        assert_eq!(zygmund_seminorm_with(&f, EvalMode::Interpolate { oversample: 2 }), 2.0);
    }

    #[test]
    fn d_functional_hat() {
        let f = hat(6);
        assert_eq!(d_functional(&f, 1.0, 6).unwrap(), 1.0);
        assert_eq!(d_functional(&f, 3.0, 6).unwrap(), 0.0);
    }

    #[test]
    fn box_functionals_linear_vanish() {
        let f = linear(6);
        let unit = DyadicInterval::UNIT.interval();
        assert_eq!(strichartz_functional(&f, &unit, 5).unwrap(), 0.0);
        assert_eq!(c_functional(&f, 0.1, 5).unwrap(), 0.0);
    }

    #[test]
    fn chebyshev_on_exact_square() {
        let f: SampledFunction<Exact> =
            SampledFunction::from_fn(DyadicInterval::UNIT, 6, |x| x * x).unwrap();
        let unit = DyadicInterval::UNIT.interval();
        let eps = q(1, 16);
        let s = strichartz_functional(&f, &unit, 5).unwrap();
        let c = box_density(&f, eps, &unit, 5).unwrap();
        assert!(s >= eps * eps * c);
    }

    #[test]
    fn hat_cone_and_box_are_finite() {
        let f = hat(10);
        let a = c_functional(&f, 1.0, 8).unwrap();
        let b = c_functional(&f, 1.0, 10).unwrap();
        assert!(a > 0.0 && b >= a && b < 1.5 * a);
        let c8 = cone_counting(&f, 1.0, q(1, 2), 7).unwrap();
        let c9 = cone_counting(&f, 1.0, q(1, 2), 9).unwrap();
        assert!(c8 > 0.0 && c9 >= c8);
        let sq = cone_square(&f, q(1, 4), 9).unwrap();
        assert!(sq.is_finite());
        assert_eq!(cone_square(&linear(10), q(1, 2), 9).unwrap(), 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        assert_eq!(lp_norm(&[3.0; 8], 2.0).unwrap(), 3.0);
        assert_eq!(lp_norm(&[0.0; 8], 3.0).unwrap(), 0.0);
        let half = [1.0, 1.0, 0.0, 0.0];
        assert!((lp_norm(&half, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(lp_norm(&half, 1.0).is_err());
        assert!(lp_norm(&half, f64::INFINITY).is_err());
    }

    #[test]
    fn epsilon_grid_hits_powers_of_two() {
        let grid = auto_epsilon_grid(1.0);
        assert_eq!(grid.len(), 23);
        assert_eq!(grid[0], 1.0 / 1024.0);
        assert_eq!(grid[20], 1.0);
        assert_eq!(grid[22], 2.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn threshold_rule() {
        let profile = DistanceProfile {
            functional: "test".into(),
            epsilons: vec![0.5, 1.0, 2.0],
            depths: vec![4, 6, 8],
            values: vec![vec![4.0, 6.0, 8.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
            estimate: None,
            note: String::new(),
        };
        assert_eq!(estimate_threshold(&profile, 0.1).unwrap().epsilon, 1.0);
        let mut unstable = profile.clone();
        unstable.values[2] = vec![1.0, 2.0, 3.0];
        assert_eq!(estimate_threshold(&unstable, 0.1), Err(Error::Inconclusive));
        let mut short = profile;
        short.depths.truncate(2);
        assert!(estimate_threshold(&short, 0.1).is_err());
    }
}
