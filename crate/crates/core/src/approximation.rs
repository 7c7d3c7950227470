//! Approximants: jump truncation, translation averages and the continuous
//! decomposition `f = b + t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicInterval, Filtration, RealInterval};
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::functionals::{
    d_functional_of, dyadic_zygmund_seminorm, estimate_threshold, zygmund_seminorm,
    DistanceProfile, ThresholdEstimate,
};
use crate::martingale::DyadicMartingale;
use crate::measures::GridMeasure;
use crate::scalar::{exact_pow2, Exact, Scalar};

/// Which of the three truncation rules is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RuleMode {
    /// Keep `Delta S(J)` when `|Delta S(J)| > threshold` (threshold `epsilon / 2`).
    Jump,
    /// Keep `Delta S(I)` when `|Delta S(I)| > epsilon`.
    Sobolev,
    /// Keep the jumps of the children of `Q` when `Delta_2^* mu(Q) > epsilon`.
    Measure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRule<T> {
    pub threshold: T,
    pub mode: RuleMode,
}

impl<T: Scalar> TruncationRule<T> {
    fn checked(threshold: T, mode: RuleMode) -> Result<Self> {
        if threshold <= T::zero() {
            return Err(Error::param("epsilon", "must be positive"));
        }
        Ok(Self { threshold, mode })
    }

    /// Rule for the distance to `I(BMO)`: threshold `epsilon / 2`.
    pub fn ibmo(epsilon: T) -> Result<Self> {
        Self::checked(epsilon / (T::one() + T::one()), RuleMode::Jump)
    }

    pub fn sobolev(epsilon: T) -> Result<Self> {
        Self::checked(epsilon, RuleMode::Sobolev)
    }

    pub fn measure(epsilon: T) -> Result<Self> {
        Self::checked(epsilon, RuleMode::Measure)
    }
}

/// Keeps or drops the jumps of each sibling group according to `rule` and
/// rebuilds the martingale top-down from `B(root) = S(root)`.
///
/// In one dimension siblings carry opposite jumps of equal size, so the
/// per-jump rules act on whole sibling pairs; unequal magnitudes are an error.
pub fn truncate_jumps<T: Scalar>(
    s: &DyadicMartingale<T>,
    rule: &TruncationRule<T>,
) -> Result<DyadicMartingale<T>> {
    if rule.mode != RuleMode::Measure && s.dim() != 1 {
        return Err(Error::param("rule", "jump rules apply to one-dimensional martingales"));
    }
    let mut jumps = s.jumps();
    for g in 0..s.depth() {
        for k in 0..s.level_len(g) {
            if s.dim() == 1 && rule.mode != RuleMode::Measure {
                check_siblings(s, g, k)?;
            }
            if s.max_child_jump(g, k) <= rule.threshold {
                for c in 0..s.arity() {
                    jumps.set(g + 1, s.child(g, k, c), T::zero());
                }
            }
        }
    }
    Ok(DyadicMartingale::from_jumps(s.get(0, 0), &jumps))
}

fn check_siblings<T: Scalar>(s: &DyadicMartingale<T>, g: u32, k: usize) -> Result<()> {
    let a = s.jump(g + 1, 2 * k).abs();
    let b = s.jump(g + 1, 2 * k + 1).abs();
    let scale = a.max_of(b).max_of(s.get(g, k).abs());
    if (a - b).abs() > T::relative_slack() * scale {
        return Err(Error::Invariant(format!(
            "sibling jumps differ in magnitude at generation {} offset {k}: {a:?} vs {b:?}",
            g + 1
        )));
    }
    Ok(())
}

/// `b = integrate(B)` shifted so that `b` and `f` agree at the left end.
pub fn ibmo_approximant<T: Scalar>(
    f: &SampledFunction<T>,
    epsilon: T,
) -> Result<SampledFunction<T>> {
    let s = DyadicMartingale::average_growth(f);
    let b = truncate_jumps(&s, &TruncationRule::ibmo(epsilon)?)?.integrate()?;
    let base = f.values()[0];
    Ok(b.map(|v| v + base))
}

pub fn sobolev_truncate<T: Scalar>(
    s: &DyadicMartingale<T>,
    epsilon: T,
) -> Result<DyadicMartingale<T>> {
    truncate_jumps(s, &TruncationRule::sobolev(epsilon)?)
}

/// `D` profile together with the measured distance of each approximant.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicDistanceReport {
    pub profile: DistanceProfile,
    /// `||f - b_epsilon||_{*d}` per grid epsilon.
    pub measured_distance: Vec<f64>,
    pub estimate: Option<ThresholdEstimate>,
}

pub fn dyadic_distance_report(
    f: &SampledFunction<f64>,
    epsilons: &[f64],
    depths: &[u32],
    tau: f64,
) -> Result<DyadicDistanceReport> {
    let s = DyadicMartingale::average_growth(f);
    let profile = DistanceProfile::tabulate(
        "D",
        epsilons,
        depths,
        "sup restricted to dyadic base intervals of the root",
        |eps, depth| d_functional_of(&s, eps, depth),
    )?;
    let measured_distance = profile
        .epsilons
        .par_iter()
        .map(|&eps| {
            let b = ibmo_approximant(f, eps)?;
            let t = f.zip_with(&b, |x, y| x - y)?;
            Ok(dyadic_zygmund_seminorm(&t))
        })
        .collect::<Result<Vec<_>>>()?;
    let estimate = if profile.depths.len() >= 3 {
        estimate_threshold(&profile, tau).ok()
    } else {
        None
    };
    Ok(DyadicDistanceReport {
        profile: DistanceProfile {
            estimate: estimate.clone(),
            ..profile
        },
        measured_distance,
        estimate,
    })
}

/// Left-endpoint lattice `alpha_j = -R + j 2R / M`, `j = 0..M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlphaLattice {
    pub radius: u32,
    pub points: u32,
}

impl AlphaLattice {
    pub fn new(radius: u32, points: u32) -> Result<Self> {
        if radius < 1 {
            return Err(Error::param("R", "need R >= 1"));
        }
        if points == 0 || !points.is_power_of_two() {
            return Err(Error::param("M", "number of lattice points must be a power of two"));
        }
        Ok(Self { radius, points })
    }

    pub fn alpha(&self, j: u32) -> Exact {
        let r = Exact::from_integer(self.radius as i128);
        -r + Exact::new(2 * self.radius as i128 * j as i128, self.points as i128)
    }

    pub fn alphas(&self) -> Vec<Exact> {
        (0..self.points).map(|j| self.alpha(j)).collect()
    }

    /// Smallest dyadic interval holding `x` whenever `x + alpha` is in `base`.
    pub fn output_root(&self, base: &RealInterval) -> DyadicInterval {
        let r = Exact::from_integer(self.radius as i128);
        let hull = RealInterval::new(base.left() - r, base.right() + r).expect("nonempty hull");
        Filtration::standard().containing_dyadic(&hull)
    }
}

/// `t_R(x) = (1/M) sum_j t^(alpha_j)(x + alpha_j)`.
///
/// Members must be compactly supported functions on a common grid.
pub fn translation_average<T: Scalar>(
    family: &[SampledFunction<T>],
    lattice: &AlphaLattice,
) -> Result<SampledFunction<T>> {
    if family.len() != lattice.points as usize {
        return Err(Error::param("family", "one member per lattice point"));
    }
    let first = &family[0];
    for member in family {
        if !member.same_grid(first) {
            return Err(Error::param("family", "members live on different grids"));
        }
        if !member.is_compact() {
            return Err(Error::param("family", "members must be compactly supported"));
        }
    }
    let shifts: Vec<i64> = lattice
        .alphas()
        .iter()
        .map(|&a| first.lattice_index(a))
        .collect::<Result<_>>()?;
    let root = lattice.output_root(&first.domain());
    let depth = (first.resolution() as i32 - root.generation) as u32;
    let origin = SampledFunction::<T>::zeros(root, depth)?.origin();
    let scale = T::one() / T::from_u32(lattice.points).expect("lattice size");
    let values: Vec<T> = (0..=(1i64 << depth))
        .into_par_iter()
        .map(|i| {
            let x = origin + i;
            let sum = family
                .iter()
                .zip(&shifts)
                .fold(T::zero(), |acc, (member, &a)| {
                    acc + member.at(x + a).unwrap_or_else(T::zero)
                });
            sum * scale
        })
        .collect();
    SampledFunction::on_root(root, depth, values)
}

/// Averaged BMO field and its measured oscillation norm.
#[derive(Debug, Clone, Serialize)]
pub struct GarnettJonesReport {
    pub root: (i32, i64),
    pub depth: u32,
    pub field: Vec<f64>,
    /// Largest `L^2` oscillation over grid-aligned windows.
    pub measured_norm: f64,
}

/// Dyadic BMO norm of a per-cell field on `[0, 1)`.
pub fn field_bmo_norm(field: &[f64]) -> Result<f64> {
    let depth = field.len().trailing_zeros();
    if !field.len().is_power_of_two() {
        return Err(Error::param("field", "length must be a power of two"));
    }
    Ok(DyadicMartingale::from_leaves(1, depth, field.to_vec())?.bmo_norm())
}

/// `b_R(x) = (1/M) sum_j b^(alpha_j)(x + alpha_j)` for per-cell fields on
/// `[0, 1)` with mean zero and dyadic BMO norm at most one.
pub fn garnett_jones_average(family: &[Vec<f64>], lattice: &AlphaLattice) -> Result<GarnettJonesReport> {
    if family.len() != lattice.points as usize {
        return Err(Error::param("family", "one member per lattice point"));
    }
    let cells = family[0].len();
    if !cells.is_power_of_two() || family.iter().any(|m| m.len() != cells) {
        return Err(Error::param("family", "members need a common power-of-two length"));
    }
    let depth = cells.trailing_zeros();
    for (j, member) in family.iter().enumerate() {
        let mean = member.iter().sum::<f64>() / cells as f64;
        if mean.abs() > 1e-10 {
            return Err(Error::param(
                "family",
                format!("member {j} has mean {mean:e}, expected zero"),
            ));
        }
        if field_bmo_norm(member)? > 1.0 + 1e-12 {
            return Err(Error::param("family", format!("member {j} has BMO norm above one")));
        }
    }
    let step = exact_pow2(-(depth as i32));
    let shifts: Vec<i64> = lattice
        .alphas()
        .iter()
        .map(|&a| {
            let s = a / step;
            if s.is_integer() {
                Ok(s.to_integer() as i64)
            } else {
                Err(Error::OffGrid {
                    point: a.to_string(),
                })
            }
        })
        .collect::<Result<_>>()?;
    let root = lattice.output_root(&DyadicInterval::UNIT.interval());
    let out_cells = 1usize << (depth as i32 - root.generation);
    let origin = (root.interval().left() / step).to_integer() as i64;
    let scale = 1.0 / lattice.points as f64;
    let field: Vec<f64> = (0..out_cells as i64)
        .into_par_iter()
        .map(|i| {
            let x = origin + i;
            family
                .iter()
                .zip(&shifts)
                .map(|(member, &a)| {
                    let c = x + a;
                    if (0..cells as i64).contains(&c) {
                        member[c as usize]
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                * scale
        })
        .collect();
    let measured_norm = window_oscillation(&field);
    Ok(GarnettJonesReport {
        root: (root.generation, root.offset),
        depth: depth + (-root.generation) as u32,
        field,
        measured_norm,
    })
}

/// `sup` over windows of whole cells of `((1/|W|) int_W |b - b_W|^2)^(1/2)`.
pub fn window_oscillation(field: &[f64]) -> f64 {
    let n = field.len();
    let mut sum = vec![0.0; n + 1];
    let mut sq = vec![0.0; n + 1];
    for (i, &v) in field.iter().enumerate() {
        sum[i + 1] = sum[i] + v;
        sq[i + 1] = sq[i] + v * v;
    }
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best: f64 = 0.0;
            for b in a + 1..=n {
                let len = (b - a) as f64;
                let mean = (sum[b] - sum[a]) / len;
                let var = (sq[b] - sq[a]) / len - mean * mean;
                best = best.max(var.max(0.0));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// `f = b + t` assembled from per-translate truncations.
#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    pub b: SampledFunction<T>,
    pub t: SampledFunction<T>,
    pub epsilon: T,
    pub lattice: AlphaLattice,
    /// `max_alpha ||t^(alpha)||_{*d}`.
    pub max_translate_distance: T,
    /// Grid Zygmund seminorm of `t`.
    pub measured_t: T,
    /// Grid Zygmund seminorm of `b`.
    pub measured_b: T,
}

/// Decomposes a compactly supported `f` on `[0, 1]`: every translate
/// `f(x - alpha)`, `alpha in [-1, 1)`, is truncated at `epsilon / 2` in the
/// standard filtration and the regular parts are averaged back.
pub fn continuous_decompose<T: Scalar>(
    f: &SampledFunction<T>,
    epsilon: T,
    points: u32,
) -> Result<Decomposition<T>> {
    if f.root() != DyadicInterval::UNIT {
        return Err(Error::param("f", "expected a function on [0, 1]"));
    }
    if !f.is_compact() {
        return Err(Error::param("f", "function must be compactly supported"));
    }
    let lattice = AlphaLattice::new(1, points)?;
    let rule = TruncationRule::ibmo(epsilon)?;
    let translate_root = lattice.output_root(&f.domain());
    let pieces = lattice
        .alphas()
        .par_iter()
        .map(|&alpha| {
            let g = f.translate(alpha, translate_root)?;
            let s = DyadicMartingale::average_growth(&g);
            let b = truncate_jumps(&s, &rule)?.integrate()?;
            let t = g.zip_with(&b, |x, y| x - y)?;
            Ok((b, dyadic_zygmund_seminorm(&t)))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_translate_distance = pieces
        .iter()
        .fold(T::zero(), |acc, (_, d)| acc.max_of(*d));
    let regular: Vec<SampledFunction<T>> = pieces.into_iter().map(|(b, _)| b).collect();
    let b = translation_average(&regular, &lattice)?;
    let f_big = f.extend_to(b.root())?;
    let t = f_big.zip_with(&b, |x, y| x - y)?;
    Ok(Decomposition {
        measured_t: zygmund_seminorm(&t),
        measured_b: zygmund_seminorm(&b),
        b,
        t,
        epsilon,
        lattice,
        max_translate_distance,
    })
}

/// `nu` with `d nu = b dx`, `b` the leaves of the truncated density
/// martingale of `mu`.
pub fn measure_truncate<T: Scalar>(mu: &GridMeasure<T>, epsilon: T) -> Result<GridMeasure<T>> {
    let s = mu.density_martingale();
    let b = truncate_jumps(&s, &TruncationRule::measure(epsilon)?)?;
    GridMeasure::from_density(mu.dim(), mu.depth(), b.leaves())
}
