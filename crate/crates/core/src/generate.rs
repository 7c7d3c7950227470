//! Synthetic inputs with known behaviour.
//!
//! | generator       | class                                   | distance to `I(BMO)_d` |
//! |-----------------|-----------------------------------------|------------------------|
//! | `linear`        | in `I(BMO)`                             | 0                      |
//! | `hat`           | in `I(BMO)` (finitely many kinks)       | 0                      |
//! | `square`        | smooth, in `I(BMO)`                     | 0                      |
//! | `weierstrass`   | Zygmund, not in `I(BMO)`                | unknown                |
//! | `random-jumps`  | every dyadic jump is `+-delta`          | `2 delta`              |
//! | `single-branch` | jumps only under the leftmost branch    | 0                      |
//! | `lacunary`      | `c sum r^-n dist(r^n x, Z)`             | unknown                |
//! | `cascade`       | multiplicative cascade measure          | unknown                |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::martingale::DyadicMartingale;
use crate::measures::GridMeasure;
use crate::scalar::{Exact, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Kind {
    Linear,
    Hat,
    Square,
    Weierstrass { levels: u32 },
    RandomJumps { delta: f64 },
    SingleBranch { delta: f64 },
    Lacunary { c: f64, r: u32 },
    Cascade { dim: u32, theta: Vec<f64> },
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Linear => "linear",
            Kind::Hat => "hat",
            Kind::Square => "square",
            Kind::Weierstrass { .. } => "weierstrass",
            Kind::RandomJumps { .. } => "random-jumps",
            Kind::SingleBranch { .. } => "single-branch",
            Kind::Lacunary { .. } => "lacunary",
            Kind::Cascade { .. } => "cascade",
        }
    }

    /// Expected classification and, where known, the dyadic distance.
    pub fn classification(&self) -> (&'static str, Option<f64>) {
        match self {
            Kind::Linear | Kind::Hat | Kind::Square => ("in I(BMO)", Some(0.0)),
            Kind::SingleBranch { .. } => ("in I(BMO)_d: bounded counting profile", Some(0.0)),
            Kind::RandomJumps { delta } => ("constant jumps: distance 2 delta", Some(2.0 * delta)),
            Kind::Weierstrass { .. } => ("Zygmund, outside I(BMO)", None),
            Kind::Lacunary { .. } => ("lacunary Zygmund series", None),
            Kind::Cascade { .. } => ("cascade measure", None),
        }
    }

    pub fn is_measure(&self) -> bool {
        matches!(self, Kind::Cascade { .. })
    }
}

pub fn linear<T: Scalar>(depth: u32) -> Result<SampledFunction<T>> {
    SampledFunction::from_fn(DyadicInterval::UNIT, depth, T::from_exact)
}

pub fn hat<T: Scalar>(depth: u32) -> Result<SampledFunction<T>> {
    SampledFunction::from_fn(DyadicInterval::UNIT, depth, |x| {
        T::from_exact(x.min(Exact::from_integer(1) - x))
    })
}

pub fn square<T: Scalar>(depth: u32) -> Result<SampledFunction<T>> {
    SampledFunction::from_fn(DyadicInterval::UNIT, depth, |x| T::from_exact(x * x))
}

/// `sum_{n < levels} 2^-n cos(2 pi 2^n x)`.
pub fn weierstrass(depth: u32, levels: u32) -> Result<SampledFunction<f64>> {
    SampledFunction::from_f64_fn(DyadicInterval::UNIT, depth, |x| {
        (0..levels)
            .map(|n| {
                let scale = f64::powi(2.0, n as i32);
                (2.0 * std::f64::consts::PI * ((scale * x) % 1.0)).cos() / scale
            })
            .sum()
    })
}

/// `c sum_n r^-n dist(r^n x, Z)` over the levels the grid resolves.
pub fn lacunary<T: Scalar>(depth: u32, c: T, r: u32) -> Result<SampledFunction<T>> {
    if r < 2 {
        return Err(Error::param("r", "ratio must be at least 2"));
    }
    let mut levels = 0u32;
    let mut scale = 1u128;
    while scale * r as u128 <= 1u128 << depth {
        scale *= r as u128;
        levels += 1;
    }
    SampledFunction::from_fn(DyadicInterval::UNIT, depth, |x| {
        let mut acc = Exact::from_integer(0);
        let mut power = 1i128;
        for _ in 0..=levels {
            let y = x * Exact::from_integer(power);
            let frac = y - y.floor();
            let dist = frac.min(Exact::from_integer(1) - frac);
            acc += dist / Exact::from_integer(power);
            power *= r as i128;
        }
        c * T::from_exact(acc)
    })
}

fn jump_tree<T: Scalar>(
    depth: u32,
    mut jump: impl FnMut(u32, usize) -> Option<T>,
) -> Result<DyadicMartingale<T>> {
    let mut field = DyadicMartingale::from_leaves(1, depth, vec![T::zero(); 1 << depth])?.jumps();
    for g in 1..=depth {
        for parent in 0..(1usize << (g - 1)) {
            if let Some(v) = jump(g, parent) {
                field.set(g, 2 * parent, v);
                field.set(g, 2 * parent + 1, -v);
            }
        }
    }
    Ok(DyadicMartingale::from_jumps(T::zero(), &field))
}

fn from_jumps<T: Scalar>(
    depth: u32,
    jump: impl FnMut(u32, usize) -> Option<T>,
) -> Result<SampledFunction<T>> {
    jump_tree(depth, jump)?.integrate()
}

/// Martingale with root value 0 whose sibling jumps are `+-k/8`, `k` uniform
/// in `0..=8`, with seeded random signs.
pub fn random_martingale<T: Scalar>(depth: u32, seed: u64) -> Result<DyadicMartingale<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    jump_tree(depth, |_, _| {
        let k: i64 = rng.gen_range(-8..=8);
        Some(T::from_i64(k).expect("small") / T::pow2(3))
    })
}

/// Integrated martingale whose jumps are `+-delta` with seeded random signs.
pub fn random_jumps<T: Scalar>(depth: u32, delta: T, seed: u64) -> Result<SampledFunction<T>> {
    if delta <= T::zero() {
        return Err(Error::param("delta", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    from_jumps(depth, |_, _| Some(if rng.gen::<bool>() { delta } else { -delta }))
}

/// Jumps `+delta` / `-delta` on the two children of each node of the leftmost
/// branch, zero elsewhere.
pub fn single_branch<T: Scalar>(depth: u32, delta: T) -> Result<SampledFunction<T>> {
    if delta <= T::zero() {
        return Err(Error::param("delta", "must be positive"));
    }
    from_jumps(depth, |_, parent| (parent == 0).then_some(delta))
}

/// Multiplicative cascade on `[0, 1)^d`: each child receives the factor
/// `prod_i (1 +- theta_g)` with seeded random orientation per node and axis,
/// so every split preserves mass.
pub fn cascade<T: Scalar>(dim: u32, depth: u32, theta: &[T], seed: u64) -> Result<GridMeasure<T>> {
    if theta.is_empty() {
        return Err(Error::param("theta", "schedule must be nonempty"));
    }
    if theta.iter().any(|&t| t < T::zero() || t >= T::one()) {
        return Err(Error::param("theta", "entries must lie in [0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = 1usize << dim;
    let mut density = vec![T::one()];
    let shape = DyadicMartingale::<T>::from_leaves(dim, depth, vec![T::zero(); 1 << (dim * depth)])?;
    for g in 0..depth {
        let th = theta[(g as usize).min(theta.len() - 1)];
        let mut next = vec![T::zero(); density.len() * arity];
        for (k, &parent) in density.iter().enumerate() {
            let signs: Vec<bool> = (0..dim).map(|_| rng.gen::<bool>()).collect();
            for c in 0..arity {
                let mut factor = T::one();
                for (i, &flip) in signs.iter().enumerate() {
                    let up = ((c >> i) & 1 == 1) != flip;
                    factor = factor * if up { T::one() + th } else { T::one() - th };
                }
                next[shape.child(g, k, c)] = parent * factor;
            }
        }
        density = next;
    }
    GridMeasure::from_density(dim, depth, &density)
}

/// Function described by `kind` at `depth` (measures are rejected).
pub fn function(kind: &Kind, depth: u32, seed: u64) -> Result<SampledFunction<f64>> {
    match kind {
        Kind::Linear => linear(depth),
        Kind::Hat => hat(depth),
        Kind::Square => square(depth),
        Kind::Weierstrass { levels } => weierstrass(depth, *levels),
        Kind::RandomJumps { delta } => random_jumps(depth, *delta, seed),
        Kind::SingleBranch { delta } => single_branch(depth, *delta),
        Kind::Lacunary { c, r } => lacunary(depth, *c, *r),
        Kind::Cascade { .. } => Err(Error::param("kind", "cascade generates a measure")),
    }
}

pub fn measure(kind: &Kind, depth: u32, seed: u64) -> Result<GridMeasure<f64>> {
    match kind {
        Kind::Cascade { dim, theta } => cascade(*dim, depth, theta, seed),
        _ => Err(Error::param("kind", "only cascade generates a measure")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{dyadic_zygmund_seminorm, zygmund_seminorm};
    use crate::measures::{DyadicCube, NormMode};

    #[test]
    fn random_jumps_seminorm() {
        let f = random_jumps(10, 0.5, 1).unwrap();
        assert_eq!(dyadic_zygmund_seminorm(&f), 1.0);
        assert!(f.is_compact());
        assert_eq!(f, random_jumps(10, 0.5, 1).unwrap());
        assert_ne!(f, random_jumps(10, 0.5, 2).unwrap());
    }

    #[test]
    fn single_branch_jumps() {
        let f = single_branch(6, 1.0).unwrap();
        let s = DyadicMartingale::average_growth(&f);
        assert_eq!(s.jump(3, 0), 1.0);
        assert_eq!(s.jump(3, 1), -1.0);
        assert_eq!(s.jump(3, 2), 0.0);
        assert_eq!(s.maximal_function()[0], 6.0);
    }

    #[test]
    fn random_martingale_jumps_are_eighths() {
        let s = random_martingale::<f64>(6, 4).unwrap();
        assert_eq!(s.get(0, 0), 0.0);
        assert!(s.star_norm() <= 1.0);
        assert_eq!(s.jumps().sibling_sum_defect(), 0.0);
        for g in 1..=6 {
            for k in 0..s.level_len(g) {
                assert_eq!((s.jump(g, k) * 8.0).fract(), 0.0);
            }
        }
        assert_ne!(s, random_martingale::<f64>(6, 5).unwrap());
    }

    #[test]
    fn takagi_is_exact_and_compact() {
        let t = lacunary::<Exact>(6, Exact::from_integer(1), 2).unwrap();
        assert!(t.is_compact());
        assert_eq!(t.eval(Exact::new(1, 2)).unwrap(), Exact::new(1, 2));
        let tf = lacunary::<f64>(8, 1.0, 2).unwrap();
        assert_eq!(dyadic_zygmund_seminorm(&tf), 2.0);
    }

    #[test]
    fn weierstrass_is_bounded() {
        let w = weierstrass(10, 8).unwrap();
        let norm = zygmund_seminorm(&w);
        assert!(norm.is_finite() && norm > 0.0);
        assert!((w.values()[0] - (2.0 - f64::powi(0.5, 7))).abs() < 1e-12);
    }

    #[test]
    fn cascade_preserves_mass_and_splits() {
        let mu = cascade(1, 6, &[0.25], 9).unwrap();
        assert_eq!(mu.total_mass(), 1.0);
        assert_eq!(mu.delta2_max(&DyadicCube::unit(1)).unwrap(), 0.25);
        let mu2 = cascade(2, 4, &[0.25, 0.125], 9).unwrap();
        assert_eq!(mu2.total_mass(), 1.0);
        assert_eq!(mu2.delta2_max(&DyadicCube::unit(2)).unwrap(), 0.5625);
        assert!(mu2.zygmund_norm(NormMode::Dyadic) > 0.0);
    }

    #[test]
    fn kind_roundtrip() {
        let k = Kind::Lacunary { c: 1.0, r: 2 };
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(text, r#"{"kind":"lacunary","c":1.0,"r":2}"#);
        assert_eq!(serde_json::from_str::<Kind>(&text).unwrap(), k);
    }
}
