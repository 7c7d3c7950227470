//! Functions sampled on a dyadic grid.

use crate::dyadic::{DyadicInterval, RealInterval};
use crate::error::{Error, Result};
use crate::scalar::{exact_pow2, Exact, Scalar};

/// Values of a function at the `2^depth + 1` grid points of a dyadic root
/// interval (by default `[0, 1]`).
///
/// A function whose two end values vanish is treated as compactly supported
/// and is extended by zero outside the root.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    root: DyadicInterval,
    depth: u32,
    values: Vec<T>,
    origin: i64,
    compact: bool,
}

impl<T: Scalar> SampledFunction<T> {
    /// Function on `[0, 1]`.
    pub fn new(depth: u32, values: Vec<T>) -> Result<Self> {
        Self::on_root(DyadicInterval::UNIT, depth, values)
    }

    pub fn on_root(root: DyadicInterval, depth: u32, values: Vec<T>) -> Result<Self> {
        if depth < 1 || depth > 30 {
            return Err(Error::param("depth", format!("{depth} is outside 1..=30")));
        }
        if root.generation + (depth as i32) < 0 {
            return Err(Error::param("depth", "grid spacing must be at most 1"));
        }
        let expected = (1usize << depth) + 1;
        if values.len() != expected {
            return Err(Error::Input(format!(
                "expected {expected} values for depth {depth}, found {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::Input(format!("value {i} is not finite")));
        }
        Ok(Self::assemble(root, depth, values))
    }

    fn assemble(root: DyadicInterval, depth: u32, values: Vec<T>) -> Self {
        let resolution = root.generation + depth as i32;
        let origin = (root.interval().left() / exact_pow2(-resolution)).to_integer() as i64;
        let compact = values[0].is_zero() && values[values.len() - 1].is_zero();
        Self {
            root,
            depth,
            values,
            origin,
            compact,
        }
    }

    pub fn zeros(root: DyadicInterval, depth: u32) -> Result<Self> {
        Self::on_root(root, depth, vec![T::zero(); (1usize << depth) + 1])
    }

    /// Samples `f` at the exact grid points of `root`.
    pub fn from_fn(root: DyadicInterval, depth: u32, f: impl Fn(Exact) -> T) -> Result<Self> {
        let base = root.interval().left();
        let step = root.length() * exact_pow2(-(depth as i32));
        let values = (0..=(1i128 << depth))
            .map(|i| f(base + step * Exact::from_integer(i)))
            .collect();
        Self::on_root(root, depth, values)
    }

    pub fn root(&self) -> DyadicInterval {
        self.root
    }

    pub fn domain(&self) -> RealInterval {
        self.root.interval()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Number of grid cells, `2^depth`.
    pub fn cells(&self) -> usize {
        1usize << self.depth
    }

    /// Grid spacing is `2^-resolution`.
    pub fn resolution(&self) -> u32 {
        (self.root.generation + self.depth as i32) as u32
    }

    pub fn step(&self) -> T {
        T::dyadic(1, self.resolution())
    }

    pub fn step_exact(&self) -> Exact {
        exact_pow2(-(self.resolution() as i32))
    }

    /// Absolute lattice index of the first grid point.
    #[inline]
    pub fn origin(&self) -> i64 {
        self.origin
    }

    #[inline]
    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn point(&self, i: usize) -> Exact {
        self.root.interval().left() + self.step_exact() * Exact::from_integer(i as i128)
    }

    /// Value at absolute lattice index `j` (the point `j 2^-resolution`).
    #[inline]
    pub fn at(&self, j: i64) -> Option<T> {
        let i = j - self.origin;
        if i >= 0 && (i as usize) < self.values.len() {
            Some(self.values[i as usize])
        } else if self.compact {
            Some(T::zero())
        } else {
            None
        }
    }

    /// Absolute lattice index of an exact point, if it is on the grid.
    pub fn lattice_index(&self, x: Exact) -> Result<i64> {
        let scaled = x / self.step_exact();
        if !scaled.is_integer() {
            return Err(Error::OffGrid {
                point: x.to_string(),
            });
        }
        Ok(scaled.to_integer() as i64)
    }

    pub fn eval(&self, x: Exact) -> Result<T> {
        let j = self.lattice_index(x)?;
        self.at(j).ok_or(Error::OutOfDomain {
            point: x.to_string(),
        })
    }

    /// Same function sampled on a larger root at the same spacing.
    pub fn extend_to(&self, root: DyadicInterval) -> Result<Self> {
        if !root.contains(&self.root) {
            return Err(Error::param("root", "new root must contain the current one"));
        }
        if root != self.root && !self.is_compact() {
            return Err(Error::OutOfDomain {
                point: root.interval().left().to_string(),
            });
        }
        let depth = (self.resolution() as i32 - root.generation) as u32;
        let mut values = vec![T::zero(); (1usize << depth) + 1];
        let offset = (self.origin - Self::zeros(root, depth)?.origin) as usize;
        values[offset..offset + self.values.len()].copy_from_slice(&self.values);
        Self::on_root(root, depth, values)
    }

    /// `x -> f(x - alpha)` on `root` at the same spacing.
    pub fn translate(&self, alpha: Exact, root: DyadicInterval) -> Result<Self> {
        let shift = self.lattice_index(alpha)?;
        let depth = self.resolution() as i32 - root.generation;
        if depth < 1 {
            return Err(Error::param("root", "target root finer than the grid"));
        }
        let origin = Self::zeros(root, depth as u32)?.origin;
        let values = (0..=(1i64 << depth))
            .map(|i| {
                self.at(origin + i - shift).ok_or(Error::OutOfDomain {
                    point: alpha.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::on_root(root, depth as u32, values)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.root == other.root && self.depth == other.depth
    }

    pub fn zip_with(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::param("other", "functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::assemble(self.root, self.depth, values))
    }

    pub fn map(&self, op: impl Fn(T) -> T) -> Self {
        Self::assemble(
            self.root,
            self.depth,
            self.values.iter().map(|&v| op(v)).collect(),
        )
    }

    /// Coarser sampling of the same function.
    pub fn restrict(&self, depth: u32) -> Result<Self> {
        if depth > self.depth {
            return Err(Error::param("depth", "cannot refine by restriction"));
        }
        let stride = 1usize << (self.depth - depth);
        let values = self.values.iter().step_by(stride).copied().collect();
        Self::on_root(self.root, depth, values)
    }
}

impl SampledFunction<f64> {
    /// Piecewise linear interpolation between grid values.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        let pos = x * self.step().recip() - self.origin() as f64;
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&pos) {
            return if self.is_compact() {
                Ok(0.0)
            } else {
                Err(Error::OutOfDomain {
                    point: x.to_string(),
                })
            };
        }
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    pub fn from_f64_fn(root: DyadicInterval, depth: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(root, depth, |x| f(x.to_f64_lossy()))
    }
}
