//! Dyadic martingales on finite `2^d`-ary trees.
//!
//! Nodes are stored level by level in one flat array. Level `g` holds
//! `2^(d g)` nodes in row-major order of their offset vectors, so level `g`
//! starts at `(2^(d g) - 1) / (2^d - 1)`.

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicMartingale<T> {
    root: DyadicInterval,
    dim: u32,
    depth: u32,
    values: Vec<T>,
}

fn level_start(dim: u32, g: u32) -> usize {
    let arity = 1usize << dim;
    ((1usize << (dim * g)) - 1) / (arity - 1)
}

fn tree_len(dim: u32, depth: u32) -> usize {
    level_start(dim, depth + 1)
}

impl<T: Scalar> DyadicMartingale<T> {
    /// Builds the tree from its finest level by repeated averaging.
    pub fn from_leaves(dim: u32, depth: u32, leaves: Vec<T>) -> Result<Self> {
        Self::from_leaves_on(DyadicInterval::UNIT, dim, depth, leaves)
    }

    pub fn from_leaves_on(
        root: DyadicInterval,
        dim: u32,
        depth: u32,
        leaves: Vec<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be at least 1"));
        }
        if leaves.len() != 1usize << (dim * depth) {
            return Err(Error::Input(format!(
                "expected {} leaves, found {}",
                1usize << (dim * depth),
                leaves.len()
            )));
        }
        let mut values = vec![T::zero(); tree_len(dim, depth)];
        let start = level_start(dim, depth);
        values[start..].copy_from_slice(&leaves);
        let mut out = Self {
            root,
            dim,
            depth,
            values,
        };
        let scale = T::one() / T::pow2(dim);
        for g in (0..depth).rev() {
            for k in 0..out.level_len(g) {
                let mut acc = T::zero();
                for c in 0..out.arity() {
                    acc = acc + out.get(g + 1, out.child(g, k, c));
                }
                let at = level_start(dim, g) + k;
                out.values[at] = acc * scale;
            }
        }
        Ok(out)
    }

    /// Rebuilds a martingale top-down from a root value and a jump field.
    pub fn from_jumps(root_value: T, jumps: &JumpField<T>) -> Self {
        let mut values = vec![T::zero(); jumps.values.len()];
        values[0] = root_value;
        let mut out = Self {
            root: jumps.root,
            dim: jumps.dim,
            depth: jumps.depth,
            values,
        };
        for g in 1..=out.depth {
            let start = level_start(out.dim, g);
            for k in 0..out.level_len(g) {
                let parent = out.get(g - 1, out.parent(g, k));
                out.values[start + k] = parent + jumps.values[start + k];
            }
        }
        out
    }

    /// Average growth martingale `S(I) = (f(b) - f(a)) / |I|`.
    pub fn average_growth(f: &SampledFunction<T>) -> Self {
        let depth = f.depth();
        let values_f = f.values();
        let mut values = Vec::with_capacity(tree_len(1, depth));
        for g in 0..=depth {
            let stride = 1usize << (depth - g);
            // |I| = 2^-(root generation + g)
            let inv_len = inverse_length::<T>(f.root().generation + g as i32);
            for k in 0..(1usize << g) {
                let a = values_f[k * stride];
                let b = values_f[(k + 1) * stride];
                values.push((b - a) * inv_len);
            }
        }
        Self {
            root: f.root(),
            dim: 1,
            depth,
            values,
        }
    }

    pub fn root(&self) -> DyadicInterval {
        self.root
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn arity(&self) -> usize {
        1usize << self.dim
    }

    pub fn level_len(&self, g: u32) -> usize {
        1usize << (self.dim * g)
    }

    pub fn level(&self, g: u32) -> &[T] {
        let start = level_start(self.dim, g);
        &self.values[start..start + self.level_len(g)]
    }

    pub fn leaves(&self) -> &[T] {
        self.level(self.depth)
    }

    #[inline]
    pub fn get(&self, g: u32, k: usize) -> T {
        self.values[level_start(self.dim, g) + k]
    }

    /// Index at level `g + 1` of child `c` (bit `i` of `c` picks the upper
    /// half along axis `i`).
    #[inline]
    pub fn child(&self, g: u32, k: usize, c: usize) -> usize {
        if self.dim == 1 {
            return 2 * k + c;
        }
        let side = 1usize << g;
        let mut rest = k;
        let mut out = 0usize;
        let mut coords = [0usize; 8];
        for i in (0..self.dim as usize).rev() {
            coords[i] = rest % side;
            rest /= side;
        }
        for (i, coord) in coords.iter().enumerate().take(self.dim as usize) {
            let bit = (c >> i) & 1;
            out = out * (2 * side) + 2 * coord + bit;
        }
        out
    }

    #[inline]
    pub fn parent(&self, g: u32, k: usize) -> usize {
        if self.dim == 1 {
            return k / 2;
        }
        let side = 1usize << g;
        let mut rest = k;
        let mut coords = [0usize; 8];
        for i in (0..self.dim as usize).rev() {
            coords[i] = rest % side;
            rest /= side;
        }
        coords
            .iter()
            .take(self.dim as usize)
            .fold(0usize, |acc, &x| acc * (side / 2) + x / 2)
    }

    /// `Delta S(I) = S(I) - S(I*)` for `g >= 1`.
    #[inline]
    pub fn jump(&self, g: u32, k: usize) -> T {
        self.get(g, k) - self.get(g - 1, self.parent(g, k))
    }

    pub fn jumps(&self) -> JumpField<T> {
        let mut values = vec![T::zero(); self.values.len()];
        for g in 1..=self.depth {
            let start = level_start(self.dim, g);
            for k in 0..self.level_len(g) {
                values[start + k] = self.jump(g, k);
            }
        }
        JumpField {
            root: self.root,
            dim: self.dim,
            depth: self.depth,
            values,
        }
    }

    /// `max_c |Delta S(c)|` over the children of node `(g, k)`.
    pub fn max_child_jump(&self, g: u32, k: usize) -> T {
        let parent = self.get(g, k);
        (0..self.arity()).fold(T::zero(), |acc, c| {
            acc.max_of((self.get(g + 1, self.child(g, k, c)) - parent).abs())
        })
    }

    /// `sup |Delta S|` over generations `1..=depth`.
    pub fn star_norm(&self) -> T {
        let mut best = T::zero();
        for g in 1..=self.depth {
            for k in 0..self.level_len(g) {
                best = best.max_of(self.jump(g, k).abs());
            }
        }
        best
    }

    /// Per node, `(1/|I|) sum_J |Delta S(J)|^2 |J|` over strict descendants.
    pub fn jump_energy(&self) -> Vec<T> {
        let mut energy = vec![T::zero(); self.values.len()];
        let scale = T::one() / T::pow2(self.dim);
        for g in (0..self.depth).rev() {
            let start = level_start(self.dim, g);
            for k in 0..self.level_len(g) {
                let mut acc = T::zero();
                for c in 0..self.arity() {
                    let ck = self.child(g, k, c);
                    let j = self.jump(g + 1, ck);
                    acc = acc + j * j + energy[level_start(self.dim, g + 1) + ck];
                }
                energy[start + k] = acc * scale;
            }
        }
        energy
    }

    /// Square of the dyadic BMO norm of the martingale.
    pub fn bmo_norm_sq(&self) -> T {
        self.jump_energy()
            .into_iter()
            .fold(T::zero(), |acc, v| acc.max_of(v))
    }

    /// `(1/|I|) int_I |S_N - S(I)|^2`, evaluated directly on the leaves.
    pub fn oscillation_sq(&self, g: u32, k: usize) -> T {
        let levels = self.depth - g;
        let center = self.get(g, k);
        let mut nodes = vec![k];
        for level in g..self.depth {
            nodes = nodes
                .iter()
                .flat_map(|&n| (0..self.arity()).map(move |c| (n, c)))
                .map(|(n, c)| self.child(level, n, c))
                .collect();
        }
        let total = nodes.iter().fold(T::zero(), |acc, &n| {
            let d = self.get(self.depth, n) - center;
            acc + d * d
        });
        total / T::pow2(self.dim * levels)
    }

    /// Per leaf, `sum_n |Delta S_n(x)|^2`.
    pub fn quadratic_characteristic_sq(&self) -> Vec<T> {
        self.branch_fold(T::zero(), |acc, jump| acc + jump * jump)
    }

    /// Per leaf, `max_n |S_n(x) - S_0(x)|`.
    pub fn maximal_function(&self) -> Vec<T> {
        let root = self.values[0];
        let mut best = vec![T::zero()];
        for g in 1..=self.depth {
            let next: Vec<T> = (0..self.level_len(g))
                .map(|k| best[self.parent(g, k)].max_of((self.get(g, k) - root).abs()))
                .collect();
            best = next;
        }
        best
    }

    /// Per leaf, the number of generations whose jump exceeds `threshold`.
    pub fn jump_count_above(&self, threshold: T) -> Vec<T> {
        self.branch_fold(T::zero(), |acc, jump| {
            if jump.abs() > threshold {
                acc + T::one()
            } else {
                acc
            }
        })
    }

    /// Folds `op` along every root-to-leaf branch over the jumps.
    fn branch_fold(&self, init: T, op: impl Fn(T, T) -> T) -> Vec<T> {
        let mut acc = vec![init];
        for g in 1..=self.depth {
            let next: Vec<T> = (0..self.level_len(g))
                .map(|k| op(acc[self.parent(g, k)], self.jump(g, k)))
                .collect();
            acc = next;
        }
        acc
    }

    /// `b(x) = int_a^x S_N`, pinned to `b(a) = 0` on the root interval.
    pub fn integrate(&self) -> Result<SampledFunction<T>> {
        if self.dim != 1 {
            return Err(Error::param("dim", "integration needs a one-dimensional martingale"));
        }
        let step = inverse_length::<T>(self.root.generation + self.depth as i32);
        let step = T::one() / step;
        let mut values = Vec::with_capacity(self.leaves().len() + 1);
        let mut acc = T::zero();
        values.push(acc);
        for &slope in self.leaves() {
            acc = acc + slope * step;
            values.push(acc);
        }
        SampledFunction::on_root(self.root, self.depth, values)
    }

    /// Largest violation of the averaging identity, relative to node size.
    pub fn averaging_defect(&self) -> T {
        let scale = T::one() / T::pow2(self.dim);
        let mut worst = T::zero();
        for g in 0..self.depth {
            for k in 0..self.level_len(g) {
                let mut acc = T::zero();
                let mut size = T::zero();
                for c in 0..self.arity() {
                    let v = self.get(g + 1, self.child(g, k, c));
                    acc = acc + v;
                    size = size.max_of(v.abs());
                }
                let defect = (acc * scale - self.get(g, k)).abs();
                let denom = if size.is_zero() { T::one() } else { size };
                worst = worst.max_of(defect / denom);
            }
        }
        worst
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.depth != other.depth {
            return Err(Error::param("other", "martingales have different shapes"));
        }
        Ok(Self {
            root: self.root,
            dim: self.dim,
            depth: self.depth,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Truncated to its first `depth` generations.
    pub fn prefix(&self, depth: u32) -> Self {
        let depth = depth.min(self.depth);
        Self {
            root: self.root,
            dim: self.dim,
            depth,
            values: self.values[..tree_len(self.dim, depth)].to_vec(),
        }
    }
}

impl<T: Real> DyadicMartingale<T> {
    pub fn bmo_norm(&self) -> T {
        self.bmo_norm_sq().sqrt()
    }

    /// `<S>(x) = (sum_n |Delta S_n(x)|^2)^(1/2)` per leaf.
    pub fn quadratic_characteristic(&self) -> Vec<T> {
        self.quadratic_characteristic_sq()
            .into_iter()
            .map(|v| v.sqrt())
            .collect()
    }
}

/// `1 / 2^-generation`.
fn inverse_length<T: Scalar>(generation: i32) -> T {
    if generation >= 0 {
        T::pow2(generation as u32)
    } else {
        T::one() / T::pow2((-generation) as u32)
    }
}

/// Jumps `Delta S(I)` laid out like the martingale; level 0 is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpField<T> {
    root: DyadicInterval,
    dim: u32,
    depth: u32,
    values: Vec<T>,
}

impl<T: Scalar> JumpField<T> {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn get(&self, g: u32, k: usize) -> T {
        self.values[level_start(self.dim, g) + k]
    }

    pub fn set(&mut self, g: u32, k: usize, value: T) {
        let start = level_start(self.dim, g);
        self.values[start + k] = value;
    }

    pub fn level(&self, g: u32) -> &[T] {
        let start = level_start(self.dim, g);
        &self.values[start..start + (1usize << (self.dim * g))]
    }

    /// Largest `|sum of sibling jumps|`; zero for any genuine martingale.
    pub fn sibling_sum_defect(&self) -> T {
        let arity = 1usize << self.dim;
        let mut worst = T::zero();
        for g in 1..=self.depth {
            let level = self.level(g);
            let helper = DyadicMartingale::<T> {
                root: self.root,
                dim: self.dim,
                depth: self.depth,
                values: Vec::new(),
            };
            for p in 0..(1usize << (self.dim * (g - 1))) {
                let sum = (0..arity).fold(T::zero(), |acc, c| acc + level[helper.child(g - 1, p, c)]);
                worst = worst.max_of(sum.abs());
            }
        }
        worst
    }
}
