//! Measures on `[0, 1]^d` given by their masses on the finest dyadic cubes.
//!
//! Inside a finest cube the measure is spread uniformly, so the mass of any
//! cube whose corners lie on the half-cell lattice `2^-(N+1) Z^d` is an exact
//! finite sum. Masses are read from a summed-area table at half-cell
//! resolution; everything outside `[0, 1]^d` has zero mass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{interval_of, translation};
use crate::error::{Error, Result};
use crate::functionals::counting_functional;
use crate::martingale::DyadicMartingale;
use crate::scalar::{exact_pow2, Exact, Scalar};

/// Cube `prod_i [k_i 2^-n - t_n, (k_i + 1) 2^-n - t_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub generation: i32,
    pub offset: Vec<i64>,
}

impl DyadicCube {
    pub fn new(generation: i32, offset: Vec<i64>) -> Self {
        Self { generation, offset }
    }

    pub fn unit(dim: u32) -> Self {
        Self::new(0, vec![0; dim as usize])
    }

    pub fn dim(&self) -> u32 {
        self.offset.len() as u32
    }

    pub fn side(&self) -> Exact {
        exact_pow2(-self.generation)
    }

    /// Lower corner.
    pub fn corner(&self) -> Vec<Exact> {
        self.offset
            .iter()
            .map(|&k| interval_of(self.generation, k).left())
            .collect()
    }

    pub fn predecessor(&self) -> DyadicCube {
        let parent = self.generation - 1;
        let offset = self
            .corner()
            .iter()
            .map(|&x| ((x + translation(parent)) / exact_pow2(-parent)).floor().to_integer() as i64)
            .collect();
        DyadicCube::new(parent, offset)
    }
}

/// Which supremum [`GridMeasure::zygmund_norm`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMode {
    /// `|Delta_2 mu(x, h)|` over centres on the half-cell lattice and sides
    /// that are whole multiples of the cell, with `Q(x, h)` inside the unit
    /// cube.
    ContinuousGrid,
    /// `Delta_2^* mu(Q)` over dyadic cubes.
    Dyadic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure<T> {
    dim: u32,
    depth: u32,
    masses: Vec<T>,
    sat: Vec<T>,
}

impl<T: Scalar> GridMeasure<T> {
    pub fn new(dim: u32, depth: u32, masses: Vec<T>) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::param("dim", "dimension must be in 1..=4"));
        }
        if depth < 1 || dim * (depth + 1) > 26 {
            return Err(Error::param("depth", "grid too large for the summed-area table"));
        }
        let expected = 1usize << (dim * depth);
        if masses.len() != expected {
            return Err(Error::Input(format!(
                "expected {expected} masses for dim {dim} depth {depth}, found {}",
                masses.len()
            )));
        }
        if let Some(i) = masses.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::Input(format!("mass {i} is not finite")));
        }
        let sat = summed_area(dim, depth, &masses);
        Ok(Self {
            dim,
            depth,
            masses,
            sat,
        })
    }

    /// Lebesgue measure restricted to the unit cube.
    pub fn uniform(dim: u32, depth: u32) -> Result<Self> {
        let cell = T::one() / T::pow2(dim * depth);
        Self::new(dim, depth, vec![cell; 1usize << (dim * depth)])
    }

    pub fn zero(dim: u32, depth: u32) -> Result<Self> {
        Self::new(dim, depth, vec![T::zero(); 1usize << (dim * depth)])
    }

    /// `d nu = b dx` for a leaf density field `b`.
    pub fn from_density(dim: u32, depth: u32, density: &[T]) -> Result<Self> {
        let cell = T::one() / T::pow2(dim * depth);
        Self::new(dim, depth, density.iter().map(|&b| b * cell).collect())
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn total_mass(&self) -> T {
        self.masses.iter().fold(T::zero(), |acc, &m| acc + m)
    }

    /// Half cells per unit length, `2^(N+1)`.
    fn half_cells(&self) -> i64 {
        1i64 << (self.depth + 1)
    }

    /// Mass of the box `prod [lo_i, hi_i)` in half-cell units, clipped to the
    /// unit cube.
    pub fn box_mass(&self, lo: &[i64], hi: &[i64]) -> T {
        let side = self.half_cells();
        let stride = (side + 1) as usize;
        let mut clo = [0usize; 4];
        let mut chi = [0usize; 4];
        for i in 0..self.dim as usize {
            let a = lo[i].clamp(0, side);
            let b = hi[i].clamp(0, side);
            if b <= a {
                return T::zero();
            }
            clo[i] = a as usize;
            chi[i] = b as usize;
        }
        let mut total = T::zero();
        for corner in 0..(1usize << self.dim) {
            let mut index = 0usize;
            let mut negative = false;
            for i in 0..self.dim as usize {
                let upper = (corner >> i) & 1 == 1;
                let coord = if upper { chi[i] } else { clo[i] };
                if !upper {
                    negative = !negative;
                }
                index = index * stride + coord;
            }
            let v = self.sat[index];
            total = if negative { total - v } else { total + v };
        }
        total
    }

    fn to_half_cells(&self, x: Exact) -> Result<i64> {
        let scaled = x * Exact::from_integer(self.half_cells() as i128);
        if !scaled.is_integer() {
            return Err(Error::OffGrid {
                point: x.to_string(),
            });
        }
        Ok(scaled.to_integer() as i64)
    }

    fn check_point(&self, x: &[Exact]) -> Result<()> {
        if x.len() != self.dim as usize {
            return Err(Error::param("x", format!("expected {} coordinates", self.dim)));
        }
        Ok(())
    }

    /// Mass of the cube with centre `x` and side `h`.
    pub fn cube_mass(&self, x: &[Exact], h: Exact) -> Result<T> {
        self.check_point(x)?;
        if h <= Exact::from_integer(0) {
            return Err(Error::param("h", "side must be positive"));
        }
        let half = h / Exact::from_integer(2);
        let mut lo = [0i64; 4];
        let mut hi = [0i64; 4];
        for (i, &xi) in x.iter().enumerate() {
            lo[i] = self.to_half_cells(xi - half)?;
            hi[i] = self.to_half_cells(xi + half)?;
        }
        Ok(self.box_mass(&lo[..x.len()], &hi[..x.len()]))
    }

    /// `Delta_1 mu(x, h) = mu(Q(x, h)) / |Q(x, h)|`.
    pub fn density(&self, x: &[Exact], h: Exact) -> Result<T> {
        let mass = self.cube_mass(x, h)?;
        Ok(mass / T::from_exact(h).powi_int(self.dim))
    }

    /// `Delta_2 mu(x, h) = Delta_1 mu(x, h) - Delta_1 mu(x, 2h)`.
    pub fn delta2(&self, x: &[Exact], h: Exact) -> Result<T> {
        Ok(self.density(x, h)? - self.density(x, h * Exact::from_integer(2))?)
    }

    /// `Delta_2 mu` at centre `x` and side `h`, both in half-cell units.
    #[inline]
    pub(crate) fn delta2_units(&self, x: &[i64], h: i64) -> T {
        let d = self.dim as usize;
        let mut lo = [0i64; 4];
        let mut hi = [0i64; 4];
        for i in 0..d {
            lo[i] = x[i] - h / 2;
            hi[i] = x[i] + h / 2;
        }
        let inner = self.box_mass(&lo[..d], &hi[..d]);
        for i in 0..d {
            lo[i] = x[i] - h;
            hi[i] = x[i] + h;
        }
        let outer = self.box_mass(&lo[..d], &hi[..d]);
        let vol = (T::from_i64(h).expect("side") / T::pow2(self.depth + 1)).powi_int(self.dim);
        (inner - outer / T::pow2(self.dim)) / vol
    }

    pub fn cube_density(&self, cube: &DyadicCube) -> Result<T> {
        if cube.dim() != self.dim {
            return Err(Error::param("cube", "dimension mismatch"));
        }
        if cube.generation > self.depth as i32 {
            return Err(Error::TooFine {
                generation: cube.generation as i64,
                depth: self.depth,
            });
        }
        let corner = cube.corner();
        let side = cube.side();
        let lo: Vec<i64> = corner
            .iter()
            .map(|&c| self.to_half_cells(c))
            .collect::<Result<_>>()?;
        let len = self.to_half_cells(side)?;
        let hi: Vec<i64> = lo.iter().map(|&a| a + len).collect();
        Ok(self.box_mass(&lo, &hi) / T::from_exact(side).powi_int(self.dim))
    }

    /// `Delta_1 mu(Q) - Delta_1 mu(Q*)`.
    pub fn delta2_dyadic(&self, cube: &DyadicCube) -> Result<T> {
        Ok(self.cube_density(cube)? - self.cube_density(&cube.predecessor())?)
    }

    /// `max_{Q'} |Delta_1 mu(Q') - Delta_1 mu(Q)|` over the children of `Q`.
    pub fn delta2_max(&self, cube: &DyadicCube) -> Result<T> {
        if cube.generation >= self.depth as i32 {
            return Err(Error::TooFine {
                generation: cube.generation as i64,
                depth: self.depth,
            });
        }
        let parent = self.cube_density(cube)?;
        let mut best = T::zero();
        for c in 0..(1usize << self.dim) {
            let offset = cube
                .offset
                .iter()
                .enumerate()
                .map(|(i, &k)| child_offset(cube.generation, k, (c >> i) & 1))
                .collect();
            let child = DyadicCube::new(cube.generation + 1, offset);
            best = best.max_of((self.cube_density(&child)? - parent).abs());
        }
        Ok(best)
    }

    /// Density martingale `S_n(Q) = Delta_1 mu(Q)` on the cubes of `[0, 1)^d`.
    pub fn density_martingale(&self) -> DyadicMartingale<T> {
        let scale = T::pow2(self.dim * self.depth);
        let leaves = self.masses.iter().map(|&m| m * scale).collect();
        DyadicMartingale::from_leaves(self.dim, self.depth, leaves)
            .expect("leaf count matches the grid")
    }

    pub fn zygmund_norm(&self, mode: NormMode) -> T {
        match mode {
            NormMode::Dyadic => {
                let s = self.density_martingale();
                let mut best = T::zero();
                for g in 0..self.depth {
                    for k in 0..s.level_len(g) {
                        best = best.max_of(s.max_child_jump(g, k));
                    }
                }
                best
            }
            NormMode::ContinuousGrid => self.continuous_norm(),
        }
    }

    fn continuous_norm(&self) -> T {
        let side = self.half_cells();
        let d = self.dim as usize;
        let points = (side + 1).pow(self.dim);
        (0..points)
            .into_par_iter()
            .map(|p| {
                let mut x = [0i64; 4];
                let mut rest = p;
                for i in (0..d).rev() {
                    x[i] = rest % (side + 1);
                    rest /= side + 1;
                }
                let reach = (0..d).map(|i| x[i].min(side - x[i])).min().unwrap_or(0);
                let mut best = T::zero();
                let mut h = 2;
                while h / 2 <= reach {
                    best = best.max_of(self.delta2_units(&x[..d], h).abs());
                    h += 2;
                }
                best
            })
            .reduce(T::zero, |a, b| a.max_of(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.depth != other.depth {
            return Err(Error::param("other", "measures live on different grids"));
        }
        Self::new(
            self.dim,
            self.depth,
            self.masses
                .iter()
                .zip(&other.masses)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    /// Sum over every box-lattice point of the cubes at levels `0..depth`,
    /// normalised like [`crate::functionals::strichartz_functional`].
    fn box_sum(&self, level: u32, offset: &[i64], layers: u32, g: &(impl Fn(T) -> T + Sync)) -> T {
        let d = self.dim as usize;
        let side = self.half_cells() >> level;
        let mut total = T::zero();
        for n in 0..layers {
            let h = side >> (n + 1);
            let per_axis = 1i64 << (n + 1);
            let count = per_axis.pow(self.dim);
            let mut layer = T::zero();
            let mut x = [0i64; 4];
            for p in 0..count {
                let mut rest = p;
                for i in (0..d).rev() {
                    x[i] = offset[i] * side + (rest % per_axis) * h;
                    rest /= per_axis;
                }
                layer = layer + g(self.delta2_units(&x[..d], h));
            }
            total = total + layer / T::pow2((n + 1) * self.dim);
        }
        total
    }

    fn sup_over_cubes(&self, depth: u32, g: impl Fn(T) -> T + Sync) -> Result<T> {
        if depth < 1 || depth > self.depth {
            return Err(Error::TooFine {
                generation: depth as i64,
                depth: self.depth,
            });
        }
        let d = self.dim as usize;
        let cubes: Vec<(u32, Vec<i64>)> = (0..depth)
            .flat_map(|level| {
                let per_axis = 1i64 << level;
                (0..per_axis.pow(self.dim)).map(move |p| {
                    let mut offset = vec![0i64; d];
                    let mut rest = p;
                    for i in (0..d).rev() {
                        offset[i] = rest % per_axis;
                        rest /= per_axis;
                    }
                    (level, offset)
                })
            })
            .collect();
        let best = cubes
            .par_iter()
            .map(|(level, offset)| self.box_sum(*level, offset, depth - level, &g))
            .reduce(T::zero, |a, b| a.max_of(b));
        Ok(T::ln2() * best)
    }

    /// `C(mu, epsilon)` at a finite depth over dyadic base cubes.
    pub fn c_measure(&self, epsilon: T, depth: u32) -> Result<T> {
        if epsilon <= T::zero() {
            return Err(Error::param("epsilon", "must be positive"));
        }
        self.sup_over_cubes(depth, move |v: T| {
            if v.abs() > epsilon {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    /// `(1/|Q|) int_Q int_0^l(Q) |Delta_2 nu|^2 dh dx / h` on the box lattice of
    /// one cube of `[0, 1)^d`.
    pub fn ibmo_functional(&self, cube: &DyadicCube, depth: u32) -> Result<T> {
        if cube.generation < 0 || cube.generation as u32 + depth > self.depth || depth < 1 {
            return Err(Error::TooFine {
                generation: cube.generation as i64,
                depth: self.depth,
            });
        }
        Ok(T::ln2() * self.box_sum(cube.generation as u32, &cube.offset, depth, &|v: T| v * v))
    }

    /// Largest [`Self::ibmo_functional`] over dyadic base cubes.
    pub fn ibmo_sup(&self, depth: u32) -> Result<T> {
        self.sup_over_cubes(depth, |v: T| v * v)
    }

    /// `D(mu, epsilon)`: cubes whose `Delta_2^*` exceeds `epsilon`.
    pub fn d_measure(&self, epsilon: T, depth: u32) -> Result<T> {
        if epsilon <= T::zero() {
            return Err(Error::param("epsilon", "must be positive"));
        }
        counting_functional(&self.density_martingale(), epsilon, depth)
    }
}

fn child_offset(generation: i32, k: i64, bit: usize) -> i64 {
    let left = interval_of(generation, k).left();
    let child = generation + 1;
    let first = ((left + translation(child)) / exact_pow2(-child))
        .floor()
        .to_integer() as i64;
    first + bit as i64
}

fn summed_area<T: Scalar>(dim: u32, depth: u32, masses: &[T]) -> Vec<T> {
    let cells = 1usize << depth;
    let side = 2 * cells;
    let stride = side + 1;
    let d = dim as usize;
    let total = stride.pow(dim);
    let mut sat = vec![T::zero(); total];
    let share = T::one() / T::pow2(dim);
    let mut coords = [0usize; 4];
    for (index, slot) in sat.iter_mut().enumerate() {
        let mut rest = index;
        let mut inside = true;
        for i in (0..d).rev() {
            coords[i] = rest % stride;
            rest /= stride;
            if coords[i] == 0 {
                inside = false;
            }
        }
        if inside {
            let mut cell = 0usize;
            for c in coords.iter().take(d) {
                cell = cell * cells + (c - 1) / 2;
            }
            *slot = masses[cell] * share;
        }
    }
    let mut step = 1usize;
    for _ in 0..d {
        for index in 0..total {
            if (index / step) % stride != 0 {
                let prev = sat[index - step];
                sat[index] = sat[index] + prev;
            }
        }
        step *= stride;
    }
    sat
}

trait PowiInt {
    fn powi_int(self, exp: u32) -> Self;
}

impl<T: Scalar> PowiInt for T {
    fn powi_int(self, exp: u32) -> Self {
        (0..exp).fold(T::one(), |acc, _| acc * self)
    }
}
