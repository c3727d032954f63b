//! Periodic space-time lattices, per-site field storage and the centered
//! finite-difference stencil.
//!
//! Axis 0 is time (x⁰), axes 1.. are spatial. Sites are numbered row-major
//! with axis 0 slowest.

use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, ComplexVector, Metric, MAX_DIM};

/// Smallest extent accepted for a spatial axis.
pub const MIN_EXTENT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    extents: Vec<usize>,
    spacings: Vec<f64>,
}

impl LatticeSpec {
    /// Full periodic space-time lattice; every axis needs at least 4 sites.
    pub fn new(extents: &[usize], spacings: &[f64]) -> Result<Self> {
        let spec = LatticeSpec {
            extents: extents.to_vec(),
            spacings: spacings.to_vec(),
        };
        spec.validate_shape()?;
        if let Some((axis, &e)) = extents.iter().enumerate().find(|(_, &e)| e < MIN_EXTENT) {
            return Err(Error::Lattice(format!(
                "extent {e} on axis {axis} is below the minimum {MIN_EXTENT}"
            )));
        }
        Ok(spec)
    }

    /// Uniform lattice with `extent` sites and spacing `spacing` on every axis.
    pub fn uniform(dim: usize, extent: usize, spacing: f64) -> Result<Self> {
        Self::new(&vec![extent; dim], &vec![spacing; dim])
    }

    /// A single time slice: axis 0 has one site, its spacing is the time step.
    pub fn time_slice(spatial_extents: &[usize], spatial_spacings: &[f64], dt: f64) -> Result<Self> {
        let mut extents = vec![1];
        extents.extend_from_slice(spatial_extents);
        let mut spacings = vec![dt.abs()];
        spacings.extend_from_slice(spatial_spacings);
        let spec = LatticeSpec { extents, spacings };
        spec.validate_shape()?;
        spec.validate_spatial()?;
        Ok(spec)
    }

    /// Accepts either a full lattice or a time-slice stack (time extent 1 or ≥ 3).
    pub(crate) fn from_parts(extents: Vec<usize>, spacings: Vec<f64>) -> Result<Self> {
        let spec = LatticeSpec { extents, spacings };
        spec.validate_shape()?;
        spec.validate_spatial()?;
        if spec.extents[0] == 2 || spec.extents[0] == 0 {
            return Err(Error::Lattice(format!(
                "time extent {} is neither a slice nor a stencil-capable stack",
                spec.extents[0]
            )));
        }
        Ok(spec)
    }

    /// The same spatial lattice with `slices` sites along time.
    pub fn with_time_extent(&self, slices: usize) -> Result<Self> {
        let mut extents = self.extents.clone();
        extents[0] = slices;
        Self::from_parts(extents, self.spacings.clone())
    }

    fn validate_shape(&self) -> Result<()> {
        let d = self.extents.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::Lattice(format!("dimension {d} outside 2..={MAX_DIM}")));
        }
        if self.spacings.len() != d {
            return Err(Error::Lattice(format!("{} spacings for {d} axes", self.spacings.len())));
        }
        if let Some(s) = self.spacings.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::Lattice(format!("spacing {s} is not positive")));
        }
        Ok(())
    }

    fn validate_spatial(&self) -> Result<()> {
        for axis in 1..self.dim() {
            if self.extents[axis] < MIN_EXTENT {
                return Err(Error::Lattice(format!(
                    "extent {} on axis {axis} is below the minimum {MIN_EXTENT}",
                    self.extents[axis]
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn metric(&self) -> Metric {
        Metric::new(self.dim()).expect("validated dimension")
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.extents[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacings[axis]
    }

    pub fn sites(&self) -> usize {
        self.extents.iter().product()
    }

    /// Number of sites in one time slice.
    pub fn sites_per_slice(&self) -> usize {
        self.extents[1..].iter().product()
    }

    /// Product of the spatial spacings.
    pub fn spatial_cell_volume(&self) -> f64 {
        self.spacings[1..].iter().product()
    }

    /// Number of independent antisymmetric index pairs α < β.
    pub fn pair_count(&self) -> usize {
        let d = self.dim();
        d * (d - 1) / 2
    }

    /// Index of the pair (α, β), α < β, in the p storage.
    pub fn pair_index(&self, alpha: usize, beta: usize) -> usize {
        debug_assert!(alpha < beta && beta < self.dim());
        let d = self.dim();
        alpha * (2 * d - alpha - 1) / 2 + (beta - alpha - 1)
    }

    /// Pairs (α, β) with α < β in storage order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let d = self.dim();
        (0..d).flat_map(|a| ((a + 1)..d).map(move |b| (a, b))).collect()
    }

    fn stride(&self, axis: usize) -> usize {
        self.extents[axis + 1..].iter().product()
    }

    pub fn coords(&self, site: usize) -> [usize; MAX_DIM] {
        let mut c = [0; MAX_DIM];
        let mut rest = site;
        for axis in (0..self.dim()).rev() {
            c[axis] = rest % self.extents[axis];
            rest /= self.extents[axis];
        }
        c
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.extents)
            .fold(0, |acc, (&c, &e)| acc * e + (c % e))
    }

    /// Periodic neighbour of `site` shifted by `offset` sites along `axis`.
    #[inline]
    pub fn shift(&self, site: usize, axis: usize, offset: isize) -> usize {
        let e = self.extents[axis] as isize;
        let stride = self.stride(axis);
        let c = ((site / stride) as isize) % e;
        let shifted = (c + offset).rem_euclid(e);
        (site as isize + (shifted - c) * stride as isize) as usize
    }

    /// Physical coordinate x^μ = index · Δ_μ of every axis at `site`.
    pub fn position(&self, site: usize) -> [f64; MAX_DIM] {
        let c = self.coords(site);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim() {
            x[axis] = c[axis] as f64 * self.spacings[axis];
        }
        x
    }

    /// Physical period L_μ = extent · Δ_μ.
    pub fn length(&self, axis: usize) -> f64 {
        self.extents[axis] as f64 * self.spacings[axis]
    }

    /// Sites of time slice `t`.
    pub fn slice_sites(&self, t: usize) -> std::ops::Range<usize> {
        let n = self.sites_per_slice();
        t * n..(t + 1) * n
    }

    pub(crate) fn check_direction(&self, mu: usize) -> Result<()> {
        if mu >= self.dim() {
            return Err(Error::Direction { mu, dim: self.dim() });
        }
        Ok(())
    }
}

/// Values that can live on lattice sites and be differenced.
pub trait FieldValue: Copy + Add<Output = Self> + Sub<Output = Self> {
    fn scaled(&self, s: f64) -> Self;
    /// Zero of the same shape as `self`.
    fn zero_like(&self) -> Self;
    fn max_abs(&self) -> f64;
}

impl FieldValue for f64 {
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl FieldValue for Complex64 {
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
}

impl FieldValue for ComplexVector {
    fn scaled(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }
    fn zero_like(&self) -> Self {
        ComplexVector::zeros(self.len())
    }
    fn max_abs(&self) -> f64 {
        ComplexVector::max_abs(self)
    }
}

impl FieldValue for ComplexMatrix {
    fn scaled(&self, s: f64) -> Self {
        self.scale_re(s)
    }
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.order())
    }
    fn max_abs(&self) -> f64 {
        ComplexMatrix::max_abs(self)
    }
}

/// One value per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField<T> {
    spec: LatticeSpec,
    values: Vec<T>,
}

pub type RealField = LatticeField<f64>;
pub type ScalarLatticeField = LatticeField<Complex64>;
pub type VectorLatticeField = LatticeField<ComplexVector>;
pub type MatrixLatticeField = LatticeField<ComplexMatrix>;

impl<T: Copy> LatticeField<T> {
    pub fn filled(spec: &LatticeSpec, value: T) -> Self {
        LatticeField {
            spec: spec.clone(),
            values: vec![value; spec.sites()],
        }
    }

    pub fn from_fn(spec: &LatticeSpec, f: impl FnMut(usize) -> T) -> Self {
        LatticeField {
            spec: spec.clone(),
            values: (0..spec.sites()).map(f).collect(),
        }
    }

    pub fn from_values(spec: &LatticeSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.sites() {
            return Err(Error::Lattice(format!(
                "{} values for {} sites",
                values.len(),
                spec.sites()
            )));
        }
        Ok(LatticeField {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(&T) -> U) -> LatticeField<U> {
        LatticeField {
            spec: self.spec.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U: Copy, V: Copy>(
        &self,
        other: &LatticeField<U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> LatticeField<V> {
        debug_assert_eq!(self.values.len(), other.values.len());
        LatticeField {
            spec: self.spec.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Restriction to time slice `t` as a single-slice field.
    pub fn slice(&self, t: usize) -> Result<LatticeField<T>> {
        if t >= self.spec.extent(0) {
            return Err(Error::Slice {
                slice: t,
                extent: self.spec.extent(0),
            });
        }
        let spec = self.spec.with_time_extent(1)?;
        Ok(LatticeField {
            spec,
            values: self.values[self.spec.slice_sites(t)].to_vec(),
        })
    }

    /// Stacks equal single-slice fields along time.
    pub fn stack(slices: &[&LatticeField<T>], dt: f64) -> Result<LatticeField<T>> {
        let first = slices
            .first()
            .ok_or_else(|| Error::Lattice("empty slice stack".into()))?;
        let mut spacings = first.spec.spacings.clone();
        spacings[0] = dt.abs();
        let mut extents = first.spec.extents.clone();
        extents[0] = slices.len() * first.spec.extent(0);
        let spec = LatticeSpec::from_parts(extents, spacings)?;
        let mut values = Vec::with_capacity(spec.sites());
        for s in slices {
            if s.spec.extents[1..] != first.spec.extents[1..] {
                return Err(Error::Lattice("slices have different spatial shape".into()));
            }
            values.extend_from_slice(&s.values);
        }
        Ok(LatticeField { spec, values })
    }
}

impl<T: FieldValue> LatticeField<T> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &LatticeField<T>) -> LatticeField<T> {
        self.zip_map(other, |a, b| *a + *b)
    }

    pub fn sub(&self, other: &LatticeField<T>) -> LatticeField<T> {
        self.zip_map(other, |a, b| *a - *b)
    }

    pub fn scaled(&self, s: f64) -> LatticeField<T> {
        self.map(|v| v.scaled(s))
    }
}

impl<T> std::ops::Index<usize> for LatticeField<T> {
    type Output = T;
    fn index(&self, site: usize) -> &T {
        &self.values[site]
    }
}

impl<T> std::ops::IndexMut<usize> for LatticeField<T> {
    fn index_mut(&mut self, site: usize) -> &mut T {
        &mut self.values[site]
    }
}

/// Second-order centered difference (f(x+Δê_μ) − f(x−Δê_μ)) / (2Δ_μ) with periodic wrap.
pub fn central_diff<T: FieldValue>(f: &LatticeField<T>, mu: usize) -> Result<LatticeField<T>> {
    let spec = f.spec();
    spec.check_direction(mu)?;
    if spec.extent(mu) < 3 {
        return Err(Error::StencilExtent {
            axis: mu,
            extent: spec.extent(mu),
        });
    }
    let inv = 1.0 / (2.0 * spec.spacing(mu));
    Ok(LatticeField::from_fn(spec, |site| {
        let fwd = f[spec.shift(site, mu, 1)];
        let bwd = f[spec.shift(site, mu, -1)];
        (fwd - bwd).scaled(inv)
    }))
}

/// Like [`central_diff`], but an axis with a single site (a time slice) has zero derivative.
pub fn central_diff_or_flat<T: FieldValue>(f: &LatticeField<T>, mu: usize) -> Result<LatticeField<T>> {
    f.spec().check_direction(mu)?;
    if f.spec().extent(mu) == 1 {
        return Ok(f.map(|v| v.zero_like()));
    }
    central_diff(f, mu)
}

/// Central difference evaluated at a single site.
#[inline]
pub fn central_diff_at<T: FieldValue>(f: &LatticeField<T>, site: usize, mu: usize) -> T {
    let spec = f.spec();
    let fwd = f[spec.shift(site, mu, 1)];
    let bwd = f[spec.shift(site, mu, -1)];
    (fwd - bwd).scaled(1.0 / (2.0 * spec.spacing(mu)))
}

/// Axes along which the stencil can be applied (extent ≥ 3).
pub fn stencil_axes(spec: &LatticeSpec) -> impl Iterator<Item = usize> + '_ {
    (0..spec.dim()).filter(move |&mu| spec.extent(mu) >= 3)
}
