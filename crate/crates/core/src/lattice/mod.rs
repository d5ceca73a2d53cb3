//! Periodic reduced-dimension lattice fields of isometric Spin(7)-structures:
//! fiber-coordinate parametrization through Ω²₇, spatial differentiation,
//! and field-level torsion assembly.
//!
//! Fields vary along 1-3 active coordinates of the 8-torus while all tensors
//! stay fully 8-dimensional; every pointwise identity is exercised, only the
//! PDE support is reduced.

mod chart;
mod kernel;
mod snapshot;

pub use chart::FiberChart;
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};

pub(crate) use chart::{exp_omega27, expm_skew, reorthonormalize};
pub(crate) use kernel::PackedCayley;

use crate::algebra::{pullback_four_form, FourForm, GradientSlices};
use crate::error::CoreError;
use crate::torsion::TorsionTensor;
use crate::{Fiber7, Matrix8};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Periodic lattice over 1-3 active coordinate directions of the 8-torus.
/// Sites are stored row-major in active-dimension order (last axis fastest).
/// Construction is validated; deserialization goes through a raw section
/// type on the CLI side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeGrid {
    active_dims: Vec<usize>,
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl LatticeGrid {
    pub fn new(
        active_dims: Vec<usize>,
        sizes: Vec<usize>,
        lengths: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let k = active_dims.len();
        if k == 0 || k > 3 {
            return Err(CoreError::InvalidGrid(format!(
                "need 1..=3 active dimensions, got {k}"
            )));
        }
        if sizes.len() != k || lengths.len() != k {
            return Err(CoreError::InvalidGrid(
                "active_dims, sizes and lengths must have equal length".into(),
            ));
        }
        for &d in &active_dims {
            if d >= 8 {
                return Err(CoreError::InvalidGrid(format!("dimension index {d} out of 0..8")));
            }
        }
        let mut sorted = active_dims.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(CoreError::InvalidGrid("active dimensions must be distinct".into()));
        }
        for &n in &sizes {
            if n < 8 || !n.is_power_of_two() {
                return Err(CoreError::InvalidGrid(format!(
                    "sizes must be powers of two >= 8, got {n}"
                )));
            }
        }
        for &l in &lengths {
            if !(l > 0.0) || !l.is_finite() {
                return Err(CoreError::InvalidGrid(format!("lengths must be positive, got {l}")));
            }
        }
        Ok(LatticeGrid { active_dims, sizes, lengths })
    }

    /// Square grid over the first `k` coordinates with side `length`.
    pub fn square(k: usize, size: usize, length: f64) -> Result<Self, CoreError> {
        LatticeGrid::new((0..k).collect(), vec![size; k], vec![length; k])
    }

    pub fn n_active(&self) -> usize {
        self.active_dims.len()
    }

    pub fn active_dims(&self) -> &[usize] {
        &self.active_dims
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.n_active()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn num_sites(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.n_active()).map(|a| self.spacing(a)).product()
    }

    pub fn coords_of(&self, site: usize) -> [usize; 3] {
        let mut c = [0usize; 3];
        let mut rem = site;
        for axis in (0..self.n_active()).rev() {
            c[axis] = rem % self.sizes[axis];
            rem /= self.sizes[axis];
        }
        c
    }

    pub fn site_of(&self, coords: &[usize]) -> usize {
        let mut s = 0;
        for axis in 0..self.n_active() {
            s = s * self.sizes[axis] + (coords[axis] % self.sizes[axis]);
        }
        s
    }

    /// Periodic neighbor along an active axis.
    pub fn neighbor(&self, site: usize, axis: usize, offset: isize) -> usize {
        let mut c = self.coords_of(site);
        let n = self.sizes[axis] as isize;
        c[axis] = ((c[axis] as isize + offset).rem_euclid(n)) as usize;
        self.site_of(&c[..self.n_active()])
    }

    /// Coordinate of a site along an active axis, in [0, length).
    pub fn position(&self, site: usize, axis: usize) -> f64 {
        self.coords_of(site)[axis] as f64 * self.spacing(axis)
    }

    fn check_stencil(&self, order: StencilOrder) -> Result<(), CoreError> {
        let needed = match order {
            StencilOrder::Two => 3,
            StencilOrder::Four => 5,
        };
        for (axis, &n) in self.sizes.iter().enumerate() {
            if n < needed {
                return Err(CoreError::GridTooSmall { axis, size: n, needed });
            }
        }
        Ok(())
    }
}

/// Centered finite-difference order for spatial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "4")]
    Four,
}

/// R^7 fiber coordinate per lattice site (coefficients against the fixed
/// orthonormal Ω²₇ basis).
#[derive(Debug, Clone, PartialEq)]
pub struct FiberField {
    grid: LatticeGrid,
    values: Vec<Fiber7>,
}

impl FiberField {
    pub fn new(grid: LatticeGrid, values: Vec<Fiber7>) -> Self {
        assert_eq!(values.len(), grid.num_sites());
        FiberField { grid, values }
    }

    pub fn constant(grid: LatticeGrid, a: Fiber7) -> Self {
        let n = grid.num_sites();
        FiberField { grid, values: vec![a; n] }
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Fiber7] {
        &self.values
    }

    pub fn value(&self, site: usize) -> &Fiber7 {
        &self.values[site]
    }

    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|a| a.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Lattice-indexed Spin(7)-structures: the generating rotation Q(x) per site;
/// Phi(x) is the pullback of the standard form and is materialized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureField {
    grid: LatticeGrid,
    rotations: Vec<Matrix8>,
}

impl StructureField {
    pub fn from_fiber(field: &FiberField) -> Self {
        let chart = FiberChart::standard();
        let rotations: Vec<Matrix8> =
            field.values.par_iter().map(|a| chart.rotation(a)).collect();
        StructureField { grid: field.grid.clone(), rotations }
    }

    pub fn constant(grid: LatticeGrid, a: &Fiber7) -> Self {
        let q = FiberChart::standard().rotation(a);
        let n = grid.num_sites();
        StructureField { grid, rotations: vec![q; n] }
    }

    /// Wrap an explicit per-site rotation field.
    pub fn from_rotations(grid: LatticeGrid, rotations: Vec<Matrix8>) -> Self {
        assert_eq!(rotations.len(), grid.num_sites());
        StructureField { grid, rotations }
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn rotation(&self, site: usize) -> &Matrix8 {
        &self.rotations[site]
    }

    pub(crate) fn rotations_mut(&mut self) -> &mut [Matrix8] {
        &mut self.rotations
    }

    pub fn phi_at(&self, site: usize) -> FourForm {
        pullback_four_form(&self.rotations[site], &crate::algebra::standard_phi())
    }

    /// Max over sites of `|Q^T Q - Id|`.
    pub fn orthogonality_residual(&self) -> f64 {
        self.rotations
            .par_iter()
            .map(|q| (q.transpose() * q - Matrix8::identity()).abs().max())
            .reduce(|| 0.0, f64::max)
    }

    /// Max over sites of the worst contraction-identity residual of Phi(x).
    /// For `sample_stride > 1` only every stride-th site is checked.
    pub fn admissibility_residual(&self, sample_stride: usize) -> f64 {
        let stride = sample_stride.max(1);
        (0..self.rotations.len())
            .into_par_iter()
            .step_by(stride)
            .map(|s| crate::algebra::contraction_identity_residuals(&self.phi_at(s)).max())
            .reduce(|| 0.0, f64::max)
    }

    /// Fiber coordinates of every site through the closed-form chart log.
    pub fn to_fiber(&self) -> Result<FiberField, CoreError> {
        let chart = FiberChart::standard();
        let values: Result<Vec<Fiber7>, CoreError> =
            self.rotations.par_iter().map(|q| chart.log(q)).collect();
        Ok(FiberField { grid: self.grid.clone(), values: values? })
    }
}

/// Torsion two-form per site per active axis; inactive directions are
/// identically zero and not stored.
#[derive(Debug, Clone)]
pub struct TorsionField {
    grid: LatticeGrid,
    slices: Vec<Matrix8>, // [site * n_active + axis]
}

impl TorsionField {
    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    #[inline]
    pub fn slice(&self, site: usize, axis: usize) -> &Matrix8 {
        &self.slices[site * self.grid.n_active() + axis]
    }

    /// Full torsion tensor at a site (inactive direction slots zero).
    pub fn tensor_at(&self, site: usize) -> TorsionTensor {
        let mut t = TorsionTensor::zero();
        for (axis, &dim) in self.grid.active_dims().iter().enumerate() {
            t.set_slice(dim, *self.slice(site, axis));
        }
        t
    }

    /// `|T(x)|^2` per site.
    pub fn norm_sq_field(&self) -> Vec<f64> {
        let k = self.grid.n_active();
        (0..self.grid.num_sites())
            .map(|s| {
                (0..k)
                    .map(|a| self.slices[s * k + a].iter().map(|v| v * v).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.norm_sq_field().into_iter().fold(0.0f64, f64::max).sqrt()
    }
}

/// Divergence of the torsion field, projected into Ω²₇ of the local structure.
#[derive(Debug, Clone)]
pub struct DivTorsionField {
    pub values: Vec<Matrix8>,
    /// max over sites of the dropped Ω²₂₁ component (O(h²) discretization error)
    pub max_projection_residual: f64,
}

fn stencil_weights(order: StencilOrder) -> &'static [(isize, f64)] {
    match order {
        StencilOrder::Two => &[(1, 0.5), (-1, -0.5)],
        StencilOrder::Four => &[(2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)],
    }
}

/// Finite-difference gradient of Phi at one site: one 4-form slice per
/// direction m = 0..7, exactly zero along inactive directions.
pub fn spatial_gradient_at(
    field: &StructureField,
    site: usize,
    order: StencilOrder,
) -> Result<GradientSlices, CoreError> {
    field.grid.check_stencil(order)?;
    let phi0 = crate::algebra::standard_phi();
    let mut out = GradientSlices::zero();
    for (axis, &dim) in field.grid.active_dims().iter().enumerate() {
        let h = field.grid.spacing(axis);
        let mut acc = FourForm::zero();
        for &(off, w) in stencil_weights(order) {
            let nb = field.grid.neighbor(site, axis, off);
            let phi = pullback_four_form(&field.rotations[nb], &phi0);
            acc = acc.add(&phi.scaled(w / h));
        }
        out.0[dim] = acc;
    }
    Ok(out)
}

/// Whole-field finite-difference gradient. Dense per-site 4-form slices:
/// intended for small diagnostic grids, the flow path never materializes it.
pub fn spatial_gradient(
    field: &StructureField,
    order: StencilOrder,
) -> Result<Vec<GradientSlices>, CoreError> {
    field.grid.check_stencil(order)?;
    (0..field.grid.num_sites())
        .into_par_iter()
        .map(|s| spatial_gradient_at(field, s, order))
        .collect()
}

/// Torsion field: composes the spatial gradient with the pointwise torsion
/// extraction at every site. Evaluated through the packed bond kernel
/// (`J(y;x) = Q_y D(Q_y^T Q_x) Q_x^T`), which is the same contraction
/// reassociated; equality with the literal composition is pinned by tests.
pub fn torsion_field(
    field: &StructureField,
    order: StencilOrder,
) -> Result<TorsionField, CoreError> {
    field.grid.check_stencil(order)?;
    let packed = PackedCayley::standard();
    let grid = &field.grid;
    let k = grid.n_active();
    let n = grid.num_sites();
    let reach: usize = match order {
        StencilOrder::Two => 1,
        StencilOrder::Four => 2,
    };

    // bonds[r][site*k+axis] = J(x + (r+1) h e_axis ; x)
    let bonds: Vec<Vec<Matrix8>> = (0..reach)
        .map(|r| {
            (0..n * k)
                .into_par_iter()
                .map(|idx| {
                    let site = idx / k;
                    let axis = idx % k;
                    let nb = grid.neighbor(site, axis, (r + 1) as isize);
                    packed.j_matrix(&field.rotations[nb], &field.rotations[site])
                })
                .collect()
        })
        .collect();

    let slices: Vec<Matrix8> = (0..n * k)
        .into_par_iter()
        .map(|idx| {
            let site = idx / k;
            let axis = idx % k;
            let h = grid.spacing(axis);
            // forward J at distance d: bonds[d-1][site]; backward J(x - d h; x)
            // is the transpose of the forward bond of the site d steps back
            let m = match order {
                StencilOrder::Two => {
                    let prev = grid.neighbor(site, axis, -1);
                    let jp = &bonds[0][site * k + axis];
                    let jm = bonds[0][prev * k + axis].transpose();
                    (jp - jm) / (2.0 * h)
                }
                StencilOrder::Four => {
                    let prev1 = grid.neighbor(site, axis, -1);
                    let prev2 = grid.neighbor(site, axis, -2);
                    let jp1 = &bonds[0][site * k + axis];
                    let jp2 = &bonds[1][site * k + axis];
                    let jm1 = bonds[0][prev1 * k + axis].transpose();
                    let jm2 = bonds[1][prev2 * k + axis].transpose();
                    (jp2 * (-1.0) + jp1 * 8.0 - jm1 * 8.0 + jm2) / (12.0 * h)
                }
            };
            (m - m.transpose()) * 0.5 / 96.0
        })
        .collect();

    Ok(TorsionField { grid: grid.clone(), slices })
}

/// Reference route for [`torsion_field`]: the literal composition of
/// [`spatial_gradient_at`] with the pointwise extraction. Slow; used by the
/// dual-route equality tests.
pub fn torsion_field_reference(
    field: &StructureField,
    order: StencilOrder,
) -> Result<TorsionField, CoreError> {
    let grid = &field.grid;
    let k = grid.n_active();
    let slices: Vec<Matrix8> = (0..grid.num_sites())
        .into_par_iter()
        .map(|site| {
            let dphi = spatial_gradient_at(field, site, order)?;
            let t = crate::torsion::torsion_from_gradient(&dphi, &field.phi_at(site));
            Ok((0..k).map(|a| *t.slice_matrix(grid.active_dims()[a])).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<Vec<Matrix8>>, CoreError>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(TorsionField { grid: grid.clone(), slices })
}

/// `Div T(x)_{ab} = sum_m partial_m T_{m;ab}(x)` through the same stencil,
/// projected into Ω²₇ of the local structure (the dropped part is reported).
pub fn div_torsion_field(
    field: &StructureField,
    torsion: &TorsionField,
    order: StencilOrder,
) -> Result<DivTorsionField, CoreError> {
    field.grid.check_stencil(order)?;
    let packed = PackedCayley::standard();
    let grid = &field.grid;
    let k = grid.n_active();
    let results: Vec<(Matrix8, f64)> = (0..grid.num_sites())
        .into_par_iter()
        .map(|site| {
            let mut div = Matrix8::zeros();
            for axis in 0..k {
                let h = grid.spacing(axis);
                for &(off, w) in stencil_weights(order) {
                    let nb = grid.neighbor(site, axis, off);
                    div += torsion.slice(nb, axis) * (w / h);
                }
            }
            // conjugate to the reference fiber, project, conjugate back
            let q = &field.rotations[site];
            let w = q.transpose() * div * q;
            let v = q * packed.pi7_standard(&w) * q.transpose();
            let residual = (div - v).abs().max();
            (v, residual)
        })
        .collect();
    let max_projection_residual = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(DivTorsionField { values: results.into_iter().map(|r| r.0).collect(), max_projection_residual })
}

/// Dense `nabla_i T_{j;ab}` at one site by applying the stencil to the
/// torsion field; inactive index slots are zero.
pub fn torsion_gradient_at(
    torsion: &TorsionField,
    site: usize,
    order: StencilOrder,
) -> crate::torsion::TorsionGradient {
    let grid = &torsion.grid;
    let k = grid.n_active();
    let mut dt = vec![0.0f64; 4096];
    for axis_i in 0..k {
        let dim_i = grid.active_dims()[axis_i];
        let h = grid.spacing(axis_i);
        for &(off, w) in stencil_weights(order) {
            let nb = grid.neighbor(site, axis_i, off);
            for axis_j in 0..k {
                let dim_j = grid.active_dims()[axis_j];
                let slice = torsion.slice(nb, axis_j);
                let scale = w / h;
                for a in 0..8 {
                    for b in 0..8 {
                        dt[crate::algebra::idx4(dim_i, dim_j, a, b)] += scale * slice[(a, b)];
                    }
                }
            }
        }
    }
    crate::torsion::TorsionGradient::from_fn(|i, j, a, b| dt[crate::algebra::idx4(i, j, a, b)])
}

/// Max-over-sites residuals of the flat-background Bianchi, Ricci and
/// scalar-curvature constraints on a lattice structure field.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintResiduals {
    pub bianchi: f64,
    pub ricci: f64,
    pub scalar: f64,
}

pub fn flat_constraint_residuals(
    torsion: &TorsionField,
    order: StencilOrder,
) -> ConstraintResiduals {
    let grid = &torsion.grid;
    let (bianchi, ricci, scalar) = (0..grid.num_sites())
        .into_par_iter()
        .map(|site| {
            let t = torsion.tensor_at(site);
            let dt = torsion_gradient_at(torsion, site, order);
            let b = crate::torsion::bianchi_residual(&t, &dt);
            let r = crate::torsion::ricci_residual(&t, &dt).abs().max();
            let s = crate::torsion::scalar_curvature_residual(&t, &dt).abs();
            (b, r, s)
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)));
    ConstraintResiduals { bianchi, ricci, scalar }
}

/// Deterministic band-limited random fiber field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// number of Fourier modes per fiber component
    pub modes: usize,
    /// target sup-norm of the fiber coordinate over the torus
    pub amplitude: f64,
    pub seed: u64,
    /// wavenumber band (inclusive, in units of 2 pi / L per axis)
    #[serde(default = "default_wavenumber_min")]
    pub wavenumber_min: usize,
    #[serde(default = "default_wavenumber_max")]
    pub wavenumber_max: usize,
}

fn default_wavenumber_min() -> usize {
    1
}

fn default_wavenumber_max() -> usize {
    3
}

impl GeneratorSpec {
    pub fn new(modes: usize, amplitude: f64, seed: u64) -> Self {
        GeneratorSpec {
            modes,
            amplitude,
            seed,
            wavenumber_min: default_wavenumber_min(),
            wavenumber_max: default_wavenumber_max(),
        }
    }

    pub fn with_band(mut self, min: usize, max: usize) -> Self {
        self.wavenumber_min = min;
        self.wavenumber_max = max;
        self
    }
}

struct Mode {
    wavevector: [i64; 3],
    amplitude: f64,
    phase: f64,
}

/// Sum of <= `modes` Fourier modes per fiber component, amplitudes scaled so
/// the sup of |a| over the torus equals `amplitude` (measured on a fixed
/// probe lattice independent of the grid resolution, so refining the grid
/// samples the same continuum field). Reproducible bit-for-bit from the seed;
/// the cap amplitude <= pi/2 keeps every site inside one chart.
pub fn seeded_field_generator(
    grid: &LatticeGrid,
    spec: &GeneratorSpec,
) -> Result<FiberField, CoreError> {
    use rand::{Rng, SeedableRng};
    if !(spec.amplitude >= 0.0) {
        return Err(CoreError::InvalidGrid("generator amplitude must be >= 0".into()));
    }
    if spec.amplitude > std::f64::consts::FRAC_PI_2 {
        return Err(CoreError::InvalidGrid(format!(
            "generator amplitude {} exceeds the chart cap pi/2",
            spec.amplitude
        )));
    }
    let k = grid.n_active();
    let nyquist = grid.sizes().iter().map(|n| n / 2 - 1).min().unwrap();
    if spec.wavenumber_min < 1 || spec.wavenumber_min > spec.wavenumber_max {
        return Err(CoreError::InvalidGrid("invalid generator wavenumber band".into()));
    }
    if spec.wavenumber_max > nyquist {
        return Err(CoreError::InvalidGrid(format!(
            "wavenumber_max {} beyond Nyquist bound {nyquist}",
            spec.wavenumber_max
        )));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let kmax = spec.wavenumber_max as i64;
    let kmin = spec.wavenumber_min as i64;
    let mut components: Vec<Vec<Mode>> = Vec::with_capacity(7);
    for _ in 0..7 {
        let mut modes = Vec::with_capacity(spec.modes);
        for _ in 0..spec.modes {
            let mut wavevector = [0i64; 3];
            loop {
                for w in wavevector.iter_mut().take(k) {
                    *w = rng.random_range(-kmax..=kmax);
                }
                let sup = wavevector.iter().take(k).map(|w| w.abs()).max().unwrap();
                if sup >= kmin {
                    break;
                }
            }
            modes.push(Mode {
                wavevector,
                amplitude: rng.random_range(0.5..1.0),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            });
        }
        components.push(modes);
    }

    // evaluate at fractional coordinates f in [0,1)^k
    let eval = |f: &[f64]| -> Fiber7 {
        std::array::from_fn(|n| {
            components[n]
                .iter()
                .map(|m| {
                    let arg: f64 = (0..k)
                        .map(|a| m.wavevector[a] as f64 * f[a])
                        .sum::<f64>()
                        * std::f64::consts::TAU
                        + m.phase;
                    m.amplitude * arg.cos()
                })
                .sum()
        })
    };

    // grid-independent normalization probe
    let probe_per_dim: usize = match k {
        1 => 4096,
        2 => 256,
        _ => 64,
    };
    let mut sup = 0.0f64;
    let probe_total = probe_per_dim.pow(k as u32);
    for s in 0..probe_total {
        let mut rem = s;
        let mut f = [0.0f64; 3];
        for axis in (0..k).rev() {
            f[axis] = (rem % probe_per_dim) as f64 / probe_per_dim as f64;
            rem /= probe_per_dim;
        }
        let a = eval(&f[..k]);
        sup = sup.max(a.iter().map(|v| v * v).sum::<f64>());
    }
    let sup = sup.sqrt();
    let scale = if sup > 0.0 && spec.amplitude > 0.0 && spec.modes > 0 {
        spec.amplitude / sup
    } else {
        0.0
    };

    let values: Vec<Fiber7> = (0..grid.num_sites())
        .map(|site| {
            let c = grid.coords_of(site);
            let f: Vec<f64> = (0..k).map(|a| c[a] as f64 / grid.sizes()[a] as f64).collect();
            let mut a = eval(&f);
            a.iter_mut().for_each(|v| *v *= scale);
            a
        })
        .collect();

    Ok(FiberField { grid: grid.clone(), values })
}

/// Haar-ish random SO(8) rotation (QR of a Gaussian matrix, determinant fixed
/// to +1); used by the verification catalogue and tests.
pub fn random_so8(rng: &mut impl rand::Rng) -> Matrix8 {
    let gauss = |rng: &mut dyn FnMut() -> f64| -> f64 {
        // Box-Muller
        let u1: f64 = rng();
        let u2: f64 = rng();
        (-2.0 * u1.max(1e-300).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let mut draw = || rng.random_range(0.0..1.0);
    let m = Matrix8::from_fn(|_, _| gauss(&mut draw));
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..8 {
        if r[(j, j)] < 0.0 {
            for i in 0..8 {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..8 {
            q[(i, 7)] = -q[(i, 7)];
        }
    }
    q
}
