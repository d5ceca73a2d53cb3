//! Monitored quantities of the flow: energy, sup-torsion, the weighted
//! torsion energy Theta against periodized backward heat kernels, the entropy
//! lambda, the Z(t) series, the flat-background |T|^2 evolution residual, and
//! the singular-site detector.

use crate::error::CoreError;
use crate::lattice::{LatticeGrid, StencilOrder, TorsionField};
use serde::{Deserialize, Serialize};

/// Backward heat kernel on the active torus: center, singular time, and the
/// number of periodization images per active dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelSpec {
    /// center coordinates, one per active dimension (may be off-grid)
    pub center: Vec<f64>,
    /// singular time t0; kernels are evaluated at times t < t0
    pub t0: f64,
    /// periodization images per active dimension (method of images)
    #[serde(default = "default_images")]
    pub images: usize,
}

fn default_images() -> usize {
    3
}

/// Energy functional `E = (1/2) sum_sites |T(x)|^2 cellvol`, deterministic
/// site-order summation.
pub fn energy_from_field(e_field: &[f64], grid: &LatticeGrid) -> f64 {
    0.5 * e_field.iter().sum::<f64>() * grid.cell_volume()
}

/// `sup_M |T(x)|`
pub fn sup_torsion_from_field(e_field: &[f64]) -> f64 {
    e_field.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt()
}

/// Periodized 1-D Gaussian factors along one axis relative to a center
/// coordinate: `u[i] = sum_img g(i h - c + img L; tau)` with
/// `g(y; tau) = exp(-y^2 / 4 tau) / sqrt(4 pi tau)`.
fn axis_kernel(n: usize, h: f64, length: f64, tau: f64, center: f64, images: usize) -> Vec<f64> {
    let norm = 1.0 / (4.0 * std::f64::consts::PI * tau).sqrt();
    (0..n)
        .map(|i| {
            let x = i as f64 * h - center;
            let mut s = 0.0;
            for img in -(images as i64)..=(images as i64) {
                let d = x + img as f64 * length;
                s += (-d * d / (4.0 * tau)).exp();
            }
            s * norm
        })
        .collect()
}

/// Quadrature of `|T|^2 u` over the torus with the periodized Gaussian of
/// variance parameter tau = t0 - t, normalized to unit discrete mass.
/// Returns `(t0 - t) * integral`. Errors when the raw kernel mass is off by
/// more than 1e-6 (too few periodization images or an under-resolved kernel).
pub fn theta(
    e_field: &[f64],
    grid: &LatticeGrid,
    spec: &HeatKernelSpec,
    t: f64,
) -> Result<f64, CoreError> {
    let tau = spec.t0 - t;
    if !(tau > 0.0) {
        return Err(CoreError::InvalidFlowConfig(format!(
            "theta requires t < t0 (t = {t}, t0 = {})",
            spec.t0
        )));
    }
    if spec.center.len() != grid.n_active() {
        return Err(CoreError::InvalidFlowConfig(
            "kernel center dimension does not match the grid".into(),
        ));
    }
    let k = grid.n_active();
    let kernels: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            axis_kernel(grid.sizes()[a], grid.spacing(a), grid.lengths()[a], tau, spec.center[a], spec.images)
        })
        .collect();
    let mut mass = 1.0;
    for (a, kern) in kernels.iter().enumerate() {
        mass *= kern.iter().sum::<f64>() * grid.spacing(a);
    }
    if (mass - 1.0).abs() > 1e-6 {
        return Err(CoreError::KernelMass((mass - 1.0).abs()));
    }
    let mut integral = 0.0;
    for (site, e) in e_field.iter().enumerate() {
        let c = grid.coords_of(site);
        let mut u = 1.0;
        for a in 0..k {
            u *= kernels[a][c[a]];
        }
        integral += e * u;
    }
    Ok(tau * integral * grid.cell_volume() / mass)
}

/// `integral of e * u_{(x,.)}` for every lattice center x at once: separable
/// circular correlation with the periodized Gaussian, normalized to unit
/// discrete mass. Returns the per-center integrals.
fn convolve_all_centers(
    e_field: &[f64],
    grid: &LatticeGrid,
    tau: f64,
    images: usize,
) -> Vec<f64> {
    let k = grid.n_active();
    let mut data = e_field.to_vec();
    let mut mass = 1.0;
    for axis in 0..k {
        let n = grid.sizes()[axis];
        let h = grid.spacing(axis);
        let kern = axis_kernel(n, h, grid.lengths()[axis], tau, 0.0, images);
        mass *= kern.iter().sum::<f64>() * h;
        // stride of this axis in row-major order
        let stride: usize = grid.sizes()[axis + 1..].iter().product();
        let block = stride * n;
        let mut out = vec![0.0f64; data.len()];
        for base in 0..data.len() / block {
            for inner in 0..stride {
                let line0 = base * block + inner;
                for i in 0..n {
                    let mut s = 0.0;
                    for (j, kv) in kern.iter().enumerate() {
                        s += kv * data[line0 + ((i + j) % n) * stride];
                    }
                    out[line0 + i * stride] = s;
                }
            }
        }
        let hscale = h;
        data = out.into_iter().map(|v| v * hscale).collect();
    }
    let inv = 1.0 / mass;
    data.iter_mut().for_each(|v| *v *= inv);
    data
}

/// Entropy `lambda(Phi, sigma)`: maximum over all lattice centers and a
/// geometric time ladder `t_i = sigma 2^{-i}` (i = 0..ladder) of
/// `t_i * integral |T|^2 u_{(x, t_i)}`.
pub fn entropy_lambda(
    e_field: &[f64],
    grid: &LatticeGrid,
    sigma: f64,
    images: usize,
    ladder: usize,
) -> Result<f64, CoreError> {
    if !(sigma > 0.0) {
        return Err(CoreError::InvalidFlowConfig("entropy scale sigma must be positive".into()));
    }
    let mut best = 0.0f64;
    for i in 0..ladder {
        let t = sigma * 0.5f64.powi(i as i32);
        let conv = convolve_all_centers(e_field, grid, t, images);
        let m = conv.into_iter().fold(0.0f64, f64::max);
        best = best.max(t * m);
    }
    Ok(best)
}

/// `Z(t) = (t_max - t) * integral(|T|^2 k)` with the constant positive
/// backward-heat solution k = 1 on the flat torus.
pub fn z_value(e_field: &[f64], grid: &LatticeGrid, t: f64, t_max: f64) -> f64 {
    (t_max - t) * e_field.iter().sum::<f64>() * grid.cell_volume()
}

/// Fitted exponential-growth constant for the `Z(t) <= Z(0) e^{Ct}` check:
/// the smallest nonnegative C that dominates the observed series on the
/// window, `C = max(0, max_t ln(Z(t)/Z(0)) / t)`.
pub fn z_growth_constant(times: &[f64], z: &[f64]) -> f64 {
    if z.is_empty() || z[0] <= 0.0 {
        return 0.0;
    }
    times
        .iter()
        .zip(z.iter())
        .skip(1)
        .filter(|(t, zt)| **t > 0.0 && **zt > 0.0)
        .map(|(t, zt)| (zt / z[0]).ln() / t)
        .fold(0.0f64, f64::max)
}

/// Least-squares exponential fit `y ~ A exp(-rate t)` on the log scale.
/// Returns `(rate, r_squared)`; entries with y <= 0 are skipped.
pub fn fit_exponential_decay(times: &[f64], values: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return (0.0, 0.0);
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return (0.0, 0.0);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (t, y) in &pts {
        let fit = intercept + slope * t;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean) * (y - mean);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (-slope, r2)
}

/// Residual field of the flat-background evolution identity for |T|^2:
/// `2 dt|T|^2 - [2 lap|T|^2 - 4 |grad T|^2 + 8 sum_{m,r} <T_m, [grad_r T_m, T_r]>]`,
/// with the time derivative from three consecutive snapshots and the lattice
/// Laplacian/gradient at the chosen stencil order. Expected O(dt) + O(h^2).
///
/// The reaction term follows from the flow equation and the flat Bianchi
/// identity: d/dt |T|^2 = 2 <T_m, grad_m Div T> pointwise (the commutator
/// part of dT/dt is orthogonal to T), and commuting derivatives via the
/// Bianchi identity leaves the bracket term above. Its quartic part equals
/// -32 (T_{a;bp}T_{m;bc}T_{a;pq}T_{m;qc} + T_{a;bp}T_{m;bc}T_{a;cq}T_{m;pq}),
/// plus a gradient-cubic remainder; a pure-quartic reaction form is not an
/// identity on flat backgrounds (it fails with more than one active
/// dimension), which the convergence tests pin down.
pub fn bochner_residual_field(
    prev_e: &[f64],
    cur_e: &[f64],
    next_e: &[f64],
    cur_torsion: &TorsionField,
    grid: &LatticeGrid,
    dt: f64,
    order: StencilOrder,
) -> Vec<f64> {
    let k = grid.n_active();
    let n_sites = grid.num_sites();
    let mut out = vec![0.0f64; n_sites];
    for site in 0..n_sites {
        let dte = (next_e[site] - prev_e[site]) / (2.0 * dt);

        let mut lap = 0.0;
        for axis in 0..k {
            let h = grid.spacing(axis);
            let e0 = cur_e[site];
            match order {
                StencilOrder::Two => {
                    let ep = cur_e[grid.neighbor(site, axis, 1)];
                    let em = cur_e[grid.neighbor(site, axis, -1)];
                    lap += (ep - 2.0 * e0 + em) / (h * h);
                }
                StencilOrder::Four => {
                    let ep1 = cur_e[grid.neighbor(site, axis, 1)];
                    let em1 = cur_e[grid.neighbor(site, axis, -1)];
                    let ep2 = cur_e[grid.neighbor(site, axis, 2)];
                    let em2 = cur_e[grid.neighbor(site, axis, -2)];
                    lap += (-ep2 + 16.0 * ep1 - 30.0 * e0 + 16.0 * em1 - em2) / (12.0 * h * h);
                }
            }
        }

        // |grad T|^2 and the reaction term from the same stencil derivatives
        let weights: &[(isize, f64)] = match order {
            StencilOrder::Two => &[(1, 0.5), (-1, -0.5)],
            StencilOrder::Four => {
                &[(2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)]
            }
        };
        let mut grad_t_sq = 0.0;
        let mut reaction = 0.0;
        for axis_r in 0..k {
            let h = grid.spacing(axis_r);
            let tr = cur_torsion.slice(site, axis_r);
            for axis_m in 0..k {
                let tm = cur_torsion.slice(site, axis_m);
                let mut d = crate::Matrix8::zeros();
                for &(off, w) in weights {
                    d += cur_torsion.slice(grid.neighbor(site, axis_r, off), axis_m) * (w / h);
                }
                grad_t_sq += d.iter().map(|v| v * v).sum::<f64>();
                // <T_m, [grad_r T_m, T_r]>
                let bracket = d * tr - tr * d;
                reaction += tm.iter().zip(bracket.iter()).map(|(x, y)| x * y).sum::<f64>();
            }
        }

        out[site] = 2.0 * dte - (2.0 * lap - 4.0 * grad_t_sq + 8.0 * reaction);
    }
    out
}

/// Flag sites where `Theta_{(x, tau)}(Phi(tau - rho^2)) >= eps` for every rho
/// in the geometric ladder `rho_i = rho_bar 2^{-i/2}`. A heuristic diagnostic:
/// snapshots are matched to the requested times by nearest recorded time.
pub fn singular_detector(
    snapshots: &[(f64, Vec<f64>)],
    grid: &LatticeGrid,
    tau: f64,
    eps: f64,
    rho_bar: f64,
    ladder: usize,
    images: usize,
) -> Result<Vec<bool>, CoreError> {
    if snapshots.is_empty() {
        return Err(CoreError::InsufficientHistory("no |T|^2 snapshots recorded".into()));
    }
    let mut mask = vec![true; grid.num_sites()];
    let mut used_any = false;
    for i in 0..ladder {
        let rho = rho_bar * 0.5f64.powf(i as f64 / 2.0);
        let t_target = tau - rho * rho;
        // nearest snapshot strictly before tau
        let snap = snapshots
            .iter()
            .filter(|(t, _)| *t < tau)
            .min_by(|a, b| {
                (a.0 - t_target).abs().partial_cmp(&(b.0 - t_target).abs()).unwrap()
            });
        let Some((t_snap, e_snap)) = snap else { continue };
        let ktau = tau - t_snap;
        if ktau <= 0.0 {
            continue;
        }
        used_any = true;
        let conv = convolve_all_centers(e_snap, grid, ktau, images);
        for (m, v) in mask.iter_mut().zip(conv.iter()) {
            *m = *m && (ktau * v >= eps);
        }
    }
    if !used_any {
        return Err(CoreError::InsufficientHistory(
            "no snapshot usable for any rho in the ladder".into(),
        ));
    }
    Ok(mask)
}
