//! Fiber-coordinate chart: isometric structures near the standard form are
//! parametrized by exponentials of Ω²₇ through SO(8).
//!
//! For a in R^7 against the fixed orthonormal basis, rho(a) = sum a_n B^n
//! satisfies `rho(a)^2 = -(|a|^2/8) Id` exactly, so the exponential has the
//! Rodrigues closed form with angle `theta = |a| / (2 sqrt 2)`, and the chart
//! log is closed-form through the two equivariant invariants
//! `<Phi_a, Phi_0> = 336 - 384 sin^2(2 theta)` and
//! `pi_7(asym(Phi_a .3. Phi_0))/96 = (sin(4 theta)/sqrt 8) * unit(a)`
//! (both are stable for |a| <= pi/2; the first branch is unique up to
//! |a| = pi sqrt 2 / 2 ~ 2.22).

use super::kernel::PackedCayley;
use crate::algebra::{standard_phi, FourForm, TwoForm};
use crate::error::CoreError;
use crate::spaces::omega27_basis;
use crate::{Fiber7, Matrix8};
use std::sync::OnceLock;

const SQRT8: f64 = 2.0 * std::f64::consts::SQRT_2;

/// The exponential chart on the fiber of isometric structures over the
/// standard point. Generators cap |a| <= pi/2 to stay within one chart.
pub struct FiberChart {
    basis: [TwoForm; 7],
    phi0: FourForm,
    basis_hash: u64,
}

impl FiberChart {
    pub fn new() -> Result<Self, CoreError> {
        let phi0 = standard_phi();
        let basis = omega27_basis(&phi0)?;
        let basis_hash = hash_basis(&basis);
        Ok(FiberChart { basis, phi0, basis_hash })
    }

    /// Shared chart for the standard Cayley form.
    pub fn standard() -> &'static FiberChart {
        static INSTANCE: OnceLock<FiberChart> = OnceLock::new();
        INSTANCE.get_or_init(|| FiberChart::new().expect("standard basis construction"))
    }

    pub fn basis(&self) -> &[TwoForm; 7] {
        &self.basis
    }

    pub fn phi0(&self) -> &FourForm {
        &self.phi0
    }

    /// FNV-1a over the basis component bit patterns; stored in snapshot
    /// headers to detect convention drift.
    pub fn basis_hash(&self) -> u64 {
        self.basis_hash
    }

    /// The skew matrix rho(a) = sum_n a_n B^n.
    pub fn rho(&self, a: &Fiber7) -> Matrix8 {
        let mut m = Matrix8::zeros();
        for n in 0..7 {
            if a[n] != 0.0 {
                m += self.basis[n].matrix() * a[n];
            }
        }
        m
    }

    /// Exact exponential of rho(a):
    /// `Q = cos(theta) Id + (sin(theta)/theta) rho(a)`, theta = |a|/(2 sqrt 2).
    pub fn rotation(&self, a: &Fiber7) -> Matrix8 {
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Matrix8::identity();
        }
        let theta = norm / SQRT8;
        let sinc = if theta < 1e-6 {
            1.0 - theta * theta / 6.0
        } else {
            theta.sin() / theta
        };
        Matrix8::identity() * theta.cos() + self.rho(a) * sinc
    }

    /// Structure realized by a fiber coordinate: the pullback of the standard
    /// form by `rotation(a)`, together with the rotation. Calibrated so that
    /// `d/dt|_0 Phi_{ta} = rho(a) <> Phi_0`.
    pub fn structure(&self, a: &Fiber7) -> (FourForm, Matrix8) {
        let q = self.rotation(a);
        (crate::algebra::pullback_four_form(&q, &self.phi0), q)
    }

    /// Closed-form chart log: the fiber coordinate of the structure
    /// `pullback(Q, Phi_0)`. Exact on cosets (insensitive to stabilizer
    /// factors in Q). Errors if the structure sits outside the invertible
    /// branch of the chart or the invariants are inconsistent.
    pub fn log(&self, q: &Matrix8) -> Result<Fiber7, CoreError> {
        let packed = PackedCayley::standard();
        let j = q * packed.d_matrix(&q.transpose());
        let w = j.trace(); // <Phi, Phi_0>
        let s2 = ((336.0 - w) / 384.0).clamp(0.0, 1.0);
        if (336.0 - w) / 384.0 > 1.0 + 1e-9 {
            return Err(CoreError::ChartLog(format!(
                "structure outside the chart branch: <Phi,Phi0> = {w:.6}"
            )));
        }
        let theta = 0.5 * s2.sqrt().asin();
        let norm = SQRT8 * theta;
        // direction from the antisymmetrized triple contraction
        let asym = (j - j.transpose()) * 0.5 / 96.0;
        let d7 = packed.pi7_standard(&asym);
        let mut coeffs = [0.0f64; 7];
        let mut csq = 0.0;
        for n in 0..7 {
            let c = d7
                .iter()
                .zip(self.basis[n].matrix().iter())
                .map(|(x, y)| x * y)
                .sum::<f64>();
            coeffs[n] = c;
            csq += c * c;
        }
        let cnorm = csq.sqrt();
        if norm < 1e-12 {
            return Ok([0.0; 7]);
        }
        let expected = (4.0 * theta).sin() / std::f64::consts::SQRT_2;
        if cnorm < 1e-14 || (cnorm - expected).abs() > 1e-6 * (1.0 + expected) {
            return Err(CoreError::ChartLog(format!(
                "invariants inconsistent: |delta| = {cnorm:.3e}, expected {expected:.3e} \
                 (structure near the chart boundary?)"
            )));
        }
        Ok(std::array::from_fn(|n| norm * coeffs[n] / cnorm))
    }
}

fn hash_basis(basis: &[TwoForm; 7]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in basis {
        for v in b.matrix().iter() {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

/// Exponential of an Ω²₇ element scaled by `s` (Rodrigues form). Valid for
/// any two-form `v` with `v^2 = -(|v|^2/8) Id`, which holds on Ω²₇ of every
/// admissible structure.
pub(crate) fn exp_omega27(v: &Matrix8, s: f64) -> Matrix8 {
    let fnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt() * s.abs();
    if fnorm == 0.0 {
        return Matrix8::identity();
    }
    let theta = fnorm / SQRT8;
    let sinc = if theta < 1e-6 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
    Matrix8::identity() * theta.cos() + v * (s * sinc)
}

/// Exponential of a general skew matrix by scaling-and-squaring with a Taylor
/// kernel; used by the Heun predictor-corrector where averaged generators
/// leave Ω²₇.
pub(crate) fn expm_skew(v: &Matrix8, s: f64) -> Matrix8 {
    let a = v * s;
    let nrm = a.abs().max();
    let squarings = if nrm > 0.25 {
        (nrm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let a = a / f64::powi(2.0, squarings as i32);
    let mut term = Matrix8::identity();
    let mut out = Matrix8::identity();
    for k in 1..=14 {
        term = term * a / (k as f64);
        out += term;
    }
    for _ in 0..squarings {
        out = out * out;
    }
    out
}

/// One Newton polar-decomposition step, pulling a near-orthogonal matrix back
/// onto SO(8): `Q <- Q (3 Id - Q^T Q) / 2`.
pub(crate) fn reorthonormalize(q: &Matrix8) -> Matrix8 {
    q * (Matrix8::identity() * 3.0 - q.transpose() * q) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fiber(rng: &mut ChaCha8Rng, norm: f64) -> Fiber7 {
        let mut a: Fiber7 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        a.iter_mut().for_each(|v| *v *= norm / n);
        a
    }

    #[test]
    fn rho_squared_is_scalar() {
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..8 {
            let norm = rng.random_range(0.1..1.5);
            let a = random_fiber(&mut rng, norm);
            let rho = chart.rho(&a);
            let nsq: f64 = a.iter().map(|v| v * v).sum();
            let res = (rho * rho + Matrix8::identity() * (nsq / 8.0)).abs().max();
            assert!(res <= 1e-13 * nsq.max(1.0), "{res}");
        }
    }

    #[test]
    fn rotation_is_orthogonal_and_matches_series() {
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let a = random_fiber(&mut rng, 0.9);
        let q = chart.rotation(&a);
        assert!((q.transpose() * q - Matrix8::identity()).abs().max() <= 1e-14);
        let q_series = expm_skew(&chart.rho(&a), 1.0);
        assert!((q - q_series).abs().max() <= 1e-13);
    }

    #[test]
    fn zero_fiber_is_identity() {
        let chart = FiberChart::standard();
        let (phi, q) = chart.structure(&[0.0; 7]);
        assert_eq!((q - Matrix8::identity()).abs().max(), 0.0);
        assert_eq!(phi.sub(chart.phi0()).max_abs(), 0.0);
    }

    #[test]
    fn log_inverts_rotation() {
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..8 {
            let norm = rng.random_range(0.05..std::f64::consts::FRAC_PI_2);
            let a = random_fiber(&mut rng, norm);
            let q = chart.rotation(&a);
            let rec = chart.log(&q).unwrap();
            for n in 0..7 {
                assert!((rec[n] - a[n]).abs() <= 1e-10, "{:?} vs {:?}", rec, a);
            }
        }
    }

    #[test]
    fn log_is_coset_invariant() {
        use crate::spaces::{project_two_form, TwoFormPart};
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let a = random_fiber(&mut rng, 0.8);
        // stabilizer element: exponential of an Omega^2_21 two-form
        let raw = TwoForm::from_matrix(Matrix8::from_fn(|_, _| rng.random_range(-0.3..0.3)));
        let b21 = project_two_form(&raw, chart.phi0(), TwoFormPart::TwentyOne);
        let k = expm_skew(b21.matrix(), 1.0);
        let q = chart.rotation(&a) * k;
        let rec = chart.log(&q).unwrap();
        for n in 0..7 {
            assert!((rec[n] - a[n]).abs() <= 1e-9);
        }
    }

    #[test]
    fn exp_omega27_matches_general() {
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let a = random_fiber(&mut rng, 0.4);
        let rho = chart.rho(&a);
        let fast = exp_omega27(&rho, 0.37);
        let slow = expm_skew(&rho, 0.37);
        assert!((fast - slow).abs().max() <= 1e-13);
    }

    #[test]
    fn reorthonormalize_reduces_drift() {
        let chart = FiberChart::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let a = random_fiber(&mut rng, 0.5);
        let q = chart.rotation(&a) + Matrix8::from_fn(|_, _| rng.random_range(-1e-9..1e-9));
        let r = reorthonormalize(&q);
        let before = (q.transpose() * q - Matrix8::identity()).abs().max();
        let after = (r.transpose() * r - Matrix8::identity()).abs().max();
        assert!(after < before * 1e-3);
    }
}
