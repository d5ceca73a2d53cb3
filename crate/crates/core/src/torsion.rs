//! Pointwise torsion algebra: extraction of T from nabla Phi, reconstruction
//! through the diamond operator, and the flat-background Bianchi, Ricci and
//! scalar-curvature constraint residuals.
//!
//! All curvature terms of the referenced identities are hard-coded to zero:
//! only flat backgrounds are in scope, and dead parameters invite misuse.

use crate::algebra::{idx4, FourForm, GradientSlices, TwoForm};
use crate::spaces::{diamond, inverse_diamond_on_7, Endomorphism};
use crate::Matrix8;

/// One two-form slot per direction m: `T_{m;ab}`, each slice in Ω²₇.
///
/// The semicolon in the index pattern is notation for the direction slot, not
/// a second covariant derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTensor {
    slices: [Matrix8; 8],
}

impl TorsionTensor {
    pub fn zero() -> Self {
        TorsionTensor { slices: [Matrix8::zeros(); 8] }
    }

    pub fn from_slices(slices: [TwoForm; 8]) -> Self {
        TorsionTensor { slices: slices.map(|t| *t.matrix()) }
    }

    pub fn slice(&self, m: usize) -> TwoForm {
        TwoForm(self.slices[m])
    }

    pub fn slice_matrix(&self, m: usize) -> &Matrix8 {
        &self.slices[m]
    }

    pub(crate) fn set_slice(&mut self, m: usize, t: Matrix8) {
        self.slices[m] = t;
    }

    #[inline(always)]
    pub fn component(&self, m: usize, a: usize, b: usize) -> f64 {
        self.slices[m][(a, b)]
    }

    /// `|T|^2 = sum_{m,a,b} (T_{m;ab})^2`, plain component sum with no
    /// combinatorial factor.
    pub fn norm_sq(&self) -> f64 {
        self.slices.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }
}

/// Dense `nabla_i T_{j;ab}` produced by lattice differentiation, antisymmetric
/// in (a, b).
#[derive(Debug, Clone)]
pub struct TorsionGradient {
    c: Box<[f64; 4096]>,
}

impl TorsionGradient {
    pub fn zero() -> Self {
        TorsionGradient { c: vec![0.0; 4096].into_boxed_slice().try_into().unwrap() }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut c: Box<[f64; 4096]> = vec![0.0; 4096].into_boxed_slice().try_into().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                for a in 0..8 {
                    for b in 0..8 {
                        c[idx4(i, j, a, b)] = f(i, j, a, b);
                    }
                }
            }
        }
        TorsionGradient { c }
    }

    /// `nabla_i T_{j;ab}`
    #[inline(always)]
    pub fn component(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        self.c[idx4(i, j, a, b)]
    }
}

/// Extract the torsion from a candidate covariant derivative of Phi:
/// `T_{m;ab} = (1/96) (nabla_m Phi_{ajkl}) Phi_{bjkl}`, antisymmetrized over
/// (a, b). Each slice lands in Ω²₇ identically (Ω²₂₁ does not occur in the
/// image of the triple contraction).
pub fn torsion_from_gradient(dphi: &GradientSlices, phi: &FourForm) -> TorsionTensor {
    let mut out = TorsionTensor::zero();
    for m in 0..8 {
        out.slices[m] = *inverse_diamond_on_7(dphi.slice(m), phi).matrix();
    }
    out
}

/// Reconstruct `nabla_m Phi = T_m <> Phi` from a torsion tensor.
pub fn gradient_from_torsion(t: &TorsionTensor, phi: &FourForm) -> GradientSlices {
    GradientSlices(std::array::from_fn(|m| {
        diamond(&Endomorphism(t.slices[m]), phi)
    }))
}

/// Max-norm residual of the flat-background Bianchi-type identity
/// `nabla_i T_{j;ab} - nabla_j T_{i;ab} = 2 T_{i;am} T_{j;mb} - 2 T_{j;am} T_{i;mb}`.
pub fn bianchi_residual(t: &TorsionTensor, dt: &TorsionGradient) -> f64 {
    bianchi_residual_full(t, dt)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Full Bianchi residual tensor over (i, j, a, b), for debugging.
pub fn bianchi_residual_full(t: &TorsionTensor, dt: &TorsionGradient) -> Box<[f64; 4096]> {
    let mut out: Box<[f64; 4096]> = vec![0.0; 4096].into_boxed_slice().try_into().unwrap();
    for i in 0..8 {
        let ti = &t.slices[i];
        for j in 0..8 {
            let tj = &t.slices[j];
            let titj = ti * tj; // (T_i T_j)_{ab} = T_{i;am} T_{j;mb}
            let tjti = tj * ti;
            for a in 0..8 {
                for b in 0..8 {
                    let lhs = dt.component(i, j, a, b) - dt.component(j, i, a, b);
                    let rhs = 2.0 * titj[(a, b)] - 2.0 * tjti[(a, b)];
                    out[idx4(i, j, a, b)] = lhs - rhs;
                }
            }
        }
    }
    out
}

/// Flat-background Ricci constraint: returns
/// `4 nabla_i T_{a;ja} - 4 nabla_a T_{i;ja} - 8 T_{i;jb} T_{a;ba} + 8 T_{a;jb} T_{i;ba}`,
/// which must vanish on any genuine isometric structure field over the flat
/// torus (the left side of the curvature formula is R_{ij} = 0 here).
pub fn ricci_residual(t: &TorsionTensor, dt: &TorsionGradient) -> Matrix8 {
    let mut out = Matrix8::zeros();
    // lee[b] = T_{a;ba} (contraction of direction slot against the first form slot)
    let mut lee = [0.0f64; 8];
    for b in 0..8 {
        for a in 0..8 {
            lee[b] += t.component(a, b, a);
        }
    }
    for i in 0..8 {
        for j in 0..8 {
            let mut s = 0.0;
            for a in 0..8 {
                s += 4.0 * dt.component(i, a, j, a) - 4.0 * dt.component(a, i, j, a);
            }
            for b in 0..8 {
                s -= 8.0 * t.component(i, j, b) * lee[b];
                for a in 0..8 {
                    s += 8.0 * t.component(a, j, b) * t.component(i, b, a);
                }
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Flat-background scalar-curvature constraint, the trace of [`ricci_residual`]:
/// `4 nabla_i T_{a;ia} - 4 nabla_a T_{i;ia} + 8 T_{i;ib} T_{a;ab} + 8 T_{a;jb} T_{j;ba}`.
///
/// The quadratic trace term is the Lee-form square `T_{i;ib} T_{a;ab}`, which
/// is what tracing the Ricci expression produces.
pub fn scalar_curvature_residual(t: &TorsionTensor, dt: &TorsionGradient) -> f64 {
    let mut s = 0.0;
    for i in 0..8 {
        for a in 0..8 {
            s += 4.0 * dt.component(i, a, i, a) - 4.0 * dt.component(a, i, i, a);
        }
    }
    let mut lee = [0.0f64; 8];
    for b in 0..8 {
        for i in 0..8 {
            lee[b] += t.component(i, i, b);
        }
    }
    for b in 0..8 {
        s += 8.0 * lee[b] * lee[b];
    }
    for a in 0..8 {
        for j in 0..8 {
            for b in 0..8 {
                s += 8.0 * t.component(a, j, b) * t.component(j, b, a);
            }
        }
    }
    s
}
