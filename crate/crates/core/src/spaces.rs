//! Decomposition of Ω², Ω³, Ω⁴ into irreducible Spin(7) representations, the
//! diamond operator with its triple-contraction inverse on Ω²₇, and the Λ_Φ
//! eigenspace machinery used to split 4-forms.

use crate::algebra::{idx3, idx4, FourForm, ThreeForm, TwoForm};
use crate::error::CoreError;
use crate::{Matrix8, Vector8};

/// General element of Ω⁰ ⊕ S₀ ⊕ Ω²₇ ⊕ Ω²₂₁, stored as a dense matrix A_{ip}
/// with indices lowered by the flat metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endomorphism(pub Matrix8);

impl Endomorphism {
    pub fn identity() -> Self {
        Endomorphism(Matrix8::identity())
    }

    pub fn from_two_form(beta: &TwoForm) -> Self {
        Endomorphism(*beta.matrix())
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    /// Traceless symmetric part, the S₀ component.
    pub fn traceless_symmetric_part(&self) -> Self {
        let sym = (self.0 + self.0.transpose()) * 0.5;
        Endomorphism(sym - Matrix8::identity() * (sym.trace() / 8.0))
    }

    pub fn antisymmetric_part(&self) -> TwoForm {
        TwoForm::from_matrix(self.0)
    }
}

/// `beta_{ab} Phi_{abij}` as a two-form in (i, j).
pub fn two_form_phi_contraction(beta: &TwoForm, phi: &FourForm) -> TwoForm {
    let p = phi.as_slice();
    let b = beta.matrix();
    let mut out = Matrix8::zeros();
    for i in 0..8 {
        for j in 0..8 {
            let mut s = 0.0;
            for a in 0..8 {
                for bb in 0..8 {
                    s += b[(a, bb)] * p[idx4(a, bb, i, j)];
                }
            }
            out[(i, j)] = s;
        }
    }
    TwoForm(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoFormPart {
    /// 7-dimensional part, eigenvalue -6 of beta -> beta_{ab} Phi_{abij}.
    Seven,
    /// 21-dimensional part (the spin(7) subalgebra), eigenvalue +2.
    TwentyOne,
}

/// Projection onto Ω²₇ or Ω²₂₁:
/// `pi_7(beta)_{ij} = (1/4) beta_{ij} - (1/8) beta_{ab} Phi_{abij}` and
/// `pi_21(beta)_{ij} = (3/4) beta_{ij} + (1/8) beta_{ab} Phi_{abij}`.
pub fn project_two_form(beta: &TwoForm, phi: &FourForm, part: TwoFormPart) -> TwoForm {
    let contraction = two_form_phi_contraction(beta, phi);
    let m = match part {
        TwoFormPart::Seven => beta.matrix() * 0.25 - contraction.matrix() * 0.125,
        TwoFormPart::TwentyOne => beta.matrix() * 0.75 + contraction.matrix() * 0.125,
    };
    TwoForm(m)
}

/// Split a 3-form into its Ω³₈ part (a vector X with `gamma_{ijk} = X_l Phi_{ijkl}`)
/// and the Ω³₄₈ remainder with `gamma48_{ijk} Phi_{ijkl} = 0`.
///
/// The 1/42 normalization comes from the triple contraction identity.
pub fn decompose_three_form(gamma: &ThreeForm, phi: &FourForm) -> (Vector8, ThreeForm) {
    let g = gamma.as_slice();
    let p = phi.as_slice();
    let mut x = Vector8::zeros();
    for a in 0..8 {
        let mut s = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    s += g[idx3(i, j, k)] * p[idx4(i, j, k, a)];
                }
            }
        }
        x[a] = s / 42.0;
    }
    let mut rem: Box<[f64; 512]> = vec![0.0; 512].into_boxed_slice().try_into().unwrap();
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let mut xl = 0.0;
                for l in 0..8 {
                    xl += x[l] * p[idx4(i, j, k, l)];
                }
                rem[idx3(i, j, k)] = g[idx3(i, j, k)] - xl;
            }
        }
    }
    (x, ThreeForm::from_raw(rem))
}

/// Reconstruct the Ω³₈ three-form `X_l Phi_{ijkl}` of a vector.
pub fn vector_to_three_form(x: &Vector8, phi: &FourForm) -> ThreeForm {
    let p = phi.as_slice();
    let mut out: Box<[f64; 512]> = vec![0.0; 512].into_boxed_slice().try_into().unwrap();
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let mut s = 0.0;
                for l in 0..8 {
                    s += x[l] * p[idx4(i, j, k, l)];
                }
                out[idx3(i, j, k)] = s;
            }
        }
    }
    ThreeForm::from_raw(out)
}

/// The Phi-equivariant operator on 4-forms whose eigenspaces realize the
/// split Ω⁴ = Ω⁴₁ ⊕ Ω⁴₇ ⊕ Ω⁴₂₇ ⊕ Ω⁴₃₅ with eigenvalues -24, -12, 4, 0.
///
/// With `(sigma . Phi)_{ijkl} = sigma_{ijmn} Phi_{mnkl}`, the operator is the
/// six-term sum of `(sigma . Phi)` evaluated at the index patterns
/// (ijkl), (iklj), (iljk), (jkil), (jlki), (klij).
pub fn lambda_phi(sigma: &FourForm, phi: &FourForm) -> FourForm {
    let s = sigma.as_slice();
    let p = phi.as_slice();
    // pair-space product: dot[(ij),(kl)] = sum_{mn} sigma_{ijmn} Phi_{mnkl}
    let mut dot = vec![0.0f64; 4096];
    for ij in 0..64 {
        for mn in 0..64 {
            let sv = s[ij * 64 + mn];
            if sv != 0.0 {
                let prow = &p[mn * 64..mn * 64 + 64];
                let drow = &mut dot[ij * 64..ij * 64 + 64];
                for kl in 0..64 {
                    drow[kl] += sv * prow[kl];
                }
            }
        }
    }
    let d = |i: usize, j: usize, k: usize, l: usize| dot[idx4(i, j, k, l)];
    let mut out: Box<[f64; 4096]> = vec![0.0; 4096].into_boxed_slice().try_into().unwrap();
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                for l in 0..8 {
                    out[idx4(i, j, k, l)] = d(i, j, k, l)
                        + d(i, k, l, j)
                        + d(i, l, j, k)
                        + d(j, k, i, l)
                        + d(j, l, k, i)
                        + d(k, l, i, j);
                }
            }
        }
    }
    FourForm::from_raw(out)
}

/// Λ_Φ eigenvalues by part label.
pub const LAMBDA_EIGENVALUES: [(usize, f64); 4] = [(1, -24.0), (7, -12.0), (27, 4.0), (35, 0.0)];

/// Spectral split of a 4-form along the Λ_Φ eigenspaces.
#[derive(Debug, Clone)]
pub struct FourFormSplit {
    pub part1: FourForm,
    pub part7: FourForm,
    pub part27: FourForm,
    pub part35: FourForm,
}

impl FourFormSplit {
    pub fn part(&self, label: usize) -> &FourForm {
        match label {
            1 => &self.part1,
            7 => &self.part7,
            27 => &self.part27,
            35 => &self.part35,
            _ => panic!("no Omega^4 part labeled {label}"),
        }
    }

    pub fn sum(&self) -> FourForm {
        self.part1.add(&self.part7).add(&self.part27).add(&self.part35)
    }
}

/// Split sigma via the spectral projectors of Λ_Φ built by Lagrange
/// interpolation on the eigenvalues {-24, -12, 4, 0}: for each part,
/// `P_mu = prod_{nu != mu} (Lambda_Phi - nu) / (mu - nu)`.
pub fn decompose_four_form(sigma: &FourForm, phi: &FourForm) -> FourFormSplit {
    let project = |mu: f64| {
        let mut cur = sigma.clone();
        let mut denom = 1.0;
        for (_, nu) in LAMBDA_EIGENVALUES {
            if nu != mu {
                cur = lambda_phi(&cur, phi).sub(&cur.scaled(nu));
                denom *= mu - nu;
            }
        }
        cur.scaled(1.0 / denom)
    };
    FourFormSplit {
        part1: project(-24.0),
        part7: project(-12.0),
        part27: project(4.0),
        part35: project(0.0),
    }
}

/// The diamond contraction
/// `(A <> Phi)_{ijkl} = A_{ip} Phi_{pjkl} + A_{jp} Phi_{ipkl} + A_{kp} Phi_{ijpl} + A_{lp} Phi_{ijkp}`,
/// the derivative of the natural GL(8) action on 4-forms.
pub fn diamond(a: &Endomorphism, phi: &FourForm) -> FourForm {
    let m = a.matrix();
    let p = phi.as_slice();
    let mut out: Box<[f64; 4096]> = vec![0.0; 4096].into_boxed_slice().try_into().unwrap();
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                for l in 0..8 {
                    let mut s = 0.0;
                    for q in 0..8 {
                        s += m[(i, q)] * p[idx4(q, j, k, l)];
                        s += m[(j, q)] * p[idx4(i, q, k, l)];
                        s += m[(k, q)] * p[idx4(i, j, q, l)];
                        s += m[(l, q)] * p[idx4(i, j, k, q)];
                    }
                    out[idx4(i, j, k, l)] = s;
                }
            }
        }
    }
    FourForm::from_raw(out)
}

/// Triple contraction of two 4-forms, antisymmetrized:
/// `(sigma ⌟₃ Phi)_{pq} = (1/2)(sigma_{pijk} Phi_{qijk} - sigma_{qijk} Phi_{pijk})`.
///
/// No 1/3! factor: the normalization is calibrated so that
/// `(beta <> Phi) ⌟₃ Phi = 96 beta` on Ω²₇.
pub fn triple_contract(sigma: &FourForm, phi: &FourForm) -> TwoForm {
    let s = sigma.as_slice();
    let p = phi.as_slice();
    let mut raw = Matrix8::zeros();
    for pp in 0..8 {
        for q in 0..8 {
            let mut acc = 0.0;
            let srow = &s[pp * 512..pp * 512 + 512];
            let prow = &p[q * 512..q * 512 + 512];
            for n in 0..512 {
                acc += srow[n] * prow[n];
            }
            raw[(pp, q)] = acc;
        }
    }
    TwoForm((raw - raw.transpose()) * 0.5)
}

/// Inverse of the diamond on Ω⁴₇: `(1/96) sigma ⌟₃ Phi`, the unique
/// beta in Ω²₇ with `beta <> Phi` equal to the Ω⁴₇ part of sigma.
pub fn inverse_diamond_on_7(sigma: &FourForm, phi: &FourForm) -> TwoForm {
    let t = triple_contract(sigma, phi);
    TwoForm(t.matrix() / 96.0)
}

/// Residual of the spin(7) Lie-algebra identity for beta in Ω²₂₁:
/// `beta_{ab} Phi_{bpqr} = beta_{pi} Phi_{iqra} + beta_{qi} Phi_{irpa} + beta_{ri} Phi_{ipqa}`.
pub fn so7_identity_residual(beta: &TwoForm, phi: &FourForm) -> f64 {
    let b = beta.matrix();
    let p = phi.as_slice();
    let mut worst = 0.0f64;
    for a in 0..8 {
        for pp in 0..8 {
            for q in 0..8 {
                for r in 0..8 {
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for i in 0..8 {
                        lhs += b[(a, i)] * p[idx4(i, pp, q, r)];
                        rhs += b[(pp, i)] * p[idx4(i, q, r, a)]
                            + b[(q, i)] * p[idx4(i, r, pp, a)]
                            + b[(r, i)] * p[idx4(i, pp, q, a)];
                    }
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    worst
}

/// Deterministic orthonormal basis of Ω²₇: apply pi_7 to the 28 coordinate
/// two-forms in lexicographic order and run modified Gram-Schmidt with drop
/// tolerance 1e-8 until 7 vectors survive.
pub fn omega27_basis(phi: &FourForm) -> Result<[TwoForm; 7], CoreError> {
    let mut basis: Vec<TwoForm> = Vec::with_capacity(7);
    for i in 0..8 {
        for j in (i + 1)..8 {
            let mut v = project_two_form(&TwoForm::coordinate(i, j), phi, TwoFormPart::Seven);
            for u in &basis {
                let c = v.inner(u);
                v = TwoForm(v.matrix() - u.matrix() * c);
            }
            let n = v.norm_sq().sqrt();
            if n > 1e-8 {
                basis.push(TwoForm(v.matrix() / n));
            }
        }
    }
    let count = basis.len();
    basis
        .try_into()
        .map_err(|_| CoreError::BasisCount(count))
}
