//! Exact pointwise exterior algebra on R^8 with the flat metric: the standard
//! Cayley form, the Hodge star on 4-forms, and the contraction-identity
//! catalogue that encodes the symmetries of a Spin(7)-structure.
//!
//! Index convention: forms are stored dense and totally antisymmetric, with
//! `Phi = (1/24) Phi_{ijkl} dx^{ijkl}` and indices running 0..7. All identity
//! checks are report-returning so the same code serves the test suite and the
//! flow-time diagnostics.

use crate::error::CoreError;
use crate::Matrix8;

pub const DIM: usize = 8;

#[inline(always)]
pub(crate) fn idx4(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 8 + j) * 8 + k) * 8 + l
}

#[inline(always)]
pub(crate) fn idx3(i: usize, j: usize, k: usize) -> usize {
    (i * 8 + j) * 8 + k
}

/// Parity of a short permutation, +1.0 or -1.0.
fn parity(perm: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// The flat frame: identity metric, orientation +1 (fixed so that the standard
/// Cayley form is self-dual, see [`hodge_star_4`]).
#[derive(Debug, Clone, Copy, Default)]
pub struct Frame;

impl Frame {
    pub fn metric(&self) -> Matrix8 {
        Matrix8::identity()
    }

    pub fn orientation(&self) -> f64 {
        1.0
    }
}

/// Totally antisymmetric rank-4 tensor on R^8, dense 8^4 storage.
#[derive(Debug, Clone, PartialEq)]
pub struct FourForm {
    c: Box<[f64; 4096]>,
}

/// Totally antisymmetric rank-3 tensor on R^8, dense 8^3 storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    c: Box<[f64; 512]>,
}

/// Antisymmetric rank-2 tensor, `beta = (1/2) beta_{ij} dx^i wedge dx^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm(pub Matrix8);

fn boxed_array<const N: usize>() -> Box<[f64; N]> {
    vec![0.0f64; N].into_boxed_slice().try_into().unwrap()
}

impl FourForm {
    pub fn zero() -> Self {
        FourForm { c: boxed_array() }
    }

    /// Scatter one component to all 24 index permutations with signs. The
    /// given index tuple may be in any order; repeated indices with a nonzero
    /// value are rejected by debug assertion (the component is ignored in
    /// release, matching the antisymmetric zero).
    pub fn set_component(&mut self, idx: [usize; 4], value: f64) {
        let mut sorted = idx;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            debug_assert!(value == 0.0, "repeated index with nonzero component");
            return;
        }
        const PERMS: [[usize; 4]; 24] = permutations4();
        for p in PERMS {
            // the permutation taking `idx` to `t` is p itself, so the entry
            // is parity(p) * value, exact in floating point
            let t = [idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]];
            self.c[idx4(t[0], t[1], t[2], t[3])] = parity(&p) * value;
        }
    }

    /// Build from a function of sorted indices i<j<k<l.
    pub fn from_sorted_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            for j in (i + 1)..8 {
                for k in (j + 1)..8 {
                    for l in (k + 1)..8 {
                        let v = f(i, j, k, l);
                        if v != 0.0 {
                            out.set_component([i, j, k, l], v);
                        }
                    }
                }
            }
        }
        out
    }

    /// Validate total antisymmetry of a dense array and wrap it.
    pub fn try_from_dense(c: Vec<f64>) -> Result<Self, CoreError> {
        assert_eq!(c.len(), 4096);
        let c: Box<[f64; 4096]> = c.into_boxed_slice().try_into().unwrap();
        let form = FourForm { c };
        form.check_antisymmetric()?;
        Ok(form)
    }

    pub(crate) fn from_raw(c: Box<[f64; 4096]>) -> Self {
        FourForm { c }
    }

    fn check_antisymmetric(&self) -> Result<(), CoreError> {
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    for l in 0..8 {
                        let v = self.c[idx4(i, j, k, l)];
                        if i == j || i == k || i == l || j == k || j == l || k == l {
                            if v != 0.0 {
                                return Err(CoreError::NotAntisymmetric(i, j));
                            }
                        } else if v != -self.c[idx4(j, i, k, l)] {
                            return Err(CoreError::NotAntisymmetric(i, j));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[inline(always)]
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[idx4(i, j, k, l)]
    }

    #[inline(always)]
    pub fn as_slice(&self) -> &[f64; 4096] {
        &self.c
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.c.iter().zip(other.c.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().zip(other.c.iter()).for_each(|(a, b)| *a += b);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().zip(other.c.iter()).for_each(|(a, b)| *a -= b);
        out
    }

    /// Number of nonzero dense entries.
    pub fn nnz(&self) -> usize {
        self.c.iter().filter(|v| **v != 0.0).count()
    }
}

const fn permutations4() -> [[usize; 4]; 24] {
    let mut out = [[0usize; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let mut d = 0;
                while d < 4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out[n] = [a, b, c, d];
                        n += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

impl ThreeForm {
    pub fn zero() -> Self {
        ThreeForm { c: boxed_array() }
    }

    pub fn set_component(&mut self, idx: [usize; 3], value: f64) {
        let mut sorted = idx;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            debug_assert!(value == 0.0, "repeated index with nonzero component");
            return;
        }
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in PERMS {
            let t = [idx[p[0]], idx[p[1]], idx[p[2]]];
            self.c[idx3(t[0], t[1], t[2])] = parity(&p) * value;
        }
    }

    pub fn from_sorted_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            for j in (i + 1)..8 {
                for k in (j + 1)..8 {
                    let v = f(i, j, k);
                    if v != 0.0 {
                        out.set_component([i, j, k], v);
                    }
                }
            }
        }
        out
    }

    pub fn try_from_dense(c: Vec<f64>) -> Result<Self, CoreError> {
        assert_eq!(c.len(), 512);
        let c: Box<[f64; 512]> = c.into_boxed_slice().try_into().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let v = c[idx3(i, j, k)];
                    if i == j || j == k || i == k {
                        if v != 0.0 {
                            return Err(CoreError::NotAntisymmetric(i, j));
                        }
                    } else if v != -c[idx3(j, i, k)] {
                        return Err(CoreError::NotAntisymmetric(i, j));
                    }
                }
            }
        }
        Ok(ThreeForm { c })
    }

    #[inline(always)]
    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[idx3(i, j, k)]
    }

    pub fn as_slice(&self) -> &[f64; 512] {
        &self.c
    }

    pub(crate) fn from_raw(c: Box<[f64; 512]>) -> Self {
        ThreeForm { c }
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().zip(other.c.iter()).for_each(|(a, b)| *a -= b);
        out
    }
}

impl TwoForm {
    pub fn zero() -> Self {
        TwoForm(Matrix8::zeros())
    }

    /// Antisymmetrize an arbitrary matrix: (m - m^T)/2.
    pub fn from_matrix(m: Matrix8) -> Self {
        TwoForm((m - m.transpose()) * 0.5)
    }

    /// Coordinate two-form dx^i wedge dx^j.
    pub fn coordinate(i: usize, j: usize) -> Self {
        let mut m = Matrix8::zeros();
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        TwoForm(m)
    }

    pub fn try_from_matrix(m: Matrix8) -> Result<Self, CoreError> {
        for i in 0..8 {
            for j in 0..8 {
                if m[(i, j)] != -m[(j, i)] {
                    return Err(CoreError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(TwoForm(m))
    }

    #[inline(always)]
    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    /// Plain component-sum inner product, no combinatorial factor.
    pub fn inner(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// One candidate covariant-derivative slice of Phi per direction m = 0..7.
#[derive(Debug, Clone)]
pub struct GradientSlices(pub [FourForm; 8]);

impl GradientSlices {
    pub fn zero() -> Self {
        GradientSlices(std::array::from_fn(|_| FourForm::zero()))
    }

    pub fn slice(&self, m: usize) -> &FourForm {
        &self.0[m]
    }
}

/// The 14-term standard Cayley form, indices 0..7, components +-1.
///
/// The model is `dx^{0123} - dx^{0167} - dx^{0527} - dx^{0563} - dx^{0415}
/// - dx^{0426} - dx^{0437} + dx^{4567} - dx^{4523} - dx^{4163} - dx^{4127}
/// - dx^{2637} - dx^{1537} - dx^{1526}`, which is self-dual for the
/// orientation `eps_{01234567} = +1` and satisfies the contraction identity
/// catalogue exactly.
pub fn standard_phi() -> FourForm {
    const TERMS: [([usize; 4], f64); 14] = [
        ([0, 1, 2, 3], 1.0),
        ([0, 1, 6, 7], -1.0),
        ([0, 5, 2, 7], -1.0),
        ([0, 5, 6, 3], -1.0),
        ([0, 4, 1, 5], -1.0),
        ([0, 4, 2, 6], -1.0),
        ([0, 4, 3, 7], -1.0),
        ([4, 5, 6, 7], 1.0),
        ([4, 5, 2, 3], -1.0),
        ([4, 1, 6, 3], -1.0),
        ([4, 1, 2, 7], -1.0),
        ([2, 6, 3, 7], -1.0),
        ([1, 5, 3, 7], -1.0),
        ([1, 5, 2, 6], -1.0),
    ];
    let mut phi = FourForm::zero();
    for (idx, sign) in TERMS {
        phi.set_component(idx, sign);
    }
    phi
}

/// Hodge star on 4-forms for the flat metric and orientation
/// `eps_{01234567} = +1`: `(star sigma)_{ijkl} = (1/24) eps_{ijklabcd} sigma_{abcd}`.
///
/// On a totally antisymmetric input this reduces to a signed lookup of the
/// complementary sorted quadruple, so the star is exact (no rounding).
pub fn hodge_star_4(sigma: &FourForm) -> FourForm {
    let mut out = FourForm::zero();
    for i in 0..8usize {
        for j in (i + 1)..8 {
            for k in (j + 1)..8 {
                for l in (k + 1)..8 {
                    let mut comp = [0usize; 4];
                    let mut n = 0;
                    for d in 0..8 {
                        if d != i && d != j && d != k && d != l {
                            comp[n] = d;
                            n += 1;
                        }
                    }
                    let full = [i, j, k, l, comp[0], comp[1], comp[2], comp[3]];
                    let sign = parity(&full);
                    let v = sign * sigma.component(comp[0], comp[1], comp[2], comp[3]);
                    if v != 0.0 {
                        out.set_component([i, j, k, l], v);
                    }
                }
            }
        }
    }
    out
}

/// Max-norm residuals of the four Phi-Phi contraction identities.
///
/// `single`: the one-index contraction with the 15-term right-hand side;
/// `double`: `Phi_{ijkl} Phi_{abkl} = 6 g_{ia} g_{jb} - 6 g_{ib} g_{ja} - 4 Phi_{ijab}`;
/// `triple`: `Phi_{ijkl} Phi_{ajkl} = 42 g_{ia}`;
/// `full`:   `Phi_{ijkl} Phi_{ijkl} = 336`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    pub single: f64,
    pub double: f64,
    pub triple: f64,
    pub full: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.single.max(self.double).max(self.triple).max(self.full)
    }
}

pub fn contraction_identity_residuals(phi: &FourForm) -> IdentityResiduals {
    let p = phi.as_slice();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

    // full: Phi_{ijkl} Phi_{ijkl} = 336
    let full = (phi.norm_sq() - 336.0).abs();

    // triple: Phi_{ijkl} Phi_{ajkl} = 42 g_{ia}
    let mut triple = 0.0f64;
    for i in 0..8 {
        for a in 0..8 {
            let mut s = 0.0;
            for j in 0..8 {
                for k in 0..8 {
                    for l in 0..8 {
                        s += p[idx4(i, j, k, l)] * p[idx4(a, j, k, l)];
                    }
                }
            }
            triple = triple.max((s - 42.0 * delta(i, a)).abs());
        }
    }

    // double: contraction over two indices
    let mut double = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            for a in 0..8 {
                for b in 0..8 {
                    let mut s = 0.0;
                    for k in 0..8 {
                        for l in 0..8 {
                            s += p[idx4(i, j, k, l)] * p[idx4(a, b, k, l)];
                        }
                    }
                    let rhs = 6.0 * delta(i, a) * delta(j, b) - 6.0 * delta(i, b) * delta(j, a)
                        - 4.0 * p[idx4(i, j, a, b)];
                    double = double.max((s - rhs).abs());
                }
            }
        }
    }

    // single: contraction over one index, 15-term right-hand side
    let mut single = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                for a in 0..8 {
                    for b in 0..8 {
                        for c in 0..8 {
                            let mut s = 0.0;
                            for l in 0..8 {
                                s += p[idx4(i, j, k, l)] * p[idx4(a, b, c, l)];
                            }
                            let rhs = delta(i, a) * delta(j, b) * delta(k, c)
                                + delta(i, b) * delta(j, c) * delta(k, a)
                                + delta(i, c) * delta(j, a) * delta(k, b)
                                - delta(i, a) * delta(j, c) * delta(k, b)
                                - delta(i, b) * delta(j, a) * delta(k, c)
                                - delta(i, c) * delta(j, b) * delta(k, a)
                                - delta(i, a) * p[idx4(j, k, b, c)]
                                - delta(i, b) * p[idx4(j, k, c, a)]
                                - delta(i, c) * p[idx4(j, k, a, b)]
                                - delta(j, a) * p[idx4(k, i, b, c)]
                                - delta(j, b) * p[idx4(k, i, c, a)]
                                - delta(j, c) * p[idx4(k, i, a, b)]
                                - delta(k, a) * p[idx4(i, j, b, c)]
                                - delta(k, b) * p[idx4(i, j, c, a)]
                                - delta(k, c) * p[idx4(i, j, a, b)];
                            single = single.max((s - rhs).abs());
                        }
                    }
                }
            }
        }
    }

    IdentityResiduals { single, double, triple, full }
}

/// Max-norm residuals of the three nabla-Phi contraction identities:
/// the derivative forms of the double, triple and full contractions.
#[derive(Debug, Clone, Copy)]
pub struct NablaResiduals {
    pub double: f64,
    pub triple: f64,
    pub full: f64,
}

impl NablaResiduals {
    pub fn max(&self) -> f64 {
        self.double.max(self.triple).max(self.full)
    }
}

pub fn nabla_contraction_residuals(dphi: &GradientSlices, phi: &FourForm) -> NablaResiduals {
    let p = phi.as_slice();
    let mut out = NablaResiduals { double: 0.0, triple: 0.0, full: 0.0 };
    for m in 0..8 {
        let d = dphi.0[m].as_slice();

        // (nabla Phi_{ijkl}) Phi_{ijkl} = 0
        let mut s = 0.0;
        for n in 0..4096 {
            s += d[n] * p[n];
        }
        out.full = out.full.max(s.abs());

        // (nabla Phi_{ijkl}) Phi_{ajkl} = -Phi_{ijkl} (nabla Phi_{ajkl})
        for i in 0..8 {
            for a in 0..8 {
                let mut s = 0.0;
                for j in 0..8 {
                    for k in 0..8 {
                        for l in 0..8 {
                            s += d[idx4(i, j, k, l)] * p[idx4(a, j, k, l)]
                                + p[idx4(i, j, k, l)] * d[idx4(a, j, k, l)];
                        }
                    }
                }
                out.triple = out.triple.max(s.abs());
            }
        }

        // (nabla Phi_{ijkl}) Phi_{abkl} = -Phi_{ijkl}(nabla Phi_{abkl}) - 4 nabla Phi_{ijab}
        for i in 0..8 {
            for j in 0..8 {
                for a in 0..8 {
                    for b in 0..8 {
                        let mut s = 0.0;
                        for k in 0..8 {
                            for l in 0..8 {
                                s += d[idx4(i, j, k, l)] * p[idx4(a, b, k, l)]
                                    + p[idx4(i, j, k, l)] * d[idx4(a, b, k, l)];
                            }
                        }
                        s += 4.0 * d[idx4(i, j, a, b)];
                        out.double = out.double.max(s.abs());
                    }
                }
            }
        }
    }
    out
}

/// Pull a 4-form back by an 8x8 matrix acting on every index:
/// `out_{ijkl} = Q_{ia} Q_{jb} Q_{kc} Q_{ld} sigma_{abcd}`.
///
/// For Q in SO(8) this is the natural action whose derivative at the identity
/// is the diamond operator.
pub fn pullback_four_form(q: &Matrix8, sigma: &FourForm) -> FourForm {
    // Slotwise application: four passes, each contracting one index with Q.
    let mut cur: Box<[f64; 4096]> = boxed_array();
    cur.copy_from_slice(sigma.as_slice());
    let mut next: Box<[f64; 4096]> = boxed_array();
    for _slot in 0..4 {
        // contract the FIRST index, then rotate axes so after 4 passes all
        // four slots are transformed and the index order is restored.
        for out_i in 0..8 {
            for rest in 0..512 {
                let mut s = 0.0;
                for a in 0..8 {
                    s += q[(out_i, a)] * cur[a * 512 + rest];
                }
                next[out_i * 512 + rest] = s;
            }
        }
        // axis rotation: move first axis to the back: new[j,k,l,i] = next[i,j,k,l]
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    for l in 0..8 {
                        cur[((j * 8 + k) * 8 + l) * 8 + i] = next[idx4(i, j, k, l)];
                    }
                }
            }
        }
    }
    FourForm::from_raw(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_phi_structure() {
        let phi = standard_phi();
        assert_eq!(phi.nnz(), 336);
        assert_eq!(phi.component(0, 1, 2, 3), 1.0);
        assert_eq!(phi.component(0, 1, 6, 7), -1.0);
        assert_eq!(phi.component(0, 1, 2, 4), 0.0);
        assert_eq!(phi.norm_sq(), 336.0);
        for v in phi.as_slice().iter() {
            assert!(*v == 0.0 || v.abs() == 1.0);
        }
    }

    #[test]
    fn standard_phi_identities_exact() {
        let r = contraction_identity_residuals(&standard_phi());
        assert!(r.max() <= 1e-13, "{r:?}");
    }

    #[test]
    fn hodge_star_fixes_phi() {
        let phi = standard_phi();
        let star = hodge_star_4(&phi);
        assert_eq!(star.sub(&phi).max_abs(), 0.0);
    }

    #[test]
    fn hodge_star_on_coordinate_form() {
        // dx^{0123} -> dx^{4567} with positive sign for this orientation
        let mut f = FourForm::zero();
        f.set_component([0, 1, 2, 3], 1.0);
        let star = hodge_star_4(&f);
        assert_eq!(star.component(4, 5, 6, 7), 1.0);
        assert_eq!(star.nnz(), 24);
    }

    #[test]
    fn hodge_star_involution() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = FourForm::from_sorted_fn(|_, _, _, _| rng.random_range(-1.0..1.0));
        let ss = hodge_star_4(&hodge_star_4(&f));
        assert!(ss.sub(&f).max_abs() <= 1e-14 * f.max_abs().max(1.0));
    }

    #[test]
    fn inadmissible_scaling_shows_in_full_contraction() {
        let r = contraction_identity_residuals(&standard_phi().scaled(2.0));
        assert!((r.full - 1008.0).abs() < 1e-9, "{}", r.full);
    }

    #[test]
    fn nabla_residuals_zero_gradient() {
        let r = nabla_contraction_residuals(&GradientSlices::zero(), &standard_phi());
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn nabla_residuals_phi_as_gradient() {
        let phi = standard_phi();
        let dphi = GradientSlices(std::array::from_fn(|_| phi.clone()));
        let r = nabla_contraction_residuals(&dphi, &phi);
        assert!((r.full - 336.0).abs() < 1e-10);
    }

    #[test]
    fn antisymmetry_validation() {
        let mut dense = vec![0.0; 4096];
        dense[idx4(0, 1, 2, 3)] = 1.0; // missing the signed orbit
        assert!(FourForm::try_from_dense(dense).is_err());
    }

    #[test]
    fn set_component_antisymmetric_bit_exact() {
        let mut f = FourForm::zero();
        f.set_component([3, 1, 0, 6], 0.37);
        assert_eq!(f.component(3, 1, 0, 6), 0.37);
        assert_eq!(f.component(1, 3, 0, 6), -0.37);
        assert_eq!(f.component(0, 1, 3, 6), -0.37);
        assert!(f.check_antisymmetric().is_ok());
    }

    #[test]
    fn pullback_by_identity_is_identity() {
        let phi = standard_phi();
        let p = pullback_four_form(&Matrix8::identity(), &phi);
        assert_eq!(p.sub(&phi).max_abs(), 0.0);
    }
}
