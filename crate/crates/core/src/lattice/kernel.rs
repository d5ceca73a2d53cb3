//! Packed evaluation of the bilinear Cayley pairing
//! `D(V)_{ae} = Phi0_{abcd} V_{bf} V_{cg} V_{dh} Phi0_{efgh}`
//! through the 28-dimensional space of antisymmetric index pairs.
//!
//! This is the inner kernel of the lattice torsion assembly: with
//! `J(y;x)_{pq} = Phi(y)_{pijk} Phi(x)_{qijk}` and `Phi = pullback by Q`,
//! one has `J(y;x) = Q_y D(Q_y^T Q_x) Q_x^T`, so evaluating D once per lattice
//! bond replaces a dense 8^4 pullback per site. Exactness against the dense
//! route is pinned by tests.

use crate::algebra::FourForm;
use crate::Matrix8;
use std::sync::OnceLock;

const NPAIR: usize = 28;

pub(crate) struct PackedCayley {
    /// sorted index pairs (a < b) in lexicographic order
    pairs: [(usize, usize); NPAIR],
    /// sparse rows of P28[(ab)][(cd)] = Phi0_{abcd}
    rows: Vec<Vec<(usize, f64)>>,
}

fn sorted_pairs() -> [(usize, usize); NPAIR] {
    let mut out = [(0usize, 0usize); NPAIR];
    let mut n = 0;
    for a in 0..8 {
        for b in (a + 1)..8 {
            out[n] = (a, b);
            n += 1;
        }
    }
    out
}

impl PackedCayley {
    pub(crate) fn new(phi0: &FourForm) -> Self {
        let pairs = sorted_pairs();
        let mut rows = vec![Vec::new(); NPAIR];
        for (r, &(a, b)) in pairs.iter().enumerate() {
            for (c, &(cc, dd)) in pairs.iter().enumerate() {
                let v = phi0.component(a, b, cc, dd);
                if v != 0.0 {
                    rows[r].push((c, v));
                }
            }
        }
        PackedCayley { pairs, rows }
    }

    /// Shared instance for the standard Cayley form.
    pub(crate) fn standard() -> &'static PackedCayley {
        static INSTANCE: OnceLock<PackedCayley> = OnceLock::new();
        INSTANCE.get_or_init(|| PackedCayley::new(&crate::algebra::standard_phi()))
    }

    /// `D(V)_{ae} = Phi0_{abcd} V_{bf} V_{cg} V_{dh} Phi0_{efgh}` (all sums full).
    pub(crate) fn d_matrix(&self, v: &Matrix8) -> Matrix8 {
        // L[(ab)][(cd)] = V_ac V_bd - V_ad V_bc  (induced action on 2-forms)
        let mut l = [0.0f64; NPAIR * NPAIR];
        for (r, &(a, b)) in self.pairs.iter().enumerate() {
            let row = &mut l[r * NPAIR..(r + 1) * NPAIR];
            for (c, &(cc, dd)) in self.pairs.iter().enumerate() {
                row[c] = v[(a, cc)] * v[(b, dd)] - v[(a, dd)] * v[(b, cc)];
            }
        }
        // Y = P28 * L
        let mut y = [0.0f64; NPAIR * NPAIR];
        for r in 0..NPAIR {
            let yrow = &mut y[r * NPAIR..(r + 1) * NPAIR];
            for &(cd, val) in &self.rows[r] {
                let lrow = &l[cd * NPAIR..(cd + 1) * NPAIR];
                for k in 0..NPAIR {
                    yrow[k] += val * lrow[k];
                }
            }
        }
        // X = Y * P28^T
        let mut x = [0.0f64; NPAIR * NPAIR];
        for ef in 0..NPAIR {
            for &(gh, val) in &self.rows[ef] {
                for r in 0..NPAIR {
                    x[r * NPAIR + ef] += y[r * NPAIR + gh] * val;
                }
            }
        }
        // unpack the remaining V_{bf} contraction; overall factor 2 restores
        // the full ordered sums from the sorted-pair bookkeeping
        let mut d = Matrix8::zeros();
        for (r, &(a, b)) in self.pairs.iter().enumerate() {
            for (c, &(e, f)) in self.pairs.iter().enumerate() {
                let xv = x[r * NPAIR + c];
                if xv != 0.0 {
                    d[(a, e)] += v[(b, f)] * xv;
                    d[(a, f)] -= v[(b, e)] * xv;
                    d[(b, e)] -= v[(a, f)] * xv;
                    d[(b, f)] += v[(a, e)] * xv;
                }
            }
        }
        d * 2.0
    }

    /// `J(y;x)_{pq} = Phi(y)_{pijk} Phi(x)_{qijk}` for `Phi(.) = pullback of
    /// Phi0 by Q(.)`.
    pub(crate) fn j_matrix(&self, q_y: &Matrix8, q_x: &Matrix8) -> Matrix8 {
        let v = q_y.transpose() * q_x;
        q_y * self.d_matrix(&v) * q_x.transpose()
    }

    /// `pi_7` with respect to the standard form:
    /// `(1/4) beta - (1/8) beta_{ab} Phi0_{abij}` for antisymmetric beta.
    pub(crate) fn pi7_standard(&self, beta: &Matrix8) -> Matrix8 {
        let mut contraction = Matrix8::zeros();
        for (r, &(a, b)) in self.pairs.iter().enumerate() {
            let bv = 2.0 * beta[(a, b)]; // full (ab)+(ba) sum
            if bv != 0.0 {
                for &(cd, val) in &self.rows[r] {
                    let (i, j) = self.pairs[cd];
                    contraction[(i, j)] += bv * val;
                }
            }
        }
        // fill the lower triangle by antisymmetry
        for (i, j) in sorted_pairs() {
            contraction[(j, i)] = -contraction[(i, j)];
        }
        beta * 0.25 - contraction * 0.125
    }
}
