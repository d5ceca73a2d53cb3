//! Property tests for the spec'd invariants: antisymmetry preservation,
//! the Hodge involution, projector algebra, spectral orthogonality, the
//! torsion roundtrip, and snapshot/file determinism.

use proptest::prelude::*;
use spin7_core::algebra::{hodge_star_4, standard_phi};
use spin7_core::lattice::{
    read_snapshot, seeded_field_generator, write_snapshot, FiberField, GeneratorSpec, LatticeGrid,
};
use spin7_core::spaces::{
    decompose_four_form, decompose_three_form, diamond, project_two_form, vector_to_three_form,
    Endomorphism, TwoFormPart,
};
use spin7_core::torsion::{gradient_from_torsion, torsion_from_gradient, TorsionTensor};
use spin7_core::{FourForm, Matrix8, ThreeForm, TwoForm};

fn four_form(values: Vec<f64>) -> FourForm {
    let mut it = values.into_iter();
    FourForm::from_sorted_fn(|_, _, _, _| it.next().unwrap())
}

fn three_form(values: Vec<f64>) -> ThreeForm {
    let mut it = values.into_iter();
    ThreeForm::from_sorted_fn(|_, _, _| it.next().unwrap())
}

fn two_form(values: &[f64]) -> TwoForm {
    let mut m = Matrix8::zeros();
    let mut n = 0;
    for i in 0..8 {
        for j in (i + 1)..8 {
            m[(i, j)] = values[n];
            m[(j, i)] = -values[n];
            n += 1;
        }
    }
    TwoForm::try_from_matrix(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn four_form_constructor_is_bit_antisymmetric(vals in prop::collection::vec(-1.0f64..1.0, 70)) {
        let f = four_form(vals);
        for i in 0..8usize {
            for j in 0..8usize {
                for k in 0..8usize {
                    for l in 0..8usize {
                        let v = f.component(i, j, k, l);
                        if i == j || i == k || i == l || j == k || j == l || k == l {
                            prop_assert_eq!(v, 0.0);
                        } else {
                            prop_assert_eq!(v, -f.component(j, i, k, l));
                            prop_assert_eq!(v, -f.component(i, j, l, k));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hodge_star_is_an_isometric_involution(vals in prop::collection::vec(-1.0f64..1.0, 70)) {
        let f = four_form(vals);
        let s = hodge_star_4(&f);
        // signed permutation of components: same squares, reordered summation
        let scale = f.norm_sq().max(1.0);
        prop_assert!((s.norm_sq() - f.norm_sq()).abs() <= 1e-12 * scale);
        prop_assert!(hodge_star_4(&s).sub(&f).max_abs() == 0.0);
    }

    #[test]
    fn two_form_projection_algebra(vals in prop::collection::vec(-1.0f64..1.0, 28)) {
        let phi = standard_phi();
        let b = two_form(&vals);
        let b7 = project_two_form(&b, &phi, TwoFormPart::Seven);
        let b21 = project_two_form(&b, &phi, TwoFormPart::TwentyOne);
        let scale = b.max_abs().max(1.0);
        prop_assert!((b7.matrix() + b21.matrix() - b.matrix()).abs().max() <= 1e-13 * scale);
        prop_assert!(b7.inner(&b21).abs() <= 1e-12 * scale * scale);
        // norms add up (orthogonal decomposition)
        prop_assert!((b7.norm_sq() + b21.norm_sq() - b.norm_sq()).abs() <= 1e-11 * scale * scale);
    }

    #[test]
    fn three_form_split_is_orthogonal(vals in prop::collection::vec(-1.0f64..1.0, 56)) {
        let phi = standard_phi();
        let g = three_form(vals);
        let (x, g48) = decompose_three_form(&g, &phi);
        let g8 = vector_to_three_form(&x, &phi);
        let scale = g.norm_sq().max(1.0);
        prop_assert!(g.sub(&g8).sub(&g48).max_abs() <= 1e-12 * scale.sqrt());
        prop_assert!((g8.norm_sq() + g48.norm_sq() - g.norm_sq()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn four_form_split_is_a_parseval_decomposition(vals in prop::collection::vec(-1.0f64..1.0, 70)) {
        let phi = standard_phi();
        let sigma = four_form(vals);
        let split = decompose_four_form(&sigma, &phi);
        let scale = sigma.norm_sq().max(1.0);
        prop_assert!(split.sum().sub(&sigma).max_abs() <= 1e-12 * scale.sqrt());
        let parts_norm = split.part1.norm_sq() + split.part7.norm_sq()
            + split.part27.norm_sq() + split.part35.norm_sq();
        prop_assert!((parts_norm - sigma.norm_sq()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn diamond_is_linear(a in prop::collection::vec(-1.0f64..1.0, 64),
                         b in prop::collection::vec(-1.0f64..1.0, 64)) {
        let phi = standard_phi();
        let ma = Matrix8::from_iterator(a.iter().copied());
        let mb = Matrix8::from_iterator(b.iter().copied());
        let lhs = diamond(&Endomorphism(ma + mb), &phi);
        let rhs = diamond(&Endomorphism(ma), &phi).add(&diamond(&Endomorphism(mb), &phi));
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-13);
    }

    #[test]
    fn torsion_roundtrip_property(vals in prop::collection::vec(-1.0f64..1.0, 8 * 28)) {
        let phi = standard_phi();
        let t = TorsionTensor::from_slices(std::array::from_fn(|m| {
            project_two_form(&two_form(&vals[m * 28..(m + 1) * 28]), &phi, TwoFormPart::Seven)
        }));
        let rec = torsion_from_gradient(&gradient_from_torsion(&t, &phi), &phi);
        for m in 0..8 {
            prop_assert!((rec.slice_matrix(m) - t.slice_matrix(m)).abs().max() <= 1e-11);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn snapshot_roundtrip_bit_exact(seed in 0u64..1000, modes in 1usize..4) {
        let grid = LatticeGrid::square(1, 8, 1.0).unwrap();
        let field = seeded_field_generator(&grid, &GeneratorSpec::new(modes, 0.4, seed)).unwrap();
        let dir = std::env::temp_dir().join("spin7_proptest");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("f_{seed}_{modes}.s7f"));
        write_snapshot(&path, &field, seed).unwrap();
        let (read, header) = read_snapshot(&path).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(header.seed, seed);
        let read: &FiberField = &read;
        prop_assert_eq!(read, &field);
    }

    #[test]
    fn generator_amplitude_is_linear_in_scale(seed in 0u64..200) {
        let grid = LatticeGrid::square(1, 16, 1.0).unwrap();
        let f1 = seeded_field_generator(&grid, &GeneratorSpec::new(2, 0.08, seed)).unwrap();
        let f2 = seeded_field_generator(&grid, &GeneratorSpec::new(2, 0.04, seed)).unwrap();
        for (a, b) in f1.values().iter().zip(f2.values().iter()) {
            for n in 0..7 {
                prop_assert!((a[n] * 0.5 - b[n]).abs() <= 1e-14 * a[n].abs().max(1e-12));
            }
        }
    }
}
