use num_complex::Complex64;
use proptest::prelude::*;

use zkernel::cli::parse_complex;
use zkernel::kernel::{kernel_series, KernelMatrix};
use zkernel::partitions::{contains_point, dim, dim_oracle, maya, maya_inverse, pochhammer_partition};
use zkernel::psi::psi;
use zkernel::specfun::{hyp2f1_reg, hyp2f1_reg_direct};
use zkernel::zmeasure::weight;
use zkernel::{HalfInt, Partition, ZParams};

fn partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..8, 0..7).prop_map(|mut parts| {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts).expect("sorted positive parts")
    })
}

fn half_int(bound: i64) -> impl Strategy<Value = HalfInt> {
    (-bound..bound).prop_map(HalfInt::from_floor)
}

fn principal() -> impl Strategy<Value = ZParams> {
    (-2.0f64..2.0, 0.1f64..2.0, 0.05f64..0.8).prop_map(|(re, im, xi)| {
        ZParams::new(Complex64::new(re, im), Complex64::new(re, -im), xi).expect("conjugate pair")
    })
}

proptest! {
    #[test]
    fn transpose_is_an_involution(l in partition()) {
        prop_assert_eq!(l.transpose().transpose(), l.clone());
        prop_assert_eq!(l.transpose().size(), l.size());
    }

    #[test]
    fn dimension_agrees_with_tableaux_count(l in partition()) {
        prop_assume!(l.size() <= 14);
        prop_assert_eq!(dim(&l), dim_oracle(&l));
        prop_assert_eq!(dim(&l), dim(&l.transpose()));
    }

    #[test]
    fn pochhammer_transpose_symmetry(l in partition(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let t = Complex64::new(re, im);
        let sign = if l.size() % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = pochhammer_partition(t, &l);
        let rhs = sign * pochhammer_partition(-t, &l.transpose());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn maya_round_trip(l in partition()) {
        let m = maya(&l);
        prop_assert_eq!(maya_inverse(&m).unwrap(), l.clone());
        prop_assert_eq!(maya_inverse(&m.transpose()).unwrap(), l.transpose());
    }

    #[test]
    fn membership_matches_maya(l in partition(), x in half_int(10)) {
        prop_assert_eq!(contains_point(&l, x), maya(&l).contains(x));
    }

    #[test]
    fn weight_swap_and_transpose(l in partition(), prm in principal()) {
        let w = weight(&prm, &l);
        prop_assert!(w >= 0.0);
        let swapped = weight(&prm.swapped(), &l);
        let neg = prm.negated().unwrap();
        let transposed = weight(&neg, &l.transpose());
        prop_assert!((w - swapped).abs() <= 1e-13 * w.max(1e-300));
        prop_assert!((w - transposed).abs() <= 1e-12 * w.max(1e-300));
    }

    #[test]
    fn half_int_text_round_trip(k in -1_000_000i64..1_000_000) {
        let x = HalfInt::from_floor(k);
        prop_assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        prop_assert_eq!(HalfInt::from_f64(x.value()).unwrap(), x);
    }

    #[test]
    fn partition_text_round_trip(l in partition()) {
        prop_assert_eq!(l.to_string().parse::<Partition>().unwrap(), l);
    }

    #[test]
    fn complex_text_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let text = format!("{re}{im:+}i");
        prop_assert_eq!(parse_complex(&text).unwrap(), Complex64::new(re, im));
    }

    #[test]
    fn pfaff_matches_direct(
        a in (-4.0f64..4.0, -2.0f64..2.0),
        b in (-4.0f64..4.0, -2.0f64..2.0),
        c in 0.5f64..6.0,
    ) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let c = Complex64::new(c, 0.0);
        // ξ = 0.3 puts the argument at ξ/(ξ-1) = -3/7
        let w = 0.3 / (0.3 - 1.0);
        let pfaff = hyp2f1_reg(a, b, c, w).unwrap();
        let direct = hyp2f1_reg_direct(a, b, c, w).unwrap();
        prop_assert!((pfaff - direct).norm() <= 1e-10 * pfaff.norm().max(1.0));
    }

    #[test]
    fn psi_is_finite(a in half_int(10), x in half_int(10), prm in principal()) {
        prop_assert!(psi(a, x, &prm).unwrap().is_finite());
    }

    #[test]
    fn kernel_diagonal_is_a_probability(x in half_int(6), prm in principal()) {
        let d = kernel_series(x, x, &prm).unwrap();
        prop_assert!((-1e-10..=1.0 + 1e-10).contains(&d));
    }
}

#[test]
fn kernel_matrix_rejects_bad_json() {
    assert!(KernelMatrix::from_json("{\"points\":[0.5]}").is_err());
    assert!(KernelMatrix::from_json("not json").is_err());
}
