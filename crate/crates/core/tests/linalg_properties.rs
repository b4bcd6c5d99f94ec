//! Property tests for the split-complex kernel against a scalar `Complex64` oracle.

use dznd_core::linalg::{
    complex_matmul, conjugate, frobenius_norm, kron, pinv, unvec, vec, RealMatrix,
    SplitComplexMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;

type Dense = Vec<Vec<Complex64>>;

fn to_dense(m: &SplitComplexMatrix) -> Dense {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| Complex64::new(m.re.get(r, c), m.im.get(r, c)))
                .collect()
        })
        .collect()
}

fn dense_matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, p) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

fn max_dev(m: &SplitComplexMatrix, d: &Dense) -> f64 {
    let mut dev = 0.0_f64;
    for (r, row) in d.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            let (re, im) = m.get(r, c);
            dev = dev.max((re - z.re).abs()).max((im - z.im).abs());
        }
    }
    dev
}

fn real_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-3.0..3.0_f64, rows * cols)
        .prop_map(move |d| RealMatrix::new(rows, cols, d).unwrap())
}

fn split_matrix(rows: usize, cols: usize) -> impl Strategy<Value = SplitComplexMatrix> {
    (real_matrix(rows, cols), real_matrix(rows, cols))
        .prop_map(|(re, im)| SplitComplexMatrix::new(re, im).unwrap())
}

fn dims(max: usize) -> impl Strategy<Value = usize> {
    1..=max
}

proptest! {
    #[test]
    fn matmul_agrees_with_scalar_oracle(
        (a, b) in (dims(4), dims(4), dims(4)).prop_flat_map(|(n, k, p)| (split_matrix(n, k), split_matrix(k, p)))
    ) {
        let got = complex_matmul(&a, &b).unwrap();
        let want = dense_matmul(&to_dense(&a), &to_dense(&b));
        prop_assert!(max_dev(&got, &want) <= 1e-12);
    }

    #[test]
    fn kron_vec_identity(
        (a, x, b) in (dims(3), dims(3), dims(3), dims(3))
            .prop_flat_map(|(m, n, s, t)| (split_matrix(m, n), split_matrix(n, s), split_matrix(s, t)))
    ) {
        let axb = complex_matmul(&complex_matmul(&a, &x).unwrap(), &b).unwrap();
        let op = kron(&conjugate(&b.hermitian_transpose()), &a);
        let rhs = complex_matmul(&op, &vec(&x)).unwrap();
        prop_assert!(vec(&axb).max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn kron_vec_identity_real(
        (a, x, b) in (dims(3), dims(3), dims(3), dims(3))
            .prop_flat_map(|(m, n, s, t)| (real_matrix(m, n), real_matrix(n, s), real_matrix(s, t)))
    ) {
        let axb = a.matmul(&x).unwrap().matmul(&b).unwrap();
        let lhs = dznd_core::linalg::vec_real(&axb);
        let rhs = b.transpose().kron(&a).matvec(&dznd_core::linalg::vec_real(&x)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().0.iter().all(|d| d.abs() <= 1e-12));
    }

    #[test]
    fn conjugate_involution_and_norm(m in (dims(4), dims(4)).prop_flat_map(|(r, c)| split_matrix(r, c))) {
        prop_assert_eq!(conjugate(&conjugate(&m)), m.clone());
        prop_assert_eq!(frobenius_norm(&conjugate(&m)), frobenius_norm(&m));
    }

    #[test]
    fn norm_triangle_inequality(
        (a, b) in (dims(4), dims(4)).prop_flat_map(|(r, c)| (split_matrix(r, c), split_matrix(r, c)))
    ) {
        let (na, nb) = (frobenius_norm(&a), frobenius_norm(&b));
        let nd = frobenius_norm(&a.sub(&b).unwrap());
        prop_assert!(na - nb <= nd + 1e-12);
        prop_assert!(nd <= na + nb + 1e-12);
    }

    #[test]
    fn real_inputs_behave_as_real(
        (a, b) in (dims(3), dims(3), dims(3)).prop_flat_map(|(n, k, p)| (real_matrix(n, k), real_matrix(k, p)))
    ) {
        let p = complex_matmul(&SplitComplexMatrix::from_real(a.clone()), &SplitComplexMatrix::from_real(b.clone())).unwrap();
        prop_assert_eq!(p.im, RealMatrix::zeros(a.rows(), b.cols()));
        prop_assert!(p.re.max_abs_diff(&a.matmul(&b).unwrap()).unwrap() <= 1e-14);
    }

    #[test]
    fn vec_unvec_round_trip(m in (dims(6), dims(6)).prop_flat_map(|(r, c)| split_matrix(r, c))) {
        let v = vec(&m);
        prop_assert_eq!(v.cols(), 1);
        prop_assert_eq!(&unvec(&v, m.rows(), m.cols()).unwrap(), &m);
        prop_assert_eq!(vec(&unvec(&v, m.rows(), m.cols()).unwrap()), v);
    }

    #[test]
    fn vec_position_formula(m in (dims(5), dims(5)).prop_flat_map(|(r, c)| split_matrix(r, c))) {
        let v = vec(&m);
        for s in 0..m.rows() {
            for t in 0..m.cols() {
                prop_assert_eq!(v.get(t * m.rows() + s, 0), m.get(s, t));
            }
        }
    }
}

fn penrose_deviation(w: &RealMatrix, p: &RealMatrix) -> f64 {
    let wp = w.matmul(p).unwrap();
    let pw = p.matmul(w).unwrap();
    [
        wp.matmul(w).unwrap().max_abs_diff(w).unwrap(),
        pw.matmul(p).unwrap().max_abs_diff(p).unwrap(),
        wp.max_abs_diff(&wp.transpose()).unwrap(),
        pw.max_abs_diff(&pw.transpose()).unwrap(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn householder(v: &[f64]) -> RealMatrix {
    let nn: f64 = v.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    RealMatrix::from_fn(v.len(), v.len(), |i, j| {
        f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / nn
    })
}

/// `H_l · D · H_r` with `rank` singular values in `[0.5, 3]` and the rest exactly zero.
fn rank_deficient(rows: usize, cols: usize, rank: usize) -> impl Strategy<Value = RealMatrix> {
    (
        prop::collection::vec(0.1..1.0_f64, rows),
        prop::collection::vec(0.1..1.0_f64, cols),
        prop::collection::vec(0.5..3.0_f64, rank),
    )
        .prop_map(move |(l, r, s)| {
            let d = RealMatrix::from_fn(
                rows,
                cols,
                |i, j| if i == j && i < s.len() { s[i] } else { 0.0 },
            );
            householder(&l)
                .matmul(&d)
                .unwrap()
                .matmul(&householder(&r))
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinv_penrose_full_rank(w in (dims(12), dims(12)).prop_flat_map(|(r, c)| real_matrix(r, c))) {
        let tol = dznd_core::default_pinv_tolerance(w.rows(), w.cols());
        let p = pinv(&w, tol).unwrap();
        prop_assert_eq!(p.shape(), (w.cols(), w.rows()));
        prop_assert!(penrose_deviation(&w, &p) <= 1e-10);
    }

    #[test]
    fn pinv_penrose_rank_deficient(
        w in (2..=12usize, 2..=12usize).prop_flat_map(|(r, c)| (Just(r), Just(c), 1..r.min(c)))
            .prop_flat_map(|(r, c, k)| rank_deficient(r, c, k))
    ) {
        let p = pinv(&w, dznd_core::default_pinv_tolerance(w.rows(), w.cols())).unwrap();
        prop_assert!(penrose_deviation(&w, &p) <= 1e-10);
    }
}
