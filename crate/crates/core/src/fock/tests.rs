use std::collections::HashMap;

use approx::assert_abs_diff_eq;

use super::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `<0| h_{w_1} ... h_{w_r} |0>` by repeated single swaps `h_a h_b = h_b h_a + [h_a, h_b]`.
pub(crate) struct WordOracle<'a> {
    params: &'a QParams,
    memo: HashMap<Vec<i64>, Complex64>,
}

impl<'a> WordOracle<'a> {
    pub(crate) fn new(params: &'a QParams) -> Self {
        Self {
            params,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn eval(&mut self, word: &[i64]) -> Complex64 {
        if word.is_empty() {
            return c(1.0);
        }
        if word[0] < 0 || *word.last().unwrap() > 0 {
            return c(0.0);
        }
        if let Some(v) = self.memo.get(word) {
            return *v;
        }
        // rightmost annihilator that still has something to its right
        let i = (0..word.len() - 1).rev().find(|&i| word[i] > 0).unwrap();
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut val = self.eval(&swapped);
        let comm = mode_commutator(word[i], word[i + 1], self.params);
        if comm != c(0.0) {
            let mut rest = word.to_vec();
            rest.drain(i..=i + 1);
            val += comm * self.eval(&rest);
        }
        self.memo.insert(word.to_vec(), val);
        val
    }

    pub(crate) fn pairing(&mut self, bra: &Partition, middle: &[i64], ket: &Partition) -> Complex64 {
        let mut word: Vec<i64> = bra.parts().iter().map(|&k| i64::from(k)).collect();
        word.extend_from_slice(middle);
        word.extend(ket.parts().iter().map(|&k| -i64::from(k)));
        self.eval(&word)
    }
}

#[test]
fn commutator_selection_rule() {
    let p = QParams::new(0.7, 0.3).unwrap();
    assert_eq!(mode_commutator(2, 1, &p), c(0.0));
    assert_eq!(mode_commutator(0, 0, &p), c(0.0));
    assert_eq!(mode_commutator(3, -2, &p), c(0.0));
}

#[test]
fn commutator_value_from_square_roots() {
    let (q, t) = (0.7f64, 0.3f64);
    let p = QParams::new(q, t).unwrap();
    let pp = q / t;
    let expect = (q.sqrt() - 1.0 / q.sqrt()) * (t.sqrt() - 1.0 / t.sqrt()) / (pp.sqrt() + 1.0 / pp.sqrt());
    assert_abs_diff_eq!(mode_commutator(1, -1, &p).re, expect, epsilon = 1e-15);
    let expect2 = (q - 1.0 / q) * (t - 1.0 / t) / (pp + 1.0 / pp) / 2.0;
    assert_abs_diff_eq!(mode_commutator(2, -2, &p).re, expect2, epsilon = 1e-15);
}

#[test]
fn commutator_symmetries() {
    let p = QParams::new(0.7, 0.3).unwrap();
    for n in 1..8 {
        let a = mode_commutator(n, -n, &p);
        assert_abs_diff_eq!((mode_commutator(-n, n, &p) + a).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((mode_commutator(n, -n, &p.theta()) - a).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((mode_commutator(n, -n, &p.omega()) - a).norm(), 0.0, epsilon = 1e-14);
    }
}

#[test]
fn partition_counts() {
    let counts: Vec<usize> = (0..=11).map(|d| partitions(d).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56]);
    assert!(Partition::new(vec![1, 0]).is_err());
    assert_eq!(Partition::new(vec![1, 3, 2]).unwrap().parts(), &[3, 2, 1]);
}

#[test]
fn vacuum_pairing() {
    let p = QParams::new(0.6, 0.2).unwrap();
    let vac = FockState::vacuum(0.0);
    assert_eq!(inner_product(&vac, &vac, &p), c(1.0));
    let one = FockState::new(0.0, Partition::new(vec![1]).unwrap());
    assert_eq!(inner_product(&vac, &one, &p), c(0.0));
    assert_eq!(inner_product(&FockState::vacuum(0.5), &vac, &p), c(0.0));
}

#[test]
fn gram_matrix_matches_word_reordering() {
    let p = QParams::new(0.6, 0.2).unwrap();
    let mut oracle = WordOracle::new(&p);
    for d in 0..=3 {
        for a in partitions(d) {
            for b in partitions(d) {
                let got = inner_product(&FockState::new(0.0, a.clone()), &FockState::new(0.0, b.clone()), &p);
                let want = oracle.pairing(&a, &[], &b);
                assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }
}

fn sample_vertex() -> NormalOrderedVertex {
    NormalOrderedVertex::new("X", |n| c(0.3 + 0.1 * n as f64)).with_charge(c(0.4), c(0.4))
}

#[test]
fn identity_product_between_vacua() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let prod = OperatorProduct {
        factors: vec![],
        contractions: vec![],
    };
    let vac = FockState::vacuum(0.0);
    let t = matrix_element(&prod, &vac, &vac, 3, &p).unwrap();
    assert_eq!(t.entries.len(), 1);
    assert_eq!(t.get(0), c(1.0));
}

/// Expands `exp(sum_{k<=kmax} a_k h_k)` to second order as (coefficient, word) pairs.
fn quadratic_expansion(coeffs: &[(i64, Complex64)]) -> Vec<(Complex64, Vec<i64>)> {
    let mut out = vec![(c(1.0), vec![])];
    for &(k, a) in coeffs {
        out.push((a, vec![k]));
    }
    for &(k1, a1) in coeffs {
        for &(k2, a2) in coeffs {
            out.push((a1 * a2 * 0.5, vec![k1, k2]));
        }
    }
    out
}

#[test]
fn single_vertex_matches_exponential_expansion() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let x = sample_vertex();
    let basis = PartitionBasis::new(2);
    let op = ModeOperator::new(&x, &p, &basis);
    let create = quadratic_expansion(&[(-1, x.mode(-1)), (-2, x.mode(-2))]);
    let annihilate = quadratic_expansion(&[(1, x.mode(1)), (2, x.mode(2))]);
    let mut oracle = WordOracle::new(&p);
    for d_bra in 0..=2 {
        for d_ket in 0..=2 {
            for (i, mu) in partitions(d_bra).iter().enumerate() {
                for (j, la) in partitions(d_ket).iter().enumerate() {
                    let mut want = c(0.0);
                    for (ca, wa) in &create {
                        for (cb, wb) in &annihilate {
                            let mut middle = wa.clone();
                            middle.extend_from_slice(wb);
                            want += ca * cb * oracle.pairing(mu, &middle, la);
                        }
                    }
                    let got = op.block(d_bra, d_ket).unwrap()[(i, j)] * state_norm(mu, &p);
                    assert!((got - want).norm() < 1e-13, "{mu} <- {la}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn single_factor_zero_modes() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let x = sample_vertex().with_zero_mode_log(c(0.2)).with_scalar(c(1.5));
    let prod = normal_order(vec![Factor::at(x, 0)], &p, 4).unwrap();
    let m = c(0.25);
    let ket = FockState::vacuum(m);
    let bra = FockState::vacuum(m + 0.2);
    let t = matrix_element(&prod, &bra, &ket, 2, &p).unwrap();
    assert_abs_diff_eq!((t.get(0) - 1.5 * (0.2 * m).exp()).norm(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!((t.z_exponent - 0.4 * m).norm(), 0.0, epsilon = 1e-15);
    // unbalanced charge: identically zero
    let t = matrix_element(&prod, &ket, &ket, 2, &p).unwrap();
    assert!(t.entries.is_empty());
}

#[test]
fn vacuum_pair_element_is_the_contraction() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let x = sample_vertex().with_zero_mode_log(c(-0.3));
    let y = NormalOrderedVertex::new("Y", |n| c(1.0 / (1.0 + n.abs() as f64))).with_charge(c(-0.7), c(-0.7));
    let prod = normal_order(vec![Factor::at(x.clone(), 0), Factor::at(y.clone(), 1)], &p, 6).unwrap();
    let ket = FockState::vacuum(0.0);
    let bra = FockState::vacuum(c((0.4 - 0.7) * 0.5));
    let t = matrix_element(&prod, &bra, &ket, 6, &p).unwrap();
    let con = &prod.contractions[0].contraction;
    assert!((t.z_exponent - con.left_exponent).norm() < 1e-15);
    for k in 0..=6 {
        let want = con.series.coeff(k).unwrap() * con.constant;
        assert!((t.get(k) - want).norm() < 1e-13, "k={k}");
    }
    // the opposite ordering expands in z/w
    let swapped = normal_order(vec![Factor::at(y.clone(), 1), Factor::at(x.clone(), 0)], &p, 6).unwrap();
    let t = matrix_element(&swapped, &bra, &ket, 6, &p).unwrap();
    let con = contract(&y, &x, &p, 6);
    for k in 0..=6 {
        let want = con.series.coeff(k).unwrap() * con.constant;
        assert!((t.get(-k) - want).norm() < 1e-13, "k={k}");
    }
}

#[test]
fn contraction_with_trivial_vertex_is_one() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let con = contract(&sample_vertex(), &NormalOrderedVertex::identity(), &p, 6);
    assert_eq!(con.series, LaurentSeries::one(6));
    assert_eq!(con.constant, c(1.0));
    assert_eq!(con.left_exponent, c(0.0));
}

#[test]
fn involution_flips_are_involutive() {
    let x = sample_vertex().with_zero_mode_log(c(0.2));
    assert!(x.flip_theta().flip_theta().distance(&x, 6) < 1e-15);
    assert!(x.flip_omega().flip_omega().distance(&x, 6) < 1e-15);
}

#[test]
fn shift_composes() {
    let x = sample_vertex();
    let a = x.shifted(c(0.3)).shifted(c(-0.1));
    let b = x.shifted(c(0.2));
    assert!(a.distance(&b, 6) < 1e-14);
}

#[test]
fn normal_order_single_factor_is_unchanged() {
    let p = QParams::new(0.7, 0.3).unwrap();
    let x = sample_vertex();
    let prod = normal_order(vec![Factor::at(x.clone(), 0)], &p, 4).unwrap();
    assert!(prod.contractions.is_empty());
    let v = prod.normal_ordered_vertex().unwrap();
    assert!(v.distance(&x, 6) < 1e-15);
    // normalising the normalised product again changes nothing
    let again = normal_order(vec![Factor::at(v.clone(), 0)], &p, 4).unwrap();
    assert!(again.normal_ordered_vertex().unwrap().distance(&v, 6) < 1e-15);
}
