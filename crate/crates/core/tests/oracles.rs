//! Closed forms against brute-force oracles written independently here.

use std::collections::BTreeMap;

use debruijn::linalg::Polynomial;
use debruijn::matrices::{a_matrix, b_matrices, b_sum, d_diagonal, kirchhoff, transition_matrix};
use debruijn::rational::{int, ratio, Rational};
use debruijn::specials::{alpha_poly, transfer_matrix_power, two_point, truncated_two_point};
use debruijn::spectrum::{eigenvalue_multiset, eigenvalues_with_base_multiplicity, kirchhoff_char_poly};
use debruijn::stationary::{partition_function, stationary_vector, CorrelationQuery};
use debruijn::words::all_words;
use debruijn::{RateSystem, Word};
use num_traits::{One, Zero};

fn r0() -> RateSystem {
    let v = [[1, 2], [3, 5]];
    RateSystem::new(2, 2, |a, k| int(v[a - 1][k - 1])).unwrap()
}

/// Coefficients of `Σ x^{γ(w)−1}` over words of length `k+1` from `a` to `b`.
fn enumerate_block_counts(n: usize, k: usize, a: usize, b: usize) -> Polynomial {
    let mut coeffs = vec![0i64; k + 1];
    for middle in all_words(n, k + 1) {
        let w = middle.letters();
        if w[0] != a || w[k] != b {
            continue;
        }
        let changes = w.windows(2).filter(|p| p[0] != p[1]).count();
        coeffs[changes] += 1;
    }
    Polynomial::new(coeffs.into_iter().map(int).collect())
}

/// The diagonal entry with the sign of the `(n−1)x` term flipped.
fn flipped_sign_alpha_diagonal(n: usize, k: usize) -> Polynomial {
    let first = Polynomial::linear(int(1), int(-(n as i64 - 1))).pow(k);
    let second = Polynomial::linear(int(1), int(-1)).pow(k).scale(&int(n as i64 - 1));
    (&first + &second).scale(&ratio(1, n as i64))
}

#[test]
fn alpha_matches_enumeration_and_transfer_matrix() {
    for n in 2..=4 {
        for k in 1..=6 {
            let power = transfer_matrix_power(n, k);
            for a in 1..=n {
                for b in 1..=n {
                    let counted = enumerate_block_counts(n, k, a, b);
                    assert_eq!(alpha_poly(n, k, a == b), counted, "n={n} k={k} a={a} b={b}");
                    assert_eq!(power[a - 1][b - 1], counted);
                }
            }
        }
    }
}

#[test]
fn flipped_sign_alpha_is_refuted() {
    let flipped = flipped_sign_alpha_diagonal(2, 2);
    let counted = enumerate_block_counts(2, 2, 1, 1);
    assert_eq!(counted, Polynomial::new(vec![int(1), int(0), int(1)]));
    assert_eq!(flipped, Polynomial::new(vec![int(1), int(-2), int(1)]));
    assert_ne!(flipped, counted);
}

#[test]
fn worked_example_generator() {
    let r = r0();
    let k = kirchhoff(&transition_matrix(&r)).unwrap();
    // Rows/columns in order 11, 12, 21, 22; column u holds the exits of u.
    let expected = [
        [-3, 0, 2, 0],
        [3, -6, 3, 0],
        [0, 1, -5, 1],
        [0, 5, 0, -1],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            assert_eq!(k.get(i, j), int(value), "entry ({i},{j})");
        }
    }
}

#[test]
fn worked_example_partition_function() {
    let z = partition_function(&r0()).unwrap();
    assert_eq!(z.common_denominator, int(120));
    assert_eq!(z.product_formula, int(120));
    assert_eq!(z.lcm_oracle, int(120));
    assert!(z.common_denominator_matches && z.product_formula_matches);

    let single = RateSystem::new(3, 1, |a, _| int(a as i64)).unwrap();
    let z = partition_function(&single).unwrap();
    assert_eq!(z.common_denominator, int(6));
    assert!(z.common_denominator_matches);
}

/// At n = 2, L = 4 a word can carry `β_{a,2}` twice in its denominator, so
/// the single-power product is not the common denominator.
#[test]
fn partition_needs_squared_depth_two_factor() {
    let r = RateSystem::new(2, 4, |a, k| int((a * 7 + k * 3) as i64)).unwrap();
    let z = partition_function(&r).unwrap();
    assert!(z.common_denominator_matches);
    assert!(!z.product_formula_matches);
    let beta = |a, m| r.beta_sum(a, m).unwrap();
    assert_eq!(
        &z.common_denominator / &z.product_formula,
        &beta(1, 2) * &beta(2, 2)
    );
}

#[test]
fn degenerate_spectrum_merges_multiplicities() {
    let r = RateSystem::new(3, 2, |_, _| int(1)).unwrap();
    let e = eigenvalue_multiset(&r);
    assert_eq!(e.distinct(), 2);
    assert_eq!(e.multiplicity(&int(-3)), 8);
    let chi = kirchhoff_char_poly(&r).unwrap();
    let expected = &Polynomial::x() * &Polynomial::linear(int(3), int(1)).pow(8);
    assert_eq!(chi, expected);
}

#[test]
fn base_multiplicity_one_has_wrong_degree() {
    let r = RateSystem::new(3, 2, |a, k| int((a + 2 * k) as i64)).unwrap();
    let base_one = eigenvalues_with_base_multiplicity(&r, 1);
    assert_eq!(base_one.total_multiplicity(), 9 - 3 + 2);
    let chi = kirchhoff_char_poly(&r).unwrap();
    assert_eq!(chi.degree(), Some(9));
    assert!(debruijn::linalg::factor_check(&chi, &base_one).is_err());
    assert!(debruijn::linalg::factor_check(&chi, &eigenvalue_multiset(&r)).unwrap());
}

#[test]
fn block_decomposition_shapes() {
    let r = RateSystem::new(2, 3, |a, k| int((a * 5 + k) as i64)).unwrap();
    let a1 = a_matrix(&r, 1).unwrap();
    assert_eq!((a1.rows(), a1.cols()), (2, 1));
    assert_eq!(a1.get(0, 0), *r.rate(1, 1));
    assert_eq!(a1.get(1, 0), *r.rate(2, 1));

    // M is n copies of A side by side.
    let m = transition_matrix(&r);
    let a = a_matrix(&r, 3).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(m.get(i, j), a.get(i, j % 4));
        }
    }

    // Full-length B equals M; shorter B differs only on pure-block diagonals.
    assert!(b_sum(&r, 3).unwrap().same_values(&m));
    let shorter = r.truncate(2).unwrap();
    let diff_cells: Vec<(usize, usize)> = {
        let b = b_sum(&r, 2).unwrap();
        let m2 = transition_matrix(&shorter);
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| b.get(i, j) != m2.get(i, j))
            .collect()
    };
    assert!(diff_cells.iter().all(|&(i, j)| i == j && (i == 0 || i == 3)));
    assert_eq!(b_matrices(&r, 2).unwrap().len(), 2);

    // D collects exits of words of the next length.
    let d = d_diagonal(&r, 2).unwrap();
    for (u, value) in all_words(2, 2).zip(&d) {
        let expect: Rational = (1..=2).map(|b| r.beta(&u.append(b)).clone()).sum();
        assert_eq!(value, &expect);
    }
}

#[test]
fn skin_deep_two_point_by_enumeration() {
    for n in 2..=3usize {
        for x in [ratio(1, 3), int(1), int(3)] {
            let rates = RateSystem::new(n, 4, |_, k| if k == 1 { x.clone() } else { int(1) }).unwrap();
            let v = stationary_vector(&rates);
            for j in 2..=4 {
                let joint = v.correlation(&CorrelationQuery::new(vec![(1, 2), (j, 2)]).unwrap()).unwrap();
                let truncated = joint - ratio(1, (n * n) as i64);
                assert_eq!(truncated, truncated_two_point(n, &x, j - 1).unwrap());
                assert_eq!(
                    v.correlation(&CorrelationQuery::new(vec![(1, 1), (j, 2)]).unwrap()).unwrap(),
                    two_point(n, &x, 1, j, false).unwrap()
                );
            }
        }
    }
}

#[test]
fn truncated_correlation_signs() {
    let signs = |x: Rational| -> Vec<bool> {
        (1..=5).map(|g| truncated_two_point(2, &x, g).unwrap() > Rational::zero()).collect()
    };
    assert!(signs(ratio(1, 3)).iter().all(|&s| s));
    assert_eq!(signs(int(3)), vec![false, true, false, true, false]);
}

#[test]
fn last_site_density_matches_depth_one_ratio() {
    let r = r0();
    let v = stationary_vector(&r);
    let q = CorrelationQuery::new(vec![(2, 2)]).unwrap();
    assert_eq!(v.correlation(&q).unwrap(), ratio(3, 4));
    let by_letter: BTreeMap<usize, Rational> = (1..=2)
        .map(|a| (a, v.correlation(&CorrelationQuery::new(vec![(2, a)]).unwrap()).unwrap()))
        .collect();
    assert!((by_letter[&1].clone() + &by_letter[&2]).is_one());
    let w = Word::parse(2, "21").unwrap();
    assert_eq!(v.get(&w), &ratio(3, 20));
}
