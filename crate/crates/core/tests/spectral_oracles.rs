//! Independent cross-checks for the spectral module.

mod common;

use common::{admissible_words, block_growth_entropy, extremal_words, w};
use kneadkit::matrix::Matrix;
use kneadkit::spectral::{char_poly, entropy, int_poly_roots, spectrum, zeta_denominator};
use kneadkit::{IntPoly, SignedGraph};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

#[test]
fn block_growth_matches_matrix_entropy_gamma2() {
    let g = SignedGraph::unimodal();
    for word in admissible_words(&g, 6) {
        let m = g.markov_matrix(&word).unwrap();
        let ours = entropy(&m.entries).unwrap();
        let oracle = block_growth_entropy(&g, &word, 14);
        assert!(
            (ours - oracle).abs() < 1e-6,
            "{word}: matrix {ours} vs blocks {oracle}"
        );
    }
}

#[test]
fn block_growth_matches_matrix_entropy_other_systems() {
    for name in ["tree", "four-vertex"] {
        let g = SignedGraph::builtin(name).unwrap();
        for word in admissible_words(&g, 5) {
            let m = g.markov_matrix(&word).unwrap();
            let ours = entropy(&m.entries).unwrap();
            let oracle = block_growth_entropy(&g, &word, 8);
            assert!(
                (ours - oracle).abs() < 1e-6,
                "{name} {word}: matrix {ours} vs blocks {oracle}"
            );
        }
    }
}

#[test]
fn entropy_anchors() {
    let g = SignedGraph::unimodal();
    let m = g.markov_matrix(&w("10")).unwrap();
    assert_eq!(entropy(&m.entries).unwrap(), 0.0);
    let full = Matrix::from_rows(g.adjacency_matrix());
    assert!((entropy(&full).unwrap() - 2f64.ln()).abs() < 1e-12);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let m = g.markov_matrix(&w("101")).unwrap();
    assert!((entropy(&m.entries).unwrap() - phi.ln()).abs() < 1e-12);
}

#[test]
fn modular_charpoly_matches_berkowitz() {
    for name in kneadkit::graph::BUILTIN_SYSTEMS {
        let g = SignedGraph::builtin(name).unwrap();
        let max = if name == "unimodal" { 8 } else { 5 };
        for word in extremal_words(&g, max) {
            let m = g.markov_matrix(&word).unwrap().entries;
            let exact = m.map(|&x| BigInt::from(x)).charpoly_berkowitz();
            assert_eq!(char_poly(&m), exact, "{name} {word}");
            assert_eq!(m.charpoly(), exact, "{name} {word}");
        }
    }
}

#[test]
fn zeta_is_reversed_charpoly() {
    let g = SignedGraph::unimodal();
    for word in extremal_words(&g, 8) {
        let m = g.markov_matrix(&word).unwrap().entries;
        let cp = char_poly(&m);
        let n = m.rows();
        // det(I - tM) at t = 1/x, times x^n, is charpoly(x): compare coefficientwise
        let zeta = zeta_denominator(&m);
        for k in 0..=n {
            assert_eq!(zeta.coeff(k), cp.coeff(n - k), "{word} coefficient {k}");
        }
        assert!(zeta.coeff(0).is_one());
    }
}

#[test]
fn spectrum_consistent_with_determinant_and_size() {
    let g = SignedGraph::unimodal();
    for word in extremal_words(&g, 8) {
        let m = g.markov_matrix(&word).unwrap().entries;
        let s = spectrum::<f64>(&m, 1e-8).unwrap();
        assert_eq!(s.eigenvalues.len(), m.rows());
        let prod = s
            .eigenvalues
            .iter()
            .fold(Complex::new(1.0, 0.0), |acc, z| acc * z);
        let det = m.map(|&x| BigInt::from(x)).determinant();
        let det: f64 = det.to_string().parse().unwrap();
        assert!(
            (prod.re - det).abs() < 1e-6 && prod.im.abs() < 1e-6,
            "{word}"
        );
        assert_eq!(
            s.inside.len() + s.on_circle.len() + s.outside.len(),
            m.rows()
        );
        let cp = char_poly(&m);
        for z in &s.eigenvalues {
            let v = cp
                .coeffs()
                .iter()
                .rev()
                .fold(Complex::new(0.0, 0.0), |acc, c| {
                    acc * z + Complex::new(c.to_string().parse::<f64>().unwrap(), 0.0)
                });
            let scale: f64 = cp
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.to_string().parse::<f64>().unwrap().abs() * z.norm().powi(k as i32))
                .sum();
            assert!(v.norm() <= 1e-8 * scale.max(1.0), "{word} residual");
        }
    }
}

#[test]
fn off_circle_roots_match_eigenvalues() {
    for (name, max) in [("unimodal", 8), ("tree", 7), ("four-vertex", 5)] {
        let g = SignedGraph::builtin(name).unwrap();
        let words = admissible_words(&g, max);
        let mut matched = 0;
        for word in &words {
            let r = g.match_off_circle(word, 1e-8).unwrap();
            if !r.core_irreducible || r.degenerate {
                continue;
            }
            matched += 1;
            assert!(r.multiset_sizes_agree(), "{name} {word}: {r:?}");
            assert!(r.max_distance < 1e-8, "{name} {word}: {}", r.max_distance);
        }
        assert!(
            2 * matched > words.len(),
            "{name}: only {matched} of {}",
            words.len()
        );
    }
}

#[test]
fn elimination_polys_solve_the_system() {
    for name in kneadkit::graph::BUILTIN_SYSTEMS {
        let g = SignedGraph::builtin(name).unwrap();
        let p = g.elimination_polys().unwrap();
        let lambda: IntPoly = IntPoly::x();
        for i in 0..g.top() {
            let rhs = g
                .successors(i)
                .iter()
                .fold(IntPoly::zero(), |acc, &j| acc + p[j].clone());
            assert_eq!(lambda.clone() * p[i].clone(), rhs, "{name} row {i}");
        }
        let g0 = p.iter().fold(IntPoly::zero(), |acc, q| acc.gcd(q));
        assert!(g0.is_one(), "{name}: gcd {g0:?}");
        assert!(p[g.top()].leading().unwrap() > &BigInt::zero());
    }
}

#[test]
fn core_irreducible_exactly_when_nonrenormalizable() {
    // proper powers share the partition of their root, so only primitive
    // words are held to this
    let g = SignedGraph::unimodal();
    let (mut renorm, mut nonrenorm) = (0, 0);
    for word in admissible_words(&g, 10) {
        if word.primitive_root().len() < word.len() {
            continue;
        }
        let renormalizable = g.detect_renormalization(&word).unwrap().is_some();
        let m = g.markov_matrix(&word).unwrap();
        let irreducible = m.core().is_irreducible();
        if renormalizable {
            renorm += 1;
            assert!(
                !irreducible,
                "{word} is renormalizable but its core is irreducible"
            );
        } else {
            nonrenorm += 1;
            assert!(irreducible, "{word}: {:?}", m.core().entries.to_rows());
        }
    }
    assert!(renorm > 0 && nonrenorm > 0);
}

#[test]
fn full_matrix_keeps_the_fixed_point_class() {
    let g = SignedGraph::unimodal();
    for word in admissible_words(&g, 8) {
        let m = g.markov_matrix(&word).unwrap();
        let core = m.core();
        assert_eq!(
            entropy(&m.entries).unwrap(),
            entropy(&core.entries).unwrap(),
            "{word}"
        );
        let rest = char_poly(&m.entries)
            .div_exact(&char_poly(&core.entries))
            .expect("core block divides the full characteristic polynomial");
        for z in int_poly_roots::<f64>(&rest).unwrap() {
            assert!(
                z.norm() < 1e-9 || (z.norm() - 1.0).abs() < 1e-9,
                "{word}: {z}"
            );
        }
    }
}

#[test]
fn kneading_coefficients_stay_bounded() {
    let g = SignedGraph::unimodal();
    let mut by_len = vec![BigInt::zero(); 11];
    for word in admissible_words(&g, 10) {
        let f = g.kneading_poly(&word).unwrap();
        let h = kneadkit::spectral::coefficient_height(&f);
        if h > by_len[word.len()] {
            by_len[word.len()] = h;
        }
    }
    let after_six = by_len[6..].iter().max().unwrap().clone();
    let upto_six = by_len[..=6].iter().max().unwrap().clone();
    assert!(after_six <= upto_six, "{by_len:?}");
}
