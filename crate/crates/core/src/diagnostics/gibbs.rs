use crate::error::{Error, Result};
use crate::simplex::SimplexVector;

/// `ln x` for `x > 0`, and `-1` otherwise.
pub fn lln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        -1.0
    }
}

/// `alpha . (ln alpha - ln beta)` with `0 ln 0 = 0`.
///
/// Returns `f64::INFINITY` when some `beta^n = 0 < alpha^n`.
pub fn gibbs_gap(alpha: &SimplexVector, beta: &SimplexVector) -> Result<f64> {
    if alpha.dim() != beta.dim() {
        return Err(Error::Dimension {
            expected: alpha.dim(),
            got: beta.dim(),
        });
    }
    let mut gap = 0.0;
    for (a, b) in alpha.as_slice().iter().zip(beta.as_slice()) {
        if *a == 0.0 {
            continue;
        }
        if *b == 0.0 {
            return Ok(f64::INFINITY);
        }
        gap += a * (a.ln() - b.ln());
    }
    Ok(gap)
}

/// The same gap computed with the `lln` convention on both sides.
pub fn gibbs_gap_lln(alpha: &SimplexVector, beta: &SimplexVector) -> f64 {
    alpha
        .as_slice()
        .iter()
        .zip(beta.as_slice())
        .map(|(a, b)| a * (lln(*a) - lln(*b)))
        .sum()
}

/// `||alpha - beta||^2 / 4`, the lower bound of the gap.
pub fn quarter_distance(alpha: &SimplexVector, beta: &SimplexVector) -> f64 {
    alpha.dist2(beta) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(w: &[f64]) -> SimplexVector {
        SimplexVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn equal_vectors_have_zero_gap() {
        let a = sv(&[0.2, 0.3, 0.5]);
        assert_eq!(gibbs_gap(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hand_values() {
        let g = gibbs_gap(&sv(&[0.5, 0.5]), &sv(&[0.25, 0.75])).unwrap();
        let expected = 0.5 * (4.0f64 / 3.0).ln();
        assert!((g - expected).abs() < 1e-15);
        assert!((g - 0.14384).abs() < 1e-5);
        assert_eq!(quarter_distance(&sv(&[0.5, 0.5]), &sv(&[0.25, 0.75])), 0.03125);

        let g = gibbs_gap(&sv(&[1.0, 0.0]), &sv(&[0.5, 0.5])).unwrap();
        assert!((g - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn unsupported_mass_is_infinite() {
        let g = gibbs_gap(&sv(&[0.5, 0.5]), &sv(&[1.0, 0.0])).unwrap();
        assert!(g.is_infinite());
        assert!(gibbs_gap(&sv(&[0.5, 0.5]), &sv(&[0.2, 0.3, 0.5])).is_err());
    }

    #[test]
    fn lln_convention() {
        assert_eq!(lln(0.0), -1.0);
        assert_eq!(lln(-3.0), -1.0);
        assert_eq!(lln(1.0), 0.0);
        // agrees with the exact gap when supports match
        let (a, b) = (sv(&[0.6, 0.4]), sv(&[0.5, 0.5]));
        assert!((gibbs_gap_lln(&a, &b) - gibbs_gap(&a, &b).unwrap()).abs() < 1e-15);
    }

    fn interior_pair() -> impl Strategy<Value = (SimplexVector, SimplexVector)> {
        (2usize..9).prop_flat_map(|n| {
            let v = || proptest::collection::vec(1e-6f64..1.0, n);
            (v(), v()).prop_map(|(a, b)| {
                let norm = |x: Vec<f64>| crate::simplex::make_simplex(&x).unwrap();
                (norm(a), norm(b))
            })
        })
    }

    proptest! {
        #[test]
        fn gap_dominates_quarter_distance((a, b) in interior_pair()) {
            let g = gibbs_gap(&a, &b).unwrap();
            prop_assert!(g >= quarter_distance(&a, &b) - 1e-12);
            prop_assert!(g >= -1e-15);
        }
    }
}
