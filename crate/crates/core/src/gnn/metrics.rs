use super::GnnError;

/// Nash-Sutcliffe efficiency, `1 - Σ(p - o)² / Σ(o - ō)²`.
///
/// 1 is a perfect forecast; 0 matches predicting the observed mean.
pub fn nse(predicted: &[f64], observed: &[f64]) -> Result<f64, GnnError> {
    nse_weighted(predicted, observed, None)
}

/// NSE with optional per-sample weights applied to both sums and to the
/// observed mean. `None` is the plain NSE.
pub fn nse_weighted(predicted: &[f64], observed: &[f64], weights: Option<&[f64]>) -> Result<f64, GnnError> {
    if predicted.len() != observed.len() || observed.len() < 2 || weights.is_some_and(|w| w.len() != observed.len()) {
        return Err(GnnError::LengthMismatch {
            predicted: predicted.len(),
            observed: observed.len(),
        });
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..observed.len()).map(weight).sum();
    let mean = observed.iter().enumerate().map(|(i, o)| weight(i) * o).sum::<f64>() / total;
    let mut err = 0.0;
    let mut var = 0.0;
    for (i, (p, o)) in predicted.iter().zip(observed).enumerate() {
        err += weight(i) * (p - o) * (p - o);
        var += weight(i) * (o - mean) * (o - mean);
    }
    if var == 0.0 {
        return Err(GnnError::ConstantObserved);
    }
    Ok(1.0 - err / var)
}

pub fn mean_absolute_error(predicted: &[f64], observed: &[f64]) -> f64 {
    let n = predicted.len().min(observed.len());
    predicted.iter().zip(observed).map(|(p, o)| (p - o).abs()).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_values() {
        let obs = [1.0, 2.0, 3.0];
        assert_eq!(nse(&obs, &obs).unwrap(), 1.0);
        assert_eq!(nse(&[2.0, 2.0, 2.0], &obs).unwrap(), 0.0);
        assert_eq!(nse(&[1.0, 2.0, 5.0], &obs).unwrap(), -1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(nse(&[1.0, 1.0], &[3.0, 3.0]), Err(GnnError::ConstantObserved));
        assert!(matches!(nse(&[1.0], &[1.0]), Err(GnnError::LengthMismatch { .. })));
        assert!(matches!(
            nse(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(GnnError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn unit_weights_match_plain() {
        let obs = [0.3, 1.7, 2.2, 0.9];
        let pred = [0.5, 1.1, 2.0, 1.4];
        let plain = nse(&pred, &obs).unwrap();
        let weighted = nse_weighted(&pred, &obs, Some(&[1.0; 4])).unwrap();
        assert!((plain - weighted).abs() < 1e-15);
        // zero weight removes a sample entirely
        let dropped = nse_weighted(&pred, &obs, Some(&[1.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((dropped - nse(&pred[..3], &obs[..3]).unwrap()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn affine_invariance(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
            scale in 0.01f64..100.0,
            shift in -50.0f64..50.0,
        ) {
            let (pred, obs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assume!(obs.iter().any(|&o| (o - obs[0]).abs() > 1e-3));
            let a = nse(&pred, &obs).unwrap();
            let tp: Vec<f64> = pred.iter().map(|x| scale * x + shift).collect();
            let to: Vec<f64> = obs.iter().map(|x| scale * x + shift).collect();
            let b = nse(&tp, &to).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            prop_assert!(a <= 1.0);
        }
    }
}
