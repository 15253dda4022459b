use crate::{Error, Matrix, Result};

/// Kullback–Leibler divergence summed over time steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kld {
    pub value: f64,
    /// Some produced probability was zero where the target was positive.
    pub infinite: bool,
}

/// `sum_t sum_i y*[t,i] ln(y*[t,i] / y[t,i])` with `0 ln(0/.) = 0`.
pub fn kld_error(targets: &Matrix, outputs: &Matrix) -> Result<Kld> {
    if targets.rows() != outputs.rows() || targets.cols() != outputs.cols() {
        return Err(Error::Argument(format!(
            "target {}x{} and output {}x{} differ in shape",
            targets.rows(),
            targets.cols(),
            outputs.rows(),
            outputs.cols()
        )));
    }
    let mut value = 0.0;
    let mut infinite = false;
    for (&t, &y) in targets.as_slice().iter().zip(outputs.as_slice()) {
        value += kld_term(t, y);
        infinite |= t > 0.0 && y <= 0.0;
    }
    Ok(Kld { value, infinite })
}

#[inline]
pub(crate) fn kld_term(target: f64, output: f64) -> f64 {
    if target <= 0.0 {
        0.0
    } else if output <= 0.0 {
        f64::INFINITY
    } else {
        target * (target / output).ln()
    }
}

/// Half squared error, the LMS objective used for sigmoid outputs.
pub fn lms_error(targets: &[f64], outputs: &[f64]) -> f64 {
    0.5 * targets.iter().zip(outputs).map(|(t, y)| (y - t) * (y - t)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_distributions_have_zero_divergence() {
        let m = Matrix::from_rows(&[vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap();
        assert_eq!(kld_error(&m, &m).unwrap().value, 0.0);
    }

    #[test]
    fn one_hot_against_uniform_is_ln2() {
        let t = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let y = Matrix::from_rows(&[vec![0.5, 0.5]]).unwrap();
        let k = kld_error(&t, &y).unwrap();
        assert!((k.value - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(!k.infinite);
    }

    #[test]
    fn zero_output_under_positive_target_is_flagged() {
        let t = Matrix::from_rows(&[vec![0.5, 0.5]]).unwrap();
        let y = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let k = kld_error(&t, &y).unwrap();
        assert!(k.infinite);
        assert!(k.value.is_infinite());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t = Matrix::zeros(2, 3);
        let y = Matrix::zeros(3, 2);
        assert!(kld_error(&t, &y).is_err());
    }
}
