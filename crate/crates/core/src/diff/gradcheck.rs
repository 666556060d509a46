use crate::scalar::FloatBase;

use super::{DiffError, Tape, Var};

/// Per-coordinate comparison of reverse-mode and central-difference gradients.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// `|ad - fd| / max(1, |fd|)` per coordinate.
    pub rel_errors: Vec<f64>,
    pub max_rel_error: f64,
    /// A relu/min/max/clamp argument came within `step` of its kink.
    pub kink_proximity: bool,
    pub passed: bool,
}

/// Compare the tape gradient of `f` at `point` with central differences.
pub fn grad_check<F, Fun>(
    f: Fun,
    point: &[F],
    step: f64,
    tolerance: f64,
) -> Result<GradCheckReport, DiffError>
where
    F: FloatBase,
    Fun: for<'t> Fn(&[Var<'t, F>]) -> Var<'t, F>,
{
    let tape = Tape::new();
    let xs = tape.vars(point);
    let y = f(&xs);
    let analytic: Vec<f64> = tape
        .backward(y, &xs)?
        .into_iter()
        .map(|g| g.to_f64().unwrap_or(f64::NAN))
        .collect();
    let kink_proximity = tape.min_kink_margin() < step;

    let eval = |p: &[F]| -> f64 {
        let t = Tape::new();
        let v = t.vars(p);
        f(&v).val().to_f64().unwrap_or(f64::NAN)
    };
    let h = F::lit(step);
    let mut numeric = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let mut up = point.to_vec();
        let mut down = point.to_vec();
        up[i] = up[i] + h;
        down[i] = down[i] - h;
        // actual spacing after rounding, not the nominal step
        let span = (up[i] - down[i]).to_f64().unwrap_or(2.0 * step);
        numeric.push((eval(&up) - eval(&down)) / span);
    }

    let rel_errors: Vec<f64> = analytic
        .iter()
        .zip(&numeric)
        .map(|(ad, fd)| (ad - fd).abs() / fd.abs().max(1.0))
        .collect();
    let max_rel_error = rel_errors.iter().copied().fold(0.0, f64::max);
    Ok(GradCheckReport {
        passed: rel_errors.iter().all(|e| *e < tolerance),
        analytic,
        numeric,
        rel_errors,
        max_rel_error,
        kink_proximity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Real;

    #[test]
    fn identity_has_zero_error() {
        let r = grad_check(|x: &[Var<f64>]| x[0], &[0.7], 1e-5, 1e-12).unwrap();
        assert_eq!(r.max_rel_error, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn sigmoid_chain_passes() {
        let r = grad_check(
            |x: &[Var<f64>]| (x[0] * x[1]).sigmoid().sigmoid() + x[1].tanh(),
            &[0.3, -1.2],
            1e-5,
            1e-5,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(!r.kink_proximity);
    }

    #[test]
    fn relu_kink_is_flagged() {
        let r = grad_check(|x: &[Var<f64>]| x[0].relu(), &[0.0], 1e-5, 1e-5).unwrap();
        assert!(r.kink_proximity);
    }
}
