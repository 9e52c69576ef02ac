//! Separability threshold and the suboptimal relative entropy of
//! entanglement with the same-(a, b) reference state.

use crate::divergences::relative_entropy;
use crate::error::{Error, Result};
use crate::gaussian::TwoModeStandardForm;

/// √((a − 1)(b − 1)).
pub fn c_sep(a: f64, b: f64) -> Result<f64> {
    if !(a >= 1.0 && b >= 1.0) {
        return Err(Error::Domain(format!("c_sep needs a, b >= 1, got ({a}, {b})")));
    }
    Ok(((a - 1.0) * (b - 1.0)).sqrt())
}

pub fn is_separable(state: &TwoModeStandardForm) -> bool {
    match c_sep(state.a, state.b) {
        Ok(cs) => state.c.abs() <= cs + 1e-12,
        Err(_) => false,
    }
}

/// The state (a, b, c_sep(a, b)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableReference {
    pub state: TwoModeStandardForm,
}

impl SeparableReference {
    pub fn for_state(state: &TwoModeStandardForm) -> Result<Self> {
        let cs = c_sep(state.a, state.b)?;
        Ok(Self { state: TwoModeStandardForm::new(state.a, state.b, cs) })
    }
}

/// D(ρ‖σ′) with σ′ = (a, b, c_sep); negative c is mapped to |c| first.
pub fn suboptimal_ree(state: &TwoModeStandardForm) -> Result<f64> {
    let reference = SeparableReference::for_state(state)?;
    if state.a <= 1.0 || state.b <= 1.0 {
        return Err(Error::Domain(format!(
            "separable reference for a = {}, b = {} is not faithful",
            state.a, state.b
        )));
    }
    let rho = TwoModeStandardForm::new(state.a, state.b, state.c.abs());
    relative_entropy(&rho, &reference.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn threshold_values() {
        assert_abs_diff_eq!(c_sep(2.0, 3.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(c_sep(1.0, 7.0).unwrap(), 0.0);
        assert_eq!(c_sep(2.0, 2.0).unwrap(), 1.0);
        assert!(c_sep(0.5, 2.0).is_err());
    }

    #[test]
    fn separability() {
        assert!(is_separable(&TwoModeStandardForm::new(2.0, 2.0, 1.0)));
        let s = TwoModeStandardForm::new(2.0, 2.0, 1.2);
        assert!(s.check_physical());
        assert!(!is_separable(&s));
        assert!(is_separable(&TwoModeStandardForm::VACUUM));
    }

    #[test]
    fn ree_of_reference_is_zero() {
        let r = suboptimal_ree(&TwoModeStandardForm::new(2.0, 3.0, 2f64.sqrt())).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ree_matches_definition() {
        let s = TwoModeStandardForm::new(2.0, 2.0, 1.2);
        let r = suboptimal_ree(&s).unwrap();
        let d = relative_entropy(&s, &TwoModeStandardForm::new(2.0, 2.0, 1.0)).unwrap();
        assert!(r > 0.0);
        assert_eq!(r, d);
        let flipped = suboptimal_ree(&TwoModeStandardForm::new(2.0, 2.0, -1.2)).unwrap();
        assert_eq!(r, flipped);
    }

    #[test]
    fn unit_diagonal_reference_rejected() {
        assert!(suboptimal_ree(&TwoModeStandardForm::new(1.0, 3.0, 0.0)).is_err());
    }
}
