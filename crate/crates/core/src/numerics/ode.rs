//! Classical fixed-step 4th-order Runge–Kutta.

use crate::numerics::NumericsError;
use crate::scalar::Scalar;

/// One RK4 step of `dy/dt = f(y)` with step `dt`.
pub fn rk4_step<S, F>(deriv: F, state: &[S], dt: S) -> Result<Vec<S>, NumericsError>
where
    S: Scalar,
    F: Fn(&[S]) -> Vec<S>,
{
    if dt <= S::zero() {
        return Err(NumericsError::NonPositiveStep { dt: dt.as_f64() });
    }
    let half = dt * S::of(0.5);
    let k1 = eval(&deriv, state)?;
    let k2 = eval(&deriv, &offset(state, &k1, half))?;
    let k3 = eval(&deriv, &offset(state, &k2, half))?;
    let k4 = eval(&deriv, &offset(state, &k3, dt))?;

    let sixth = dt / S::of(6.0);
    let two = S::of(2.0);
    Ok(state
        .iter()
        .enumerate()
        .map(|(i, &y)| y + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect())
}

fn eval<S: Scalar, F: Fn(&[S]) -> Vec<S>>(deriv: &F, y: &[S]) -> Result<Vec<S>, NumericsError> {
    let d = deriv(y);
    debug_assert_eq!(d.len(), y.len());
    if d.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFiniteDerivative);
    }
    Ok(d)
}

fn offset<S: Scalar>(y: &[S], k: &[S], h: S) -> Vec<S> {
    y.iter().zip(k).map(|(&yi, &ki)| yi + h * ki).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_derivative_leaves_state_unchanged() {
        let y = rk4_step(|s: &[f64]| vec![0.0; s.len()], &[3.0, -1.0], 0.1).unwrap();
        assert_eq!(y, vec![3.0, -1.0]);
    }

    #[test]
    fn exponential_growth_matches_closed_form() {
        // ẋ = x, x0 = 1, dt = 0.1 → e^0.1 within O(dt⁵)
        let y = rk4_step(|s: &[f64]| s.to_vec(), &[1.0], 0.1).unwrap();
        let exact = 0.1f64.exp();
        assert!((y[0] - exact).abs() < 1e-7, "got {}, want {}", y[0], exact);
        assert!((y[0] - 1.1051708).abs() < 1e-6);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        // ẋ = y, ẏ = −x over 1000 steps of dt = 0.01
        let deriv = |s: &[f64]| vec![s[1], -s[0]];
        let mut state = vec![1.0, 0.0];
        for _ in 0..1000 {
            state = rk4_step(deriv, &state, 0.01).unwrap();
        }
        let energy = state[0] * state[0] + state[1] * state[1];
        assert!((energy - 1.0).abs() <= 1e-8, "energy drift {}", (energy - 1.0).abs());
    }

    #[test]
    fn rejects_bad_step_and_nan() {
        assert!(rk4_step(|s: &[f64]| s.to_vec(), &[1.0], 0.0).is_err());
        assert!(rk4_step(|_: &[f64]| vec![f64::NAN], &[1.0], 0.1).is_err());
    }
}
