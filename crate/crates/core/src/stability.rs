//! Root condition for linear multistep characteristic polynomials.

use num_complex::Complex64;

/// Polynomial with real coefficients, highest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPolynomial(pub Vec<f64>);

/// Slack on `|δ| = 1` when classifying roots.
const UNIT_CIRCLE_TOL: f64 = 1e-7;

impl CharacteristicPolynomial {
    /// `P(δ) = δ − 1`, the one-step Euler-forward scheme.
    pub fn euler_forward() -> Self {
        Self(vec![1.0, -1.0])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        Self(
            self.0
                .iter()
                .take(d)
                .enumerate()
                .map(|(i, &c)| c * (d - i) as f64)
                .collect(),
        )
    }

    /// All complex roots (Durand–Kerner iteration).
    pub fn roots(&self) -> Vec<Complex64> {
        let lead = self.0.iter().position(|&c| c != 0.0);
        let coeffs: Vec<f64> = match lead {
            Some(i) => self.0[i..].iter().map(|c| c / self.0[i]).collect(),
            None => return Vec::new(),
        };
        let deg = coeffs.len() - 1;
        match deg {
            0 => return Vec::new(),
            1 => return vec![Complex64::new(-coeffs[1], 0.0)],
            _ => {}
        }
        let monic = Self(coeffs);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32)).collect();
        for _ in 0..10_000 {
            let mut delta = 0.0_f64;
            for i in 0..deg {
                let denom = (0..deg)
                    .filter(|&j| j != i)
                    .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
                if denom.norm() == 0.0 {
                    continue;
                }
                let step = monic.eval(z[i]) / denom;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 {
                break;
            }
        }
        z
    }

    /// Root condition: every root in the closed unit disc, and roots on the
    /// unit circle simple.
    pub fn is_zero_stable(&self) -> bool {
        let roots = self.roots();
        let dp = self.derivative();
        let scale = self.0.iter().find(|c| **c != 0.0).map_or(1.0, |c| c.abs());
        roots.iter().enumerate().all(|(i, r)| {
            let modulus = r.norm();
            if modulus > 1.0 + UNIT_CIRCLE_TOL {
                return false;
            }
            if modulus < 1.0 - UNIT_CIRCLE_TOL {
                return true;
            }
            let clustered = roots
                .iter()
                .enumerate()
                .any(|(j, q)| j != i && (q - r).norm() < 1e-5);
            !clustered && dp.eval(*r).norm() > 1e-6 * scale
        })
    }
}

/// Roots of the Euler-forward characteristic polynomial.
pub fn zero_stability_roots() -> Vec<Complex64> {
    CharacteristicPolynomial::euler_forward().roots()
}
