//! Two-level polarization states over the `{H, V}` basis and 2x2 observables.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Raw (possibly unnormalized) amplitude pair `(h, v)`.
pub type Amplitudes = [Complex64; 2];

const NORM_TOL: f64 = 1e-12;
const ZERO_NORM: f64 = 1e-15;

/// A normalized pure state `amp_h |H> + amp_v |V>`.
///
/// Global phase is kept as constructed; compare states with
/// [`PolarizationState::same_ray`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    amp_h: Complex64,
    amp_v: Complex64,
}

impl PolarizationState {
    /// Builds a state from arbitrary amplitudes, normalizing them.
    pub fn new(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        if !(amp_h.is_finite() && amp_v.is_finite()) {
            return Err(Error::invalid("state amplitudes must be finite"));
        }
        let norm = (amp_h.norm_sqr() + amp_v.norm_sqr()).sqrt();
        if norm < ZERO_NORM {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Ok(Self {
            amp_h: amp_h / norm,
            amp_v: amp_v / norm,
        })
    }

    /// Basis state `|H>`.
    pub fn horizontal() -> Self {
        Self {
            amp_h: Complex64::new(1.0, 0.0),
            amp_v: Complex64::new(0.0, 0.0),
        }
    }

    /// Basis state `|V>`.
    pub fn vertical() -> Self {
        Self {
            amp_h: Complex64::new(0.0, 0.0),
            amp_v: Complex64::new(1.0, 0.0),
        }
    }

    pub fn amp_h(&self) -> Complex64 {
        self.amp_h
    }

    pub fn amp_v(&self) -> Complex64 {
        self.amp_v
    }

    pub fn amplitudes(&self) -> Amplitudes {
        [self.amp_h, self.amp_v]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_h.norm_sqr() + self.amp_v.norm_sqr()
    }

    /// True when both states describe the same physical ray, `|<a|b>| = 1`.
    pub fn same_ray(&self, other: &Self) -> bool {
        (inner(self, other).norm() - 1.0).abs() <= NORM_TOL
    }
}

/// Linear polarization `sin(theta)|H> + cos(theta)|V>`.
pub fn linear_state(theta: f64) -> Result<PolarizationState> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be finite, got {theta}")));
    }
    let (s, c) = theta.sin_cos();
    Ok(PolarizationState {
        amp_h: Complex64::new(s, 0.0),
        amp_v: Complex64::new(c, 0.0),
    })
}

/// State selected by a quarter-wave plate followed by a polarizer at relative
/// angle `beta`: `(e^{-i beta}|H> - e^{i beta}|V>) / sqrt 2`.
pub fn phase_state(beta: f64) -> Result<PolarizationState> {
    if !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be finite, got {beta}")));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(PolarizationState {
        amp_h: Complex64::from_polar(r, -beta),
        amp_v: -Complex64::from_polar(r, beta),
    })
}

/// `<bra|ket>`; the bra is conjugated.
pub fn inner(bra: &PolarizationState, ket: &PolarizationState) -> Complex64 {
    braket(bra, &ket.amplitudes())
}

/// `<bra|v>` against a raw amplitude pair.
pub fn braket(bra: &PolarizationState, ket: &Amplitudes) -> Complex64 {
    bra.amp_h.conj() * ket[0] + bra.amp_v.conj() * ket[1]
}

/// Hermitian 2x2 observable in the `{H, V}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    m: [[Complex64; 2]; 2],
}

impl Observable {
    /// Validates hermiticity to within `1e-12`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let finite = m.iter().flatten().all(|z| z.is_finite());
        let hermitian = (0..2)
            .all(|i| (0..2).all(|j| (m[i][j] - m[j][i].conj()).norm() <= NORM_TOL));
        if !finite || !hermitian {
            return Err(Error::invalid("observable must be a finite Hermitian matrix"));
        }
        Ok(Self { m })
    }

    /// `|H><H| - |V><V|`.
    pub fn pauli_hv() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, -one]],
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn apply_raw(&self, v: &Amplitudes) -> Amplitudes {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

/// Matrix-vector product; the result is generally unnormalized.
pub fn apply(obs: &Observable, s: &PolarizationState) -> Amplitudes {
    obs.apply_raw(&s.amplitudes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_state_values() {
        let s = linear_state(FRAC_PI_4).unwrap();
        assert!(close(s.amp_h(), c(FRAC_1_SQRT_2, 0.0), 1e-15));
        assert!(close(s.amp_v(), c(FRAC_1_SQRT_2, 0.0), 1e-15));

        let s = linear_state(0.0).unwrap();
        assert_eq!(s.amplitudes(), [c(0.0, 0.0), c(1.0, 0.0)]);

        // sin/cos of pi/4 + 0.002 evaluated at 40 digits
        let s = linear_state(FRAC_PI_4 + 0.002).unwrap();
        assert!((s.amp_h().re - 0.708_519_579_593_020_8).abs() < 1e-15);
        assert!((s.amp_v().re - 0.705_691_154_353_892_3).abs() < 1e-15);
    }

    #[test]
    fn phase_state_values() {
        let s = phase_state(0.0).unwrap();
        assert!(close(s.amp_h(), c(FRAC_1_SQRT_2, 0.0), 1e-15));
        assert!(close(s.amp_v(), c(-FRAC_1_SQRT_2, 0.0), 1e-15));

        // e^{-i pi/2} = -i and -e^{i pi/2} = -i
        let s = phase_state(FRAC_PI_2).unwrap();
        assert!(close(s.amp_h(), c(0.0, -FRAC_1_SQRT_2), 1e-15));
        assert!(close(s.amp_v(), c(0.0, -FRAC_1_SQRT_2), 1e-15));

        let s = phase_state(0.002).unwrap();
        assert!(close(s.amp_h(), c(0.707_105_366_973_456_6, -0.001_414_212_619_564_242), 1e-15));
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(matches!(linear_state(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(phase_state(f64::INFINITY), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_vector_rejected() {
        let z = c(0.0, 0.0);
        assert!(matches!(PolarizationState::new(z, z), Err(Error::InvalidArgument(_))));
        let s = PolarizationState::new(c(3.0, 0.0), c(0.0, 4.0)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_products() {
        let s = linear_state(0.3).unwrap();
        assert!(close(inner(&s, &s), c(1.0, 0.0), 1e-15));

        let h = linear_state(FRAC_PI_2).unwrap();
        let v = linear_state(0.0).unwrap();
        assert!(inner(&v, &h).norm() < 1e-15);

        // (e^{i beta} - e^{-i beta}) / 2 = i sin(beta)
        let z = inner(&phase_state(0.002).unwrap(), &linear_state(FRAC_PI_4).unwrap());
        assert!(z.re.abs() < 1e-15);
        assert!((z.im - 0.002_f64.sin()).abs() < 1e-16);
        assert!((z.im - 0.001_999_998_666_666_9).abs() < 1e-15);
    }

    #[test]
    fn pauli_hv_action() {
        let a = Observable::pauli_hv();
        let h = apply(&a, &PolarizationState::horizontal());
        assert_eq!(h, [c(1.0, 0.0), c(0.0, 0.0)]);
        let v = apply(&a, &PolarizationState::vertical());
        assert_eq!(v, [c(0.0, 0.0), c(-1.0, 0.0)]);
        let d = apply(&a, &linear_state(FRAC_PI_4).unwrap());
        assert!(close(d[0], c(FRAC_1_SQRT_2, 0.0), 1e-15));
        assert!(close(d[1], c(-FRAC_1_SQRT_2, 0.0), 1e-15));
    }

    #[test]
    fn non_hermitian_rejected() {
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        assert!(Observable::new([[one, i], [i, one]]).is_err());
        assert!(Observable::new([[one, i], [-i, one]]).is_ok());
    }

    #[test]
    fn same_ray_ignores_global_phase() {
        let s = linear_state(0.4).unwrap();
        let rotated =
            PolarizationState::new(s.amp_h() * Complex64::from_polar(1.0, 1.1), s.amp_v() * Complex64::from_polar(1.0, 1.1))
                .unwrap();
        assert!(s.same_ray(&rotated));
        assert!(!s.same_ray(&linear_state(0.5).unwrap()));
    }

    fn any_state() -> impl Strategy<Value = PolarizationState> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-6)
            .prop_map(|(a, b, c, d)| PolarizationState::new(Complex64::new(a, b), Complex64::new(c, d)).unwrap())
    }

    proptest! {
        #[test]
        fn construction_normalizes(s in any_state()) {
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn inner_is_conjugate_symmetric(a in any_state(), b in any_state()) {
            prop_assert!(close(inner(&a, &b), inner(&b, &a).conj(), 1e-15));
        }

        #[test]
        fn inner_obeys_cauchy_schwarz(a in any_state(), b in any_state()) {
            prop_assert!(inner(&a, &b).norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn pauli_hv_squares_to_identity(s in any_state()) {
            let a = Observable::pauli_hv();
            let twice = a.apply_raw(&apply(&a, &s));
            prop_assert!(close(twice[0], s.amp_h(), 1e-12));
            prop_assert!(close(twice[1], s.amp_v(), 1e-12));
        }
    }
}
