//! Scalar arithmetic the kernels are written against.
//!
//! Kernels are generic over [`Real`] so the same code runs on `f64` for
//! production and on an instrumented scalar for operation counting. All
//! complex helpers here use plain real adds and multiplies; multiplying by
//! a unit phase (±1, ±i) only swaps and negates and costs nothing.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + PartialEq
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Real for f64 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
}

pub type Cplx<T> = Complex<T>;

#[inline(always)]
pub fn czero<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

/// `a + b` (2 flops)
#[inline(always)]
pub fn cadd<T: Real>(a: Cplx<T>, b: Cplx<T>) -> Cplx<T> {
    Complex::new(a.re + b.re, a.im + b.im)
}

/// `a - b` (2 flops)
#[inline(always)]
pub fn csub<T: Real>(a: Cplx<T>, b: Cplx<T>) -> Cplx<T> {
    Complex::new(a.re - b.re, a.im - b.im)
}

/// `acc += a * x` (8 flops)
#[inline(always)]
pub fn cmac<T: Real>(acc: &mut Cplx<T>, a: Cplx<T>, x: Cplx<T>) {
    acc.re += a.re * x.re - a.im * x.im;
    acc.im += a.re * x.im + a.im * x.re;
}

/// `acc += conj(a) * x` (8 flops)
#[inline(always)]
pub fn cmac_conj<T: Real>(acc: &mut Cplx<T>, a: Cplx<T>, x: Cplx<T>) {
    acc.re += a.re * x.re + a.im * x.im;
    acc.im += a.re * x.im - a.im * x.re;
}

/// `acc += a * x` with real `a` (4 flops)
#[inline(always)]
pub fn rmac<T: Real>(acc: &mut Cplx<T>, a: T, x: Cplx<T>) {
    acc.re += a * x.re;
    acc.im += a * x.im;
}

/// `a * x` with real `a` (2 flops)
#[inline(always)]
pub fn rscale<T: Real>(a: T, x: Cplx<T>) -> Cplx<T> {
    Complex::new(a * x.re, a * x.im)
}

/// Unit phases that appear as gamma-matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    #[inline(always)]
    pub fn apply<T: Real>(self, z: Cplx<T>) -> Cplx<T> {
        match self {
            Phase::One => z,
            Phase::I => Complex::new(-z.im, z.re),
            Phase::MinusOne => Complex::new(-z.re, -z.im),
            Phase::MinusI => Complex::new(z.im, -z.re),
        }
    }

    pub fn value(self) -> Complex<f64> {
        match self {
            Phase::One => Complex::new(1.0, 0.0),
            Phase::I => Complex::new(0.0, 1.0),
            Phase::MinusOne => Complex::new(-1.0, 0.0),
            Phase::MinusI => Complex::new(0.0, -1.0),
        }
    }

    /// Recognizes an exact unit phase.
    pub fn from_value(z: Complex<f64>) -> Option<Phase> {
        [Phase::One, Phase::I, Phase::MinusOne, Phase::MinusI]
            .into_iter()
            .find(|p| p.value() == z)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        match self {
            Phase::One => Phase::MinusOne,
            Phase::I => Phase::MinusI,
            Phase::MinusOne => Phase::One,
            Phase::MinusI => Phase::I,
        }
    }
}

/// Link matrix entry type: complex for most representations, real for the adjoint.
pub trait LinkCoeff<T: Real>: Copy + Send + Sync {
    /// `acc += self * x`
    fn mac(acc: &mut Cplx<T>, a: Self, x: Cplx<T>);
    /// `acc += conj(self) * x`
    fn mac_conj(acc: &mut Cplx<T>, a: Self, x: Cplx<T>);
}

macro_rules! link_coeffs {
    ($t:ty) => {
        impl LinkCoeff<$t> for $t {
            #[inline(always)]
            fn mac(acc: &mut Cplx<$t>, a: Self, x: Cplx<$t>) {
                rmac(acc, a, x)
            }
            #[inline(always)]
            fn mac_conj(acc: &mut Cplx<$t>, a: Self, x: Cplx<$t>) {
                rmac(acc, a, x)
            }
        }

        impl LinkCoeff<$t> for Complex<$t> {
            #[inline(always)]
            fn mac(acc: &mut Cplx<$t>, a: Self, x: Cplx<$t>) {
                cmac(acc, a, x)
            }
            #[inline(always)]
            fn mac_conj(acc: &mut Cplx<$t>, a: Self, x: Cplx<$t>) {
                cmac_conj(acc, a, x)
            }
        }
    };
}

link_coeffs!(f64);
link_coeffs!(super::counting::Counted);
