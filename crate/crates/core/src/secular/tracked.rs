//! Complex values carrying a running absolute-error bound and the magnitude
//! of the intermediates that bound is proportional to (both as log2).

use rug::Float;

use crate::bigfloat::{log2_sum, BigComplex};
use crate::specfun::Estimate;

#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub v: BigComplex,
    /// log2 of the absolute error bound.
    pub err: f64,
    /// log2 of the largest intermediate magnitude.
    pub scale: f64,
}

fn rounding(v: &BigComplex) -> f64 {
    v.log2_abs() - v.precision_bits() as f64 + 1.0
}

impl Tracked {
    pub fn from_estimate(e: Estimate<BigComplex>) -> Self {
        let mag = e.value.log2_abs();
        Tracked {
            err: mag + e.lost_bits - e.prec as f64,
            scale: e.scale_log2.max(mag),
            v: e.value,
        }
    }

    pub fn from_real_estimate(e: Estimate<Float>) -> Self {
        let prec = e.prec;
        Self::from_estimate(e.map(|v| BigComplex::from_floats(v, Float::new(prec), prec)))
    }

    /// An input known to the working precision.
    pub fn exact(v: BigComplex) -> Self {
        let mag = v.log2_abs();
        Tracked {
            err: mag - v.precision_bits() as f64,
            scale: mag,
            v,
        }
    }

    pub fn mul(&self, o: &Tracked) -> Tracked {
        let v = &self.v * &o.v;
        let (ma, mb) = (self.v.log2_abs(), o.v.log2_abs());
        let err = log2_sum(log2_sum(ma + o.err, mb + self.err), rounding(&v));
        let scale = (self.scale + mb).max(ma + o.scale);
        Tracked { v, err, scale }
    }

    pub fn add(&self, o: &Tracked) -> Tracked {
        let v = &self.v + &o.v;
        let err = log2_sum(log2_sum(self.err, o.err), rounding(&v));
        Tracked {
            v,
            err,
            scale: self.scale.max(o.scale),
        }
    }

    pub fn sub(&self, o: &Tracked) -> Tracked {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Tracked {
        Tracked {
            v: -&self.v,
            err: self.err,
            scale: self.scale,
        }
    }

    /// Real part, keeping the complex error bound.
    pub fn re(&self) -> Tracked {
        let prec = self.v.precision_bits();
        Tracked {
            v: BigComplex::from_floats(self.v.re_f().clone(), Float::new(prec), prec),
            err: self.err,
            scale: self.scale,
        }
    }

    /// Imaginary part as a real value.
    pub fn im(&self) -> Tracked {
        let prec = self.v.precision_bits();
        Tracked {
            v: BigComplex::from_floats(self.v.im_f().clone(), Float::new(prec), prec),
            err: self.err,
            scale: self.scale,
        }
    }

    /// log2(error / scale); very negative means accurate.
    pub fn rel_scale_err(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.err - self.scale
    }
}
