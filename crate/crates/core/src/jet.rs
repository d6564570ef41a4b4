//! First-order jets: value plus all first partial derivatives.
//!
//! A `Jet` carries a real value and a gradient with respect to the seed
//! variables of the active evaluation. Arithmetic follows the product and
//! chain rules exactly, so evaluating a field on seeded jets yields the
//! exact first derivatives of everything built from `+ - * /`, `sin`,
//! `cos`, `exp`, `ln`, `sqrt`, `acos` and integer powers.
//!
//! A jet with an empty gradient acts as a constant: binary operations
//! broadcast it against the other operand's gradient length.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: Vec<f64>,
}

impl Jet {
    /// A constant with `n` zero partials.
    pub fn constant(v: f64, n: usize) -> Jet {
        Jet { v, d: vec![0.0; n] }
    }

    /// A constant with no partials (broadcasts against anything).
    pub fn scalar(v: f64) -> Jet {
        Jet { v, d: Vec::new() }
    }

    /// The `i`-th coordinate variable of an `n`-dimensional seed.
    pub fn variable(v: f64, i: usize, n: usize) -> Jet {
        let mut d = vec![0.0; n];
        d[i] = 1.0;
        Jet { v, d }
    }

    pub fn n_partials(&self) -> usize {
        self.d.len()
    }

    /// Lift a univariate function by its value and derivative at `self.v`.
    pub fn chain(&self, f: f64, df: f64) -> Jet {
        Jet {
            v: f,
            d: self.d.iter().map(|x| df * x).collect(),
        }
    }

    pub fn sin(&self) -> Jet {
        self.chain(self.v.sin(), self.v.cos())
    }

    pub fn cos(&self) -> Jet {
        self.chain(self.v.cos(), -self.v.sin())
    }

    pub fn exp(&self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e)
    }

    pub fn ln(&self) -> Jet {
        self.chain(self.v.ln(), 1.0 / self.v)
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }

    /// arccos, differentiable on (-1, 1).
    pub fn acos(&self) -> Jet {
        self.chain(self.v.acos(), -1.0 / (1.0 - self.v * self.v).sqrt())
    }

    pub fn atan2(&self, x: &Jet) -> Jet {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let y = self;
        let r2 = x.v * x.v + y.v * y.v;
        let mut out = binary(y, x, |a, b| a.atan2(b), x.v / r2, -y.v / r2);
        out.v = y.v.atan2(x.v);
        out
    }

    pub fn powi(&self, k: i32) -> Jet {
        match k {
            0 => Jet::constant(1.0, self.d.len()),
            1 => self.clone(),
            _ => self.chain(self.v.powi(k), k as f64 * self.v.powi(k - 1)),
        }
    }

    pub fn powf(&self, e: f64) -> Jet {
        self.chain(self.v.powf(e), e * self.v.powf(e - 1.0))
    }

    pub fn recip(&self) -> Jet {
        self.chain(1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn neg_ref(&self) -> Jet {
        Jet {
            v: -self.v,
            d: self.d.iter().map(|x| -x).collect(),
        }
    }
}

/// Combine two jets with value `f(a,b)` and partials `fa*da + fb*db`,
/// broadcasting empty gradients as constants.
fn binary(a: &Jet, b: &Jet, f: fn(f64, f64) -> f64, fa: f64, fb: f64) -> Jet {
    let v = f(a.v, b.v);
    let d = match (a.d.is_empty(), b.d.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.d.iter().map(|x| fa * x).collect(),
        (true, false) => b.d.iter().map(|x| fb * x).collect(),
        (false, false) => {
            debug_assert_eq!(a.d.len(), b.d.len(), "jet gradient length mismatch");
            a.d.iter().zip(&b.d).map(|(x, y)| fa * x + fb * y).collect()
        }
    };
    Jet { v, d }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $f:expr, $fa:expr, $fb:expr) => {
        impl $trait for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let fa = $fa(self, rhs);
                let fb = $fb(self, rhs);
                binary(self, rhs, $f, fa, fb)
            }
        }
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                self.$method(&Jet::scalar(rhs))
            }
        }
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(&Jet::scalar(rhs))
            }
        }
        impl $trait<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&Jet::scalar(self)).$method(rhs)
            }
        }
        impl $trait<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&Jet::scalar(self)).$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a + b, |_a: &Jet, _b: &Jet| 1.0, |_a: &Jet, _b: &Jet| 1.0);
jet_binop!(Sub, sub, |a, b| a - b, |_a: &Jet, _b: &Jet| 1.0, |_a: &Jet, _b: &Jet| -1.0);
jet_binop!(Mul, mul, |a, b| a * b, |_a: &Jet, b: &Jet| b.v, |a: &Jet, _b: &Jet| a.v);
jet_binop!(
    Div,
    div,
    |a, b| a / b,
    |_a: &Jet, b: &Jet| 1.0 / b.v,
    |a: &Jet, b: &Jet| -a.v / (b.v * b.v)
);

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.neg_ref()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.neg_ref()
    }
}

/// Seed a point with identity partials: the `i`-th output is `x_i` as the
/// `i`-th variable of a `p.len()`-dimensional jet.
pub fn seed_point(p: &[f64]) -> Vec<Jet> {
    let n = p.len();
    p.iter()
        .enumerate()
        .map(|(i, &v)| Jet::variable(v, i, n))
        .collect()
}

/// Lift a point to constant jets with `n` zero partials.
pub fn constant_point(p: &[f64], n: usize) -> Vec<Jet> {
    p.iter().map(|&v| Jet::constant(v, n)).collect()
}

/// Extract plain values.
pub fn values(jets: &[Jet]) -> Vec<f64> {
    jets.iter().map(|j| j.v).collect()
}
