//! Extended-precision reference for the Bessel functions.

// each test binary uses a different subset
#![allow(dead_code)]

/// Unevaluated sum `hi + lo`, about 106 bits.
#[derive(Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from(-q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `sum_k (z/2)^{2k+nu} / (k! (k+nu)!)` in double-double. All terms are
/// positive, so there is no cancellation.
pub fn series(z: f64, nu: u32) -> Dd {
    let half = Dd::from(z).div(Dd::from(2.0));
    let q = half.mul(half);
    let mut term = if nu == 0 { Dd::from(1.0) } else { half };
    let mut sum = term;
    for k in 1..500u32 {
        term = term.mul(q).div(Dd::from((k * (k + nu)) as f64));
        sum = sum.add(term);
        if term.hi < 1e-34 * sum.hi {
            break;
        }
    }
    sum
}

/// `(I0(z), I1(z), I1(z)/z)` rounded to f64.
pub fn bessel_reference(z: f64) -> (f64, f64, f64) {
    let i1 = series(z, 1);
    (series(z, 0).to_f64(), i1.to_f64(), i1.div(Dd::from(z)).to_f64())
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}
