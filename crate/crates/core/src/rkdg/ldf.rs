//! Locally divergence-free vector basis up to degree 3.
//!
//! Elements are stored exactly: a scale factor `sqrt(scale_sq)` with rational
//! `scale_sq`, times two polynomials in `x, y` on `[-1, 1]^2` with rational
//! monomial coefficients. The basis is orthonormal under the mean inner
//! product `(1/4) * integral over [-1, 1]^2 of b_i . b_j`.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

fn r(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Polynomial as a list of `(power of x, power of y, coefficient)`.
pub type Polynomial = Vec<(u32, u32, Rational)>;

#[derive(Clone, Debug)]
pub struct LdfElement {
    pub scale_sq: Rational,
    pub bx: Polynomial,
    pub by: Polynomial,
}

impl LdfElement {
    fn new(scale_sq: Rational, bx: Polynomial, by: Polynomial) -> Self {
        Self { scale_sq, bx, by }
    }

    pub fn scale(&self) -> f64 {
        (*self.scale_sq.numer() as f64 / *self.scale_sq.denom() as f64).sqrt()
    }
}

fn table() -> Vec<LdfElement> {
    let one = r(1, 1);
    vec![
        // degree 0 and 1
        LdfElement::new(one, vec![(0, 0, one)], vec![]),
        LdfElement::new(one, vec![], vec![(0, 0, one)]),
        LdfElement::new(r(3, 1), vec![(0, 1, one)], vec![]),
        LdfElement::new(r(3, 1), vec![], vec![(1, 0, one)]),
        LdfElement::new(r(3, 2), vec![(1, 0, one)], vec![(0, 1, -one)]),
        // degree 2
        LdfElement::new(
            r(30, 1),
            vec![(2, 0, r(3, 12)), (0, 0, r(-1, 12))],
            vec![(1, 1, r(-1, 2))],
        ),
        LdfElement::new(
            r(30, 1),
            vec![(1, 1, r(-1, 2))],
            vec![(0, 2, r(3, 12)), (0, 0, r(-1, 12))],
        ),
        LdfElement::new(r(5, 1), vec![(0, 2, r(3, 2)), (0, 0, r(-1, 2))], vec![]),
        LdfElement::new(r(5, 1), vec![], vec![(2, 0, r(3, 2)), (0, 0, r(-1, 2))]),
        // degree 3
        LdfElement::new(
            r(42 * 83, 166 * 166),
            vec![(3, 0, r(5, 1)), (1, 0, r(-4, 1))],
            vec![(2, 1, r(-15, 1)), (0, 1, r(4, 1))],
        ),
        LdfElement::new(
            r(30, 16),
            vec![(2, 1, r(3, 1)), (0, 1, r(-1, 1))],
            vec![(1, 2, r(-3, 1)), (1, 0, r(1, 1))],
        ),
        LdfElement::new(r(7, 4), vec![(0, 3, r(5, 1)), (0, 1, r(-3, 1))], vec![]),
        LdfElement::new(r(7, 4), vec![], vec![(3, 0, r(5, 1)), (1, 0, r(-3, 1))]),
        LdfElement::new(
            r(165585, 1824 * 1824),
            vec![(3, 0, r(-56, 83)), (1, 2, r(-24, 1)), (1, 0, r(576, 83))],
            vec![(0, 3, r(8, 1)), (2, 1, r(168, 83)), (0, 1, r(-576, 83))],
        ),
    ]
}

/// Derivative of a polynomial in `x` (`axis = 0`) or `y` (`axis = 1`).
pub fn derivative(p: &Polynomial, axis: usize) -> Polynomial {
    p.iter()
        .filter_map(|&(a, b, c)| {
            let k = if axis == 0 { a } else { b };
            if k == 0 {
                return None;
            }
            let c = c * Rational::from_integer(k as i128);
            Some(if axis == 0 { (a - 1, b, c) } else { (a, b - 1, c) })
        })
        .collect()
}

/// Sum like terms and drop zeros.
pub fn simplify(p: &Polynomial) -> Polynomial {
    let mut out: Polynomial = Vec::new();
    for &(a, b, c) in p {
        match out.iter_mut().find(|t| t.0 == a && t.1 == b) {
            Some(t) => t.2 += c,
            None => out.push((a, b, c)),
        }
    }
    out.retain(|t| t.2 != Rational::from_integer(0));
    out
}

/// `(1/4) * integral over [-1, 1]^2 of p * q`, exactly.
fn mean_product(p: &Polynomial, q: &Polynomial) -> Rational {
    let mut acc = Rational::from_integer(0);
    for &(a1, b1, c1) in p {
        for &(a2, b2, c2) in q {
            let (a, b) = (a1 + a2, b1 + b2);
            if a % 2 == 1 || b % 2 == 1 {
                continue;
            }
            // Mean of x^a over [-1, 1] is 1/(a+1) for even a.
            acc += c1 * c2 * r(1, (a as i128 + 1) * (b as i128 + 1));
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct LdfBasis {
    degree: usize,
    elements: Vec<LdfElement>,
    /// Float copies: per element, `(a, b, c * scale)` for each component.
    float_bx: Vec<Vec<(i32, i32, f64)>>,
    float_by: Vec<Vec<(i32, i32, f64)>>,
}

impl LdfBasis {
    pub fn new(n: usize) -> Result<Self> {
        let dim = crate::grid::ldf_dimension(n)?;
        let mut elements = table();
        elements.truncate(dim);
        let to_float = |p: &Polynomial, s: f64| -> Vec<(i32, i32, f64)> {
            p.iter()
                .map(|&(a, b, c)| {
                    (a as i32, b as i32, s * (*c.numer() as f64) / (*c.denom() as f64))
                })
                .collect()
        };
        let float_bx = elements.iter().map(|e| to_float(&e.bx, e.scale())).collect();
        let float_by = elements.iter().map(|e| to_float(&e.by, e.scale())).collect();
        Ok(Self {
            degree: n,
            elements,
            float_bx,
            float_by,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[LdfElement] {
        &self.elements
    }

    /// `divergence(k)` as an exact polynomial; the zero polynomial is empty.
    pub fn divergence(&self, k: usize) -> Polynomial {
        let e = &self.elements[k];
        let mut d = derivative(&e.bx, 0);
        d.extend(derivative(&e.by, 1));
        simplify(&d)
    }

    /// Exact Gram matrix entry without the scale factors:
    /// `mean(b_i . b_j) = sqrt(s_i s_j) * raw_gram(i, j)`.
    pub fn raw_gram(&self, i: usize, j: usize) -> Rational {
        let (a, b) = (&self.elements[i], &self.elements[j]);
        mean_product(&a.bx, &b.bx) + mean_product(&a.by, &b.by)
    }

    /// Floating-point Gram matrix under the mean inner product.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        let to_f = |q: Rational| *q.numer() as f64 / *q.denom() as f64;
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let s = (to_f(self.elements[i].scale_sq) * to_f(self.elements[j].scale_sq)).sqrt();
                        s * to_f(self.raw_gram(i, j))
                    })
                    .collect()
            })
            .collect()
    }

    /// Values and first derivatives of every element at `(x, y)` in
    /// `[-1, 1]^2`: `[b1, b2, d1/dx, d1/dy, d2/dx, d2/dy]`.
    pub fn eval(&self, x: f64, y: f64, out: &mut [[f64; 6]]) {
        let pw = |v: f64, k: i32| if k <= 0 { 1.0 } else { v.powi(k) };
        let accumulate = |terms: &[(i32, i32, f64)]| {
            let mut v = [0.0; 3];
            for &(a, b, c) in terms {
                v[0] += c * pw(x, a) * pw(y, b);
                if a > 0 {
                    v[1] += c * a as f64 * pw(x, a - 1) * pw(y, b);
                }
                if b > 0 {
                    v[2] += c * b as f64 * pw(x, a) * pw(y, b - 1);
                }
            }
            v
        };
        for (k, o) in out.iter_mut().enumerate().take(self.len()) {
            let p = accumulate(&self.float_bx[k]);
            let q = accumulate(&self.float_by[k]);
            *o = [p[0], q[0], p[1], p[2], q[1], q[2]];
        }
    }
}

/// Error unless `n` has a tabulated basis.
pub fn check_degree(n: usize) -> Result<()> {
    if n > 3 {
        Err(Error::UnsupportedOrder(n))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(LdfBasis::new(1).unwrap().len(), 5);
        assert_eq!(LdfBasis::new(2).unwrap().len(), 9);
        assert_eq!(LdfBasis::new(3).unwrap().len(), 14);
        assert!(matches!(LdfBasis::new(4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn every_element_is_exactly_divergence_free() {
        let b = LdfBasis::new(3).unwrap();
        for k in 0..b.len() {
            assert!(b.divergence(k).is_empty(), "element {k}");
        }
    }

    #[test]
    fn exact_orthonormality() {
        let b = LdfBasis::new(3).unwrap();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let g = b.raw_gram(i, j);
                if i == j {
                    assert_eq!(g * b.elements()[i].scale_sq, r(1, 1), "element {i}");
                } else {
                    assert_eq!(g, r(0, 1), "pair {i} {j}");
                }
            }
        }
    }

    #[test]
    fn float_derivatives_match_finite_differences() {
        let b = LdfBasis::new(3).unwrap();
        let mut v0 = vec![[0.0; 6]; 14];
        let mut vx = vec![[0.0; 6]; 14];
        let mut vy = vec![[0.0; 6]; 14];
        let (x, y, h) = (0.31, -0.47, 1e-6);
        b.eval(x, y, &mut v0);
        let mut a = vec![[0.0; 6]; 14];
        b.eval(x + h, y, &mut vx);
        b.eval(x - h, y, &mut a);
        for k in 0..14 {
            assert!(((vx[k][0] - a[k][0]) / (2.0 * h) - v0[k][2]).abs() < 1e-6);
            assert!(((vx[k][1] - a[k][1]) / (2.0 * h) - v0[k][4]).abs() < 1e-6);
        }
        b.eval(x, y + h, &mut vy);
        b.eval(x, y - h, &mut a);
        for k in 0..14 {
            assert!(((vy[k][0] - a[k][0]) / (2.0 * h) - v0[k][3]).abs() < 1e-6);
            assert!(((vy[k][1] - a[k][1]) / (2.0 * h) - v0[k][5]).abs() < 1e-6);
            assert!((v0[k][2] + v0[k][5]).abs() < 1e-13);
        }
    }
}
