//! Simultaneous root finding by Aberth–Ehrlich iteration.

use num_complex::Complex;

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A pole or zero in the complex plane.
pub type ComplexRoot<T> = Complex<T>;

const MAX_ITERATIONS: usize = 500;
const POLISH_STEPS: usize = 3;

fn horner<T: Scalar>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

/// Value and derivative in one pass.
fn horner2<T: Scalar>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

impl<T: Scalar> Polynomial<T> {
    /// Evaluates at a complex point.
    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        let coeffs: Vec<_> = self.coeffs().iter().map(|&c| Complex::new(c, T::zero())).collect();
        horner(&coeffs, z)
    }

    /// Residual bound used to accept a root: `tol * max|coeff| * max(1, |r|)^deg`.
    pub fn residual_scale(&self, r: Complex<T>) -> T {
        let cmax = self.coeffs().iter().fold(T::zero(), |m, c| m.max(c.abs()));
        cmax * T::one().max(r.norm()).powi(self.degree() as i32)
    }

    /// All complex roots, with multiplicity, sorted by real then imaginary part.
    ///
    /// Roots of real polynomials come back in exact conjugate pairs; roots
    /// within `sqrt(eps)` of the real axis are snapped onto it.
    pub fn roots(&self) -> Result<Vec<ComplexRoot<T>>> {
        if self.degree() == 0 {
            return Err(Error::InvalidPolynomial(format!(
                "root finding needs degree >= 1, got constant {:?}",
                self.coeffs()[0]
            )));
        }
        if self.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }

        let zero = Complex::new(T::zero(), T::zero());
        let mut roots = Vec::with_capacity(self.degree());

        // Exact zero roots deflate without error.
        let shift = self.coeffs().iter().take_while(|c| c.is_zero()).count();
        roots.extend(std::iter::repeat_n(zero, shift));
        let reduced: Vec<T> = self.coeffs()[shift..].to_vec();

        match reduced.len() - 1 {
            0 => {}
            1 => roots.push(Complex::new(-reduced[0] / reduced[1], T::zero())),
            _ => roots.extend(aberth(&reduced)?),
        }

        let mut roots = pair_conjugates(self, roots);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

fn initial_guesses<T: Scalar>(monic: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = monic.len() - 1;
    let nf = T::from_usize(n).unwrap();
    // Radius from the geometric mean of root magnitudes, bounded away from 0.
    let a0 = monic[0].norm();
    let radius = if a0 > T::zero() { a0.powf(T::one() / nf) } else { T::one() };
    let centre = -monic[n - 1] / Complex::new(nf, T::zero());
    // An irrational offset keeps guesses off any symmetry axis of the input.
    let offset = T::lit(0.4);
    (0..n)
        .map(|k| {
            let angle = T::TAU() * T::from_usize(k).unwrap() / nf + offset;
            centre + Complex::from_polar(radius, angle)
        })
        .collect()
}

fn aberth<T: Scalar>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let lead = *coeffs.last().unwrap();
    let monic: Vec<Complex<T>> = coeffs.iter().map(|&c| Complex::new(c / lead, T::zero())).collect();
    let mut z = initial_guesses(&monic);
    let n = z.len();
    let eps = T::epsilon();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = T::zero();
        for i in 0..n {
            let (p, dp) = horner2(&monic, z[i]);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let repulsion = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / (T::one() + z[i].norm()));
        }
        if max_step <= eps * T::lit(4.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        // Clusters of multiple roots stall around sqrt(eps) accuracy; accept
        // them when the residual is already at rounding level.
        let ok = z.iter().all(|&r| {
            let scale = monic.iter().fold(T::zero(), |m, c| m.max(c.norm())) * T::one().max(r.norm()).powi(n as i32);
            horner(&monic, r).norm() <= T::lit(1e4) * eps * scale
        });
        if !ok {
            return Err(Error::NoConvergence(MAX_ITERATIONS));
        }
    }

    // Newton polish against the original (non-normalized) coefficients.
    let full: Vec<Complex<T>> = coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect();
    for r in z.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = horner2(&full, *r);
            if dp.norm() == T::zero() {
                break;
            }
            let cand = *r - p / dp;
            if horner(&full, cand).norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Snaps near-real roots onto the axis and averages conjugate partners so the
/// output is exactly conjugate-symmetric.
fn pair_conjugates<T: Scalar>(p: &Polynomial<T>, roots: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let snap = T::epsilon().sqrt();
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for r in roots {
        let on_axis = Complex::new(r.re, T::zero());
        let near = r.im.abs() <= snap * T::one().max(r.norm());
        if r.im == T::zero()
            || (near
                && p.eval_complex(on_axis).norm() <= p.eval_complex(r).norm().max(snap * snap * p.residual_scale(r)))
        {
            real.push(on_axis);
        } else if r.im > T::zero() {
            upper.push(r);
        } else {
            lower.push(r);
        }
    }
    if upper.len() != lower.len() {
        // Unpaired complex roots cannot happen for exact real input; return
        // them untouched rather than inventing partners.
        real.extend(upper);
        real.extend(lower);
        return real;
    }
    let mut out = real;
    let mut used = vec![false; lower.len()];
    for u in upper {
        let target = u.conj();
        let (j, _) = lower
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, l)| (j, (l - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("same count");
        used[j] = true;
        let l = lower[j];
        let two = T::lit(2.0);
        let re = (u.re + l.re) / two;
        let im = (u.im - l.im) / two;
        out.push(Complex::new(re, im));
        out.push(Complex::new(re, -im));
    }
    out
}
