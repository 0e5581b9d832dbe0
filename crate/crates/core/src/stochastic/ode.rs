use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::StochasticError;
use crate::algebra::pow_rational;
use crate::network::{sub, ReactionNetwork};
use crate::parser::{IncompleteRates, RateAssignment};

struct Pair {
    reactant: Vec<i64>,
    product: Vec<i64>,
    u: Vec<f64>,
    kf: f64,
    kb: f64,
}

/// Rates converted to floats once, for repeated vector-field evaluation.
pub struct FloatRates {
    pairs: Vec<Pair>,
    s: usize,
}

fn monomial(x: &[f64], y: &[i64]) -> f64 {
    x.iter()
        .zip(y)
        .filter(|(_, &e)| e != 0)
        .map(|(xi, &e)| xi.powi(e as i32))
        .product()
}

impl FloatRates {
    pub fn new(net: &ReactionNetwork, rates: &RateAssignment) -> Result<Self, IncompleteRates> {
        rates.require_complete(net)?;
        let pairs = net
            .reactions()
            .iter()
            .map(|r| Pair {
                reactant: r.reactant.coefficients.clone(),
                product: r.product.coefficients.clone(),
                u: sub(&r.product.coefficients, &r.reactant.coefficients)
                    .into_iter()
                    .map(|x| x as f64)
                    .collect(),
                kf: rates.get_f64(&r.forward_label).expect("complete"),
                kb: rates.get_f64(&r.backward_label).expect("complete"),
            })
            .collect();
        Ok(FloatRates {
            pairs,
            s: net.num_species(),
        })
    }

    pub fn rhs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.s];
        for p in &self.pairs {
            let flux = p.kf * monomial(x, &p.reactant) - p.kb * monomial(x, &p.product);
            for (o, u) in out.iter_mut().zip(&p.u) {
                *o += flux * u;
            }
        }
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let s = self.s;
        let mut jac = DMatrix::zeros(s, s);
        let d_monomial = |y: &[i64], j: usize| -> f64 {
            if y[j] == 0 {
                return 0.0;
            }
            let mut v = y[j] as f64 * x[j].powi(y[j] as i32 - 1);
            for (k, (&xk, &e)) in x.iter().zip(y).enumerate() {
                if k != j && e != 0 {
                    v *= xk.powi(e as i32);
                }
            }
            v
        };
        for p in &self.pairs {
            for j in 0..s {
                let dflux = p.kf * d_monomial(&p.reactant, j) - p.kb * d_monomial(&p.product, j);
                for i in 0..s {
                    jac[(i, j)] += p.u[i] * dflux;
                }
            }
        }
        jac
    }
}

/// `dx/dt = sum_pairs (k_f x^y - k_b x^y') (y' - y)`.
pub fn deterministic_rhs(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x: &[f64],
) -> Result<Vec<f64>, IncompleteRates> {
    Ok(FloatRates::new(net, rates)?.rhs(x))
}

pub fn jacobian(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x: &[f64],
) -> Result<DMatrix<f64>, IncompleteRates> {
    Ok(FloatRates::new(net, rates)?.jacobian(x))
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Residual<'a> {
    field: &'a FloatRates,
    laws: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Residual<'_> {
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.field.rhs(x);
        for (law, t) in self.laws.iter().zip(&self.targets) {
            g.push(law.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>() - t);
        }
        g
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let s = x.len();
        let j = self.field.jacobian(x);
        let mut full = DMatrix::zeros(s + self.laws.len(), s);
        full.view_mut((0, 0), (s, s)).copy_from(&j);
        for (r, law) in self.laws.iter().enumerate() {
            for (c, v) in law.iter().enumerate() {
                full[(s + r, c)] = *v;
            }
        }
        full
    }
}

/// Explicit Euler with steps small enough to keep every coordinate positive.
fn integrate(field: &FloatRates, x: &mut [f64], steps: usize) {
    for _ in 0..steps {
        let f = field.rhs(x);
        let mut h: f64 = 1.0;
        for (xi, fi) in x.iter().zip(&f) {
            if *fi < 0.0 {
                h = h.min(0.1 * xi / -fi);
            }
        }
        let scale = sup_norm(&f);
        if scale > 0.0 {
            h = h.min(0.1 * sup_norm(x).max(1.0) / scale);
        }
        for (xi, fi) in x.iter_mut().zip(&f) {
            *xi += h * fi;
        }
    }
}

/// Damped Newton on the vector field plus the conservation laws of `x0`'s
/// class, with bursts of forward integration when a step cannot reduce the
/// residual while staying positive.
pub fn find_positive_steady_state(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, StochasticError> {
    let field = FloatRates::new(net, rates)?;
    let laws: Vec<Vec<f64>> = net
        .conservation_laws()
        .into_iter()
        .map(|l| l.into_iter().map(|c| c as f64).collect())
        .collect();
    let targets = laws
        .iter()
        .map(|l| l.iter().zip(x0).map(|(c, x)| c * x).sum())
        .collect();
    let residual = Residual {
        field: &field,
        laws,
        targets,
    };
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        let g = residual.eval(&x);
        let norm = sup_norm(&g);
        if sup_norm(&field.rhs(&x)) <= tol && norm <= tol.max(1e-9 * sup_norm(&x)) {
            return Ok(x);
        }
        let jac = residual.jacobian(&x);
        let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| -v));
        let step = jac
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .ok()
            .filter(|d| d.iter().all(|v| v.is_finite()));
        let mut accepted = false;
        if let Some(step) = step {
            let mut lambda = 1.0;
            while lambda > 1e-10 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
                if trial.iter().all(|&v| v > 0.0) && sup_norm(&residual.eval(&trial)) < norm {
                    x = trial;
                    accepted = true;
                    break;
                }
                lambda /= 2.0;
            }
        }
        if !accepted {
            integrate(&field, &mut x, 200);
        }
    }
    Err(StochasticError::NoConvergence(max_iter))
}

/// Inflow equals outflow at every complex, within relative tolerance `tol`.
pub fn check_complex_balance(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x: &[f64],
    tol: f64,
) -> Result<bool, IncompleteRates> {
    let field = FloatRates::new(net, rates)?;
    for c in net.complexes() {
        let y = &c.coefficients;
        let (mut out, mut inflow) = (0.0, 0.0);
        for p in &field.pairs {
            if p.reactant == *y {
                out += p.kf * monomial(x, y);
                inflow += p.kb * monomial(x, &p.product);
            }
            if p.product == *y {
                out += p.kb * monomial(x, y);
                inflow += p.kf * monomial(x, &p.reactant);
            }
        }
        let scale = out.abs().max(inflow.abs()).max(f64::MIN_POSITIVE);
        if (out - inflow).abs() > tol * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

fn monomial_exact(x: &[BigRational], y: &[i64]) -> BigRational {
    x.iter()
        .zip(y)
        .filter(|(_, &e)| e != 0)
        .fold(BigRational::one(), |acc, (xi, &e)| acc * pow_rational(xi, e).expect("positive"))
}

pub fn check_complex_balance_exact(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x: &[BigRational],
) -> Result<bool, IncompleteRates> {
    rates.require_complete(net)?;
    let k = |l: &str| rates.get(l).cloned().expect("complete");
    for c in net.complexes() {
        let y = &c.coefficients;
        let mut net_flow = BigRational::zero();
        for r in net.reactions() {
            if r.reactant == *c {
                net_flow += k(&r.forward_label) * monomial_exact(x, y);
                net_flow -= k(&r.backward_label) * monomial_exact(x, &r.product.coefficients);
            }
            if r.product == *c {
                net_flow += k(&r.backward_label) * monomial_exact(x, y);
                net_flow -= k(&r.forward_label) * monomial_exact(x, &r.reactant.coefficients);
            }
        }
        if !net_flow.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
