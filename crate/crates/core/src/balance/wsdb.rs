use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::BalanceError;
use crate::algebra::{falling_factorial, pow_rational, smith_normal_form, to_big, vector_factorial};
use crate::network::{add, ReactionNetwork, State};
use crate::parser::RateAssignment;

/// A positive equilibrium `x*` stored exactly through its `root`-th power:
/// `power[j] = (x*_j)^root`. Irrational equilibria such as `sqrt(2)` stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub root: u32,
    pub power: Vec<BigRational>,
}

fn exact_root(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.nth_root(n);
    (num_traits::pow(r.clone(), n as usize) == *x).then_some(r)
}

impl Equilibrium {
    pub fn rational(x: Vec<BigRational>) -> Self {
        Equilibrium { root: 1, power: x }
    }

    /// `x*` itself when every coordinate is rational.
    pub fn as_rational(&self) -> Option<Vec<BigRational>> {
        self.power
            .iter()
            .map(|p| {
                let n = exact_root(p.numer(), self.root)?;
                let d = exact_root(p.denom(), self.root)?;
                Some(BigRational::new(n, d))
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.power
            .iter()
            .map(|p| p.to_f64().unwrap_or(f64::NAN).powf(1.0 / f64::from(self.root)))
            .collect()
    }

    /// `((x*)^u)^root`, exact.
    pub fn monomial_power(&self, u: &[i64]) -> BigRational {
        self.power
            .iter()
            .zip(u)
            .filter(|(_, &e)| e != 0)
            .map(|(p, &e)| pow_rational(p, e).expect("positive equilibrium"))
            .fold(BigRational::one(), |acc, x| acc * x)
    }
}

fn ratio(rates: &RateAssignment, fwd: &str, bwd: &str) -> BigRational {
    rates.get(fwd).cloned().expect("complete") / rates.get(bwd).cloned().expect("complete")
}

fn pow_u(x: &BigRational, n: u32) -> BigRational {
    pow_rational(x, i64::from(n)).expect("n >= 0")
}

/// Solves `(x*)^u = k_1(u)/k_1(-u)` over all classes with a Smith normal form,
/// then confirms every channel ratio. `None` when no positive solution exists,
/// which happens exactly when the rates violate detailed balance.
pub fn equilibrium_from_ratios(
    net: &ReactionNetwork,
    rates: &RateAssignment,
) -> Result<Option<Equilibrium>, BalanceError> {
    rates.require_complete(net)?;
    let classes = net.classes();
    let s = net.num_species();
    let rows: Vec<Vec<BigInt>> = classes.iter().map(|c| to_big(&c.u)).collect();
    let kappa: Vec<BigRational> = classes
        .iter()
        .map(|c| ratio(rates, &c.forward_labels[0], &c.backward_labels[0]))
        .collect();
    let snf = smith_normal_form(&rows, s);
    let rank = snf.diagonal.len();
    let m: Vec<BigRational> = snf
        .left
        .iter()
        .map(|row| {
            row.iter().zip(&kappa).fold(BigRational::one(), |acc, (e, k)| {
                acc * pow_rational(k, e.to_i64().expect("small")).expect("positive")
            })
        })
        .collect();
    if m[rank..].iter().any(|v| !v.is_one()) {
        return Ok(None);
    }
    let root = snf
        .diagonal
        .iter()
        .fold(BigInt::one(), |acc, d| acc.lcm(d))
        .to_u32()
        .expect("small elementary divisors");
    let power: Vec<BigRational> = (0..s)
        .map(|j| {
            (0..rank).fold(BigRational::one(), |acc, i| {
                let scale = BigInt::from(root) / &snf.diagonal[i];
                let e = (scale * &snf.right[j][i]).to_i64().expect("small");
                acc * pow_rational(&m[i], e).expect("positive")
            })
        })
        .collect();
    let eq = Equilibrium { root, power };
    for c in classes {
        let xu = eq.monomial_power(&c.u);
        for (f, b) in c.forward_labels.iter().zip(&c.backward_labels) {
            if xu != pow_u(&ratio(rates, f, b), root) {
                return Ok(None);
            }
        }
    }
    Ok(Some(eq))
}

/// Channel-wise detailed balance against `mu(a) = (x*)^a / a!`: the symbolic
/// identity `(x*)^u = k_i(u)/k_i(-u)` for every channel, and the flux balance
/// `mu(a) k_i(u) (a)_{y_i} = mu(a+u) k_i(-u) (a+u)_{y_i+u}` at each sample state.
pub fn check_wsdb_at(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    eq: &Equilibrium,
    states: &[State],
) -> Result<bool, BalanceError> {
    rates.require_complete(net)?;
    let root = eq.root;
    for c in net.classes() {
        let xu = eq.monomial_power(&c.u);
        for (f, b) in c.forward_labels.iter().zip(&c.backward_labels) {
            if xu != pow_u(&ratio(rates, f, b), root) {
                return Ok(false);
            }
        }
    }
    for a in states {
        for c in net.classes() {
            for oriented in [c.clone(), c.negated()] {
                let next = add(a, &oriented.u);
                if next.iter().any(|&x| x < 0) {
                    continue;
                }
                let xu = eq.monomial_power(&oriented.u);
                let fa = BigRational::from_integer(vector_factorial(a));
                let fnext = BigRational::from_integer(vector_factorial(&next));
                for ((y, f), b) in oriented
                    .reactants
                    .iter()
                    .zip(&oriented.forward_labels)
                    .zip(&oriented.backward_labels)
                {
                    let out = BigRational::from_integer(falling_factorial(a, y)?)
                        * rates.get(f).cloned().expect("complete");
                    let back = BigRational::from_integer(falling_factorial(&next, &add(y, &oriented.u))?)
                        * rates.get(b).cloned().expect("complete");
                    // mu(a) out = mu(a+u) back, multiplied through by a!(a+u)! and raised to `root`
                    let lhs = pow_u(&(out * &fnext), root);
                    let rhs = xu.clone() * pow_u(&(back * &fa), root);
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

pub fn check_wsdb(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x_star: &[BigRational],
    states: &[State],
) -> Result<bool, BalanceError> {
    if x_star.len() != net.num_species() || x_star.iter().any(|x| !x.is_positive()) {
        return Ok(false);
    }
    check_wsdb_at(net, rates, &Equilibrium::rational(x_star.to_vec()), states)
}

/// Whether some positive `x*` makes the network channel-wise balanced.
pub fn wsdb_holds(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    states: &[State],
) -> Result<bool, BalanceError> {
    match equilibrium_from_ratios(net, rates)? {
        Some(eq) => check_wsdb_at(net, rates, &eq, states),
        None => Ok(false),
    }
}
