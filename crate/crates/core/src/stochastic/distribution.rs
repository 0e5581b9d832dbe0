use std::collections::HashMap;
use std::io::{self, Write};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::network::State;

/// Probability mass over states of one compatibility class.
#[derive(Debug, Clone)]
pub struct Distribution {
    pub species: Vec<String>,
    pub support: Vec<State>,
    pub mass: Vec<f64>,
    /// Exact masses when the distribution came from a closed form.
    pub exact: Option<Vec<BigRational>>,
    /// Per-species population cap of the truncation box, if any.
    pub truncation: Option<i64>,
    /// Mass on states with some coordinate at the cap.
    pub tail_bound: f64,
    index: HashMap<State, usize>,
}

impl Distribution {
    pub fn new(
        species: Vec<String>,
        support: Vec<State>,
        mass: Vec<f64>,
        exact: Option<Vec<BigRational>>,
        truncation: Option<i64>,
    ) -> Self {
        let index = support
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let tail_bound = match truncation {
            Some(cap) => support
                .iter()
                .zip(&mass)
                .filter(|(s, _)| s.contains(&cap))
                .map(|(_, m)| m)
                .sum::<f64>(),
            None => 0.0,
        };
        Distribution {
            species,
            support,
            mass,
            exact,
            truncation,
            tail_bound,
            index,
        }
    }

    /// Builds float masses from exact ones.
    pub fn from_exact(
        species: Vec<String>,
        support: Vec<State>,
        exact: Vec<BigRational>,
        truncation: Option<i64>,
    ) -> Self {
        let mass = exact.iter().map(|m| m.to_f64().unwrap_or(0.0)).collect();
        Self::new(species, support, mass, Some(exact), truncation)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, state: &[i64]) -> f64 {
        self.index.get(state).map_or(0.0, |&i| self.mass[i])
    }

    pub fn get_exact(&self, state: &[i64]) -> Option<&BigRational> {
        let i = *self.index.get(state)?;
        self.exact.as_ref().map(|e| &e[i])
    }

    pub fn position(&self, state: &[i64]) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Interior local maxima of a one-species distribution ordered by population.
    pub fn local_maxima(&self) -> Vec<i64> {
        let mut pts: Vec<(i64, f64)> = self.support.iter().map(|s| s[0]).zip(self.mass.iter().copied()).collect();
        pts.sort_by_key(|p| p.0);
        let mut out = Vec::new();
        for i in 0..pts.len() {
            let left = if i == 0 { f64::NEG_INFINITY } else { pts[i - 1].1 };
            let right = if i + 1 == pts.len() { f64::NEG_INFINITY } else { pts[i + 1].1 };
            if pts[i].1 > left && pts[i].1 > right {
                out.push(pts[i].0);
            }
        }
        out
    }

    /// Interior local minima of a one-species distribution.
    pub fn local_minima(&self) -> Vec<i64> {
        let mut pts: Vec<(i64, f64)> = self.support.iter().map(|s| s[0]).zip(self.mass.iter().copied()).collect();
        pts.sort_by_key(|p| p.0);
        (1..pts.len().saturating_sub(1))
            .filter(|&i| pts[i].1 < pts[i - 1].1 && pts[i].1 < pts[i + 1].1)
            .map(|i| pts[i].0)
            .collect()
    }

    /// `state_<species>,...,mass[,mass_exact]`, masses with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, with_exact: bool) -> io::Result<()> {
        let mut header: Vec<String> = self.species.iter().map(|s| format!("state_{s}")).collect();
        header.push("mass".into());
        let with_exact = with_exact && self.exact.is_some();
        if with_exact {
            header.push("mass_exact".into());
        }
        writeln!(out, "{}", header.join(","))?;
        for (i, s) in self.support.iter().enumerate() {
            let cells: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            write!(out, "{},{:.16e}", cells.join(","), self.mass[i])?;
            if with_exact {
                let e = &self.exact.as_ref().expect("checked")[i];
                write!(out, ",{}/{}", e.numer(), e.denom())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Two columns `<species>,mass` for plotting a one-species distribution.
    pub fn write_plot_data<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{},mass", self.species.join("_"))?;
        for (s, m) in self.support.iter().zip(&self.mass) {
            let label: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{m:.16e}", label.join(" "))?;
        }
        Ok(())
    }
}

/// `(1/2) sum |p - q|` over the union of supports.
pub fn total_variation(p: &Distribution, q: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (s, &m) in p.support.iter().zip(&p.mass) {
        sum += (m - q.get(s)).abs();
    }
    for (s, &m) in q.support.iter().zip(&q.mass) {
        if p.position(s).is_none() {
            sum += m;
        }
    }
    sum / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(points: &[(i64, f64)]) -> Distribution {
        Distribution::new(
            vec!["A".into()],
            points.iter().map(|p| vec![p.0]).collect(),
            points.iter().map(|p| p.1).collect(),
            None,
            None,
        )
    }

    #[test]
    fn tv_distance() {
        let p = dist(&[(0, 0.5), (1, 0.5)]);
        let q = dist(&[(1, 0.5), (2, 0.5)]);
        assert!((total_variation(&p, &q) - 0.5).abs() < 1e-15);
        assert_eq!(total_variation(&p, &p), 0.0);
    }

    #[test]
    fn modes() {
        let p = dist(&[(0, 0.1), (1, 0.3), (2, 0.1), (3, 0.2), (4, 0.3)]);
        assert_eq!(p.local_maxima(), vec![1, 4]);
        assert_eq!(p.local_minima(), vec![2]);
    }

    #[test]
    fn csv_layout() {
        let d = Distribution::from_exact(
            vec!["A".into(), "B".into()],
            vec![vec![0, 1], vec![1, 0]],
            vec![BigRational::new(1.into(), 3.into()), BigRational::new(2.into(), 3.into())],
            Some(1),
        );
        let mut buf = Vec::new();
        d.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("state_A,state_B,mass,mass_exact"));
        assert_eq!(lines.next(), Some("0,1,3.3333333333333331e-1,1/3"));
        assert!((d.tail_bound - 1.0).abs() < 1e-15);
    }
}
