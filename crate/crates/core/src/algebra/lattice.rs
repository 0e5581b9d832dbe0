use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{to_big, AlgebraError};

/// Result of unimodular row reduction: `transform * input = rows`.
///
/// The first `rank()` rows are in Hermite normal form (positive pivots, entries
/// above each pivot reduced into `[0, pivot)`); the remaining rows are zero and
/// the matching rows of `transform` span the integer left kernel of the input.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub transform: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows[..self.rank()]
    }

    pub fn left_kernel(&self) -> &[Vec<BigInt>] {
        &self.transform[self.rank()..]
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// `mat[dst] -= q * mat[src]`
fn sub_row(mat: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src_row = mat[src].clone();
    for (d, s) in mat[dst].iter_mut().zip(src_row) {
        *d -= q * s;
    }
}

fn negate_row(mat: &mut [Vec<BigInt>], i: usize) {
    for x in mat[i].iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Row-reduces `rows` (each of length `ncols`) to Hermite normal form.
pub fn row_echelon(rows: &[Vec<BigInt>], ncols: usize) -> Echelon {
    let m = rows.len();
    let mut a = rows.to_vec();
    let mut t = identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        if (r..m).all(|i| a[i][col].is_zero()) {
            continue;
        }
        loop {
            let p = (r..m)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()))
                .expect("column has a nonzero entry");
            a.swap(r, p);
            t.swap(r, p);
            let mut cleared = true;
            for i in r + 1..m {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                sub_row(&mut a, i, r, &q);
                sub_row(&mut t, i, r, &q);
                if !a[i][col].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }
        if a[r][col].is_negative() {
            negate_row(&mut a, r);
            negate_row(&mut t, r);
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            sub_row(&mut a, i, r, &q);
            sub_row(&mut t, i, r, &q);
        }
        pivots.push(col);
        r += 1;
    }
    Echelon {
        rows: a,
        transform: t,
        pivots,
    }
}

/// Hermite normal form basis (nonzero rows only) of the lattice spanned by `rows`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    row_echelon(rows, ncols).basis().to_vec()
}

/// Rank over the rationals.
pub fn matrix_rank(rows: &[Vec<i64>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let big: Vec<_> = rows.iter().map(|r| to_big(r)).collect();
    row_echelon(&big, ncols).rank()
}

pub(crate) fn kernel_of_big(columns: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let n = columns.len();
    if n == 0 {
        return Vec::new();
    }
    let e = row_echelon(columns, dim);
    hermite_normal_form(e.left_kernel(), n)
}

/// Basis of `{alpha in Z^n : sum_i alpha_i * columns[i] = 0}`, in Hermite normal form.
///
/// Empty when the columns are linearly independent.
pub fn integer_kernel_basis(columns: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let dim = columns.first().map_or(0, Vec::len);
    let big: Vec<_> = columns.iter().map(|c| to_big(c)).collect();
    kernel_of_big(&big, dim)
}

fn transpose(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Basis of `span_Q(vectors) ∩ Z^dim` (the saturation of the lattice they generate).
pub fn saturated_span_basis(vectors: &[Vec<i64>], dim: usize) -> Vec<Vec<BigInt>> {
    let rows: Vec<_> = vectors.iter().map(|v| to_big(v)).collect();
    if row_echelon(&rows, dim).rank() == 0 {
        return Vec::new();
    }
    // normals: n with n . v = 0 for every v
    let normals = kernel_of_big(&transpose(&rows, dim), rows.len());
    if normals.is_empty() {
        return identity(dim);
    }
    kernel_of_big(&transpose(&normals, dim), normals.len())
}

/// Precomputed reduction for repeated membership tests and solves against one
/// generator set.
#[derive(Debug, Clone)]
pub struct LatticeSolver {
    dim: usize,
    echelon: Echelon,
    kernel: Vec<Vec<BigInt>>,
}

impl LatticeSolver {
    pub fn new(generators: &[Vec<i64>]) -> Self {
        let dim = generators.first().map_or(0, Vec::len);
        let big: Vec<_> = generators.iter().map(|g| to_big(g)).collect();
        Self::from_big(&big, dim)
    }

    pub fn from_big(generators: &[Vec<BigInt>], dim: usize) -> Self {
        let echelon = row_echelon(generators, dim);
        let kernel = if generators.is_empty() {
            Vec::new()
        } else {
            hermite_normal_form(echelon.left_kernel(), generators.len())
        };
        LatticeSolver {
            dim,
            echelon,
            kernel,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Hermite basis of the generated lattice.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        self.echelon.basis()
    }

    /// Basis of the relations among the generators.
    pub fn kernel(&self) -> &[Vec<BigInt>] {
        &self.kernel
    }

    /// Coefficients `alpha` with `sum_i alpha_i g_i = target`.
    pub fn solve(&self, target: &[i64]) -> Result<Vec<BigInt>, AlgebraError> {
        self.solve_big(&to_big(target))
    }

    pub fn solve_big(&self, target: &[BigInt]) -> Result<Vec<BigInt>, AlgebraError> {
        if target.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                found: target.len(),
            });
        }
        let rank = self.rank();
        let mut residual = target.to_vec();
        let mut beta = Vec::with_capacity(rank);
        for (i, &c) in self.echelon.pivots.iter().enumerate() {
            let row = &self.echelon.rows[i];
            let (q, rem) = residual[c].div_rem(&row[c]);
            if !rem.is_zero() {
                return Err(AlgebraError::NotInLattice);
            }
            if !q.is_zero() {
                for (x, g) in residual.iter_mut().zip(row) {
                    *x -= &q * g;
                }
            }
            beta.push(q);
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return Err(AlgebraError::NotInLattice);
        }
        let n = self.echelon.transform.len();
        let mut alpha = vec![BigInt::zero(); n];
        for (b, trow) in beta.iter().zip(&self.echelon.transform) {
            if b.is_zero() {
                continue;
            }
            for (a, t) in alpha.iter_mut().zip(trow) {
                *a += b * t;
            }
        }
        Ok(alpha)
    }

    pub fn contains_big(&self, target: &[BigInt]) -> bool {
        self.solve_big(target).is_ok()
    }

    pub fn contains(&self, target: &[i64]) -> bool {
        self.solve(target).is_ok()
    }
}

/// Integer coefficients expressing `target` over `generators`.
///
/// Deterministic for a fixed input; the zero target always yields the zero vector.
pub fn solve_integer_combination(
    generators: &[Vec<i64>],
    target: &[i64],
) -> Result<Vec<BigInt>, AlgebraError> {
    if let Some(g) = generators.first() {
        if g.len() != target.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: g.len(),
                found: target.len(),
            });
        }
    }
    LatticeSolver::new(generators).solve(target)
}

/// `left * A * right = diag(diagonal, 0, ...)` with `left`, `right` unimodular.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub left: Vec<Vec<BigInt>>,
    pub diagonal: Vec<BigInt>,
    pub right: Vec<Vec<BigInt>>,
}

fn swap_cols(mat: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in mat.iter_mut() {
        row.swap(i, j);
    }
}

/// `mat[., dst] -= q * mat[., src]`
fn sub_col(mat: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in mat.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

pub fn smith_normal_form(a: &[Vec<BigInt>], ncols: usize) -> SmithForm {
    let m = a.len();
    let n = ncols;
    let mut a = a.to_vec();
    let mut left = identity(m);
    let mut right = identity(n);
    let mut diagonal = Vec::new();
    for t in 0..m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        left.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut right, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                sub_row(&mut a, i, t, &q);
                sub_row(&mut left, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    left.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                sub_col(&mut a, j, t, &q);
                sub_col(&mut right, j, t, &q);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    swap_cols(&mut right, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t]))
            });
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    sub_row(&mut a, t, i, &minus_one);
                    sub_row(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            negate_row(&mut a, t);
            negate_row(&mut left, t);
        }
        diagonal.push(a[t][t].clone());
    }
    SmithForm {
        left,
        diagonal,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| to_big(r)).collect()
    }

    fn combine(alpha: &[BigInt], gens: &[Vec<i64>]) -> Vec<BigInt> {
        let dim = gens[0].len();
        let mut out = vec![BigInt::zero(); dim];
        for (a, g) in alpha.iter().zip(gens) {
            for (o, &x) in out.iter_mut().zip(g) {
                *o += a * x;
            }
        }
        out
    }

    #[test]
    fn kernel_of_network_one_classes() {
        let k = integer_kernel_basis(&[vec![1, 0], vec![-1, 1], vec![0, -1]]);
        assert_eq!(k, big(&[&[1, 1, 1]]));
    }

    #[test]
    fn kernel_trivial_cases() {
        assert!(integer_kernel_basis(&[vec![1, -1]]).is_empty());
        assert!(integer_kernel_basis(&[vec![1, 0], vec![0, 1]]).is_empty());
    }

    #[test]
    fn kernel_with_repeated_vectors() {
        let k = integer_kernel_basis(&[vec![2, -2], vec![1, -1], vec![3, -3]]);
        assert_eq!(k.len(), 2);
        for alpha in &k {
            assert!(combine(alpha, &[vec![2, -2], vec![1, -1], vec![3, -3]])
                .iter()
                .all(Zero::is_zero));
        }
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hermite_normal_form(&big(&[&[2, 4], &[1, 3]]), 2);
        let b = hermite_normal_form(&big(&[&[1, 3], &[1, 1]]), 2);
        assert_eq!(a, b);
        assert_eq!(a, big(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn solve_fig_one_reference_shift() {
        let gens = vec![
            vec![-1, 1, 0, 0, 0],
            vec![0, 1, 0, -1, -1],
            vec![1, -1, 1, 0, 0],
        ];
        let (a, b, c) = (3, 2, 5);
        let alpha =
            solve_integer_combination(&gens, &[a, b, c, -a - b, -a - b]).unwrap();
        assert_eq!(alpha, to_big(&[c - a, a + b, c]));
    }

    #[test]
    fn solve_zero_target_gives_zero() {
        let alpha = solve_integer_combination(&[vec![-1, 1], vec![1, -1]], &[0, 0]).unwrap();
        assert!(alpha.iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_outside_lattice() {
        assert_eq!(
            solve_integer_combination(&[vec![2, 0]], &[1, 0]),
            Err(AlgebraError::NotInLattice)
        );
        assert_eq!(
            solve_integer_combination(&[vec![1, -1]], &[1, 1]),
            Err(AlgebraError::NotInLattice)
        );
    }

    #[test]
    fn saturation_of_index_two_lattice() {
        let sat = saturated_span_basis(&[vec![2, 2]], 2);
        assert_eq!(sat, big(&[&[1, 1]]));
        assert!(saturated_span_basis(&[vec![0, 0]], 2).is_empty());
        assert_eq!(saturated_span_basis(&[vec![1, 0], vec![0, 3]], 2).len(), 2);
    }

    fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, ncols: usize) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|row| {
                (0..ncols)
                    .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn smith_form_reconstructs_diagonal() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let snf = smith_normal_form(&a, 3);
        let d = matmul(&matmul(&snf.left, &a, 3, 3), &snf.right, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j && i < snf.diagonal.len() {
                    snf.diagonal[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(d[i][j], expected);
            }
        }
        assert_eq!(snf.diagonal, to_big(&[2, 6, 12]));
    }
}
