//! Dense real and complex matrices with partial-pivoting LU.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `SINGULAR_RTOL * max|A|` is singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Row-major dense matrix with optional row/column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    pub row_labels: Option<Vec<String>>,
    pub col_labels: Option<Vec<String>>,
}

/// Complex counterpart of [`Matrix`].
pub type CMatrix = Matrix<Complex64>;

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            row_labels: None,
            col_labels: None,
        })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != self.rows || cols.len() != self.cols {
            return Err(Error::DimensionMismatch("labels do not match matrix shape".into()));
        }
        self.row_labels = Some(rows);
        self.col_labels = Some(cols);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

macro_rules! impl_arith {
    ($t:ty, $zero:expr) => {
        impl Matrix<$t> {
            pub fn matmul(&self, other: &Self) -> Result<Self> {
                if self.cols != other.rows {
                    return Err(Error::DimensionMismatch(format!(
                        "{}x{} times {}x{}",
                        self.rows, self.cols, other.rows, other.cols
                    )));
                }
                let mut out = Self::zeros(self.rows, other.cols);
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        let a = self[(i, k)];
                        if a == $zero {
                            continue;
                        }
                        for j in 0..other.cols {
                            out[(i, j)] += a * other[(k, j)];
                        }
                    }
                }
                out.row_labels = self.row_labels.clone();
                out.col_labels = other.col_labels.clone();
                Ok(out)
            }

            pub fn matvec(&self, v: &[$t]) -> Result<Vec<$t>> {
                if self.cols != v.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{}x{} matrix times vector of length {}",
                        self.rows,
                        self.cols,
                        v.len()
                    )));
                }
                Ok((0..self.rows)
                    .map(|i| {
                        self.row(i)
                            .iter()
                            .zip(v)
                            .fold($zero, |acc, (&a, &b)| acc + a * b)
                    })
                    .collect())
            }
        }
    };
}

impl_arith!(f64, 0.0);
impl_arith!(Complex64, Complex64::new(0.0, 0.0));

impl Matrix<f64> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Removes row and column `k` of a square matrix.
    pub fn without_row_col(&self, k: usize) -> Self {
        let n = self.rows;
        let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let mut out = Self::zeros(n - 1, self.cols - 1);
        let keep_c: Vec<usize> = (0..self.cols).filter(|&j| j != k).collect();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep_c.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// CSV with a header of column labels and one labeled line per row.
    /// Values carry 6 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let col_labels: Vec<String> = self
            .col_labels
            .clone()
            .unwrap_or_else(|| (0..self.cols).map(|j| j.to_string()).collect());
        let row_labels: Vec<String> = self
            .row_labels
            .clone()
            .unwrap_or_else(|| (0..self.rows).map(|i| i.to_string()).collect());
        for c in &col_labels {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (i, label) in row_labels.iter().enumerate() {
            s.push_str(label);
            for &v in self.row(i) {
                let _ = write!(s, ",{}", fmt_sig6(v));
            }
            s.push('\n');
        }
        s
    }
}

/// Formats `x` with 6 significant digits, `%g` style.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Rounded mantissa/exponent first, so 999999.7 becomes 1e+06.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Packed LU factors of `P·A = L·U`; L has a unit diagonal.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: Matrix,
    /// `perm[i]` is the row of `A` placed at row `i`.
    perm: Vec<usize>,
    /// +1 or -1, the sign of the permutation.
    pub parity: f64,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Unit lower-triangular factor.
    pub fn l(&self) -> Matrix {
        let n = self.dim();
        let mut l = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn u(&self) -> Matrix {
        let n = self.dim();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        lu_solve(self, b)
    }

    /// Solves `Aᵀ·x = b` with the same factors.
    pub fn solve_transposed(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for a {n}x{n} system",
                b.len()
            )));
        }
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ z = b, Lᵀ w = z, x = Pᵀ w.
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Ok(x)
    }
}

/// Partial-pivoting LU factorization.
pub fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "LU of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let threshold = SINGULAR_RTOL * a.max_abs();
    let mut lu = a.clone();
    lu.row_labels = None;
    lu.col_labels = None;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1.0;

    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= threshold || pmax == 0.0 {
            return Err(Error::Singular { column: k });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            parity = -parity;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    Ok(LuFactors { lu, perm, parity })
}

/// Solves `A·x = b` from the factors of `A`.
pub fn lu_solve(f: &LuFactors, b: &[f64]) -> Result<Vec<f64>> {
    let n = f.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} for a {n}x{n} system",
            b.len()
        )));
    }
    let mut x: Vec<f64> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= f.lu[(i, k)] * x[k];
        }
        x[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= f.lu[(i, k)] * x[k];
        }
        x[i] = s / f.lu[(i, i)];
    }
    Ok(x)
}

pub fn invert(a: &Matrix) -> Result<Matrix> {
    let f = lu_factor(a)?;
    let n = a.rows;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let col = lu_solve(&f, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    inv.row_labels = a.col_labels.clone();
    inv.col_labels = a.row_labels.clone();
    Ok(inv)
}
