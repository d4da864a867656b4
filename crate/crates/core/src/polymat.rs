//! Polynomials in the delay variable `z` over GF(q), and dense matrices with
//! scalar or polynomial entries.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};

/// Polynomial over GF(q) in canonical form: coefficient `i` multiplies
/// `z^i` and there are no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> Result<Poly> {
        for &c in &coeffs {
            field.check(c)?;
        }
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &Field, c: Elem) -> Result<Poly> {
        Poly::new(field, vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(field: &Field, c: Elem, k: usize) -> Result<Poly> {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Poly::new(field, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        let mut p = Poly {
            field: f.clone(),
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&c| self.field.neg(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let mut coeffs = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        let mut p = Poly {
            field: f.clone(),
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let mut p = Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
        };
        p.trim();
        p
    }

    // Remainder of self by nonzero `d`; only used for gcd.
    fn rem(&self, d: &Poly) -> Poly {
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        let lead_inv = f.inv(d.coeffs[dd]).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = f.mul(*r.last().unwrap(), lead_inv);
            for (i, &c) in d.coeffs.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(factor, c));
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        Poly {
            field: f.clone(),
            coeffs: r,
        }
    }

    /// Monic greatest common divisor.
    pub(crate) fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.coeffs.last() {
            Some(&lead) => a.scale(self.field.inv(lead).unwrap()),
            None => a,
        }
    }
}

impl fmt::Display for Poly {
    /// Ascending terms joined by `+`, e.g. `1+z^2`, `2z`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("z")?,
                (1, c) => write!(f, "{c}z")?,
                (k, 1) => write!(f, "z^{k}")?,
                (k, c) => write!(f, "{c}z^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dense row-major matrix over GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl ScalarMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> ScalarMatrix {
        ScalarMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> ScalarMatrix {
        let mut m = ScalarMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Elem>]) -> Result<ScalarMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dims("ragged rows"));
            }
            for &x in r {
                data.push(field.check(x)?);
            }
        }
        Ok(ScalarMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        debug_assert!(self.field.contains(v));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut t = ScalarMatrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = ScalarMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.rows {
            return Err(Error::dims(format!(
                "vector of length {} times {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![0; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(k, j)));
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<ScalarMatrix> {
        if self.rows != self.cols {
            return Err(Error::dims(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let f = &self.field;
        let mut a = self.clone();
        let mut inv = ScalarMatrix::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0).ok_or(Error::Singular)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let s = f.inv(a.get(col, col)).unwrap();
            a.scale_row(col, s);
            inv.scale_row(col, s);
            for r in 0..n {
                let factor = a.get(r, col);
                if r != col && factor != 0 {
                    a.sub_scaled_row(r, col, factor);
                    inv.sub_scaled_row(r, col, factor);
                }
            }
        }
        Ok(inv)
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            let s = f.inv(a.get(rank, col)).unwrap();
            a.scale_row(rank, s);
            for r in 0..self.rows {
                let factor = a.get(r, col);
                if r != rank && factor != 0 {
                    a.sub_scaled_row(r, rank, factor);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: Elem) {
        for c in 0..self.cols {
            let i = r * self.cols + c;
            self.data[i] = self.field.mul(self.data[i], s);
        }
    }

    // row[dst] -= factor * row[src]
    fn sub_scaled_row(&mut self, dst: usize, src: usize, factor: Elem) {
        for c in 0..self.cols {
            let v = self.field.mul(factor, self.get(src, c));
            let i = dst * self.cols + c;
            self.data[i] = self.field.sub(self.data[i], v);
        }
    }
}

impl fmt::Display for ScalarMatrix {
    /// `[[1,1],[0,1]]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dense matrix over GF(q)[z]; generator matrices live here.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn from_rows(field: &Field, rows: Vec<Vec<Poly>>) -> Result<PolyMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut entries = Vec::with_capacity(n_rows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dims("ragged generator rows"));
            }
            for p in r {
                if p.field() != field {
                    return Err(Error::FieldMismatch);
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix {
            field: field.clone(),
            rows: n_rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from coefficient lists, `coeffs[i][j]` being the
    /// ascending coefficients of entry `(i, j)`.
    pub fn from_coeffs(field: &Field, coeffs: &[Vec<Vec<Elem>>]) -> Result<PolyMatrix> {
        let rows = coeffs
            .iter()
            .map(|r| r.iter().map(|c| Poly::new(field, c.clone())).collect())
            .collect::<Result<Vec<Vec<Poly>>>>()?;
        PolyMatrix::from_rows(field, rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Poly] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Row degrees `nu_i = max_j deg g_ij`; a zero row reports `None`.
    pub fn row_degrees(&self) -> Vec<Option<usize>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().filter_map(Poly::degree).max())
            .collect()
    }

    /// Sum of row degrees, zero rows counting as 0.
    pub fn degree(&self) -> usize {
        self.row_degrees().into_iter().map(|d| d.unwrap_or(0)).sum()
    }

    /// `self * m` with the scalars lifted to constant polynomials.
    pub fn times_scalar(&self, m: &ScalarMatrix) -> Result<PolyMatrix> {
        if self.field != *m.field() {
            return Err(Error::FieldMismatch);
        }
        if self.cols != m.rows() {
            return Err(Error::dims(format!(
                "{}x{} generator times {}x{} matrix",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * m.cols());
        for i in 0..self.rows {
            for j in 0..m.cols() {
                let mut acc = Poly::zero(&self.field);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).scale(m.get(k, j)))?;
                }
                entries.push(acc);
            }
        }
        Ok(PolyMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: m.cols(),
            entries,
        })
    }
}

impl fmt::Display for PolyMatrix {
    /// `[1+z^2, 1+z+z^2]`, rows separated by `; `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for (c, p) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for ScalarMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}
