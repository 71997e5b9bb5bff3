//! Dense exact linear algebra over arbitrary-precision rationals.
//!
//! Everything downstream (differentials, projectors, partial inverses) is a
//! finite matrix computation, so this module is the workhorse: fraction-free
//! Gaussian elimination for echelon forms, exact kernels/images, solves,
//! inverses, and the Gram-orthogonal / along-subspace projectors.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational scalar used throughout the crate.
pub type Rat = Ratio<BigInt>;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a rational from `"p/q"` or `"p"` text. The result is normalized
/// (gcd 1, positive denominator); the input need not be.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num_str
        .parse()
        .map_err(|_| format!("invalid rational numerator {num_str:?}"))?;
    let d: BigInt = den_str
        .parse()
        .map_err(|_| format!("invalid rational denominator {den_str:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational {s:?}"));
    }
    Ok(Ratio::new(n, d))
}

/// Canonical rational text: `"p/q"` with `q > 0` and `gcd(p,q) = 1`, or
/// just `"p"` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dense row-major matrix of exact rationals.
///
/// Zero-row and zero-column shapes are first-class: operator families use
/// them for the degrees just outside `0..=n`.
#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMat {}x{} {}", self.rows, self.cols, self.to_compact_string())
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix from integer rows; test- and catalog-friendly.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn diag(entries: Vec<Rat>) -> Self {
        let n = entries.len();
        let mut m = QMat::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn transpose(&self) -> QMat {
        let mut m = QMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn scale(&self, s: &Rat) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &QMat) -> QMat {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = QMat::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        m
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<Rat>>) -> QMat {
        let mut m = QMat::zeros(rows, cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * &v[c]).sum())
            .collect()
    }

    /// Compact single-line text, e.g. `[[1,0],[0,1/2]]`.
    pub fn to_compact_string(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let cells: Vec<String> =
                    (0..self.cols).map(|c| rat_to_string(self.get(r, c))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| rat_to_string(self.get(r, c))).collect())
            .collect()
    }

    /// Reduced row echelon form together with the pivot column indices.
    ///
    /// The forward pass is fraction-free (Bareiss, one-step division by the
    /// previous pivot) on the denominator-cleared integer matrix, with
    /// deterministic pivoting: for each column, the first row with a nonzero
    /// entry. The back-substitution then normalizes to the rational RREF.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        // Clear denominators row by row to land in BigInt.
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    let d = self.get(r, c).denom();
                    lcm = num::integer::lcm(lcm, d.clone());
                }
                (0..self.cols)
                    .map(|c| {
                        let e = self.get(r, c);
                        e.numer() * (&lcm / e.denom())
                    })
                    .collect()
            })
            .collect();

        let mut pivots: Vec<usize> = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    a[i][j] = num / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }

        // Normalize to rational RREF.
        let mut m = QMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Ratio::from_integer(a[i][j].clone()));
            }
        }
        for (row, &pc) in pivots.iter().enumerate().rev() {
            let inv_pivot = {
                let p = m.get(row, pc).clone();
                Rat::one() / p
            };
            for j in pc..self.cols {
                let v = m.get(row, j) * &inv_pivot;
                m.set(row, j, v);
            }
            for i in 0..row {
                let factor = m.get(i, pc).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in pc..self.cols {
                    let v = m.get(i, j) - &factor * m.get(row, j);
                    m.set(i, j, v);
                }
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Kernel basis as matrix columns, in the canonical RREF parametrization
    /// (one column per free variable, in increasing free-column order).
    pub fn kernel_basis(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, f).clone();
            }
            cols.push(v);
        }
        QMat::from_columns(self.cols, cols)
    }

    /// Image basis: the pivot columns of the original matrix.
    pub fn image_basis(&self) -> QMat {
        let (_, pivots) = self.rref();
        QMat::from_columns(self.rows, pivots.iter().map(|&c| self.column(c)).collect())
    }

    /// Exact solve of `self * X = rhs`. Returns `None` when inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let aug = self.hcat(rhs);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = QMat::zeros(self.cols, rhs.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Exact inverse; `None` when singular or non-square.
    pub fn inverse(&self) -> Option<QMat> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve(&QMat::identity(self.rows))?;
        if (x.clone() * self.clone()).is_identity() {
            Some(x)
        } else {
            None
        }
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    let tmp = a.get(c, j).clone();
                    a.set(c, j, a.get(p, j).clone());
                    a.set(p, j, tmp);
                }
                det = -det;
            }
            let pivot = a.get(c, c).clone();
            det *= &pivot;
            for i in c + 1..n {
                let factor = a.get(i, c) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = a.get(i, j) - &factor * a.get(c, j);
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Exact SPD test: symmetric with all leading principal minors positive.
    pub fn is_spd(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        for k in 1..=self.rows {
            let mut sub = QMat::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub.set(i, j, self.get(i, j).clone());
                }
            }
            if !sub.det().is_positive() {
                return false;
            }
        }
        true
    }

    /// `G`-orthogonal projector onto the column span of `basis`:
    /// `K (K^t G K)^(-1) K^t G`. `basis` columns must be independent.
    pub fn g_orth_projector(basis: &QMat, gram: &QMat) -> QMat {
        let n = gram.rows();
        if basis.cols() == 0 {
            return QMat::zeros(n, n);
        }
        let ktg = basis.transpose() * gram.clone();
        let ktgk = ktg.clone() * basis.clone();
        let inv = ktgk.inverse().expect("projector basis is G-degenerate");
        basis.clone() * inv * ktg
    }

    /// Projector onto the column span of `onto` along the column span of
    /// `along`. The two spans must be complementary.
    pub fn projector_onto_along(onto: &QMat, along: &QMat) -> Option<QMat> {
        let n = onto.rows();
        assert_eq!(along.rows(), n);
        if onto.cols() + along.cols() != n {
            return None;
        }
        let m = onto.hcat(along);
        let minv = m.inverse()?;
        let mut sel = QMat::zeros(n, n);
        for i in 0..onto.cols() {
            sel.set(i, i, Rat::one());
        }
        Some(m * sel * minv)
    }

    /// True when every column of `sub` lies in the column span of `space`.
    pub fn span_contains(space: &QMat, sub: &QMat) -> bool {
        let r = space.rank();
        space.hcat(sub).rank() == r
    }
}

impl Add for QMat {
    type Output = QMat;
    fn add(self, rhs: QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for QMat {
    type Output = QMat;
    fn sub(self, rhs: QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for QMat {
    type Output = QMat;
    fn neg(self) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|x| -x).collect() }
    }
}

impl Mul for QMat {
    type Output = QMat;
    fn mul(self, rhs: QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows, "mul shape mismatch");
        let mut m = QMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.get(r, c) + a * b;
                    m.set(r, c, v);
                }
            }
        }
        m
    }
}
