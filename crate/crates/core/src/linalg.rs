//! Dense exact linear algebra over F_q: elimination, rank, kernel vectors,
//! reduced echelon form.

use crate::gf::{FieldElement, FieldSpec};

/// Row-major dense matrix over F_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Pivot selection order for the elimination passes.  `Forward` scans
/// columns left to right taking the first nonzero row; `Reverse` scans
/// columns right to left taking the last nonzero row.  The two passes are
/// used to cross-check ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    Forward,
    Reverse,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[FieldElement], field: &FieldSpec) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElement::ZERO;
                for j in 0..self.cols {
                    acc = field.add(acc, field.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    fn eliminate(&self, field: &FieldSpec, rule: PivotRule) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let col_order: Vec<usize> = match rule {
            PivotRule::Forward => (0..m.cols).collect(),
            PivotRule::Reverse => (0..m.cols).rev().collect(),
        };
        let mut pivot_cols = Vec::new();
        let mut next_row = 0usize;
        for &col in &col_order {
            let found = match rule {
                PivotRule::Forward => (next_row..m.rows).find(|&r| !m.get(r, col).is_zero()),
                PivotRule::Reverse => (next_row..m.rows).rev().find(|&r| !m.get(r, col).is_zero()),
            };
            let Some(pivot_row) = found else { continue };
            // swap into position and normalize
            for j in 0..m.cols {
                let a = m.get(next_row, j);
                let b = m.get(pivot_row, j);
                m.set(next_row, j, b);
                m.set(pivot_row, j, a);
            }
            let inv = field.inv(m.get(next_row, col)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(next_row, j, field.mul(m.get(next_row, j), inv));
            }
            for r in 0..m.rows {
                if r == next_row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = field.sub(m.get(r, j), field.mul(factor, m.get(next_row, j)));
                    m.set(r, j, v);
                }
            }
            pivot_cols.push(col);
            next_row += 1;
            if next_row == m.rows {
                break;
            }
        }
        (m, pivot_cols)
    }

    pub fn rank(&self, field: &FieldSpec, rule: PivotRule) -> usize {
        self.eliminate(field, rule).1.len()
    }

    /// Reduced row echelon form under the forward pivot rule, with the
    /// pivot column list.
    pub fn rref(&self, field: &FieldSpec) -> (Matrix, Vec<usize>) {
        self.eliminate(field, PivotRule::Forward)
    }

    /// One kernel vector if the kernel is nontrivial, chosen
    /// deterministically: free variable of smallest column index set to 1,
    /// remaining free variables 0.
    pub fn kernel_vector(&self, field: &FieldSpec) -> Option<Vec<FieldElement>> {
        let (rref, pivot_cols) = self.rref(field);
        if pivot_cols.len() == self.cols {
            return None;
        }
        let free_col = (0..self.cols).find(|c| !pivot_cols.contains(c))?;
        let mut v = vec![FieldElement::ZERO; self.cols];
        v[free_col] = field.one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            // pivot var = -(free column entry)
            v[pc] = field.neg(rref.get(row, free_col));
        }
        Some(v)
    }

    /// Rank of the matrix over F_q via the forward rule.
    pub fn rank_forward(&self, field: &FieldSpec) -> usize {
        self.rank(field, PivotRule::Forward)
    }
}
