//! IVHS matrices at the Fermat point.
//!
//! Rows are indexed by `I_{(m/2)d-m-2}`, columns by `I_d`, and every nonzero
//! entry is an integer multiple of a variable `x_k`, `k in I_{(m/2+1)d-m-2}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{IvhsError, Result};
use crate::field::FieldCtx;
use crate::linalg::Matrix;
use crate::multiindex::{add, add_alpha, IndexOrZero, IndexSet, MultiIndex, Params};

/// `coefficient * x_index`; the zero entry is `(0, Zero)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaledVar {
    pub coefficient: i64,
    pub index: IndexOrZero,
}

impl ScaledVar {
    pub fn zero() -> Self {
        ScaledVar {
            coefficient: 0,
            index: IndexOrZero::Zero,
        }
    }

    pub fn new(coefficient: i64, index: IndexOrZero) -> Self {
        if coefficient == 0 || index.is_zero() {
            Self::zero()
        } else {
            ScaledVar { coefficient, index }
        }
    }

    pub fn var(index: MultiIndex) -> Self {
        ScaledVar {
            coefficient: 1,
            index: IndexOrZero::Index(index),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MatrixKind {
    M,
    #[serde(rename = "Mcheck")]
    MCheck {
        alpha: MultiIndex,
    },
    N {
        j: MultiIndex,
        alpha: MultiIndex,
    },
}

#[derive(Debug, Clone)]
pub struct IvhsMatrix {
    params: Params,
    kind: MatrixKind,
    rows: Arc<IndexSet>,
    cols: Arc<IndexSet>,
    entries: Vec<Vec<ScaledVar>>,
}

impl IvhsMatrix {
    fn from_fn(
        params: Params,
        kind: MatrixKind,
        cell: impl Fn(&MultiIndex, &MultiIndex) -> ScaledVar,
    ) -> Self {
        let rows = params.rows();
        let cols = params.cols();
        let vars = params.vars();
        let entries: Vec<Vec<ScaledVar>> = rows
            .iter()
            .map(|i| {
                cols.iter()
                    .map(|j| {
                        let v = cell(i, j);
                        if let IndexOrZero::Index(k) = &v.index {
                            assert!(
                                vars.contains(k),
                                "entry index {k} escaped I_{}",
                                vars.degree()
                            );
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        IvhsMatrix {
            params,
            kind,
            rows,
            cols,
            entries,
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }

    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }

    /// `(a, r)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScaledVar {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<ScaledVar>] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<ScaledVar> {
        self.entries.iter().map(|r| r[col].clone()).collect()
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|v| !v.is_zero())
            .count()
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_count() == 0
    }

    /// Numeric matrix at an assignment indexed by variable position.
    pub fn evaluate<F: FieldCtx>(&self, f: &F, assignment: &[F::E]) -> Matrix<F::E> {
        let vars = self.params.vars();
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| evaluate_cell(f, &vars, v, assignment))
                    .collect()
            })
            .collect()
    }

    /// JSON: `{kind, m, d, rows, cols, entries}` with `entries` a row-major
    /// list of `[coeff, tuple-or-null]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixFile::from(self)).expect("matrix serializes")
    }

    /// One nonzero entry per line: `row col coeff x[tuple]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (r, i) in self.rows.iter().enumerate() {
            for (c, j) in self.cols.iter().enumerate() {
                let v = &self.entries[r][c];
                if let IndexOrZero::Index(k) = &v.index {
                    let _ = writeln!(out, "{i} {j} {} x{k}", v.coefficient);
                }
            }
        }
        out
    }
}

pub(crate) fn evaluate_cell<F: FieldCtx>(
    f: &F,
    vars: &IndexSet,
    v: &ScaledVar,
    assignment: &[F::E],
) -> F::E {
    match &v.index {
        IndexOrZero::Zero => f.zero(),
        IndexOrZero::Index(k) => {
            let pos = vars.position(k).expect("entry index is a variable");
            let x = &assignment[pos];
            if v.coefficient == 1 {
                x.clone()
            } else {
                f.mul(&f.from_i64(v.coefficient), x)
            }
        }
    }
}

/// Serialized form of an [`IvhsMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(flatten)]
    pub kind: MatrixKind,
    pub m: u32,
    pub d: u32,
    pub rows: Vec<MultiIndex>,
    pub cols: Vec<MultiIndex>,
    pub entries: Vec<(i64, Option<MultiIndex>)>,
}

impl From<&IvhsMatrix> for MatrixFile {
    fn from(mat: &IvhsMatrix) -> Self {
        MatrixFile {
            kind: mat.kind.clone(),
            m: mat.params.m,
            d: mat.params.d,
            rows: mat.rows.members().to_vec(),
            cols: mat.cols.members().to_vec(),
            entries: mat
                .entries
                .iter()
                .flatten()
                .map(|v| (v.coefficient, v.index.index().cloned()))
                .collect(),
        }
    }
}

impl MatrixFile {
    /// Rebuilds the matrix named by the file and checks the stored cells.
    pub fn rebuild(&self) -> Result<IvhsMatrix> {
        let mat = match &self.kind {
            MatrixKind::M => build_m(self.m, self.d)?,
            MatrixKind::MCheck { alpha } => build_m_check(self.m, self.d, alpha)?,
            MatrixKind::N { j, alpha } => build_n(self.m, self.d, j, alpha)?,
        };
        if MatrixFile::from(&mat) != *self {
            return Err(IvhsError::Param(
                "matrix file does not match its recomputation".into(),
            ));
        }
        Ok(mat)
    }
}

fn require_member(set: &IndexSet, i: &MultiIndex) -> Result<()> {
    if !set.contains(i) {
        return Err(IvhsError::NotInIndexSet {
            index: i.clone(),
            degree: set.degree(),
        });
    }
    Ok(())
}

/// `M = [x_{i+j}]`, zero where the sum leaves the box.
pub fn build_m(m: u32, d: u32) -> Result<IvhsMatrix> {
    let params = Params::with_hypothesis(m, d)?;
    Ok(IvhsMatrix::from_fn(
        params,
        MatrixKind::M,
        |i, j| match add(i, j, d).expect("equal widths") {
            IndexOrZero::Index(k) => ScaledVar::var(k),
            IndexOrZero::Zero => ScaledVar::zero(),
        },
    ))
}

/// First-order correction `M̌_alpha` with entries `alpha_ě * x_{i +_alpha j}`.
pub fn build_m_check(m: u32, d: u32, alpha: &MultiIndex) -> Result<IvhsMatrix> {
    let params = Params::with_hypothesis(m, d)?;
    require_member(&params.cols(), alpha)?;
    Ok(IvhsMatrix::from_fn(
        params,
        MatrixKind::MCheck {
            alpha: alpha.clone(),
        },
        |i, j| {
            let s = add_alpha(i, j, alpha, d).expect("equal widths");
            ScaledVar::new(s.coefficient as i64, s.index)
        },
    ))
}

/// `M` with column `j` replaced by column `j` of `M̌_alpha`.
pub fn build_n(m: u32, d: u32, j: &MultiIndex, alpha: &MultiIndex) -> Result<IvhsMatrix> {
    let params = Params::with_hypothesis(m, d)?;
    require_member(&params.cols(), j)?;
    require_member(&params.cols(), alpha)?;
    let kind = MatrixKind::N {
        j: j.clone(),
        alpha: alpha.clone(),
    };
    Ok(IvhsMatrix::from_fn(params, kind, |i, col| {
        if col == j {
            let s = add_alpha(i, col, alpha, d).expect("equal widths");
            ScaledVar::new(s.coefficient as i64, s.index)
        } else {
            match add(i, col, d).expect("equal widths") {
                IndexOrZero::Index(k) => ScaledVar::var(k),
                IndexOrZero::Zero => ScaledVar::zero(),
            }
        }
    }))
}

/// The 1-form `alpha_i = sum_j x_{i+j} dt_j` at the Fermat point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliationForm {
    pub row: MultiIndex,
    /// Column `j` (the coordinate `t_j`) to the variable index `i + j`.
    pub terms: BTreeMap<MultiIndex, MultiIndex>,
}

pub fn foliation_forms(m: u32, d: u32) -> Result<Vec<FoliationForm>> {
    let params = Params::with_hypothesis(m, d)?;
    let cols = params.cols();
    Ok(params
        .rows()
        .iter()
        .map(|i| FoliationForm {
            row: i.clone(),
            terms: cols
                .iter()
                .filter_map(|j| match add(i, j, d).expect("equal widths") {
                    IndexOrZero::Index(k) => Some((j.clone(), k)),
                    IndexOrZero::Zero => None,
                })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstOrderTerm {
    pub alpha: MultiIndex,
    pub coefficient: u32,
    pub index: IndexOrZero,
}

/// The product `X^i X^j` in the Jacobian ring to first order in `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SiliTerm {
    /// No coordinate overflows: the basis monomial `X^{i+j}`.
    Product(MultiIndex),
    /// Exactly one coordinate overflows: one term per `alpha in I_d`.
    FirstOrder(Vec<FirstOrderTerm>),
    /// Two or more coordinates overflow.
    Zero,
}

/// Works for a row index `i` of any degree; `m` is read off the width.
pub fn sili_reduce(i: &MultiIndex, j: &MultiIndex, d: u32) -> Result<SiliTerm> {
    let width = i.len();
    if width < 4 || !width.is_multiple_of(2) {
        return Err(IvhsError::Param(format!(
            "index width {width} is not m+2 for an even m >= 2"
        )));
    }
    let params = Params::new(width as u32 - 2, d)?;
    let over = crate::multiindex::overflow_coordinates(i, j, d)?;
    Ok(match over.len() {
        0 => SiliTerm::Product(i.raw_add(j)?),
        1 => {
            let terms = params
                .cols()
                .iter()
                .map(|alpha| {
                    let s = add_alpha(i, j, alpha, d).expect("equal widths");
                    FirstOrderTerm {
                        alpha: alpha.clone(),
                        coefficient: s.coefficient,
                        index: s.index,
                    }
                })
                .collect();
            SiliTerm::FirstOrder(terms)
        }
        _ => SiliTerm::Zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, DEFAULT_PRIME};
    use crate::linalg::rank;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn cell<'a>(mat: &'a IvhsMatrix, i: &[u32], j: &[u32]) -> &'a ScaledVar {
        let r = mat.rows().position(&mi(i)).unwrap();
        let c = mat.cols().position(&mi(j)).unwrap();
        mat.entry(r, c)
    }

    #[test]
    fn m_for_quartic_surfaces_is_a_row_of_all_variables() {
        let mat = build_m(2, 4).unwrap();
        assert_eq!(mat.shape(), (1, 19));
        let vars: Vec<_> = mat.entries()[0]
            .iter()
            .map(|v| v.index.index().unwrap().clone())
            .collect();
        assert_eq!(vars, mat.cols().members().to_vec());
    }

    #[test]
    fn m_for_quintic_surfaces() {
        let mat = build_m(2, 5).unwrap();
        assert_eq!(mat.shape(), (4, 40));
        assert_eq!(
            cell(&mat, &[1, 0, 0, 0], &[0, 3, 1, 1]),
            &ScaledVar::var(mi(&[1, 3, 1, 1]))
        );
        assert!(cell(&mat, &[1, 0, 0, 0], &[3, 1, 1, 0]).is_zero());
        assert!(matches!(build_m(2, 3), Err(IvhsError::Hypothesis { .. })));
    }

    #[test]
    fn m_check_examples() {
        for alpha in Params::new(2, 4).unwrap().cols().iter() {
            assert!(build_m_check(2, 4, alpha).unwrap().is_zero());
        }
        let mc = build_m_check(2, 5, &mi(&[2, 1, 1, 1])).unwrap();
        assert_eq!(
            cell(&mc, &[1, 0, 0, 0], &[3, 1, 1, 0]),
            &ScaledVar {
                coefficient: 2,
                index: IndexOrZero::Index(mi(&[1, 2, 2, 1]))
            }
        );
        assert!(cell(&mc, &[1, 0, 0, 0], &[0, 3, 1, 1]).is_zero());
        assert!(build_m_check(2, 5, &mi(&[2, 1, 1, 0])).is_err());
    }

    #[test]
    fn m_check_sparsity_bound() {
        for (m, d) in [(2, 5), (2, 6), (4, 3), (4, 4)] {
            let params = Params::new(m, d).unwrap();
            let (rows, cols) = (params.rows(), params.cols());
            let single_overflow = rows
                .iter()
                .flat_map(|i| cols.iter().map(move |j| (i, j)))
                .filter(|(i, j)| {
                    crate::multiindex::overflow_coordinates(i, j, d)
                        .unwrap()
                        .len()
                        == 1
                })
                .count();
            for alpha in params.cols().iter() {
                let mc = build_m_check(m, d, alpha).unwrap();
                assert!(mc.nonzero_count() <= single_overflow);
                for v in mc.entries().iter().flatten().filter(|v| !v.is_zero()) {
                    assert!(v.coefficient > 0 && v.coefficient <= d as i64 - 2);
                }
            }
        }
    }

    #[test]
    fn n_agrees_with_m_off_the_replaced_column() {
        for (m, d) in [(2, 4), (2, 5), (4, 3)] {
            let base = build_m(m, d).unwrap();
            let params = base.params();
            for (jc, j) in params.cols().iter().enumerate().step_by(3) {
                for alpha in params.cols().iter().step_by(5) {
                    let n = build_n(m, d, j, alpha).unwrap();
                    let check = build_m_check(m, d, alpha).unwrap();
                    for c in 0..base.shape().1 {
                        if c == jc {
                            assert_eq!(n.column(c), check.column(c));
                        } else {
                            assert_eq!(n.column(c), base.column(c));
                        }
                    }
                    if d == 4 {
                        assert!(n.column(jc).iter().all(ScaledVar::is_zero));
                    }
                }
            }
        }
    }

    #[test]
    fn n_column_vanishes_without_overflow() {
        // j = (0,1,2,2) never overflows against a unit row vector at d = 5
        let j = mi(&[0, 1, 2, 2]);
        let n = build_n(2, 5, &j, &mi(&[2, 1, 1, 1])).unwrap();
        let c = n.cols().position(&j).unwrap();
        assert!(n.column(c).iter().all(ScaledVar::is_zero));
        assert!(build_n(2, 5, &mi(&[1, 1, 1, 1]), &mi(&[2, 1, 1, 1])).is_err());
    }

    #[test]
    fn foliation_forms_match_m() {
        let forms = foliation_forms(2, 4).unwrap();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].terms.len(), 19);

        let forms = foliation_forms(2, 5).unwrap();
        assert_eq!(forms.len(), 4);
        let row = forms.iter().find(|f| f.row == mi(&[1, 0, 0, 0])).unwrap();
        assert!(row.terms.keys().all(|j| j.get(0) != 3));
        assert_eq!(
            row.terms.len(),
            40 - Params::new(2, 5)
                .unwrap()
                .cols()
                .iter()
                .filter(|j| j.get(0) == 3)
                .count()
        );

        let mat = build_m(2, 5).unwrap();
        for (r, form) in forms.iter().enumerate() {
            assert_eq!(&form.row, mat.rows().get(r));
            for (c, j) in mat.cols().iter().enumerate() {
                let expected = form
                    .terms
                    .get(j)
                    .cloned()
                    .map(ScaledVar::var)
                    .unwrap_or_else(ScaledVar::zero);
                assert_eq!(mat.entry(r, c), &expected);
            }
        }
    }

    #[test]
    fn sili_examples() {
        assert_eq!(
            sili_reduce(&mi(&[1, 0, 0, 0]), &mi(&[0, 3, 1, 1]), 5).unwrap(),
            SiliTerm::Product(mi(&[1, 3, 1, 1]))
        );
        let SiliTerm::FirstOrder(terms) =
            sili_reduce(&mi(&[1, 0, 0, 0]), &mi(&[3, 1, 1, 0]), 5).unwrap()
        else {
            panic!("expected first-order case");
        };
        assert_eq!(terms.len(), 40);
        assert!(terms.contains(&FirstOrderTerm {
            alpha: mi(&[2, 1, 1, 1]),
            coefficient: 2,
            index: IndexOrZero::Index(mi(&[1, 2, 2, 1])),
        }));
        assert_eq!(
            sili_reduce(&mi(&[2, 2, 0, 0, 0, 0]), &mi(&[2, 2, 0, 0, 0, 0]), 4).unwrap(),
            SiliTerm::Zero
        );
    }

    #[test]
    fn sili_agrees_with_m_check_exhaustively() {
        for (m, d) in [(2, 5), (4, 3)] {
            let params = Params::new(m, d).unwrap();
            let checks: Vec<_> = params
                .cols()
                .iter()
                .map(|a| build_m_check(m, d, a).unwrap())
                .collect();
            let base = build_m(m, d).unwrap();
            for (r, i) in params.rows().iter().enumerate() {
                for (c, j) in params.cols().iter().enumerate() {
                    match sili_reduce(i, j, d).unwrap() {
                        SiliTerm::Product(k) => {
                            assert_eq!(base.entry(r, c), &ScaledVar::var(k));
                            assert!(checks.iter().all(|mc| mc.entry(r, c).is_zero()));
                        }
                        SiliTerm::FirstOrder(terms) => {
                            assert!(base.entry(r, c).is_zero());
                            for (t, mc) in terms.iter().zip(&checks) {
                                assert_eq!(
                                    mc.entry(r, c),
                                    &ScaledVar::new(t.coefficient as i64, t.index.clone())
                                );
                            }
                        }
                        SiliTerm::Zero => {
                            assert!(base.entry(r, c).is_zero());
                            assert!(checks.iter().all(|mc| mc.entry(r, c).is_zero()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rank_is_scale_invariant() {
        let f = PrimeField::new(DEFAULT_PRIME).unwrap();
        let mat = build_m(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<u64> = (0..44)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        rng.gen_range(0..DEFAULT_PRIME)
                    } else {
                        0
                    }
                })
                .collect();
            let lambda = rng.gen_range(1..DEFAULT_PRIME);
            let scaled: Vec<u64> = x.iter().map(|v| f.mul(v, &lambda)).collect();
            assert_eq!(
                rank(&f, &mat.evaluate(&f, &x)),
                rank(&f, &mat.evaluate(&f, &scaled))
            );
        }
    }

    #[test]
    fn serialization() {
        let mat = build_n(2, 5, &mi(&[3, 1, 1, 0]), &mi(&[2, 1, 1, 1])).unwrap();
        let json = mat.to_json();
        assert!(json.starts_with(
            r#"{"kind":"N","j":[3,1,1,0],"alpha":[2,1,1,1],"m":2,"d":5,"rows":[[0,0,0,1]"#
        ));
        let file: MatrixFile = serde_json::from_str(&json).unwrap();
        assert_eq!(file.entries.len(), 160);
        file.rebuild().unwrap();

        let text = build_m(2, 4).unwrap().to_text();
        assert_eq!(text.lines().count(), 19);
        assert_eq!(
            text.lines().next().unwrap(),
            "[0,0,0,0] [0,0,2,2] 1 x[0,0,2,2]"
        );
    }
}
