//! Lie algebras presented by structure constants over a finite field.
//!
//! Internally bases are 0-indexed; the JSON form uses the conventional
//! 1-based indices. Structure constants are stored for i < j only and
//! extended by antisymmetry.

use std::sync::Arc;

use crate::field::{Fe, Field, FieldSpec};
use crate::matrix::{Mat, Subspace};
use crate::{Error, Result};

#[derive(Clone)]
pub struct LieAlgebra {
    pub field: Arc<Field>,
    pub dim: usize,
    /// sc[pair_index(i,j)] = coefficient vector of [x_i, x_j] for i < j.
    sc: Vec<Vec<Fe>>,
}

/// Index of the (i, j), i < j pair in lexicographic order.
pub fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    assert!(i < j && j < dim, "pair ({i},{j}) out of range for dim {dim}");
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

/// All (i, j) with i < j in lexicographic order.
pub fn pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        for j in i + 1..dim {
            v.push((i, j));
        }
    }
    v
}

impl LieAlgebra {
    pub fn abelian(field: Arc<Field>, dim: usize) -> LieAlgebra {
        let sc = vec![vec![0; dim]; dim * (dim - 1) / 2];
        LieAlgebra { field, dim, sc }
    }

    /// Build from a sparse list of brackets ((i, j), k, coeff) with i < j,
    /// all 0-based; omitted brackets are zero.
    pub fn from_brackets(
        field: Arc<Field>,
        dim: usize,
        brackets: &[((usize, usize), usize, Fe)],
    ) -> LieAlgebra {
        let mut alg = LieAlgebra::abelian(field, dim);
        for &((i, j), k, c) in brackets {
            assert!(i < j && j < dim && k < dim, "bad bracket ({i},{j})->{k}");
            let idx = pair_index(dim, i, j);
            alg.sc[idx][k] = alg.field.add(alg.sc[idx][k], c);
        }
        alg
    }

    /// [x_i, x_j] for basis indices, any order.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Fe> {
        if i == j {
            return vec![0; self.dim];
        }
        if i < j {
            self.sc[pair_index(self.dim, i, j)].clone()
        } else {
            let mut v = self.sc[pair_index(self.dim, j, i)].clone();
            for c in v.iter_mut() {
                *c = self.field.neg(*c);
            }
            v
        }
    }

    /// Nonzero structure constants as ((i, j), k, c) with i < j — the sparse
    /// support, useful for hot loops.
    pub fn sc_support(&self) -> Vec<((usize, usize), usize, Fe)> {
        let mut out = Vec::new();
        for (i, j) in pairs(self.dim) {
            let v = &self.sc[pair_index(self.dim, i, j)];
            for (k, &c) in v.iter().enumerate() {
                if c != 0 {
                    out.push(((i, j), k, c));
                }
            }
        }
        out
    }

    pub fn bracket(&self, u: &[Fe], v: &[Fe]) -> Vec<Fe> {
        assert!(u.len() == self.dim && v.len() == self.dim);
        let f = &*self.field;
        let mut out = vec![0; self.dim];
        for (i, j) in pairs(self.dim) {
            let c = f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i]));
            if c != 0 {
                let w = &self.sc[pair_index(self.dim, i, j)];
                for (k, &wc) in w.iter().enumerate() {
                    if wc != 0 {
                        out[k] = f.add(out[k], f.mul(c, wc));
                    }
                }
            }
        }
        out
    }

    /// Matrix of ad(u): v -> [u, v] in the standard basis.
    pub fn ad_matrix(&self, u: &[Fe]) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut ej = vec![0; self.dim];
            ej[j] = 1;
            let col = self.bracket(u, &ej);
            for i in 0..self.dim {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// First basis triple violating the Jacobi identity, if any.
    pub fn check_jacobi(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.dim {
            let mut ei = vec![0; self.dim];
            ei[i] = 1;
            for j in i + 1..self.dim {
                let mut ej = vec![0; self.dim];
                ej[j] = 1;
                for k in j + 1..self.dim {
                    let mut ek = vec![0; self.dim];
                    ek[k] = 1;
                    let a = self.bracket(&self.bracket(&ei, &ej), &ek);
                    let b = self.bracket(&self.bracket(&ej, &ek), &ei);
                    let c = self.bracket(&self.bracket(&ek, &ei), &ej);
                    let f = &*self.field;
                    let sum: Vec<Fe> =
                        (0..self.dim).map(|t| f.add(a[t], f.add(b[t], c[t]))).collect();
                    if sum.iter().any(|&x| x != 0) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn center(&self) -> Subspace {
        // v central iff ad(e_i) v = 0 for all i: stack the ad matrices.
        let mut rows = Vec::new();
        for i in 0..self.dim {
            let mut ei = vec![0; self.dim];
            ei[i] = 1;
            let m = self.ad_matrix(&ei);
            for r in 0..self.dim {
                rows.push(m.row(r).to_vec());
            }
        }
        let stacked = Mat::from_rows(rows);
        let kernel = stacked.kernel_basis(&self.field);
        Subspace::span(&kernel, self.dim, &self.field)
    }

    /// Product subspace [A, B].
    pub fn bracket_spaces(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut gens = Vec::new();
        for u in a.basis_vectors() {
            for v in b.basis_vectors() {
                gens.push(self.bracket(&u, &v));
            }
        }
        Subspace::span(&gens, self.dim, &self.field)
    }

    /// Lower central series L = gamma_1 >= gamma_2 >= ..., until it
    /// stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_spaces(&series[0], last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            series.push(next);
            if stop {
                break;
            }
        }
        series
    }

    pub fn derived_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_spaces(last, last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            series.push(next);
            if stop {
                break;
            }
        }
        series
    }

    pub fn derived_subalgebra(&self) -> Subspace {
        self.bracket_spaces(&Subspace::full(self.dim), &Subspace::full(self.dim))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().unwrap().dim() == 0
    }

    /// Nilpotency class: least c with gamma_{c+1} = 0. The abelian algebra
    /// has class 1; requires nilpotency.
    pub fn nilpotency_class(&self) -> usize {
        let series = self.lower_central_series();
        assert!(series.last().unwrap().dim() == 0, "algebra is not nilpotent");
        if self.dim == 0 {
            return 0;
        }
        series.len() - 1
    }

    /// Quotient by an ideal: returns the quotient algebra together with the
    /// projection pi (rows: quotient basis) and the canonical section sigma
    /// (columns: coset representatives), so that pi * sigma = id.
    ///
    /// The canonical complement is spanned by the standard basis vectors at
    /// the non-pivot coordinates of the ideal's echelon basis.
    pub fn quotient(&self, ideal: &Subspace) -> (LieAlgebra, Mat, Mat) {
        let f = &*self.field;
        // Check it is an ideal.
        for i in 0..self.dim {
            let mut ei = vec![0; self.dim];
            ei[i] = 1;
            for v in ideal.basis_vectors() {
                assert!(
                    ideal.contains(&self.bracket(&ei, &v), f),
                    "subspace is not an ideal"
                );
            }
        }
        let qdim = self.dim - ideal.dim();
        let free: Vec<usize> = (0..self.dim).filter(|c| !ideal.pivots.contains(c)).collect();
        // pi: reduce mod ideal, then read off the free coordinates.
        let mut pi = Mat::zeros(qdim, self.dim);
        for j in 0..self.dim {
            let mut ej = vec![0; self.dim];
            ej[j] = 1;
            let red = ideal.reduce(&ej, f);
            for (r, &c) in free.iter().enumerate() {
                pi[(r, j)] = red[c];
            }
        }
        let mut sigma = Mat::zeros(self.dim, qdim);
        for (r, &c) in free.iter().enumerate() {
            sigma[(c, r)] = 1;
        }
        let mut brackets = Vec::new();
        for (a, b) in pairs(qdim) {
            let u = sigma.col(a);
            let v = sigma.col(b);
            let w = pi.apply(&self.bracket(&u, &v), f);
            for (k, &c) in w.iter().enumerate() {
                if c != 0 {
                    brackets.push(((a, b), k, c));
                }
            }
        }
        let q = LieAlgebra::from_brackets(self.field.clone(), qdim, &brackets);
        debug_assert_eq!(pi.mul(&sigma, f), Mat::identity(qdim));
        (q, pi, sigma)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = &*self.field;
        let mut brackets = Vec::new();
        for (i, j) in pairs(self.dim) {
            let v = &self.sc[pair_index(self.dim, i, j)];
            if v.iter().all(|&c| c == 0) {
                continue;
            }
            let mut k_coeffs = serde_json::Map::new();
            for (k, &c) in v.iter().enumerate() {
                if c != 0 {
                    k_coeffs.insert((k + 1).to_string(), f.elem_to_json(c));
                }
            }
            brackets.push(serde_json::json!({
                "i": i + 1,
                "j": j + 1,
                "k_coeffs": k_coeffs,
            }));
        }
        serde_json::json!({
            "field": self.field.spec,
            "dim": self.dim,
            "brackets": brackets,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LieAlgebra> {
        let field_spec: FieldSpec = serde_json::from_value(
            v.get("field").ok_or_else(|| Error::InvalidInput("missing field".into()))?.clone(),
        )
        .map_err(|e| Error::InvalidInput(format!("bad field spec: {e}")))?;
        let field = Arc::new(Field::new(field_spec)?);
        let dim = v
            .get("dim")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| Error::InvalidInput("missing dim".into()))? as usize;
        let mut alg = LieAlgebra::abelian(field.clone(), dim);
        if let Some(brackets) = v.get("brackets") {
            let items = brackets
                .as_array()
                .ok_or_else(|| Error::InvalidInput("brackets must be an array".into()))?;
            for item in items {
                let i = item.get("i").and_then(|x| x.as_u64()).ok_or_else(|| {
                    Error::InvalidInput("bracket missing i".into())
                })? as usize;
                let j = item.get("j").and_then(|x| x.as_u64()).ok_or_else(|| {
                    Error::InvalidInput("bracket missing j".into())
                })? as usize;
                if !(1 <= i && i < j && j <= dim) {
                    return Err(Error::InvalidInput(format!(
                        "bracket indices ({i},{j}) must satisfy 1 <= i < j <= {dim}"
                    )));
                }
                let coeffs = item
                    .get("k_coeffs")
                    .and_then(|x| x.as_object())
                    .ok_or_else(|| Error::InvalidInput("bracket missing k_coeffs".into()))?;
                for (k_str, val) in coeffs {
                    let k: usize = k_str
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad k index {k_str}")))?;
                    if !(1..=dim).contains(&k) {
                        return Err(Error::InvalidInput(format!("k index {k} out of range")));
                    }
                    let c = field.elem_from_json(val)?;
                    let idx = pair_index(dim, i - 1, j - 1);
                    alg.sc[idx][k - 1] = c;
                }
            }
        }
        if let Some(t) = alg.check_jacobi() {
            return Err(Error::InvalidInput(format!(
                "structure constants violate the Jacobi identity at basis triple {t:?}"
            )));
        }
        Ok(alg)
    }
}

/// Names of the shipped nilpotent base algebras.
pub const CATALOG_NAMES: [&str; 15] = [
    "L3_1", "L3_2", "L4_1", "L4_2", "L4_2b", "L4_3", "L5_1", "L5_2", "L5_3", "L5_4", "L5_5",
    "L5_6", "L5_7", "L5_8", "L5_9",
];

/// The standard nilpotent Lie algebras of dimension <= 5 used as extension
/// bases, by name.
pub fn base_algebra(name: &str, field: Arc<Field>) -> Result<LieAlgebra> {
    let alg = match name {
        "L3_1" => LieAlgebra::abelian(field, 3),
        "L3_2" => LieAlgebra::from_brackets(field, 3, &[((0, 1), 2, 1)]),
        "L4_1" => LieAlgebra::abelian(field, 4),
        "L4_2" => LieAlgebra::from_brackets(field, 4, &[((0, 1), 2, 1)]),
        // Same algebra as L4_2 with the central coordinates relabelled:
        // [x1,x2] = x4 and x3 central. Used as a quotient basis convention.
        "L4_2b" => LieAlgebra::from_brackets(field, 4, &[((0, 1), 3, 1)]),
        "L4_3" => LieAlgebra::from_brackets(field, 4, &[((0, 1), 2, 1), ((0, 2), 3, 1)]),
        "L5_1" => LieAlgebra::abelian(field, 5),
        "L5_2" => LieAlgebra::from_brackets(field, 5, &[((0, 1), 2, 1)]),
        "L5_3" => LieAlgebra::from_brackets(field, 5, &[((0, 1), 2, 1), ((0, 2), 3, 1)]),
        "L5_4" => LieAlgebra::from_brackets(field, 5, &[((0, 1), 4, 1), ((2, 3), 4, 1)]),
        "L5_5" => LieAlgebra::from_brackets(
            field,
            5,
            &[((0, 1), 2, 1), ((0, 2), 4, 1), ((1, 3), 4, 1)],
        ),
        "L5_6" => LieAlgebra::from_brackets(
            field,
            5,
            &[((0, 1), 2, 1), ((0, 2), 3, 1), ((0, 3), 4, 1), ((1, 2), 4, 1)],
        ),
        "L5_7" => LieAlgebra::from_brackets(
            field,
            5,
            &[((0, 1), 2, 1), ((0, 2), 3, 1), ((0, 3), 4, 1)],
        ),
        "L5_8" => LieAlgebra::from_brackets(field, 5, &[((0, 1), 3, 1), ((0, 2), 4, 1)]),
        "L5_9" => LieAlgebra::from_brackets(
            field,
            5,
            &[((0, 1), 2, 1), ((0, 2), 3, 1), ((1, 2), 4, 1)],
        ),
        _ => return Err(Error::InvalidInput(format!("unknown base algebra {name}"))),
    };
    Ok(alg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Arc<Field> {
        Arc::new(Field::new(FieldSpec::prime(5)).unwrap())
    }

    #[test]
    fn catalog_is_well_formed() {
        for name in CATALOG_NAMES {
            let alg = base_algebra(name, f5()).unwrap();
            assert!(alg.check_jacobi().is_none(), "{name} violates Jacobi");
            assert!(alg.is_nilpotent(), "{name} is not nilpotent");
            assert!(alg.nilpotency_class() <= 4, "{name} has class > 4");
        }
        assert!(base_algebra("L9_9", f5()).is_err());
    }

    #[test]
    fn expected_classes_and_centers() {
        let cases = [
            ("L3_1", 1, 3),
            ("L3_2", 2, 1),
            ("L4_2", 2, 2),
            ("L4_2b", 2, 2),
            ("L4_3", 3, 1),
            ("L5_1", 1, 5),
            ("L5_2", 2, 3),
            ("L5_3", 3, 2),
            ("L5_4", 2, 1),
            ("L5_5", 3, 1),
            ("L5_6", 4, 1),
            ("L5_7", 4, 1),
            ("L5_8", 2, 2),
            ("L5_9", 3, 2),
        ];
        for (name, class, zdim) in cases {
            let alg = base_algebra(name, f5()).unwrap();
            assert_eq!(alg.nilpotency_class(), class, "{name} class");
            assert_eq!(alg.center().dim(), zdim, "{name} center");
        }
    }

    #[test]
    fn bracket_is_bilinear_antisymmetric() {
        let alg = base_algebra("L5_9", f5()).unwrap();
        let f = alg.field.clone();
        let u = vec![1, 2, 3, 4, 0];
        let v = vec![2, 0, 1, 3, 4];
        let w = vec![4, 4, 1, 0, 2];
        let uv = alg.bracket(&u, &v);
        let vu = alg.bracket(&v, &u);
        for k in 0..5 {
            assert_eq!(uv[k], f.neg(vu[k]));
        }
        // [u+w, v] = [u,v] + [w,v]
        let uw: Vec<Fe> = (0..5).map(|k| f.add(u[k], w[k])).collect();
        let lhs = alg.bracket(&uw, &v);
        let wv = alg.bracket(&w, &v);
        for k in 0..5 {
            assert_eq!(lhs[k], f.add(uv[k], wv[k]));
        }
        // ad matrix agrees with bracket.
        let m = alg.ad_matrix(&u);
        assert_eq!(m.apply(&v, &f), uv);
    }

    #[test]
    fn jacobi_violation_detected() {
        // [x1,x2]=x3, [x1,x3]=x1 is not a Lie algebra over F5.
        let alg = LieAlgebra::from_brackets(f5(), 3, &[((0, 1), 2, 1), ((0, 2), 0, 1)]);
        assert!(alg.check_jacobi().is_some());
    }

    #[test]
    fn lcs_of_l5_7() {
        let alg = base_algebra("L5_7", f5()).unwrap();
        let dims: Vec<usize> = alg.lower_central_series().iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![5, 3, 2, 1, 0]);
        let der: Vec<usize> = alg.derived_series().iter().map(|s| s.dim()).collect();
        assert_eq!(der, vec![5, 3, 0]);
    }

    #[test]
    fn quotient_of_l5_9_by_center_line() {
        let alg = base_algebra("L5_9", f5()).unwrap();
        let f = alg.field.clone();
        let line = Subspace::span(&[vec![0, 0, 0, 0, 1]], 5, &f);
        let (q, pi, sigma) = alg.quotient(&line);
        assert_eq!(q.dim, 4);
        assert_eq!(pi.mul(&sigma, &f), Mat::identity(4));
        // L5_9 / <x5> is L4_3: [x1,x2]=x3, [x1,x3]=x4, [x2,x3]=0.
        let expect = base_algebra("L4_3", f.clone()).unwrap();
        for (i, j) in pairs(4) {
            assert_eq!(q.bracket_basis(i, j), expect.bracket_basis(i, j), "({i},{j})");
        }
    }

    #[test]
    fn json_roundtrip() {
        let alg = base_algebra("L5_5", f5()).unwrap();
        let js = alg.to_json();
        let back = LieAlgebra::from_json(&js).unwrap();
        assert_eq!(back.dim, 5);
        for (i, j) in pairs(5) {
            assert_eq!(alg.bracket_basis(i, j), back.bracket_basis(i, j));
        }
        // Jacobi-violating input is rejected.
        let bad = serde_json::json!({
            "field": {"p": 5, "degree": 1},
            "dim": 3,
            "brackets": [
                {"i": 1, "j": 2, "k_coeffs": {"3": 1}},
                {"i": 1, "j": 3, "k_coeffs": {"1": 1}}
            ]
        });
        assert!(LieAlgebra::from_json(&bad).is_err());
    }
}
