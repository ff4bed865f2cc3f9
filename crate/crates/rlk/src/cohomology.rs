//! Restricted 2-cochains and the spaces Z^2, B^2, H^2 with one-dimensional
//! trivial coefficients.
//!
//! A cochain is a pair (phi, omega): phi a skew-symmetric bilinear form
//! given by its matrix, omega a function given by its basis values and
//! extended semilinearly. The basis routines require nilpotency class
//! <= p-2, where the star-property correction terms provably vanish (their
//! inner brackets have length p-1); the vanishing is still re-checked on
//! every produced basis element. star_check itself computes the correction
//! sum literally and is valid in any class.

use crate::field::{Fe, Field};
use crate::liealg::{pair_index, pairs, LieAlgebra};
use crate::matrix::{Mat, Subspace};
use crate::restricted::RestrictedAlgebra;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain2 {
    pub phi: Mat,
    pub omega: Vec<Fe>,
}

/// Length of the flattened coordinate vector: phi entries (i < j,
/// lexicographic) followed by the omega values.
pub fn flat_len(n: usize) -> usize {
    n * (n - 1) / 2 + n
}

impl Cochain2 {
    pub fn zero(n: usize) -> Cochain2 {
        Cochain2 { phi: Mat::zeros(n, n), omega: vec![0; n] }
    }

    /// Construct from sparse phi entries ((i, j), c) with i < j and a
    /// sparse omega list (i, c), all 0-based.
    pub fn from_sparse(
        f: &Field,
        n: usize,
        phi: &[((usize, usize), Fe)],
        omega: &[(usize, Fe)],
    ) -> Cochain2 {
        let mut c = Cochain2::zero(n);
        for &((i, j), v) in phi {
            assert!(i < j && j < n);
            c.phi[(i, j)] = v;
            c.phi[(j, i)] = f.neg(v);
        }
        for &(i, v) in omega {
            c.omega[i] = v;
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.omega.iter().all(|&c| c == 0)
    }

    pub fn flatten(&self) -> Vec<Fe> {
        let n = self.dim();
        let mut v = Vec::with_capacity(flat_len(n));
        for (i, j) in pairs(n) {
            v.push(self.phi[(i, j)]);
        }
        v.extend_from_slice(&self.omega);
        v
    }

    pub fn from_flat(f: &Field, n: usize, flat: &[Fe]) -> Cochain2 {
        assert!(flat.len() == flat_len(n));
        let mut c = Cochain2::zero(n);
        for (i, j) in pairs(n) {
            let v = flat[pair_index(n, i, j)];
            c.phi[(i, j)] = v;
            c.phi[(j, i)] = f.neg(v);
        }
        c.omega.copy_from_slice(&flat[n * (n - 1) / 2..]);
        c
    }

    /// phi(u, v) for arbitrary vectors.
    pub fn eval_phi(&self, f: &Field, u: &[Fe], v: &[Fe]) -> Fe {
        let n = self.dim();
        let mut out = 0;
        for (i, j) in pairs(n) {
            let c = self.phi[(i, j)];
            if c != 0 {
                let d = f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i]));
                out = f.add(out, f.mul(c, d));
            }
        }
        out
    }

    /// omega(v) via the semilinear extension from basis values.
    pub fn eval_omega(&self, f: &Field, v: &[Fe]) -> Fe {
        let mut out = 0;
        for (i, &c) in self.omega.iter().enumerate() {
            if c != 0 && v[i] != 0 {
                out = f.add(out, f.mul(f.frobenius(v[i]), c));
            }
        }
        out
    }

    pub fn add(&self, other: &Cochain2, f: &Field) -> Cochain2 {
        Cochain2 {
            phi: self.phi.add(&other.phi, f),
            omega: self
                .omega
                .iter()
                .zip(&other.omega)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Cochain2 {
        Cochain2 {
            phi: self.phi.scale(c, f),
            omega: self.omega.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn to_json(&self, f: &Field) -> serde_json::Value {
        let n = self.dim();
        let phi: Vec<Vec<serde_json::Value>> = (0..n)
            .map(|i| (0..n).map(|j| f.elem_to_json(self.phi[(i, j)])).collect())
            .collect();
        let omega: Vec<serde_json::Value> =
            self.omega.iter().map(|&c| f.elem_to_json(c)).collect();
        serde_json::json!({ "phi": phi, "omega": omega })
    }

    pub fn from_json(f: &Field, v: &serde_json::Value) -> Result<Cochain2> {
        let phi = v
            .get("phi")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::InvalidInput("cochain missing phi".into()))?;
        let n = phi.len();
        let mut c = Cochain2::zero(n);
        for (i, row) in phi.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::InvalidInput("phi rows must be arrays".into()))?;
            if row.len() != n {
                return Err(Error::InvalidInput("phi must be square".into()));
            }
            for (j, val) in row.iter().enumerate() {
                c.phi[(i, j)] = f.elem_from_json(val)?;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if c.phi[(i, j)] != f.neg(c.phi[(j, i)]) {
                    return Err(Error::InvalidInput("phi is not skew-symmetric".into()));
                }
            }
        }
        let omega = v
            .get("omega")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::InvalidInput("cochain missing omega".into()))?;
        if omega.len() != n {
            return Err(Error::InvalidInput("omega length mismatch".into()));
        }
        for (i, val) in omega.iter().enumerate() {
            c.omega[i] = f.elem_from_json(val)?;
        }
        Ok(c)
    }
}

/// The coboundary of a linear functional psi (given by basis values):
/// phi(x_i, x_j) = psi([x_i, x_j]), omega(x_i) = psi(x_i^{[p]}).
pub fn delta1(r: &RestrictedAlgebra, psi: &[Fe]) -> Cochain2 {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    assert!(psi.len() == n);
    let apply = |v: &[Fe]| -> Fe {
        let mut out = 0;
        for k in 0..n {
            if v[k] != 0 && psi[k] != 0 {
                out = f.add(out, f.mul(psi[k], v[k]));
            }
        }
        out
    };
    let mut c = Cochain2::zero(n);
    for (i, j) in pairs(n) {
        let v = apply(&r.alg.bracket_basis(i, j));
        c.phi[(i, j)] = v;
        c.phi[(j, i)] = f.neg(v);
    }
    for i in 0..n {
        c.omega[i] = apply(&r.pmap.images[i]);
    }
    c
}

/// delta^2 phi at all basis triples; the list of nonzero values
/// phi([x_i,x_j],x_k) + phi([x_j,x_k],x_i) + phi([x_k,x_i],x_j).
pub fn delta2_residual(l: &LieAlgebra, c: &Cochain2) -> Vec<((usize, usize, usize), Fe)> {
    let f = &*l.field;
    let n = l.dim;
    let mut out = Vec::new();
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        for j in i + 1..n {
            let mut ej = vec![0; n];
            ej[j] = 1;
            for k in j + 1..n {
                let mut ek = vec![0; n];
                ek[k] = 1;
                let v = f.add(
                    f.add(
                        c.eval_phi(f, &l.bracket(&ei, &ej), &ek),
                        c.eval_phi(f, &l.bracket(&ej, &ek), &ei),
                    ),
                    c.eval_phi(f, &l.bracket(&ek, &ei), &ej),
                );
                if v != 0 {
                    out.push(((i, j, k), v));
                }
            }
        }
    }
    out
}

/// The literal star-property correction sum for the pair (x, y):
/// sum over sequences (x_1,...,x_p) with entries in {x, y}, x_1 = x,
/// x_2 = y, of (1/#x) phi([x_1,...,x_{p-1}], x_p), #x = number of x's.
pub fn star_correction(r: &RestrictedAlgebra, c: &Cochain2, x: &[Fe], y: &[Fe]) -> Fe {
    let f = &*r.alg.field;
    let p = f.spec.p as usize;
    let mut total = 0;
    for mask in 0..(1u32 << (p - 2)) {
        // Positions 3..=p of the sequence; bit t set means entry x.
        let mut seq_is_x = vec![false; p];
        seq_is_x[0] = true;
        for t in 0..p - 2 {
            seq_is_x[t + 2] = (mask >> t) & 1 == 1;
        }
        let count_x = seq_is_x.iter().filter(|&&b| b).count();
        let mut bracket = x.to_vec();
        for is_x in seq_is_x.iter().take(p - 1).skip(1) {
            bracket = r.alg.bracket(&bracket, if *is_x { x } else { y });
        }
        let last = if seq_is_x[p - 1] { x } else { y };
        let val = c.eval_phi(f, &bracket, last);
        if val != 0 {
            let w = f.inv(f.from_int(count_x as i64));
            total = f.add(total, f.mul(w, val));
        }
    }
    total
}

/// Check the star-property of omega with respect to phi: semilinearity on
/// scalar multiples of basis vectors, and the addition law with literal
/// correction terms on all basis pairs.
pub fn star_check(r: &RestrictedAlgebra, c: &Cochain2) -> bool {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    for i in 0..n {
        for s in 0..f.q as Fe {
            let mut v = vec![0; n];
            v[i] = s;
            if c.eval_omega(f, &v) != f.mul(f.frobenius(s), c.omega[i]) {
                return false;
            }
        }
    }
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut ej = vec![0; n];
            ej[j] = 1;
            let sum: Vec<Fe> = (0..n).map(|k| f.add(ei[k], ej[k])).collect();
            let lhs = c.eval_omega(f, &sum);
            let rhs = f.add(
                f.add(c.eval_omega(f, &ei), c.eval_omega(f, &ej)),
                star_correction(r, c, &ei, &ej),
            );
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn require_basis_regime(r: &RestrictedAlgebra) -> Result<()> {
    let p = r.alg.field.spec.p as usize;
    if r.class() + 2 > p {
        return Err(Error::UnsupportedRegime(format!(
            "cochain bases require class <= p-2; class = {}, p = {p}",
            r.class()
        )));
    }
    Ok(())
}

/// Accumulate into `row` the flat-phi coefficients of the functional
/// phi -> phi(u, v).
fn phi_row(f: &Field, n: usize, u: &[Fe], v: &[Fe], row: &mut [Fe]) {
    for (a, b) in pairs(n) {
        let c = f.sub(f.mul(u[a], v[b]), f.mul(u[b], v[a]));
        if c != 0 {
            let idx = pair_index(n, a, b);
            row[idx] = f.add(row[idx], c);
        }
    }
}

/// Z^2 as a subspace of the flat coordinate space: the solution set of
/// delta^2 phi = 0 plus phi(x_i, y^{[p]}) = 0 (the bracket side of the
/// p-compatibility constraint vanishes in this regime); omega is free.
pub fn z2_subspace(r: &RestrictedAlgebra) -> Result<Subspace> {
    require_basis_regime(r)?;
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let cols = flat_len(n);
    let npairs = n * (n - 1) / 2;
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    // delta^2 constraints at basis triples.
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        for j in i + 1..n {
            let mut ej = vec![0; n];
            ej[j] = 1;
            for k in j + 1..n {
                let mut ek = vec![0; n];
                ek[k] = 1;
                let mut row = vec![0; cols];
                phi_row(f, n, &r.alg.bracket(&ei, &ej), &ek, &mut row[..npairs]);
                phi_row(f, n, &r.alg.bracket(&ej, &ek), &ei, &mut row[..npairs]);
                phi_row(f, n, &r.alg.bracket(&ek, &ei), &ej, &mut row[..npairs]);
                if row.iter().any(|&c| c != 0) {
                    rows.push(row);
                }
            }
        }
    }
    // p-compatibility: phi(x_i, w) = 0 for w spanning the p-map images.
    let img_span = Subspace::span(&r.pmap.images, n, f);
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        for w in img_span.basis_vectors() {
            let mut row = vec![0; cols];
            phi_row(f, n, &ei, &w, &mut row[..npairs]);
            if row.iter().any(|&c| c != 0) {
                rows.push(row);
            }
        }
    }
    let space = if rows.is_empty() {
        Subspace::full(cols)
    } else {
        let kernel = Mat::from_rows(rows).kernel_basis(f);
        Subspace::span(&kernel, cols, f)
    };
    // Re-verify the regime assumption on every basis element.
    for flat in space.basis_vectors() {
        let c = Cochain2::from_flat(f, n, &flat);
        assert!(star_check(r, &c), "correction terms fail to vanish");
        assert!(delta2_residual(&r.alg, &c).is_empty());
    }
    Ok(space)
}

/// B^2 as a subspace of the flat coordinate space: the image of
/// psi -> (delta^1 psi, psi-tilde).
pub fn b2_subspace(r: &RestrictedAlgebra) -> Result<Subspace> {
    require_basis_regime(r)?;
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let mut gens = Vec::with_capacity(n);
    for i in 0..n {
        let mut psi = vec![0; n];
        psi[i] = 1;
        gens.push(delta1(r, &psi).flatten());
    }
    Ok(Subspace::span(&gens, flat_len(n), f))
}

pub fn z2_basis(r: &RestrictedAlgebra) -> Result<Vec<Cochain2>> {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    Ok(z2_subspace(r)?
        .basis_vectors()
        .iter()
        .map(|v| Cochain2::from_flat(f, n, v))
        .collect())
}

pub fn b2_basis(r: &RestrictedAlgebra) -> Result<Vec<Cochain2>> {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    Ok(b2_subspace(r)?
        .basis_vectors()
        .iter()
        .map(|v| Cochain2::from_flat(f, n, v))
        .collect())
}

/// Representatives of H^2: the echelon basis vectors of Z^2 that extend a
/// basis of B^2, kept in order.
pub fn h2_basis(r: &RestrictedAlgebra) -> Result<Vec<Cochain2>> {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let z2 = z2_subspace(r)?;
    let b2 = b2_subspace(r)?;
    let mut grown = b2.clone();
    let mut reps = Vec::new();
    for v in z2.basis_vectors() {
        if !grown.contains(&v, f) {
            grown = grown.sum(&Subspace::span(&[v.clone()], flat_len(n), f), f);
            reps.push(Cochain2::from_flat(f, n, &v));
        }
    }
    assert_eq!(reps.len(), z2.dim() - b2.dim());
    Ok(reps)
}

/// (dim Z^2, dim B^2, dim H^2).
pub fn cohomology_dims(r: &RestrictedAlgebra) -> Result<(usize, usize, usize)> {
    let z = z2_subspace(r)?.dim();
    let b = b2_subspace(r)?.dim();
    Ok((z, b, z - b))
}

/// Full cocycle-membership check of a single cochain: delta^2 phi = 0,
/// p-compatibility phi(x, y^{[p]}) = phi([x,y,...,y],y) on basis pairs
/// (literal bracket), and the star-property.
pub fn is_z2_member(r: &RestrictedAlgebra, c: &Cochain2) -> bool {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let p = f.spec.p as usize;
    if !delta2_residual(&r.alg, c).is_empty() {
        return false;
    }
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        for j in 0..n {
            let mut ej = vec![0; n];
            ej[j] = 1;
            let lhs = c.eval_phi(f, &ei, &r.pmap.images[j]);
            let mut tapped = ei.clone();
            for _ in 0..p - 1 {
                tapped = r.alg.bracket(&tapped, &ej);
            }
            let rhs = c.eval_phi(f, &tapped, &ej);
            if lhs != rhs {
                return false;
            }
        }
    }
    star_check(r, c)
}

/// Split a Z^2(L, M)-element, given componentwise, into its coordinate
/// cochains, each of which must individually lie in Z^2(L, F).
pub fn components(r: &RestrictedAlgebra, comps: &[Cochain2]) -> Result<Vec<Cochain2>> {
    for (s, c) in comps.iter().enumerate() {
        if c.dim() != r.alg.dim {
            return Err(Error::InvalidInput(format!(
                "component {s} has dimension {} but the algebra has {}",
                c.dim(),
                r.alg.dim
            )));
        }
        if !is_z2_member(r, c) {
            return Err(Error::InvalidInput(format!(
                "component {s} is not a cocycle"
            )));
        }
    }
    Ok(comps.to_vec())
}
