//! Isomorphism testing for restricted Lie algebras.
//!
//! [`decide_iso`] runs a three-phase decision procedure: cheap structural
//! fingerprints, then backtracking over images of a minimal generating set
//! with constraint propagation, and finally either an exhaustion certificate
//! or an explicit budget-bounded "inconclusive". Every positive answer carries
//! a witness matrix that [`verify_iso_witness`] re-checks independently.
//!
//! The search maintains a partial homomorphism as a pair-echelon: each row
//! stores a source vector (reduced echelon across rows) together with its
//! prescribed image. Adding a pair propagates brackets and p-th powers of all
//! known rows until a fixed point, rejecting branches that become inconsistent
//! or visibly non-injective. Candidate images for the next generator are cut
//! down by solving the stacked linear system coming from brackets (and, over
//! prime fields, p-th powers) with already-determined targets.
//!
//! Abelian algebras are dispatched to the rank-sequence criterion instead:
//! two p-nilpotent abelian restricted algebras over a prime field are
//! isomorphic iff their p-map matrices have identical rank sequences, and a
//! witness is assembled from matching Jordan chain bases.

use crate::extension::is_restricted_iso;
use crate::field::{Fe, Field};
use crate::liealg::LieAlgebra;
use crate::matrix::{Mat, Subspace};
use crate::restricted::{fingerprint, is_p_nilpotent, Fingerprint, PMap, RestrictedAlgebra};
use crate::{Error, Result};

/// Whether `t` is an isomorphism of restricted Lie algebras from `a` to `b`.
/// Checks squareness, invertibility, bracket transport on all basis pairs,
/// and p-map transport on all basis vectors.
pub fn verify_iso_witness(a: &RestrictedAlgebra, b: &RestrictedAlgebra, t: &Mat) -> bool {
    a.dim() == b.dim()
        && a.field().spec == b.field().spec
        && t.rows == a.dim()
        && t.cols == a.dim()
        && is_restricted_iso(a, b, t)
}

/// Outcome of [`decide_iso`].
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    /// Isomorphic, with a verified witness matrix.
    Yes(Mat),
    /// Not isomorphic, with the reason.
    No(NonIsoCertificate),
    /// The search exceeded its node budget before reaching a verdict.
    Inconclusive(String),
}

/// Evidence attached to a negative isomorphism verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonIsoCertificate {
    /// Structural invariants differ.
    Fingerprint { left: Fingerprint, right: Fingerprint },
    /// Abelian p-map rank sequences differ.
    RankSequences { left: Vec<usize>, right: Vec<usize> },
    /// Minimal generating sets have different sizes.
    GeneratorCounts { left: usize, right: usize },
    /// The backtracking search exhausted every assignment.
    Exhausted { nodes: u64 },
}

/// Basis indices of a canonical minimal generating set: the first basis
/// vectors completing the span of the derived subalgebra and all basis p-th
/// powers to the whole algebra.
pub fn generator_indices(r: &RestrictedAlgebra) -> Vec<usize> {
    let f = &**r.field();
    let n = r.dim();
    let mut vecs = r.alg.derived_subalgebra().basis_vectors();
    vecs.extend(r.pmap.images.iter().cloned());
    let mut frattini = Subspace::span(&vecs, n, f);
    let mut gens = Vec::new();
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        if !frattini.contains(&ei, f) {
            gens.push(i);
            frattini = frattini.sum(&Subspace::span(&[ei], n, f), f);
        }
    }
    gens
}

/// Matrix of the p-map on the chosen basis (column j = x_j^[p]).
fn pmap_matrix(r: &RestrictedAlgebra) -> Mat {
    let n = r.dim();
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] = r.pmap.images[j][i];
        }
    }
    m
}

/// Rank sequence rank(P), rank(P^2), ... of the p-map matrix of an abelian
/// restricted algebra over a prime field, ending with the first zero rank.
pub fn abelian_rank_sequence(r: &RestrictedAlgebra) -> Result<Vec<usize>> {
    if r.alg.derived_subalgebra().dim() != 0 {
        return Err(Error::InvalidInput("rank sequences apply to abelian algebras only".into()));
    }
    if r.field().degree() != 1 {
        return Err(Error::UnsupportedRegime(
            "abelian classification over extension fields is not supported".into(),
        ));
    }
    let f = &**r.field();
    let p = pmap_matrix(r);
    let mut seq = Vec::new();
    let mut q = p.clone();
    for _ in 0..r.dim() {
        let rk = q.rank(f);
        seq.push(rk);
        if rk == 0 {
            return Ok(seq);
        }
        q = q.mul(&p, f);
    }
    Err(Error::UnsupportedRegime("p-map is not nilpotent".into()))
}

/// Whether two abelian restricted algebras over the same prime field are
/// isomorphic: true iff the p-map rank sequences coincide.
pub fn abelian_iso(r1: &RestrictedAlgebra, r2: &RestrictedAlgebra) -> Result<bool> {
    if r1.dim() != r2.dim() || r1.field().spec != r2.field().spec {
        return Err(Error::InvalidInput("algebras have different dimension or field".into()));
    }
    Ok(abelian_rank_sequence(r1)? == abelian_rank_sequence(r2)?)
}

/// Jordan chain basis of a nilpotent matrix: columns are grouped into chains
/// v, Pv, ..., P^(h-1)v, chains ordered by decreasing height. Returns None if
/// the matrix is not nilpotent.
fn jordan_chain_basis(f: &Field, p: &Mat) -> Option<Mat> {
    let n = p.rows;
    let mut pows = vec![Mat::identity(n)];
    while !pows.last().unwrap().is_zero() {
        if pows.len() > n {
            return None;
        }
        let next = pows.last().unwrap().mul(p, f);
        pows.push(next);
    }
    let m = pows.len() - 1;
    if m == 0 {
        return Some(Mat::identity(n));
    }
    let kernels: Vec<Subspace> = (0..=m)
        .map(|k| Subspace::span(&pows[k].kernel_basis(f), n, f))
        .collect();
    let mut starters: Vec<(Vec<Fe>, usize)> = Vec::new();
    for k in (1..=m).rev() {
        // Height-k starters complete ker P^(k-1) + P ker P^(k+1) inside ker P^k.
        let upper = &kernels[(k + 1).min(m)];
        let mut avoid_vecs = kernels[k - 1].basis_vectors();
        for v in upper.basis_vectors() {
            avoid_vecs.push(p.apply(&v, f));
        }
        let mut avoid = Subspace::span(&avoid_vecs, n, f);
        for v in kernels[k].basis_vectors() {
            let red = avoid.reduce(&v, f);
            if red.iter().any(|&c| c != 0) {
                avoid = avoid.sum(&Subspace::span(&[red.clone()], n, f), f);
                starters.push((red, k));
            }
        }
    }
    starters.sort_by(|a, b| b.1.cmp(&a.1));
    let mut cols: Vec<Vec<Fe>> = Vec::with_capacity(n);
    for (s, h) in &starters {
        let mut v = s.clone();
        for _ in 0..*h {
            cols.push(v.clone());
            v = p.apply(&v, f);
        }
    }
    if cols.len() != n {
        return None;
    }
    let mut b = Mat::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            b[(i, j)] = c[i];
        }
    }
    b.inverse(f).map(|_| b)
}

fn abelian_witness(r1: &RestrictedAlgebra, r2: &RestrictedAlgebra) -> Mat {
    let f = &**r1.field();
    let b1 = jordan_chain_basis(f, &pmap_matrix(r1)).expect("nilpotent p-map");
    let b2 = jordan_chain_basis(f, &pmap_matrix(r2)).expect("nilpotent p-map");
    b2.mul(&b1.inverse(f).expect("chain basis is invertible"), f)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum AddOutcome {
    Added,
    Dependent,
    Contradiction,
}

/// Partial homomorphism: rows (v, w) assert T(v) = w, with the v-side kept in
/// reduced echelon form and the w-side mirrored through every row operation.
/// A separate image echelon rejects extensions that stop being injective.
#[derive(Clone)]
struct PartialHom {
    n: usize,
    rows: Vec<(Vec<Fe>, Vec<Fe>)>,
    pivots: Vec<usize>,
    img: Vec<(usize, Vec<Fe>)>,
}

impl PartialHom {
    fn new(n: usize) -> PartialHom {
        PartialHom { n, rows: Vec::new(), pivots: Vec::new(), img: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Image of `v` when `v` lies in the domain span.
    fn image_of(&self, f: &Field, v: &[Fe]) -> Option<Vec<Fe>> {
        let mut v = v.to_vec();
        let mut acc = vec![0; self.n];
        for (r, &pv) in self.pivots.iter().enumerate() {
            let c = v[pv];
            if c != 0 {
                let (vr, wr) = &self.rows[r];
                for k in 0..self.n {
                    v[k] = f.sub(v[k], f.mul(c, vr[k]));
                    acc[k] = f.add(acc[k], f.mul(c, wr[k]));
                }
            }
        }
        if v.iter().all(|&c| c == 0) {
            Some(acc)
        } else {
            None
        }
    }

    fn add_pair(&mut self, f: &Field, v: &[Fe], w: &[Fe]) -> AddOutcome {
        let mut v = v.to_vec();
        let mut w = w.to_vec();
        for (r, &pv) in self.pivots.iter().enumerate() {
            let c = v[pv];
            if c != 0 {
                let (vr, wr) = &self.rows[r];
                for k in 0..self.n {
                    v[k] = f.sub(v[k], f.mul(c, vr[k]));
                    w[k] = f.sub(w[k], f.mul(c, wr[k]));
                }
            }
        }
        let piv = match v.iter().position(|&c| c != 0) {
            Some(p) => p,
            None => {
                return if w.iter().all(|&c| c == 0) {
                    AddOutcome::Dependent
                } else {
                    AddOutcome::Contradiction
                };
            }
        };
        // A fresh source direction must map to a fresh image direction.
        let mut wimg = w.clone();
        for (pw, row) in &self.img {
            let c = wimg[*pw];
            if c != 0 {
                for k in 0..self.n {
                    wimg[k] = f.sub(wimg[k], f.mul(c, row[k]));
                }
            }
        }
        let wpiv = match wimg.iter().position(|&c| c != 0) {
            Some(p) => p,
            None => return AddOutcome::Contradiction,
        };
        let winv = f.inv(wimg[wpiv]);
        for k in 0..self.n {
            wimg[k] = f.mul(wimg[k], winv);
        }
        let ipos = self.img.partition_point(|(pw, _)| *pw < wpiv);
        self.img.insert(ipos, (wpiv, wimg));
        // Normalize and fully reduce the existing rows against the new one.
        let inv = f.inv(v[piv]);
        for k in 0..self.n {
            v[k] = f.mul(v[k], inv);
            w[k] = f.mul(w[k], inv);
        }
        for (vr, wr) in self.rows.iter_mut() {
            let c = vr[piv];
            if c != 0 {
                for k in 0..self.n {
                    vr[k] = f.sub(vr[k], f.mul(c, v[k]));
                    wr[k] = f.sub(wr[k], f.mul(c, w[k]));
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, (v, w));
        AddOutcome::Added
    }

    /// Full-rank extraction: column i of the result is the image of x_i.
    fn to_matrix(&self) -> Mat {
        assert!(self.rank() == self.n, "homomorphism is not fully determined");
        let mut t = Mat::zeros(self.n, self.n);
        for (r, (_, w)) in self.rows.iter().enumerate() {
            for i in 0..self.n {
                t[(i, self.pivots[r])] = w[i];
            }
        }
        t
    }
}

/// Adds T(v) = w and closes under brackets and p-th powers of all rows.
/// Returns false when the branch is contradictory.
fn extend(
    hom: &mut PartialHom,
    r1: &RestrictedAlgebra,
    r2: &RestrictedAlgebra,
    v: Vec<Fe>,
    w: Vec<Fe>,
) -> bool {
    let f = &**r1.field();
    let mut queue = vec![(v, w)];
    while let Some((v, w)) = queue.pop() {
        match hom.add_pair(f, &v, &w) {
            AddOutcome::Contradiction => return false,
            AddOutcome::Dependent => {}
            AddOutcome::Added => {
                for (vr, wr) in hom.rows.clone() {
                    let bv = r1.alg.bracket(&v, &vr);
                    let bw = r2.alg.bracket(&w, &wr);
                    if bv.iter().any(|&c| c != 0) || bw.iter().any(|&c| c != 0) {
                        queue.push((bv, bw));
                    }
                }
                let pv = r1.eval_unchecked(&v);
                let pw = r2.eval_unchecked(&w);
                if pv.iter().any(|&c| c != 0) || pw.iter().any(|&c| c != 0) {
                    queue.push((pv, pw));
                }
            }
        }
    }
    true
}

/// Particular solution and kernel basis for the image of generator `g`, from
/// the stacked bracket constraints (and, over prime fields, the p-th power
/// constraint) with already-determined right-hand sides. None = inconsistent.
fn candidate_space(
    hom: &PartialHom,
    r1: &RestrictedAlgebra,
    r2: &RestrictedAlgebra,
    g: usize,
) -> Option<(Vec<Fe>, Vec<Vec<Fe>>)> {
    let f = &**r1.field();
    let n = r1.dim();
    let mut eg = vec![0; n];
    eg[g] = 1;
    let mut arows: Vec<Vec<Fe>> = Vec::new();
    let mut rhs: Vec<Fe> = Vec::new();
    for (vr, wr) in &hom.rows {
        let b = r1.alg.bracket(&eg, vr);
        if let Some(c) = hom.image_of(f, &b) {
            // [w, w_r] = c, i.e. ad(w_r) w = -c.
            let adm = r2.alg.ad_matrix(wr);
            for i in 0..n {
                arows.push(adm.row(i).to_vec());
                rhs.push(f.neg(c[i]));
            }
        }
    }
    if f.degree() == 1 && !(r1.pmap.is_trivial() && r2.pmap.is_trivial()) {
        if let Some(c) = hom.image_of(f, &r1.pmap.images[g]) {
            let p2 = pmap_matrix(r2);
            for i in 0..n {
                arows.push(p2.row(i).to_vec());
                rhs.push(c[i]);
            }
        }
    }
    if arows.is_empty() {
        let ker = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        return Some((vec![0; n], ker));
    }
    let a = Mat::from_rows(arows);
    let x0 = a.solve(&rhs, f)?;
    Some((x0, a.kernel_basis(f)))
}

struct SearchCtx<'a> {
    r1: &'a RestrictedAlgebra,
    r2: &'a RestrictedAlgebra,
    budget: u64,
    nodes: u64,
}

/// Depth-first search over generator images. With `count` absent, stops at
/// the first verified witness; otherwise counts every verified completion.
fn search(ctx: &mut SearchCtx, hom: &PartialHom, count: &mut Option<u128>) -> Result<Option<Mat>> {
    let f = &**ctx.r1.field();
    let n = ctx.r1.dim();
    let next = (0..n).find(|&i| {
        let mut ei = vec![0; n];
        ei[i] = 1;
        hom.image_of(f, &ei).is_none()
    });
    let g = match next {
        None => {
            let t = hom.to_matrix();
            if is_restricted_iso(ctx.r1, ctx.r2, &t) {
                if let Some(c) = count.as_mut() {
                    *c += 1;
                    return Ok(None);
                }
                return Ok(Some(t));
            }
            return Ok(None);
        }
        Some(g) => g,
    };
    let (x0, ker) = match candidate_space(hom, ctx.r1, ctx.r2, g) {
        Some(s) => s,
        None => return Ok(None),
    };
    let elems = f.canonical_elements();
    let q = elems.len();
    let mut idx = vec![0usize; ker.len()];
    let mut eg = vec![0; n];
    eg[g] = 1;
    loop {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            return Err(Error::BudgetExceeded(format!(
                "isomorphism search exceeded {} nodes",
                ctx.budget
            )));
        }
        let mut w = x0.clone();
        for (t, &i) in idx.iter().enumerate() {
            let c = elems[i];
            if c != 0 {
                for k in 0..n {
                    w[k] = f.add(w[k], f.mul(c, ker[t][k]));
                }
            }
        }
        let mut h2 = hom.clone();
        if extend(&mut h2, ctx.r1, ctx.r2, eg.clone(), w) {
            if let Some(t) = search(ctx, &h2, count)? {
                return Ok(Some(t));
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < q {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Number of Lie algebra automorphisms (ignoring any p-map). Abelian algebras
/// use the general linear group order directly; otherwise the isomorphism
/// search runs self-to-self and counts every completion.
pub fn count_lie_automorphisms(l: &LieAlgebra, budget: u64) -> Result<u128> {
    let f = &*l.field;
    let n = l.dim;
    if l.derived_subalgebra().dim() == 0 {
        let q = f.order() as u128;
        let qn = q.pow(n as u32);
        let mut total: u128 = 1;
        for i in 0..n {
            total *= qn - q.pow(i as u32);
        }
        return Ok(total);
    }
    let r = RestrictedAlgebra::new(l.clone(), PMap::trivial(n));
    let mut ctx = SearchCtx { r1: &r, r2: &r, budget, nodes: 0 };
    let mut count = Some(0u128);
    search(&mut ctx, &PartialHom::new(n), &mut count)?;
    Ok(count.unwrap())
}

/// Three-phase isomorphism decision between restricted Lie algebras over the
/// same field: invariant fingerprints, then backtracking over generator
/// images, then exhaustion. Abelian inputs use the rank-sequence criterion
/// with a Jordan chain witness.
pub fn decide_iso(
    r1: &RestrictedAlgebra,
    r2: &RestrictedAlgebra,
    budget: u64,
) -> Result<IsoVerdict> {
    if r1.dim() != r2.dim() || r1.field().spec != r2.field().spec {
        return Err(Error::InvalidInput("algebras have different dimension or field".into()));
    }
    let f = &**r1.field();
    if r1.class() >= f.p() as usize || r2.class() >= f.p() as usize {
        return Err(Error::UnsupportedRegime(
            "isomorphism search requires nilpotency class < p".into(),
        ));
    }
    // For two abelian inputs the rank sequence is a complete invariant and
    // refines every fingerprint component, so dispatch before fingerprinting.
    if r1.alg.derived_subalgebra().dim() == 0 && r2.alg.derived_subalgebra().dim() == 0 {
        if f.degree() != 1 {
            return Err(Error::UnsupportedRegime(
                "abelian classification over extension fields is not supported".into(),
            ));
        }
        if !is_p_nilpotent(r1).0 || !is_p_nilpotent(r2).0 {
            return Err(Error::UnsupportedRegime("p-map is not nilpotent".into()));
        }
        let s1 = abelian_rank_sequence(r1)?;
        let s2 = abelian_rank_sequence(r2)?;
        if s1 != s2 {
            return Ok(IsoVerdict::No(NonIsoCertificate::RankSequences { left: s1, right: s2 }));
        }
        let t = abelian_witness(r1, r2);
        assert!(verify_iso_witness(r1, r2, &t), "Jordan chain witness failed verification");
        return Ok(IsoVerdict::Yes(t));
    }
    let fp1 = fingerprint(r1);
    let fp2 = fingerprint(r2);
    if fp1 != fp2 {
        return Ok(IsoVerdict::No(NonIsoCertificate::Fingerprint { left: fp1, right: fp2 }));
    }
    let g1 = generator_indices(r1).len();
    let g2 = generator_indices(r2).len();
    if g1 != g2 {
        return Ok(IsoVerdict::No(NonIsoCertificate::GeneratorCounts { left: g1, right: g2 }));
    }
    let mut ctx = SearchCtx { r1, r2, budget, nodes: 0 };
    match search(&mut ctx, &PartialHom::new(r1.dim()), &mut None) {
        Ok(Some(t)) => {
            assert!(verify_iso_witness(r1, r2, &t), "search witness failed verification");
            Ok(IsoVerdict::Yes(t))
        }
        Ok(None) => Ok(IsoVerdict::No(NonIsoCertificate::Exhausted { nodes: ctx.nodes })),
        Err(Error::BudgetExceeded(msg)) => Ok(IsoVerdict::Inconclusive(msg)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::FieldSpec;
    use crate::liealg::base_algebra;

    fn field(p: u32) -> Arc<Field> {
        Arc::new(Field::new(FieldSpec::prime(p)).unwrap())
    }

    fn trivial(name: &str, p: u32) -> RestrictedAlgebra {
        let l = base_algebra(name, field(p)).unwrap();
        let pm = PMap::trivial(l.dim);
        RestrictedAlgebra::new(l, pm)
    }

    fn l43_with_x2_power(p: u32, xi: Fe) -> RestrictedAlgebra {
        let l = base_algebra("L4_3", field(p)).unwrap();
        let mut img = vec![0; 4];
        img[3] = xi;
        RestrictedAlgebra::new(l, PMap::from_sparse(4, &[(1, img)]))
    }

    fn abelian4(p: u32, images: &[(usize, Vec<Fe>)]) -> RestrictedAlgebra {
        let l = base_algebra("L4_1", field(p)).unwrap();
        RestrictedAlgebra::new(l, PMap::from_sparse(4, images))
    }

    #[test]
    fn automorphism_counts_small_algebras() {
        let l32_f5 = base_algebra("L3_2", field(5)).unwrap();
        assert_eq!(count_lie_automorphisms(&l32_f5, 10_000_000).unwrap(), 12_000);
        let l32_f7 = base_algebra("L3_2", field(7)).unwrap();
        assert_eq!(count_lie_automorphisms(&l32_f7, 10_000_000).unwrap(), 98_784);
        let l43 = base_algebra("L4_3", field(5)).unwrap();
        assert_eq!(count_lie_automorphisms(&l43, 20_000_000).unwrap(), 50_000);
    }

    #[test]
    fn automorphism_count_abelian_formula() {
        let a4 = base_algebra("L4_1", field(5)).unwrap();
        assert_eq!(count_lie_automorphisms(&a4, 10).unwrap(), 116_064_000_000);
        let a5 = base_algebra("L5_1", field(7)).unwrap();
        let big = count_lie_automorphisms(&a5, 10).unwrap();
        assert!(big > u64::MAX as u128);
        assert_eq!(big, 1_122_211_189_922_928_537_600);
    }

    #[test]
    fn automorphism_count_budget() {
        let l43 = base_algebra("L4_3", field(5)).unwrap();
        assert!(matches!(
            count_lie_automorphisms(&l43, 1_000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn self_isomorphism_yields_identity() {
        let r = trivial("L4_3", 5);
        match decide_iso(&r, &r, 1_000_000).unwrap() {
            IsoVerdict::Yes(t) => assert_eq!(t, Mat::identity(4)),
            v => panic!("expected Yes, got {v:?}"),
        }
    }

    #[test]
    fn scaled_pmap_square_pair_isomorphic() {
        // x2^[p] = x4 vs x2^[p] = 4 x4: a square rescaling, hence isomorphic.
        let r1 = l43_with_x2_power(5, 1);
        let r2 = l43_with_x2_power(5, 4);
        match decide_iso(&r1, &r2, 10_000_000).unwrap() {
            IsoVerdict::Yes(t) => assert!(verify_iso_witness(&r1, &r2, &t)),
            v => panic!("expected Yes, got {v:?}"),
        }
        match decide_iso(&r2, &r1, 10_000_000).unwrap() {
            IsoVerdict::Yes(t) => assert!(verify_iso_witness(&r2, &r1, &t)),
            v => panic!("expected Yes, got {v:?}"),
        }
    }

    #[test]
    fn scaled_pmap_nonsquare_pair_exhausts() {
        // x2^[p] = x4 vs x2^[p] = 2 x4: the scaling factor 2 is a non-square
        // mod 5, and every invariant fingerprint agrees, so the negative
        // verdict must come from exhausting the search.
        let r1 = l43_with_x2_power(5, 1);
        let r2 = l43_with_x2_power(5, 2);
        assert_eq!(fingerprint(&r1), fingerprint(&r2));
        match decide_iso(&r1, &r2, 50_000_000).unwrap() {
            IsoVerdict::No(NonIsoCertificate::Exhausted { nodes }) => assert!(nodes > 0),
            v => panic!("expected exhausted No, got {v:?}"),
        }
    }

    #[test]
    fn fingerprint_separates_different_classes() {
        let r1 = trivial("L4_2", 5);
        let r2 = trivial("L4_3", 5);
        match decide_iso(&r1, &r2, 1_000_000).unwrap() {
            IsoVerdict::No(NonIsoCertificate::Fingerprint { .. }) => {}
            v => panic!("expected fingerprint No, got {v:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let r1 = trivial("L3_2", 5);
        let r2 = trivial("L4_3", 5);
        assert!(matches!(decide_iso(&r1, &r2, 1_000), Err(Error::InvalidInput(_))));
        let r3 = trivial("L4_3", 7);
        assert!(matches!(decide_iso(&r2, &r3, 1_000), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let r = trivial("L4_3", 5);
        match decide_iso(&r, &r, 3).unwrap() {
            IsoVerdict::Inconclusive(_) => {}
            v => panic!("expected Inconclusive, got {v:?}"),
        }
    }

    #[test]
    fn witness_verification_explicit_matrices() {
        let r1 = l43_with_x2_power(5, 1);
        let r2 = l43_with_x2_power(5, 4);
        let mut good = Mat::zeros(4, 4);
        good[(0, 0)] = 2;
        good[(1, 1)] = 1;
        good[(2, 2)] = 2;
        good[(3, 3)] = 4;
        assert!(verify_iso_witness(&r1, &r2, &good));
        let mut bad = Mat::identity(4);
        bad[(3, 3)] = 2;
        assert!(!verify_iso_witness(&r1, &r2, &bad));
        assert!(!verify_iso_witness(&r1, &r2, &Mat::zeros(4, 4)));
    }

    #[test]
    fn abelian_rank_sequences_and_witness() {
        let e = |i: usize| {
            let mut v = vec![0; 4];
            v[i] = 1;
            v
        };
        // Single chain of length 2 starting at x1 vs one starting at x4.
        let r1 = abelian4(5, &[(0, e(1))]);
        let r2 = abelian4(5, &[(3, e(2))]);
        assert_eq!(abelian_rank_sequence(&r1).unwrap(), vec![1, 0]);
        assert!(abelian_iso(&r1, &r2).unwrap());
        match decide_iso(&r1, &r2, 1_000).unwrap() {
            IsoVerdict::Yes(t) => assert!(verify_iso_witness(&r1, &r2, &t)),
            v => panic!("expected Yes, got {v:?}"),
        }
        // Two chains of length 2 have a different rank sequence.
        let r3 = abelian4(5, &[(0, e(1)), (2, e(3))]);
        assert_eq!(abelian_rank_sequence(&r3).unwrap(), vec![2, 0]);
        assert!(!abelian_iso(&r1, &r3).unwrap());
        match decide_iso(&r1, &r3, 1_000).unwrap() {
            IsoVerdict::No(NonIsoCertificate::RankSequences { left, right }) => {
                assert_eq!(left, vec![1, 0]);
                assert_eq!(right, vec![2, 0]);
            }
            v => panic!("expected rank-sequence No, got {v:?}"),
        }
        // A chain of length 3 differs from both.
        let r4 = abelian4(5, &[(0, e(1)), (1, e(2))]);
        assert_eq!(abelian_rank_sequence(&r4).unwrap(), vec![2, 1, 0]);
        assert!(!abelian_iso(&r3, &r4).unwrap());
    }

    #[test]
    fn abelian_guards() {
        let r = trivial("L4_3", 5);
        assert!(matches!(abelian_rank_sequence(&r), Err(Error::InvalidInput(_))));
        let f25 = Arc::new(Field::new(FieldSpec::with_default_modulus(5, 2).unwrap()).unwrap());
        let l = base_algebra("L4_1", f25).unwrap();
        let ra = RestrictedAlgebra::new(l, PMap::trivial(4));
        assert!(matches!(abelian_rank_sequence(&ra), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn generator_indices_skip_frattini() {
        let r = trivial("L4_3", 5);
        assert_eq!(generator_indices(&r), vec![0, 1]);
        let rp = l43_with_x2_power(5, 1);
        assert_eq!(generator_indices(&rp), vec![0, 1]);
        let ab = trivial("L4_1", 5);
        assert_eq!(generator_indices(&ab), vec![0, 1, 2, 3]);
    }
}
