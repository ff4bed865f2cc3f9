//! Restricted (p-)structures on nilpotent Lie algebras.
//!
//! A p-map is stored by its images on the standard basis. Evaluation on
//! general vectors uses semilinearity, which is valid exactly when the
//! nilpotency class is < p (all Jacobson correction terms s_j land in
//! gamma_p = 0); outside that regime evaluation refuses to run. The
//! correction terms themselves are always computed literally from the
//! t-expansion of (ad(tx+y))^{p-1}(x), so verification never assumes the
//! shortcut it is checking.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::field::{Fe, Field};
use crate::liealg::LieAlgebra;
use crate::matrix::{Mat, Subspace};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMap {
    /// images[i] = x_i^{[p]} in standard coordinates.
    pub images: Vec<Vec<Fe>>,
}

impl PMap {
    pub fn trivial(dim: usize) -> PMap {
        PMap { images: vec![vec![0; dim]; dim] }
    }

    /// Build from a sparse list (i, image vector), 0-based; omitted images
    /// are zero.
    pub fn from_sparse(dim: usize, entries: &[(usize, Vec<Fe>)]) -> PMap {
        let mut pm = PMap::trivial(dim);
        for (i, img) in entries {
            assert!(*i < dim && img.len() == dim);
            pm.images[*i] = img.clone();
        }
        pm
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|v| v.iter().all(|&c| c == 0))
    }
}

#[derive(Clone)]
pub struct RestrictedAlgebra {
    pub alg: LieAlgebra,
    pub pmap: PMap,
    pub name: Option<String>,
    class: usize,
}

impl RestrictedAlgebra {
    pub fn new(alg: LieAlgebra, pmap: PMap) -> RestrictedAlgebra {
        assert!(pmap.images.len() == alg.dim);
        for img in &pmap.images {
            assert!(img.len() == alg.dim);
        }
        let class = alg.nilpotency_class();
        RestrictedAlgebra { alg, pmap, name: None, class }
    }

    pub fn with_name(mut self, name: &str) -> RestrictedAlgebra {
        self.name = Some(name.to_string());
        self
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.alg.field
    }

    pub fn dim(&self) -> usize {
        self.alg.dim
    }

    pub fn class(&self) -> usize {
        self.class
    }

    fn check_regime(&self) -> Result<()> {
        let p = self.alg.field.spec.p as usize;
        if self.class >= p {
            return Err(Error::UnsupportedRegime(format!(
                "nilpotency class {} >= p = {p}: semilinear evaluation is not available",
                self.class
            )));
        }
        Ok(())
    }

    /// (sum a_i x_i)^{[p]} = sum a_i^p images[i]; valid for class < p.
    pub fn eval(&self, v: &[Fe]) -> Result<Vec<Fe>> {
        self.check_regime()?;
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &[Fe]) -> Vec<Fe> {
        let f = &*self.alg.field;
        let n = self.alg.dim;
        let mut out = vec![0; n];
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            let a = f.frobenius(v[i]);
            for k in 0..n {
                let c = self.pmap.images[i][k];
                if c != 0 {
                    out[k] = f.add(out[k], f.mul(a, c));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = &*self.alg.field;
        let mut js = self.alg.to_json();
        let mut images = serde_json::Map::new();
        for (i, img) in self.pmap.images.iter().enumerate() {
            if img.iter().all(|&c| c == 0) {
                continue;
            }
            let vec: Vec<serde_json::Value> = img.iter().map(|&c| f.elem_to_json(c)).collect();
            images.insert((i + 1).to_string(), serde_json::Value::Array(vec));
        }
        js["pmap"] = serde_json::json!({ "images": images });
        if let Some(name) = &self.name {
            js["name"] = serde_json::json!(name);
        }
        js
    }

    pub fn from_json(v: &serde_json::Value) -> Result<RestrictedAlgebra> {
        let alg = LieAlgebra::from_json(v)?;
        let f = alg.field.clone();
        let dim = alg.dim;
        let mut pmap = PMap::trivial(dim);
        if let Some(pm) = v.get("pmap") {
            let images = pm
                .get("images")
                .and_then(|x| x.as_object())
                .ok_or_else(|| Error::InvalidInput("pmap missing images object".into()))?;
            for (i_str, img) in images {
                let i: usize = i_str
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad pmap index {i_str}")))?;
                if !(1..=dim).contains(&i) {
                    return Err(Error::InvalidInput(format!("pmap index {i} out of range")));
                }
                let arr = img
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput("pmap image must be an array".into()))?;
                if arr.len() != dim {
                    return Err(Error::InvalidInput(format!(
                        "pmap image for {i} has length {}, expected {dim}",
                        arr.len()
                    )));
                }
                for (k, val) in arr.iter().enumerate() {
                    pmap.images[i - 1][k] = f.elem_from_json(val)?;
                }
            }
        }
        let mut r = RestrictedAlgebra::new(alg, pmap);
        if let Some(name) = v.get("name").and_then(|x| x.as_str()) {
            r.name = Some(name.to_string());
        }
        Ok(r)
    }
}

pub fn eval_pmap(r: &RestrictedAlgebra, v: &[Fe]) -> Result<Vec<Fe>> {
    r.eval(v)
}

/// Scratch space for the t-expansion, reusable across calls.
struct JacobsonBuf {
    comps: Vec<Fe>,
    next: Vec<Fe>,
    sum: Vec<Fe>,
}

impl JacobsonBuf {
    fn new(p: usize, dim: usize) -> JacobsonBuf {
        JacobsonBuf {
            comps: vec![0; p * dim],
            next: vec![0; p * dim],
            sum: vec![0; dim],
        }
    }
}

/// out += [u, v] using only the nonzero structure constants.
fn bracket_into(
    f: &Field,
    support: &[((usize, usize), usize, Fe)],
    u: &[Fe],
    v: &[Fe],
    out: &mut [Fe],
) {
    for &((i, j), k, c) in support {
        let d = f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i]));
        if d != 0 {
            out[k] = f.add(out[k], f.mul(c, d));
        }
    }
}

/// Expand (ad(tx + y))^{p-1}(x) as a polynomial in t; leaves the degree-d
/// coefficient in buf.comps[d*dim..(d+1)*dim].
fn t_expansion(
    f: &Field,
    support: &[((usize, usize), usize, Fe)],
    dim: usize,
    x: &[Fe],
    y: &[Fe],
    buf: &mut JacobsonBuf,
) {
    let p = f.spec.p as usize;
    buf.comps.fill(0);
    buf.comps[..dim].copy_from_slice(x);
    for round in 1..p {
        buf.next.fill(0);
        for d in 0..round {
            let (lo, hi) = buf.next.split_at_mut((d + 1) * dim);
            let cur = &buf.comps[d * dim..(d + 1) * dim];
            // ad(tx+y) sends degree d to t*[x,-] at d+1 plus [y,-] at d.
            bracket_into(f, support, x, cur, &mut hi[..dim]);
            bracket_into(f, support, y, cur, &mut lo[d * dim..]);
        }
        std::mem::swap(&mut buf.comps, &mut buf.next);
    }
}

/// s_j(x, y): j * s_j is the coefficient of t^{j-1} in (ad(tx+y))^{p-1}(x).
pub fn compute_sj(l: &LieAlgebra, x: &[Fe], y: &[Fe], j: usize) -> Vec<Fe> {
    let f = &*l.field;
    let p = f.spec.p as usize;
    assert!((1..p).contains(&j), "s_j defined for 1 <= j <= p-1");
    let support = l.sc_support();
    let mut buf = JacobsonBuf::new(p, l.dim);
    t_expansion(f, &support, l.dim, x, y, &mut buf);
    let jin = f.inv(((j as u32) % f.spec.p) as Fe % f.spec.p as Fe);
    let coeff = &buf.comps[(j - 1) * l.dim..j * l.dim];
    coeff.iter().map(|&c| f.mul(jin, c)).collect()
}

fn jacobson_sum_buf(
    f: &Field,
    support: &[((usize, usize), usize, Fe)],
    dim: usize,
    inv_j: &[Fe],
    x: &[Fe],
    y: &[Fe],
    buf: &mut JacobsonBuf,
) {
    t_expansion(f, support, dim, x, y, buf);
    buf.sum.fill(0);
    let p = f.spec.p as usize;
    for j in 1..p {
        let coeff = &buf.comps[(j - 1) * dim..j * dim];
        for k in 0..dim {
            if coeff[k] != 0 {
                buf.sum[k] = f.add(buf.sum[k], f.mul(inv_j[j], coeff[k]));
            }
        }
    }
}

fn inv_j_table(f: &Field) -> Vec<Fe> {
    let p = f.spec.p as usize;
    let mut t = vec![0; p];
    for j in 1..p {
        t[j] = f.inv(f.from_int(j as i64));
    }
    t
}

/// sum_j s_j(x, y), computed literally.
pub fn jacobson_sum(l: &LieAlgebra, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
    let f = &*l.field;
    let p = f.spec.p as usize;
    let support = l.sc_support();
    let mut buf = JacobsonBuf::new(p, l.dim);
    jacobson_sum_buf(f, &support, l.dim, &inv_j_table(f), x, y, &mut buf);
    buf.sum.clone()
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    pub first_violation: Option<String>,
    pub basis_pairs_checked: u64,
    pub vector_pairs_checked: u64,
    pub exhaustive: bool,
    /// Set when the additivity axiom could not be evaluated (class >= p).
    pub additivity_skipped: bool,
}

/// Check the restricted-structure axioms.
///
/// (a) ad(x_i^{[p]}) = (ad x_i)^p for every basis element;
/// (b) (x+y)^{[p]} = x^{[p]} + y^{[p]} + sum_j s_j(x,y) on all basis pairs,
///     and on all vector pairs when `exhaustive` is set and q^dim is within
///     budget (default 10^8, overridable via RLK_BUDGET);
/// (c) (c x_i)^{[p]} = c^p x_i^{[p]} for every scalar and basis element.
pub fn verify_restricted(r: &RestrictedAlgebra, exhaustive: bool) -> VerifyReport {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let p = f.spec.p as usize;
    let mut report = VerifyReport {
        ok: true,
        first_violation: None,
        basis_pairs_checked: 0,
        vector_pairs_checked: 0,
        exhaustive: false,
        additivity_skipped: false,
    };
    let mut fail = |report: &mut VerifyReport, msg: String| {
        if report.ok {
            report.ok = false;
            report.first_violation = Some(msg);
        }
    };

    // (a) adjoint condition on the basis.
    for i in 0..n {
        let mut ei = vec![0; n];
        ei[i] = 1;
        let lhs = r.alg.ad_matrix(&r.pmap.images[i]);
        let rhs = r.alg.ad_matrix(&ei).pow(p, f);
        if lhs != rhs {
            fail(
                &mut report,
                format!("ad(x_{}^[p]) != (ad x_{})^p", i + 1, i + 1),
            );
            return report;
        }
    }

    if r.class >= p {
        // Semilinear evaluation is unavailable; additivity cannot be framed.
        report.additivity_skipped = true;
        return report;
    }

    // (c) semilinearity on scalar multiples of basis vectors.
    for i in 0..n {
        for c in 0..f.q as Fe {
            let mut v = vec![0; n];
            v[i] = c;
            let lhs = r.eval_unchecked(&v);
            let cp = f.frobenius(c);
            let rhs: Vec<Fe> = r.pmap.images[i].iter().map(|&x| f.mul(cp, x)).collect();
            if lhs != rhs {
                fail(
                    &mut report,
                    format!("(c x_{})^[p] != c^p x_{}^[p] at c index {c}", i + 1, i + 1),
                );
                return report;
            }
        }
    }

    // (b) on basis pairs.
    let support = r.alg.sc_support();
    let inv_j = inv_j_table(f);
    let mut buf = JacobsonBuf::new(p, n);
    for i in 0..n {
        for j in i + 1..n {
            let mut ei = vec![0; n];
            ei[i] = 1;
            let mut ej = vec![0; n];
            ej[j] = 1;
            let sum: Vec<Fe> = (0..n).map(|k| f.add(ei[k], ej[k])).collect();
            let lhs = r.eval_unchecked(&sum);
            jacobson_sum_buf(f, &support, n, &inv_j, &ei, &ej, &mut buf);
            let ok = (0..n).all(|k| {
                lhs[k]
                    == f.add(
                        f.add(r.pmap.images[i][k], r.pmap.images[j][k]),
                        buf.sum[k],
                    )
            });
            report.basis_pairs_checked += 1;
            if !ok {
                fail(
                    &mut report,
                    format!("Jacobson additivity fails at basis pair ({}, {})", i + 1, j + 1),
                );
                return report;
            }
        }
    }

    // (b) on all vector pairs, when requested and affordable.
    let budget = crate::budget_from_env(100_000_000);
    let nvec = (f.q as u128).pow(n as u32);
    if exhaustive && nvec <= budget as u128 {
        report.exhaustive = true;
        let nvec = nvec as usize;
        let q = f.q;
        // Tables of all vectors and all p-map values, indexed by base-q digits.
        let mut vecs: Vec<Fe> = vec![0; nvec * n];
        let mut evals: Vec<Fe> = vec![0; nvec * n];
        for idx in 0..nvec {
            let mut rem = idx;
            for k in 0..n {
                vecs[idx * n + k] = (rem % q) as Fe;
                rem /= q;
            }
            let e = r.eval_unchecked(&vecs[idx * n..(idx + 1) * n]);
            evals[idx * n..(idx + 1) * n].copy_from_slice(&e);
        }
        let powq: Vec<usize> = (0..n).map(|k| q.pow(k as u32)).collect();
        let violation = (0..nvec)
            .into_par_iter()
            .map_init(
                || JacobsonBuf::new(p, n),
                |buf, ui| {
                    let u = &vecs[ui * n..(ui + 1) * n];
                    let eu = &evals[ui * n..(ui + 1) * n];
                    for vi in 0..nvec {
                        let v = &vecs[vi * n..(vi + 1) * n];
                        jacobson_sum_buf(f, &support, n, &inv_j, u, v, buf);
                        let mut uvi = 0usize;
                        for k in 0..n {
                            uvi += f.add(u[k], v[k]) as usize * powq[k];
                        }
                        let euv = &evals[uvi * n..(uvi + 1) * n];
                        let ev = &evals[vi * n..(vi + 1) * n];
                        for k in 0..n {
                            if euv[k] != f.add(f.add(eu[k], ev[k]), buf.sum[k]) {
                                return Some((ui, vi));
                            }
                        }
                    }
                    None
                },
            )
            .find_map_first(|x| x);
        report.vector_pairs_checked = (nvec as u64) * (nvec as u64);
        if let Some((ui, vi)) = violation {
            fail(
                &mut report,
                format!("Jacobson additivity fails at vector pair ({ui}, {vi})"),
            );
        }
    }
    report
}

/// p-nilpotency: iterate V_{k+1} = span of p-map images of a basis of V_k;
/// nilpotent iff the chain reaches zero. Returns (true, n) with n the least
/// exponent with L^{[p]^n} = 0, or (false, 0).
pub fn is_p_nilpotent(r: &RestrictedAlgebra) -> (bool, usize) {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let mut cur = Subspace::full(n);
    for step in 1..=n + 1 {
        let imgs: Vec<Vec<Fe>> =
            cur.basis_vectors().iter().map(|b| r.eval_unchecked(b)).collect();
        let next = Subspace::span(&imgs, n, f);
        if next.dim() == 0 {
            return (true, step);
        }
        if next.dim() == cur.dim() {
            return (false, 0);
        }
        cur = next;
    }
    (false, 0)
}

/// The p-chain L ⊇ L^{[p]} ⊇ L^{[p]^2} ⊇ …: dims of successive image spans,
/// recorded until the first 0 (inclusive) or until the chain stabilizes.
fn p_chain(r: &RestrictedAlgebra) -> Vec<usize> {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let mut dims = Vec::new();
    let mut cur = Subspace::full(n);
    loop {
        let imgs: Vec<Vec<Fe>> =
            cur.basis_vectors().iter().map(|b| r.eval_unchecked(b)).collect();
        let next = Subspace::span(&imgs, n, f);
        dims.push(next.dim());
        if next.dim() == 0 || next.dim() == cur.dim() {
            return dims;
        }
        cur = next;
    }
}

/// Smallest subspace containing all p-map images and closed under the p-map
/// (for class < p all images are central, so this is a restricted ideal).
pub fn pmap_closure(r: &RestrictedAlgebra) -> Subspace {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let mut w = Subspace::span(&r.pmap.images, n, f);
    loop {
        let mut gens: Vec<Vec<Fe>> = w.basis_vectors();
        for b in w.basis_vectors() {
            gens.push(r.eval_unchecked(&b));
        }
        let next = Subspace::span(&gens, n, f);
        if next.dim() == w.dim() {
            return w;
        }
        w = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    pub dim: usize,
    pub lcs: Vec<usize>,
    pub derived: Vec<usize>,
    pub center: usize,
    pub pchain: Vec<usize>,
    pub closure: usize,
    pub ker: usize,
    pub ker_center: usize,
    pub img_center: usize,
    pub img_derived: usize,
    pub sub: Option<Box<Fingerprint>>,
}

impl Fingerprint {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([
            self.dim,
            self.lcs,
            self.derived,
            self.center,
            self.pchain,
            self.closure,
            self.ker,
            self.ker_center,
            self.img_center,
            self.img_derived,
            self.sub.as_ref().map(|s| s.to_json()),
        ])
    }
}

/// Isomorphism-invariant summary: series dimensions, p-chain, kernel and
/// image positions, and recursively the quotient by the p-closure.
pub fn fingerprint(r: &RestrictedAlgebra) -> Fingerprint {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    let lcs: Vec<usize> = r.alg.lower_central_series().iter().map(|s| s.dim()).collect();
    let derived: Vec<usize> = r.alg.derived_series().iter().map(|s| s.dim()).collect();
    let center_space = r.alg.center();
    let pchain = p_chain(r);
    let closure = pmap_closure(r);

    // Kernel of the semilinear map: x with sum x_i^p images[i] = 0. Writing
    // mu_i = x_i^p, this is the kernel of the image matrix; pulling back
    // through the (bijective) Frobenius preserves membership and dimension.
    let mut m = Mat::zeros(n, n);
    for (i, img) in r.pmap.images.iter().enumerate() {
        for k in 0..n {
            m[(k, i)] = img[k];
        }
    }
    let mu_kernel = m.kernel_basis(f);
    let ker_vectors: Vec<Vec<Fe>> = mu_kernel
        .iter()
        .map(|v| v.iter().map(|&c| f.inv_frobenius(c)).collect())
        .collect();
    let ker_space = Subspace::span(&ker_vectors, n, f);

    let img_space = Subspace::span(&r.pmap.images, n, f);
    let derived_space = r.alg.derived_subalgebra();
    let inter = |a: &Subspace, b: &Subspace| -> usize {
        a.dim() + b.dim() - a.sum(b, f).dim()
    };

    let sub = if closure.dim() > 0 {
        let (q, pi, sigma) = r.alg.quotient(&closure);
        let qdim = q.dim;
        let mut qim = Vec::with_capacity(qdim);
        for rr in 0..qdim {
            let rep = sigma.col(rr);
            qim.push(pi.apply(&r.eval_unchecked(&rep), f));
        }
        let qr = RestrictedAlgebra::new(q, PMap { images: qim });
        Some(Box::new(fingerprint(&qr)))
    } else {
        None
    };

    Fingerprint {
        dim: n,
        lcs,
        derived,
        center: center_space.dim(),
        pchain,
        closure: closure.dim(),
        ker: ker_space.dim(),
        ker_center: inter(&ker_space, &center_space),
        img_center: inter(&img_space, &center_space),
        img_derived: inter(&img_space, &derived_space),
        sub,
    }
}

/// Number of p-maps on L: semilinear maps into the center.
pub fn pmap_count(l: &LieAlgebra) -> u128 {
    let z = l.center().dim();
    (l.field.q as u128).pow((l.dim * z) as u32)
}

/// The p-map with the given lexicographic index: base-q digits are the
/// center-basis coordinates of the images, x_1 first, least significant
/// digit first.
pub fn pmap_at(l: &LieAlgebra, center: &Subspace, idx: u128) -> PMap {
    let f = &*l.field;
    let n = l.dim;
    let z = center.dim();
    let zb = center.basis_vectors();
    let q = f.q as u128;
    let mut images = vec![vec![0; n]; n];
    let mut rem = idx;
    for img in images.iter_mut() {
        for b in zb.iter().take(z) {
            let d = (rem % q) as Fe;
            rem /= q;
            if d != 0 {
                for k in 0..n {
                    img[k] = f.add(img[k], f.mul(d, b[k]));
                }
            }
        }
    }
    assert!(rem == 0, "pmap index out of range");
    images.into_iter().enumerate().fold(PMap::trivial(n), |mut pm, (i, img)| {
        pm.images[i] = img;
        pm
    })
}

/// Stream of every p-map on L (class < p: exactly the semilinear maps into
/// the center), in lexicographic order.
pub struct PmapStream {
    alg: LieAlgebra,
    center: Subspace,
    next: u128,
    count: u128,
}

impl Iterator for PmapStream {
    type Item = PMap;

    fn next(&mut self) -> Option<PMap> {
        if self.next >= self.count {
            return None;
        }
        let pm = pmap_at(&self.alg, &self.center, self.next);
        self.next += 1;
        Some(pm)
    }
}

impl PmapStream {
    pub fn total(&self) -> u128 {
        self.count
    }
}

pub fn enumerate_pmaps(l: &LieAlgebra, budget: u64) -> Result<PmapStream> {
    let p = l.field.spec.p as usize;
    if l.nilpotency_class() >= p {
        return Err(Error::UnsupportedRegime(format!(
            "p-map enumeration requires class < p; class = {}",
            l.nilpotency_class()
        )));
    }
    let count = pmap_count(l);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{count} p-maps exceeds budget {budget}"
        )));
    }
    Ok(PmapStream { alg: l.clone(), center: l.center(), next: 0, count })
}

/// Verify a seeded random sample of the stream (fraction of the full count,
/// at least `min_n`) with the non-exhaustive axiom check.
pub fn sample_verify_pmaps(
    l: &LieAlgebra,
    fraction: f64,
    min_n: usize,
    seed: u64,
) -> Result<usize> {
    let count = pmap_count(l);
    let center = l.center();
    let n = ((count as f64 * fraction) as usize).max(min_n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let idx = rng.gen_range(0..count);
        let pm = pmap_at(l, &center, idx);
        let r = RestrictedAlgebra::new(l.clone(), pm);
        let report = verify_restricted(&r, false);
        if !report.ok {
            return Err(Error::InvalidInput(format!(
                "sampled p-map {idx} failed verification: {:?}",
                report.first_violation
            )));
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::liealg::base_algebra;

    fn f5() -> Arc<Field> {
        Arc::new(Field::new(FieldSpec::prime(5)).unwrap())
    }

    fn l51_8() -> RestrictedAlgebra {
        // Abelian of dimension 5 with the full chain p-map.
        let alg = base_algebra("L5_1", f5()).unwrap();
        let pm = PMap::from_sparse(
            5,
            &[
                (0, vec![0, 1, 0, 0, 0]),
                (1, vec![0, 0, 1, 0, 0]),
                (2, vec![0, 0, 0, 1, 0]),
                (3, vec![0, 0, 0, 0, 1]),
            ],
        );
        RestrictedAlgebra::new(alg, pm)
    }

    #[test]
    fn eval_examples() {
        let r = l51_8();
        assert_eq!(r.eval(&[1, 1, 0, 0, 0]).unwrap(), vec![0, 1, 1, 0, 0]);
        assert_eq!(r.eval(&[0; 5]).unwrap(), vec![0; 5]);

        let alg = base_algebra("L5_9", f5()).unwrap();
        let pm = PMap::from_sparse(5, &[(0, vec![0, 0, 0, 1, 0])]);
        let r = RestrictedAlgebra::new(alg, pm);
        // 2^5 = 32 = 2 over F_5.
        assert_eq!(r.eval(&[2, 0, 0, 0, 0]).unwrap(), vec![0, 0, 0, 2, 0]);
    }

    #[test]
    fn sj_vanishes_below_class_p() {
        let ab = base_algebra("L5_1", f5()).unwrap();
        for j in 1..5 {
            assert_eq!(compute_sj(&ab, &[1, 2, 3, 4, 0], &[4, 0, 0, 1, 1], j), vec![0; 5]);
        }
        let l52 = base_algebra("L5_2", f5()).unwrap();
        let e1 = [1, 0, 0, 0, 0];
        let e2 = [0, 1, 0, 0, 0];
        for j in 1..5 {
            assert_eq!(compute_sj(&l52, &e1, &e2, j), vec![0; 5]);
        }
        // s_j(x, x) = 0 even at maximal class.
        let l56 = base_algebra("L5_6", f5()).unwrap();
        let x = [1, 2, 0, 3, 1];
        for j in 1..5 {
            assert_eq!(compute_sj(&l56, &x, &x, j), vec![0; 5]);
        }
        assert_eq!(jacobson_sum(&l56, &[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]), vec![0; 5]);
    }

    #[test]
    fn sj_nonzero_when_class_reaches_p() {
        // Heisenberg over F_2 has class 2 = p: s_1(x1, x2) = [x2, x1] = x3.
        let f2 = Arc::new(Field::new(FieldSpec::prime(2)).unwrap());
        let heis = LieAlgebra::from_brackets(f2, 3, &[((0, 1), 2, 1)]);
        assert_eq!(compute_sj(&heis, &[1, 0, 0], &[0, 1, 0], 1), vec![0, 0, 1]);

        // Filiform of dimension 4 over F_3 has class 3 = p: the expansion
        // (ad(t x1 + x2))^2 (x1) = -t x4 gives s_2 = x4, s_1 = 0.
        let f3 = Arc::new(Field::new(FieldSpec::prime(3)).unwrap());
        let l43 = base_algebra("L4_3", f3).unwrap();
        let e1 = [1, 0, 0, 0];
        let e2 = [0, 1, 0, 0];
        assert_eq!(compute_sj(&l43, &e1, &e2, 1), vec![0; 4]);
        assert_eq!(compute_sj(&l43, &e1, &e2, 2), vec![0, 0, 0, 1]);
        assert_eq!(jacobson_sum(&l43, &e1, &e2), vec![0, 0, 0, 1]);
    }

    #[test]
    fn verify_accepts_central_images_and_rejects_others() {
        // Central image: passes.
        let alg = base_algebra("L5_9", f5()).unwrap();
        let pm = PMap::from_sparse(5, &[(0, vec![0, 0, 0, 1, 0])]);
        let rep = verify_restricted(&RestrictedAlgebra::new(alg, pm), false);
        assert!(rep.ok, "{:?}", rep.first_violation);

        // Non-central image: fails the adjoint axiom.
        let alg = base_algebra("L5_2", f5()).unwrap();
        let pm = PMap::from_sparse(5, &[(0, vec![0, 1, 0, 0, 0])]);
        let rep = verify_restricted(&RestrictedAlgebra::new(alg, pm), false);
        assert!(!rep.ok);
        assert!(rep.first_violation.unwrap().contains("ad(x_1^[p])"));

        // Trivial p-map passes on every catalog algebra.
        for name in crate::liealg::CATALOG_NAMES {
            let alg = base_algebra(name, f5()).unwrap();
            let dim = alg.dim;
            let rep = verify_restricted(
                &RestrictedAlgebra::new(alg, PMap::trivial(dim)),
                false,
            );
            assert!(rep.ok, "{name}");
        }
    }

    #[test]
    fn exhaustive_pair_sweep_small() {
        let alg = base_algebra("L3_2", f5()).unwrap();
        let pm = PMap::from_sparse(3, &[(0, vec![0, 0, 2])]);
        let rep = verify_restricted(&RestrictedAlgebra::new(alg, pm), true);
        assert!(rep.ok);
        assert!(rep.exhaustive);
        assert_eq!(rep.vector_pairs_checked, 125 * 125);
    }

    #[test]
    fn p_nilpotency_examples() {
        assert_eq!(is_p_nilpotent(&l51_8()), (true, 5));

        let alg = base_algebra("L5_2", f5()).unwrap();
        let r = RestrictedAlgebra::new(alg, PMap::trivial(5));
        assert_eq!(is_p_nilpotent(&r), (true, 1));

        let ab = base_algebra("L3_1", f5()).unwrap();
        let pm = PMap::from_sparse(3, &[(0, vec![1, 0, 0])]);
        let r = RestrictedAlgebra::new(ab, pm);
        assert_eq!(is_p_nilpotent(&r).0, false);
    }

    #[test]
    fn fingerprint_chains() {
        // Abelian with x1 -> x2 -> x5: p-chain dims 2, 1, 0.
        let alg = base_algebra("L5_1", f5()).unwrap();
        let pm = PMap::from_sparse(5, &[(0, vec![0, 1, 0, 0, 0]), (1, vec![0, 0, 0, 0, 1])]);
        let fp = fingerprint(&RestrictedAlgebra::new(alg, pm));
        assert_eq!(fp.pchain, vec![2, 1, 0]);

        let fp8 = fingerprint(&l51_8());
        assert_eq!(fp8.pchain, vec![4, 3, 2, 1, 0]);
        assert_eq!(fp8.ker, 1);

        let alg = base_algebra("L5_3", f5()).unwrap();
        let fp0 = fingerprint(&RestrictedAlgebra::new(alg, PMap::trivial(5)));
        assert_eq!(fp0.pchain, vec![0]);
        assert_eq!(fp0.closure, 0);
        assert!(fp0.sub.is_none());
        assert_eq!(fp0.lcs, vec![5, 2, 1, 0]);
    }

    #[test]
    fn fingerprint_sees_quotient_structure() {
        // L5_2 with x1 -> x4, x2 -> x5: the closure is <x4, x5> and the
        // quotient keeps the bracket [x1,x2] = x3 — a Heisenberg algebra.
        let a1 = base_algebra("L5_2", f5()).unwrap();
        let r1 = RestrictedAlgebra::new(
            a1,
            PMap::from_sparse(5, &[(0, vec![0, 0, 0, 1, 0]), (1, vec![0, 0, 0, 0, 1])]),
        );
        let fp1 = fingerprint(&r1);
        assert_eq!(fp1.closure, 2);
        let sub1 = fp1.sub.as_ref().unwrap();
        assert_eq!(sub1.lcs, vec![3, 1, 0]);
        assert_eq!(sub1.pchain, vec![0]);
        assert!(sub1.sub.is_none());

        // L5_2 with x1 -> x3 kills the derived line: the quotient is
        // abelian of dimension 4.
        let a2 = base_algebra("L5_2", f5()).unwrap();
        let r2 = RestrictedAlgebra::new(
            a2,
            PMap::from_sparse(5, &[(0, vec![0, 0, 1, 0, 0])]),
        );
        let fp2 = fingerprint(&r2);
        assert_eq!(fp2.closure, 1);
        assert_eq!(fp2.sub.as_ref().unwrap().lcs, vec![4, 0]);
        assert_ne!(fp1, fp2);
    }

    #[test]
    fn fingerprint_invariant_under_basis_permutation() {
        // Swap x4 <-> x5 in L5_4 (an automorphism of the bracket) and
        // transport a p-map along it.
        let alg = base_algebra("L5_1", f5()).unwrap();
        let pm1 = PMap::from_sparse(5, &[(0, vec![0, 0, 0, 1, 0]), (3, vec![0, 0, 0, 0, 1])]);
        let pm2 = PMap::from_sparse(5, &[(1, vec![0, 0, 0, 0, 1]), (4, vec![0, 0, 1, 0, 0])]);
        // pm2 is pm1 conjugated by the cycle x1->x2, x4->x5, x5->x3.
        let r1 = RestrictedAlgebra::new(alg.clone(), pm1);
        let r2 = RestrictedAlgebra::new(alg, pm2);
        assert_eq!(fingerprint(&r1), fingerprint(&r2));
    }

    #[test]
    fn enumeration_counts_and_characterization() {
        let l32 = base_algebra("L3_2", f5()).unwrap();
        let stream = enumerate_pmaps(&l32, 1_000_000).unwrap();
        assert_eq!(stream.total(), 125);
        let mut n = 0;
        for pm in stream {
            let rep = verify_restricted(&RestrictedAlgebra::new(l32.clone(), pm), false);
            assert!(rep.ok);
            n += 1;
        }
        assert_eq!(n, 125);

        // Cross-check: among all 5^9 linear self-maps, exactly the 125
        // center-valued ones satisfy the adjoint axiom.
        let f = l32.field.clone();
        let mut valid = 0u64;
        let ad_pows: Vec<Mat> = (0..3)
            .map(|i| {
                let mut e = vec![0; 3];
                e[i] = 1;
                l32.ad_matrix(&e).pow(5, &f)
            })
            .collect();
        for idx in 0..5u64.pow(9) {
            let mut rem = idx;
            let mut imgs = vec![vec![0; 3]; 3];
            for img in imgs.iter_mut() {
                for c in img.iter_mut() {
                    *c = (rem % 5) as Fe;
                    rem /= 5;
                }
            }
            if (0..3).all(|i| l32.ad_matrix(&imgs[i]) == ad_pows[i]) {
                valid += 1;
            }
        }
        assert_eq!(valid, 125);

        // Budget and regime errors.
        assert!(matches!(enumerate_pmaps(&l32, 10), Err(Error::BudgetExceeded(_))));
        let f3 = Arc::new(Field::new(FieldSpec::prime(3)).unwrap());
        let l43 = base_algebra("L4_3", f3).unwrap();
        assert!(matches!(enumerate_pmaps(&l43, 1 << 40), Err(Error::UnsupportedRegime(_))));

        // A 1% seeded sample of a larger stream verifies cleanly.
        let l59 = base_algebra("L5_9", f5()).unwrap();
        assert_eq!(pmap_count(&l59), 9_765_625);
        sample_verify_pmaps(&l59, 0.0, 200, 12345).unwrap();
    }

    #[test]
    fn json_roundtrip() {
        let r = l51_8().with_name("chain");
        let js = r.to_json();
        let back = RestrictedAlgebra::from_json(&js).unwrap();
        assert_eq!(back.pmap, r.pmap);
        assert_eq!(back.name.as_deref(), Some("chain"));
        // Missing pmap key means the trivial structure.
        let alg_only = r.alg.to_json();
        let back = RestrictedAlgebra::from_json(&alg_only).unwrap();
        assert!(back.pmap.is_trivial());
    }
}
