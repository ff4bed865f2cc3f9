//! Parametrized automorphism families and orbit computations on slices of
//! restricted 2-cohomology.
//!
//! An automorphism group is described as a matrix *pattern*: a square array of
//! expressions in a list of free parameters together with nonvanishing
//! constraints. The patterns for the catalog algebras are embedded from
//! `data/aut_families.json`; ad-hoc families (e.g. generating subgroups) can be
//! built with [`AutFamily::new`]. [`verify_aut_family`] checks soundness
//! (every instantiation is a Lie automorphism), sampled group closure, and —
//! when both the parameter space and a backtracking search are affordable —
//! completeness against the actual automorphism count.
//!
//! [`orbits_on_slice`] computes the orbit partition induced on a finite slice
//! of cohomology classes theta(w) = theta_0 + sum_i w_i (0, e_{F_i}) by basis
//! transport under all instantiations of one or more families. Passing several
//! families unions their instantiations; since the computed relation is closed
//! under composition only through directly tested elements, that is the orbit
//! partition of the *generated* group exactly when the slice is setwise
//! invariant under it (always the case for theta_0 = 0, where the slice is the
//! full space of pure-omega classes).

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{b2_subspace, flat_len, is_z2_member, Cochain2};
use crate::field::{Fe, Field};
use crate::liealg::{pairs, LieAlgebra};
use crate::matrix::Mat;
use crate::restricted::RestrictedAlgebra;
use crate::{Error, Result};

/// Expression over family parameters, evaluated pointwise in a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Const(i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Frobenius power x -> x^{p^k}; negative k applies the inverse map.
    Frob(Box<Expr>, i32),
}

impl Expr {
    pub fn eval(&self, f: &Field, vals: &[Fe]) -> Fe {
        match self {
            Expr::Var(i) => vals[*i],
            Expr::Const(c) => f.from_int(*c),
            Expr::Add(a, b) => f.add(a.eval(f, vals), b.eval(f, vals)),
            Expr::Sub(a, b) => f.sub(a.eval(f, vals), b.eval(f, vals)),
            Expr::Mul(a, b) => f.mul(a.eval(f, vals), b.eval(f, vals)),
            Expr::Neg(a) => f.neg(a.eval(f, vals)),
            Expr::Frob(a, k) => {
                let mut v = a.eval(f, vals);
                if *k >= 0 {
                    for _ in 0..*k {
                        v = f.frobenius(v);
                    }
                } else {
                    for _ in 0..-*k {
                        v = f.inv_frobenius(v);
                    }
                }
                v
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, None) => x,
                    (None, y) => y,
                }
            }
            Expr::Neg(a) | Expr::Frob(a, _) => a.max_var(),
        }
    }

    fn parse(v: &serde_json::Value, params: &[String]) -> Result<Expr> {
        match v {
            serde_json::Value::String(s) => params
                .iter()
                .position(|p| p == s)
                .map(Expr::Var)
                .ok_or_else(|| Error::InvalidInput(format!("unknown parameter {s}"))),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Expr::Const)
                .ok_or_else(|| Error::InvalidInput(format!("bad constant {n}"))),
            serde_json::Value::Array(a) => {
                let op = a
                    .first()
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::InvalidInput("expression op must be a string".into()))?;
                let arg = |k: usize| -> Result<Box<Expr>> {
                    let x = a
                        .get(k)
                        .ok_or_else(|| Error::InvalidInput(format!("{op} needs operand {k}")))?;
                    Ok(Box::new(Expr::parse(x, params)?))
                };
                match op {
                    "add" => Ok(Expr::Add(arg(1)?, arg(2)?)),
                    "sub" => Ok(Expr::Sub(arg(1)?, arg(2)?)),
                    "mul" => Ok(Expr::Mul(arg(1)?, arg(2)?)),
                    "neg" => Ok(Expr::Neg(arg(1)?)),
                    "frob" => {
                        let k = a
                            .get(2)
                            .and_then(|x| x.as_i64())
                            .ok_or_else(|| Error::InvalidInput("frob needs an integer power".into()))?;
                        Ok(Expr::Frob(arg(1)?, k as i32))
                    }
                    _ => Err(Error::InvalidInput(format!("unknown expression op {op}"))),
                }
            }
            _ => Err(Error::InvalidInput(format!("bad expression {v}"))),
        }
    }
}

/// A parametrized matrix pattern describing (a subgroup of) an automorphism
/// group.
#[derive(Clone, Debug)]
pub struct AutFamily {
    pub name: String,
    /// Catalog name of the algebra this pattern acts on.
    pub algebra: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub require_invertible: bool,
    entries: Vec<Expr>,
    nonzero: Vec<Expr>,
    /// Flat entry position holding each parameter verbatim (for readout).
    readout: Vec<usize>,
    /// Non-constant entry positions (the only ones refilled per instantiation).
    dynamic: Vec<usize>,
    /// nonzero-constraint indices checked once parameters 0..=level are set.
    check_at: Vec<Vec<usize>>,
}

impl AutFamily {
    pub fn new(
        name: &str,
        algebra: &str,
        dim: usize,
        params: Vec<String>,
        entries: Vec<Expr>,
        nonzero: Vec<Expr>,
        require_invertible: bool,
    ) -> Result<AutFamily> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "family {name}: expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if params.is_empty() {
            return Err(Error::InvalidInput(format!("family {name}: no parameters")));
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(Error::InvalidInput(format!("family {name}: duplicate parameter {p}")));
            }
        }
        for e in entries.iter().chain(&nonzero) {
            if let Some(mv) = e.max_var() {
                if mv >= params.len() {
                    return Err(Error::InvalidInput(format!(
                        "family {name}: expression uses out-of-range parameter"
                    )));
                }
            }
        }
        let mut readout = Vec::with_capacity(params.len());
        for i in 0..params.len() {
            let pos = entries.iter().position(|e| *e == Expr::Var(i)).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "family {name}: parameter {} has no bare matrix entry",
                    params[i]
                ))
            })?;
            readout.push(pos);
        }
        let dynamic: Vec<usize> = entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !matches!(e, Expr::Const(_)))
            .map(|(k, _)| k)
            .collect();
        let mut check_at = vec![Vec::new(); params.len()];
        for (ci, c) in nonzero.iter().enumerate() {
            check_at[c.max_var().unwrap_or(0)].push(ci);
        }
        Ok(AutFamily {
            name: name.to_string(),
            algebra: algebra.to_string(),
            dim,
            params,
            require_invertible,
            entries,
            nonzero,
            readout,
            dynamic,
            check_at,
        })
    }

    /// q^(number of parameters): an upper bound on the instantiation count.
    pub fn group_size_bound(&self, f: &Field) -> u128 {
        (f.order() as u128).pow(self.params.len() as u32)
    }

    fn fill(&self, f: &Field, vals: &[Fe], mat: &mut Mat) {
        for &k in &self.dynamic {
            mat.data[k] = self.entries[k].eval(f, vals);
        }
    }

    fn constant_filled(&self, f: &Field) -> Mat {
        let mut mat = Mat::zeros(self.dim, self.dim);
        for (k, e) in self.entries.iter().enumerate() {
            if let Expr::Const(c) = e {
                mat.data[k] = f.from_int(*c);
            }
        }
        mat
    }

    /// The pattern at the given parameter values, or None if a nonvanishing
    /// constraint (or the invertibility requirement) fails.
    pub fn instantiate(&self, f: &Field, vals: &[Fe]) -> Option<Mat> {
        assert!(vals.len() == self.params.len(), "wrong number of parameter values");
        if self.nonzero.iter().any(|c| c.eval(f, vals) == 0) {
            return None;
        }
        let mut mat = self.constant_filled(f);
        self.fill(f, vals, &mut mat);
        if self.require_invertible && mat.inverse(f).is_none() {
            return None;
        }
        Some(mat)
    }

    /// Whether a concrete matrix is an instantiation of this pattern.
    pub fn member(&self, f: &Field, m: &Mat) -> bool {
        if m.rows != self.dim || m.cols != self.dim {
            return false;
        }
        let vals: Vec<Fe> = self.readout.iter().map(|&pos| m.data[pos]).collect();
        if self.nonzero.iter().any(|c| c.eval(f, &vals) == 0) {
            return false;
        }
        if self.entries.iter().enumerate().any(|(k, e)| e.eval(f, &vals) != m.data[k]) {
            return false;
        }
        !self.require_invertible || m.inverse(f).is_some()
    }

    /// Calls `cb` for every instantiation, in lexicographic parameter order
    /// (canonical element order per coordinate, first parameter most
    /// significant). Returns the number visited; `cb` returning false stops
    /// the sweep early.
    pub fn for_each_instantiation<F>(&self, f: &Field, mut cb: F) -> u64
    where
        F: FnMut(&[Fe], &Mat) -> bool,
    {
        let mut st = AutStream::start(self, f);
        let mut visited = 0u64;
        while st.advance() {
            visited += 1;
            if !cb(&st.vals, &st.mat) {
                break;
            }
        }
        visited
    }
}

/// Streaming enumerator over all instantiations of a family.
pub struct AutStream<'a> {
    fam: &'a AutFamily,
    f: &'a Field,
    elems: Vec<Fe>,
    idx: Vec<usize>,
    vals: Vec<Fe>,
    mat: Mat,
    level: usize,
    done: bool,
}

impl<'a> AutStream<'a> {
    fn start(fam: &'a AutFamily, f: &'a Field) -> AutStream<'a> {
        AutStream {
            fam,
            f,
            elems: f.canonical_elements(),
            idx: vec![0; fam.params.len()],
            vals: vec![0; fam.params.len()],
            mat: fam.constant_filled(f),
            level: 0,
            done: false,
        }
    }

    /// Steps to the next instantiation; afterwards `vals`/`mat` hold it.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        let m = self.fam.params.len();
        let q = self.elems.len();
        loop {
            if self.idx[self.level] >= q {
                if self.level == 0 {
                    self.done = true;
                    return false;
                }
                self.idx[self.level] = 0;
                self.level -= 1;
                self.idx[self.level] += 1;
                continue;
            }
            self.vals[self.level] = self.elems[self.idx[self.level]];
            let mut ok = true;
            for &ci in &self.fam.check_at[self.level] {
                if self.fam.nonzero[ci].eval(self.f, &self.vals) == 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                self.idx[self.level] += 1;
                continue;
            }
            if self.level + 1 == m {
                self.fam.fill(self.f, &self.vals, &mut self.mat);
                self.idx[self.level] += 1;
                if !self.fam.require_invertible || self.mat.inverse(self.f).is_some() {
                    return true;
                }
                continue;
            }
            self.level += 1;
            self.idx[self.level] = 0;
        }
    }
}

impl<'a> Iterator for AutStream<'a> {
    type Item = Mat;
    fn next(&mut self) -> Option<Mat> {
        if self.advance() {
            Some(self.mat.clone())
        } else {
            None
        }
    }
}

/// Iterator over all instantiations, or a budget error when the parameter
/// space is too large to enumerate.
pub fn enumerate_aut<'a>(fam: &'a AutFamily, f: &'a Field, budget: u64) -> Result<AutStream<'a>> {
    let bound = fam.group_size_bound(f);
    if bound > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "family {} spans {bound} parameter tuples, budget is {budget}",
            fam.name
        )));
    }
    Ok(AutStream::start(fam, f))
}

static FAMILIES: Lazy<Vec<AutFamily>> = Lazy::new(|| {
    load_families(include_str!("../data/aut_families.json"))
        .expect("embedded automorphism family table is well-formed")
});

/// All built-in automorphism families.
pub fn families() -> &'static [AutFamily] {
    &FAMILIES
}

/// Look up a built-in family by name.
pub fn family(name: &str) -> Result<&'static AutFamily> {
    FAMILIES
        .iter()
        .find(|fm| fm.name == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown automorphism family {name}")))
}

fn load_families(src: &str) -> Result<Vec<AutFamily>> {
    let root: serde_json::Value = serde_json::from_str(src)
        .map_err(|e| Error::InvalidInput(format!("family table: {e}")))?;
    let list = root["families"]
        .as_array()
        .ok_or_else(|| Error::InvalidInput("family table: missing families array".into()))?;
    let mut out = Vec::with_capacity(list.len());
    for fv in list {
        let name = fv["name"]
            .as_str()
            .ok_or_else(|| Error::InvalidInput("family without name".into()))?;
        let algebra = fv["algebra"]
            .as_str()
            .ok_or_else(|| Error::InvalidInput(format!("family {name}: missing algebra")))?;
        let dim = fv["dim"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput(format!("family {name}: missing dim")))?
            as usize;
        let params: Vec<String> = fv["params"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("family {name}: missing params")))?
            .iter()
            .map(|p| {
                p.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::InvalidInput(format!("family {name}: bad parameter name")))
            })
            .collect::<Result<_>>()?;
        let rows = fv["entries"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("family {name}: missing entries")))?;
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::InvalidInput(format!("family {name}: entries must be rows")))?;
            for cell in row {
                entries.push(Expr::parse(cell, &params)?);
            }
        }
        let nonzero = fv["nonzero"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("family {name}: missing nonzero")))?
            .iter()
            .map(|c| Expr::parse(c, &params))
            .collect::<Result<Vec<_>>>()?;
        let require_invertible = fv["require_invertible"].as_bool().unwrap_or(false);
        out.push(AutFamily::new(
            name,
            algebra,
            dim,
            params,
            entries,
            nonzero,
            require_invertible,
        )?);
    }
    Ok(out)
}

/// Whether `m` is an automorphism of the Lie algebra `l`.
pub fn is_lie_automorphism(l: &LieAlgebra, m: &Mat) -> bool {
    let f = &*l.field;
    let n = l.dim;
    if m.rows != n || m.cols != n || m.inverse(f).is_none() {
        return false;
    }
    for (i, j) in pairs(n) {
        let lhs = m.apply(&l.bracket_basis(i, j), f);
        let rhs = l.bracket(&m.col(i), &m.col(j));
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Whether `m` is an automorphism of the restricted algebra (bracket and
/// p-map preserving). Requires the semilinear evaluation regime class < p.
pub fn is_restricted_automorphism(r: &RestrictedAlgebra, m: &Mat) -> bool {
    if !is_lie_automorphism(&r.alg, m) {
        return false;
    }
    if r.pmap.is_trivial() {
        return true;
    }
    let f = &**r.field();
    let n = r.dim();
    assert!(r.class() < f.p() as usize, "p-map transport needs class < p");
    for j in 0..n {
        let lhs = m.apply(&r.pmap.images[j], f);
        let rhs = r.eval_unchecked(&m.col(j));
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Basis transport of a 2-cochain: (A.phi)(x,y) = phi(Ax, Ay) and
/// (A.omega)(x) = omega(Ax), with omega extended semilinearly.
pub(crate) fn transport_cochain(f: &Field, m: &Mat, theta: &Cochain2) -> Cochain2 {
    let n = theta.dim();
    let cols: Vec<Vec<Fe>> = (0..n).map(|j| m.col(j)).collect();
    let mut out = Cochain2::zero(n);
    for (i, j) in pairs(n) {
        let v = theta.eval_phi(f, &cols[i], &cols[j]);
        out.phi[(i, j)] = v;
        out.phi[(j, i)] = f.neg(v);
    }
    for i in 0..n {
        out.omega[i] = theta.eval_omega(f, &cols[i]);
    }
    out
}

/// Transport of a cocycle by a restricted automorphism; panics if either the
/// input or the output fails cocycle membership, or if `m` does not act as a
/// restricted automorphism.
pub fn act_on_cochain(r: &RestrictedAlgebra, m: &Mat, theta: &Cochain2) -> Cochain2 {
    assert!(is_restricted_automorphism(r, m), "matrix is not a restricted automorphism");
    assert!(is_z2_member(r, theta), "input cochain is not a cocycle");
    let out = transport_cochain(&**r.field(), m, theta);
    assert!(is_z2_member(r, &out), "transported cochain left Z2");
    out
}

/// Outcome of the completeness comparison in [`verify_aut_family`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    /// Backtracking enumeration of the full automorphism group matched the
    /// family's instantiation count.
    Verified { automorphism_count: u128 },
    /// The counts disagree: the pattern misses automorphisms (or soundness
    /// failed, making the comparison moot).
    Mismatch { family: u64, automorphisms: u128 },
    /// Either the family or the search exceeded the budget; only soundness and
    /// closure were checked.
    SkippedBudget,
}

/// Result of checking a family against an algebra.
#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub family: String,
    /// Every checked instantiation was a Lie automorphism.
    pub sound: bool,
    /// Parameter values of the first unsound instantiation, if any.
    pub counterexample: Option<Vec<Fe>>,
    pub instances_checked: u64,
    /// Whether the soundness check covered the whole parameter space.
    pub exhaustive: bool,
    /// Exact instantiation count (only when exhaustive).
    pub group_count: Option<u64>,
    pub completeness: Completeness,
    /// Sampled products and inverses stayed inside the pattern.
    pub closure_ok: bool,
}

fn sample_instance(fam: &AutFamily, f: &Field, rng: &mut ChaCha8Rng) -> (Vec<Fe>, Mat) {
    let elems = f.canonical_elements();
    let mut vals: Vec<Fe> = vec![0; fam.params.len()];
    loop {
        for v in vals.iter_mut() {
            *v = elems[rng.gen_range(0..elems.len())];
        }
        if let Some(m) = fam.instantiate(f, &vals) {
            return (vals.clone(), m);
        }
    }
}

/// Draw `count` seeded random instantiations of the family.
pub fn sample_instances(fam: &AutFamily, f: &Field, count: usize, seed: u64) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_instance(fam, f, &mut rng).1).collect()
}

/// Check a family against an algebra: soundness (exhaustive when the
/// parameter space fits the budget, sampled otherwise), sampled group closure,
/// and — for exhaustive sound families — completeness against a backtracking
/// enumeration of the automorphism group.
pub fn verify_aut_family(
    l: &LieAlgebra,
    fam: &AutFamily,
    budget: u64,
    seed: u64,
) -> Result<FamilyReport> {
    if l.dim != fam.dim {
        return Err(Error::InvalidInput(format!(
            "family {} has dimension {}, algebra has {}",
            fam.name, fam.dim, l.dim
        )));
    }
    let f = &*l.field;
    let exhaustive = fam.group_size_bound(f) <= budget as u128;
    let mut sound = true;
    let mut counterexample = None;
    let mut checked = 0u64;
    let mut group_count = None;
    if exhaustive {
        let visited = fam.for_each_instantiation(f, |vals, m| {
            if sound && !is_lie_automorphism(l, m) {
                sound = false;
                counterexample = Some(vals.to_vec());
            }
            true
        });
        checked = visited;
        group_count = Some(visited);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20_000 {
            let (vals, m) = sample_instance(fam, f, &mut rng);
            checked += 1;
            if !is_lie_automorphism(l, &m) {
                sound = false;
                counterexample = Some(vals);
                break;
            }
        }
    }
    let mut closure_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..500 {
        let (_, a) = sample_instance(fam, f, &mut rng);
        let (_, b) = sample_instance(fam, f, &mut rng);
        let prod_in = fam.member(f, &a.mul(&b, f));
        let inv_in = a.inverse(f).map(|ai| fam.member(f, &ai)).unwrap_or(false);
        if !prod_in || !inv_in {
            closure_ok = false;
            break;
        }
    }
    let completeness = if exhaustive && sound {
        match crate::isotest::count_lie_automorphisms(l, budget) {
            Ok(total) => {
                if total == group_count.unwrap() as u128 {
                    Completeness::Verified { automorphism_count: total }
                } else {
                    Completeness::Mismatch { family: group_count.unwrap(), automorphisms: total }
                }
            }
            Err(Error::BudgetExceeded(_)) => Completeness::SkippedBudget,
            Err(e) => return Err(e),
        }
    } else {
        Completeness::SkippedBudget
    };
    Ok(FamilyReport {
        family: fam.name.clone(),
        sound,
        counterexample,
        instances_checked: checked,
        exhaustive,
        group_count,
        completeness,
        closure_ok,
    })
}

/// How transported classes are matched against the slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabMode {
    /// A.[theta(w)] = [theta(w')].
    Exact,
    /// A.[theta(w)] = c.[theta(w')] for some scalar c != 0.
    Projective,
}

/// Orbit partition of a slice of cohomology classes.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    pub mode: StabMode,
    /// Omega component indices spanning the slice (0-based, increasing).
    pub free_omega: Vec<usize>,
    pub point_count: usize,
    /// Minimal representative of each orbit (coordinates w.r.t. `free_omega`),
    /// ordered by their position in the canonical point enumeration.
    pub reps: Vec<Vec<Fe>>,
    /// Orbit sizes, aligned with `reps`.
    pub sizes: Vec<usize>,
    /// Instantiations swept over all families.
    pub group_count: u64,
    /// Instantiations (pairs with a scalar in projective mode) that mapped
    /// every slice class back into the slice.
    pub stabilizer_count: u64,
    /// Some instantiation moved part of the slice outside it.
    pub partial_landing: bool,
    q: usize,
    inv_canon: Vec<usize>,
    elems: Vec<Fe>,
    class_of: Vec<u32>,
}

impl OrbitTable {
    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    fn id_of(&self, w: &[Fe]) -> usize {
        assert!(w.len() == self.free_omega.len(), "wrong slice coordinate count");
        let mut id = 0usize;
        for &c in w.iter().rev() {
            id = id * self.q + self.inv_canon[c as usize];
        }
        id
    }

    /// Index (into `reps`/`sizes`) of the orbit containing theta(w).
    pub fn orbit_of(&self, w: &[Fe]) -> usize {
        self.class_of[self.id_of(w)] as usize
    }

    pub fn same_orbit(&self, w1: &[Fe], w2: &[Fe]) -> bool {
        self.orbit_of(w1) == self.orbit_of(w2)
    }

    pub fn rep_of(&self, w: &[Fe]) -> &[Fe] {
        &self.reps[self.orbit_of(w)]
    }

    fn decode(&self, mut id: usize) -> Vec<Fe> {
        let mut w = Vec::with_capacity(self.free_omega.len());
        for _ in 0..self.free_omega.len() {
            w.push(self.elems[id % self.q]);
            id /= self.q;
        }
        w
    }
}

fn uf_find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let g = parent[parent[x as usize] as usize];
        parent[x as usize] = g;
        x = g;
    }
    x
}

fn uf_union(parent: &mut [u32], a: u32, b: u32) {
    let ra = uf_find(parent, a);
    let rb = uf_find(parent, b);
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

#[inline]
fn pack_key(v: &[Fe], q: usize) -> usize {
    let mut key = 0usize;
    for &c in v.iter().rev() {
        key = key * q + c as usize;
    }
    key
}

/// Orbits of the slice { [theta_0 + sum_i w_i (0, e_{free_omega[i]})] } under
/// all instantiations of the given families acting by basis transport.
///
/// For a nonzero base p-map only restricted automorphisms act; instantiations
/// that do not commute with the p-map are skipped. Classes transported outside
/// the slice are recorded via `partial_landing` and do not merge anything;
/// since every group element is tested directly, the computed partition is
/// exactly the single-element reachability relation on the slice.
pub fn orbits_on_slice(
    base: &RestrictedAlgebra,
    fams: &[&AutFamily],
    fixed_phi: &Cochain2,
    free_omega: &[usize],
    mode: StabMode,
    budget: u64,
) -> Result<OrbitTable> {
    let f = base.field().clone();
    let fd: &Field = &f;
    let n = base.dim();
    if fams.is_empty() {
        return Err(Error::InvalidInput("no automorphism families given".into()));
    }
    for fam in fams {
        if fam.dim != n {
            return Err(Error::InvalidInput(format!(
                "family {} has dimension {}, algebra has {n}",
                fam.name, fam.dim
            )));
        }
    }
    if fixed_phi.dim() != n {
        return Err(Error::InvalidInput("base cochain has wrong dimension".into()));
    }
    if free_omega.is_empty() {
        return Err(Error::InvalidInput("slice needs at least one free omega index".into()));
    }
    if free_omega.windows(2).any(|w| w[0] >= w[1]) || *free_omega.last().unwrap() >= n {
        return Err(Error::InvalidInput(
            "free omega indices must be strictly increasing and in range".into(),
        ));
    }
    if !is_z2_member(base, fixed_phi) {
        return Err(Error::InvalidInput("base cochain is not a cocycle".into()));
    }
    let b2 = b2_subspace(base)?;
    let q = fd.order();
    let elems = fd.canonical_elements();
    assert!(elems[0] == 0);
    let mut inv_canon = vec![0usize; q];
    for (pos, &e) in elems.iter().enumerate() {
        inv_canon[e as usize] = pos;
    }
    let fcount = free_omega.len();
    let point_count = q.pow(fcount as u32);
    let phi_len = n * (n - 1) / 2;
    let flen = flat_len(n);

    let bound: u128 = fams.iter().map(|fm| fm.group_size_bound(fd)).sum();
    if bound > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "orbit sweep needs {bound} instantiations, budget is {budget}"
        )));
    }

    // Normal forms modulo coboundaries of the base point and slice directions.
    let nf0 = b2.reduce(&fixed_phi.flatten(), fd);
    let slice_phi: Vec<Fe> = nf0[..phi_len].to_vec();
    let mut dirs: Vec<Vec<Fe>> = Vec::with_capacity(fcount);
    for &i in free_omega {
        let mut raw = vec![0 as Fe; flen];
        raw[phi_len + i] = 1;
        let nf = b2.reduce(&raw, fd);
        assert!(nf[..phi_len].iter().all(|&c| c == 0));
        dirs.push(nf);
    }

    // Omega-part lookup: normal-form key -> slice point id.
    let mut lookup = vec![u32::MAX; q.pow(n as u32)];
    {
        let mut digits = vec![0usize; fcount];
        for id in 0..point_count {
            let mut w_omega: Vec<Fe> = nf0[phi_len..].to_vec();
            for (i, &d) in digits.iter().enumerate() {
                let c = elems[d];
                if c != 0 {
                    for (k, slot) in w_omega.iter_mut().enumerate() {
                        *slot = fd.add(*slot, fd.mul(c, dirs[i][phi_len + k]));
                    }
                }
            }
            let key = pack_key(&w_omega, q);
            if lookup[key] != u32::MAX {
                return Err(Error::InvalidInput(
                    "slice directions are not independent modulo coboundaries".into(),
                ));
            }
            lookup[key] = id as u32;
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
        }
    }

    // Coboundary reducer rows split by pivot block.
    let mut phi_rows: Vec<(usize, Vec<Fe>)> = Vec::new();
    let mut om_rows: Vec<(usize, Vec<Fe>)> = Vec::new();
    for (r, &pv) in b2.pivots.iter().enumerate() {
        if pv < phi_len {
            phi_rows.push((pv, b2.basis.row(r)[..phi_len].to_vec()));
        } else {
            om_rows.push((pv - phi_len, b2.basis.row(r)[phi_len..].to_vec()));
        }
    }

    // Sparse support of the base point's phi part.
    let pair_list = pairs(n);
    let mut psup: Vec<(usize, usize, Fe)> = Vec::new();
    for &(i, j) in &pair_list {
        let c = fixed_phi.phi[(i, j)];
        if c != 0 {
            psup.push((i, j, c));
        }
    }
    let omega0_zero = fixed_phi.omega.iter().all(|&c| c == 0);
    let pmap_trivial = base.pmap.is_trivial();
    if !pmap_trivial {
        assert!(base.class() < fd.p() as usize, "p-map transport needs class < p");
    }

    let mut parent: Vec<u32> = (0..point_count as u32).collect();
    let mut group_count = 0u64;
    let mut stabilizer_count = 0u64;
    let mut partial_landing = false;
    let mut deep_checked = 0usize;

    let mut tphi_raw = vec![0 as Fe; phi_len];
    let mut tphi = vec![0 as Fe; phi_len];
    let mut ds: Vec<Fe> = Vec::new();
    let mut col = vec![0 as Fe; n];

    for fam in fams {
        fam.for_each_instantiation(fd, |_vals, m| {
            group_count += 1;
            // Transported phi part of the base point, then its normal form.
            for t in tphi_raw.iter_mut() {
                *t = 0;
            }
            for &(k, l, c) in &psup {
                for (t, &(i, j)) in pair_list.iter().enumerate() {
                    let d1 = fd.sub(
                        fd.mul(m.data[k * n + i], m.data[l * n + j]),
                        fd.mul(m.data[k * n + j], m.data[l * n + i]),
                    );
                    if d1 != 0 {
                        tphi_raw[t] = fd.add(tphi_raw[t], fd.mul(c, d1));
                    }
                }
            }
            tphi.copy_from_slice(&tphi_raw);
            for (pv, row) in &phi_rows {
                let c = tphi[*pv];
                if c != 0 {
                    for t in *pv..phi_len {
                        if row[t] != 0 {
                            tphi[t] = fd.sub(tphi[t], fd.mul(c, row[t]));
                        }
                    }
                }
            }
            // Admissible scalings for this instantiation.
            ds.clear();
            match mode {
                StabMode::Exact => {
                    if tphi == slice_phi {
                        ds.push(1);
                    }
                }
                StabMode::Projective => match slice_phi.iter().position(|&c| c != 0) {
                    None => {
                        if tphi.iter().all(|&c| c == 0) {
                            ds.extend(elems[1..].iter().copied());
                        }
                    }
                    Some(k0) => {
                        if tphi[k0] != 0 {
                            let d = fd.div(slice_phi[k0], tphi[k0]);
                            if (0..phi_len).all(|t| fd.mul(d, tphi[t]) == slice_phi[t]) {
                                ds.push(d);
                            }
                        }
                    }
                },
            }
            if ds.is_empty() {
                return true;
            }
            // Only restricted automorphisms act when the base p-map is nonzero.
            if !pmap_trivial {
                for j in 0..n {
                    for (k, slot) in col.iter_mut().enumerate() {
                        *slot = m.data[k * n + j];
                    }
                    if m.apply(&base.pmap.images[j], fd) != base.eval_unchecked(&col) {
                        return true;
                    }
                }
            }
            // Full normal form of the transported base point.
            let mut traw = vec![0 as Fe; flen];
            traw[..phi_len].copy_from_slice(&tphi_raw);
            if !omega0_zero {
                for i in 0..n {
                    for (k, slot) in col.iter_mut().enumerate() {
                        *slot = m.data[k * n + i];
                    }
                    traw[phi_len + i] = fixed_phi.eval_omega(fd, &col);
                }
            }
            let t0 = b2.reduce(&traw, fd);
            // Transported slice directions: row `fi` of the matrix under
            // Frobenius, reduced modulo the omega-pivot coboundary rows.
            let mut us: Vec<Vec<Fe>> = Vec::with_capacity(fcount);
            for &fi in free_omega {
                let mut u: Vec<Fe> = (0..n).map(|k| fd.frobenius(m.data[fi * n + k])).collect();
                for (pv, row) in &om_rows {
                    let c = u[*pv];
                    if c != 0 {
                        for t in *pv..n {
                            if row[t] != 0 {
                                u[t] = fd.sub(u[t], fd.mul(c, row[t]));
                            }
                        }
                    }
                }
                us.push(u);
            }
            if deep_checked < 2 {
                deep_checked += 1;
                let lifted = Cochain2::from_flat(fd, n, &t0);
                assert!(is_z2_member(base, &lifted), "transported base point left Z2");
            }
            for &d in &ds {
                let t0w: Vec<Fe> = (0..n).map(|k| fd.mul(d, t0[phi_len + k])).collect();
                // Per-direction increment tables: slot j*n.. holds the change
                // when a digit steps j-1 -> j; slot 0 holds the rollover.
                let mut diff: Vec<Vec<Fe>> = Vec::with_capacity(fcount);
                for u in &us {
                    let mut dv = vec![0 as Fe; q * n];
                    for j in 1..q {
                        let step = fd.sub(elems[j], elems[j - 1]);
                        for k in 0..n {
                            dv[j * n + k] = fd.mul(step, fd.mul(d, u[k]));
                        }
                    }
                    let wrap = fd.sub(elems[0], elems[q - 1]);
                    for k in 0..n {
                        dv[k] = fd.mul(wrap, fd.mul(d, u[k]));
                    }
                    diff.push(dv);
                }
                if deep_checked <= 2 && point_count > 1 {
                    // Cross-check the incremental sweep against an honest
                    // transport of the second slice point.
                    let mut theta1 = fixed_phi.clone();
                    theta1.omega[free_omega[0]] = fd.add(theta1.omega[free_omega[0]], elems[1]);
                    let nfv = b2.reduce(&transport_cochain(fd, m, &theta1).flatten(), fd);
                    for k in 0..n {
                        let direct = fd.add(t0w[k], fd.mul(fd.mul(d, elems[1]), us[0][k]));
                        assert!(
                            fd.mul(d, nfv[phi_len + k]) == direct,
                            "incremental transport mismatch"
                        );
                    }
                }
                let mut digits = vec![0usize; fcount];
                let mut acc = t0w.clone();
                let mut landed_all = true;
                for id in 0..point_count {
                    let key = pack_key(&acc, q);
                    let target = lookup[key];
                    if target != u32::MAX {
                        uf_union(&mut parent, id as u32, target);
                    } else {
                        landed_all = false;
                    }
                    if id + 1 == point_count {
                        break;
                    }
                    let mut pos = 0usize;
                    loop {
                        digits[pos] += 1;
                        if digits[pos] < q {
                            let dv = &diff[pos][digits[pos] * n..digits[pos] * n + n];
                            for (k, slot) in acc.iter_mut().enumerate() {
                                *slot = fd.add(*slot, dv[k]);
                            }
                            break;
                        }
                        digits[pos] = 0;
                        let dv = &diff[pos][..n];
                        for (k, slot) in acc.iter_mut().enumerate() {
                            *slot = fd.add(*slot, dv[k]);
                        }
                        pos += 1;
                    }
                }
                if landed_all {
                    stabilizer_count += 1;
                } else {
                    partial_landing = true;
                }
            }
            true
        });
    }

    // Canonical orbit decomposition: roots are class minima, so scanning ids
    // in order yields orbits sorted by their minimal representative.
    let mut class_of = vec![0u32; point_count];
    let mut root_index = vec![u32::MAX; point_count];
    let mut reps: Vec<Vec<Fe>> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let table_stub = OrbitTable {
        mode,
        free_omega: free_omega.to_vec(),
        point_count,
        reps: Vec::new(),
        sizes: Vec::new(),
        group_count,
        stabilizer_count,
        partial_landing,
        q,
        inv_canon,
        elems,
        class_of: Vec::new(),
    };
    for id in 0..point_count as u32 {
        let r = uf_find(&mut parent, id);
        if root_index[r as usize] == u32::MAX {
            root_index[r as usize] = reps.len() as u32;
            reps.push(table_stub.decode(r as usize));
            sizes.push(0);
        }
        let cls = root_index[r as usize];
        class_of[id as usize] = cls;
        sizes[cls as usize] += 1;
    }
    assert!(sizes.iter().sum::<usize>() == point_count);
    Ok(OrbitTable { reps, sizes, class_of, ..table_stub })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::FieldSpec;
    use crate::liealg::base_algebra;
    use crate::restricted::PMap;

    fn field(p: u32) -> Arc<Field> {
        Arc::new(Field::new(FieldSpec::prime(p)).unwrap())
    }

    fn trivial_restricted(name: &str, p: u32) -> RestrictedAlgebra {
        let l = base_algebra(name, field(p)).unwrap();
        let pm = PMap::trivial(l.dim);
        RestrictedAlgebra::new(l, pm)
    }

    fn unit_vec(len: usize, i: usize, c: Fe) -> Vec<Fe> {
        let mut w = vec![0; len];
        w[i] = c;
        w
    }

    #[test]
    fn families_load_and_contain_identity() {
        let f5 = field(5);
        assert_eq!(families().len(), 11);
        for fam in families() {
            let l = base_algebra(&fam.algebra, f5.clone()).unwrap();
            assert_eq!(l.dim, fam.dim, "{}", fam.name);
            assert!(fam.member(&f5, &Mat::identity(fam.dim)), "{}", fam.name);
        }
        assert!(family("l43_form").is_ok());
        assert!(family("no_such_family").is_err());
    }

    #[test]
    fn all_families_sampled_sound() {
        for p in [5, 7] {
            let f = field(p);
            for fam in families() {
                let l = base_algebra(&fam.algebra, f.clone()).unwrap();
                for m in sample_instances(fam, &f, 150, 99) {
                    assert!(is_lie_automorphism(&l, &m), "{} over F_{p}", fam.name);
                }
            }
        }
    }

    #[test]
    fn frobenius_expressions_evaluate() {
        let f25 = Arc::new(Field::new(FieldSpec::with_default_modulus(5, 2).unwrap()).unwrap());
        let e = Expr::Frob(Box::new(Expr::Var(0)), 1);
        let back = Expr::Frob(Box::new(Expr::Frob(Box::new(Expr::Var(0)), 1)), -1);
        for a in f25.canonical_elements() {
            assert_eq!(e.eval(&f25, &[a]), f25.frobenius(a));
            assert_eq!(back.eval(&f25, &[a]), a);
        }
    }

    #[test]
    fn family_l32_sound_and_complete_f5() {
        let l = base_algebra("L3_2", field(5)).unwrap();
        let rep = verify_aut_family(&l, family("aut_l32").unwrap(), 20_000_000, 7).unwrap();
        assert!(rep.sound && rep.exhaustive && rep.closure_ok);
        assert_eq!(rep.group_count, Some(12_000));
        assert_eq!(rep.completeness, Completeness::Verified { automorphism_count: 12_000 });
    }

    #[test]
    fn family_l43_sound_and_complete_f5() {
        let l = base_algebra("L4_3", field(5)).unwrap();
        let rep = verify_aut_family(&l, family("l43_form").unwrap(), 20_000_000, 7).unwrap();
        assert!(rep.sound && rep.exhaustive && rep.closure_ok);
        assert_eq!(rep.group_count, Some(50_000));
        assert_eq!(rep.completeness, Completeness::Verified { automorphism_count: 50_000 });
    }

    #[test]
    fn family_l52_sampled_over_budget() {
        let l = base_algebra("L5_2", field(5)).unwrap();
        let rep = verify_aut_family(&l, family("aut_l52").unwrap(), 1_000_000, 11).unwrap();
        assert!(rep.sound && !rep.exhaustive && rep.closure_ok);
        assert_eq!(rep.group_count, None);
        assert_eq!(rep.completeness, Completeness::SkippedBudget);
    }

    #[test]
    fn corrupted_family_fails_soundness() {
        let good = family("l43_form").unwrap();
        let params = good.params.clone();
        let mut entries = good.entries.clone();
        entries[3 * 4 + 2] = Expr::Const(0);
        let bad = AutFamily::new(
            "bad_l43",
            "L4_3",
            4,
            params,
            entries,
            good.nonzero.clone(),
            false,
        )
        .unwrap();
        let l = base_algebra("L4_3", field(5)).unwrap();
        let rep = verify_aut_family(&l, &bad, 1_000_000, 3).unwrap();
        assert!(!rep.sound);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn enumerate_respects_budget() {
        let f5 = field(5);
        assert!(matches!(
            enumerate_aut(family("aut_l52").unwrap(), &f5, 1_000_000),
            Err(Error::BudgetExceeded(_))
        ));
        let count = enumerate_aut(family("aut_l32").unwrap(), &f5, 1_000_000).unwrap().count();
        assert_eq!(count, 12_000);
    }

    #[test]
    fn instantiate_and_member_detect_pattern_violations() {
        let f5 = field(5);
        let l43 = family("l43_form").unwrap();
        assert!(l43.instantiate(&f5, &[0, 1, 0, 0, 0, 0, 0]).is_none());
        let mut m = l43.instantiate(&f5, &[1, 1, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(m, Mat::identity(4));
        assert!(l43.member(&f5, &m));
        m[(3, 2)] = 3;
        assert!(!l43.member(&f5, &m));
    }

    #[test]
    fn cochain_transport_uses_columns_and_frobenius() {
        let r = trivial_restricted("L3_2", 5);
        let f = r.field().clone();
        let a = family("aut_l32").unwrap().instantiate(&f, &[2, 1, 1, 1, 3, 0]).unwrap();
        let theta = Cochain2::from_sparse(&f, 3, &[((0, 2), 1)], &[(1, 1)]);
        let out = act_on_cochain(&r, &a, &theta);
        // phi'(x1,x2) = phi(Ax1, Ax2) with Ax1 = (2,1,3), Ax2 = (1,1,0).
        assert_eq!(out.phi[(0, 1)], 2);
        assert_eq!(out.phi[(0, 2)], 2);
        assert_eq!(out.phi[(1, 2)], 1);
        assert_eq!(out.omega, vec![1, 1, 0]);
        let id = Mat::identity(3);
        assert_eq!(act_on_cochain(&r, &id, &theta), theta);
    }

    #[test]
    fn orbit_pure_omega_slice_l42_f5() {
        let r = trivial_restricted("L4_2", 5);
        let f = r.field().clone();
        let diag = family("l42_diag_form").unwrap();
        let trans = family("l42_trans_form").unwrap();
        let full = family("l42_form").unwrap();
        // Both patterns sit inside the full group pattern, and every full
        // instantiation factors as diag * translation, so together they
        // generate the whole group. The slice theta_0 = 0 is all pure-omega
        // classes, which every automorphism permutes, so the two-family sweep
        // yields the true orbit partition.
        diag.for_each_instantiation(&f, |_, m| {
            assert!(full.member(&f, m));
            true
        });
        trans.for_each_instantiation(&f, |_, m| {
            assert!(full.member(&f, m));
            true
        });
        let zero = Cochain2::zero(4);
        let t = orbits_on_slice(&r, &[diag, trans], &zero, &[0, 1, 2, 3], StabMode::Exact, 100_000)
            .unwrap();
        assert_eq!(t.point_count, 625);
        assert_eq!(t.orbit_count(), 4);
        assert_eq!(t.sizes, vec![1, 24, 500, 100]);
        assert_eq!(t.reps[0], vec![0, 0, 0, 0]);
        assert_eq!(t.reps[1], vec![1, 0, 0, 0]);
        assert_eq!(t.reps[2], vec![0, 0, 1, 0]);
        assert_eq!(t.reps[3], vec![0, 0, 0, 1]);
        let e = |i: usize| unit_vec(4, i, 1);
        assert!(t.same_orbit(&e(0), &e(1)));
        assert!(!t.same_orbit(&e(1), &e(2)));
        assert!(!t.same_orbit(&e(2), &e(3)));
        assert!(!t.same_orbit(&e(0), &vec![0; 4]));
        assert_eq!(t.group_count, 9_600 + 625);
        assert_eq!(t.stabilizer_count, t.group_count);
        assert!(!t.partial_landing);
    }

    #[test]
    fn orbit_slice_l43_two_hooks_f5() {
        let r = trivial_restricted("L4_3", 5);
        let f = r.field().clone();
        let phi0 = Cochain2::from_sparse(&f, 4, &[((0, 3), 1), ((1, 2), 1)], &[]);
        let t = orbits_on_slice(
            &r,
            &[family("l43_form").unwrap()],
            &phi0,
            &[0, 1, 2, 3],
            StabMode::Exact,
            100_000,
        )
        .unwrap();
        assert_eq!(t.orbit_count(), 17);
        assert_eq!(t.stabilizer_count, 3_125);
        assert!(!t.partial_landing);
        let mut sz = t.sizes.clone();
        sz.sort_unstable();
        let expected =
            [vec![1usize; 5], vec![5; 4], vec![25; 4], vec![125; 4]].concat();
        assert_eq!(sz, expected);
        // Lines along each f_i stay separate in exact mode.
        let e = |i: usize, c: Fe| unit_vec(4, i, c);
        for i in 0..4 {
            assert!(!t.same_orbit(&e(i, 1), &e(i, 2)));
        }
    }

    #[test]
    fn orbit_square_condition_l42_f5() {
        let r = trivial_restricted("L4_2", 5);
        let f = r.field().clone();
        let phi0 = Cochain2::from_sparse(&f, 4, &[((0, 2), 1)], &[]);
        let t = orbits_on_slice(
            &r,
            &[family("l42_form").unwrap()],
            &phi0,
            &[0, 1, 2, 3],
            StabMode::Exact,
            20_000_000,
        )
        .unwrap();
        assert_eq!(t.stabilizer_count, 50_000);
        for b1 in 1..5u16 {
            for b2 in 1..5u16 {
                let expect = f.is_square(f.div(b2, b1));
                assert_eq!(
                    t.same_orbit(&unit_vec(4, 1, b1), &unit_vec(4, 1, b2)),
                    expect,
                    "beta {b1} vs {b2}"
                );
            }
        }
    }

    #[test]
    fn orbit_exact_vs_projective_l43_f7() {
        let r = trivial_restricted("L4_3", 7);
        let f = r.field().clone();
        let phi0 = Cochain2::from_sparse(&f, 4, &[((0, 3), 1), ((1, 2), 1)], &[]);
        let fam = family("l43_form").unwrap();
        let te =
            orbits_on_slice(&r, &[fam], &phi0, &[0, 1, 2, 3], StabMode::Exact, 1_000_000).unwrap();
        let tp = orbits_on_slice(&r, &[fam], &phi0, &[0, 1, 2, 3], StabMode::Projective, 1_000_000)
            .unwrap();
        let a = |c: Fe| unit_vec(4, 0, c);
        // 4 = 2^2 is a square mod 7, 3 is not.
        assert!(!te.same_orbit(&a(1), &a(4)));
        assert!(tp.same_orbit(&a(1), &a(4)));
        assert!(!tp.same_orbit(&a(1), &a(3)));
    }

    #[test]
    fn orbit_restricted_filter_l42_f5() {
        let l = base_algebra("L4_2", field(5)).unwrap();
        let pm = PMap::from_sparse(4, &[(0, unit_vec(4, 3, 1))]);
        let r = RestrictedAlgebra::new(l, pm);
        let f = r.field().clone();
        let phi0 = Cochain2::from_sparse(&f, 4, &[((0, 2), 1)], &[]);
        // With x1^[p] = x4 the coboundaries absorb the f1 direction, so the
        // slice runs over (f2, f3, f4) only.
        let t = orbits_on_slice(
            &r,
            &[family("l42_form").unwrap()],
            &phi0,
            &[1, 2, 3],
            StabMode::Exact,
            20_000_000,
        )
        .unwrap();
        assert_eq!(t.stabilizer_count, 12_500);
        for b1 in 1..5u16 {
            for b2 in 1..5u16 {
                let expect = f.is_square(f.div(b2, b1));
                assert_eq!(
                    t.same_orbit(&unit_vec(3, 0, b1), &unit_vec(3, 0, b2)),
                    expect,
                    "beta {b1} vs {b2}"
                );
            }
        }
    }

    #[test]
    fn orbit_input_validation() {
        let r = trivial_restricted("L4_2", 5);
        let zero = Cochain2::zero(4);
        assert!(matches!(
            orbits_on_slice(&r, &[family("aut_l32").unwrap()], &zero, &[0], StabMode::Exact, 1_000),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            orbits_on_slice(&r, &[family("l42_form").unwrap()], &zero, &[0], StabMode::Exact, 10),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            orbits_on_slice(
                &r,
                &[family("l42_form").unwrap()],
                &zero,
                &[2, 1],
                StabMode::Exact,
                20_000_000
            ),
            Err(Error::InvalidInput(_))
        ));
        // A coboundary direction collapses slice points onto each other.
        let l = base_algebra("L4_2", field(5)).unwrap();
        let pm = PMap::from_sparse(4, &[(0, unit_vec(4, 3, 1))]);
        let rr = RestrictedAlgebra::new(l, pm);
        assert!(matches!(
            orbits_on_slice(
                &rr,
                &[family("l42_form").unwrap()],
                &Cochain2::zero(4),
                &[0, 1],
                StabMode::Exact,
                20_000_000
            ),
            Err(Error::InvalidInput(_))
        ));
    }
}
