//! Table-driven arithmetic for the finite fields F_{p^n} with small q = p^n.
//!
//! Elements are stored as canonical indices: the element with coefficient
//! vector (c_0, c_1, ..., c_{n-1}) — little-endian, representing
//! c_0 + c_1 t + ... + c_{n-1} t^{n-1} modulo the field's irreducible
//! modulus — has index c_0 + c_1 p + ... + c_{n-1} p^{n-1}. All binary
//! operations are table lookups, so every computation in the crate is exact.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::{Error, Result};

/// A field element, stored as its canonical index in `0..q`.
pub type Fe = u16;

/// Largest supported field size; keeps the lookup tables comfortably small.
pub const MAX_Q: usize = 512;

/// Serializable description of a finite field F_{p^degree}.
///
/// `modulus` is the little-endian coefficient vector of a monic irreducible
/// polynomial of degree `degree` over F_p; it must be present exactly when
/// `degree > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> FieldSpec {
        FieldSpec { p, degree: 1, modulus: None }
    }

    pub fn extension(p: u32, degree: u32, modulus: Vec<u32>) -> FieldSpec {
        FieldSpec { p, degree, modulus: Some(modulus) }
    }

    /// The shipped default moduli: t^2+1 over F_3, t^2+2 over F_5, t^2+1 over
    /// F_7 and t^3+t+1 over F_5. Other extension fields require an explicit
    /// modulus.
    pub fn with_default_modulus(p: u32, degree: u32) -> Result<FieldSpec> {
        if degree == 1 {
            return Ok(FieldSpec::prime(p));
        }
        let modulus = match (p, degree) {
            (3, 2) => vec![1, 0, 1],
            (5, 2) => vec![2, 0, 1],
            (7, 2) => vec![1, 0, 1],
            (5, 3) => vec![1, 1, 0, 1],
            _ => {
                return Err(Error::InvalidField(format!(
                    "no default modulus for p={p}, degree={degree}; supply one explicitly"
                )))
            }
        };
        Ok(FieldSpec { p, degree, modulus: Some(modulus) })
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A concrete finite field with precomputed operation tables.
pub struct Field {
    pub spec: FieldSpec,
    pub q: usize,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
    frob: Vec<Fe>,
    ifrob: Vec<Fe>,
    /// Rank of each element in the canonical (coefficient-lexicographic) order.
    canon_key: Vec<u32>,
}

/// Little-endian digits of `index` in base `p`, padded to length `n`.
fn digits(index: usize, p: usize, n: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(n);
    let mut e = index;
    for _ in 0..n {
        v.push((e % p) as u32);
        e /= p;
    }
    v
}

fn index_of(digits: &[u32], p: usize) -> usize {
    let mut e = 0usize;
    for &d in digits.iter().rev() {
        e = e * p + d as usize;
    }
    e
}

/// Remainder of polynomial division of `a` by monic `m` over F_p; both
/// little-endian.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * mc) % p) % p;
            }
        }
        r.pop();
    }
    r.iter_mut().for_each(|c| *c %= p);
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

/// True when the monic polynomial `m` (little-endian, degree >= 2) has a monic
/// factor of degree d for some 1 <= d <= deg/2, found by trial division.
fn has_small_factor(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        // All monic polynomials of degree d: d free coefficients.
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut cand = digits(idx, p as usize, d);
            cand.push(1);
            let r = poly_rem(m, &cand, p);
            if r.iter().all(|&c| c == 0) {
                return true;
            }
        }
    }
    false
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        if !is_prime(spec.p) {
            return Err(Error::InvalidField(format!("p = {} is not prime", spec.p)));
        }
        if !(1..=3).contains(&spec.degree) {
            return Err(Error::InvalidField(format!(
                "degree {} outside supported range 1..=3",
                spec.degree
            )));
        }
        let p = spec.p as usize;
        let n = spec.degree as usize;
        let q = p.pow(spec.degree);
        if q > MAX_Q {
            return Err(Error::InvalidField(format!("q = {q} exceeds supported maximum {MAX_Q}")));
        }
        let modulus: Vec<u32> = match (&spec.modulus, n) {
            (None, 1) => vec![0, 1], // t: unused placeholder for prime fields
            (Some(_), 1) => {
                return Err(Error::InvalidField("prime field must not carry a modulus".into()))
            }
            (None, _) => {
                return Err(Error::InvalidField("extension field requires a modulus".into()))
            }
            (Some(m), _) => {
                if m.len() != n + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must have degree {n} (length {})",
                        n + 1
                    )));
                }
                if m[n] != 1 {
                    return Err(Error::InvalidField("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= spec.p) {
                    return Err(Error::InvalidField("modulus coefficients must be reduced mod p".into()));
                }
                if has_small_factor(m, spec.p) {
                    return Err(Error::InvalidField("modulus is reducible".into()));
                }
                m.clone()
            }
        };

        let mut add = vec![0 as Fe; q * q];
        let mut mul = vec![0 as Fe; q * q];
        let mut neg = vec![0 as Fe; q];
        for a in 0..q {
            let da = digits(a, p, n);
            let mut dn = da.clone();
            dn.iter_mut().for_each(|c| *c = (spec.p - *c) % spec.p);
            neg[a] = index_of(&dn, p) as Fe;
            for b in 0..q {
                let db = digits(b, p, n);
                let ds: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % spec.p).collect();
                add[a * q + b] = index_of(&ds, p) as Fe;
                let prod = if n == 1 {
                    vec![(da[0] * db[0]) % spec.p]
                } else {
                    poly_rem(&poly_mul(&da, &db, spec.p), &modulus, spec.p)
                };
                let mut dp = prod;
                dp.resize(n, 0);
                mul[a * q + b] = index_of(&dp, p) as Fe;
            }
        }

        let mut f = Field {
            spec,
            q,
            add,
            mul,
            neg,
            inv: vec![0; q],
            frob: vec![0; q],
            ifrob: vec![0; q],
            canon_key: vec![0; q],
        };
        for a in 1..q {
            f.inv[a] = f.pow(a as Fe, (q - 2) as u64);
        }
        for a in 0..q {
            f.frob[a] = f.pow(a as Fe, f.spec.p as u64);
        }
        for a in 0..q {
            let mut x = a as Fe;
            for _ in 0..n - 1 {
                x = f.frob[x as usize];
            }
            f.ifrob[a] = x;
            debug_assert_eq!(f.frob[f.ifrob[a] as usize], a as Fe);
        }
        for a in 0..q {
            let d = digits(a, p, n);
            let mut key = 0u32;
            for &c in &d {
                key = key * f.spec.p + c;
            }
            f.canon_key[a] = key;
        }
        Ok(f)
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree
    }

    /// Number of field elements q = p^degree.
    pub fn order(&self) -> usize {
        self.q
    }

    pub fn zero(&self) -> Fe {
        0
    }

    pub fn one(&self) -> Fe {
        1
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize * self.q + b as usize]
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    /// a^p (the Frobenius automorphism).
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.frob[a as usize]
    }

    /// a^{p^{n-1}}, the inverse of the Frobenius automorphism; gives unique
    /// p-th roots.
    pub fn inv_frobenius(&self, a: Fe) -> Fe {
        self.ifrob[a as usize]
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc: Fe = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The element of the prime subfield congruent to `v`.
    pub fn from_int(&self, v: i64) -> Fe {
        let p = self.spec.p as i64;
        let r = ((v % p) + p) % p;
        r as Fe
    }

    /// Element from a little-endian coefficient vector (length <= degree).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Fe {
        assert!(coeffs.len() <= self.spec.degree as usize, "too many coefficients");
        let mut d: Vec<u32> = coeffs.iter().map(|&c| c % self.spec.p).collect();
        d.resize(self.spec.degree as usize, 0);
        index_of(&d, self.spec.p as usize) as Fe
    }

    /// Little-endian coefficient vector of `a` (length = degree).
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        digits(a as usize, self.spec.p as usize, self.spec.degree as usize)
    }

    /// Canonical order: lexicographic on little-endian coefficient vectors.
    /// Coincides with the index order on prime fields but not for degree > 1.
    pub fn canonical_cmp(&self, a: Fe, b: Fe) -> Ordering {
        self.canon_key[a as usize].cmp(&self.canon_key[b as usize])
    }

    /// All elements sorted in canonical order.
    pub fn canonical_elements(&self) -> Vec<Fe> {
        let mut v: Vec<Fe> = (0..self.q as u16).collect();
        v.sort_by(|&a, &b| self.canonical_cmp(a, b));
        v
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if a == 0 {
            return true;
        }
        self.pow(a, ((self.q - 1) / 2) as u64) == 1
    }

    pub fn elem_to_json(&self, a: Fe) -> serde_json::Value {
        if self.spec.degree == 1 {
            serde_json::json!(a)
        } else {
            serde_json::json!(self.coeffs(a))
        }
    }

    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<Fe> {
        match v {
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::InvalidInput(format!("bad element literal {n}")))?;
                Ok(self.from_int(i))
            }
            serde_json::Value::Array(items) => {
                if items.len() > self.spec.degree as usize {
                    return Err(Error::InvalidInput(format!(
                        "coefficient vector of length {} in degree-{} field",
                        items.len(),
                        self.spec.degree
                    )));
                }
                let mut coeffs = Vec::with_capacity(items.len());
                for item in items {
                    let i = item
                        .as_i64()
                        .ok_or_else(|| Error::InvalidInput(format!("bad coefficient {item}")))?;
                    coeffs.push((((i % self.spec.p as i64) + self.spec.p as i64)
                        % self.spec.p as i64) as u32);
                }
                Ok(self.from_coeffs(&coeffs))
            }
            other => Err(Error::InvalidInput(format!("bad field element JSON: {other}"))),
        }
    }

    /// Representatives of the cosets of the subgroup
    /// S = { eps^k : eps^m = 1 } (with S = (F*)^k when `m` is `None`) in F*.
    ///
    /// The identity coset is represented by 1; every other coset by its
    /// canonically smallest element. The result is sorted canonically.
    pub fn coset_reps(&self, k: u32, m: Option<u32>) -> Result<Vec<Fe>> {
        if !(k == 2 || k == 3) {
            return Err(Error::InvalidInput(format!("coset exponent k = {k} outside {{2, 3}}")));
        }
        let mut subgroup = vec![false; self.q];
        match m {
            None => {
                for a in 1..self.q {
                    subgroup[self.pow(a as Fe, k as u64) as usize] = true;
                }
            }
            Some(m) => {
                for a in 1..self.q {
                    if self.pow(a as Fe, m as u64) == 1 {
                        subgroup[self.pow(a as Fe, k as u64) as usize] = true;
                    }
                }
            }
        }
        let s: Vec<Fe> = (1..self.q as u16).filter(|&a| subgroup[a as usize]).collect();
        assert!(subgroup[1], "coset subgroup must contain 1");

        let mut visited = vec![false; self.q];
        let mut reps = Vec::new();
        // Pin the identity coset to representative 1.
        for &e in &s {
            visited[self.mul(1, e) as usize] = true;
        }
        reps.push(1 as Fe);
        for a in self.canonical_elements() {
            if a == 0 || visited[a as usize] {
                continue;
            }
            reps.push(a);
            for &e in &s {
                visited[self.mul(a, e) as usize] = true;
            }
        }
        reps.sort_by(|&a, &b| self.canonical_cmp(a, b));
        Ok(reps)
    }

    /// Number of solutions (x, y) in F^2 of x^2 - a y^2 = b, by exhaustive
    /// scan.
    pub fn count_conic_solutions(&self, a: Fe, b: Fe) -> usize {
        let mut count = 0;
        for x in 0..self.q as u16 {
            let x2 = self.mul(x, x);
            for y in 0..self.q as u16 {
                let v = self.sub(x2, self.mul(a, self.mul(y, y)));
                if v == b {
                    count += 1;
                }
            }
        }
        count
    }

    /// A solution of x^2 - a y^2 = b. Requires a != 0; a solution always
    /// exists then, and the canonically first one is returned.
    pub fn solve_conic(&self, a: Fe, b: Fe) -> Result<(Fe, Fe)> {
        if a == 0 {
            return Err(Error::InvalidInput("solve_conic requires a != 0".into()));
        }
        let order = self.canonical_elements();
        for &x in &order {
            let x2 = self.mul(x, x);
            for &y in &order {
                if self.sub(x2, self.mul(a, self.mul(y, y))) == b {
                    return Ok((x, y));
                }
            }
        }
        unreachable!("x^2 - a y^2 = b is always solvable over a finite field when a != 0");
    }
}
