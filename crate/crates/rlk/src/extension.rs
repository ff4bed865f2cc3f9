//! Central extensions: build L_theta from a cocycle and factor an algebra
//! with a distinguished central p-trivial line back into a base and a
//! cocycle.
//!
//! In L_theta = L + Fm the bracket and p-map are
//! [(x1+m1),(x2+m2)] = [x1,x2] + phi(x1,x2) m and
//! (x+m)^{[p]} = x^{[p]} + omega(x) m, with m appended as the last basis
//! vector.

use crate::cohomology::{delta1, is_z2_member, Cochain2};
use crate::field::Fe;
use crate::matrix::{Mat, Subspace};
use crate::restricted::{verify_restricted, PMap, RestrictedAlgebra};
use crate::{Error, Result};

pub fn build_extension(r: &RestrictedAlgebra, theta: &Cochain2) -> Result<RestrictedAlgebra> {
    let f = r.alg.field.clone();
    let n = r.alg.dim;
    if theta.dim() != n {
        return Err(Error::InvalidInput(format!(
            "cocycle dimension {} does not match algebra dimension {n}",
            theta.dim()
        )));
    }
    if !is_z2_member(r, theta) {
        return Err(Error::InvalidInput("theta is not a cocycle".into()));
    }
    let mut brackets = Vec::new();
    for (i, j) in crate::liealg::pairs(n) {
        for (k, &c) in r.alg.bracket_basis(i, j).iter().enumerate() {
            if c != 0 {
                brackets.push(((i, j), k, c));
            }
        }
        let c = theta.phi[(i, j)];
        if c != 0 {
            brackets.push(((i, j), n, c));
        }
    }
    let alg = crate::liealg::LieAlgebra::from_brackets(f, n + 1, &brackets);
    let mut pmap = PMap::trivial(n + 1);
    for i in 0..n {
        pmap.images[i][..n].copy_from_slice(&r.pmap.images[i]);
        pmap.images[i][n] = theta.omega[i];
    }
    let out = RestrictedAlgebra::new(alg, pmap);
    let report = verify_restricted(&out, false);
    assert!(report.ok, "extension failed verification: {:?}", report.first_violation);
    Ok(out)
}

/// Factor K at a nonzero central vector z with z^{[p]} = 0: the quotient
/// R = K/<z> with its induced p-map, the cocycle theta measured through the
/// canonical coordinate section sigma, and sigma itself (columns are the
/// coset representatives).
pub fn factor_extension(
    k: &RestrictedAlgebra,
    z: &[Fe],
) -> Result<(RestrictedAlgebra, Cochain2, Mat)> {
    let f = k.alg.field.clone();
    let n = k.alg.dim;
    if z.iter().all(|&c| c == 0) {
        return Err(Error::InvalidInput("z must be nonzero".into()));
    }
    if !k.alg.center().contains(z, &f) {
        return Err(Error::InvalidInput("z is not central".into()));
    }
    if k.eval(z)? != vec![0; n] {
        return Err(Error::InvalidInput("z^[p] is nonzero".into()));
    }
    let line = Subspace::span(&[z.to_vec()], n, &f);
    let (q, pi, sigma) = k.alg.quotient(&line);
    let m = q.dim;
    // Coefficient extraction along z: v = c z for v in the line.
    let zi = z.iter().position(|&c| c != 0).unwrap();
    let zcoeff = |v: &[Fe]| -> Fe {
        let c = f.div(v[zi], z[zi]);
        debug_assert_eq!(v, (0..n).map(|t| f.mul(c, z[t])).collect::<Vec<_>>());
        c
    };
    let mut images = Vec::with_capacity(m);
    for r in 0..m {
        images.push(pi.apply(&k.eval(&sigma.col(r))?, &f));
    }
    let base = RestrictedAlgebra::new(q, PMap { images });
    let mut theta = Cochain2::zero(m);
    for (a, b) in crate::liealg::pairs(m) {
        let kbr = k.alg.bracket(&sigma.col(a), &sigma.col(b));
        let lift = sigma.apply(&base.alg.bracket_basis(a, b), &f);
        let diff: Vec<Fe> = (0..n).map(|t| f.sub(kbr[t], lift[t])).collect();
        let c = zcoeff(&diff);
        theta.phi[(a, b)] = c;
        theta.phi[(b, a)] = f.neg(c);
    }
    for a in 0..m {
        let kp = k.eval(&sigma.col(a))?;
        let lift = sigma.apply(&base.pmap.images[a], &f);
        let diff: Vec<Fe> = (0..n).map(|t| f.sub(kp[t], lift[t])).collect();
        theta.omega[a] = zcoeff(&diff);
    }
    assert!(is_z2_member(&base, &theta), "factored cocycle is not in Z^2");
    Ok((base, theta, sigma))
}

/// The isomorphism L_theta -> K of the reconstruction: quotient basis
/// vectors map through the section and the extension line maps to z.
pub fn reconstruction_witness(sigma: &Mat, z: &[Fe]) -> Mat {
    let n = z.len();
    let m = sigma.cols;
    assert!(sigma.rows == n && m + 1 == n);
    let mut w = Mat::zeros(n, m + 1);
    for r in 0..m {
        let col = sigma.col(r);
        for t in 0..n {
            w[(t, r)] = col[t];
        }
    }
    for t in 0..n {
        w[(t, m)] = z[t];
    }
    w
}

/// The matrix of f(x) = x + psi(x) m, f(m) = m, which is an isomorphism
/// L_theta -> L_{theta + delta1(psi)} for every theta. `eta` must lie in
/// B^2; psi is recovered by solving delta1(psi) = eta.
pub fn coboundary_shift_witness(r: &RestrictedAlgebra, eta: &Cochain2) -> Result<Mat> {
    let f = &*r.alg.field;
    let n = r.alg.dim;
    if eta.dim() != n {
        return Err(Error::InvalidInput("eta dimension mismatch".into()));
    }
    // Solve for psi: columns of D are the flattened coboundaries of the
    // dual basis functionals.
    let flen = crate::cohomology::flat_len(n);
    let mut d = Mat::zeros(flen, n);
    for i in 0..n {
        let mut psi = vec![0; n];
        psi[i] = 1;
        let col = delta1(r, &psi).flatten();
        for t in 0..flen {
            d[(t, i)] = col[t];
        }
    }
    let psi = d
        .solve(&eta.flatten(), f)
        .ok_or_else(|| Error::InvalidInput("eta is not a coboundary".into()))?;
    let mut w = Mat::identity(n + 1);
    for i in 0..n {
        w[(n, i)] = psi[i];
    }
    Ok(w)
}

/// Check that `m` is an isomorphism of restricted algebras a -> b: an
/// invertible matrix with m([x,y]_a) = [m x, m y]_b and
/// m(x^{[p]_a}) = (m x)^{[p]_b} (checked on basis vectors and pairs, which
/// suffices by bilinearity and semilinearity).
pub fn is_restricted_iso(a: &RestrictedAlgebra, b: &RestrictedAlgebra, m: &Mat) -> bool {
    let f = &*a.alg.field;
    let n = a.alg.dim;
    if b.alg.dim != n || m.rows != n || m.cols != n {
        return false;
    }
    if m.inverse(f).is_none() {
        return false;
    }
    for (i, j) in crate::liealg::pairs(n) {
        let lhs = m.apply(&a.alg.bracket_basis(i, j), f);
        let rhs = b.alg.bracket(&m.col(i), &m.col(j));
        if lhs != rhs {
            return false;
        }
    }
    for i in 0..n {
        let lhs = m.apply(&a.pmap.images[i], f);
        let rhs = match b.eval(&m.col(i)) {
            Ok(v) => v,
            Err(_) => return false,
        };
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldSpec};
    use crate::liealg::base_algebra;
    use crate::restricted::is_p_nilpotent;
    use std::sync::Arc;

    fn f5() -> Arc<Field> {
        Arc::new(Field::new(FieldSpec::prime(5)).unwrap())
    }

    fn restricted(name: &str, pmap: &[(usize, Vec<Fe>)]) -> RestrictedAlgebra {
        let alg = base_algebra(name, f5()).unwrap();
        let dim = alg.dim;
        RestrictedAlgebra::new(alg, PMap::from_sparse(dim, pmap))
    }

    #[test]
    fn build_examples() {
        let f = f5();
        // (abelian 4, trivial, theta = (Delta_12, f_1)): [x1,x2] = x5 and
        // x1^{[p]} = x5.
        let r = restricted("L4_1", &[]);
        let theta = Cochain2::from_sparse(&f, 4, &[((0, 1), 1)], &[(0, 1)]);
        let k = build_extension(&r, &theta).unwrap();
        assert_eq!(k.dim(), 5);
        assert_eq!(k.alg.bracket_basis(0, 1), vec![0, 0, 0, 0, 1]);
        assert_eq!(k.pmap.images[0], vec![0, 0, 0, 0, 1]);
        assert!(verify_restricted(&k, false).ok);
        assert_eq!(is_p_nilpotent(&k), (true, 2));

        // theta = 0: a strongly abelian line splits off.
        let r = restricted("L4_3", &[(0, vec![0, 0, 0, 1])]);
        let k = build_extension(&r, &Cochain2::zero(4)).unwrap();
        for i in 0..4 {
            assert_eq!(k.alg.bracket_basis(i, 4), vec![0; 5]);
        }
        assert_eq!(k.pmap.images[4], vec![0; 5]);

        // (L4_3 with x3 -> x4, theta = (Delta_23, 2 f_4)) gives the algebra
        // with [x2,x3] = x5, res x3 = x4, res x4 = 2 x5.
        let r = restricted("L4_3", &[(2, vec![0, 0, 0, 1])]);
        let theta = Cochain2::from_sparse(&f, 4, &[((1, 2), 1)], &[(3, 2)]);
        let k = build_extension(&r, &theta).unwrap();
        assert_eq!(k.alg.bracket_basis(1, 2), vec![0, 0, 0, 0, 1]);
        assert_eq!(k.pmap.images[2], vec![0, 0, 0, 1, 0]);
        assert_eq!(k.pmap.images[3], vec![0, 0, 0, 0, 2]);

        // A non-cocycle is rejected.
        let r = restricted("L4_2", &[]);
        let bad = Cochain2::from_sparse(&f, 4, &[((2, 3), 1)], &[]);
        assert!(build_extension(&r, &bad).is_err());
    }

    #[test]
    fn factor_examples() {
        let f = f5();
        // L5_2 with the trivial p-map factored at x5: base L4_2, theta = 0.
        let k = restricted("L5_2", &[]);
        let (base, theta, _) = factor_extension(&k, &[0, 0, 0, 0, 1]).unwrap();
        assert_eq!(base.dim(), 4);
        assert_eq!(base.alg.bracket_basis(0, 1), vec![0, 0, 1, 0]);
        assert!(theta.is_zero());

        // L5_9 factored at x5: phi = Delta_23 over the base L4_3.
        let k = restricted("L5_9", &[]);
        let (base, theta, _) = factor_extension(&k, &[0, 0, 0, 0, 1]).unwrap();
        let expect = base_algebra("L4_3", f.clone()).unwrap();
        for (i, j) in crate::liealg::pairs(4) {
            assert_eq!(base.alg.bracket_basis(i, j), expect.bracket_basis(i, j));
        }
        assert_eq!(theta.phi[(1, 2)], 1);
        assert_eq!(
            theta,
            Cochain2::from_sparse(&f, 4, &[((1, 2), 1)], &[])
        );

        // Bad inputs.
        assert!(factor_extension(&k, &[0; 5]).is_err());
        assert!(factor_extension(&k, &[1, 0, 0, 0, 0]).is_err());
        let kp = restricted("L5_9", &[(3, vec![0, 0, 0, 0, 1])]);
        // x4 is central but x4^[p] = x5 != 0.
        assert!(factor_extension(&kp, &[0, 0, 0, 1, 0]).is_err());
    }

    #[test]
    fn round_trip_build_then_factor() {
        let f = f5();
        let bases: Vec<RestrictedAlgebra> = vec![
            restricted("L4_2", &[(0, vec![0, 0, 1, 0])]),
            restricted("L4_3", &[(0, vec![0, 0, 0, 1])]),
            restricted("L4_1", &[(0, vec![0, 1, 0, 0]), (1, vec![0, 0, 1, 0])]),
        ];
        for r in bases {
            for theta in crate::cohomology::h2_basis(&r).unwrap() {
                let k = build_extension(&r, &theta).unwrap();
                let mut z = vec![0; 5];
                z[4] = 1;
                let (base, theta_back, sigma) = factor_extension(&k, &z).unwrap();
                // The canonical section embeds the first coordinates, so
                // the cocycle returns exactly.
                assert_eq!(theta_back, theta);
                for (i, j) in crate::liealg::pairs(4) {
                    assert_eq!(base.alg.bracket_basis(i, j), r.alg.bracket_basis(i, j));
                }
                assert_eq!(base.pmap, r.pmap);
                // Reconstruction witness: L_theta -> K is an isomorphism.
                let w = reconstruction_witness(&sigma, &z);
                let rebuilt = build_extension(&base, &theta_back).unwrap();
                assert!(is_restricted_iso(&rebuilt, &k, &w));
            }
        }
        let _ = f;
    }

    #[test]
    fn factor_then_build_reconstructs() {
        // Factor an algebra that was not literally built by build_extension:
        // L5_9 with res x1 = x4 at z = x5.
        let k = restricted("L5_9", &[(0, vec![0, 0, 0, 1, 0])]);
        let (base, theta, sigma) = factor_extension(&k, &[0, 0, 0, 0, 1]).unwrap();
        let rebuilt = build_extension(&base, &theta).unwrap();
        let w = reconstruction_witness(&sigma, &[0, 0, 0, 0, 1]);
        assert!(is_restricted_iso(&rebuilt, &k, &w));
    }

    #[test]
    fn shift_witness() {
        let f = f5();
        // eta = 0 gives the identity.
        let r = restricted("L4_2", &[]);
        let w = coboundary_shift_witness(&r, &Cochain2::zero(4)).unwrap();
        assert_eq!(w, Mat::identity(5));

        // L4_2 trivial, theta = (0, f_1), eta = (Delta_12, 0) = delta1 of
        // the x3-dual: the witness is unit upper triangular and maps
        // L_theta to L_{theta+eta}.
        let theta = Cochain2::from_sparse(&f, 4, &[], &[(0, 1)]);
        let eta = Cochain2::from_sparse(&f, 4, &[((0, 1), 1)], &[]);
        let w = coboundary_shift_witness(&r, &eta).unwrap();
        assert_eq!(w[(4, 2)], 1);
        let k1 = build_extension(&r, &theta).unwrap();
        let k2 = build_extension(&r, &theta.add(&eta, &f)).unwrap();
        assert!(is_restricted_iso(&k1, &k2, &w));

        // Shifting by every coboundary of every catalog pair round-trips.
        let r = restricted("L4_3", &[(0, vec![0, 0, 0, 1])]);
        let theta = crate::cohomology::h2_basis(&r).unwrap().swap_remove(0);
        for eta in crate::cohomology::b2_basis(&r).unwrap() {
            let w = coboundary_shift_witness(&r, &eta).unwrap();
            let k1 = build_extension(&r, &theta).unwrap();
            let k2 = build_extension(&r, &theta.add(&eta, &f)).unwrap();
            assert!(is_restricted_iso(&k1, &k2, &w));
        }

        // A non-coboundary is rejected.
        let eta = Cochain2::from_sparse(&f, 4, &[((0, 2), 1)], &[]);
        assert!(coboundary_shift_witness(&r, &eta).is_err());
    }

    #[test]
    fn exhaustive_verification_of_a_small_extension() {
        let f = f5();
        let alg = base_algebra("L3_2", f.clone()).unwrap();
        let r = RestrictedAlgebra::new(alg, PMap::from_sparse(3, &[(0, vec![0, 0, 1])]));
        let theta = Cochain2::from_sparse(&f, 3, &[((0, 2), 0)], &[(2, 1)]);
        assert!(is_z2_member(&r, &theta));
        let k = build_extension(&r, &theta).unwrap();
        let rep = verify_restricted(&k, true);
        assert!(rep.ok && rep.exhaustive);
    }
}
