//! Dense kernels on top of nalgebra: Hermitian eigen, ordered SVD,
//! pseudo-inverse, range bases and weighted operator norms.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seqspace::{lp, Exponent, SeqSpaceSpec};
use crate::error::{Error, Result};
use crate::{CMat, CVec, C64};

/// Eigenvalues ascending with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    // symmetrize so round-off asymmetry does not leak into the solver
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Thin SVD `m = U diag(s) V^H` with `s` descending.
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v_h: CMat,
}

pub fn svd(m: &CMat) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: CMat::zeros(r, 0),
            s: Vec::new(),
            v_h: CMat::zeros(0, c),
        };
    }
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("requested U");
    let v_h = dec.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    Svd {
        u: CMat::from_fn(r, k, |i, j| u[(i, order[j])]),
        s: order.iter().map(|&i| dec.singular_values[i]).collect(),
        v_h: CMat::from_fn(k, c, |i, j| v_h[(order[i], j)]),
    }
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rank_tol * s_max`.
pub fn numerical_rank(s: &[f64], rank_tol: f64) -> usize {
    let smax = s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rank_tol * smax).count()
}

/// Moore-Penrose inverse with relative cut `rank_tol`.
pub fn pseudo_inverse(m: &CMat, rank_tol: f64) -> CMat {
    let (r, c) = m.shape();
    let d = svd(m);
    let rank = numerical_rank(&d.s, rank_tol);
    let mut out = CMat::zeros(c, r);
    for i in 0..rank {
        let inv = 1.0 / d.s[i];
        let v = d.v_h.row(i).adjoint();
        let u = d.u.column(i).adjoint();
        out += (v * u).scale(inv);
    }
    out
}

/// Orthonormal basis of the column space.
pub fn range_basis(m: &CMat, rank_tol: f64) -> CMat {
    let d = svd(m);
    let rank = numerical_rank(&d.s, rank_tol);
    d.u.columns(0, rank).into_owned()
}

/// `s_max / s_min+`, over nonzero singular values.
pub fn generalized_condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m);
    let rank = numerical_rank(&s, crate::RANK_TOL);
    if rank == 0 {
        return Err(Error::InvalidParameter(
            "condition number of the zero matrix".into(),
        ));
    }
    Ok(s[0] / s[rank - 1])
}

/// Operator 2-norm.
pub fn norm2(m: &CMat) -> f64 {
    singular_values(m).first().cloned().unwrap_or(0.0)
}

/// Seeded generator used by every randomized routine.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform on `[-1, 1]`.
pub fn random_cvec<R: Rng>(n: usize, rng: &mut R) -> CVec {
    DVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
}

pub fn random_cmat<R: Rng>(r: usize, c: usize, rng: &mut R) -> CMat {
    DMatrix::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
}

/// Norm of a map between weighted sequence spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpNorm {
    pub value: f64,
    /// False when `value` is only an upper bound.
    pub exact: bool,
}

/// `diag(w_to) M diag(1/w_from)`.
pub(crate) fn conjugated(m: &CMat, from: &SeqSpaceSpec, to: &SeqSpaceSpec) -> Result<CMat> {
    if m.ncols() != from.len() {
        return Err(Error::dim(from.len(), m.ncols()));
    }
    if m.nrows() != to.len() {
        return Err(Error::dim(to.len(), m.nrows()));
    }
    let (wf, wt) = (from.weight.values(), to.weight.values());
    Ok(CMat::from_fn(m.nrows(), m.ncols(), |k, l| {
        m[(k, l)] * (wt[k] / wf[l])
    }))
}

fn col_norms(m: &CMat, p: Exponent) -> Vec<f64> {
    (0..m.ncols())
        .map(|l| lp(m.column(l).iter().map(|z| z.norm()), p))
        .collect()
}

fn row_norms(m: &CMat, p: Exponent) -> Vec<f64> {
    (0..m.nrows())
        .map(|k| lp(m.row(k).iter().map(|z| z.norm()), p))
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// `||M||` from `l^{p}_{w}` of `from` into `l^{p}_{w}` of `to`.
///
/// Exact when the domain is `l^1`, the codomain is a sup space, or both are
/// `l^2`. Otherwise the smaller of a Hölder column bound and, for equal
/// exponents, the Riesz-Thorin interpolant of the `l^1` and `l^inf` norms.
pub fn weighted_op_norm(m: &CMat, from: &SeqSpaceSpec, to: &SeqSpaceSpec) -> Result<OpNorm> {
    let mb = conjugated(m, from, to)?;
    if mb.nrows() == 0 || mb.ncols() == 0 {
        return Ok(OpNorm { value: 0.0, exact: true });
    }
    let (p, q) = (from.p, to.p);
    if p == Exponent::One {
        return Ok(OpNorm { value: sup(&col_norms(&mb, q)), exact: true });
    }
    if q.is_sup() {
        return Ok(OpNorm { value: sup(&row_norms(&mb, p.dual())), exact: true });
    }
    if p == Exponent::Two && q == Exponent::Two {
        return Ok(OpNorm { value: norm2(&mb), exact: true });
    }
    let holder = lp(col_norms(&mb, q).into_iter(), p.dual());
    let mut bound = holder;
    if p.value() == q.value() {
        let one = sup(&col_norms(&mb, Exponent::One));
        let inf = sup(&row_norms(&mb, Exponent::One));
        let t = 1.0 / p.value();
        bound = bound.min(one.powf(t) * inf.powf(1.0 - t));
    }
    Ok(OpNorm { value: bound, exact: false })
}

/// Largest observed `||M c||_to / ||c||_from` over random and structured probes.
///
/// Always a lower estimate of the true operator norm.
pub fn probe_op_norm(
    m: &CMat,
    from: &SeqSpaceSpec,
    to: &SeqSpaceSpec,
    random_probes: usize,
    seed: u64,
) -> Result<f64> {
    let mb = conjugated(m, from, to)?;
    let (rows, cols) = mb.shape();
    if rows == 0 || cols == 0 {
        return Ok(0.0);
    }
    let ratio = |c: &CVec| -> f64 {
        let den = lp(c.iter().map(|z| z.norm()), from.p);
        if den == 0.0 {
            0.0
        } else {
            lp((&mb * c).iter().map(|z| z.norm()), to.p) / den
        }
    };
    let mut best = 0.0f64;
    for l in 0..cols {
        let mut e = CVec::zeros(cols);
        e[l] = C64::new(1.0, 0.0);
        best = best.max(ratio(&e));
    }
    // phase-aligned rows are extremal for sup-type domains
    for k in 0..rows {
        let c = CVec::from_fn(cols, |l, _| {
            let z = mb[(k, l)];
            if z.norm() > 0.0 {
                z.conj() / z.norm()
            } else {
                C64::new(0.0, 0.0)
            }
        });
        best = best.max(ratio(&c));
    }
    let mut rng = seeded(seed);
    for _ in 0..random_probes {
        best = best.max(ratio(&random_cvec(cols, &mut rng)));
    }
    if from.p == Exponent::Two && to.p == Exponent::Two {
        let d = svd(&mb);
        if !d.s.is_empty() {
            best = best.max(ratio(&d.v_h.row(0).adjoint()));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::seqspace::Weight;
    use approx::assert_relative_eq;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0))))
    }

    fn max_abs(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pinv_of_singular_diagonal() {
        let p = pseudo_inverse(&diag(&[2.0, 1.0, 0.0]), crate::RANK_TOL);
        assert!(max_abs(&(p - diag(&[0.5, 1.0, 0.0]))) < 1e-14);
    }

    #[test]
    fn pinv_of_unitary_is_adjoint() {
        let mut rng = seeded(3);
        let q = random_cmat(6, 6, &mut rng).qr().q();
        let p = pseudo_inverse(&q, crate::RANK_TOL);
        assert!(max_abs(&(p - q.adjoint())) < 1e-12);
    }

    #[test]
    fn moore_penrose_identities_tall() {
        let mut rng = seeded(11);
        let m = random_cmat(8, 5, &mut rng);
        let p = pseudo_inverse(&m, crate::RANK_TOL);
        let scale = max_abs(&m);
        assert!(max_abs(&(&m * &p * &m - &m)) <= 1e-10 * scale);
        assert!(max_abs(&(&p * &m * &p - &p)) <= 1e-10 * max_abs(&p));
        let mp = &m * &p;
        let pm = &p * &m;
        assert!(max_abs(&(&mp - mp.adjoint())) <= 1e-10);
        assert!(max_abs(&(&pm - pm.adjoint())) <= 1e-10);
    }

    #[test]
    fn eigen_is_ascending() {
        let (vals, vecs) = hermitian_eigen(&diag(&[3.0, 1.0, 2.0]));
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_relative_eq!(vecs[(1, 0)].norm(), 1.0);
    }

    #[test]
    fn condition_numbers() {
        assert_eq!(generalized_condition_number(&CMat::identity(4, 4)).unwrap(), 1.0);
        assert_relative_eq!(generalized_condition_number(&diag(&[4.0, 2.0, 0.0])).unwrap(), 2.0);
        assert!(generalized_condition_number(&CMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn range_basis_rank() {
        let mut rng = seeded(5);
        let a = random_cmat(7, 3, &mut rng);
        let m = &a * a.adjoint();
        let q = range_basis(&m, crate::RANK_TOL);
        assert_eq!(q.ncols(), 3);
        assert!(max_abs(&(q.adjoint() * &q - CMat::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn exact_cases_match_formulas() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 3.0), C64::new(4.0, 0.0)],
        );
        let s1 = SeqSpaceSpec::unweighted(Exponent::One, 2);
        let sinf = SeqSpaceSpec::unweighted(Exponent::Inf, 2);
        // max column sum
        assert_eq!(weighted_op_norm(&m, &s1, &s1).unwrap().value, 6.0);
        // max row sum
        assert_eq!(weighted_op_norm(&m, &sinf, &sinf).unwrap().value, 7.0);
        assert_eq!(weighted_op_norm(&m, &s1, &sinf).unwrap().value, 4.0);
    }

    #[test]
    fn weights_conjugate_the_matrix() {
        let w = Weight::explicit(vec![1.0, 10.0]).unwrap();
        let s = SeqSpaceSpec::new(Exponent::Inf, w);
        // entry (1,0) is scaled by w_1 / w_0
        let m = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(weighted_op_norm(&m, &s, &s).unwrap().value, 10.0);
    }

    #[test]
    fn probes_never_exceed_bounds() {
        let mut rng = seeded(21);
        let m = random_cmat(9, 7, &mut rng);
        for p in [Exponent::One, Exponent::Two, Exponent::Finite(3.0), Exponent::Inf] {
            for q in [Exponent::One, Exponent::Two, Exponent::Finite(1.5), Exponent::Inf] {
                let from = SeqSpaceSpec::unweighted(p, 7);
                let to = SeqSpaceSpec::unweighted(q, 9);
                let bound = weighted_op_norm(&m, &from, &to).unwrap();
                let measured = probe_op_norm(&m, &from, &to, 100, 1).unwrap();
                assert!(measured <= bound.value * (1.0 + 1e-10), "{p} -> {q}");
                if bound.exact {
                    assert!(measured >= 0.5 * bound.value, "{p} -> {q}");
                }
            }
        }
    }
}
