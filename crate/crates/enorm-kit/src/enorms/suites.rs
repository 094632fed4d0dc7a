//! Inequality suites over computed norms. Every entry carries its slack.

use super::{enorm, enorm_value, operator_norm, seminorm};
use crate::error::{Error, Result};
use crate::gspace::GeneratingOperator;
use crate::matcore::{direct_sum, kron, lambda_min, sqrtm_psd, trace_norm, ComplexMatrix};
use crate::report::{Check, Report};
use crate::scalar::Real;
use crate::tol::Tolerances;
use crate::transforms::golden_min;

fn rel<T: Real>(tol: &Tolerances<T>, scale: T) -> T {
    tol.gap_tol * scale.abs().max(T::one())
}

/// Splits (A, B) into P·A and (I−P)·B with P the coordinate projector onto the
/// first half of the output space, so that (PA)*(I−P)B = 0. Pairs that are
/// already orthogonal are kept as they are.
fn orthogonal_pair<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let cross = &a.adjoint() * b;
    let scale = a.max_abs().max(b.max_abs()).max(T::one());
    if cross.max_abs() <= T::lit(1e-12) * scale * scale {
        return (a.clone(), b.clone());
    }
    let half = a.rows().div_ceil(2);
    let pa = ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        if i < half {
            a[(i, j)]
        } else {
            T::zero().into()
        }
    });
    let pb = ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| {
        if i >= half {
            b[(i, j)]
        } else {
            T::zero().into()
        }
    });
    (pa, pb)
}

/// Basic single-space inequalities for operators A, B on the space of G.
pub fn inequality_suite_basic<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<Report> {
    let n = g.dim();
    for (name, m) in [("A", a), ("B", b)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimMismatch(format!(
                "{name} is {}x{}, G has dimension {n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let mut r = Report::new();
    let ra = enorm(a, g, e, tol)?;
    let rb = enorm(b, g, e, tol)?;
    let (na, nb) = (ra.value, rb.value);

    // |A| and A*A.
    let ata = a.gram();
    let abs_a = sqrtm_psd(&ata, tol.psd_tol)?;
    let n_abs = enorm(&abs_a, g, e, tol)?.value;
    let n_ata = enorm(&ata, g, e, tol)?.value;
    r.push(Check::eq("|A|: enorm(A) = enorm(|A|)", na, n_abs, rel(tol, na)));
    r.push(Check::le(
        "|A|: enorm(A) <= sqrt(enorm(A*A))",
        na,
        n_ata.sqrt(),
        rel(tol, na),
    ));
    let n_adj = enorm(&a.adjoint(), g, e, tol)?.value;
    r.push(Check::flag(
        "adjoint: enorm(A) vs enorm(A*) (informational)",
        na.as_f64(),
        n_adj.as_f64(),
        true,
    ));

    // Left multiplication.
    let m_a = lambda_min(&ata)?.max(T::zero()).sqrt();
    let op_a = operator_norm(a)?;
    let n_ab = enorm(&(a * b), g, e, tol)?.value;
    r.push(Check::le(
        "product: m(A) enorm(B) <= enorm(AB)",
        m_a * nb,
        n_ab,
        rel(tol, n_ab),
    ));
    r.push(Check::le(
        "product: enorm(AB) <= |A| enorm(B)",
        n_ab,
        op_a * nb,
        rel(tol, n_ab),
    ));

    // Orthogonal ranges.
    let (pa, pb) = orthogonal_pair(a, b);
    let (npa, npb) = (enorm(&pa, g, e, tol)?.value, enorm(&pb, g, e, tol)?.value);
    let nsum = enorm(&(&pa + &pb), g, e, tol)?.value;
    r.push(Check::le(
        "orthogonal sum: max <= enorm(A+B)",
        npa.max(npb),
        nsum,
        rel(tol, nsum),
    ));
    r.push(Check::le(
        "orthogonal sum: enorm(A+B) <= sqrt of squares",
        nsum,
        (npa * npa + npb * npb).sqrt(),
        rel(tol, nsum),
    ));

    // Trace inequality on the mixture of both witnesses.
    let half = T::lit(0.5);
    let rho = &ComplexMatrix::outer(&ra.witness, &ra.witness).scale_real(half)
        + &ComplexMatrix::outer(&rb.witness, &rb.witness).scale_real(half);
    let e_rho = g.mean_energy(&rho, tol.psd_tol)?.max(T::zero());
    let arb = &(a * &rho) * &b.adjoint();
    let tr = arb.trace().norm();
    let tn = trace_norm(&arb)?;
    let bound = enorm_value(a, g, e_rho, tol)? * enorm_value(b, g, e_rho, tol)?;
    r.push(Check::le(
        "trace: |Tr A rho B*| <= |A rho B*|_1",
        tr,
        tn,
        rel(tol, tn),
    ));
    r.push(Check::le(
        "trace: |A rho B*|_1 <= enorm(A) enorm(B) at E_rho",
        tn,
        bound,
        rel(tol, bound),
    ));

    // Monotone equivalence of both families.
    let e2 = T::lit(3.0) * e;
    let na2 = enorm(a, g, e2, tol)?.value;
    let ratio = (e2 / e).sqrt();
    r.push(Check::le(
        "energy scaling: enorm(E1) <= enorm(E2)",
        na,
        na2,
        rel(tol, na2),
    ));
    r.push(Check::le(
        "energy scaling: enorm(E2) <= sqrt(E2/E1) enorm(E1)",
        na2,
        ratio * na,
        rel(tol, na2),
    ));
    let s1 = seminorm(a, g, e)?;
    let s2 = seminorm(a, g, e2)?;
    let half_sqrt = half.sqrt();
    r.push(Check::le(
        "sandwich: sqrt(1/2) enorm <= seminorm",
        half_sqrt * na,
        s1,
        rel(tol, s1),
    ));
    r.push(Check::le("sandwich: seminorm <= enorm", s1, na, rel(tol, na)));
    r.push(Check::le("seminorm scaling: E1 <= E2", s1, s2, rel(tol, s2)));
    r.push(Check::le(
        "seminorm scaling: E2 <= sqrt(2 E2/E1) E1",
        s2,
        (T::lit(2.0) * e2 / e).sqrt() * s1,
        rel(tol, s2),
    ));

    // Single-vector bound with K_phi = max(1, |sqrt(G) phi| / sqrt(E)).
    let mut phi = vec![crate::scalar::re(T::zero()); n];
    phi[0] = crate::scalar::re(T::one());
    phi[n - 1] += crate::scalar::re(T::one());
    let phi = crate::matcore::normalized(&phi).expect("nonzero");
    let e_phi = g.vector_energy(&phi).max(T::zero());
    let k_phi = T::one().max((e_phi / e).sqrt());
    let a_phi = crate::matcore::vnorm(&a.mul_vec(&phi));
    let at_phi = enorm_value(a, g, e_phi, tol)?;
    r.push(Check::le(
        "vector: |A phi| <= enorm at E_phi",
        a_phi,
        at_phi,
        rel(tol, at_phi),
    ));
    r.push(Check::le(
        "vector: enorm at E_phi <= K_phi enorm",
        at_phi,
        k_phi * na,
        rel(tol, at_phi),
    ));
    Ok(r)
}

/// G ⊗ I + I ⊗ G' on the product space.
pub fn tensor_generator<T: Real>(
    g1: &GeneratingOperator<T>,
    g2: &GeneratingOperator<T>,
) -> Result<GeneratingOperator<T>> {
    let (n1, n2) = (g1.dim(), g2.dim());
    let mut eig = Vec::with_capacity(n1 * n2);
    for &x in g1.eigenvalues() {
        for &y in g2.eigenvalues() {
            eig.push(x + y);
        }
    }
    let basis = match (g1.basis(), g2.basis()) {
        (None, None) => None,
        _ => {
            let u1 = g1.basis().cloned().unwrap_or_else(|| ComplexMatrix::identity(n1));
            let u2 = g2.basis().cloned().unwrap_or_else(|| ComplexMatrix::identity(n2));
            Some(kron(&u1, &u2))
        }
    };
    GeneratingOperator::new(eig, basis)
}

/// G₁ ⊕ G₂.
pub fn direct_sum_generator<T: Real>(
    g1: &GeneratingOperator<T>,
    g2: &GeneratingOperator<T>,
) -> Result<GeneratingOperator<T>> {
    let eig: Vec<T> = g1.eigenvalues().iter().chain(g2.eigenvalues()).copied().collect();
    let basis = match (g1.basis(), g2.basis()) {
        (None, None) => None,
        _ => {
            let u1 = g1
                .basis()
                .cloned()
                .unwrap_or_else(|| ComplexMatrix::identity(g1.dim()));
            let u2 = g2
                .basis()
                .cloned()
                .unwrap_or_else(|| ComplexMatrix::identity(g2.dim()));
            Some(direct_sum(&u1, &u2))
        }
    };
    GeneratingOperator::new(eig, basis)
}

/// Maximizes a unimodal function of x ∈ [0, E] (scan of 9 points, then golden refinement).
fn sup_over_split<T: Real>(e: T, mut f: impl FnMut(T) -> Result<T>) -> Result<T> {
    let mut best = T::neg_infinity();
    let mut arg = T::zero();
    for k in 0..=8 {
        let x = e * T::count(k) / T::lit(8.0);
        let v = f(x)?;
        if v > best {
            best = v;
            arg = x;
        }
    }
    let step = e / T::lit(8.0);
    let lo = (arg - step).max(T::zero());
    let hi = (arg + step).min(e);
    let mut err = None;
    let (_, v) = golden_min(
        |x| match f(x) {
            Ok(v) => -v,
            Err(er) => {
                err.get_or_insert(er);
                T::infinity()
            }
        },
        lo,
        hi,
        60,
    );
    if let Some(er) = err {
        return Err(er);
    }
    Ok(best.max(-v))
}

/// Tensor-product and direct-sum relations for A on H₁ (G₁) and B on H₂ (G₂).
pub fn inequality_suite_tensor<T: Real>(
    a: &ComplexMatrix<T>,
    g1: &GeneratingOperator<T>,
    b: &ComplexMatrix<T>,
    g2: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<Report> {
    let (n1, n2) = (g1.dim(), g2.dim());
    if a.rows() != n1 || a.cols() != n1 || b.rows() != n2 || b.cols() != n2 {
        return Err(Error::DimMismatch("A must act on H1 and B on H2".into()));
    }
    if !(e > T::zero()) {
        return Err(Error::Infeasible(format!("budget {}", e.as_f64())));
    }
    let mut r = Report::new();
    let g12 = tensor_generator(g1, g2)?;
    let i2 = ComplexMatrix::identity(n2);
    let ai = kron(a, &i2);
    let na = enorm(a, g1, e, tol)?.value;
    let n_ai = enorm(&ai, &g12, e, tol)?.value;
    let g1i = tensor_generator(g1, &GeneratingOperator::diagonal(vec![T::zero(); n2])?)?;
    let n_ai1 = enorm(&ai, &g1i, e, tol)?.value;
    r.push(Check::eq(
        "tensor: enorm(A x I) under G12 = enorm(A)",
        n_ai,
        na,
        rel(tol, na),
    ));
    r.push(Check::eq(
        "tensor: enorm(A x I) under G1 x I = enorm(A)",
        n_ai1,
        na,
        rel(tol, na),
    ));

    let ab = kron(a, b);
    let n_ab = enorm(&ab, &g12, e, tol)?.value;
    let lower = sup_over_split(e, |x| {
        Ok(enorm_value(a, g1, x, tol)? * enorm_value(b, g2, e - x, tol)?)
    })?;
    let (ata, btb) = (a.gram(), b.gram());
    let upper = sup_over_split(e, |x| {
        Ok(
            (enorm_value(&ata, g1, x, tol)? * enorm_value(&btb, g2, e - x, tol)?)
                .max(T::zero())
                .sqrt(),
        )
    })?;
    r.push(Check::le(
        "tensor: split lower bound <= enorm(A x B)",
        lower,
        n_ab,
        rel(tol, n_ab),
    ));
    r.push(Check::le(
        "tensor: enorm(A x B) <= split upper bound",
        n_ab,
        upper,
        rel(tol, upper),
    ));
    let nb = enorm(b, g2, e, tol)?.value;
    let cap = (na * operator_norm(b)?).min(operator_norm(a)? * nb);
    r.push(Check::le(
        "tensor: enorm(A x B) <= min(enorm(A)|B|, |A|enorm(B))",
        n_ab,
        cap,
        rel(tol, cap),
    ));

    // Direct sum G1 ⊕ G2 with D = [[A, K], [K*, B]].
    let g = direct_sum_generator(g1, g2)?;
    let n = n1 + n2;
    let k = ComplexMatrix::from_fn(n1, n2, |i, j| {
        if i == j {
            T::lit(0.5).into()
        } else {
            T::zero().into()
        }
    });
    let mut d = ComplexMatrix::zeros(n, n);
    d.set_block(0, 0, a);
    d.set_block(0, n1, &k);
    d.set_block(n1, 0, &k.adjoint());
    d.set_block(n1, n1, b);
    let d1 = d.block(0, 0, n, n1);
    let d2 = d.block(0, n1, n, n2);
    let nd = enorm(&d, &g, e, tol)?.value;
    let nd1 = enorm(&d1, g1, e, tol)?.value;
    let nd2 = enorm(&d2, g2, e, tol)?.value;
    r.push(Check::le(
        "direct sum: enorm(D) <= enorm(DP1) + enorm(DP2)",
        nd,
        nd1 + nd2,
        rel(tol, nd),
    ));
    for q in 0..=4 {
        let p = T::count(q) / T::lit(4.0);
        let lo = (p * nd1 * nd1 + (T::one() - p) * nd2 * nd2).sqrt();
        r.push(Check::le(
            format!("direct sum: p = {:.2} lower bound <= enorm(D)", p.as_f64()),
            lo,
            nd,
            rel(tol, nd),
        ));
    }
    Ok(r)
}
