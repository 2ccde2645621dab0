//! Dense 5x5 matrix exponential.
//!
//! Two independent routes. The spectral route diagonalises the generator and
//! exponentiates eigenvalues; it is exact for the semisimple generators that
//! arise here (isochore and adiabat) and is gated behind conditioning and
//! residual checks. When those gates trip (defective or near-defective
//! input) the code falls back to scaling-and-squaring with a [13/13] Pade
//! approximant, which needs no structure at all. Keeping both routes live
//! lets the self-diagnostics cross-check one against the other.

use nalgebra::Matrix5;
use num_complex::Complex64;

pub type M5 = Matrix5<f64>;
type M5c = Matrix5<Complex64>;

/// Condition-number gate for the eigenvector matrix; beyond this the
/// spectral route is abandoned.
const COND_LIMIT: f64 = 1e8;

/// Preferred route with automatic fallback. Always succeeds.
pub fn expm(a: &M5) -> M5 {
    expm_spectral(a).unwrap_or_else(|| expm_pade(a))
}

fn one_norm(a: &M5) -> f64 {
    (0..5).map(|j| (0..5).map(|i| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Spectral route: cluster the eigenvalues, pull an orthonormal basis of
/// each cluster's eigenspace out of an SVD, and exponentiate on the
/// diagonal. Returns `None` when the eigenvector matrix is ill-conditioned,
/// the eigenvector residual is large (defective generator), or roundoff
/// leaks into the imaginary part.
pub fn expm_spectral(a: &M5) -> Option<M5> {
    let scale = one_norm(a).max(1.0);
    let eigs = a.complex_eigenvalues();
    let ac = a.map(|x| Complex64::new(x, 0.0));

    // Greedy clustering of (numerically) coincident eigenvalues.
    let tol_cluster = 1e-8 * scale;
    let mut assigned = [false; 5];
    let mut v = M5c::zeros();
    let mut lambdas = [Complex64::new(0.0, 0.0); 5];
    let mut col = 0;
    for i in 0..5 {
        if assigned[i] {
            continue;
        }
        let mut members = vec![i];
        for j in (i + 1)..5 {
            if !assigned[j] && (eigs[j] - eigs[i]).norm() < tol_cluster {
                members.push(j);
                assigned[j] = true;
            }
        }
        assigned[i] = true;
        let mean = members.iter().map(|&k| eigs[k]).sum::<Complex64>() / members.len() as f64;

        let shifted = ac - M5c::identity() * mean;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&p, &q| svd.singular_values[p].total_cmp(&svd.singular_values[q]));
        for &row in order.iter().take(members.len()) {
            let vec = v_t.row(row).adjoint();
            v.set_column(col, &vec);
            lambdas[col] = mean;
            col += 1;
        }
    }
    debug_assert_eq!(col, 5);

    // Conditioning gate on the eigenvector matrix.
    let sv = v.svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0 && smax / smin < COND_LIMIT) {
        return None;
    }

    // Residual gate: A V = V Lambda must hold or the clusters were defective.
    let mut vl = M5c::zeros();
    for (j, lambda) in lambdas.iter().enumerate() {
        vl.set_column(j, &(v.column(j) * *lambda));
    }
    let residual = ac * v - vl;
    if residual.iter().map(|x| x.norm()).fold(0.0, f64::max) > 1e-8 * scale {
        return None;
    }

    let v_inv = v.try_inverse()?;
    let mut diag = M5c::zeros();
    for j in 0..5 {
        diag[(j, j)] = lambdas[j].exp();
    }
    let result = v * diag * v_inv;

    let re_max = result.iter().map(|x| x.re.abs()).fold(0.0, f64::max);
    let im_max = result.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
    if im_max > 1e-10 * re_max.max(1.0) {
        return None;
    }
    Some(result.map(|x| x.re))
}

/// Scaling-and-squaring with the [13/13] Pade approximant. Unconditional.
pub fn expm_pade(a: &M5) -> M5 {
    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let norm = one_norm(a);
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(squarings);

    let id = M5::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;

    let u = a
        * (a6 * (a6 * B[13] + a4 * B[11] + a2 * B[9])
            + a6 * B[7]
            + a4 * B[5]
            + a2 * B[3]
            + id * B[1]);
    let v = a6 * (a6 * B[12] + a4 * B[10] + a2 * B[8])
        + a6 * B[6]
        + a4 * B[4]
        + a2 * B[2]
        + id * B[0];

    let mut r = (v - u)
        .lu()
        .solve(&(v + u))
        .expect("Pade denominator is singular; generator is not finite");
    for _ in 0..squarings {
        r = r * r;
    }
    r
}
