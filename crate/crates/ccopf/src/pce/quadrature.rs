use super::univariate::{recurrence_coeffs, UnivariateBasis};
use super::PceError;
use crate::linalg::symmetric_tridiagonal_eig;

/// Gauss rule for the basis measure via Golub-Welsch: nodes are the
/// eigenvalues of the symmetric tridiagonal Jacobi matrix of the recurrence,
/// weights the squared first eigenvector components. The rule is exact for
/// polynomials up to degree `2 * n_nodes - 1` and the weights sum to one.
pub fn gauss_rule(basis: &UnivariateBasis, n_nodes: usize) -> Result<(Vec<f64>, Vec<f64>), PceError> {
    if n_nodes == 0 {
        return Err(PceError::EmptyRule);
    }
    let rec = if n_nodes <= basis.recurrence().len() {
        basis.recurrence().to_vec()
    } else {
        recurrence_coeffs(basis.component(), n_nodes)
    };
    let diag: Vec<f64> = rec[..n_nodes].iter().map(|r| r.0).collect();
    let off: Vec<f64> = rec[1..n_nodes].iter().map(|r| r.1.sqrt()).collect();
    let (nodes, firsts) = symmetric_tridiagonal_eig(&diag, &off)?;
    let weights = firsts.iter().map(|z| z * z).collect();
    Ok((nodes, weights))
}
