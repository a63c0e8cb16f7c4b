#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fredkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Discrete inner product <u, v>_W = sum_i w_i conj(u_i) v_i.
cplx weighted_dot(const RVector& w, const CVector& u, const CVector& v);
double weighted_norm(const RVector& w, const CVector& u);

/// Discrete L2(mu x mu) norm of a table of kernel samples:
/// sqrt(sum_ij w_i w_j |N_ij|^2).
double kernel_l2_norm(const CMatrix& samples, const RVector& row_w, const RVector& col_w);

/// diag(row) * m * diag(col)
CMatrix scale_rows_cols(const CMatrix& m, const RVector& row, const RVector& col);

/// Rotates v so that its anchor component (the first entry whose modulus is
/// within 1e-8 of the largest) is real and positive. Returns the unit factor
/// that was applied.
cplx anchor_phase(CVector& v);

/// arg(v) in (-pi, pi], with roundoff-level imaginary parts snapped so that
/// a computed -1/2 - 1e-17i has phase pi.
double canonical_phase(cplx v);

/// Indices ordering values by descending modulus; moduli equal to 1e-10
/// relative are ordered by descending phase in (-pi, pi].

std::vector<std::size_t> spectral_order(const std::vector<cplx>& values);

/// Binomial coefficient in floating point, multiplicative form.
double binomial(long long n, long long k);

/// Eigenvalues of a general square matrix (unordered).
std::vector<cplx> eigenvalues_of(const CMatrix& m);

/// Largest singular value / smallest singular value. Returns +inf when the
/// smallest singular value is zero.
double condition_number(const CMatrix& m);

}  // namespace fredkit
