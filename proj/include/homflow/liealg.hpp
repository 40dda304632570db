#pragma once

// Numerical linear algebra on sl_n: adjoint operators in a fixed basis,
// additive Jordan splitting of flow generators, ad-nilpotency degree, and
// growth profiles of one-parameter subgroups measured through the adjoint
// representation.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace homflow {

using Mat = Eigen::MatrixXd;

// Trace-free n x n real matrix, an element of sl_n.
struct AlgebraElement {
    int n = 0;
    Mat entries;
};

// Validates squareness and (near-)zero trace.
AlgebraElement make_sl(int n, const Mat& m, double tol = 1e-8);

// Fixed ordered basis of sl_n used everywhere below:
//   E_ij for i < j (row-major), then H_k = E_kk - E_{k+1,k+1} for
//   k = 0..n-2, then E_ij for i > j (row-major).
// For sl_2 this is (E_12, H, E_21).
int sl_dim(int n);  // n^2 - 1
Mat sl_basis_element(int n, int idx);
// Coordinates of a (near-)traceless matrix in that basis.
Eigen::VectorXd sl_coordinates(const Mat& m);

// Matrix of Y -> XY - YX acting on the fixed basis; (n^2-1) square.
Mat ad_matrix(const AlgebraElement& X);

// Largest l with A^l != 0, for nilpotent A.  Entries that are all close to
// integers route to exact integer arithmetic; otherwise powers of the
// spectral-normalized matrix are compared against a relative threshold.
// Throws std::domain_error when A is zero or has spectral radius above the
// scaled tolerance (degree undefined / not nilpotent).
int nilpotency_degree(const Mat& A, double tol = 1e-8);

// X = nil + hyp + ell with pairwise commuting parts: nil nilpotent, hyp
// diagonalizable with real eigenvalues, ell diagonalizable with purely
// imaginary eigenvalues.
struct JordanSplit {
    AlgebraElement nil;
    AlgebraElement hyp;
    AlgebraElement ell;
};

// Computed via complex Schur form: eigenvalues are clustered, the triangular
// factor is block-diagonalized by Sylvester solves, and the semisimple part
// is reassembled from the cluster means.  All invariants (reconstruction,
// commutation, spectral type of each part) are verified; failure throws
// std::runtime_error carrying a transform condition-number diagnostic.
JordanSplit jordan_split(const AlgebraElement& X, double tol = 1e-8);

enum class FlowKind { QuasiUnipotent, QuasiDiagonalizable, Bounded };

struct FlowDescriptor {
    AlgebraElement generator;
    FlowKind kind = FlowKind::Bounded;
    int l = 0;  // ad-nilpotency degree; meaningful for QuasiUnipotent (l >= 2)
};

// quasi-diagonalizable iff the hyperbolic part is nonzero; otherwise
// quasi-unipotent (with l from the nilpotent part) iff that is nonzero;
// otherwise bounded.
FlowDescriptor classify_flow(const AlgebraElement& X, double tol = 1e-8);

std::string flow_kind_name(FlowKind k);

// Growth profile: lambda1(t) = log sigma_max(exp(t ad X)), evaluated
// overflow-free by scaling-and-squaring with running renormalization, so
// t can be large enough that exp(t ad X) itself would not be representable.
struct ProfilePoint {
    double t = 0;
    double lambda1 = 0;
};
std::vector<ProfilePoint> lambda1_profile(const AlgebraElement& X,
                                          const std::vector<double>& t_grid);

// Ordinary least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);
// Slope of lambda1 against log t — the polynomial growth degree for
// quasi-unipotent flows.
double profile_log_slope(const std::vector<ProfilePoint>& profile);

// Hilbert-Schmidt norm sqrt(tr(A^t A)) of an adjoint-representation matrix.
double hs_norm(const Mat& g_ad);

// JSON array-of-arrays (integers or floats) -> matrix; validates shape.
Mat parse_matrix_json(const std::string& text);

}  // namespace homflow
