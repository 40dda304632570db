#include "homflow/liealg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace homflow {

namespace {

using CMat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool nearly_integral(const Mat& a, double eps = 1e-9) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j) - std::round(a(i, j))) > eps) return false;
    return true;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

AlgebraElement make_sl(int n, const Mat& m, double tol) {
    if (n < 2) throw std::invalid_argument("sl_n needs n >= 2");
    if (m.rows() != n || m.cols() != n)
        throw std::invalid_argument("algebra element must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    const double scale = std::max(1.0, m.norm());
    if (std::abs(m.trace()) > tol * scale)
        throw std::invalid_argument("algebra element must be trace-free, trace = " +
                                    fmt(m.trace()));
    return AlgebraElement{n, m};
}

int sl_dim(int n) { return n * n - 1; }

Mat sl_basis_element(int n, int idx) {
    Mat m = Mat::Zero(n, n);
    const int upper = n * (n - 1) / 2;
    if (idx >= 0 && idx < upper) {
        int k = idx;
        for (int i = 0; i < n; ++i) {
            const int row_count = n - 1 - i;
            if (k < row_count) {
                m(i, i + 1 + k) = 1.0;
                return m;
            }
            k -= row_count;
        }
    } else if (idx < upper + n - 1) {
        const int k = idx - upper;
        m(k, k) = 1.0;
        m(k + 1, k + 1) = -1.0;
        return m;
    } else if (idx < sl_dim(n)) {
        int k = idx - upper - (n - 1);
        for (int i = 1; i < n; ++i) {
            if (k < i) {
                m(i, k) = 1.0;
                return m;
            }
            k -= i;
        }
    }
    throw std::out_of_range("sl basis index " + std::to_string(idx));
}

Eigen::VectorXd sl_coordinates(const Mat& m) {
    const int n = int(m.rows());
    Eigen::VectorXd c(sl_dim(n));
    int p = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c(p++) = m(i, j);
    double run = 0;
    for (int k = 0; k + 1 < n; ++k) {
        run += m(k, k);
        c(p++) = run;
    }
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) c(p++) = m(i, j);
    return c;
}

Mat ad_matrix(const AlgebraElement& X) {
    const int N = sl_dim(X.n);
    Mat ad(N, N);
    for (int j = 0; j < N; ++j) {
        Mat b = sl_basis_element(X.n, j);
        ad.col(j) = sl_coordinates(X.entries * b - b * X.entries);
    }
    return ad;
}

int nilpotency_degree(const Mat& A, double tol) {
    if (A.rows() != A.cols()) throw std::invalid_argument("operator must be square");
    const int N = int(A.rows());
    const double nrm = A.norm();
    if (nrm <= tol) throw std::domain_error("nilpotency degree undefined for the zero operator");

    if (nearly_integral(A)) {
        // Exact path: powers of an integer matrix are integers, represented
        // exactly in doubles while entries stay below 2^52.
        Mat B = A.unaryExpr([](double x) { return std::round(x); });
        Mat P = B;
        const double cap = 4.5e15;
        bool exact_ok = true;
        int last_nonzero = 1;
        for (int k = 2; k <= N + 1; ++k) {
            if (P.cwiseAbs().maxCoeff() * B.cwiseAbs().maxCoeff() * N > cap) {
                exact_ok = false;
                break;
            }
            P = P * B;
            if ((P.array() == 0.0).all()) return last_nonzero;
            last_nonzero = k;
        }
        if (exact_ok)
            throw std::domain_error("operator is not nilpotent: power " + std::to_string(N + 1) +
                                    " is nonzero");
        // fall through to the thresholded path
    }

    // Thresholded path on the spectrally normalized matrix.
    const double sigma = A.jacobiSvd().singularValues()(0);
    Mat B = A / sigma;
    Mat P = B;
    const double theta = std::max(tol, 1e-10) * std::sqrt(double(N));
    int last_nonzero = 0;
    for (int k = 1; k <= N; ++k) {
        const double pk = P.norm();
        if (pk > theta) last_nonzero = k;
        if (k == N && pk > std::max(tol, 1e-8) * std::sqrt(double(N)))
            throw std::domain_error("operator is not nilpotent: normalized power " +
                                    std::to_string(N) + " has norm " + fmt(pk));
        P = P * B;
    }
    if (last_nonzero == 0) throw std::domain_error("nilpotency degree undefined for the zero operator");
    return last_nonzero;
}

namespace {

// Swap the diagonal entries at positions (i, i+1) of the upper-triangular T
// by a unitary similarity, updating U alongside.
void swap_adjacent(CMat& T, CMat& U, int i) {
    const Cplx a = T(i, i), b = T(i, i + 1), d = T(i + 1, i + 1);
    const Cplx x1 = b, x2 = d - a;
    const double nv = std::sqrt(std::norm(x1) + std::norm(x2));
    if (nv < 1e-300) return;  // equal eigenvalues; order immaterial
    Eigen::Matrix2cd Q;
    Q << x1 / nv, -std::conj(x2) / nv, x2 / nv, std::conj(x1) / nv;
    T.middleCols(i, 2) = T.middleCols(i, 2) * Q;
    T.middleRows(i, 2) = Q.adjoint() * T.middleRows(i, 2);
    U.middleCols(i, 2) = U.middleCols(i, 2) * Q;
    T(i + 1, i) = 0.0;
}

}  // namespace

JordanSplit jordan_split(const AlgebraElement& X, double tol) {
    const int n = X.n;
    const double scale = std::max(1.0, X.entries.norm());

    Eigen::ComplexSchur<CMat> schur(X.entries.cast<Cplx>());
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("jordan split: Schur decomposition did not converge");
    CMat T = schur.matrixT();
    CMat U = schur.matrixU();

    // Numerically computed eigenvalues of a defective cluster spread like
    // eps^(1/m); the clustering radius must absorb that.
    const double delta = std::max(tol * 100.0, 4.0 * std::pow(kEps, 1.0 / n)) * scale;

    // Transitive clustering of the diagonal.
    std::vector<int> ids(n, -1);
    int n_clusters = 0;
    for (int i = 0; i < n; ++i) {
        if (ids[i] >= 0) continue;
        ids[i] = n_clusters++;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int j = 0; j < n; ++j) {
                if (ids[j] >= 0) continue;
                for (int k = 0; k < n; ++k)
                    if (ids[k] == ids[i] && std::abs(T(j, j) - T(k, k)) <= delta) {
                        ids[j] = ids[i];
                        grew = true;
                        break;
                    }
            }
        }
    }

    // Bubble cluster members into contiguous position, preserving first-seen
    // cluster order.
    int pos = 0;
    for (int c = 0; c < n_clusters; ++c) {
        for (int scan = pos; scan < n; ++scan) {
            if (ids[scan] != c) continue;
            for (int k = scan; k > pos; --k) {
                swap_adjacent(T, U, k - 1);
                std::swap(ids[k - 1], ids[k]);
            }
            ++pos;
        }
    }

    // Block sizes in diagonal order.
    std::vector<int> sizes(n_clusters, 0);
    for (int i = 0; i < n; ++i) ++sizes[ids[i]];

    // Peel off the coupling above each diagonal block with Sylvester solves:
    // with P = [[I, R],[0, I]] and A11 R - R A22 = -A12, conjugation by P
    // zeroes the off-diagonal block.
    CMat W = CMat::Identity(n, n);
    int off = 0;
    for (int c = 0; c + 1 < n_clusters; ++c) {
        const int m = sizes[c];
        const int r = n - off - m;
        CMat a11 = T.block(off, off, m, m);
        CMat a22 = T.block(off + m, off + m, r, r);
        CMat a12 = T.block(off, off + m, m, r);
        CMat K = CMat::Zero(m * r, m * r);
        for (int jj = 0; jj < r; ++jj)
            for (int ii = 0; ii < m; ++ii) {
                const int row = jj * m + ii;
                for (int kk = 0; kk < m; ++kk) K(row, jj * m + kk) += a11(ii, kk);
                for (int kk = 0; kk < r; ++kk) K(row, kk * m + ii) -= a22(kk, jj);
            }
        Eigen::VectorXcd rhs(m * r);
        for (int jj = 0; jj < r; ++jj)
            for (int ii = 0; ii < m; ++ii) rhs(jj * m + ii) = -a12(ii, jj);
        Eigen::VectorXcd rv = K.colPivHouseholderQr().solve(rhs);
        CMat R(m, r);
        for (int jj = 0; jj < r; ++jj)
            for (int ii = 0; ii < m; ++ii) R(ii, jj) = rv(jj * m + ii);

        CMat P = CMat::Identity(n, n);
        P.block(off, off + m, m, r) = R;
        CMat Pinv = CMat::Identity(n, n);
        Pinv.block(off, off + m, m, r) = -R;
        T = Pinv * T * P;
        T.block(off, off + m, m, r).setZero();
        W = W * P;
        off += m;
    }

    // Cluster eigenvalues from block traces (exact to rounding: trace is
    // preserved through every similarity above).
    CMat lambda = CMat::Zero(n, n);
    CMat lam_re = CMat::Zero(n, n);
    CMat lam_im = CMat::Zero(n, n);
    off = 0;
    for (int c = 0; c < n_clusters; ++c) {
        const int m = sizes[c];
        Cplx mu = T.block(off, off, m, m).trace() / double(m);
        for (int i = 0; i < m; ++i) {
            lambda(off + i, off + i) = mu;
            lam_re(off + i, off + i) = mu.real();
            lam_im(off + i, off + i) = Cplx(0.0, mu.imag());
        }
        off += m;
    }

    CMat V = U * W;
    CMat Vinv = V.partialPivLu().solve(CMat::Identity(n, n));
    const double cond = V.norm() * Vinv.norm();

    CMat S = V * lambda * Vinv;
    CMat Shyp = V * lam_re * Vinv;
    CMat Sell = V * lam_im * Vinv;

    JordanSplit js;
    js.hyp = AlgebraElement{n, Shyp.real()};
    js.ell = AlgebraElement{n, Sell.real()};
    js.nil = AlgebraElement{n, X.entries - S.real()};

    // Verify everything the decomposition promises; tolerances widen with the
    // transform's conditioning.
    const double bound = std::max(tol * 100.0, tol * cond) * scale;
    auto expect = [&](double err, double b, const char* what) {
        if (!(err <= b))
            throw std::runtime_error(std::string("jordan split verification failed (") + what +
                                     "): error " + fmt(err) + ", transform condition ~ " +
                                     fmt(cond));
    };
    const Mat sum = js.nil.entries + js.hyp.entries + js.ell.entries;
    expect((X.entries - sum).norm(), bound, "reconstruction");
    expect(S.imag().norm() + Shyp.imag().norm() + Sell.imag().norm(), bound, "real form");
    auto comm = [](const Mat& a, const Mat& b) { return (a * b - b * a).norm(); };
    expect(comm(js.nil.entries, js.hyp.entries), bound * scale, "nil/hyp commutation");
    expect(comm(js.nil.entries, js.ell.entries), bound * scale, "nil/ell commutation");
    expect(comm(js.hyp.entries, js.ell.entries), bound * scale, "hyp/ell commutation");

    Eigen::ComplexEigenSolver<CMat> enil(js.nil.entries.cast<Cplx>());
    expect(enil.eigenvalues().cwiseAbs().maxCoeff(), delta + bound, "nilpotent spectrum");
    Eigen::ComplexEigenSolver<CMat> ehyp(js.hyp.entries.cast<Cplx>());
    expect(ehyp.eigenvalues().imag().cwiseAbs().maxCoeff(), delta + bound, "real spectrum");
    Eigen::ComplexEigenSolver<CMat> eell(js.ell.entries.cast<Cplx>());
    expect(eell.eigenvalues().real().cwiseAbs().maxCoeff(), delta + bound, "imaginary spectrum");

    return js;
}

FlowDescriptor classify_flow(const AlgebraElement& X, double tol) {
    FlowDescriptor fd;
    fd.generator = X;
    const double scale = std::max(1.0, X.entries.norm());
    JordanSplit js = jordan_split(X, tol);
    if (js.hyp.entries.norm() > tol * scale) {
        fd.kind = FlowKind::QuasiDiagonalizable;
        return fd;
    }
    if (js.nil.entries.norm() > tol * scale) {
        fd.kind = FlowKind::QuasiUnipotent;
        fd.l = nilpotency_degree(ad_matrix(js.nil), tol);
        if (fd.l < 2)
            throw std::logic_error("quasi-unipotent flow with ad-nilpotency degree < 2");
        return fd;
    }
    fd.kind = FlowKind::Bounded;
    return fd;
}

std::string flow_kind_name(FlowKind k) {
    switch (k) {
        case FlowKind::QuasiUnipotent: return "quasi_unipotent";
        case FlowKind::QuasiDiagonalizable: return "quasi_diagonalizable";
        case FlowKind::Bounded: return "bounded";
    }
    return "?";
}

std::vector<ProfilePoint> lambda1_profile(const AlgebraElement& X,
                                          const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0)) throw std::invalid_argument("t grid must be positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("t grid must be increasing");
    }
    const Mat A = ad_matrix(X);
    std::vector<ProfilePoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        Mat M = t * A;
        const double nrm = M.norm();
        int s = 0;
        if (nrm > 0.25) s = int(std::ceil(std::log2(nrm / 0.25)));
        Mat E = (M / std::ldexp(1.0, s)).exp();
        double f = E.norm();
        if (!std::isfinite(f) || f <= 0)
            throw std::overflow_error("adjoint exponential overflow at t = " + fmt(t));
        E /= f;
        double logc = std::log(f);
        for (int k = 0; k < s; ++k) {
            E = E * E;
            f = E.norm();
            if (!std::isfinite(f) || f <= 0)
                throw std::overflow_error("adjoint exponential overflow at t = " + fmt(t));
            E /= f;
            logc = 2.0 * logc + std::log(f);
        }
        const double smax = E.jacobiSvd().singularValues()(0);
        const double lam = logc + std::log(smax);
        if (!std::isfinite(lam))
            throw std::overflow_error("adjoint exponential overflow at t = " + fmt(t));
        out.push_back(ProfilePoint{t, lam});
    }
    return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs two same-length samples");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0) throw std::invalid_argument("slope fit with degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

double profile_log_slope(const std::vector<ProfilePoint>& profile) {
    std::vector<double> x, y;
    x.reserve(profile.size());
    y.reserve(profile.size());
    for (const auto& p : profile) {
        x.push_back(std::log(p.t));
        y.push_back(p.lambda1);
    }
    return least_squares_slope(x, y);
}

double hs_norm(const Mat& g_ad) { return g_ad.norm(); }

Mat parse_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("matrix JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON: expected array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array()) throw std::invalid_argument("matrix JSON: row is not an array");
        if (i == 0)
            cols = j[i].size();
        else if (j[i].size() != cols)
            throw std::invalid_argument("matrix JSON: ragged rows");
    }
    if (cols == 0) throw std::invalid_argument("matrix JSON: empty rows");
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number())
                throw std::invalid_argument("matrix JSON: non-numeric entry");
            m(int(i), int(k)) = j[i][k].get<double>();
        }
    return m;
}

}  // namespace homflow
