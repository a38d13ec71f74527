#include "hbdof/cxmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace hbdof {

namespace {

std::string dim_str(const ComplexMatrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
    return out;
}

ComplexMatrix ComplexMatrix::col_range(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw std::invalid_argument("col_range: out of bounds");
    ComplexMatrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, first + c);
    return out;
}

void ComplexMatrix::set_col(std::size_t c, const ComplexMatrix& column) {
    if (column.rows() != rows_ || column.cols() != 1 || c >= cols_) {
        throw std::invalid_argument("set_col: shape mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = column(r, 0);
}

double ComplexMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (const cxd& z : data_) sum += std::norm(z);
    return std::sqrt(sum);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const cxd& z : data_) m = std::max(m, std::abs(z));
    return m;
}

bool ComplexMatrix::all_finite() const {
    for (const cxd& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void ComplexMatrix::normalize_col(std::size_t c) {
    double norm2 = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) norm2 += std::norm((*this)(r, c));
    if (norm2 == 0.0) return;
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) *= inv;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: " + dim_str(a) + " times " + dim_str(b));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cxd aik = a(r, k);
            if (aik == cxd{}) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += aik * b(k, c);
        }
    }
    return out;
}

ComplexMatrix operator*(cxd s, const ComplexMatrix& a) {
    ComplexMatrix out = a;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) *= s;
    return out;
}

ComplexMatrix operator*(double s, const ComplexMatrix& a) { return cxd{s, 0.0} * a; }

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("add: shape mismatch");
    }
    ComplexMatrix out = a;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += b(r, c);
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("sub: shape mismatch");
    }
    ComplexMatrix out = a;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) -= b(r, c);
    return out;
}

ComplexMatrix hcat(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() && a.rows() == 0) return b;
    if (b.empty() && b.rows() == 0) return a;
    if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
    ComplexMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
        for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
    }
    return out;
}

ComplexMatrix vcat(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() && a.cols() == 0) return b;
    if (b.empty() && b.cols() == 0) return a;
    if (a.cols() != b.cols()) throw std::invalid_argument("vcat: column mismatch");
    ComplexMatrix out(a.rows() + b.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) out(a.rows() + r, c) = b(r, c);
    return out;
}

// ---------------------------------------------------------------------------
// RNG
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64_next(x);
    // xoshiro must not start from the all-zero state
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double Rng::next_unit() {
    // 53 significant bits, shifted into (0, 1] so log() is always finite
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

cxd Rng::next_cgauss() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("gaussian_matrix: dimensions must be positive");
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = rng.next_cgauss();
    return out;
}

// ---------------------------------------------------------------------------
// SVD (one-sided Jacobi)
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTol = 1e-14;

// One-sided Jacobi on a tall matrix (rows >= cols). Rotates column pairs of w
// until all pairs are mutually orthogonal, accumulating the rotations in v so
// that a = w * v^H holds throughout.
void jacobi_orthogonalize(ComplexMatrix& w, ComplexMatrix& v) {
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();
    if (n < 2) return;

    // columns this far below the matrix scale are rounding noise; rotating
    // them against each other never settles (the Frobenius norm is invariant
    // under the rotations, so this cutoff is fixed)
    const double frob = w.frobenius_norm();
    const double noise = 32.0 * std::numeric_limits<double>::epsilon() * frob;
    const double noise2 = noise * noise;

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                cxd apq{0.0, 0.0};
                for (std::size_t k = 0; k < m; ++k) {
                    app += std::norm(w(k, p));
                    aqq += std::norm(w(k, q));
                    apq += std::conj(w(k, p)) * w(k, q);
                }
                if (app <= noise2 || aqq <= noise2) continue;
                const double off = std::abs(apq);
                if (off <= kJacobiTol * std::sqrt(app * aqq) || off == 0.0) continue;
                rotated = true;

                // phase that makes the pair's inner product real nonnegative
                const cxd phase = apq / off;
                const double zeta = (aqq - app) / (2.0 * off);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                const cxd conj_phase = std::conj(phase);
                for (std::size_t k = 0; k < m; ++k) {
                    const cxd wp = w(k, p);
                    const cxd wq = conj_phase * w(k, q);
                    w(k, p) = c * wp - s * wq;
                    w(k, q) = s * wp + c * wq;
                }
                for (std::size_t k = 0; k < v.rows(); ++k) {
                    const cxd vp = v(k, p);
                    const cxd vq = conj_phase * v(k, q);
                    v(k, p) = c * vp - s * vq;
                    v(k, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) return;
    }
    throw NumericalError("svd: Jacobi sweeps did not converge within 100 sweeps");
}

}  // namespace

SvdResult svd(const ComplexMatrix& a) {
    if (a.rows() < a.cols()) {
        SvdResult t = svd(a.adjoint());
        return {std::move(t.v), std::move(t.singular_values), std::move(t.u)};
    }
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0) return {ComplexMatrix(m, 0), {}, ComplexMatrix(0, 0)};

    ComplexMatrix w = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    jacobi_orthogonalize(w, v);

    std::vector<double> sigma(n);
    for (std::size_t c = 0; c < n; ++c) {
        double norm2 = 0.0;
        for (std::size_t r = 0; r < m; ++r) norm2 += std::norm(w(r, c));
        sigma[c] = std::sqrt(norm2);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    ComplexMatrix u(m, n);
    ComplexMatrix v_sorted(n, n);
    std::vector<double> s_sorted(n);
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        s_sorted[c] = sigma[src];
        for (std::size_t r = 0; r < m; ++r) u(r, c) = w(r, src);
        for (std::size_t r = 0; r < n; ++r) v_sorted(r, c) = v(r, src);
    }

    // normalize the left vectors; replace numerically-zero directions with an
    // orthonormal completion so u always has orthonormal columns
    const double zero_cut =
        s_sorted.front() * static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
    std::size_t nonzero = 0;
    while (nonzero < n && s_sorted[nonzero] > zero_cut) ++nonzero;
    for (std::size_t c = 0; c < nonzero; ++c) {
        const double inv = 1.0 / s_sorted[c];
        for (std::size_t r = 0; r < m; ++r) u(r, c) *= inv;
    }
    if (nonzero < n) {
        const ComplexMatrix fill = orthonormal_complement(u.col_range(0, nonzero));
        for (std::size_t c = nonzero; c < n; ++c) {
            for (std::size_t r = 0; r < m; ++r) u(r, c) = fill(r, c - nonzero);
        }
    }

    return {std::move(u), std::move(s_sorted), std::move(v_sorted)};
}

std::size_t rank(const ComplexMatrix& a, double rel_tol) {
    if (rel_tol <= 0.0) throw std::invalid_argument("rank: rel_tol must be positive");
    if (a.empty()) return 0;
    const SvdResult f = svd(a);
    if (f.singular_values.empty()) return 0;
    const double cut = rel_tol * f.singular_values.front();
    std::size_t r = 0;
    for (double s : f.singular_values) {
        if (s > cut && s > 0.0) ++r;
    }
    return r;
}

ComplexMatrix nullspace(const ComplexMatrix& a, double rel_tol) {
    if (rel_tol <= 0.0) throw std::invalid_argument("nullspace: rel_tol must be positive");
    const std::size_t n = a.cols();
    if (a.rows() == 0 || n == 0) return ComplexMatrix::identity(n);
    const SvdResult f = svd(a);
    const double cut = rel_tol * (f.singular_values.empty() ? 0.0 : f.singular_values.front());
    std::size_t r = 0;
    while (r < f.singular_values.size() && f.singular_values[r] > cut && f.singular_values[r] > 0.0) ++r;
    return orthonormal_complement(f.v.col_range(0, r));
}

// ---------------------------------------------------------------------------
// QR (Householder)
// ---------------------------------------------------------------------------

namespace {

// Householder reflectors of a tall matrix, stored column by column. Supports
// assembling the thin Q and applying the full Q to canonical basis vectors.
struct Householder {
    explicit Householder(const ComplexMatrix& a) : r(a), m(a.rows()), n(a.cols()) {
        reflectors.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<cxd> v(m - k);
            double xnorm2 = 0.0;
            for (std::size_t i = k; i < m; ++i) {
                v[i - k] = r(i, k);
                xnorm2 += std::norm(r(i, k));
            }
            const double xnorm = std::sqrt(xnorm2);
            cxd alpha{0.0, 0.0};
            double vnorm2 = 0.0;
            if (xnorm > 0.0) {
                const cxd x0 = v[0];
                const cxd dir = (std::abs(x0) == 0.0) ? cxd{1.0, 0.0} : x0 / std::abs(x0);
                alpha = -dir * xnorm;
                v[0] -= alpha;
                for (const cxd& z : v) vnorm2 += std::norm(z);
            }
            reflectors.push_back({v, vnorm2});
            if (vnorm2 > 0.0) {
                for (std::size_t c = k; c < n; ++c) apply_reflector(k, &r, c);
            }
            r(k, k) = alpha;
            for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
        }
    }

    // x <- (I - 2 v v^H / v^H v) x on rows [k, m) of column c
    void apply_reflector(std::size_t k, ComplexMatrix* mat, std::size_t c) const {
        const auto& [v, vnorm2] = reflectors[k];
        if (vnorm2 == 0.0) return;
        cxd dot{0.0, 0.0};
        for (std::size_t i = k; i < m; ++i) dot += std::conj(v[i - k]) * (*mat)(i, c);
        const cxd scale = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) (*mat)(i, c) -= scale * v[i - k];
    }

    // columns [first, first+count) of the full Q = H_0 H_1 ... H_{n-1}
    ComplexMatrix q_columns(std::size_t first, std::size_t count) const {
        ComplexMatrix out(m, count);
        for (std::size_t c = 0; c < count; ++c) out(first + c, c) = 1.0;
        for (std::size_t c = 0; c < count; ++c) {
            for (std::size_t k = n; k-- > 0;) apply_reflector(k, &out, c);
        }
        return out;
    }

    ComplexMatrix r;
    std::size_t m, n;
    std::vector<std::pair<std::vector<cxd>, double>> reflectors;
};

}  // namespace

QrResult qr(const ComplexMatrix& a) {
    if (a.rows() < a.cols()) throw std::invalid_argument("qr: requires rows >= cols");
    const std::size_t n = a.cols();
    Householder hh(a);
    ComplexMatrix q = hh.q_columns(0, n);
    ComplexMatrix r_thin(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r_thin(i, j) = hh.r(i, j);

    // fix phases so the diagonal of R is real and nonnegative
    for (std::size_t k = 0; k < n; ++k) {
        const cxd d = r_thin(k, k);
        const double mag = std::abs(d);
        if (mag == 0.0) continue;
        const cxd ph = std::conj(d) / mag;
        for (std::size_t j = k; j < n; ++j) r_thin(k, j) *= ph;
        const cxd qph = std::conj(ph);
        for (std::size_t i = 0; i < q.rows(); ++i) q(i, k) *= qph;
    }
    return {std::move(q), std::move(r_thin)};
}

ComplexMatrix orthonormal_complement(const ComplexMatrix& basis) {
    const std::size_t n = basis.rows();
    const std::size_t r = basis.cols();
    if (r == 0) return ComplexMatrix::identity(n);
    if (r > n) throw std::invalid_argument("orthonormal_complement: more columns than rows");
    if (r == n) return {n, 0};
    Householder hh(basis);
    return hh.q_columns(r, n - r);
}

// ---------------------------------------------------------------------------
// Hermitian positive definite log-determinant
// ---------------------------------------------------------------------------

double logdet_hpd(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("logdet_hpd: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;

    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - std::conj(a(j, i))));
    if (asym > 1e-10 * std::max(1.0, a.max_abs())) {
        throw std::invalid_argument("logdet_hpd: matrix is not Hermitian");
    }

    ComplexMatrix l(n, n);
    double logdet = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("logdet_hpd: matrix is not positive definite");
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        logdet += 2.0 * std::log(ljj);
        for (std::size_t i = j + 1; i < n; ++i) {
            cxd s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return logdet;
}

}  // namespace hbdof
