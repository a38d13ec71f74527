#pragma once

// Dense complex linear algebra for small matrices plus a seeded RNG for
// reproducible CN(0,1) channel draws. Everything is double precision and
// sized for matrices with dimensions up to a few dozen.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbdof {

using cxd = std::complex<double>;

/// Thrown when an iterative factorization exceeds its iteration cap.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Default relative tolerance separating generic nonzero singular values
/// from numerical zeros at double precision.
inline constexpr double kDefaultRankTol = 1e-8;

/// Dense complex matrix, row-major storage.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cxd{0.0, 0.0}) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    /// Square diagonal matrix from real values.
    static ComplexMatrix diagonal(const std::vector<double>& values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    cxd& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cxd& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<cxd>& data() const { return data_; }

    ComplexMatrix adjoint() const;    // conjugate transpose
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;

    /// Copy of columns [first, first+count).
    ComplexMatrix col_range(std::size_t first, std::size_t count) const;
    ComplexMatrix col(std::size_t c) const { return col_range(c, 1); }
    void set_col(std::size_t c, const ComplexMatrix& column);

    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    /// Scale column c so it has unit Euclidean norm. Zero columns are left as is.
    void normalize_col(std::size_t c);

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cxd> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cxd s, const ComplexMatrix& a);
ComplexMatrix operator*(double s, const ComplexMatrix& a);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// Side-by-side concatenation [a b]; row counts must match.
ComplexMatrix hcat(const ComplexMatrix& a, const ComplexMatrix& b);
/// Stacked concatenation [a; b]; column counts must match.
ComplexMatrix vcat(const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Seeded RNG.
//
// xoshiro256++ seeded through the splitmix64 sequence, so a 64-bit seed fully
// determines the stream. Complex Gaussian draws use Box-Muller on two uniform
// draws from (0,1]: z = sqrt(-ln u1) * (cos(2*pi*u2) + i*sin(2*pi*u2)), i.e.
// the real part is consumed first. Each CN(0,1) draw costs exactly two
// uniforms, so streams stay aligned across call sites.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform double in (0, 1].
    double next_unit();
    /// One circularly-symmetric complex Gaussian draw, zero mean, unit variance.
    cxd next_cgauss();

private:
    std::array<std::uint64_t, 4> state_{};
};

/// splitmix64 finalizer over (seed, stream); used for per-trial sub-seeding so
/// Monte-Carlo trials are order-independent.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream);

/// rows x cols matrix of i.i.d. CN(0,1) entries, filled row-major.
ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

// ---------------------------------------------------------------------------
// Factorizations.
// ---------------------------------------------------------------------------

struct SvdResult {
    ComplexMatrix u;                      // rows x k, orthonormal columns
    std::vector<double> singular_values;  // k = min(rows, cols), descending
    ComplexMatrix v;                      // cols x k, orthonormal columns
};

/// Thin SVD via one-sided Jacobi rotations (iteration cap 100 sweeps).
/// Satisfies a = u * diag(s) * v^H to working precision.
SvdResult svd(const ComplexMatrix& a);

/// Number of singular values above rel_tol times the largest one.
std::size_t rank(const ComplexMatrix& a, double rel_tol = kDefaultRankTol);

/// Orthonormal basis of {x : a*x = 0}; cols(a) - rank(a) columns.
ComplexMatrix nullspace(const ComplexMatrix& a, double rel_tol = kDefaultRankTol);

struct QrResult {
    ComplexMatrix q;  // rows x cols, orthonormal columns
    ComplexMatrix r;  // cols x cols, upper triangular, real nonnegative diagonal
};

/// Thin Householder QR; requires rows >= cols.
QrResult qr(const ComplexMatrix& a);

/// Orthonormal basis of the orthogonal complement of the column space of
/// `basis` (which must itself have orthonormal columns). Returns n x (n - r).
ComplexMatrix orthonormal_complement(const ComplexMatrix& basis);

/// Natural log of the determinant of a Hermitian positive definite matrix,
/// via Cholesky. Rejects inputs that are detectably non-Hermitian or have a
/// nonpositive pivot.
double logdet_hpd(const ComplexMatrix& a);

}  // namespace hbdof
