#pragma once

#include "hbdof/cxmat.hpp"

namespace hbdof::test {

inline double orthonormality_error(const ComplexMatrix& m) {
    return (m.adjoint() * m - ComplexMatrix::identity(m.cols())).frobenius_norm();
}

inline double reconstruction_error(const ComplexMatrix& a, const SvdResult& f) {
    return (a - f.u * ComplexMatrix::diagonal(f.singular_values) * f.v.adjoint()).frobenius_norm();
}

/// Frobenius distance between the projectors onto the column spaces of two
/// orthonormal-column matrices; ~0 iff they span the same subspace.
inline double subspace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * a.adjoint() - b * b.adjoint()).frobenius_norm();
}

}  // namespace hbdof::test
