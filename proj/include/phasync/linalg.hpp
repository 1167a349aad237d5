#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "phasync/error.hpp"
#include "phasync/tolerances.hpp"

namespace phasync {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

struct SingularExtremes {
    double largest = 0.0;
    double smallest = 0.0;
};

template <typename Derived>
SingularExtremes singular_extremes(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
    const auto& s = svd.singularValues();
    return {s(0), s(s.size() - 1)};
}

/// Relative singularity test: sigma_min <= tol * sigma_max, or m == 0.
template <typename Derived>
bool is_singular(const Eigen::MatrixBase<Derived>& m, double tol = tol::rank) {
    const auto s = singular_extremes(m);
    return s.largest == 0.0 || s.smallest <= tol * s.largest;
}

/// Ratio of extreme singular values; +inf for exactly singular input.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& m) {
    const auto s = singular_extremes(m);
    if (s.smallest == 0.0) return std::numeric_limits<double>::infinity();
    return s.largest / s.smallest;
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol = tol::rank) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol * s(0)) ++r;
    }
    return r;
}

/// Drops the imaginary part of a quantity that is real by construction.
/// Throws RealnessViolation when the residue exceeds tol::real * (1 + ||m||_F).
inline Matrix real_part_checked(const CMatrix& m, const char* what) {
    const double residue = m.imag().cwiseAbs().maxCoeff();
    const double bound = tol::real * (1.0 + m.norm());
    if (!(residue <= bound)) {
        fail(ErrorCode::RealnessViolation,
             std::string(what) + " has imaginary residue " + std::to_string(residue) +
                 " above " + std::to_string(bound));
    }
    return m.real();
}

inline Vector real_part_checked(const CVector& v, const char* what) {
    return real_part_checked(CMatrix(v), what).col(0);
}

}  // namespace phasync
