#pragma once

// Quadratic eigenvalue problem (lambda^2 I + lambda C + K) v = 0 for the
// linear second-order system q'' + C q' + K q = 0, and the grouping of its
// 2n roots into two diagonal matrices Lambda1, Lambda2 whose sum and product
// are real.

#include <algorithm>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "phasync/linalg.hpp"

namespace phasync {

/// The pair (C, K) of q'' + C q' + K q = 0. No symmetry is assumed.
class SodeSystem {
public:
    SodeSystem(Matrix C, Matrix K) : C_(std::move(C)), K_(std::move(K)) {
        if (C_.rows() < 1 || C_.rows() != C_.cols()) {
            fail(ErrorCode::InvalidArgument, "C must be square with n >= 1");
        }
        if (K_.rows() != C_.rows() || K_.cols() != C_.cols()) {
            fail(ErrorCode::InvalidArgument, "K must have the same size as C");
        }
        if (!all_finite(C_) || !all_finite(K_)) {
            fail(ErrorCode::NonFinite, "C and K must be finite");
        }
    }

    Index n() const { return C_.rows(); }
    const Matrix& C() const { return C_; }
    const Matrix& K() const { return K_; }

    /// Q(lambda) = lambda^2 I + lambda C + K.
    CMatrix pencil(Complex lambda) const {
        CMatrix q = lambda * C_.cast<Complex>() + K_.cast<Complex>();
        q.diagonal().array() += lambda * lambda;
        return q;
    }

private:
    Matrix C_;
    Matrix K_;
};

enum class EigenClass { Real, ComplexPositiveImag, ComplexNegativeImag };

inline std::string_view to_string(EigenClass c) {
    switch (c) {
        case EigenClass::Real: return "real";
        case EigenClass::ComplexPositiveImag: return "complex-positive-imag";
        case EigenClass::ComplexNegativeImag: return "complex-negative-imag";
    }
    return "unknown";
}

/// The 2n eigenpairs of the QEP in canonical order: complex roots with
/// positive imaginary part (descending imaginary part), then their
/// conjugates in the same order, then real roots in descending order.
struct Spectrum {
    CVector values;                // 2n
    CMatrix vectors;               // n x 2n, unit 2-norm columns
    std::vector<EigenClass> tags;  // 2n

    Index size() const { return values.size(); }
    Index complex_pairs() const {
        return std::count(tags.begin(), tags.end(), EigenClass::ComplexPositiveImag);
    }
};

inline double qep_residual(const SodeSystem& sys, Complex lambda, const CVector& v) {
    return (sys.pencil(lambda) * v).norm();
}

/// Right-hand side of the relative residual bound carried by every eigenpair.
inline double qep_residual_bound(const SodeSystem& sys, Complex lambda, const CVector& v,
                                 double tol = tol::qep) {
    const double a = std::abs(lambda);
    return tol * (a * a + a * sys.C().norm() + sys.K().norm()) * v.norm();
}

namespace detail {

// Unit 2-norm, first entry of largest modulus rotated to be real nonnegative.
inline CVector canonical_eigvec(CVector v) {
    v.normalize();
    Index dominant = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            dominant = i;
        }
    }
    if (best > 0.0) v *= std::conj(v(dominant)) / best;
    v(dominant) = Complex(v(dominant).real(), 0.0);
    return v;
}

// Null vector of Q(lambda) from the smallest right singular vector.
inline CVector null_vector(const SodeSystem& sys, Complex lambda) {
    Eigen::JacobiSVD<CMatrix> svd(sys.pencil(lambda), Eigen::ComputeFullV);
    return svd.matrixV().col(sys.n() - 1);
}

}  // namespace detail

/// Solves the QEP through the companion linearization
/// [[0, I], [-K, -C]] z = lambda z with z = [v; lambda v].
inline Spectrum solve_qep(const SodeSystem& sys) {
    const Index n = sys.n();
    Matrix companion = Matrix::Zero(2 * n, 2 * n);
    companion.topRightCorner(n, n) = identity(n);
    companion.bottomLeftCorner(n, n) = -sys.K();
    companion.bottomRightCorner(n, n) = -sys.C();

    Eigen::EigenSolver<Matrix> es(companion, true);
    if (es.info() != Eigen::Success) {
        fail(ErrorCode::NonFinite, "companion eigensolver did not converge");
    }
    const CVector values = es.eigenvalues();
    const CMatrix z = es.eigenvectors();

    // Whichever half of z is better scaled carries v.
    auto extract = [&](Index j) -> CVector {
        const Complex lambda = values(j);
        CVector v = std::abs(lambda) <= 1.0 ? CVector(z.col(j).head(n))
                                            : CVector(z.col(j).tail(n) / lambda);
        if (v.norm() == 0.0 ||
            qep_residual(sys, lambda, v) > qep_residual_bound(sys, lambda, v)) {
            v = detail::null_vector(sys, lambda);
        }
        return detail::canonical_eigvec(v);
    };

    std::vector<Index> positive, negative, real;
    for (Index j = 0; j < 2 * n; ++j) {
        const double im = values(j).imag();
        if (im > 0.0) positive.push_back(j);
        else if (im < 0.0) negative.push_back(j);
        else real.push_back(j);
    }
    if (positive.size() != negative.size()) {
        fail(ErrorCode::NonFinite, "complex eigenvalues are not conjugate-paired");
    }

    std::sort(positive.begin(), positive.end(), [&](Index a, Index b) {
        if (values(a).imag() != values(b).imag()) return values(a).imag() > values(b).imag();
        return values(a).real() > values(b).real();
    });
    std::sort(real.begin(), real.end(),
              [&](Index a, Index b) { return values(a).real() > values(b).real(); });

    const Index c = static_cast<Index>(positive.size());
    Spectrum out;
    out.values.resize(2 * n);
    out.vectors.resize(n, 2 * n);
    out.tags.resize(2 * n);
    for (Index k = 0; k < c; ++k) {
        const Index j = positive[k];
        const CVector v = extract(j);
        out.values(k) = values(j);
        out.vectors.col(k) = v;
        out.tags[k] = EigenClass::ComplexPositiveImag;
        // The partner is stored as the exact conjugate.
        out.values(c + k) = std::conj(values(j));
        out.vectors.col(c + k) = v.conjugate();
        out.tags[c + k] = EigenClass::ComplexNegativeImag;
    }
    for (Index k = 0; k < static_cast<Index>(real.size()); ++k) {
        const Index j = real[k];
        const Index slot = 2 * c + k;
        out.values(slot) = Complex(values(j).real(), 0.0);
        out.vectors.col(slot) = extract(j).real().cast<Complex>();
        out.vectors.col(slot).normalize();
        out.tags[slot] = EigenClass::Real;
    }

    const double radius = out.values.cwiseAbs().maxCoeff();
    const double gap = tol::distinct * std::max(1.0, radius);
    for (Index a = 0; a < 2 * n; ++a) {
        for (Index b = a + 1; b < 2 * n; ++b) {
            if (std::abs(out.values(a) - out.values(b)) <= gap) {
                fail(ErrorCode::RepeatedEigenvalue,
                     "eigenvalues " + std::to_string(a) + " and " + std::to_string(b) +
                         " coincide within " + std::to_string(gap));
            }
        }
    }
    return out;
}

/// One diagonal slot k of (Lambda1, Lambda2): spectrum indices of its members.
struct SlotSource {
    Index first = 0;   // occupies Lambda1(k, k)
    Index second = 0;  // occupies Lambda2(k, k)
    bool operator==(const SlotSource&) const = default;
};

/// Diagonal matrices Lambda1, Lambda2 (stored as their diagonals) such that
/// every slot holds either a conjugate pair or two real roots, and no slot
/// holds the same root twice.
struct Pairing {
    CVector lambda1;
    CVector lambda2;
    std::vector<SlotSource> slot_map;  // empty when built from raw values

    Index n() const { return lambda1.size(); }
    CMatrix Lambda1() const { return lambda1.asDiagonal(); }
    CMatrix Lambda2() const { return lambda2.asDiagonal(); }

    /// Validates the slot invariants on explicitly given diagonals.
    static Pairing from_values(CVector l1, CVector l2);
};

namespace detail {

inline bool is_real_value(Complex z) {
    return std::abs(z.imag()) <= tol::real * (1.0 + std::abs(z));
}

inline void validate_slot(Index k, Complex a, Complex b) {
    const bool real_a = is_real_value(a);
    const bool real_b = is_real_value(b);
    const std::string where = "slot " + std::to_string(k);
    if (real_a != real_b) {
        fail(ErrorCode::InvalidPairing, where + " mixes a real and a complex eigenvalue");
    }
    if (!real_a && std::abs(a - std::conj(b)) > tol::real * (1.0 + std::abs(a))) {
        fail(ErrorCode::InvalidPairing, where + " pairs non-conjugate complex eigenvalues");
    }
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) <= tol::distinct * scale) {
        fail(ErrorCode::DegeneratePair, where + " has lambda1 == lambda2");
    }
}

}  // namespace detail

inline Pairing Pairing::from_values(CVector l1, CVector l2) {
    if (l1.size() < 1 || l1.size() != l2.size()) {
        fail(ErrorCode::InvalidPairing, "Lambda1 and Lambda2 must have the same size n >= 1");
    }
    for (Index k = 0; k < l1.size(); ++k) detail::validate_slot(k, l1(k), l2(k));
    return Pairing{std::move(l1), std::move(l2), {}};
}

struct DefaultPairing {};

/// Caller-chosen slots, given as spectrum indices.
struct CustomPairing {
    std::vector<SlotSource> slots;
};

using PairingStrategy = std::variant<DefaultPairing, CustomPairing>;

/// Default: each conjugate pair gets one slot (positive-imaginary member in
/// Lambda1, descending imaginary part); real roots sorted descending are
/// paired nested-style, k-th largest with k-th smallest, larger in Lambda1.
inline Pairing pair_eigenvalues(const Spectrum& spectrum, const PairingStrategy& strategy) {
    const Index total = spectrum.size();
    const Index n = total / 2;
    std::vector<SlotSource> slots;

    if (std::holds_alternative<DefaultPairing>(strategy)) {
        const Index c = spectrum.complex_pairs();
        for (Index k = 0; k < c; ++k) slots.push_back({k, c + k});
        const Index r = n - c;
        for (Index k = 0; k < r; ++k) slots.push_back({2 * c + k, total - 1 - k});
    } else {
        slots = std::get<CustomPairing>(strategy).slots;
        if (static_cast<Index>(slots.size()) != n) {
            fail(ErrorCode::InvalidPairing, "custom pairing needs exactly " +
                                                std::to_string(n) + " slots");
        }
        std::vector<int> used(static_cast<std::size_t>(total), 0);
        for (const auto& s : slots) {
            for (Index idx : {s.first, s.second}) {
                if (idx < 0 || idx >= total) {
                    fail(ErrorCode::InvalidPairing,
                         "eigenvalue index " + std::to_string(idx) + " out of range");
                }
                ++used[static_cast<std::size_t>(idx)];
            }
        }
        for (Index j = 0; j < total; ++j) {
            if (used[static_cast<std::size_t>(j)] != 1) {
                fail(ErrorCode::InvalidPairing, "eigenvalue " + std::to_string(j) +
                                                    " used " +
                                                    std::to_string(used[static_cast<std::size_t>(j)]) +
                                                    " times");
            }
        }
    }

    Pairing out;
    out.lambda1.resize(n);
    out.lambda2.resize(n);
    for (Index k = 0; k < n; ++k) {
        const auto& s = slots[static_cast<std::size_t>(k)];
        const EigenClass a = spectrum.tags[static_cast<std::size_t>(s.first)];
        const EigenClass b = spectrum.tags[static_cast<std::size_t>(s.second)];
        if ((a == EigenClass::Real) != (b == EigenClass::Real)) {
            fail(ErrorCode::InvalidPairing,
                 "slot " + std::to_string(k) + " mixes a real and a complex eigenvalue");
        }
        out.lambda1(k) = spectrum.values(s.first);
        out.lambda2(k) = spectrum.values(s.second);
        detail::validate_slot(k, out.lambda1(k), out.lambda2(k));
    }
    out.slot_map = std::move(slots);
    return out;
}

/// Index of the spectrum entry nearest to `value`, or -1 if none lies within
/// `rel_tol * max(1, |value|)`.
inline Index nearest_eigenvalue(const Spectrum& spectrum, Complex value, double rel_tol = 1e-6) {
    Index best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < spectrum.size(); ++j) {
        const double d = std::abs(spectrum.values(j) - value);
        if (d < dist) {
            dist = d;
            best = j;
        }
    }
    return dist <= rel_tol * std::max(1.0, std::abs(value)) ? best : -1;
}

}  // namespace phasync
