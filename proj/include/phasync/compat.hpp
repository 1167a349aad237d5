#pragma once

// A velocity-dependent transformation induces two second-order systems in p:
//
//   (own)          T2 p'' + (T1 - T4) p' - T3 p = 0
//   (transformed)  T4 p'' + (T3 + C T4 + K T2) p' + (C T3 + K T1) p = 0
//
// The first comes from differentiating q = T1 p + T2 p' and matching with
// q' = T3 p + T4 p'; the second from substituting into q'' + C q' + K q = 0.
// The transformation only "transforms" the system when both agree. This
// header materializes both and measures every formulation of that agreement.

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "phasync/synchro.hpp"

namespace phasync {

/// A2 p'' + A1 p' + A0 p = 0, not necessarily solvable for p''.
struct ImplicitSode {
    Matrix A2, A1, A0;
    bool regular = false;
    Index rank_A2 = 0;

    static ImplicitSode make(Matrix A2, Matrix A1, Matrix A0) {
        ImplicitSode s{std::move(A2), std::move(A1), std::move(A0)};
        s.rank_A2 = numerical_rank(s.A2);
        s.regular = s.rank_A2 == s.A2.rows();
        return s;
    }

    /// [A2 A1 A0], one row per scalar equation.
    Matrix coefficient_rows() const {
        Matrix m(A2.rows(), 3 * A2.cols());
        m << A2, A1, A0;
        return m;
    }
};

inline ImplicitSode sode_from_transformation(const Transformation& t) {
    return ImplicitSode::make(t.T2, t.T1 - t.T4, -t.T3);
}

inline ImplicitSode transformed_sode(const SodeSystem& sys, const Transformation& t) {
    return ImplicitSode::make(t.T4, t.T3 + sys.C() * t.T4 + sys.K() * t.T2,
                              sys.C() * t.T3 + sys.K() * t.T1);
}

/// (A2^-1 A1, A2^-1 A0).
inline std::pair<Matrix, Matrix> normal_form(const ImplicitSode& s) {
    if (!s.regular) {
        fail(ErrorCode::NotRegular, "A2 has rank " + std::to_string(s.rank_A2) + " < " +
                                        std::to_string(s.A2.rows()));
    }
    const auto lu = s.A2.partialPivLu();
    return {lu.solve(s.A1), lu.solve(s.A0)};
}

/// Stacks the rows of both induced systems and row-reduces them. For a
/// compatible transformation the 2n rows span an n-dimensional space whose
/// p''-block is invertible, even when T2 and T4 are both singular. The
/// result is returned in normal form (A2 = I).
inline ImplicitSode joint_sode(const SodeSystem& sys, const Transformation& t) {
    const Index n = sys.n();
    Matrix stacked(2 * n, 3 * n);
    stacked << sode_from_transformation(t).coefficient_rows(),
        transformed_sode(sys, t).coefficient_rows();

    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(0) > 0.0 && s(i) > tol::rank * s(0)) ++rank;
    }
    if (rank != n) {
        fail(ErrorCode::NotRegular,
             "joint system has rank " + std::to_string(rank) + ", expected " + std::to_string(n));
    }
    const Matrix basis = svd.matrixV().leftCols(n).transpose();
    const Matrix lead = basis.leftCols(n);
    if (is_singular(lead)) {
        fail(ErrorCode::NotRegular, "joint system does not determine p''");
    }
    const auto lu = lead.partialPivLu();
    return ImplicitSode::make(identity(n), lu.solve(basis.middleCols(n, n)),
                              lu.solve(basis.rightCols(n)));
}

/// A residual ||lhs - rhs||_F together with the scale max(1, ||rhs||_F).
struct Residual {
    double raw = 0.0;
    double scale = 1.0;

    double scaled() const { return raw / scale; }
};

inline Residual residual(const Matrix& lhs, const Matrix& rhs) {
    return {(lhs - rhs).norm(), std::max(1.0, rhs.norm())};
}

enum class Verdict { Compatible, Incompatible, Cc1NotApplicable };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Compatible: return "Compatible";
        case Verdict::Incompatible: return "Incompatible";
        case Verdict::Cc1NotApplicable: return "Cc1NotApplicable";
    }
    return "Unknown";
}

struct CompatibilityReport {
    bool cc1_applicable = false;
    std::optional<std::array<Residual, 2>> cc1;  // present iff applicable
    std::optional<std::array<Residual, 2>> id1;  // T3 = -T2 B, T1 = T4 + T2 D
    std::optional<std::array<Residual, 2>> id2;  // T4 D = T3 + C T4 + K T2, T4 B = C T3 + K T1
    bool sing_T2 = false;
    bool sing_T4 = false;
    double threshold = 0.0;  // residual r passes iff r.raw <= threshold * r.scale
    Verdict verdict = Verdict::Incompatible;
};

/// tol::compat * max(1, ||C|| + ||K|| + sum ||Ti||).
inline double compat_threshold(const SodeSystem& sys, const Transformation& t) {
    const double mass = sys.C().norm() + sys.K().norm() + t.T1.norm() + t.T2.norm() +
                        t.T3.norm() + t.T4.norm();
    return tol::compat * std::max(1.0, mass);
}

namespace detail {

inline void check_sizes(const SodeSystem& sys, const Transformation& t) {
    if (t.n() != sys.n()) fail(ErrorCode::InvalidArgument, "transformation size differs from system");
}

inline bool passes(const std::optional<std::array<Residual, 2>>& r, double threshold) {
    if (!r) return true;
    for (const auto& x : *r) {
        if (!(x.raw <= threshold * x.scale)) return false;
    }
    return true;
}

inline void settle_verdict(CompatibilityReport& rep) {
    const bool ok = detail::passes(rep.cc1, rep.threshold) &&
                    detail::passes(rep.id1, rep.threshold) &&
                    detail::passes(rep.id2, rep.threshold);
    rep.verdict = ok ? Verdict::Compatible : Verdict::Incompatible;
}

inline std::array<Residual, 2> cc1_residuals(const SodeSystem& sys, const Transformation& t) {
    const auto lu2 = t.T2.partialPivLu();
    const auto lu4 = t.T4.partialPivLu();
    const Matrix& C = sys.C();
    const Matrix& K = sys.K();
    return {residual(lu2.solve(t.T1 - t.T4), lu4.solve(t.T3 + C * t.T4 + K * t.T2)),
            residual(-lu2.solve(t.T3), lu4.solve(C * t.T3 + K * t.T1))};
}

}  // namespace detail

/// T2^-1 (T1 - T4) = T4^-1 (T3 + C T4 + K T2) and -T2^-1 T3 = T4^-1 (C T3 + K T1).
/// Only meaningful when T2 and T4 are both nonsingular.
inline CompatibilityReport check_cc1(const SodeSystem& sys, const Transformation& t) {
    detail::check_sizes(sys, t);
    CompatibilityReport rep;
    rep.sing_T2 = t.sing_T2;
    rep.sing_T4 = t.sing_T4;
    rep.cc1_applicable = !t.sing_T2 && !t.sing_T4;
    rep.threshold = compat_threshold(sys, t);
    if (!rep.cc1_applicable) {
        rep.verdict = Verdict::Cc1NotApplicable;
        return rep;
    }
    rep.cc1 = detail::cc1_residuals(sys, t);
    detail::settle_verdict(rep);
    return rep;
}

/// Coefficient identification against a decoupled target; valid for
/// singular T2 and T4 alike.
inline CompatibilityReport check_identification(const SodeSystem& sys, const Transformation& t,
                                                const DecoupledSystem& target) {
    detail::check_sizes(sys, t);
    if (target.n() != sys.n() || target.b.size() != sys.n()) {
        fail(ErrorCode::InvalidArgument, "target size differs from system");
    }
    const Matrix D = target.D();
    const Matrix B = target.B();
    const Matrix& C = sys.C();
    const Matrix& K = sys.K();

    CompatibilityReport rep;
    rep.sing_T2 = t.sing_T2;
    rep.sing_T4 = t.sing_T4;
    rep.cc1_applicable = !t.sing_T2 && !t.sing_T4;
    rep.threshold = compat_threshold(sys, t);
    rep.id1 = std::array<Residual, 2>{residual(t.T3, -t.T2 * B), residual(t.T1, t.T4 + t.T2 * D)};
    rep.id2 = std::array<Residual, 2>{residual(t.T4 * D, t.T3 + C * t.T4 + K * t.T2),
                                      residual(t.T4 * B, C * t.T3 + K * t.T1)};
    detail::settle_verdict(rep);
    return rep;
}

/// Identification plus cc1 whenever it applies.
inline CompatibilityReport check_compatibility(const SodeSystem& sys, const Transformation& t,
                                               const DecoupledSystem& target) {
    CompatibilityReport rep = check_identification(sys, t, target);
    if (rep.cc1_applicable) {
        rep.cc1 = detail::cc1_residuals(sys, t);
        detail::settle_verdict(rep);
    }
    return rep;
}

/// T4 D + T2 B = C T4 + K T2 and T4 B = -C T2 B + K (T4 + T2 D), with D, B
/// taken from the pairing.
inline std::array<Residual, 2> check_cc3(const SodeSystem& sys, const Matrix& T2,
                                         const Matrix& T4, const Pairing& pairing) {
    const DecoupledSystem target = decoupled_from_pairing(pairing);
    const Matrix D = target.D();
    const Matrix B = target.B();
    const Matrix& C = sys.C();
    const Matrix& K = sys.K();
    return {residual(T4 * D + T2 * B, C * T4 + K * T2),
            residual(T4 * B, -C * T2 * B + K * (T4 + T2 * D))};
}

/// ||W Lambda^2 + C W Lambda + K W||_F. Column k is Q(lambda_k) w_k.
inline double verify_w_equation(const CMatrix& W, const CVector& lambda, const SodeSystem& sys) {
    const CMatrix L = lambda.asDiagonal();
    const CMatrix C = sys.C().cast<Complex>();
    const CMatrix K = sys.K().cast<Complex>();
    return (W * L * L + C * W * L + K * W).norm();
}

}  // namespace phasync
