#pragma once

// Closed-form phase-synchronization transformation
//   q  = T1 p + T2 p'
//   q' = T3 p + T4 p'
// carrying solutions of the decoupled system p'' + D p' + B p = 0 onto
// solutions of q'' + C q' + K q = 0, built from a pairing (Lambda1, Lambda2)
// and matching eigenvector matrices (V1, V2).

#include <string>

#include "phasync/qep.hpp"

namespace phasync {

/// Columns of V1 (V2) are eigenvectors for the diagonal of Lambda1 (Lambda2).
struct EigvecMatrices {
    CMatrix V1;
    CMatrix V2;
};

/// Eigenvectors of the solver's canonical form, arranged slot by slot.
inline EigvecMatrices eigvecs_for(const Spectrum& spectrum, const Pairing& pairing) {
    if (pairing.slot_map.size() != static_cast<std::size_t>(pairing.n())) {
        fail(ErrorCode::InvalidArgument, "pairing carries no slot map into the spectrum");
    }
    const Index n = pairing.n();
    EigvecMatrices out{CMatrix(n, n), CMatrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        const auto& s = pairing.slot_map[static_cast<std::size_t>(k)];
        out.V1.col(k) = spectrum.vectors.col(s.first);
        out.V2.col(k) = spectrum.vectors.col(s.second);
    }
    return out;
}

/// Target system p'' + D p' + B p = 0 with D, B real diagonal.
struct DecoupledSystem {
    Vector d;  // diagonal of D
    Vector b;  // diagonal of B

    Index n() const { return d.size(); }
    Matrix D() const { return d.asDiagonal(); }
    Matrix B() const { return b.asDiagonal(); }
};

/// D = -(Lambda1 + Lambda2), B = Lambda1 Lambda2.
inline DecoupledSystem decoupled_from_pairing(const Pairing& pairing) {
    const CVector sum = -(pairing.lambda1 + pairing.lambda2);
    const CVector prod = pairing.lambda1.cwiseProduct(pairing.lambda2);
    return {real_part_checked(sum, "D"), real_part_checked(prod, "B")};
}

struct Transformation {
    Matrix T1, T2, T3, T4;
    bool sing_T2 = false;
    bool sing_T4 = false;
    double cond_T2 = 0.0;
    double cond_T4 = 0.0;

    Index n() const { return T1.rows(); }

    /// Fills the singularity flags and condition estimates.
    static Transformation from_blocks(Matrix T1, Matrix T2, Matrix T3, Matrix T4) {
        const Index n = T1.rows();
        for (const Matrix* m : {&T1, &T2, &T3, &T4}) {
            if (m->rows() != n || m->cols() != n || n < 1) {
                fail(ErrorCode::InvalidArgument, "transformation blocks must be n x n");
            }
            if (!all_finite(*m)) fail(ErrorCode::NonFinite, "transformation block not finite");
        }
        Transformation t{std::move(T1), std::move(T2), std::move(T3), std::move(T4)};
        // A block that is rounding noise next to the others counts as zero.
        const double floor = tol::rank * std::max({t.T1.norm(), t.T2.norm(), t.T3.norm(), t.T4.norm()});
        t.sing_T2 = t.T2.norm() <= floor || is_singular(t.T2);
        t.sing_T4 = t.T4.norm() <= floor || is_singular(t.T4);
        t.cond_T2 = condition_number(t.T2);
        t.cond_T4 = condition_number(t.T4);
        return t;
    }

    /// The 2n x 2n state map [[T1, T2], [T3, T4]].
    Matrix state_map() const {
        const Index n = this->n();
        Matrix m(2 * n, 2 * n);
        m << T1, T2, T3, T4;
        return m;
    }
};

namespace detail {

inline CVector slot_gaps(const Pairing& pairing) {
    const CVector gap = pairing.lambda2 - pairing.lambda1;
    for (Index k = 0; k < gap.size(); ++k) {
        const double scale =
            std::max({1.0, std::abs(pairing.lambda1(k)), std::abs(pairing.lambda2(k))});
        if (std::abs(gap(k)) <= tol::distinct * scale) {
            fail(ErrorCode::DegeneratePair,
                 "Lambda2 - Lambda1 is singular at slot " + std::to_string(k));
        }
    }
    return gap;
}

inline void check_shapes(const Pairing& pairing, const EigvecMatrices& vecs) {
    const Index n = pairing.n();
    if (vecs.V1.rows() != n || vecs.V1.cols() != n || vecs.V2.rows() != n ||
        vecs.V2.cols() != n) {
        fail(ErrorCode::SlotMismatch, "V1 and V2 must be n x n with n = " + std::to_string(n));
    }
}

}  // namespace detail

/// Each column of V1/V2 must be a nonzero eigenvector for its slot's root.
inline void check_eigvecs(const SodeSystem& sys, const Pairing& pairing,
                          const EigvecMatrices& vecs) {
    detail::check_shapes(pairing, vecs);
    if (sys.n() != pairing.n()) {
        fail(ErrorCode::SlotMismatch, "pairing size differs from system size");
    }
    auto check = [&](const CMatrix& V, const CVector& lambda, const char* name) {
        for (Index k = 0; k < V.cols(); ++k) {
            const CVector v = V.col(k);
            const double res = qep_residual(sys, lambda(k), v);
            if (v.norm() == 0.0 || res > qep_residual_bound(sys, lambda(k), v)) {
                fail(ErrorCode::SlotMismatch, std::string(name) + " column " +
                                                  std::to_string(k) +
                                                  " is not an eigenvector for its slot (residual " +
                                                  std::to_string(res) + ")");
            }
        }
    };
    check(vecs.V1, pairing.lambda1, "V1");
    check(vecs.V2, pairing.lambda2, "V2");
}

/// T1 = (V1 L2 - V2 L1)(L2 - L1)^-1     T2 = (V2 - V1)(L2 - L1)^-1
/// T3 = (V1 - V2) L1 L2 (L2 - L1)^-1    T4 = (V2 L2 - V1 L1)(L2 - L1)^-1
inline Transformation build_transformation(const SodeSystem& sys, const Pairing& pairing,
                                           const EigvecMatrices& vecs) {
    check_eigvecs(sys, pairing, vecs);
    const CVector gap = detail::slot_gaps(pairing);
    const Index n = pairing.n();
    CMatrix T1(n, n), T2(n, n), T3(n, n), T4(n, n);
    for (Index k = 0; k < n; ++k) {
        const Complex l1 = pairing.lambda1(k);
        const Complex l2 = pairing.lambda2(k);
        const auto v1 = vecs.V1.col(k);
        const auto v2 = vecs.V2.col(k);
        T1.col(k) = (v1 * l2 - v2 * l1) / gap(k);
        T2.col(k) = (v2 - v1) / gap(k);
        T3.col(k) = (v1 - v2) * (l1 * l2) / gap(k);
        T4.col(k) = (v2 * l2 - v1 * l1) / gap(k);
    }
    return Transformation::from_blocks(real_part_checked(T1, "T1"), real_part_checked(T2, "T2"),
                                       real_part_checked(T3, "T3"), real_part_checked(T4, "T4"));
}

/// W_i = V_i (Lambda2 - Lambda1)^-1, so that T2 = W2 - W1 and
/// T4 = W2 Lambda2 - W1 Lambda1.
struct WMatrices {
    CMatrix W1;
    CMatrix W2;
};

inline WMatrices w_matrices(const EigvecMatrices& vecs, const Pairing& pairing) {
    detail::check_shapes(pairing, vecs);
    const CVector gap = detail::slot_gaps(pairing);
    const CVector inv = gap.cwiseInverse();
    return {vecs.V1 * inv.asDiagonal(), vecs.V2 * inv.asDiagonal()};
}

/// Blocks of the inverse state map, packaged as a Transformation.
inline Transformation invert_transformation(const Transformation& t) {
    const Matrix m = t.state_map();
    if (is_singular(m)) {
        fail(ErrorCode::SingularStateMap, "state map [[T1, T2], [T3, T4]] is singular");
    }
    const Matrix inv = m.fullPivLu().inverse();
    const Index n = t.n();
    return Transformation::from_blocks(inv.topLeftCorner(n, n), inv.topRightCorner(n, n),
                                       inv.bottomLeftCorner(n, n), inv.bottomRightCorner(n, n));
}

}  // namespace phasync
