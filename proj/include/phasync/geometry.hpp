#pragma once

// Linear-case invariants of a second-order system and the resulting test for
// decoupling by a point transformation q = P p (classical modal analysis).
//
// For q'' = -C q' - K q the Jacobi endomorphism is Phi = K - C^2/4, its
// dynamical covariant derivative is [C, K]/2 and the tension is C/2. Curvature
// and the C' tensors vanish identically, so they are not represented.

#include <algorithm>
#include <optional>
#include <string_view>
#include <vector>

#include "phasync/qep.hpp"

namespace phasync {

enum class EigenStructure {
    DistinctReal,
    DegenerateRealDiagonalizable,
    MultipleOfIdentity,
    ComplexOrDefective,
};

inline std::string_view to_string(EigenStructure e) {
    switch (e) {
        case EigenStructure::DistinctReal: return "DistinctReal";
        case EigenStructure::DegenerateRealDiagonalizable: return "DegenerateRealDiagonalizable";
        case EigenStructure::MultipleOfIdentity: return "MultipleOfIdentity";
        case EigenStructure::ComplexOrDefective: return "ComplexOrDefective";
    }
    return "Unknown";
}

/// A real eigenvalue and an orthonormal basis of its eigenspace.
struct EigenCluster {
    double value = 0.0;
    Matrix basis;
};

struct RealEigendecomposition {
    bool complex_spectrum = false;
    bool defective = false;
    std::vector<EigenCluster> clusters;  // ascending by value

    bool diagonalizable() const { return !complex_spectrum && !defective; }
};

/// Groups the eigenvalues of a real square matrix into clusters (gap
/// tol::distinct * max(1, rho)) and attaches a real eigenbasis to each. A
/// cluster whose eigenspace is smaller than its multiplicity marks the
/// matrix as defective.
inline RealEigendecomposition real_eigendecomposition(const Matrix& m) {
    RealEigendecomposition out;
    const Index n = m.rows();
    const CVector values = m.eigenvalues();
    const double radius = values.cwiseAbs().maxCoeff();
    const double gap = tol::distinct * std::max(1.0, radius);
    for (Index i = 0; i < n; ++i) {
        if (std::abs(values(i).imag()) > gap) {
            out.complex_spectrum = true;
            return out;
        }
    }

    std::vector<double> re(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) re[static_cast<std::size_t>(i)] = values(i).real();
    std::sort(re.begin(), re.end());

    const double null_tol = 1e-6 * std::max(1.0, m.norm());
    std::size_t start = 0;
    while (start < re.size()) {
        std::size_t end = start + 1;
        while (end < re.size() && re[end] - re[end - 1] <= gap) ++end;
        const Index mult = static_cast<Index>(end - start);
        double mean = 0.0;
        for (std::size_t i = start; i < end; ++i) mean += re[i];
        mean /= static_cast<double>(mult);

        Matrix shifted = m;
        shifted.diagonal().array() -= mean;
        Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
        if (svd.singularValues()(n - mult) > null_tol) out.defective = true;
        out.clusters.push_back({mean, svd.matrixV().rightCols(mult)});
        start = end;
    }
    return out;
}

inline EigenStructure classify(const RealEigendecomposition& e) {
    if (!e.diagonalizable()) return EigenStructure::ComplexOrDefective;
    const bool distinct = std::all_of(e.clusters.begin(), e.clusters.end(),
                                      [](const auto& c) { return c.basis.cols() == 1; });
    if (distinct) return EigenStructure::DistinctReal;
    if (e.clusters.size() == 1) return EigenStructure::MultipleOfIdentity;
    return EigenStructure::DegenerateRealDiagonalizable;
}

struct LinearInvariants {
    Matrix phi;      // K - C^2 / 4
    Matrix del_phi;  // (C K - K C) / 2
    Matrix tension;  // C / 2
    EigenStructure phi_eigen_class = EigenStructure::ComplexOrDefective;
    bool tension_real_diagonalizable = false;
};

inline LinearInvariants linear_invariants(const SodeSystem& sys) {
    const Matrix& C = sys.C();
    const Matrix& K = sys.K();
    LinearInvariants out;
    out.phi = K - 0.25 * C * C;
    out.del_phi = 0.5 * (C * K - K * C);
    out.tension = 0.5 * C;
    out.phi_eigen_class = classify(real_eigendecomposition(out.phi));
    out.tension_real_diagonalizable = real_eigendecomposition(out.tension).diagonalizable();
    return out;
}

enum class ModalReason {
    Applicable,
    NonCommuting,
    ComplexPhiSpectrum,
    PhiDefective,
    TensionNotDiagonalizable,
};

inline std::string_view to_string(ModalReason r) {
    switch (r) {
        case ModalReason::Applicable: return "Applicable";
        case ModalReason::NonCommuting: return "NonCommuting";
        case ModalReason::ComplexPhiSpectrum: return "ComplexPhiSpectrum";
        case ModalReason::PhiDefective: return "PhiDefective";
        case ModalReason::TensionNotDiagonalizable: return "TensionNotDiagonalizable";
    }
    return "Unknown";
}

struct ModalDecision {
    bool applicable = false;
    ModalReason reason = ModalReason::NonCommuting;
    std::optional<Matrix> point_transform;  // P with P^-1 C P, P^-1 K P diagonal
};

inline bool commutes(const Matrix& C, const Matrix& K) {
    return (C * K - K * C).norm() <= tol::commutator * C.norm() * K.norm();
}

/// Decoupling by a point transformation requires [C, K] = 0 and a real
/// diagonalizable Phi; on degenerate eigenspaces of Phi the tension must be
/// real diagonalizable too. When applicable, P is assembled from the Phi
/// eigenspaces refined by diagonalizing C restricted to each of them.
inline ModalDecision modal_analysis_applicable(const SodeSystem& sys) {
    const Matrix& C = sys.C();
    if (!commutes(C, sys.K())) return {false, ModalReason::NonCommuting, std::nullopt};

    const Matrix phi = sys.K() - 0.25 * C * C;
    const RealEigendecomposition eig = real_eigendecomposition(phi);
    if (eig.complex_spectrum) return {false, ModalReason::ComplexPhiSpectrum, std::nullopt};
    if (eig.defective) return {false, ModalReason::PhiDefective, std::nullopt};

    const Index n = sys.n();
    Matrix P(n, n);
    Index col = 0;
    for (const auto& cluster : eig.clusters) {
        const Index m = cluster.basis.cols();
        if (m == 1) {
            P.col(col++) = cluster.basis.col(0);
            continue;
        }
        // C leaves each Phi eigenspace invariant since it commutes with Phi.
        const Matrix restricted = cluster.basis.transpose() * C * cluster.basis;
        const RealEigendecomposition inner = real_eigendecomposition(restricted);
        if (!inner.diagonalizable()) {
            return {false, ModalReason::TensionNotDiagonalizable, std::nullopt};
        }
        for (const auto& sub : inner.clusters) {
            for (Index j = 0; j < sub.basis.cols(); ++j) {
                P.col(col++) = (cluster.basis * sub.basis.col(j)).normalized();
            }
        }
    }
    return {true, ModalReason::Applicable, P};
}

/// Largest off-diagonal Frobenius norm of P^-1 C P and P^-1 K P, relative to
/// max(1, ||C||_F, ||K||_F).
inline double simultaneous_diagonalization_residual(const SodeSystem& sys, const Matrix& P) {
    const auto lu = P.partialPivLu();
    double worst = 0.0;
    for (const Matrix* m : {&sys.C(), &sys.K()}) {
        Matrix d = lu.solve(*m * P);
        d.diagonal().setZero();
        worst = std::max(worst, d.norm());
    }
    return worst / std::max({1.0, sys.C().norm(), sys.K().norm()});
}

}  // namespace phasync
