#include <gtest/gtest.h>

#include <algorithm>

#include "worked_examples.hpp"
#include "random_systems.hpp"

using namespace phasync;
using namespace phasync::fixtures;

namespace {

// True iff every value in `expected` is matched by a distinct entry of `got`.
bool same_multiset(const CVector& got, const std::vector<Complex>& expected, double tol) {
    if (got.size() != static_cast<Index>(expected.size())) return false;
    std::vector<bool> used(expected.size(), false);
    for (Index i = 0; i < got.size(); ++i) {
        bool hit = false;
        for (std::size_t j = 0; j < expected.size(); ++j) {
            if (!used[j] && std::abs(got(i) - expected[j]) <= tol) {
                used[j] = hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

void expect_residuals_bounded(const SodeSystem& sys, const Spectrum& spec) {
    for (Index j = 0; j < spec.size(); ++j) {
        const CVector v = spec.vectors.col(j);
        EXPECT_LE(qep_residual(sys, spec.values(j), v),
                  qep_residual_bound(sys, spec.values(j), v))
            << "column " << j;
    }
}

}  // namespace

TEST(SodeSystem, RejectsBadShapesAndNonFinite) {
    EXPECT_THROW(SodeSystem(Matrix(0, 0), Matrix(0, 0)), Error);
    EXPECT_THROW(SodeSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), Error);
    EXPECT_THROW(SodeSystem(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), Error);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        SodeSystem s(bad, Matrix::Zero(2, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    }
}

TEST(SolveQep, Example1RootsAreReal) {
    const SodeSystem sys = ex1_system();
    const Spectrum spec = solve_qep(sys);
    EXPECT_TRUE(same_multiset(spec.values, {-2 + s2, -2 - s2, -4 + s14, -4 - s14}, 1e-12));
    for (auto tag : spec.tags) EXPECT_EQ(tag, EigenClass::Real);
    // reals descending
    for (Index j = 0; j + 1 < spec.size(); ++j)
        EXPECT_GT(spec.values(j).real(), spec.values(j + 1).real());
    expect_residuals_bounded(sys, spec);
}

TEST(SolveQep, HarmonicOscillator) {
    const SodeSystem sys(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
    const Spectrum spec = solve_qep(sys);
    ASSERT_EQ(spec.size(), 2);
    EXPECT_NEAR(std::abs(spec.values(0) - Complex(0, 1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(spec.values(1) - Complex(0, -1)), 0.0, 1e-14);
    EXPECT_EQ(spec.tags[0], EigenClass::ComplexPositiveImag);
    EXPECT_EQ(spec.tags[1], EigenClass::ComplexNegativeImag);
    EXPECT_NEAR(std::abs(spec.vectors(0, 0) - Complex(1, 0)), 0.0, 1e-14);
}

TEST(SolveQep, Example3ConjugatePairsInCanonicalOrder) {
    const SodeSystem sys = ex3_system();
    const Spectrum spec = solve_qep(sys);
    const Complex a(-1, s3), b(-1, 1);
    ASSERT_EQ(spec.size(), 4);
    EXPECT_LT(std::abs(spec.values(0) - a), 1e-12);
    EXPECT_LT(std::abs(spec.values(1) - b), 1e-12);
    EXPECT_EQ(spec.values(2), std::conj(spec.values(0)));
    EXPECT_EQ(spec.values(3), std::conj(spec.values(1)));
    EXPECT_EQ(CMatrix(spec.vectors.col(2)), CMatrix(spec.vectors.col(0).conjugate()));
    expect_residuals_bounded(sys, spec);
}

TEST(SolveQep, EigenvectorsAreCanonical) {
    const Spectrum spec = solve_qep(ex2_system());
    for (Index j = 0; j < spec.size(); ++j) {
        const CVector v = spec.vectors.col(j);
        EXPECT_NEAR(v.norm(), 1.0, 1e-14);
        Index dom = 0;
        v.cwiseAbs().maxCoeff(&dom);
        EXPECT_EQ(v(dom).imag(), 0.0);
        EXPECT_GE(v(dom).real(), 0.0);
    }
}

TEST(SolveQep, RepeatedRootIsAnError) {
    // lambda^2 + 2 lambda + 1 twice over.
    const SodeSystem sys(2.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    try {
        solve_qep(sys);
        FAIL() << "expected RepeatedEigenvalue";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RepeatedEigenvalue);
    }
}

TEST(SolveQep, DecoupledSystemRoundTrip) {
    Vector d(3), b(3);
    d << 4, -1, 0.5;
    b << 2, 3, -1;
    const SodeSystem sys(d.asDiagonal(), b.asDiagonal());
    std::vector<Complex> roots;
    for (Index k = 0; k < 3; ++k) {
        const Complex disc = std::sqrt(Complex(d(k) * d(k) - 4 * b(k)));
        roots.push_back((-d(k) + disc) / 2.0);
        roots.push_back((-d(k) - disc) / 2.0);
    }
    EXPECT_TRUE(same_multiset(solve_qep(sys).values, roots, tol::spec * 10));
}

TEST(SolveQepProperty, ResidualsAndSpectralIdentities) {
    for (const auto& c : corpus::random_corpus(100, 7)) {
        expect_residuals_bounded(c.system, c.spectrum);
        Complex sum = c.spectrum.values.sum();
        Complex prod = c.spectrum.values.prod();
        const double trC = c.system.C().trace();
        const double detK = c.system.K().determinant();
        EXPECT_LE(std::abs(sum + trC), tol::spec * (1 + c.system.C().norm()));
        EXPECT_LE(std::abs(prod - detK), tol::spec * (1 + std::abs(detK)));
    }
}

TEST(PairEigenvalues, Example1DefaultIsNestedByQuadraticFactor) {
    const Pairing p = pair_eigenvalues(solve_qep(ex1_system()), DefaultPairing{});
    ASSERT_EQ(p.n(), 2);
    // Slot order: largest real root first.
    EXPECT_NEAR(std::abs(p.lambda1(0) - Complex(-4 + s14)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda2(0) - Complex(-4 - s14)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda1(1) - Complex(-2 + s2)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda2(1) - Complex(-2 - s2)), 0.0, 1e-12);
}

TEST(PairEigenvalues, Example1CustomAlternative) {
    const Spectrum spec = solve_qep(ex1_system());
    // spectrum: [-4+s14, -2+s2, -2-s2, -4-s14]
    const Pairing p = pair_eigenvalues(spec, CustomPairing{{{1, 0}, {2, 3}}});
    EXPECT_NEAR(std::abs(p.lambda1(0) - Complex(-2 + s2)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda2(0) - Complex(-4 + s14)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda1(1) - Complex(-2 - s2)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.lambda2(1) - Complex(-4 - s14)), 0.0, 1e-12);
}

TEST(PairEigenvalues, Example3DefaultConjugateSlots) {
    const Pairing p = pair_eigenvalues(solve_qep(ex3_system()), DefaultPairing{});
    EXPECT_EQ(p.lambda2, p.lambda1.conjugate());
    EXPECT_TRUE(same_multiset(p.lambda1, {Complex(-1, 1), Complex(-1, s3)}, 1e-12));
}

TEST(PairEigenvalues, CustomErrors) {
    const Spectrum spec = solve_qep(ex3_system());  // [a, b, conj a, conj b]
    auto code_of = [&](CustomPairing c) {
        try {
            pair_eigenvalues(spec, c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of({{{0, 1}, {2, 3}}}), ErrorCode::InvalidPairing);  // non-conjugate
    EXPECT_EQ(code_of({{{0, 2}, {0, 3}}}), ErrorCode::InvalidPairing);  // duplicate
    EXPECT_EQ(code_of({{{0, 2}}}), ErrorCode::InvalidPairing);          // omission
    EXPECT_EQ(code_of({{{0, 2}, {1, 9}}}), ErrorCode::InvalidPairing);  // out of range

    const Spectrum mixed = solve_qep(SodeSystem(Matrix::Zero(2, 2), [] {
        Matrix k(2, 2);
        k << 1, 0, 0, -4;
        return k;
    }()));  // roots +-i, +-2
    try {
        pair_eigenvalues(mixed, CustomPairing{{{0, 2}, {1, 3}}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidPairing);
    }
}

TEST(PairEigenvalues, FromValuesRejectsDegenerateSlot) {
    CVector l(1);
    l << -1.0;
    try {
        Pairing::from_values(l, l);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegeneratePair);
    }
}

TEST(PairEigenvaluesProperty, DefaultIsDeterministicAndValid) {
    for (const auto& c : corpus::random_corpus(60, 11)) {
        const Pairing a = pair_eigenvalues(c.spectrum, DefaultPairing{});
        const Pairing b = pair_eigenvalues(c.spectrum, DefaultPairing{});
        EXPECT_EQ(a.lambda1, b.lambda1);
        EXPECT_EQ(a.lambda2, b.lambda2);
        EXPECT_EQ(a.slot_map, b.slot_map);
        // every root used once
        std::vector<int> used(static_cast<std::size_t>(c.spectrum.size()), 0);
        for (const auto& s : a.slot_map) {
            ++used[static_cast<std::size_t>(s.first)];
            ++used[static_cast<std::size_t>(s.second)];
        }
        for (int u : used) EXPECT_EQ(u, 1);
        const CVector sum = a.lambda1 + a.lambda2;
        const CVector prod = a.lambda1.cwiseProduct(a.lambda2);
        EXPECT_LE(sum.imag().cwiseAbs().maxCoeff(), 1e-12 * (1 + sum.norm()));
        EXPECT_LE(prod.imag().cwiseAbs().maxCoeff(), 1e-12 * (1 + prod.norm()));
    }
}
