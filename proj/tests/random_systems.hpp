#pragma once

// Seeded generators for property runs: systems with i.i.d. entries in
// [-2, 2], n in {2..6}, rejecting pencils with repeated roots.

#include <random>
#include <vector>

#include "phasync/phasync.hpp"

namespace phasync::corpus {

inline Matrix uniform_matrix(std::mt19937_64& rng, Index rows, Index cols, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

inline Vector uniform_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
    return uniform_matrix(rng, n, 1, lo, hi).col(0);
}

struct RandomCase {
    SodeSystem system;
    Spectrum spectrum;
};

/// `count` accepted systems; the seed fixes the whole corpus.
inline std::vector<RandomCase> random_corpus(std::size_t count, std::uint64_t seed,
                                             Index n_min = 2, Index n_max = 6) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> dim(n_min, n_max);
    std::vector<RandomCase> out;
    while (out.size() < count) {
        const Index n = dim(rng);
        SodeSystem sys(uniform_matrix(rng, n, n, -2, 2), uniform_matrix(rng, n, n, -2, 2));
        try {
            Spectrum spec = solve_qep(sys);
            out.push_back({std::move(sys), std::move(spec)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RepeatedEigenvalue) throw;
        }
    }
    return out;
}

/// Random invertible matrix with condition number below `max_cond`.
inline Matrix random_invertible(std::mt19937_64& rng, Index n, double max_cond = 50.0) {
    for (;;) {
        Matrix q = uniform_matrix(rng, n, n, -1, 1);
        if (condition_number(q) < max_cond) return q;
    }
}

}  // namespace phasync::corpus
