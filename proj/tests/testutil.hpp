#pragma once

// Shared helpers for the test suites: seeded random subspaces, random
// invertible bit matrices, random family modules with known multisets.

#include "biquad/f2la.hpp"
#include "biquad/kleinmod.hpp"

#include <random>
#include <vector>

namespace testutil {

using biquad::f2la::F2Matrix;
using biquad::f2la::F2Vector;
using biquad::f2la::Subspace;
using biquad::kleinmod::KleinModule;
using biquad::kleinmod::SummandType;

using Rng = std::mt19937_64;

inline F2Vector random_vector(Rng& rng, std::size_t len)
{
    F2Vector v(len);
    std::bernoulli_distribution bit(0.5);
    for (std::size_t i = 0; i < len; ++i)
        v.set(i, bit(rng));
    return v;
}

inline F2Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols)
{
    F2Matrix m(rows, cols);
    std::bernoulli_distribution bit(0.5);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m.set(i, j, bit(rng));
    return m;
}

inline Subspace random_subspace(Rng& rng, std::size_t ambient, std::size_t generators)
{
    std::vector<F2Vector> vs;
    for (std::size_t i = 0; i < generators; ++i)
        vs.push_back(random_vector(rng, ambient));
    return biquad::f2la::canonicalize(vs, ambient);
}

inline F2Matrix random_invertible(Rng& rng, std::size_t n)
{
    for (;;) {
        F2Matrix m = random_matrix(rng, n, n);
        if (biquad::f2la::inverse(m))
            return m;
    }
}

// Conjugated copy: actions P s P^{-1}.
inline KleinModule conjugate(const KleinModule& m, const F2Matrix& p)
{
    auto pinv = biquad::f2la::inverse(p);
    if (!pinv)
        throw biquad::Error("conjugate: matrix not invertible");
    return {m.dim, p * m.s1 * *pinv, p * m.s2 * *pinv};
}

inline KleinModule random_conjugate(Rng& rng, const KleinModule& m)
{
    return conjugate(m, random_invertible(rng, m.dim));
}

// A random multiset over the family with total dimension <= max_dim.
inline std::vector<SummandType> random_multiset(Rng& rng,
                                                const std::vector<SummandType>& family,
                                                std::size_t max_dim)
{
    std::vector<SummandType> parts;
    std::size_t used = 0;
    std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
    std::bernoulli_distribution keep_going(0.9);
    while (keep_going(rng)) {
        SummandType t = family[pick(rng)];
        if (used + t.dim() > max_dim)
            break;
        parts.push_back(t);
        used += t.dim();
    }
    std::sort(parts.begin(), parts.end());
    return parts;
}

inline biquad::kleinmod::Multiplicities multiset_counts(const std::vector<SummandType>& parts)
{
    biquad::kleinmod::Multiplicities m;
    for (auto t : parts)
        m.counts[t]++;
    return m;
}

}  // namespace testutil
