#pragma once

// Exact arithmetic for biquadratic extensions of Q: square classes, local
// Hilbert symbols, the local-global solvability criteria behind the three
// embedding problems, the image-of-T classifier, and constructive norm
// factorization.  All arithmetic is arbitrary-precision and exact; witness
// searches are oracles only and never decide a verdict.

#include "biquad/decomp.hpp"
#include "biquad/f2la.hpp"

#include <gmpxx.h>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace biquad::arith {

using Int = mpz_class;
using Rat = mpq_class;
using f2la::F2Vector;
using f2la::Subspace;

struct ZeroInput : Error {
    using Error::Error;
};
struct InvalidPlace : Error {
    using Error::Error;
};
struct SquareParameter : Error {
    using Error::Error;
};
struct InvalidParams : Error {
    using Error::Error;
};
struct ParamsMismatch : Error {
    using Error::Error;
};
struct PreconditionFailed : Error {
    using Error::Error;
};
struct DegenerateNorm : Error {
    using Error::Error;
};
struct InternalInconsistency : Error {
    using Error::Error;
};
struct InconsistentImage : Error {
    using Error::Error;
};

Rat rational(long num, long den = 1);

// Prime factorization of |n| by trial division, n != 0.
std::vector<std::pair<Int, int>> factorize(const Int& n);

// The unique squarefree integer d with q = d * (nonzero rational square).
Int squarefree_part(const Rat& q);
Int squarefree_part(const Int& n);

struct Place {
    bool is_infinite = false;
    Int prime{0};

    static Place infinity() { return Place{true, Int(0)}; }
    static Place at(const Int& p);  // InvalidPlace unless p is prime

    bool operator==(const Place&) const = default;
    std::string to_string() const;
};

// +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over the completion
// at the place; -1 otherwise.
int hilbert_symbol(const Rat& a, const Rat& b, const Place& v);

// Infinity, 2, and the odd primes dividing either squarefree part: the only
// places where the symbol of (a, b) can be -1.
std::vector<Place> relevant_places(const Rat& a, const Rat& b);

bool is_sum_of_two_squares(const Rat& a);
// Exhaustive up to the bound (on the scaled integer search variable).
std::optional<std::pair<Rat, Rat>> two_square_witness(const Rat& a, long bound);

// Whether b = a*y^2 - x^2 has a rational solution (equivalently, the form
// <a, -1, -b> is isotropic over Q); decided by local symbols.
bool norm_form_solvable(const Rat& a, const Rat& b);
std::optional<std::pair<Rat, Rat>> norm_form_witness(const Rat& a, const Rat& b, long bound);

// Primitive integer zero of c1 x^2 + c2 y^2 + c3 z^2 with all coordinates
// bounded, or nothing if none exists below the bound.
std::optional<std::array<Int, 3>> witness_search(const std::array<Rat, 3>& form, long bound);

struct BiquadParams {
    Int a1, a2, a3;  // squarefree, pairwise independent square classes

    // Reduces inputs to squarefree representatives; InvalidParams if any of
    // the three square classes is trivial, ZeroInput on zero.
    static BiquadParams make(const Int& raw_a1, const Int& raw_a2);
    bool operator==(const BiquadParams&) const = default;
};

// Whether <a1, a2, a1*a2> is Q-equivalent to <1, 1, 1>.
bool q8_embeddable(const BiquadParams& p);

struct Q8Witness {
    std::array<Rat, 3> e, f;  // sum e_i^2 = a1, sum f_i^2 = a2, sum e_i f_i = 0
};
std::optional<Q8Witness> q8_witness_search(const BiquadParams& p, long bound);

struct EmbeddingReport {
    std::array<bool, 3> z4z2{};  // types 1..3
    std::array<bool, 3> d4{};    // types 1..3
    bool q8 = false;

    bool operator==(const EmbeddingReport&) const = default;
};

// The seven solvability verdicts.  Each D4 type is evaluated through both
// admissible presentations, which must agree (InternalInconsistency).
EmbeddingReport embedding_report(const BiquadParams& p);

// Norm-residue vectors achieved by each embedding type.
F2Vector t_vector_d4(int type);
F2Vector t_vector_z4z2(int type);
F2Vector t_vector_q8();

// Translates the verdicts into achieved vectors, checks that together with
// zero they form a subspace (InconsistentImage otherwise), and returns it.
Subspace im_T(const EmbeddingReport& report);

struct XClassification {
    decomp::XShape shape = decomp::XShape::Zero;
    Subspace im_t;
    EmbeddingReport report;
};

// Full pipeline; a 3-dimensional image is reported Undecided since the
// norm-intersection condition has no algorithm here.
XClassification classify_X(const BiquadParams& p);

// Elements of Q(sqrt(a1), sqrt(a2)) in the basis (1, r1, r2, r1*r2) where
// r_i^2 = a_i.
struct KElement {
    BiquadParams params;
    std::array<Rat, 4> coords;

    bool operator==(const KElement&) const = default;
};

KElement k_element(const BiquadParams& p, Rat c0, Rat c1, Rat c2, Rat c3);

enum class Sigma { S1, S2, S1S2 };
enum class Subfield { K1, K2, K3, F };

KElement galois_act(Sigma s, const KElement& k);
KElement mult(const KElement& a, const KElement& b);  // ParamsMismatch
// Product of k with its conjugates over the subfield; lands in it.
KElement norm(const KElement& k, Subfield to);

// Factorization of a K3-norm that lies in the base field into a K1-norm
// times a K2-norm: g = (h1^2 - a1 h2^2)(h3^2 - a2 h4^2), verified exactly.
struct NormSplit {
    Rat h1, h2, h3, h4;
    Rat value;  // the factored norm g
};
NormSplit factor_k3_norm(const KElement& k);

}  // namespace biquad::arith
