#pragma once

// The constructive decomposition machinery: a filtration of a designated
// fixed subspace by diagram solvability, the chain pairing between the two
// one-sided layers, and the layered submodule builder whose fixed part is
// exactly the designated subspace.  Also the classification table that maps
// an image-of-T subspace of F2^3 to the shape of the complementary summand.

#include "biquad/f2la.hpp"
#include "biquad/kleinmod.hpp"

#include <array>
#include <optional>
#include <vector>

namespace biquad::decomp {

using f2la::F2Matrix;
using f2la::F2Vector;
using f2la::Subspace;
using kleinmod::KleinModule;
using kleinmod::Multiplicities;
using kleinmod::SummandType;

struct PhiNotFixed : Error {
    using Error::Error;
};
struct NotComplement : Error {
    using Error::Error;
};
struct VerificationFailed : Error {
    using Error::Error;
};
struct NotInSubspace : Error {
    using Error::Error;
};
struct MissingFlag : Error {
    using Error::Error;
};

// The five solvability layers inside the designated subspace of fixed
// classes ("targets" plays the role the base field's classes play in the
// arithmetic setting).
struct Filtration {
    Subspace full_norm;   // targets with a preimage under (1+s1)(1+s2)
    Subspace both_sides;  // s1_side ∩ s2_side
    Subspace s1_side;     // (1+s1)g with (1+s2)g = 0
    Subspace s2_side;     // (1+s2)g with (1+s1)g = 0
    Subspace diagonal;    // (1+s1)g = (1+s2)g
};

Filtration filtration(const KleinModule& m, const Subspace& targets);

// One three-step chain: gammas solve
//   (1+s2)g1 = 0, (1+s1)g1 = left = (1+s2)g2,
//   (1+s1)g2 = right = (1+s2)g3, (1+s1)g3 = 0.
struct ChainWitness {
    F2Vector left, right;
    std::array<F2Vector, 3> gammas;
};

struct WPairing {
    // Achievable (left, right) pairs, as a subspace of F2^{2n}.
    Subspace pair_space;
    Subspace left_space;
    Subspace right_space;
    // Ambient matrix restricting to the bijection left_space -> right_space
    // (zero on a fixed complement of left_space).
    F2Matrix pair_map;
    std::vector<ChainWitness> chains;  // per canonical basis vector of left_space
};

// Requires s1_complement to complement both_sides inside s1_side, and
// s2_complement likewise; the complements are what make the pairing a
// well-defined bijection.
WPairing w_pairing(const KleinModule& m, const Subspace& targets,
                   const Subspace& s1_complement, const Subspace& s2_complement);

struct HatJSummand {
    SummandType type;
    std::vector<F2Vector> generators;
};

struct HatJResult {
    Filtration filt;
    Subspace targets;

    // Aligned fixed-class bases and their diagram witnesses, layer by layer.
    std::vector<F2Vector> norm_basis, norm_gens;            // Free summands
    std::vector<F2Vector> split_basis;                      // Omega+1 summands
    std::vector<std::array<F2Vector, 2>> split_gens;
    std::vector<ChainWitness> chains;                       // Omega+2 summands
    std::vector<F2Vector> s1_basis, s1_gens;                // C_G1 summands
    std::vector<F2Vector> s2_basis, s2_gens;                // C_G2 summands
    std::vector<F2Vector> diag_basis, diag_gens;            // C_G3 summands
    std::vector<F2Vector> trivial_basis;                    // F2 summands

    Subspace s1_complement, s2_complement;

    // Layer spans (closures of each layer's generators) and their sum.
    Subspace free_layer, omega1_layer, omega2_layer;
    Subspace cyc1_layer, cyc2_layer, cyc3_layer, trivial_layer;
    Subspace total;

    Multiplicities counts;
    std::vector<HatJSummand> summands() const;
};

// Executes the layered construction and machine-checks, before returning,
// that the summand dimensions add up to the dimension of the total span and
// that the fixed part of the total span equals the designated subspace.
HatJResult build_hat_J(const KleinModule& m, const Subspace& targets);

enum class DiagramKind { FullNorm, S1Side, S2Side, Diagonal };

// A witness gamma for the requested diagram with right-hand side f, built
// entirely from the layered generators (so it lies in the total span);
// verified by operator application before returning.
F2Vector solvable_witness(const KleinModule& m, const HatJResult& hj, DiagramKind which,
                          const F2Vector& f);

enum class XShape {
    Zero,
    F2,
    F2PlusF2,
    OmegaMinus1,
    OmegaMinus2,
    OmegaMinus1Squared,
    Undecided,  // dim 3 without the norm-intersection flag
};

std::string to_string(XShape s);

// Classification by the image subspace of F2^3: dim 0 and 1 are forced;
// dim 2 splits on whether the image is a coordinate plane; dim 3 needs the
// norm-intersection flag and stays Undecided without it (MissingFlag is
// raised only when a decided answer is demanded).
XShape x_shape(const Subspace& im_t, std::optional<bool> norm_intersection_nontrivial,
               bool require_decided = false);

}  // namespace biquad::decomp
