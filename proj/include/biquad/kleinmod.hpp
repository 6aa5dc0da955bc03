#pragma once

// Modules over F2[G] for G the Klein four-group: canonical indecomposables,
// fixed submodules, Hom-space dimensions, and recovery of summand
// multiplicities for modules promised to lie in the nine-type family.

#include "biquad/f2la.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace biquad::kleinmod {

using f2la::F2Matrix;
using f2la::F2Vector;
using f2la::Subspace;

struct InvalidModule : Error {
    using Error::Error;
};
struct NotInFamily : Error {
    using Error::Error;
};

enum class SummandKind : std::uint8_t {
    Trivial,    // F2, both generators act as the identity
    CycG1,      // dim 2, sigma1 swaps the basis, sigma2 fixes it
    CycG2,      // dim 2, sigma2 swaps, sigma1 fixes
    CycG3,      // dim 2, both swap (sigma1*sigma2 acts trivially)
    Free,       // dim 4, regular representation
    OmegaPlus,  // dim 2n+1, fixed bottom row of dimension n
    OmegaMinus, // dim 2n+1, fixed bottom row of dimension n+1
};

struct SummandType {
    SummandKind kind = SummandKind::Trivial;
    unsigned n = 0;  // only meaningful for the two odd-dimensional families

    static SummandType trivial() { return {SummandKind::Trivial, 0}; }
    static SummandType cyc(int i);
    static SummandType free_module() { return {SummandKind::Free, 0}; }
    static SummandType omega_plus(unsigned n) { return {SummandKind::OmegaPlus, n}; }
    static SummandType omega_minus(unsigned n) { return {SummandKind::OmegaMinus, n}; }

    std::size_t dim() const;
    // CLI vocabulary: "F2", "C_G1", "C_G2", "C_G3", "Free", "Omega+1", ...
    std::string name() const;

    auto operator<=>(const SummandType&) const = default;
};

struct KleinModule {
    std::size_t dim = 0;
    F2Matrix s1, s2;  // actions of the two commuting involutions
};

// Empty result means the module invariants hold; otherwise one entry per
// failed identity ("s1^2 != I", "s2^2 != I", "s1*s2 != s2*s1", shape errors).
std::vector<std::string> validate(const KleinModule& m);
void require_valid(const KleinModule& m);  // throws InvalidModule

KleinModule canonical(SummandType t);
KleinModule direct_sum(const std::vector<KleinModule>& parts);
KleinModule direct_sum(const std::vector<SummandType>& types);

enum class GroupOp { A1, A2, A3, Norm };  // 1+s1, 1+s2, 1+s1*s2, (1+s1)(1+s2)
F2Matrix group_operator(const KleinModule& m, GroupOp op);

// ker(1+s1) ∩ ker(1+s2).
Subspace fixed_submodule(const KleinModule& m);

// Dimension of the space of equivariant maps X -> M.
std::size_t hom_dim(const KleinModule& x, const KleinModule& m);

// Smallest subspace containing the seeds and stable under both actions.
Subspace submodule_closure(const KleinModule& m, const std::vector<F2Vector>& seeds);

// The module induced on an invariant subspace, in the coordinates of its
// canonical basis.  Throws InvalidModule if U is not invariant.
KleinModule restrict_to(const KleinModule& m, const Subspace& u);

// Module with both actions transposed (swaps the two odd-dimensional
// families in any decomposition).
KleinModule transpose_module(const KleinModule& m);

struct Multiplicities {
    std::map<SummandType, std::size_t> counts;

    std::size_t total_dim() const;
    std::size_t of(SummandType t) const;
    bool operator==(const Multiplicities&) const = default;
    std::string to_string() const;
};

// The decomposition target family: the four cyclic types, the free module,
// and both odd-dimensional families up to the given parameter.
std::vector<SummandType> decomposition_family(unsigned max_omega = 2);

// The linear functionals used to pin down multiplicities: hom_dim(X_i, M)
// and hom_dim(M, X_i) over the family, then nine rank invariants
// (dim, dim fixed, rank A1/A2/A3/N, dim(im A1 ∩ im A2), rank of A1 on
// ker A2, rank of A2 on ker A1).
std::vector<long long> functional_values(const KleinModule& m,
                                         const std::vector<SummandType>& family);
std::vector<std::string> functional_names(const std::vector<SummandType>& family);

struct GramSystem {
    std::vector<SummandType> family;
    // One row per functional, one column per family member.
    std::vector<std::vector<long long>> matrix;
    std::vector<std::size_t> chosen_rows;  // an invertible row selection
    std::size_t rank = 0;
};

// Functional matrix over the canonical family members, computed once per
// family and cached.  Throws if its rank is less than the family size.
const GramSystem& gram_system(const std::vector<SummandType>& family);

// Exact multiset recovery for modules promised to be direct sums over the
// family.  All functionals are re-verified against the answer.
Multiplicities multiplicities(const KleinModule& m);
Multiplicities multiplicities(const KleinModule& m, const std::vector<SummandType>& family);

// Text module file format:
//   dim <n>
//   sigma1
//   <n rows of n characters in {0,1}>
//   sigma2
//   <n rows>
KleinModule parse_module_text(std::istream& in);
KleinModule parse_module_text(const std::string& text);
std::string format_module_text(const KleinModule& m);

}  // namespace biquad::kleinmod
