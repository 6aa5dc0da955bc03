#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biquad/kleinmod.hpp"
#include "testutil.hpp"

#include <set>
#include <sstream>

using namespace biquad;
using namespace biquad::kleinmod;
using f2la::F2Matrix;
using f2la::F2Vector;
using f2la::Subspace;

namespace {

const std::vector<SummandType>& family9()
{
    static const std::vector<SummandType> fam = decomposition_family();
    return fam;
}

// Brute-force count of equivariant maps X -> M over all bit matrices;
// feasible only for tiny dimensions.
std::size_t hom_dim_brute(const KleinModule& x, const KleinModule& m)
{
    std::size_t cells = m.dim * x.dim;
    REQUIRE(cells <= 16);
    std::size_t count = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << cells); ++mask) {
        F2Matrix phi(m.dim, x.dim);
        for (std::size_t c = 0; c < cells; ++c)
            if ((mask >> c) & 1)
                phi.set(c / x.dim, c % x.dim, true);
        if (phi * x.s1 == m.s1 * phi && phi * x.s2 == m.s2 * phi)
            ++count;
    }
    // count = 2^dim
    std::size_t d = 0;
    while ((std::size_t(1) << d) < count)
        ++d;
    REQUIRE((std::size_t(1) << d) == count);
    return d;
}

}  // namespace

TEST_CASE("validate: canonical modules pass, broken ones report the failing identity")
{
    for (auto t : family9())
        CHECK(validate(canonical(t)).empty());

    KleinModule bad1{2, F2Matrix::of(2, 2, {1, 1, 0, 1}), F2Matrix::identity(2)};
    // [[1,1],[0,1]] squares to the identity over F2, so break it differently:
    bad1.s1 = F2Matrix::of(2, 2, {1, 1, 1, 1});
    auto v1 = validate(bad1);
    REQUIRE(!v1.empty());
    CHECK(v1[0] == "s1^2 != I");

    // Two non-commuting involutions (a dihedral pair).
    KleinModule bad2{2, F2Matrix::of(2, 2, {0, 1, 1, 0}), F2Matrix::of(2, 2, {1, 0, 1, 1})};
    auto v2 = validate(bad2);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0] == "s1*s2 != s2*s1");
}

TEST_CASE("canonical shapes: dimensions, fixed parts, operator ranks")
{
    auto om1 = canonical(SummandType::omega_minus(1));
    CHECK(om1.dim == 3);
    CHECK(fixed_submodule(om1).dim() == 2);

    auto op2 = canonical(SummandType::omega_plus(2));
    CHECK(op2.dim == 5);
    CHECK(fixed_submodule(op2).dim() == 2);
    CHECK(f2la::rank(group_operator(op2, GroupOp::A1)) == 2);

    auto fr = canonical(SummandType::free_module());
    CHECK(fr.dim == 4);
    CHECK(f2la::rank(group_operator(fr, GroupOp::Norm)) == 1);
    CHECK(fixed_submodule(fr) == f2la::image(group_operator(fr, GroupOp::Norm)));
    CHECK(fixed_submodule(fr).dim() == 1);

    CHECK(fixed_submodule(canonical(SummandType::trivial())).dim() == 1);
    CHECK(fixed_submodule(canonical(SummandType::omega_minus(2))).dim() == 3);
}

TEST_CASE("direct_sum")
{
    CHECK(direct_sum(std::vector<KleinModule>{}).dim == 0);
    auto two = direct_sum({SummandType::trivial(), SummandType::trivial()});
    CHECK(two.dim == 2);
    CHECK(two.s1 == F2Matrix::identity(2));
    CHECK(two.s2 == F2Matrix::identity(2));

    auto m = direct_sum({SummandType::omega_minus(1), SummandType::free_module()});
    CHECK(m.dim == 7);
    CHECK(validate(m).empty());
}

TEST_CASE("group operators: vanishing cases and commutation")
{
    CHECK(group_operator(canonical(SummandType::trivial()), GroupOp::A1) ==
          F2Matrix::zero(1, 1));
    CHECK(group_operator(canonical(SummandType::omega_plus(1)), GroupOp::Norm) ==
          F2Matrix::zero(3, 3));
    CHECK(group_operator(canonical(SummandType::cyc(3)), GroupOp::A3) ==
          F2Matrix::zero(2, 2));

    for (auto t : family9()) {
        auto m = canonical(t);
        auto id = F2Matrix::identity(m.dim);
        CHECK((id + m.s1) * (id + m.s2) == (id + m.s2) * (id + m.s1));
        CHECK(group_operator(m, GroupOp::Norm) == (id + m.s1) * (id + m.s2));
    }
}

TEST_CASE("hom_dim identities and the brute-force oracle")
{
    for (auto t : family9()) {
        auto m = canonical(t);
        CHECK(hom_dim(canonical(SummandType::trivial()), m) == fixed_submodule(m).dim());
        CHECK(hom_dim(canonical(SummandType::free_module()), m) == m.dim);
    }

    auto op1 = canonical(SummandType::omega_plus(1));
    auto om1 = canonical(SummandType::omega_minus(1));
    std::size_t oracle = hom_dim_brute(op1, om1);
    CHECK(oracle == 4);
    CHECK(hom_dim(op1, om1) == oracle);

    // A couple more small pairs against the oracle.
    auto c1 = canonical(SummandType::cyc(1));
    auto c3 = canonical(SummandType::cyc(3));
    CHECK(hom_dim(c1, c3) == hom_dim_brute(c1, c3));
    CHECK(hom_dim(c3, op1) == hom_dim_brute(c3, op1));
    CHECK(hom_dim(om1, om1) == hom_dim_brute(om1, om1));

    testutil::Rng rng(5);
    auto sum = direct_sum({SummandType::cyc(2), SummandType::omega_plus(1),
                           SummandType::trivial()});
    auto conj = testutil::random_conjugate(rng, sum);
    CHECK(hom_dim(canonical(SummandType::trivial()), conj) == fixed_submodule(conj).dim());
    CHECK(hom_dim(canonical(SummandType::free_module()), conj) == conj.dim);
}

TEST_CASE("submodule_closure examples")
{
    auto fr = canonical(SummandType::free_module());
    auto fixed = fixed_submodule(fr);
    CHECK(submodule_closure(fr, {fixed.basis()[0]}).dim() == 1);
    CHECK(submodule_closure(fr, {F2Vector({1, 0, 0, 0})}) == Subspace::full(4));

    auto om1 = canonical(SummandType::omega_minus(1));
    CHECK(submodule_closure(om1, {F2Vector({1, 0, 0})}) == Subspace::full(3));
}

TEST_CASE("functional matrix has full rank and every row re-verifies")
{
    const auto& g = gram_system(family9());
    CHECK(g.rank == 9);
    CHECK(g.matrix.size() == 27);
    CHECK(g.chosen_rows.size() == 9);
    // Spot check a few matrix entries against their definitions.
    // Column order follows the family; row 0 is hom(F2, .) = dim fixed.
    for (std::size_t j = 0; j < family9().size(); ++j)
        CHECK(g.matrix[0][j] ==
              (long long)fixed_submodule(canonical(family9()[j])).dim());
}

TEST_CASE("multiplicities on constructed sums and the degeneracy pair")
{
    auto m = direct_sum({SummandType::omega_minus(1), SummandType::free_module()});
    Multiplicities expect;
    expect.counts[SummandType::omega_minus(1)] = 1;
    expect.counts[SummandType::free_module()] = 1;
    CHECK(multiplicities(m) == expect);

    auto cyc = direct_sum({SummandType::cyc(1), SummandType::cyc(2), SummandType::cyc(3)});
    auto omm = direct_sum({SummandType::omega_plus(1), SummandType::omega_minus(1)});
    // The nine rank invariants coincide on this pair...
    auto vc = functional_values(cyc, family9());
    auto vo = functional_values(omm, family9());
    for (std::size_t i = 18; i < 27; ++i)
        CHECK(vc[i] == vo[i]);
    // ...but the Hom functionals split them.
    auto op1 = canonical(SummandType::omega_plus(1));
    CHECK(hom_dim(op1, cyc) == 6);
    CHECK(hom_dim(op1, omm) == 7);
    Multiplicities ec, eo;
    ec.counts[SummandType::cyc(1)] = 1;
    ec.counts[SummandType::cyc(2)] = 1;
    ec.counts[SummandType::cyc(3)] = 1;
    eo.counts[SummandType::omega_plus(1)] = 1;
    eo.counts[SummandType::omega_minus(1)] = 1;
    CHECK(multiplicities(cyc) == ec);
    CHECK(multiplicities(omm) == eo);
}

TEST_CASE("multiplicities is invariant under basis change")
{
    testutil::Rng rng(41);
    auto base = canonical(SummandType::omega_plus(2));
    for (int t = 0; t < 10; ++t) {
        auto conj = testutil::random_conjugate(rng, base);
        Multiplicities e;
        e.counts[SummandType::omega_plus(2)] = 1;
        CHECK(multiplicities(conj) == e);
    }
}

TEST_CASE("Krull-Schmidt round-trip on random conjugated multisets")
{
    testutil::Rng rng(43);
    for (int t = 0; t < 60; ++t) {
        auto parts = testutil::random_multiset(rng, family9(), 40);
        auto m = testutil::random_conjugate(rng, direct_sum(parts));
        CHECK(multiplicities(m) == testutil::multiset_counts(parts));
    }
}

TEST_CASE("modules outside the family are rejected")
{
    auto deep = canonical(SummandType::omega_minus(3));
    CHECK_THROWS_AS(multiplicities(deep), NotInFamily);
    auto deep_plus = canonical(SummandType::omega_plus(3));
    CHECK_THROWS_AS(multiplicities(deep_plus), NotInFamily);

    // The widened family (configuration constant) handles them.
    auto fam3 = decomposition_family(3);
    CHECK(gram_system(fam3).rank == fam3.size());
    Multiplicities e;
    e.counts[SummandType::omega_minus(3)] = 1;
    CHECK(multiplicities(deep, fam3) == e);
}

TEST_CASE("duality: transposing swaps the two odd families")
{
    testutil::Rng rng(47);
    for (int t = 0; t < 15; ++t) {
        auto parts = testutil::random_multiset(rng, family9(), 30);
        auto m = testutil::random_conjugate(rng, direct_sum(parts));
        auto mt = transpose_module(m);
        Multiplicities got = multiplicities(mt);
        Multiplicities expect;
        for (auto [ty, c] : testutil::multiset_counts(parts).counts) {
            SummandType flipped = ty;
            if (ty.kind == SummandKind::OmegaPlus)
                flipped = SummandType::omega_minus(ty.n);
            else if (ty.kind == SummandKind::OmegaMinus)
                flipped = SummandType::omega_plus(ty.n);
            expect.counts[flipped] += c;
        }
        CHECK(got == expect);
    }
}

TEST_CASE("independence of submodules is detected by fixed parts")
{
    testutil::Rng rng(53);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        auto parts = testutil::random_multiset(rng, family9(), 16);
        if (parts.empty())
            continue;
        auto m = testutil::random_conjugate(rng, direct_sum(parts));
        auto fixed = fixed_submodule(m);
        Subspace u = submodule_closure(m, {testutil::random_vector(rng, m.dim)});
        Subspace v = submodule_closure(m, {testutil::random_vector(rng, m.dim)});
        bool disjoint = f2la::intersect(u, v).dim() == 0;
        bool fixed_disjoint =
            f2la::intersect(f2la::intersect(u, fixed), f2la::intersect(v, fixed)).dim() == 0;
        CHECK(disjoint == fixed_disjoint);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("restriction to an invariant subspace")
{
    testutil::Rng rng(59);
    auto m = testutil::random_conjugate(
        rng, direct_sum({SummandType::free_module(), SummandType::cyc(1)}));
    // The closure of any vector is invariant.
    Subspace u = submodule_closure(m, {testutil::random_vector(rng, m.dim)});
    auto r = restrict_to(m, u);
    CHECK(r.dim == u.dim());
    CHECK(validate(r).empty());

    // Non-invariant subspaces are rejected.
    auto fr = canonical(SummandType::free_module());
    Subspace line = f2la::canonicalize({F2Vector({1, 0, 0, 0})}, 4);
    CHECK_THROWS_AS(restrict_to(fr, line), InvalidModule);
}

TEST_CASE("module file format: round-trip and strictness")
{
    testutil::Rng rng(61);
    for (int t = 0; t < 10; ++t) {
        auto parts = testutil::random_multiset(rng, family9(), 20);
        auto m = testutil::random_conjugate(rng, direct_sum(parts));
        auto text = format_module_text(m);
        auto back = parse_module_text(text);
        CHECK(back.dim == m.dim);
        CHECK(back.s1 == m.s1);
        CHECK(back.s2 == m.s2);
    }

    CHECK_THROWS(parse_module_text("dim x\n"));
    CHECK_THROWS(parse_module_text("dim 2\nsigma1\n10\n01\n"));          // missing sigma2
    CHECK_THROWS(parse_module_text("dim 2\nsigma1\n10\n0\nsigma2\n10\n01\n"));  // short row
    CHECK_THROWS(parse_module_text("dim 2\nsigma1\n12\n01\nsigma2\n10\n01\n"));  // bad char

    // Trailing newline optional.
    auto m2 = parse_module_text("dim 1\nsigma1\n1\nsigma2\n1");
    CHECK(m2.dim == 1);
}

TEST_CASE("summand naming follows the reporting vocabulary")
{
    CHECK(SummandType::trivial().name() == "F2");
    CHECK(SummandType::cyc(1).name() == "C_G1");
    CHECK(SummandType::free_module().name() == "Free");
    CHECK(SummandType::omega_plus(2).name() == "Omega+2");
    CHECK(SummandType::omega_minus(1).name() == "Omega-1");
    CHECK(SummandType::omega_plus(2).dim() == 5);
    CHECK(SummandType::free_module().dim() == 4);
}
