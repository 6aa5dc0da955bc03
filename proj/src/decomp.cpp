#include "biquad/decomp.hpp"

#include <algorithm>

namespace biquad::decomp {

using kleinmod::fixed_submodule;
using kleinmod::group_operator;
using kleinmod::GroupOp;
using kleinmod::submodule_closure;

namespace {

F2Vector concat(const F2Vector& a, const F2Vector& b)
{
    F2Vector v(a.len() + b.len());
    for (std::size_t i = 0; i < a.len(); ++i)
        v.set(i, a.get(i));
    for (std::size_t i = 0; i < b.len(); ++i)
        v.set(a.len() + i, b.get(i));
    return v;
}

F2Vector slice(const F2Vector& v, std::size_t from, std::size_t len)
{
    F2Vector out(len);
    for (std::size_t i = 0; i < len; ++i)
        out.set(i, v.get(from + i));
    return out;
}

// gamma with (1+s1)gamma = want_a1 and (1+s2)gamma = want_a2.
F2Vector solve_two_sided(const F2Matrix& a1, const F2Matrix& a2, const F2Vector& want_a1,
                         const F2Vector& want_a2)
{
    auto x = f2la::solve(f2la::vstack({a1, a2}), concat(want_a1, want_a2));
    if (!x)
        throw VerificationFailed("diagram has no solution although the layer promised one");
    return *x;
}

}  // namespace

Filtration filtration(const KleinModule& m, const Subspace& targets)
{
    kleinmod::require_valid(m);
    if (targets.ambient() != m.dim)
        throw f2la::DimensionMismatch("filtration: targets not in the module's space");
    if (!f2la::is_subspace_of(targets, fixed_submodule(m)))
        throw PhiNotFixed("filtration: targets are not fixed classes");

    const F2Matrix a1 = group_operator(m, GroupOp::A1);
    const F2Matrix a2 = group_operator(m, GroupOp::A2);
    const F2Matrix nm = group_operator(m, GroupOp::Norm);
    const F2Matrix action_diff = m.s1 + m.s2;

    Filtration f;
    f.full_norm = f2la::intersect(targets, f2la::image(nm));
    f.s1_side = f2la::intersect(targets, f2la::apply(a1, f2la::kernel(a2)));
    f.s2_side = f2la::intersect(targets, f2la::apply(a2, f2la::kernel(a1)));
    f.diagonal = f2la::intersect(targets, f2la::apply(a1, f2la::kernel(action_diff)));
    f.both_sides = f2la::intersect(f.s1_side, f.s2_side);
    return f;
}

WPairing w_pairing(const KleinModule& m, const Subspace& targets,
                   const Subspace& s1_complement, const Subspace& s2_complement)
{
    Filtration f = filtration(m, targets);
    auto is_complement = [&](const Subspace& c, const Subspace& inside) {
        return f2la::intersect(c, f.both_sides).dim() == 0 &&
               f2la::add(c, f.both_sides) == inside;
    };
    if (!is_complement(s1_complement, f.s1_side))
        throw NotComplement("w_pairing: first complement does not complement the core");
    if (!is_complement(s2_complement, f.s2_side))
        throw NotComplement("w_pairing: second complement does not complement the core");

    const std::size_t n = m.dim;
    const F2Matrix a1 = group_operator(m, GroupOp::A1);
    const F2Matrix a2 = group_operator(m, GroupOp::A2);
    const F2Matrix zero = F2Matrix::zero(n, n);

    // Homogeneous chain constraints on (g1, g2, g3) in F2^{3n}:
    //   A2 g1 = 0,  A1 g1 + A2 g2 = 0,  A1 g2 + A2 g3 = 0,  A1 g3 = 0.
    auto hcat3 = [&](const F2Matrix& x, const F2Matrix& y, const F2Matrix& z) {
        F2Matrix r(n, 3 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (x.get(i, j))
                    r.set(i, j, true);
                if (y.get(i, j))
                    r.set(i, n + j, true);
                if (z.get(i, j))
                    r.set(i, 2 * n + j, true);
            }
        return r;
    };
    F2Matrix constraints = f2la::vstack({hcat3(a2, zero, zero), hcat3(a1, a2, zero),
                                         hcat3(zero, a1, a2), hcat3(zero, zero, a1)});
    Subspace solutions = f2la::kernel(constraints);

    // Project each solution to its achievable (left, right) pair.
    std::vector<F2Vector> projected;
    for (const auto& s : solutions.basis()) {
        F2Vector g1 = slice(s, 0, n), g2 = slice(s, n, n);
        projected.push_back(concat(a1 * g1, a1 * g2));
    }
    WPairing wp;
    wp.pair_space = f2la::canonicalize(projected, 2 * n);

    // Restrict to pairs drawn from the two complements.
    std::vector<F2Vector> box;
    for (const auto& b : s1_complement.basis())
        box.push_back(concat(b, F2Vector(n)));
    for (const auto& c : s2_complement.basis())
        box.push_back(concat(F2Vector(n), c));
    Subspace restricted = f2la::intersect(wp.pair_space, f2la::canonicalize(box, 2 * n));

    std::vector<F2Vector> lefts, rights;
    for (const auto& q : restricted.basis()) {
        lefts.push_back(slice(q, 0, n));
        rights.push_back(slice(q, n, n));
    }
    wp.left_space = f2la::canonicalize(lefts, n);
    wp.right_space = f2la::canonicalize(rights, n);
    if (wp.left_space.dim() != restricted.dim() || wp.right_space.dim() != restricted.dim())
        throw VerificationFailed(
            "w_pairing: pairing is not a bijection (complement preconditions violated?)");

    // One chain per canonical basis vector of the left space.
    for (const auto& b : wp.left_space.basis()) {
        // The unique restricted pair whose left half is b.
        std::vector<F2Vector> pair_cols = restricted.basis();
        F2Matrix first_halves(n, pair_cols.size());
        for (std::size_t j = 0; j < pair_cols.size(); ++j)
            for (std::size_t i = 0; i < n; ++i)
                first_halves.set(i, j, pair_cols[j].get(i));
        auto coords = f2la::solve(first_halves, b);
        if (!coords)
            throw VerificationFailed("w_pairing: left basis vector lost (internal bug)");
        F2Vector pair(2 * n);
        for (std::size_t j = 0; j < pair_cols.size(); ++j)
            if (coords->get(j))
                pair ^= pair_cols[j];
        F2Vector right = slice(pair, n, n);

        // A solution of the chain system projecting onto this pair.
        auto sol_coords = f2la::coordinates(projected, pair);
        if (!sol_coords)
            throw VerificationFailed("w_pairing: achievable pair has no chain (internal bug)");
        F2Vector s(3 * n);
        for (std::size_t j = 0; j < projected.size(); ++j)
            if (sol_coords->get(j))
                s ^= solutions.basis()[j];
        ChainWitness cw{b, right, {slice(s, 0, n), slice(s, n, n), slice(s, 2 * n, n)}};
        if (!(a2 * cw.gammas[0]).is_zero() || !(a1 * cw.gammas[0] == cw.left) ||
            !(a2 * cw.gammas[1] == cw.left) || !(a1 * cw.gammas[1] == cw.right) ||
            !(a2 * cw.gammas[2] == cw.right) || !(a1 * cw.gammas[2]).is_zero())
            throw VerificationFailed("w_pairing: chain witness fails its equations");
        wp.chains.push_back(std::move(cw));
    }

    // Ambient matrix for the pairing: left basis -> right partner, a fixed
    // complement of the left space -> 0.
    Subspace rest = f2la::complement(wp.left_space, Subspace::full(n));
    std::vector<F2Vector> dom = wp.left_space.basis(), img;
    for (const auto& cw : wp.chains)
        img.push_back(cw.right);
    for (const auto& r : rest.basis()) {
        dom.push_back(r);
        img.push_back(F2Vector(n));
    }
    F2Matrix dom_m = F2Matrix::from_cols(dom, n);
    auto dom_inv = f2la::inverse(dom_m);
    if (!dom_inv)
        throw VerificationFailed("w_pairing: domain basis not invertible (internal bug)");
    wp.pair_map = F2Matrix::from_cols(img, n) * *dom_inv;
    return wp;
}

std::vector<HatJSummand> HatJResult::summands() const
{
    std::vector<HatJSummand> out;
    for (std::size_t i = 0; i < norm_basis.size(); ++i)
        out.push_back({SummandType::free_module(), {norm_gens[i]}});
    for (std::size_t i = 0; i < split_basis.size(); ++i)
        out.push_back({SummandType::omega_plus(1), {split_gens[i][0], split_gens[i][1]}});
    for (const auto& cw : chains)
        out.push_back(
            {SummandType::omega_plus(2), {cw.gammas[0], cw.gammas[1], cw.gammas[2]}});
    for (std::size_t i = 0; i < s1_basis.size(); ++i)
        out.push_back({SummandType::cyc(1), {s1_gens[i]}});
    for (std::size_t i = 0; i < s2_basis.size(); ++i)
        out.push_back({SummandType::cyc(2), {s2_gens[i]}});
    for (std::size_t i = 0; i < diag_basis.size(); ++i)
        out.push_back({SummandType::cyc(3), {diag_gens[i]}});
    for (const auto& f : trivial_basis)
        out.push_back({SummandType::trivial(), {f}});
    return out;
}

HatJResult build_hat_J(const KleinModule& m, const Subspace& targets)
{
    HatJResult hj;
    hj.filt = filtration(m, targets);
    hj.targets = targets;
    const std::size_t n = m.dim;
    const F2Matrix a1 = group_operator(m, GroupOp::A1);
    const F2Matrix a2 = group_operator(m, GroupOp::A2);
    const F2Matrix nm = group_operator(m, GroupOp::Norm);

    // Free layer: a norm preimage for each basis class of the norm layer.
    hj.norm_basis = hj.filt.full_norm.basis();
    for (const auto& f : hj.norm_basis) {
        auto g = f2la::solve(nm, f);
        if (!g)
            throw VerificationFailed("norm layer: no norm preimage (internal bug)");
        hj.norm_gens.push_back(*g);
    }

    // Omega+1 layer: a complement of the norm layer inside the core, each
    // class with a one-sided witness from either side.
    hj.split_basis = f2la::complement(hj.filt.full_norm, hj.filt.both_sides).basis();
    for (const auto& f : hj.split_basis) {
        F2Vector zero(n);
        hj.split_gens.push_back(
            {solve_two_sided(a1, a2, f, zero), solve_two_sided(a1, a2, zero, f)});
    }

    // Omega+2 layer via the chain pairing on complements of the core.
    hj.s1_complement = f2la::complement(hj.filt.both_sides, hj.filt.s1_side);
    hj.s2_complement = f2la::complement(hj.filt.both_sides, hj.filt.s2_side);
    WPairing wp = w_pairing(m, targets, hj.s1_complement, hj.s2_complement);
    hj.chains = wp.chains;

    // One-sided cyclic layers: complements of the paired parts.
    hj.s1_basis = f2la::complement(wp.left_space, hj.s1_complement).basis();
    for (const auto& f : hj.s1_basis)
        hj.s1_gens.push_back(solve_two_sided(a1, a2, f, F2Vector(n)));
    hj.s2_basis = f2la::complement(wp.right_space, hj.s2_complement).basis();
    for (const auto& f : hj.s2_basis)
        hj.s2_gens.push_back(solve_two_sided(a1, a2, F2Vector(n), f));

    // Diagonal cyclic layer: a complement of what the one-sided layers
    // already reach inside the diagonal layer.
    Subspace sides = f2la::add(hj.filt.s1_side, hj.filt.s2_side);
    hj.diag_basis =
        f2la::complement(f2la::intersect(sides, hj.filt.diagonal), hj.filt.diagonal).basis();
    for (const auto& f : hj.diag_basis)
        hj.diag_gens.push_back(solve_two_sided(a1, a2, f, f));

    // Trivial layer: whatever is left of the designated subspace.
    hj.trivial_basis =
        f2la::complement(f2la::add(sides, hj.filt.diagonal), targets).basis();

    // Layer spans.
    auto closure = [&](const std::vector<F2Vector>& gens) {
        return submodule_closure(m, gens);
    };
    std::vector<F2Vector> o1;
    for (const auto& p : hj.split_gens) {
        o1.push_back(p[0]);
        o1.push_back(p[1]);
    }
    std::vector<F2Vector> o2;
    for (const auto& cw : hj.chains)
        for (const auto& g : cw.gammas)
            o2.push_back(g);
    hj.free_layer = closure(hj.norm_gens);
    hj.omega1_layer = closure(o1);
    hj.omega2_layer = closure(o2);
    hj.cyc1_layer = closure(hj.s1_gens);
    hj.cyc2_layer = closure(hj.s2_gens);
    hj.cyc3_layer = closure(hj.diag_gens);
    hj.trivial_layer = closure(hj.trivial_basis);

    std::vector<F2Vector> all;
    for (const auto& layer : {hj.free_layer, hj.omega1_layer, hj.omega2_layer, hj.cyc1_layer,
                              hj.cyc2_layer, hj.cyc3_layer, hj.trivial_layer})
        for (const auto& b : layer.basis())
            all.push_back(b);
    hj.total = f2la::canonicalize(all, n);

    hj.counts.counts.clear();
    auto record = [&](SummandType t, std::size_t c) {
        if (c)
            hj.counts.counts[t] = c;
    };
    record(SummandType::free_module(), hj.norm_basis.size());
    record(SummandType::omega_plus(1), hj.split_basis.size());
    record(SummandType::omega_plus(2), hj.chains.size());
    record(SummandType::cyc(1), hj.s1_basis.size());
    record(SummandType::cyc(2), hj.s2_basis.size());
    record(SummandType::cyc(3), hj.diag_basis.size());
    record(SummandType::trivial(), hj.trivial_basis.size());

    // Structural checks, run on every call.
    if (hj.counts.total_dim() != hj.total.dim())
        throw VerificationFailed("layered sum is not direct: claimed dimension " +
                                 std::to_string(hj.counts.total_dim()) + ", spanned " +
                                 std::to_string(hj.total.dim()));
    if (!(f2la::intersect(hj.total, fixed_submodule(m)) == targets))
        throw VerificationFailed("fixed part of the layered span differs from the targets");
    return hj;
}

F2Vector solvable_witness(const KleinModule& m, const HatJResult& hj, DiagramKind which,
                          const F2Vector& f)
{
    const std::size_t n = m.dim;
    const F2Matrix a1 = group_operator(m, GroupOp::A1);
    const F2Matrix a2 = group_operator(m, GroupOp::A2);

    auto accumulate = [&](const std::vector<F2Vector>& cols,
                          const std::vector<F2Vector>& wits, const F2Vector& rhs,
                          F2Vector& w, const char* what) {
        auto coords = f2la::coordinates(cols, rhs);
        if (!coords)
            throw NotInSubspace(std::string("witness: class is outside the ") + what +
                                " layer span");
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (coords->get(i))
                w ^= wits[i];
    };

    F2Vector w(n);
    switch (which) {
        case DiagramKind::FullNorm: {
            if (!hj.filt.full_norm.contains(f))
                throw NotInSubspace("witness: class not in the norm layer");
            accumulate(hj.norm_basis, hj.norm_gens, f, w, "norm");
            const F2Matrix nm = group_operator(m, GroupOp::Norm);
            if (!(nm * w == f))
                throw VerificationFailed("norm witness fails");
            break;
        }
        case DiagramKind::S1Side:
        case DiagramKind::S2Side: {
            bool first = which == DiagramKind::S1Side;
            const Subspace& side = first ? hj.filt.s1_side : hj.filt.s2_side;
            if (!side.contains(f))
                throw NotInSubspace("witness: class not in the requested one-sided layer");
            std::vector<F2Vector> cols = hj.norm_basis, wits;
            for (std::size_t i = 0; i < hj.norm_basis.size(); ++i)
                wits.push_back((first ? a2 : a1) * hj.norm_gens[i]);
            for (std::size_t i = 0; i < hj.split_basis.size(); ++i) {
                cols.push_back(hj.split_basis[i]);
                wits.push_back(hj.split_gens[i][first ? 0 : 1]);
            }
            for (const auto& cw : hj.chains) {
                cols.push_back(first ? cw.left : cw.right);
                wits.push_back(cw.gammas[first ? 0 : 2]);
            }
            const auto& side_basis = first ? hj.s1_basis : hj.s2_basis;
            const auto& side_gens = first ? hj.s1_gens : hj.s2_gens;
            for (std::size_t i = 0; i < side_basis.size(); ++i) {
                cols.push_back(side_basis[i]);
                wits.push_back(side_gens[i]);
            }
            accumulate(cols, wits, f, w, first ? "s1-side" : "s2-side");
            const F2Matrix& same = first ? a1 : a2;
            const F2Matrix& other = first ? a2 : a1;
            if (!(same * w == f) || !(other * w).is_zero())
                throw VerificationFailed("one-sided witness fails");
            break;
        }
        case DiagramKind::Diagonal: {
            if (!hj.filt.diagonal.contains(f))
                throw NotInSubspace("witness: class not in the diagonal layer");
            // Decompose over core ⊕ paired-lefts ⊕ s1-rest ⊕ paired-rights ⊕
            // s2-rest ⊕ diagonal-rest; the one-sided rests must not appear
            // and paired coordinates must match up.
            std::vector<F2Vector> cols = hj.norm_basis;
            cols.insert(cols.end(), hj.split_basis.begin(), hj.split_basis.end());
            std::size_t left_at = cols.size();
            for (const auto& cw : hj.chains)
                cols.push_back(cw.left);
            std::size_t s1_at = cols.size();
            cols.insert(cols.end(), hj.s1_basis.begin(), hj.s1_basis.end());
            std::size_t right_at = cols.size();
            for (const auto& cw : hj.chains)
                cols.push_back(cw.right);
            std::size_t s2_at = cols.size();
            cols.insert(cols.end(), hj.s2_basis.begin(), hj.s2_basis.end());
            std::size_t diag_at = cols.size();
            cols.insert(cols.end(), hj.diag_basis.begin(), hj.diag_basis.end());

            auto coords = f2la::coordinates(cols, f);
            if (!coords)
                throw NotInSubspace("witness: diagonal class not reachable (internal bug)");
            for (std::size_t i = s1_at; i < right_at; ++i)
                if (coords->get(i))
                    throw VerificationFailed("diagonal witness: stray one-sided component");
            for (std::size_t i = s2_at; i < diag_at; ++i)
                if (coords->get(i))
                    throw VerificationFailed("diagonal witness: stray one-sided component");
            for (std::size_t i = 0; i < hj.chains.size(); ++i)
                if (coords->get(left_at + i) != coords->get(right_at + i))
                    throw VerificationFailed("diagonal witness: unpaired chain component");

            for (std::size_t i = 0; i < hj.norm_basis.size(); ++i)
                if (coords->get(i))
                    w ^= (a1 * hj.norm_gens[i]) ^ (a2 * hj.norm_gens[i]);
            for (std::size_t i = 0; i < hj.split_basis.size(); ++i)
                if (coords->get(hj.norm_basis.size() + i))
                    w ^= hj.split_gens[i][0] ^ hj.split_gens[i][1];
            for (std::size_t i = 0; i < hj.chains.size(); ++i)
                if (coords->get(left_at + i))
                    w ^= hj.chains[i].gammas[0] ^ hj.chains[i].gammas[1] ^
                         hj.chains[i].gammas[2];
            for (std::size_t i = 0; i < hj.diag_basis.size(); ++i)
                if (coords->get(diag_at + i))
                    w ^= hj.diag_gens[i];
            if (!(a1 * w == f) || !(a2 * w == f))
                throw VerificationFailed("diagonal witness fails");
            break;
        }
    }
    if (!hj.total.contains(w))
        throw VerificationFailed("witness escapes the layered span");
    return w;
}

std::string to_string(XShape s)
{
    switch (s) {
        case XShape::Zero: return "Zero";
        case XShape::F2: return "F2";
        case XShape::F2PlusF2: return "F2 ⊕ F2";
        case XShape::OmegaMinus1: return "Omega-1";
        case XShape::OmegaMinus2: return "Omega-2";
        case XShape::OmegaMinus1Squared: return "Omega-1 ⊕ Omega-1";
        case XShape::Undecided: return "Undecided(Omega-2 | Omega-1 ⊕ Omega-1)";
    }
    return "?";
}

XShape x_shape(const Subspace& im_t, std::optional<bool> norm_intersection_nontrivial,
               bool require_decided)
{
    if (im_t.ambient() != 3)
        throw f2la::DimensionMismatch("x_shape: image subspace must live in F2^3");
    switch (im_t.dim()) {
        case 0: return XShape::Zero;
        case 1: return XShape::F2;
        case 2: {
            for (std::size_t i = 0; i < 3; ++i) {
                bool coordinate_plane = true;
                for (const auto& b : im_t.basis())
                    coordinate_plane = coordinate_plane && !b.get(i);
                if (coordinate_plane)
                    return XShape::OmegaMinus1;
            }
            return XShape::F2PlusF2;
        }
        case 3:
            if (!norm_intersection_nontrivial) {
                if (require_decided)
                    throw MissingFlag(
                        "x_shape: norm-intersection flag required for a decided answer");
                return XShape::Undecided;
            }
            return *norm_intersection_nontrivial ? XShape::OmegaMinus2
                                                 : XShape::OmegaMinus1Squared;
    }
    return XShape::Undecided;  // unreachable
}

}  // namespace biquad::decomp
