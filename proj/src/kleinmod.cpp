#include "biquad/kleinmod.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace biquad::kleinmod {

SummandType SummandType::cyc(int i)
{
    switch (i) {
        case 1: return {SummandKind::CycG1, 0};
        case 2: return {SummandKind::CycG2, 0};
        case 3: return {SummandKind::CycG3, 0};
    }
    throw Error("cyc: index must be 1, 2 or 3");
}

std::size_t SummandType::dim() const
{
    switch (kind) {
        case SummandKind::Trivial: return 1;
        case SummandKind::CycG1:
        case SummandKind::CycG2:
        case SummandKind::CycG3: return 2;
        case SummandKind::Free: return 4;
        case SummandKind::OmegaPlus:
        case SummandKind::OmegaMinus: return 2 * n + 1;
    }
    return 0;
}

std::string SummandType::name() const
{
    switch (kind) {
        case SummandKind::Trivial: return "F2";
        case SummandKind::CycG1: return "C_G1";
        case SummandKind::CycG2: return "C_G2";
        case SummandKind::CycG3: return "C_G3";
        case SummandKind::Free: return "Free";
        case SummandKind::OmegaPlus: return "Omega+" + std::to_string(n);
        case SummandKind::OmegaMinus: return "Omega-" + std::to_string(n);
    }
    return "?";
}

std::vector<std::string> validate(const KleinModule& m)
{
    std::vector<std::string> bad;
    if (m.s1.rows() != m.dim || m.s1.cols() != m.dim || m.s2.rows() != m.dim ||
        m.s2.cols() != m.dim) {
        bad.push_back("action matrices are not dim x dim");
        return bad;
    }
    const F2Matrix id = F2Matrix::identity(m.dim);
    if (!(m.s1 * m.s1 == id))
        bad.push_back("s1^2 != I");
    if (!(m.s2 * m.s2 == id))
        bad.push_back("s2^2 != I");
    if (!(m.s1 * m.s2 == m.s2 * m.s1))
        bad.push_back("s1*s2 != s2*s1");
    return bad;
}

void require_valid(const KleinModule& m)
{
    auto bad = validate(m);
    if (!bad.empty()) {
        std::string msg = "invalid module:";
        for (const auto& b : bad)
            msg += " " + b;
        throw InvalidModule(msg);
    }
}

KleinModule canonical(SummandType t)
{
    switch (t.kind) {
        case SummandKind::Trivial:
            return {1, F2Matrix::identity(1), F2Matrix::identity(1)};
        case SummandKind::CycG1:
            return {2, F2Matrix::of(2, 2, {0, 1, 1, 0}), F2Matrix::identity(2)};
        case SummandKind::CycG2:
            return {2, F2Matrix::identity(2), F2Matrix::of(2, 2, {0, 1, 1, 0})};
        case SummandKind::CycG3:
            return {2, F2Matrix::of(2, 2, {0, 1, 1, 0}), F2Matrix::of(2, 2, {0, 1, 1, 0})};
        case SummandKind::Free: {
            // basis e, s1 e, s2 e, s1 s2 e
            F2Matrix s1(4, 4), s2(4, 4);
            auto perm = [](F2Matrix& s, std::size_t a, std::size_t b) {
                s.set(a, b, true);
                s.set(b, a, true);
            };
            perm(s1, 0, 1);
            perm(s1, 2, 3);
            perm(s2, 0, 2);
            perm(s2, 1, 3);
            return {4, s1, s2};
        }
        case SummandKind::OmegaPlus: {
            // top gamma_1..gamma_{n+1} at 0..n, bottom delta_1..delta_n at
            // n+1..2n; (1+s1)gamma_i = delta_i, (1+s2)gamma_{i+1} = delta_i,
            // (1+s2)gamma_1 = (1+s1)gamma_{n+1} = 0, deltas fixed.
            if (t.n == 0)
                throw Error("omega parameter must be >= 1");
            std::size_t d = 2 * t.n + 1;
            F2Matrix s1 = F2Matrix::identity(d), s2 = F2Matrix::identity(d);
            for (unsigned i = 1; i <= t.n; ++i) {
                s1.set(t.n + i, i - 1, true);  // s1 gamma_i = gamma_i + delta_i
                s2.set(t.n + i, i, true);      // s2 gamma_{i+1} = gamma_{i+1} + delta_i
            }
            return {d, s1, s2};
        }
        case SummandKind::OmegaMinus: {
            // top alpha_1..alpha_n at 0..n-1, bottom beta_1..beta_{n+1} at
            // n..2n; (1+s2)alpha_i = beta_i, (1+s1)alpha_i = beta_{i+1},
            // betas fixed.
            if (t.n == 0)
                throw Error("omega parameter must be >= 1");
            std::size_t d = 2 * t.n + 1;
            F2Matrix s1 = F2Matrix::identity(d), s2 = F2Matrix::identity(d);
            for (unsigned i = 1; i <= t.n; ++i) {
                s2.set(t.n + i - 1, i - 1, true);  // s2 alpha_i = alpha_i + beta_i
                s1.set(t.n + i, i - 1, true);      // s1 alpha_i = alpha_i + beta_{i+1}
            }
            return {d, s1, s2};
        }
    }
    throw Error("canonical: unknown summand type");
}

KleinModule direct_sum(const std::vector<KleinModule>& parts)
{
    std::size_t d = 0;
    for (const auto& p : parts)
        d += p.dim;
    F2Matrix s1(d, d), s2(d, d);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.dim; ++i)
            for (std::size_t j = 0; j < p.dim; ++j) {
                if (p.s1.get(i, j))
                    s1.set(off + i, off + j, true);
                if (p.s2.get(i, j))
                    s2.set(off + i, off + j, true);
            }
        off += p.dim;
    }
    return {d, s1, s2};
}

KleinModule direct_sum(const std::vector<SummandType>& types)
{
    std::vector<KleinModule> parts;
    parts.reserve(types.size());
    for (auto t : types)
        parts.push_back(canonical(t));
    return direct_sum(parts);
}

F2Matrix group_operator(const KleinModule& m, GroupOp op)
{
    require_valid(m);
    const F2Matrix id = F2Matrix::identity(m.dim);
    switch (op) {
        case GroupOp::A1: return id + m.s1;
        case GroupOp::A2: return id + m.s2;
        case GroupOp::A3: return id + m.s1 * m.s2;
        case GroupOp::Norm: return (id + m.s1) * (id + m.s2);
    }
    throw Error("group_operator: unknown operator");
}

Subspace fixed_submodule(const KleinModule& m)
{
    require_valid(m);
    return f2la::intersect(f2la::kernel(group_operator(m, GroupOp::A1)),
                           f2la::kernel(group_operator(m, GroupOp::A2)));
}

std::size_t hom_dim(const KleinModule& x, const KleinModule& m)
{
    require_valid(x);
    require_valid(m);
    // Unknowns: entries of Phi (dm x dx), indexed r*dx + c.  Equations for
    // each action s: Phi*s_X + s_M*Phi = 0, entrywise.
    std::size_t dm = m.dim, dx = x.dim;
    std::size_t unknowns = dm * dx;
    std::vector<F2Vector> rows;
    rows.reserve(2 * unknowns);
    auto add_equations = [&](const F2Matrix& sx, const F2Matrix& sm) {
        for (std::size_t i = 0; i < dm; ++i)
            for (std::size_t j = 0; j < dx; ++j) {
                F2Vector row(unknowns);
                for (std::size_t k = 0; k < dx; ++k)
                    if (sx.get(k, j))
                        row.flip(i * dx + k);
                for (std::size_t k = 0; k < dm; ++k)
                    if (sm.get(i, k))
                        row.flip(k * dx + j);
                rows.push_back(std::move(row));
            }
    };
    add_equations(x.s1, m.s1);
    add_equations(x.s2, m.s2);
    return f2la::kernel(F2Matrix::from_rows(rows, unknowns)).dim();
}

Subspace submodule_closure(const KleinModule& m, const std::vector<F2Vector>& seeds)
{
    require_valid(m);
    Subspace span = f2la::canonicalize(seeds, m.dim);
    for (;;) {
        std::vector<F2Vector> next = span.basis();
        for (const auto& b : span.basis()) {
            next.push_back(m.s1 * b);
            next.push_back(m.s2 * b);
        }
        Subspace grown = f2la::canonicalize(next, m.dim);
        if (grown == span)
            return span;
        span = grown;
    }
}

KleinModule restrict_to(const KleinModule& m, const Subspace& u)
{
    require_valid(m);
    std::size_t k = u.dim();
    F2Matrix cols = F2Matrix::from_cols(u.basis(), m.dim);
    F2Matrix r1(k, k), r2(k, k);
    for (std::size_t j = 0; j < k; ++j) {
        for (auto [s, r] : {std::pair{&m.s1, &r1}, std::pair{&m.s2, &r2}}) {
            auto x = f2la::solve(cols, *s * u.basis()[j]);
            if (!x)
                throw InvalidModule("restrict_to: subspace is not invariant");
            for (std::size_t i = 0; i < k; ++i)
                r->set(i, j, x->get(i));
        }
    }
    return {k, r1, r2};
}

KleinModule transpose_module(const KleinModule& m)
{
    return {m.dim, m.s1.transposed(), m.s2.transposed()};
}

std::size_t Multiplicities::total_dim() const
{
    std::size_t d = 0;
    for (const auto& [t, c] : counts)
        d += t.dim() * c;
    return d;
}

std::size_t Multiplicities::of(SummandType t) const
{
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
}

std::string Multiplicities::to_string() const
{
    std::string s;
    for (const auto& [t, c] : counts) {
        if (c == 0)
            continue;
        if (!s.empty())
            s += " ";
        s += t.name() + ":" + std::to_string(c);
    }
    return s.empty() ? "(zero module)" : s;
}

std::vector<SummandType> decomposition_family(unsigned max_omega)
{
    std::vector<SummandType> fam = {SummandType::trivial(), SummandType::cyc(1),
                                    SummandType::cyc(2), SummandType::cyc(3),
                                    SummandType::free_module()};
    for (unsigned n = 1; n <= max_omega; ++n)
        fam.push_back(SummandType::omega_plus(n));
    for (unsigned n = 1; n <= max_omega; ++n)
        fam.push_back(SummandType::omega_minus(n));
    return fam;
}

std::vector<long long> functional_values(const KleinModule& m,
                                         const std::vector<SummandType>& family)
{
    require_valid(m);
    std::vector<long long> v;
    v.reserve(2 * family.size() + 9);
    for (auto t : family)
        v.push_back(static_cast<long long>(hom_dim(canonical(t), m)));
    for (auto t : family)
        v.push_back(static_cast<long long>(hom_dim(m, canonical(t))));
    const F2Matrix a1 = group_operator(m, GroupOp::A1);
    const F2Matrix a2 = group_operator(m, GroupOp::A2);
    const F2Matrix a3 = group_operator(m, GroupOp::A3);
    const F2Matrix nm = group_operator(m, GroupOp::Norm);
    v.push_back(static_cast<long long>(m.dim));
    v.push_back(static_cast<long long>(fixed_submodule(m).dim()));
    v.push_back(static_cast<long long>(f2la::rank(a1)));
    v.push_back(static_cast<long long>(f2la::rank(a2)));
    v.push_back(static_cast<long long>(f2la::rank(a3)));
    v.push_back(static_cast<long long>(f2la::rank(nm)));
    v.push_back(static_cast<long long>(
        f2la::intersect(f2la::image(a1), f2la::image(a2)).dim()));
    v.push_back(static_cast<long long>(f2la::apply(a1, f2la::kernel(a2)).dim()));
    v.push_back(static_cast<long long>(f2la::apply(a2, f2la::kernel(a1)).dim()));
    return v;
}

std::vector<std::string> functional_names(const std::vector<SummandType>& family)
{
    std::vector<std::string> names;
    for (auto t : family)
        names.push_back("hom(" + t.name() + ", M)");
    for (auto t : family)
        names.push_back("hom(M, " + t.name() + ")");
    for (const char* n : {"dim", "dim fixed", "rank A1", "rank A2", "rank A3", "rank N",
                          "dim(im A1 ^ im A2)", "rank A1|ker A2", "rank A2|ker A1"})
        names.push_back(n);
    return names;
}

namespace {

using I128 = __int128;

I128 exact_div(I128 num, I128 den)
{
    if (den == 0 || num % den != 0)
        throw Error("exact integer elimination: inexact division (internal bug)");
    return num / den;
}

// Fraction-free (Bareiss) forward elimination.  Entries here are small
// functional values, so intermediates stay far inside 128 bits.  Returns
// the rank and the original indices of the pivot rows.
std::pair<std::size_t, std::vector<std::size_t>> int_echelon(std::vector<std::vector<I128>> a)
{
    std::size_t rows = a.size();
    if (rows == 0)
        return {0, {}};
    std::size_t cols = a.front().size();
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), 0);
    I128 prev = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][col] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(a[rank], a[piv]);
        std::swap(idx[rank], idx[piv]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = col + 1; j < cols; ++j)
                a[i][j] = exact_div(a[i][j] * a[rank][col] - a[i][col] * a[rank][j], prev);
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    idx.resize(rank);
    return {rank, idx};
}

// Determinant of a square matrix by the same elimination.
I128 det_bareiss(std::vector<std::vector<I128>> a)
{
    std::size_t n = a.size();
    if (n == 0)
        return 1;
    I128 prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0)
                ++r;
            if (r == n)
                return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev);
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

}  // namespace

const GramSystem& gram_system(const std::vector<SummandType>& family)
{
    static std::mutex mu;
    static std::map<std::string, GramSystem> cache;
    std::string key;
    for (auto t : family)
        key += t.name() + ";";
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    GramSystem g;
    g.family = family;
    // Column j = functionals of the j-th canonical family member; build as
    // rows of the functional matrix.
    std::vector<std::vector<long long>> per_member;
    for (auto t : family)
        per_member.push_back(functional_values(canonical(t), family));
    std::size_t nfun = per_member.front().size();
    for (std::size_t f = 0; f < nfun; ++f) {
        std::vector<long long> row(family.size());
        for (std::size_t j = 0; j < family.size(); ++j)
            row[j] = per_member[j][f];
        g.matrix.push_back(std::move(row));
    }
    std::vector<std::vector<I128>> work;
    for (const auto& row : g.matrix)
        work.emplace_back(row.begin(), row.end());
    auto [rank, pivot_rows] = int_echelon(std::move(work));
    g.rank = rank;
    g.chosen_rows = std::move(pivot_rows);
    std::sort(g.chosen_rows.begin(), g.chosen_rows.end());
    if (g.rank != family.size()) {
        std::ostringstream os;
        os << "functional matrix is rank-deficient: rank " << g.rank << " over "
           << family.size() << " family members; the family cannot be separated";
        throw Error(os.str());
    }
    return cache.emplace(std::move(key), std::move(g)).first->second;
}

Multiplicities multiplicities(const KleinModule& m)
{
    return multiplicities(m, decomposition_family());
}

Multiplicities multiplicities(const KleinModule& m, const std::vector<SummandType>& family)
{
    require_valid(m);
    const GramSystem& g = gram_system(family);
    std::vector<long long> vals = functional_values(m, family);
    std::size_t k = family.size();

    // Cramer's rule on the chosen invertible row selection, exactly.
    std::vector<std::vector<I128>> base(k, std::vector<I128>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            base[i][j] = g.matrix[g.chosen_rows[i]][j];
    I128 det = det_bareiss(base);
    if (det == 0)
        throw Error("multiplicities: chosen rows degenerate (internal bug)");

    std::vector<long long> counts(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto m_j = base;
        for (std::size_t i = 0; i < k; ++i)
            m_j[i][j] = vals[g.chosen_rows[i]];
        I128 dj = det_bareiss(m_j);
        if (dj % det != 0)
            throw NotInFamily("multiplicities: no integer solution to the functional system");
        I128 c = dj / det;
        if (c < 0)
            throw NotInFamily("multiplicities: functional system forces a negative count");
        counts[j] = static_cast<long long>(c);
    }
    // Consistency of every functional row against the answer.
    for (std::size_t f = 0; f < g.matrix.size(); ++f) {
        I128 acc = 0;
        for (std::size_t j = 0; j < k; ++j)
            acc += static_cast<I128>(g.matrix[f][j]) * counts[j];
        if (acc != vals[f])
            throw NotInFamily("multiplicities: functional '" +
                              functional_names(family)[f] +
                              "' is inconsistent with the candidate decomposition");
    }
    Multiplicities result;
    for (std::size_t j = 0; j < k; ++j)
        if (counts[j] > 0)
            result.counts[family[j]] = static_cast<std::size_t>(counts[j]);
    return result;
}

KleinModule parse_module_text(std::istream& in)
{
    auto next_line = [&](const char* what) {
        std::string line;
        if (!std::getline(in, line))
            throw Error(std::string("module file: missing ") + what);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return line;
    };
    std::string header = next_line("'dim <n>' header");
    std::istringstream hs(header);
    std::string word;
    long n = -1;
    hs >> word >> n;
    if (word != "dim" || n < 0 || !hs)
        throw Error("module file: first line must be 'dim <n>'");
    if (n > 4096)
        throw Error("module file: dim too large (limit 4096)");
    std::size_t dim = static_cast<std::size_t>(n);
    auto read_matrix = [&](const char* tag) {
        std::string t = next_line(tag);
        if (t != tag)
            throw Error(std::string("module file: expected '") + tag + "', got '" + t + "'");
        F2Matrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            std::string row = next_line("matrix row");
            if (row.size() != dim)
                throw Error("module file: row has wrong length");
            for (std::size_t j = 0; j < dim; ++j) {
                if (row[j] == '1')
                    m.set(i, j, true);
                else if (row[j] != '0')
                    throw Error("module file: entries must be 0 or 1");
            }
        }
        return m;
    };
    KleinModule m;
    m.dim = dim;
    m.s1 = read_matrix("sigma1");
    m.s2 = read_matrix("sigma2");
    return m;
}

KleinModule parse_module_text(const std::string& text)
{
    std::istringstream is(text);
    return parse_module_text(is);
}

std::string format_module_text(const KleinModule& m)
{
    std::ostringstream os;
    os << "dim " << m.dim << "\n";
    os << "sigma1\n" << m.s1.to_string();
    os << "sigma2\n" << m.s2.to_string();
    return os.str();
}

}  // namespace biquad::kleinmod
