#include "biquad/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace biquad::arith {

Rat rational(long num, long den)
{
    Rat q(num, den);
    q.canonicalize();
    return q;
}

std::vector<std::pair<Int, int>> factorize(const Int& n)
{
    if (n == 0)
        throw ZeroInput("factorize: zero input");
    Int m = abs(n);
    std::vector<std::pair<Int, int>> out;
    auto strip = [&](const Int& p) {
        int e = 0;
        while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
            m /= p;
            ++e;
        }
        if (e)
            out.emplace_back(p, e);
    };
    strip(2);
    for (Int p = 3; p * p <= m; p += 2)
        strip(p);
    if (m > 1)
        out.emplace_back(m, 1);
    std::sort(out.begin(), out.end());
    return out;
}

Int squarefree_part(const Int& n)
{
    if (n == 0)
        throw ZeroInput("squarefree_part: zero input");
    Int d = n < 0 ? -1 : 1;
    for (const auto& [p, e] : factorize(n))
        if (e % 2 == 1)
            d *= p;
    return d;
}

Int squarefree_part(const Rat& q)
{
    if (q == 0)
        throw ZeroInput("squarefree_part: zero input");
    return squarefree_part(Int(q.get_num() * q.get_den()));
}

Place Place::at(const Int& p)
{
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
        throw InvalidPlace("place must be a prime or infinity, got " + p.get_str());
    return Place{false, p};
}

std::string Place::to_string() const
{
    return is_infinite ? "inf" : prime.get_str();
}

namespace {

int mod_pos(const Int& x, int m)
{
    Int r = x % m;
    if (r < 0)
        r += m;
    return static_cast<int>(r.get_si());
}

// (u-1)/2 mod 2 for odd u.
int eps2(const Int& u)
{
    return mod_pos(u, 4) == 3 ? 1 : 0;
}

// (u^2-1)/8 mod 2 for odd u.
int omega2(const Int& u)
{
    int r = mod_pos(u, 8);
    return (r == 3 || r == 5) ? 1 : 0;
}

}  // namespace

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v)
{
    if (a == 0 || b == 0)
        throw ZeroInput("hilbert_symbol: zero entry");
    // The symbol only depends on square classes.
    Int A = squarefree_part(a), B = squarefree_part(b);
    if (v.is_infinite)
        return (A < 0 && B < 0) ? -1 : 1;
    const Int& p = v.prime;
    if (p == 2) {
        int alpha = mpz_even_p(A.get_mpz_t()) ? 1 : 0;
        int beta = mpz_even_p(B.get_mpz_t()) ? 1 : 0;
        Int u = alpha ? Int(A / 2) : A;
        Int w = beta ? Int(B / 2) : B;
        int e = (eps2(u) & eps2(w)) ^ (alpha & omega2(w)) ^ (beta & omega2(u));
        return e ? -1 : 1;
    }
    int alpha = mpz_divisible_p(A.get_mpz_t(), p.get_mpz_t()) ? 1 : 0;
    int beta = mpz_divisible_p(B.get_mpz_t(), p.get_mpz_t()) ? 1 : 0;
    Int u = alpha ? Int(A / p) : A;
    Int w = beta ? Int(B / p) : B;
    int s = 1;
    if (alpha && beta && mod_pos(p, 4) == 3)
        s = -s;
    if (beta)
        s *= mpz_legendre(u.get_mpz_t(), p.get_mpz_t());
    if (alpha)
        s *= mpz_legendre(w.get_mpz_t(), p.get_mpz_t());
    return s;
}

std::vector<Place> relevant_places(const Rat& a, const Rat& b)
{
    std::set<Int> primes{Int(2)};
    for (const Rat& q : {a, b})
        for (const auto& [p, e] : factorize(squarefree_part(q)))
            primes.insert(p);
    std::vector<Place> out{Place::infinity()};
    for (const auto& p : primes)
        out.push_back(Place{false, p});
    return out;
}

bool is_sum_of_two_squares(const Rat& a)
{
    if (a == 0)
        throw ZeroInput("is_sum_of_two_squares: zero input");
    if (a < 0)
        return false;
    for (const auto& [p, e] : factorize(squarefree_part(a)))
        if (mod_pos(p, 4) == 3)
            return false;
    return true;
}

std::optional<std::pair<Rat, Rat>> two_square_witness(const Rat& a, long bound)
{
    if (a <= 0)
        return std::nullopt;
    Int den = a.get_den();
    Int target = a.get_num() * den;  // a = target / den^2
    Int xmax;
    mpz_sqrt(xmax.get_mpz_t(), target.get_mpz_t());
    if (xmax > bound)
        xmax = bound;
    for (Int x = 0; x <= xmax; ++x) {
        Int rem = target - x * x;
        if (mpz_perfect_square_p(rem.get_mpz_t())) {
            Int y;
            mpz_sqrt(y.get_mpz_t(), rem.get_mpz_t());
            if (y > bound)
                continue;
            Rat rx(x, den), ry(y, den);
            rx.canonicalize();
            ry.canonicalize();
            if (rx * rx + ry * ry == a)
                return std::make_pair(rx, ry);
        }
    }
    return std::nullopt;
}

bool norm_form_solvable(const Rat& a, const Rat& b)
{
    if (a == 0 || b == 0)
        throw ZeroInput("norm_form_solvable: zero input");
    if (squarefree_part(a) == 1)
        throw SquareParameter("norm_form_solvable: first parameter is a square");
    Rat nb = -b;
    for (const Place& v : relevant_places(a, nb))
        if (hilbert_symbol(a, nb, v) == -1)
            return false;
    return true;
}

std::optional<std::array<Int, 3>> witness_search(const std::array<Rat, 3>& form, long bound)
{
    for (const auto& c : form)
        if (c == 0)
            throw ZeroInput("witness_search: zero coefficient");
    // Scale to integer coefficients; zeros are unchanged.
    Int scale = 1;
    for (const auto& c : form)
        mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), c.get_den().get_mpz_t());
    std::array<Int, 3> c;
    for (int i = 0; i < 3; ++i) {
        Rat s = form[i] * Rat(scale);
        s.canonicalize();
        c[i] = s.get_num();
    }
    // Solve for the variable with the smallest coefficient; loop the others
    // in growing square shells so small witnesses surface first.
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (abs(c[i]) < abs(c[k]))
            k = i;
    int i = (k + 1) % 3, j = (k + 2) % 3;

    auto consider = [&](const Int& u, const Int& v) -> std::optional<std::array<Int, 3>> {
        Int t = -(c[i] * u * u + c[j] * v * v);
        Int x;
        if (t == 0) {
            if (u == 0 && v == 0)
                return std::nullopt;
            x = 0;
        } else {
            if (!mpz_divisible_p(t.get_mpz_t(), c[k].get_mpz_t()))
                return std::nullopt;
            Int q = t / c[k];
            if (q < 0 || !mpz_perfect_square_p(q.get_mpz_t()))
                return std::nullopt;
            mpz_sqrt(x.get_mpz_t(), q.get_mpz_t());
            if (x > bound)
                return std::nullopt;
        }
        std::array<Int, 3> sol;
        sol[i] = u;
        sol[j] = v;
        sol[k] = x;
        Int g = gcd(gcd(sol[0], sol[1]), sol[2]);
        if (g > 1)
            for (auto& s : sol)
                s /= g;
        if (c[0] * sol[0] * sol[0] + c[1] * sol[1] * sol[1] + c[2] * sol[2] * sol[2] != 0)
            throw Error("witness_search: verification failed (internal bug)");
        return sol;
    };

    for (long s = 0; s <= bound; ++s) {
        for (long v = 0; v <= s; ++v)
            if (auto sol = consider(s, v))
                return sol;
        for (long u = 0; u < s; ++u)
            if (auto sol = consider(u, s))
                return sol;
    }
    return std::nullopt;
}

std::optional<std::pair<Rat, Rat>> norm_form_witness(const Rat& a, const Rat& b, long bound)
{
    // b = a y^2 - x^2 as the ternary zero a*s1^2 - s2^2 - b*s3^2 = 0.
    auto sol = witness_search({a, Rat(-1), -b}, bound);
    if (!sol)
        return std::nullopt;
    auto [s1, s2, s3] = *sol;
    if (s3 == 0)
        return std::nullopt;  // would force a to be a square
    Rat x(s2, s3), y(s1, s3);
    x.canonicalize();
    y.canonicalize();
    if (a * y * y - x * x != b)
        throw Error("norm_form_witness: verification failed (internal bug)");
    return std::make_pair(x, y);
}

BiquadParams BiquadParams::make(const Int& raw_a1, const Int& raw_a2)
{
    if (raw_a1 == 0 || raw_a2 == 0)
        throw ZeroInput("parameters must be nonzero");
    BiquadParams p;
    p.a1 = squarefree_part(raw_a1);
    p.a2 = squarefree_part(raw_a2);
    if (p.a1 == 1)
        throw InvalidParams("a1 is a square");
    if (p.a2 == 1)
        throw InvalidParams("a2 is a square");
    p.a3 = squarefree_part(Int(p.a1 * p.a2));
    if (p.a3 == 1)
        throw InvalidParams("a1 and a2 are dependent square classes");
    return p;
}

bool q8_embeddable(const BiquadParams& p)
{
    if (p.a1 < 0 || p.a2 < 0)
        return false;
    Rat a1(p.a1), a2(p.a2);
    for (const Place& v : relevant_places(a1, a2)) {
        int s = hilbert_symbol(a1, a1, v) * hilbert_symbol(a1, a2, v) *
                hilbert_symbol(a2, a2, v);
        if (s == -1)
            return false;
    }
    return true;
}

namespace {

// 0 <= x <= y <= z with x^2+y^2+z^2 = n, entries capped.
std::vector<std::array<long, 3>> three_square_reps(long n, long cap)
{
    std::vector<std::array<long, 3>> reps;
    for (long x = 0; 3 * x * x <= n && x <= cap; ++x)
        for (long y = x; x * x + 2 * y * y <= n && y <= cap; ++y) {
            long rem = n - x * x - y * y;
            long z = std::lround(std::sqrt(static_cast<double>(rem)));
            while (z * z > rem)
                --z;
            while ((z + 1) * (z + 1) <= rem)
                ++z;
            if (z * z == rem && z >= y && z <= cap)
                reps.push_back({x, y, z});
        }
    return reps;
}

}  // namespace

std::optional<Q8Witness> q8_witness_search(const BiquadParams& p, long bound)
{
    if (p.a1 < 0 || p.a2 < 0)
        return std::nullopt;
    if (!p.a1.fits_slong_p() || !p.a2.fits_slong_p())
        return std::nullopt;
    long a1 = p.a1.get_si(), a2 = p.a2.get_si();
    constexpr long denominator_limit = 8;
    constexpr int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (long de = 1; de <= denominator_limit; ++de) {
        auto e_reps = three_square_reps(a1 * de * de, bound);
        if (e_reps.empty())
            continue;
        for (long df = 1; df <= denominator_limit; ++df) {
            auto f_reps = three_square_reps(a2 * df * df, bound);
            for (const auto& e : e_reps)
                for (const auto& f : f_reps)
                    for (const auto& pi : perm)
                        for (int signs = 0; signs < 8; ++signs) {
                            long dot = 0;
                            for (int t = 0; t < 3; ++t) {
                                long ft = f[pi[t]] * ((signs >> t) & 1 ? -1 : 1);
                                dot += e[t] * ft;
                            }
                            if (dot != 0)
                                continue;
                            Q8Witness w;
                            Rat se2(0), sf2(0), sef(0);
                            for (int t = 0; t < 3; ++t) {
                                w.e[t] = rational(e[t], de);
                                long ft = f[pi[t]] * ((signs >> t) & 1 ? -1 : 1);
                                w.f[t] = rational(ft, df);
                                se2 += w.e[t] * w.e[t];
                                sf2 += w.f[t] * w.f[t];
                                sef += w.e[t] * w.f[t];
                            }
                            if (se2 == Rat(p.a1) && sf2 == Rat(p.a2) && sef == 0)
                                return w;
                        }
        }
    }
    return std::nullopt;
}

EmbeddingReport embedding_report(const BiquadParams& p)
{
    const std::array<Int, 3> a = {p.a1, p.a2, p.a3};
    EmbeddingReport r;
    for (int i = 0; i < 3; ++i)
        r.z4z2[i] = is_sum_of_two_squares(Rat(a[i]));
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        bool via_j = norm_form_solvable(Rat(a[j]), Rat(a[i]));
        bool via_k = norm_form_solvable(Rat(a[k]), Rat(a[i]));
        if (via_j != via_k)
            throw InternalInconsistency(
                "the two presentations of the D4 type " + std::to_string(i + 1) +
                " criterion disagree (symbol bug)");
        r.d4[i] = via_j;
    }
    r.q8 = q8_embeddable(p);
    return r;
}

F2Vector t_vector_d4(int type)
{
    F2Vector v(3);
    v.set(type - 1, true);
    return v;
}

F2Vector t_vector_z4z2(int type)
{
    F2Vector v(3);
    for (int i = 0; i < 3; ++i)
        if (i != type - 1)
            v.set(i, true);
    return v;
}

F2Vector t_vector_q8()
{
    return F2Vector({1, 1, 1});
}

Subspace im_T(const EmbeddingReport& report)
{
    std::vector<F2Vector> achieved;
    for (int i = 1; i <= 3; ++i) {
        if (report.d4[i - 1])
            achieved.push_back(t_vector_d4(i));
        if (report.z4z2[i - 1])
            achieved.push_back(t_vector_z4z2(i));
    }
    if (report.q8)
        achieved.push_back(t_vector_q8());
    Subspace span = f2la::canonicalize(achieved, 3);
    // Achieved vectors plus zero must exhaust the subspace.
    std::set<std::string> got;
    for (const auto& v : achieved)
        got.insert(v.to_string());
    if (got.size() + 1 != (std::size_t(1) << span.dim()))
        throw InconsistentImage("achieved norm-residue vectors do not form a subspace");
    for (const auto& v : achieved)
        if (!span.contains(v))
            throw InconsistentImage("achieved vector escapes its own span (internal bug)");
    return span;
}

XClassification classify_X(const BiquadParams& p)
{
    XClassification x;
    x.report = embedding_report(p);
    x.im_t = im_T(x.report);
    x.shape = decomp::x_shape(x.im_t, std::nullopt);
    return x;
}

KElement k_element(const BiquadParams& p, Rat c0, Rat c1, Rat c2, Rat c3)
{
    return KElement{p, {std::move(c0), std::move(c1), std::move(c2), std::move(c3)}};
}

KElement galois_act(Sigma s, const KElement& k)
{
    KElement r = k;
    switch (s) {
        case Sigma::S1:
            r.coords[1] = -r.coords[1];
            r.coords[3] = -r.coords[3];
            break;
        case Sigma::S2:
            r.coords[2] = -r.coords[2];
            r.coords[3] = -r.coords[3];
            break;
        case Sigma::S1S2:
            r.coords[1] = -r.coords[1];
            r.coords[2] = -r.coords[2];
            break;
    }
    return r;
}

KElement mult(const KElement& a, const KElement& b)
{
    if (!(a.params == b.params))
        throw ParamsMismatch("mult: elements of different extensions");
    const Rat a1 = Rat(a.params.a1), a2 = Rat(a.params.a2);
    const Rat a12 = a1 * a2;
    const auto& x = a.coords;
    const auto& y = b.coords;
    KElement r = a;
    r.coords[0] = x[0] * y[0] + a1 * x[1] * y[1] + a2 * x[2] * y[2] + a12 * x[3] * y[3];
    r.coords[1] = x[0] * y[1] + x[1] * y[0] + a2 * (x[2] * y[3] + x[3] * y[2]);
    r.coords[2] = x[0] * y[2] + x[2] * y[0] + a1 * (x[1] * y[3] + x[3] * y[1]);
    r.coords[3] = x[0] * y[3] + x[3] * y[0] + x[1] * y[2] + x[2] * y[1];
    return r;
}

KElement norm(const KElement& k, Subfield to)
{
    auto check_zero = [&](const KElement& r, std::initializer_list<int> slots) {
        for (int s : slots)
            if (r.coords[s] != 0)
                throw Error("norm: image escapes the target subfield (internal bug)");
        return r;
    };
    switch (to) {
        case Subfield::K1: return check_zero(mult(k, galois_act(Sigma::S2, k)), {2, 3});
        case Subfield::K2: return check_zero(mult(k, galois_act(Sigma::S1, k)), {1, 3});
        case Subfield::K3: return check_zero(mult(k, galois_act(Sigma::S1S2, k)), {1, 2});
        case Subfield::F: {
            KElement n1 = norm(k, Subfield::K1);
            return check_zero(mult(n1, galois_act(Sigma::S1, n1)), {1, 2, 3});
        }
    }
    throw Error("norm: unknown subfield");
}

NormSplit factor_k3_norm(const KElement& k)
{
    const auto& f = k.coords;
    if (f[0] * f[3] != f[1] * f[2])
        throw PreconditionFailed("factor_k3_norm: the K3-norm does not lie in the base field");
    const Rat a1 = Rat(k.params.a1), a2 = Rat(k.params.a2);
    Rat g = f[0] * f[0] - a1 * f[1] * f[1] - a2 * f[2] * f[2] + a1 * a2 * f[3] * f[3];
    if (g == 0)
        throw DegenerateNorm("factor_k3_norm: zero norm");
    NormSplit s;
    s.value = g;
    if (f[0] == 0 && f[1] == 0) {
        s.h1 = f[2];
        s.h2 = f[3];
        s.h3 = 0;
        s.h4 = 1;
    } else if (f[0] == 0 && f[2] == 0) {
        s.h1 = 0;
        s.h2 = 1;
        s.h3 = f[1];
        s.h4 = f[3];
    } else {
        // f0 != 0 here: f0 = 0 with f1, f2 both nonzero contradicts the
        // precondition f0*f3 = f1*f2.
        s.h1 = f[0];
        s.h2 = f[1];
        s.h3 = 1;
        s.h4 = f[2] / f[0];
    }
    Rat check = (s.h1 * s.h1 - a1 * s.h2 * s.h2) * (s.h3 * s.h3 - a2 * s.h4 * s.h4);
    if (check != g)
        throw Error("factor_k3_norm: factorization check failed (internal bug)");
    return s;
}

}  // namespace biquad::arith
