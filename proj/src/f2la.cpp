#include "biquad/f2la.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace biquad::f2la {

F2Vector::F2Vector(std::initializer_list<int> bits) : F2Vector(bits.size())
{
    std::size_t i = 0;
    for (int b : bits)
        set(i++, b != 0);
}

F2Vector F2Vector::from_bits(const std::vector<int>& bits)
{
    F2Vector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        v.set(i, bits[i] != 0);
    return v;
}

F2Vector F2Vector::unit(std::size_t len, std::size_t i)
{
    F2Vector v(len);
    v.set(i, true);
    return v;
}

bool F2Vector::is_zero() const
{
    for (auto w : w_)
        if (w)
            return false;
    return true;
}

std::size_t F2Vector::pivot() const
{
    for (std::size_t k = 0; k < w_.size(); ++k)
        if (w_[k])
            return k * 64 + std::countr_zero(w_[k]);
    return len_;
}

std::size_t F2Vector::weight() const
{
    std::size_t n = 0;
    for (auto w : w_)
        n += std::popcount(w);
    return n;
}

F2Vector& F2Vector::operator^=(const F2Vector& o)
{
    if (len_ != o.len_)
        throw LengthMismatch("vector lengths differ: " + std::to_string(len_) + " vs " +
                             std::to_string(o.len_));
    for (std::size_t k = 0; k < w_.size(); ++k)
        w_[k] ^= o.w_[k];
    return *this;
}

std::string F2Vector::to_string() const
{
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i))
            s[i] = '1';
    return s;
}

F2Vector F2Vector::parse(const std::string& bits)
{
    F2Vector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            v.set(i, true);
        else if (bits[i] != '0')
            throw LengthMismatch("bad bit character '" + std::string(1, bits[i]) + "'");
    }
    return v;
}

bool dot(const F2Vector& a, const F2Vector& b)
{
    if (a.len() != b.len())
        throw LengthMismatch("dot: lengths differ");
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < a.w_.size(); ++k)
        acc ^= a.w_[k] & b.w_[k];
    return std::popcount(acc) & 1;
}

F2Matrix F2Matrix::identity(std::size_t n)
{
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

F2Matrix F2Matrix::from_rows(const std::vector<F2Vector>& rows, std::size_t cols)
{
    F2Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].len() != cols)
            throw LengthMismatch("from_rows: row length != cols");
        m.rows_v_[i] = rows[i];
    }
    return m;
}

F2Matrix F2Matrix::from_cols(const std::vector<F2Vector>& cols, std::size_t rows)
{
    F2Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].len() != rows)
            throw LengthMismatch("from_cols: column length != rows");
        for (std::size_t i = 0; i < rows; ++i)
            m.set(i, j, cols[j].get(i));
    }
    return m;
}

F2Matrix F2Matrix::of(std::size_t rows, std::size_t cols, std::initializer_list<int> entries)
{
    if (entries.size() != rows * cols)
        throw DimensionMismatch("of: wrong number of entries");
    F2Matrix m(rows, cols);
    std::size_t i = 0;
    for (int e : entries) {
        m.set(i / cols, i % cols, e != 0);
        ++i;
    }
    return m;
}

F2Vector F2Matrix::col(std::size_t j) const
{
    F2Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v.set(i, get(i, j));
    return v;
}

F2Matrix& F2Matrix::operator^=(const F2Matrix& o)
{
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionMismatch("matrix shapes differ");
    for (std::size_t i = 0; i < rows_; ++i)
        rows_v_[i] ^= o.rows_v_[i];
    return *this;
}

F2Matrix operator*(const F2Matrix& a, const F2Matrix& b)
{
    if (a.cols_ != b.rows_)
        throw DimensionMismatch("matrix product: inner dimensions differ");
    F2Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k)
            if (a.get(i, k))
                c.rows_v_[i] ^= b.rows_v_[k];
    return c;
}

F2Vector operator*(const F2Matrix& a, const F2Vector& x)
{
    if (a.cols_ != x.len())
        throw DimensionMismatch("matrix-vector product: dimensions differ");
    F2Vector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        y.set(i, dot(a.rows_v_[i], x));
    return y;
}

F2Matrix F2Matrix::transposed() const
{
    F2Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j))
                t.set(j, i, true);
    return t;
}

std::string F2Matrix::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i)
        os << rows_v_[i].to_string() << "\n";
    return os.str();
}

F2Matrix vstack(const std::vector<F2Matrix>& parts)
{
    if (parts.empty())
        return F2Matrix();
    std::size_t cols = parts.front().cols();
    std::vector<F2Vector> rows;
    for (const auto& p : parts) {
        if (p.cols() != cols)
            throw DimensionMismatch("vstack: column counts differ");
        for (std::size_t i = 0; i < p.rows(); ++i)
            rows.push_back(p.row(i));
    }
    return F2Matrix::from_rows(rows, cols);
}

namespace {

// In-place reduced row echelon form.  Returns the pivot column of each
// surviving (nonzero) row, strictly increasing.
std::vector<std::size_t> rref(std::vector<F2Vector>& rows)
{
    std::vector<std::size_t> pivots;
    if (rows.empty())
        return pivots;
    std::size_t n = rows.front().len();
    std::size_t done = 0;
    for (std::size_t col = 0; col < n && done < rows.size(); ++col) {
        std::size_t r = done;
        while (r < rows.size() && !rows[r].get(col))
            ++r;
        if (r == rows.size())
            continue;
        std::swap(rows[done], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != done && rows[i].get(col))
                rows[i] ^= rows[done];
        pivots.push_back(col);
        ++done;
    }
    rows.resize(done);
    return pivots;
}

}  // namespace

Subspace Subspace::full(std::size_t ambient)
{
    std::vector<F2Vector> b;
    for (std::size_t i = 0; i < ambient; ++i)
        b.push_back(F2Vector::unit(ambient, i));
    return Subspace(ambient, std::move(b));
}

F2Vector Subspace::reduce(F2Vector v) const
{
    if (v.len() != ambient_)
        throw DimensionMismatch("reduce: vector not in ambient space");
    for (const auto& b : basis_) {
        std::size_t p = b.pivot();
        if (v.get(p))
            v ^= b;
    }
    return v;
}

bool Subspace::contains(const F2Vector& v) const
{
    return reduce(v).is_zero();
}

Subspace canonicalize(const std::vector<F2Vector>& vectors, std::size_t ambient_dim)
{
    std::vector<F2Vector> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.len() != ambient_dim)
            throw LengthMismatch("canonicalize: vector length != ambient dim");
        rows.push_back(v);
    }
    rref(rows);
    return Subspace(ambient_dim, std::move(rows));
}

std::optional<F2Vector> solve(const F2Matrix& a, const F2Vector& b)
{
    if (a.rows() != b.len())
        throw DimensionMismatch("solve: A.rows != b.len");
    std::size_t n = a.cols();
    // Augmented rows [A | b].
    std::vector<F2Vector> rows(a.rows(), F2Vector(n + 1));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j)
            rows[i].set(j, a.get(i, j));
        rows[i].set(n, b.get(i));
    }
    auto pivots = rref(rows);
    F2Vector x(n);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == n)
            return std::nullopt;  // pivot in the constant column
        x.set(pivots[i], rows[i].get(n));
    }
    if (!(a * x == b))
        throw Error("solve: verification failed (internal bug)");
    return x;
}

Subspace kernel(const F2Matrix& a)
{
    std::size_t n = a.cols();
    std::vector<F2Vector> rows;
    for (std::size_t i = 0; i < a.rows(); ++i)
        rows.push_back(a.row(i));
    auto pivots = rref(rows);
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots)
        is_pivot[p] = true;
    std::vector<F2Vector> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f])
            continue;
        F2Vector x(n);
        x.set(f, true);
        for (std::size_t i = 0; i < pivots.size(); ++i)
            x.set(pivots[i], rows[i].get(f));
        basis.push_back(std::move(x));
    }
    return canonicalize(basis, n);
}

Subspace image(const F2Matrix& a)
{
    std::vector<F2Vector> cols;
    for (std::size_t j = 0; j < a.cols(); ++j)
        cols.push_back(a.col(j));
    return canonicalize(cols, a.rows());
}

std::size_t rank(const F2Matrix& a)
{
    return image(a).dim();
}

std::optional<F2Matrix> inverse(const F2Matrix& a)
{
    if (a.rows() != a.cols())
        return std::nullopt;
    std::size_t n = a.rows();
    if (n == 0)
        return F2Matrix();
    // Augmented rows [A | I].
    std::vector<F2Vector> rows(n, F2Vector(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            rows[i].set(j, a.get(i, j));
        rows[i].set(n + i, true);
    }
    auto pivots = rref(rows);
    if (pivots.size() != n || pivots.back() != n - 1)
        return std::nullopt;
    F2Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv.set(i, j, rows[i].get(n + j));
    return inv;
}

bool is_subspace_of(const Subspace& u, const Subspace& v)
{
    if (u.ambient() != v.ambient())
        throw DimensionMismatch("is_subspace_of: ambient dims differ");
    for (const auto& b : u.basis())
        if (!v.contains(b))
            return false;
    return true;
}

Subspace add(const Subspace& u, const Subspace& v)
{
    if (u.ambient() != v.ambient())
        throw DimensionMismatch("add: ambient dims differ");
    std::vector<F2Vector> all = u.basis();
    all.insert(all.end(), v.basis().begin(), v.basis().end());
    return canonicalize(all, u.ambient());
}

Subspace annihilator(const Subspace& u)
{
    return kernel(F2Matrix::from_rows(u.basis(), u.ambient()));
}

Subspace intersect(const Subspace& u, const Subspace& v)
{
    if (u.ambient() != v.ambient())
        throw DimensionMismatch("intersect: ambient dims differ");
    return annihilator(add(annihilator(u), annihilator(v)));
}

Subspace complement(const Subspace& u, const Subspace& v)
{
    if (u.ambient() != v.ambient())
        throw DimensionMismatch("complement: ambient dims differ");
    if (!is_subspace_of(u, v))
        throw NotASubspace("complement: U is not contained in V");
    // Greedy completion over V's canonical basis, in echelon order.
    std::vector<F2Vector> current = u.basis();
    std::vector<F2Vector> chosen;
    Subspace span = canonicalize(current, u.ambient());
    for (const auto& b : v.basis()) {
        if (span.contains(b))
            continue;
        chosen.push_back(b);
        current.push_back(b);
        span = canonicalize(current, u.ambient());
    }
    return canonicalize(chosen, u.ambient());
}

Subspace preimage(const F2Matrix& a, const Subspace& w)
{
    if (a.rows() != w.ambient())
        throw DimensionMismatch("preimage: A.rows != ambient of W");
    Subspace ann = annihilator(w);
    F2Matrix c = F2Matrix::from_rows(ann.basis(), w.ambient());
    return kernel(c * a);
}

Subspace apply(const F2Matrix& a, const Subspace& u)
{
    if (a.cols() != u.ambient())
        throw DimensionMismatch("apply: A.cols != ambient of U");
    std::vector<F2Vector> img;
    for (const auto& b : u.basis())
        img.push_back(a * b);
    return canonicalize(img, a.rows());
}

std::optional<F2Vector> coordinates(const std::vector<F2Vector>& spanning, const F2Vector& v)
{
    return solve(F2Matrix::from_cols(spanning, v.len()), v);
}

}  // namespace biquad::f2la
