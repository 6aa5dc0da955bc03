#pragma once

// Dense exact linear algebra over the two-element field.
//
// Vectors and matrices are bit-packed into 64-bit words; subspaces are kept
// in canonical reduced-echelon basis form, so equality of subspaces is
// equality of representations.  Everything is immutable after construction
// and all operations are pure.

#include <cstdint>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace biquad {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace f2la {

struct DimensionMismatch : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct NotASubspace : Error {
    using Error::Error;
};

class F2Vector {
public:
    F2Vector() = default;
    explicit F2Vector(std::size_t len) : len_(len), w_((len + 63) / 64, 0) {}
    // From a 0/1 initializer, e.g. F2Vector({1,0,1}).
    F2Vector(std::initializer_list<int> bits);
    static F2Vector from_bits(const std::vector<int>& bits);
    static F2Vector unit(std::size_t len, std::size_t i);

    std::size_t len() const { return len_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v)
    {
        if (v)
            w_[i >> 6] |= std::uint64_t(1) << (i & 63);
        else
            w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    bool is_zero() const;
    // Index of the first set bit; len() if zero.
    std::size_t pivot() const;
    std::size_t weight() const;

    F2Vector& operator^=(const F2Vector& o);
    friend F2Vector operator^(F2Vector a, const F2Vector& b) { return a ^= b; }
    // Addition over F2 is exclusive-or.
    friend F2Vector operator+(F2Vector a, const F2Vector& b) { return a ^= b; }
    bool operator==(const F2Vector& o) const = default;

    std::string to_string() const;  // e.g. "1011"
    static F2Vector parse(const std::string& bits);

    const std::vector<std::uint64_t>& words() const { return w_; }

private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> w_;
    friend bool dot(const F2Vector&, const F2Vector&);
};

// Parity of the bitwise AND.
bool dot(const F2Vector& a, const F2Vector& b);

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), rows_v_(rows, F2Vector(cols))
    {
    }
    static F2Matrix identity(std::size_t n);
    static F2Matrix zero(std::size_t rows, std::size_t cols) { return F2Matrix(rows, cols); }
    static F2Matrix from_rows(const std::vector<F2Vector>& rows, std::size_t cols);
    static F2Matrix from_cols(const std::vector<F2Vector>& cols, std::size_t rows);
    // Row-major 0/1 initializer for tests: F2Matrix::of(2,2,{1,1,0,0}).
    static F2Matrix of(std::size_t rows, std::size_t cols, std::initializer_list<int> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t i, std::size_t j) const { return rows_v_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v) { rows_v_[i].set(j, v); }
    const F2Vector& row(std::size_t i) const { return rows_v_[i]; }
    F2Vector& row(std::size_t i) { return rows_v_[i]; }
    F2Vector col(std::size_t j) const;

    bool operator==(const F2Matrix& o) const = default;

    F2Matrix& operator^=(const F2Matrix& o);
    friend F2Matrix operator+(F2Matrix a, const F2Matrix& b) { return a ^= b; }
    friend F2Matrix operator*(const F2Matrix& a, const F2Matrix& b);
    friend F2Vector operator*(const F2Matrix& a, const F2Vector& x);

    F2Matrix transposed() const;
    std::string to_string() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<F2Vector> rows_v_;
};

// Stack matrices with equal column counts on top of each other.
F2Matrix vstack(const std::vector<F2Matrix>& parts);

std::size_t rank(const F2Matrix& a);
std::optional<F2Matrix> inverse(const F2Matrix& a);

// A subspace of F2^n held as a reduced-echelon basis with strictly
// increasing pivot columns.  The representation is unique per subspace.
class Subspace {
public:
    Subspace() = default;
    static Subspace zero(std::size_t ambient) { return Subspace(ambient, {}); }
    static Subspace full(std::size_t ambient);

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return basis_.size(); }
    const std::vector<F2Vector>& basis() const { return basis_; }

    bool contains(const F2Vector& v) const;
    // Residue of v after reduction against the basis; zero iff contained.
    F2Vector reduce(F2Vector v) const;
    bool operator==(const Subspace& o) const = default;

private:
    Subspace(std::size_t ambient, std::vector<F2Vector> canonical_basis)
        : ambient_(ambient), basis_(std::move(canonical_basis))
    {
    }
    std::size_t ambient_ = 0;
    std::vector<F2Vector> basis_;
    friend Subspace canonicalize(const std::vector<F2Vector>&, std::size_t);
};

// Span of the given vectors in canonical reduced-echelon form.
Subspace canonicalize(const std::vector<F2Vector>& vectors, std::size_t ambient_dim);

// Some x with A*x = b, verified by multiplication; absent when inconsistent.
std::optional<F2Vector> solve(const F2Matrix& a, const F2Vector& b);

Subspace kernel(const F2Matrix& a);
Subspace image(const F2Matrix& a);

bool is_subspace_of(const Subspace& u, const Subspace& v);
Subspace add(const Subspace& u, const Subspace& v);
Subspace intersect(const Subspace& u, const Subspace& v);
// {c : dot(c, u) = 0 for all u in U}.
Subspace annihilator(const Subspace& u);
// Deterministic complement of U inside V (pivot-greedy, lowest echelon
// pivots first).  Requires U to be a subspace of V.
Subspace complement(const Subspace& u, const Subspace& v);
// {x : A*x in W}.
Subspace preimage(const F2Matrix& a, const Subspace& w);
// Span of {A*u : u in U}.
Subspace apply(const F2Matrix& a, const Subspace& u);

// Coordinates of v in the given spanning set (columns), if expressible.
std::optional<F2Vector> coordinates(const std::vector<F2Vector>& spanning,
                                    const F2Vector& v);

}  // namespace f2la
}  // namespace biquad
