#pragma once

// Exact integer linear algebra: Bezout vectors, Smith and Hermite normal
// forms, and congruence solving over Z and Z/n.

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwlab {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntVector row(std::size_t r) const;
    IntVector col(std::size_t c) const;
    IntMatrix transpose() const;
    Integer trace() const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    // row[dst] += k * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const Integer& k);
    void add_col_multiple(std::size_t dst, std::size_t src, const Integer& k);
    void negate_row(std::size_t r);
    void negate_col(std::size_t c);

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend IntVector operator*(const IntMatrix& a, const IntVector& x);
    friend bool operator==(const IntMatrix& a, const IntMatrix& b);

    std::string to_string() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

struct SnfDecomposition {
    IntMatrix U;
    IntMatrix D;
    IntMatrix V;

    // Number of nonzero diagonal entries of D.
    std::size_t rank() const;
    IntVector diagonal() const;
};

struct BezoutResult {
    Integer g;
    IntVector coeffs;
};

// gcd of all values with coefficients such that sum coeffs[i]*values[i] == g.
// Folds left over the list; coefficients are not size-reduced.
BezoutResult ext_gcd(const IntVector& values);

SnfDecomposition smith_normal_form(const IntMatrix& a);

// Row-style Hermite normal form of the lattice spanned by `generators`
// (each of length `cols`). Zero rows dropped, pivots positive, entries above a
// pivot reduced into [0, pivot).
IntMatrix hermite_normal_form(const std::vector<IntVector>& generators, std::size_t cols);

// Determinant by fraction-free elimination; square matrices only.
Integer determinant(const IntMatrix& a);
std::size_t rank(const IntMatrix& a);

// Solves A x == b with row i taken modulo moduli[i] (0 means over Z).
// The result is the canonical representative of the solution coset: every
// coordinate the homogeneous solutions can move is reduced into [0, pivot),
// scanning from the last unknown to the first.
std::optional<IntVector> solve_mod(const IntMatrix& a, const IntVector& b, const IntVector& moduli);

// Generators of {x : A x == 0 componentwise mod moduli}.
std::vector<IntVector> kernel_mod(const IntMatrix& a, const IntVector& moduli);

// Floor-style remainder in [0, |m|) for m != 0; identity for m == 0.
Integer mod_floor(const Integer& x, const Integer& m);
Integer lcm(const Integer& a, const Integer& b);
std::vector<Integer> sorted_divisors(const Integer& n);

std::string to_string(const IntVector& v);

}  // namespace mwlab
