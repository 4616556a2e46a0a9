#include "mwlab/zmodule.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace mwlab {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw InputError("IntMatrix: ragged initializer");
        for (long v : r) data_.emplace_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw InputError("IntMatrix::from_rows: row length mismatch");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntVector IntMatrix::row(std::size_t r) const {
    return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                     data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

IntVector IntMatrix::col(std::size_t c) const {
    IntVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, c);
    return out;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Integer IntMatrix::trace() const {
    Integer t = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

void IntMatrix::negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw InputError("IntMatrix product: dimension mismatch");
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Integer& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

IntVector operator*(const IntMatrix& a, const IntVector& x) {
    if (a.cols_ != x.size()) throw InputError("IntMatrix-vector product: dimension mismatch");
    IntVector out(a.rows_, Integer(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * x[j];
    return out;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << ", ";
        os << mwlab::to_string(row(i));
    }
    os << ']';
    return os.str();
}

std::string to_string(const IntVector& v) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i].get_str();
    }
    os << ']';
    return os.str();
}

std::size_t SnfDecomposition::rank() const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i)
        if (D(i, i) != 0) ++r;
    return r;
}

IntVector SnfDecomposition::diagonal() const {
    IntVector d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
}

Integer mod_floor(const Integer& x, const Integer& m) {
    if (m == 0) return x;
    Integer r;
    Integer am = abs(m);
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), am.get_mpz_t());
    return r;
}

Integer lcm(const Integer& a, const Integer& b) {
    Integer out;
    mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

std::vector<Integer> sorted_divisors(const Integer& n) {
    if (n <= 0) throw InputError("sorted_divisors: n must be positive");
    std::vector<Integer> small, large;
    for (Integer d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            small.push_back(d);
            if (d * d != n) large.push_back(n / d);
        }
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

namespace {

BezoutResult ext_gcd2(const Integer& a, const Integer& b) {
    BezoutResult r;
    Integer s, t;
    mpz_gcdext(r.g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (r.g == 0) {
        s = 0;
        t = 0;
    }
    r.coeffs = {s, t};
    return r;
}

}  // namespace

BezoutResult ext_gcd(const IntVector& values) {
    if (values.empty()) throw InputError("ext_gcd: empty list");
    BezoutResult out;
    out.g = abs(values[0]);
    out.coeffs.push_back(values[0] < 0 ? Integer(-1) : Integer(values[0] == 0 ? 0 : 1));
    for (std::size_t i = 1; i < values.size(); ++i) {
        BezoutResult step = ext_gcd2(out.g, values[i]);
        for (auto& c : out.coeffs) c *= step.coeffs[0];
        out.coeffs.push_back(step.coeffs[1]);
        out.g = step.g;
    }
    return out;
}

SnfDecomposition smith_normal_form(const IntMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    SnfDecomposition s{IntMatrix::identity(m), a, IntMatrix::identity(n)};
    IntMatrix& D = s.D;
    IntMatrix& U = s.U;
    IntMatrix& V = s.V;

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            // Smallest nonzero |entry| in the trailing block, first in row-major order.
            std::size_t pi = m, pj = n;
            Integer best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    if (D(i, j) == 0) continue;
                    if (pi == m || abs(D(i, j)) < best) {
                        best = abs(D(i, j));
                        pi = i;
                        pj = j;
                    }
                }
            if (pi == m) return s;

            D.swap_rows(t, pi);
            U.swap_rows(t, pi);
            D.swap_cols(t, pj);
            V.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                Integer q = D(i, t) / D(t, t);
                D.add_row_multiple(i, t, -q);
                U.add_row_multiple(i, t, -q);
                if (D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                Integer q = D(t, j) / D(t, t);
                D.add_col_multiple(j, t, -q);
                V.add_col_multiple(j, t, -q);
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            std::size_t bad_row = m;
            for (std::size_t i = t + 1; i < m && bad_row == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (D(i, j) % D(t, t) != 0) {
                        bad_row = i;
                        break;
                    }
            if (bad_row != m) {
                D.add_row_multiple(t, bad_row, 1);
                U.add_row_multiple(t, bad_row, 1);
                continue;
            }
            break;
        }
        if (D(t, t) < 0) {
            D.negate_row(t);
            U.negate_row(t);
        }
    }
    return s;
}

IntMatrix hermite_normal_form(const std::vector<IntVector>& generators, std::size_t cols) {
    IntMatrix h = IntMatrix::from_rows(generators, cols);
    const std::size_t m = h.rows();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m; ++c) {
        for (;;) {
            std::size_t best = m;
            for (std::size_t i = r; i < m; ++i)
                if (h(i, c) != 0 && (best == m || abs(h(i, c)) < abs(h(best, c)))) best = i;
            if (best == m) break;
            h.swap_rows(r, best);
            bool done = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (h(i, c) == 0) continue;
                Integer q = h(i, c) / h(r, c);
                h.add_row_multiple(i, r, -q);
                if (h(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (h(r, c) == 0) continue;
        if (h(r, c) < 0) h.negate_row(r);
        for (std::size_t i = 0; i < r; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
            h.add_row_multiple(i, r, -q);
        }
        ++r;
    }
    IntMatrix out(r, cols);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = h(i, j);
    return out;
}

Integer determinant(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw InputError("determinant: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    IntMatrix m = a;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            m.swap_rows(k, swap);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

std::size_t rank(const IntMatrix& a) {
    std::vector<IntVector> rows;
    for (std::size_t i = 0; i < a.rows(); ++i) rows.push_back(a.row(i));
    return hermite_normal_form(rows, a.cols()).rows();
}

namespace {

void check_system(const IntMatrix& a, const IntVector& b, const IntVector& moduli) {
    if (b.size() != a.rows())
        throw InputError("solve_mod: right-hand side has " + std::to_string(b.size()) + " entries, matrix has " +
                         std::to_string(a.rows()) + " rows");
    if (moduli.size() != a.rows())
        throw InputError("solve_mod: " + std::to_string(moduli.size()) + " moduli for " + std::to_string(a.rows()) +
                         " rows");
    for (const auto& q : moduli)
        if (q < 0) throw InputError("solve_mod: negative modulus " + q.get_str());
}

// [A | diag(nonzero moduli)]
IntMatrix augmented(const IntMatrix& a, const IntVector& moduli) {
    std::size_t extra = 0;
    for (const auto& q : moduli)
        if (q != 0) ++extra;
    IntMatrix out(a.rows(), a.cols() + extra);
    std::size_t slot = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        if (moduli[i] != 0) out(i, slot++) = moduli[i];
    }
    return out;
}

std::vector<IntVector> kernel_from_snf(const SnfDecomposition& s, std::size_t unknowns) {
    std::vector<IntVector> gens;
    for (std::size_t j = s.rank(); j < s.V.cols(); ++j) {
        IntVector g(unknowns);
        bool nonzero = false;
        for (std::size_t i = 0; i < unknowns; ++i) {
            g[i] = s.V(i, j);
            if (g[i] != 0) nonzero = true;
        }
        if (nonzero) gens.push_back(std::move(g));
    }
    return gens;
}

void canonicalize(IntVector& x, const std::vector<IntVector>& kernel) {
    const std::size_t k = x.size();
    if (kernel.empty() || k == 0) return;
    std::vector<IntVector> reversed;
    reversed.reserve(kernel.size());
    for (const auto& g : kernel) reversed.emplace_back(g.rbegin(), g.rend());
    IntMatrix h = hermite_normal_form(reversed, k);
    IntVector xr(x.rbegin(), x.rend());
    std::size_t c = 0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        while (h(r, c) == 0) ++c;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), xr[c].get_mpz_t(), h(r, c).get_mpz_t());
        if (q != 0)
            for (std::size_t j = c; j < k; ++j) xr[j] -= q * h(r, j);
    }
    x.assign(xr.rbegin(), xr.rend());
}

}  // namespace

std::vector<IntVector> kernel_mod(const IntMatrix& a, const IntVector& moduli) {
    check_system(a, IntVector(a.rows()), moduli);
    if (a.cols() == 0) return {};
    if (a.rows() == 0) {
        std::vector<IntVector> gens;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            IntVector g(a.cols(), Integer(0));
            g[j] = 1;
            gens.push_back(std::move(g));
        }
        return gens;
    }
    return kernel_from_snf(smith_normal_form(augmented(a, moduli)), a.cols());
}

std::optional<IntVector> solve_mod(const IntMatrix& a, const IntVector& b, const IntVector& moduli) {
    check_system(a, b, moduli);
    const std::size_t k = a.cols();
    if (a.rows() == 0) return IntVector(k, Integer(0));
    if (k == 0) {
        for (std::size_t i = 0; i < b.size(); ++i)
            if (mod_floor(b[i], moduli[i]) != 0) return std::nullopt;
        return IntVector{};
    }

    const SnfDecomposition s = smith_normal_form(augmented(a, moduli));
    const IntVector ub = s.U * b;
    const std::size_t r = s.rank();
    IntVector w(s.V.cols(), Integer(0));
    for (std::size_t i = 0; i < ub.size(); ++i) {
        if (i < r) {
            if (ub[i] % s.D(i, i) != 0) return std::nullopt;
            w[i] = ub[i] / s.D(i, i);
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    IntVector z = s.V * w;
    IntVector x(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(k));
    canonicalize(x, kernel_from_snf(s, k));
    return x;
}

}  // namespace mwlab
