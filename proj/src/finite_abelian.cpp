#include "mwlab/finite_abelian.hpp"

#include <sstream>

namespace mwlab {

FiniteAbelianGroup::FiniteAbelianGroup(IntVector invariant_factors) : invariants_(std::move(invariant_factors)) {
    for (std::size_t i = 0; i < invariants_.size(); ++i) {
        if (invariants_[i] < 2)
            throw InputError("FiniteAbelianGroup: invariant factor " + invariants_[i].get_str() + " is below 2");
        if (i > 0 && invariants_[i] % invariants_[i - 1] != 0)
            throw InputError("FiniteAbelianGroup: divisibility chain broken at " + to_string());
    }
}

FiniteAbelianGroup FiniteAbelianGroup::from_cyclic_orders(const IntVector& orders) {
    IntMatrix diag(orders.size(), orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 1) throw InputError("from_cyclic_orders: order must be positive");
        diag(i, i) = orders[i];
    }
    IntVector factors;
    for (const auto& d : smith_normal_form(diag).diagonal())
        if (d > 1) factors.push_back(d);
    return FiniteAbelianGroup(std::move(factors));
}

Integer FiniteAbelianGroup::order() const {
    Integer n = 1;
    for (const auto& d : invariants_) n *= d;
    return n;
}

Integer FiniteAbelianGroup::exponent() const { return invariants_.empty() ? Integer(1) : invariants_.back(); }

Element FiniteAbelianGroup::zero() const { return Element{IntVector(invariants_.size(), Integer(0))}; }

Element FiniteAbelianGroup::element(const IntVector& raw) const {
    if (raw.size() != invariants_.size())
        throw InputError("element: expected " + std::to_string(invariants_.size()) + " coordinates, got " +
                         std::to_string(raw.size()));
    Element x{raw};
    for (std::size_t i = 0; i < raw.size(); ++i) x.coords[i] = mod_floor(raw[i], invariants_[i]);
    return x;
}

Element FiniteAbelianGroup::element(std::initializer_list<long> raw) const {
    IntVector v;
    for (long r : raw) v.emplace_back(r);
    return element(v);
}

bool FiniteAbelianGroup::contains(const Element& x) const {
    if (x.coords.size() != invariants_.size()) return false;
    for (std::size_t i = 0; i < x.coords.size(); ++i)
        if (x.coords[i] < 0 || x.coords[i] >= invariants_[i]) return false;
    return true;
}

void FiniteAbelianGroup::validate(const Element& x) const {
    if (!contains(x)) throw InputError("element " + mwlab::to_string(x) + " is not a reduced element of " + to_string());
}

Element FiniteAbelianGroup::add(const Element& a, const Element& b) const {
    Element out{IntVector(invariants_.size())};
    for (std::size_t i = 0; i < invariants_.size(); ++i) {
        out.coords[i] = a.coords[i] + b.coords[i];
        if (out.coords[i] >= invariants_[i]) out.coords[i] -= invariants_[i];
    }
    return out;
}

Element FiniteAbelianGroup::neg(const Element& a) const {
    Element out{IntVector(invariants_.size())};
    for (std::size_t i = 0; i < invariants_.size(); ++i)
        out.coords[i] = a.coords[i] == 0 ? Integer(0) : Integer(invariants_[i] - a.coords[i]);
    return out;
}

Element FiniteAbelianGroup::sub(const Element& a, const Element& b) const { return add(a, neg(b)); }

Element FiniteAbelianGroup::scale(const Integer& k, const Element& a) const {
    Element out{IntVector(invariants_.size())};
    for (std::size_t i = 0; i < invariants_.size(); ++i) out.coords[i] = mod_floor(k * a.coords[i], invariants_[i]);
    return out;
}

Element FiniteAbelianGroup::combine(const IntVector& coeffs, const std::vector<Element>& xs) const {
    if (coeffs.size() != xs.size()) throw InputError("combine: coefficient count mismatch");
    IntVector acc(invariants_.size(), Integer(0));
    for (std::size_t j = 0; j < xs.size(); ++j)
        for (std::size_t i = 0; i < invariants_.size(); ++i) acc[i] += coeffs[j] * xs[j].coords[i];
    return element(acc);
}

bool FiniteAbelianGroup::is_zero(const Element& a) const {
    for (const auto& c : a.coords)
        if (c != 0) return false;
    return true;
}

std::vector<Element> FiniteAbelianGroup::enumerate() const {
    std::vector<Element> out;
    Element cur = zero();
    for (;;) {
        out.push_back(cur);
        std::size_t i = invariants_.size();
        while (i > 0) {
            --i;
            cur.coords[i] += 1;
            if (cur.coords[i] < invariants_[i]) break;
            cur.coords[i] = 0;
            if (i == 0) return out;
        }
        if (invariants_.empty()) return out;
    }
}

std::string FiniteAbelianGroup::to_string() const {
    if (invariants_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < invariants_.size(); ++i) {
        if (i) os << " x ";
        os << "Z/" << invariants_[i].get_str();
    }
    return os.str();
}

std::string to_string(const Element& x) { return to_string(x.coords); }

Integer element_order(const FiniteAbelianGroup& g, const Element& x) {
    g.validate(x);
    Integer n = 1;
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
        Integer gc;
        mpz_gcd(gc.get_mpz_t(), x.coords[i].get_mpz_t(), g.invariants()[i].get_mpz_t());
        n = lcm(n, g.invariants()[i] / gc);
    }
    return n;
}

std::optional<IntVector> subgroup_membership(const FiniteAbelianGroup& g, const Element& x,
                                             const std::vector<Element>& gens) {
    g.validate(x);
    for (const auto& y : gens) g.validate(y);
    IntMatrix a(g.rank(), gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t i = 0; i < g.rank(); ++i) a(i, j) = gens[j].coords[i];
    return solve_mod(a, x.coords, g.invariants());
}

MinimalMultiple minimal_multiple_in_subgroup(const FiniteAbelianGroup& g, const Element& x,
                                             const std::vector<Element>& gens) {
    const Integer ord = element_order(g, x);
    // alpha*x in H is closed under gcd with ord(x), so the least such alpha divides ord(x).
    for (const auto& alpha : sorted_divisors(ord)) {
        const Element target = g.neg(g.scale(alpha, x));
        if (auto c = subgroup_membership(g, target, gens)) return MinimalMultiple{alpha, std::move(*c)};
    }
    // alpha = ord(x) always succeeds with target 0.
    throw std::logic_error("minimal_multiple_in_subgroup: unreachable");
}

Integer subgroup_order(const FiniteAbelianGroup& g, const std::vector<Element>& gens) {
    // <gens> = image of Z^k; its order is |G| / |G / <gens>|, read off the SNF of [gens | diag(d)].
    const std::size_t r = g.rank();
    IntMatrix a(r, gens.size() + r);
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t i = 0; i < r; ++i) a(i, j) = gens[j].coords[i];
    for (std::size_t i = 0; i < r; ++i) a(i, gens.size() + i) = g.invariants()[i];
    Integer quotient = 1;
    for (const auto& d : smith_normal_form(a).diagonal()) quotient *= d;
    return g.order() / quotient;
}

QuotientProjection::QuotientProjection(const FiniteAbelianGroup& g, const std::vector<Element>& gens) {
    const std::size_t r = g.rank();
    IntMatrix a(r, gens.size() + r);
    for (std::size_t j = 0; j < gens.size(); ++j) {
        g.validate(gens[j]);
        for (std::size_t i = 0; i < r; ++i) a(i, j) = gens[j].coords[i];
    }
    for (std::size_t i = 0; i < r; ++i) a(i, gens.size() + i) = g.invariants()[i];
    // U A V = D with full row rank, so x lies in the column span iff (U x)_i == 0 mod D_ii.
    SnfDecomposition snf = smith_normal_form(a);
    u_ = std::move(snf.U);
    d_ = snf.diagonal();
}

bool QuotientProjection::contains(const Element& x) const {
    for (std::size_t i = 0; i < d_.size(); ++i) {
        if (d_[i] == 1) continue;
        Integer acc = 0;
        for (std::size_t k = 0; k < x.coords.size(); ++k) acc += u_(i, k) * x.coords[k];
        if (mpz_divisible_p(acc.get_mpz_t(), d_[i].get_mpz_t()) == 0) return false;
    }
    return true;
}

Integer QuotientProjection::index() const {
    Integer n = 1;
    for (const auto& d : d_) n *= d;
    return n;
}

}  // namespace mwlab
