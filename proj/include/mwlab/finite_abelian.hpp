#pragma once

// Finite abelian groups in invariant-factor form Z/d1 x ... x Z/dr, d1 | d2 | ...

#include "mwlab/zmodule.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mwlab {

struct Element {
    IntVector coords;

    friend bool operator==(const Element&, const Element&) = default;
};

class FiniteAbelianGroup {
  public:
    FiniteAbelianGroup() = default;
    // Throws InputError unless every factor is >= 2 and the divisibility chain holds.
    explicit FiniteAbelianGroup(IntVector invariant_factors);
    // Any list of positive cyclic orders; normalized to invariant factors via SNF.
    static FiniteAbelianGroup from_cyclic_orders(const IntVector& orders);

    const IntVector& invariants() const { return invariants_; }
    std::size_t rank() const { return invariants_.size(); }
    Integer order() const;
    Integer exponent() const;

    Element zero() const;
    // Reduces an arbitrary integer vector into canonical coordinates.
    Element element(const IntVector& raw) const;
    Element element(std::initializer_list<long> raw) const;
    bool contains(const Element& x) const;
    void validate(const Element& x) const;

    Element add(const Element& a, const Element& b) const;
    Element sub(const Element& a, const Element& b) const;
    Element neg(const Element& a) const;
    Element scale(const Integer& k, const Element& a) const;
    // sum coeffs[j] * xs[j]
    Element combine(const IntVector& coeffs, const std::vector<Element>& xs) const;
    bool is_zero(const Element& a) const;

    // Every element, coordinates in lexicographic order. Test helper.
    std::vector<Element> enumerate() const;

    std::string to_string() const;
    friend bool operator==(const FiniteAbelianGroup&, const FiniteAbelianGroup&) = default;

  private:
    IntVector invariants_;
};

struct Presentation {
    FiniteAbelianGroup group;
    std::vector<Element> point_coords;
};

struct MinimalMultiple {
    Integer alpha;
    IntVector relation;
};

Integer element_order(const FiniteAbelianGroup& g, const Element& x);

// Coefficients c with sum c[j]*gens[j] == x, canonical per solve_mod; nullopt if x not in <gens>.
std::optional<IntVector> subgroup_membership(const FiniteAbelianGroup& g, const Element& x,
                                             const std::vector<Element>& gens);

// Least alpha >= 1 with alpha*x in <gens>, and c with alpha*x + sum c[j]*gens[j] == 0.
MinimalMultiple minimal_multiple_in_subgroup(const FiniteAbelianGroup& g, const Element& x,
                                             const std::vector<Element>& gens);

// Order of the subgroup generated by gens.
Integer subgroup_order(const FiniteAbelianGroup& g, const std::vector<Element>& gens);

// Membership in a fixed subgroup H = <gens> through the projection G -> G / H,
// one small matrix-vector product per query.
class QuotientProjection {
  public:
    QuotientProjection(const FiniteAbelianGroup& g, const std::vector<Element>& gens);

    bool contains(const Element& x) const;
    // |G / H|
    Integer index() const;

  private:
    IntMatrix u_;
    IntVector d_;
};

std::string to_string(const Element& x);

}  // namespace mwlab
