#pragma once

// Invariant-factor presentation of the subgroup generated by concrete points
// of a black-box finite abelian group.

#include "mwlab/finite_abelian.hpp"

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mwlab {

inline constexpr std::uint64_t kDefaultSubgroupCap = 10'000'000;

// Group arithmetic on some concrete value type.
template <class Ops>
concept GroupOps = requires(const Ops& ops, const typename Ops::value_type& a, const typename Ops::value_type& b) {
    { ops.zero() } -> std::convertible_to<typename Ops::value_type>;
    { ops.add(a, b) } -> std::convertible_to<typename Ops::value_type>;
    { ops.equal(a, b) } -> std::convertible_to<bool>;
    { ops.hash(a) } -> std::convertible_to<std::size_t>;
};

// Elements of a FiniteAbelianGroup as a black box.
struct AbelianGroupOps {
    using value_type = Element;
    FiniteAbelianGroup group;

    Element zero() const { return group.zero(); }
    Element add(const Element& a, const Element& b) const { return group.add(a, b); }
    bool equal(const Element& a, const Element& b) const { return a == b; }
    std::size_t hash(const Element& a) const {
        std::size_t h = 1469598103934665603ull;
        for (const auto& c : a.coords) h = (h ^ static_cast<std::size_t>(c.get_ui())) * 1099511628211ull;
        return h;
    }
};

// Builds <g_1> <= <g_1, g_2> <= ... by brute force: for each new generator the least
// m with m*g_k in the previous subgroup gives one row of a triangular basis of the
// relation lattice; the SNF of that basis yields the invariant factors.
template <GroupOps Ops>
class PresentedSubgroup {
  public:
    using value_type = typename Ops::value_type;

    PresentedSubgroup(Ops ops, std::vector<value_type> points, std::uint64_t cap = kDefaultSubgroupCap)
        : ops_(std::move(ops)), points_(std::move(points)), table_(16, Hasher{&ops_}, Equal{&ops_}) {
        build(cap);
    }

    PresentedSubgroup(const PresentedSubgroup&) = delete;
    PresentedSubgroup& operator=(const PresentedSubgroup&) = delete;

    const Presentation& presentation() const { return presentation_; }
    const FiniteAbelianGroup& group() const { return presentation_.group; }
    const IntMatrix& relations() const { return relations_; }
    std::uint64_t size() const { return elements_.size(); }
    const Ops& ops() const { return ops_; }

    // Coordinates of an ambient element, or nullopt when it lies outside the subgroup.
    std::optional<Element> locate(const value_type& x) const {
        auto it = table_.find(x);
        if (it == table_.end()) return std::nullopt;
        return coords_of_index(it->second);
    }

  private:
    struct Hasher {
        const Ops* ops;
        std::size_t operator()(const value_type& v) const { return ops->hash(v); }
    };
    struct Equal {
        const Ops* ops;
        bool operator()(const value_type& a, const value_type& b) const { return ops->equal(a, b); }
    };

    void build(std::uint64_t cap) {
        const std::size_t k = points_.size();
        elements_.push_back(ops_.zero());
        table_.emplace(elements_.back(), 0);
        relations_ = IntMatrix(k, k);
        radices_.assign(k, 1);

        for (std::size_t g = 0; g < k; ++g) {
            const std::uint64_t prev = elements_.size();
            value_type t = points_[g];
            std::uint64_t m = 1;
            for (;; ++m) {
                auto hit = table_.find(t);
                if (hit != table_.end()) {
                    IntVector digits = digits_of_index(hit->second);
                    for (std::size_t j = 0; j < g; ++j) relations_(g, j) = -digits[j];
                    relations_(g, g) = Integer(static_cast<unsigned long>(m));
                    break;
                }
                if (prev * (m + 1) > cap)
                    throw ResourceError("subgroup generated by the points exceeds the cap of " + std::to_string(cap) +
                                        " elements");
                t = ops_.add(t, points_[g]);
            }
            radices_[g] = m;
            elements_.reserve(prev * m);
            for (std::uint64_t j = 1; j < m; ++j)
                for (std::uint64_t i = 0; i < prev; ++i) {
                    value_type v = ops_.add(elements_[(j - 1) * prev + i], points_[g]);
                    table_.emplace(v, elements_.size());
                    elements_.push_back(std::move(v));
                }
        }

        snf_ = smith_normal_form(relations_);
        IntVector factors;
        for (std::size_t i = 0; i < k; ++i) {
            if (snf_.D(i, i) > 1) {
                kept_.push_back(i);
                factors.push_back(snf_.D(i, i));
            }
        }
        presentation_.group = FiniteAbelianGroup(factors);
        for (std::size_t g = 0; g < k; ++g) {
            IntVector unit(k, Integer(0));
            unit[g] = 1;
            presentation_.point_coords.push_back(coords_of_digits(unit));
        }
    }

    IntVector digits_of_index(std::uint64_t idx) const {
        IntVector d(points_.size(), Integer(0));
        for (std::size_t j = 0; j < points_.size(); ++j) {
            d[j] = Integer(static_cast<unsigned long>(idx % radices_[j]));
            idx /= radices_[j];
        }
        return d;
    }

    // Row vector c maps to c * V, restricted to the nontrivial factors.
    Element coords_of_digits(const IntVector& c) const {
        IntVector raw;
        for (std::size_t col : kept_) {
            Integer s = 0;
            for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * snf_.V(i, col);
            raw.push_back(s);
        }
        return presentation_.group.element(raw);
    }

    Element coords_of_index(std::uint64_t idx) const { return coords_of_digits(digits_of_index(idx)); }

    Ops ops_;
    std::vector<value_type> points_;
    std::vector<value_type> elements_;
    std::unordered_map<value_type, std::uint64_t, Hasher, Equal> table_;
    std::vector<std::uint64_t> radices_;
    IntMatrix relations_;
    SnfDecomposition snf_;
    std::vector<std::size_t> kept_;
    Presentation presentation_;
};

template <GroupOps Ops>
Presentation presentation_from_points(Ops ops, std::vector<typename Ops::value_type> points,
                                      std::uint64_t cap = kDefaultSubgroupCap) {
    return PresentedSubgroup<Ops>(std::move(ops), std::move(points), cap).presentation();
}

}  // namespace mwlab
