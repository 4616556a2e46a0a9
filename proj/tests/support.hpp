#pragma once

// Shared generators and brute-force oracles for the test suites.

#include "mwlab/finite_abelian.hpp"

#include <doctest.h>

#include <initializer_list>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mwlab::test {

inline IntVector iv(std::initializer_list<long> xs) {
    IntVector v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

// Random group of order <= max_order, built from up to three cyclic factors.
inline FiniteAbelianGroup random_group(std::mt19937_64& rng, long max_order) {
    for (;;) {
        IntVector orders;
        long total = 1;
        const int factors = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < factors; ++i) {
            const long d = 1 + static_cast<long>(rng() % 24);
            orders.emplace_back(d);
            total *= d;
        }
        if (total <= max_order) return FiniteAbelianGroup::from_cyclic_orders(orders);
    }
}

inline Element random_element(std::mt19937_64& rng, const FiniteAbelianGroup& g) {
    IntVector raw;
    for (const auto& d : g.invariants()) raw.emplace_back(static_cast<unsigned long>(rng() % d.get_ui()));
    return g.element(raw);
}

inline Integer brute_order(const FiniteAbelianGroup& g, const Element& x) {
    Integer n = 1;
    Element acc = x;
    while (!g.is_zero(acc)) {
        acc = g.add(acc, x);
        ++n;
    }
    return n;
}

// Closure of gens under addition, as a set of coordinate vectors.
inline std::set<IntVector> enumerate_subgroup(const FiniteAbelianGroup& g, const std::vector<Element>& gens) {
    std::set<IntVector> seen{g.zero().coords};
    std::vector<Element> frontier{g.zero()};
    while (!frontier.empty()) {
        std::vector<Element> next;
        for (const auto& x : frontier)
            for (const auto& y : gens) {
                Element z = g.add(x, y);
                if (seen.insert(z.coords).second) next.push_back(std::move(z));
            }
        frontier = std::move(next);
    }
    return seen;
}

}  // namespace mwlab::test

namespace doctest {

template <>
struct StringMaker<mwlab::IntVector> {
    static String convert(const mwlab::IntVector& v) { return mwlab::to_string(v).c_str(); }
};

template <>
struct StringMaker<std::vector<std::uint64_t>> {
    static String convert(const std::vector<std::uint64_t>& v) {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << "]";
        return os.str().c_str();
    }
};

template <>
struct StringMaker<std::vector<std::string>> {
    static String convert(const std::vector<std::string>& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
        return (out + "]").c_str();
    }
};

template <>
struct StringMaker<mwlab::IntMatrix> {
    static String convert(const mwlab::IntMatrix& m) { return m.to_string().c_str(); }
};

}  // namespace doctest
