#pragma once

// A finitely generated group B = Z^rank + B_tors with reduction maps r_v : B -> B_v
// to finite groups, realized either by an elliptic curve over Q or by explicit
// synthetic tables of generator images.

#include "mwlab/curve_fixture.hpp"
#include "mwlab/finite_abelian.hpp"
#include "mwlab/place_scan.hpp"
#include "mwlab/presentation.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mwlab {

struct GlobalPoint {
    IntVector free_coords;
    Element torsion_part;

    friend bool operator==(const GlobalPoint&, const GlobalPoint&) = default;
};

struct ModuleLimits {
    long independence_box = 20;
    std::uint64_t subgroup_cap = kDefaultSubgroupCap;
    std::uint64_t count_cap = kDefaultCountCap;
};

// Images of the generators in one finite group B_v.
struct SyntheticPlace {
    std::uint64_t id = 0;
    FiniteAbelianGroup group;
    std::vector<Element> generator_images;
    std::vector<Element> torsion_images;
};

// B_v as seen through the module: the subgroup generated by the reductions of
// the declared generators, in invariant-factor coordinates.
struct LocalImage {
    std::uint64_t place = 0;
    FiniteAbelianGroup group;
    std::vector<Element> generators;
    std::vector<Element> torsion;
    Integer ambient_order;  // #E(F_p), or |B_v| for synthetic tables
    std::shared_ptr<const PresentedSubgroup<FpCurveOps>> subgroup;  // elliptic realizations only

    Element reduce(const GlobalPoint& p) const;
};

class GlobalModule {
  public:
    // Validates torsion claims, that the torsion generators span a direct
    // product of the claimed cyclic orders, and generator independence by a
    // bounded relation search.
    static GlobalModule elliptic(CurveFixture fixture, ModuleLimits limits = {});
    // Dimension parameter d defaults to 2 (an elliptic curve).
    static GlobalModule synthetic(std::size_t rank, FiniteAbelianGroup torsion, std::vector<SyntheticPlace> places,
                                  int dimension = 2, ModuleLimits limits = {});

    bool is_elliptic() const { return fixture_.has_value(); }
    const CurveFixture& fixture() const;
    const std::string& name() const { return name_; }
    std::size_t rank() const { return rank_; }
    const FiniteAbelianGroup& torsion_group() const { return torsion_; }
    int dimension() const { return dimension_; }
    const ModuleLimits& limits() const { return limits_; }

    GlobalPoint zero() const;
    GlobalPoint generator(std::size_t i) const;
    GlobalPoint torsion_generator(std::size_t j) const;
    GlobalPoint make_point(const IntVector& free_coords, const IntVector& torsion_coords = {}) const;
    GlobalPoint add(const GlobalPoint& a, const GlobalPoint& b) const;
    GlobalPoint neg(const GlobalPoint& a) const;
    GlobalPoint scale(const Integer& k, const GlobalPoint& a) const;
    void validate(const GlobalPoint& p) const;

    // Throws InputError if place is not good for the realization.
    void require_good(std::uint64_t place) const;
    bool is_good(std::uint64_t place) const;
    // Good places <= bound, ascending.
    std::vector<std::uint64_t> places_up_to(std::uint64_t bound) const;

    LocalImage local_image(std::uint64_t place) const;

    // The rational point a GlobalPoint denotes (elliptic only).
    RationalPoint realize(const GlobalPoint& p) const;
    // Reduction computed directly on the curve, bypassing presentations.
    FpPoint reduce_on_curve(const GlobalPoint& p, std::uint64_t place) const;

    // Nonzero c with |c_i| <= box and sum c_i * points_i torsion, or nullopt.
    std::optional<IntVector> find_small_relation(const std::vector<GlobalPoint>& points, long box) const;

  private:
    GlobalModule() = default;

    std::string name_;
    std::optional<CurveFixture> fixture_;
    std::map<std::uint64_t, SyntheticPlace> synthetic_;
    std::size_t rank_ = 0;
    FiniteAbelianGroup torsion_;
    int dimension_ = 2;
    ModuleLimits limits_;
};

Element reduce(const GlobalModule& b, const GlobalPoint& p, std::uint64_t place);
Integer ord_v(const GlobalModule& b, const GlobalPoint& p, std::uint64_t place);
// Exact k with l^k || n (n > 0).
unsigned l_valuation(const Integer& n, const Integer& l);

struct DivisibilityScan {
    Integer l;
    std::vector<unsigned> pattern;
    std::uint64_t bound = 0;
    std::uint64_t places_scanned = 0;
    std::vector<std::uint64_t> hits;
};

// Good places v <= bound where l^k_i || ord_v(P_i) for k_i > 0 and l does not
// divide ord_v(P_i) for k_i = 0.
DivisibilityScan scan_divisibility(const GlobalModule& b, const std::vector<GlobalPoint>& points, const Integer& l,
                                   const std::vector<unsigned>& pattern, std::uint64_t bound,
                                   const ScanOptions& opt = {});

// Recomputes one place from scratch (curve point orders, or brute force on tables).
bool verify_divisibility(const GlobalModule& b, const std::vector<GlobalPoint>& points, const Integer& l,
                         const std::vector<unsigned>& pattern, std::uint64_t place);

bool torsion_injectivity_check(const GlobalModule& b, std::uint64_t place);

struct InjectivityScan {
    std::uint64_t bound = 0;
    std::uint64_t places_scanned = 0;
    std::vector<std::uint64_t> failures;
};

InjectivityScan scan_torsion_injectivity(const GlobalModule& b, std::uint64_t bound, const ScanOptions& opt = {});

// True when the free parts have full rank; torsion parts ignored.
bool free_parts_independent(const std::vector<GlobalPoint>& points);

}  // namespace mwlab
