#pragma once

// Plain-text curve fixtures. Grammar (one directive per line, '#' starts a comment):
//
//   curve <name>
//   coefficients <a1> <a2> <a3> <a4> <a6>        integers
//   generator <name> <x> <y>                     declared free generator
//   torsion <name> <x> <y> order <n>             torsion generator, invariant-factor order
//   point <name> <x> <y> [order <n>]             extra named point
//
// Coordinates are exact rationals written as `n` or `n/d`; `O` is the point at
// infinity (in place of both coordinates).

#include "mwlab/ec.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwlab {

class FixtureError : public InputError {
  public:
    using InputError::InputError;
};

struct NamedPoint {
    std::string name;
    RationalPoint point;
    std::optional<Integer> order;
};

struct CurveFixture {
    std::string name;
    CurveQ curve;
    std::vector<NamedPoint> generators;
    std::vector<TorsionClaim> torsion;
    std::vector<NamedPoint> points;

    const NamedPoint* find(const std::string& point_name) const;
};

CurveFixture parse_curve_fixture(const std::string& text, const std::string& origin = "<string>");
CurveFixture load_curve_fixture(const std::string& path);

Rational parse_rational(const std::string& token);

}  // namespace mwlab
