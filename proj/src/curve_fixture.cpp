#include "mwlab/curve_fixture.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace mwlab {

const NamedPoint* CurveFixture::find(const std::string& point_name) const {
    for (const auto* list : {&generators, &points})
        for (const auto& p : *list)
            if (p.name == point_name) return &p;
    return nullptr;
}

Rational parse_rational(const std::string& token) {
    static const std::regex pattern(R"(^([+-]?[0-9]+)(/([0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(token, m, pattern)) throw FixtureError("not a rational number: '" + token + "'");
    Integer num(m[1].str());
    Integer den = m[3].matched ? Integer(m[3].str()) : Integer(1);
    if (den == 0) throw FixtureError("zero denominator in '" + token + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

namespace {

struct LineError {
    std::string origin;
    int line;
    FixtureError operator()(const std::string& what) const {
        return FixtureError(origin + ":" + std::to_string(line) + ": " + what);
    }
};

Integer parse_integer(const std::string& token, const LineError& err) {
    static const std::regex pattern(R"(^[+-]?[0-9]+$)");
    if (!std::regex_match(token, pattern)) throw err("not an integer: '" + token + "'");
    return Integer(token);
}

// Consumes "<x> <y>" or "O" starting at tokens[i].
RationalPoint parse_point(const std::vector<std::string>& tokens, std::size_t& i, const LineError& err) {
    if (i < tokens.size() && tokens[i] == "O") {
        ++i;
        return RationalPoint::at_infinity();
    }
    if (i + 1 >= tokens.size()) throw err("expected two coordinates");
    try {
        RationalPoint p = RationalPoint::affine(parse_rational(tokens[i]), parse_rational(tokens[i + 1]));
        i += 2;
        return p;
    } catch (const FixtureError& e) {
        throw err(e.what());
    }
}

std::optional<Integer> parse_order(const std::vector<std::string>& tokens, std::size_t& i, const LineError& err) {
    if (i == tokens.size()) return std::nullopt;
    if (tokens[i] != "order" || i + 1 >= tokens.size()) throw err("expected 'order <n>'");
    Integer n = parse_integer(tokens[i + 1], err);
    if (n < 1) throw err("order must be positive");
    i += 2;
    return n;
}

}  // namespace

CurveFixture parse_curve_fixture(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string name;
    std::optional<CurveQ> curve;
    std::vector<NamedPoint> generators, points;
    std::vector<TorsionClaim> torsion;
    std::vector<std::string> seen_names;

    while (std::getline(in, raw)) {
        ++lineno;
        const LineError err{origin, lineno};
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;
        const std::string& kw = tokens[0];

        if (kw == "curve") {
            if (tokens.size() != 2) throw err("usage: curve <name>");
            name = tokens[1];
        } else if (kw == "coefficients") {
            if (tokens.size() != 6) throw err("usage: coefficients a1 a2 a3 a4 a6");
            if (curve) throw err("coefficients given twice");
            try {
                curve.emplace(parse_integer(tokens[1], err), parse_integer(tokens[2], err), parse_integer(tokens[3], err),
                              parse_integer(tokens[4], err), parse_integer(tokens[5], err));
            } catch (const FixtureError&) {
                throw;
            } catch (const InputError& e) {
                throw err(e.what());
            }
        } else if (kw == "generator" || kw == "torsion" || kw == "point") {
            if (!curve) throw err("'" + kw + "' before 'coefficients'");
            if (tokens.size() < 3) throw err("usage: " + kw + " <name> <x> <y>");
            const std::string& pname = tokens[1];
            for (const auto& s : seen_names)
                if (s == pname) throw err("duplicate point name '" + pname + "'");
            seen_names.push_back(pname);
            std::size_t i = 2;
            RationalPoint p = parse_point(tokens, i, err);
            std::optional<Integer> order = parse_order(tokens, i, err);
            if (i != tokens.size()) throw err("trailing tokens");
            if (!curve->is_on(p)) throw err("point " + pname + " = " + p.to_string() + " is not on the curve");
            if (kw == "generator") {
                if (order) throw err("free generators carry no order");
                generators.push_back({pname, std::move(p), std::nullopt});
            } else if (kw == "torsion") {
                if (!order) throw err("torsion point " + pname + " needs 'order <n>'");
                torsion.push_back({pname, std::move(p), *order});
            } else {
                points.push_back({pname, std::move(p), order});
            }
        } else {
            throw err("unknown directive '" + kw + "'");
        }
    }
    if (!curve) throw FixtureError(origin + ": missing 'coefficients'");
    if (name.empty()) throw FixtureError(origin + ": missing 'curve <name>'");

    CurveFixture fx{name, *curve, std::move(generators), std::move(torsion), std::move(points)};
    if (auto check = check_torsion_claims(fx.curve, fx.torsion); !check.ok)
        throw FixtureError(origin + ": torsion claim failed: " + check.failure);
    std::vector<TorsionClaim> claimed_points;
    for (const auto& p : fx.points)
        if (p.order) claimed_points.push_back({p.name, p.point, *p.order});
    if (auto check = check_torsion_claims(fx.curve, claimed_points); !check.ok)
        throw FixtureError(origin + ": order claim failed: " + check.failure);
    return fx;
}

CurveFixture load_curve_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open curve fixture '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_curve_fixture(ss.str(), path);
}

}  // namespace mwlab
