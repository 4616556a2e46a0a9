#include "mwlab/module_config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mwlab {

namespace fs = std::filesystem;
using nlohmann::json;

Integer json_integer(const json& v, const std::string& what) {
    if (v.is_number_integer()) {
        if (v.is_number_unsigned()) return Integer(std::to_string(v.get<std::uint64_t>()));
        return Integer(std::to_string(v.get<std::int64_t>()));
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        Integer n;
        if (s.empty() || n.set_str(s, 10) != 0) throw InputError(what + ": '" + s + "' is not an integer");
        return n;
    }
    throw InputError(what + ": expected an integer, got " + v.dump());
}

json integer_json(const Integer& n) {
    if (n.fits_slong_p()) return n.get_si();
    return n.get_str();
}

namespace {

IntVector json_int_vector(const json& v, const std::string& what) {
    if (!v.is_array()) throw InputError(what + ": expected an array");
    IntVector out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(json_integer(v[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

std::uint64_t json_bound(const json& v, const std::string& what) {
    const Integer n = json_integer(v, what);
    if (n <= 0 || !n.fits_ulong_p()) throw InputError(what + " must be a positive integer");
    return n.get_ui();
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
    return obj.at(key);
}

std::vector<std::string> string_list(const json& v, const std::string& what) {
    if (!v.is_array()) throw InputError(what + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& s : v) {
        if (!s.is_string()) throw InputError(what + ": expected strings, got " + s.dump());
        out.push_back(s.get<std::string>());
    }
    return out;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw InputError(where + ": expected an object");
    for (const auto& [k, _] : obj.items())
        if (!allowed.count(k)) throw InputError(where + ": unknown key \"" + k + "\"");
}

ModuleLimits parse_limits(const json& j) {
    ModuleLimits l;
    check_keys(j, {"independence_box", "subgroup_cap", "count_cap"}, "limits");
    if (j.contains("independence_box")) l.independence_box = static_cast<long>(json_bound(j["independence_box"], "limits.independence_box"));
    if (j.contains("subgroup_cap")) l.subgroup_cap = json_bound(j["subgroup_cap"], "limits.subgroup_cap");
    if (j.contains("count_cap")) l.count_cap = json_bound(j["count_cap"], "limits.count_cap");
    return l;
}

void add_name(RunDescription& d, const std::string& name, GlobalPoint p) {
    if (!d.points.emplace(name, std::move(p)).second) throw InputError("point name '" + name + "' declared twice");
    d.point_names.push_back(name);
}

// Generators, torsion generators, and extra fixture points that lie in the torsion subgroup.
void name_curve_points(RunDescription& d) {
    const GlobalModule& b = *d.module;
    const CurveFixture& fx = b.fixture();
    for (std::size_t i = 0; i < fx.generators.size(); ++i) add_name(d, fx.generators[i].name, b.generator(i));
    for (std::size_t j = 0; j < fx.torsion.size(); ++j) add_name(d, fx.torsion[j].name, b.torsion_generator(j));
    for (const auto& np : fx.points)
        for (const auto& t : b.torsion_group().enumerate()) {
            GlobalPoint candidate{IntVector(b.rank(), Integer(0)), t};
            if (b.realize(candidate) == np.point) {
                add_name(d, np.name, std::move(candidate));
                break;
            }
        }
}

std::shared_ptr<const GlobalModule> parse_synthetic(const json& s, RunDescription& d, const ModuleLimits& limits) {
    check_keys(s, {"rank", "torsion", "dimension", "generator_names", "torsion_names", "places"}, "synthetic");
    const Integer rank_i = json_integer(require(s, "rank", "synthetic"), "synthetic.rank");
    if (rank_i < 0 || rank_i > 64) throw InputError("synthetic.rank must be in [0, 64]");
    const auto rank = static_cast<std::size_t>(rank_i.get_ui());
    const FiniteAbelianGroup torsion(s.contains("torsion") ? json_int_vector(s["torsion"], "synthetic.torsion") : IntVector{});
    int dimension = 2;
    if (s.contains("dimension")) dimension = static_cast<int>(json_bound(s["dimension"], "synthetic.dimension"));

    std::vector<SyntheticPlace> places;
    const json& pl = require(s, "places", "synthetic");
    if (!pl.is_array() || pl.empty()) throw InputError("synthetic.places: expected a non-empty array");
    for (std::size_t k = 0; k < pl.size(); ++k) {
        const std::string where = "synthetic.places[" + std::to_string(k) + "]";
        check_keys(pl[k], {"id", "group", "generators", "torsion"}, where);
        SyntheticPlace sp;
        sp.id = json_bound(require(pl[k], "id", where), where + ".id");
        sp.group = FiniteAbelianGroup(json_int_vector(require(pl[k], "group", where), where + ".group"));
        for (const auto& g : require(pl[k], "generators", where))
            sp.generator_images.push_back(sp.group.element(json_int_vector(g, where + ".generators")));
        if (pl[k].contains("torsion"))
            for (const auto& t : pl[k]["torsion"])
                sp.torsion_images.push_back(sp.group.element(json_int_vector(t, where + ".torsion")));
        places.push_back(std::move(sp));
    }
    auto module = std::make_shared<const GlobalModule>(
        GlobalModule::synthetic(rank, torsion, std::move(places), dimension, limits));

    std::vector<std::string> gnames, tnames;
    if (s.contains("generator_names")) gnames = string_list(s["generator_names"], "synthetic.generator_names");
    else
        for (std::size_t i = 0; i < rank; ++i) gnames.push_back("g" + std::to_string(i + 1));
    if (s.contains("torsion_names")) tnames = string_list(s["torsion_names"], "synthetic.torsion_names");
    else
        for (std::size_t j = 0; j < torsion.rank(); ++j) tnames.push_back("t" + std::to_string(j + 1));
    if (gnames.size() != rank || tnames.size() != torsion.rank())
        throw InputError("synthetic: generator_names/torsion_names do not match rank and torsion");
    d.module = module;
    for (std::size_t i = 0; i < rank; ++i) add_name(d, gnames[i], module->generator(i));
    for (std::size_t j = 0; j < tnames.size(); ++j) add_name(d, tnames[j], module->torsion_generator(j));
    return module;
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

EndoMap parse_endomorphism(const json& phi) {
    if (!phi.is_object()) throw InputError("phi: expected an object");
    if (phi.contains("multiply")) {
        check_keys(phi, {"multiply"}, "phi");
        return EndoMap::multiply(json_integer(phi["multiply"], "phi.multiply"));
    }
    if (phi.contains("matrix")) {
        check_keys(phi, {"matrix", "torsion_multiplier"}, "phi");
        const json& rows = phi["matrix"];
        if (!rows.is_array() || rows.empty()) throw InputError("phi.matrix: expected a non-empty array of rows");
        std::vector<IntVector> r;
        for (const auto& row : rows) r.push_back(json_int_vector(row, "phi.matrix"));
        for (const auto& row : r)
            if (row.size() != r.size()) throw InputError("phi.matrix must be square");
        IntMatrix a = IntMatrix::from_rows(r, r.size());
        const Integer t = phi.contains("torsion_multiplier") ? json_integer(phi["torsion_multiplier"], "phi.torsion_multiplier")
                                                             : Integer(1);
        return EndoMap::linear(std::move(a), t);
    }
    throw InputError("phi: expected \"multiply\" or \"matrix\"");
}

GlobalPoint RunDescription::point(const std::string& expr) const {
    const GlobalModule& b = *module;
    GlobalPoint acc = b.zero();
    std::size_t i = 0;
    auto skip = [&] {
        while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
    };
    auto fail = [&](const std::string& why) -> GlobalPoint {
        throw InputError("point expression '" + expr + "': " + why);
    };
    bool first = true, any = false;
    for (;;) {
        skip();
        if (i == expr.size()) break;
        int sign = 1;
        if (expr[i] == '+' || expr[i] == '-') {
            sign = expr[i] == '-' ? -1 : 1;
            ++i;
            skip();
        } else if (!first) {
            fail("expected '+' or '-' at offset " + std::to_string(i));
        }
        first = false;
        Integer coeff = 1;
        bool has_coeff = false;
        if (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) {
            std::size_t j = i;
            while (j < expr.size() && std::isdigit(static_cast<unsigned char>(expr[j]))) ++j;
            coeff = Integer(expr.substr(i, j - i));
            has_coeff = true;
            i = j;
            skip();
            if (i < expr.size() && expr[i] == '*') {
                ++i;
                skip();
            }
        }
        if (i < expr.size() && is_name_start(expr[i])) {
            std::size_t j = i;
            while (j < expr.size() && is_name_char(expr[j])) ++j;
            const std::string name = expr.substr(i, j - i);
            i = j;
            const auto it = points.find(name);
            if (it == points.end()) {
                if (name != "O") fail("unknown name '" + name + "'");
            } else {
                acc = b.add(acc, b.scale(sign * coeff, it->second));
            }
        } else if (!has_coeff || coeff != 0) {
            fail("expected a point name at offset " + std::to_string(i));
        }
        any = true;
    }
    if (!any) fail("empty");
    return acc;
}

std::vector<GlobalPoint> RunDescription::points_of(const std::vector<std::string>& exprs) const {
    std::vector<GlobalPoint> out;
    for (const auto& e : exprs) out.push_back(point(e));
    return out;
}

RunDescription parse_run_description(const json& doc, const std::string& origin, const std::string& base_dir) {
    check_keys(doc, {"schema", "description", "module", "limits", "points", "counterexample", "dynamics", "scan",
                     "place_bound", "step_bound"},
               origin);
    if (doc.contains("schema") && doc["schema"] != "mwlab-run/1")
        throw InputError(origin + ": unsupported schema " + doc["schema"].dump());

    RunDescription d;
    d.path = origin;
    d.format = "json";
    const ModuleLimits limits = doc.contains("limits") ? parse_limits(doc["limits"]) : ModuleLimits{};

    const json& m = require(doc, "module", origin);
    check_keys(m, {"curve", "synthetic"}, "module");
    if (m.contains("curve") == m.contains("synthetic"))
        throw InputError(origin + ": module needs exactly one of \"curve\" or \"synthetic\"");
    if (m.contains("curve")) {
        if (!m["curve"].is_string()) throw InputError("module.curve: expected a path");
        fs::path p(m["curve"].get<std::string>());
        if (p.is_relative()) p = fs::path(base_dir) / p;
        d.module = std::make_shared<const GlobalModule>(GlobalModule::elliptic(load_curve_fixture(p.string()), limits));
        name_curve_points(d);
    } else {
        parse_synthetic(m["synthetic"], d, limits);
    }

    if (doc.contains("points")) {
        const json& pts = doc["points"];
        if (!pts.is_object()) throw InputError("points: expected an object of name -> expression");
        // Derived names may only refer to names declared by the module.
        std::vector<std::pair<std::string, GlobalPoint>> derived;
        for (const auto& [name, value] : pts.items()) {
            if (name.empty() || !is_name_start(name[0]) ||
                !std::all_of(name.begin(), name.end(), [](char c) { return is_name_char(c); }))
                throw InputError("points: invalid name '" + name + "'");
            if (!value.is_string()) throw InputError("points." + name + ": expected an expression string");
            derived.emplace_back(name, d.point(value.get<std::string>()));
        }
        for (auto& [name, p] : derived) add_name(d, name, std::move(p));
    }

    if (doc.contains("counterexample")) {
        const json& c = doc["counterexample"];
        check_keys(c, {"points"}, "counterexample");
        d.counterexample = string_list(require(c, "points", "counterexample"), "counterexample.points");
        d.points_of(*d.counterexample);
    }
    if (doc.contains("dynamics")) {
        const json& y = doc["dynamics"];
        check_keys(y, {"phi", "point", "lambda"}, "dynamics");
        DynamicsSection s;
        s.phi = require(y, "phi", "dynamics");
        parse_endomorphism(s.phi);
        const json& pt = require(y, "point", "dynamics");
        if (!pt.is_string()) throw InputError("dynamics.point: expected an expression string");
        s.point = pt.get<std::string>();
        s.lambda = string_list(require(y, "lambda", "dynamics"), "dynamics.lambda");
        d.point(s.point);
        d.points_of(s.lambda);
        d.dynamics = std::move(s);
    }
    if (doc.contains("scan")) {
        const json& y = doc["scan"];
        check_keys(y, {"points", "l", "pattern"}, "scan");
        ScanSection s;
        s.points = string_list(require(y, "points", "scan"), "scan.points");
        d.points_of(s.points);
        if (y.contains("l")) s.l = json_integer(y["l"], "scan.l").get_si();
        if (y.contains("pattern")) {
            std::vector<unsigned> pat;
            for (const auto& k : json_int_vector(y["pattern"], "scan.pattern")) {
                if (k < 0 || k > 64) throw InputError("scan.pattern entries must be in [0, 64]");
                pat.push_back(static_cast<unsigned>(k.get_ui()));
            }
            s.pattern = std::move(pat);
        }
        d.scan = std::move(s);
    }
    if (doc.contains("place_bound")) d.place_bound = json_bound(doc["place_bound"], "place_bound");
    if (doc.contains("step_bound")) d.step_bound = json_bound(doc["step_bound"], "step_bound");
    return d;
}

RunDescription load_run_description(const std::string& path) {
    if (!fs::exists(path)) throw InputError("fixture file not found: " + path);
    if (fs::path(path).extension() == ".curve") {
        RunDescription d;
        d.path = path;
        d.format = "curve";
        d.module = std::make_shared<const GlobalModule>(GlobalModule::elliptic(load_curve_fixture(path)));
        name_curve_points(d);
        return d;
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
    return parse_run_description(doc, path, fs::path(path).parent_path().string());
}

}  // namespace mwlab
