// mwlab: local-global experiments on Mordell-Weil style modules.

#include "mwlab/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<unsigned> parse_pattern(const std::string& s) {
    std::vector<unsigned> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw mwlab::InputError("--pattern expects comma-separated non-negative integers, got '" + s + "'");
        out.push_back(static_cast<unsigned>(std::stoul(tok)));
    }
    if (out.empty()) throw mwlab::InputError("--pattern is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mwlab: local-global experiments for finitely generated modules"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(MWLAB_VERSION));

    mwlab::RunConfig cfg;
    std::optional<std::uint64_t> place_bound, step_bound;
    std::optional<long> l;
    std::string pattern;
    std::string report_path;

    auto common = [&](CLI::App* sub, bool fixture) {
        if (fixture) sub->add_option("--fixture", cfg.fixture, "run description (.json) or curve fixture (.curve)")->required();
        sub->add_option("--place-bound", place_bound, "scan good places <= N");
        sub->add_option("--out", cfg.out, "write the full JSON report here");
        sub->add_option("--jobs", cfg.jobs, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", cfg.seed, "seed for randomized spot checks");
    };
    auto* ce = app.add_subcommand("counterexample", "trace-zero lattice: local certificates and global membership");
    common(ce, true);
    auto* dy = app.add_subcommand("dynamics", "orbit of P under phi against Lambda, globally and mod v");
    common(dy, true);
    dy->add_option("--step-bound", step_bound, "search phi^n(P) for n <= N");
    auto* sc = app.add_subcommand("scan-orders", "places where l-adic valuations of the orders follow a pattern");
    common(sc, true);
    sc->add_option("--l", l, "prime l");
    sc->add_option("--pattern", pattern, "valuations k1,k2,...");
    auto* ax = app.add_subcommand("axioms", "torsion injectivity and reduction homomorphism checks");
    common(ax, true);
    auto* vr = app.add_subcommand("verify-report", "re-validate a saved report without rescanning");
    vr->add_option("report", report_path, "report JSON");
    vr->add_option("--fixture", report_path, "report JSON (alternative to the positional argument)");
    vr->add_option("--out", cfg.out, "write the verification report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mwlab::kExitUsage;
    }

    mwlab::RunOutcome out;
    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        cfg.place_bound = place_bound;
        cfg.step_bound = step_bound;
        cfg.l = l;
        if (!pattern.empty()) cfg.pattern = parse_pattern(pattern);
        if (cfg.subcommand == "verify-report") {
            if (report_path.empty()) throw mwlab::InputError("verify-report needs a report path");
            cfg.fixture = report_path;
        }
        out = mwlab::run(cfg);
    } catch (const mwlab::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return mwlab::kExitUsage;
    }

    std::ostream& human = out.exit_code == mwlab::kExitUsage ? std::cerr : std::cout;
    for (const auto& line : out.summary) human << line << "\n";
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out);
        if (!f) {
            std::cerr << "cannot write " << cfg.out << "\n";
            return mwlab::kExitUsage;
        }
        f << out.report.dump(2) << "\n";
    }
    return out.exit_code;
}
