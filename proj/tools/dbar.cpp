// Command-line front end for the polydisc dbar solver library.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbar/cauchy.hpp"
#include "dbar/corpus.hpp"
#include "dbar/exact.hpp"
#include "dbar/henkin.hpp"
#include "dbar/verify.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
    std::vector<std::string> cases;
    std::string config_path;
    std::string out_path;
    int points = 8;
    std::uint64_t seed = 12345;
    bool henkin = false;
    bool timings = false;
    std::string grid;        // "radial,angular"
    double fd_step = 1e-3;
    int dim = 2;             // calibrate
    std::string case_id = "mono-n2-conj2";  // convergence
};

dbar::OperatorConfig load_config(const CliOptions& opt, int n) {
    dbar::OperatorConfig cfg = dbar::reference_config(n);
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw CLI::ValidationError("--config", "cannot open " + opt.config_path);
        json j = json::parse(in);
        if (j.contains("disc_radial")) cfg.disc_radial = j["disc_radial"].get<int>();
        if (j.contains("disc_angular")) cfg.disc_angular = j["disc_angular"].get<int>();
        if (j.contains("circle_count")) cfg.circle_count = j["circle_count"].get<int>();
        if (j.contains("torus_m")) cfg.torus_m = j["torus_m"].get<int>();
        if (j.contains("subtraction")) cfg.subtraction = j["subtraction"].get<bool>();
        if (j.contains("boundary_margin")) cfg.boundary_margin = j["boundary_margin"].get<double>();
        if (j.contains("henkin_radial")) cfg.henkin_radial = j["henkin_radial"].get<int>();
        if (j.contains("henkin_angular")) cfg.henkin_angular = j["henkin_angular"].get<int>();
    }
    if (!opt.grid.empty()) {
        int r = 0, a = 0;
        char comma = 0;
        std::istringstream gs(opt.grid);
        if (!(gs >> r >> comma >> a) || comma != ',' || r < 2 || a < 2)
            throw CLI::ValidationError("--grid", "expected radial,angular with counts >= 2");
        cfg.disc_radial = r;
        cfg.disc_angular = a;
    }
    return cfg;
}

/// Resolve case selectors: registry ids, or "poly:file" where the file holds
/// the exact potential u in the monomial text format (the datum is dbar u).
std::vector<dbar::TestCase> resolve_cases(const std::vector<std::string>& sel) {
    std::vector<dbar::TestCase> out;
    if (sel.empty()) {
        for (const dbar::TestCase& tc : dbar::registry()) out.push_back(tc);
        return out;
    }
    for (const std::string& s : sel) {
        if (s.rfind("poly:", 0) == 0) {
            std::string path = s.substr(5);
            std::ifstream in(path);
            if (!in) throw CLI::ValidationError("--case", "cannot open " + path);
            out.push_back(dbar::manufactured_case(s, dbar::parse_monomial_poly(in)));
        } else {
            out.push_back(dbar::find_case(s));
        }
    }
    return out;
}

void emit(const CliOptions& opt, const json& doc, const std::vector<dbar::CheckReport>* reports) {
    if (opt.out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(opt.out_path + ".json");
    out << doc.dump(2) << "\n";
    if (reports) {
        std::ofstream csv(opt.out_path + ".csv");
        dbar::write_report_csv(csv, *reports, opt.timings);
    }
    std::cout << "wrote " << opt.out_path << ".json" << (reports ? " and .csv" : "") << "\n";
}

json sign_table_json(const dbar::SignTable& table) {
    json arr = json::array();
    for (int r = 0; r < table.n; ++r)
        arr.push_back({{"n", table.n}, {"r", r}, {"sign", table.sign(r)}});
    return json{{"henkin_signs", arr}};
}

dbar::SignTable run_calibration(int n, const dbar::OperatorConfig& cfg, std::uint64_t seed) {
    std::vector<dbar::Form01> forms;
    for (const dbar::TestCase& tc : dbar::registry())
        if (tc.n == n && tc.smooth() && tc.tags.count("zero") == 0) forms.push_back(tc.g);
    std::vector<dbar::Point> pts = dbar::probe_points(n, 3, 0.2, seed, 0.15);
    return dbar::calibrate_signs(n, forms, pts, cfg);
}

int cmd_list_cases() {
    for (const dbar::TestCase& tc : dbar::registry()) {
        std::cout << tc.id << "  n=" << tc.n << "  alpha=" << tc.g.alpha_class << "  [";
        bool first = true;
        for (const std::string& t : tc.tags) {
            if (!first) std::cout << ",";
            std::cout << t;
            first = false;
        }
        std::cout << "]\n";
    }
    return 0;
}

int cmd_verify(const CliOptions& opt) {
    std::vector<dbar::TestCase> cases = resolve_cases(opt.cases);
    std::vector<dbar::CheckReport> reports;

    std::optional<dbar::SignTable> signs1, signs2;
    if (opt.henkin) {
        signs1 = run_calibration(1, dbar::reference_config(1), opt.seed);
        signs2 = run_calibration(2, dbar::reference_config(2), opt.seed);
    }
    for (const dbar::TestCase& tc : cases) {
        std::optional<dbar::SignTable> signs;
        if (opt.henkin && tc.n == 1) signs = signs1;
        if (opt.henkin && tc.n == 2) signs = signs2;
        auto batch = dbar::standard_checks(tc, opt.points, opt.seed, signs);
        reports.insert(reports.end(), batch.begin(), batch.end());
    }
    bool all_pass = true;
    for (const dbar::CheckReport& r : reports) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.check_id << "  " << r.case_id
                  << "  residual=" << r.residual << "  tol=" << r.tolerance << "\n";
        all_pass = all_pass && r.passed;
    }
    emit(opt, dbar::report_json(reports, opt.timings), &reports);
    return all_pass ? 0 : 1;
}

int cmd_solve(const CliOptions& opt) {
    std::vector<dbar::TestCase> cases = resolve_cases(opt.cases);
    json out = json::array();
    for (const dbar::TestCase& tc : cases) {
        dbar::OperatorConfig cfg = load_config(opt, tc.n);
        std::vector<dbar::Point> pts = dbar::probe_points(tc.n, opt.points, 0.1, opt.seed);
        auto [values, diag] = dbar::solve_dbar(tc.g, pts, cfg);
        json rows = json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            json z = json::array();
            for (const dbar::cplx& c : pts[i].coords) z.push_back({c.real(), c.imag()});
            rows.push_back({{"z", z},
                            {"u_re", values[i].real()},
                            {"u_im", values[i].imag()},
                            {"error", diag.errors[i]}});
        }
        json entry{{"case_id", tc.id}, {"n", tc.n}, {"values", rows}};
        if (opt.timings) entry["wall_ms"] = diag.wall_ms;
        out.push_back(entry);
    }
    emit(opt, out, nullptr);
    return 0;
}

json estimate_json(const dbar::HolderEstimate& e) {
    json bins = json::array();
    for (auto [s, sup] : e.bins) bins.push_back({{"scale", s}, {"sup", sup}});
    return {{"alpha_hat", e.alpha_hat}, {"r2", e.r2},       {"pair_count", e.pair_count},
            {"degenerate", e.degenerate}, {"bins", bins}};
}

int cmd_holder(const CliOptions& opt) {
    std::vector<std::string> sel = opt.cases;
    if (sel.empty()) sel = {"rough-a03", "rough-a05", "rough-a09"};
    json out = json::array();
    for (const dbar::TestCase& tc : resolve_cases(sel)) {
        dbar::OperatorConfig cfg = load_config(opt, tc.n);
        dbar::HolderReport hr = dbar::holder_report(tc, cfg, opt.seed);
        json sectors = json::array();
        for (const auto& [label, est] : hr.solution_by_sector)
            sectors.push_back({{"sector", label}, {"estimate", estimate_json(est)}});
        out.push_back({{"case_id", hr.case_id},
                       {"alpha_nominal", hr.alpha_nominal},
                       {"datum", estimate_json(hr.datum)},
                       {"solution", estimate_json(hr.solution)},
                       {"solution_by_sector", sectors}});
    }
    emit(opt, out, nullptr);
    return 0;
}

int cmd_calibrate(const CliOptions& opt) {
    dbar::OperatorConfig cfg = load_config(opt, opt.dim);
    dbar::SignTable table = run_calibration(opt.dim, cfg, opt.seed);
    emit(opt, sign_table_json(table), nullptr);
    return 0;
}

int cmd_convergence(const CliOptions& opt) {
    const dbar::TestCase& tc = dbar::find_case(opt.case_id);
    dbar::OperatorConfig cfg = load_config(opt, tc.n);
    std::vector<dbar::Point> pts = dbar::probe_points(tc.n, opt.points, 0.15, opt.seed);
    dbar::ConvergenceStudy st = dbar::convergence_study(tc, {16, 32, 64, 128}, pts, cfg);
    json rows = json::array();
    for (const dbar::ConvergenceRow& r : st.rows)
        rows.push_back({{"radial", r.radial}, {"error", r.error}});
    emit(opt, json{{"case_id", st.case_id}, {"order", st.order}, {"rows", rows}}, nullptr);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical canonical solution operator for dbar on the polydisc"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--case", opt.cases, "case id from the registry, or poly:FILE");
        sub->add_option("--config", opt.config_path, "JSON quadrature config");
        sub->add_option("--points", opt.points, "number of probe points");
        sub->add_option("--out", opt.out_path, "output path prefix (.json/.csv appended)");
        sub->add_option("--seed", opt.seed, "sampler seed");
        sub->add_option("--grid", opt.grid, "disc rule override: radial,angular");
        sub->add_option("--fd-step", opt.fd_step, "finite-difference step");
        sub->add_flag("--timings", opt.timings, "include wall-clock times in reports");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the operator-identity check battery");
    add_common(verify);
    verify->add_flag("--henkin", opt.henkin, "include the sector-formula agreement checks");

    CLI::App* solve = app.add_subcommand("solve", "evaluate the canonical solution at points");
    add_common(solve);

    CLI::App* holder = app.add_subcommand("holder", "Hoelder exponent estimates");
    add_common(holder);

    CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate the sector-formula signs");
    add_common(calibrate);
    calibrate->add_option("--n", opt.dim, "dimension to calibrate");

    CLI::App* convergence = app.add_subcommand("convergence", "disc-rule refinement study");
    add_common(convergence);
    convergence->add_option("--study-case", opt.case_id, "case id for the study");

    CLI::App* list = app.add_subcommand("list-cases", "print the case registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return cmd_list_cases();
        if (verify->parsed()) return cmd_verify(opt);
        if (solve->parsed()) return cmd_solve(opt);
        if (holder->parsed()) return cmd_holder(opt);
        if (calibrate->parsed()) return cmd_calibrate(opt);
        if (convergence->parsed()) return cmd_convergence(opt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
