// Command-line workbench: derivation runs, verification suites, numeric
// evaluation, and term-table dumps.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "modcurv/curvature.hpp"
#include "modcurv/fixtures.hpp"
#include "modcurv/oracle.hpp"
#include "modcurv/rearrange.hpp"
#include "modcurv/theta.hpp"

using json = nlohmann::ordered_json;
using namespace modcurv;

namespace {

std::string to_string_rat(const BigRational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

json report_to_json(const VerificationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json e;
        e["name"] = c.name;
        e["status"] = c.pass ? "pass" : "fail";
        e["max_error"] = c.max_error;
        e["tolerance"] = c.tolerance;
        if (!c.details.empty()) e["details"] = c.details;
        checks.push_back(e);
    }
    return json{{"suite", rep.suite}, {"ok", rep.all_pass()}, {"checks", checks}};
}

void print_report(const VerificationReport& rep, std::ostream& out) {
    out << "[" << (rep.all_pass() ? "PASS" : "FAIL") << "] " << rep.suite << "\n";
    for (const auto& c : rep.checks) {
        out << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name;
        if (c.tolerance > 0.0) out << "  (err " << c.max_error << " vs tol " << c.tolerance << ")";
        if (!c.details.empty()) out << "  -- " << c.details;
        out << "\n";
    }
}

void emit(const json& j, bool as_json, const std::string& out_path,
          const std::vector<VerificationReport>& reps) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw CLI::RuntimeError("cannot open --out path", 2);
        out = &file;
    }
    if (as_json) {
        *out << j.dump(2) << "\n";
    } else if (!reps.empty()) {
        for (const auto& r : reps) print_report(r, *out);
    } else {
        *out << j.dump(2) << "\n";
    }
}

std::vector<int> parse_dims(const std::string& dims) {
    std::vector<int> out;
    std::stringstream ss(dims);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

// Pipeline suite: exact master match, per-dimension listings, constants.
VerificationReport run_pipeline_suite() {
    VerificationReport rep;
    rep.suite = "pipeline";
    const MasterFunctions mf = assemble_master();
    rep.add("master-one-variable", equals(mf.F, fixtures::master_one_variable()), 0.0, 0.0, "exact");
    rep.add("master-two-variable", equals(mf.G, fixtures::master_two_variable()), 0.0, 0.0, "exact");
    for (int m : {4, 6, 8}) {
        const CurvatureSet set = extract_dimension(m);
        rep.add("listing-one-variable-m" + std::to_string(m),
                equals(set.K_delta, fixtures::curvature_one_variable(m)), 0.0, 0.0, "exact");
        rep.add("listing-two-variable-m" + std::to_string(m),
                equals(set.H_delta, fixtures::curvature_two_variable(m)), 0.0, 0.0, "exact");
    }
    for (int m = 4; m <= 12; m += 2) {
        const bool ok = scalar_constant(m) == -BigRational(factorial(m / 2 - 1)) / 12;
        rep.add("scalar-constant-m" + std::to_string(m), ok, 0.0, 0.0, "exact");
    }
    return rep;
}

VerificationReport run_quadrature_suite(int samples, unsigned seed, double tol) {
    VerificationReport rep;
    rep.suite = "quadrature";
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick_p(1, 3), pick_m(2, 6), coin(0, 1);
    std::uniform_real_distribution<double> pick_s(0.1, 10.0);
    double maxerr = 0.0;
    for (int c = 0; c < samples; ++c) {
        const int p = pick_p(rng), q = pick_p(rng);
        const int l = coin(rng) ? pick_p(rng) : 0;
        const int m = 2 * pick_m(rng);
        const double s = pick_s(rng), t = l > 0 ? pick_s(rng) : 1.0;
        const double closed = 0.5 * basis_value(p, q, l, m, s, t);
        const double quad = quadrature_oracle(p, q, l, m, s, t);
        maxerr = std::max(maxerr, std::abs(quad - closed) / std::max(1.0, std::abs(closed)));
    }
    rep.add("resolvent-integrals", maxerr < tol, maxerr, tol,
            std::to_string(samples) + " random cases, relative deviation");
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"modular-curvature workbench"};
    app.require_subcommand(1);

    bool as_json = false;
    std::string out_path;
    app.add_flag("--json", as_json, "emit JSON instead of aligned text");
    app.add_option("--out", out_path, "write output to a file");

    // ---- derive ----------------------------------------------------------
    auto* derive = app.add_subcommand("derive", "derive the curvature functions of one dimension");
    int d_dim = 4;
    std::string d_operator = "laplacian", d_form = "k";
    derive->add_option("--dim", d_dim, "even dimension >= 4")->required();
    derive->add_option("--operator", d_operator)->check(CLI::IsMember({"laplacian", "dirac"}));
    derive->add_option("--form", d_form)->check(CLI::IsMember({"k", "log"}));

    // ---- verify ----------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::string v_suite = "all", v_dims = "4,6,8", v_rel_dims = "4,6,8,10";
    int v_samples = 100, v_seeds = 20, v_size = 6, v_rank = 2, v_radius = 4;
    unsigned v_seed = 1;
    double v_tol = 0.0;
    verify->add_option("--suite", v_suite)
        ->check(CLI::IsMember({"all", "pipeline", "relations", "oracle", "clifford", "quadrature", "theta"}));
    verify->add_option("--dims", v_dims, "comma-separated dimensions");
    verify->add_option("--samples", v_samples);
    verify->add_option("--seed", v_seed);
    verify->add_option("--seeds", v_seeds, "number of oracle seeds");
    verify->add_option("--size", v_size, "matrix model size");
    verify->add_option("--rank", v_rank, "torus rank for the theta suite");
    verify->add_option("--radius", v_radius, "truncation radius for the theta suite");
    verify->add_option("--tol", v_tol, "override the suite default tolerance");

    // ---- eval ------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "evaluate a curvature function at a point");
    int e_dim = 4;
    std::string e_function = "K", e_at = "s=1";
    eval->add_option("--dim", e_dim)->required();
    eval->add_option("--function", e_function, "K, H, T, Ttilde, L, M, P, Q, K_EH, H_EH")->required();
    eval->add_option("--at", e_at, "comma-separated s=..[,t=..]")->required();

    // ---- table -----------------------------------------------------------
    auto* table = app.add_subcommand("table", "print per-dimension curvature listings");
    std::string t_dims = "4,6,8";
    std::string t_operator = "laplacian";
    table->add_option("--dims", t_dims);
    table->add_option("--operator", t_operator)->check(CLI::IsMember({"laplacian", "dirac"}));

    // ---- dumps -----------------------------------------------------------
    auto* dump_b2 = app.add_subcommand("dump-b2", "print the resolvent coefficient term table");
    auto* dump_spectral =
        app.add_subcommand("dump-spectral", "print the spectral-basis expansion of the averaged terms");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        std::vector<VerificationReport> reps;
        json out;

        if (*derive) {
            const CurvatureSet set = extract_dimension(d_dim);
            const bool dirac = d_operator == "dirac";
            out["dim"] = d_dim;
            out["operator"] = d_operator;
            out["form"] = d_form;
            if (d_form == "k") {
                out["K"] = (dirac ? set.K_dirac : set.K_delta).str();
                out["H"] = (dirac ? set.H_dirac : set.H_delta).str();
            } else {
                // The log form is transcendental; report a sample grid.
                const LogForm lf = log_form(set);
                json ks = json::array(), hs = json::array();
                for (double s : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
                    ks.push_back({s, lf.K.raw(s)});
                    hs.push_back({s, -0.4 * s, lf.H.raw(s, -0.4 * s)});
                }
                out["K_samples"] = ks;
                out["H_samples"] = hs;
            }
            out["c_scal"] = to_string_rat(set.c_scal);
            out["normalization"] = {{"four_pi_exponent", set.normalization.four_pi_exponent},
                                    {"gamma_inverse", to_string_rat(set.normalization.gamma_inverse)},
                                    {"half_factor", to_string_rat(set.normalization.half_factor)}};
            emit(out, as_json, out_path, reps);
            return 0;
        }

        if (*verify) {
            if (v_suite == "pipeline" || v_suite == "all") reps.push_back(run_pipeline_suite());
            if (v_suite == "relations" || v_suite == "all") {
                const std::string dims = verify->count("--dims") ? v_dims : v_rel_dims;
                for (int m : parse_dims(dims))
                    reps.push_back(verify_relations(m, v_samples, v_tol > 0 ? v_tol : 1e-10, v_seed + m));
            }
            if (v_suite == "clifford" || v_suite == "all")
                for (int m : parse_dims(v_dims)) reps.push_back(verify_sphere_rules(m, v_seed));
            if (v_suite == "quadrature" || v_suite == "all")
                reps.push_back(run_quadrature_suite(v_samples >= 50 ? v_samples : 50, v_seed,
                                                    v_tol > 0 ? v_tol : 1e-8));
            if (v_suite == "oracle" || v_suite == "all") {
                const double tol = v_tol > 0 ? v_tol : 1e-9;
                reps.push_back(verify_weyl_derivatives(v_size, v_seed, tol));
                reps.push_back(verify_trace_properties(v_size, v_seed, 1e-12));
                reps.push_back(verify_nabla_exchange(v_size, v_seed, tol));
                for (int m : parse_dims(v_dims))
                    for (int s = 0; s < v_seeds; ++s)
                        reps.push_back(verify_variation_lemmas(m, v_size, v_seed + s, tol));
            }
            if (v_suite == "theta" || v_suite == "all")
                reps.push_back(verify_theta_axioms(v_rank, v_radius, v_seed, v_tol > 0 ? v_tol : 1e-12));

            bool all_ok = true;
            json jr = json::array();
            for (const auto& r : reps) {
                all_ok = all_ok && r.all_pass();
                jr.push_back(report_to_json(r));
            }
            out = json{{"command", "verify"}, {"suite", v_suite}, {"seed", v_seed},
                       {"ok", all_ok}, {"reports", jr}};
            emit(out, as_json, out_path, reps);
            return all_ok ? 0 : 1;
        }

        if (*eval) {
            double s = 0.0, t = 0.0;
            bool have_t = false;
            std::stringstream ss(e_at);
            std::string kv;
            while (std::getline(ss, kv, ',')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw CLI::RuntimeError("--at expects s=..[,t=..]", 2);
                const std::string key = kv.substr(0, eq);
                const double val = std::stod(kv.substr(eq + 1));
                if (key == "s") s = val;
                else if (key == "t") { t = val; have_t = true; }
                else throw CLI::RuntimeError("unknown variable in --at: " + key, 2);
            }
            const CurvatureSet set = extract_dimension(e_dim);
            double value = 0.0;
            if (e_function == "K" || e_function == "H") {
                const LogForm lf = log_form(set);
                value = e_function == "K" ? lf.K.raw(s) : lf.H.raw(s, t);
            } else {
                const EHFunctions eh = eh_functions(set);
                const ModularExpr& f = eh_lookup(eh, e_function);
                value = f.arity == 2 ? f(s, t) : f(s);
                (void)have_t;
            }
            std::cout.precision(17);
            std::cout << value << "\n";
            return 0;
        }

        if (*table) {
            const bool dirac = t_operator == "dirac";
            json rows = json::array();
            for (int m : parse_dims(t_dims)) {
                const CurvatureSet set = extract_dimension(m);
                const std::string K = (dirac ? set.K_dirac : set.K_delta).str();
                const std::string H = (dirac ? set.H_dirac : set.H_delta).str();
                rows.push_back({{"dim", m}, {"K", K}, {"H", H}, {"c_scal", to_string_rat(set.c_scal)}});
                if (!as_json) {
                    std::cout << "m = " << m << "\n  K = " << K << "\n  H = " << H
                              << "\n  c = " << to_string_rat(set.c_scal) << "\n";
                }
            }
            if (as_json) emit(json{{"table", rows}}, true, out_path, reps);
            return 0;
        }

        if (*dump_b2) {
            json terms = json::array();
            const SymbolSum b2 = resolvent_b2();
            for (const auto& term : b2.terms()) terms.push_back(term.str());
            emit(json{{"count", terms.size()}, {"terms", terms}}, as_json, out_path, reps);
            return 0;
        }

        if (*dump_spectral) {
            json terms = json::array();
            for (const auto& sf : spectral_expansion()) {
                json e;
                e["kind"] = insertion_name(sf.kind);
                e["basis"] = sf.basis == BasisKind::K ? "K" : sf.basis == BasisKind::H ? "H" : "C";
                e["exponents"] = sf.exponents;
                e["prefactor"] = sf.prefactor.str();
                terms.push_back(e);
            }
            emit(json{{"count", terms.size()}, {"terms", terms}}, as_json, out_path, reps);
            return 0;
        }
    } catch (const CLI::RuntimeError& e) {
        std::cerr << e.what() << "\n";
        return e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
