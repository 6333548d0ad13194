#include "qumera/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "json_util.hpp"
#include "qumera/io.hpp"
#include "qumera/random.hpp"

namespace qumera {

using detail::ordered_json;

namespace {

ordered_json spectrum_table(const SpectralData& sd) {
    ordered_json table = ordered_json::array();
    for (const cplx& eta : sd.eigenvalues) table.push_back(detail::complex_json(eta));
    return table;
}

ordered_json verdicts_json(const SpectralData& sd) {
    ordered_json v;
    v["mixing"] = to_string(sd.verdict);
    v["ergodic"] = sd.ergodic;
    v["self_adjoint"] = sd.self_adjoint;
    v["unit_circle_ok"] = sd.unit_circle_ok;
    v["one_in_spectrum"] = sd.one_in_spectrum;
    return v;
}

ordered_json expectation_json(const Expectation& e) {
    ordered_json r;
    r["value"] = e.value();
    r["imag_residual"] = e.imag();
    r["hermitian_input"] = e.hermitian_input;
    r["suspect"] = e.suspect();
    return r;
}

Eigen::MatrixXcd random_unit_hermitian(Rng& rng, std::size_t n) {
    Eigen::MatrixXcd h = rng.hermitian(n);
    return h / h.norm();
}

struct Invocation {
    std::string command;
    ordered_json inputs = ordered_json::object();
    ordered_json params = ordered_json::object();
    ordered_json results = ordered_json::object();
    ordered_json diagnostics = ordered_json::object();
    ordered_json spectrum_out; // null unless set
    ordered_json verdicts = ordered_json::object();
    double tol = kDefaultTol;
    ordered_json seed; // null unless set
    int exit_code = 0;

    std::string render(double wall_ms) const {
        ordered_json j;
        j["command"] = command;
        j["inputs"] = inputs;
        j["params"] = params;
        j["tolerance"] = tol;
        j["seed"] = seed;
        j["results"] = results;
        j["diagnostics"] = diagnostics;
        j["spectrum"] = spectrum_out.is_null() ? ordered_json() : spectrum_out;
        j["verdicts"] = verdicts;
        j["wall_time_ms"] = wall_ms;
        return detail::dump_17(j);
    }
};

double env_tol() {
    if (const char* s = std::getenv("QUMERA_TOL")) {
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end && *end == '\0' && v > 0.0) return v;
    }
    return kDefaultTol;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"homogeneous MERA states: validation, channels, spectra, correlations"};
    app.require_subcommand(1);

    std::string spec_path, obs_path, a_path, b_path, sigma_path, out_path;
    std::size_t n_sites = 16, site = 1, depth = 1, count = 8, trials = 5, dim = 2, k_anchor = 0;
    std::uint64_t seed = 0;
    bool symmetric = false, avg = false, thermo = false;
    double tol = env_tol();

    auto add_tol = [&](CLI::App* cmd) { cmd->add_option("--tol", tol, "tolerance (default 1e-10)"); };

    auto* c_validate = app.add_subcommand("validate", "check the isometric constraints");
    c_validate->add_option("--spec", spec_path)->required();
    add_tol(c_validate);

    auto* c_spectrum = app.add_subcommand("spectrum", "transfer-operator spectrum and verdicts");
    c_spectrum->add_option("--spec", spec_path)->required();
    add_tol(c_spectrum);

    auto* c_fixed = app.add_subcommand("fixed-point", "fixed point of the averaged channel");
    c_fixed->add_option("--spec", spec_path)->required();
    add_tol(c_fixed);

    auto* c_expect = app.add_subcommand("expect", "local or site-averaged expectation value");
    c_expect->add_option("--spec", spec_path)->required();
    c_expect->add_option("--N", n_sites)->required();
    c_expect->add_option("--site", site);
    c_expect->add_flag("--symmetric", symmetric);
    c_expect->add_option("--obs", obs_path)->required();
    add_tol(c_expect);

    auto* c_corr = app.add_subcommand("correlate", "two-point shadow correlators");
    c_corr->add_option("--spec", spec_path)->required();
    c_corr->add_option("--A", a_path)->required();
    c_corr->add_option("--B", b_path)->required();
    c_corr->add_option("--depth", depth)->required();
    c_corr->add_option("--N", n_sites);
    c_corr->add_option("--kA", k_anchor);
    c_corr->add_flag("--avg", avg);
    c_corr->add_flag("--thermo", thermo);
    c_corr->add_option("--sigma", sigma_path);
    add_tol(c_corr);

    auto* c_scaling = app.add_subcommand("scaling", "correlation scaling exponents");
    c_scaling->add_option("--spec", spec_path)->required();
    c_scaling->add_option("--count", count);
    add_tol(c_scaling);

    auto* c_oracle = app.add_subcommand("oracle-check", "certify channel results against brute force");
    c_oracle->add_option("--spec", spec_path)->required();
    c_oracle->add_option("--N", n_sites)->required();
    c_oracle->add_option("--trials", trials);
    c_oracle->add_option("--seed", seed)->required();
    add_tol(c_oracle);

    auto* c_random = app.add_subcommand("random", "generate a random valid spec file");
    c_random->add_option("--d", dim)->required();
    c_random->add_option("--seed", seed)->required();
    c_random->add_option("--out", out_path)->required();
    add_tol(c_random);

    std::vector<std::string> argv_strings;
    argv_strings.push_back("qumera");
    for (const std::string& a : args) argv_strings.push_back(a);
    std::vector<char*> argv;
    for (std::string& s : argv_strings) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 3;
    }

    Invocation inv;
    inv.tol = tol;
    auto t0 = std::chrono::steady_clock::now();

    try {
        if (app.got_subcommand(c_validate)) {
            inv.command = "validate";
            inv.inputs["spec"] = file_digest(spec_path);
            MeraSpec spec = read_spec_file(spec_path);
            ValidationReport r = validate(spec, tol);
            inv.results["chi_left_residual"] = r.chi_left;
            inv.results["chi_right_residual"] = r.chi_right;
            inv.results["lambda_isometry_residual"] = r.lam_iso;
            inv.results["hat_norm_residual"] = r.hat_norm;
            inv.verdicts["pass"] = r.pass;
            inv.exit_code = r.pass ? 0 : 1;
        } else if (app.got_subcommand(c_spectrum)) {
            inv.command = "spectrum";
            inv.inputs["spec"] = file_digest(spec_path);
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);
            TransferMatrix tm = transfer_matrix(averaged_channel(spec));
            const SpectralData& sd = tm.spectral();
            inv.spectrum_out = spectrum_table(sd);
            inv.verdicts = verdicts_json(sd);
            inv.results["subleading_modulus"] = sd.subleading_modulus;
            inv.results["fixed_point_residual"] = sd.fixed_point_residual;
        } else if (app.got_subcommand(c_fixed)) {
            inv.command = "fixed-point";
            inv.inputs["spec"] = file_digest(spec_path);
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);
            TransferMatrix tm = transfer_matrix(averaged_channel(spec));
            const SpectralData& sd = tm.spectral();
            inv.spectrum_out = spectrum_table(sd);
            inv.verdicts = verdicts_json(sd);
            if (sd.verdict != MixingVerdict::Mixing)
                throw refusal("fixed point requires a mixing channel", to_string(sd.verdict));
            inv.results["fixed_point"] = detail::matrix_json(*sd.fixed_point);
            inv.results["stationarity_residual"] = sd.fixed_point_residual;
        } else if (app.got_subcommand(c_expect)) {
            inv.command = "expect";
            inv.inputs["spec"] = file_digest(spec_path);
            inv.inputs["obs"] = file_digest(obs_path);
            inv.params["N"] = n_sites;
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);
            ObservableFile obs = read_observable_file(obs_path);
            Expectation e;
            if (obs.has_terms) {
                inv.params["mode"] = "energy-density";
                e = energy_density(spec, n_sites, obs.terms);
            } else if (symmetric) {
                inv.params["mode"] = "symmetric";
                e = symmetric_expectation(spec, n_sites, *obs.a);
            } else {
                if (!c_expect->count("--site"))
                    throw io_error("expect needs --site K or --symmetric");
                inv.params["mode"] = "local";
                inv.params["site"] = site;
                e = local_expectation(spec, n_sites, site, *obs.a);
            }
            inv.results = expectation_json(e);
        } else if (app.got_subcommand(c_corr)) {
            inv.command = "correlate";
            inv.inputs["spec"] = file_digest(spec_path);
            inv.inputs["A"] = file_digest(a_path);
            inv.inputs["B"] = file_digest(b_path);
            inv.params["depth"] = depth;
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);
            ObservableFile fa = read_observable_file(a_path);
            ObservableFile fb = read_observable_file(b_path);
            if (!fa.a || !fb.a) throw io_error("correlate needs observables under key A");
            if (thermo) {
                if (sigma_path.empty()) throw io_error("--thermo needs --sigma FILE");
                inv.inputs["sigma"] = file_digest(sigma_path);
                inv.params["mode"] = "thermo";
                Eigen::MatrixXcd sigma = read_sigma_file(sigma_path);
                Expectation raw = evolved_pair_correlator(spec, depth, sigma, *fa.a, *fb.a);
                Expectation conn = connected_correlator(spec, *fa.a, *fb.a, depth, sigma);
                Expectation ath = thermo_expectation(spec, *fa.a);
                Expectation bth = thermo_expectation(spec, *fb.a);
                inv.results["correlator"] = expectation_json(raw);
                inv.results["connected"] = expectation_json(conn);
                inv.results["A_thermo"] = ath.value();
                inv.results["B_thermo"] = bth.value();
            } else if (avg) {
                if (!c_corr->count("--N")) throw io_error("correlate --avg needs --N");
                inv.params["mode"] = "symmetric";
                inv.params["N"] = n_sites;
                inv.results = expectation_json(
                    symmetric_correlator(spec, n_sites, depth, *fa.a, *fb.a));
            } else {
                if (!c_corr->count("--kA"))
                    throw io_error("correlate needs one of --kA, --avg, --thermo");
                if (!c_corr->count("--N")) throw io_error("correlate --kA needs --N");
                inv.params["mode"] = "anchored";
                inv.params["N"] = n_sites;
                inv.params["kA"] = k_anchor;
                inv.results = expectation_json(
                    shadow_correlator(spec, n_sites, k_anchor, depth, *fa.a, *fb.a));
            }
        } else if (app.got_subcommand(c_scaling)) {
            inv.command = "scaling";
            inv.inputs["spec"] = file_digest(spec_path);
            inv.params["count"] = count;
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);
            TransferMatrix tm = transfer_matrix(averaged_channel(spec));
            const SpectralData& sd = tm.spectral();
            inv.spectrum_out = spectrum_table(sd);
            inv.verdicts = verdicts_json(sd);
            std::vector<double> exps = scaling_exponents(spec, count);
            inv.results["exponents"] = exps;
            if (!exps.empty()) inv.results["leading"] = exps.front();
        } else if (app.got_subcommand(c_oracle)) {
            inv.command = "oracle-check";
            inv.inputs["spec"] = file_digest(spec_path);
            inv.params["N"] = n_sites;
            inv.params["trials"] = trials;
            inv.seed = seed;
            MeraSpec spec = read_spec_file(spec_path);
            require_valid(spec, tol);

            FullState psi = build_state(spec, n_sites);
            const std::size_t d3 = spec.d * spec.d * spec.d;
            Rng rng(seed);

            double thm1_max = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                Eigen::MatrixXcd a = random_unit_hermitian(rng, d3);
                cplx oracle(0.0, 0.0);
                for (std::size_t k = 1; k <= n_sites; ++k) oracle += direct_expectation(psi, k, a);
                oracle /= static_cast<double>(n_sites);
                Expectation e = symmetric_expectation(spec, n_sites, a);
                thm1_max = std::max(thm1_max, std::abs(e.raw - oracle));
            }

            double eq18_max = 0.0;
            for (std::size_t k = 1; k <= n_sites; ++k) {
                Eigen::MatrixXcd lhs = triple_density(spec, n_sites, k);
                eq18_max = std::max(eq18_max, (lhs - triple_density_oracle(psi, k)).norm());
            }

            double thm2_max = 0.0, thm2_sym_max = 0.0;
            bool thm2_ran = n_sites >= 16;
            if (thm2_ran) {
                std::size_t anchors = n_sites / 2;
                for (std::size_t t = 0; t < trials; ++t) {
                    Eigen::MatrixXcd a = random_unit_hermitian(rng, d3);
                    Eigen::MatrixXcd b = random_unit_hermitian(rng, d3);
                    std::size_t k_a = 2 * ((t % anchors) + 1);
                    Expectation lhs = shadow_correlator(spec, n_sites, k_a, 1, a, b);
                    cplx rhs = oracle_shadow_average(psi, k_a, 1, a, b);
                    thm2_max = std::max(thm2_max, std::abs(lhs.raw - rhs));

                    Expectation sym = symmetric_correlator(spec, n_sites, 1, a, b);
                    cplx rhs_sym(0.0, 0.0);
                    for (std::size_t w = 0; w < anchors; ++w)
                        rhs_sym += oracle_shadow_average(psi, 2 * (w + 1), 1, a, b);
                    rhs_sym /= static_cast<double>(anchors);
                    thm2_sym_max = std::max(thm2_sym_max, std::abs(sym.raw - rhs_sym));
                }
            }
            inv.results["symmetric_expectation_max_residual"] = thm1_max;
            inv.results["triple_density_max_residual"] = eq18_max;
            inv.results["shadow_correlator_max_residual"] = thm2_ran ? ordered_json(thm2_max) : ordered_json();
            inv.results["symmetric_correlator_max_residual"] =
                thm2_ran ? ordered_json(thm2_sym_max) : ordered_json();
            bool pass = thm1_max <= tol && eq18_max <= tol &&
                        (!thm2_ran || (thm2_max <= tol && thm2_sym_max <= tol));
            inv.verdicts["pass"] = pass;
            inv.exit_code = pass ? 0 : 1;
        } else if (app.got_subcommand(c_random)) {
            inv.command = "random";
            inv.params["d"] = dim;
            inv.params["out"] = out_path;
            inv.seed = seed;
            MeraSpec spec = random_spec(dim, seed);
            std::string payload = write_spec_string(spec);
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw io_error("cannot write " + out_path);
            f << payload;
            f.close();
            inv.inputs["spec"] = bytes_digest(payload);
            ValidationReport r = validate(spec, tol);
            inv.results["chi_left_residual"] = r.chi_left;
            inv.results["chi_right_residual"] = r.chi_right;
            inv.results["lambda_isometry_residual"] = r.lam_iso;
            inv.results["hat_norm_residual"] = r.hat_norm;
            inv.verdicts["pass"] = r.pass;
            inv.exit_code = r.pass ? 0 : 1;
        }
    } catch (const validation_error& e) {
        inv.diagnostics["error"] = e.what();
        inv.verdicts["refusal"] = "validation failure";
        inv.exit_code = 1;
    } catch (const refusal& e) {
        inv.diagnostics["error"] = e.what();
        inv.verdicts["refusal"] = e.verdict;
        inv.exit_code = 2;
    } catch (const io_error& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const structural_error& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 3;
    }

    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    out << inv.render(wall_ms);
    return inv.exit_code;
}

} // namespace qumera
