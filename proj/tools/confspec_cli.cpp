// confspec command-line front end: spectrum / compare / quasidisc / ahlfors / cq.
// All outputs are JSON (CSV for the per-n comparison table) with the config
// echoed verbatim, so identical invocations produce byte-identical artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "confspec/discspec.hpp"
#include "confspec/map_io.hpp"
#include "confspec/quasidisc.hpp"
#include "confspec/stability.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

// validation error -> 2, convergence failure -> 3, bound violated -> 4
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitBoundViolated = 4;

nlohmann::json load_json_arg(const std::string& arg, const char* what) {
    std::string text = arg;
    if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
        std::ifstream in(arg);
        if (!in) throw confspec::InvalidParameter(std::string(what) + ": cannot open file " + arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw confspec::InvalidParameter(std::string(what) + ": malformed JSON");
    return j;
}

// temp file + rename, so readers never observe a partial artifact
void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

struct GridDefaults {
    int nr = 64;
    int ntheta = 256;
};

// CONFSPEC_DEFAULT_GRID="NRxNTHETA" overrides the built-in 64x256 default.
GridDefaults grid_defaults() {
    GridDefaults d;
    if (const char* env = std::getenv("CONFSPEC_DEFAULT_GRID")) {
        int nr = 0, nt = 0;
        if (std::sscanf(env, "%dx%d", &nr, &nt) == 2 && nr > 0 && nt > 0) {
            d.nr = nr;
            d.ntheta = nt;
        }
    }
    return d;
}

nlohmann::json config_echo(const nlohmann::json& extra) {
    nlohmann::json j = extra;
    j["tool"] = "confspec";
    j["version"] = kToolVersion;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet Laplacian eigenvalues of plane domains via conformal "
                 "transplantation to a weighted problem on the unit disc, with "
                 "spectral stability bounds"};
    app.require_subcommand(1);

    const GridDefaults gd = grid_defaults();

    std::string map_arg, map2_arg, curve_arg, out_path;
    std::string p_str = "4";
    int n_eigs = 10, m_max = 12, k_max = 12, nr = gd.nr, ntheta = gd.ntheta;
    bool csv = false;
    std::uint64_t seed = 0;
    double K = 1.0, cq_q = 4.0, cq_tol = 1e-10;
    int cq_basis = 32;

    auto add_grid_flags = [&](CLI::App* cmd) {
        cmd->add_option("--m-max", m_max, "basis angular order cutoff");
        cmd->add_option("--k-max", k_max, "basis radial index cutoff");
        cmd->add_option("--nr", nr, "radial quadrature nodes");
        cmd->add_option("--ntheta", ntheta, "angular quadrature nodes");
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--seed", seed, "seed for randomized checks");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of one mapped domain");
    spectrum->add_option("--map", map_arg, "map spec (inline JSON or path)")->required();
    spectrum->add_option("--n", n_eigs, "number of eigenvalues");
    add_grid_flags(spectrum);

    CLI::App* compare = app.add_subcommand("compare", "stability report for a pair of maps");
    compare->add_option("--map", map_arg, "first map spec")->required();
    compare->add_option("--map2", map2_arg, "second map spec")->required();
    compare->add_option("--p", p_str, "integrability exponent p > 2 ('inf' accepted)");
    compare->add_option("--n", n_eigs, "number of eigenvalues");
    compare->add_flag("--csv", csv, "emit the per-n table as CSV");
    add_grid_flags(compare);

    CLI::App* quasidisc = app.add_subcommand("quasidisc", "K-quasidisc constants");
    quasidisc->add_option("--K", K, "quasiconformality constant K >= 1")->required();
    quasidisc->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* ahlfors = app.add_subcommand("ahlfors", "3-point constant of a discrete curve");
    ahlfors->add_option("--curve", curve_arg, "curve (inline JSON or path)")->required();
    ahlfors->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* cq = app.add_subcommand("cq", "Sobolev constant C(q) estimate");
    cq->add_option("--q", cq_q, "exponent q >= 2");
    cq->add_option("--basis", cq_basis, "radial basis size");
    cq->add_option("--tol", cq_tol, "convergence tolerance");
    cq->add_option("--out", out_path, "output path (default stdout)");
    cq->add_option("--seed", seed, "0 = deterministic first-mode start");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) {
            const auto map = confspec::parse_map_spec(load_json_arg(map_arg, "--map"));
            const auto basis = confspec::build_basis(m_max, k_max);
            if (n_eigs < 1 || n_eigs > basis.size())
                throw confspec::InvalidParameter("--n must be in [1, basis size]");
            const auto grid = confspec::build_grid(nr, ntheta);
            const confspec::ConformalWeight h(map);
            const auto spec = confspec::solve_weighted(basis, h.values(grid), grid, n_eigs,
                                                       map.label(),
                                                       2 * std::max(0, map.degree() - 1));
            const auto spec2 = confspec::solve_weighted(basis, h.values(confspec::doubled(grid)),
                                                        confspec::doubled(grid), n_eigs,
                                                        map.label());
            nlohmann::json lam = nlohmann::json::array();
            double quad_err = 0.0;
            for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
                lam.push_back({{"n", i + 1}, {"lambda", spec.eigenvalues[i]}});
                if (i < spec2.eigenvalues.size())
                    quad_err = std::max(quad_err,
                                        std::fabs(spec.eigenvalues[i] - spec2.eigenvalues[i]));
            }
            nlohmann::json out{
                {"config", config_echo({{"command", "spectrum"},
                                        {"map", map.label()},
                                        {"n", n_eigs},
                                        {"m_max", m_max},
                                        {"k_max", k_max},
                                        {"nr", nr},
                                        {"ntheta", ntheta},
                                        {"seed", seed}})},
                {"spectrum", lam},
                {"kstar", confspec::kstar(spec)},
                {"quadrature_error", quad_err},
                {"degenerate", spec.degenerate},
                {"warnings", nlohmann::json::array()},
            };
            out["warnings"].push_back(
                "injectivity of the map is assumed; |phi'|>0 was checked on a 64x256 grid");
            if (spec.bandwidth_warning)
                out["warnings"].push_back("ntheta may be too low for the weight's angular bandwidth");
            write_output(out_path, out.dump(2));
            return 0;
        }

        if (compare->parsed()) {
            const auto m1 = confspec::parse_map_spec(load_json_arg(map_arg, "--map"));
            const auto m2 = confspec::parse_map_spec(load_json_arg(map2_arg, "--map2"));
            double p;
            if (p_str == "inf") {
                p = std::numeric_limits<double>::infinity();
            } else {
                try {
                    p = std::stod(p_str);
                } catch (const std::exception&) {
                    throw confspec::InvalidParameter("--p must be a number > 2 or 'inf'");
                }
            }
            if (!(p > 2.0)) throw confspec::InvalidParameter("--p must be > 2");
            confspec::SolverParams params;
            params.m_max = m_max;
            params.k_max = k_max;
            params.nr = nr;
            params.ntheta = ntheta;
            const auto rep = confspec::full_report(m1, m2, p, n_eigs, params);
            if (csv) {
                write_output(out_path, confspec::report_to_csv(rep));
            } else {
                nlohmann::json out = confspec::report_to_json(rep);
                out["config"] = config_echo({{"command", "compare"},
                                             {"map", m1.label()},
                                             {"map2", m2.label()},
                                             {"p", std::isinf(p) ? nlohmann::json("inf")
                                                                 : nlohmann::json(p)},
                                             {"n", n_eigs},
                                             {"m_max", m_max},
                                             {"k_max", k_max},
                                             {"nr", nr},
                                             {"ntheta", ntheta},
                                             {"seed", seed}});
                write_output(out_path, out.dump(2));
            }
            for (int i = 0; i < rep.n_max; ++i)
                if (!rep.satisfied[i]) {
                    std::cerr << "bound violated beyond slack at n=" << (i + 1)
                              << " (theorem inequality; indicates a solver/quadrature bug)\n";
                    return kExitBoundViolated;
                }
            return 0;
        }

        if (quasidisc->parsed()) {
            const auto qp = confspec::quasidisc_params(K);
            nlohmann::json out = confspec::quasidisc_to_json(qp);
            out["config"] = config_echo({{"command", "quasidisc"}, {"K", K}});
            write_output(out_path, out.dump(2));
            return 0;
        }

        if (ahlfors->parsed()) {
            const auto curve = confspec::parse_curve(load_json_arg(curve_arg, "--curve"));
            const double ratio = confspec::ahlfors_constant(curve);
            nlohmann::json out{
                {"config", config_echo({{"command", "ahlfors"},
                                        {"vertices", curve.size()}})},
                {"ratio", ratio},
                {"note", "arc diameters sampled at the given vertices; refine by densification"},
            };
            write_output(out_path, out.dump(2));
            return 0;
        }

        if (cq->parsed()) {
            const auto est = confspec::estimate_cq(cq_q, cq_basis, cq_tol, seed);
            nlohmann::json out = confspec::cq_to_json(est);
            out["config"] = config_echo({{"command", "cq"},
                                         {"q", cq_q},
                                         {"basis", cq_basis},
                                         {"tol", cq_tol},
                                         {"seed", seed}});
            write_output(out_path, out.dump(2));
            if (!est.converged) return kExitConvergence;
            return 0;
        }
    } catch (const confspec::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
