// Command-line front end.  Three subcommands over one JSON problem spec:
//
//   solve        trajectory of the order-alpha Cauchy problem, CSV
//   verify       every library identity checked, one JSONL record per check
//   convergence  per-term truncation table for the perturbed cosine, CSV
//
// Exit codes: 0 pass, 2 spec error, 3 numerical error, 4 verification
// failure.  Diagnostics for 2/3 go to stderr as a single JSON record.
// FRACCOS_TERM_CAP overrides the series term cap from the environment.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraccos/fraccos.hpp"

namespace {

using namespace fraccos;

struct CliOptions {
    std::string spec_path;
    std::string out_path = "-";
    std::uint64_t seed = 0;
    bool seed_given = false;
    double tol = 0.0;
    bool tol_given = false;
};

void emit_diagnostic(const std::string& kind, const std::string& detail) {
    std::cerr << JsonlRecord().field("error", kind).field("detail", detail).str() << "\n";
}

class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

ProblemSpec load_spec(const CliOptions& opts) {
    std::ifstream in(opts.spec_path);
    if (!in) throw std::invalid_argument("cannot read spec file: " + opts.spec_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
    }
    if (opts.seed_given) j["seed"] = opts.seed;
    if (opts.tol_given) j["tol"] = opts.tol;
    ProblemSpec spec = parse_problem_spec(j);
    if (const char* cap = std::getenv("FRACCOS_TERM_CAP")) {
        char* end = nullptr;
        const long value = std::strtol(cap, &end, 10);
        if (end == cap || *end != '\0' || value < 1)
            throw std::invalid_argument("FRACCOS_TERM_CAP must be a positive integer");
        spec.term_cap = static_cast<int>(value);
    }
    return spec;
}

std::vector<double> positive_grid(const ProblemSpec& spec) {
    std::vector<double> grid;
    for (double t : spec.t_grid.points())
        if (t > 0.0) grid.push_back(t);
    if (grid.empty()) throw std::invalid_argument("t_grid has no positive points");
    return grid;
}

std::vector<double> lambda_points(const ProblemSpec& spec) {
    if (!spec.lambda_list.empty()) return spec.lambda_list;
    PanelMesh probe(spec.laplace.T_max, spec.laplace.panels, spec.laplace.nodes_per_panel);
    const ExponentialBound env =
        estimate_exponential_bound(spec.alpha, spec.A, probe.node_times());
    const ExponentialBound env_pert =
        estimate_exponential_bound(spec.alpha, spec.A + spec.B, probe.node_times());
    const double omega = std::max(env.omega, env_pert.omega);
    return {omega + 1.0, omega + 2.0, omega + 5.0};
}

int cmd_solve(const ProblemSpec& spec, OutputTarget& out) {
    const std::vector<double> grid = spec.t_grid.points();
    std::vector<double> positive;
    for (double t : grid)
        if (t > 0.0) positive.push_back(t);

    CauchyTrajectory traj;
    if (!positive.empty())
        traj = solve_cauchy(spec.alpha, spec.A, spec.B, spec.v0, spec.v1, positive,
                            spec.tol, spec.quad, spec.term_cap);

    std::vector<std::string> header{"t"};
    for (std::size_t j = 0; j < spec.A.rows(); ++j)
        header.push_back("u" + std::to_string(j));
    write_csv_row(out.stream(), header);

    std::size_t cursor = 0;
    for (double t : grid) {
        std::vector<std::string> row{format_g17(t)};
        if (t > 0.0) {
            for (double v : traj.states[cursor]) row.push_back(format_g17(v));
            ++cursor;
        } else {
            for (double v : spec.v0) row.push_back(format_g17(v));
        }
        write_csv_row(out.stream(), row);
    }
    return 0;
}

struct VerifyContext {
    std::ostream& os;
    bool any_fail = false;

    void row(const std::string& check, const std::string& anchor, double measured,
             double bound, const std::string& status, double lambda = -1.0, int n = -1) {
        JsonlRecord rec;
        rec.field("check", check).field("anchor", anchor);
        if (lambda >= 0.0) rec.field("lambda", lambda);
        if (n >= 0) rec.field("n", n);
        rec.field("measured", measured).field("bound", bound).field("status", status);
        rec.field("pass", status != "fail");
        os << rec.str() << "\n";
        if (status == "fail") any_fail = true;
    }

    void pass_fail(const std::string& check, const std::string& anchor, double measured,
                   double bound, double lambda = -1.0, int n = -1) {
        row(check, anchor, measured, bound, measured <= bound ? "pass" : "fail", lambda, n);
    }
};

double worst_excess(const std::vector<double>& slacks) {
    double excess = -1e300;
    for (double s : slacks) excess = std::max(excess, -s);
    return excess;
}

void verify_functional_equation(const ProblemSpec& spec, VerifyContext& ctx) {
    const std::vector<double> grid = positive_grid(spec);
    const double t_hi = grid.back();
    const double s_lo = 0.4 * t_hi;
    const double res_a =
        check_functional_equation(spec.alpha, spec.A, s_lo, 0.9 * t_hi, spec.quad);
    ctx.pass_fail("integrated family functional equation", "family.functional_equation",
                  res_a, spec.tol);
    const double res_ab =
        check_functional_equation(spec.alpha, spec.A + spec.B, s_lo, 0.9 * t_hi, spec.quad);
    ctx.pass_fail("integrated family functional equation, perturbed generator",
                  "family.functional_equation_perturbed", res_ab, spec.tol);
}

void verify_term_bounds(const ProblemSpec& spec, VerifyContext& ctx) {
    const std::vector<double> grid = positive_grid(spec);
    const double T = grid.back();
    const int n_max = 3;
    const double slack_floor = 1e-9;

    SeriesTerm sine = seed_series_term(TermKind::sine_term, spec.alpha, spec.A, T, spec.quad);
    const ExponentialBound env =
        estimate_exponential_bound(spec.alpha, spec.A, sine.mesh->node_times());
    const double b = spec.B.inf_norm();

    ctx.pass_fail("sine term induction bound", "series.sine_term_bound",
                  worst_excess(induction_bound_check(sine, env, b)), slack_floor, -1.0, 0);
    for (int n = 1; n <= n_max; ++n) {
        SeriesTerm cross = convolve_family(FamilyKind::cosine, spec.alpha, spec.A, spec.B,
                                           sine, spec.quad);
        sine = convolve_family(FamilyKind::riemann_liouville, spec.alpha, spec.A, spec.B,
                               sine, spec.quad);
        ctx.pass_fail("sine term induction bound", "series.sine_term_bound",
                      worst_excess(induction_bound_check(sine, env, b)), slack_floor, -1.0,
                      n);
        ctx.pass_fail("cross cosine term induction bound", "series.cosine_cross_term_bound",
                      worst_excess(induction_bound_check(cross, env, b)), slack_floor, -1.0,
                      n);
    }

    SeriesTerm chain =
        seed_series_term(TermKind::cosine_chain, spec.alpha, spec.A, T, spec.quad);
    ctx.pass_fail("chain cosine term induction bound", "series.cosine_chain_term_bound",
                  worst_excess(induction_bound_check(chain, env, b)), slack_floor, -1.0, 0);
    for (int n = 1; n <= n_max; ++n) {
        chain = convolve_family(FamilyKind::riemann_liouville, spec.alpha, spec.A, spec.B,
                                chain, spec.quad);
        ctx.pass_fail("chain cosine term induction bound", "series.cosine_chain_term_bound",
                      worst_excess(induction_bound_check(chain, env, b)), slack_floor, -1.0,
                      n);
    }
}

void verify_majorants(const ProblemSpec& spec, VerifyContext& ctx) {
    const std::vector<double> grid = positive_grid(spec);
    const MajorantReport rep = majorant_check(spec.alpha, spec.A, spec.B, grid,
                                              std::min(spec.tol, 1e-9), spec.quad,
                                              spec.term_cap);
    ctx.pass_fail("sine series majorant", "series.sine_majorant",
                  worst_excess(rep.sine_slack), 1e-9);
    ctx.pass_fail("corrected cosine series majorant", "series.cosine_corrected_majorant",
                  worst_excess(rep.cosine_corrected_slack), 1e-9);
    // The power-form cosine majorant undershoots the series start near t = 0
    // for alpha < 2; it is reported, never asserted.
    ctx.row("stated cosine series majorant, reported only",
            "series.cosine_power_majorant", worst_excess(rep.cosine_power_slack), 1e-9,
            "informational");
}

void verify_resolvent(const ProblemSpec& spec, const std::vector<double>& lambdas,
                      VerifyContext& ctx) {
    for (double lambda : lambdas) {
        const ResolventPoint point(lambda, spec.alpha);
        try {
            const auto [value, report] = neumann_resolvent(point, spec.A, spec.B, 1e-12);
            const Matrix direct = inverse(
                Matrix::identity(spec.A.rows()) * point.lambda_alpha() - spec.A - spec.B);
            ctx.pass_fail("resolvent expansion matches direct inverse",
                          "resolvent.neumann_vs_direct", (value - direct).inf_norm(), 1e-10,
                          lambda);
            const ResolventBoundCheck lemma = lemma_bound_check(point, spec.A, spec.B);
            ctx.pass_fail("resolvent difference bound", "resolvent.difference_bound",
                          lemma.lhs - lemma.rhs, 1e-10, lambda);
            const ResolventBoundCheck scaled = corollary_scaled_check(point, spec.A, spec.B);
            ctx.pass_fail("scaled resolvent difference bound",
                          "resolvent.scaled_difference_bound", scaled.lhs - scaled.rhs,
                          1e-10, lambda);
            ctx.pass_fail("scaled expansion term consistency",
                          "resolvent.scaled_term_consistency", scaled.term_consistency,
                          1e-10, lambda);
        } catch (const hypothesis_violation&) {
            ctx.row("resolvent expansion hypothesis", "resolvent.neumann_vs_direct", 1.0,
                    1.0, "hypothesis_not_met", lambda);
        }
    }
}

void verify_laplace(const ProblemSpec& spec, const std::vector<double>& lambdas,
                    VerifyContext& ctx) {
    const auto emit = [&](const TransformCheckRow& r, const std::string& name) {
        if (!std::isfinite(r.tail_bound)) {
            ctx.row(name, r.check, r.residual, spec.tol, "hypothesis_not_met", r.lambda,
                    r.term_index);
            return;
        }
        ctx.pass_fail(name, r.check, r.residual, spec.tol + r.tail_bound, r.lambda,
                      r.term_index);
    };

    for (const auto& r : check_transform_relations(spec.alpha, spec.A, lambdas, spec.laplace))
        emit(r, "family transform matches resolvent form");
    for (const auto& r : check_term_recursion_transform(spec.alpha, spec.A, spec.B, 2,
                                                        lambdas, spec.laplace))
        emit(r, "series term transform identity");
    for (const auto& r : check_perturbed_transforms(spec.alpha, spec.A, spec.B,
                                                    std::min(spec.tol, 1e-9), lambdas,
                                                    spec.laplace, spec.term_cap))
        emit(r, "perturbed family transform matches perturbed resolvent");
}

int cmd_verify(const ProblemSpec& spec, OutputTarget& out) {
    VerifyContext ctx{out.stream()};
    const std::vector<double> lambdas = lambda_points(spec);
    verify_functional_equation(spec, ctx);
    verify_term_bounds(spec, ctx);
    verify_majorants(spec, ctx);
    verify_resolvent(spec, lambdas, ctx);
    verify_laplace(spec, lambdas, ctx);
    return ctx.any_fail ? 4 : 0;
}

int cmd_convergence(const ProblemSpec& spec, OutputTarget& out) {
    const std::vector<double> grid = positive_grid(spec);
    const double T = grid.back();
    const Matrix AB = spec.A + spec.B;

    PanelMesh probe(T, spec.quad.panels, spec.quad.nodes_per_panel);
    const ExponentialBound env =
        estimate_exponential_bound(spec.alpha, spec.A, probe.node_times());
    const double b = spec.B.inf_norm();
    const int N = detail::truncation_index(env, b, spec.alpha, TermKind::cosine_chain, T,
                                           spec.tol, spec.term_cap);

    detail::ChainLevel coarse = detail::build_chain_level(TermKind::cosine_chain, spec.alpha,
                                                          spec.A, spec.B, T, grid, N,
                                                          spec.quad);
    QuadratureConfig fine_cfg = spec.quad;
    fine_cfg.panels *= spec.quad.refinement_factor;
    detail::ChainLevel fine = detail::build_chain_level(TermKind::cosine_chain, spec.alpha,
                                                        spec.A, spec.B, T, grid, N,
                                                        fine_cfg);

    std::vector<Matrix> oracle;
    oracle.reserve(grid.size());
    for (double t : grid)
        oracle.push_back(mittag_leffler(spec.alpha, 1.0, AB * std::pow(t, spec.alpha)));

    write_csv_row(out.stream(), {"n", "term_norm", "majorant", "cum_error", "quad_error"});
    std::vector<Matrix> cum_fine(grid.size(), Matrix(spec.A.rows(), spec.A.rows()));
    std::vector<Matrix> cum_coarse = cum_fine;
    std::vector<double> term_norms;
    for (int n = 0; n <= N; ++n) {
        double term_norm = 0.0, majorant = 0.0, cum_error = 0.0, quad_error = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cum_fine[i] += fine.target_terms[n][i];
            cum_coarse[i] += coarse.target_terms[n][i];
            term_norm = std::max(term_norm, fine.target_term_norms[n][i]);
            majorant = std::max(majorant, detail::term_majorant(env, b, spec.alpha,
                                                                TermKind::cosine_chain, n,
                                                                grid[i]));
            cum_error = std::max(cum_error, (cum_fine[i] - oracle[i]).inf_norm());
            quad_error = std::max(quad_error, (cum_fine[i] - cum_coarse[i]).inf_norm());
        }
        term_norms.push_back(term_norm);
        write_csv_row(out.stream(),
                      {std::to_string(n), format_g17(term_norm), format_g17(majorant),
                       format_g17(cum_error), format_g17(quad_error)});
    }

    double rate = 0.0;
    int count = 0;
    for (std::size_t n = 1; n + 1 < term_norms.size(); ++n)
        if (term_norms[n] > 0.0) {
            rate += term_norms[n + 1] / term_norms[n];
            ++count;
        }
    if (count > 0) rate /= count;
    out.stream() << "# observed_decay_rate," << format_g17(rate) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional cosine and sine operator family toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--spec", opts.spec_path, "problem spec JSON file")->required();
        sub->add_option("--out", opts.out_path, "output path, '-' for stdout");
        sub->add_option("--seed", opts.seed, "override the spec's seed")
            ->each([&](const std::string&) { opts.seed_given = true; });
        sub->add_option("--tol", opts.tol, "override the spec's tolerance")
            ->each([&](const std::string&) { opts.tol_given = true; });
    };
    CLI::App* solve = app.add_subcommand("solve", "integrate the order-alpha problem");
    CLI::App* verify = app.add_subcommand("verify", "run every identity check");
    CLI::App* convergence =
        app.add_subcommand("convergence", "per-term truncation and quadrature table");
    add_common(solve);
    add_common(verify);
    add_common(convergence);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ProblemSpec spec;
    try {
        spec = load_spec(opts);
    } catch (const std::invalid_argument& e) {
        emit_diagnostic("spec_error", e.what());
        return 2;
    }

    try {
        OutputTarget out(opts.out_path);
        if (solve->parsed()) return cmd_solve(spec, out);
        if (verify->parsed()) return cmd_verify(spec, out);
        return cmd_convergence(spec, out);
    } catch (const std::invalid_argument& e) {
        emit_diagnostic("spec_error", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_diagnostic("numerical_error", e.what());
        return 3;
    }
}
