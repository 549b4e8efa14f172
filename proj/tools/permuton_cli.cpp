// permuton: command-line front end for the permuton library.
//
// Exit codes: 0 success, 2 bad arguments or input, 3 a solver did not converge.

#include <boost/version.hpp>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "permuton/permuton.hpp"

using namespace permuton;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
    std::string manifest;
    bool json = false;
};

struct Context {
    Globals g;
    Json results = Json::object();
    std::vector<std::string> outputs;

    void wrote(const std::string& path) { outputs.push_back(path); }
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            require(used == item.size(), "");
        } catch (const std::exception&) {
            throw ValidationError(what + ": '" + item + "' is not a number");
        }
    }
    require(!out.empty(), what + ": empty list");
    return out;
}

std::size_t as_count(double v, const std::string& what) {
    require(v >= 1.0 && v == std::floor(v) && v <= 1e15, what + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

// "1,0;2,0" -> terms with zero coefficients
StarModel parse_terms(const std::string& text) {
    StarModel model;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const std::vector<double> rs = parse_list(item, "--terms");
        require(rs.size() == 2, "--terms: each term is 'r,s'");
        model.terms.push_back({static_cast<int>(as_count(rs[0] + 1.0, "r") - 1),
                               static_cast<int>(as_count(rs[1] + 1.0, "s") - 1), 0.0});
    }
    return model;
}

Json to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Json to_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
    }
    return a;
}

void write_text(Context& ctx, const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot open '" + path + "' for writing");
    body(f);
    ctx.wrote(path);
}

void write_grid(Context& ctx, const std::string& path, const GridPermuton& grid) {
    save_grid_with_meta(path, grid);
    ctx.wrote(path);
    ctx.wrote(sidecar_path(path));
}

// A permuton given on the command line: a grid file, a staircase gamma_{a,b},
// a permutation, or the closed-form 1 2 model discretized on a grid.
struct Source {
    std::string in;
    std::string gamma;
    std::string permutation;
    std::optional<double> r;
    std::size_t grid = 64;

    void add_options(CLI::App* sub) {
        sub->add_option("--in", in, "grid CSV file");
        sub->add_option("--gamma", gamma, "staircase permuton 'a,b'");
        sub->add_option("--permutation", permutation, "permutation in one-line notation, e.g. '2,4,1,3'");
        sub->add_option("--r", r, "closed-form 1 2 model parameter");
        sub->add_option("--grid", grid, "grid resolution for --r");
    }

    int chosen() const {
        return (in.empty() ? 0 : 1) + (gamma.empty() ? 0 : 1) + (permutation.empty() ? 0 : 1) + (r ? 1 : 0);
    }

    bool is_segments() const { return !gamma.empty(); }

    SegmentPermuton segments() const {
        const std::vector<double> ab = parse_list(gamma, "--gamma");
        require(ab.size() == 2, "--gamma takes 'a,b'");
        return gamma_ab(ab[0], ab[1]);
    }

    GridPermuton grid_permuton() const {
        require(chosen() == 1, "give exactly one of --in, --gamma, --permutation, --r");
        require(!is_segments(), "this command needs a grid source, not --gamma");
        if (!in.empty()) {
            return load_grid(in);
        }
        if (r) {
            return star12_grid(*r, grid);
        }
        std::vector<int> p;
        for (double v : parse_list(permutation, "--permutation")) {
            p.push_back(static_cast<int>(as_count(v, "--permutation entries")));
        }
        const Permutation pi = Permutation::from_one_line(p);
        return grid_from_permutation(pi, pi.size());
    }
};

void describe(Json& j, const GridPermuton& g) {
    j["m"] = g.m();
    j["entropy"] = entropy_grid(g);
}

}

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    CLI::App app{"permuton: pattern densities, entropy and entropy-maximizing permutons"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    app.add_option("--seed", ctx.g.seed, "random seed");
    app.add_option("--threads", ctx.g.threads, "worker threads (0 = all cores)");
    app.add_option("--out", ctx.g.out, "main output file");
    app.add_option("--manifest", ctx.g.manifest, "write a JSON run manifest here");
    app.add_flag("--json", ctx.g.json, "print results as JSON");

    std::function<void()> action;
    auto command = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        return sub;
    };

    // star12 ---------------------------------------------------------------
    std::optional<double> s12_rho;
    std::optional<double> s12_r;
    std::size_t s12_grid = 64;
    CLI::App* star12 = command("star12", "closed-form 1 2 model: rho <-> r, entropy, discretized permuton");
    star12->add_option("--rho", s12_rho, "target 1 2 density");
    star12->add_option("--r", s12_r, "model parameter");
    star12->add_option("--grid", s12_grid, "grid resolution of the written permuton");
    star12->callback([&] {
        action = [&] {
            require(s12_rho.has_value() != s12_r.has_value(), "star12: give exactly one of --rho, --r");
            require(s12_grid >= 1, "star12: --grid must be positive");
            const double r = s12_r ? *s12_r : star12_r_from_rho(*s12_rho);
            ctx.results["r"] = r;
            ctx.results["rho"] = star12_rho(r);
            ctx.results["entropy"] = star12_entropy(r);
            const GridPermuton g = star12_grid(r, s12_grid);
            ctx.results["grid_m"] = s12_grid;
            ctx.results["grid_entropy"] = entropy_grid(g);
            if (!ctx.g.out.empty()) {
                write_grid(ctx, ctx.g.out, g);
            }
        };
    });

    // solve-star -----------------------------------------------------------
    std::string ss_terms;
    std::string ss_targets;
    SolveOptions ss_opts;
    CLI::App* solve = command("solve-star", "entropy-maximizing star model for given star-class densities");
    solve->add_option("--terms", ss_terms, "terms 'r,s;r,s;...' (r stars before the last value, s after)")->required();
    solve->add_option("--targets", ss_targets, "target densities 'rho_1,rho_2,...'")->required();
    solve->add_option("--tol", ss_opts.residual_tol, "residual tolerance on the densities / k!");
    solve->add_option("--max-iter", ss_opts.max_iter, "Newton iteration cap");
    solve->callback([&] {
        action = [&] {
            const StarModel shape = parse_terms(ss_terms);
            const std::vector<double> targets = parse_list(ss_targets, "--targets");
            Json terms = Json::array();
            for (const StarTerm& t : shape.terms) {
                terms.push_back({t.r, t.s});
            }
            ctx.results["terms"] = terms;
            ctx.results["targets"] = targets;
            const StarSolution sol = solve_star(shape, targets, ss_opts);
            ctx.results["alpha"] = to_json(sol.alpha);
            ctx.results["densities"] = to_json(sol.densities);
            ctx.results["entropy"] = sol.entropy;
            ctx.results["free_energy"] = sol.free_energy;
            ctx.results["hessian"] = to_json(sol.hessian);
            ctx.results["newton_iterations"] = sol.newton_iterations;
            ctx.results["residual"] = sol.residual;
            if (!ctx.g.out.empty()) {
                write_text(ctx, ctx.g.out, [&](std::ostream& o) { o << ctx.results.dump(2) << '\n'; });
            }
        };
    });

    // optimize -------------------------------------------------------------
    std::string op_constraints;
    std::size_t op_grid = 48;
    double op_tol = 1e-6;
    std::size_t op_max_iter = 10000;
    std::size_t op_max_outer = 50;
    std::size_t op_restarts = 0;
    std::string op_pgm;
    CLI::App* optimize = command("optimize", "maximize grid entropy under exact pattern-density constraints");
    optimize->add_option("--constraints", op_constraints, "'pattern=value,...', e.g. '12=0.4,123=0.25'")->required();
    optimize->add_option("--grid", op_grid, "grid resolution m");
    optimize->add_option("--tol", op_tol, "tolerance on constraint residuals and the projected gradient");
    optimize->add_option("--max-iter", op_max_iter, "inner iteration cap per outer round");
    optimize->add_option("--max-outer", op_max_outer, "augmented-Lagrangian rounds");
    optimize->add_option("--restarts", op_restarts, "extra runs from seeded perturbations");
    optimize->add_option("--pgm", op_pgm, "also write an 8-bit PGM heatmap");
    optimize->callback([&] {
        action = [&] {
            OptimizerOptions o;
            o.residual_tol = op_tol;
            o.gradient_tol = op_tol;
            o.max_inner = op_max_iter;
            o.max_outer = op_max_outer;
            o.restarts = op_restarts;
            o.seed = ctx.g.seed;
            const ConstraintSet cons = parse_constraints(op_constraints);
            const OptimizerResult res = maximize_entropy(cons, op_grid, o);
            Json targets = Json::object();
            Json achieved = Json::object();
            for (std::size_t i = 0; i < cons.size(); ++i) {
                targets[cons[i].pattern.to_string()] = cons[i].target;
                achieved[cons[i].pattern.to_string()] = res.achieved[i];
            }
            ctx.results["m"] = op_grid;
            ctx.results["targets"] = targets;
            ctx.results["achieved"] = achieved;
            ctx.results["residuals"] = res.residuals;
            ctx.results["multipliers"] = res.multipliers;
            ctx.results["entropy"] = res.entropy;
            ctx.results["converged"] = res.converged;
            ctx.results["inner_iterations"] = res.iterations;
            ctx.results["outer_iterations"] = res.outer_iterations;
            ctx.results["projected_gradient"] = res.projected_gradient;
            ctx.results["restart_entropies"] = res.restart_entropies;
            if (!ctx.g.out.empty()) {
                write_grid(ctx, ctx.g.out, res.grid);
            }
            if (!op_pgm.empty()) {
                write_text(ctx, op_pgm, [&](std::ostream& f) { write_pgm(f, res.grid); });
            }
            if (!res.converged) {
                double worst = 0.0;
                for (double c : res.residuals) {
                    worst = std::max(worst, std::abs(c));
                }
                throw ConvergenceError("optimize: tolerances not met; best iterate written", worst);
            }
        };
    });

    // density --------------------------------------------------------------
    Source de_src;
    std::string de_patterns = "12";
    bool de_mc = false;
    double de_trials = 1e5;
    std::size_t de_points = 0;
    CLI::App* density = command("density", "pattern densities (exact on grids for k <= 3, else Monte Carlo)");
    de_src.add_options(density);
    density->add_option("--pattern", de_patterns, "comma-separated patterns, e.g. '12,123,**3'");
    density->add_flag("--mc", de_mc, "force Monte Carlo");
    density->add_option("--trials", de_trials, "Monte-Carlo trials");
    density->add_option("--n-points", de_points, "points per trial (default: longest pattern)");
    density->callback([&] {
        action = [&] {
            std::vector<PatternSpec> specs;
            std::stringstream ss(de_patterns);
            std::string item;
            bool short_patterns = true;
            while (std::getline(ss, item, ',')) {
                specs.push_back(PatternSpec::parse(item));
                short_patterns = short_patterns && specs.back().length() <= 3;
            }
            require(!specs.empty(), "density: no patterns");
            require(de_src.chosen() == 1, "density: give exactly one of --in, --gamma, --permutation, --r");
            Json d = Json::object();
            if (!de_mc && short_patterns && !de_src.is_segments()) {
                const GridPermuton g = de_src.grid_permuton();
                for (const PatternSpec& s : specs) {
                    d[s.to_string()] = density_grid_exact(g, s);
                }
                ctx.results["method"] = "exact";
            } else {
                MonteCarloOptions o;
                o.trials = as_count(de_trials, "--trials");
                o.seed = ctx.g.seed;
                o.threads = ctx.g.threads;
                o.n_points = de_points;
                const std::vector<DensityEstimate> est =
                    de_src.is_segments() ? density_mc(SegmentSampler(de_src.segments()), specs, o)
                                         : density_mc(GridSampler(de_src.grid_permuton()), specs, o);
                for (std::size_t i = 0; i < specs.size(); ++i) {
                    d[specs[i].to_string()] = {{"value", est[i].value}, {"std_error", est[i].std_error}};
                }
                ctx.results["method"] = "monte_carlo";
                ctx.results["trials"] = o.trials;
            }
            ctx.results["densities"] = d;
            if (!ctx.g.out.empty()) {
                write_text(ctx, ctx.g.out, [&](std::ostream& f) { f << ctx.results.dump(2) << '\n'; });
            }
        };
    });

    // entropy --------------------------------------------------------------
    Source en_src;
    std::string en_levels;
    CLI::App* entropy = command("entropy", "entropy of a grid permuton and of its coarsenings");
    en_src.add_options(entropy);
    entropy->add_option("--levels", en_levels, "coarsening levels, each dividing m, e.g. '2,4,8'");
    entropy->callback([&] {
        action = [&] {
            const GridPermuton g = en_src.grid_permuton();
            describe(ctx.results, g);
            if (!en_levels.empty()) {
                std::vector<std::size_t> levels;
                for (double v : parse_list(en_levels, "--levels")) {
                    levels.push_back(as_count(v, "--levels entries"));
                }
                Json rows = Json::array();
                for (const auto& [m, h] : riemann_refinement(g, levels)) {
                    rows.push_back({{"m", m}, {"entropy", h}});
                }
                ctx.results["refinement"] = rows;
            }
        };
    });

    // heatflow -------------------------------------------------------------
    Source hf_src;
    HeatFlowSpec hf_spec;
    CLI::App* heat = command("heatflow", "smooth a grid permuton by the marginal-preserving heat flow");
    hf_src.add_options(heat);
    heat->add_option("--t", hf_spec.t, "flow time")->required();
    heat->add_option("--jmax", hf_spec.j_max, "keep x-modes below this (0 = all)");
    heat->add_option("--kmax", hf_spec.k_max, "keep y-modes below this (0 = all)");
    heat->callback([&] {
        action = [&] {
            const GridPermuton g = hf_src.grid_permuton();
            const HeatFlowResult res = heat_flow(g, hf_spec);
            ctx.results["m"] = g.m();
            ctx.results["t"] = hf_spec.t;
            ctx.results["entropy_before"] = entropy_grid(g);
            ctx.results["entropy_after"] = entropy_grid(res.grid);
            ctx.results["clipped_cells"] = res.clipped;
            ctx.results["rebalance_correction"] = res.correction;
            if (!ctx.g.out.empty()) {
                write_grid(ctx, ctx.g.out, res.grid);
            }
        };
    });

    // insertion ------------------------------------------------------------
    Source in_src;
    std::string in_family;
    std::string in_family_out;
    std::size_t in_mt = 256;
    std::size_t in_my = 256;
    std::size_t in_grid_out = 0;
    std::size_t in_steps = 0;
    CLI::App* insertion = command("insertion", "insertion measures: extract, reconstruct, entropy");
    in_src.add_options(insertion);
    insertion->add_option("--family", in_family, "read an insertion-family CSV instead of a permuton");
    insertion->add_option("--family-out", in_family_out, "write the insertion family CSV");
    insertion->add_option("--mt", in_mt, "columns for the closed-form family (--r)");
    insertion->add_option("--my", in_my, "rows per unit length of the family");
    insertion->add_option("--grid-out", in_grid_out, "reconstruct the permuton on this grid and write it to --out");
    insertion->add_option("--steps", in_steps, "RK4 steps for reconstruction (0 = default)");
    insertion->callback([&] {
        action = [&] {
            const int sources = in_src.chosen() + (in_family.empty() ? 0 : 1);
            require(sources == 1, "insertion: give exactly one of --in, --permutation, --r, --family");
            std::optional<InsertionFamily> fam;
            if (!in_family.empty()) {
                fam = load_insertion(in_family);
            } else if (in_src.r) {
                fam = star12_insertion_family(*in_src.r, in_mt, in_my);
                ctx.results["closed_form_entropy"] = star12_entropy(*in_src.r);
            } else {
                const GridPermuton g = in_src.grid_permuton();
                fam = insertion_from_permuton(g, in_my);
                ctx.results["grid_entropy"] = entropy_grid(g);
            }
            ctx.results["mt"] = fam->mt();
            ctx.results["my"] = fam->my();
            ctx.results["insertion_entropy"] = insertion_entropy(*fam);
            if (!in_family_out.empty()) {
                write_text(ctx, in_family_out, [&](std::ostream& f) { write_insertion_csv(f, *fam); });
            }
            if (in_grid_out > 0) {
                const InsertionFlowResult res = permuton_from_insertion(*fam, in_grid_out, in_steps);
                ctx.results["reconstructed_m"] = in_grid_out;
                ctx.results["reconstructed_entropy"] = entropy_grid(res.grid);
                ctx.results["rebalance_correction"] = res.correction;
                ctx.results["clipped_cells"] = res.clipped;
                if (!ctx.g.out.empty()) {
                    write_grid(ctx, ctx.g.out, res.grid);
                }
            }
        };
    });

    // region ---------------------------------------------------------------
    std::string rg_model;
    std::size_t rg_samples = 200;
    CLI::App* region = command("region", "feasible-region boundary curves");
    region->add_option("--model", rg_model, "star23 or 123-321")->required()->check(CLI::IsMember({"star23", "123-321"}));
    region->add_option("--samples", rg_samples, "points per curve");
    region->callback([&] {
        action = [&] {
            std::vector<RegionCurve> curves;
            if (rg_model == "star23") {
                auto [lower, upper] = region_star23_boundary(rg_samples);
                curves = {lower, upper};
            } else {
                curves = region_123_321(rg_samples);
                const Dimple d = dimple();
                ctx.results["dimple_s"] = d.s;
                ctx.results["dimple_r"] = d.r;
            }
            Json labels = Json::array();
            for (const RegionCurve& c : curves) {
                labels.push_back(c.label);
            }
            ctx.results["model"] = rg_model;
            ctx.results["curves"] = labels;
            ctx.results["samples"] = rg_samples;
            if (!ctx.g.out.empty()) {
                write_text(ctx, ctx.g.out, [&](std::ostream& f) { write_curves_csv(f, curves); });
            }
        };
    });

    // sweep-ab -------------------------------------------------------------
    std::size_t sw_na = 10;
    std::size_t sw_nb = 10;
    double sw_trials = 1e5;
    CLI::App* sweep = command("sweep-ab", "Monte-Carlo densities over the staircase family gamma_{a,b}");
    sweep->add_option("--na", sw_na, "samples of a in [0, 1]");
    sweep->add_option("--nb", sw_nb, "samples of b in [0, a/2]");
    sweep->add_option("--trials", sw_trials, "trials per point");
    sweep->callback([&] {
        action = [&] {
            const std::uint64_t trials = as_count(sw_trials, "--trials");
            const std::vector<SweepPoint> pts = gamma_ab_sweep(sw_na, sw_nb, trials, ctx.g.seed, ctx.g.threads);
            std::size_t outside = 0;
            for (const SweepPoint& p : pts) {
                outside += region_123_321_within(p.rho123.value, p.rho321.value, 3.0 * p.rho123.std_error,
                                                 3.0 * p.rho321.std_error)
                               ? 0
                               : 1;
            }
            ctx.results["points"] = pts.size();
            ctx.results["trials"] = trials;
            ctx.results["outside_123_321_region_3sigma"] = outside;
            if (!ctx.g.out.empty()) {
                write_text(ctx, ctx.g.out, [&](std::ostream& f) {
                    f << "a,b,rho12,se12,rho123,se123,rho321,se321\n";
                    for (const SweepPoint& p : pts) {
                        f << format_double(p.a) << ',' << format_double(p.b) << ',' << format_double(p.rho12.value)
                          << ',' << format_double(p.rho12.std_error) << ',' << format_double(p.rho123.value) << ','
                          << format_double(p.rho123.std_error) << ',' << format_double(p.rho321.value) << ','
                          << format_double(p.rho321.std_error) << '\n';
                    }
                });
            }
        };
    });

    // sample ---------------------------------------------------------------
    Source sa_src;
    std::size_t sa_n = 10;
    std::size_t sa_count = 1;
    CLI::App* sample = command("sample", "random permutations drawn from a permuton");
    sa_src.add_options(sample);
    sample->add_option("--n", sa_n, "permutation length");
    sample->add_option("--count", sa_count, "number of permutations");
    sample->callback([&] {
        action = [&] {
            require(sa_src.chosen() == 1, "sample: give exactly one of --in, --gamma, --permutation, --r");
            require(sa_n >= 1 && sa_count >= 1, "sample: --n and --count must be positive");
            std::vector<std::string> perms;
            for (std::size_t k = 0; k < sa_count; ++k) {
                const std::uint64_t s = derive_seed(ctx.g.seed, k);
                const Permutation p = sa_src.is_segments() ? sample_permutation(sa_src.segments(), sa_n, s)
                                                           : sample_permutation(sa_src.grid_permuton(), sa_n, s);
                perms.push_back(p.to_string());
            }
            ctx.results["n"] = sa_n;
            ctx.results["permutations"] = perms;
            if (!ctx.g.out.empty()) {
                write_text(ctx, ctx.g.out, [&](std::ostream& f) {
                    for (const std::string& p : perms) {
                        f << p << '\n';
                    }
                });
            }
        };
    });

    // ldp ------------------------------------------------------------------
    double ld_rho = 0.4;
    double ld_eps = 0.05;
    std::string ld_n = "50,100,200";
    CLI::App* ldp = command("ldp", "exact large-deviation rate of the 1 2 count from Mahonian numbers");
    ldp->add_option("--rho", ld_rho, "target 1 2 density");
    ldp->add_option("--eps", ld_eps, "window half-width");
    ldp->add_option("--n", ld_n, "comma-separated sizes (each <= 500)");
    ldp->callback([&] {
        action = [&] {
            Json rows = Json::array();
            for (double v : parse_list(ld_n, "--n")) {
                const std::size_t n = as_count(v, "--n entries");
                rows.push_back({{"n", n}, {"estimate", ldp_estimate(n, ld_rho, ld_eps)}});
            }
            ctx.results["rho"] = ld_rho;
            ctx.results["eps"] = ld_eps;
            ctx.results["estimates"] = rows;
            ctx.results["s_rho"] = star12_entropy(star12_r_from_rho(ld_rho));
            // the windowed count is dominated by the window edge nearest 1/2
            const double edge = ld_rho < 0.5 ? std::min(0.5, ld_rho + ld_eps) : std::max(0.5, ld_rho - ld_eps);
            ctx.results["s_window_edge"] = star12_entropy(star12_r_from_rho(edge));
        };
    });

    // pde-check ------------------------------------------------------------
    Source pd_src;
    std::string pd_eq = "12";
    CLI::App* pde = command("pde-check", "Euler-Lagrange residual of a grid permuton");
    pd_src.add_options(pde);
    pde->add_option("--equation", pd_eq, "12 or 123")->check(CLI::IsMember({"12", "123"}));
    pde->callback([&] {
        action = [&] {
            const GridPermuton g = pd_src.grid_permuton();
            const PdeFit fit = pd_eq == "12" ? pde_residual_12(g) : pde_residual_123(g);
            ctx.results["equation"] = pd_eq;
            ctx.results["alpha"] = fit.alpha;
            ctx.results["rms_residual"] = fit.rms;
            ctx.results["nodes"] = fit.nodes;
        };
    });

    // dimple ---------------------------------------------------------------
    CLI::App* dim = command("dimple", "crossing point of the upper 1 2 3 / 3 2 1 boundary curves");
    dim->callback([&] {
        action = [&] {
            const Dimple d = dimple();
            ctx.results["s"] = d.s;
            ctx.results["r"] = d.r;
            ctx.results["rho12_classes"] = {d.s * d.s, 1.0 - d.s * d.s};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    int code = 0;
    std::string status = "ok";
    std::string message;
    try {
        action();
    } catch (const ValidationError& e) {
        code = 2;
        status = "validation_error";
        message = e.what();
    } catch (const ConvergenceError& e) {
        code = 3;
        status = "not_converged";
        message = e.what();
    }

    if (ctx.g.json) {
        std::cout << ctx.results.dump(2) << '\n';
    } else {
        for (const auto& [key, value] : ctx.results.items()) {
            std::cout << key << ": " << value.dump() << '\n';
        }
    }
    if (code != 0) {
        std::cerr << "permuton: " << message << '\n';
    }

    if (!ctx.g.manifest.empty()) {
        Json m;
        m["tool"] = "permuton";
        m["command"] = std::vector<std::string>(argv + 1, argv + argc);
        m["subcommand"] = app.get_subcommands().front()->get_name();
        m["seed"] = ctx.g.seed;
        m["threads"] = ctx.g.threads == 0 ? default_threads() : ctx.g.threads;
        m["versions"] = {{"permuton", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)},
                         {"boost", BOOST_LIB_VERSION},
                         {"compiler", __VERSION__}};
        m["status"] = status;
        if (!message.empty()) {
            m["message"] = message;
        }
        m["results"] = ctx.results;
        m["outputs"] = ctx.outputs;
        // last, on its own line, so reproducibility checks can drop it
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream f(ctx.g.manifest, std::ios::binary);
        if (!f) {
            std::cerr << "permuton: cannot write manifest '" << ctx.g.manifest << "'\n";
            return 2;
        }
        f << m.dump(2) << '\n';
    }
    return code;
}
