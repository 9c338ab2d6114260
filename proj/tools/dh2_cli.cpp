// dh2_cli: meshes, partitions, compressed operators and the reference experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "dh2/experiments.hpp"

namespace fs = std::filesystem;
using namespace dh2;

namespace {

const char* order_note =
    "Orders: --order m counts interpolation POINTS per coordinate, i.e. polynomial degree m-1 "
    "(m = 0 disables all far-field expansions). Frequencies are in 1/length on the unit sphere; "
    "without --zeta-re/--zeta-im, zeta = alpha + alpha i with alpha = sqrt(n/128). "
    "Every flag can also be set through an environment variable DH2_<FLAG>, e.g. DH2_ZETA_RE.";

struct Flags {
    std::vector<int> refine{3};
    double zeta_re = 0.0, zeta_im = 0.0;
    double eta1 = 10.0, eta2 = 2.0, eta3 = 0.5;
    int order = 4;
    bool variable_order = false;
    double epsilon = 0.0, c0 = 0.0, sigma_tilde = 0.0;
    std::size_t leaf_size = 16;
    int quad_order = 5;
    std::string tree_mode = "regular";
    std::uint64_t seed = 1;
    std::string out = "dh2_out";
    std::size_t dense_limit = default_dense_limit;
    int threads = 0;
    int reps = 10;
    bool check = false;

    // one option object per subcommand; only the parsed one collects results
    std::multimap<std::string, CLI::Option*> opt;
    CLI::Option* last = nullptr;

    bool given(const std::string& name) const {
        auto [a, b] = opt.equal_range(name);
        for (auto it = a; it != b; ++it)
            if (it->second->count() > 0)
                return true;
        return false;
    }
};

std::string env_name(std::string flag) {
    std::transform(flag.begin(), flag.end(), flag.begin(), [](char c) { return c == '-' ? '_' : char(std::toupper(c)); });
    return "DH2_" + flag;
}

template <typename T>
void add(CLI::App* app, Flags& f, const std::string& name, T& value, const std::string& help) {
    f.last = app->add_option("--" + name, value, help)->envname(env_name(name))->capture_default_str();
    f.opt.emplace(name, f.last);
}

CLI::App* subcommand(CLI::App& app, Flags& f, const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->footer(order_note);
    add(s, f, "refine", f.refine, "refinement level(s) k, n = 8*4^k (comma list for experiments)");
    f.last->delimiter(',');
    add(s, f, "zeta-re", f.zeta_re, "Re zeta (>= 0)");
    f.last->check(CLI::NonNegativeNumber);
    add(s, f, "zeta-im", f.zeta_im, "Im zeta");
    add(s, f, "eta1", f.eta1, "direction parameter eta1");
    f.last->check(CLI::PositiveNumber);
    add(s, f, "eta2", f.eta2, "distance parameter eta2");
    f.last->check(CLI::PositiveNumber);
    add(s, f, "eta3", f.eta3, "parabolic parameter eta3 in (0,1)");
    f.last->check(CLI::Validator(
        [](std::string& s) -> std::string {
            const double v = std::stod(s);
            return v > 0 && v < 1 ? std::string() : "eta3 must lie in (0,1)";
        },
        "(0,1)"));
    add(s, f, "order", f.order, "interpolation points per coordinate (degree + 1)");
    f.last->check(CLI::NonNegativeNumber);
    f.opt.emplace("variable-order", s->add_flag("--variable-order", f.variable_order, "variable orders per level")
                                        ->envname("DH2_VARIABLE_ORDER"));
    add(s, f, "epsilon", f.epsilon, "variable orders: target accuracy (0 = default)");
    add(s, f, "c0", f.c0, "variable orders: c0 (0 = derived from the error bound)");
    add(s, f, "sigma-tilde", f.sigma_tilde, "variable orders: sigma~ (0 = derived from the error bound)");
    add(s, f, "leaf-size", f.leaf_size, "maximal leaf cluster size");
    f.last->check(CLI::PositiveNumber);
    add(s, f, "quad-order", f.quad_order, "Gauss points per direction of the panel quadrature");
    f.last->check(CLI::Range(1, 20));
    add(s, f, "tree-mode", f.tree_mode, "cluster boxes: regular or tight");
    f.last->check(CLI::IsMember({"regular", "tight"}));
    add(s, f, "seed", f.seed, "seed of the power iteration / random vectors");
    add(s, f, "out", f.out, "output directory");
    add(s, f, "dense-limit", f.dense_limit, "largest n for which the dense matrix is assembled");
    add(s, f, "threads", f.threads, "assembly threads (0 = all cores)");
    return s;
}

int single_refine(const Flags& f) {
    if (f.refine.size() != 1)
        throw CLI::ValidationError("--refine", "expects a single refinement level here");
    if (f.refine[0] < 0 || f.refine[0] > 10)
        throw CLI::ValidationError("--refine", "refinement level must lie in [0, 10]");
    return f.refine[0];
}

TreeMode tree_mode(const Flags& f) { return f.tree_mode == "tight" ? TreeMode::tight : TreeMode::regular; }

ComplexFrequency frequency(const Flags& f, std::size_t n) {
    if (!f.given("zeta-re") && !f.given("zeta-im")) {
        const double a = default_alpha(n);
        return {a, a};
    }
    return {f.zeta_re, f.zeta_im};
}

AdmissibilityParams admissibility(const Flags& f, const ComplexFrequency& zeta) {
    AdmissibilityParams p;
    p.eta1 = f.eta1;
    p.eta2 = f.eta2;
    p.eta3 = f.eta3;
    p.zeta = zeta;
    p.validate();
    return p;
}

fs::path out_dir(const Flags& f) {
    fs::create_directories(f.out);
    return fs::path(f.out);
}

struct Problem {
    SurfaceMesh mesh;
    AdmissibilityParams params;
    ClusterTree tree;
    std::vector<DirectionSet> dirs;
    BlockPartition P;

    explicit Problem(const Flags& f) : mesh(build_sphere_mesh(single_refine(f))) {
        params = admissibility(f, frequency(f, mesh.size()));
        tree = build_cluster_tree(mesh, f.leaf_size, tree_mode(f));
        dirs = build_direction_sets(tree, params.zeta, params.eta1);
        P = divide(tree, dirs, params);
    }
};

OrderSchedule schedule(const Flags& f, const Problem& pb) {
    if (!f.variable_order)
        return fixed_schedule(pb.P, pb.tree, f.order - 1);
    const auto k = ErrorBoundConstants::compute(f.eta1, f.eta2, f.eta3);
    const double h_min = mesh_metrics(pb.mesh).h_min;
    auto p = default_order_parameters(k, h_min, f.epsilon);
    if (f.c0 > 0)
        p.c0 = f.c0;
    if (f.sigma_tilde > 0)
        p.sigma_tilde = f.sigma_tilde;
    return select_orders(pb.P, pb.tree, pb.params, h_min, p.epsilon, p.c0, p.sigma_tilde);
}

void print_frequency(const ComplexFrequency& z) { std::cout << "zeta: " << z.re << " + " << z.im << "i\n"; }

int cmd_mesh(const Flags& f) {
    const SurfaceMesh mesh = build_sphere_mesh(single_refine(f));
    std::cout << "panels: " << mesh.size() << "\nvertices: " << mesh.vertex_count() << '\n';
    if (mesh.size() >= 2) {
        const MeshMetrics m = mesh_metrics(mesh);
        std::cout << "h_max: " << m.h_max << "\nh_min: " << m.h_min << "\nclosed: " << (mesh.is_closed() ? "yes" : "no")
                  << '\n';
    }
    if (f.given("out")) {
        const auto path = out_dir(f) / ("sphere_" + std::to_string(f.refine[0]) + ".mesh");
        std::ofstream os(path);
        write_mesh(os, mesh);
        std::cout << "wrote " << path.string() << '\n';
    }
    return 0;
}

int cmd_partition(const Flags& f) {
    const Problem pb(f);
    const std::size_t n = pb.mesh.size();
    print_frequency(pb.params.zeta);
    std::cout << "n: " << n << "\n#P: " << pb.P.size() << "\n#P_near: " << pb.P.near_count
              << "\n#P_far: " << pb.P.far_count << "\n#P/n: " << double(pb.P.size()) / double(n)
              << "\ndepth: " << pb.tree.depth() << '\n';
    const auto path = out_dir(f) / "blocks.csv";
    std::ofstream os(path);
    write_blocks_csv(os, pb.P, pb.tree);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_assemble(const Flags& f) {
    const Problem pb(f);
    const OrderSchedule sch = schedule(f, pb);
    print_frequency(pb.params.zeta);
    OperatorOptions opt;
    opt.quad_order = f.quad_order;
    const DH2Operator op(pb.mesh, pb.tree, pb.dirs, pb.P, sch, pb.params.zeta, opt);
    const auto& s = op.stats();
    std::cout << "n: " << op.size() << "\nmax points: " << sch.max_order() + 1 << "\nnear entries: " << s.near_entries
              << "\ncoupling entries: " << s.coupling_entries << " (stored " << s.stored_coupling_entries
              << ")\nleaf coefficients: " << s.leaf_coefficients << "\nsetup seconds: " << s.setup_seconds << '\n';
    const auto path = out_dir(f) / "operator_stats.csv";
    std::ofstream os(path);
    op.write_stats_csv(os);
    std::cout << "wrote " << path.string() << '\n';
    if (f.check) {
        const CMatrix K = assemble_dense(pb.mesh, pb.params.zeta, f.quad_order, f.dense_limit);
        const SpectralError e = spectral_error(op, K, 30, f.seed);
        std::cout << "relative spectral error: " << e.relative << " (residual " << e.residual << ")\n";
    }
    return 0;
}

int cmd_matvec_bench(const Flags& f) {
    const Problem pb(f);
    const OrderSchedule sch = schedule(f, pb);
    OperatorOptions opt;
    opt.quad_order = f.quad_order;
    const DH2Operator op(pb.mesh, pb.tree, pb.dirs, pb.P, sch, pb.params.zeta, opt);
    std::mt19937_64 rng(f.seed);
    std::normal_distribution<double> g;
    CVector x(static_cast<Eigen::Index>(op.size()));
    for (auto& v : x)
        v = complex(g(rng), g(rng));
    const auto t0 = std::chrono::steady_clock::now();
    CVector y;
    for (int r = 0; r < f.reps; ++r)
        y = op.matvec(x);
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_frequency(pb.params.zeta);
    std::cout << "n: " << op.size() << "\nsetup seconds: " << op.stats().setup_seconds
              << "\nmatvec seconds: " << t / std::max(1, f.reps) << "\n|y|: " << y.norm() << '\n';
    return 0;
}

int run_exp(const Flags& f, ExperimentId id) {
    ExperimentConfig c = experiment_preset(id);
    if (f.given("refine"))
        c.refinements = f.refine;
    if (f.given("zeta-im"))
        c.alpha = f.zeta_im;
    if (f.given("order"))
        c.points = {f.order};
    if (f.given("leaf-size"))
        c.leaf_size = f.leaf_size;
    if (f.given("tree-mode"))
        c.mode = tree_mode(f);
    c.variable_order = f.variable_order;
    c.eta1 = f.eta1;
    c.eta2 = f.eta2;
    c.eta3 = f.eta3;
    c.quad_order = f.quad_order;
    c.seed = f.seed;
    c.dense_limit = f.dense_limit;
    c.out_dir = f.out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_experiment(c);
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_rows_csv(std::cout, rows);
    if (id == ExperimentId::blocks_vs_nu && rows.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            x.push_back(r.zeta_re);
            y.push_back(double(r.blocks));
        }
        const InverseFit fit = fit_inverse(x, y);
        std::cout << "fit: #P = " << fit.a << " + " << fit.b << "/(nu+1), R^2 = " << fit.r2 << '\n';
    }
    std::cout << "wrote " << write_experiment_outputs(c, rows, t) << '\n';
    return 0;
}

int cmd_pattern(const Flags& f) {
    if (!f.given("zeta-re") && !f.given("zeta-im"))
        return run_exp(f, ExperimentId::pattern);
    const Problem pb(f);
    const Image img = render_pattern(pb.P, pb.tree, std::min<int>(int(pb.mesh.size()), 1024));
    const auto path = out_dir(f) / "pattern.ppm";
    write_ppm(path.string(), img);
    print_frequency(pb.params.zeta);
    std::cout << "#P: " << pb.P.size() << "\nred fraction: " << img.fraction(255, 0, 0) << "\nwrote " << path.string()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directional H2-matrix approximation of the single-layer operator e^{-zeta|x-y|}/(4 pi |x-y|)"};
    app.footer(order_note);
    app.require_subcommand(1);
    Flags f;

    std::map<CLI::App*, std::function<int()>> run;
    run[subcommand(app, f, "mesh", "generate the refined octahedral sphere mesh")] = [&] { return cmd_mesh(f); };
    run[subcommand(app, f, "partition", "build the directional block partition")] = [&] { return cmd_partition(f); };
    CLI::App* as = subcommand(app, f, "assemble", "assemble the compressed operator");
    as->add_flag("--check", f.check, "compare with the dense matrix (power iteration)")->envname("DH2_CHECK");
    run[as] = [&] { return cmd_assemble(f); };
    CLI::App* mb = subcommand(app, f, "matvec-bench", "time matrix-vector products");
    mb->add_option("--reps", f.reps, "number of products")->envname("DH2_REPS")->capture_default_str();
    run[mb] = [&] { return cmd_matvec_bench(f); };
    run[subcommand(app, f, "exp-blocks", "block counts versus n")] = [&] {
        return run_exp(f, ExperimentId::blocks_vs_n);
    };
    run[subcommand(app, f, "exp-conv", "spectral error versus interpolation order")] = [&] {
        return run_exp(f, ExperimentId::convergence_vs_m);
    };
    run[subcommand(app, f, "exp-nu-blocks", "block counts versus Re zeta")] = [&] {
        return run_exp(f, ExperimentId::blocks_vs_nu);
    };
    run[subcommand(app, f, "exp-nu-error", "spectral error versus Re zeta")] = [&] {
        return run_exp(f, ExperimentId::error_vs_nu);
    };
    run[subcommand(app, f, "pattern", "sparsity pattern image(s)")] = [&] { return cmd_pattern(f); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // CLI11 drops environment values that fail validation; treat them as usage errors
    for (auto& [sub, fn] : run) {
        if (!sub->parsed())
            continue;
        for (const CLI::Option* o : sub->get_options()) {
            const std::string& env = o->get_envname();
            const char* v = env.empty() ? nullptr : std::getenv(env.c_str());
            if (v && *v && o->count() == 0) {
                std::cerr << env << ": invalid value '" << v << "'\n";
                return 2;
            }
        }
    }

#ifdef _OPENMP
    if (f.threads > 0)
        omp_set_num_threads(f.threads);
#endif

    try {
        for (auto& [sub, fn] : run)
            if (sub->parsed())
                return fn();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
