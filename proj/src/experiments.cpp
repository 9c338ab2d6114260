#include "dh2/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dh2 {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Mesh, tree, directions and partition for one frequency. The operator keeps
// references into this, so it is heap-allocated and never moved.
struct Setup {
    SurfaceMesh mesh;
    AdmissibilityParams params;
    ClusterTree tree;
    std::vector<DirectionSet> dirs;
    BlockPartition P;

    Setup(SurfaceMesh m, const ExperimentConfig& cfg, const ComplexFrequency& zeta)
        : mesh(std::move(m)) {
        params.eta1 = cfg.eta1;
        params.eta2 = cfg.eta2;
        params.eta3 = cfg.eta3;
        params.zeta = zeta;
        params.validate();
        tree = build_cluster_tree(mesh, cfg.leaf_size, cfg.mode);
        rebuild(zeta);
    }

    void rebuild(const ComplexFrequency& zeta) {
        params.zeta = zeta;
        dirs = build_direction_sets(tree, zeta, params.eta1);
        P = divide(tree, dirs, params);
    }
};

double alpha_for(const ExperimentConfig& cfg, std::size_t n) { return cfg.alpha > 0 ? cfg.alpha : default_alpha(n); }

ExperimentRow base_row(const ExperimentConfig& cfg, const std::string& name, std::size_t n, double alpha,
                       const ComplexFrequency& zeta, const BlockPartition& P) {
    ExperimentRow r;
    r.experiment = to_string(cfg.id);
    r.case_name = name;
    r.n = n;
    r.alpha = alpha;
    r.zeta_re = zeta.re;
    r.zeta_im = zeta.im;
    r.near_blocks = P.near_count;
    r.far_blocks = P.far_count;
    r.blocks = P.size();
    r.blocks_per_dof = double(P.size()) / double(n);
    return r;
}

void require(bool ok, const std::string& what) {
    if (!ok)
        throw std::invalid_argument(what);
}

ExperimentRow error_row(const ExperimentConfig& cfg, const Setup& S, const CMatrix& K, const std::string& name,
                        double alpha, const OrderSchedule& schedule, int points) {
    const auto t0 = clock_type::now();
    OperatorOptions opt;
    opt.quad_order = cfg.quad_order;
    ExperimentRow r = base_row(cfg, name, S.mesh.size(), alpha, S.params.zeta, S.P);
    r.points = points;
    const DH2Operator op(S.mesh, S.tree, S.dirs, S.P, schedule, S.params.zeta, opt);
    const SpectralError e = spectral_error(op, K, cfg.power_iters, cfg.seed);
    r.error = e.relative;
    r.residual = e.residual;
    r.extra = double(op.stats().coupling_entries + op.stats().leaf_coefficients);
    r.runtime_s = seconds_since(t0);
    return r;
}

}  // namespace

std::string to_string(ExperimentId id) {
    switch (id) {
    case ExperimentId::blocks_vs_n: return "blocks_vs_n";
    case ExperimentId::convergence_vs_m: return "convergence_vs_m";
    case ExperimentId::blocks_vs_nu: return "blocks_vs_nu";
    case ExperimentId::error_vs_nu: return "error_vs_nu";
    case ExperimentId::pattern: return "pattern";
    }
    return "unknown";
}

ExperimentId experiment_from_string(const std::string& s) {
    for (auto id : {ExperimentId::blocks_vs_n, ExperimentId::convergence_vs_m, ExperimentId::blocks_vs_nu,
                    ExperimentId::error_vs_nu, ExperimentId::pattern})
        if (to_string(id) == s)
            return id;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

double default_alpha(std::size_t n) { return std::sqrt(double(n) / 128.0); }

ExperimentConfig experiment_preset(ExperimentId id) {
    ExperimentConfig c;
    c.id = id;
    switch (id) {
    case ExperimentId::blocks_vs_n:
        c.refinements = {4, 5, 6};
        c.leaf_size = 32;
        break;
    case ExperimentId::convergence_vs_m:
        c.refinements = {3, 4};
        c.points = {1, 2, 3, 4, 5, 6};
        c.leaf_size = 8;
        break;
    case ExperimentId::blocks_vs_nu:
        c.refinements = {5};
        for (int nu = 0; nu <= 24; nu += 2)
            c.nus.push_back(nu);
        c.leaf_size = 32;
        break;
    case ExperimentId::error_vs_nu:
        c.refinements = {4};
        c.nus = {0, 4, 8, 12, 16, 20, 24};
        c.points = {3, 4, 5};
        c.leaf_size = 16;
        break;
    case ExperimentId::pattern:
        c.refinements = {4};
        c.ratios = {0, 1, 2, 3};
        c.leaf_size = 16;
        break;
    }
    return c;
}

std::vector<ExperimentRow> run_blocks_vs_n(const ExperimentConfig& cfg) {
    require(!cfg.refinements.empty(), "blocks_vs_n: no refinement levels");
    std::vector<ExperimentRow> rows;
    for (int k : cfg.refinements) {
        const std::size_t n = sphere_size(k);
        const double a = alpha_for(cfg, n);
        auto t0 = clock_type::now();
        auto S = std::make_unique<Setup>(build_sphere_mesh(k), cfg, ComplexFrequency(a, a));
        rows.push_back(base_row(cfg, "complex", n, a, S->params.zeta, S->P));
        rows.back().runtime_s = seconds_since(t0);
        t0 = clock_type::now();
        S->rebuild(ComplexFrequency(0.0, a));
        rows.push_back(base_row(cfg, "imaginary", n, a, S->params.zeta, S->P));
        rows.back().runtime_s = seconds_since(t0);
    }
    return rows;
}

std::vector<ExperimentRow> run_convergence_vs_m(const ExperimentConfig& cfg) {
    require(!cfg.refinements.empty() && !cfg.points.empty(), "convergence_vs_m: need refinements and orders");
    std::vector<ExperimentRow> rows;
    for (int k : cfg.refinements) {
        const std::size_t n = sphere_size(k);
        const double a = alpha_for(cfg, n);
        auto S = std::make_unique<Setup>(build_sphere_mesh(k), cfg, ComplexFrequency(a, a));
        const CMatrix K = assemble_dense(S->mesh, S->params.zeta, cfg.quad_order, cfg.dense_limit);
        for (int m : cfg.points) {
            require(m >= 0, "convergence_vs_m: negative number of points");
            rows.push_back(error_row(cfg, *S, K, "complex", a, fixed_schedule(S->P, S->tree, m - 1), m));
        }
    }
    return rows;
}

std::vector<ExperimentRow> run_blocks_vs_nu(const ExperimentConfig& cfg) {
    require(cfg.refinements.size() == 1 && !cfg.nus.empty(), "blocks_vs_nu: need one refinement and nu values");
    const int k = cfg.refinements.front();
    const std::size_t n = sphere_size(k);
    const double a = alpha_for(cfg, n);
    std::vector<ExperimentRow> rows;
    std::unique_ptr<Setup> S;
    for (double nu : cfg.nus) {
        const auto t0 = clock_type::now();
        const ComplexFrequency zeta(nu, a);
        if (!S)
            S = std::make_unique<Setup>(build_sphere_mesh(k), cfg, zeta);
        else
            S->rebuild(zeta);
        rows.push_back(base_row(cfg, "nu", n, a, zeta, S->P));
        rows.back().runtime_s = seconds_since(t0);
    }
    return rows;
}

std::vector<ExperimentRow> run_error_vs_nu(const ExperimentConfig& cfg) {
    require(cfg.refinements.size() == 1 && !cfg.nus.empty(), "error_vs_nu: need one refinement and nu values");
    require(!cfg.points.empty() || cfg.variable_order, "error_vs_nu: no orders");
    const int k = cfg.refinements.front();
    const std::size_t n = sphere_size(k);
    const double a = alpha_for(cfg, n);
    std::vector<ExperimentRow> rows;
    std::unique_ptr<Setup> S;
    for (double nu : cfg.nus) {
        const ComplexFrequency zeta(nu, a);
        if (!S)
            S = std::make_unique<Setup>(build_sphere_mesh(k), cfg, zeta);
        else
            S->rebuild(zeta);
        const CMatrix K = assemble_dense(S->mesh, zeta, cfg.quad_order, cfg.dense_limit);
        for (int m : cfg.points)
            rows.push_back(error_row(cfg, *S, K, "fixed", a, fixed_schedule(S->P, S->tree, m - 1), m));
        if (cfg.variable_order) {
            const auto kc = ErrorBoundConstants::compute(cfg.eta1, cfg.eta2, cfg.eta3);
            const double h_min = mesh_metrics(S->mesh).h_min;
            const auto op = default_order_parameters(kc, h_min);
            const OrderSchedule sch = select_orders(S->P, S->tree, S->params, h_min, op.epsilon, op.c0, op.sigma_tilde);
            if (sch.max_order() > OperatorOptions{}.max_degree) {
                ExperimentRow r = base_row(cfg, "variable_skipped", n, a, zeta, S->P);
                r.points = sch.max_order() + 1;
                rows.push_back(r);
            } else {
                rows.push_back(error_row(cfg, *S, K, "variable", a, sch, sch.max_order() + 1));
            }
        }
    }
    return rows;
}

std::vector<ExperimentRow> run_patterns(const ExperimentConfig& cfg) {
    require(cfg.refinements.size() == 1 && !cfg.ratios.empty(), "pattern: need one refinement and ratios");
    const int k = cfg.refinements.front();
    const std::size_t n = sphere_size(k);
    const double a = alpha_for(cfg, n);
    std::vector<ExperimentRow> rows;
    std::unique_ptr<Setup> S;
    for (double ratio : cfg.ratios) {
        const auto t0 = clock_type::now();
        const ComplexFrequency zeta(ratio * a, a);
        if (!S)
            S = std::make_unique<Setup>(build_sphere_mesh(k), cfg, zeta);
        else
            S->rebuild(zeta);
        const Image img = render_pattern(S->P, S->tree, cfg.image_side);
        std::ostringstream name;
        name << "ratio_" << ratio;
        ExperimentRow r = base_row(cfg, name.str(), n, a, zeta, S->P);
        r.extra = img.fraction(255, 0, 0);
        if (!cfg.out_dir.empty()) {
            std::filesystem::create_directories(cfg.out_dir);
            write_ppm((std::filesystem::path(cfg.out_dir) / ("pattern_" + name.str() + ".ppm")).string(), img);
        }
        r.runtime_s = seconds_since(t0);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.id) {
    case ExperimentId::blocks_vs_n: return run_blocks_vs_n(cfg);
    case ExperimentId::convergence_vs_m: return run_convergence_vs_m(cfg);
    case ExperimentId::blocks_vs_nu: return run_blocks_vs_nu(cfg);
    case ExperimentId::error_vs_nu: return run_error_vs_nu(cfg);
    case ExperimentId::pattern: return run_patterns(cfg);
    }
    throw std::invalid_argument("run_experiment: unknown experiment");
}

InverseFit fit_inverse(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_inverse: need at least two (x, y) pairs");
    const Eigen::Index m = Eigen::Index(x.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(x[i] > -1.0))
            throw std::invalid_argument("fit_inverse: x must exceed -1");
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / (x[i] + 1.0);
        b[i] = y[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    InverseFit f;
    f.a = c[0];
    f.b = c[1];
    const double ss_res = (A * c - b).squaredNorm();
    const double ss_tot = (b.array() - b.mean()).square().sum();
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

void write_rows_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
    os << "experiment,case,n,alpha,zeta_re,zeta_im,m,near_blocks,far_blocks,blocks,blocks_per_dof,error,residual,"
          "extra,runtime_s\n";
    const auto old = os.precision(12);
    for (const auto& r : rows)
        os << r.experiment << ',' << r.case_name << ',' << r.n << ',' << r.alpha << ',' << r.zeta_re << ','
           << r.zeta_im << ',' << r.points << ',' << r.near_blocks << ',' << r.far_blocks << ',' << r.blocks << ','
           << r.blocks_per_dof << ',' << r.error << ',' << r.residual << ',' << r.extra << ',' << r.runtime_s
           << '\n';
    os.precision(old);
}

std::string experiment_manifest(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows,
                                double total_seconds) {
    using nlohmann::json;
    json c;
    c["experiment"] = to_string(cfg.id);
    c["refinements"] = cfg.refinements;
    c["alpha"] = cfg.alpha > 0 ? json(cfg.alpha) : json("sqrt(n/128)");
    c["eta"] = {cfg.eta1, cfg.eta2, cfg.eta3};
    c["points"] = cfg.points;
    c["nus"] = cfg.nus;
    c["ratios"] = cfg.ratios;
    c["variable_order"] = cfg.variable_order;
    c["quad_order"] = cfg.quad_order;
    c["seed"] = cfg.seed;
    c["leaf_size"] = cfg.leaf_size;
    c["tree_mode"] = cfg.mode == TreeMode::tight ? "tight" : "regular";
    c["power_iterations"] = cfg.power_iters;
    c["dense_limit"] = cfg.dense_limit;

    json m;
    m["library"] = "dh2";
    m["version"] = library_version;
    m["config"] = c;
    m["rows"] = rows.size();
    json t = json::array();
    for (const auto& r : rows)
        t.push_back({{"case", r.case_name}, {"n", r.n}, {"m", r.points}, {"zeta_re", r.zeta_re}, {"seconds", r.runtime_s}});
    m["timings"] = t;
    m["total_seconds"] = total_seconds;
    if (cfg.id == ExperimentId::blocks_vs_nu && rows.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            x.push_back(r.zeta_re);
            y.push_back(double(r.blocks));
        }
        const InverseFit f = fit_inverse(x, y);
        m["fit"] = {{"a", f.a}, {"b", f.b}, {"r2", f.r2}};
    }
    return m.dump(2);
}

std::string write_experiment_outputs(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows,
                                     double total_seconds) {
    if (cfg.out_dir.empty())
        throw std::invalid_argument("write_experiment_outputs: no output directory");
    std::filesystem::create_directories(cfg.out_dir);
    const auto base = std::filesystem::path(cfg.out_dir) / to_string(cfg.id);
    const std::string csv = base.string() + ".csv";
    std::ofstream f(csv);
    if (!f)
        throw std::runtime_error("cannot write " + csv);
    write_rows_csv(f, rows);
    std::ofstream j(base.string() + ".json");
    if (!j)
        throw std::runtime_error("cannot write " + base.string() + ".json");
    j << experiment_manifest(cfg, rows, total_seconds) << '\n';
    return csv;
}

}  // namespace dh2
