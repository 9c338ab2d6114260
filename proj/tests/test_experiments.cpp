#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dh2/experiments.hpp"

using namespace dh2;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("dh2_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

bool same_except_runtime(const ExperimentRow& a, const ExperimentRow& b) {
    return a.experiment == b.experiment && a.case_name == b.case_name && a.n == b.n && a.alpha == b.alpha &&
           a.zeta_re == b.zeta_re && a.zeta_im == b.zeta_im && a.points == b.points &&
           a.near_blocks == b.near_blocks && a.far_blocks == b.far_blocks && a.blocks == b.blocks &&
           a.blocks_per_dof == b.blocks_per_dof && a.error == b.error && a.residual == b.residual &&
           a.extra == b.extra;
}

}  // namespace

TEST_CASE("experiment names round trip") {
    for (auto id : {ExperimentId::blocks_vs_n, ExperimentId::convergence_vs_m, ExperimentId::blocks_vs_nu,
                    ExperimentId::error_vs_nu, ExperimentId::pattern})
        CHECK(experiment_from_string(to_string(id)) == id);
    CHECK_THROWS_AS(experiment_from_string("blocks"), std::invalid_argument);
    CHECK(default_alpha(2048) == doctest::Approx(4.0));
    CHECK(sphere_size(4) == 2048);
}

TEST_CASE("block counts are deterministic and nu = 0 reproduces the imaginary case") {
    ExperimentConfig c = experiment_preset(ExperimentId::blocks_vs_n);
    c.refinements = {3, 4};
    const auto a = run_blocks_vs_n(c);
    const auto b = run_blocks_vs_n(c);
    REQUIRE(a.size() == 4);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(same_except_runtime(a[i], b[i]));
    CHECK(a[2].case_name == "complex");
    CHECK(a[3].case_name == "imaginary");
    CHECK(a[3].zeta_re == 0.0);
    CHECK(a[3].zeta_im == doctest::Approx(4.0));
    CHECK(a[2].blocks_per_dof == doctest::Approx(double(a[2].blocks) / 2048.0));
    CHECK(a[2].near_blocks + a[2].far_blocks == a[2].blocks);

    ExperimentConfig v = experiment_preset(ExperimentId::blocks_vs_nu);
    v.refinements = {4};
    v.nus = {0, 4};
    const auto r = run_blocks_vs_nu(v);
    REQUIRE(r.size() == 2);
    CHECK(r[0].blocks == a[3].blocks);
    CHECK(r[1].blocks == a[2].blocks);
    CHECK(r[1].blocks <= r[0].blocks);

    v.refinements = {3, 4};
    CHECK_THROWS_AS(run_blocks_vs_nu(v), std::invalid_argument);
}

TEST_CASE("inverse fit") {
    std::vector<double> x, y;
    for (int nu = 0; nu <= 24; nu += 2) {
        x.push_back(nu);
        y.push_back(3.0 + 5.0 / (nu + 1.0));
    }
    const InverseFit f = fit_inverse(x, y);
    CHECK(f.a == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.b == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    // a linear trend is not of that shape
    std::vector<double> lin;
    for (double t : x)
        lin.push_back(10.0 - t);
    CHECK(fit_inverse(x, lin).r2 < 0.9);
    CHECK_THROWS_AS(fit_inverse({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_inverse({1.0, 2.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_inverse({-1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("zero points leaves exactly the far field as error") {
    ExperimentConfig c = experiment_preset(ExperimentId::convergence_vs_m);
    c.refinements = {3};
    c.points = {0};
    c.power_iters = 200;
    const auto rows = run_convergence_vs_m(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].points == 0);
    REQUIRE(rows[0].far_blocks > 0);

    // dense oracle: zero out the near blocks and take the largest singular value
    const SurfaceMesh mesh = build_sphere_mesh(3);
    const ComplexFrequency zeta(2.0, 2.0);
    AdmissibilityParams p;
    p.zeta = zeta;
    const ClusterTree tree = build_cluster_tree(mesh, c.leaf_size, c.mode);
    const BlockPartition P = divide(tree, build_direction_sets(tree, zeta, p.eta1), p);
    CHECK(P.far_count == rows[0].far_blocks);
    const CMatrix K = assemble_dense(mesh, zeta, c.quad_order);
    CMatrix F = K;
    for (const auto& b : P.blocks)
        if (!b.is_far())
            for (auto i : tree.label(b.t))
                for (auto j : tree.label(b.s))
                    F(Eigen::Index(i), Eigen::Index(j)) = 0.0;
    const double sf = Eigen::BDCSVD<CMatrix>(F).singularValues()[0];
    const double sk = Eigen::BDCSVD<CMatrix>(K).singularValues()[0];
    // power iteration approaches from below
    CHECK(rows[0].error <= sf / sk * 1.01);
    CHECK(rows[0].error >= sf / sk * 0.95);
}

TEST_CASE("pattern red fraction shrinks as the real part grows") {
    ExperimentConfig c = experiment_preset(ExperimentId::pattern);
    c.refinements = {3};
    c.image_side = 256;
    const auto dir = scratch_dir("pattern");
    c.out_dir = dir.string();
    const auto rows = run_patterns(c);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].extra <= rows[i - 1].extra);
    CHECK(rows[0].extra > 0.0);
    for (double r : c.ratios) {
        std::ostringstream name;
        name << "pattern_ratio_" << r << ".ppm";
        std::ifstream f(dir / name.str(), std::ios::binary);
        REQUIRE(f);
        std::string magic;
        f >> magic;
        CHECK(magic == "P6");
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("CSV and JSON outputs") {
    ExperimentConfig c = experiment_preset(ExperimentId::blocks_vs_nu);
    c.refinements = {3};
    c.nus = {0, 2, 4};
    const auto dir = scratch_dir("outputs");
    c.out_dir = dir.string();
    const auto rows = run_blocks_vs_nu(c);
    const std::string csv = write_experiment_outputs(c, rows, 1.5);
    std::ifstream f(csv);
    REQUIRE(f);
    std::string line;
    std::getline(f, line);
    CHECK(line ==
          "experiment,case,n,alpha,zeta_re,zeta_im,m,near_blocks,far_blocks,blocks,blocks_per_dof,error,residual,"
          "extra,runtime_s");
    std::size_t count = 0;
    while (std::getline(f, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 14);
        CHECK(line.rfind("blocks_vs_nu,nu,512,", 0) == 0);
        ++count;
    }
    CHECK(count == rows.size());

    std::ifstream j(dir / "blocks_vs_nu.json");
    REQUIRE(j);
    const nlohmann::json m = nlohmann::json::parse(j);
    CHECK(m["version"] == library_version);
    CHECK(m["rows"] == 3);
    CHECK(m["total_seconds"] == 1.5);
    CHECK(m["config"]["experiment"] == "blocks_vs_nu");
    CHECK(m["config"]["leaf_size"] == 32);
    CHECK(m["timings"].size() == 3);
    REQUIRE(m.contains("fit"));
    std::vector<double> x, y;
    for (const auto& r : rows) {
        x.push_back(r.zeta_re);
        y.push_back(double(r.blocks));
    }
    CHECK(m["fit"]["b"].get<double>() == doctest::Approx(fit_inverse(x, y).b));

    ExperimentConfig none = c;
    none.out_dir.clear();
    CHECK_THROWS_AS(write_experiment_outputs(none, rows, 0.0), std::invalid_argument);
    std::filesystem::remove_all(dir);
}
