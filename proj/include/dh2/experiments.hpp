#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dh2/operator.hpp"

namespace dh2 {

enum class ExperimentId { blocks_vs_n, convergence_vs_m, blocks_vs_nu, error_vs_nu, pattern };

std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);

//
// Orders are given as points per coordinate (degree + 1); 0 points means
// no far-field expansion at all.
//
struct ExperimentConfig {
    ExperimentId id = ExperimentId::blocks_vs_n;
    std::vector<int> refinements;     // n = 8 * 4^k
    double alpha = 0.0;               // <= 0: alpha = sqrt(n / 128)
    double eta1 = 10.0, eta2 = 2.0, eta3 = 0.5;
    std::vector<int> points;          // interpolation points per coordinate
    std::vector<double> nus;          // Re zeta values of the nu sweeps
    std::vector<double> ratios;       // Re zeta / Im zeta of the pattern panels
    bool variable_order = false;      // error_vs_nu: add a row with the default variable schedule
    int quad_order = 5;
    std::uint64_t seed = 1;
    std::size_t leaf_size = 32;
    TreeMode mode = TreeMode::tight;
    int power_iters = 30;
    std::size_t dense_limit = default_dense_limit;
    int image_side = 1024;
    std::string out_dir;              // empty: no files written
};

// Desk-scale defaults of each experiment.
ExperimentConfig experiment_preset(ExperimentId id);

double default_alpha(std::size_t n);
inline std::size_t sphere_size(int refinement) { return std::size_t(8) << (2 * refinement); }

struct ExperimentRow {
    std::string experiment;
    std::string case_name;
    std::size_t n = 0;
    double alpha = 0.0;
    double zeta_re = 0.0, zeta_im = 0.0;
    int points = -1;                  // -1: not applicable
    std::size_t near_blocks = 0, far_blocks = 0, blocks = 0;
    double blocks_per_dof = 0.0;
    double error = -1.0;              // relative spectral error, -1: not measured
    double residual = -1.0;
    double extra = 0.0;               // red fraction (pattern), far storage (error runs)
    double runtime_s = 0.0;
};

std::vector<ExperimentRow> run_blocks_vs_n(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_convergence_vs_m(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_blocks_vs_nu(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_error_vs_nu(const ExperimentConfig& cfg);
// one PPM per ratio in out_dir (if set); extra = red area fraction
std::vector<ExperimentRow> run_patterns(const ExperimentConfig& cfg);

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

// least-squares fit y ~ a + b / (x + 1)
struct InverseFit {
    double a = 0.0, b = 0.0, r2 = 0.0;
};
InverseFit fit_inverse(const std::vector<double>& x, const std::vector<double>& y);

// experiment,case,n,alpha,zeta_re,zeta_im,m,near_blocks,far_blocks,blocks,blocks_per_dof,error,residual,extra,runtime_s
void write_rows_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);

// JSON manifest with the configuration, library version and timings.
std::string experiment_manifest(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows,
                                double total_seconds);

// Writes <out_dir>/<id>.csv and <out_dir>/<id>.json; returns the CSV path.
std::string write_experiment_outputs(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows,
                                     double total_seconds);

constexpr const char* library_version = "0.1.0";

}  // namespace dh2
