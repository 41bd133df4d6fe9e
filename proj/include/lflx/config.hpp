#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lflx/solver.hpp"

namespace lflx {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnalysisConfig {
    std::vector<double> ell_list{0.1, 0.3, 0.6};
    std::vector<double> p_list{2.0, 3.0};
    std::vector<int> separations;  // empty -> dyadic 1,2,4,...,n/4
    std::string directions = "axes+diagonals";  // or "axes"
    double fit_r_min = 0.0;  // 0 -> 4 * dx
    double fit_r_max = 0.0;  // 0 -> ell0 / 4
    double ell0 = kTwoPi;
    std::vector<double> sigma_list{1.0 / 3.0, 0.5};
    std::string mollifier = "bump";  // or "gaussian" (non-conforming cross-check)
    int analysis_stride = 1;         // snapshots between analysis samples
    double epsilon = 0.05;
    double consistency_tol = 0.2;
};

struct SweepConfig {
    std::vector<double> nu_list{1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<std::uint64_t> seed_list{1};
};

/// Whole-experiment configuration; round-trips losslessly through the
/// key = value text format (see README for the grammar).
struct ExperimentConfig {
    SolverConfig solver;
    AnalysisConfig analysis;
    SweepConfig sweep;
    std::string output_dir = "out";

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);
    std::string serialize() const;
};

std::string format_double(double v);  // %.17g, lossless for f64

}  // namespace lflx
