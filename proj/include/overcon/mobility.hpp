#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "overcon/linkage.hpp"

namespace overcon {

struct SolverOptions {
    int restarts = 50;
    int max_iterations = 200;
    double tolerance = 1e-10;     // closure residual norm
    double start_range = 2.0;     // starts uniform in [-r, r]
};

/// Deterministic per-sample seed derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Analytic 7 x n Jacobian of the closure residual (finite parameters).
Eigen::MatrixXd residual_jacobian(const Linkage& L, const Configuration& c);
/// Central finite differences with the given step.
Eigen::MatrixXd residual_jacobian_fd(const Linkage& L, const Configuration& c, double step);

Eigen::Matrix<double, 7, 1> residual_vector(const Linkage& L, const Configuration& c);

/// Damped Newton (Levenberg-Marquardt) from one start. Returns the refined
/// configuration when the residual reaches the tolerance.
std::optional<Configuration> refine_configuration(const Linkage& L, Configuration start,
                                                  const SolverOptions& opt = {});

/// Random restarts until a closed configuration is found.
std::optional<Configuration> find_configuration(const Linkage& L, std::uint64_t seed, const SolverOptions& opt = {});

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

struct MobilitySample {
    Configuration config;
    int rank = 0;
    int null_dim = 0;
    double residual_norm = 0;
    bool regular = false;
    std::vector<double> joint_motion;  // per joint: norm of its row in the tangent basis
};

/// Tangent dimension at a closed configuration; rank from finite differences
/// at steps 1e-5 and 1e-7, regular when both agree.
MobilitySample local_mobility(const Linkage& L, const Configuration& c);

struct MobilityEstimate {
    std::optional<int> mobility;  // empty: inconclusive
    std::vector<std::optional<MobilitySample>> samples;  // by sample index; empty when not found
    std::map<int, int> histogram;                        // null_dim -> regular sample count
    std::vector<std::size_t> frozen_joints;
    int regular_count = 0;
    int found_count = 0;

    bool inconclusive() const { return !mobility.has_value(); }
};

/// Samples in parallel (OpenMP); merged by sample index.
MobilityEstimate mobility_estimate(const Linkage& L, int n_samples, std::uint64_t seed,
                                   const SolverOptions& opt = {});
/// Single-threaded reference with identical results.
MobilityEstimate mobility_estimate_serial(const Linkage& L, int n_samples, std::uint64_t seed,
                                          const SolverOptions& opt = {});

/// Orthonormal basis (columns) of the numerical null space of the analytic
/// Jacobian at c.
Eigen::MatrixXd tangent_basis(const Linkage& L, const Configuration& c, double rel_tol = 1e-8);

struct TraceResult {
    std::vector<Configuration> points;
    bool stopped_early = false;
};

/// Predictor-corrector along tangent direction `direction_index` of the start's
/// tangent basis. Stops at rank changes or corrector failure.
TraceResult trace_curve(const Linkage& L, const Configuration& start, int steps, int direction_index,
                        double step = 0.05);

}  // namespace overcon
