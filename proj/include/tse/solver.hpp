#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tse/superpixel.hpp"

namespace tse {

/// Region affinity exp(-|g_i - g_j| / sigma^2).
double similarity(double gray_i, double gray_j);

/// Spatial proximity exp(-|SC_i - SC_j| / d_D); decays with distance.
double proximity(Point2 a, Point2 b);

/// Hybrid saliency energy over region saliencies s:
///   E(s) = q^T s + beta * sum_ij rho_ij d_ij (s_i - s_j)^2,  q = t + alpha c + gamma f
/// subject to 0 <= s_i <= 1 and sum s_i = 1.
struct EnergySpec {
    int n = 0;
    Eigen::VectorXd t;  // NC truth
    Eigen::VectorXd c;  // center cost
    Eigen::VectorXd f;  // FG cost
    double alpha = 10.0;
    double beta = 2.0;
    double gamma = 80.0;
    Eigen::MatrixXd rho;  // pairwise similarity, unit diagonal
    Eigen::MatrixXd d;    // pairwise proximity, unit diagonal

    Eigen::VectorXd linear_cost() const;
    /// P = 4 beta (Diag(M 1) - M), M = rho .* d off the diagonal, so that
    /// s^T P s / 2 equals the smoothness double sum.
    Eigen::MatrixXd quadratic_matrix() const;
    double objective(const Eigen::VectorXd& s) const;
};

/// Builds the energy from per-region costs and the region statistics in `graph`.
EnergySpec assemble(std::span<const double> t, std::span<const double> c, std::span<const double> f,
                    const RegionGraph& graph, double alpha, double beta, double gamma);

/// Same as above from raw per-region grays and centroids.
EnergySpec assemble(std::span<const double> t, std::span<const double> c, std::span<const double> f,
                    std::span<const double> gray, std::span<const Point2> centers, double alpha, double beta,
                    double gamma);

struct SolverOptions {
    double tolerance = 1e-6;  // on |r_dual| + |r_pri| + |r_cent|
    int max_iterations = 200;
    double centering = 10.0;
    double sufficient_decrease = 0.01;
    double backtrack = 0.5;
};

struct SolverReport {
    Eigen::VectorXd s;
    Eigen::VectorXd lambda_lower;  // multipliers of -s <= 0
    Eigen::VectorXd lambda_upper;  // multipliers of s - 1 <= 0
    double nu = 0.0;               // multiplier of sum(s) = 1
    int iterations = 0;
    double dual_residual = 0.0;
    double primal_residual = 0.0;
    double centrality_residual = 0.0;  // |lambda o (-g)|, the complementarity gap vector
    double final_residual = 0.0;       // sum of the three norms
    double objective = 0.0;
};

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, SolverReport last = {})
        : std::runtime_error(what), report(std::move(last)) {}
    SolverReport report;
};

/// Primal-dual interior-point minimization of the energy over the box-bounded simplex.
/// Throws SolverError on N = 0 or when the iteration cap is hit.
SolverReport solve(const EnergySpec& spec, const SolverOptions& options = {});

void to_json(nlohmann::json& j, const EnergySpec& e);
void from_json(const nlohmann::json& j, EnergySpec& e);
void to_json(nlohmann::json& j, const SolverReport& r);

}  // namespace tse
