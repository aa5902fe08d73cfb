#include "tse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tse/nc.hpp"
#include "tse/priors.hpp"

namespace tse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd from_span(std::span<const double> s) {
    return Eigen::Map<const VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

struct Residuals {
    VectorXd dual;
    VectorXd cent_lower;
    VectorXd cent_upper;
    double pri = 0.0;

    double norm() const {
        return std::sqrt(dual.squaredNorm() + cent_lower.squaredNorm() + cent_upper.squaredNorm() + pri * pri);
    }
};

// KKT residuals at barrier parameter inv_t = 1/t (inv_t = 0 gives pure complementarity).
Residuals residuals(const VectorXd& q, const MatrixXd& P, const VectorXd& x, const VectorXd& ll, const VectorXd& lu,
                    double nu, double inv_t) {
    Residuals r;
    r.dual = q + P * x - ll + lu + VectorXd::Constant(x.size(), nu);
    r.cent_lower = ll.cwiseProduct(x).array() - inv_t;
    r.cent_upper = lu.cwiseProduct(VectorXd::Ones(x.size()) - x).array() - inv_t;
    r.pri = x.sum() - 1.0;
    return r;
}

void fill_diagnostics(SolverReport& rep, const Residuals& r) {
    rep.dual_residual = r.dual.norm();
    rep.primal_residual = std::abs(r.pri);
    rep.centrality_residual = std::sqrt(r.cent_lower.squaredNorm() + r.cent_upper.squaredNorm());
    rep.final_residual = rep.dual_residual + rep.primal_residual + rep.centrality_residual;
}

}  // namespace

double similarity(double gray_i, double gray_j) { return std::exp(-std::abs(gray_i - gray_j) / kSigmaSq); }

double proximity(Point2 a, Point2 b) { return std::exp(-std::hypot(a[0] - b[0], a[1] - b[1]) / kDistanceScale); }

VectorXd EnergySpec::linear_cost() const { return t + alpha * c + gamma * f; }

MatrixXd EnergySpec::quadratic_matrix() const {
    MatrixXd m = rho.cwiseProduct(d);
    m.diagonal().setZero();
    MatrixXd p = -m;
    p.diagonal() = m.rowwise().sum();
    return 4.0 * beta * p;
}

double EnergySpec::objective(const VectorXd& s) const {
    return linear_cost().dot(s) + 0.5 * s.dot(quadratic_matrix() * s);
}

EnergySpec assemble(std::span<const double> t, std::span<const double> c, std::span<const double> f,
                    std::span<const double> gray, std::span<const Point2> centers, double alpha, double beta,
                    double gamma) {
    const std::size_t n = t.size();
    if (c.size() != n || f.size() != n || gray.size() != n || centers.size() != n)
        throw std::invalid_argument("assemble: dimension mismatch between energy terms");
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) throw std::invalid_argument("assemble: weights must be >= 0");
    EnergySpec e;
    e.n = static_cast<int>(n);
    e.t = from_span(t);
    e.c = from_span(c);
    e.f = from_span(f);
    e.alpha = alpha;
    e.beta = beta;
    e.gamma = gamma;
    e.rho.resize(e.n, e.n);
    e.d.resize(e.n, e.n);
    for (int i = 0; i < e.n; ++i) {
        for (int j = i; j < e.n; ++j) {
            e.rho(i, j) = e.rho(j, i) = i == j ? 1.0 : similarity(gray[i], gray[j]);
            e.d(i, j) = e.d(j, i) = i == j ? 1.0 : proximity(centers[i], centers[j]);
        }
    }
    return e;
}

EnergySpec assemble(std::span<const double> t, std::span<const double> c, std::span<const double> f,
                    const RegionGraph& graph, double alpha, double beta, double gamma) {
    return assemble(t, c, f, graph.gray, graph.center, alpha, beta, gamma);
}

SolverReport solve(const EnergySpec& spec, const SolverOptions& opt) {
    const int n = spec.n;
    if (n <= 0) throw SolverError("solve: empty energy (N = 0)");
    const VectorXd q = spec.linear_cost();
    const MatrixXd P = spec.quadratic_matrix();
    const VectorXd ones = VectorXd::Ones(n);

    SolverReport rep;
    if (n == 1) {
        // The equality constraint pins s = 1; any nu balancing stationarity is optimal.
        rep.s = ones;
        rep.lambda_lower = VectorXd::Zero(1);
        rep.lambda_upper = VectorXd::Zero(1);
        rep.nu = -(q(0) + P(0, 0));
        fill_diagnostics(rep, residuals(q, P, rep.s, rep.lambda_lower, rep.lambda_upper, rep.nu, 0.0));
        rep.objective = spec.objective(rep.s);
        return rep;
    }

    const double m = 2.0 * n;
    VectorXd x = VectorXd::Constant(n, 1.0 / n);
    VectorXd ll = ones;
    VectorXd lu = ones;
    double nu = 0.0;

    for (int it = 0;; ++it) {
        const Residuals gap = residuals(q, P, x, ll, lu, nu, 0.0);
        rep.s = x;
        rep.lambda_lower = ll;
        rep.lambda_upper = lu;
        rep.nu = nu;
        rep.iterations = it;
        fill_diagnostics(rep, gap);
        rep.objective = spec.objective(x);
        if (rep.final_residual < opt.tolerance) return rep;
        if (it >= opt.max_iterations) throw SolverError("solve: iteration cap exceeded without convergence", rep);

        // Surrogate duality gap sets the barrier parameter.
        const VectorXd slack_upper = ones - x;
        const double eta = ll.dot(x) + lu.dot(slack_upper);
        const double inv_t = eta / (opt.centering * m);
        const Residuals r = residuals(q, P, x, ll, lu, nu, inv_t);

        // Reduced Newton system: H dx + 1 dnu = -g, 1^T dx = -r_pri.
        MatrixXd H = P;
        H.diagonal() += ll.cwiseQuotient(x) + lu.cwiseQuotient(slack_upper);
        const VectorXd g = r.dual + r.cent_lower.cwiseQuotient(x) - r.cent_upper.cwiseQuotient(slack_upper);

        Eigen::LLT<MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) {
            H.diagonal().array() += 1e-12;
            llt.compute(H);
            if (llt.info() != Eigen::Success) throw SolverError("solve: singular Newton system", rep);
        }
        const VectorXd hg = llt.solve(g);
        const VectorXd h1 = llt.solve(ones);
        const double dnu = (r.pri - ones.dot(hg)) / ones.dot(h1);
        const VectorXd dx = -hg - dnu * h1;
        const VectorXd dll = -(r.cent_lower + ll.cwiseProduct(dx)).cwiseQuotient(x);
        const VectorXd dlu = (lu.cwiseProduct(dx) - r.cent_upper).cwiseQuotient(slack_upper);

        // Largest step keeping the multipliers positive, then strict primal feasibility.
        double step = 1.0;
        for (int i = 0; i < n; ++i) {
            if (dll(i) < 0.0) step = std::min(step, -ll(i) / dll(i));
            if (dlu(i) < 0.0) step = std::min(step, -lu(i) / dlu(i));
        }
        step *= 0.99;
        auto interior = [&](double s) {
            const VectorXd xn = x + s * dx;
            return (xn.array() > 0.0).all() && (xn.array() < 1.0).all();
        };
        while (!interior(step) && step > 0.0) step *= opt.backtrack;

        const double r_norm = r.norm();
        while (step > std::numeric_limits<double>::min()) {
            const Residuals rn = residuals(q, P, x + step * dx, ll + step * dll, lu + step * dlu, nu + step * dnu, inv_t);
            if (rn.norm() <= (1.0 - opt.sufficient_decrease * step) * r_norm) break;
            step *= opt.backtrack;
        }
        if (!(step > std::numeric_limits<double>::min())) throw SolverError("solve: line search failed", rep);

        x += step * dx;
        ll += step * dll;
        lu += step * dlu;
        nu += step * dnu;
    }
}

void to_json(nlohmann::json& j, const EnergySpec& e) {
    std::vector<std::vector<double>> rho(e.n), d(e.n);
    for (int i = 0; i < e.n; ++i) {
        rho[i] = to_vec(e.rho.row(i).transpose());
        d[i] = to_vec(e.d.row(i).transpose());
    }
    j = {{"n", e.n},         {"t", to_vec(e.t)},         {"c", to_vec(e.c)}, {"f", to_vec(e.f)},
         {"alpha", e.alpha}, {"beta", e.beta},           {"gamma", e.gamma}, {"rho", rho},
         {"d", d}};
}

void from_json(const nlohmann::json& j, EnergySpec& e) {
    j.at("n").get_to(e.n);
    auto vec = [&](const char* key) {
        const auto v = j.at(key).get<std::vector<double>>();
        if (static_cast<int>(v.size()) != e.n) throw std::invalid_argument(std::string("EnergySpec: bad length of ") + key);
        return from_span(v);
    };
    auto mat = [&](const char* key) {
        const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
        MatrixXd out(e.n, e.n);
        if (static_cast<int>(rows.size()) != e.n) throw std::invalid_argument(std::string("EnergySpec: bad shape of ") + key);
        for (int i = 0; i < e.n; ++i) {
            if (static_cast<int>(rows[i].size()) != e.n)
                throw std::invalid_argument(std::string("EnergySpec: bad shape of ") + key);
            for (int k = 0; k < e.n; ++k) out(i, k) = rows[i][k];
        }
        return out;
    };
    e.t = vec("t");
    e.c = vec("c");
    e.f = vec("f");
    j.at("alpha").get_to(e.alpha);
    j.at("beta").get_to(e.beta);
    j.at("gamma").get_to(e.gamma);
    e.rho = mat("rho");
    e.d = mat("d");
}

void to_json(nlohmann::json& j, const SolverReport& r) {
    j = {{"s", to_vec(r.s)},
         {"lambda_lower", to_vec(r.lambda_lower)},
         {"lambda_upper", to_vec(r.lambda_upper)},
         {"nu", r.nu},
         {"iterations", r.iterations},
         {"dual_residual", r.dual_residual},
         {"primal_residual", r.primal_residual},
         {"centrality_residual", r.centrality_residual},
         {"final_residual", r.final_residual},
         {"objective", r.objective}};
}

}  // namespace tse
