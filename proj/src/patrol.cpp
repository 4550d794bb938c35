#include "ddro/patrol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ddro {

namespace {

constexpr double kRowCap = 1.0 - kRowSlack;

std::vector<double> node_row_sums(const Graph& graph, const std::vector<double>& weights) {
    std::vector<double> sums(graph.node_count(), 0.0);
    const auto& edges = graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        sums[static_cast<std::size_t>(edges[e].first)] += weights[e];
        sums[static_cast<std::size_t>(edges[e].second)] += weights[e];
    }
    return sums;
}

}  // namespace

Graph::Graph(std::size_t node_count, std::vector<std::pair<int, int>> edges)
    : n_(node_count), edges_(std::move(edges)) {
    if (n_ < 1) throw InvalidArgument("graph needs at least one node");
    for (auto& [u, v] : edges_) {
        if (u == v) throw InvalidArgument("self-loop at node " + std::to_string(u));
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n_ ||
            static_cast<std::size_t>(v) >= n_) {
            throw InvalidArgument("edge endpoint out of range");
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    adjacency_.resize(n_);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        adjacency_[static_cast<std::size_t>(edges_[e].first)].emplace_back(
            edges_[e].second, static_cast<int>(e));
        adjacency_[static_cast<std::size_t>(edges_[e].second)].emplace_back(
            edges_[e].first, static_cast<int>(e));
    }

    std::vector<char> seen(n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, e] : adjacency_[u]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++visited;
                stack.push_back(static_cast<std::size_t>(v));
            }
        }
    }
    connected_ = visited == n_;
}

Graph Graph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open graph file '" + path + "'");
    std::vector<std::pair<int, int>> edges;
    int max_node = -1;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u)) continue;
        if (!(ls >> v)) throw InvalidArgument("graph line with a single endpoint: " + line);
        edges.emplace_back(u, v);
        max_node = std::max({max_node, u, v});
    }
    if (max_node < 0) throw InvalidArgument("graph file '" + path + "' has no edges");
    return Graph(static_cast<std::size_t>(max_node) + 1, std::move(edges));
}

Eigen::MatrixXd build_transition_matrix(const Graph& graph, const ReversibleChainParam& param) {
    const std::size_t n = graph.node_count();
    const auto& edges = graph.edges();
    if (param.edge_weights.size() != edges.size()) {
        throw DimensionMismatch("weights " + std::to_string(param.edge_weights.size()) +
                                " vs edges " + std::to_string(edges.size()));
    }
    for (double w : param.edge_weights) {
        if (!(w >= kWeightFloor) || !(w <= kRowCap)) {
            throw InfeasibleParam("edge weight " + std::to_string(w) + " outside [" +
                                  std::to_string(kWeightFloor) + ", " +
                                  std::to_string(kRowCap) + "]");
        }
    }
    const std::vector<double> sums = node_row_sums(graph, param.edge_weights);
    for (std::size_t j = 0; j < n; ++j) {
        if (sums[j] > kRowCap + 1e-15) {
            throw InfeasibleParam("row sum " + std::to_string(sums[j]) + " at node " +
                                  std::to_string(j) + " exceeds cap");
        }
    }
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        P(u, v) = param.edge_weights[e];
        P(v, u) = param.edge_weights[e];
    }
    for (std::size_t j = 0; j < n; ++j) {
        P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0 - sums[j];
    }
    return P;
}

double mean_hitting_time(const Graph& graph, const Eigen::MatrixXd& P, std::size_t goal) {
    const std::size_t n = graph.node_count();
    if (goal >= n) throw InvalidArgument("goal node out of range");
    if (n == 1) return 0.0;
    const Eigen::Index k = static_cast<Eigen::Index>(n) - 1;
    Eigen::MatrixXd A(k, k);
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == goal) continue;
        Eigen::Index col = 0;
        for (std::size_t l = 0; l < n; ++l) {
            if (l == goal) continue;
            A(row, col) = (j == l ? 1.0 : 0.0) - P(static_cast<Eigen::Index>(j),
                                                   static_cast<Eigen::Index>(l));
            ++col;
        }
        ++row;
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd h = lu.solve(ones);
    const double residual = (A * h - ones).cwiseAbs().maxCoeff();
    if (!h.allFinite() || residual > 1e-8 * (1.0 + h.cwiseAbs().maxCoeff())) {
        throw SingularSystem("absorbed-chain system is singular; goal " +
                             std::to_string(goal) + " may be unreachable");
    }
    return h.sum() / static_cast<double>(n);
}

std::vector<double> mean_hitting_time_gradient(const Graph& graph,
                                               const ReversibleChainParam& param,
                                               std::size_t goal) {
    const std::size_t n = graph.node_count();
    if (goal >= n) throw InvalidArgument("goal node out of range");
    const Eigen::MatrixXd P = build_transition_matrix(graph, param);
    const Eigen::Index k = static_cast<Eigen::Index>(n) - 1;

    // reduced-index map skipping the goal
    std::vector<Eigen::Index> reduced(n, -1);
    Eigen::Index idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != goal) reduced[j] = idx++;
    }

    Eigen::MatrixXd A(k, k);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == goal) continue;
        for (std::size_t l = 0; l < n; ++l) {
            if (l == goal) continue;
            A(reduced[j], reduced[l]) =
                (j == l ? 1.0 : 0.0) - P(static_cast<Eigen::Index>(j),
                                         static_cast<Eigen::Index>(l));
        }
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd h = lu.solve(ones);
    const double residual = (A * h - ones).cwiseAbs().maxCoeff();
    if (!h.allFinite() || residual > 1e-8 * (1.0 + h.cwiseAbs().maxCoeff())) {
        throw SingularSystem("absorbed-chain system is singular; goal " +
                             std::to_string(goal) + " may be unreachable");
    }
    const double pi = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(k, pi);
    const Eigen::VectorXd w = A.transpose().partialPivLu().solve(rhs);

    // J depends on each edge weight through four entries of P: both
    // off-diagonal slots plus the two diagonals it drains.
    const auto& edges = graph.edges();
    std::vector<double> grad(edges.size(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const bool u_in = static_cast<std::size_t>(u) != goal;
        const bool v_in = static_cast<std::size_t>(v) != goal;
        double g = 0.0;
        if (u_in && v_in) {
            const Eigen::Index ru = reduced[static_cast<std::size_t>(u)];
            const Eigen::Index rv = reduced[static_cast<std::size_t>(v)];
            g = w(ru) * h(rv) + w(rv) * h(ru) - w(ru) * h(ru) - w(rv) * h(rv);
        } else if (u_in) {
            const Eigen::Index ru = reduced[static_cast<std::size_t>(u)];
            g = -w(ru) * h(ru);
        } else if (v_in) {
            const Eigen::Index rv = reduced[static_cast<std::size_t>(v)];
            g = -w(rv) * h(rv);
        }
        grad[e] = g;
    }
    return grad;
}

HittingTimeCost::HittingTimeCost(const Graph& graph) : graph_(&graph) {
    if (!graph.connected()) {
        throw InvalidArgument("hitting-time model requires a connected graph");
    }
}

double HittingTimeCost::evaluate(std::span<const double> x, std::size_t outcome) const {
    ReversibleChainParam param;
    param.edge_weights.assign(x.begin(), x.end());
    return mean_hitting_time(*graph_, build_transition_matrix(*graph_, param), outcome);
}

std::vector<double> HittingTimeCost::gradient_x(std::span<const double> x,
                                                std::size_t outcome) const {
    ReversibleChainParam param;
    param.edge_weights.assign(x.begin(), x.end());
    return mean_hitting_time_gradient(*graph_, param, outcome);
}

std::vector<double> HittingTimeCost::project(std::vector<double> x) const {
    const auto& edges = graph_->edges();
    if (x.size() != edges.size()) throw DimensionMismatch("weight vector size mismatch");
    for (auto& w : x) w = std::clamp(w, kWeightFloor, kRowCap);
    for (int pass = 0; pass < 100; ++pass) {
        const std::vector<double> sums = node_row_sums(*graph_, x);
        double worst = 0.0;
        std::vector<double> scale(graph_->node_count(), 1.0);
        for (std::size_t j = 0; j < sums.size(); ++j) {
            if (sums[j] > kRowCap) {
                scale[j] = kRowCap / sums[j];
                worst = std::max(worst, sums[j] - kRowCap);
            }
        }
        if (worst <= 0.0) break;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const double s = std::min(scale[static_cast<std::size_t>(edges[e].first)],
                                      scale[static_cast<std::size_t>(edges[e].second)]);
            x[e] = std::max(kWeightFloor, x[e] * s);
        }
    }
    return x;
}

std::vector<double> HittingTimeCost::feasible_start() const {
    std::size_t max_degree = 1;
    for (const auto& nbrs : graph_->adjacency()) {
        max_degree = std::max(max_degree, nbrs.size());
    }
    const double w = 0.8 / static_cast<double>(max_degree);
    return std::vector<double>(graph_->edges().size(), w);
}

namespace {

PatrolResult summarize(const Graph& graph, SolveReport report,
                       std::span<const double> beta_evals) {
    const HittingTimeCost model(graph);
    const ReferenceDistribution ref = ReferenceDistribution::uniform(graph.node_count());
    PatrolResult out;
    out.costs.resize(graph.node_count());
    for (std::size_t i = 0; i < out.costs.size(); ++i) {
        out.costs[i] = model.evaluate(report.x_star, i);
    }
    out.mean = expectation(ref, out.costs);
    out.stddev = std::sqrt(variance(ref, out.costs));
    for (double b : beta_evals) {
        const ProbabilityLevel level(b);
        PatrolSummaryRow row;
        row.beta_eval = b;
        row.var = value_at_risk(out.costs, ref, level);
        row.cvar = cvar_tilde(out.costs, ref, level);
        out.table.push_back(row);
    }
    out.report = std::move(report);
    return out;
}

}  // namespace

PatrolResult patrol_ddro(const Graph& graph, BallKind kind, double c,
                         const SolverConfig& config, std::span<const double> beta_evals) {
    if (!graph.connected()) throw InvalidArgument("patrol design requires a connected graph");
    const HittingTimeCost model(graph);
    const ReferenceDistribution ref = ReferenceDistribution::uniform(graph.node_count());
    SolveReport report = solve_ddro(model, ref, kind, c, config);
    return summarize(graph, std::move(report), beta_evals);
}

PatrolResult patrol_soc(const Graph& graph, const SolverConfig& config,
                        std::span<const double> beta_evals) {
    if (!graph.connected()) throw InvalidArgument("patrol design requires a connected graph");
    const HittingTimeCost model(graph);
    const ReferenceDistribution ref = ReferenceDistribution::uniform(graph.node_count());
    SolveReport report = solve_soc(model, ref, config);
    return summarize(graph, std::move(report), beta_evals);
}

}  // namespace ddro
