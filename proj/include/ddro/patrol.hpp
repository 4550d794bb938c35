#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddro/risk.hpp"
#include "ddro/solver.hpp"

namespace ddro {

// Undirected simple graph over nodes {0, ..., n-1}. Self-transition mass
// lives on the diagonal of the transition matrix, so the edge set carries no
// self-loops. Connectivity is precomputed; disconnected graphs are allowed
// to exist (their hitting-time solves fail with SingularSystem) but patrol
// design requires a connected graph.
class Graph {
public:
    Graph(std::size_t node_count, std::vector<std::pair<int, int>> edges);

    // Plain text, one "u v" pair per line, '#' starts a comment. Node count
    // is inferred as max index + 1.
    static Graph load(const std::string& path);

    std::size_t node_count() const noexcept { return n_; }
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    bool connected() const noexcept { return connected_; }

    // (neighbor, edge index) lists per node.
    const std::vector<std::vector<std::pair<int, int>>>& adjacency() const noexcept {
        return adjacency_;
    }

private:
    std::size_t n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
    bool connected_;
};

// Decision vector: one transition probability per undirected edge. With a
// uniform stationary distribution, reversibility makes P symmetric, so this
// parameterizes every admissible chain.
struct ReversibleChainParam {
    std::vector<double> edge_weights;
};

inline constexpr double kWeightFloor = 1e-9;
inline constexpr double kRowSlack = 1e-9;

// Symmetric row-stochastic matrix with the given off-diagonal edge weights;
// throws InfeasibleParam when a weight or row sum violates the chain margins.
Eigen::MatrixXd build_transition_matrix(const Graph& graph, const ReversibleChainParam& param);

// Mean hitting time of {goal} from a uniform start: (1/n) sum_j h_j where
// h_goal = 0 and (I - P_minor) h = 1 on the remaining nodes.
double mean_hitting_time(const Graph& graph, const Eigen::MatrixXd& P, std::size_t goal);

// Exact gradient in the edge weights via one forward and one adjoint solve.
std::vector<double> mean_hitting_time_gradient(const Graph& graph,
                                               const ReversibleChainParam& param,
                                               std::size_t goal);

// CostModel wiring: outcome i is the goal set {i}, x is the edge-weight
// vector. Stateless and safe for concurrent read-only use.
class HittingTimeCost final : public CostModel {
public:
    explicit HittingTimeCost(const Graph& graph);

    std::size_t dimension() const override { return graph_->edges().size(); }
    std::size_t outcomes() const override { return graph_->node_count(); }
    double evaluate(std::span<const double> x, std::size_t outcome) const override;
    std::vector<double> gradient_x(std::span<const double> x,
                                   std::size_t outcome) const override;

    // Clips weights into their box, then rescales the edges of any node whose
    // row sum exceeds the cap until the parameterization is feasible again.
    std::vector<double> project(std::vector<double> x) const override;
    std::vector<double> feasible_start() const override;

private:
    const Graph* graph_;
};

struct PatrolSummaryRow {
    double beta_eval = 0.0;
    double var = 0.0;
    double cvar = 0.0;  // tilde-CVaR: f_beta at its minimizer nu = VaR
};

struct PatrolResult {
    SolveReport report;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> costs;  // hitting times at x_star, one per goal
    std::vector<PatrolSummaryRow> table;
};

// DDRO patrol design over the chosen ball with a uniform reference over goal
// nodes, summarized with the mean/std and a VaR/CVaR row per requested
// evaluation level.
PatrolResult patrol_ddro(const Graph& graph, BallKind kind, double c,
                         const SolverConfig& config = {},
                         std::span<const double> beta_evals = {});

// Expected-cost baseline on the same instance.
PatrolResult patrol_soc(const Graph& graph, const SolverConfig& config = {},
                        std::span<const double> beta_evals = {});

}  // namespace ddro
