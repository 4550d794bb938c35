#include "ddro/serialization.hpp"

#include <cstdio>

namespace ddro {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json to_json(const DiscreteDistribution& dist) {
    return nlohmann::json(dist.mass());
}

nlohmann::json to_json(const Ball& ball) {
    return nlohmann::json{{"kind", to_string(ball.kind())},
                          {"radius", ball.radius()},
                          {"reference", ball.reference().mass()}};
}

DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
    return DiscreteDistribution(j.get<std::vector<double>>());
}

Ball ball_from_json(const nlohmann::json& j) {
    return Ball(ball_kind_from_string(j.at("kind").get<std::string>()),
                j.at("radius").get<double>(),
                ReferenceDistribution(j.at("reference").get<std::vector<double>>()));
}

nlohmann::json to_json(const SolveReport& report) {
    nlohmann::json j{{"x_star", report.x_star},
                     {"objective", report.objective},
                     {"iterations", report.iterations},
                     {"converged", report.converged},
                     {"smooth_conditions_held", report.smooth_conditions_held}};
    if (report.dual_star) {
        if (const auto* l2 = std::get_if<DualPointL2>(&*report.dual_star)) {
            j["dual"] = {{"lambda", l2->lambda}, {"nu", l2->nu}};
        } else {
            const auto& dr = std::get<DualPointDR>(*report.dual_star);
            j["dual"] = {{"lambdas", dr.lambdas}, {"nu", dr.nu}};
        }
    }
    return j;
}

std::string history_csv(const SolveReport& report) {
    std::string out = "iteration,objective,gradient_norm\n";
    for (std::size_t i = 0; i < report.history.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(report.history[i]);
        out += ',';
        out += format_double(i < report.gradient_norms.size() ? report.gradient_norms[i] : 0.0);
        out += '\n';
    }
    return out;
}

}  // namespace ddro
