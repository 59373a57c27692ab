#include "pitest/serialize.hpp"

#include "json.hpp"

namespace pitest {

using Json = nlohmann::ordered_json;

const char* multiplier_name(MultiplierKind kind)
{
    return kind == MultiplierKind::gaussian ? "gaussian" : "rademacher";
}

MultiplierKind parse_multiplier(const std::string& name)
{
    if (name == "gaussian") {
        return MultiplierKind::gaussian;
    }
    if (name == "rademacher") {
        return MultiplierKind::rademacher;
    }
    throw ConfigError("unknown multiplier type '" + name + "'");
}

std::string report_json(const TestReport& report, int indent)
{
    Json tuning;
    tuning["n"] = report.tuning.n;
    tuning["r"] = report.tuning.r;
    tuning["delta"] = report.tuning.delta;
    tuning["lambda"] = report.tuning.lambda;
    tuning["mu"] = report.tuning.mu;
    tuning["mu_tilde"] = report.tuning.mu_tilde;
    tuning["nu"] = report.tuning.nu;
    tuning["c_gamma"] = report.tuning.c_gamma;
    tuning["bootstrap_draws"] = report.bootstrap_draws;
    tuning["multiplier"] = multiplier_name(report.multiplier);
    tuning["variant"] = variant_name(report.variant);
    tuning["alpha"] = report.alpha;

    Json j;
    j["statistic"] = report.statistic;
    j["theta_hat"] = std::vector<double>(report.theta_hat.data(), report.theta_hat.data() + report.theta_hat.size());
    j["critical_value"] = report.critical_value;
    j["p_value"] = report.p_value;
    j["reject"] = report.reject;
    j["draws"] = report.draws;
    j["tuning"] = std::move(tuning);
    j["seed"] = report.seed;
    return j.dump(indent);
}

std::string experiment_json(const ExperimentResult& result, int indent)
{
    Json j;
    j["dgp"] = result.dgp;
    j["n"] = result.n;
    j["reps"] = result.reps;
    j["alpha"] = result.alpha;
    j["rejection_rate"] = result.rejection_rate;
    j["ks_distance"] = result.ks_distance ? Json(*result.ks_distance) : Json(nullptr);
    j["excluded"] = result.excluded;
    j["seed"] = result.seed;
    j["runtime_seconds"] = result.runtime_seconds;
    return j.dump(indent);
}

} // namespace pitest
