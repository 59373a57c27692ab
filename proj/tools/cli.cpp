#include "cli.hpp"

#include "pitest/serialize.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <sstream>

namespace pitest::cli {
namespace {

using Json = nlohmann::json;

struct Settings {
    TuningPolicy policy;
    RunOptions run;
    std::optional<Vector> theta_lower;
    std::optional<Vector> theta_upper;
    bool draws_set = false;
};

double parse_number(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not an integer");
    }
    return static_cast<int>(v);
}

Vector parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        values.push_back(parse_number(key, item));
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

void apply_setting(Settings& s, const std::string& key, const std::string& value)
{
    auto& p = s.policy;
    auto rate = [&](Rate& r, bool coef) {
        (coef ? r.coef : r.exponent) = parse_number(key, value);
    };
    auto nu = [&]() -> Rate& {
        if (!p.nu) {
            p.nu = Rate{1.0, 0.0};
        }
        return *p.nu;
    };
    if (key == "r_coef") rate(p.r, true);
    else if (key == "r_exp") rate(p.r, false);
    else if (key == "delta_coef") rate(p.delta, true);
    else if (key == "delta_exp") rate(p.delta, false);
    else if (key == "lambda_coef") rate(p.lambda, true);
    else if (key == "lambda_exp") rate(p.lambda, false);
    else if (key == "mu_coef") rate(p.mu, true);
    else if (key == "mu_exp") rate(p.mu, false);
    else if (key == "mu_tilde_coef") rate(p.mu_tilde, true);
    else if (key == "mu_tilde_exp") rate(p.mu_tilde, false);
    else if (key == "nu_coef") nu().coef = parse_number(key, value);
    else if (key == "nu_exp") nu().exponent = parse_number(key, value);
    else if (key == "c_gamma") p.c_gamma = parse_number(key, value);
    else if (key == "B") {
        p.bootstrap_draws = parse_int(key, value);
        s.draws_set = true;
    }
    else if (key == "multiplier") p.multiplier = parse_multiplier(value);
    else if (key == "quantile") {
        if (value == "upper") p.quantile = QuantileRule::upper_order_statistic;
        else if (value == "interpolated") p.quantile = QuantileRule::interpolated;
        else throw ConfigError("config key 'quantile': expected upper or interpolated");
    }
    else if (key == "restarts") s.run.outer.restarts = parse_int(key, value);
    else if (key == "bootstrap_restarts") s.run.bootstrap.outer.restarts = parse_int(key, value);
    else if (key == "grid") s.run.outer.sanity_grid = parse_int(key, value);
    else if (key == "probes") s.run.bootstrap.probe_resolution = parse_int(key, value);
    else if (key == "workers") s.run.workers = parse_int(key, value);
    else if (key == "psi_mode") {
        if (value == "constrained") s.run.psi_mode = PsiMode::constrained;
        else if (value == "lagrangian") s.run.psi_mode = PsiMode::lagrangian;
        else throw ConfigError("config key 'psi_mode': expected constrained or lagrangian");
    }
    else if (key == "theta_lower") s.theta_lower = parse_list(key, value);
    else if (key == "theta_upper") s.theta_upper = parse_list(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

Settings read_config(const std::string& path)
{
    Settings s;
    if (path.empty()) {
        return s;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
        }
        apply_setting(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return s;
}

Vector json_vector(const Json& j, const char* what)
{
    if (!j.is_array()) {
        throw ConfigError(std::string(what) + " must be an array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix json_matrix(const Json& j, const char* what)
{
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ConfigError(std::string(what) + " must be an array of rows");
    }
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != j[0].size()) {
            throw ConfigError(std::string(what) + " rows differ in length");
        }
        m.row(static_cast<Eigen::Index>(r)) = json_vector(j[r], what).transpose();
    }
    return m;
}

// A model-spec entry: a number, a column name, or a negated column name.
struct Entry {
    double constant = 0.0;
    long column = -1;
    double sign = 1.0;

    double at(std::span<const double> row) const
    {
        return column < 0 ? constant : sign * row[static_cast<std::size_t>(column)];
    }
};

Entry parse_entry(const Json& j, const Dataset& data)
{
    if (j.is_number()) {
        return {j.get<double>(), -1, 1.0};
    }
    if (!j.is_string()) {
        throw ConfigError("model entries must be numbers or column names");
    }
    std::string name = j.get<std::string>();
    double sign = 1.0;
    if (!name.empty() && name[0] == '-') {
        sign = -1.0;
        name.erase(0, 1);
    }
    return {0.0, static_cast<long>(data.column(name)), sign};
}

TestFunctionFamily family_from_json(const Json& j, int k, const Dataset& data)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "weighted_ball") {
        return TestFunctionFamily::weighted_ball(j.contains("weight") ? json_matrix(j["weight"], "weight")
                                                                      : Matrix(Matrix::Identity(k, k)));
    }
    if (kind == "cone_polar_ball") {
        return TestFunctionFamily::cone_polar_ball(
            FinitelyGeneratedCone::from_rows(json_matrix(j.at("generators"), "generators")));
    }
    if (kind == "finite") {
        std::vector<Vector> vectors;
        for (const auto& v : j.at("vectors")) {
            vectors.push_back(json_vector(v, "vectors"));
        }
        return TestFunctionFamily::finite_family(std::move(vectors));
    }
    if (kind == "exponential") {
        std::vector<std::size_t> cols;
        for (const auto& c : j.at("instruments")) {
            cols.push_back(data.column(c.get<std::string>()));
        }
        return TestFunctionFamily::exponential_family(k, std::move(cols), j.value("half_width", 3.0),
                                                      j.value("grid", 64));
    }
    throw ConfigError("unknown family kind '" + kind + "'");
}

ParameterSpace space_from_json(const Json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "box") {
        return ParameterSpace::box(json_vector(j.at("lower"), "lower"), json_vector(j.at("upper"), "upper"));
    }
    if (kind == "ball") {
        return ParameterSpace::ball(json_vector(j.at("center"), "center"), j.at("radius").get<double>());
    }
    if (kind == "polytope") {
        return ParameterSpace::polytope(json_matrix(j.at("normals"), "normals"),
                                        json_vector(j.at("offsets"), "offsets"));
    }
    throw ConfigError("unknown parameter space kind '" + kind + "'");
}

BuiltinProblem problem_from_spec(const std::string& path, const Dataset& data)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model spec '" + path + "'");
    }
    try {
        const Json j = Json::parse(in);
        const Json& slope = j.at("slope");
        const Json& offset = j.at("offset");
        const int k = static_cast<int>(offset.size());
        if (k < 1 || !slope.is_array() || static_cast<int>(slope.size()) != k || !slope[0].is_array()) {
            throw ConfigError("model spec needs k slope rows and k offsets");
        }
        const int p = static_cast<int>(slope[0].size());
        std::vector<Entry> a;
        std::vector<Entry> b;
        for (const auto& row : slope) {
            if (static_cast<int>(row.size()) != p) {
                throw ConfigError("model spec slope rows differ in length");
            }
            for (const auto& e : row) {
                a.push_back(parse_entry(e, data));
            }
        }
        for (const auto& e : offset) {
            b.push_back(parse_entry(e, data));
        }
        MomentModel model = MomentModel::affine(k, p, [a, b, k, p](std::span<const double> row) {
            AffineRow r{Matrix(k, p), Vector(k)};
            for (int i = 0; i < k; ++i) {
                for (int c = 0; c < p; ++c) {
                    r.slope(i, c) = a[static_cast<std::size_t>(i * p + c)].at(row);
                }
                r.offset(i) = b[static_cast<std::size_t>(i)].at(row);
            }
            return r;
        });
        if (j.contains("lipschitz")) {
            model.with_lipschitz(j["lipschitz"].get<double>());
        }
        return {std::move(model), family_from_json(j.at("family"), k, data), space_from_json(j.at("space"))};
    } catch (const Json::exception& e) {
        throw ConfigError("model spec '" + path + "': " + e.what());
    }
}

std::optional<ParameterSpace> space_override(const Settings& s)
{
    if (!s.theta_lower && !s.theta_upper) {
        return std::nullopt;
    }
    if (!s.theta_lower || !s.theta_upper) {
        throw ConfigError("theta_lower and theta_upper must be given together");
    }
    return ParameterSpace::box(*s.theta_lower, *s.theta_upper);
}

int cmd_test(const std::string& model, const std::string& data_path, double alpha, const std::string& variant,
             std::uint64_t seed, const std::string& config, std::ostream& out)
{
    const Settings settings = read_config(config);
    require_valid_tuning(settings.policy, RemainderOrder::zero);
    const Variant v = parse_variant(variant);
    const Dataset data = read_csv_file(data_path);

    std::optional<BuiltinProblem> problem;
    if (model == "linear-gmm" || model == "interval-mean" || model == "npiv-sieve") {
        problem = builtin_problem(parse_dgp(model), data, {}, space_override(settings));
    } else {
        problem = problem_from_spec(model, data);
        if (auto box = space_override(settings)) {
            problem->space = *box;
        }
    }
    const EmpiricalEvaluator evaluator(problem->model, data, problem->family);
    const TestReport report = run_test(evaluator, problem->space, settings.policy, alpha, v, seed, settings.run);
    out << report_json(report) << '\n';
    return 0;
}

int cmd_cone_dist(const std::string& cone_path, const std::string& point_path, std::ostream& out)
{
    const RowMatrix generators = read_numeric_csv_file(cone_path);
    const RowMatrix point = read_numeric_csv_file(point_path);
    if (point.rows() != 1) {
        throw DataError("point file must hold exactly one row");
    }
    const FinitelyGeneratedCone cone = FinitelyGeneratedCone::from_rows(generators);
    const Vector x = point.row(0).transpose();
    const double primal = distance_primal(x, cone);
    const double dual = distance_dual(x, cone).value;
    nlohmann::ordered_json j;
    j["primal"] = primal;
    j["dual"] = dual;
    j["gap"] = std::abs(primal - dual);
    out << j.dump(2) << '\n';
    return 0;
}

struct SimulateArgs {
    std::string dgp;
    std::size_t n = 0;
    long reps = 0;
    std::string experiment;
    std::uint64_t seed = 0;
    std::string out;
    double alpha = 0.05;
    std::string variant = "plugin_K";
    double gap = 1.0;
    double crossing = 0.0;
    int k = 3;
    int p = 1;
    int workers = 0;
    int draws = 199;
    std::string config;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out)
{
    Settings settings = read_config(a.config);
    if (!settings.draws_set) {
        settings.policy.bootstrap_draws = a.draws;
    }
    require_valid_tuning(settings.policy, RemainderOrder::zero);
    if (a.reps < 1) {
        throw ConfigError("--reps must be positive");
    }
    DgpSpec spec;
    spec.kind = parse_dgp(a.dgp);
    spec.n = a.n;
    spec.seed = a.seed;
    spec.gap = a.gap;
    spec.crossing = a.crossing;
    spec.k = a.k;
    spec.p = a.p;
    ExperimentOptions options;
    options.workers = a.workers;
    options.run = settings.run;

    ExperimentResult result;
    const auto reps = static_cast<std::size_t>(a.reps);
    if (a.experiment == "null-dist") {
        result = null_distribution_experiment(spec, reps, a.alpha, settings.policy, options);
    } else if (a.experiment == "size-power") {
        result = size_power_experiment(spec, reps, a.alpha, parse_variant(a.variant), settings.policy, options);
    } else {
        throw ConfigError("unknown experiment '" + a.experiment + "' (expected null-dist or size-power)");
    }
    const std::string text = experiment_json(result);
    if (a.out.empty()) {
        out << text << '\n';
    } else {
        std::ofstream file(a.out);
        if (!file) {
            throw ConfigError("cannot write '" + a.out + "'");
        }
        file << text << '\n';
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Minimax tests for partially identified moment models", "pitest"};
    app.require_subcommand(1);

    std::string model, data, variant, config;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    auto* test = app.add_subcommand("test", "Run the bootstrap test on a dataset");
    test->add_option("--model", model, "linear-gmm, interval-mean, npiv-sieve or a JSON model spec")->required();
    test->add_option("--data", data, "CSV with a header row")->required();
    test->add_option("--alpha", alpha, "Nominal level")->required();
    test->add_option("--variant", variant, "full_K, full_Ktilde, plugin_K or plugin_Ktilde")->required();
    test->add_option("--seed", seed, "Master seed")->required();
    test->add_option("--config", config, "key=value settings file");

    std::string cone, point;
    auto* cone_dist = app.add_subcommand("cone-dist", "Primal and dual distance from a point to a cone");
    cone_dist->add_option("--cone", cone, "CSV of generator rows")->required();
    cone_dist->add_option("--point", point, "CSV with one row")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment on a built-in process");
    simulate->add_option("--dgp", sim.dgp, "linear-gmm, interval-mean or npiv-sieve")->required();
    simulate->add_option("--n", sim.n, "Sample size")->required();
    simulate->add_option("--reps", sim.reps, "Replications")->required();
    simulate->add_option("--experiment", sim.experiment, "null-dist or size-power")->required();
    simulate->add_option("--seed", sim.seed, "Master seed")->required();
    simulate->add_option("--out", sim.out, "Output file (default: standard output)");
    simulate->add_option("--alpha", sim.alpha, "Nominal level");
    simulate->add_option("--variant", sim.variant, "Bootstrap variant for size-power");
    simulate->add_option("--gap", sim.gap, "interval-mean gap between the means");
    simulate->add_option("--crossing", sim.crossing, "interval-mean crossing in sd units");
    simulate->add_option("--k", sim.k, "linear-gmm moments");
    simulate->add_option("--p", sim.p, "linear-gmm parameters");
    simulate->add_option("--workers", sim.workers, "Concurrent replications (default: all)");
    simulate->add_option("--B", sim.draws, "Bootstrap draws per replication");
    simulate->add_option("--config", sim.config, "key=value settings file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (test->parsed()) {
            return cmd_test(model, data, alpha, variant, seed, config, out);
        }
        if (cone_dist->parsed()) {
            return cmd_cone_dist(cone, point, out);
        }
        return cmd_simulate(sim, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace pitest::cli
