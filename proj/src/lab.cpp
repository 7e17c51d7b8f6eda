#include "combipen/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace combipen {

Instance generate_instance(int d, int k, int n, const DesignSpec& design, double sigma, std::uint64_t seed,
                           const InstanceOptions& options) {
    require(d >= 1 && n >= 1, "generate_instance: d and n must be positive");
    require(k >= 1 && k <= d, "generate_instance: need 1 <= k <= d");
    require(sigma >= 0.0, "generate_instance: sigma must be nonnegative");
    require(design.rho >= 0.0 && design.rho < 1.0, "generate_instance: rho must lie in [0, 1)");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> start_dist(1, d - k + 1);

    Instance inst;
    const int start = start_dist(rng);
    inst.support = SupportSet::interval(d, start, start + k - 1);
    inst.w_star = Vector::Zero(d);
    for (int j = start; j < start + k; ++j) inst.w_star[j - 1] = options.amplitude;

    inst.x.resize(n, d);
    const bool correlated = design.kind == DesignKind::correlated;
    const double a = correlated ? std::sqrt(1.0 - design.rho) : 1.0;
    const double b = correlated ? std::sqrt(design.rho) : 0.0;
    for (int i = 0; i < n; ++i) {
        const double shared = correlated ? normal(rng) : 0.0;
        for (int j = 0; j < d; ++j) inst.x(i, j) = a * normal(rng) + b * shared;
    }
    if (options.normalize_columns) {
        for (int j = 0; j < d; ++j) {
            const double norm = inst.x.col(j).norm();
            if (norm > 0.0) inst.x.col(j) /= norm;
        }
    }
    inst.y = inst.x * inst.w_star;
    if (sigma > 0.0)
        for (int i = 0; i < n; ++i) inst.y[i] += sigma * normal(rng);
    return inst;
}

namespace {

const std::vector<std::string> kRegularizers{"l1", "theta_inf_range", "group_l1_linf_modified_range", "lasso"};

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("config: '" + key + "' expects an integer, got '" + v + "'");
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

const char* adaptive_name(AdaptiveMode m) {
    switch (m) {
    case AdaptiveMode::off: return "off";
    case AdaptiveMode::on: return "on";
    case AdaptiveMode::both: return "both";
    }
    return "?";
}

} // namespace

void ExperimentConfig::validate() const {
    require(d >= 1, "config: d must be positive");
    require(k >= 1 && k <= d, "config: need 1 <= k <= d");
    require(n >= d, "config: n >= d required");
    require(design.rho >= 0.0 && design.rho < 1.0, "config: rho must lie in [0, 1)");
    require(!sigmas.empty(), "config: sigma grid is empty");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        require(sigmas[i] > 0.0, "config: sigmas must be positive");
        require(i == 0 || sigmas[i] > sigmas[i - 1], "config: sigmas must be increasing");
    }
    require(seeds >= 1, "config: seeds must be at least 1");
    require(threads >= 0, "config: threads must be nonnegative");
    require(amplitude > 0.0, "config: amplitude must be positive");
    // |w*|^alpha has to lie inside the unit box, the domain of Theta_inf
    if (std::find(regularizers.begin(), regularizers.end(), "theta_inf_range") != regularizers.end())
        require(amplitude < 1.0, "config: theta_inf_range needs amplitude < 1");
    require(alpha > 0.0 && alpha < 1.0, "config: alpha must lie in (0, 1)");
    require(!regularizers.empty(), "config: no regularizers");
    for (const auto& r : regularizers)
        require(std::find(kRegularizers.begin(), kRegularizers.end(), r) != kRegularizers.end(),
                "config: unknown regularizer '" + r + "'");
    lambda_grid(path);
}

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "d") c.d = static_cast<int>(to_integer(key, value));
        else if (key == "k") c.k = static_cast<int>(to_integer(key, value));
        else if (key == "n") c.n = static_cast<int>(to_integer(key, value));
        else if (key == "design") {
            if (value == "iid") c.design.kind = DesignKind::iid;
            else if (value == "correlated") c.design.kind = DesignKind::correlated;
            else throw InvalidArgument("config: design must be iid or correlated");
        } else if (key == "rho") c.design.rho = to_double(key, value);
        else if (key == "sigmas") {
            c.sigmas.clear();
            for (const auto& s : split(value, ',')) c.sigmas.push_back(to_double(key, s));
        } else if (key == "seeds") c.seeds = static_cast<int>(to_integer(key, value));
        else if (key == "master_seed") c.master_seed = static_cast<std::uint64_t>(to_integer(key, value));
        else if (key == "regularizers") c.regularizers = split(value, ',');
        else if (key == "adaptive") {
            if (value == "on") c.adaptive = AdaptiveMode::on;
            else if (value == "off") c.adaptive = AdaptiveMode::off;
            else if (value == "both") c.adaptive = AdaptiveMode::both;
            else throw InvalidArgument("config: adaptive must be on, off or both");
        } else if (key == "alpha") c.alpha = to_double(key, value);
        else if (key == "amplitude") c.amplitude = to_double(key, value);
        else if (key == "lambda_points") c.path.points = static_cast<int>(to_integer(key, value));
        else if (key == "lambda_min") c.path.lambda_min = to_double(key, value);
        else if (key == "lambda_max") c.path.lambda_max = to_double(key, value);
        else if (key == "tau") c.path.tau = to_double(key, value);
        else if (key == "threads") c.threads = static_cast<int>(to_integer(key, value));
        else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    return parse_experiment_config(in);
}

std::uint64_t instance_seed(std::uint64_t master, int sigma_index, int seed_index) {
    std::uint64_t x = splitmix64(master);
    x = splitmix64(x ^ (static_cast<std::uint64_t>(sigma_index) + 1));
    return splitmix64(x ^ ((static_cast<std::uint64_t>(seed_index) + 1) << 20));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressCallback& progress) {
    config.validate();
    std::vector<bool> modes;
    if (config.adaptive != AdaptiveMode::on) modes.push_back(false);
    if (config.adaptive != AdaptiveMode::off) modes.push_back(true);

    std::vector<Penalty> penalties;
    for (const auto& r : config.regularizers) penalties.push_back(make_named_penalty(r, config.d));

    struct Prepared {
        Instance inst;
        std::optional<RegressionProblem> problem;
        Vector weights;
        std::string error;
    };
    InstanceOptions io;
    io.amplitude = config.amplitude;
    const auto n_sigma = config.sigmas.size();
    const auto n_seed = static_cast<std::size_t>(config.seeds);
    std::vector<Prepared> prepared(n_sigma * n_seed);
    for (std::size_t si = 0; si < n_sigma; ++si) {
        for (std::size_t s = 0; s < n_seed; ++s) {
            auto& p = prepared[si * n_seed + s];
            const auto seed = instance_seed(config.master_seed, static_cast<int>(si), static_cast<int>(s));
            p.inst = generate_instance(config.d, config.k, config.n, config.design, config.sigmas[si], seed, io);
            try {
                p.problem.emplace(p.inst.x, p.inst.y);
                p.weights = adaptive_weights(ols(*p.problem), config.alpha);
            } catch (const Error& e) {
                p.error = e.what();
            }
        }
    }

    // One unit per (sigma, seed, regularizer, mode), in output order.
    struct Unit {
        std::optional<ExperimentRow> row;
        std::vector<std::string> errors;
    };
    const std::size_t per_instance = penalties.size() * modes.size();
    std::vector<Unit> units(prepared.size() * per_instance);
    std::mutex progress_mutex;

    auto run_unit = [&](std::size_t u) {
        const std::size_t inst_index = u / per_instance;
        const auto& base = penalties[u % per_instance / modes.size()];
        const bool adaptive = modes[u % modes.size()];
        const auto& p = prepared[inst_index];
        const double sigma = config.sigmas[inst_index / n_seed];
        const int s = static_cast<int>(inst_index % n_seed);
        const std::string label = "sigma=" + format_double(sigma) + " seed=" + std::to_string(s) + " " +
                                  base.name() + (adaptive ? " adaptive" : "");
        auto& out = units[u];
        if (!p.problem || !p.error.empty()) {
            out.errors.push_back(label + ": " + p.error);
            return;
        }
        try {
            const Penalty pen = adaptive ? base.with_weights(p.weights) : base;
            const auto path = regularization_path(*p.problem, pen, config.path, &p.inst.w_star);
            ExperimentRow row;
            row.sigma = sigma;
            row.regularizer = base.name();
            row.adaptive = adaptive;
            row.seed = s;
            row.best_hamming = kInf;
            row.best_est_error = kInf;
            int failed = 0;
            for (const auto& pt : path.points) {
                if (!pt.ok) {
                    ++failed;
                    continue;
                }
                if (*pt.hamming < row.best_hamming) {
                    row.best_hamming = *pt.hamming;
                    row.best_lambda_hamming = pt.lambda;
                }
                if (*pt.est_error < row.best_est_error) {
                    row.best_est_error = *pt.est_error;
                    row.best_lambda_err = pt.lambda;
                }
            }
            if (failed > 0) out.errors.push_back(label + ": " + std::to_string(failed) + " path points failed");
            if (failed < static_cast<int>(path.points.size())) out.row = row;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(label + " hamming=" + format_double(row.best_hamming));
            }
        } catch (const Error& e) {
            out.errors.push_back(label + ": " + e.what());
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<std::size_t>(
        std::min<std::size_t>(config.threads > 0 ? static_cast<std::size_t>(config.threads) : hw, units.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < units.size(); u = next++) run_unit(u);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    ExperimentResult result;
    for (std::size_t si = 0; si < n_sigma; ++si) {
        std::vector<ExperimentRow> cell_rows;
        for (std::size_t u = si * n_seed * per_instance; u < (si + 1) * n_seed * per_instance; ++u) {
            result.failures += static_cast<int>(units[u].errors.size());
            result.errors.insert(result.errors.end(), units[u].errors.begin(), units[u].errors.end());
            if (units[u].row) cell_rows.push_back(*units[u].row);
        }
        // Per-seed rows, then one mean row per (regularizer, adaptive) cell.
        result.rows.insert(result.rows.end(), cell_rows.begin(), cell_rows.end());
        for (const auto& base : penalties) {
            for (bool adaptive : modes) {
                ExperimentRow mean;
                mean.sigma = config.sigmas[si];
                mean.regularizer = base.name();
                mean.adaptive = adaptive;
                mean.seed = -1;
                int count = 0;
                for (const auto& r : cell_rows) {
                    if (r.regularizer != base.name() || r.adaptive != adaptive) continue;
                    mean.best_hamming += r.best_hamming;
                    mean.best_est_error += r.best_est_error;
                    mean.best_lambda_hamming += r.best_lambda_hamming;
                    mean.best_lambda_err += r.best_lambda_err;
                    ++count;
                }
                if (count == 0) continue;
                mean.best_hamming /= count;
                mean.best_est_error /= count;
                mean.best_lambda_hamming /= count;
                mean.best_lambda_err /= count;
                result.rows.push_back(mean);
            }
        }
    }
    return result;
}

void emit_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << "sigma,regularizer,adaptive,seed,best_hamming,best_est_error,best_lambda_hamming,best_lambda_err\n";
    for (const auto& r : rows) {
        out << format_double(r.sigma) << ',' << r.regularizer << ',' << (r.adaptive ? 1 : 0) << ','
            << (r.seed < 0 ? std::string("mean") : std::to_string(r.seed)) << ',' << format_double(r.best_hamming)
            << ',' << format_double(r.best_est_error) << ',' << format_double(r.best_lambda_hamming) << ','
            << format_double(r.best_lambda_err) << '\n';
    }
}

std::vector<ExperimentRow> parse_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "parse_csv: missing header");
    require(trim(line) ==
                "sigma,regularizer,adaptive,seed,best_hamming,best_est_error,best_lambda_hamming,best_lambda_err",
            "parse_csv: unexpected header");
    std::vector<ExperimentRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::string item;
        std::istringstream ls(line);
        while (std::getline(ls, item, ',')) f.push_back(trim(item));
        require(f.size() == 8, "parse_csv: expected 8 fields");
        ExperimentRow r;
        r.sigma = to_double("sigma", f[0]);
        r.regularizer = f[1];
        r.adaptive = f[2] == "1";
        r.seed = f[3] == "mean" ? -1 : static_cast<int>(to_integer("seed", f[3]));
        r.best_hamming = to_double("best_hamming", f[4]);
        r.best_est_error = to_double("best_est_error", f[5]);
        r.best_lambda_hamming = to_double("best_lambda_hamming", f[6]);
        r.best_lambda_err = to_double("best_lambda_err", f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_metadata(std::ostream& out, const ExperimentConfig& c) {
    out << "d = " << c.d << "\n"
        << "k = " << c.k << "\n"
        << "n = " << c.n << "\n"
        << "design = " << (c.design.kind == DesignKind::iid ? "iid" : "correlated") << "\n"
        << "rho = " << format_double(c.design.rho) << "\n"
        << "sigmas = ";
    for (std::size_t i = 0; i < c.sigmas.size(); ++i) out << (i ? "," : "") << format_double(c.sigmas[i]);
    out << "\nseeds = " << c.seeds << "\n"
        << "master_seed = " << c.master_seed << "\n"
        << "regularizers = ";
    for (std::size_t i = 0; i < c.regularizers.size(); ++i) out << (i ? "," : "") << c.regularizers[i];
    out << "\nadaptive = " << adaptive_name(c.adaptive) << "\n"
        << "alpha = " << format_double(c.alpha) << "\n"
        << "amplitude = " << format_double(c.amplitude) << "\n"
        << "lambda_points = " << c.path.points << "\n"
        << "lambda_min = " << format_double(c.path.lambda_min) << "\n"
        << "lambda_max = " << format_double(c.path.lambda_max) << "\n"
        << "tau = " << format_double(c.path.tau) << "\n"
        << "threads = " << c.threads << "\n"
        << "# pilot = ols\n"
        << "# columns normalized to unit norm; interval support location uniform\n"
        << "# rng = mt19937_64 with std::normal_distribution\n";
    for (std::size_t si = 0; si < c.sigmas.size(); ++si)
        for (int s = 0; s < c.seeds; ++s)
            out << "# instance_seed[sigma=" << format_double(c.sigmas[si]) << "][seed=" << s
                << "] = " << instance_seed(c.master_seed, static_cast<int>(si), s) << "\n";
}

} // namespace combipen
