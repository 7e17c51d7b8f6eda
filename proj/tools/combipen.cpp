#include "combipen/envelopes.hpp"
#include "combipen/estimators.hpp"
#include "combipen/lab.hpp"
#include "combipen/penalty.hpp"
#include "combipen/structure.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace combipen;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + s + "'");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
    return v;
}

Vector parse_vector(const std::string& text) {
    const auto parts = split(text, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(parts[i]);
    return v;
}

// Numeric CSV; a first line that does not parse is taken as a header.
Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        try {
            for (const auto& cell : split(line, ',')) row.push_back(to_double(cell));
        } catch (const InvalidArgument&) {
            if (first) {
                first = false;
                continue;
            }
            throw InvalidArgument(path + ": bad row '" + line + "'");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument(path + ": ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument(path + ": no data");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Vector read_csv_vector(const std::string& path) {
    const Matrix m = read_csv_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw InvalidArgument(path + ": expected a single row or column");
}

RegressionProblem load_problem(const std::string& data) {
    const auto parts = split(data, ',');
    if (parts.size() != 2) throw InvalidArgument("--data expects X.csv,y.csv");
    return RegressionProblem(read_csv_matrix(parts[0]), read_csv_vector(parts[1]));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string join(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt(v[i]);
    }
    return out;
}

struct PenaltyArgs {
    std::string name;
    std::string kind = "nonhom";
    std::string p = "inf";
    std::string fn;
    std::string atoms = "intervals";

    void add(CLI::App* app, bool named) {
        if (named)
            app->add_option("--penalty", name,
                            "l1 | theta_inf_range | group_l1_linf_modified_range | lasso; omit to use --fn");
        app->add_option("--kind", kind, "hom | nonhom")->capture_default_str();
        app->add_option("--p", p, "exponent > 1 or inf")->capture_default_str();
        app->add_option("--fn", fn, "set function spec");
        app->add_option("--atoms", atoms, "all | intervals | groups")->capture_default_str();
    }

    Penalty build(int d) const {
        if (!name.empty()) return make_named_penalty(name, d);
        if (fn.empty()) throw InvalidArgument("need --penalty or --fn");
        PenaltySpec spec;
        spec.kind = parse_penalty_kind(kind);
        spec.p = parse_exponent(p);
        auto collection = std::make_shared<const AtomCollection>(make_atoms(atoms, parse_set_function(fn, d)));
        return Penalty(spec, collection, spec.describe());
    }
};

void print_certificate(const AtomCollection& atoms, const CoverCertificate& cert) {
    std::cout << "value " << fmt(cert.value) << "\n";
    std::cout << "feasible " << (cert.feasible ? "yes" : "no") << "\n";
    if (!cert.note.empty()) std::cout << "note " << cert.note << "\n";
    if (!cert.feasible) return;
    std::cout << "converged " << (cert.converged ? "yes" : "no") << " gap " << fmt(cert.gap) << " iterations "
              << cert.iterations << "\n";
    for (Eigen::Index i = 0; i < cert.alpha.size(); ++i) {
        if (cert.alpha[i] <= 1e-12) continue;
        const auto& atom = atoms[static_cast<int>(i)];
        std::cout << "atom " << atom.set.to_string() << " F " << fmt(atom.value) << " alpha " << fmt(cert.alpha[i])
                  << "\n";
    }
    if (cert.eta.size()) std::cout << "eta " << join(cert.eta) << "\n";
    if (cert.kappa.size()) std::cout << "kappa " << join(cert.kappa) << "\n";
}

int run_setfn_check(const std::string& fn, int d) {
    const SetFunction f = parse_set_function(fn, d);
    std::cout << "function " << f.name() << " d " << d << "\n";
    if (d > 16) {
        std::cout << "structure checks skipped (d > 16)\n";
        return 0;
    }
    const bool mono = is_monotone(f);
    std::cout << "monotone " << (mono ? "yes" : "no") << "\n";
    std::cout << "submodular " << (is_submodular(f) ? "yes" : "no") << "\n";
    bool finite = true;
    for (double v : tabulate(f)) finite = finite && std::isfinite(v);
    if (!mono || !finite || d > 14) {
        std::cout << "rho n/a (needs a finite monotone function, d <= 14)\n";
    } else if (const auto rho = rho_submodularity(f)) {
        std::cout << "rho " << fmt(rho->value);
        if (rho->exact) std::cout << " (" << rho->exact->first << "/" << rho->exact->second << ")";
        std::cout << "\n";
    } else {
        std::cout << "rho none\n";
    }
    if (d <= 10 && finite) std::cout << "weak_ratio " << fmt(min_weak_submodularity_ratio(f)) << "\n";
    return 0;
}

int run_setfn_stable(const std::string& fn, int d, const std::string& mode, const std::string& set) {
    const SetFunction f = parse_set_function(fn, d);
    if (!set.empty()) {
        std::vector<int> members;
        for (const auto& s : split(set, ',')) members.push_back(static_cast<int>(to_double(s)));
        const auto report = discrete_stability(f, SupportSet(d, std::span<const int>(members)));
        std::cout << "set " << report.set.to_string() << "\n";
        std::cout << "weak " << (report.weakly_stable ? "yes" : "no") << "\n";
        std::cout << "strong " << (report.strongly_stable ? "yes" : "no") << "\n";
        if (report.witness)
            std::cout << "witness A " << report.witness->first.to_string() << " i " << report.witness->second << "\n";
        if (report.mixed_feasibility) std::cout << "mixed_feasibility yes\n";
        return 0;
    }
    StabilityMode m;
    if (mode == "weak") m = StabilityMode::weak;
    else if (mode == "strong") m = StabilityMode::strong;
    else throw InvalidArgument("--mode must be weak or strong");
    for (const auto& s : enumerate_stable_sets(f, m)) std::cout << s.to_string() << "\n";
    return 0;
}

int run_path(const Penalty& base, const RegressionProblem& problem, const PathOptions& options,
             const Vector* truth, bool adaptive, const AdaptiveConfig& ac, const fs::path& out) {
    const Penalty pen = adaptive ? base.with_weights(adaptive_weights(pilot_estimate(problem, ac), ac.alpha)) : base;
    const auto result = regularization_path(problem, pen, options, truth);
    fs::create_directories(out);
    std::ofstream csv(out / "path.csv");
    csv << "lambda,hamming,est_error,support_size\n";
    int failed = 0;
    for (const auto& p : result.points) {
        if (!p.ok) {
            ++failed;
            std::cerr << "lambda " << fmt(p.lambda) << ": " << p.error << "\n";
        }
        char line[160];
        std::snprintf(line, sizeof line, "%.17g,%s,%s,%d\n", p.lambda,
                      p.hamming ? std::to_string(*p.hamming).c_str() : "nan",
                      p.est_error ? fmt(*p.est_error).c_str() : "nan", p.support.size());
        csv << line;
    }
    std::cout << "wrote " << (out / "path.csv").string() << " (" << result.points.size() << " points)\n";
    return failed ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorial penalties, envelopes and adaptive least squares"};
    app.require_subcommand(1);

    auto* setfn = app.add_subcommand("setfn", "set function structure");
    setfn->require_subcommand(1);
    std::string fn;
    int d = 0;
    auto* check = setfn->add_subcommand("check", "monotonicity, submodularity and rho");
    check->add_option("--fn", fn, "set function spec")->required();
    check->add_option("--d", d, "ground set size")->required();
    std::string stable_mode = "weak";
    std::string stable_set;
    auto* stable = setfn->add_subcommand("stable", "stable sets");
    stable->add_option("--fn", fn, "set function spec")->required();
    stable->add_option("--d", d, "ground set size")->required();
    stable->add_option("--mode", stable_mode, "weak | strong")->capture_default_str();
    stable->add_option("--set", stable_set, "check a single set, e.g. 1,3");

    auto* penalty = app.add_subcommand("penalty", "envelope evaluation");
    penalty->require_subcommand(1);
    PenaltyArgs eval_args;
    std::string w_text;
    auto* eval = penalty->add_subcommand("eval", "value and certificate at w");
    eval_args.add(eval, false);
    eval->add_option("--w", w_text, "comma-separated vector")->required();
    PenaltyArgs ball_args;
    int ball_d = 2;
    double radius = 2.0;
    int resolution = 41;
    std::string ball_out = ".";
    auto* ball = penalty->add_subcommand("ball", "penalty values on a grid");
    ball_args.add(ball, false);
    ball->add_option("--d", ball_d, "1, 2 or 3")->capture_default_str();
    ball->add_option("--radius", radius)->capture_default_str();
    ball->add_option("--resolution", resolution, "points per axis")->capture_default_str();
    ball->add_option("--out", ball_out, "output directory")->capture_default_str();

    PenaltyArgs fit_args;
    std::string data;
    double lambda = 0.0;
    double adaptive_alpha = 0.0;
    std::string pilot = "ols";
    auto* fit_cmd = app.add_subcommand("fit", "penalized least squares at one lambda");
    fit_args.add(fit_cmd, true);
    fit_cmd->add_option("--data", data, "X.csv,y.csv")->required();
    fit_cmd->add_option("--lambda", lambda)->required();
    auto* fit_alpha = fit_cmd->add_option("--adaptive-alpha", adaptive_alpha, "reweight with |w0|^(alpha-1)");
    fit_cmd->add_option("--pilot", pilot, "ols | ones")->capture_default_str();

    PenaltyArgs path_args;
    std::string path_data;
    std::string truth_path;
    std::string path_out = ".";
    PathOptions path_options;
    double path_alpha = 0.0;
    std::string path_pilot = "ols";
    auto* path = app.add_subcommand("path", "regularization path");
    path_args.add(path, true);
    path->add_option("--data", path_data, "X.csv,y.csv")->required();
    path->add_option("--truth", truth_path, "CSV with the true w for hamming and error columns");
    path->add_option("--points", path_options.points)->capture_default_str();
    path->add_option("--lambda-min", path_options.lambda_min)->capture_default_str();
    path->add_option("--lambda-max", path_options.lambda_max)->capture_default_str();
    path->add_option("--tau", path_options.tau, "support threshold")->capture_default_str();
    auto* path_alpha_opt = path->add_option("--adaptive-alpha", path_alpha);
    path->add_option("--pilot", path_pilot)->capture_default_str();
    path->add_option("--out", path_out, "output directory")->capture_default_str();

    auto* experiment = app.add_subcommand("experiment", "experiment sweeps");
    experiment->require_subcommand(1);
    std::string config_path;
    std::string exp_out = "results";
    bool quiet = false;
    int threads = -1;
    auto* fig3 = experiment->add_subcommand("fig3", "support recovery sweep");
    fig3->add_option("--config", config_path, "key = value file; defaults when omitted");
    fig3->add_option("--out", exp_out, "output directory")->capture_default_str();
    fig3->add_flag("--quiet", quiet, "no progress on stderr");
    fig3->add_option("--threads", threads, "worker threads, overrides the config (0 = all cores)")
        ->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_setfn_check(fn, d);
        if (stable->parsed()) return run_setfn_stable(fn, d, stable_mode, stable_set);

        if (eval->parsed()) {
            const Vector w = parse_vector(w_text);
            const Penalty pen = eval_args.build(static_cast<int>(w.size()));
            std::cout << "penalty " << pen.spec().describe() << "\n";
            print_certificate(pen.atoms(), pen.certificate(w));
            return 0;
        }
        if (ball->parsed()) {
            const Penalty pen = ball_args.build(ball_d);
            const auto grid = ball_grid(pen.spec(), pen.atoms(), radius, resolution);
            fs::create_directories(ball_out);
            const fs::path file = fs::path(ball_out) / "grid.csv";
            std::ofstream out(file);
            write_grid_csv(out, grid);
            std::cout << "wrote " << file.string() << " (" << grid.values.size() << " points)\n";
            return 0;
        }
        if (fit_cmd->parsed()) {
            const RegressionProblem problem = load_problem(data);
            const Penalty pen = fit_args.build(problem.d());
            FitResult r;
            if (fit_alpha->count()) {
                AdaptiveConfig ac;
                ac.alpha = adaptive_alpha;
                ac.pilot = parse_pilot(pilot);
                r = fit_adaptive(problem, pen, lambda, ac);
            } else {
                r = fit(problem, pen, lambda);
            }
            std::cout << "w " << join(r.w) << "\n";
            std::cout << "support " << support_of(r.w).to_string() << "\n";
            std::cout << "objective " << fmt(r.objective) << "\n";
            std::cout << "iterations " << r.iterations << " converged " << (r.converged ? "yes" : "no") << "\n";
            return r.converged ? 0 : 2;
        }
        if (path->parsed()) {
            const RegressionProblem problem = load_problem(path_data);
            const Penalty pen = path_args.build(problem.d());
            Vector truth;
            if (!truth_path.empty()) truth = read_csv_vector(truth_path);
            AdaptiveConfig ac;
            ac.alpha = path_alpha;
            ac.pilot = parse_pilot(path_pilot);
            return run_path(pen, problem, path_options, truth_path.empty() ? nullptr : &truth,
                            path_alpha_opt->count() > 0, ac, path_out);
        }
        if (fig3->parsed()) {
            ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);
            if (threads >= 0) config.threads = threads;
            config.validate();
            ProgressCallback progress;
            if (!quiet) progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
            const auto result = run_experiment(config, progress);
            fs::create_directories(exp_out);
            std::ofstream csv(fs::path(exp_out) / "results.csv");
            emit_csv(csv, result.rows);
            std::ofstream meta(fs::path(exp_out) / "meta.txt");
            emit_metadata(meta, config);
            meta << "# failures = " << result.failures << "\n";
            for (const auto& e : result.errors) meta << "# error: " << e << "\n";
            std::cout << "wrote " << result.rows.size() << " rows to " << exp_out << "\n";
            return result.failures ? 2 : 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
