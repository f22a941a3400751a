// kmixup command-line front end: dataset generation, training, k x alpha
// sweeps, statistical verification, FGSM robustness curves and coupling plots.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kmixup/kmixup.hpp"

namespace {

using namespace kmixup;

enum ExitCode : int { kOk = 0, kUsage = 1, kStatisticalFail = 2, kPreconditionFail = 3 };

/// Options of one subcommand that may also be supplied by a JSON config file.
/// Precedence: command-line flag, then config file, then built-in default.
class OptionTable {
public:
    explicit OptionTable(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON file with option values (keys are flag names)");
    }

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& help) {
        CLI::Option* opt = app_->add_option("--" + name, var, help)->capture_default_str();
        setters_[name] = {opt, [&var, name](const json& j) {
                              try {
                                  var = j.get<T>();
                              } catch (const json::exception& e) {
                                  throw ParameterError("config key '" + name + "' has the wrong type: " + e.what());
                              }
                          }};
        return opt;
    }

    template <class T>
    CLI::Option* add_list(const std::string& name, std::vector<T>& var, const std::string& help) {
        return add(name, var, help)->delimiter(',');
    }

    /// Fill options not given on the command line from the config file.
    void apply_config() const {
        if (config_path_.empty()) return;
        std::ifstream in(config_path_);
        if (!in) throw IoError("cannot open config file: " + config_path_);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParameterError("config file is not valid JSON: " + std::string(e.what()));
        }
        if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
        for (const auto& [key, value] : j.items()) {
            const auto it = setters_.find(key);
            if (it == setters_.end()) throw ParameterError("unknown config key '" + key + "' for '" + app_->get_name() + "'");
            if (it->second.first->count() == 0) it->second.second(value);
        }
    }

    CLI::App* app() const { return app_; }

private:
    CLI::App* app_;
    std::string config_path_;
    std::map<std::string, std::pair<CLI::Option*, std::function<void(const json&)>>> setters_;
};

void require(const std::string& value, const std::string& flag) {
    if (value.empty()) throw ParameterError(flag + " is required");
}

std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

template <class Fn>
void write_file(const std::string& path, Fn&& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    body(out);
    if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Dataset source shared by most commands
// ---------------------------------------------------------------------------

struct DataOptions {
    std::string data;
    std::size_t n = 1000;
    std::uint64_t data_seed = 0;
    double noise = -1.0;

    void add_to(OptionTable& t) {
        t.add("data", data, "CSV file or generator name (" + join(generator_names()) + ")");
        t.add("n", n, "rows to generate when --data names a generator");
        t.add("data-seed", data_seed, "generator seed when --data names a generator");
        t.add("noise", noise, "generator noise (negative selects the generator default)");
    }

    Dataset load() const {
        require(data, "--data");
        Dataset d = is_generator_name(data) ? generate_named(data, n, data_seed, noise) : load_csv(data);
        if (d.class_names.empty())
            for (std::size_t c = 0; c < d.classes; ++c) d.class_names.push_back(std::to_string(c));
        return d;
    }

    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
        return s;
    }
};

struct TrainOptions {
    ExperimentConfig exp;

    void add_to(OptionTable& t) {
        TrainConfig& c = exp.train;
        t.add("epochs", c.epochs, "training epochs");
        t.add("lr", c.learning_rate, "initial learning rate");
        t.add_list("milestones", c.milestones, "epochs at which the learning rate is multiplied by 0.1");
        t.add("momentum", c.momentum, "SGD momentum");
        t.add("weight-decay", c.weight_decay, "L2 weight decay (weights only)");
        t.add("batch-size", c.batch_size, "vicinal points per SGD step (0: one matching of k points)");
        t.add("steps-per-epoch", c.steps_per_epoch, "matchings per epoch (0: floor(N / 2k))");
        t.add_list("hidden", c.hidden, "hidden layer widths");
        t.add("train-fraction", exp.train_fraction, "stratified train split fraction");
        t.add("deviation-points", exp.deviation_points, "vicinal points used for the deviation metric");
    }
};

void print_summary(const std::string& name, const Dataset& d) {
    std::cout << "dataset " << name << ": N=" << d.size() << " d=" << d.dim << " c=" << d.classes << '\n';
    std::cout << "class counts:";
    const auto counts = class_counts(d);
    for (std::size_t c = 0; c < counts.size(); ++c)
        std::cout << ' ' << (c < d.class_names.size() ? d.class_names[c] : std::to_string(c)) << '=' << counts[c];
    std::cout << "\nfeature ranges:";
    for (std::size_t j = 0; j < d.dim; ++j) {
        double lo = d.points[0].features(static_cast<Eigen::Index>(j)), hi = lo;
        for (const auto& p : d.points) {
            lo = std::min(lo, p.features(static_cast<Eigen::Index>(j)));
            hi = std::max(hi, p.features(static_cast<Eigen::Index>(j)));
        }
        std::cout << " x" << j << " [" << fixed(lo) << ", " << fixed(hi) << ']';
    }
    std::cout << '\n';
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenCommand {
    std::string dataset;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    double noise = -1.0;
    std::string out;

    void add_to(OptionTable& t) {
        t.add("dataset", dataset, "generator name");
        t.add("n", n, "number of rows");
        t.add("seed", seed, "generator seed");
        t.add("noise", noise, "noise level (negative selects the generator default)");
        t.add("out", out, "output CSV path");
    }

    int run() const {
        require(dataset, "--dataset");
        require(out, "--out");
        if (!is_generator_name(dataset)) throw ParameterError("unknown dataset generator: " + dataset);
        if (n == 0) throw ParameterError("--n must be positive");
        const Dataset d = generate_named(dataset, n, seed, noise);
        save_csv(d, out);
        print_summary(dataset, d);
        std::cout << "wrote " << out << '\n';
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainCommand {
    DataOptions data;
    TrainOptions opts;
    std::size_t k = 1;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::string model_out;
    std::string metrics_out;

    void add_to(OptionTable& t) {
        data.add_to(t);
        opts.add_to(t);
        t.add("k", k, "k-mixup batch size");
        t.add("alpha", alpha, "Beta(alpha, alpha) interpolation parameter");
        t.add("seed", seed, "split, initialisation and sampling seed");
        t.add("model", model_out, "output checkpoint (JSON)");
        t.add("metrics", metrics_out, "output per-epoch metrics (CSV)");
    }

    int run() const {
        const Dataset d = data.load();
        check_grid_fits(d, opts.exp, {k});
        const CellResult cell = run_cell(d, opts.exp, k, alpha, seed);
        if (!cell.ok()) {
            std::cerr << "error: " << cell.status << '\n';
            return kStatisticalFail;
        }
        std::cout << "k=" << k << " alpha=" << alpha << " seed=" << seed << ": test_acc=" << fixed(cell.test_acc)
                  << " train_acc=" << fixed(cell.train_acc) << " vicinal_deviation=" << fixed(cell.vicinal_deviation, 6)
                  << " (" << fixed(cell.wall_time, 2) << " s)\n";
        if (!model_out.empty()) {
            save_checkpoint(cell.model, model_out);
            std::cout << "wrote " << model_out << '\n';
        }
        if (!metrics_out.empty()) {
            write_file(metrics_out, [&](std::ostream& o) { write_metrics_csv(cell.history, o); });
            std::cout << "wrote " << metrics_out << '\n';
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepCommand {
    DataOptions data;
    TrainOptions opts;
    std::vector<std::size_t> ks{1, 16};
    std::vector<double> alphas{1.0};
    std::size_t seeds = 5;
    std::uint64_t seed = 0;
    std::size_t threads = default_threads();
    std::string out;

    void add_to(OptionTable& t) {
        data.add_to(t);
        opts.add_to(t);
        t.add_list("ks", ks, "k values");
        t.add_list("alphas", alphas, "alpha values");
        t.add("seeds", seeds, "runs per (k, alpha) cell; run i uses seed --seed + i");
        t.add("seed", seed, "first run seed");
        t.add("threads", threads, "worker threads");
        t.add("out", out, "output CSV path");
    }

    static std::string csv_safe(std::string s) {
        for (char& c : s)
            if (c == ',' || c == '\n') c = ';';
        return s;
    }

    int run() const {
        require(out, "--out");
        if (ks.empty() || alphas.empty() || seeds == 0) throw ParameterError("sweep grid is empty");
        for (std::size_t k : ks)
            if (k == 0) throw ParameterError("k must be >= 1");
        for (double a : alphas) MixupConfig{1, a, 0}.validate();
        TrainConfig probe = opts.exp.train;
        probe.validate();
        const Dataset d = data.load();
        check_grid_fits(d, opts.exp, ks);

        const std::size_t cells = ks.size() * alphas.size() * seeds;
        std::vector<CellResult> results(cells);
        parallel_for(cells, threads, [&](std::size_t i) {
            const std::size_t s = i % seeds;
            const std::size_t ai = (i / seeds) % alphas.size();
            const std::size_t ki = i / (seeds * alphas.size());
            results[i] = run_cell(d, opts.exp, ks[ki], alphas[ai], seed + s);
            results[i].model = MlpModel{};
        });

        bool all_ok = true;
        write_file(out, [&](std::ostream& o) {
            o << "k,alpha,seed,test_acc,train_acc,vicinal_deviation,wall_time,status\n";
            for (const auto& r : results) {
                o << r.k << ',' << detail::format_double(r.alpha) << ',' << r.seed << ','
                  << detail::format_double(r.test_acc) << ',' << detail::format_double(r.train_acc) << ','
                  << detail::format_double(r.vicinal_deviation) << ',' << fixed(r.wall_time, 3) << ','
                  << csv_safe(r.status) << '\n';
                all_ok = all_ok && r.ok();
            }
        });

        std::cout << "mean test accuracy over " << seeds << " seed(s); rows k, columns alpha\n";
        std::cout << std::setw(8) << "k\\alpha";
        for (double a : alphas) std::cout << std::setw(10) << a;
        std::cout << '\n';
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            std::cout << std::setw(8) << ks[ki];
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                double sum = 0.0;
                std::size_t n = 0;
                for (std::size_t s = 0; s < seeds; ++s) {
                    const auto& r = results[(ki * alphas.size() + ai) * seeds + s];
                    if (r.ok()) {
                        sum += r.test_acc;
                        ++n;
                    }
                }
                std::cout << std::setw(10) << (n ? fixed(sum / static_cast<double>(n)) : std::string("n/a"));
            }
            std::cout << '\n';
        }
        std::cout << "wrote " << out << " (" << cells << " rows)\n";
        if (!all_ok) {
            std::cerr << "warning: some runs diverged; see the status column\n";
            return kStatisticalFail;
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyCommand {
    std::string theorem;
    std::vector<std::size_t> ks;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t clusters = 2;
    std::size_t dim = 2;
    double gap = -1.0;
    double radius = 1.0;
    double p = 0.5;
    std::string manifold = "both";
    std::size_t ambient = 2;
    std::size_t threads = default_threads();
    std::string out;

    void add_to(OptionTable& t) {
        t.add("theorem", theorem,
              "lemma1 (exact cross-cluster count), thm2 (cross-cluster fraction rate), "
              "thm3 (endpoint localization), prop1 (W2 scaling on manifolds)")->check(CLI::IsMember({"lemma1", "thm2", "thm3", "prop1"}));
        t.add_list("ks", ks, "batch sizes (default depends on --theorem)");
        t.add("trials", trials, "Monte Carlo trials per k (0: default for --theorem)");
        t.add("seed", seed, "seed");
        t.add("clusters", clusters, "number of clusters (lemma1)");
        t.add("dim", dim, "feature dimension of the cluster spec");
        t.add("gap", gap, "distance between cluster balls (negative: default for --theorem)");
        t.add("radius", radius, "cluster ball radius");
        t.add("p", p, "mass of the first cluster (two-cluster specs)");
        t.add("manifold", manifold, "circle | square | both (prop1)")->check(CLI::IsMember({"circle", "square", "both"}));
        t.add("ambient", ambient, "ambient dimension of the manifold (prop1)");
        t.add("threads", threads, "worker threads");
        t.add("out", out, "output JSON report");
    }

    ClusterSpec cluster_spec(double default_gap) const {
        const double g = gap < 0.0 ? default_gap : gap;
        if (clusters == 2) return two_cluster_spec(dim, g, radius, radius, p);
        // Simplex centers are scale * sqrt(2) apart.
        const double scale = (g + 2.0 * radius) / std::sqrt(2.0);
        return simplex_cluster_spec(clusters, std::max(dim, clusters), scale, radius);
    }

    std::vector<std::size_t> ks_or(std::vector<std::size_t> fallback) const { return ks.empty() ? fallback : ks; }
    std::size_t trials_or(std::size_t fallback) const { return trials == 0 ? fallback : trials; }

    json run_lemma1(bool& pass) const {
        const ClusterSpec spec = cluster_spec(4.0);
        json results = json::array();
        pass = true;
        for (std::size_t k : ks_or({8, 32, 128})) {
            const MatchStats st = cross_cluster_stats(spec, k, trials_or(500), seed, threads);
            const bool ok = st.exact_trials() == st.trials;
            pass = pass && ok;
            std::cout << "k=" << k << ": exact count in " << st.exact_trials() << "/" << st.trials << " trials"
                      << (ok ? "" : "  FAIL") << '\n';
            results.push_back({{"k", k}, {"exact_trials", st.exact_trials()}, {"pass", ok}, {"stats", st}});
        }
        return {{"criterion", "per-trial cross-cluster count equals (1/2) sum |r_i - s_i| in every trial"},
                {"results", results}};
    }

    json run_thm2(bool& pass) const {
        if (clusters != 2) throw ParameterError("thm2 uses a two-cluster spec (--clusters 2)");
        const ClusterSpec spec = cluster_spec(4.0);
        // Normal limit of E|r - s| / sqrt(k) for r, s ~ Bin(k, p): 2 sqrt(p (1 - p) / pi).
        const double target = 2.0 * std::sqrt(p * (1.0 - p) / M_PI);
        const double scale = target * std::sqrt(M_PI);
        const double lo = 0.45 * scale, hi = 0.68 * scale;
        json results = json::array();
        pass = true;
        for (std::size_t k : ks_or({64, 128, 256})) {
            const MatchStats st = cross_cluster_stats(spec, k, trials_or(500), seed, threads);
            const double scaled = st.cross_cluster_fraction * std::sqrt(static_cast<double>(k));
            const bool ok = scaled >= lo && scaled <= hi;
            pass = pass && ok;
            std::cout << "k=" << k << ": fraction=" << fixed(st.cross_cluster_fraction) << " fraction*sqrt(k)="
                      << fixed(scaled) << " band [" << fixed(lo, 3) << ", " << fixed(hi, 3) << "]" << (ok ? "" : "  FAIL")
                      << '\n';
            json r = st;
            r.erase("match_lengths");
            results.push_back({{"k", k}, {"scaled_fraction", scaled}, {"pass", ok}, {"stats", r}});
        }
        return {{"target", target}, {"band", {lo, hi}}, {"results", results}};
    }

    json run_thm3(bool& pass) const {
        if (clusters != 2) throw ParameterError("thm3 needs a two-cluster spec (--clusters 2)");
        const ClusterSpec spec = cluster_spec(10.0);
        const auto sizes = ks_or({8, 256});
        json results = json::array();
        std::vector<double> fractions;
        for (std::size_t k : sizes) {
            const LocalizationReport rep = endpoint_localization(spec, k, trials_or(200), seed, threads);
            fractions.push_back(rep.violation_fraction);
            std::cout << "k=" << k << ": " << rep.violations << "/" << rep.cross_matches
                      << " cross-cluster matches outside A_eps/B_eps (fraction " << fixed(rep.violation_fraction)
                      << ", eps=" << rep.epsilon << ")\n";
            results.push_back(rep);
        }
        const bool small = fractions.back() <= 0.05;
        const bool trend = fractions.back() <= fractions.front();
        pass = small && trend;
        std::cout << "largest k violation fraction <= 0.05: " << (small ? "yes" : "no  FAIL") << '\n'
                  << "non-increasing from smallest to largest k: " << (trend ? "yes" : "no  FAIL") << '\n';
        return {{"max_violation_fraction", 0.05}, {"results", results}, {"within_band", small}, {"non_increasing", trend}};
    }

    json run_prop1(bool& pass) const {
        const auto sizes = ks_or({8, 16, 32, 64, 128, 256, 512});
        json results = json::array();
        pass = true;
        for (std::size_t d : {1u, 2u}) {
            if ((d == 1 && manifold == "square") || (d == 2 && manifold == "circle")) continue;
            const double lo = d == 1 ? -2.5 : -1.6, hi = d == 1 ? -1.5 : -0.6;
            const ScalingReport rep = w2_scaling(manifold_sampler(d, ambient), sizes, trials_or(100), seed, threads);
            const bool ok = !rep.degenerate && rep.fitted_slope >= lo && rep.fitted_slope <= hi;
            pass = pass && ok;
            std::cout << (d == 1 ? "circle" : "square") << ": slope=" << fixed(rep.fitted_slope) << " (theory "
                      << -2.0 / static_cast<double>(d) << ") band [" << lo << ", " << hi << "]" << (ok ? "" : "  FAIL")
                      << '\n';
            results.push_back({{"manifold", d == 1 ? "circle" : "square"},
                               {"band", {lo, hi}},
                               {"pass", ok},
                               {"report", rep}});
        }
        return {{"results", results}};
    }

    int run() const {
        require(theorem, "--theorem");
        json report = {{"theorem", theorem}, {"seed", seed}};
        bool pass = false;
        try {
            json body;
            if (theorem == "lemma1") body = run_lemma1(pass);
            else if (theorem == "thm2") body = run_thm2(pass);
            else if (theorem == "thm3") body = run_thm3(pass);
            else body = run_prop1(pass);
            report.update(body);
        } catch (const PreconditionError& e) {
            report["pass"] = false;
            report["precondition_error"] = e.what();
            if (!out.empty()) write_file(out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
            throw;
        }
        report["pass"] = pass;
        if (!out.empty()) {
            write_file(out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
            std::cout << "wrote " << out << '\n';
        }
        std::cout << theorem << ": " << (pass ? "PASS" : "FAIL") << '\n';
        return pass ? kOk : kStatisticalFail;
    }
};

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

struct AttackCommand {
    DataOptions data;
    std::string model_path;
    std::vector<double> epsilons{0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
    std::string out;

    void add_to(OptionTable& t) {
        data.add_to(t);
        t.add("model", model_path, "checkpoint JSON written by 'train'");
        t.add_list("epsilons", epsilons, "FGSM perturbation sizes in feature units");
        t.add("out", out, "output CSV path");
    }

    int run() const {
        require(model_path, "--model");
        for (double e : epsilons)
            if (!(e >= 0.0) || !std::isfinite(e)) throw ParameterError("epsilons must be finite and >= 0");
        const MlpModel model = load_checkpoint(model_path);
        Dataset d = data.load();
        if (d.dim != model.input_size())
            throw PreconditionError("data has " + std::to_string(d.dim) + " features, model expects " +
                                    std::to_string(model.input_size()));
        d = align_classes(d, model.class_names);
        if (d.classes != model.output_size())
            throw PreconditionError("data has " + std::to_string(d.classes) + " classes, model outputs " +
                                    std::to_string(model.output_size()));
        std::vector<double> acc;
        for (double e : epsilons) acc.push_back(adversarial_accuracy(model, d, e));
        std::cout << "epsilon  adversarial_accuracy\n";
        for (std::size_t i = 0; i < epsilons.size(); ++i)
            std::cout << std::setw(7) << epsilons[i] << "  " << fixed(acc[i]) << '\n';
        if (!out.empty()) {
            write_file(out, [&](std::ostream& o) {
                o << "epsilon,adversarial_accuracy\n";
                for (std::size_t i = 0; i < epsilons.size(); ++i)
                    o << detail::format_double(epsilons[i]) << ',' << detail::format_double(acc[i]) << '\n';
            });
            std::cout << "wrote " << out << '\n';
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// couple
// ---------------------------------------------------------------------------

struct CoupleCommand {
    DataOptions data;
    std::size_t k = 32;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::size_t steps = 1;
    std::string out;

    void add_to(OptionTable& t) {
        data.add_to(t);
        t.add("k", k, "k-mixup batch size");
        t.add("alpha", alpha, "Beta(alpha, alpha) interpolation parameter");
        t.add("seed", seed, "sampling seed");
        t.add("steps", steps, "k-mixup steps to draw");
        t.add("out", out, "output prefix; writes <prefix>.csv and <prefix>.svg");
    }

    int run() const {
        require(out, "--out");
        std::string prefix = out;
        for (const char* ext : {".svg", ".csv"})
            if (prefix.size() > 4 && prefix.compare(prefix.size() - 4, 4, ext) == 0) prefix.resize(prefix.size() - 4);
        const Dataset d = data.load();
        const auto records = sample_couplings(d, MixupConfig{k, alpha, seed}, steps);
        if (records.empty()) std::cerr << "warning: zero steps requested; the plot has no matches\n";
        std::size_t cross = 0;
        if (d.cluster_id.size() == d.size())
            for (const auto& r : records) cross += d.cluster_id[r.gamma_row] != d.cluster_id[r.xi_row];
        write_file(prefix + ".csv", [&](std::ostream& o) { write_coupling_csv(d, records, o); });
        write_file(prefix + ".svg", [&](std::ostream& o) { write_coupling_svg(d, records, o); });
        std::cout << records.size() << " matched pairs";
        if (d.cluster_id.size() == d.size() && !records.empty())
            std::cout << ", cross-cluster fraction " << fixed(static_cast<double>(cross) / static_cast<double>(records.size()));
        std::cout << "\nwrote " << prefix << ".csv and " << prefix << ".svg\n";
        return kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-mixup: optimal-transport matched mixup augmentation"};
    app.require_subcommand(1);

    GenCommand gen;
    TrainCommand train_cmd;
    SweepCommand sweep;
    VerifyCommand verify;
    AttackCommand attack;
    CoupleCommand couple;

    OptionTable gen_t(app.add_subcommand("gen", "generate a synthetic dataset as CSV"));
    OptionTable train_t(app.add_subcommand("train", "train one classifier with k-mixup"));
    OptionTable sweep_t(app.add_subcommand("sweep", "train over a k x alpha x seed grid"));
    OptionTable verify_t(app.add_subcommand("verify", "check a structural property of OT matchings"));
    OptionTable attack_t(app.add_subcommand("attack", "FGSM robustness curve of a checkpoint"));
    OptionTable couple_t(app.add_subcommand("couple", "plot k-mixup couplings and vicinal points"));
    gen.add_to(gen_t);
    train_cmd.add_to(train_t);
    sweep.add_to(sweep_t);
    verify.add_to(verify_t);
    attack.add_to(attack_t);
    couple.add_to(couple_t);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    const std::vector<std::pair<OptionTable*, std::function<int()>>> commands{
        {&gen_t, [&] { return gen.run(); }},       {&train_t, [&] { return train_cmd.run(); }},
        {&sweep_t, [&] { return sweep.run(); }},   {&verify_t, [&] { return verify.run(); }},
        {&attack_t, [&] { return attack.run(); }}, {&couple_t, [&] { return couple.run(); }}};

    try {
        for (const auto& [table, run] : commands) {
            if (!table->app()->parsed()) continue;
            table->apply_config();
            return run();
        }
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return kPreconditionFail;
    } catch (const DatasetTooSmall& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return kPreconditionFail;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kStatisticalFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
