// Command-line runner: run, ablation, compare and metrics subcommands.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <bsv/bsv.hpp>
#include <bsv/experiment.hpp>
#include <bsv/external_system.hpp>

#ifndef BSV_VERSION
#define BSV_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

    struct usage_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    // Everything a subcommand needs, after merging config file and flags.
    struct Config {
        std::string problem = "representative";
        std::vector<std::string> methods{"bsv"};
        std::size_t iterations = 333;
        std::optional<std::size_t> budget;
        std::vector<std::uint64_t> seeds{1, 2, 3};
        std::size_t resolution = 500;
        double lambda = 0.1;
        std::string mode = "hard";
        std::vector<std::string> acquisitions{"1", "2", "3"};
        std::string output_dir = "bsv_out";
        std::size_t workers = 1;
        double smoothing = 0.1;
        std::size_t coverage_per_axis = 50;
        bsv::PmcConfig pmc;
        std::optional<json> model;    // overrides the problem's operational model
        std::optional<json> external; // {"command": [...], "output_kind": ..., "expensive": ...}

        json to_json() const
        {
            json j = {{"problem", problem}, {"methods", methods}, {"iterations", iterations}, {"seeds", seeds}, {"resolution", resolution},
                {"lambda", lambda}, {"mode", mode}, {"acquisitions", acquisitions}, {"smoothing", smoothing},
                {"coverage_per_axis", coverage_per_axis},
                {"pmc", {{"samples_per_iteration", pmc.samples_per_iteration}, {"max_iterations", pmc.max_iterations},
                            {"kernel_bandwidth", pmc.kernel_bandwidth}}}};
            j["budget"] = budget ? json(*budget) : json(nullptr);
            j["model"] = model ? *model : json(nullptr);
            j["external"] = external ? *external : json(nullptr);
            return j;
        }
    };

    template <class T>
    void take(const json& j, const char* key, T& out)
    {
        if (j.contains(key) && !j[key].is_null())
            out = j[key].get<T>();
    }

    void apply_config_file(Config& c, const std::string& path)
    {
        json j;
        try {
            j = json::parse(bsv::io::read_file(path));
        }
        catch (const json::exception& e) {
            throw usage_error("config " + path + ": " + e.what());
        }
        catch (const bsv::invalid_input& e) {
            throw usage_error(e.what());
        }
        static const std::set<std::string> known{"problem", "methods", "iterations", "budget", "seeds", "resolution", "lambda", "mode", "acquisitions",
            "output_dir", "workers", "smoothing", "coverage_per_axis", "pmc", "model", "external"};
        for (const auto& [k, v] : j.items())
            if (!known.count(k))
                throw usage_error("config " + path + ": unknown key '" + k + "'");
        try {
            take(j, "problem", c.problem);
            take(j, "methods", c.methods);
            take(j, "iterations", c.iterations);
            if (j.contains("budget") && !j["budget"].is_null())
                c.budget = j["budget"].get<std::size_t>();
            take(j, "seeds", c.seeds);
            take(j, "resolution", c.resolution);
            take(j, "lambda", c.lambda);
            take(j, "mode", c.mode);
            if (j.contains("acquisitions")) {
                c.acquisitions.clear();
                for (auto& a : j["acquisitions"])
                    c.acquisitions.push_back(a.is_string() ? a.get<std::string>() : std::to_string(a.get<int>()));
            }
            take(j, "output_dir", c.output_dir);
            take(j, "workers", c.workers);
            take(j, "smoothing", c.smoothing);
            take(j, "coverage_per_axis", c.coverage_per_axis);
            if (j.contains("pmc")) {
                take(j["pmc"], "samples_per_iteration", c.pmc.samples_per_iteration);
                take(j["pmc"], "max_iterations", c.pmc.max_iterations);
                take(j["pmc"], "kernel_bandwidth", c.pmc.kernel_bandwidth);
            }
            if (j.contains("model") && !j["model"].is_null())
                c.model = j["model"];
            if (j.contains("external") && !j["external"].is_null())
                c.external = j["external"];
        }
        catch (const json::exception& e) {
            throw usage_error("config " + path + ": " + e.what());
        }
    }

    // Problem instance for one job. Each job gets its own system object.
    bsv::Problem make_job_problem(const Config& c)
    {
        if (c.external) {
            if (!c.model)
                throw usage_error("an external system requires an operational model in the config");
            std::vector<std::string> argv;
            bsv::OutputKind kind = bsv::OutputKind::binary;
            bool expensive = true;
            try {
                argv = c.external->at("command").get<std::vector<std::string>>();
                if (c.external->contains("output_kind"))
                    kind = c.external->at("output_kind").get<std::string>() == "probabilistic" ? bsv::OutputKind::probabilistic : bsv::OutputKind::binary;
                if (c.external->contains("expensive"))
                    expensive = c.external->at("expensive").get<bool>();
            }
            catch (const json::exception& e) {
                throw usage_error(std::string("external system config: ") + e.what());
            }
            auto sys = std::make_shared<bsv::ExternalSystem>(c.problem, argv, kind, expensive);
            return {c.problem, bsv::io::model_from_json(*c.model), sys, !expensive};
        }
        auto p = bsv::make_problem(c.problem);
        if (c.model)
            p.model = bsv::io::model_from_json(*c.model);
        return p;
    }

    bsv::ExperimentSettings settings_of(const Config& c)
    {
        bsv::ExperimentSettings s;
        s.bsv.iterations = c.iterations;
        s.bsv.acquisition.lambda = c.lambda;
        s.bsv.mode = bsv::estimate_mode_from_string(c.mode);
        s.bsv.active = {false, false, false};
        for (const auto& a : c.acquisitions) {
            auto acq = bsv::acquisition_from_string(a);
            if (!acq)
                throw usage_error("unknown acquisition '" + a + "'");
            if (*acq == bsv::Acquisition::explore)
                s.bsv.active.explore = true;
            else if (*acq == bsv::Acquisition::boundary)
                s.bsv.active.boundary = true;
            else
                s.bsv.active.failure_sample = true;
        }
        s.budget = c.budget;
        s.pmc = c.pmc;
        s.coverage.per_axis = c.coverage_per_axis;
        return s;
    }

    // Checks everything that can be checked before any file is written.
    void validate(const Config& c)
    {
        auto names = bsv::problem_names();
        if (!c.external && std::find(names.begin(), names.end(), c.problem) == names.end())
            throw usage_error("unknown problem '" + c.problem + "'");
        if (c.methods.empty())
            throw usage_error("at least one method required");
        for (const auto& m : c.methods)
            if (!bsv::method_from_string(m))
                throw usage_error("unknown method '" + m + "'");
        if (c.seeds.empty())
            throw usage_error("at least one seed required");
        if (c.iterations < 1)
            throw usage_error("iterations must be at least 1");
        if (c.budget && *c.budget < 1)
            throw usage_error("budget must be at least 1");
        if (c.resolution < 2)
            throw usage_error("grid resolution must be at least 2");
        if (c.mode != "hard" && c.mode != "soft")
            throw usage_error("mode must be hard or soft");
        if (!(c.smoothing > 0.0 && c.smoothing <= 1.0))
            throw usage_error("smoothing must lie in (0, 1]");
        if (c.coverage_per_axis < 2)
            throw usage_error("coverage grid needs at least 2 points per axis");
        if (settings_of(c).bsv.active.count() == 0)
            throw usage_error("acquisition subset must be nonempty");
        if (c.model)
            try {
                bsv::io::model_from_json(*c.model);
            }
            catch (const bsv::invalid_input& e) {
                throw usage_error(e.what());
            }
    }

    std::uint64_t fnv1a(const std::string& s)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return h;
    }

    std::string iso_now()
    {
        auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    void write_manifest(const fs::path& dir, const std::string& command, const Config& c, const std::string& started, std::size_t workers)
    {
        std::ostringstream hash;
        json cfg = c.to_json();
        hash << std::hex << fnv1a(cfg.dump());
        json m = {{"command", command}, {"version", BSV_VERSION}, {"config", cfg}, {"config_hash", hash.str()}, {"seeds", c.seeds},
            {"smoothing", c.smoothing}, {"workers", workers}, {"started", started}, {"finished", iso_now()}};
        bsv::io::atomic_write(dir / ("manifest_" + command + ".json"), m.dump(2) + "\n");
    }

    /// Runs jobs on a pool of `workers` threads; the first exception is rethrown.
    void run_pool(std::vector<std::function<void()>>& jobs, std::size_t workers)
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex m;
        auto worker = [&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= jobs.size())
                    return;
                {
                    std::lock_guard<std::mutex> lock(m);
                    if (error)
                        return;
                }
                try {
                    jobs[i]();
                }
                catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!error)
                        error = std::current_exception();
                }
            }
        };
        workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
        std::vector<std::thread> threads;
        for (std::size_t w = 1; w < workers; ++w)
            threads.emplace_back(worker);
        worker();
        for (auto& t : threads)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    std::size_t effective_workers(const Config& c)
    {
        return c.external ? 1 : c.workers;
    }

    // Shared per-command state: the grid and ground-truth labels.
    struct Setup {
        bsv::Problem problem;
        bsv::ProposalGrid grid;
        std::optional<std::vector<double>> labels;
        std::optional<double> truth;
    };

    Setup prepare(const Config& c)
    {
        Setup s{make_job_problem(c), {}, {}, {}};
        s.grid = bsv::ProposalGrid::build(s.problem.model, c.resolution);
        if (s.problem.has_ground_truth && !s.problem.system->expensive()) {
            s.labels = bsv::true_grid_labels(*s.problem.system, s.grid);
            s.truth = bsv::weighted_grid_mean(*s.labels, s.grid);
        }
        return s;
    }

    fs::path problem_dir(const Config& c) { return fs::path(c.output_dir) / c.problem; }

    // -- run ---------------------------------------------------------------

    int cmd_run(const Config& c)
    {
        const std::string started = iso_now();
        Setup setup = prepare(c);
        const auto settings = settings_of(c);
        struct Job {
            bsv::Method method;
            std::uint64_t seed;
        };
        std::vector<Job> plan;
        for (const auto& m : c.methods)
            for (auto seed : c.seeds)
                plan.push_back({*bsv::method_from_string(m), seed});
        std::vector<std::string> rows(plan.size());
        std::vector<std::function<void()>> jobs;
        for (std::size_t i = 0; i < plan.size(); ++i)
            jobs.push_back([&, i] {
                auto problem = make_job_problem(c);
                auto run = bsv::run_method(plan[i].method, *problem.system, problem.model, setup.grid, settings, plan[i].seed,
                    setup.labels ? &*setup.labels : nullptr);
                problem.system->reset();
                const std::string name = bsv::to_string(plan[i].method);
                fs::path dir = problem_dir(c) / name / ("seed" + std::to_string(plan[i].seed));
                bsv::io::atomic_write(dir / "records.csv", bsv::io::records_csv(run.result.records, problem.model.dim()));
                bsv::io::atomic_write(dir / "history.csv", bsv::io::history_csv(run.result.history, run.result.mode));
                bsv::io::atomic_write(dir / "result.json", bsv::io::result_to_json(run.result, run.metrics, c.problem, name, plan[i].seed).dump(2) + "\n");
                if (run.result.surrogate.size() > 0)
                    bsv::io::atomic_write(dir / "surrogate.json", bsv::io::snapshot_to_json(run.result.surrogate).dump() + "\n");
                rows[i] = bsv::io::metrics_csv_row(c.problem, name, plan[i].seed, run.result.records.size(), run.result.pfail_estimate, run.metrics);
                std::cerr << c.problem << " " << name << " seed " << plan[i].seed << ": estimate " << run.result.pfail_estimate;
                if (run.metrics.delta_fail)
                    std::cerr << " relative error " << *run.metrics.delta_fail;
                std::cerr << "\n";
            });
        run_pool(jobs, effective_workers(c));
        std::string csv = bsv::io::metrics_csv_header();
        for (const auto& r : rows)
            csv += r;
        bsv::io::atomic_write(problem_dir(c) / "metrics.csv", csv);
        if (setup.truth)
            bsv::io::atomic_write(problem_dir(c) / "ground_truth.json", json({{"problem", c.problem}, {"pfail", *setup.truth}}).dump(2) + "\n");
        write_manifest(problem_dir(c), "run", c, started, effective_workers(c));
        return 0;
    }

    // -- ablation ----------------------------------------------------------

    int cmd_ablation(const Config& c)
    {
        const std::string started = iso_now();
        const std::size_t budget = c.budget.value_or(90);
        Setup setup = prepare(c);
        auto subsets = bsv::ablation_subsets();
        for (const auto& sub : subsets)
            bsv::ablation_iterations(budget, sub);
        std::vector<std::vector<bsv::MetricReport>> reports(subsets.size(), std::vector<bsv::MetricReport>(c.seeds.size()));
        std::vector<std::function<void()>> jobs;
        for (std::size_t a = 0; a < subsets.size(); ++a)
            for (std::size_t k = 0; k < c.seeds.size(); ++k)
                jobs.push_back([&, a, k] {
                    auto problem = make_job_problem(c);
                    auto s = settings_of(c);
                    s.bsv.active = subsets[a];
                    s.bsv.iterations = bsv::ablation_iterations(budget, subsets[a]);
                    reports[a][k] = bsv::run_method(bsv::Method::bsv, *problem.system, problem.model, setup.grid, s, c.seeds[k],
                        setup.labels ? &*setup.labels : nullptr)
                                        .metrics;
                    problem.system->reset();
                });
        run_pool(jobs, effective_workers(c));

        auto med = [](const std::vector<bsv::MetricReport>& rs, auto get) -> std::string {
            std::vector<double> v;
            for (const auto& r : rs)
                if (auto x = get(r))
                    v.push_back(*x);
            return v.empty() ? std::string() : bsv::io::fmt(bsv::median(v));
        };
        std::string csv = "subset,iterations,r_fail,l_star,delta_fail,c_input,c_output\n";
        for (std::size_t a = 0; a < subsets.size(); ++a) {
            const auto& rs = reports[a];
            csv += "\"" + subsets[a].label() + "\"," + std::to_string(bsv::ablation_iterations(budget, subsets[a])) + ","
                + med(rs, [](const auto& r) { return std::optional<double>(r.r_fail); }) + "," + med(rs, [](const auto& r) { return r.l_star; }) + ","
                + med(rs, [](const auto& r) { return r.delta_fail; }) + "," + med(rs, [](const auto& r) { return std::optional<double>(r.c_input); })
                + "," + med(rs, [](const auto& r) { return r.c_output; }) + "\n";
        }
        bsv::io::atomic_write(problem_dir(c) / "ablation.csv", csv);
        write_manifest(problem_dir(c), "ablation", c, started, effective_workers(c));
        return 0;
    }

    // -- compare -----------------------------------------------------------

    int cmd_compare(const Config& c)
    {
        const std::string started = iso_now();
        Setup setup = prepare(c);
        if (!setup.truth)
            throw usage_error("compare needs a problem with ground truth; '" + c.problem + "' has none");
        if (!(*setup.truth > 0.0))
            throw usage_error("compare: ground-truth failure probability is zero, relative error undefined");
        const auto settings = settings_of(c);
        std::vector<std::pair<bsv::Method, std::uint64_t>> plan;
        for (const auto& m : c.methods)
            for (auto seed : c.seeds)
                plan.emplace_back(*bsv::method_from_string(m), seed);
        std::vector<std::function<void()>> jobs;
        for (const auto& [method, seed] : plan)
            jobs.push_back([&, method = method, seed = seed] {
                auto problem = make_job_problem(c);
                auto traj = bsv::convergence_trajectory(method, *problem.system, problem.model, setup.grid, settings, seed);
                problem.system->reset();
                std::vector<double> err;
                for (const auto& p : traj)
                    err.push_back(bsv::relative_error(*setup.truth, p.estimate));
                auto smooth = bsv::exponential_smoothing(err, c.smoothing);
                std::string csv = "num_samples,estimate,delta_fail,delta_fail_smoothed\n";
                for (std::size_t i = 0; i < traj.size(); ++i)
                    csv += std::to_string(traj[i].num_samples) + "," + bsv::io::fmt(traj[i].estimate) + "," + bsv::io::fmt(err[i]) + ","
                        + bsv::io::fmt(smooth[i]) + "\n";
                bsv::io::atomic_write(problem_dir(c) / "compare" / (bsv::to_string(method) + "_seed" + std::to_string(seed) + ".csv"), csv);
            });
        run_pool(jobs, effective_workers(c));
        bsv::io::atomic_write(problem_dir(c) / "ground_truth.json", json({{"problem", c.problem}, {"pfail", *setup.truth}}).dump(2) + "\n");
        write_manifest(problem_dir(c), "compare", c, started, effective_workers(c));
        return 0;
    }

    // -- metrics -----------------------------------------------------------

    int cmd_metrics(const Config& c, const std::string& records_path, const std::string& output)
    {
        auto records = bsv::io::parse_records_csv(bsv::io::read_file(records_path));
        if (records.empty())
            throw bsv::invalid_input("records CSV holds no records");
        Setup setup = prepare(c);
        if (static_cast<std::size_t>(records.front().x.size()) != setup.problem.model.dim())
            throw bsv::invalid_input("records dimension does not match the problem");
        const auto settings = settings_of(c);
        bsv::BsvResult r;
        r.mode = settings.bsv.mode;
        r.records = records;
        std::vector<bsv::DesignPoint> X;
        std::vector<double> Y;
        for (const auto& rec : records) {
            X.push_back(rec.x);
            Y.push_back(rec.y);
        }
        r.surrogate = bsv::GpSurrogate::fit(X, Y, setup.problem.model.dim(), settings.bsv.kernel, settings.bsv.link, settings.bsv.fit);
        r.prediction = bsv::predict_mean_on_grid(r.surrogate, setup.grid);
        r.pfail_estimate = bsv::estimate_pfail(r.prediction, setup.grid, r.mode);
        r.failures = bsv::falsification(records);
        r.most_likely_failure = bsv::most_likely_failure(records, setup.problem.model);
        auto m = bsv::compute_metrics(r, setup.problem.model, setup.grid, setup.labels ? &*setup.labels : nullptr, settings.coverage);
        json j = bsv::io::metrics_to_json(m);
        j["pfail_estimate"] = r.pfail_estimate;
        j["num_evaluations"] = records.size();
        if (output.empty())
            std::cout << j.dump(2) << "\n";
        else
            bsv::io::atomic_write(output, j.dump(2) + "\n");
        return 0;
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bayesian safety validation runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", BSV_VERSION);

    Config cfg;
    std::string config_path, seeds_text, methods_text, acq_text, records_path, metrics_out;
    std::size_t budget = 0;

    auto add_common = [&](CLI::App* sub, bool with_methods) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
        sub->add_option("--problem", cfg.problem, "problem name");
        if (with_methods)
            sub->add_option("--methods", methods_text, "comma-separated: bsv,mc,pmc,lhs,sobol,grid,uniform");
        sub->add_option("--iterations", cfg.iterations, "BSV iterations (3 evaluations each)");
        sub->add_option("--budget", budget, "evaluation budget for baselines (ablation: total budget)");
        sub->add_option("--seeds", seeds_text, "comma-separated seeds");
        sub->add_option("--resolution", cfg.resolution, "proposal grid points per axis");
        sub->add_option("--lambda", cfg.lambda, "boundary refinement uncertainty weight");
        sub->add_option("--mode", cfg.mode, "estimate mode: hard or soft");
        sub->add_option("--acquisitions", acq_text, "comma-separated subset of 1,2,3");
        sub->add_option("--output-dir", cfg.output_dir, "output directory (env BSV_OUTPUT_DIR)");
        sub->add_option("--workers", cfg.workers, "parallel jobs (env BSV_WORKERS)");
    };
    auto* run = app.add_subcommand("run", "run methods over seeds and write results");
    add_common(run, true);
    auto* ablation = app.add_subcommand("ablation", "acquisition-subset ablation");
    add_common(ablation, false);
    auto* compare = app.add_subcommand("compare", "relative-error convergence curves");
    add_common(compare, true);
    compare->add_option("--smoothing", cfg.smoothing, "exponential smoothing factor");
    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a records CSV");
    add_common(metrics, false);
    metrics->add_option("--records", records_path, "records CSV")->required()->check(CLI::ExistingFile);
    metrics->add_option("--output", metrics_out, "write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                out.push_back(item);
        return out;
    };

    try {
        // Precedence: defaults < config file < environment < flags.
        Config flags = cfg;
        CLI::App* sub = app.get_subcommands().front();
        if (sub->get_name() == "ablation") {
            cfg.problem = "squares";
            cfg.seeds = {1, 2, 3, 4, 5};
        }
        if (!config_path.empty())
            apply_config_file(cfg, config_path);
        if (const char* env = std::getenv("BSV_OUTPUT_DIR"))
            cfg.output_dir = env;
        if (const char* env = std::getenv("BSV_WORKERS")) {
            try {
                cfg.workers = std::stoul(env);
            }
            catch (const std::exception&) {
                throw usage_error("BSV_WORKERS must be a positive integer");
            }
        }
        auto given = [&](const char* opt) { return sub->count(opt) > 0; };
        if (given("--problem"))
            cfg.problem = flags.problem;
        if (given("--iterations"))
            cfg.iterations = flags.iterations;
        if (given("--budget"))
            cfg.budget = budget;
        if (given("--resolution"))
            cfg.resolution = flags.resolution;
        if (given("--lambda"))
            cfg.lambda = flags.lambda;
        if (given("--mode"))
            cfg.mode = flags.mode;
        if (given("--output-dir"))
            cfg.output_dir = flags.output_dir;
        if (given("--workers"))
            cfg.workers = flags.workers;
        if (sub->get_name() == "compare" && given("--smoothing"))
            cfg.smoothing = flags.smoothing;
        if (!methods_text.empty())
            cfg.methods = split(methods_text);
        if (!acq_text.empty())
            cfg.acquisitions = split(acq_text);
        if (!seeds_text.empty()) {
            cfg.seeds.clear();
            for (const auto& s : split(seeds_text)) {
                try {
                    std::size_t pos = 0;
                    cfg.seeds.push_back(std::stoull(s, &pos));
                    if (pos != s.size())
                        throw std::invalid_argument(s);
                }
                catch (const std::exception&) {
                    throw usage_error("invalid seed '" + s + "'");
                }
            }
        }
        if (cfg.workers < 1)
            throw usage_error("workers must be at least 1");
        validate(cfg);

        if (sub->get_name() == "run")
            return cmd_run(cfg);
        if (sub->get_name() == "ablation")
            return cmd_ablation(cfg);
        if (sub->get_name() == "compare")
            return cmd_compare(cfg);
        return cmd_metrics(cfg, records_path, metrics_out);
    }
    catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    catch (const bsv::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
