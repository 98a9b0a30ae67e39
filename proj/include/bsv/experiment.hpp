#ifndef BSV_EXPERIMENT_HPP
#define BSV_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <bsv/baselines.hpp>
#include <bsv/bsv_loop.hpp>
#include <bsv/metrics.hpp>
#include <bsv/systems.hpp>

namespace bsv {

    enum class Method { bsv, mc, pmc, lhs, sobol, grid, uniform };

    inline const std::vector<std::string>& method_names()
    {
        static const std::vector<std::string> names{"bsv", "mc", "pmc", "lhs", "sobol", "grid", "uniform"};
        return names;
    }

    inline std::optional<Method> method_from_string(const std::string& s)
    {
        const auto& n = method_names();
        auto it = std::find(n.begin(), n.end(), s);
        if (it == n.end())
            return std::nullopt;
        return static_cast<Method>(it - n.begin());
    }

    inline const std::string& to_string(Method m) { return method_names()[static_cast<std::size_t>(m)]; }

    struct ExperimentSettings {
        BsvConfig bsv;
        /// Evaluation budget for mc and the selection baselines; 3 * iterations when unset.
        std::optional<std::size_t> budget;
        PmcConfig pmc;
        CoverageGrid coverage;

        std::size_t effective_budget() const { return budget ? *budget : 3 * bsv.iterations; }
    };

    /// A run of one method for one seed, reshaped into the BSV result layout.
    struct MethodRun {
        Method method;
        std::uint64_t seed;
        BsvResult result;
        MetricReport metrics;
    };

    inline BsvResult sampling_result(std::vector<DesignPoint> xs, std::vector<double> ys, const SamplingEstimate& est, const OperationalModel& model)
    {
        BsvResult r;
        r.mode = EstimateMode::soft;
        for (std::size_t i = 0; i < xs.size(); ++i)
            r.records.push_back({std::move(xs[i]), ys[i], i + 1, RecordSource::baseline});
        for (std::size_t i = 0; i < est.history.size(); ++i)
            r.history.push_back({i + 1, est.history_samples[i], est.history[i]});
        r.pfail_estimate = est.estimate;
        r.failures = falsification(r.records);
        r.most_likely_failure = most_likely_failure(r.records, model);
        return r;
    }

    /// Records every evaluation made through it, in call order.
    class RecordingSystem : public SystemUnderTest {
    public:
        explicit RecordingSystem(SystemUnderTest& inner) : _inner(inner) {}
        std::string name() const override { return _inner.name(); }
        OutputKind output_kind() const override { return _inner.output_kind(); }
        bool expensive() const override { return _inner.expensive(); }
        bool reentrant() const override { return _inner.reentrant(); }
        SystemInput generate_input(const DesignPoint& s) const override
        {
            _pending.push_back(s);
            return _inner.generate_input(s);
        }
        std::vector<double> evaluate(const std::vector<SystemInput>& inputs) override
        {
            auto out = _inner.evaluate(inputs);
            for (std::size_t i = 0; i < out.size() && i < _pending.size(); ++i) {
                xs.push_back(_pending[i]);
                ys.push_back(out[i]);
            }
            _pending.clear();
            return out;
        }

        std::vector<DesignPoint> xs;
        std::vector<double> ys;

    private:
        SystemUnderTest& _inner;
        mutable std::vector<DesignPoint> _pending;
    };

    inline BsvResult run_method_result(Method method, SystemUnderTest& system, const OperationalModel& model, const ProposalGrid& grid,
        const ExperimentSettings& s, std::uint64_t seed)
    {
        Rng rng(seed);
        switch (method) {
        case Method::bsv:
            return run_bsv(system, model, grid, s.bsv, rng);
        case Method::mc: {
            RecordingSystem rec(system);
            auto est = mc_estimate(rec, model, s.effective_budget(), rng);
            return sampling_result(std::move(rec.xs), std::move(rec.ys), est, model);
        }
        case Method::pmc: {
            RecordingSystem rec(system);
            auto est = pmc_estimate(rec, model, s.pmc, rng);
            return sampling_result(std::move(rec.xs), std::move(rec.ys), est, model);
        }
        default: {
            auto sel = static_cast<Selector>(static_cast<int>(method) - static_cast<int>(Method::lhs));
            auto pts = select_points(sel, model.space(), s.effective_budget(), rng);
            return run_selection_baseline(system, model, grid, pts, s.bsv);
        }
        }
    }

    inline MethodRun run_method(Method method, SystemUnderTest& system, const OperationalModel& model, const ProposalGrid& grid,
        const ExperimentSettings& s, std::uint64_t seed, const std::vector<double>* true_labels = nullptr)
    {
        MethodRun run{method, seed, run_method_result(method, system, model, grid, s, seed), {}};
        run.metrics = compute_metrics(run.result, model, grid, true_labels, s.coverage);
        return run;
    }

    /// Roughly log-spaced integers in [lo, hi], always including both ends.
    inline std::vector<std::size_t> log_checkpoints(std::size_t lo, std::size_t hi, std::size_t count)
    {
        if (lo < 1 || hi < lo)
            throw invalid_input("log_checkpoints: need 1 <= lo <= hi");
        std::set<std::size_t> pts{lo, hi};
        if (count > 1)
            for (std::size_t i = 0; i < count; ++i) {
                double u = static_cast<double>(i) / static_cast<double>(count - 1);
                pts.insert(static_cast<std::size_t>(std::llround(std::exp(std::log(static_cast<double>(lo)) * (1 - u) + std::log(static_cast<double>(hi)) * u))));
            }
        return {pts.begin(), pts.end()};
    }

    /// s_0 = v_0, s_i = alpha v_i + (1 - alpha) s_{i-1}.
    inline std::vector<double> exponential_smoothing(std::span<const double> v, double alpha)
    {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw invalid_input("exponential_smoothing: alpha must lie in (0, 1]");
        std::vector<double> s(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            s[i] = i == 0 ? v[0] : alpha * v[i] + (1.0 - alpha) * s[i - 1];
        return s;
    }

    struct ConvergencePoint {
        std::size_t num_samples;
        double estimate;
    };

    /// Estimate as a function of evaluations spent. BSV, MC and PMC report their
    /// own trajectories (MC thinned to log-spaced checkpoints); selection
    /// baselines are refit at log-spaced budgets.
    inline std::vector<ConvergencePoint> convergence_trajectory(Method method, SystemUnderTest& system, const OperationalModel& model,
        const ProposalGrid& grid, const ExperimentSettings& s, std::uint64_t seed, std::size_t checkpoints = 40)
    {
        std::vector<ConvergencePoint> out;
        if (method == Method::bsv || method == Method::pmc || method == Method::mc) {
            auto r = run_method_result(method, system, model, grid, s, seed);
            if (method == Method::mc) {
                for (std::size_t n : log_checkpoints(1, r.history.size(), checkpoints))
                    out.push_back({r.history[n - 1].num_evaluations, r.history[n - 1].estimate});
            }
            else
                for (const auto& h : r.history)
                    out.push_back({h.num_evaluations, h.estimate});
            return out;
        }
        for (std::size_t n : log_checkpoints(std::min<std::size_t>(3, s.effective_budget()), s.effective_budget(), checkpoints)) {
            ExperimentSettings sn = s;
            sn.budget = n;
            out.push_back({n, run_method_result(method, system, model, grid, sn, seed).pfail_estimate});
        }
        return out;
    }

    inline double median(std::vector<double> v)
    {
        if (v.empty())
            throw invalid_input("median of an empty set");
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    /// The seven nonempty acquisition subsets in the order [1],[2],[3],[1,2],[2,3],[1,3],[1,2,3].
    inline std::vector<AcquisitionSet> ablation_subsets()
    {
        return {{true, false, false}, {false, true, false}, {false, false, true}, {true, true, false}, {false, true, true}, {true, false, true},
            {true, true, true}};
    }

    /// Iterations that spend `budget` evaluations with `active` acquisitions per iteration.
    inline std::size_t ablation_iterations(std::size_t budget, const AcquisitionSet& active)
    {
        if (active.count() == 0)
            throw invalid_input("ablation: acquisition subset must be nonempty");
        if (budget % active.count() != 0)
            throw invalid_input("ablation: budget must divide evenly among the active acquisitions");
        return budget / active.count();
    }

} // namespace bsv

#endif
