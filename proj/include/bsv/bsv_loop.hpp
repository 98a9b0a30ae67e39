#ifndef BSV_BSV_LOOP_HPP
#define BSV_BSV_LOOP_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <bsv/acquisition.hpp>
#include <bsv/core.hpp>
#include <bsv/estimator.hpp>
#include <bsv/gp_surrogate.hpp>
#include <bsv/grid_posterior.hpp>
#include <bsv/operational_model.hpp>
#include <bsv/proposal_grid.hpp>
#include <bsv/systems.hpp>

namespace bsv {

    enum class RecordSource { explore, boundary, failure_sample, baseline };

    inline const char* to_string(RecordSource s)
    {
        switch (s) {
        case RecordSource::explore:
            return "explore";
        case RecordSource::boundary:
            return "boundary";
        case RecordSource::failure_sample:
            return "failure_sample";
        case RecordSource::baseline:
            return "baseline";
        }
        return "?";
    }

    inline RecordSource record_source_from_string(const std::string& s)
    {
        if (s == "explore")
            return RecordSource::explore;
        if (s == "boundary")
            return RecordSource::boundary;
        if (s == "failure_sample")
            return RecordSource::failure_sample;
        if (s == "baseline")
            return RecordSource::baseline;
        throw invalid_input("unknown record source '" + s + "'");
    }

    inline RecordSource record_source(Acquisition a)
    {
        switch (a) {
        case Acquisition::explore:
            return RecordSource::explore;
        case Acquisition::boundary:
            return RecordSource::boundary;
        case Acquisition::failure_sample:
            return RecordSource::failure_sample;
        }
        return RecordSource::baseline;
    }

    struct EvaluationRecord {
        DesignPoint x;
        double y;
        std::size_t iteration;
        RecordSource source;
    };

    struct HistoryEntry {
        std::size_t iteration;
        std::size_t num_evaluations;
        double estimate;
    };

    struct BsvResult {
        std::vector<EvaluationRecord> records;
        std::vector<DesignPoint> failures;
        std::optional<DesignPoint> most_likely_failure;
        double pfail_estimate = 0.0;
        EstimateMode mode = EstimateMode::hard;
        GpSurrogate surrogate;
        /// Final surrogate statistics over the proposal grid.
        GridPrediction prediction;
        std::vector<HistoryEntry> history;
    };

    /// Raised when the system fails mid-run; carries every record logged so far.
    class evaluation_failure : public std::runtime_error {
    public:
        evaluation_failure(const std::string& what, std::vector<EvaluationRecord> partial)
            : std::runtime_error(what), _partial(std::move(partial))
        {
        }
        const std::vector<EvaluationRecord>& partial_records() const { return _partial; }

    private:
        std::vector<EvaluationRecord> _partial;
    };

    struct BsvConfig {
        std::size_t iterations = 333;
        AcquisitionConfig acquisition;
        AcquisitionSet active;
        EstimateMode mode = EstimateMode::hard;
        KernelParams kernel;
        LinkParams link;
        FitOptions fit;
    };

    /// Inputs of all records whose output indicates failure, in evaluation order.
    inline std::vector<DesignPoint> falsification(const std::vector<EvaluationRecord>& records)
    {
        std::vector<DesignPoint> out;
        for (const auto& r : records)
            if (is_failure(r.y))
                out.push_back(r.x);
        return out;
    }

    /// Failure indices sorted by decreasing operational log density (stable).
    inline std::vector<std::size_t> failures_by_likelihood(const std::vector<EvaluationRecord>& records, const OperationalModel& model)
    {
        std::vector<std::size_t> idx;
        std::vector<double> logp(records.size(), -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < records.size(); ++i)
            if (is_failure(records[i].y)) {
                idx.push_back(i);
                logp[i] = model.log_density_or_neg_inf(records[i].x);
            }
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return logp[a] > logp[b]; });
        return idx;
    }

    inline std::optional<DesignPoint> most_likely_failure(const std::vector<EvaluationRecord>& records, const OperationalModel& model)
    {
        auto idx = failures_by_likelihood(records, model);
        if (idx.empty())
            return std::nullopt;
        return records[idx.front()].x;
    }

    inline std::vector<DesignPoint> top_k_likely_failures(const std::vector<EvaluationRecord>& records, const OperationalModel& model, std::size_t k)
    {
        if (k < 1)
            throw invalid_input("top_k_likely_failures: k must be at least 1");
        auto idx = failures_by_likelihood(records, model);
        std::vector<DesignPoint> out;
        for (std::size_t i = 0; i < std::min(k, idx.size()); ++i)
            out.push_back(records[idx[i]].x);
        return out;
    }

    /// Per-iteration observer; receives the iteration number, the batch just
    /// evaluated and the refitted grid prediction.
    using IterationObserver = std::function<void(std::size_t, const AcquisitionBatch&, const GridPrediction&)>;

    /// Iterate acquisition, system evaluation and surrogate refit, then derive the
    /// failure set, the most-likely failure and the failure probability estimate.
    inline BsvResult run_bsv(SystemUnderTest& system, const OperationalModel& model, const ProposalGrid& grid, const BsvConfig& cfg, Rng& rng,
        const IterationObserver& observer = {})
    {
        if (cfg.iterations < 1)
            throw invalid_input("run_bsv: at least one iteration required");
        if (cfg.active.count() == 0)
            throw invalid_input("run_bsv: acquisition subset must be nonempty");
        if (model.dim() != grid.dim())
            throw invalid_input("run_bsv: model and grid dimensions differ");

        BsvResult result;
        result.mode = cfg.mode;
        GpSurrogate gp(model.dim(), cfg.kernel, cfg.link, cfg.fit);
        GridPosterior posterior(grid, gp);
        GridPrediction pred = posterior.prediction();

        for (std::size_t t = 1; t <= cfg.iterations; ++t) {
            AcquisitionBatch batch = fsar_batch(pred, grid, t, cfg.acquisition, rng, cfg.active);
            std::vector<DesignPoint> xs;
            std::vector<RecordSource> sources;
            for (auto& p : batch.points()) {
                xs.push_back(p.x);
                sources.push_back(record_source(p.source));
            }
            std::vector<double> ys;
            try {
                ys = system.evaluate_samples(xs);
            }
            catch (const std::exception& e) {
                throw evaluation_failure(std::string("system evaluation failed at iteration ") + std::to_string(t) + ": " + e.what(), result.records);
            }
            for (std::size_t i = 0; i < xs.size(); ++i)
                result.records.push_back({xs[i], ys[i], t, sources[i]});

            gp = GpSurrogate::extend(std::move(gp), xs, ys);
            posterior.update(gp);
            pred = posterior.prediction();
            result.history.push_back({t, result.records.size(), estimate_pfail(pred, grid, cfg.mode)});
            if (observer)
                observer(t, batch, pred);
        }

        result.failures = falsification(result.records);
        result.most_likely_failure = most_likely_failure(result.records, model);
        result.pfail_estimate = result.history.back().estimate;
        result.surrogate = std::move(gp);
        result.prediction = std::move(pred);
        return result;
    }

} // namespace bsv

#endif
