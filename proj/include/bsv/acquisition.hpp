#ifndef BSV_ACQUISITION_HPP
#define BSV_ACQUISITION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <bsv/core.hpp>
#include <bsv/grid_posterior.hpp>
#include <bsv/proposal_grid.hpp>

namespace bsv {

    struct AcquisitionConfig {
        /// Upper-confidence weight on sigma.
        double lambda = 0.1;
    };

    enum class Acquisition { explore, boundary, failure_sample };

    inline const char* to_string(Acquisition a)
    {
        switch (a) {
        case Acquisition::explore:
            return "explore";
        case Acquisition::boundary:
            return "boundary";
        case Acquisition::failure_sample:
            return "failure_sample";
        }
        return "?";
    }

    inline std::optional<Acquisition> acquisition_from_string(const std::string& s)
    {
        if (s == "explore" || s == "1")
            return Acquisition::explore;
        if (s == "boundary" || s == "2")
            return Acquisition::boundary;
        if (s == "failure_sample" || s == "3")
            return Acquisition::failure_sample;
        return std::nullopt;
    }

    /// Which acquisitions run each iteration (all three by default).
    struct AcquisitionSet {
        bool explore = true;
        bool boundary = true;
        bool failure_sample = true;

        std::size_t count() const { return std::size_t(explore) + std::size_t(boundary) + std::size_t(failure_sample); }
        bool contains(Acquisition a) const
        {
            return a == Acquisition::explore ? explore : a == Acquisition::boundary ? boundary : failure_sample;
        }
        /// Label such as "[1,2,3]".
        std::string label() const
        {
            std::string s = "[";
            auto add = [&](bool on, char c) {
                if (!on)
                    return;
                if (s.size() > 1)
                    s += ',';
                s += c;
            };
            add(explore, '1');
            add(boundary, '2');
            add(failure_sample, '3');
            return s + "]";
        }
    };

    struct AcquiredPoint {
        DesignPoint x;
        std::size_t grid_index;
        Acquisition source;
    };

    /// One iteration's acquisitions, all computed against the same surrogate.
    struct AcquisitionBatch {
        std::optional<AcquiredPoint> explore;
        std::optional<AcquiredPoint> boundary;
        std::optional<AcquiredPoint> failure_sample;

        std::vector<AcquiredPoint> points() const
        {
            std::vector<AcquiredPoint> out;
            for (const auto* p : {&explore, &boundary, &failure_sample})
                if (*p)
                    out.push_back(**p);
            return out;
        }
    };

    /// Analytic slope of the logistic at the predicted probability, f(1 - f).
    inline double boundary_derivative(double f) { return f * (1.0 - f); }

    inline double boundary_derivative(const GpSurrogate& gp, const DesignPoint& x) { return boundary_derivative(gp.predict(x).f); }

    // -- uncertainty exploration ------------------------------------------------

    inline std::size_t uncertainty_exploration_index(const GridPrediction& pred) { return argmax_index(pred.sigma); }

    inline DesignPoint uncertainty_exploration(const GpSurrogate& gp, const ProposalGrid& grid)
    {
        return grid.point(uncertainty_exploration_index(predict_on_grid(gp, grid)));
    }

    // -- boundary refinement ----------------------------------------------------

    /// (f(1-f) + lambda sigma) p^{1/t}, with p^{1/t} = exp(log p / t) and 0 where p = 0.
    inline std::vector<double> boundary_refinement_scores(const GridPrediction& pred, std::span<const double> log_p, std::size_t t,
        const AcquisitionConfig& cfg)
    {
        if (t < 1)
            throw invalid_input("boundary_refinement: iteration t must be at least 1");
        if (log_p.size() != pred.size())
            throw invalid_input("boundary_refinement: one log density per grid point required");
        const double inv_t = 1.0 / static_cast<double>(t);
        std::vector<double> s(pred.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            double weight = std::isfinite(log_p[i]) ? std::exp(log_p[i] * inv_t) : 0.0;
            s[i] = (boundary_derivative(pred.f[i]) + cfg.lambda * pred.sigma[i]) * weight;
        }
        return s;
    }

    inline std::size_t boundary_refinement_index(const GridPrediction& pred, const ProposalGrid& grid, std::size_t t, const AcquisitionConfig& cfg)
    {
        return argmax_index(boundary_refinement_scores(pred, grid.log_densities(), t, cfg));
    }

    inline DesignPoint boundary_refinement(const GpSurrogate& gp, const ProposalGrid& grid, std::size_t t, const AcquisitionConfig& cfg = {})
    {
        return grid.point(boundary_refinement_index(predict_on_grid(gp, grid), grid, t, cfg));
    }

    // -- failure region sampling ------------------------------------------------

    /// Sampling weights g(x) h(x) p(x) with h = clip(f + lambda sigma, 0, 1) and
    /// g = 1{f + lambda sigma >= 0.5}. When no point is predicted to fail the
    /// weights fall back to h(x) p(x).
    inline std::vector<double> failure_region_weights(const GridPrediction& pred, std::span<const double> p, const AcquisitionConfig& cfg)
    {
        if (p.size() != pred.size())
            throw invalid_input("failure_region_sampling: one density per grid point required");
        std::vector<double> w(pred.size());
        double total = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            double h = pred.f[i] + cfg.lambda * pred.sigma[i];
            w[i] = h >= 0.5 ? std::clamp(h, 0.0, 1.0) * p[i] : 0.0;
            total += w[i];
        }
        if (total > 0.0)
            return w;
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = std::clamp(pred.f[i] + cfg.lambda * pred.sigma[i], 0.0, 1.0) * p[i];
        return w;
    }

    inline std::size_t failure_region_sampling_index(const GridPrediction& pred, const ProposalGrid& grid, const AcquisitionConfig& cfg, Rng& rng)
    {
        return sample_categorical_index(failure_region_weights(pred, grid.densities(), cfg), rng);
    }

    inline DesignPoint failure_region_sampling(const GpSurrogate& gp, const ProposalGrid& grid, const AcquisitionConfig& cfg, Rng& rng)
    {
        return grid.point(failure_region_sampling_index(predict_on_grid(gp, grid), grid, cfg, rng));
    }

    // -- combined ---------------------------------------------------------------

    /// Failure search and refinement: the active acquisitions evaluated against
    /// one frozen surrogate prediction.
    inline AcquisitionBatch fsar_batch(const GridPrediction& pred, const ProposalGrid& grid, std::size_t t, const AcquisitionConfig& cfg, Rng& rng,
        const AcquisitionSet& active = {})
    {
        if (t < 1)
            throw invalid_input("fsar_batch: iteration t must be at least 1");
        AcquisitionBatch batch;
        auto make = [&](std::size_t i, Acquisition a) { return AcquiredPoint{grid.point(i), i, a}; };
        if (active.explore)
            batch.explore = make(uncertainty_exploration_index(pred), Acquisition::explore);
        if (active.boundary)
            batch.boundary = make(boundary_refinement_index(pred, grid, t, cfg), Acquisition::boundary);
        if (active.failure_sample)
            batch.failure_sample = make(failure_region_sampling_index(pred, grid, cfg, rng), Acquisition::failure_sample);
        return batch;
    }

    inline AcquisitionBatch fsar_batch(const GpSurrogate& gp, const ProposalGrid& grid, std::size_t t, const AcquisitionConfig& cfg, Rng& rng)
    {
        return fsar_batch(predict_on_grid(gp, grid), grid, t, cfg, rng);
    }

    /// Writes one row per grid point: coordinates followed by each acquisition
    /// surface (exploration sigma, boundary score, failure sampling weight).
    inline void write_acquisition_surfaces_csv(std::ostream& os, const GridPrediction& pred, const ProposalGrid& grid, std::size_t t,
        const AcquisitionConfig& cfg)
    {
        auto boundary = boundary_refinement_scores(pred, grid.log_densities(), t, cfg);
        auto weights = failure_region_weights(pred, grid.densities(), cfg);
        for (std::size_t k = 0; k < grid.dim(); ++k)
            os << "x" << (k + 1) << ",";
        os << "f_hat,sigma_hat,explore,boundary,failure_sample\n";
        os.precision(17);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t k = 0; k < grid.dim(); ++k)
                os << grid.coordinate(i, k) << ",";
            os << pred.f[i] << "," << pred.sigma[i] << "," << pred.sigma[i] << "," << boundary[i] << "," << weights[i] << "\n";
        }
    }

} // namespace bsv

#endif
