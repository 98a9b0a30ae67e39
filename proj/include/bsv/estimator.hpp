#ifndef BSV_ESTIMATOR_HPP
#define BSV_ESTIMATOR_HPP

#include <span>
#include <string>
#include <vector>

#include <bsv/core.hpp>
#include <bsv/grid_posterior.hpp>
#include <bsv/proposal_grid.hpp>
#include <bsv/systems.hpp>

namespace bsv {

    /// hard: 1{f >= 0.5} per grid point; soft: f itself.
    enum class EstimateMode { hard, soft };

    inline const char* to_string(EstimateMode m) { return m == EstimateMode::hard ? "hard" : "soft"; }

    inline EstimateMode estimate_mode_from_string(const std::string& s)
    {
        if (s == "hard")
            return EstimateMode::hard;
        if (s == "soft")
            return EstimateMode::soft;
        throw invalid_input("unknown estimate mode '" + s + "'");
    }

    /// Likelihood-weighted mean w^T v / sum(w) over the grid, w_i = p(x_i).
    inline double weighted_grid_mean(std::span<const double> values, const ProposalGrid& grid)
    {
        if (values.size() != grid.size())
            throw invalid_input("estimate_pfail: one value per grid point required");
        if (!(grid.total_density() > 0.0))
            throw invalid_input("estimate_pfail: operational model has no mass on grid");
        const auto& w = grid.densities();
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += w[i] * values[i];
        return std::clamp(s / grid.total_density(), 0.0, 1.0);
    }

    inline double estimate_pfail(std::span<const double> f, const ProposalGrid& grid, EstimateMode mode = EstimateMode::hard)
    {
        if (mode == EstimateMode::soft)
            return weighted_grid_mean(f, grid);
        std::vector<double> v(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            v[i] = is_failure(f[i]) ? 1.0 : 0.0;
        return weighted_grid_mean(v, grid);
    }

    inline double estimate_pfail(const GridPrediction& pred, const ProposalGrid& grid, EstimateMode mode = EstimateMode::hard)
    {
        return estimate_pfail(pred.f, grid, mode);
    }

    inline double estimate_pfail(const GpSurrogate& gp, const ProposalGrid& grid, EstimateMode mode = EstimateMode::hard)
    {
        return estimate_pfail(predict_mean_on_grid(gp, grid), grid, mode);
    }

    /// General importance sampling estimate (1/n) sum_i (p_i / q_i) v_i.
    inline double estimate_pfail_generic(std::span<const double> values, std::span<const double> p, std::span<const double> q)
    {
        if (values.size() != p.size() || values.size() != q.size())
            throw invalid_input("estimate_pfail_generic: values, p and q must have equal length");
        if (values.empty())
            throw invalid_input("estimate_pfail_generic: no samples");
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double num = p[i] * values[i];
            if (num == 0.0)
                continue;
            if (!(q[i] > 0.0))
                throw invalid_input("estimate_pfail_generic: proposal excludes support at sample " + std::to_string(i));
            s += num / q[i];
        }
        return s / static_cast<double>(values.size());
    }

    /// True hard labels 1{f(x_i) >= 0.5} at every grid point.
    inline std::vector<double> true_grid_labels(SystemUnderTest& system, const ProposalGrid& grid)
    {
        if (system.expensive())
            throw invalid_input("system '" + system.name() + "' is flagged expensive; refusing a full grid sweep");
        std::vector<DesignPoint> pts;
        pts.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            pts.push_back(grid.point(i));
        auto y = system.evaluate_samples(pts);
        for (double& v : y)
            v = is_failure(v) ? 1.0 : 0.0;
        return y;
    }

    /// Likelihood-weighted failure fraction of the true system over the same grid
    /// used for estimation.
    inline double ground_truth_pfail(SystemUnderTest& system, const ProposalGrid& grid)
    {
        return weighted_grid_mean(true_grid_labels(system, grid), grid);
    }

} // namespace bsv

#endif
