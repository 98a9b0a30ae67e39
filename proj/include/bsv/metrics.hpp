#ifndef BSV_METRICS_HPP
#define BSV_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <bsv/bsv_loop.hpp>
#include <bsv/core.hpp>
#include <bsv/estimator.hpp>

namespace bsv {

    struct MetricReport {
        double r_fail = 0.0;
        std::optional<double> l_star;
        std::optional<double> delta_fail;
        double c_input = 0.0;
        std::optional<double> c_output;
    };

    /// |X_fail| / |X|.
    inline double failure_rate(const std::vector<EvaluationRecord>& records)
    {
        if (records.empty())
            throw invalid_input("failure_rate: no records");
        std::size_t n = 0;
        for (const auto& r : records)
            n += is_failure(r.y) ? 1 : 0;
        return static_cast<double>(n) / static_cast<double>(records.size());
    }

    inline std::optional<double> max_failure_likelihood(const std::vector<EvaluationRecord>& records, const OperationalModel& model)
    {
        auto x = most_likely_failure(records, model);
        if (!x)
            return std::nullopt;
        return model.density(*x);
    }

    inline double relative_error(double p_true, double p_est)
    {
        if (!(p_true > 0.0))
            throw invalid_input("relative error undefined for a true probability of zero");
        return std::abs(p_true - p_est) / p_true;
    }

    struct CoverageGrid {
        std::size_t per_axis = 50;
        /// Saturation distance; defaults to the grid spacing 1 / (per_axis - 1).
        std::optional<double> delta;

        double spacing() const { return delta ? *delta : 1.0 / static_cast<double>(per_axis - 1); }
    };

    /// Average dispersion coverage in normalized coordinates:
    /// 1 - (1/delta) sum_j min(d_j, delta) / n over an m^dim coverage grid.
    inline double input_coverage(const std::vector<DesignPoint>& X, const DesignSpace& space, const CoverageGrid& cov = {})
    {
        if (X.empty())
            return 0.0;
        if (cov.per_axis < 2)
            throw invalid_input("input_coverage: at least two coverage points per axis required");
        const std::size_t d = space.dim();
        const double delta = cov.spacing();
        std::vector<DesignPoint> U;
        U.reserve(X.size());
        for (const auto& x : X)
            U.push_back(space.normalize(x));

        std::size_t n = 1;
        for (std::size_t k = 0; k < d; ++k)
            n *= cov.per_axis;
        std::vector<std::size_t> idx(d, 0);
        DesignPoint g(static_cast<Eigen::Index>(d));
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < d; ++k)
                g[k] = static_cast<double>(idx[k]) / static_cast<double>(cov.per_axis - 1);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& u : U)
                best = std::min(best, (u - g).squaredNorm());
            total += std::min(std::sqrt(best), delta);
            for (std::size_t k = d; k-- > 0;) {
                if (++idx[k] < cov.per_axis)
                    break;
                idx[k] = 0;
            }
        }
        return std::clamp(1.0 - total / (delta * static_cast<double>(n)), 0.0, 1.0);
    }

    /// Fraction of grid points where the surrogate's hard label matches the truth.
    inline double output_coverage(std::span<const double> f_hat, std::span<const double> true_labels)
    {
        if (f_hat.size() != true_labels.size() || f_hat.empty())
            throw invalid_input("output_coverage: prediction and labels must be nonempty and of equal length");
        std::size_t agree = 0;
        for (std::size_t i = 0; i < f_hat.size(); ++i)
            agree += is_failure(f_hat[i]) == is_failure(true_labels[i]) ? 1 : 0;
        return static_cast<double>(agree) / static_cast<double>(f_hat.size());
    }

    inline double output_coverage(const GpSurrogate& gp, SystemUnderTest& system, const ProposalGrid& grid)
    {
        auto labels = true_grid_labels(system, grid);
        return output_coverage(predict_mean_on_grid(gp, grid).f, labels);
    }

    /// All metrics for a finished run. Ground-truth metrics are filled when the
    /// true grid labels are supplied; C_output also needs a grid prediction.
    inline MetricReport compute_metrics(const BsvResult& result, const OperationalModel& model, const ProposalGrid& grid,
        const std::vector<double>* true_labels = nullptr, const CoverageGrid& cov = {})
    {
        MetricReport m;
        m.r_fail = failure_rate(result.records);
        m.l_star = max_failure_likelihood(result.records, model);
        std::vector<DesignPoint> X;
        for (const auto& r : result.records)
            X.push_back(r.x);
        m.c_input = input_coverage(X, model.space(), cov);
        if (true_labels) {
            double truth = weighted_grid_mean(*true_labels, grid);
            if (truth > 0.0)
                m.delta_fail = relative_error(truth, result.pfail_estimate);
            if (!result.prediction.f.empty())
                m.c_output = output_coverage(result.prediction.f, *true_labels);
        }
        return m;
    }

} // namespace bsv

#endif
