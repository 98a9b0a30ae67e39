#ifndef BSV_BASELINES_HPP
#define BSV_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/random/sobol.hpp>

#include <bsv/bsv_loop.hpp>
#include <bsv/core.hpp>
#include <bsv/estimator.hpp>
#include <bsv/operational_model.hpp>
#include <bsv/systems.hpp>

namespace bsv {

    /// Estimate plus its trajectory. history[i] is the estimate after
    /// history_samples[i] system evaluations.
    struct SamplingEstimate {
        double estimate = 0.0;
        std::vector<std::size_t> history_samples;
        std::vector<double> history;
    };

    // -- Monte Carlo ------------------------------------------------------------

    /// Plain Monte Carlo over the operational model; history is the running mean
    /// after every sample.
    inline SamplingEstimate mc_estimate(SystemUnderTest& system, const OperationalModel& model, std::size_t budget, Rng& rng)
    {
        if (budget < 1)
            throw invalid_input("mc_estimate: budget must be at least 1");
        SamplingEstimate out;
        out.history.reserve(budget);
        out.history_samples.reserve(budget);
        constexpr std::size_t chunk = 4096;
        double sum = 0.0;
        std::size_t n = 0;
        while (n < budget) {
            std::vector<DesignPoint> xs;
            for (std::size_t i = 0; i < std::min(chunk, budget - n); ++i)
                xs.push_back(model.sample(rng));
            for (double y : system.evaluate_samples(xs)) {
                sum += y;
                ++n;
                out.history.push_back(sum / static_cast<double>(n));
                out.history_samples.push_back(n);
            }
        }
        out.estimate = out.history.back();
        return out;
    }

    // -- population Monte Carlo -------------------------------------------------

    struct PmcConfig {
        std::size_t samples_per_iteration = 50;
        std::size_t max_iterations = 100;
        /// Gaussian kernel std as a fraction of each axis range.
        double kernel_bandwidth = 0.1;
    };

    /// Self-normalized estimate sum(w v) / sum(w).
    inline double snis_estimate(std::span<const double> values, std::span<const double> weights)
    {
        if (values.size() != weights.size())
            throw invalid_input("snis_estimate: values and weights differ in length");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            num += weights[i] * values[i];
            den += weights[i];
        }
        if (!(den > 0.0))
            return 0.0;
        return num / den;
    }

    /// Population Monte Carlo with Gaussian kernels around multinomially
    /// resampled particles. Iteration t draws samples_per_iteration * t samples;
    /// the first iteration samples the operational model itself. Samples are
    /// weighted p(x)/q(x) with p restricted to the design box, and the estimate is
    /// the self-normalized mean over every sample drawn so far.
    inline SamplingEstimate pmc_estimate(SystemUnderTest& system, const OperationalModel& model, const PmcConfig& cfg, Rng& rng)
    {
        if (cfg.samples_per_iteration < 2)
            throw invalid_input("pmc_estimate: at least two samples per iteration required");
        if (cfg.max_iterations < 1)
            throw invalid_input("pmc_estimate: at least one iteration required");
        const DesignSpace space = model.space();
        const std::size_t d = model.dim();
        std::vector<double> bw(d);
        for (std::size_t k = 0; k < d; ++k)
            bw[k] = cfg.kernel_bandwidth * (space.upper[k] - space.lower[k]);
        double log_norm = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            log_norm += std::log(bw[k]) + detail::log_sqrt_2pi;

        auto p_in_box = [&](const DesignPoint& x) { return space.contains(x) ? model.density(x) : 0.0; };

        std::vector<DesignPoint> centers; // empty: proposal is the operational model
        auto q_density = [&](const DesignPoint& x) {
            if (centers.empty())
                return model.density(x);
            double s = 0.0;
            for (const auto& c : centers) {
                double e = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    double z = (x[k] - c[k]) / bw[k];
                    e += z * z;
                }
                s += std::exp(-0.5 * e - log_norm);
            }
            return s / static_cast<double>(centers.size());
        };

        SamplingEstimate out;
        double num = 0.0, den = 0.0;
        std::size_t total = 0;
        for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
            const std::size_t count = cfg.samples_per_iteration * t;
            std::vector<DesignPoint> xs;
            xs.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                if (centers.empty()) {
                    xs.push_back(model.sample(rng));
                    continue;
                }
                const DesignPoint& c = centers[i % centers.size()];
                DesignPoint x(static_cast<Eigen::Index>(d));
                for (std::size_t k = 0; k < d; ++k)
                    x[k] = c[k] + bw[k] * detail::std_normal_quantile(rng.uniform_open());
                xs.push_back(std::move(x));
            }
            auto ys = system.evaluate_samples(xs);
            std::vector<double> resample(count);
            double resample_total = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                double p = p_in_box(xs[i]);
                double w = p > 0.0 ? p / q_density(xs[i]) : 0.0;
                num += w * ys[i];
                den += w;
                resample[i] = w * ys[i];
                resample_total += resample[i];
            }
            total += count;
            out.history_samples.push_back(total);
            out.history.push_back(den > 0.0 ? num / den : 0.0);

            if (resample_total > 0.0) {
                std::vector<DesignPoint> next;
                next.reserve(cfg.samples_per_iteration);
                for (std::size_t k = 0; k < cfg.samples_per_iteration; ++k)
                    next.push_back(xs[sample_categorical_index(resample, rng)]);
                centers = std::move(next);
            }
        }
        out.estimate = out.history.back();
        return out;
    }

    // -- point selection schemes ------------------------------------------------

    enum class Selector { lhs, sobol, grid, uniform };

    inline const char* to_string(Selector s)
    {
        switch (s) {
        case Selector::lhs:
            return "lhs";
        case Selector::sobol:
            return "sobol";
        case Selector::grid:
            return "grid";
        case Selector::uniform:
            return "uniform";
        }
        return "?";
    }

    inline std::optional<Selector> selector_from_string(const std::string& s)
    {
        if (s == "lhs")
            return Selector::lhs;
        if (s == "sobol")
            return Selector::sobol;
        if (s == "grid")
            return Selector::grid;
        if (s == "uniform")
            return Selector::uniform;
        return std::nullopt;
    }

    /// Latin hypercube: one point per axis stratum of width (b - a) / count,
    /// strata independently permuted per axis.
    inline std::vector<DesignPoint> select_lhs(const DesignSpace& space, std::size_t count, Rng& rng)
    {
        if (count < 1)
            throw invalid_input("select_lhs: count must be at least 1");
        const std::size_t d = space.dim();
        std::vector<DesignPoint> pts(count, DesignPoint(static_cast<Eigen::Index>(d)));
        std::vector<std::size_t> perm(count);
        for (std::size_t k = 0; k < d; ++k) {
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = count; i-- > 1;)
                std::swap(perm[i], perm[rng.index(i + 1)]);
            const double width = (space.upper[k] - space.lower[k]) / static_cast<double>(count);
            for (std::size_t i = 0; i < count; ++i) {
                double lo = space.lower[k] + static_cast<double>(perm[i]) * width;
                pts[i][k] = std::min(lo + rng.uniform() * width, std::nextafter(lo + width, lo));
            }
        }
        return pts;
    }

    /// First `count` points of the unscrambled base-2 Sobol sequence (origin
    /// skipped), mapped to the box.
    inline std::vector<DesignPoint> select_sobol(const DesignSpace& space, std::size_t count)
    {
        if (count < 1)
            throw invalid_input("select_sobol: count must be at least 1");
        const std::size_t d = space.dim();
        boost::random::sobol_engine<std::uint32_t, 32> engine(d);
        std::vector<DesignPoint> pts;
        pts.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            DesignPoint u(static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < d; ++k)
                u[k] = static_cast<double>(engine()) * 0x1.0p-32;
            pts.push_back(space.denormalize(u));
        }
        return pts;
    }

    /// ceil(count^{1/d}) points per axis with inclusive endpoints, truncated to
    /// `count` in lexicographic order.
    inline std::vector<DesignPoint> select_grid(const DesignSpace& space, std::size_t count)
    {
        if (count < 1)
            throw invalid_input("select_grid: count must be at least 1");
        const std::size_t d = space.dim();
        std::size_t m = 1;
        auto pow_d = [d](std::size_t b) {
            double r = 1.0;
            for (std::size_t k = 0; k < d; ++k)
                r *= static_cast<double>(b);
            return r;
        };
        while (pow_d(m) < static_cast<double>(count))
            ++m;
        std::vector<DesignPoint> pts;
        pts.reserve(count);
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t i = 0; i < count; ++i) {
            DesignPoint x(static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < d; ++k) {
                double u = m == 1 ? 0.5 : static_cast<double>(idx[k]) / static_cast<double>(m - 1);
                x[k] = space.lower[k] + u * (space.upper[k] - space.lower[k]);
            }
            pts.push_back(std::move(x));
            for (std::size_t k = d; k-- > 0;) {
                if (++idx[k] < m)
                    break;
                idx[k] = 0;
            }
        }
        return pts;
    }

    inline std::vector<DesignPoint> select_uniform(const DesignSpace& space, std::size_t count, Rng& rng)
    {
        if (count < 1)
            throw invalid_input("select_uniform: count must be at least 1");
        std::vector<DesignPoint> pts;
        pts.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            DesignPoint x(static_cast<Eigen::Index>(space.dim()));
            for (std::size_t k = 0; k < space.dim(); ++k)
                x[k] = rng.uniform(space.lower[k], space.upper[k]);
            pts.push_back(std::move(x));
        }
        return pts;
    }

    inline std::vector<DesignPoint> select_points(Selector s, const DesignSpace& space, std::size_t count, Rng& rng)
    {
        switch (s) {
        case Selector::lhs:
            return select_lhs(space, count, rng);
        case Selector::sobol:
            return select_sobol(space, count);
        case Selector::grid:
            return select_grid(space, count);
        case Selector::uniform:
            return select_uniform(space, count, rng);
        }
        throw invalid_input("select_points: unknown selector");
    }

    /// Evaluate the system at preselected points, fit one surrogate on all of
    /// them and estimate over the grid exactly as run_bsv does.
    inline BsvResult run_selection_baseline(SystemUnderTest& system, const OperationalModel& model, const ProposalGrid& grid,
        const std::vector<DesignPoint>& points, const BsvConfig& cfg = {})
    {
        if (points.empty())
            throw invalid_input("run_selection_baseline: no points selected");
        BsvResult result;
        result.mode = cfg.mode;
        auto ys = system.evaluate_samples(points);
        for (std::size_t i = 0; i < points.size(); ++i)
            result.records.push_back({points[i], ys[i], i + 1, RecordSource::baseline});
        result.surrogate = GpSurrogate::fit(points, ys, model.dim(), cfg.kernel, cfg.link, cfg.fit);
        result.prediction = predict_mean_on_grid(result.surrogate, grid);
        result.pfail_estimate = estimate_pfail(result.prediction, grid, cfg.mode);
        result.history.push_back({1, points.size(), result.pfail_estimate});
        result.failures = falsification(result.records);
        result.most_likely_failure = most_likely_failure(result.records, model);
        return result;
    }

} // namespace bsv

#endif
