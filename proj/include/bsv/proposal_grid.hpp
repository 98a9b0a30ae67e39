#ifndef BSV_PROPOSAL_GRID_HPP
#define BSV_PROPOSAL_GRID_HPP

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <bsv/core.hpp>
#include <bsv/operational_model.hpp>

namespace bsv {

    class degenerate_weights : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Product lattice over the design space with inclusive endpoints, ordered
    /// row-major (last dimension fastest). Serves both as the acquisition argmax
    /// domain and as the equal-likelihood importance sampling proposal.
    class ProposalGrid {
    public:
        static constexpr std::size_t max_points = 100'000'000;

        ProposalGrid() = default;

        static ProposalGrid build(const DesignSpace& space, const OperationalModel& model, std::vector<std::size_t> resolution)
        {
            if (resolution.size() != space.dim())
                throw invalid_input("ProposalGrid::build: one resolution per dimension required");
            if (model.dim() != space.dim())
                throw invalid_input("ProposalGrid::build: model and space dimensions differ");
            double total = 1.0;
            for (std::size_t r : resolution) {
                if (r < 2)
                    throw invalid_input("ProposalGrid::build: resolution must be at least 2 per dimension");
                total *= static_cast<double>(r);
            }
            if (total > static_cast<double>(max_points)) {
                std::ostringstream os;
                os << "ProposalGrid::build: " << total << " points exceeds the limit of " << max_points;
                throw invalid_input(os.str());
            }

            ProposalGrid g;
            g._space = space;
            g._resolution = std::move(resolution);
            const std::size_t d = space.dim();
            g._strides.assign(d, 1);
            for (std::size_t k = d - 1; k-- > 0;)
                g._strides[k] = g._strides[k + 1] * g._resolution[k + 1];
            g._size = g._strides[0] * g._resolution[0];

            g._axes.resize(d);
            for (std::size_t k = 0; k < d; ++k) {
                const std::size_t r = g._resolution[k];
                const double h = (space.upper[k] - space.lower[k]) / static_cast<double>(r - 1);
                g._axes[k].resize(r);
                for (std::size_t i = 0; i < r; ++i)
                    g._axes[k][i] = space.lower[k] + static_cast<double>(i) * h;
                g._axes[k][r - 1] = space.upper[k];
            }

            g._density.resize(g._size);
            g._log_density.resize(g._size);
            DesignPoint x(static_cast<Eigen::Index>(d));
            for (std::size_t i = 0; i < g._size; ++i) {
                g.fill_point(i, x);
                g._log_density[i] = model.log_density_or_neg_inf(x);
                g._density[i] = model.density(x);
            }
            g._total_density = 0.0;
            for (double w : g._density)
                g._total_density += w;
            return g;
        }

        static ProposalGrid build(const OperationalModel& model, std::size_t per_axis)
        {
            return build(model.space(), model, std::vector<std::size_t>(model.dim(), per_axis));
        }

        std::size_t size() const { return _size; }
        std::size_t dim() const { return _space.dim(); }
        const DesignSpace& space() const { return _space; }
        const std::vector<std::size_t>& resolution() const { return _resolution; }
        const std::vector<std::size_t>& strides() const { return _strides; }
        const std::vector<double>& axis(std::size_t k) const { return _axes[k]; }
        double spacing(std::size_t k) const { return (_space.upper[k] - _space.lower[k]) / static_cast<double>(_resolution[k] - 1); }

        /// Cached operational densities w_i = p(x_i).
        const std::vector<double>& densities() const { return _density; }
        const std::vector<double>& log_densities() const { return _log_density; }
        double total_density() const { return _total_density; }

        /// Equal-likelihood proposal weight q(x_i) = (1/n) sum_j p(x_j).
        double proposal_weight() const { return _total_density / static_cast<double>(_size); }

        std::size_t axis_index(std::size_t i, std::size_t k) const { return (i / _strides[k]) % _resolution[k]; }

        double coordinate(std::size_t i, std::size_t k) const { return _axes[k][axis_index(i, k)]; }

        DesignPoint point(std::size_t i) const
        {
            DesignPoint x(static_cast<Eigen::Index>(dim()));
            fill_point(i, x);
            return x;
        }

        void fill_point(std::size_t i, DesignPoint& x) const
        {
            for (std::size_t k = 0; k < dim(); ++k)
                x[k] = coordinate(i, k);
        }

        /// Grid index of x when x coincides with a lattice node.
        std::optional<std::size_t> index_of(const DesignPoint& x) const
        {
            if (static_cast<std::size_t>(x.size()) != dim())
                return std::nullopt;
            std::size_t idx = 0;
            for (std::size_t k = 0; k < dim(); ++k) {
                double t = (x[k] - _space.lower[k]) / spacing(k);
                double r = std::round(t);
                if (r < 0 || r >= static_cast<double>(_resolution[k]))
                    return std::nullopt;
                auto ik = static_cast<std::size_t>(r);
                if (_axes[k][ik] != x[k])
                    return std::nullopt;
                idx += ik * _strides[k];
            }
            return idx;
        }

        /// Writes "x1,...,xn,density" rows for contour plots.
        void write_density_csv(std::ostream& os) const
        {
            for (std::size_t k = 0; k < dim(); ++k)
                os << "x" << (k + 1) << ",";
            os << "density\n";
            os.precision(17);
            for (std::size_t i = 0; i < _size; ++i) {
                for (std::size_t k = 0; k < dim(); ++k)
                    os << coordinate(i, k) << ",";
                os << _density[i] << "\n";
            }
        }

    private:
        DesignSpace _space;
        std::vector<std::size_t> _resolution;
        std::vector<std::size_t> _strides;
        std::vector<std::vector<double>> _axes;
        std::size_t _size = 0;
        std::vector<double> _density;
        std::vector<double> _log_density;
        double _total_density = 0.0;
    };

    /// Index of the maximal score; ties go to the lowest index.
    inline std::size_t argmax_index(std::span<const double> scores)
    {
        if (scores.empty())
            throw invalid_input("argmax: empty score table");
        std::size_t best = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (std::isnan(scores[i]))
                throw invalid_input("argmax: NaN score at grid index " + std::to_string(i));
            if (scores[i] > scores[best])
                best = i;
        }
        return best;
    }

    inline DesignPoint argmax_over_grid(const ProposalGrid& grid, const std::function<double(const DesignPoint&)>& score)
    {
        std::vector<double> s(grid.size());
        DesignPoint x(static_cast<Eigen::Index>(grid.dim()));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.fill_point(i, x);
            s[i] = score(x);
            if (std::isnan(s[i])) {
                std::ostringstream os;
                os << "argmax_over_grid: NaN score at grid index " << i << " (" << x.transpose() << ")";
                throw invalid_input(os.str());
            }
        }
        return grid.point(argmax_index(s));
    }

    /// Draws index i with probability weights_i / sum(weights).
    inline std::size_t sample_categorical_index(std::span<const double> weights, Rng& rng)
    {
        double total = 0.0;
        for (double w : weights) {
            if (std::isnan(w) || w < 0.0)
                throw degenerate_weights("sample_categorical: weights must be nonnegative numbers");
            total += w;
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw degenerate_weights("sample_categorical: weights sum to zero");
        const double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0)
                continue;
            acc += weights[i];
            last_positive = i;
            if (acc > target)
                return i;
        }
        return last_positive;
    }

    inline DesignPoint sample_categorical(const ProposalGrid& grid, std::span<const double> weights, Rng& rng)
    {
        if (weights.size() != grid.size())
            throw invalid_input("sample_categorical: one weight per grid point required");
        return grid.point(sample_categorical_index(weights, rng));
    }

} // namespace bsv

#endif
