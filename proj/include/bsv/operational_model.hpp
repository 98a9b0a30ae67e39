#ifndef BSV_OPERATIONAL_MODEL_HPP
#define BSV_OPERATIONAL_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include <bsv/core.hpp>

namespace bsv {

    namespace detail {
        inline constexpr double log_sqrt_2pi = 0.91893853320467274178; // 0.5 * log(2 pi)

        inline double std_normal_log_pdf(double z) { return -0.5 * z * z - log_sqrt_2pi; }

        inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

        inline double std_normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

        inline double std_normal_quantile(double p)
        {
            static const boost::math::normal_distribution<double> n01;
            return boost::math::quantile(n01, p);
        }

        inline double std_normal_quantile_complement(double q)
        {
            static const boost::math::normal_distribution<double> n01;
            return boost::math::quantile(boost::math::complement(n01, q));
        }

        /// Probability mass of N(0,1) on [za, zb], computed on the side of the
        /// mean that keeps the subtraction well conditioned.
        inline double std_normal_mass(double za, double zb)
        {
            if (za > 0.0)
                return std_normal_sf(za) - std_normal_sf(zb);
            return std_normal_cdf(zb) - std_normal_cdf(za);
        }

        /// Inverse-CDF draw from N(0,1) restricted to [za, zb].
        inline double std_normal_truncated_quantile(double za, double zb, double u)
        {
            if (za > 0.0) {
                double qa = std_normal_sf(za), qb = std_normal_sf(zb);
                double q = qa - u * (qa - qb);
                return std::clamp(std_normal_quantile_complement(q), za, zb);
            }
            double pa = std_normal_cdf(za), pb = std_normal_cdf(zb);
            double p = pa + u * (pb - pa);
            return std::clamp(std_normal_quantile(p), za, zb);
        }
    } // namespace detail

    struct Normal {
        double mean;
        double std;
    };

    struct TruncatedNormal {
        double mean;
        double std;
        double lower;
        double upper;
    };

    struct GaussianMixture {
        std::vector<double> weights;
        std::vector<TruncatedNormal> components;
    };

    struct Uniform {
        double lower;
        double upper;
    };

    using Distribution = std::variant<Normal, TruncatedNormal, GaussianMixture, Uniform>;

    inline double log_density(const Normal& d, double x) { return detail::std_normal_log_pdf((x - d.mean) / d.std) - std::log(d.std); }

    inline double log_density(const TruncatedNormal& d, double x)
    {
        if (x < d.lower || x > d.upper)
            return -std::numeric_limits<double>::infinity();
        double za = (d.lower - d.mean) / d.std, zb = (d.upper - d.mean) / d.std;
        return detail::std_normal_log_pdf((x - d.mean) / d.std) - std::log(d.std) - std::log(detail::std_normal_mass(za, zb));
    }

    inline double log_density(const GaussianMixture& d, double x)
    {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(d.components.size());
        for (std::size_t k = 0; k < d.components.size(); ++k) {
            terms[k] = std::log(d.weights[k]) + log_density(d.components[k], x);
            best = std::max(best, terms[k]);
        }
        if (!std::isfinite(best))
            return best;
        double s = 0.0;
        for (double t : terms)
            s += std::exp(t - best);
        return best + std::log(s);
    }

    inline double log_density(const Uniform& d, double x)
    {
        if (x < d.lower || x > d.upper)
            return -std::numeric_limits<double>::infinity();
        return -std::log(d.upper - d.lower);
    }

    inline double density(const Normal& d, double x) { return std::exp(log_density(d, x)); }

    inline double density(const TruncatedNormal& d, double x)
    {
        if (x < d.lower || x > d.upper)
            return 0.0;
        return std::exp(log_density(d, x));
    }

    inline double density(const GaussianMixture& d, double x)
    {
        double s = 0.0;
        for (std::size_t k = 0; k < d.components.size(); ++k)
            s += d.weights[k] * density(d.components[k], x);
        return s;
    }

    inline double density(const Uniform& d, double x)
    {
        if (x < d.lower || x > d.upper)
            return 0.0;
        return 1.0 / (d.upper - d.lower);
    }

    /// CDF restricted to the parameter's own distribution (used by goodness-of-fit checks).
    inline double cdf(const Normal& d, double x) { return detail::std_normal_cdf((x - d.mean) / d.std); }

    inline double cdf(const TruncatedNormal& d, double x)
    {
        if (x <= d.lower)
            return 0.0;
        if (x >= d.upper)
            return 1.0;
        double za = (d.lower - d.mean) / d.std, zb = (d.upper - d.mean) / d.std, z = (x - d.mean) / d.std;
        return detail::std_normal_mass(za, z) / detail::std_normal_mass(za, zb);
    }

    inline double cdf(const GaussianMixture& d, double x)
    {
        double s = 0.0;
        for (std::size_t k = 0; k < d.components.size(); ++k)
            s += d.weights[k] * cdf(d.components[k], x);
        return s;
    }

    inline double cdf(const Uniform& d, double x) { return std::clamp((x - d.lower) / (d.upper - d.lower), 0.0, 1.0); }

    /// One operational parameter: a labelled range and its likelihood model.
    class OperationalParameter {
    public:
        OperationalParameter(std::string name, double lower, double upper, Distribution dist)
            : _name(std::move(name)), _lower(lower), _upper(upper), _dist(std::move(dist))
        {
            validate();
        }

        const std::string& name() const { return _name; }
        double lower() const { return _lower; }
        double upper() const { return _upper; }
        const Distribution& distribution() const { return _dist; }

        double density(double x) const
        {
            return std::visit([x](const auto& d) { return bsv::density(d, x); }, _dist);
        }

        double log_density(double x) const
        {
            return std::visit([x](const auto& d) { return bsv::log_density(d, x); }, _dist);
        }

        double cdf(double x) const
        {
            return std::visit([x](const auto& d) { return bsv::cdf(d, x); }, _dist);
        }

        /// Inverse-CDF draw. Untruncated normals are restricted to the parameter range.
        double sample(Rng& rng) const
        {
            return std::visit([&](const auto& d) { return draw(d, rng); }, _dist);
        }

    private:
        double draw(const Normal& d, Rng& rng) const
        {
            return draw(TruncatedNormal{d.mean, d.std, _lower, _upper}, rng);
        }

        static double draw(const TruncatedNormal& d, Rng& rng)
        {
            double za = (d.lower - d.mean) / d.std, zb = (d.upper - d.mean) / d.std;
            double z = detail::std_normal_truncated_quantile(za, zb, rng.uniform_open());
            return std::clamp(d.mean + d.std * z, d.lower, d.upper);
        }

        double draw(const GaussianMixture& d, Rng& rng) const
        {
            double u = rng.uniform();
            std::size_t k = 0;
            double acc = d.weights[0];
            while (u >= acc && k + 1 < d.components.size())
                acc += d.weights[++k];
            return draw(d.components[k], rng);
        }

        static double draw(const Uniform& d, Rng& rng) { return rng.uniform(d.lower, d.upper); }

        static void check_truncated(const TruncatedNormal& t)
        {
            if (!(t.std > 0.0))
                throw invalid_input("truncated normal: std must be positive");
            if (!(t.lower < t.upper))
                throw invalid_input("truncated normal: lower bound must be below upper bound");
        }

        void validate() const
        {
            if (!(_lower < _upper))
                throw invalid_input("operational parameter '" + _name + "': range must satisfy a < b");
            std::visit(
                [&](const auto& d) {
                    using T = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<T, Normal>) {
                        if (!(d.std > 0.0))
                            throw invalid_input("normal: std must be positive");
                    }
                    else if constexpr (std::is_same_v<T, TruncatedNormal>) {
                        check_truncated(d);
                    }
                    else if constexpr (std::is_same_v<T, GaussianMixture>) {
                        if (d.components.empty() || d.weights.size() != d.components.size())
                            throw invalid_input("mixture: weights and components must be nonempty and of equal length");
                        double total = 0.0;
                        for (double w : d.weights) {
                            if (!(w > 0.0))
                                throw invalid_input("mixture: weights must be positive");
                            total += w;
                        }
                        if (std::abs(total - 1.0) > 1e-12)
                            throw invalid_input("mixture: weights must sum to 1");
                        for (const auto& c : d.components)
                            check_truncated(c);
                    }
                    else {
                        if (!(d.lower < d.upper))
                            throw invalid_input("uniform: lower bound must be below upper bound");
                    }
                },
                _dist);
        }

        std::string _name;
        double _lower;
        double _upper;
        Distribution _dist;
    };

    /// Product of independent per-dimension likelihoods, p(x) = prod_i p_i(x_i).
    class OperationalModel {
    public:
        OperationalModel() = default;
        explicit OperationalModel(std::vector<OperationalParameter> params) : _params(std::move(params))
        {
            if (_params.empty())
                throw invalid_input("OperationalModel: at least one parameter required");
        }

        std::size_t dim() const { return _params.size(); }
        const std::vector<OperationalParameter>& parameters() const { return _params; }

        DesignSpace space() const
        {
            std::vector<double> lo, hi;
            for (const auto& p : _params) {
                lo.push_back(p.lower());
                hi.push_back(p.upper());
            }
            return {lo, hi};
        }

        double density(const DesignPoint& x) const
        {
            check_dim(x);
            double d = 1.0;
            for (std::size_t i = 0; i < _params.size(); ++i) {
                d *= _params[i].density(x[i]);
                if (d == 0.0)
                    return 0.0;
            }
            return d;
        }

        /// Sum of per-dimension log densities; -inf where the density is zero.
        double log_density_or_neg_inf(const DesignPoint& x) const
        {
            check_dim(x);
            double s = 0.0;
            for (std::size_t i = 0; i < _params.size(); ++i)
                s += _params[i].log_density(x[i]);
            return s;
        }

        double log_density(const DesignPoint& x) const
        {
            double s = log_density_or_neg_inf(x);
            if (!std::isfinite(s))
                throw invalid_input("log_density: point is out of support");
            return s;
        }

        DesignPoint sample(Rng& rng) const
        {
            DesignPoint x(static_cast<Eigen::Index>(_params.size()));
            for (std::size_t i = 0; i < _params.size(); ++i)
                x[i] = _params[i].sample(rng);
            return x;
        }

    private:
        void check_dim(const DesignPoint& x) const
        {
            if (static_cast<std::size_t>(x.size()) != _params.size())
                throw invalid_input("OperationalModel: point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(_params.size()));
        }

        std::vector<OperationalParameter> _params;
    };

} // namespace bsv

#endif
