#ifndef BSV_CORE_HPP
#define BSV_CORE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bsv {

    /// A point of the parametric input domain.
    using DesignPoint = Eigen::VectorXd;

    /// Raised when arguments violate a documented precondition.
    class invalid_input : public std::invalid_argument {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Raised when a numerical procedure cannot complete.
    class numerical_error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Caller-owned random state. Uniform draws are built directly from the
    /// 64-bit engine output so sequences are identical across standard libraries.
    class Rng {
    public:
        explicit Rng(std::uint64_t seed = 0) : _engine(seed) {}

        /// Uniform in [0, 1).
        double uniform() { return static_cast<double>(_engine() >> 11) * 0x1.0p-53; }

        /// Uniform in (0, 1), safe to feed into a quantile function.
        double uniform_open()
        {
            double u;
            do {
                u = uniform();
            } while (u == 0.0);
            return u;
        }

        double uniform(double a, double b) { return a + (b - a) * uniform(); }

        /// Integer uniform in [0, n).
        std::size_t index(std::size_t n)
        {
            if (n == 0)
                throw invalid_input("Rng::index: empty range");
            auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
            return i < n ? i : n - 1;
        }

        std::mt19937_64& engine() { return _engine; }

    private:
        std::mt19937_64 _engine;
    };

    /// Axis-aligned box bounding the design space.
    struct DesignSpace {
        std::vector<double> lower;
        std::vector<double> upper;

        DesignSpace() = default;
        DesignSpace(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi))
        {
            if (lower.size() != upper.size() || lower.empty())
                throw invalid_input("DesignSpace: bounds must be nonempty and of equal length");
            for (std::size_t i = 0; i < lower.size(); ++i)
                if (!(lower[i] < upper[i]))
                    throw invalid_input("DesignSpace: lower bound must be below upper bound in dimension " + std::to_string(i));
        }

        std::size_t dim() const { return lower.size(); }

        bool contains(const DesignPoint& x) const
        {
            if (static_cast<std::size_t>(x.size()) != dim())
                return false;
            for (std::size_t i = 0; i < dim(); ++i)
                if (x[i] < lower[i] || x[i] > upper[i])
                    return false;
            return true;
        }

        /// Maps x into [0,1]^n per dimension.
        DesignPoint normalize(const DesignPoint& x) const
        {
            DesignPoint u(x.size());
            for (std::size_t i = 0; i < dim(); ++i)
                u[i] = (x[i] - lower[i]) / (upper[i] - lower[i]);
            return u;
        }

        DesignPoint denormalize(const DesignPoint& u) const
        {
            DesignPoint x(u.size());
            for (std::size_t i = 0; i < dim(); ++i)
                x[i] = lower[i] + u[i] * (upper[i] - lower[i]);
            return x;
        }
    };

    inline DesignPoint make_point(std::initializer_list<double> values)
    {
        DesignPoint x(static_cast<Eigen::Index>(values.size()));
        Eigen::Index i = 0;
        for (double v : values)
            x[i++] = v;
        return x;
    }

    /// Hard failure label shared by falsification, estimation and coverage.
    inline bool is_failure(double y) { return y >= 0.5; }

} // namespace bsv

#endif
