#ifndef BSV_GP_SURROGATE_HPP
#define BSV_GP_SURROGATE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <bsv/core.hpp>

namespace bsv {

    /// Isotropic Matern 1/2 kernel, k(xi, xj) = s^2 exp(-|xi - xj| / l).
    struct KernelParams {
        double length_scale = std::exp(-0.1);
        double signal_std = std::exp(-0.1);

        double variance() const { return signal_std * signal_std; }

        /// Kernel value as a function of Euclidean distance.
        double at_distance(double r) const { return variance() * std::exp(-r / length_scale); }
    };

    inline double kernel_eval(const KernelParams& k, const DesignPoint& xi, const DesignPoint& xj)
    {
        if (xi.size() != xj.size())
            throw invalid_input("kernel_eval: dimension mismatch");
        return k.at_distance((xi - xj).norm());
    }

    /// Logit link with an epsilon squeeze so that y in {0,1} maps to finite logits.
    struct LinkParams {
        double epsilon = 1e-5;
        double steepness = 0.1;
    };

    inline double logit_transform(const LinkParams& link, double y)
    {
        if (!(y >= 0.0 && y <= 1.0))
            throw invalid_input("logit_transform: y must lie in [0, 1]");
        double phi = y * (1.0 - link.epsilon) + (1.0 - y) * link.epsilon;
        return std::log(phi / (1.0 - phi)) / link.steepness;
    }

    inline double inverse_link(const LinkParams& link, double z)
    {
        double u = 1.0 / (1.0 + std::exp(-link.steepness * z));
        return std::clamp((u - link.epsilon) / (1.0 - 2.0 * link.epsilon), 0.0, 1.0);
    }

    struct FitOptions {
        double jitter = 1e-6;
        double max_jitter = 1e-2;
        /// When set, distances are measured after min-max scaling to this box.
        std::optional<DesignSpace> normalize_to;
    };

    /// Posterior summary at one input: probability-space mean and logit-space std.
    struct Prediction {
        double f;
        double sigma;
        double mean_logit;
    };

    /// Zero-mean GP regression on logit-transformed observations.
    ///
    /// The Cholesky factor of K(X,X) + jitter*I is stored packed by rows and grown
    /// one row per observation, so a surrogate extended with new data is
    /// bit-identical to one fitted on the whole set at once.
    class GpSurrogate {
    public:
        GpSurrogate() = default;

        /// Prior surrogate (no observations).
        GpSurrogate(std::size_t dim, KernelParams kernel = {}, LinkParams link = {}, FitOptions options = {})
            : _dim(dim), _kernel(kernel), _link(link), _options(std::move(options)), _jitter(_options.jitter)
        {
        }

        static GpSurrogate fit(const std::vector<DesignPoint>& X, const std::vector<double>& Y, std::size_t dim, KernelParams kernel = {},
            LinkParams link = {}, FitOptions options = {})
        {
            GpSurrogate gp(dim, kernel, link, std::move(options));
            gp.refit(X, Y, gp._options.jitter);
            return gp;
        }

        /// Fit with exactly this jitter (no escalation). Used to restore snapshots.
        static GpSurrogate fit_with_jitter(const std::vector<DesignPoint>& X, const std::vector<double>& Y, std::size_t dim, KernelParams kernel,
            LinkParams link, FitOptions options, double jitter)
        {
            GpSurrogate gp(dim, kernel, link, std::move(options));
            gp._jitter = jitter;
            if (!gp.try_factor(X, Y))
                throw numerical_error("GpSurrogate: snapshot factorization failed at recorded jitter");
            ++gp._generation;
            return gp;
        }

        /// Condition on additional observations. Falls back to a full refit with
        /// escalated jitter if the incremental factor loses positive definiteness.
        static GpSurrogate extend(GpSurrogate gp, const std::vector<DesignPoint>& X, const std::vector<double>& Y)
        {
            if (X.size() != Y.size())
                throw invalid_input("GpSurrogate::extend: inputs and targets differ in length");
            std::size_t n0 = gp.size();
            for (std::size_t i = 0; i < X.size(); ++i) {
                if (!gp.append(X[i], Y[i])) {
                    gp.truncate(n0);
                    std::vector<DesignPoint> all = gp._X;
                    std::vector<double> ys = gp._Y;
                    all.insert(all.end(), X.begin(), X.end());
                    ys.insert(ys.end(), Y.begin(), Y.end());
                    gp.refit(all, ys, gp._jitter * 10.0);
                    return gp;
                }
            }
            gp.update_alpha();
            return gp;
        }

        std::size_t dim() const { return _dim; }
        std::size_t size() const { return _X.size(); }
        const KernelParams& kernel() const { return _kernel; }
        const LinkParams& link() const { return _link; }
        const FitOptions& options() const { return _options; }
        double jitter() const { return _jitter; }
        /// Incremented every time the factor is rebuilt from scratch.
        std::size_t generation() const { return _generation; }

        const std::vector<DesignPoint>& inputs() const { return _X; }
        const std::vector<double>& targets() const { return _Y; }
        const std::vector<double>& targets_logit() const { return _z; }
        /// L^{-1} z, grown alongside the factor.
        const std::vector<double>& whitened_targets() const { return _w; }
        const std::vector<double>& alpha() const { return _alpha; }

        /// Row i of the packed lower factor (i + 1 entries).
        const double* factor_row(std::size_t i) const { return _L.data() + i * (i + 1) / 2; }
        double factor(std::size_t i, std::size_t j) const { return j <= i ? factor_row(i)[j] : 0.0; }

        /// Input as seen by the kernel (scaled when normalization is on).
        DesignPoint kernel_input(const DesignPoint& x) const { return _options.normalize_to ? _options.normalize_to->normalize(x) : x; }

        double k(const DesignPoint& a, const DesignPoint& b) const { return kernel_eval(_kernel, kernel_input(a), kernel_input(b)); }

        Prediction predict(const DesignPoint& x) const
        {
            check_dim(x);
            const std::size_t n = size();
            DesignPoint xs = kernel_input(x);
            std::vector<double> kv(n);
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                kv[i] = _kernel.at_distance((_Xk[i] - xs).norm());
                mean += kv[i] * _alpha[i];
            }
            forward_solve(kv);
            double quad = 0.0;
            for (double v : kv)
                quad += v * v;
            double var = _kernel.variance() - quad;
            return {inverse_link(_link, mean), std::sqrt(std::max(var, 0.0)), mean};
        }

        std::vector<Prediction> predict(const std::vector<DesignPoint>& xs) const
        {
            std::vector<Prediction> out;
            out.reserve(xs.size());
            for (const auto& x : xs)
                out.push_back(predict(x));
            return out;
        }

        /// Posterior logit mean only; O(n) per point.
        double predict_mean_logit(const DesignPoint& x) const
        {
            check_dim(x);
            DesignPoint xs = kernel_input(x);
            double mean = 0.0;
            for (std::size_t i = 0; i < size(); ++i)
                mean += _kernel.at_distance((_Xk[i] - xs).norm()) * _alpha[i];
            return mean;
        }

        /// Solves L v = b in place over the first b.size() rows.
        void forward_solve(std::vector<double>& b) const
        {
            for (std::size_t i = 0; i < b.size(); ++i) {
                const double* row = factor_row(i);
                double s = b[i];
                for (std::size_t j = 0; j < i; ++j)
                    s -= row[j] * b[j];
                b[i] = s / row[i];
            }
        }

        /// Solves L^T u = b in place over the first b.size() rows.
        void backward_solve(std::vector<double>& b) const
        {
            for (std::size_t i = b.size(); i-- > 0;) {
                const double* row = factor_row(i);
                b[i] /= row[i];
                double ui = b[i];
                for (std::size_t j = 0; j < i; ++j)
                    b[j] -= row[j] * ui;
            }
        }

    private:
        void check_dim(const DesignPoint& x) const
        {
            if (static_cast<std::size_t>(x.size()) != _dim)
                throw invalid_input("GpSurrogate: point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(_dim));
        }

        void clear()
        {
            _X.clear();
            _Xk.clear();
            _Y.clear();
            _z.clear();
            _w.clear();
            _L.clear();
            _alpha.clear();
        }

        void truncate(std::size_t n)
        {
            _X.resize(n);
            _Xk.resize(n);
            _Y.resize(n);
            _z.resize(n);
            _w.resize(n);
            _L.resize(n * (n + 1) / 2);
        }

        /// Appends one observation as a new factor row. Returns false when the
        /// new pivot is not positive.
        bool append(const DesignPoint& x, double y)
        {
            check_dim(x);
            double z = logit_transform(_link, y);
            const std::size_t n = size();
            DesignPoint xs = kernel_input(x);
            std::vector<double> l(n);
            for (std::size_t i = 0; i < n; ++i)
                l[i] = _kernel.at_distance((_Xk[i] - xs).norm());
            forward_solve(l);
            double sq = 0.0, lw = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sq += l[i] * l[i];
                lw += l[i] * _w[i];
            }
            double pivot = _kernel.variance() + _jitter - sq;
            if (!(pivot > 0.0) || !std::isfinite(pivot))
                return false;
            double d = std::sqrt(pivot);
            _L.insert(_L.end(), l.begin(), l.end());
            _L.push_back(d);
            _w.push_back((z - lw) / d);
            _X.push_back(x);
            _Xk.push_back(std::move(xs));
            _Y.push_back(y);
            _z.push_back(z);
            return true;
        }

        bool try_factor(const std::vector<DesignPoint>& X, const std::vector<double>& Y)
        {
            if (X.size() != Y.size())
                throw invalid_input("GpSurrogate::fit: inputs and targets differ in length");
            clear();
            for (std::size_t i = 0; i < X.size(); ++i)
                if (!append(X[i], Y[i]))
                    return false;
            update_alpha();
            return true;
        }

        void refit(const std::vector<DesignPoint>& X, const std::vector<double>& Y, double jitter)
        {
            for (_jitter = jitter; _jitter <= _options.max_jitter * (1.0 + 1e-9); _jitter *= 10.0) {
                if (try_factor(X, Y)) {
                    ++_generation;
                    return;
                }
            }
            std::ostringstream msg;
            msg << "GpSurrogate::fit: kernel matrix not positive definite after jitter escalation to " << _options.max_jitter << " ("
                << X.size() << " points, " << diagnose_condition(X) << ")";
            clear();
            throw numerical_error(msg.str());
        }

        std::string diagnose_condition(const std::vector<DesignPoint>& X) const
        {
            std::size_t duplicates = 0;
            for (std::size_t i = 0; i < X.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if ((X[i] - X[j]).norm() == 0.0)
                        ++duplicates;
            std::ostringstream os;
            os << "duplicate pairs=" << duplicates << ", diagonal/jitter ratio=" << _kernel.variance() / _options.max_jitter;
            return os.str();
        }

        void update_alpha()
        {
            _alpha = _w;
            backward_solve(_alpha);
        }

        std::size_t _dim = 0;
        KernelParams _kernel;
        LinkParams _link;
        FitOptions _options;
        double _jitter = 1e-6;
        std::size_t _generation = 0;

        std::vector<DesignPoint> _X;
        std::vector<DesignPoint> _Xk;
        std::vector<double> _Y;
        std::vector<double> _z;
        std::vector<double> _w;
        std::vector<double> _L;
        std::vector<double> _alpha;
    };

} // namespace bsv

#endif
