#ifndef BSV_SYSTEMS_HPP
#define BSV_SYSTEMS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <bsv/core.hpp>
#include <bsv/operational_model.hpp>

namespace bsv {

    enum class OutputKind { binary, probabilistic };

    /// System input produced from a design-space sample.
    using SystemInput = std::vector<double>;

    /// Black-box system under test. Mirrors the reset / initialize /
    /// generate_input / evaluate contract so external simulators plug in
    /// without touching the core.
    class SystemUnderTest {
    public:
        virtual ~SystemUnderTest() = default;

        virtual std::string name() const = 0;
        virtual OutputKind output_kind() const { return OutputKind::binary; }
        /// Expensive systems are never swept exhaustively (no ground truth).
        virtual bool expensive() const { return false; }
        /// Whether evaluate may be called from several threads at once.
        virtual bool reentrant() const { return true; }

        virtual void reset() {}
        virtual void initialize() {}

        virtual SystemInput generate_input(const DesignPoint& sample) const { return SystemInput(sample.data(), sample.data() + sample.size()); }

        /// One output in [0,1] per input; 1 (or >= 0.5) indicates failure.
        virtual std::vector<double> evaluate(const std::vector<SystemInput>& inputs) = 0;

        /// Convenience: generate_input + evaluate for a batch of samples.
        std::vector<double> evaluate_samples(const std::vector<DesignPoint>& samples)
        {
            std::vector<SystemInput> inputs;
            inputs.reserve(samples.size());
            for (const auto& s : samples)
                inputs.push_back(generate_input(s));
            auto out = evaluate(inputs);
            if (out.size() != samples.size())
                throw std::runtime_error("system '" + name() + "' returned " + std::to_string(out.size()) + " outputs for " + std::to_string(samples.size())
                    + " inputs");
            for (double y : out) {
                if (!(y >= 0.0 && y <= 1.0))
                    throw std::runtime_error("system '" + name() + "' returned an output outside [0,1]");
                if (output_kind() == OutputKind::binary && y != 0.0 && y != 1.0)
                    throw std::runtime_error("binary system '" + name() + "' returned a non-binary output");
            }
            return out;
        }

        double evaluate_sample(const DesignPoint& x) { return evaluate_samples({x}).front(); }
    };

    /// A pure function of the input, wrapped as a system.
    class FunctionSystem : public SystemUnderTest {
    public:
        using Function = std::function<double(const DesignPoint&)>;

        FunctionSystem(std::string name, Function f, OutputKind kind = OutputKind::binary)
            : _name(std::move(name)), _f(std::move(f)), _kind(kind)
        {
        }

        std::string name() const override { return _name; }
        OutputKind output_kind() const override { return _kind; }

        std::vector<double> evaluate(const std::vector<SystemInput>& inputs) override
        {
            std::vector<double> out;
            out.reserve(inputs.size());
            for (const auto& in : inputs)
                out.push_back(_f(Eigen::Map<const DesignPoint>(in.data(), static_cast<Eigen::Index>(in.size()))));
            return out;
        }

    private:
        std::string _name;
        Function _f;
        OutputKind _kind;
    };

    namespace functions {

        inline double booth(double x1, double x2)
        {
            double a = x1 + 2.0 * x2 - 7.0, b = 2.0 * x1 + x2 - 5.0;
            return a * a + b * b;
        }

        inline double himmelblau(double x1, double x2)
        {
            double a = x1 * x1 + x2 - 11.0, b = x1 + x2 * x2 - 7.0;
            return a * a + b * b;
        }

        inline double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

        /// Booth's function thresholded at 200.
        inline double representative(const DesignPoint& x) { return booth(x[0], x[1]) <= 200.0 ? 1.0 : 0.0; }

        /// Two disjoint squares, [1.5,3.5]^2 and [6.5,8.5]^2.
        inline double squares(const DesignPoint& x)
        {
            auto inside = [&](double lo, double hi) { return x[0] >= lo && x[0] <= hi && x[1] >= lo && x[1] <= hi; };
            return inside(1.5, 3.5) || inside(6.5, 8.5) ? 1.0 : 0.0;
        }

        /// Himmelblau's function thresholded at 15.
        inline double mixture(const DesignPoint& x) { return himmelblau(x[0], x[1]) <= 15.0 ? 1.0 : 0.0; }

        /// Soft Himmelblau: logistic((c - himmelblau) / c) with c = 15.
        inline double probabilistic_mixture(const DesignPoint& x)
        {
            constexpr double c = 15.0;
            return logistic((c - himmelblau(x[0], x[1])) / c);
        }

        /// Synthetic stand-in for a runway detector over (distance [nmi], glide slope [deg]).
        /// Not a model of any real detector; it only provides several disjoint
        /// failure regions with the same input layout.
        inline double rwd_standin(const DesignPoint& x)
        {
            const double d = x[0], alpha = x[1];
            // steep approach close to the runway: runway leaves the field of view
            if (alpha > 5.0 && d < 1.2 + 0.4 * (alpha - 5.0))
                return 1.0;
            // shallow approach far out: runway too thin to resolve
            if (alpha < 2.0 && d > 2.2 + 0.8 * (alpha - 1.0))
                return 1.0;
            // elliptical blind spot near the nominal glide slope
            double u = (d - 0.9) / 0.35, v = (alpha - 3.4) / 0.45;
            if (u * u + v * v <= 1.0)
                return 1.0;
            // very close to the threshold at low angles
            if (d < 0.25 && alpha < 2.5)
                return 1.0;
            return 0.0;
        }

    } // namespace functions

    /// Named test problem: system, operational model and whether ground truth is available.
    struct Problem {
        std::string name;
        OperationalModel model;
        std::shared_ptr<SystemUnderTest> system;
        bool has_ground_truth = true;

        DesignSpace space() const { return model.space(); }
    };

    inline std::vector<std::string> problem_names() { return {"representative", "squares", "mixture", "probabilistic_mixture", "rwd_standin"}; }

    inline Problem make_problem(const std::string& name)
    {
        using P = OperationalParameter;
        if (name == "representative") {
            OperationalModel m({P("x1", -10, 5, TruncatedNormal{-10, 1.5, -10, 5}), P("x2", -10, 5, Normal{-2.5, 1})});
            return {name, m, std::make_shared<FunctionSystem>(name, functions::representative)};
        }
        if (name == "squares") {
            OperationalModel m({P("x1", 0, 10, Normal{5, 1}), P("x2", 0, 10, Normal{5, 1})});
            return {name, m, std::make_shared<FunctionSystem>(name, functions::squares)};
        }
        if (name == "mixture" || name == "probabilistic_mixture") {
            auto gmm = [] { return GaussianMixture{{0.5, 0.5}, {TruncatedNormal{2, 1, -6, 6}, TruncatedNormal{-2, 1, -6, 6}}}; };
            if (name == "mixture") {
                OperationalModel m({P("x1", -6, 6, gmm()), P("x2", -6, 6, gmm())});
                return {name, m, std::make_shared<FunctionSystem>(name, functions::mixture)};
            }
            OperationalModel m({P("x1", -6, 6, Uniform{-6, 6}), P("x2", -6, 6, Uniform{-6, 6})});
            return {name, m, std::make_shared<FunctionSystem>(name, functions::probabilistic_mixture, OutputKind::probabilistic)};
        }
        if (name == "rwd_standin") {
            OperationalModel m({P("distance", 0.1, 4, TruncatedNormal{0, 1, 0, 4}), P("slope", 1, 7, Normal{3, 0.5})});
            return {name, m, std::make_shared<FunctionSystem>(name, functions::rwd_standin)};
        }
        throw invalid_input("unknown problem '" + name + "'");
    }

} // namespace bsv

#endif
