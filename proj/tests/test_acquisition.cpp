#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <bsv/acquisition.hpp>

using namespace bsv;
using P = OperationalParameter;

namespace {

    OperationalModel uniform_box() { return OperationalModel({P("a", 0, 1, Uniform{0, 1}), P("b", 0, 1, Uniform{0, 1})}); }
    OperationalModel normal_box() { return OperationalModel({P("a", 0, 10, Normal{3, 1}), P("b", 0, 10, Normal{6, 2})}); }

    // Hand-made prediction with a given f and constant sigma.
    GridPrediction fixed_prediction(std::vector<double> f, double sigma)
    {
        GridPrediction p;
        p.sigma.assign(f.size(), sigma);
        p.mean_logit.assign(f.size(), 0.0);
        p.f = std::move(f);
        return p;
    }

    GpSurrogate some_surrogate(const ProposalGrid& grid, Rng& rng, std::size_t n)
    {
        std::vector<DesignPoint> X;
        std::vector<double> Y;
        for (std::size_t i = 0; i < n; ++i) {
            auto x = grid.point(rng.index(grid.size()));
            X.push_back(x);
            Y.push_back(x[0] + x[1] > 9 ? 1.0 : 0.0);
        }
        return GpSurrogate::fit(X, Y, 2);
    }

} // namespace

TEST(BoundaryDerivative, Examples)
{
    EXPECT_EQ(boundary_derivative(0.5), 0.25);
    EXPECT_EQ(boundary_derivative(0.0), 0.0);
    EXPECT_EQ(boundary_derivative(1.0), 0.0);
    EXPECT_NEAR(boundary_derivative(0.9), 0.09, 1e-15);
    for (double f = 0.0; f <= 1.0; f += 0.001) {
        EXPECT_LE(boundary_derivative(f), 0.25);
        if (std::abs(f - 0.5) > 1e-6)
            EXPECT_LT(boundary_derivative(f), 0.25 - 1e-12);
    }
    EXPECT_NEAR(boundary_derivative(GpSurrogate(2), make_point({0, 0})), 0.25, 1e-12);
}

TEST(Exploration, EmptySurrogateGivesFirstPoint)
{
    auto grid = ProposalGrid::build(uniform_box(), 21);
    EXPECT_EQ(uncertainty_exploration(GpSurrogate(2), grid), grid.point(0));
}

TEST(Exploration, CenterDataGivesCorner)
{
    auto grid = ProposalGrid::build(uniform_box(), 21);
    auto gp = GpSurrogate::fit({make_point({0.5, 0.5})}, {1.0}, 2);
    auto x = uncertainty_exploration(gp, grid);
    EXPECT_TRUE((x[0] == 0.0 || x[0] == 1.0) && (x[1] == 0.0 || x[1] == 1.0));
}

TEST(Exploration, IsGridMaximumOfSigma)
{
    auto grid = ProposalGrid::build(normal_box(), 41);
    Rng rng(3);
    auto gp = some_surrogate(grid, rng, 30);
    auto pred = predict_on_grid(gp, grid);
    std::size_t i = uncertainty_exploration_index(pred);
    for (int k = 0; k < 1000; ++k)
        EXPECT_GE(pred.sigma[i], pred.sigma[rng.index(grid.size())]);
    for (double s : pred.sigma)
        ASSERT_LE(s, pred.sigma[i]);
}

TEST(Boundary, UniformModelReducesToScore)
{
    auto grid = ProposalGrid::build(uniform_box(), 15);
    Rng rng(4);
    auto gp = GpSurrogate::fit({make_point({0.2, 0.2}), make_point({0.8, 0.7})}, {1.0, 0.0}, 2);
    auto pred = predict_on_grid(gp, grid);
    AcquisitionConfig cfg;
    std::vector<double> plain(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        plain[i] = boundary_derivative(pred.f[i]) + cfg.lambda * pred.sigma[i];
    for (std::size_t t : {1u, 7u, 1000u})
        EXPECT_EQ(boundary_refinement_index(pred, grid, t, cfg), argmax_index(plain));
}

TEST(Boundary, LargeTLimit)
{
    auto grid = ProposalGrid::build(normal_box(), 41);
    Rng rng(5);
    auto gp = some_surrogate(grid, rng, 20);
    auto pred = predict_on_grid(gp, grid);
    AcquisitionConfig cfg;
    std::vector<double> plain(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        plain[i] = boundary_derivative(pred.f[i]) + cfg.lambda * pred.sigma[i];
    EXPECT_EQ(boundary_refinement_index(pred, grid, 1000000, cfg), argmax_index(plain));
}

TEST(Boundary, SingleHalfPointWithZeroLambda)
{
    auto grid = ProposalGrid::build(uniform_box(), 5);
    std::vector<double> f(grid.size(), 0.0);
    f[13] = 0.5;
    auto pred = fixed_prediction(f, 0.3);
    AcquisitionConfig cfg{0.0};
    EXPECT_EQ(boundary_refinement_index(pred, grid, 1, cfg), 13u);
}

TEST(Boundary, ZeroDensityScoresZero)
{
    auto pred = fixed_prediction({0.5, 0.5}, 1.0);
    std::vector<double> logp{-std::numeric_limits<double>::infinity(), -3.0};
    auto s = boundary_refinement_scores(pred, logp, 1, {});
    EXPECT_EQ(s[0], 0.0);
    EXPECT_GT(s[1], 0.0);
    EXPECT_THROW(boundary_refinement_scores(pred, logp, 0, {}), invalid_input);
}

TEST(Boundary, ScalingDensityLeavesArgmax)
{
    auto grid = ProposalGrid::build(normal_box(), 31);
    Rng rng(6);
    auto pred = predict_on_grid(some_surrogate(grid, rng, 15), grid);
    std::vector<double> shifted(grid.log_densities());
    for (auto& v : shifted)
        v += std::log(37.0);
    for (std::size_t t : {1u, 3u}) {
        auto a = boundary_refinement_scores(pred, grid.log_densities(), t, {});
        auto b = boundary_refinement_scores(pred, shifted, t, {});
        EXPECT_EQ(argmax_index(a), argmax_index(b));
    }
}

TEST(FailureSampling, OneFailingPoint)
{
    auto grid = ProposalGrid::build(uniform_box(), 5);
    std::vector<double> f(grid.size(), 0.0);
    f[7] = 1.0;
    auto pred = fixed_prediction(f, 0.0);
    Rng rng(1);
    for (int i = 0; i < 200; ++i)
        ASSERT_EQ(failure_region_sampling_index(pred, grid, {}, rng), 7u);
}

TEST(FailureSampling, EmptySurrogateFollowsDensity)
{
    auto grid = ProposalGrid::build(normal_box(), 11);
    auto pred = predict_on_grid(GpSurrogate(2), grid);
    auto w = failure_region_weights(pred, grid.densities(), {});
    double ratio = w[0] / grid.densities()[0];
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_NEAR(w[i], ratio * grid.densities()[i], 1e-15);
}

TEST(FailureSampling, FrequenciesMatchWeights)
{
    auto grid = ProposalGrid::build(normal_box(), 7);
    Rng rng(9);
    auto gp = some_surrogate(grid, rng, 12);
    auto pred = predict_on_grid(gp, grid);
    auto w = failure_region_weights(pred, grid.densities(), {});
    double total = 0;
    for (double v : w)
        total += v;
    const int n = 100000;
    std::vector<int> c(grid.size(), 0);
    for (int i = 0; i < n; ++i)
        ++c[failure_region_sampling_index(pred, grid, {}, rng)];
    double tv = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        tv += std::abs(c[i] / double(n) - w[i] / total);
    EXPECT_LE(0.5 * tv, 0.01);
}

TEST(FailureSampling, FallbackWhenNothingFails)
{
    auto pred = fixed_prediction({0.0, 0.1, 0.2}, 0.5);
    std::vector<double> p{1.0, 2.0, 0.0};
    auto w = failure_region_weights(pred, p, {});
    EXPECT_NEAR(w[0], 0.05, 1e-15);
    EXPECT_NEAR(w[1], 0.3, 1e-15);
    EXPECT_EQ(w[2], 0.0);
}

TEST(FailureSampling, NeverPicksZeroDensity)
{
    OperationalModel m({P("a", 0, 1, TruncatedNormal{0.5, 0.2, 0.2, 0.8}), P("b", 0, 1, Uniform{0, 1})});
    // The parameter range [0,1] is wider than the truncation, so part of the grid has p = 0.
    auto grid = ProposalGrid::build(m, 21);
    auto pred = fixed_prediction(std::vector<double>(grid.size(), 0.9), 0.1);
    Rng rng(2);
    for (int i = 0; i < 5000; ++i)
        ASSERT_GT(grid.densities()[failure_region_sampling_index(pred, grid, {}, rng)], 0.0);
}

TEST(FailureSampling, WeightsClipH)
{
    auto pred = fixed_prediction({0.95}, 2.0);
    std::vector<double> p{3.0};
    EXPECT_EQ(failure_region_weights(pred, p, {})[0], 3.0);
}

TEST(Fsar, EmptySurrogateBatch)
{
    auto grid = ProposalGrid::build(normal_box(), 51);
    Rng rng(1);
    auto batch = fsar_batch(GpSurrogate(2), grid, 1, {}, rng);
    ASSERT_TRUE(batch.explore && batch.boundary && batch.failure_sample);
    EXPECT_EQ(batch.explore->grid_index, 0u);
    EXPECT_EQ(batch.boundary->grid_index, argmax_index(grid.densities()));
    for (const auto& p : batch.points())
        EXPECT_EQ(grid.index_of(p.x), p.grid_index);
}

TEST(Fsar, Determinism)
{
    auto grid = ProposalGrid::build(normal_box(), 31);
    Rng r0(8);
    auto gp = some_surrogate(grid, r0, 20);
    auto pred = predict_on_grid(gp, grid);
    Rng a(5), b(5);
    auto ba = fsar_batch(pred, grid, 4, {}, a), bb = fsar_batch(pred, grid, 4, {}, b);
    EXPECT_EQ(ba.explore->grid_index, bb.explore->grid_index);
    EXPECT_EQ(ba.boundary->grid_index, bb.boundary->grid_index);
    EXPECT_EQ(ba.failure_sample->grid_index, bb.failure_sample->grid_index);
}

TEST(Fsar, SubsetAndErrors)
{
    auto grid = ProposalGrid::build(uniform_box(), 5);
    Rng rng(1);
    auto pred = predict_on_grid(GpSurrogate(2), grid);
    auto batch = fsar_batch(pred, grid, 1, {}, rng, {false, true, false});
    EXPECT_FALSE(batch.explore);
    EXPECT_TRUE(batch.boundary);
    EXPECT_FALSE(batch.failure_sample);
    EXPECT_EQ(batch.points().size(), 1u);
    EXPECT_THROW(fsar_batch(pred, grid, 0, {}, rng), invalid_input);
}

TEST(Acquisition, Names)
{
    EXPECT_EQ(acquisition_from_string("2"), Acquisition::boundary);
    EXPECT_EQ(acquisition_from_string("failure_sample"), Acquisition::failure_sample);
    EXPECT_FALSE(acquisition_from_string("4"));
    EXPECT_EQ((AcquisitionSet{true, false, true}).label(), "[1,3]");
}

TEST(Acquisition, SurfacesCsv)
{
    auto grid = ProposalGrid::build(uniform_box(), 3);
    auto pred = predict_on_grid(GpSurrogate(2), grid);
    std::ostringstream os;
    write_acquisition_surfaces_csv(os, pred, grid, 1, {});
    std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "x1,x2,f_hat,sigma_hat,explore,boundary,failure_sample");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 10);
}
