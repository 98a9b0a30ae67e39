#include <gtest/gtest.h>

#include <bsv/estimator.hpp>

using namespace bsv;
using P = OperationalParameter;

namespace {

    OperationalModel uniform_box() { return OperationalModel({P("a", 0, 1, Uniform{0, 1}), P("b", 0, 1, Uniform{0, 1})}); }

    struct Constant : SystemUnderTest {
        double value;
        bool costly;
        explicit Constant(double v, bool e = false) : value(v), costly(e) {}
        std::string name() const override { return "constant"; }
        bool expensive() const override { return costly; }
        std::vector<double> evaluate(const std::vector<SystemInput>& in) override { return std::vector<double>(in.size(), value); }
    };

} // namespace

TEST(Estimator, AllFailIsOne)
{
    auto grid = ProposalGrid::build(OperationalModel({P("a", 0, 10, Normal{5, 1}), P("b", 0, 10, Normal{5, 1})}), 20);
    std::vector<double> f(grid.size(), 0.97);
    EXPECT_EQ(estimate_pfail(f, grid), 1.0);
}

TEST(Estimator, HalfGridUniform)
{
    auto grid = ProposalGrid::build(uniform_box(), 10);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = grid.axis_index(i, 0) < 5 ? 1.0 : 0.0;
    EXPECT_DOUBLE_EQ(estimate_pfail(f, grid), 0.5);
}

TEST(Estimator, NoMassOnGrid)
{
    // Truncation excludes every lattice node.
    OperationalModel m({P("a", 0, 1, TruncatedNormal{0.5, 0.1, 0.41, 0.49}), P("b", 0, 1, Uniform{0, 1})});
    auto grid = ProposalGrid::build(m, 2);
    std::vector<double> f(grid.size(), 1.0);
    try {
        estimate_pfail(f, grid);
        FAIL();
    }
    catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("operational model has no mass on grid"), std::string::npos);
    }
}

TEST(Estimator, GenericExamples)
{
    std::vector<double> v{1, 0}, p{0.2, 0.8}, q{0.5, 0.5};
    EXPECT_DOUBLE_EQ(estimate_pfail_generic(v, p, q), 0.2);
    // p = q: plain mean of the values.
    std::vector<double> vals{0.3, 0.9, 0.1}, same{0.4, 0.7, 0.2};
    EXPECT_NEAR(estimate_pfail_generic(vals, same, same), (0.3 + 0.9 + 0.1) / 3.0, 1e-15);
    std::vector<double> zeros{0, 0};
    EXPECT_EQ(estimate_pfail_generic(zeros, p, q), 0.0);
    std::vector<double> qbad{0.0, 0.5};
    EXPECT_THROW(estimate_pfail_generic(v, p, qbad), invalid_input);
}

TEST(Estimator, GroundTruthConstants)
{
    auto grid = ProposalGrid::build(uniform_box(), 9);
    Constant fail(1.0), safe(0.0), costly(1.0, true);
    EXPECT_EQ(ground_truth_pfail(fail, grid), 1.0);
    EXPECT_EQ(ground_truth_pfail(safe, grid), 0.0);
    EXPECT_THROW(ground_truth_pfail(costly, grid), invalid_input);
}

TEST(Estimator, HardWithOracleLabelsIsGroundTruth)
{
    for (const auto& name : {"representative", "squares", "mixture"}) {
        auto prob = make_problem(name);
        auto grid = ProposalGrid::build(prob.model, 120);
        auto labels = true_grid_labels(*prob.system, grid);
        EXPECT_EQ(estimate_pfail(labels, grid, EstimateMode::hard), ground_truth_pfail(*prob.system, grid)) << name;
    }
}

TEST(Estimator, MonotoneScaleInvariantAndModesAgree)
{
    auto grid = ProposalGrid::build(OperationalModel({P("a", 0, 10, Normal{3, 1}), P("b", 0, 10, Normal{6, 2})}), 10);
    Rng rng(4);
    std::vector<double> v(grid.size());
    for (auto& x : v)
        x = rng.uniform() < 0.3 ? 1.0 : 0.0;
    double base = estimate_pfail(v, grid);
    EXPECT_EQ(base, estimate_pfail(v, grid, EstimateMode::soft));
    auto bigger = v;
    bigger[rng.index(bigger.size())] = 1.0;
    bigger[rng.index(bigger.size())] = 1.0;
    EXPECT_GE(estimate_pfail(bigger, grid), base);

    // Rescaling p: compare with a hand-computed weighted mean using 5p.
    double num = 0, den = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += 5 * grid.densities()[i] * v[i];
        den += 5 * grid.densities()[i];
    }
    EXPECT_NEAR(num / den, base, 1e-15);
}

TEST(Estimator, BruteForceWeightedMeanOnSmallGrids)
{
    OperationalModel m({P("a", 0, 10, Normal{3, 1}), P("b", 0, 10, Normal{6, 2})});
    auto grid = ProposalGrid::build(m.space(), m, {2, 5}); // 10 points
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(grid.size());
        for (auto& x : f)
            x = rng.uniform();
        double num = 0, den = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            num += grid.densities()[i] * (f[i] >= 0.5 ? 1.0 : 0.0);
            den += grid.densities()[i];
        }
        ASSERT_EQ(estimate_pfail(f, grid), num / den);
    }
}

TEST(Estimator, ModeNames)
{
    EXPECT_EQ(estimate_mode_from_string("soft"), EstimateMode::soft);
    EXPECT_STREQ(to_string(EstimateMode::hard), "hard");
    EXPECT_THROW(estimate_mode_from_string("medium"), invalid_input);
}
