#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include <bsv/bsv.hpp>

using namespace bsv;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

    fs::path temp_dir(const std::string& name)
    {
        auto p = fs::temp_directory_path() / ("bsv_io_" + name + "_" + std::to_string(::getpid()));
        fs::remove_all(p);
        return p;
    }

} // namespace

TEST(Io, FmtRoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0})
        EXPECT_EQ(std::stod(io::fmt(v)), v);
    EXPECT_EQ(io::fmt(1.0), "1");
}

TEST(Io, ModelRoundTrip)
{
    for (const auto& name : problem_names()) {
        auto m = make_problem(name).model;
        auto back = io::model_from_json(io::model_to_json(m));
        ASSERT_EQ(back.dim(), m.dim());
        EXPECT_EQ(io::model_to_json(back), io::model_to_json(m));
        auto x = m.space().denormalize(make_point({0.3, 0.6}));
        EXPECT_EQ(back.density(x), m.density(x)) << name;
    }
}

TEST(Io, ModelFileMatchesBuiltinMixture)
{
    auto j = json::parse(io::read_file(fs::path(BSV_TEST_DATA) / "mixture_model.json"));
    auto m = io::model_from_json(j);
    auto ref = make_problem("mixture").model;
    for (double a : {-5.0, -2.0, 0.0, 1.5})
        EXPECT_DOUBLE_EQ(m.density(make_point({a, -a})), ref.density(make_point({a, -a})));
}

TEST(Io, MalformedModel)
{
    EXPECT_THROW(io::model_from_json(json::array()), invalid_input);
    EXPECT_THROW(io::model_from_json(json::parse(R"([{"name":"a","range":[0],"kind":"normal","params":{"mean":0,"std":1}}])")), invalid_input);
    EXPECT_THROW(io::model_from_json(json::parse(R"([{"name":"a","range":[0,1],"kind":"cauchy","params":{}}])")), invalid_input);
    EXPECT_THROW(io::model_from_json(json::parse(R"([{"name":"a","range":[0,1],"kind":"normal","params":{"mean":0}}])")), invalid_input);
}

TEST(Io, SnapshotRoundTrip)
{
    auto prob = make_problem("mixture");
    Rng rng(3);
    std::vector<DesignPoint> X;
    std::vector<double> Y;
    for (int i = 0; i < 40; ++i) {
        X.push_back(prob.model.sample(rng));
        Y.push_back(prob.system->evaluate_sample(X.back()));
    }
    auto gp = GpSurrogate::fit(X, Y, 2);
    auto text = io::snapshot_to_json(gp).dump();
    auto back = io::snapshot_from_json(json::parse(text));
    EXPECT_EQ(back.size(), gp.size());
    for (int i = 0; i < 50; ++i) {
        auto x = prob.model.sample(rng);
        EXPECT_NEAR(back.predict(x).f, gp.predict(x).f, 1e-12);
        EXPECT_NEAR(back.predict(x).sigma, gp.predict(x).sigma, 1e-12);
    }
}

TEST(Io, MalformedSnapshot)
{
    EXPECT_THROW(io::snapshot_from_json(json::parse(R"({"format":"other"})")), invalid_input);
    auto j = io::snapshot_to_json(GpSurrogate(2));
    j["version"] = 99;
    EXPECT_THROW(io::snapshot_from_json(j), invalid_input);
    j = io::snapshot_to_json(GpSurrogate::fit({make_point({1, 2})}, {1.0}, 2));
    j["inputs"][0] = json::array({1.0});
    EXPECT_THROW(io::snapshot_from_json(j), invalid_input);
}

TEST(Io, RecordsRoundTrip)
{
    std::vector<EvaluationRecord> rs{
        {make_point({0.1, -3.25}), 1.0, 1, RecordSource::explore},
        {make_point({1.0 / 3.0, 7.0}), 0.0, 1, RecordSource::boundary},
        {make_point({2e-17, 5.5}), 0.731, 2, RecordSource::failure_sample},
    };
    auto text = io::records_csv(rs, 2);
    EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,source,x1,x2,y");
    auto back = io::parse_records_csv(text);
    ASSERT_EQ(back.size(), rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(back[i].x, rs[i].x);
        EXPECT_EQ(back[i].y, rs[i].y);
        EXPECT_EQ(back[i].iteration, rs[i].iteration);
        EXPECT_EQ(back[i].source, rs[i].source);
    }
    EXPECT_EQ(io::records_csv(back, 2), text);
}

TEST(Io, MalformedRecords)
{
    EXPECT_THROW(io::parse_records_csv(""), invalid_input);
    EXPECT_THROW(io::parse_records_csv("a,b,c\n"), invalid_input);
    EXPECT_THROW(io::parse_records_csv("iteration,source,x1,y\n1,explore,0.5\n"), invalid_input);
    EXPECT_THROW(io::parse_records_csv("iteration,source,x1,y\n1,explore,abc,1\n"), invalid_input);
    EXPECT_THROW(io::parse_records_csv("iteration,source,x1,y\n1,somewhere,0.5,1\n"), invalid_input);
    EXPECT_EQ(io::parse_records_csv("iteration,source,x1,y\r\n1,explore,0.5,1\r\n\n").size(), 1u);
}

TEST(Io, HistoryCsv)
{
    std::vector<HistoryEntry> h{{1, 3, 0.5}, {2, 6, 0.25}};
    EXPECT_EQ(io::history_csv(h, EstimateMode::hard), "iteration,num_evaluations,estimate,mode\n1,3,0.5,hard\n2,6,0.25,hard\n");
}

TEST(Io, MetricsRow)
{
    MetricReport m;
    m.r_fail = 0.5;
    m.c_input = 0.25;
    m.delta_fail = 0.125;
    EXPECT_EQ(io::metrics_csv_row("squares", "bsv", 1, 9, 0.01, m), "squares,bsv,1,9,0.01,0.5,,0.125,0.25,\n");
    auto j = io::metrics_to_json(m);
    EXPECT_TRUE(j["l_star"].is_null());
    EXPECT_EQ(j["delta_fail"], 0.125);
}

TEST(Io, AtomicWrite)
{
    auto dir = temp_dir("atomic");
    auto file = dir / "nested" / "out.txt";
    io::atomic_write(file, "hello\n");
    EXPECT_EQ(io::read_file(file), "hello\n");
    io::atomic_write(file, "again");
    EXPECT_EQ(io::read_file(file), "again");
    EXPECT_FALSE(fs::exists(file.string() + ".tmp"));
    EXPECT_THROW(io::read_file(dir / "missing"), invalid_input);
    fs::remove_all(dir);
}
