#ifndef BSV_IO_HPP
#define BSV_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <bsv/bsv_loop.hpp>
#include <bsv/gp_surrogate.hpp>
#include <bsv/metrics.hpp>
#include <bsv/operational_model.hpp>

namespace bsv::io {

    using nlohmann::json;

    // -- atomic file output ----------------------------------------------------

    /// Writes to a sibling temp file, then renames over `path`.
    inline void atomic_write(const std::filesystem::path& path, const std::string& content)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os)
                throw std::runtime_error("cannot open " + tmp.string() + " for writing");
            os << content;
            os.flush();
            if (!os)
                throw std::runtime_error("write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }

    inline std::string read_file(const std::filesystem::path& path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw invalid_input("cannot open " + path.string());
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    /// Shortest text that parses back to the same double.
    inline std::string fmt(double v)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    // -- operational model -----------------------------------------------------

    inline json to_json(const TruncatedNormal& d) { return {{"mean", d.mean}, {"std", d.std}, {"lower", d.lower}, {"upper", d.upper}}; }

    inline json distribution_to_json(const Distribution& dist)
    {
        return std::visit(
            [](const auto& d) -> json {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Normal>)
                    return {{"kind", "normal"}, {"params", {{"mean", d.mean}, {"std", d.std}}}};
                else if constexpr (std::is_same_v<T, TruncatedNormal>)
                    return {{"kind", "truncated_normal"}, {"params", to_json(d)}};
                else if constexpr (std::is_same_v<T, Uniform>)
                    return {{"kind", "uniform"}, {"params", {{"lower", d.lower}, {"upper", d.upper}}}};
                else {
                    json comps = json::array();
                    for (const auto& c : d.components)
                        comps.push_back(to_json(c));
                    return {{"kind", "mixture"}, {"params", {{"weights", d.weights}, {"components", comps}}}};
                }
            },
            dist);
    }

    inline TruncatedNormal truncated_normal_from_json(const json& p)
    {
        return {p.at("mean").get<double>(), p.at("std").get<double>(), p.at("lower").get<double>(), p.at("upper").get<double>()};
    }

    inline Distribution distribution_from_json(const std::string& kind, const json& p)
    {
        if (kind == "normal")
            return Normal{p.at("mean").get<double>(), p.at("std").get<double>()};
        if (kind == "truncated_normal")
            return truncated_normal_from_json(p);
        if (kind == "uniform")
            return Uniform{p.at("lower").get<double>(), p.at("upper").get<double>()};
        if (kind == "mixture") {
            GaussianMixture m;
            m.weights = p.at("weights").get<std::vector<double>>();
            for (const auto& c : p.at("components"))
                m.components.push_back(truncated_normal_from_json(c));
            return m;
        }
        throw invalid_input("unknown distribution kind '" + kind + "'");
    }

    inline json model_to_json(const OperationalModel& model)
    {
        json params = json::array();
        for (const auto& p : model.parameters()) {
            json d = distribution_to_json(p.distribution());
            params.push_back({{"name", p.name()}, {"range", {p.lower(), p.upper()}}, {"kind", d["kind"]}, {"params", d["params"]}});
        }
        return params;
    }

    inline OperationalModel model_from_json(const json& j)
    {
        if (!j.is_array() || j.empty())
            throw invalid_input("operational model must be a nonempty array of parameters");
        std::vector<OperationalParameter> params;
        try {
            for (const auto& p : j) {
                auto range = p.at("range").get<std::vector<double>>();
                if (range.size() != 2)
                    throw invalid_input("parameter range must have two entries");
                params.emplace_back(p.at("name").get<std::string>(), range[0], range[1],
                    distribution_from_json(p.at("kind").get<std::string>(), p.at("params")));
            }
        }
        catch (const json::exception& e) {
            throw invalid_input(std::string("malformed operational model: ") + e.what());
        }
        return OperationalModel(std::move(params));
    }

    // -- surrogate snapshot ----------------------------------------------------

    inline constexpr int snapshot_version = 1;

    inline json snapshot_to_json(const GpSurrogate& gp)
    {
        json X = json::array();
        for (const auto& x : gp.inputs())
            X.push_back(std::vector<double>(x.data(), x.data() + x.size()));
        json j = {
            {"format", "bsv-gp-snapshot"},
            {"version", snapshot_version},
            {"dim", gp.dim()},
            {"kernel", {{"type", "matern12"}, {"length_scale", gp.kernel().length_scale}, {"signal_std", gp.kernel().signal_std}}},
            {"link", {{"epsilon", gp.link().epsilon}, {"steepness", gp.link().steepness}}},
            {"jitter", gp.jitter()},
            {"initial_jitter", gp.options().jitter},
            {"max_jitter", gp.options().max_jitter},
            {"inputs", X},
            {"targets", gp.targets()},
        };
        if (gp.options().normalize_to) {
            const auto& s = *gp.options().normalize_to;
            j["normalize_to"] = {{"lower", s.lower}, {"upper", s.upper}};
        }
        else
            j["normalize_to"] = nullptr;
        return j;
    }

    inline GpSurrogate snapshot_from_json(const json& j)
    {
        try {
            if (j.at("format").get<std::string>() != "bsv-gp-snapshot")
                throw invalid_input("not a surrogate snapshot");
            int version = j.at("version").get<int>();
            if (version != snapshot_version)
                throw invalid_input("unsupported snapshot version " + std::to_string(version));
            std::size_t dim = j.at("dim").get<std::size_t>();
            KernelParams kernel{j.at("kernel").at("length_scale").get<double>(), j.at("kernel").at("signal_std").get<double>()};
            LinkParams link{j.at("link").at("epsilon").get<double>(), j.at("link").at("steepness").get<double>()};
            FitOptions opt;
            opt.jitter = j.at("initial_jitter").get<double>();
            opt.max_jitter = j.at("max_jitter").get<double>();
            if (!j.at("normalize_to").is_null())
                opt.normalize_to = DesignSpace(j["normalize_to"].at("lower").get<std::vector<double>>(), j["normalize_to"].at("upper").get<std::vector<double>>());
            std::vector<DesignPoint> X;
            for (const auto& row : j.at("inputs")) {
                auto v = row.get<std::vector<double>>();
                if (v.size() != dim)
                    throw invalid_input("snapshot input has wrong dimension");
                X.push_back(Eigen::Map<const DesignPoint>(v.data(), static_cast<Eigen::Index>(v.size())));
            }
            auto Y = j.at("targets").get<std::vector<double>>();
            return GpSurrogate::fit_with_jitter(X, Y, dim, kernel, link, opt, j.at("jitter").get<double>());
        }
        catch (const json::exception& e) {
            throw invalid_input(std::string("malformed surrogate snapshot: ") + e.what());
        }
    }

    // -- records / history CSV -------------------------------------------------

    inline std::string records_csv(const std::vector<EvaluationRecord>& records, std::size_t dim)
    {
        std::ostringstream os;
        os << "iteration,source";
        for (std::size_t k = 0; k < dim; ++k)
            os << ",x" << k + 1;
        os << ",y\n";
        for (const auto& r : records) {
            os << r.iteration << ',' << to_string(r.source);
            for (Eigen::Index k = 0; k < r.x.size(); ++k)
                os << ',' << fmt(r.x[k]);
            os << ',' << fmt(r.y) << '\n';
        }
        return os.str();
    }

    inline std::vector<std::string> split_csv_line(const std::string& line)
    {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ','))
            out.push_back(cell);
        if (!line.empty() && line.back() == ',')
            out.emplace_back();
        return out;
    }

    inline std::vector<EvaluationRecord> parse_records_csv(const std::string& text)
    {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line))
            throw invalid_input("records CSV is empty");
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto header = split_csv_line(line);
        if (header.size() < 4 || header[0] != "iteration" || header[1] != "source" || header.back() != "y")
            throw invalid_input("records CSV header must be iteration,source,x1..xd,y");
        const std::size_t dim = header.size() - 3;
        std::vector<EvaluationRecord> out;
        std::size_t lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            auto cells = split_csv_line(line);
            if (cells.size() != header.size())
                throw invalid_input("records CSV line " + std::to_string(lineno) + ": wrong number of fields");
            try {
                EvaluationRecord r;
                r.iteration = std::stoul(cells[0]);
                r.source = record_source_from_string(cells[1]);
                r.x.resize(static_cast<Eigen::Index>(dim));
                for (std::size_t k = 0; k < dim; ++k)
                    r.x[static_cast<Eigen::Index>(k)] = std::stod(cells[2 + k]);
                r.y = std::stod(cells.back());
                out.push_back(std::move(r));
            }
            catch (const std::logic_error& e) {
                throw invalid_input("records CSV line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        return out;
    }

    inline std::string history_csv(const std::vector<HistoryEntry>& history, EstimateMode mode)
    {
        std::ostringstream os;
        os << "iteration,num_evaluations,estimate,mode\n";
        for (const auto& h : history)
            os << h.iteration << ',' << h.num_evaluations << ',' << fmt(h.estimate) << ',' << to_string(mode) << '\n';
        return os.str();
    }

    // -- metrics ---------------------------------------------------------------

    inline json metrics_to_json(const MetricReport& m)
    {
        auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
        return {{"r_fail", m.r_fail}, {"l_star", opt(m.l_star)}, {"delta_fail", opt(m.delta_fail)}, {"c_input", m.c_input}, {"c_output", opt(m.c_output)}};
    }

    inline std::string metrics_csv_header() { return "problem,method,seed,num_evaluations,pfail_estimate,r_fail,l_star,delta_fail,c_input,c_output\n"; }

    inline std::string metrics_csv_row(const std::string& problem, const std::string& method, std::uint64_t seed, std::size_t evaluations,
        double estimate, const MetricReport& m)
    {
        auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
        std::ostringstream os;
        os << problem << ',' << method << ',' << seed << ',' << evaluations << ',' << fmt(estimate) << ',' << fmt(m.r_fail) << ',' << opt(m.l_star)
           << ',' << opt(m.delta_fail) << ',' << fmt(m.c_input) << ',' << opt(m.c_output) << '\n';
        return os.str();
    }

    // -- run result ------------------------------------------------------------

    inline json point_to_json(const DesignPoint& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

    inline json result_to_json(const BsvResult& r, const MetricReport& m, const std::string& problem, const std::string& method, std::uint64_t seed)
    {
        json fails = json::array();
        for (const auto& x : r.failures)
            fails.push_back(point_to_json(x));
        return {
            {"problem", problem},
            {"method", method},
            {"seed", seed},
            {"num_evaluations", r.records.size()},
            {"pfail_estimate", r.pfail_estimate},
            {"mode", to_string(r.mode)},
            {"most_likely_failure", r.most_likely_failure ? point_to_json(*r.most_likely_failure) : json(nullptr)},
            {"failures", fails},
            {"metrics", metrics_to_json(m)},
        };
    }

} // namespace bsv::io

#endif
