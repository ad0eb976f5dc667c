#pragma once

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "pose.hpp"

namespace dockette {

struct RunSummary {
    std::uint32_t run_index = 0;
    double final_best_energy = 0.0;
    std::uint64_t total_evaluations = 0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct DockingResult {
    double best_energy = 0.0;
    Genotype best_genotype;
    std::vector<Vec3> best_coordinates;
    std::vector<RunSummary> per_run;
    /// Named wall-clock entries in seconds, in insertion order.
    std::vector<std::pair<std::string, double>> timings;

    friend bool operator==(const DockingResult&, const DockingResult&) = default;
};

enum class ResultFormat { Json, Csv };

inline ResultFormat parse_result_format(std::string_view s) {
    if (s == "json") return ResultFormat::Json;
    if (s == "csv") return ResultFormat::Csv;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected json or csv)");
}

inline nlohmann::ordered_json result_to_json(const DockingResult& r) {
    nlohmann::ordered_json j;
    j["best_energy"] = r.best_energy;
    j["best_genotype"] = std::vector<double>(r.best_genotype.genes().begin(), r.best_genotype.genes().end());
    auto coords = nlohmann::ordered_json::array();
    for (const auto& p : r.best_coordinates) coords.push_back({p.x, p.y, p.z});
    j["best_coordinates"] = coords;
    auto runs = nlohmann::ordered_json::array();
    for (const auto& s : r.per_run)
        runs.push_back({{"run", s.run_index}, {"final_best_energy", s.final_best_energy}, {"total_evaluations", s.total_evaluations}});
    j["per_run"] = runs;
    auto timings = nlohmann::ordered_json::object();
    for (const auto& [name, secs] : r.timings) timings[name] = secs;
    j["timings"] = timings;
    return j;
}

inline DockingResult result_from_json(const nlohmann::ordered_json& j) {
    DockingResult r;
    r.best_energy = j.at("best_energy").get<double>();
    r.best_genotype = Genotype::from_genes(j.at("best_genotype").get<std::vector<double>>());
    for (const auto& c : j.at("best_coordinates")) r.best_coordinates.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
    for (const auto& s : j.at("per_run"))
        r.per_run.push_back({s.at("run").get<std::uint32_t>(), s.at("final_best_energy").get<double>(), s.at("total_evaluations").get<std::uint64_t>()});
    for (const auto& [name, secs] : j.at("timings").items()) r.timings.emplace_back(name, secs.get<double>());
    return r;
}

/// CSV layout: `#` metadata lines (best energy, genotype, coordinates,
/// timings), then a `run,final_best_energy,total_evaluations` table with one
/// row per run.
inline std::string result_to_csv(const DockingResult& r) {
    using detail::format_real;
    std::string out = "# best_energy," + format_real(r.best_energy) + "\n";
    out += "# best_genotype";
    for (double g : r.best_genotype.genes()) out += "," + format_real(g);
    out += "\n";
    for (const auto& p : r.best_coordinates) out += "# coord," + format_real(p.x) + "," + format_real(p.y) + "," + format_real(p.z) + "\n";
    for (const auto& [name, secs] : r.timings) out += "# timing," + name + "," + format_real(secs) + "\n";
    out += "run,final_best_energy,total_evaluations\n";
    for (const auto& s : r.per_run)
        out += std::to_string(s.run_index) + "," + format_real(s.final_best_energy) + "," + std::to_string(s.total_evaluations) + "\n";
    return out;
}

inline DockingResult result_from_csv(std::string_view text) {
    DockingResult r;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fields = [](const std::string& s) {
        std::vector<std::string> f;
        std::string cur;
        std::istringstream ss(s);
        while (std::getline(ss, cur, ',')) f.push_back(cur);
        return f;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto f = fields(line.substr(2));
            if (f.empty()) continue;
            if (f[0] == "best_energy" && f.size() == 2) {
                r.best_energy = detail::parse_real(f[1], line_no, "energy");
            } else if (f[0] == "best_genotype") {
                std::vector<double> genes;
                for (std::size_t i = 1; i < f.size(); ++i) genes.push_back(detail::parse_real(f[i], line_no, "gene"));
                r.best_genotype = Genotype::from_genes(std::move(genes));
            } else if (f[0] == "coord" && f.size() == 4) {
                r.best_coordinates.push_back({detail::parse_real(f[1], line_no, "coordinate"), detail::parse_real(f[2], line_no, "coordinate"),
                                              detail::parse_real(f[3], line_no, "coordinate")});
            } else if (f[0] == "timing" && f.size() == 3) {
                r.timings.emplace_back(f[1], detail::parse_real(f[2], line_no, "timing"));
            } else {
                throw ParseError(line_no, "unknown metadata line");
            }
            continue;
        }
        if (!header_seen) {
            if (line != "run,final_best_energy,total_evaluations") throw ParseError(line_no, "malformed header");
            header_seen = true;
            continue;
        }
        const auto f = fields(line);
        if (f.size() != 3) throw ParseError(line_no, "expected 3 fields");
        r.per_run.push_back({static_cast<std::uint32_t>(detail::parse_integer(f[0], line_no, "run")), detail::parse_real(f[1], line_no, "energy"),
                             static_cast<std::uint64_t>(detail::parse_integer(f[2], line_no, "evaluations"))});
    }
    if (!header_seen) throw ParseError(0, "missing per-run table header");
    return r;
}

inline std::string write_result(const DockingResult& r, ResultFormat format) {
    if (format == ResultFormat::Csv) return result_to_csv(r);
    return result_to_json(r).dump(2) + "\n";
}

inline DockingResult parse_result(std::string_view text, ResultFormat format) {
    if (format == ResultFormat::Csv) return result_from_csv(text);
    try {
        return result_from_json(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed result JSON: ") + e.what());
    }
}

} // namespace dockette
