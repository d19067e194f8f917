#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chargegame/model.hpp"

namespace chargegame::detail {

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error(what + ": malformed JSON");
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json report_json(const SolveReport& report) {
    nlohmann::json j;
    j["objective"] = report.objective;
    j["iterations"] = report.iterations;
    j["residual"] = report.residual;
    if (report.nash_residual) {
        j["nash_residual"] = *report.nash_residual;
    } else {
        j["nash_residual"] = nullptr;
    }
    if (report.stationarity_residual) {
        j["stationarity_residual"] = *report.stationarity_residual;
    }
    j["status"] = to_string(report.status);
    if (report.status == SolveStatus::max_iter) {
        j["oscillating"] = report.oscillating;
    }
    return j;
}

}  // namespace chargegame::detail
