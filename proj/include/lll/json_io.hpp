#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "lll/branching.hpp"
#include "lll/conditions.hpp"
#include "lll/engine.hpp"

namespace lll {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& pe : r.per_event)
    events.push_back({{"event", pe.event},
                      {"p", pe.p},
                      {"bound", pe.bound},
                      {"slack", pe.slack},
                      {"ok", pe.ok}});
  return {{"schema_version", kReportSchemaVersion},
          {"condition", r.kind == ConditionReport::Kind::cluster ? "cluster" : "classical"},
          {"satisfied", r.satisfied},
          {"total_bound", r.total_bound},
          {"events", events}};
}

inline nlohmann::json to_json(const ExecutionLog& log) {
  return {{"schema_version", kReportSchemaVersion},
          {"terminated", log.terminated},
          {"steps_used", log.steps_used},
          {"steps", log.steps},
          {"counts", log.counts},
          {"assignment", log.final_assignment.values}};
}

inline nlohmann::json to_json(const TreeTally& t) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [enc, n] : t.counts) counts[enc] = n;
  return {{"schema_version", kReportSchemaVersion},
          {"trials", t.trials},
          {"truncated", t.truncated},
          {"rejection_rounds", t.rejection_rounds},
          {"counts", counts}};
}

// Whitespace-separated numbers; '#' starts a comment.
inline std::vector<double> parse_value_file(std::string_view text) {
  std::vector<double> out;
  std::string cleaned;
  cleaned.reserve(text.size());
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    cleaned += comment ? ' ' : c;
  }
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[pos]))) ++pos;
    if (pos >= cleaned.size()) break;
    std::size_t end = pos;
    while (end < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[end]))) ++end;
    const std::string tok = cleaned.substr(pos, end - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("bad numeric value '" + tok + "' in value file");
    }
    pos = end;
  }
  return out;
}

}  // namespace lll
