#include "canopy/harness/run_log.hpp"

#include <fstream>
#include <stdexcept>

namespace canopy::harness {

void RunLogWriter::line(const nlohmann::json& j) { os_ << j.dump() << '\n'; }

void RunLogWriter::header(const nlohmann::json& config) {
  line({{"type", "header"}, {"format", "canopy-run-log"}, {"version", kLogVersion},
        {"config", config}});
}

void RunLogWriter::record(const nlohmann::json& rec) {
  const double t = rec.at("t").get<double>();
  if (last_t_ && !(t > *last_t_)) throw std::logic_error("run log: timestamps must increase");
  last_t_ = t;
  line(rec);
}

void RunLogWriter::summary(const nlohmann::json& metrics) {
  line({{"type", "summary"}, {"metrics", metrics}});
  os_.flush();
}

RunLogContents read_run_log(std::istream& is) {
  RunLogContents out;
  std::string text;
  int lineno = 0;
  while (std::getline(is, text)) {
    ++lineno;
    if (text.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("log line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (lineno == 1) {
      if (type != "header") throw std::runtime_error("log line 1: missing header");
      if (j.value("version", 0) != kLogVersion) {
        throw std::runtime_error("log line 1: unsupported version");
      }
      out.header = std::move(j);
    } else if (type == "summary") {
      out.summary = std::move(j);
    } else {
      if (out.summary) throw std::runtime_error("log line " + std::to_string(lineno) + ": record after summary");
      out.records.push_back(std::move(j));
      out.record_lines.push_back(text);
    }
  }
  if (lineno == 0) throw std::runtime_error("empty log");
  return out;
}

RunLogContents read_run_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_run_log(in);
}

}  // namespace canopy::harness
