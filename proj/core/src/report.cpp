#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "rscn/error.hpp"
#include "rscn/harness.hpp"

namespace rscn {

using json = nlohmann::json;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json cell_to_json(const CellResult& c) {
  json j;
  j["algorithm"] = to_string(c.algorithm);
  j["zeta"] = c.zeta;
  j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  j["L"] = c.l;
  j["mean_rmse"] = c.mean_rmse;
  j["std_rmse"] = c.std_rmse;
  j["trials"] = c.trials;
  j["seeds"] = c.seeds;
  j["trial_rmse"] = c.trial_rmse;
  j["trial_nodes"] = c.trial_nodes;
  j["wall_time"] = c.wall_time;
  j["failed"] = c.failed;
  j["failure"] = c.failure;
  return j;
}

CellResult cell_from_json(const json& j) {
  CellResult c;
  c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  c.zeta = j.at("zeta").get<double>();
  if (!j.at("lambda").is_null()) c.lambda = j.at("lambda").get<double>();
  c.l = j.at("L").get<std::size_t>();
  c.mean_rmse = j.at("mean_rmse").get<double>();
  c.std_rmse = j.at("std_rmse").get<double>();
  c.trials = j.at("trials").get<std::size_t>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.trial_rmse = j.at("trial_rmse").get<std::vector<double>>();
  c.trial_nodes = j.at("trial_nodes").get<std::vector<std::size_t>>();
  c.wall_time = j.at("wall_time").get<double>();
  c.failed = j.at("failed").get<bool>();
  c.failure = j.at("failure").get<std::string>();
  return c;
}

void check(std::ostream& sink) {
  if (!sink) throw IoError("failed to write report");
}

}  // namespace

void emit_report(const ExperimentReport& report, ReportFormat format, std::ostream& sink) {
  if (format == ReportFormat::Json) {
    json doc;
    doc["format"] = "rscn-report";
    doc["version"] = 1;
    doc["environment"] = report.environment;
    doc["spec"] = report.spec_echo;
    json cells = json::array();
    for (const auto& c : report.cells) cells.push_back(cell_to_json(c));
    doc["cells"] = std::move(cells);
    sink << doc.dump(2) << '\n';
    check(sink);
    return;
  }

  sink << kReportCsvHeader << '\n';
  for (const auto& c : report.cells) {
    double mean_nodes = 0.0;
    for (auto n : c.trial_nodes) mean_nodes += static_cast<double>(n);
    if (!c.trial_nodes.empty()) mean_nodes /= static_cast<double>(c.trial_nodes.size());
    sink << to_string(c.algorithm) << ',' << num(c.zeta) << ',' << (c.lambda ? num(*c.lambda) : std::string{}) << ','
         << c.l << ',' << c.trials << ',';
    if (c.failed) {
      sink << ",,,failed\n";
    } else {
      sink << num(c.mean_rmse) << ',' << num(c.std_rmse) << ',' << num(mean_nodes) << ",ok\n";
    }
  }
  check(sink);
}

ExperimentReport report_from_json(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw DeserializationError(e.byte, e.what());
  }
  try {
    if (doc.value("format", std::string{}) != "rscn-report") throw DeserializationError(0, "not an rscn-report document");
    ExperimentReport r;
    r.environment = doc.at("environment").get<std::map<std::string, std::string>>();
    r.spec_echo = doc.at("spec").get<std::map<std::string, std::string>>();
    for (const auto& c : doc.at("cells")) r.cells.push_back(cell_from_json(c));
    return r;
  } catch (const json::exception& e) {
    throw DeserializationError(0, e.what());
  } catch (const ContractViolation& e) {
    throw DeserializationError(0, e.what());
  }
}

void emit_sweep(const SweepTable& table, ReportFormat format, std::ostream& sink) {
  if (format == ReportFormat::Json) {
    json doc;
    doc["format"] = "rscn-sweep";
    doc["zetas"] = table.zetas;
    doc["nus"] = table.nus;
    doc["L"] = table.ls;
    doc["mean_rmse"] = table.mean;
    doc["std_rmse"] = table.stdev;
    sink << doc.dump(2) << '\n';
    check(sink);
    return;
  }
  sink << "zeta,nu";
  for (auto l : table.ls) sink << ",L=" << l;
  sink << '\n';
  for (std::size_t zi = 0; zi < table.zetas.size(); ++zi) {
    for (std::size_t vi = 0; vi < table.nus.size(); ++vi) {
      sink << num(table.zetas[zi]) << ',' << table.nus[vi];
      for (std::size_t li = 0; li < table.ls.size(); ++li) sink << ',' << num(table.mean[zi][vi][li]);
      sink << '\n';
    }
  }
  check(sink);
}

}  // namespace rscn
