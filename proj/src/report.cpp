#include "buckle/report.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace buckle {

using nlohmann::json;

namespace {

json count_json(const CountRecord& c) {
  json inertias = json::array();
  for (const auto& [alpha, nu] : c.inertias) inertias.push_back({{"alpha", alpha}, {"nu_minus", nu}});
  return {{"interval", {c.a, c.b}},
          {"count", c.count},
          {"method", c.method},
          {"inertias", inertias},
          {"nu_minus_projected", c.nu_minus_projected},
          {"nu_plus_projected", c.nu_plus_projected},
          {"common_null_dim", c.common_null_dim}};
}

CountRecord count_from(const json& j) {
  CountRecord c;
  c.a = j.at("interval").at(0).get<double>();
  c.b = j.at("interval").at(1).get<double>();
  c.count = j.at("count").get<Index>();
  c.method = j.at("method").get<std::string>();
  for (const auto& e : j.at("inertias")) {
    c.inertias.emplace_back(e.at("alpha").get<double>(), e.at("nu_minus").get<Index>());
  }
  c.nu_minus_projected = j.at("nu_minus_projected").get<Index>();
  c.nu_plus_projected = j.at("nu_plus_projected").get<Index>();
  c.common_null_dim = j.at("common_null_dim").get<Index>();
  return c;
}

}  // namespace

std::string report_to_json(const SolveReport& r) {
  json pairs = json::array();
  for (const auto& p : r.eigenpairs) {
    pairs.push_back({{"lambda", p.lambda},
                     {"mu", p.mu},
                     {"eta", p.eta},
                     {"cos_angle", p.cos_angle},
                     {"errbound", p.errbound}});
  }
  json j = {{"schema", r.schema},
            {"sigma", r.sigma},
            {"method", r.method},
            {"iterations", r.iterations},
            {"stop_reason", r.stop_reason},
            {"orthogonality", r.orthogonality},
            {"eigenpairs", pairs}};
  if (r.count) j["count"] = count_json(*r.count);
  if (r.verdict) {
    j["verdict"] = {{"status", *r.verdict}, {"delta", r.verdict_delta}};
  }
  return j.dump(2) + "\n";
}

SolveReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
  try {
    SolveReport r;
    r.schema = j.at("schema").get<int>();
    if (r.schema != 1) throw Error(ErrorKind::Parse, "report: unsupported schema");
    r.sigma = j.at("sigma").get<double>();
    r.method = j.at("method").get<std::string>();
    r.iterations = j.at("iterations").get<Index>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.orthogonality = j.at("orthogonality").get<double>();
    for (const auto& p : j.at("eigenpairs")) {
      r.eigenpairs.push_back({p.at("lambda").get<double>(), p.at("mu").get<double>(),
                              p.at("eta").get<double>(), p.at("cos_angle").get<double>(),
                              p.at("errbound").get<double>()});
    }
    if (j.contains("count")) r.count = count_from(j.at("count"));
    if (j.contains("verdict")) {
      r.verdict = j.at("verdict").at("status").get<std::string>();
      r.verdict_delta = j.at("verdict").at("delta").get<Index>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
}

void write_report(const SolveReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << report_to_json(r);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

SolveReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

std::string count_to_json(const CountRecord& c) { return count_json(c).dump(2) + "\n"; }

}  // namespace buckle
