#include "npmle/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "npmle/errors.hpp"

namespace npmle {

using nlohmann::json;

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Dataset read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidArgument, "cannot open data file: " + path);
  std::vector<double> pts;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    double v;
    if (ls >> v) pts.push_back(v);
  }
  if (pts.empty())
    throw Error(ErrorCode::InvalidArgument, "data file has no points: " + path);
  return make_dataset(std::move(pts));
}

void write_data_file(const Dataset& X, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::InvalidArgument, "cannot write data file: " + path);
  out.precision(17);
  for (double x : X.points) out << x << "\n";
}

DiscreteMixture read_mixture_json(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidArgument, "cannot open mixture file: " + path);
  json j;
  in >> j;
  if (!j.contains("weights") || !j.contains("locations"))
    throw Error(ErrorCode::InvalidArgument,
                "mixture JSON needs \"weights\" and \"locations\"");
  return make_mixture(j["weights"].get<std::vector<double>>(),
                      j["locations"].get<std::vector<double>>());
}

std::string mixture_to_json(const DiscreteMixture& m) {
  json j;
  j["weights"] = m.weights;
  j["locations"] = m.locations;
  return j.dump(2);
}

void write_mixture_json(const DiscreteMixture& m, const std::string& path) {
  write_text_file(mixture_to_json(m), path);
}

std::string certificate_to_json(const Certificate& cert,
                                const DiagnosticEstimates& diag,
                                const ShubSmaleReport& ss) {
  json j;
  j["status"] = cert.status == CertStatus::Proved ? "proved" : "inconclusive";
  if (!cert.failed_condition.empty())
    j["failed_condition"] = cert.failed_condition;
  j["w1_bound"] = cert.w1_bound ? json(*cert.w1_bound) : json(nullptr);
  j["support_count"] =
      cert.support_count_proved ? json(*cert.support_count_proved) : json(nullptr);
  j["parameter_distance_bound"] = cert.parameter_distance_bound
                                      ? json(*cert.parameter_distance_bound)
                                      : json(nullptr);
  j["delta"] = cert.delta;
  j["c1"] = cert.c1;
  j["c2"] = cert.c2;
  j["lambda"] = finite_or_null(cert.lambda);
  j["eta"] = cert.eta;
  json chain = json::object();
  for (const auto& [name, value] : cert.constant_chain)
    chain[name] = finite_or_null(value);
  j["constant_chain"] = chain;
  j["diagnostics"] = {{"A_hat", finite_or_null(diag.A_hat)},
                      {"B_hat", finite_or_null(diag.B_hat)},
                      {"a_hat", finite_or_null(diag.a_hat)}};
  j["shub_smale"] = {{"alpha", finite_or_null(ss.alpha)},
                     {"beta", finite_or_null(ss.beta)},
                     {"lipC", finite_or_null(ss.lipC)},
                     {"h", finite_or_null(ss.h)},
                     {"r", finite_or_null(ss.r)},
                     {"proved", ss.proved}};
  return j.dump(2);
}

std::string report_to_json(const SolveReport& report, bool with_timings) {
  json j = json::parse(certificate_to_json(report.certificate, report.diag,
                                           report.shub_smale));
  j["final"] = {{"weights", report.final.weights},
                {"locations", report.final.locations}};
  json log = json::array();
  for (const auto& r : report.refinement_log)
    log.push_back({{"epsilon", r.epsilon},
                   {"gap", finite_or_null(r.gap)},
                   {"status", r.cert_status}});
  j["refinement_log"] = log;
  j["newton"] = {{"residual_norms", report.newton_trace.residual_norms},
                 {"failed", report.newton_trace.failed},
                 {"failure_reason", report.newton_trace.failure_reason}};
  j["range_warning"] = report.range_warning;
  if (with_timings)
    j["timings"] = {{"solve_seconds", report.solve_seconds},
                    {"newton_seconds", report.newton_seconds}};
  return j.dump(2);
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::InvalidArgument, "cannot write file: " + path);
  out << text << "\n";
}

}  // namespace npmle
