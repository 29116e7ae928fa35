// npmle: certified 1-D Gaussian-mixture NPMLE solver.
//
// Exit codes: 0 = certificate proved, 2 = inconclusive / refinement
// exhausted, 1 = usage or I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "npmle/io.hpp"

namespace {

using namespace npmle;

int exit_code_for(const Certificate& cert) {
  return cert.status == CertStatus::Proved ? 0 : 2;
}

void print_report_summary(const SolveReport& rep) {
  const auto& c = rep.certificate;
  std::cout << "status: "
            << (c.status == CertStatus::Proved ? "proved" : "inconclusive")
            << "\n";
  if (c.status == CertStatus::Proved) {
    std::cout << "atoms: " << rep.final.atom_count() << "\n";
    if (c.w1_bound) std::cout << "w1_bound: " << *c.w1_bound << "\n";
    if (c.support_count_proved)
      std::cout << "support_count: " << *c.support_count_proved << "\n";
  } else if (!c.failed_condition.empty()) {
    std::cout << "failed_condition: " << c.failed_condition << "\n";
  }
}

int cmd_solve(const std::string& input, double eps, int max_refine,
              const std::string& out, const std::string& static_support) {
  Dataset X = read_data_file(input);
  if (!static_support.empty()) {
    DiscreteMixture s = read_mixture_json(static_support);
    SolveReport rep = solve_static(X, s.locations);
    if (!out.empty()) write_text_file(report_to_json(rep), out);
    print_report_summary(rep);
    return exit_code_for(rep.certificate);
  }
  SolveConfig cfg;
  cfg.epsilon = eps;
  cfg.max_refinements = max_refine;
  try {
    SolveReport rep = solve_npmle(X, cfg);
    if (rep.range_warning)
      std::cerr << "warning: n < L^4; the sample-size assumption behind the "
                   "landscape results is not met (certificates are still "
                   "checked)\n";
    if (!out.empty()) write_text_file(report_to_json(rep), out);
    print_report_summary(rep);
    return exit_code_for(rep.certificate);
  } catch (const RefinementExhaustedError& e) {
    if (!out.empty()) write_text_file(report_to_json(e.last_report()), out);
    std::cout << "status: refinement exhausted\n";
    print_report_summary(e.last_report());
    return 2;
  }
}

int cmd_certify(const std::string& input, const std::string& candidate,
                const std::string& out) {
  Dataset X = read_data_file(input);
  DiscreteMixture m = read_mixture_json(candidate);
  Certificate cert = certify_w1(m, X);
  DiagnosticEstimates diag = diagnostics(m, X);
  ShubSmaleReport ss = shub_smale_check(m, X);
  if (cert.status == CertStatus::Proved && cert.w1_bound) {
    bool lower = certify_support_lower(m, *cert.w1_bound);
    bool upper = false;
    for (double c : {0.15, 0.25, 0.4, 0.6, 0.9, 1.3}) {
      if (c >= m.min_gap() / 2.2) break;
      if (certify_support_upper(m, X, *cert.w1_bound, c, &cert.constant_chain)) {
        upper = true;
        break;
      }
    }
    if (m.atom_count() == 1 &&
        certify_support_upper(m, X, *cert.w1_bound,
                              std::min(1.0, X.range_bound / 2),
                              &cert.constant_chain))
      upper = true;
    if (lower && upper) {
      cert.support_count_proved = m.atom_count();
      double d = separation_stats(m).delta;
      cert.parameter_distance_bound =
          std::isinf(d) ? 0.0 : 12.0 * (*cert.w1_bound) / d;
    }
  }
  std::string doc = certificate_to_json(cert, diag, ss);
  if (!out.empty())
    write_text_file(doc, out);
  else
    std::cout << doc << "\n";
  if (cert.status == CertStatus::Proved && !out.empty())
    std::cout << "status: proved\n";
  return exit_code_for(cert);
}

int cmd_em(const std::string& input, const std::string& start, bool newton) {
  Dataset X = read_data_file(input);
  DiscreteMixture m0 = read_mixture_json(start);
  if (newton) {
    NewtonTrace tr = newton_solve(m0, X, 1e-11, 200);
    std::cout << "iterations: " << tr.residual_norms.size() - 1 << "\n";
    std::cout << "final_residual: " << tr.residual_norms.back() << "\n";
    if (tr.failed) std::cout << "failed: " << tr.failure_reason << "\n";
    std::cout << mixture_to_json(tr.final()) << "\n";
    return tr.failed ? 2 : 0;
  }
  EmTrace tr = em_solve(m0, X, 1e-12, 10000);
  std::cout << "iterations: " << tr.iterates.size() - 1 << "\n";
  std::cout << "log_likelihood: " << tr.log_likelihoods.back() << "\n";
  std::cout << mixture_to_json(tr.iterates.back()) << "\n";
  return 0;
}

int cmd_harness(const std::string& spec, int n, int trials,
                const std::string& out) {
  HarnessSummary sum = genericity_harness(trials, spec, n);
  std::string csv = "seed,n,L,certified,k,min_gap,A_hat,B_hat,w1_bound\n";
  char line[256];
  for (const auto& r : sum.rows) {
    std::snprintf(line, sizeof(line), "%llu,%d,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.seed), r.n, r.L,
                  r.certified ? 1 : 0, r.k, r.min_gap, r.A_hat, r.B_hat,
                  r.w1_bound);
    csv += line;
  }
  if (!out.empty())
    write_text_file(csv, out);
  else
    std::cout << csv;
  std::cout << "all_certified: " << (sum.all_certified ? "yes" : "no") << "\n"
            << "C_report (max k/L^2): " << sum.C_report << "\n";
  return sum.all_certified ? 0 : 2;
}

int cmd_sample(const std::string& spec, int clustered_k, int n,
               std::uint64_t seed, const std::string& out) {
  Dataset X = clustered_k > 0
                  ? sample_clustered(clustered_k, n, 0.1, seed)
                  : sample_iid(spec, n, seed);
  if (!out.empty())
    write_data_file(X, out);
  else
    for (double x : X.points) std::cout << x << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified NPMLE for 1-D Gaussian location mixtures"};
  app.require_subcommand(1);

  std::string input, out, candidate, start, static_support, spec;
  double eps = 0.1;
  int max_refine = 12, n = 50, trials = 20, clustered_k = 0;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "solve and certify the NPMLE");
  solve->add_option("--input", input, "data file")->required();
  solve->add_option("--epsilon", eps, "initial grid spacing");
  solve->add_option("--max-refine", max_refine, "refinement rounds");
  solve->add_option("--out", out, "certificate/report JSON output");
  solve->add_option("--static-support", static_support,
                    "mixture JSON whose locations fix the support");

  auto* certify = app.add_subcommand("certify", "certify a given candidate");
  certify->add_option("--input", input, "data file")->required();
  certify->add_option("--candidate", candidate, "candidate mixture JSON")->required();
  certify->add_option("--out", out, "certificate JSON output");

  auto* em = app.add_subcommand("em", "EM iteration from a start point");
  em->add_option("--input", input, "data file")->required();
  em->add_option("--start", start, "start mixture JSON")->required();

  auto* newton = app.add_subcommand("newton", "Newton iteration from a start point");
  newton->add_option("--input", input, "data file")->required();
  newton->add_option("--start", start, "start mixture JSON")->required();

  auto* harness = app.add_subcommand("harness", "Monte-Carlo genericity checks");
  harness->add_option("--spec", spec, "distribution descriptor")->required();
  harness->add_option("--n", n, "sample size per trial");
  harness->add_option("--trials", trials, "number of trials");
  harness->add_option("--out", out, "CSV output");

  auto* sample = app.add_subcommand("sample", "generate a dataset");
  sample->add_option("--spec", spec, "distribution descriptor");
  sample->add_option("--clustered", clustered_k, "clustered fixture with K clusters");
  sample->add_option("--n", n, "points (per cluster when --clustered)");
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--out", out, "data file output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(input, eps, max_refine, out, static_support);
    if (certify->parsed()) return cmd_certify(input, candidate, out);
    if (em->parsed()) return cmd_em(input, start, false);
    if (newton->parsed()) return cmd_em(input, start, true);
    if (harness->parsed()) return cmd_harness(spec, n, trials, out);
    if (sample->parsed()) {
      if (spec.empty() && clustered_k <= 0) {
        std::cerr << "sample: need --spec or --clustered\n";
        return 1;
      }
      return cmd_sample(spec, clustered_k, n, seed, out);
    }
  } catch (const npmle::Error& e) {
    std::cerr << "error (" << npmle::error_code_name(e.code()) << "): "
              << e.what() << "\n";
    return e.code() == npmle::ErrorCode::RefinementExhausted ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
