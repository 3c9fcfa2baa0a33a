// Command line front end: generate instances, certify or estimate metric
// bounds, preprocess summaries, answer queries, validate an oracle against
// exact runs, and benchmark parameter sweeps.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdo/gen.hpp"
#include "tdo/instance.hpp"
#include "tdo/query.hpp"
#include "tdo/summaries.hpp"
#include "tdo/toolkit.hpp"
#include "tdo/util.hpp"

namespace {

tdo::TdInstance load_instance(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return tdo::TdInstance::load(in);
}

tdo::Oracle load_oracle_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle file '" + path + "'");
  return tdo::load_oracle(in);
}

// "-" or empty selects stdout
struct OutFile {
  std::ofstream file;
  std::ostream *os = &std::cout;

  explicit OutFile(const std::string &path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    os = &file;
  }
};

tdo::MetricParams metric_for(const tdo::TdInstance &g, bool certified,
                             double epsilon, int samples,
                             std::uint64_t seed) {
  if (certified) return tdo::certify_metric_params(g, epsilon);
  tdo::MetricParams mp = tdo::estimate_metric_params(g, samples, seed);
  mp.epsilon = epsilon;
  return mp;
}

void print_metric(std::ostream &os, const tdo::MetricParams &mp) {
  os << (mp.certified ? "certified" : "estimated")
     << " lambda_max=" << tdo::format_double(mp.lambda_max)
     << " lambda_min=" << tdo::format_double(mp.lambda_min)
     << " zeta=" << tdo::format_double(mp.zeta)
     << " epsilon=" << tdo::format_double(mp.epsilon)
     << " psi=" << tdo::format_double(mp.psi()) << "\n";
}

int run(int argc, char **argv) {
  CLI::App app{"time-dependent distance oracle toolkit"};
  app.require_subcommand(1);

  // gen
  auto *gen = app.add_subcommand("gen", "generate a periodic instance");
  tdo::GenSpec spec;
  std::string topology = "sparse", profile = "constant", gen_out;
  gen->add_option("--n", spec.n, "vertex count");
  gen->add_option("--topology", topology)
      ->check(CLI::IsMember({"grid", "sparse"}));
  gen->add_option("--arc-factor", spec.arc_factor,
                  "arcs per vertex for the sparse topology");
  gen->add_option("--profile", profile)
      ->check(CLI::IsMember({"constant", "bell", "mixed"}));
  gen->add_option("--spoilers", spec.spoilers,
                  "concavity breaks for the mixed profile");
  gen->add_option("--slope-cap", spec.slope_cap, "max upward delay slope");
  gen->add_option("--period", spec.period);
  gen->add_option("--base-min", spec.base_min);
  gen->add_option("--base-max", spec.base_max);
  gen->add_option("--seed", spec.seed);
  gen->add_option("--out", gen_out, "instance file, '-' for stdout");

  // estimate
  auto *est = app.add_subcommand("estimate", "metric bounds of an instance");
  std::string est_in;
  double est_eps = 0.1;
  int est_samples = 32;
  std::uint64_t est_seed = 0;
  bool est_certified = false;
  est->add_option("--in", est_in)->required();
  est->add_option("--epsilon", est_eps, "target accuracy stored with the bounds");
  est->add_option("--samples", est_samples, "sampled sources when estimating");
  est->add_option("--seed", est_seed);
  est->add_flag("--certified", est_certified,
                "prove the bounds instead of sampling them");

  // preprocess
  auto *pre = app.add_subcommand("preprocess", "build and save an oracle");
  std::string pre_in, pre_out;
  tdo::OracleConfig ocfg;
  pre->add_option("--in", pre_in)->required();
  pre->add_option("--epsilon", ocfg.epsilon);
  pre->add_option("--rho", ocfg.rho, "landmark sampling rate");
  pre->add_option("--seed", ocfg.seed);
  pre->add_option("--threads", ocfg.threads);
  pre->add_option("--max-depth", ocfg.max_depth);
  pre->add_flag("--keep-samples", ocfg.keep_samples,
                "retain per-vertex sample diagnostics in the artifact");
  pre->add_option("--out", pre_out, "oracle file, '-' for stdout");

  // query
  auto *qry = app.add_subcommand("query", "answer travel-time queries");
  std::string qry_in, qry_oracle, qry_batch, qry_out;
  int qo = 0, qd = 0, qbudget = 0;
  double qt0 = 0;
  bool qpaths = false;
  qry->add_option("--in", qry_in)->required();
  qry->add_option("--oracle", qry_oracle)->required();
  qry->add_option("--batch", qry_batch,
                  "file of 'origin destination time' lines, '-' for stdin");
  auto *oopt = qry->add_option("--origin", qo);
  auto *dopt = qry->add_option("--destination", qd);
  auto *topt = qry->add_option("--t0", qt0);
  qry->add_option("--budget", qbudget, "recursion budget");
  qry->add_flag("--paths", qpaths, "append reconstructed paths");
  qry->add_option("--out", qry_out, "answer file, '-' for stdout");

  // validate
  auto *val = app.add_subcommand("validate", "check an oracle against exact runs");
  std::string val_in, val_oracle;
  tdo::ValidateConfig vcfg;
  int val_samples = 32;
  bool val_certified = false;
  val->add_option("--in", val_in)->required();
  val->add_option("--oracle", val_oracle)->required();
  val->add_option("--queries", vcfg.queries);
  val->add_option("--times", vcfg.times_per_landmark,
                  "random probe times per landmark");
  val->add_option("--budget", vcfg.budget);
  val->add_option("--reconstructions", vcfg.reconstructions);
  val->add_option("--breakpoint-probes", vcfg.breakpoint_probes_per_landmark,
                  "stored-time probes per landmark");
  val->add_option("--seed", vcfg.seed);
  val->add_option("--samples", val_samples, "sampled sources when estimating");
  val->add_flag("--certified", val_certified,
                "prove the metric bounds instead of sampling them");

  // bench
  auto *ben = app.add_subcommand("bench", "sweep rho x epsilon x budget");
  std::string ben_in, ben_format = "table", ben_out;
  tdo::BenchConfig bcfg;
  int ben_samples = 32;
  bool ben_certified = false;
  ben->add_option("--in", ben_in)->required();
  ben->add_option("--rho", bcfg.rhos, "landmark rates (repeatable)");
  ben->add_option("--epsilon", bcfg.epsilons, "accuracies (repeatable)");
  ben->add_option("--budget", bcfg.budgets, "recursion budgets (repeatable)");
  ben->add_option("--queries", bcfg.queries);
  ben->add_option("--seed", bcfg.seed);
  ben->add_option("--threads", bcfg.threads);
  ben->add_option("--format", ben_format)
      ->check(CLI::IsMember({"csv", "table", "both"}));
  ben->add_option("--samples", ben_samples, "sampled sources when estimating");
  ben->add_flag("--certified", ben_certified,
                "prove the metric bounds instead of sampling them");
  ben->add_option("--out", ben_out, "report file, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    spec.topology = topology == "grid" ? tdo::Topology::grid
                                       : tdo::Topology::random_sparse;
    spec.profile = profile == "constant" ? tdo::DelayProfile::constant
                  : profile == "bell"    ? tdo::DelayProfile::concave_bell
                                         : tdo::DelayProfile::mixed;
    const tdo::TdInstance g = tdo::generate(spec);
    OutFile out(gen_out);
    g.save(*out.os);
    std::cerr << "n=" << g.n() << " m=" << g.m()
              << " breakpoints=" << g.total_breakpoints()
              << " spoilers=" << g.total_spoilers() << "\n";
    return 0;
  }

  if (est->parsed()) {
    const tdo::TdInstance g = load_instance(est_in);
    print_metric(std::cout,
                 metric_for(g, est_certified, est_eps, est_samples, est_seed));
    return 0;
  }

  if (pre->parsed()) {
    const tdo::TdInstance g = load_instance(pre_in);
    const auto t0 = std::chrono::steady_clock::now();
    const tdo::Oracle o = tdo::build_oracle(g, ocfg);
    const auto t1 = std::chrono::steady_clock::now();
    OutFile out(pre_out);
    tdo::save_oracle(*out.os, o);
    std::cerr << "landmarks=" << o.summaries.size()
              << " points=" << o.total_points()
              << " probes=" << o.total_probes()
              << " midpoints=" << o.total_midpoints()
              << " capped=" << o.total_capped()
              << " violations=" << o.total_violations() << " seconds="
              << std::chrono::duration<double>(t1 - t0).count() << "\n";
    return 0;
  }

  if (qry->parsed()) {
    const tdo::TdInstance g = load_instance(qry_in);
    const tdo::Oracle o = load_oracle_file(qry_oracle);
    std::vector<tdo::QueryRequest> requests;
    if (!qry_batch.empty()) {
      if (qry_batch == "-") {
        requests = tdo::read_query_batch(std::cin);
      } else {
        std::ifstream in(qry_batch);
        if (!in)
          throw std::runtime_error("cannot open batch file '" + qry_batch + "'");
        requests = tdo::read_query_batch(in);
      }
    } else {
      if (!*oopt || !*dopt || !*topt)
        throw CLI::ValidationError(
            "query", "need --batch or all of --origin --destination --t0");
      requests.push_back({qo, qd, qt0});
    }
    OutFile out(qry_out);
    tdo::BallWorkspace ws;
    for (const tdo::QueryRequest &r : requests) {
      const tdo::QueryAnswer a =
          tdo::rqa(g, o, r.origin, r.destination, r.t0, qbudget, ws);
      if (qpaths) {
        const tdo::PathResult p = tdo::reconstruct_path(g, o, a, ws);
        tdo::write_answer_line(*out.os, a, &p);
      } else {
        tdo::write_answer_line(*out.os, a, nullptr);
      }
    }
    return 0;
  }

  if (val->parsed()) {
    const tdo::TdInstance g = load_instance(val_in);
    const tdo::Oracle o = load_oracle_file(val_oracle);
    vcfg.metric = metric_for(g, val_certified, o.config.epsilon, val_samples,
                             vcfg.seed);
    const tdo::ValidateReport report = tdo::validate(g, o, vcfg);
    for (const tdo::ValidateCheck &c : report.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                << " worst=" << tdo::format_double(c.worst)
                << " limit=" << tdo::format_double(c.limit)
                << " samples=" << c.samples;
      if (!c.witness.empty()) std::cout << "  [" << c.witness << "]";
      std::cout << "\n";
    }
    std::cout << (report.pass ? "PASS" : "FAIL") << " overall\n";
    return report.pass ? 0 : 1;
  }

  if (ben->parsed()) {
    const tdo::TdInstance g = load_instance(ben_in);
    bcfg.metric = metric_for(g, ben_certified, 0.0, ben_samples, bcfg.seed);
    const tdo::BenchReport report = tdo::bench(g, bcfg);
    OutFile out(ben_out);
    if (ben_format != "csv") *out.os << tdo::bench_table(report);
    if (ben_format != "table") *out.os << tdo::bench_csv(report);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
