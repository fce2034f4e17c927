// pgrowth: command-line driver for the growth, Fourier and continued
// fraction experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pgrowth/commands.hpp"
#include "pgrowth/fourier.hpp"
#include "pgrowth/group.hpp"

namespace fs = std::filesystem;
using namespace pgrowth;
using namespace pgrowth::cli;

namespace {

struct Globals {
  unsigned jobs = 1;
  std::string out;
  bool json = false, csv = false;
  Format format() const { return json ? Format::Json : csv ? Format::Csv : Format::Table; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int finish(const Report& report, const Globals& g) {
  if (g.out.empty()) {
    emit(report, g.format(), std::cout);
  } else {
    std::ofstream f(g.out);
    if (!f) throw UsageError("cannot write " + g.out);
    emit(report, g.format(), f);
  }
  if (!report.passed) std::cerr << "FAIL: " << report.witness << '\n';
  return exit_code(report);
}

fs::path record_path(const Globals& g, const std::string& config_path, const Json& record) {
  if (!g.out.empty()) return g.out;
  const char* dir = std::getenv("PGROWTH_OUT_DIR");
  if (!dir || !*dir) return {};
  const std::string stem = config_path.empty() ? "record" : fs::path(config_path).stem().string();
  const std::string digest = record["meta"]["payload_digest"].get<std::string>();
  return fs::path(dir) / (stem + "-" + digest + ".json");
}

int run_batch(const Globals& g, const std::string& config_path, const std::string& from_record,
              std::optional<std::uint64_t> seed) {
  if (config_path.empty() == from_record.empty())
    throw UsageError("experiment needs exactly one of CONFIG or --from-record");
  ExperimentConfig cfg;
  if (!from_record.empty()) {
    Json rec;
    try {
      rec = Json::parse(read_file(from_record));
    } catch (const Json::parse_error& e) {
      throw UsageError(std::string("record: ") + e.what());
    }
    cfg = config_from_record(rec);
  } else {
    cfg = parse_config(read_file(config_path));
  }
  if (seed) cfg.seed = *seed;

  const auto record = run_experiment(cfg, g.jobs);
  const auto path = record_path(g, config_path.empty() ? from_record : config_path, record);
  if (path.empty()) {
    std::cout << record.dump(2) << '\n';
  } else {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path.string());
    f << record.dump(2) << '\n';
    for (std::size_t i = 0; i < record["payload"]["runs"].size(); ++i) {
      const auto& run = record["payload"]["runs"][i];
      const auto& t = record["meta"]["runs"][i];
      if (g.json) {
        std::cout << Json{{"label", run.value("label", "")}, {"command", run["command"]},
                          {"passed", run["passed"]}, {"elapsed_ms", t["elapsed_ms"]}}
                         .dump()
                  << '\n';
      } else {
        std::cout << (run["passed"].get<bool>() ? "PASS " : "FAIL ") << run["command"].get<std::string>()
                  << ' ' << run.value("label", "") << " (" << t["elapsed_ms"] << " ms)\n";
      }
    }
    const auto& tallies = record["payload"]["tallies"];
    if (g.json) std::cout << Json{{"record", path.string()}, {"tallies", tallies}}.dump() << '\n';
    else std::cout << "record: " << path.string() << "\n" << tallies["passed"] << "/" << tallies["runs"] << " runs passed\n";
  }
  for (const auto& run : record["payload"]["runs"])
    if (!run["passed"].get<bool>())
      std::cerr << "FAIL: " << run["command"].get<std::string>() << ' ' << run.value("label", "") << ": "
                << run.value("witness", "") << '\n';
  return record_passed(record) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite verification of growth, Fourier and continued fraction statements"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--jobs", g.jobs, "worker threads (does not change results)")->check(CLI::Range(1u, 256u));
  app.add_option("--out", g.out, "write output (or the experiment record) to PATH");
  auto* json_flag = app.add_flag("--json", g.json, "JSON lines: one item per line, then a summary object");
  app.add_flag("--csv", g.csv, "CSV of the items")->excludes(json_flag);

  GroupStatsParams gs;
  auto* c_gs = app.add_subcommand("group-stats", "orders, subgroup sizes and Bruhat census of SL_n(F_p)");
  c_gs->add_option("-n", gs.n, "matrix size")->capture_default_str();
  c_gs->add_option("-p", gs.p, "prime")->capture_default_str();

  BruhatParams br;
  auto* c_br = app.add_subcommand("bruhat", "Bruhat decomposition of one element or of the whole group");
  c_br->add_option("-n", br.n, "matrix size")->capture_default_str();
  c_br->add_option("-p", br.p, "prime")->capture_default_str();
  c_br->add_option("--element", br.element, "row-major entries, e.g. 0,1,4,1")->delimiter(',');

  GrowthParams gr;
  bool tightness = false, qr = false, rpgp = false;
  auto* c_gr = app.add_subcommand("growth-verify", "growth of A against a parabolic subgroup");
  c_gr->add_option("-n", gr.n, "matrix size")->capture_default_str();
  c_gr->add_option("-p", gr.p, "prime")->capture_default_str();
  c_gr->add_option("--subgroup", gr.subgroup, "borel | parabolic")->capture_default_str();
  c_gr->add_option("--J", gr.J, "reflections of the parabolic, e.g. 1")->delimiter(',');
  c_gr->add_option("--set", gr.set, "random | coset-subset | coset-union | mixed | tightness | qr | rpgp")
      ->capture_default_str();
  c_gr->add_option("--size", gr.size, "|A| for random sets (0 = random)")->capture_default_str();
  c_gr->add_option("--trials", gr.trials)->capture_default_str();
  c_gr->add_option("--seed", gr.seed)->capture_default_str();
  c_gr->add_option("--n-max", gr.n_max, "largest power for the quadratic residue example")->capture_default_str();
  auto* f_t = c_gr->add_flag("--tightness", tightness, "same as --set tightness");
  auto* f_q = c_gr->add_flag("--qr-example", qr, "same as --set qr");
  auto* f_r = c_gr->add_flag("--rpgp", rpgp, "same as --set rpgp");
  f_t->excludes(f_q)->excludes(f_r);
  f_q->excludes(f_r);

  FourierParams fo;
  auto* c_fo = app.add_subcommand("fourier-check", "Fourier identities on Aff(F_p)");
  c_fo->alias("fourier");
  c_fo->add_option("-p", fo.p, "odd prime")->capture_default_str();
  c_fo->add_option("--check", fo.check, "parseval | inverse | conv | rep | wiener | opnorm | coset-hit | borel-classes")
      ->capture_default_str();
  c_fo->add_option("--trials", fo.trials)->capture_default_str();
  c_fo->add_option("--seed", fo.seed)->capture_default_str();

  ZarembaParams za;
  std::optional<std::uint64_t> za_p;
  auto* c_za = app.add_subcommand("zaremba", "smallest multiple q of p with an admissible a/q");
  c_za->add_option("-p", za_p, "single prime (sets --p-min and --p-max)");
  c_za->add_option("--p-min", za.p_min)->capture_default_str();
  c_za->add_option("--p-max", za.p_max, "0 = p-min")->capture_default_str();
  c_za->add_option("--alphabet", za.alphabet, "e.g. 1..5 or 1,2")->capture_default_str();
  c_za->add_option("--multiple-limit", za.multiple_limit, "largest q/p (0 = p)")->capture_default_str();
  c_za->add_option("--strategy", za.strategy, "dfs | scan")->capture_default_str();

  DimensionParams di;
  auto* c_di = app.add_subcommand("dimension", "slope of log |F_A(Q)| against log Q");
  c_di->add_option("--alphabet", di.alphabet)->capture_default_str();
  c_di->add_option("--Q", di.Q, "increasing list, e.g. 100,1000,10000")->delimiter(',')->capture_default_str();

  CfExpandParams cf;
  auto* c_cf = app.add_subcommand("cf-expand", "continued fraction of a/q, or the identity sweep");
  c_cf->add_option("a", cf.a, "numerator");
  c_cf->add_option("q", cf.q, "denominator");
  c_cf->add_option("--digits", cf.digits, "partial quotients, e.g. 3,2");
  c_cf->add_option("--check", cf.check, "expand | identities")->capture_default_str();
  c_cf->add_option("--q-max", cf.q_max)->capture_default_str();
  c_cf->add_option("--length-max", cf.length_max)->capture_default_str();
  c_cf->add_option("--digit-max", cf.digit_max)->capture_default_str();
  c_cf->add_option("--Q", cf.Q)->capture_default_str();

  ModularSetParams ms;
  auto* c_ms = app.add_subcommand("modular-set", "continuant matrices mod p and their sigma and energy bounds");
  c_ms->add_option("-p", ms.p, "prime")->capture_default_str();
  c_ms->add_option("--alphabet", ms.alphabet)->capture_default_str();
  c_ms->add_option("--Q", ms.Q, "0 = p-1")->capture_default_str();
  c_ms->add_option("--parity", ms.parity, "even | odd | both")->capture_default_str();
  c_ms->add_option("-k", ms.k, "Lambda uses floor((p-1)^(1/k))")->capture_default_str();
  c_ms->add_flag("--aba", ms.aba, "also compute |ABA| (slow for p > 100)");

  std::string config_path, from_record;
  std::optional<std::uint64_t> batch_seed;
  auto* c_ex = app.add_subcommand("experiment", "run a JSON config and persist the record");
  c_ex->add_option("config", config_path, "config file");
  c_ex->add_option("--from-record", from_record, "re-run the config stored in a record");
  c_ex->add_option("--seed", batch_seed, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_gs) return finish(run_group_stats(gs), g);
    if (*c_br) return finish(run_bruhat(br), g);
    if (*c_gr) {
      if (tightness) gr.set = "tightness";
      if (qr) gr.set = "qr";
      if (rpgp) gr.set = "rpgp";
      return finish(run_growth(gr, g.jobs), g);
    }
    if (*c_fo) return finish(run_fourier(fo, g.jobs), g);
    if (*c_za) {
      if (za_p) za.p_min = za.p_max = *za_p;
      return finish(run_zaremba(za, g.jobs), g);
    }
    if (*c_di) return finish(run_dimension(di, g.jobs), g);
    if (*c_cf) return finish(run_cf_expand(cf), g);
    if (*c_ms) return finish(run_modular_set(ms, g.jobs), g);
    if (*c_ex) return run_batch(g, config_path, from_record, batch_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::overflow_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "FAIL: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
