#ifndef PGROWTH_COMMANDS_HPP
#define PGROWTH_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pgrowth::cli {

using Json = nlohmann::ordered_json;

/// Bad flags, bad config, or parameters outside an operation's domain.
/// Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Table, Json, Csv };

/// Outcome of one command: a summary object, per-item records with a
/// common key set, and a verdict.
struct Report {
  std::string command;
  Json params = Json::object();  // normalized parameters, defaults filled in
  Json summary = Json::object();
  std::vector<Json> items;
  bool passed = true;
  std::string witness;  // first failure, human readable
};

struct GroupStatsParams {
  int n = 2;
  std::uint32_t p = 5;
  template <class V> void fields(V&& v) {
    v("n", n);
    v("p", p);
  }
};

struct BruhatParams {
  int n = 2;
  std::uint32_t p = 5;
  std::vector<std::int64_t> element;  // row-major; empty = whole group
  template <class V> void fields(V&& v) {
    v("n", n);
    v("p", p);
    v("element", element);
  }
};

struct GrowthParams {
  int n = 2;
  std::uint32_t p = 7;
  std::string subgroup = "borel";  // borel | parabolic
  std::vector<int> J;               // parabolic only
  // random | coset-subset | coset-union | mixed | tightness | qr | rpgp
  std::string set = "random";
  std::uint64_t size = 0;           // 0 = random size per trial
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  int n_max = 10;                   // qr only
  template <class V> void fields(V&& v) {
    v("n", n);
    v("p", p);
    v("subgroup", subgroup);
    v("J", J);
    v("set", set);
    v("size", size);
    v("trials", trials);
    v("seed", seed);
    v("n_max", n_max);
  }
};

struct FourierParams {
  std::uint32_t p = 7;
  std::string check = "parseval";  // parseval | inverse | conv | rep | wiener | opnorm | coset-hit | borel-classes
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  template <class V> void fields(V&& v) {
    v("p", p);
    v("check", check);
    v("trials", trials);
    v("seed", seed);
  }
};

struct ZarembaParams {
  std::uint64_t p_min = 2;
  std::uint64_t p_max = 0;           // 0 = p_min
  std::string alphabet = "1..5";
  std::uint64_t multiple_limit = 0;  // 0 = p
  std::string strategy = "dfs";      // dfs | scan
  template <class V> void fields(V&& v) {
    v("p_min", p_min);
    v("p_max", p_max);
    v("alphabet", alphabet);
    v("multiple_limit", multiple_limit);
    v("strategy", strategy);
  }
};

struct DimensionParams {
  std::string alphabet = "1,2";
  std::vector<std::uint64_t> Q{100, 1000, 10000, 100000};
  template <class V> void fields(V&& v) {
    v("alphabet", alphabet);
    v("Q", Q);
  }
};

struct CfExpandParams {
  std::string check = "expand";  // expand | identities
  std::string a, q;              // decimal, arbitrary size
  std::string digits;            // "3,2"; used when a and q are empty
  // identities: round trip for q <= q_max, determinant sign for every
  // string of length <= length_max over {1..digit_max}, and enumerate_F
  // against Euclid at Q for {1,2} and {1..digit_max}.
  std::uint64_t q_max = 500;
  unsigned length_max = 12;
  std::uint32_t digit_max = 5;
  std::uint64_t Q = 100;
  template <class V> void fields(V&& v) {
    v("check", check);
    v("a", a);
    v("q", q);
    v("digits", digits);
    v("q_max", q_max);
    v("length_max", length_max);
    v("digit_max", digit_max);
    v("Q", Q);
  }
};

struct ModularSetParams {
  std::uint32_t p = 101;
  std::string alphabet = "1..5";
  std::uint64_t Q = 0;  // 0 = p - 1
  std::string parity = "even";
  unsigned k = 2;
  bool aba = false;
  template <class V> void fields(V&& v) {
    v("p", p);
    v("alphabet", alphabet);
    v("Q", Q);
    v("parity", parity);
    v("k", k);
    v("aba", aba);
  }
};

Report run_group_stats(const GroupStatsParams& params);
Report run_bruhat(const BruhatParams& params);
Report run_growth(const GrowthParams& params, unsigned jobs = 1);
Report run_fourier(const FourierParams& params, unsigned jobs = 1);
Report run_zaremba(const ZarembaParams& params, unsigned jobs = 1);
Report run_dimension(const DimensionParams& params, unsigned jobs = 1);
Report run_cf_expand(const CfExpandParams& params);
Report run_modular_set(const ModularSetParams& params, unsigned jobs = 1);

/// Runs `command` with parameters from a JSON object. Unknown keys and
/// type mismatches raise UsageError naming `where`.
Report run_command(const std::string& command, const Json& params, unsigned jobs,
                   const std::string& where = "params");

/// Loads and re-dumps `params` with every default filled in; validates
/// the same way run_command does.
Json normalize_params(const std::string& command, const Json& params,
                      const std::string& where = "params");

/// Commands accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// Batch configuration: {"version": 1, "seed": s, "description": "...",
/// "runs": [{"label": "...", "command": name, "params": {...}}, ...]}.
struct RunSpec {
  std::string label;  // optional
  std::string command;
  Json params = Json::object();
};

struct ExperimentConfig {
  int version = 1;
  std::uint64_t seed = 1;
  std::string description;
  std::vector<RunSpec> runs;
};

/// Strict parse; errors carry line/column or the offending field path.
ExperimentConfig parse_config(const std::string& text);

/// {"meta": {timestamp, build, jobs, elapsed_ms}, "payload": {...}}.
/// The payload depends only on the config.
Json run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

/// Rebuilds the config that produced a record (the batch reader).
ExperimentConfig config_from_record(const Json& record);

/// Whether every run in a record passed.
bool record_passed(const Json& record);

Json report_to_json(const Report& report);
void emit(const Report& report, Format format, std::ostream& out);

/// 0 when passed, 1 otherwise.
int exit_code(const Report& report);

std::string build_id();

}  // namespace pgrowth::cli

#endif  // PGROWTH_COMMANDS_HPP
