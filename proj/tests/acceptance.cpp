// Runs configs/acceptance.json and prints one PASS/FAIL line per
// acceptance criterion, with the time spent against its budget.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "pgrowth/commands.hpp"

using pgrowth::cli::Json;
using Runs = std::vector<const Json*>;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // 0 = no runtime budget
  std::function<bool(const Runs&, std::string&)> check;
};

const Json& S(const Json* run) { return (*run)["summary"]; }
const Json& P(const Json* run) { return (*run)["params"]; }

bool all_passed(const Runs& runs, std::string& note) {
  for (const auto* r : runs) {
    if (!(*r)["passed"].get<bool>()) {
      note = (*r)["label"].get<std::string>() + ": " + r->value("witness", "");
      return false;
    }
  }
  return !runs.empty();
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> c;
  c.push_back({1, "group orders match the parabolic formula", 10, [](const Runs& runs, std::string& note) {
                 std::set<std::pair<int, int>> want{{2, 3}, {2, 5}, {2, 7}, {2, 11}, {3, 2}, {3, 3}};
                 bool ok = all_passed(runs, note);
                 for (const auto* r : runs) {
                   const int n = S(r)["n"], p = S(r)["p"];
                   ok = ok && S(r)["order"] == S(r)["order_formula"];
                   want.erase({n, p});
                   if (n == 3 && p == 2) {
                     ok = ok && S(r)["order"] == 168;
                     note = "|SL_3(F_2)| = " + S(r)["order"].dump();
                   }
                 }
                 return ok && want.empty();
               }});
  c.push_back({2, "Bruhat decomposition unique, census and inclusions", 60, [](const Runs& runs, std::string& note) {
                 std::set<std::pair<int, int>> want{{2, 5}, {2, 7}, {3, 3}, {3, 2}};
                 bool ok = all_passed(runs, note);
                 std::uint64_t elements = 0;
                 for (const auto* r : runs) {
                   ok = ok && S(r)["unique"].get<bool>() && S(r)["roundtrip_failures"] == 0 &&
                        S(r)["inclusion_failures"] == 0;
                   elements += S(r)["elements"].get<std::uint64_t>();
                   want.erase({S(r)["n"].get<int>(), S(r)["p"].get<int>()});
                 }
                 if (ok) note = std::to_string(elements) + " elements decomposed";
                 return ok && want.empty();
               }});
  c.push_back({3, "max r_PgP: |B|/q in SL_2, <= 2|P|/q in SL_3(F_3)", 120, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::set<int> sl2{5, 7, 11};
                 int sl3 = 0;
                 for (const auto* r : runs) {
                   note += S(r)["subgroup"].get<std::string>() + " p=" + S(r)["p"].dump() + " max_r=" +
                           S(r)["max_r"].dump() + " |P|=" + S(r)["size_p"].dump() + "; ";
                   if (S(r)["n"] == 2) {
                     ok = ok && S(r)["sharp"].get<bool>() && S(r)["max_r"] == S(r)["p_over_q"];
                     sl2.erase(S(r)["p"].get<int>());
                   } else {
                     ok = ok && S(r)["max_r"].get<std::uint64_t>() * 3 <= 2 * S(r)["size_p"].get<std::uint64_t>();
                     sl3 += S(r)["p"] == 3;
                   }
                 }
                 return ok && sl2.empty() && sl3 == 2;
               }});
  c.push_back({4, "growth alternatives: random and adversarial sets", 0, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::map<int, std::uint64_t> random;
                 std::set<std::string> fixtures;
                 std::set<int> tight;
                 std::uint64_t total = 0;
                 for (const auto* r : runs) {
                   const std::string set = P(r)["set"];
                   const int p = P(r)["p"];
                   if (set == "tightness") {
                     ok = ok && S(r)["size_a"] == S(r)["expected_size"] && S(r)["ap_equals_a"].get<bool>() &&
                          S(r)["pa_equals_a"].get<bool>();
                     tight.insert(p);
                     continue;
                   }
                   ok = ok && S(r)["failures"] == 0;
                   total += S(r)["trials"].get<std::uint64_t>();
                   if (set == "random") random[p] += S(r)["trials"].get<std::uint64_t>();
                   else fixtures.insert(set);
                 }
                 ok = ok && random[7] + random[11] >= 1000 && random[7] > 0 && random[11] > 0;
                 ok = ok && fixtures.count("coset-subset") && fixtures.count("coset-union") && tight.size() == 2;
                 if (ok) note = std::to_string(total) + " sets, 0 violations; tightness |A| = |B|(1+q), AP = PA = A";
                 return ok;
               }});
  c.push_back({5, "Fourier suite on Aff(F_p)", 60, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::map<std::pair<int, std::string>, std::uint64_t> trials;
                 std::uint64_t fired = 0;
                 for (const auto* r : runs) {
                   ok = ok && S(r)["failures"] == 0;
                   trials[{P(r)["p"].get<int>(), P(r)["check"].get<std::string>()}] += S(r)["trials"].get<std::uint64_t>();
                   if (P(r)["check"] == "coset-hit") fired += S(r)["condition_fired"].get<std::uint64_t>();
                 }
                 for (int p : {5, 7, 11, 13}) {
                   for (const char* chk : {"parseval", "inverse", "conv", "opnorm"}) ok = ok && trials[{p, chk}] >= 100;
                   ok = ok && trials[{p, "wiener"}] > 0 && trials[{p, "coset-hit"}] >= 500;
                 }
                 if (ok) note = "coset hit condition fired in " + std::to_string(fired) + " trials, never violated";
                 return ok;
               }});
  c.push_back({6, "Borel class count p+3 and dimension identity", 10, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::set<int> want{5, 7, 11, 13};
                 for (const auto* r : runs) {
                   ok = ok && S(r)["classes"] == S(r)["p"].get<int>() + 3 && S(r)["dimension_identity"].get<bool>();
                   note += "p=" + S(r)["p"].dump() + ":" + S(r)["classes"].dump() + " ";
                   want.erase(S(r)["p"].get<int>());
                 }
                 return ok && want.empty();
               }});
  c.push_back({7, "continued fraction identities and enumeration", 10, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 for (const auto* r : runs) {
                   ok = ok && P(r)["check"] == "identities" && P(r)["q_max"].get<int>() >= 500 &&
                        P(r)["length_max"].get<int>() >= 12 && P(r)["digit_max"].get<int>() >= 5 &&
                        P(r)["Q"].get<int>() >= 100;
                   std::uint64_t cases = 0;
                   for (const auto& it : (*r)["items"]) {
                     ok = ok && it["ok"].get<bool>();
                     cases += it["cases"].get<std::uint64_t>();
                   }
                   if (ok) note = std::to_string(cases) + " cases";
                 }
                 return ok;
               }});
  c.push_back({8, "dimension slope for {1,2}", 120, [](const Runs& runs, std::string& note) {
                 bool ok = !runs.empty();
                 for (const auto* r : runs) {
                   const double slope = S(r)["slope"];
                   ok = ok && P(r)["alphabet"] == "1,2" && P(r)["Q"].back().get<std::uint64_t>() >= 100000 &&
                        slope >= 1.0126 && slope <= 1.1126;
                   std::ostringstream os;
                   os << "slope " << slope << " in [1.0126, 1.1126], target 1.06256";
                   note = os.str();
                 }
                 return ok;
               }});
  c.push_back({9, "modular Zaremba: no misses", 300, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 bool big = false, small = false;
                 std::ostringstream os;
                 for (const auto* r : runs) {
                   ok = ok && S(r)["misses"] == 0 && S(r)["invalid"] == 0 && S(r)["max_exponent"].get<double>() <= 2.0;
                   const auto alpha = S(r)["alphabet"].get<std::string>();
                   const auto pmax = S(r)["p_max"].get<std::uint64_t>();
                   big = big || (alpha == "1,2,3,4,5" && pmax >= 2000 && S(r)["p_min"] <= 2);
                   small = small || (alpha == "1,2" && pmax >= 500 && S(r)["p_min"] <= 2);
                   os << "{" << alpha << "} " << S(r)["primes"] << " primes, max exponent "
                      << S(r)["max_exponent"].get<double>() << "; ";
                 }
                 note = os.str();
                 return ok && big && small;
               }});
  c.push_back({10, "sigma, coset and energy bounds for the continuant set", 120, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::set<std::pair<int, std::uint64_t>> want{{101, 5}, {211, 3}};
                 for (const auto* r : runs) {
                   for (const auto& it : (*r)["items"])
                     if (it["asserted"].get<bool>()) ok = ok && it["holds"].get<bool>();
                   note += "p=" + S(r)["p"].dump() + " |A|=" + S(r)["size_a"].dump() + " |L|=" +
                           S(r)["size_lambda"].dump() + "; ";
                   want.erase({S(r)["p"].get<int>(), S(r)["M"].get<std::uint64_t>()});
                 }
                 return ok && want.empty();
               }});
  c.push_back({11, "quadratic residue example needs three products", 30, [](const Runs& runs, std::string& note) {
                 bool ok = all_passed(runs, note);
                 std::set<int> want{7, 11};
                 for (const auto* r : runs) {
                   ok = ok && !S(r)["a_meets_lower"].get<bool>() && !S(r)["a2_meets_lower"].get<bool>() &&
                        (S(r)["first_n"].is_null() || S(r)["first_n"].get<int>() >= 3);
                   want.erase(S(r)["p"].get<int>());
                   note += "p=" + S(r)["p"].dump() + " first n=" + S(r)["first_n"].dump() + " ";
                 }
                 return ok && want.empty();
               }});
  return c;
}

int label_criterion(const std::string& label) {
  if (label.size() < 3 || label[0] != 'c') return 0;
  return std::atoi(label.c_str() + 1);
}

}  // namespace

int main() {
  std::ifstream in(PGROWTH_ACCEPTANCE_CONFIG);
  if (!in) {
    std::cerr << "cannot read " << PGROWTH_ACCEPTANCE_CONFIG << '\n';
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto cfg = pgrowth::cli::parse_config(ss.str());

  const auto record = pgrowth::cli::run_experiment(cfg, 1);
  const auto& runs = record["payload"]["runs"];
  const auto& timings = record["meta"]["runs"];

  int failures = 0;
  for (const auto& crit : criteria()) {
    std::vector<const Json*> mine;
    double ms = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (label_criterion(runs[i].value("label", "")) != crit.id) continue;
      mine.push_back(&runs[i]);
      ms += timings[i]["elapsed_ms"].get<double>();
    }
    std::string note;
    bool ok = crit.check(mine, note);
    const double s = ms / 1000;
    if (crit.budget_s > 0 && s >= crit.budget_s) {
      ok = false;
      note += " (over budget)";
    }
    failures += !ok;
    char timing[64];
    if (crit.budget_s > 0) std::snprintf(timing, sizeof timing, "%.2f s / %.0f s", s, crit.budget_s);
    else std::snprintf(timing, sizeof timing, "%.2f s", s);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << crit.id << "  " << crit.title << "  [" << timing << "]  "
              << note << std::endl;
  }

  // 12: the same config again, multi-threaded; payloads must match byte for byte.
  const auto again = pgrowth::cli::run_experiment(cfg, 4);
  const auto a = record["payload"].dump(), b = again["payload"].dump();
  const bool same = a == b;
  failures += !same;
  std::cout << (same ? "PASS" : "FAIL") << "  12  identical payloads for jobs=1 and jobs=4  ["
            << record["meta"]["elapsed_ms"] << " ms + " << again["meta"]["elapsed_ms"] << " ms]  digest "
            << record["meta"]["payload_digest"].get<std::string>() << " vs "
            << again["meta"]["payload_digest"].get<std::string>() << ", " << a.size() << " bytes" << std::endl;
  return failures ? 1 : 0;
}
