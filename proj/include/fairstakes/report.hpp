// Report serialization (JSON, round-trippable) and rendering (tables to
// six significant figures, figure/sweep CSV).
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fairstakes/fairness.hpp"
#include "fairstakes/mechanism.hpp"
#include "fairstakes/montecarlo.hpp"
#include "fairstakes/scenario.hpp"

namespace fairstakes {

namespace detail {

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline json outcome_to_json(const EquilibriumOutcome& o) {
  return {{"cutoff", o.cutoff},
          {"prevalence", o.prevalence},
          {"sincere_prevalence", o.sincere_prevalence},
          {"tpr", o.profile.tpr},
          {"fpr", o.profile.fpr},
          {"confusion",
           {{"tp", o.confusion.tp},
            {"fp", o.confusion.fp},
            {"fn", o.confusion.fn},
            {"tn", o.confusion.tn}}},
          {"ppv", detail::optional_to_json(o.ppv)}};
}

inline EquilibriumOutcome outcome_from_json(const json& j) {
  EquilibriumOutcome o;
  o.cutoff = j.at("cutoff").get<double>();
  o.prevalence = j.at("prevalence").get<double>();
  o.sincere_prevalence = j.at("sincere_prevalence").get<double>();
  o.profile = {j.at("tpr").get<double>(), j.at("fpr").get<double>()};
  const json& c = j.at("confusion");
  o.confusion = {c.at("tp").get<double>(), c.at("fp").get<double>(),
                 c.at("fn").get<double>(), c.at("tn").get<double>()};
  o.ppv = detail::optional_from_json(j.at("ppv"));
  return o;
}

inline json fairness_to_json(const FairnessReport& r) {
  return {{"tolerance", r.tolerance},
          {"error_rate_balance",
           {{"tpr_gap", r.error_rate_balance.tpr_gap},
            {"fpr_gap", r.error_rate_balance.fpr_gap},
            {"pass", r.error_rate_balance.pass}}},
          {"predictive_parity",
           {{"ppv_gap", r.predictive_parity.undefined
                            ? json(nullptr)
                            : json(r.predictive_parity.ppv_gap)},
            {"undefined", r.predictive_parity.undefined},
            {"pass", r.predictive_parity.pass}}},
          {"equal_stakes",
           {{"stakes_gap", r.equal_stakes.stakes_gap},
            {"pass", r.equal_stakes.pass}}},
          {"aligned_incentives",
           {{"margins",
             {r.aligned_incentives.margins[0], r.aligned_incentives.margins[1]}},
            {"pass", r.aligned_incentives.pass}}}};
}

inline FairnessReport fairness_from_json(const json& j) {
  FairnessReport r;
  r.tolerance = j.at("tolerance").get<double>();
  const json& eb = j.at("error_rate_balance");
  r.error_rate_balance = {eb.at("tpr_gap").get<double>(),
                          eb.at("fpr_gap").get<double>(),
                          eb.at("pass").get<bool>()};
  const json& pp = j.at("predictive_parity");
  r.predictive_parity.undefined = pp.at("undefined").get<bool>();
  r.predictive_parity.ppv_gap =
      r.predictive_parity.undefined
          ? std::numeric_limits<double>::quiet_NaN()
          : pp.at("ppv_gap").get<double>();
  r.predictive_parity.pass = pp.at("pass").get<bool>();
  const json& es = j.at("equal_stakes");
  r.equal_stakes = {es.at("stakes_gap").get<double>(),
                    es.at("pass").get<bool>()};
  const json& ai = j.at("aligned_incentives");
  r.aligned_incentives.margins = {ai.at("margins").at(0).get<double>(),
                                  ai.at("margins").at(1).get<double>()};
  r.aligned_incentives.pass = ai.at("pass").get<bool>();
  return r;
}

inline json equal_stakes_result_to_json(const EqualStakesResult& r) {
  if (!r.feasible())
    return {{"tag", "infeasible_dominance"},
            {"dominant_group",
             r.direction == DominanceTag::SecondDominatesFirst ? 1 : 0}};
  return {{"tag", "feasible"},
          {"r", r.r},
          {"crossing", r.crossing},
          {"aligned_incentives_holds", r.aligned_incentives_holds}};
}

inline EqualStakesResult equal_stakes_result_from_json(const json& j) {
  EqualStakesResult r;
  if (j.at("tag").get<std::string>() == "infeasible_dominance") {
    r.tag = EqualStakesResult::Tag::InfeasibleDominance;
    r.direction = j.at("dominant_group").get<int>() == 1
                      ? DominanceTag::SecondDominatesFirst
                      : DominanceTag::FirstDominatesSecond;
    return r;
  }
  r.tag = EqualStakesResult::Tag::Feasible;
  r.r = j.at("r").get<double>();
  r.crossing = j.at("crossing").get<double>();
  r.aligned_incentives_holds = j.at("aligned_incentives_holds").get<bool>();
  return r;
}

inline json design_to_json(const MechanismDesign& design,
                           const std::array<std::string, 2>& names) {
  json groups = json::array();
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupDesign& gd = design.groups[g];
    groups.push_back({{"name", names[g]},
                      {"threshold", gd.post.threshold},
                      {"ell", gd.post.ell},
                      {"m", gd.post.m},
                      {"a", gd.post.a},
                      {"b", gd.post.b},
                      {"rule", rule_to_json(gd.post.rule)},
                      {"stakes", gd.stakes.r},
                      {"equilibrium", outcome_to_json(gd.outcome)}});
  }
  json j = {{"mode", mode_name(design.mode)},
            {"targets",
             {{"tpr", design.targets.tpr},
              {"fpr", design.targets.fpr},
              {"delta", design.delta()}}},
            {"groups", std::move(groups)},
            {"fairness", fairness_to_json(design.fairness)}};
  if (design.equal_stakes)
    j["equal_stakes_analysis"] =
        equal_stakes_result_to_json(*design.equal_stakes);
  return j;
}

inline MechanismDesign design_from_json(const json& j,
                                        std::array<std::string, 2>* names =
                                            nullptr) {
  MechanismDesign design;
  design.mode = parse_mode(j.at("mode").get<std::string>());
  design.targets = ErrorTargets{j.at("targets").at("tpr").get<double>(),
                                j.at("targets").at("fpr").get<double>()};
  const json& groups = j.at("groups");
  for (std::size_t g = 0; g < 2; ++g) {
    const json& gj = groups.at(g);
    if (names) (*names)[g] = gj.at("name").get<std::string>();
    GroupDesign& gd = design.groups[g];
    gd.post.threshold = gj.at("threshold").get<double>();
    gd.post.ell = gj.at("ell").get<double>();
    gd.post.m = gj.at("m").get<double>();
    gd.post.a = gj.at("a").get<double>();
    gd.post.b = gj.at("b").get<double>();
    gd.post.rule = parse_rule(gj.at("rule"));
    gd.stakes = Stakes{gj.at("stakes").get<double>()};
    gd.outcome = outcome_from_json(gj.at("equilibrium"));
  }
  design.fairness = fairness_from_json(j.at("fairness"));
  if (j.contains("equal_stakes_analysis"))
    design.equal_stakes =
        equal_stakes_result_from_json(j.at("equal_stakes_analysis"));
  return design;
}

inline json simulation_to_json(const SimulationResult& sim,
                               const std::array<std::string, 2>& names) {
  json groups = json::array();
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupSimulation& s = sim.groups[g];
    groups.push_back({{"name", names[g]},
                      {"n", s.n},
                      {"compliant", s.compliant},
                      {"tp", s.tp},
                      {"fp", s.fp},
                      {"fn", s.fn},
                      {"tn", s.tn},
                      {"prevalence", s.prevalence},
                      {"tpr", detail::optional_to_json(s.tpr)},
                      {"fpr", detail::optional_to_json(s.fpr)},
                      {"ppv", detail::optional_to_json(s.ppv)},
                      {"prevalence_se", s.prevalence_se},
                      {"tpr_se", detail::optional_to_json(s.tpr_se)},
                      {"fpr_se", detail::optional_to_json(s.fpr_se)},
                      {"ppv_se", detail::optional_to_json(s.ppv_se)}});
  }
  return {{"seed", sim.seed},
          {"n_per_group", sim.n_per_group},
          {"groups", std::move(groups)}};
}

inline SimulationResult simulation_from_json(const json& j) {
  SimulationResult sim;
  sim.seed = j.at("seed").get<std::uint64_t>();
  sim.n_per_group = j.at("n_per_group").get<std::int64_t>();
  for (std::size_t g = 0; g < 2; ++g) {
    const json& gj = j.at("groups").at(g);
    GroupSimulation& s = sim.groups[g];
    s.n = gj.at("n").get<std::int64_t>();
    s.compliant = gj.at("compliant").get<std::int64_t>();
    s.tp = gj.at("tp").get<std::int64_t>();
    s.fp = gj.at("fp").get<std::int64_t>();
    s.fn = gj.at("fn").get<std::int64_t>();
    s.tn = gj.at("tn").get<std::int64_t>();
    s.prevalence = gj.at("prevalence").get<double>();
    s.tpr = detail::optional_from_json(gj.at("tpr"));
    s.fpr = detail::optional_from_json(gj.at("fpr"));
    s.ppv = detail::optional_from_json(gj.at("ppv"));
    s.prevalence_se = gj.at("prevalence_se").get<double>();
    s.tpr_se = detail::optional_from_json(gj.at("tpr_se"));
    s.fpr_se = detail::optional_from_json(gj.at("fpr_se"));
    s.ppv_se = detail::optional_from_json(gj.at("ppv_se"));
  }
  return sim;
}

inline json comparison_to_json(const ComparisonReport& report,
                               const std::array<std::string, 2>& names) {
  json groups = json::array();
  for (std::size_t g = 0; g < 2; ++g) {
    json cells = json::array();
    for (const CellCheck& cell : report.groups[g])
      cells.push_back({{"name", cell.name},
                       {"empirical", cell.empirical},
                       {"expected", cell.expected},
                       {"se", cell.se},
                       {"z", std::isfinite(cell.z) ? json(cell.z) : json(nullptr)},
                       {"pass", cell.pass}});
    groups.push_back({{"name", names[g]}, {"cells", std::move(cells)}});
  }
  return {{"groups", std::move(groups)},
          {"max_abs_z",
           std::isfinite(report.max_abs_z) ? json(report.max_abs_z)
                                           : json(nullptr)},
          {"pass", report.pass}};
}

// ---------------------------------------------------------------------------
// Human-readable rendering, six significant figures.

inline void render_fairness(std::ostream& out, const FairnessReport& r) {
  using detail::fmt6;
  const auto line = [&](const char* name, bool pass, const std::string& info) {
    out << "  " << name << (pass ? "PASS" : "FAIL") << "  (" << info << ")\n";
  };
  out << "Fairness (tolerance " << fmt6(r.tolerance) << "):\n";
  line("error-rate balance   ", r.error_rate_balance.pass,
       "tpr gap " + fmt6(r.error_rate_balance.tpr_gap) + ", fpr gap " +
           fmt6(r.error_rate_balance.fpr_gap));
  line("predictive parity    ", r.predictive_parity.pass,
       r.predictive_parity.undefined
           ? std::string("ppv undefined for at least one group")
           : "ppv gap " + fmt6(r.predictive_parity.ppv_gap));
  line("equal stakes         ", r.equal_stakes.pass,
       "stakes gap " + fmt6(r.equal_stakes.stakes_gap));
  line("aligned incentives   ", r.aligned_incentives.pass,
       "margins " + fmt6(r.aligned_incentives.margins[0]) + ", " +
           fmt6(r.aligned_incentives.margins[1]));
}

inline void render_outcome(std::ostream& out, const EquilibriumOutcome& o) {
  using detail::fmt6;
  out << "cutoff " << fmt6(o.cutoff) << "  prevalence " << fmt6(o.prevalence)
      << "  sincere " << fmt6(o.sincere_prevalence) << "  ppv "
      << (o.ppv ? fmt6(*o.ppv) : std::string("undefined")) << "\n";
}

inline void render_design(std::ostream& out, const MechanismDesign& design,
                          const std::array<std::string, 2>& names) {
  using detail::fmt6;
  out << "Mechanism (" << mode_name(design.mode) << ")\n";
  out << "  targets: TPR " << fmt6(design.targets.tpr) << "  FPR "
      << fmt6(design.targets.fpr) << "  informativeness "
      << fmt6(design.delta()) << "\n";
  if (design.equal_stakes) {
    const EqualStakesResult& es = *design.equal_stakes;
    if (es.feasible())
      out << "  equal stakes: feasible, cost CDFs cross at "
          << fmt6(es.crossing) << ", shared r " << fmt6(es.r)
          << (es.aligned_incentives_holds ? ""
                                          : " (aligned incentives violated)")
          << "\n";
  }
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupDesign& gd = design.groups[g];
    out << "  group " << names[g] << ": threshold "
        << fmt6(gd.post.threshold) << "  ell " << fmt6(gd.post.ell) << "  m "
        << fmt6(gd.post.m) << "  a " << fmt6(gd.post.a) << "  b "
        << fmt6(gd.post.b) << "\n";
    out << "    stakes " << fmt6(gd.stakes.r) << "  ";
    render_outcome(out, gd.outcome);
  }
  render_fairness(out, design.fairness);
}

inline void render_simulation(std::ostream& out, const SimulationResult& sim,
                              const std::array<std::string, 2>& names) {
  using detail::fmt6;
  out << "Simulation (seed " << sim.seed << ", n " << sim.n_per_group
      << " per group)\n";
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupSimulation& s = sim.groups[g];
    out << "  group " << names[g] << ": prevalence " << fmt6(s.prevalence)
        << "  tpr " << (s.tpr ? fmt6(*s.tpr) : std::string("n/a")) << "  fpr "
        << (s.fpr ? fmt6(*s.fpr) : std::string("n/a")) << "  ppv "
        << (s.ppv ? fmt6(*s.ppv) : std::string("n/a")) << "\n";
    out << "    counts: tp " << s.tp << "  fp " << s.fp << "  fn " << s.fn
        << "  tn " << s.tn << "\n";
  }
}

inline void render_comparison(std::ostream& out, const ComparisonReport& report,
                              const std::array<std::string, 2>& names) {
  using detail::fmt6;
  out << "Comparison vs analytic equilibrium ("
      << (report.pass ? "PASS" : "FAIL") << ", max |z| "
      << fmt6(report.max_abs_z) << ")\n";
  for (std::size_t g = 0; g < 2; ++g) {
    out << "  group " << names[g] << ":\n";
    for (const CellCheck& cell : report.groups[g])
      out << "    " << cell.name << ": empirical " << fmt6(cell.empirical)
          << "  expected " << fmt6(cell.expected) << "  z " << fmt6(cell.z)
          << (cell.pass ? "" : "  FAIL") << "\n";
  }
}

// ---------------------------------------------------------------------------
// CSV output.

// Cost CDFs and PDFs of both groups on a uniform grid (figure data).
inline void write_figure_csv(std::ostream& out,
                             const std::array<std::string, 2>& names,
                             const ContinuousDistribution& cost_first,
                             const ContinuousDistribution& cost_second,
                             int points = 401) {
  const double lo = std::min(cost_first.quantile(5e-4),
                             cost_second.quantile(5e-4));
  const double hi = std::max(cost_first.quantile(1.0 - 5e-4),
                             cost_second.quantile(1.0 - 5e-4));
  out << "c,cdf_" << names[0] << ",cdf_" << names[1] << ",pdf_" << names[0]
      << ",pdf_" << names[1] << "\n";
  char buf[160];
  for (int i = 0; i < points; ++i) {
    const double c = lo + (hi - lo) * i / (points - 1);
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g\n", c,
                  cost_first.cdf(c), cost_second.cdf(c),
                  cost_first.density(c), cost_second.density(c));
    out << buf;
  }
}

// Sidecar with the equilibrium cutoff markers.
inline void write_cutoffs_csv(std::ostream& out,
                              const std::array<std::string, 2>& names,
                              const std::array<EquilibriumOutcome, 2>& outcomes) {
  out << "group,c_hat,prevalence,sincere_prevalence\n";
  char buf[160];
  for (std::size_t g = 0; g < 2; ++g) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g\n",
                  names[g].c_str(), outcomes[g].cutoff,
                  outcomes[g].prevalence, outcomes[g].sincere_prevalence);
    out << buf;
  }
}

// One row per group; the seed rides along so runs stay attributable.
inline void write_simulation_csv(std::ostream& out,
                                 const std::array<std::string, 2>& names,
                                 const SimulationResult& sim) {
  out << "group,seed,n,compliant,tp,fp,fn,tn,prevalence,tpr,fpr,ppv\n";
  const auto cell = [](const std::optional<double>& v) {
    char buf[40];
    if (!v) return std::string();
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    return std::string(buf);
  };
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupSimulation& s = sim.groups[g];
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "%s,%llu,%lld,%lld,%lld,%lld,%lld,%lld,%.10g,",
                  names[g].c_str(),
                  static_cast<unsigned long long>(sim.seed),
                  static_cast<long long>(s.n),
                  static_cast<long long>(s.compliant),
                  static_cast<long long>(s.tp), static_cast<long long>(s.fp),
                  static_cast<long long>(s.fn), static_cast<long long>(s.tn),
                  s.prevalence);
    out << buf << cell(s.tpr) << ',' << cell(s.fpr) << ',' << cell(s.ppv)
        << "\n";
  }
}

inline void write_sweep_csv(std::ostream& out,
                            const std::array<std::string, 2>& names,
                            const std::vector<SweepRow>& rows) {
  out << "r,pi_" << names[0] << ",pi_" << names[1] << ",ppv_" << names[0]
      << ",ppv_" << names[1] << ",pi_gap,ppv_gap\n";
  const auto cell = [](const std::optional<double>& v) {
    char buf[40];
    if (!v) return std::string();
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    return std::string(buf);
  };
  for (const SweepRow& row : rows) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,", row.r,
                  row.prevalence[0], row.prevalence[1]);
    out << buf << cell(row.ppv[0]) << ',' << cell(row.ppv[1]) << ',';
    std::snprintf(buf, sizeof(buf), "%.10g,", row.prevalence_gap);
    out << buf << cell(row.ppv_gap) << "\n";
  }
}

}  // namespace fairstakes
