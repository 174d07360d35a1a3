#include "cud/trace_io.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "cud/mdvr.hpp"

namespace cud {

std::string format_scores(const ScoreVector& s) {
  std::string out = "(";
  for (int c = 0; c < s.size(); ++c) {
    if (c) out += ",";
    out += std::to_string(s[Candidate{c}]);
  }
  return out + ")";
}

std::string format_set(const CandidateSet& cs, CandidateMask set) {
  std::string out = "{";
  bool first = true;
  for (Candidate c : set.members()) {
    if (!first) out += ",";
    out += cs.name(c);
    first = false;
  }
  return out + "}";
}

void render_trace_table(std::ostream& os, const PreferenceProfile& profile, const GameTrace& trace) {
  const CandidateSet& cs = profile.candidates;
  os << std::left << std::setw(4) << "t" << std::setw(20) << "scores" << std::setw(16) << "W"
     << std::setw(28) << "hand-raisers" << std::setw(8) << "picked"
     << "change\n";
  for (const StepRecord& r : trace.steps) {
    std::string raisers;
    for (const HandRaise& h : r.hand_raisers) {
      if (!raisers.empty()) raisers += " ";
      raisers += std::to_string(h.voter + 1) + "->" + cs.name(h.desired);
    }
    if (raisers.empty()) raisers = "-";
    os << std::setw(4) << r.t << std::setw(20) << format_scores(r.scores_before) << std::setw(16)
       << format_set(cs, possible_winners(r.scores_before, r.t, trace.rule)) << std::setw(28) << raisers
       << std::setw(8) << (r.picked ? std::to_string(*r.picked + 1) : "-");
    if (r.change)
      os << cs.name(r.change->from) << "->" << cs.name(r.change->to);
    else
      os << "-";
    os << '\n';
  }
  os << std::setw(4) << trace.stop_time << std::setw(20) << format_scores(trace.final_scores)
     << std::setw(16) << format_set(cs, possible_winners(trace.final_scores, trace.stop_time, trace.rule))
     << "winner " << cs.name(trace.winner) << " after " << trace.changes() << " change(s)\n";
}

nlohmann::json trace_to_json(const PreferenceProfile& profile, const GameTrace& trace) {
  using nlohmann::json;
  const CandidateSet& cs = profile.candidates;
  json steps = json::array();
  for (const StepRecord& r : trace.steps) {
    json raisers = json::array();
    for (const HandRaise& h : r.hand_raisers) raisers.push_back({{"voter", h.voter}, {"desired", cs.name(h.desired)}});
    json step = {{"t", r.t},
                 {"scores", r.scores_before.values()},
                 {"possible", format_set(cs, possible_winners(r.scores_before, r.t, trace.rule))},
                 {"hand_raisers", raisers}};
    step["picked"] = r.picked ? json(*r.picked) : json(nullptr);
    step["change"] = r.change ? json{{"voter", r.change->voter},
                                     {"from", cs.name(r.change->from)},
                                     {"to", cs.name(r.change->to)}}
                              : json(nullptr);
    steps.push_back(std::move(step));
  }
  json out = {{"sigma", trace.rule.sigma},
              {"tau", trace.rule.tau},
              {"variant", to_string(trace.rule.variant)},
              {"kind", to_string(trace.kind)},
              {"stop_rule", trace.stop_rule == StopRule::Consensus ? "consensus" : "singleton"},
              {"candidates", cs.names()},
              {"steps", steps},
              {"final_scores", trace.final_scores.values()},
              {"winner", cs.name(trace.winner)},
              {"converged", trace.converged},
              {"stop_time", trace.stop_time},
              {"changes", trace.changes()}};
  out["seed"] = trace.seed ? json(*trace.seed) : json(nullptr);
  return out;
}

}  // namespace cud
