#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "cud/protocol.hpp"

namespace cud {

std::string format_scores(const ScoreVector& s);
std::string format_set(const CandidateSet& cs, CandidateMask set);

/// Step table in the layout of the worked examples: one row per tick with
/// t, scores, possible winners, hand-raisers, pick and applied change.
/// Voters are shown 1-based.
void render_trace_table(std::ostream& os, const PreferenceProfile& profile, const GameTrace& trace);

nlohmann::json trace_to_json(const PreferenceProfile& profile, const GameTrace& trace);

}  // namespace cud
