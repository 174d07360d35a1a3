#include "cud/soc.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace cud {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::uint64_t require_uint(std::string_view s, std::size_t line, const char* what) {
  auto v = to_uint(s);
  if (!v) throw SocParseError(line, std::string("expected ") + what + ", got '" + std::string(trim(s)) + "'");
  return *v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

// body entries are 1-based alternative numbers
Preference parse_order(const std::vector<std::string_view>& items, std::size_t m, std::size_t line) {
  if (items.size() != m)
    throw SocParseError(line, "incomplete order: ranks " + std::to_string(items.size()) + " of " +
                                  std::to_string(m) + " alternatives");
  std::vector<bool> seen(m, false);
  std::vector<Candidate> ranking;
  ranking.reserve(m);
  for (std::string_view item : items) {
    if (item.find('{') != std::string_view::npos || item.find('}') != std::string_view::npos)
      throw SocParseError(line, "tied orders are not supported");
    const std::uint64_t a = require_uint(item, line, "alternative number");
    if (a < 1 || a > m) throw SocParseError(line, "alternative " + std::to_string(a) + " out of range");
    if (seen[a - 1]) throw SocParseError(line, "alternative " + std::to_string(a) + " ranked twice");
    seen[a - 1] = true;
    ranking.push_back(Candidate{static_cast<int>(a - 1)});
  }
  return Preference(std::move(ranking));
}

CandidateSet make_candidates(std::vector<std::string> names, std::size_t line) {
  try {
    return CandidateSet(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw SocParseError(line, e.what());
  }
}

struct Counts {
  std::optional<std::uint64_t> voters, unique;
  std::size_t line = 0;
};

void check_counts(const SocData& d, const Counts& c) {
  if (c.voters && *c.voters != d.voter_count())
    throw SocParseError(c.line, "declared " + std::to_string(*c.voters) + " voters but body has " +
                                    std::to_string(d.voter_count()));
  if (c.unique && *c.unique != d.orders.size())
    throw SocParseError(c.line, "declared " + std::to_string(*c.unique) + " unique orders but body has " +
                                    std::to_string(d.orders.size()));
}

SocData parse_current(const std::vector<std::string>& lines, std::size_t first) {
  std::optional<std::size_t> m;
  std::size_t m_line = 0;
  std::map<std::size_t, std::string> names;
  Counts counts;
  SocData d;
  bool body = false;

  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    std::string_view s = trim(lines[i]);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (body) throw SocParseError(ln, "header line after the first order");
      s = trim(s.substr(1));
      const auto colon = s.find(':');
      if (colon == std::string_view::npos) continue;  // free-form comment
      const std::string_view key = trim(s.substr(0, colon));
      const std::string_view value = trim(s.substr(colon + 1));
      if (key == "NUMBER ALTERNATIVES") {
        m = require_uint(value, ln, "alternative count");
        m_line = ln;
        if (*m < 1) throw SocParseError(ln, "alternative count must be positive");
        if (*m > static_cast<std::size_t>(CandidateSet::kMaxCandidates))
          throw SocParseError(ln, "too many alternatives (max 63)");
      } else if (key == "NUMBER VOTERS") {
        counts.voters = require_uint(value, ln, "voter count");
        counts.line = ln;
      } else if (key == "NUMBER UNIQUE ORDERS") {
        counts.unique = require_uint(value, ln, "unique order count");
        if (!counts.line) counts.line = ln;
      } else if (key == "DATA TYPE") {
        if (value != "soc") throw SocParseError(ln, "unsupported data type '" + std::string(value) + "'");
      } else if (key.substr(0, 16) == "ALTERNATIVE NAME") {
        const std::size_t idx = require_uint(key.substr(16), ln, "alternative number");
        if (idx < 1) throw SocParseError(ln, "alternative numbers start at 1");
        names[idx] = std::string(value);
      }
      continue;
    }
    if (!m) throw SocParseError(ln, "order before '# NUMBER ALTERNATIVES' header");
    if (!body) {
      std::vector<std::string> ns;
      for (std::size_t a = 1; a <= *m; ++a) {
        auto it = names.find(a);
        ns.push_back(it != names.end() ? it->second : std::to_string(a));
      }
      if (!names.empty() && names.rbegin()->first > *m)
        throw SocParseError(m_line, "alternative name given for number " + std::to_string(names.rbegin()->first));
      d.candidates = make_candidates(std::move(ns), m_line);
      body = true;
    }
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw SocParseError(ln, "expected 'count: order'");
    const std::uint64_t count = require_uint(s.substr(0, colon), ln, "multiplicity");
    if (count == 0) throw SocParseError(ln, "multiplicity must be positive");
    d.orders.push_back(parse_order(split(s.substr(colon + 1), ','), *m, ln));
    d.multiplicities.push_back(count);
  }
  if (!m) throw SocParseError(lines.size(), "missing '# NUMBER ALTERNATIVES' header");
  if (d.orders.empty()) throw SocParseError(lines.size(), "file contains no orders");
  check_counts(d, counts);
  return d;
}

SocData parse_legacy(const std::vector<std::string>& lines, std::size_t first) {
  std::size_t i = first;
  auto next = [&]() -> std::optional<std::pair<std::size_t, std::string_view>> {
    while (i < lines.size()) {
      std::string_view s = trim(lines[i]);
      ++i;
      if (!s.empty()) return std::pair{i, s};
    }
    return std::nullopt;
  };
  auto first_line = next();
  const std::size_t m_line = first_line->first;
  const std::uint64_t m = require_uint(first_line->second, m_line, "alternative count");
  if (m < 1 || m > static_cast<std::uint64_t>(CandidateSet::kMaxCandidates))
    throw SocParseError(m_line, "alternative count out of range");

  std::vector<std::string> names(m);
  for (std::uint64_t a = 1; a <= m; ++a) {
    auto l = next();
    if (!l) throw SocParseError(lines.size(), "missing name for alternative " + std::to_string(a));
    const auto comma = l->second.find(',');
    if (comma == std::string_view::npos) throw SocParseError(l->first, "expected 'number,name'");
    const std::uint64_t idx = require_uint(l->second.substr(0, comma), l->first, "alternative number");
    if (idx != a) throw SocParseError(l->first, "expected alternative " + std::to_string(a));
    names[a - 1] = std::string(trim(l->second.substr(comma + 1)));
  }
  SocData d;
  d.candidates = make_candidates(std::move(names), m_line);

  auto totals = next();
  if (!totals) throw SocParseError(lines.size(), "missing 'voters,sum,unique' line");
  const auto parts = split(totals->second, ',');
  if (parts.size() != 3) throw SocParseError(totals->first, "expected 'voters,sum,unique'");
  Counts counts;
  counts.line = totals->first;
  counts.voters = require_uint(parts[0], totals->first, "voter count");
  require_uint(parts[1], totals->first, "vote sum");
  counts.unique = require_uint(parts[2], totals->first, "unique order count");

  while (auto l = next()) {
    auto items = split(l->second, ',');
    if (items.size() < 2) throw SocParseError(l->first, "expected 'count,order'");
    if (l->second.find('{') != std::string_view::npos) throw SocParseError(l->first, "tied orders are not supported");
    const std::uint64_t count = require_uint(items.front(), l->first, "multiplicity");
    if (count == 0) throw SocParseError(l->first, "multiplicity must be positive");
    items.erase(items.begin());
    d.orders.push_back(parse_order(items, m, l->first));
    d.multiplicities.push_back(count);
  }
  if (d.orders.empty()) throw SocParseError(lines.size(), "file contains no orders");
  check_counts(d, counts);
  return d;
}

}  // namespace

std::uint64_t SocData::voter_count() const {
  std::uint64_t n = 0;
  for (auto k : multiplicities) n += k;
  return n;
}

PreferenceProfile SocData::expand() const {
  std::vector<Preference> voters;
  for (std::size_t i = 0; i < orders.size(); ++i)
    for (std::uint64_t k = 0; k < multiplicities[i]; ++k) voters.push_back(orders[i]);
  return PreferenceProfile(candidates, std::move(voters));
}

SocData parse_soc(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(std::move(l));
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw SocParseError(lines.size() + (lines.empty() ? 1 : 0), "empty file");
  if (trim(lines[first]).front() == '#') return parse_current(lines, first);
  return parse_legacy(lines, first);
}

SocData parse_soc_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_soc(in);
}

void write_soc(std::ostream& out, const PreferenceProfile& profile, const std::string& title) {
  std::map<std::vector<int>, std::uint64_t> counts;
  std::vector<std::vector<int>> order;  // first-seen order keeps output stable
  for (const Preference& p : profile.voters) {
    std::vector<int> ids;
    for (Candidate c : p.ranking()) ids.push_back(c.id + 1);
    if (counts[ids]++ == 0) order.push_back(ids);
  }
  out << "# TITLE: " << title << "\n# DATA TYPE: soc\n";
  out << "# NUMBER ALTERNATIVES: " << profile.candidate_count() << "\n";
  out << "# NUMBER VOTERS: " << profile.voter_count() << "\n";
  out << "# NUMBER UNIQUE ORDERS: " << order.size() << "\n";
  for (int a = 0; a < profile.candidate_count(); ++a)
    out << "# ALTERNATIVE NAME " << a + 1 << ": " << profile.candidates.name(Candidate{a}) << "\n";
  for (const auto& ids : order) {
    out << counts[ids] << ": ";
    for (std::size_t k = 0; k < ids.size(); ++k) out << (k ? "," : "") << ids[k];
    out << "\n";
  }
}

}  // namespace cud
