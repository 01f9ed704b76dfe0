#include "infodemic/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "infodemic/error.hpp"
#include "infodemic/io.hpp"
#include "json.hpp"

namespace infodemic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_daily(const RoleAssignment& assign) {
  if (assign.window_days != 1) fail(ErrorKind::InvalidArgument, "analysis needs 1-day windows");
}

std::size_t state_index(Role r) {
  switch (r) {
    case Role::Creator: return 0;
    case Role::Consumer: return 1;
    case Role::NonSpreader: break;
  }
  return 2;
}

}  // namespace

bool is_missing(double v) noexcept { return std::isnan(v); }

DailySeries daily_series(const EventLog& log, const RoleAssignment& assign) {
  require_daily(assign);
  DailySeries s;
  s.origin_day = log.origin_day();
  const std::size_t days = log.empty() ? 0 : static_cast<std::size_t>(log.day_count());
  if (!log.empty() && (assign.origin_day != s.origin_day || static_cast<std::size_t>(assign.window_count) != days)) {
    fail(ErrorKind::InvalidArgument, "assignment does not match log window");
  }
  s.shares.assign(days, 0);
  s.fake_shares.assign(days, 0);
  s.active_users.assign(days, 0);
  s.creators.assign(days, 0);
  s.consumers.assign(days, 0);
  for (const auto& e : log.events) {
    const auto d = static_cast<std::size_t>(day_of(e.timestamp) - s.origin_day);
    ++s.shares[d];
    if (is_fake(e.category)) ++s.fake_shares[d];
  }
  for (const auto& c : assign.cells) {
    const auto d = static_cast<std::size_t>(c.window);
    ++s.active_users[d];
    if (c.role == Role::Creator) ++s.creators[d];
    if (c.role == Role::Consumer) ++s.consumers[d];
  }
  s.fake_fraction.assign(days, kNaN);
  s.creator_fraction.assign(days, kNaN);
  s.consumer_fraction.assign(days, kNaN);
  s.missing.assign(days, true);
  for (std::size_t d = 0; d < days; ++d) {
    if (s.shares[d] == 0) continue;
    s.missing[d] = false;
    s.fake_fraction[d] = static_cast<double>(s.fake_shares[d]) / static_cast<double>(s.shares[d]);
    const auto active = static_cast<double>(s.active_users[d]);
    s.creator_fraction[d] = static_cast<double>(s.creators[d]) / active;
    s.consumer_fraction[d] = static_cast<double>(s.consumers[d]) / active;
  }
  return s;
}

void write_series_csv(std::ostream& out, const DailySeries& s) {
  out << "day,fake_fraction,creator_fraction,consumer_fraction,missing\n";
  for (std::size_t d = 0; d < s.size(); ++d) {
    out << d << ',' << io::format_double(s.fake_fraction[d]) << ',' << io::format_double(s.creator_fraction[d])
        << ',' << io::format_double(s.consumer_fraction[d]) << ',' << (s.missing[d] ? 1 : 0) << '\n';
  }
}

DailySeries read_series_csv(std::istream& in) {
  const auto table = io::read_numeric_csv(in);
  DailySeries s;
  s.fake_fraction = table.column("fake_fraction");
  s.creator_fraction = table.column("creator_fraction");
  s.consumer_fraction = table.column("consumer_fraction");
  const auto& missing = table.column("missing");
  for (double m : missing) s.missing.push_back(m != 0.0);
  return s;
}

Series moving_average(std::span<const double> series, int width) {
  if (width < 1) fail(ErrorKind::InvalidArgument, "moving average width must be >= 1");
  if (std::all_of(series.begin(), series.end(), is_missing)) fail(ErrorKind::AllMissing, "series");
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t half = width / 2;
  const bool even = width % 2 == 0;
  Series out(series.size(), kNaN);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double weight = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      const double v = series[static_cast<std::size_t>(j)];
      if (is_missing(v)) continue;
      const double w = (even && (j == i - half || j == i + half)) ? 0.5 : 1.0;
      sum += w * v;
      weight += w;
    }
    if (weight > 0.0) out[static_cast<std::size_t>(i)] = sum / weight;
  }
  return out;
}

Series minmax_rescale(std::span<const double> series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : series) {
    if (is_missing(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Series out(series.size(), kNaN);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (is_missing(series[i])) continue;
    out[i] = hi > lo ? (series[i] - lo) / (hi - lo) : 0.5;
  }
  return out;
}

double cross_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidArgument, "series not aligned");
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_missing(a[i]) || is_missing(b[i])) continue;
    mean_a += a[i];
    mean_b += b[i];
    ++n;
  }
  if (n < 3) fail(ErrorKind::DegenerateSeries, "fewer than 3 complete pairs");
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_missing(a[i]) || is_missing(b[i])) continue;
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) fail(ErrorKind::DegenerateSeries, "constant series");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

TransitionMatrix transition_counts(const RoleAssignment& assign) {
  require_daily(assign);
  TransitionMatrix m;
  const auto days = static_cast<std::int64_t>(assign.window_count);
  const auto& cells = assign.cells;
  std::uint64_t silent_to_silent = 0;
  std::size_t i = 0;
  while (i < cells.size()) {
    const UserId user = cells[i].user;
    std::size_t end = i;
    while (end < cells.size() && cells[end].user == user) ++end;

    // Spreader days for this user, in window order.
    std::vector<std::pair<std::int64_t, std::size_t>> active;
    for (std::size_t c = i; c < end; ++c) {
      const auto s = state_index(cells[c].role);
      if (s != 2) active.emplace_back(cells[c].window, s);
    }
    std::uint64_t explicit_pairs = 0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto [day, state] = active[k];
      if (day + 1 < days) {
        const bool next_active = k + 1 < active.size() && active[k + 1].first == day + 1;
        ++m.counts[state][next_active ? active[k + 1].second : 2];
        ++explicit_pairs;
      }
      const bool prev_active = k > 0 && active[k - 1].first == day - 1;
      if (day > 0 && !prev_active) {
        ++m.counts[2][state];
        ++explicit_pairs;
      }
    }
    silent_to_silent += static_cast<std::uint64_t>(std::max<std::int64_t>(0, days - 1)) - explicit_pairs;
    i = end;
  }
  m.counts[2][2] = silent_to_silent;
  return m;
}

std::vector<ReturnRecord> first_return_times(const RoleAssignment& assign) {
  require_daily(assign);
  std::vector<ReturnRecord> out;
  const RoleCell* prev = nullptr;
  for (const auto& c : assign.cells) {
    if (!is_spreader(c.role)) continue;
    if (prev != nullptr && prev->user == c.user) {
      out.push_back({c.user, prev->role, c.role, c.window - prev->window - 1, prev->window});
    }
    prev = &c;
  }
  return out;
}

std::vector<GapBin> default_gap_bins() { return {{0, 2}, {3, 8}, {9, 17}, {18, 45}}; }

std::vector<GapBin> parse_gap_bins(const std::string& text) {
  std::vector<GapBin> bins;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = io::trim(item);
    const auto dash = t.find('-', 1);
    try {
      if (dash == std::string_view::npos) {
        const int v = std::stoi(std::string(t));
        bins.push_back({v, v});
      } else {
        bins.push_back({std::stoi(std::string(t.substr(0, dash))), std::stoi(std::string(t.substr(dash + 1)))});
      }
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "bad gap bin '" + std::string(t) + "'");
    }
  }
  if (bins.empty()) fail(ErrorKind::InvalidArgument, "no gap bins");
  auto sorted = bins;
  std::sort(sorted.begin(), sorted.end(), [](const GapBin& a, const GapBin& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].lo < 0 || sorted[i].lo > sorted[i].hi) fail(ErrorKind::InvalidArgument, "invalid gap bin");
    if (i > 0 && sorted[i].lo <= sorted[i - 1].hi) fail(ErrorKind::InvalidArgument, "gap bins overlap");
  }
  return bins;
}

ReturnProfile return_probability(std::span<const ReturnRecord> records, const std::vector<GapBin>& bins) {
  ReturnProfile p;
  p.bins = bins;
  p.stats[0].assign(bins.size(), {});
  p.stats[1].assign(bins.size(), {});
  for (const auto& r : records) {
    if (!is_spreader(r.from) || !is_spreader(r.to)) fail(ErrorKind::InvalidArgument, "return record role");
    const auto bin = std::find_if(bins.begin(), bins.end(),
                                  [&](const GapBin& b) { return r.gap >= b.lo && r.gap <= b.hi; });
    if (bin == bins.end()) {
      ++p.uncovered;
      continue;
    }
    auto& st = p.stats[role_index(r.from)][static_cast<std::size_t>(bin - bins.begin())];
    ++(r.to == Role::Creator ? st.to_creator : st.to_consumer);
  }
  for (auto& row : p.stats) {
    for (auto& st : row) {
      const auto total = st.to_creator + st.to_consumer;
      if (total == 0) continue;
      st.p_creator = static_cast<double>(st.to_creator) / static_cast<double>(total);
      st.p_consumer = static_cast<double>(st.to_consumer) / static_cast<double>(total);
    }
  }
  return p;
}

std::string return_profile_to_json(const ReturnProfile& p) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (Role from : {Role::Creator, Role::Consumer}) {
    for (std::size_t b = 0; b < p.bins.size(); ++b) {
      const auto& st = p.stats[role_index(from)][b];
      nlohmann::ordered_json row;
      row["from"] = role_name(from);
      row["bin_lo"] = p.bins[b].lo;
      row["bin_hi"] = p.bins[b].hi;
      row["to_creator"] = st.to_creator;
      row["to_consumer"] = st.to_consumer;
      row["p_creator"] = st.p_creator ? nlohmann::ordered_json(*st.p_creator) : nlohmann::ordered_json(nullptr);
      row["p_consumer"] = st.p_consumer ? nlohmann::ordered_json(*st.p_consumer) : nlohmann::ordered_json(nullptr);
      row["empty"] = !st.p_creator.has_value();
      rows.push_back(row);
    }
  }
  j["rows"] = rows;
  j["uncovered"] = p.uncovered;
  return j.dump(2) + "\n";
}

ReturnProfile return_profile_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("rows")) fail(ErrorKind::InvalidArgument, "return profile JSON");
  ReturnProfile p;
  p.uncovered = j.value("uncovered", std::uint64_t{0});
  for (const auto& row : j["rows"]) {
    const auto from = parse_role(row.at("from").get<std::string>());
    if (!from || !is_spreader(*from)) fail(ErrorKind::InvalidArgument, "return profile role");
    const GapBin bin{row.at("bin_lo").get<std::int32_t>(), row.at("bin_hi").get<std::int32_t>()};
    auto it = std::find(p.bins.begin(), p.bins.end(), bin);
    if (it == p.bins.end()) {
      p.bins.push_back(bin);
      p.stats[0].emplace_back();
      p.stats[1].emplace_back();
      it = p.bins.end() - 1;
    }
    auto& st = p.stats[role_index(*from)][static_cast<std::size_t>(it - p.bins.begin())];
    st.to_creator = row.at("to_creator").get<std::uint64_t>();
    st.to_consumer = row.at("to_consumer").get<std::uint64_t>();
    if (!row.at("p_creator").is_null()) st.p_creator = row.at("p_creator").get<double>();
    if (!row.at("p_consumer").is_null()) st.p_consumer = row.at("p_consumer").get<double>();
  }
  return p;
}

}  // namespace infodemic
