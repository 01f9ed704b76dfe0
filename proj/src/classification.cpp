#include "infodemic/classification.hpp"

#include <ostream>
#include <string>

#include "infodemic/error.hpp"
#include "infodemic/io.hpp"

namespace infodemic {

void ClassificationConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "threshold must be in (0,1], got " + io::format_double(threshold));
  }
  if (window_days < 1) fail(ErrorKind::InvalidArgument, "window must be at least 1 day");
}

double fake_fraction(std::uint64_t total, std::uint64_t fake) {
  if (total == 0) fail(ErrorKind::EmptyActivity, "no shares");
  if (fake > total) fail(ErrorKind::InvalidArgument, "fake shares exceed total");
  return static_cast<double>(fake) / static_cast<double>(total);
}

Role classify_user(double fraction, const ClassificationConfig& cfg) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "fraction outside [0,1]: " + io::format_double(fraction));
  }
  if (fraction >= cfg.threshold) return Role::Creator;
  if (fraction > 0.0) return Role::Consumer;
  return Role::NonSpreader;
}

RoleAssignment classify_window(const EventLog& log, const ClassificationConfig& cfg) {
  cfg.validate();
  RoleAssignment out;
  out.user_count = log.users.size();
  out.window_days = cfg.window_days;
  out.threshold = cfg.threshold;
  out.origin_day = log.origin_day();
  if (log.empty()) return out;

  const std::int64_t days = log.day_count();
  out.window_count = static_cast<std::int32_t>((days + cfg.window_days - 1) / cfg.window_days);

  // Bucket shares by actor; a stable scatter keeps each user's shares in time order.
  const std::size_t n_users = log.users.size();
  std::vector<std::size_t> offsets(n_users + 1, 0);
  for (const auto& e : log.events) ++offsets[e.actor + 1];
  for (std::size_t u = 0; u < n_users; ++u) offsets[u + 1] += offsets[u];

  struct Share {
    std::int32_t window;
    bool fake;
  };
  std::vector<Share> shares(log.events.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : log.events) {
    const std::int64_t w = (day_of(e.timestamp) - out.origin_day) / cfg.window_days;
    if (day_of(e.timestamp) < out.origin_day || w >= out.window_count) {
      fail(ErrorKind::InvalidArgument, "event outside log window");
    }
    shares[cursor[e.actor]++] = {static_cast<std::int32_t>(w), is_fake(e.category)};
  }

  for (std::size_t u = 0; u < n_users; ++u) {
    std::size_t i = offsets[u];
    while (i < offsets[u + 1]) {
      RoleCell cell;
      cell.user = static_cast<UserId>(u);
      cell.window = shares[i].window;
      for (; i < offsets[u + 1] && shares[i].window == cell.window; ++i) {
        ++cell.total;
        cell.fake += shares[i].fake ? 1 : 0;
      }
      cell.role = classify_user(fake_fraction(cell.total, cell.fake), cfg);
      out.cells.push_back(cell);
    }
  }
  return out;
}

RoleAssignment classify_static(const EventLog& log, double threshold) {
  return classify_window(log, {threshold, std::max<std::int64_t>(1, log.day_count())});
}

std::vector<Role> node_roles(const RoleAssignment& assign) {
  if (assign.window_count > 1) {
    fail(ErrorKind::InvalidArgument, "node roles need a single-window assignment");
  }
  std::vector<Role> roles(assign.user_count, Role::NonSpreader);
  for (const auto& c : assign.cells) roles[c.user] = c.role;
  return roles;
}

BehaviorSummary behavior_summary(const RoleAssignment& assign) {
  BehaviorSummary s;
  std::size_t i = 0;
  const auto& cells = assign.cells;
  while (i < cells.size()) {
    const UserId user = cells[i].user;
    bool creator = false;
    bool consumer = false;
    std::size_t spreader_windows = 0;
    for (; i < cells.size() && cells[i].user == user; ++i) {
      creator = creator || cells[i].role == Role::Creator;
      consumer = consumer || cells[i].role == Role::Consumer;
      spreader_windows += is_spreader(cells[i].role) ? 1 : 0;
    }
    if (spreader_windows == 0) continue;
    BehaviorGroup& g = creator && consumer ? s.mixed : (creator ? s.only_creators : s.only_consumers);
    ++g.users;
    if (spreader_windows == 1) ++g.only_once;
    ++s.spreaders;
  }
  if (s.spreaders > 0) {
    const double n = static_cast<double>(s.spreaders);
    for (BehaviorGroup* g : {&s.only_creators, &s.only_consumers, &s.mixed}) {
      g->fraction = static_cast<double>(g->users) / n;
      g->only_once_fraction = static_cast<double>(g->only_once) / n;
    }
  }
  return s;
}

std::vector<SweepRecord> sensitivity_sweep(const EventLog& log, const std::vector<double>& thresholds,
                                           const DensityOptions& opts) {
  for (double t : thresholds) ClassificationConfig{t, 1}.validate();
  const RetweetNetwork net = build_network(log, opts.weighting);
  std::vector<SweepRecord> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto roles = node_roles(classify_static(log, t));
    SweepRecord rec;
    rec.threshold = t;
    for (Role r : roles) ++rec.group_sizes[role_index(r)];
    rec.density = group_link_density(net, roles, opts.null_model);
    out.push_back(std::move(rec));
  }
  return out;
}

void write_roles_csv(std::ostream& out, const RoleAssignment& assign, const EventLog& log) {
  out << "user,window,role,total,fake\n";
  for (const auto& c : assign.cells) {
    out << io::csv_field(log.users[c.user]) << ',' << c.window << ',' << role_name(c.role) << ',' << c.total << ','
        << c.fake << '\n';
  }
}

}  // namespace infodemic
