#include "infodemic/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "infodemic/ccm.hpp"
#include "infodemic/classification.hpp"
#include "infodemic/error.hpp"
#include "infodemic/ingestion.hpp"
#include "infodemic/io.hpp"
#include "infodemic/network_stats.hpp"
#include "infodemic/synthgen.hpp"
#include "infodemic/temporal.hpp"
#include "json.hpp"

namespace infodemic::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Bad flag or config values. Exit code 1, unlike data errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("INFODEMIC_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet" || v == "0" || v == "off" || v == "error") return LogLevel::Quiet;
  if (v == "debug" || v == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

// Flag > config file > default. Every value looked up is recorded for the
// manifest.
class Settings {
 public:
  std::map<std::string, std::string> cli;
  std::map<std::string, std::string> file;
  std::map<std::string, std::string> resolved;

  std::optional<std::string> find(const std::string& key) {
    std::optional<std::string> v;
    if (auto it = cli.find(key); it != cli.end()) {
      v = it->second;
    } else if (auto jt = file.find(key); jt != file.end()) {
      v = jt->second;
    }
    if (v) resolved[key] = *v;
    return v;
  }

  std::string get(const std::string& key, const std::string& fallback) {
    auto v = find(key);
    if (!v) resolved[key] = fallback;
    return v.value_or(fallback);
  }

  std::string require(const std::string& key) {
    auto v = find(key);
    if (!v || v->empty()) throw UsageError("missing required --" + key);
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const auto text = get(key, io::format_double(fallback));
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw UsageError("--" + key + " expects a number, got '" + text + "'");
    }
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const auto text = get(key, std::to_string(fallback));
    try {
      std::size_t pos = 0;
      const auto v = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw UsageError("--" + key + " expects an integer, got '" + text + "'");
    }
  }

  bool flag(const std::string& key) {
    const auto text = get(key, "false");
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw UsageError("--" + key + " expects true/false");
  }
};

struct Context {
  std::string subcommand;
  Settings settings;
  fs::path out_dir;
  std::uint64_t seed = 1;
  Json inputs = Json::object();
  std::vector<std::string> outputs;
  std::ostream* err = nullptr;
  LogLevel level = LogLevel::Info;

  void log(const std::string& msg) const {
    if (level != LogLevel::Quiet) *err << "[" << subcommand << "] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level == LogLevel::Debug) *err << "[" << subcommand << "] " << msg << '\n';
  }

  void record_input(const std::string& role, const fs::path& path) {
    const auto content = io::read_file(path);
    inputs[role] = {{"path", path.generic_string()}, {"sha256", io::sha256_hex(content)}};
  }

  void emit(const std::string& name, std::string_view content) {
    io::write_file(out_dir / name, content);
    outputs.push_back(name);
    debug("wrote " + (out_dir / name).string());
  }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto t = io::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::int64_t parse_int_arg(const std::string& flag, const std::string& text) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": bad integer '" + text + "'");
  }
}

// "-5..5", "0,1,2" or "3".
std::vector<int> parse_time_delays(const std::string& text) {
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_int_arg("td", std::string(io::trim(text.substr(0, dots))));
    const auto hi = parse_int_arg("td", std::string(io::trim(text.substr(dots + 2))));
    if (lo > hi) throw UsageError("--td range is empty");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(parse_int_arg("td", item)));
  if (out.empty()) throw UsageError("--td is empty");
  return out;
}

std::optional<std::int64_t> parse_window_days(const std::string& text) {
  if (text == "all") return std::nullopt;
  std::string digits = text;
  if (!digits.empty() && (digits.back() == 'd' || digits.back() == 'D')) digits.pop_back();
  const auto v = parse_int_arg("window", digits);
  if (v < 1) throw UsageError("--window must be at least 1 day");
  return v;
}

std::int64_t parse_time_flag(const std::string& flag, const std::string& text) {
  const auto ts = parse_timestamp(text);
  if (!ts) throw UsageError("--" + flag + ": bad timestamp '" + text + "'");
  return *ts;
}

// Input format follows the file extension; --format only selects what is written.
Format input_format(const fs::path& path) {
  const auto ext = lower(path.extension().string());
  return (ext == ".jsonl" || ext == ".json") ? Format::Jsonl : Format::Csv;
}

Format output_format(Context& ctx) {
  const auto f = parse_format(ctx.settings.get("format", "csv"));
  if (!f) throw UsageError("--format must be csv or json");
  return *f;
}

double threshold_of(Context& ctx) {
  const double t = ctx.settings.number("threshold", 0.20);
  if (!(t > 0.0 && t <= 1.0)) throw UsageError("--threshold must be in (0,1]");
  return t;
}

EventLog load_events(Context& ctx) {
  const fs::path path = ctx.settings.require("events");
  const Format format = input_format(path);
  ParseOptions opts;
  opts.format = format;
  opts.max_malformed_fraction = ctx.settings.number("max-malformed", 0.01);
  if (!(opts.max_malformed_fraction >= 0.0 && opts.max_malformed_fraction <= 1.0)) {
    throw UsageError("--max-malformed must be in [0,1]");
  }
  FilterConfig filter;
  if (auto v = ctx.settings.find("from")) filter.start = parse_time_flag("from", *v);
  if (auto v = ctx.settings.find("to")) filter.end = parse_time_flag("to", *v);
  filter.exclude_unlabeled = ctx.settings.flag("exclude-unlabeled");
  if (filter.start && filter.end && *filter.start > *filter.end) throw UsageError("--from is after --to");

  ctx.record_input("events", path);
  auto parsed = parse_events_file(path, opts);
  ctx.log("parsed " + std::to_string(parsed.log.size()) + " events (" + std::to_string(parsed.report.malformed) +
          " malformed, " + std::to_string(parsed.report.self_shares) + " self-shares dropped)");
  EventLog log = std::move(parsed.log);
  if (auto cats = ctx.settings.find("categories")) {
    ctx.record_input("categories", *cats);
    log = label_events(std::move(log), parse_category_table_file(*cats));
  }
  if (filter.start || filter.end || filter.exclude_unlabeled) log = filter_events(log, filter);
  return log;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }


RoleAssignment daily_roles(Context& ctx, const EventLog& log) {
  return classify_window(log, {threshold_of(ctx), 1});
}

// --- subcommands -----------------------------------------------------------

void cmd_ingest(Context& ctx) {
  const EventLog log = load_events(ctx);
  const Format out_format = output_format(ctx);
  std::ostringstream os;
  write_events(os, log, out_format);
  ctx.emit(out_format == Format::Csv ? "events.csv" : "events.jsonl", os.str());
  std::size_t labeled = 0;
  std::size_t fake = 0;
  for (const auto& e : log.events) {
    labeled += e.category != ContentCategory::Unlabeled;
    fake += is_fake(e.category);
  }
  Json j = {{"events", log.size()},   {"users", log.users.size()}, {"labeled", labeled},
            {"fake", fake},           {"window_start", log.window.start}, {"window_end", log.window.end}};
  ctx.emit("ingest.json", dump(j));
}

void cmd_classify(Context& ctx) {
  const EventLog log = load_events(ctx);
  const double threshold = threshold_of(ctx);
  const auto window = parse_window_days(ctx.settings.get("window", "1d"));
  const RoleAssignment assign = window ? classify_window(log, {threshold, *window}) : classify_static(log, threshold);
  std::ostringstream os;
  write_roles_csv(os, assign, log);
  ctx.emit("roles.csv", os.str());
  ctx.log(std::to_string(assign.cells.size()) + " role cells over " + std::to_string(assign.window_count) +
          " windows");
}

void cmd_summary(Context& ctx) {
  const EventLog log = load_events(ctx);
  const auto window = parse_window_days(ctx.settings.get("window", "1d"));
  const double threshold = threshold_of(ctx);
  const auto s = behavior_summary(window ? classify_window(log, {threshold, *window}) : classify_static(log, threshold));
  auto group = [](const BehaviorGroup& g) {
    return Json{{"users", g.users},
                {"fraction", g.fraction},
                {"only_once", g.only_once},
                {"only_once_fraction", g.only_once_fraction}};
  };
  Json j = {{"only_creators", group(s.only_creators)},
            {"only_consumers", group(s.only_consumers)},
            {"mixed", group(s.mixed)},
            {"spreaders", s.spreaders}};
  ctx.emit("summary.json", dump(j));
}

void cmd_concentration(Context& ctx) {
  const EventLog log = load_events(ctx);
  std::vector<ConcentrationCurve> curves;
  std::vector<CategoryFilter> filters = {CategoryFilter::all(), CategoryFilter::fake()};
  for (auto c : kLabeledCategories) filters.push_back(CategoryFilter::only(c));
  for (const auto& f : filters) {
    try {
      curves.push_back(concentration_curve(log, f));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyResult || f.kind == CategoryFilter::Kind::All) throw;
      ctx.debug("no events for " + f.label());
    }
  }
  std::ostringstream os;
  write_curves_csv(os, curves);
  ctx.emit("concentration.csv", os.str());
}

Json density_json(const DensityMatrix& m) { return Json::parse(density_to_json(m)); }

NullModel null_model_of(Context& ctx) {
  const auto name = ctx.settings.get("null-model", "uniform");
  if (name == "uniform") return NullModel::UniformRandom;
  if (name == "configuration") return NullModel::Configuration;
  throw UsageError("--null-model must be uniform or configuration");
}

void cmd_density(Context& ctx) {
  const EventLog log = load_events(ctx);
  DensityOptions opts;
  opts.null_model = null_model_of(ctx);
  opts.weighting = ctx.settings.flag("simple-graph") ? EdgeWeighting::Simple : EdgeWeighting::Multiplicity;
  const double threshold = threshold_of(ctx);
  const auto main = sensitivity_sweep(log, {threshold}, opts).front();
  Json j = density_json(main.density);
  j["threshold"] = threshold;
  ctx.emit("density.json", dump(j));

  if (auto list = ctx.settings.find("thresholds")) {
    std::vector<double> thresholds;
    for (const auto& item : split(*list, ',')) {
      try {
        thresholds.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("--thresholds: bad value '" + item + "'");
      }
    }
    for (double t : thresholds) {
      if (!(t > 0.0 && t <= 1.0)) throw UsageError("--thresholds values must be in (0,1]");
    }
    Json sweep = Json::array();
    for (const auto& rec : sensitivity_sweep(log, thresholds, opts)) {
      Json r = density_json(rec.density);
      r["threshold"] = rec.threshold;
      sweep.push_back(r);
    }
    ctx.emit("density_sweep.json", dump(sweep));
  }
}

void cmd_transitions(Context& ctx) {
  const EventLog log = load_events(ctx);
  const auto m = transition_counts(daily_roles(ctx, log));
  Json counts = Json::array();
  for (const auto& row : m.counts) counts.push_back(row);
  ctx.emit("transitions.json", dump(Json{{"states", {"Creator", "Consumer", "Silent"}}, {"counts", counts}}));
}

void cmd_returns(Context& ctx) {
  const EventLog log = load_events(ctx);
  std::vector<GapBin> bins = default_gap_bins();
  if (auto text = ctx.settings.find("bins")) {
    try {
      bins = parse_gap_bins(*text);
    } catch (const Error& e) {
      throw UsageError(std::string("--bins: ") + e.what());
    }
  } else {
    ctx.settings.resolved["bins"] = "0-2,3-8,9-17,18-45";
  }
  const auto records = first_return_times(daily_roles(ctx, log));
  std::ostringstream os;
  os << "user,from,to,gap,from_window\n";
  for (const auto& r : records) {
    os << io::csv_field(log.users[r.user]) << ',' << role_name(r.from) << ',' << role_name(r.to) << ',' << r.gap
       << ',' << r.from_window << '\n';
  }
  ctx.emit("return_records.csv", os.str());
  ctx.emit("returns.json", return_profile_to_json(return_probability(records, bins)));
}

Json correlation_or_null(std::span<const double> a, std::span<const double> b) {
  try {
    return cross_correlation(a, b);
  } catch (const Error&) {
    return nullptr;
  }
}

void cmd_series(Context& ctx) {
  const EventLog log = load_events(ctx);
  const auto s = daily_series(log, daily_roles(ctx, log));
  std::ostringstream os;
  write_series_csv(os, s);
  ctx.emit("series.csv", os.str());
  Json j = {{"creator_vs_fake", correlation_or_null(s.creator_fraction, s.fake_fraction)},
            {"consumer_vs_fake", correlation_or_null(s.consumer_fraction, s.fake_fraction)},
            {"creator_vs_consumer", correlation_or_null(s.creator_fraction, s.consumer_fraction)},
            {"days", s.size()},
            {"missing_days", std::count(s.missing.begin(), s.missing.end(), true)},
            {"normalization", "fake over shares per day; groups over active users per day"}};
  ctx.emit("correlations.json", dump(j));
}

void cmd_ccm(Context& ctx) {
  ccm::CcmConfig base;
  base.embedding.tau = static_cast<int>(ctx.settings.integer("tau", 1));
  if (base.embedding.tau < 1) throw UsageError("--tau must be >= 1");
  base.time_delays = parse_time_delays(ctx.settings.get("td", "0"));
  base.surrogates = static_cast<int>(ctx.settings.integer("surrogates", 1000));
  if (base.surrogates < 1) throw UsageError("--surrogates must be >= 1");
  base.seed = ctx.seed;
  base.neighbors = static_cast<int>(ctx.settings.integer("neighbors", 0));
  base.sampling = ctx.settings.flag("random-library") ? ccm::LibrarySampling::Random : ccm::LibrarySampling::Sequential;

  std::vector<double> x;
  std::vector<double> y;
  const auto columns = split(ctx.settings.get("columns", "consumer_fraction,fake_fraction"), ',');
  if (columns.size() != 2) throw UsageError("--columns expects two names: x,y");
  if (auto path = ctx.settings.find("series")) {
    ctx.record_input("series", *path);
    std::ifstream in(*path, std::ios::binary);
    if (!in) fail(ErrorKind::UnreadableStream, *path);
    const auto table = io::read_numeric_csv(in);
    x = table.column(columns[0]);
    y = table.column(columns[1]);
  } else if (ctx.settings.find("events")) {
    const EventLog log = load_events(ctx);
    const auto s = daily_series(log, daily_roles(ctx, log));
    auto pick = [&](const std::string& name) -> const Series& {
      if (name == "fake_fraction") return s.fake_fraction;
      if (name == "creator_fraction") return s.creator_fraction;
      if (name == "consumer_fraction") return s.consumer_fraction;
      throw UsageError("unknown series column " + name);
    };
    x = pick(columns[0]);
    y = pick(columns[1]);
  } else {
    throw UsageError("ccm needs --series or --events");
  }
  const std::size_t filled_x = ccm::interpolate_missing(x);
  const std::size_t filled_y = ccm::interpolate_missing(y);
  if (filled_x + filled_y > 0) ctx.log("interpolated " + std::to_string(filled_x + filled_y) + " missing values");

  const auto threads = static_cast<unsigned>(ctx.settings.integer("threads", 0));
  const auto library_text = ctx.settings.get("library", "auto");
  std::vector<std::size_t> library_list;
  if (library_text != "auto") {
    for (const auto& item : split(library_text, ',')) {
      const auto v = parse_int_arg("library", item);
      if (v < 1) throw UsageError("--library sizes must be positive");
      library_list.push_back(static_cast<std::size_t>(v));
    }
    if (!std::is_sorted(library_list.begin(), library_list.end())) throw UsageError("--library must increase");
  }
  const auto fixed_dim = ctx.settings.find("embedding-dim");

  Json j;
  j["x"] = columns[0];
  j["y"] = columns[1];
  j["length"] = x.size();
  j["interpolated"] = {{"x", filled_x}, {"y", filled_y}};
  j["surrogates"] = base.surrogates;
  j["seed"] = base.seed;
  j["directions"] = Json::array();
  j["rows"] = Json::array();
  std::ostringstream csv;
  csv << "direction,td,L,rho,surrogate_p95,significant\n";

  for (auto dir : {ccm::Direction::XCausesY, ccm::Direction::YCausesX}) {
    ccm::CcmConfig cfg = base;
    const auto& manifold_series = dir == ccm::Direction::XCausesY ? y : x;
    Json dj;
    dj["direction"] = ccm::direction_name(dir);
    if (fixed_dim) {
      cfg.embedding.dimension = static_cast<int>(parse_int_arg("embedding-dim", *fixed_dim));
      if (cfg.embedding.dimension < 1) throw UsageError("--embedding-dim must be >= 1");
    } else {
      const auto sel = ccm::select_embedding(manifold_series, 10, cfg.embedding.tau);
      cfg.embedding.dimension = sel.best_dimension;
      dj["embedding_skill"] = sel.skill;
    }
    dj["embedding_dim"] = cfg.embedding.dimension;
    dj["tau"] = cfg.embedding.tau;
    dj["neighbors"] = cfg.k();

    // Convergence at td = 0 over the library ladder (or the given list).
    const std::size_t available = ccm::max_common_library(x.size(), cfg.embedding, std::vector<int>{0});
    std::vector<std::size_t> ladder = library_list;
    if (ladder.empty()) {
      const auto start = static_cast<std::size_t>(4 * cfg.embedding.dimension);
      if (start <= available) ladder = ccm::geometric_library_sizes(start, available);
    }
    ladder.erase(std::remove_if(ladder.begin(), ladder.end(),
                                [&](std::size_t l) { return l < static_cast<std::size_t>(cfg.k()) + 1; }),
                 ladder.end());
    Json conv = Json::array();
    if (ladder.size() >= 2) {
      ccm::CcmConfig conv_cfg = cfg;
      conv_cfg.library_sizes = ladder;
      const auto& source = dir == ccm::Direction::XCausesY ? y : x;
      const auto& target = dir == ccm::Direction::XCausesY ? x : y;
      const auto profile = ccm::convergence_profile(source, target, conv_cfg, 0);
      for (std::size_t i = 0; i < profile.rho.size(); ++i) {
        conv.push_back({{"L", profile.library_sizes[i]}, {"rho", profile.rho[i]}});
      }
      dj["convergence_trend"] = profile.trend;
      dj["convergence_kendall_tau"] = profile.kendall_tau;
      dj["converging"] = profile.converging;
    }
    dj["convergence"] = conv;

    if (!library_list.empty()) cfg.library_sizes = {library_list.back()};
    const auto result = ccm::surrogate_test(x, y, cfg, dir, threads);
    const auto peak = std::max_element(result.rows.begin(), result.rows.end(),
                                       [](const auto& a, const auto& b) { return a.rho < b.rho; });
    dj["library_size"] = result.rows.front().library_size;
    dj["peak_td"] = peak->td;
    j["directions"].push_back(dj);
    for (const auto& row : result.rows) {
      j["rows"].push_back({{"direction", ccm::direction_name(dir)},
                           {"td", row.td},
                           {"L", row.library_size},
                           {"rho", row.rho},
                           {"surrogate_p95", row.p95},
                           {"significant", row.significant}});
      csv << ccm::direction_name(dir) << ',' << row.td << ',' << row.library_size << ','
          << io::format_double(row.rho) << ',' << io::format_double(row.p95) << ',' << (row.significant ? 1 : 0)
          << '\n';
    }
    ctx.log(std::string(ccm::direction_name(dir)) + ": E=" + std::to_string(cfg.embedding.dimension) +
            " peak td=" + std::to_string(peak->td));
  }
  ctx.emit("ccm.json", dump(j));
  ctx.emit("ccm.csv", csv.str());
}

void cmd_synth(Context& ctx) {
  const auto kind = ctx.settings.get("kind", "population");
  synth::KeyValues params;
  static const std::set<std::string> reserved = {"kind", "format", "out", "seed", "config"};
  for (const auto& [k, v] : ctx.settings.file) {
    if (!reserved.contains(k)) params[k] = v;
  }
  for (const auto& [k, v] : params) ctx.settings.resolved["param." + k] = v;
  try {
    if (kind == "population") {
      synth::PopulationParams p;
      synth::apply_config(p, params);
      p.seed = ctx.seed;
      const auto pop = synth::gen_population(p);
      const Format fmt = output_format(ctx);
      std::ostringstream os;
      write_events(os, pop.log, fmt);
      ctx.emit(fmt == Format::Csv ? "events.csv" : "events.jsonl", os.str());
      std::ostringstream roles;
      write_roles_csv(roles, pop.planted, pop.log);
      ctx.emit("planted_roles.csv", roles.str());
      ctx.log("generated " + std::to_string(pop.log.size()) + " events for " + std::to_string(pop.log.users.size()) +
              " users");
    } else if (kind == "coupled" || kind == "lag") {
      synth::CoupledMapParams p = kind == "lag" ? synth::CoupledMapParams::lag_defaults() : synth::CoupledMapParams{};
      synth::apply_config(p, params);
      p.seed = ctx.seed;
      const auto s = kind == "lag" ? synth::gen_lag_coupled(p) : synth::gen_coupled_logistic(p);
      std::ostringstream os;
      os << "t,x,y\n";
      for (std::size_t t = 0; t < s.x.size(); ++t) {
        os << t << ',' << io::format_double(s.x[t]) << ',' << io::format_double(s.y[t]) << '\n';
      }
      ctx.emit("series.csv", os.str());
    } else {
      throw UsageError("--kind must be population, coupled or lag");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidParams) throw UsageError(e.what());
    throw;
  }
}

void cmd_report(Context& ctx) {
  const fs::path run_dir = ctx.settings.require("run");
  for (const char* name : {"concentration.csv", "density.json", "returns.json", "series.csv", "ccm.json"}) {
    if (fs::exists(run_dir / name)) ctx.record_input(name, run_dir / name);
  }
  write_report(run_dir);
  for (const char* name : {"report.md", "fig1_concentration.svg", "fig2_density.svg", "fig3_returns.svg",
                           "fig4a_series.svg", "fig4b_ccm.svg"}) {
    ctx.outputs.push_back((run_dir / name).generic_string());
  }
}

void write_manifest(const Context& ctx) {
  const fs::path path = ctx.out_dir / "manifest.json";
  Json manifest = Json::object();
  if (fs::exists(path)) {
    manifest = Json::parse(io::read_file(path), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) manifest = Json::object();
  }
  manifest["tool_version"] = kToolVersion;
  Json entry;
  entry["subcommand"] = ctx.subcommand;
  entry["config"] = ctx.settings.resolved;
  entry["inputs"] = ctx.inputs;
  entry["seed"] = ctx.seed;
  entry["outputs"] = ctx.outputs;
  manifest["runs"][ctx.subcommand] = entry;
  io::write_file(path, dump(manifest));
}

struct Subcommand {
  const char* name;
  const char* help;
  void (*handler)(Context&);
  std::vector<const char*> options;
  std::vector<const char*> flags;
};

const std::vector<const char*> kEventOptions = {"events", "categories", "from", "to", "max-malformed"};

std::vector<Subcommand> subcommands() {
  auto with_events = [](std::vector<const char*> extra) {
    std::vector<const char*> all = kEventOptions;
    all.insert(all.end(), extra.begin(), extra.end());
    return all;
  };
  return {
      {"ingest", "parse, label and filter an event log", cmd_ingest, with_events({"format"}), {"exclude-unlabeled"}},
      {"classify", "per-window creator/consumer roles", cmd_classify, with_events({"threshold", "window"}),
       {"exclude-unlabeled"}},
      {"summary", "only-creator / only-consumer / mixed behavior counts", cmd_summary,
       with_events({"threshold", "window"}), {"exclude-unlabeled"}},
      {"concentration", "content concentration curves", cmd_concentration, with_events({}), {"exclude-unlabeled"}},
      {"density", "inter-group link density against a null model", cmd_density,
       with_events({"threshold", "thresholds", "null-model"}), {"exclude-unlabeled", "simple-graph"}},
      {"transitions", "day-to-day role transition counts", cmd_transitions, with_events({"threshold"}),
       {"exclude-unlabeled"}},
      {"returns", "first-return times and return-role probabilities", cmd_returns,
       with_events({"threshold", "bins"}), {"exclude-unlabeled"}},
      {"series", "daily fake/creator/consumer fractions and correlations", cmd_series, with_events({"threshold"}),
       {"exclude-unlabeled"}},
      {"ccm", "lagged convergent cross mapping with surrogate test", cmd_ccm,
       with_events({"series", "columns", "threshold", "embedding-dim", "tau", "td", "library", "surrogates",
                    "neighbors", "threads"}),
       {"exclude-unlabeled", "random-library"}},
      {"synth", "generate synthetic event logs or coupled series", cmd_synth, {"kind", "format"}, {}},
      {"report", "render a report from a run directory", cmd_report, {"run"}, {}},
  };
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Creator/consumer misinformation analytics and convergent cross mapping"};
  app.require_subcommand(1);
  app.name(args.empty() ? "infodemic" : fs::path(args.front()).filename().string());

  Context ctx;
  ctx.err = &err;
  ctx.level = log_level();
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flag_values;
  std::map<std::string, CLI::Option*> registered;
  const auto subs = subcommands();
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    for (const char* common : {"config", "out", "seed"}) {
      registered[std::string(s.name) + "/" + common] = sub->add_option(std::string("--") + common, values[common]);
    }
    for (const char* o : s.options) {
      registered[std::string(s.name) + "/" + o] = sub->add_option(std::string("--") + o, values[o]);
    }
    for (const char* f : s.flags) {
      registered[std::string(s.name) + "/" + f] = sub->add_flag(std::string("--") + f, flag_values[f]);
    }
    apps.push_back(sub);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  const Subcommand* chosen = nullptr;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (apps[i]->parsed()) chosen = &subs[i];
  }
  ctx.subcommand = chosen->name;
  for (const auto& [key, opt] : registered) {
    const auto slash = key.find('/');
    if (key.substr(0, slash) != ctx.subcommand || opt->count() == 0) continue;
    const auto name = key.substr(slash + 1);
    ctx.settings.cli[name] = flag_values.contains(name) ? (flag_values[name] ? "true" : "false") : values[name];
  }

  try {
    if (auto cfg = ctx.settings.cli.find("config"); cfg != ctx.settings.cli.end()) {
      try {
        ctx.settings.file = io::read_key_values(cfg->second);
      } catch (const Error& e) {
        throw UsageError(std::string("--config: ") + e.what());
      }
      ctx.record_input("config", cfg->second);
    }
    ctx.out_dir = ctx.settings.get("out", "out");
    if (ctx.subcommand == "report" && !ctx.settings.cli.contains("out") && !ctx.settings.file.contains("out")) {
      ctx.out_dir = ctx.settings.require("run");
      ctx.settings.resolved["out"] = ctx.out_dir.generic_string();
    }
    const auto seed = ctx.settings.integer("seed", 1);
    if (seed < 0) throw UsageError("--seed must be non-negative");
    ctx.seed = static_cast<std::uint64_t>(seed);
    chosen->handler(ctx);
    write_manifest(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << apps[static_cast<std::size_t>(chosen - subs.data())]->help();
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace infodemic::cli
