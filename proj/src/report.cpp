#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "infodemic/cli.hpp"
#include "infodemic/error.hpp"
#include "infodemic/io.hpp"
#include "infodemic/svg.hpp"
#include "infodemic/temporal.hpp"
#include "json.hpp"

namespace infodemic::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr const char* kRequired[] = {"concentration.csv", "density.json", "returns.json", "series.csv", "ccm.json"};

const std::vector<std::string> kPalette = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v, int digits = 3) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

struct CurveRows {
  std::vector<std::string> order;
  std::map<std::string, svg::Line> lines;
};

CurveRows read_curves(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  std::getline(in, line);
  CurveRows rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = io::split_csv_line(line);
    if (!fields || fields->size() != 3) fail(ErrorKind::InvalidArgument, "concentration.csv row");
    const auto& label = (*fields)[2];
    auto [it, inserted] = rows.lines.try_emplace(label);
    if (inserted) {
      rows.order.push_back(label);
      it->second.label = label;
    }
    it->second.x.push_back(std::stod((*fields)[0]));
    it->second.y.push_back(std::stod((*fields)[1]));
  }
  return rows;
}

std::string figure_concentration(const CurveRows& curves, std::ostringstream& md) {
  std::vector<svg::Line> lines;
  lines.push_back({"equality", "#999999", {0.0, 1.0}, {0.0, 1.0}, true});
  md << "| category | users | content share of top 1% | top 10% |\n|---|---|---|---|\n";
  for (std::size_t i = 0; i < curves.order.size(); ++i) {
    auto line = curves.lines.at(curves.order[i]);
    line.color = kPalette[i % kPalette.size()];
    auto share_at = [&](double x) {
      double y = 0.0;
      for (std::size_t k = 0; k < line.x.size() && line.x[k] <= x + 1e-12; ++k) y = line.y[k];
      return y;
    };
    md << "| " << line.label << " | " << line.x.size() << " | " << fixed(share_at(0.01)) << " | "
       << fixed(share_at(0.10)) << " |\n";
    lines.push_back(std::move(line));
  }
  return svg::line_plot({"Content concentration", "fraction of users", "fraction of content", 0.0, 1.0}, lines);
}

std::string figure_density(const Json& density, std::ostringstream& md) {
  std::vector<svg::BarGroup> groups;
  md << "| from | to | observed | expected | ratio |\n|---|---|---|---|---|\n";
  for (const auto& cell : density.at("cells")) {
    const auto from = cell.at("from").get<std::string>();
    const auto to = cell.at("to").get<std::string>();
    const double ratio = cell.at("ratio").is_null() ? std::nan("") : cell.at("ratio").get<double>();
    groups.push_back({from + "->" + to, {ratio}});
    md << "| " << from << " | " << to << " | " << cell.at("observed").get<double>() << " | "
       << fixed(cell.at("expected").get<double>(), 2) << " | " << fixed(ratio) << " |\n";
  }
  return svg::bar_chart({"Link density relative to null model", "group pair", "observed / expected", 0.0, {}},
                        {"ratio"}, {"#1f77b4"}, groups, 1.0);
}

std::string figure_returns(const ReturnProfile& profile, std::ostringstream& md) {
  std::vector<svg::BarGroup> groups;
  md << "| from | gap (days) | returns | P(creator) | P(consumer) |\n|---|---|---|---|---|\n";
  for (Role from : {Role::Creator, Role::Consumer}) {
    for (std::size_t b = 0; b < profile.bins.size(); ++b) {
      const auto& st = profile.stats[role_index(from)][b];
      const auto range = std::to_string(profile.bins[b].lo) + "-" + std::to_string(profile.bins[b].hi);
      const double pc = st.p_creator.value_or(std::nan(""));
      const double pu = st.p_consumer.value_or(std::nan(""));
      groups.push_back({std::string(role_name(from)) + " " + range, {pc, pu}});
      md << "| " << role_name(from) << " | " << range << " | " << st.to_creator + st.to_consumer << " | "
         << fixed(pc) << " | " << fixed(pu) << " |\n";
    }
  }
  md << "\nReturns outside every bin: " << profile.uncovered << "\n";
  return svg::bar_chart({"Role on first return", "previous role and gap", "probability", 0.0, 1.0},
                        {"returns as creator", "returns as consumer"}, {"#d62728", "#1f77b4"}, groups);
}

std::string figure_series(const DailySeries& s, std::ostringstream& md) {
  std::vector<double> days(s.size());
  for (std::size_t i = 0; i < days.size(); ++i) days[i] = static_cast<double>(i);
  auto smooth = [](const Series& v) { return minmax_rescale(moving_average(v, 10)); };
  std::vector<svg::Line> lines = {
      {"fake fraction", "#000000", days, smooth(s.fake_fraction), false},
      {"consumer fraction", "#1f77b4", days, smooth(s.consumer_fraction), false},
      {"creator fraction", "#d62728", days, smooth(s.creator_fraction), false},
  };
  auto corr = [](const Series& a, const Series& b) {
    try {
      return fixed(cross_correlation(a, b));
    } catch (const Error&) {
      return std::string("n/a");
    }
  };
  md << "| pair | Pearson r (raw daily) |\n|---|---|\n"
     << "| consumer vs fake | " << corr(s.consumer_fraction, s.fake_fraction) << " |\n"
     << "| creator vs fake | " << corr(s.creator_fraction, s.fake_fraction) << " |\n"
     << "\nLines are 10-day moving averages, each rescaled to [0,1].\n";
  return svg::line_plot({"Daily fractions (10-day moving average, rescaled)", "day", "rescaled value", 0.0, 1.0},
                        lines);
}

std::string figure_ccm(const Json& ccm, std::ostringstream& md) {
  std::map<std::string, svg::Line> rho;
  std::map<std::string, svg::Line> p95;
  const std::map<std::string, std::string> color = {{"x_causes_y", "#d62728"}, {"y_causes_x", "#1f77b4"}};
  const auto x = ccm.value("x", std::string("x"));
  const auto y = ccm.value("y", std::string("y"));
  auto pretty = [&](const std::string& dir) { return dir == "x_causes_y" ? x + " -> " + y : y + " -> " + x; };
  md << "| direction | td | L | rho | surrogate 95th pct | significant |\n|---|---|---|---|---|---|\n";
  for (const auto& row : ccm.at("rows")) {
    const auto dir = row.at("direction").get<std::string>();
    auto& r = rho[dir];
    auto& q = p95[dir];
    r.label = pretty(dir);
    r.color = color.at(dir);
    q.label = pretty(dir) + " surrogate 95%";
    q.color = color.at(dir);
    q.dashed = true;
    const double td = row.at("td").get<double>();
    r.x.push_back(td);
    q.x.push_back(td);
    r.y.push_back(row.at("rho").get<double>());
    q.y.push_back(row.at("surrogate_p95").get<double>());
    md << "| " << pretty(dir) << " | " << row.at("td").get<int>() << " | " << row.at("L").get<int>() << " | "
       << fixed(r.y.back()) << " | " << fixed(q.y.back()) << " | " << (row.at("significant").get<bool>() ? "yes" : "no")
       << " |\n";
  }
  std::vector<svg::Line> lines;
  for (const auto& [dir, line] : rho) {
    lines.push_back(line);
    lines.push_back(p95.at(dir));
  }
  return svg::line_plot({"Lagged cross-map skill", "time delay (days)", "rho", {}, 1.0}, lines);
}

}  // namespace

void write_report(const fs::path& run_dir) {
  for (const char* name : kRequired) {
    if (!fs::exists(run_dir / name)) fail(ErrorKind::MissingArtifact, name);
  }
  auto parse_json = [&](const char* name) {
    auto j = Json::parse(io::read_file(run_dir / name), nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::InvalidArgument, name);
    return j;
  };
  const auto density = parse_json("density.json");
  const auto ccm = parse_json("ccm.json");
  const auto returns = return_profile_from_json(io::read_file(run_dir / "returns.json"));
  std::ifstream series_in(run_dir / "series.csv", std::ios::binary);
  const auto series = read_series_csv(series_in);

  std::ostringstream md;
  md << "# Fake-news spreading report\n\n";

  md << "## Content concentration\n\n![concentration](fig1_concentration.svg)\n\n";
  io::write_file(run_dir / "fig1_concentration.svg", figure_concentration(read_curves(run_dir / "concentration.csv"), md));

  md << "\n## Link density between groups\n\n![density](fig2_density.svg)\n\n";
  md << "Null model: " << density.value("null_model", std::string("uniform")) << ". ";
  md << "Total links: " << density.value("total_links", 0.0) << ".\n\n";
  io::write_file(run_dir / "fig2_density.svg", figure_density(density, md));

  md << "\n## Return times\n\n![returns](fig3_returns.svg)\n\n";
  io::write_file(run_dir / "fig3_returns.svg", figure_returns(returns, md));

  md << "\n## Daily series\n\n![series](fig4a_series.svg)\n\n";
  io::write_file(run_dir / "fig4a_series.svg", figure_series(series, md));

  md << "\n## Convergent cross mapping\n\n![ccm](fig4b_ccm.svg)\n\n";
  io::write_file(run_dir / "fig4b_ccm.svg", figure_ccm(ccm, md));

  io::write_file(run_dir / "report.md", md.str());
}

}  // namespace infodemic::cli
