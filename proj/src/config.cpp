#include "abring/config.hpp"

#include "abring/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace abring {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(std::string_view s, int line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected a number, got '" + std::string(s) + "'", line);
  }
  return v;
}

int to_int(std::string_view s, int line) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected an integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

bool to_bool(std::string_view s, int line) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("expected a boolean, got '" + std::string(s) + "'", line);
}

// "0-19, 25" -> {0, .., 19, 25}
std::vector<int> to_int_list(std::string_view s, int line) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (auto item : split(s, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(to_int(item, line));
      continue;
    }
    const int lo = to_int(item.substr(0, dash), line);
    const int hi = to_int(item.substr(dash + 1), line);
    if (hi < lo) throw ConfigError("empty range '" + std::string(item) + "'", line);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

// "0, 0.5" or "0:3:0.02" (inclusive of stop when it lies on the grid)
std::vector<double> to_double_list(std::string_view s, int line) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto item : split(s, ',')) {
    if (item.find(':') == std::string_view::npos) {
      out.push_back(to_double(item, line));
      continue;
    }
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step", line);
    const double start = to_double(parts[0], line);
    const double stop = to_double(parts[1], line);
    const double step = to_double(parts[2], line);
    if (!(step > 0.0) || stop < start) throw ConfigError("range needs step > 0 and stop >= start", line);
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(start + step * static_cast<double>(k));
  }
  return out;
}

OutputFormat to_format(std::string_view s, int line) {
  s = trim(s);
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json, got '" + std::string(s) + "'", line);
}

using Setter = std::function<void(SweepConfig&, std::string_view, int)>;

struct KeySpec {
  const char* section;
  Setter set;
};

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  static const std::map<std::string, KeySpec, std::less<>> table = {
      {"n_ring", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.n_ring = to_int(v, l); }}},
      {"lead_i_sites", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.lead_i_sites = to_int_list(v, l); }}},
      {"lead_ii_sites", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.lead_ii_sites = to_int_list(v, l); }}},
      {"sc_sites", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.sc_sites = to_int_list(v, l); }}},
      {"mx", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.mx = to_int(v, l); }}},
      {"my", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.device.geometry.my = to_int(v, l); }}},
      {"ring_contact_start", {"geometry", [](SweepConfig& c, std::string_view v, int l) { c.ring_contact_start = to_int(v, l); }}},

      {"eps_ring", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.eps_ring = to_double(v, l); }}},
      {"t_ring", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.t_ring = to_double(v, l); }}},
      {"eps_spacer", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.eps_spacer = to_double(v, l); }}},
      {"t_x", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.t_x = to_double(v, l); }}},
      {"t_y", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.t_y = to_double(v, l); }}},
      {"t_x_prime", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.params.t_x_prime = to_double(v, l); }}},
      {"flux_a", {"params", [](SweepConfig& c, std::string_view v, int l) { c.flux_a = to_double(v, l); }}},
      {"flux_b", {"params", [](SweepConfig& c, std::string_view v, int l) { c.flux_b = to_double(v, l); }}},
      {"gamma_i", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.gamma_i = to_double(v, l); }}},
      {"gamma_ii", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.gamma_ii = to_double(v, l); }}},
      {"t_ar", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.coupling.t_ar = to_double(v, l); }}},
      {"delta_abs", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.coupling.delta_abs = to_double(v, l); }}},
      {"g", {"params", [](SweepConfig& c, std::string_view v, int l) { c.device.coupling.g = to_double(v, l); }}},
      {"energy", {"params", [](SweepConfig& c, std::string_view v, int l) { c.energy = to_double(v, l); }}},

      {"experiment", {"sweep", [](SweepConfig& c, std::string_view v, int l) {
         try {
           c.experiment = parse_experiment(trim(v));
         } catch (const ConfigError& e) {
           throw ConfigError(e.what(), l);
         }
       }}},
      {"e_min", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.grid.e_min = to_double(v, l); }}},
      {"e_max", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.grid.e_max = to_double(v, l); }}},
      {"n_points", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.grid.n_points = to_int(v, l); }}},
      {"t_ar_values", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.t_ar_values = to_double_list(v, l); }}},
      {"mx_values", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.mx_values = to_int_list(v, l); }}},
      {"my_values", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.my_values = to_int_list(v, l); }}},
      {"fit_mx_min", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.fit_mx_min = to_int(v, l); }}},
      {"fit_mx_max", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.fit_mx_max = to_int(v, l); }}},
      {"workers", {"sweep", [](SweepConfig& c, std::string_view v, int l) { c.workers = to_int(v, l); }}},

      {"out_dir", {"output", [](SweepConfig& c, std::string_view v, int) { c.output.out_dir = std::string(trim(v)); }}},
      {"format", {"output", [](SweepConfig& c, std::string_view v, int l) { c.output.format = to_format(v, l); }}},
      {"ldos", {"output", [](SweepConfig& c, std::string_view v, int l) { c.output.ldos = to_bool(v, l); }}},
      {"plot", {"output", [](SweepConfig& c, std::string_view v, int l) { c.output.plot = to_bool(v, l); }}},
      {"strict", {"output", [](SweepConfig& c, std::string_view v, int l) { c.output.strict = to_bool(v, l); }}},
  };
  return table;
}

void apply_key(SweepConfig& config, std::string_view section, std::string_view key, std::string_view value,
               int line) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line);
  if (!section.empty() && section != it->second.section) {
    throw ConfigError("key '" + std::string(key) + "' belongs to [" + it->second.section + "], not [" +
                          std::string(section) + "]",
                      line);
  }
  it->second.set(config, value, line);
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::EnergyTriptych, Experiment::ContrastVsTar, Experiment::DephasingVsMx,
                       Experiment::SinglePoint}) {
    if (name == experiment_name(e)) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

void apply_config_text(SweepConfig& config, std::string_view text) {
  static constexpr std::string_view kSections[] = {"geometry", "params", "sweep", "output"};
  std::string_view section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections)) {
        throw ConfigError("unknown section [" + std::string(name) + "]", line_no);
      }
      section = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    apply_key(config, section, key, trim(line.substr(eq + 1)), line_no);
  }
}

void apply_override(SweepConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  auto key = trim(assignment.substr(0, eq));
  std::string_view section;
  if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }
  apply_key(config, section, key, trim(assignment.substr(eq + 1)), 0);
}

void resolve_config(SweepConfig& config) {
  config.device.params.flux = config.flux_a;
  Geometry& g = config.device.geometry;
  if (g.mx > 0) {
    g = spacer_geometry(config, g.mx, g.my);
  } else {
    g.ring_contact_sites.clear();
  }
  config.validate();
}

SweepConfig parse_config(std::string_view text) {
  SweepConfig config = SweepConfig::preset();
  apply_config_text(config, text);
  resolve_config(config);
  return config;
}

nlohmann::ordered_json describe_config(const SweepConfig& c) {
  using nlohmann::ordered_json;
  const Geometry& g = c.device.geometry;
  const TightBindingParams& p = c.device.params;
  ordered_json j;
  j["experiment"] = experiment_name(c.experiment);
  j["geometry"] = {{"n_ring", g.n_ring},
                   {"lead_i_sites", g.lead_i_sites},
                   {"lead_ii_sites", g.lead_ii_sites},
                   {"sc_sites", g.sc_sites},
                   {"mx", g.mx},
                   {"my", g.my},
                   {"ring_contact_sites", g.ring_contact_sites},
                   {"ring_contact_start", c.ring_contact_start},
                   {"total_sites", g.total_sites()}};
  j["params"] = {{"eps_ring", p.eps_ring},
                 {"t_ring", p.t_ring},
                 {"eps_spacer", p.eps_spacer},
                 {"t_x", p.t_x},
                 {"t_y", p.t_y},
                 {"t_x_prime", p.t_x_prime},
                 {"flux_a", c.flux_a},
                 {"flux_b", c.flux_b},
                 {"gamma_i", c.device.gamma_i},
                 {"gamma_ii", c.device.gamma_ii},
                 {"t_ar", c.device.coupling.t_ar},
                 {"delta_abs", c.device.coupling.delta_abs},
                 {"g", c.device.coupling.g},
                 {"andreev_coefficient", c.device.coupling.coefficient()},
                 {"energy", c.energy},
                 {"peierls_gauge", "distributed"}};
  j["sweep"] = {{"e_min", c.grid.e_min},
                {"e_max", c.grid.e_max},
                {"n_points", c.grid.n_points},
                {"t_ar_values", c.t_ar_values},
                {"mx_values", c.mx_values},
                {"my_values", c.my_values},
                {"fit_mx_min", c.fit_mx_min},
                {"fit_mx_max", c.fit_mx_max},
                {"workers", c.workers}};
  j["output"] = {{"out_dir", c.output.out_dir},
                 {"format", c.output.format == OutputFormat::Csv ? "csv" : "json"},
                 {"ldos", c.output.ldos},
                 {"plot", c.output.plot},
                 {"strict", c.output.strict}};
  return j;
}

}  // namespace abring
