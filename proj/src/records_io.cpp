#include "abring/records_io.hpp"

#include "abring/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace abring {

namespace {

constexpr int kFixedColumns = 16;

std::size_t ldos_width(const std::vector<ObservableRecord>& records) {
  std::size_t width = 0;
  for (const auto& r : records) {
    if (r.ldos.empty()) continue;
    if (width != 0 && r.ldos.size() != width) {
      throw IoError("schema mismatch: records carry LDOS vectors of different lengths (" + std::to_string(width) +
                    " vs " + std::to_string(r.ldos.size()) + ")");
    }
    width = r.ldos.size();
  }
  return width;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad number in CSV: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> columns = {
      "energy",   "flux_a",   "flux_b", "t_ar",   "mx",           "my",           "T_bare_a", "T_bare_b",
      "T_full_a", "T_full_b", "C_bare", "C_full", "dephasing_re", "dephasing_im", "rate",     "error_flag"};
  return columns;
}

double record_column(const ObservableRecord& r, const std::string& name) {
  if (name == "energy") return r.energy;
  if (name == "flux_a") return r.flux_a;
  if (name == "flux_b") return r.flux_b;
  if (name == "t_ar") return r.t_ar;
  if (name == "mx") return r.mx;
  if (name == "my") return r.my;
  if (name == "T_bare_a") return r.t_bare_a;
  if (name == "T_bare_b") return r.t_bare_b;
  if (name == "T_full_a") return r.t_full_a;
  if (name == "T_full_b") return r.t_full_b;
  if (name == "C_bare") return r.c_bare;
  if (name == "C_full") return r.c_full;
  if (name == "dephasing_re") return r.dephasing.real();
  if (name == "dephasing_im") return r.dephasing.imag();
  if (name == "rate") return r.rate;
  if (name == "error_flag") return r.error_flag;
  if (name.rfind("site_", 0) == 0) {
    std::size_t k = 0;
    const std::string idx = name.substr(5);
    const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
    if (ec != std::errc() || ptr != idx.data() + idx.size()) throw ArgumentError("unknown column '" + name + "'");
    if (r.ldos.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (k >= r.ldos.size()) throw ArgumentError("column '" + name + "' outside the LDOS vector");
    return r.ldos[k];
  }
  throw ArgumentError("unknown column '" + name + "'");
}

bool has_column(const std::vector<ObservableRecord>& records, const std::string& name) {
  for (const auto& c : record_columns()) {
    if (c == name) return true;
  }
  if (name.rfind("site_", 0) != 0) return false;
  const std::size_t width = ldos_width(records);
  const std::string idx = name.substr(5);
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
  return ec == std::errc() && ptr == idx.data() + idx.size() && k < width;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string records_to_csv(const std::vector<ObservableRecord>& records, bool with_ldos) {
  const std::size_t width = with_ldos ? ldos_width(records) : 0;
  std::string out;
  out.reserve(records.size() * (kFixedColumns + width) * 24);
  const auto& cols = record_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += cols[c];
  }
  for (std::size_t k = 0; k < width; ++k) out += ",site_" + std::to_string(k);
  out += '\n';

  for (const auto& r : records) {
    const double fixed[] = {r.energy,   r.flux_a,   r.flux_b, r.t_ar,   0.0, 0.0, r.t_bare_a, r.t_bare_b,
                            r.t_full_a, r.t_full_b, r.c_bare, r.c_full, r.dephasing.real(), r.dephasing.imag(),
                            r.rate};
    for (int c = 0; c < 15; ++c) {
      if (c) out += ',';
      if (c == 4) {
        out += std::to_string(r.mx);
      } else if (c == 5) {
        out += std::to_string(r.my);
      } else {
        out += format_double(fixed[c]);
      }
    }
    out += ',';
    out += std::to_string(r.error_flag);
    for (std::size_t k = 0; k < width; ++k) {
      out += ',';
      out += format_double(r.ldos.empty() ? std::numeric_limits<double>::quiet_NaN() : r.ldos[k]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json records_to_json(const std::vector<ObservableRecord>& records, bool with_ldos) {
  const std::size_t width = with_ldos ? ldos_width(records) : 0;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    for (const auto& c : record_columns()) {
      if (c == "mx" || c == "my" || c == "error_flag") {
        o[c] = static_cast<int>(record_column(r, c));
      } else {
        o[c] = num(record_column(r, c));
      }
    }
    if (!r.error.empty()) o["error"] = r.error;
    if (width > 0) {
      nlohmann::ordered_json l = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < width; ++k) l.push_back(r.ldos.empty() ? nullptr : num(r.ldos[k]));
      o["ldos"] = std::move(l);
    }
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<ObservableRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  const auto header = split_csv_line(line);
  const auto& cols = record_columns();
  if (header.size() < cols.size()) throw IoError("CSV header is missing fixed columns");
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (header[c] != cols[c]) throw IoError("unexpected CSV column '" + header[c] + "', wanted '" + cols[c] + "'");
  }
  const std::size_t width = header.size() - cols.size();

  std::vector<ObservableRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw IoError("CSV row has " + std::to_string(cells.size()) + " cells");
    ObservableRecord r;
    r.energy = parse_double(cells[0]);
    r.flux_a = parse_double(cells[1]);
    r.flux_b = parse_double(cells[2]);
    r.t_ar = parse_double(cells[3]);
    r.mx = std::stoi(cells[4]);
    r.my = std::stoi(cells[5]);
    r.t_bare_a = parse_double(cells[6]);
    r.t_bare_b = parse_double(cells[7]);
    r.t_full_a = parse_double(cells[8]);
    r.t_full_b = parse_double(cells[9]);
    r.c_bare = parse_double(cells[10]);
    r.c_full = parse_double(cells[11]);
    r.dephasing = Complex(parse_double(cells[12]), parse_double(cells[13]));
    r.rate = parse_double(cells[14]);
    r.error_flag = std::stoi(cells[15]);
    for (std::size_t k = 0; k < width; ++k) r.ldos.push_back(parse_double(cells[cols.size() + k]));
    records.push_back(std::move(r));
  }
  return records;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["software"] = {{"name", "abring"}, {"version", version}};
  j["timestamp"] = timestamp;
  j["config"] = config;
  j["grid"] = {{"rows", rows}, {"ldos_columns", ldos_columns}};
  nlohmann::ordered_json errs = nlohmann::ordered_json::array();
  for (const auto& [index, what] : errors) errs.push_back({{"index", index}, {"error", what}});
  j["errors"] = {{"count", error_count}, {"flagged_residual", flagged_count},
                 {"undefined_contrast", undefined_contrast_count}, {"points", errs}};
  j["outputs"] = outputs;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

RunManifest write_records(const std::vector<ObservableRecord>& records, OutputFormat format,
                          const std::filesystem::path& path, bool with_ldos) {
  RunManifest m;
  m.rows = records.size();
  m.ldos_columns = with_ldos ? ldos_width(records) : 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].error_flag == 1) {
      ++m.error_count;
      m.errors.emplace_back(i, records[i].error);
    } else if (records[i].error_flag == 2) {
      ++m.flagged_count;
    } else if (records[i].error_flag == 3) {
      ++m.undefined_contrast_count;
    }
  }
  if (format == OutputFormat::Csv) {
    write_text_file(path, records_to_csv(records, with_ldos));
  } else {
    write_text_file(path, records_to_json(records, with_ldos).dump(1) + "\n");
  }
  m.outputs.push_back(path.filename().string());
  return m;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace abring
