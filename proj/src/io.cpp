#include "eternal/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eternal::io {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_atomic(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += format_double(row[i]);
    }
    s += '\n';
  }
  return s;
}

std::string profile_csv(const ProfileGrid& grid, const std::string& extra_name, const std::vector<double>& extra) {
  const bool with_extra = !extra_name.empty();
  if (with_extra && extra.size() != grid.points.size())
    throw std::invalid_argument("extra column length differs from the profile");
  std::vector<std::string> header{"xi", "f", "w"};
  if (with_extra) header.push_back(extra_name);
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto& q = grid.points[i];
    rows.push_back({q.xi, q.f, q.w});
    if (with_extra) rows.back().push_back(extra[i]);
  }
  return csv(header, rows);
}

std::vector<ProfilePoint> read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("xi,f,w", 0) != 0)
    throw std::runtime_error(path.string() + ": expected header starting with xi,f,w");
  std::vector<ProfilePoint> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[3];
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": short row");
      try {
        std::size_t used = 0;
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    pts.push_back({v[0], v[1], v[2]});
  }
  return pts;
}

}  // namespace eternal::io
