#include "genou/series_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace genou {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, long line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError("series csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_series_csv(std::ostream& out, const SkeletonSeries& s) {
  out << "# model_hash: " << s.model_id << "\n";
  out << "# h: " << format_double(s.h) << "\n";
  out << "# seed: " << s.seed << "\n";
  out << "# burn_in: " << s.burn_in << "\n";
  out << "# subgrid: " << s.subgrid << "\n";
  out << "# convention: " << s.convention << "\n";
  out << "k,V,H,I\n";
  out << "0," << format_double(s.V[0]) << ",,\n";
  for (Eigen::Index k = 0; k < s.H.size(); ++k) {
    out << (k + 1) << ',' << format_double(s.V[k + 1]) << ',' << format_double(s.H[k]) << ','
        << format_double(s.I[k]) << '\n';
  }
}

SkeletonSeries read_series_csv(std::istream& in) {
  SkeletonSeries s;
  std::vector<double> V, H, I;
  std::string line;
  long line_no = 0;
  int columns = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = trim(line.substr(1, colon - 1)), val = trim(line.substr(colon + 1));
      if (key == "model_hash") s.model_id = val;
      else if (key == "h") s.h = parse_number(val, line_no);
      else if (key == "seed") s.seed = std::stoull(val);
      else if (key == "burn_in") s.burn_in = std::stol(val);
      else if (key == "subgrid") s.subgrid = std::stoi(val);
      else if (key == "convention") s.convention = val;
      continue;
    }
    auto cells = split_commas(line);
    if (columns == 0) {
      columns = static_cast<int>(cells.size());
      if (columns != 1 && columns != 4)
        throw ParseError("series csv line " + std::to_string(line_no) + ": expected 1 or 4 columns");
      if (!header_seen) {
        bool numeric = true;
        try {
          parse_number(trim(cells[0]), line_no);
        } catch (const ParseError&) {
          numeric = false;
        }
        header_seen = true;
        if (!numeric) continue;
      }
    }
    if (static_cast<int>(cells.size()) != columns)
      throw ParseError("series csv line " + std::to_string(line_no) + ": inconsistent column count");
    if (columns == 1) {
      V.push_back(parse_number(trim(cells[0]), line_no));
      continue;
    }
    V.push_back(parse_number(trim(cells[1]), line_no));
    std::string h = trim(cells[2]), i = trim(cells[3]);
    if (h.empty() != i.empty())
      throw ParseError("series csv line " + std::to_string(line_no) + ": H and I must both be present or empty");
    if (!h.empty()) {
      H.push_back(parse_number(h, line_no));
      I.push_back(parse_number(i, line_no));
    }
  }
  s.V = Eigen::Map<Eigen::ArrayXd>(V.data(), static_cast<Eigen::Index>(V.size()));
  s.H = Eigen::Map<Eigen::ArrayXd>(H.data(), static_cast<Eigen::Index>(H.size()));
  s.I = Eigen::Map<Eigen::ArrayXd>(I.data(), static_cast<Eigen::Index>(I.size()));
  return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.flush()) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace genou
