#include "ripbench/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ripbench {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidInput("csv: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
  const std::size_t d = ds.dim();
  os << "# classes=" << ds.num_classes << '\n';
  for (std::size_t j = 0; j < d; ++j) os << 'x' << j << ',';
  os << "label\n";
  for (const auto& s : ds.samples) {
    for (double v : s.features) os << format_double(v) << ',';
    os << s.label << '\n';
  }
}

LabeledDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("csv: empty dataset file");
  int declared = 0;
  if (line.rfind("# classes=", 0) == 0) {
    declared = std::stoi(line.substr(10));
    if (!std::getline(is, line)) throw InvalidInput("csv: missing header row");
  }
  const std::size_t cols = split_commas(line).size();
  if (cols < 2) throw InvalidInput("csv: dataset needs at least one feature column");
  LabeledDataset ds;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != cols) throw InvalidInput("csv: ragged dataset row");
    LabeledSample s;
    s.features.reserve(cols - 1);
    for (std::size_t j = 0; j + 1 < cols; ++j) s.features.push_back(parse_double(cells[j]));
    s.label = std::stoi(cells.back());
    if (s.label < 0) throw InvalidInput("csv: negative label");
    ds.num_classes = std::max(ds.num_classes, s.label + 1);
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw InvalidInput("csv: dataset has no rows");
  if (declared > 0) {
    if (declared < ds.num_classes) throw InvalidInput("csv: label exceeds declared class count");
    ds.num_classes = declared;
  }
  return ds;
}

void save_dataset_csv(const std::string& path, const LabeledDataset& ds) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_dataset_csv(f, ds);
}

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return read_dataset_csv(f);
}

}  // namespace ripbench
