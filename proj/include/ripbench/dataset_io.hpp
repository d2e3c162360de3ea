#pragma once

#include <iosfwd>
#include <string>

#include "ripbench/core.hpp"

namespace ripbench {

// One row per sample: d feature columns then the label. Optional first line
// "# classes=K" keeps K when some classes are absent; then header x0,...,label.
void write_dataset_csv(std::ostream& os, const LabeledDataset& ds);
LabeledDataset read_dataset_csv(std::istream& is);
void save_dataset_csv(const std::string& path, const LabeledDataset& ds);
LabeledDataset load_dataset_csv(const std::string& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace ripbench
