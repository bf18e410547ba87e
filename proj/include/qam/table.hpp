#pragma once

#include <string>
#include <vector>

namespace qam {

// Column-labelled numeric table (time series, sweeps).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

}  // namespace qam
