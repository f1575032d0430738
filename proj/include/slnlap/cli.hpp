#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slnlap/types.hpp"

namespace slnlap::cli {

enum class ReportFormat { csv, json };

// One report cell; doubles are rendered in scientific notation with seven
// significant digits and a bare exponent ("3.360000e-4").
using Cell = std::variant<double, std::int64_t, std::string>;
using Row = std::vector<std::pair<std::string, Cell>>;

std::string format_sci(double v);

// columns names the CSV header when rows is empty (JSON then emits []).
std::string emit_report(const std::vector<Row>& rows, ReportFormat format,
                        const std::vector<std::string>& columns = {});

struct RunConfig {
  std::string subcommand;
  std::string model_path;
  std::vector<double> theta_list;
  std::vector<double> x_list;
  std::string method;
  std::int64_t reps = 10000;
  std::uint64_t seed = 42;
  int gs_terms = 14;
  ReportFormat output_format = ReportFormat::csv;
  std::optional<std::string> output_path;
};

// Parses argv-style arguments and executes the subcommand. Returns 0 on
// success, 2 on usage errors (one-line diagnostic on err), 1 on computation
// errors (module error name on err). Output is byte-stable for a fixed
// configuration; --output writes atomically via a temp file.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace slnlap::cli
