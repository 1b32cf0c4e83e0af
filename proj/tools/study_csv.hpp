#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "confcurve/effects.hpp"

namespace confcurve::cli {

/// Malformed or unusable input; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyRow {
  int line = 0;
  std::string id;
  bool has_effect = false;  // estimate/se columns present
  double estimate = 0.0;
  double se = 0.0;
  bool has_counts = false;  // e_t, n_t, e_c, n_c columns present
  Counts counts;
};

/// Parses a study CSV. The header must contain `id` and either
/// `estimate,se` or `e_t,n_t,e_c,n_c` (any column order).
std::vector<StudyRow> read_study_csv(std::istream& in, const std::string& source);

/// Studies for the normal-theory analyses. Rows with only counts are
/// converted to log odds ratios; a zero cell is reported with its line.
std::vector<Study> to_studies(const std::vector<StudyRow>& rows, const std::string& source);

}  // namespace confcurve::cli
