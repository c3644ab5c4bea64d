// Linear models of regional outcomes on flow measures: OLS with year fixed
// effects, cluster-robust (CR1) covariance and joint Wald tests.
#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodgeflow/complex.hpp"

namespace hodgeflow {

enum class CovarianceType { cluster_robust, hc1, classical };

const char* to_string(CovarianceType type);

struct WaldTest {
  double statistic = 0.0;  // F
  int df_numerator = 0;
  double df_denominator = 0.0;
  double p_value = 1.0;
  std::vector<std::string> columns;
};

struct RegressionResult {
  std::string outcome;
  std::vector<std::string> names;
  Vector coefficients;
  Matrix covariance;
  Vector standard_errors;
  double r_squared = 0.0;
  std::size_t observations = 0;
  std::size_t clusters = 0;
  CovarianceType covariance_type = CovarianceType::cluster_robust;
  double small_sample_factor = 1.0;
  double inference_df = 0.0;  // G - 1 when clustered, N - K otherwise
  bool year_fixed_effects = false;
  std::optional<WaldTest> wald;  // joint test of the flow predictors

  std::optional<std::size_t> index_of(const std::string& name) const;
  // Two-sided p-value of a coefficient from t(inference_df).
  double p_value(std::size_t index) const;
};

class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, std::vector<std::string> columns)
      : std::runtime_error(what), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

// OLS by column-pivoted QR. `clusters` holds one cluster key per row and is
// required (at least two distinct keys) for cluster_robust covariance.
//   CR1: V = G/(G-1) * (N-1)/(N-K) * B M B,  B = (X'X)^-1,  M = sum_g X_g'e_g e_g'X_g
//   HC1: V = N/(N-K) * B (sum_i e_i^2 x_i x_i') B
RegressionResult fit_ols(const Matrix& x, const Vector& y, std::vector<std::string> names,
                         const std::vector<std::string>& clusters = {},
                         CovarianceType type = CovarianceType::cluster_robust);

// F = (Rb)'(R V R')^-1 (Rb) / q on df (q, inference_df).
WaldTest wald_test(const RegressionResult& result, const std::vector<std::string>& columns);

inline const std::vector<std::string> kFlowColumns = {"g_bar", "h_bar", "r_bar"};

// The joint test of g_bar, h_bar and r_bar.
WaldTest wald_flow_test(const RegressionResult& result);

struct PanelRow {
  std::string region;  // cluster key
  int year = 0;
  std::map<std::string, double> values;  // absent = missing
};

struct ModelSpec {
  std::string outcome;
  std::vector<std::string> flows = kFlowColumns;
  std::vector<std::string> controls;
  bool year_fixed_effects = true;
  std::optional<int> reference_year;  // default: earliest year among fitted rows
  CovarianceType covariance = CovarianceType::cluster_robust;
};

// Rows missing the outcome or any regressor are dropped. Design columns are
// the flows, the controls, "const", then one "year_<y>" dummy per
// non-reference year. The flow Wald test is attached when all three flow
// columns are in the model.
RegressionResult fit_panel(const std::vector<PanelRow>& panel, const ModelSpec& spec);

struct PanelParseResult {
  std::vector<PanelRow> rows;
  std::vector<std::string> columns;  // value columns, in file order
  std::size_t skipped = 0;
};

// Header must contain region and year; every other column is numeric with
// blank, "NA" or "." meaning missing.
PanelParseResult parse_panel(std::istream& in);

// Estimates with stars (* 0.1, ** 0.05, *** 0.01, two-tailed), clustered SEs in
// parentheses, fixed-effect flag, N, R-squared and the Wald block.
std::string format_regression_table(const std::vector<RegressionResult>& models);

// Machine-readable companion: model,term,estimate,std_error,p_value rows.
std::string regression_csv(const std::vector<RegressionResult>& models);

}  // namespace hodgeflow
