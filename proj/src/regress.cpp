#include "hodgeflow/regress.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <Eigen/QR>
#include <fmt/format.h>

#include "hodgeflow/csv.hpp"

namespace hodgeflow {

const char* to_string(CovarianceType type) {
  switch (type) {
    case CovarianceType::cluster_robust: return "CR1 cluster-robust";
    case CovarianceType::hc1: return "HC1 heteroskedasticity-robust";
    case CovarianceType::classical: return "classical";
  }
  return "?";
}

std::optional<std::size_t> RegressionResult::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

double RegressionResult::p_value(std::size_t index) const {
  const double se = standard_errors(static_cast<Eigen::Index>(index));
  if (!(se > 0.0) || !(inference_df > 0.0)) return std::nan("");
  const double t = coefficients(static_cast<Eigen::Index>(index)) / se;
  boost::math::students_t dist(inference_df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

RegressionResult fit_ols(const Matrix& x, const Vector& y, std::vector<std::string> names,
                         const std::vector<std::string>& clusters, CovarianceType type) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n) throw std::invalid_argument("outcome and design differ in length");
  if (static_cast<Eigen::Index>(names.size()) != k) {
    throw std::invalid_argument("one name per design column required");
  }
  if (n <= k) {
    throw std::invalid_argument(fmt::format("{} observations for {} regressors", n, k));
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::vector<std::string> collinear;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      collinear.push_back(names[static_cast<std::size_t>(perm(i))]);
    }
    std::sort(collinear.begin(), collinear.end());
    std::string list;
    for (const auto& c : collinear) list += (list.empty() ? "" : ", ") + c;
    throw RankDeficientError("design matrix is rank deficient; collinear columns: " + list,
                             collinear);
  }

  RegressionResult out;
  out.names = std::move(names);
  out.coefficients = qr.solve(y);
  out.observations = static_cast<std::size_t>(n);
  out.covariance_type = type;

  const Vector resid = y - x * out.coefficients;
  const double ssr = resid.squaredNorm();
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  out.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

  // (X'X)^-1 = P R^-1 R^-T P'.
  const Matrix r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  const Matrix bread_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Matrix bread = perm * bread_perm * perm.transpose();

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  switch (type) {
    case CovarianceType::cluster_robust: {
      if (static_cast<Eigen::Index>(clusters.size()) != n) {
        throw std::invalid_argument("one cluster key per row required");
      }
      std::map<std::string, Vector> scores;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = scores.try_emplace(clusters[static_cast<std::size_t>(i)],
                                                 Vector::Zero(k));
        it->second += x.row(i).transpose() * resid(i);
      }
      const auto g = static_cast<double>(scores.size());
      if (scores.size() < 2) throw std::invalid_argument("cluster-robust covariance needs at least 2 clusters");
      Matrix meat = Matrix::Zero(k, k);
      for (const auto& [key, s] : scores) meat += s * s.transpose();
      out.clusters = scores.size();
      out.small_sample_factor = g / (g - 1.0) * (nd - 1.0) / (nd - kd);
      out.covariance = out.small_sample_factor * bread * meat * bread;
      out.inference_df = g - 1.0;
      break;
    }
    case CovarianceType::hc1: {
      const Matrix weighted = x.array().colwise() * resid.array();
      const Matrix meat = weighted.transpose() * weighted;
      out.small_sample_factor = nd / (nd - kd);
      out.covariance = out.small_sample_factor * bread * meat * bread;
      out.inference_df = nd - kd;
      break;
    }
    case CovarianceType::classical: {
      out.covariance = ssr / (nd - kd) * bread;
      out.inference_df = nd - kd;
      break;
    }
  }
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

WaldTest wald_test(const RegressionResult& result, const std::vector<std::string>& columns) {
  const auto q = static_cast<Eigen::Index>(columns.size());
  if (q == 0) throw std::invalid_argument("Wald test needs at least one column");
  std::vector<Eigen::Index> idx;
  for (const auto& c : columns) {
    auto i = result.index_of(c);
    if (!i) throw std::invalid_argument("model has no column '" + c + "'");
    idx.push_back(static_cast<Eigen::Index>(*i));
  }
  Vector rb(q);
  Matrix rvr(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    rb(a) = result.coefficients(idx[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < q; ++b) {
      rvr(a, b) = result.covariance(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::LDLT<Matrix> ldlt(rvr);
  const double scale = rvr.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || scale <= 0.0 ||
      ldlt.vectorD().minCoeff() <= 1e-14 * scale) {
    throw std::runtime_error("restricted covariance is singular");
  }
  WaldTest w;
  w.columns = columns;
  w.df_numerator = static_cast<int>(q);
  w.df_denominator = result.inference_df;
  w.statistic = rb.dot(ldlt.solve(rb)) / static_cast<double>(q);
  boost::math::fisher_f dist(static_cast<double>(q), w.df_denominator);
  w.p_value = boost::math::cdf(boost::math::complement(dist, w.statistic));
  return w;
}

WaldTest wald_flow_test(const RegressionResult& result) { return wald_test(result, kFlowColumns); }

RegressionResult fit_panel(const std::vector<PanelRow>& panel, const ModelSpec& spec) {
  std::vector<std::string> regressors = spec.flows;
  regressors.insert(regressors.end(), spec.controls.begin(), spec.controls.end());

  std::vector<const PanelRow*> rows;
  for (const auto& row : panel) {
    bool complete = row.values.count(spec.outcome) > 0;
    for (const auto& r : regressors) complete = complete && row.values.count(r) > 0;
    if (complete) rows.push_back(&row);
  }
  if (rows.empty()) throw std::invalid_argument("no complete rows for outcome '" + spec.outcome + "'");

  std::set<int> years;
  for (const auto* row : rows) years.insert(row->year);
  const int reference = spec.reference_year.value_or(*years.begin());
  if (spec.year_fixed_effects && !years.count(reference)) {
    throw std::invalid_argument(fmt::format("reference year {} not in fitted rows", reference));
  }
  std::vector<int> dummy_years;
  if (spec.year_fixed_effects) {
    for (int y : years) {
      if (y != reference) dummy_years.push_back(y);
    }
  }

  std::vector<std::string> names = regressors;
  names.emplace_back("const");
  for (int y : dummy_years) names.push_back(fmt::format("year_{}", y));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(names.size());
  Matrix x(n, k);
  Vector yv(n);
  std::vector<std::string> clusters;
  for (Eigen::Index i = 0; i < n; ++i) {
    const PanelRow& row = *rows[static_cast<std::size_t>(i)];
    yv(i) = row.values.at(spec.outcome);
    Eigen::Index c = 0;
    for (const auto& r : regressors) x(i, c++) = row.values.at(r);
    x(i, c++) = 1.0;
    for (int y : dummy_years) x(i, c++) = row.year == y ? 1.0 : 0.0;
    clusters.push_back(row.region);
  }
  RegressionResult result = fit_ols(x, yv, std::move(names), clusters, spec.covariance);
  result.outcome = spec.outcome;
  result.year_fixed_effects = spec.year_fixed_effects;
  const bool has_flows = std::all_of(kFlowColumns.begin(), kFlowColumns.end(), [&](const auto& c) {
    return result.index_of(c).has_value();
  });
  if (has_flows) result.wald = wald_flow_test(result);
  return result;
}

PanelParseResult parse_panel(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw std::runtime_error("missing header row");
  const CsvHeader header(fields);
  const std::size_t c_region = header.require("region");
  const std::size_t c_year = header.require("year");

  PanelParseResult out;
  std::vector<std::size_t> value_cols;
  for (std::size_t i = 0; i < header.names().size(); ++i) {
    if (i != c_region && i != c_year) {
      value_cols.push_back(i);
      out.columns.push_back(header.names()[i]);
    }
  }
  while (reader.next(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    auto get = [&](std::size_t i) { return i < fields.size() ? trim(fields[i]) : std::string(); };
    PanelRow row;
    row.region = get(c_region);
    const auto year = parse_integer(get(c_year));
    if (row.region.empty() || !year) {
      ++out.skipped;
      continue;
    }
    row.year = static_cast<int>(*year);
    bool bad = false;
    for (std::size_t j = 0; j < value_cols.size(); ++j) {
      const std::string text = get(value_cols[j]);
      if (text.empty() || text == "NA" || text == ".") continue;
      const auto v = parse_double(text);
      if (!v) {
        bad = true;
        break;
      }
      row.values[out.columns[j]] = *v;
    }
    if (bad) {
      ++out.skipped;
      continue;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string stars(double p) {
  if (!(p == p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace

std::string format_regression_table(const std::vector<RegressionResult>& models) {
  std::vector<std::string> terms;
  for (const auto& m : models) {
    for (const auto& name : m.names) {
      if (name.rfind("year_", 0) == 0) continue;
      if (std::find(terms.begin(), terms.end(), name) == terms.end()) terms.push_back(name);
    }
  }
  // Constant last, as in published tables.
  if (auto it = std::find(terms.begin(), terms.end(), "const"); it != terms.end()) {
    terms.erase(it);
    terms.emplace_back("const");
  }

  constexpr int kLabel = 24;
  constexpr int kCell = 16;
  std::string out = fmt::format("{:<{}}", "", kLabel);
  for (std::size_t i = 0; i < models.size(); ++i) {
    out += fmt::format("{:>{}}", fmt::format("({})", i + 1), kCell);
  }
  out += '\n' + fmt::format("{:<{}}", "DV", kLabel);
  for (const auto& m : models) out += fmt::format("{:>{}}", m.outcome, kCell);
  out += '\n';

  for (const auto& term : terms) {
    std::string est = fmt::format("{:<{}}", term == "const" ? "Constant" : term, kLabel);
    std::string se = fmt::format("{:<{}}", "", kLabel);
    for (const auto& m : models) {
      if (auto i = m.index_of(term)) {
        const auto e = static_cast<Eigen::Index>(*i);
        est += fmt::format("{:>{}}", fmt::format("{:.2f}{:<3}", m.coefficients(e), stars(m.p_value(*i))), kCell);
        se += fmt::format("{:>{}}", fmt::format("({:.2f})   ", m.standard_errors(e)), kCell);
      } else {
        est += fmt::format("{:>{}}", "", kCell);
        se += fmt::format("{:>{}}", "", kCell);
      }
    }
    out += est + '\n' + se + '\n';
  }

  auto row = [&](const std::string& label, auto cell) {
    out += fmt::format("{:<{}}", label, kLabel);
    for (const auto& m : models) out += fmt::format("{:>{}}", cell(m), kCell);
    out += '\n';
  };
  row("Year fixed effects", [](const RegressionResult& m) { return m.year_fixed_effects ? "Yes" : "No"; });
  row("N", [](const RegressionResult& m) { return std::to_string(m.observations); });
  row("R-squared", [](const RegressionResult& m) { return fmt::format("{:.4f}", m.r_squared); });
  row("Clusters", [](const RegressionResult& m) { return std::to_string(m.clusters); });

  out += "Wald tests for flow predictors\n";
  row("F", [](const RegressionResult& m) {
    return m.wald ? fmt::format("{:.2f}", m.wald->statistic) : std::string("-");
  });
  row("d.f.", [](const RegressionResult& m) {
    return m.wald ? fmt::format("{:.2f}", static_cast<double>(m.wald->df_numerator)) : std::string("-");
  });
  row("p-value", [](const RegressionResult& m) {
    return m.wald ? fmt::format("{:.4f}", m.wald->p_value) : std::string("-");
  });
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i].wald) {
      out += fmt::format("Note: model ({}) has no flow columns; Wald block omitted.\n", i + 1);
    }
  }
  if (!models.empty()) {
    out += fmt::format("Standard errors: {}; Wald denominator d.f. = {}.\n",
                       to_string(models.front().covariance_type),
                       models.front().covariance_type == CovarianceType::cluster_robust
                           ? "G - 1"
                           : "N - K");
  }
  out += "* p<0.1, ** p<0.05, *** p<0.01 (two-tailed)\n";
  return out;
}

std::string regression_csv(const std::vector<RegressionResult>& models) {
  std::string out = "model,outcome,term,estimate,std_error,p_value\n";
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& r = models[m];
    for (std::size_t i = 0; i < r.names.size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      out += csv_row({std::to_string(m + 1), r.outcome, r.names[i],
                      format_double(r.coefficients(e)), format_double(r.standard_errors(e)),
                      format_double(r.p_value(i))});
    }
    if (r.wald) {
      out += csv_row({std::to_string(m + 1), r.outcome, "wald_F",
                      format_double(r.wald->statistic), std::to_string(r.wald->df_numerator),
                      format_double(r.wald->p_value)});
    }
  }
  return out;
}

}  // namespace hodgeflow
