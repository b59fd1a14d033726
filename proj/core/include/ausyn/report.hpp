#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ausyn/cooccur.hpp"
#include "ausyn/labeling.hpp"
#include "ausyn/metrics.hpp"
#include "ausyn/nnmf.hpp"

namespace ausyn {

struct ReportMeta {
  std::string command;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::vector<std::string> inputs;
};

// Assembles the JSON report a tool run emits. Field order follows insertion
// order, numbers render in shortest round-trip form, and nothing volatile
// (timestamps, hostnames) ever enters the document, so a rerun with the same
// inputs reproduces the report byte for byte.
class ReportBuilder {
 public:
  explicit ReportBuilder(const ReportMeta& meta);
  ~ReportBuilder();
  ReportBuilder(ReportBuilder&&) noexcept;
  ReportBuilder& operator=(ReportBuilder&&) noexcept;

  void add_string(const std::string& section, const std::string& key,
                  const std::string& value);
  void add_number(const std::string& section, const std::string& key,
                  double value);
  void add_integer(const std::string& section, const std::string& key,
                   std::int64_t value);
  void add_bool(const std::string& section, const std::string& key,
                bool value);
  void add_series(const std::string& section, const std::string& key,
                  const std::vector<double>& values);
  void add_matrix(const std::string& section, const std::string& key,
                  const Eigen::MatrixXd& m);

  void add_confusion(const std::string& key, const ConfusionCounts& c);
  void add_agreement(const std::string& key, const AgreementReport& r);
  void add_rank_sum(const std::string& key, const RankSumResult& r,
                    std::size_t n_a, std::size_t n_b,
                    const std::string& note);
  void add_cooccurrence(const std::string& key,
                        const CooccurrenceSummary& s);
  void add_onset_profile(const std::string& key, const OnsetProfile& p);
  void add_vaf_curve(const VafCurve& curve);
  void add_factorization(const std::string& key, const NnmfResult& r);
  void add_synergy_match(const std::string& key, const SynergyMatch& m);
  void add_assignment(const ComponentAssignment& a);
  void add_delay(const DelayEstimate& d);
  void add_cascade(const CascadeResult& c);

  std::string to_string() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ausyn
