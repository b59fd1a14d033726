#include "ausyn/report.hpp"

#include "ausyn/version.hpp"
#include "json.hpp"

namespace ausyn {

using ordered_json = nlohmann::ordered_json;

struct ReportBuilder::Impl {
  ordered_json doc;
};

namespace {

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json agreement_json(const AgreementReport& r) {
  ordered_json j;
  j["kappa"] = r.kappa;
  j["accuracy"] = r.accuracy;
  j["p_observed"] = r.p_observed;
  j["p_expected"] = r.p_expected;
  j["precision"] = r.precision ? ordered_json(*r.precision)
                               : ordered_json(nullptr);
  j["recall"] = r.recall ? ordered_json(*r.recall) : ordered_json(nullptr);
  j["n"] = r.n;
  return j;
}

}  // namespace

ReportBuilder::ReportBuilder(const ReportMeta& meta)
    : impl_(std::make_unique<Impl>()) {
  // The worker count is deliberately absent: parallelism must never change
  // the result, so two runs differing only in --jobs stay byte-identical.
  ordered_json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["command"] = meta.command;
  manifest["seed"] = meta.seed;
  manifest["inputs"] = meta.inputs;
  impl_->doc["manifest"] = std::move(manifest);
}

ReportBuilder::~ReportBuilder() = default;
ReportBuilder::ReportBuilder(ReportBuilder&&) noexcept = default;
ReportBuilder& ReportBuilder::operator=(ReportBuilder&&) noexcept = default;

void ReportBuilder::add_string(const std::string& section,
                               const std::string& key,
                               const std::string& value) {
  impl_->doc[section][key] = value;
}

void ReportBuilder::add_number(const std::string& section,
                               const std::string& key, double value) {
  impl_->doc[section][key] = value;
}

void ReportBuilder::add_integer(const std::string& section,
                                const std::string& key, std::int64_t value) {
  impl_->doc[section][key] = value;
}

void ReportBuilder::add_bool(const std::string& section,
                             const std::string& key, bool value) {
  impl_->doc[section][key] = value;
}

void ReportBuilder::add_series(const std::string& section,
                               const std::string& key,
                               const std::vector<double>& values) {
  impl_->doc[section][key] = values;
}

void ReportBuilder::add_matrix(const std::string& section,
                               const std::string& key,
                               const Eigen::MatrixXd& m) {
  impl_->doc[section][key] = matrix_json(m);
}

void ReportBuilder::add_confusion(const std::string& key,
                                  const ConfusionCounts& c) {
  ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["tn"] = c.tn;
  impl_->doc["confusion"][key] = std::move(j);
}

void ReportBuilder::add_agreement(const std::string& key,
                                  const AgreementReport& r) {
  impl_->doc["agreement"][key] = agreement_json(r);
}

void ReportBuilder::add_rank_sum(const std::string& key,
                                 const RankSumResult& r, std::size_t n_a,
                                 std::size_t n_b, const std::string& note) {
  ordered_json j;
  j["w"] = r.w;
  j["p"] = r.p;
  j["n_a"] = n_a;
  j["n_b"] = n_b;
  j["note"] = note;
  impl_->doc["rank_sum"][key] = std::move(j);
}

void ReportBuilder::add_cooccurrence(const std::string& key,
                                     const CooccurrenceSummary& s) {
  ordered_json j;
  ordered_json counts;
  for (int p = 0; p < kPatternCount; ++p)
    counts[ausyn::to_string(static_cast<CooccurrencePattern>(p))] =
        s.counts[static_cast<std::size_t>(p)];
  j["counts"] = std::move(counts);
  j["ties"] = s.ties;
  j["total_events"] = s.total_events();
  j["condition"] = ausyn::to_string(s.condition);
  j["modality"] = ausyn::to_string(s.modality);
  impl_->doc["cooccurrence"][key] = std::move(j);
}

void ReportBuilder::add_onset_profile(const std::string& key,
                                      const OnsetProfile& p) {
  ordered_json j;
  j["pre_s"] = p.pre_s;
  j["dur_s"] = p.dur_s;
  j["rate_hz"] = p.rate_hz;
  j["n_events"] = p.n_events;
  j["probabilities"] = p.probabilities;
  impl_->doc["onset_profile"][key] = std::move(j);
}

void ReportBuilder::add_vaf_curve(const VafCurve& curve) {
  ordered_json j;
  ordered_json per_k = ordered_json::array();
  for (const auto& [k, v] : curve.per_k) {
    ordered_json entry;
    entry["k"] = k;
    entry["vaf"] = v;
    per_k.push_back(std::move(entry));
  }
  j["per_k"] = std::move(per_k);
  j["selected_k"] = curve.selected_k;
  j["threshold"] = curve.threshold;
  j["reached"] = curve.reached;
  impl_->doc["vaf_curve"] = std::move(j);
}

void ReportBuilder::add_factorization(const std::string& key,
                                      const NnmfResult& r) {
  ordered_json j;
  j["vaf"] = r.vaf;
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["weights"] = matrix_json(r.w);
  impl_->doc["factorization"][key] = std::move(j);
}

void ReportBuilder::add_synergy_match(const std::string& key,
                                      const SynergyMatch& m) {
  ordered_json j;
  ordered_json pairs = ordered_json::array();
  for (const auto& [a, b] : m.pairing) {
    ordered_json p;
    p["a"] = a;
    p["b"] = b;
    p["score"] = m.scores(a, b);
    pairs.push_back(std::move(p));
  }
  j["pairing"] = std::move(pairs);
  j["method"] = m.method;
  j["scores"] = matrix_json(m.scores);
  impl_->doc["synergy_match"][key] = std::move(j);
}

void ReportBuilder::add_assignment(const ComponentAssignment& a) {
  ordered_json j;
  j["au6_component"] = a.au6_component;
  j["au12_component"] = a.au12_component;
  j["other_component"] = a.other_component;
  j["au6_score"] = a.au6_score;
  j["au12_score"] = a.au12_score;
  j["scores"] = matrix_json(a.scores);
  impl_->doc["assignment"] = std::move(j);
}

void ReportBuilder::add_delay(const DelayEstimate& d) {
  ordered_json j;
  j["au"] = d.au;
  j["lag_samples"] = d.lag_samples;
  j["lag_ms"] = d.lag_ms;
  j["correlation"] = d.correlation;
  impl_->doc["delays"][d.au] = std::move(j);
}

void ReportBuilder::add_cascade(const CascadeResult& c) {
  ordered_json j;
  j["skipped"] = c.skipped;
  if (!c.skipped) {
    j["vaf"] = c.factorization.vaf;
    j["iterations"] = c.factorization.iterations;
    j["weights"] = matrix_json(c.factorization.w);
  }
  impl_->doc["cascade"] = std::move(j);
}

std::string ReportBuilder::to_string() const {
  return impl_->doc.dump(2) + "\n";
}

}  // namespace ausyn
