#include "pairinfer/dataset.hpp"

#include <cmath>
#include <sstream>

#include "pairinfer/error.hpp"

namespace pairinfer {

namespace {

const char* kMwanzaProvenance =
    "Mwanza, Tanzania retrospective cohort of 1802 stable heterosexual couples followed for two years "
    "(Hugonnet et al. 2002, J Acquir Immune Defic Syndr 30:73-80)";

std::string time_label(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

template <typename Counts>
std::int64_t check_counts(const std::vector<double>& times, const std::vector<Counts>& counts) {
  if (times.size() != counts.size()) {
    throw ParseError("observation times and counts differ in length");
  }
  if (times.size() < 2) {
    throw ParseError("at least two observation times required");
  }
  const std::int64_t n = counts.front().total();
  if (n <= 0) throw ParseError("total number of pairs must be positive");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& c = counts[i];
    bool negative = c.ss < 0 || c.si < 0 || c.ii < 0;
    if constexpr (std::is_same_v<Counts, GenderPairCounts>) negative = negative || c.is < 0;
    if (negative) throw ParseError("negative pair count at time " + time_label(times[i]));
    if (c.total() != n) {
      throw ParseError("pair counts at time " + time_label(times[i]) + " sum to " + std::to_string(c.total()) +
                       ", expected N = " + std::to_string(n));
    }
  }
  return n;
}

}  // namespace

Dataset::Dataset(std::vector<double> times, std::vector<PairCounts> counts, std::string provenance)
    : kind_(ModelKind::nongender),
      times_(std::move(times)),
      counts_(std::move(counts)),
      provenance_(std::move(provenance)) {
  n_ = check_counts(times_, counts_);
  validate_times();
}

Dataset::Dataset(std::vector<double> times, std::vector<GenderPairCounts> counts, std::string provenance)
    : kind_(ModelKind::gender),
      times_(std::move(times)),
      gender_counts_(std::move(counts)),
      provenance_(std::move(provenance)) {
  n_ = check_counts(times_, gender_counts_);
  counts_.reserve(gender_counts_.size());
  for (const auto& g : gender_counts_) counts_.push_back(g.marginal());
  validate_times();
}

void Dataset::validate_times() const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw ParseError("observation time is not finite");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw ParseError("observation times must strictly increase (time " + time_label(times_[i]) + " follows " +
                       time_label(times_[i - 1]) + ")");
    }
  }
}

PairCounts Dataset::counts(std::size_t i) const { return counts_.at(i); }

const GenderPairCounts& Dataset::gender_counts(std::size_t i) const {
  if (!is_gendered()) throw ConfigError("dataset has no gendered counts");
  return gender_counts_.at(i);
}

Dataset Dataset::marginal() const { return Dataset(times_, counts_, provenance_); }

Dataset mwanza_dataset() { return mwanza_gender_dataset().marginal(); }

Dataset mwanza_gender_dataset() {
  return Dataset({0.0, 2.0}, std::vector<GenderPairCounts>{{1742, 22, 21, 17}, {1721, 33, 25, 23}},
                 kMwanzaProvenance);
}

}  // namespace pairinfer
