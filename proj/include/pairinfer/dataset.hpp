#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pairinfer/types.hpp"

namespace pairinfer {

/// Cohort observations: strictly increasing times (years) with the pair-state
/// counts seen at each. The first observation is the initial state; times are
/// measured relative to it.
class Dataset {
 public:
  Dataset(std::vector<double> times, std::vector<PairCounts> counts, std::string provenance = {});
  Dataset(std::vector<double> times, std::vector<GenderPairCounts> counts, std::string provenance = {});

  ModelKind kind() const { return kind_; }
  bool is_gendered() const { return kind_ == ModelKind::gender; }

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  /// Time since the first observation.
  double elapsed(std::size_t i) const { return times_[i] - times_.front(); }
  std::int64_t total_pairs() const { return n_; }
  const std::string& provenance() const { return provenance_; }

  /// Non-gendered view; gendered observations are collapsed (is + si).
  PairCounts counts(std::size_t i) const;
  /// Throws ConfigError for a non-gendered dataset.
  const GenderPairCounts& gender_counts(std::size_t i) const;

  /// Dataset with gendered discordant counts merged.
  Dataset marginal() const;

 private:
  void validate_times() const;

  ModelKind kind_;
  std::vector<double> times_;
  std::vector<PairCounts> counts_;
  std::vector<GenderPairCounts> gender_counts_;
  std::int64_t n_ = 0;
  std::string provenance_;
};

/// Table 1 of the Mwanza couples cohort (N = 1802, two observations two years apart).
Dataset mwanza_dataset();
Dataset mwanza_gender_dataset();

}  // namespace pairinfer
