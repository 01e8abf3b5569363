#pragma once

#include "ioda/ood/detector.hpp"
#include "ioda/store/state_index.hpp"

#include <filesystem>
#include <memory>

namespace ioda::ood {

/// Distance-threshold baseline: score is the distance to the nearest reference state.
class KnnDetector final : public OodDetector {
 public:
  KnnDetector(std::shared_ptr<const store::StateIndex> index, double delta, double quantile);

  std::string kind() const override { return "knn"; }
  std::size_t state_dim() const override { return index_->dim(); }
  double score(const StateVector& s) const override;
  double threshold() const override { return delta_; }

  double quantile() const { return quantile_; }
  const store::StateIndex& index() const { return *index_; }
  std::string training_digest;

 private:
  std::shared_ptr<const store::StateIndex> index_;
  double delta_;
  double quantile_;
};

/// delta = q-quantile of leave-one-out nearest distances over the indexed states.
KnnDetector fit_knn(std::shared_ptr<const store::StateIndex> index, double quantile = 0.99);

void save_knn(const KnnDetector& detector, const std::filesystem::path& path);
/// The reference index must be rebuilt from the archive the detector was fitted on.
KnnDetector load_knn(const std::filesystem::path& path, std::shared_ptr<const store::StateIndex> index,
                     const std::string& archive_digest);

}  // namespace ioda::ood
