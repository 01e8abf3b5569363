#include "ioda/ood/knn.hpp"

#include "ioda/core/json_io.hpp"

namespace ioda::ood {

KnnDetector::KnnDetector(std::shared_ptr<const store::StateIndex> index, double delta, double quantile)
    : index_(std::move(index)), delta_(delta), quantile_(quantile) {
  if (!index_ || index_->size() < 2) throw Error("KnnDetector: need at least two reference states");
}

double KnnDetector::score(const StateVector& s) const { return index_->nearest(s).distance; }

KnnDetector fit_knn(std::shared_ptr<const store::StateIndex> index, double quantile) {
  if (!index || index->size() < 2) throw Error("fit_knn: need at least two reference states");
  std::vector<double> loo(index->size());
  for (std::size_t i = 0; i < index->size(); ++i) loo[i] = index->nearest_excluding(index->point(i), i).distance;
  const double delta = nearest_rank_quantile(std::move(loo), quantile);
  return KnnDetector(std::move(index), delta, quantile);
}

void save_knn(const KnnDetector& d, const std::filesystem::path& path) {
  write_json_file(path, json{{"format", "ioda.knn"},
                             {"version", 1},
                             {"delta", d.threshold()},
                             {"quantile", d.quantile()},
                             {"metric", store::to_string(d.index().metric())},
                             {"weights", to_json(d.index().weights())},
                             {"training_digest", d.training_digest}});
}

KnnDetector load_knn(const std::filesystem::path& path, std::shared_ptr<const store::StateIndex> index,
                     const std::string& archive_digest) {
  const json j = read_json_file(path);
  if (j.value("format", "") != "ioda.knn" || j.value("version", 0) != 1)
    throw ArchiveError("load_knn: not a version-1 knn detector file");
  const std::string digest = j.value("training_digest", "");
  if (!digest.empty() && digest != archive_digest) throw ArchiveError("load_knn: archive digest mismatch");
  if (!index || vector_from_json(require_field(j, "weights")) != index->weights())
    throw ArchiveError("load_knn: index metric does not match");
  KnnDetector d(std::move(index), require_field(j, "delta").get<double>(), require_field(j, "quantile").get<double>());
  d.training_digest = digest;
  return d;
}

}  // namespace ioda::ood
