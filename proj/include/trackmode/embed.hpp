#ifndef TRACKMODE_EMBED_HPP
#define TRACKMODE_EMBED_HPP

#include <cstdint>
#include <vector>

#include "trackmode/tensor.hpp"

namespace trackmode {

/// One embedding matrix per feature, all sharing the embedding dimension.
/// Row r of feature f's matrix is the vector representing interval r of
/// feature f; the embedded input is the sum of the selected rows.
struct EmbeddingTable {
    std::vector<Tensor> per_feature; // each n_intervals x dim

    size_t n_features() const { return per_feature.size(); }
    size_t dim() const { return per_feature.empty() ? 0 : per_feature.front().cols; }
};

/// Uniform init on [0, 0.001], deterministic per seed.
EmbeddingTable init_embedding(const std::vector<size_t>& feature_bin_counts, size_t dim,
                              uint64_t seed);

/// Indicator-vector route: sum over features of (indicator row-vector times
/// feature matrix). Indicators are one-hot or fuzzy weights summing to 1.
Vec embed_matmul(const std::vector<Vec>& onehots, const EmbeddingTable& table);

/// Row-lookup route: sum of the selected rows, added in feature order.
/// Bit-identical to embed_matmul on the corresponding one-hot vectors.
Vec embed_lookup(const std::vector<size_t>& indices, const EmbeddingTable& table);

/// Gradient of embed_matmul w.r.t. the table: per feature, the outer
/// product of its indicator with the upstream gradient.
EmbeddingTable embed_backward(const Vec& upstream_grad, const std::vector<Vec>& onehots,
                              const EmbeddingTable& table);

} // namespace trackmode

#endif // TRACKMODE_EMBED_HPP
