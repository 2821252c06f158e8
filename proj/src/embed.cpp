#include "trackmode/embed.hpp"

#include <stdexcept>

#include "trackmode/rng.hpp"

namespace trackmode {

EmbeddingTable init_embedding(const std::vector<size_t>& feature_bin_counts, size_t dim,
                              uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("embedding dim must be >= 1");
    Rng rng(seed);
    EmbeddingTable table;
    for (size_t bins : feature_bin_counts) {
        if (bins == 0) throw std::invalid_argument("feature with zero intervals");
        Tensor m(bins, dim);
        for (double& x : m.v) x = rng.next_uniform(0.0, 0.001);
        table.per_feature.push_back(std::move(m));
    }
    return table;
}

Vec embed_matmul(const std::vector<Vec>& onehots, const EmbeddingTable& table) {
    if (onehots.size() != table.n_features())
        throw std::invalid_argument("embed_matmul: feature count mismatch");
    Vec out(table.dim(), 0.0);
    for (size_t f = 0; f < onehots.size(); ++f) {
        const Tensor& m = table.per_feature[f];
        if (onehots[f].size() != m.rows)
            throw std::invalid_argument("embed_matmul: indicator length mismatch");
        for (size_t r = 0; r < m.rows; ++r) {
            const double w = onehots[f][r];
            if (w == 0.0) continue;
            const double* row = m.row(r);
            if (w == 1.0) {
                for (size_t c = 0; c < m.cols; ++c) out[c] += row[c];
            } else {
                for (size_t c = 0; c < m.cols; ++c) out[c] += w * row[c];
            }
        }
    }
    return out;
}

Vec embed_lookup(const std::vector<size_t>& indices, const EmbeddingTable& table) {
    if (indices.size() != table.n_features())
        throw std::invalid_argument("embed_lookup: feature count mismatch");
    Vec out(table.dim(), 0.0);
    for (size_t f = 0; f < indices.size(); ++f) {
        const Tensor& m = table.per_feature[f];
        if (indices[f] >= m.rows) throw std::invalid_argument("embed_lookup: index out of bounds");
        const double* row = m.row(indices[f]);
        for (size_t c = 0; c < m.cols; ++c) out[c] += row[c];
    }
    return out;
}

EmbeddingTable embed_backward(const Vec& upstream_grad, const std::vector<Vec>& onehots,
                              const EmbeddingTable& table) {
    if (onehots.size() != table.n_features())
        throw std::invalid_argument("embed_backward: feature count mismatch");
    if (upstream_grad.size() != table.dim())
        throw std::invalid_argument("embed_backward: upstream gradient length mismatch");
    EmbeddingTable grads;
    for (size_t f = 0; f < onehots.size(); ++f) {
        const Tensor& m = table.per_feature[f];
        if (onehots[f].size() != m.rows)
            throw std::invalid_argument("embed_backward: indicator length mismatch");
        Tensor g(m.rows, m.cols);
        for (size_t r = 0; r < m.rows; ++r) {
            const double w = onehots[f][r];
            if (w == 0.0) continue; // unselected rows stay exactly zero
            double* gr = g.row(r);
            for (size_t c = 0; c < m.cols; ++c) gr[c] = w * upstream_grad[c];
        }
        grads.per_feature.push_back(std::move(g));
    }
    return grads;
}

} // namespace trackmode
