#ifndef TRACKMODE_TENSOR_HPP
#define TRACKMODE_TENSOR_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace trackmode {

using Vec = std::vector<double>;

/// Dense row-major matrix. Vectors are stored as n x 1 tensors where a
/// named shape matters; plain Vec elsewhere.
struct Tensor {
    size_t rows = 0;
    size_t cols = 0;
    Vec v;

    Tensor() = default;
    Tensor(size_t r, size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

    double* row(size_t r) { return v.data() + r * cols; }
    const double* row(size_t r) const { return v.data() + r * cols; }
    double& at(size_t r, size_t c) { return v[r * cols + c]; }
    double at(size_t r, size_t c) const { return v[r * cols + c]; }
    size_t size() const { return v.size(); }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

/// y = M x (accumulate=false) or y += M x (accumulate=true).
inline void matvec(const Tensor& m, std::span<const double> x, std::span<double> y,
                   bool accumulate = false) {
    if (x.size() != m.cols || y.size() != m.rows)
        throw std::invalid_argument("matvec: shape mismatch");
    for (size_t r = 0; r < m.rows; ++r) {
        const double* mr = m.row(r);
        double acc = 0.0;
        for (size_t c = 0; c < m.cols; ++c) acc += mr[c] * x[c];
        y[r] = accumulate ? y[r] + acc : acc;
    }
}

/// x += Mᵀ y. Row-major friendly: walks each row once.
inline void matvec_transposed_acc(const Tensor& m, std::span<const double> y,
                                  std::span<double> x) {
    if (y.size() != m.rows || x.size() != m.cols)
        throw std::invalid_argument("matvec_transposed_acc: shape mismatch");
    for (size_t r = 0; r < m.rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        const double* mr = m.row(r);
        for (size_t c = 0; c < m.cols; ++c) x[c] += yr * mr[c];
    }
}

/// M += y xᵀ (gradient accumulation for y = M x).
inline void outer_acc(Tensor& m, std::span<const double> y, std::span<const double> x) {
    if (y.size() != m.rows || x.size() != m.cols)
        throw std::invalid_argument("outer_acc: shape mismatch");
    for (size_t r = 0; r < m.rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        double* mr = m.row(r);
        for (size_t c = 0; c < m.cols; ++c) mr[c] += yr * x[c];
    }
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace trackmode

#endif // TRACKMODE_TENSOR_HPP
